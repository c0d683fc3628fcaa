"""Discretized-waveguide oracle vs the Markovian effective model."""

import numpy as np
import pytest

from sta_link.continuum import (
    DiscretizedWaveguide,
    evolve_discretized,
    markovian_deviation,
)
from sta_link.dynamics import IntegratorConfig
from sta_link.protocol import ProtocolConfig, effective_emission_trajectory
from sta_link.pulses import ConstantPulsePair, CorrectedPulsePair, WindowedPulses

CFG = IntegratorConfig(method="DOP853", rtol=1e-10, atol=1e-12, max_step=np.inf)


def emission_pulses(v=2.62):
    pair = CorrectedPulsePair.satd_kappa(v, 0.5)
    window = 15.0 / v
    return WindowedPulses(pair, offset=window / 2, window=(0.0, window))


def test_waveguide_validation():
    with pytest.raises(ValueError):
        DiscretizedWaveguide(0.0, 101, 0.5)
    with pytest.raises(ValueError):
        DiscretizedWaveguide(50.0, 100, 0.5)  # even
    with pytest.raises(ValueError):
        DiscretizedWaveguide(50.0, 1, 0.5)
    with pytest.raises(ValueError):
        DiscretizedWaveguide(50.0, 101, -0.1)


def test_waveguide_grid_properties():
    wg = DiscretizedWaveguide(200.0, 4001, 0.5)
    assert wg.delta_omega == pytest.approx(0.05)
    assert wg.omegas[0] == -100.0 and wg.omegas[-1] == 100.0
    assert len(wg.omegas) == 4001
    # flat coupling reproduces the golden-rule rate: 2 pi g_k^2 / delta_omega
    assert 2 * np.pi * wg.coupling**2 / wg.delta_omega == pytest.approx(
        wg.golden_rule_rate, rel=1e-12
    )
    assert wg.recurrence_time == pytest.approx(2 * np.pi / 0.05)


def test_zero_coupling_leaves_waveguide_empty():
    wg = DiscretizedWaveguide(20.0, 101, 0.0)
    traj = evolve_discretized(ConstantPulsePair(0.3, 0.7), wg, 0.0, 2.0, CFG)
    assert traj.waveguide_population.max() == 0.0
    assert not traj.horizon_exceeded


def test_horizon_flag():
    wg = DiscretizedWaveguide(20.0, 11, 0.1)  # recurrence at pi
    traj = evolve_discretized(ConstantPulsePair(0.0, 0.0), wg, 0.0, 4.0, CFG, y0=[0, 0, 1])
    assert traj.horizon_exceeded


def test_golden_rule_decay():
    wg = DiscretizedWaveguide(200.0, 4001, 0.5)
    grid = np.linspace(0.0, 4.0, 81)
    traj = evolve_discretized(
        ConstantPulsePair(0.0, 0.0), wg, 0.0, 4.0, CFG, t_eval=grid, y0=[0, 0, 1]
    )
    exact = np.exp(-wg.golden_rule_rate * grid)
    p_c = traj.populations[:, 2]
    assert np.max(np.abs(p_c - exact)) < 0.01
    early = exact >= 0.05
    assert np.max(np.abs(p_c[early] - exact[early]) / exact[early]) < 0.01


def test_discretized_model_is_unitary():
    wg = DiscretizedWaveguide(50.0, 501, 0.5)
    traj = evolve_discretized(emission_pulses(), wg, 0.0, 8.0, CFG)
    assert np.max(np.abs(traj.norms - 1.0)) < 1e-9


def test_markovian_deviation_identical_is_zero():
    cfg = ProtocolConfig.paper_lossless()
    grid = np.linspace(0.0, 30.0 / 2.62, 40)
    eff = effective_emission_trajectory(cfg, grid)
    dev = markovian_deviation(eff, _as_continuum(eff))
    assert dev == 0.0


def _as_continuum(eff):
    from sta_link.continuum import ContinuumTrajectory

    return ContinuumTrajectory(
        times=eff.times.copy(),
        amps=eff.amps.copy(),
        waveguide_population=eff.leak_raw.copy(),
        norms=np.ones_like(eff.times),
        horizon_exceeded=False,
    )


def test_markovian_deviation_rejects_grid_mismatch():
    cfg = ProtocolConfig.paper_lossless()
    grid = np.linspace(0.0, 30.0 / 2.62, 40)
    eff = effective_emission_trajectory(cfg, grid)
    disc = _as_continuum(eff)
    disc.times = disc.times + 1e-3
    with pytest.raises(ValueError):
        markovian_deviation(eff, disc)


def test_bandwidth_independence():
    # doubling the band at fixed mode spacing barely moves the delivered population
    T = 30.0 / 2.62
    grid = np.array([0.0, T])
    fidelities = []
    for omega_max, n_modes in ((50.0, 1001), (100.0, 2001)):
        wg = DiscretizedWaveguide(omega_max, n_modes, 0.5)
        assert wg.delta_omega == pytest.approx(0.05)
        traj = evolve_discretized(emission_pulses(), wg, 0.0, T, CFG, t_eval=grid)
        fidelities.append(traj.waveguide_population[-1])
    assert abs(fidelities[1] - fidelities[0]) < 1e-3


def test_effective_vs_discretized_emission():
    cfg = ProtocolConfig.paper_lossless()
    T = 30.0 / 2.62
    grid = np.linspace(0.0, T, 120)
    eff = effective_emission_trajectory(cfg, grid)
    assert np.array_equal(eff.times, grid)

    coarse = DiscretizedWaveguide(20.0, 101, 0.5)
    fine = DiscretizedWaveguide(50.0, 1001, 0.5)
    dev_coarse = markovian_deviation(
        eff, evolve_discretized(emission_pulses(), coarse, 0.0, T, CFG, t_eval=grid)
    )
    dev_fine = markovian_deviation(
        eff, evolve_discretized(emission_pulses(), fine, 0.0, T, CFG, t_eval=grid)
    )
    assert dev_fine < 1e-2
    assert dev_coarse > dev_fine
