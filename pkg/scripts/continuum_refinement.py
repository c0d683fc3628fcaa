#!/usr/bin/env python3
"""Convergence study: effective emission model vs the discretized waveguide.

Integrates the emission stage against brute-force mode grids of increasing
bandwidth and density and prints the maximum pointwise population deviation
for each, demonstrating that the local-decay elimination is the wide-band
limit of the exact model.
"""

import time

import numpy as np

from sta_link.continuum import DiscretizedWaveguide, evolve_discretized, markovian_deviation
from sta_link.dynamics import IntegratorConfig
from sta_link.protocol import ProtocolConfig, build_schedule, effective_emission_trajectory
from sta_link.pulses import CorrectedPulsePair, WindowedPulses

REFINEMENTS = ((20.0, 101), (50.0, 1001), (100.0, 2001), (200.0, 4001))


def main() -> None:
    cfg = ProtocolConfig.paper_lossless()
    emission = build_schedule(cfg).stages[0]
    grid = np.linspace(0.0, emission.duration, 230)
    eff = effective_emission_trajectory(cfg, grid)

    pair = CorrectedPulsePair.satd_kappa(cfg.v_l, cfg.g3l, cfg.g0)
    pulses = WindowedPulses(pair, offset=7.5 / cfg.v_l, window=(0.0, 15.0 / cfg.v_l))
    ode = IntegratorConfig(method="DOP853", rtol=1e-10, atol=1e-12, max_step=np.inf)

    print("omega_max  n_modes   max |dP|   norm drift   recurrence   runtime")
    for omega_max, n_modes in REFINEMENTS:
        wg = DiscretizedWaveguide(omega_max, n_modes, cfg.g3l)
        t0 = time.perf_counter()
        disc = evolve_discretized(pulses, wg, 0.0, emission.duration, ode, t_eval=grid)
        elapsed = time.perf_counter() - t0
        dev = markovian_deviation(eff, disc)
        drift = np.max(np.abs(disc.norms - 1.0))
        print(
            f"{omega_max:9.0f}  {n_modes:7d}   {dev:.2e}   {drift:.2e}    "
            f"{wg.recurrence_time:7.1f}/g0   {elapsed:5.1f} s"
        )


if __name__ == "__main__":
    main()
