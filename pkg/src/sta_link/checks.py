"""Self-contained validation checks exposed through the CLI.

Each check returns (name, passed, detail) and is cheap enough to run in a
shell session; the heavyweight continuum comparison lives in the test suite.
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import (
    DissipationRates,
    IntegratorConfig,
    build_conversion_hamiltonian,
    build_emission_hamiltonian,
    build_receive_hamiltonian,
    decoupling_residual,
    evolve,
)
from .pulses import BarePulsePair, ConstantPulsePair, CorrectedPulsePair, truncation_window

__all__ = ["CHECK_NAMES", "run_checks"]

CHECK_NAMES = ("oracle", "decoupling", "adiabatic-limit")

CheckLine = tuple[str, bool, str]


def _check_oracle() -> list[CheckLine]:
    lines: list[CheckLine] = []
    cfg = IntegratorConfig()
    lossless = DissipationRates.lossless()

    # Constant-coupling half-period Rabi exchange is exact.
    g = 0.5
    ham = build_conversion_hamiltonian(g, lossless)
    traj = evolve(ham, [1.0, 0.0], 0.0, 0.5 * math.pi / g, cfg)
    err = abs(abs(traj.final_state[1]) ** 2 - 1.0)
    lines.append(("rabi-half-period", err < 1e-8, f"|P-1| = {err:.3e}"))

    # Damped two-mode exchange against the closed-form solution.
    gamma3 = 1e-3
    ham = build_conversion_hamiltonian(g, DissipationRates(0.0, 0.0, gamma3))
    t_c = 0.5 * math.pi / g
    traj = evolve(ham, [1.0, 0.0], 0.0, t_c, cfg)
    omega = math.sqrt(g**2 - gamma3**2 / 16.0)
    exact = math.exp(-0.5 * gamma3 * t_c) * (g * math.sin(omega * t_c) / omega) ** 2
    err = abs(abs(traj.final_state[1]) ** 2 - exact)
    lines.append(("damped-rabi", err < 1e-8, f"|P-exact| = {err:.3e}"))

    # Decoupled lossy cavity decays at exactly 2 pi g3^2.
    g3 = 0.5
    ham = build_emission_hamiltonian(ConstantPulsePair(0.0, 0.0), g3, lossless)
    ts = np.linspace(0.0, 4.0, 9)
    traj = evolve(ham, [0.0, 0.0, 1.0], 0.0, 4.0, cfg, t_eval=ts)
    expected = np.exp(-2.0 * math.pi * g3**2 * ts)
    rel = np.max(np.abs(traj.populations[:, 2] - expected) / expected)
    lines.append(("lossy-cavity-decay", rel < 1e-6, f"max rel err = {rel:.3e}"))

    # Hermitian-only evolution conserves the norm.
    pair = CorrectedPulsePair.satd(1.0)
    ham = build_receive_hamiltonian(pair, lossless)
    traj = evolve(ham, [1.0, 0.0, 0.0], -15.0, 15.0, cfg)
    drift = np.max(np.abs(traj.norms - 1.0))
    lines.append(("hermitian-norm", drift < 1e-9, f"max drift = {drift:.3e}"))
    return lines


def _check_decoupling() -> list[CheckLine]:
    lines: list[CheckLine] = []
    v, g3 = 2.62, 0.5
    ts = np.linspace(*truncation_window(v), 100)
    for label, pair in (
        ("satd", CorrectedPulsePair.satd(v)),
        ("satd+kappa", CorrectedPulsePair.satd_kappa(v, g3)),
    ):
        worst = max(max(decoupling_residual(pair.dressing, t)) for t in ts)
        lines.append(
            (f"decoupling-{label}", worst < 1e-9, f"max residual = {worst:.3e} g0")
        )
    return lines


def _check_adiabatic_limit() -> list[CheckLine]:
    v = 0.05
    pair = BarePulsePair.vitanov(v)
    ham = build_receive_hamiltonian(pair, DissipationRates.lossless())
    t0, t1 = truncation_window(v)
    cfg = IntegratorConfig(max_step=1e-2 / v)
    traj = evolve(ham, [1.0, 0.0, 0.0], t0, t1, cfg)
    fidelity = abs(traj.final_state[2]) ** 2
    return [("adiabatic-limit", fidelity > 0.999, f"F(v=0.05) = {fidelity:.6f}")]


_CHECKS = {
    "oracle": _check_oracle,
    "decoupling": _check_decoupling,
    "adiabatic-limit": _check_adiabatic_limit,
}


def run_checks(which: str = "all") -> tuple[bool, list[CheckLine]]:
    """Run one named check suite (or all); returns overall pass plus lines."""
    names = CHECK_NAMES if which == "all" else (which,)
    lines: list[CheckLine] = []
    for name in names:
        lines.extend(_CHECKS[name]())
    return all(ok for _, ok, _ in lines), lines
