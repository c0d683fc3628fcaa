"""Stage Hamiltonians, amplitude-level evolution, and fidelity functionals.

The protocol is simulated at the single-excitation amplitude level: each
stage is generated by a small (2x2 or 3x3) possibly non-Hermitian matrix
H(t) = H_herm(t) - (i/2) diag(decay), and i du/dt = H(t) u is integrated
with an adaptive embedded Runge-Kutta pair.  During emission the eliminated
waveguide continuum is tracked through the scalar leak quadratures
d I_raw/dt = kappa |u_C|^2 and d I_wt/dt = e^{gamma3 (t - t0)} kappa |u_C|^2,
from which both leakage-decay conventions of the waveguide population can be
reconstructed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .pulses import CorrectedPulsePair, DressingKind, DressingProfile

__all__ = [
    "Stage",
    "LeakageDecayMode",
    "DissipationRates",
    "IntegratorConfig",
    "SegmentHamiltonian",
    "Trajectory",
    "EmissionTrajectory",
    "IntegrationError",
    "build_emission_hamiltonian",
    "build_conversion_hamiltonian",
    "build_receive_hamiltonian",
    "evolve",
    "evolve_emission",
    "extend_with_hold",
    "emission_fidelity",
    "final_fidelity",
    "adiabatic_transform",
    "dressing_operator",
    "dressed_hamiltonian",
    "decoupling_residual",
    "bare_nonadiabatic_residual",
    "dressed_dark_state",
]


class Stage(Enum):
    EMISSION = "emission"
    CONVERSION = "conversion"
    RECEIVE = "receive"


class LeakageDecayMode(Enum):
    """How waveguide decay discounts the accumulated leak during emission.

    PAPER multiplies the whole leak integral by e^{-gamma3 t} with t measured
    from the emission-stage start; PHYSICAL discounts each emission instant
    by the time it actually waits in the waveguide, e^{-gamma3 (t_end - tau)}.
    The two coincide when gamma3 = 0.
    """

    PAPER = "paper"
    PHYSICAL = "physical"


@dataclass(frozen=True)
class DissipationRates:
    """Amplitude decay rates (units g0): SR, NAMR, and waveguide."""

    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0

    def __post_init__(self) -> None:
        for name in ("gamma1", "gamma2", "gamma3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def lossless(cls) -> "DissipationRates":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def dissipative_defaults(cls) -> "DissipationRates":
        """The reference dissipative operating point: 1e-3, 1e-4, 1e-3 g0."""
        return cls(1e-3, 1e-4, 1e-3)

    @property
    def any_nonzero(self) -> bool:
        return self.gamma1 > 0 or self.gamma2 > 0 or self.gamma3 > 0


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and method tag for the stage integrator.

    method is one of "RK45" (default embedded 5(4) pair), "DOP853", or "RK4"
    (fixed step of size max_step, kept as a cross-check).  max_step = None
    lets callers substitute a stage-appropriate cap.
    """

    method: str = "RK45"
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float | None = None

    def __post_init__(self) -> None:
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if self.method not in ("RK45", "DOP853", "RK4"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.max_step is not None and self.max_step <= 0:
            raise ValueError("max_step must be positive")

    def with_max_step(self, cap: float) -> "IntegratorConfig":
        """This config with max_step filled in if unset."""
        if self.max_step is not None:
            return self
        return replace(self, max_step=cap)


class IntegrationError(RuntimeError):
    """Raised when the stepper stalls; carries the last successfully reached time."""

    def __init__(self, message: str, last_time: float):
        super().__init__(f"{message} (last good time {last_time:.6g})")
        self.last_time = last_time


@dataclass(frozen=True)
class SegmentHamiltonian:
    """Generator of one protocol stage.

    ``hermitian`` maps t to the Hermitian coupling matrix; ``decay`` holds the
    non-negative population decay rates whose anti-Hermitian part is
    -(i/2) diag(decay).  ``labels`` name the basis slots in order.
    """

    stage: Stage
    labels: tuple[str, ...]
    hermitian: Callable[[float], np.ndarray]
    decay: np.ndarray

    def __post_init__(self) -> None:
        decay = np.asarray(self.decay, dtype=float)
        if np.any(decay < 0):
            raise ValueError("decay rates must be >= 0")
        object.__setattr__(self, "decay", decay)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def full(self, t: float) -> np.ndarray:
        """H(t) including the -i/2 diag(decay) term."""
        h = np.asarray(self.hermitian(t), dtype=complex)
        return h - 0.5j * np.diag(self.decay)


@dataclass
class Trajectory:
    """States sampled along one stage: times (n,), states (n, dim)."""

    times: np.ndarray
    states: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def norms(self) -> np.ndarray:
        return np.sum(self.populations, axis=1)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass
class EmissionTrajectory:
    """Emission-stage samples plus the accumulated leak quadratures.

    ``leak_raw`` is the undiscounted integral of kappa |u_C|^2; ``leak_weighted``
    carries the e^{+gamma3 tau} weight needed for the PHYSICAL convention.
    Times are stage-local starting at ``t0``.
    """

    times: np.ndarray
    amps: np.ndarray
    leak_raw: np.ndarray
    leak_weighted: np.ndarray
    kappa: float
    gamma3: float
    t0: float

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    @property
    def final_amps(self) -> np.ndarray:
        return self.amps[-1]

    def waveguide_population(self, mode: LeakageDecayMode) -> np.ndarray:
        """Waveguide population vs time under the chosen decay convention."""
        damp = np.exp(-self.gamma3 * (self.times - self.t0))
        if mode is LeakageDecayMode.PAPER:
            return damp * self.leak_raw
        return damp * self.leak_weighted

    def fidelity(self, mode: LeakageDecayMode) -> float:
        return float(self.waveguide_population(mode)[-1])


def build_emission_hamiltonian(pulses, g3: float, rates: DissipationRates) -> SegmentHamiltonian:
    """3x3 emission generator on (A, B, C) with the continuum eliminated.

    Couplings G1c(t) on A-B and G2c(t) on C-B; the flat continuum shows up
    only as the decay 2*pi*g3^2 of C.  ``pulses`` needs a couplings(t) method
    in the same time frame the stage is integrated in.
    """
    if g3 < 0:
        raise ValueError(f"waveguide coupling must be >= 0, got {g3}")

    def hermitian(t: float) -> np.ndarray:
        g1, g2 = pulses.couplings(t)
        return np.array(
            [[0.0, g1, 0.0], [g1, 0.0, g2], [0.0, g2, 0.0]], dtype=complex
        )

    decay = np.array([rates.gamma1, rates.gamma2, 2.0 * np.pi * g3**2])
    return SegmentHamiltonian(Stage.EMISSION, ("A", "B", "C"), hermitian, decay)


def build_conversion_hamiltonian(g3r: float, rates: DissipationRates) -> SegmentHamiltonian:
    """2x2 exchange between the collective waveguide mode and the remote cavity."""
    if g3r <= 0:
        raise ValueError(f"conversion coupling must be positive, got {g3r}")
    matrix = np.array([[0.0, g3r], [g3r, 0.0]], dtype=complex)

    def hermitian(t: float) -> np.ndarray:
        return matrix

    decay = np.array([rates.gamma3, 0.0])
    return SegmentHamiltonian(Stage.CONVERSION, ("W", "C"), hermitian, decay)


def build_receive_hamiltonian(pulses, rates: DissipationRates) -> SegmentHamiltonian:
    """3x3 receiving generator on (C, B, A): G1c on C-B, G2c on A-B."""

    def hermitian(t: float) -> np.ndarray:
        g1, g2 = pulses.couplings(t)
        return np.array(
            [[0.0, g1, 0.0], [g1, 0.0, g2], [0.0, g2, 0.0]], dtype=complex
        )

    decay = np.array([0.0, rates.gamma2, rates.gamma1])
    return SegmentHamiltonian(Stage.RECEIVE, ("C", "B", "A"), hermitian, decay)


def _solve(rhs, y0: np.ndarray, t0: float, t1: float, cfg: IntegratorConfig,
           t_eval: Sequence[float] | None) -> tuple[np.ndarray, np.ndarray]:
    """Integrate dy/dt = rhs(t, y) over [t0, t1] and return (times, states)."""
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    if t1 == t0:
        ts = np.array([t0])
        return ts, np.asarray(y0, dtype=complex)[None, :].copy()

    if cfg.method == "RK4":
        step = cfg.max_step if cfg.max_step is not None else (t1 - t0) / 1000.0
        return _rk4(rhs, y0, t0, t1, step)

    max_step = cfg.max_step if cfg.max_step is not None else np.inf
    sol = solve_ivp(
        rhs,
        (t0, t1),
        np.asarray(y0, dtype=complex),
        method=cfg.method,
        rtol=cfg.rtol,
        atol=cfg.atol,
        max_step=max_step,
        t_eval=None if t_eval is None else np.asarray(t_eval, dtype=float),
    )
    if not sol.success:
        last = float(sol.t[-1]) if sol.t.size else t0
        raise IntegrationError(sol.message, last)
    return sol.t.copy(), sol.y.T.copy()


def _rk4(rhs, y0: np.ndarray, t0: float, t1: float, step: float) -> tuple[np.ndarray, np.ndarray]:
    n = max(1, int(math.ceil((t1 - t0) / step)))
    ts = np.linspace(t0, t1, n + 1)
    h = (t1 - t0) / n
    states = np.empty((n + 1, len(y0)), dtype=complex)
    y = np.asarray(y0, dtype=complex).copy()
    states[0] = y
    for i in range(n):
        t = ts[i]
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[i + 1] = y
    return ts, states


def evolve(ham: SegmentHamiltonian, y0, t0: float, t1: float,
           cfg: IntegratorConfig = IntegratorConfig(),
           t_eval: Sequence[float] | None = None) -> Trajectory:
    """Solve i du/dt = H(t) u for one stage.

    Samples at ``t_eval`` (which should include the endpoint) or at the
    solver's own steps.  Raises IntegrationError on step-size underflow.
    """
    hermitian = ham.hermitian
    half_decay = 0.5 * ham.decay

    def rhs(t, y):
        return -1j * (hermitian(t) @ y) - half_decay * y

    ts, states = _solve(rhs, np.asarray(y0, dtype=complex), t0, t1, cfg, t_eval)
    return Trajectory(ts, states)


def evolve_emission(ham: SegmentHamiltonian, gamma3: float, y0, t0: float, t1: float,
                    cfg: IntegratorConfig = IntegratorConfig(),
                    t_eval: Sequence[float] | None = None) -> EmissionTrajectory:
    """Emission-stage evolution with the leak quadratures integrated alongside.

    ``y0`` holds the three node amplitudes; the two quadrature channels start
    at zero.  gamma3 only enters the e^{+gamma3 (t-t0)} weight of the second
    quadrature (the eliminated continuum itself is lossless in the generator).
    """
    if ham.stage is not Stage.EMISSION:
        raise ValueError("expected an emission-stage Hamiltonian")
    kappa = float(ham.decay[2])
    hermitian = ham.hermitian
    half_decay = 0.5 * ham.decay

    def rhs(t, y):
        u = y[:3]
        du = -1j * (hermitian(t) @ u) - half_decay * u
        leak = kappa * (u[2].real**2 + u[2].imag**2)
        return np.concatenate([du, (leak, leak * math.exp(gamma3 * (t - t0)))])

    start = np.concatenate([np.asarray(y0, dtype=complex), (0.0, 0.0)])
    ts, states = _solve(rhs, start, t0, t1, cfg, t_eval)
    return EmissionTrajectory(
        times=ts,
        amps=states[:, :3],
        leak_raw=states[:, 3].real,
        leak_weighted=states[:, 4].real,
        kappa=kappa,
        gamma3=gamma3,
        t0=t0,
    )


def extend_with_hold(traj: EmissionTrajectory, rates: DissipationRates, duration: float,
                     t_eval: Sequence[float] | None = None,
                     n_samples: int = 64) -> EmissionTrajectory:
    """Append a pulse-free hold (only the waveguide coupling active) to an emission run.

    With the couplings off the generator is diagonal, so the hold is evaluated
    in closed form: u_C decays at kappa/2, u_A and u_B at gamma1/2 and
    gamma2/2, and the leak quadratures integrate exponentials exactly.
    """
    if duration < 0:
        raise ValueError("hold duration must be >= 0")
    if duration == 0:
        return traj

    kappa, gamma3 = traj.kappa, traj.gamma3
    t_start = float(traj.times[-1])
    if t_eval is None:
        rel = np.linspace(0.0, duration, n_samples + 1)[1:]
    else:
        rel = np.asarray(t_eval, dtype=float) - t_start
        if np.any(rel <= 0) or rel[-1] > duration + 1e-12:
            raise ValueError("hold samples must lie inside the hold segment")

    a0, b0, c0 = traj.amps[-1]
    amp_decay = 0.5 * np.array([rates.gamma1, rates.gamma2, kappa])
    amps = np.exp(-np.outer(rel, amp_decay)) * traj.amps[-1]

    pc0 = abs(c0) ** 2
    leak_raw = traj.leak_raw[-1] + pc0 * (1.0 - np.exp(-kappa * rel))
    w0 = math.exp(gamma3 * (t_start - traj.t0))
    if abs(kappa - gamma3) > 1e-12 * max(kappa, 1.0):
        leak_wt = traj.leak_weighted[-1] + kappa * pc0 * w0 * (
            1.0 - np.exp(-(kappa - gamma3) * rel)
        ) / (kappa - gamma3)
    else:
        leak_wt = traj.leak_weighted[-1] + kappa * pc0 * w0 * rel

    return EmissionTrajectory(
        times=np.concatenate([traj.times, t_start + rel]),
        amps=np.concatenate([traj.amps, amps]),
        leak_raw=np.concatenate([traj.leak_raw, leak_raw]),
        leak_weighted=np.concatenate([traj.leak_weighted, leak_wt]),
        kappa=kappa,
        gamma3=gamma3,
        t0=traj.t0,
    )


def emission_fidelity(traj: EmissionTrajectory, mode: LeakageDecayMode) -> float:
    """Population delivered to the waveguide by the end of the emission stage."""
    return traj.fidelity(mode)


def final_fidelity(state: np.ndarray) -> float:
    """Population in the remote SR (last slot of the receive-stage basis)."""
    return float(abs(state[2]) ** 2)


# ---------------------------------------------------------------------------
# Dressed-frame diagnostics
# ---------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)

# Generator of the dressing rotation in adiabatic labels (+, dk, -):
# (|+> - |->)/sqrt(2) <dk| + h.c.
_DRESS_GEN = np.array(
    [
        [0.0, 1.0 / _SQRT2, 0.0],
        [1.0 / _SQRT2, 0.0, -1.0 / _SQRT2],
        [0.0, -1.0 / _SQRT2, 0.0],
    ]
)


def adiabatic_transform(theta: float) -> np.ndarray:
    """Columns |+>, |dk>, |-> of the adiabatic frame, rows in lab basis order.

    The lab ordering matches the stage generators: (A, B, C) for emission and
    (C, B, A) for receiving, where the first slot is the initially occupied
    level.
    """
    s, c = math.sin(theta), math.cos(theta)
    return np.array(
        [
            [s / _SQRT2, -c, s / _SQRT2],
            [1.0 / _SQRT2, 0.0, -1.0 / _SQRT2],
            [c / _SQRT2, s, c / _SQRT2],
        ]
    )


def _adiabatic_transform_dtheta(theta: float) -> np.ndarray:
    s, c = math.sin(theta), math.cos(theta)
    return np.array(
        [
            [c / _SQRT2, s, c / _SQRT2],
            [0.0, 0.0, 0.0],
            [-s / _SQRT2, c, -s / _SQRT2],
        ]
    )


def dressing_operator(mu: float) -> np.ndarray:
    """V = exp(i mu X) rotating adiabatic states into dressed states."""
    return expm(1j * mu * _DRESS_GEN)


def dressed_hamiltonian(g1: float, g2: float, kappa: float,
                        theta: float, theta_dot: float,
                        mu: float, mu_dot: float) -> np.ndarray:
    """Doubly rotated generator H_ds in adiabatic labels (+, dk, -).

    Builds the lab generator from the supplied couplings (with -i kappa/2 on
    the third lab level), rotates through the adiabatic frame including
    -i U^dag dU/dt, then through the dressing frame including -i V^dag dV/dt.
    """
    h_lab = np.array(
        [
            [0.0, g1, 0.0],
            [g1, 0.0, g2],
            [0.0, g2, -0.5j * kappa],
        ],
        dtype=complex,
    )
    u = adiabatic_transform(theta)
    u_dot = theta_dot * _adiabatic_transform_dtheta(theta)
    h_ad = u.T @ h_lab @ u - 1j * (u.T @ u_dot)

    v = dressing_operator(mu)
    v_dot = 1j * mu_dot * (_DRESS_GEN @ v)
    return v.conj().T @ h_ad @ v - 1j * (v.conj().T @ v_dot)


def decoupling_residual(dp: DressingProfile, t: float) -> tuple[float, float]:
    """|<+~|H_ds|dk~>| and |<-~|H_ds|dk~>| for the corrected pulse pair of ``dp``.

    Both vanish identically when mu and gx carry the engineered correction;
    this is the defining construction of the dressed shortcut.
    """
    pair = CorrectedPulsePair(dp)
    g1, g2 = pair.couplings(t)
    h_ds = dressed_hamiltonian(
        g1,
        g2,
        dp.kappa,
        float(dp.angle.angle(t)),
        float(dp.angle.rate(t)),
        float(dp.mu(t)),
        float(dp.mu_dot(t)),
    )
    return (abs(h_ds[0, 1]), abs(h_ds[2, 1]))


def bare_nonadiabatic_residual(pair, t: float, kappa: float = 0.0) -> tuple[float, float]:
    """Same matrix elements with no dressing (mu = 0) and uncorrected pulses."""
    g1, g2 = pair.couplings(t)
    h_ds = dressed_hamiltonian(
        g1,
        g2,
        kappa,
        float(pair.angle.angle(t)),
        float(pair.angle.rate(t)),
        0.0,
        0.0,
    )
    return (abs(h_ds[0, 1]), abs(h_ds[2, 1]))


def dressed_dark_state(dp: DressingProfile, t: float) -> np.ndarray:
    """Lab-frame dressed dark state U(t) V(t) e_dk (lab ordering of the stage)."""
    u = adiabatic_transform(float(dp.angle.angle(t)))
    v = dressing_operator(float(dp.mu(t)))
    return (u @ v)[:, 1]
