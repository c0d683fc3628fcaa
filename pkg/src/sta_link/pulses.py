"""Closed-form control waveforms for the two-node transfer protocol.

All rates are expressed in units of the peak coupling g0 and all times in
1/g0.  Waveforms are exposed as pure functions of time (scalar or ndarray)
rather than pre-sampled arrays, so adaptive integrators can evaluate them
off-grid.  Every profile object is immutable after construction and safe to
share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit

__all__ = [
    "TRUNCATION_HALF_WIDTH",
    "DEFAULT_BOUNDARY_TOL",
    "DressingKind",
    "MixingAngleProfile",
    "DressingProfile",
    "CorrectedPulsePair",
    "BarePulsePair",
    "ConstantPulsePair",
    "WindowedPulses",
    "truncation_window",
]

HALF_PI = 0.5 * np.pi

# Pulses are truncated to |t| <= 7.5/v, which puts the bare pulse edges at
# g0 * sin(theta(-7.5/v)) ~ 1e-3 g0.
TRUNCATION_HALF_WIDTH = 7.5

# Default bound used when checking that the dressing angle has vanished at
# the window edges.
DEFAULT_BOUNDARY_TOL = 2e-3


class DressingKind(Enum):
    """Which dressed-state correction a pulse pair carries.

    SATD corrects a closed three-level chain; SATD_KAPPA additionally absorbs
    the decay of the final level into a flat continuum at rate 2*pi*g3**2.
    """

    SATD = "satd"
    SATD_KAPPA = "satd-kappa"


def truncation_window(v: float) -> tuple[float, float]:
    """Finite pulse window (-7.5/v, +7.5/v) for protocol speed ``v``."""
    if v <= 0:
        raise ValueError(f"protocol speed must be positive, got {v}")
    half = TRUNCATION_HALF_WIDTH / v
    return (-half, half)


@dataclass(frozen=True)
class MixingAngleProfile:
    """Sigmoidal mixing angle theta(t) = pi / (2 (1 + exp(-v t))).

    theta rises monotonically from 0 to pi/2, passing pi/4 at t = 0, and
    sets the pulse pair through G1 = g0 sin(theta), G2 = g0 cos(theta).
    ``v`` is the protocol speed; ``t_start``/``t_end`` bound the window the
    pulses are actually played over.
    """

    v: float
    t_start: float
    t_end: float

    def __post_init__(self) -> None:
        if self.v <= 0:
            raise ValueError(f"protocol speed must be positive, got {self.v}")
        if self.t_end <= self.t_start:
            raise ValueError("empty mixing-angle window")

    @classmethod
    def truncated(cls, v: float) -> "MixingAngleProfile":
        """Profile on the standard window (-7.5/v, +7.5/v)."""
        t0, t1 = truncation_window(v)
        return cls(v=v, t_start=t0, t_end=t1)

    def _sigmoid(self, t):
        return expit(self.v * np.asarray(t, dtype=float))

    def angle(self, t):
        """theta(t) in radians."""
        return HALF_PI * self._sigmoid(t)

    def rate(self, t):
        """d theta / dt (units g0)."""
        s = self._sigmoid(t)
        return HALF_PI * self.v * s * (1.0 - s)

    def accel(self, t):
        """d^2 theta / dt^2 (units g0^2)."""
        s = self._sigmoid(t)
        return HALF_PI * self.v**2 * s * (1.0 - s) * (1.0 - 2.0 * s)


@dataclass(frozen=True)
class DressingProfile:
    """Dressing angle mu(t) for a SATD or SATD+kappa pulse pair.

    mu = arctan([theta_dot + (kappa/4) sin(2 theta)] / g0) with
    kappa = 2*pi*g3**2 for SATD_KAPPA and kappa = 0 for plain SATD.
    mu parametrizes how strongly the adiabatic states are dressed and must
    be small at the window edges for the correction to switch on and off
    cleanly.
    """

    kind: DressingKind
    g0: float
    g3: float
    angle: MixingAngleProfile

    def __post_init__(self) -> None:
        if self.g0 <= 0:
            raise ValueError(f"peak coupling must be positive, got {self.g0}")
        if self.g3 < 0:
            raise ValueError(f"waveguide coupling must be >= 0, got {self.g3}")

    @property
    def kappa(self) -> float:
        """Continuum decay rate 2*pi*g3**2 absorbed by the correction."""
        if self.kind is DressingKind.SATD_KAPPA:
            return 2.0 * np.pi * self.g3**2
        return 0.0

    def _drive(self, t):
        # tan(mu) * g0: the rate the dressing has to track.
        theta = self.angle.angle(t)
        return self.angle.rate(t) + 0.25 * self.kappa * np.sin(2.0 * theta)

    def _drive_dot(self, t):
        theta = self.angle.angle(t)
        return self.angle.accel(t) + 0.5 * self.kappa * np.cos(2.0 * theta) * self.angle.rate(t)

    def mu(self, t):
        """Dressing angle in radians, bounded in (-pi/2, pi/2)."""
        return np.arctan(self._drive(t) / self.g0)

    def mu_dot(self, t):
        """Analytic d mu / dt; avoids finite-difference noise in ODE right-hand sides."""
        w = self._drive(t)
        return self.g0 * self._drive_dot(t) / (self.g0**2 + w**2)

    def boundary_values(self) -> tuple[float, float]:
        """|mu| at the window edges."""
        return (
            float(abs(self.mu(self.angle.t_start))),
            float(abs(self.mu(self.angle.t_end))),
        )

    def boundary_ok(self, tol: float = DEFAULT_BOUNDARY_TOL) -> bool:
        """Whether the dressing vanishes at the edges to within ``tol`` rad.

        Note the edge value scales like (pi/2) e^-7.5 (v + pi g3^2) / g0, so
        fast protocols exceed the default tolerance; callers that care should
        pick a tolerance matched to their speed.
        """
        lo, hi = self.boundary_values()
        return lo < tol and hi < tol


@dataclass(frozen=True)
class CorrectedPulsePair:
    """Corrected coupling pair (G1c, G2c) implementing the dressed correction.

    G1c = g0 sin(theta) - gx cos(theta) and G2c = g0 cos(theta) + gx sin(theta),
    with gx = -mu_dot + (kappa/4) sin^2(theta) sin(2 mu) and gz = 0 by
    construction (the simplest nontrivial correction).
    """

    dressing: DressingProfile

    @classmethod
    def satd(cls, v: float, g0: float = 1.0) -> "CorrectedPulsePair":
        """SATD pair on the standard truncated window."""
        profile = MixingAngleProfile.truncated(v)
        return cls(DressingProfile(DressingKind.SATD, g0, 0.0, profile))

    @classmethod
    def satd_kappa(cls, v: float, g3: float, g0: float = 1.0) -> "CorrectedPulsePair":
        """SATD+kappa pair on the standard truncated window."""
        profile = MixingAngleProfile.truncated(v)
        return cls(DressingProfile(DressingKind.SATD_KAPPA, g0, g3, profile))

    @property
    def angle(self) -> MixingAngleProfile:
        return self.dressing.angle

    def gx(self, t):
        d = self.dressing
        theta = d.angle.angle(t)
        return -d.mu_dot(t) + 0.25 * d.kappa * np.sin(theta) ** 2 * np.sin(2.0 * d.mu(t))

    def gz(self, t):
        """Identically zero; kept for completeness of the correction parametrization."""
        return np.zeros_like(np.asarray(t, dtype=float))

    def g1_bare(self, t):
        return self.dressing.g0 * np.sin(self.angle.angle(t))

    def g2_bare(self, t):
        return self.dressing.g0 * np.cos(self.angle.angle(t))

    def g1c(self, t):
        theta = self.angle.angle(t)
        return self.dressing.g0 * np.sin(theta) - self.gx(t) * np.cos(theta)

    def g2c(self, t):
        theta = self.angle.angle(t)
        return self.dressing.g0 * np.cos(theta) + self.gx(t) * np.sin(theta)

    def couplings(self, t: float) -> tuple[float, float]:
        """(G1c, G2c) at a single time; the hot path for ODE right-hand sides."""
        d = self.dressing
        theta = d.angle.angle(t)
        sin_t, cos_t = np.sin(theta), np.cos(theta)
        gx = -d.mu_dot(t) + 0.25 * d.kappa * sin_t**2 * np.sin(2.0 * d.mu(t))
        return (d.g0 * sin_t - gx * cos_t, d.g0 * cos_t + gx * sin_t)


@dataclass(frozen=True)
class BarePulsePair:
    """Uncorrected pulse pair (g0 sin(theta), g0 cos(theta)); the plain-STIRAP drive."""

    angle: MixingAngleProfile
    g0: float = 1.0

    @classmethod
    def vitanov(cls, v: float, g0: float = 1.0) -> "BarePulsePair":
        return cls(MixingAngleProfile.truncated(v), g0)

    def g1c(self, t):
        return self.g0 * np.sin(self.angle.angle(t))

    def g2c(self, t):
        return self.g0 * np.cos(self.angle.angle(t))

    def couplings(self, t: float) -> tuple[float, float]:
        theta = self.angle.angle(t)
        return (self.g0 * np.sin(theta), self.g0 * np.cos(theta))


@dataclass(frozen=True)
class ConstantPulsePair:
    """Time-independent couplings; handy for Rabi and decay checks."""

    g1: float
    g2: float

    def g1c(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.g1)

    def g2c(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.g2)

    def couplings(self, t: float) -> tuple[float, float]:
        return (self.g1, self.g2)


@dataclass(frozen=True)
class WindowedPulses:
    """Shifts a pulse pair into stage-local time and clamps it to a support window.

    ``offset`` is the stage-local time at which pulse-local t = 0 sits;
    outside ``window`` the couplings are zero (the stage holds with only the
    waveguide coupling active).
    """

    pair: CorrectedPulsePair | BarePulsePair | ConstantPulsePair
    offset: float
    window: tuple[float, float]

    def couplings(self, t: float) -> tuple[float, float]:
        if t < self.window[0] or t > self.window[1]:
            return (0.0, 0.0)
        return self.pair.couplings(t - self.offset)

    def g1c(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.window[0]) & (t <= self.window[1])
        return np.where(inside, self.pair.g1c(t - self.offset), 0.0)

    def g2c(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.window[0]) & (t <= self.window[1])
        return np.where(inside, self.pair.g2c(t - self.offset), 0.0)
