"""Three-stage protocol composition and end-to-end runs.

A forward transfer is emission (dressed pulses push the source SR population
through the local cavity into the waveguide), conversion (a timed Rabi
exchange moves the collective waveguide excitation into the remote cavity),
and receiving (dressed or bare pulses walk the remote cavity population into
the remote SR).  The reverse transfer mirrors the node roles.  Stages are
integrated in stage-local time and stitched into one absolute-time
trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import dynamics
from .dynamics import (
    DissipationRates,
    EmissionTrajectory,
    IntegratorConfig,
    LeakageDecayMode,
    SegmentHamiltonian,
    Stage,
)
from .pulses import (
    BarePulsePair,
    CorrectedPulsePair,
    TRUNCATION_HALF_WIDTH,
    WindowedPulses,
)
from .textio import format_number, write_text

__all__ = [
    "ReceiveKind",
    "Direction",
    "TlConvention",
    "ProtocolConfig",
    "StagePlan",
    "ProtocolSchedule",
    "StitchedTrajectory",
    "RunResult",
    "RoundTripResult",
    "build_schedule",
    "run",
    "round_trip",
    "effective_emission_trajectory",
    "write_couplings_csv",
    "TRAJECTORY_COLUMNS",
    "SUMMARY_COLUMNS",
]

# Global amplitude bookkeeping slots; the waveguide is tracked separately
# (a real population during emission, one collective amplitude during
# conversion, frozen afterwards).
LEVELS = ("Al", "Bl", "Cl", "Cr", "Br", "Ar")

TRAJECTORY_COLUMNS = ("t", "P_Al", "P_Bl", "P_Cl", "P_W", "P_Cr", "P_Br", "P_Ar", "norm")
COUPLING_COLUMNS = ("t", "G1lc", "G2lc", "G3l", "G3r", "G1rc", "G2rc")
SUMMARY_COLUMNS = (
    "mode", "v_l", "v_r", "g3l", "g3r", "gamma1", "gamma2", "gamma3",
    "t_total", "F_l", "F_e",
)


class ReceiveKind(Enum):
    SATD = "satd"
    STIRAP = "stirap"


class Direction(Enum):
    FORWARD = "forward"
    REVERSE = "reverse"


class TlConvention(Enum):
    """How long the emission stage lasts.

    TEXT_30_OVER_V: pulses in the first 15/v, then an equally long hold.
    FIG3_FORMULA:   pulses in the first 15/v, then a hold of 8*pi/g3^2.
    """

    TEXT_30_OVER_V = "text30"
    FIG3_FORMULA = "fig3"


@dataclass(frozen=True)
class ProtocolConfig:
    """Full parameter set of one end-to-end run (all rates in g0 units)."""

    v_l: float = 2.62
    v_r: float = 2.62
    g0: float = 1.0
    g3l: float = 0.5
    g3r: float = 0.5
    rates: DissipationRates = field(default_factory=DissipationRates.lossless)
    receive_kind: ReceiveKind = ReceiveKind.SATD
    direction: Direction = Direction.FORWARD
    t_l_convention: TlConvention = TlConvention.TEXT_30_OVER_V
    leakage_decay_mode: LeakageDecayMode = LeakageDecayMode.PAPER
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self) -> None:
        for name in ("v_l", "v_r", "g0", "g3l", "g3r"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def paper_lossless(cls, **overrides) -> "ProtocolConfig":
        """Reference double-STA operating point without dissipation."""
        return cls(**overrides)

    @classmethod
    def paper_dissipative(cls, **overrides) -> "ProtocolConfig":
        """Reference operating point with the standard decay rates."""
        overrides.setdefault("rates", DissipationRates.dissipative_defaults())
        return cls(**overrides)

    @classmethod
    def sta_stirap_baseline(cls, **overrides) -> "ProtocolConfig":
        """Double-STA emission followed by a plain STIRAP receive at v_r = g0."""
        overrides.setdefault("v_r", 1.0)
        overrides.setdefault("receive_kind", ReceiveKind.STIRAP)
        return cls(**overrides)

    @property
    def mode_label(self) -> str:
        if self.direction is Direction.REVERSE:
            return "reverse"
        return "double-sta" if self.receive_kind is ReceiveKind.SATD else "sta-stirap"

    def emission_duration(self, v: float, g3: float) -> float:
        window = 2.0 * TRUNCATION_HALF_WIDTH / v
        if self.t_l_convention is TlConvention.TEXT_30_OVER_V:
            return 2.0 * window
        return window + 8.0 * math.pi / g3**2


@dataclass(frozen=True)
class StagePlan:
    """One scheduled stage with its generator bound in stage-local time."""

    stage: Stage
    t_start: float
    t_end: float
    hamiltonian: SegmentHamiltonian
    levels: tuple[str, ...]
    pulses: WindowedPulses | None
    pulse_window: tuple[float, float] | None
    hold_duration: float
    g3l_active: bool
    g3r_active: bool
    speed: float | None

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class ProtocolSchedule:
    """Contiguous, non-overlapping stage sequence with absolute time bounds."""

    config: ProtocolConfig
    stages: tuple[StagePlan, ...]
    source_level: str
    target_level: str

    @property
    def total_duration(self) -> float:
        return self.stages[-1].t_end

    @property
    def stage_boundaries(self) -> tuple[float, ...]:
        return tuple(s.t_end for s in self.stages)

    def active_waveguide_couplings(self, t: float) -> tuple[float, float]:
        """(g3l, g3r) in effect at absolute time t."""
        cfg = self.config
        for s in self.stages:
            if s.t_start <= t <= s.t_end:
                return (cfg.g3l if s.g3l_active else 0.0, cfg.g3r if s.g3r_active else 0.0)
        return (0.0, 0.0)

    def couplings_at(self, t: float) -> dict[str, float]:
        """Structural coupling samples (emission pulses, conversion, receive pulses)."""
        out = dict.fromkeys(COUPLING_COLUMNS[1:], 0.0)
        g3l, g3r = self.active_waveguide_couplings(t)
        out["G3l"], out["G3r"] = g3l, g3r
        for s in self.stages:
            if s.pulses is not None and s.t_start <= t <= s.t_end:
                g1, g2 = s.pulses.couplings(t - s.t_start)
                if s.stage is Stage.EMISSION:
                    out["G1lc"], out["G2lc"] = g1, g2
                else:
                    out["G1rc"], out["G2rc"] = g1, g2
        return out


def _emission_plan(cfg: ProtocolConfig, t0: float) -> StagePlan:
    forward = cfg.direction is Direction.FORWARD
    v = cfg.v_l if forward else cfg.v_r
    g3 = cfg.g3l if forward else cfg.g3r
    duration = cfg.emission_duration(v, g3)
    window = 2.0 * TRUNCATION_HALF_WIDTH / v
    pair = CorrectedPulsePair.satd_kappa(v, g3, cfg.g0)
    pulses = WindowedPulses(pair, offset=0.5 * window, window=(0.0, window))
    ham = dynamics.build_emission_hamiltonian(pulses, g3, cfg.rates)
    levels = ("Al", "Bl", "Cl") if forward else ("Ar", "Br", "Cr")
    return StagePlan(
        stage=Stage.EMISSION,
        t_start=t0,
        t_end=t0 + duration,
        hamiltonian=ham,
        levels=levels,
        pulses=pulses,
        pulse_window=(0.0, window),
        hold_duration=duration - window,
        g3l_active=forward,
        g3r_active=not forward,
        speed=v,
    )


def _conversion_plan(cfg: ProtocolConfig, t0: float) -> StagePlan:
    forward = cfg.direction is Direction.FORWARD
    g3 = cfg.g3r if forward else cfg.g3l
    duration = 0.5 * math.pi / g3
    ham = dynamics.build_conversion_hamiltonian(g3, cfg.rates)
    levels = ("Cr",) if forward else ("Cl",)
    return StagePlan(
        stage=Stage.CONVERSION,
        t_start=t0,
        t_end=t0 + duration,
        hamiltonian=ham,
        levels=levels,
        pulses=None,
        pulse_window=None,
        hold_duration=0.0,
        g3l_active=not forward,
        g3r_active=forward,
        speed=None,
    )


def _receive_plan(cfg: ProtocolConfig, t0: float) -> StagePlan:
    forward = cfg.direction is Direction.FORWARD
    v = cfg.v_r if forward else cfg.v_l
    window = 2.0 * TRUNCATION_HALF_WIDTH / v
    if cfg.receive_kind is ReceiveKind.SATD:
        pair = CorrectedPulsePair.satd(v, cfg.g0)
    else:
        pair = BarePulsePair.vitanov(v, cfg.g0)
    pulses = WindowedPulses(pair, offset=0.5 * window, window=(0.0, window))
    ham = dynamics.build_receive_hamiltonian(pulses, cfg.rates)
    levels = ("Cr", "Br", "Ar") if forward else ("Cl", "Bl", "Al")
    return StagePlan(
        stage=Stage.RECEIVE,
        t_start=t0,
        t_end=t0 + window,
        hamiltonian=ham,
        levels=levels,
        pulses=pulses,
        pulse_window=(0.0, window),
        hold_duration=0.0,
        g3l_active=False,
        g3r_active=False,
        speed=v,
    )


def build_schedule(cfg: ProtocolConfig) -> ProtocolSchedule:
    """Lay out the three stages back to back on the absolute time axis."""
    emission = _emission_plan(cfg, 0.0)
    conversion = _conversion_plan(cfg, emission.t_end)
    receive = _receive_plan(cfg, conversion.t_end)
    forward = cfg.direction is Direction.FORWARD
    return ProtocolSchedule(
        config=cfg,
        stages=(emission, conversion, receive),
        source_level="Al" if forward else "Ar",
        target_level="Ar" if forward else "Al",
    )


@dataclass
class StitchedTrajectory:
    """Absolute-time populations across the whole protocol.

    ``populations`` columns follow TRAJECTORY_COLUMNS[1:-1]:
    P_Al, P_Bl, P_Cl, P_W, P_Cr, P_Br, P_Ar.
    """

    times: np.ndarray
    populations: np.ndarray

    @property
    def norms(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return self.times
        if name == "norm":
            return self.norms
        return self.populations[:, TRAJECTORY_COLUMNS.index(name) - 1]

    def to_csv_text(self) -> str:
        lines = [",".join(TRAJECTORY_COLUMNS)]
        norms = self.norms
        for i, t in enumerate(self.times):
            row = [format_number(t)]
            row += [format_number(p) for p in self.populations[i]]
            row.append(format_number(norms[i]))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> Path:
        return write_text(path, self.to_csv_text())


@dataclass(frozen=True)
class RunResult:
    """Stage and end-to-end fidelities of one protocol run."""

    config: ProtocolConfig
    schedule: ProtocolSchedule
    emission_fidelity: float
    emission_fidelity_paper: float
    emission_fidelity_physical: float
    conversion_survival: float
    receive_stage_fidelity: float
    final_fidelity: float
    final_amplitudes: dict[str, complex]
    trajectory: StitchedTrajectory | None

    @property
    def total_duration(self) -> float:
        return self.schedule.total_duration

    @property
    def infidelity(self) -> float:
        return 1.0 - self.final_fidelity

    def summary_dict(self) -> dict:
        cfg = self.config
        return {
            "mode": cfg.mode_label,
            "direction": cfg.direction.value,
            "receive_kind": cfg.receive_kind.value,
            "t_l_convention": cfg.t_l_convention.value,
            "leakage_decay_mode": cfg.leakage_decay_mode.value,
            "v_l": cfg.v_l,
            "v_r": cfg.v_r,
            "g0": cfg.g0,
            "g3l": cfg.g3l,
            "g3r": cfg.g3r,
            "gamma1": cfg.rates.gamma1,
            "gamma2": cfg.rates.gamma2,
            "gamma3": cfg.rates.gamma3,
            "integrator": {
                "method": cfg.integrator.method,
                "rtol": cfg.integrator.rtol,
                "atol": cfg.integrator.atol,
                "max_step": cfg.integrator.max_step,
            },
            "t_total": self.total_duration,
            "stage_boundaries": list(self.schedule.stage_boundaries),
            "F_l": self.emission_fidelity,
            "F_l_paper": self.emission_fidelity_paper,
            "F_l_physical": self.emission_fidelity_physical,
            "conversion_survival": self.conversion_survival,
            "receive_stage_fidelity": self.receive_stage_fidelity,
            "F_e": self.final_fidelity,
            "infidelity": self.infidelity,
        }

    def summary_line(self) -> str:
        cfg = self.config
        values = (
            cfg.mode_label,
            format_number(cfg.v_l),
            format_number(cfg.v_r),
            format_number(cfg.g3l),
            format_number(cfg.g3r),
            format_number(cfg.rates.gamma1),
            format_number(cfg.rates.gamma2),
            format_number(cfg.rates.gamma3),
            format_number(self.total_duration),
            format_number(self.emission_fidelity),
            format_number(self.final_fidelity),
        )
        return ",".join(values)


@dataclass(frozen=True)
class RoundTripResult:
    forward: RunResult
    reverse: RunResult
    composite_fidelity: float


def _stage_integrator(cfg: ProtocolConfig, plan: StagePlan) -> IntegratorConfig:
    if plan.speed is not None:
        return cfg.integrator.with_max_step(1e-2 / plan.speed)
    return cfg.integrator.with_max_step(plan.duration / 50.0)


def _stage_grid(duration: float, output_dt: float) -> np.ndarray:
    n = max(2, int(round(duration / output_dt)) + 1)
    return np.linspace(0.0, duration, n)


def _population_columns(amps: Mapping[str, complex], pw: float) -> np.ndarray:
    pops = [abs(amps[lvl]) ** 2 for lvl in LEVELS[:3]] + [pw] + [
        abs(amps[lvl]) ** 2 for lvl in LEVELS[3:]
    ]
    return np.array(pops)


def run(cfg: ProtocolConfig, initial: Mapping[str, complex] | None = None,
        store_trajectory: bool = True, output_dt: float = 0.02) -> RunResult:
    """Execute the full schedule and return fidelities plus the stitched trajectory.

    ``initial`` maps level names to amplitudes (default: unit population in
    the source SR).  With ``store_trajectory`` off only stage endpoints are
    sampled, which is what parameter sweeps use.
    """
    sched = build_schedule(cfg)
    emission, conversion, receive = sched.stages

    amps: dict[str, complex] = dict.fromkeys(LEVELS, 0j)
    if initial is None:
        amps[sched.source_level] = 1.0 + 0j
    else:
        unknown = set(initial) - set(LEVELS)
        if unknown:
            raise ValueError(f"unknown level names {sorted(unknown)}")
        amps.update({k: complex(v) for k, v in initial.items()})

    rows_t: list[np.ndarray] = []
    rows_p: list[np.ndarray] = []

    def emit_rows(times_abs: np.ndarray, pops: np.ndarray, skip_first: bool) -> None:
        if not store_trajectory:
            return
        sl = slice(1, None) if skip_first else slice(None)
        rows_t.append(times_abs[sl])
        rows_p.append(pops[sl])

    # --- emission ---------------------------------------------------------
    window_end = emission.pulse_window[1]
    if store_trajectory:
        win_grid = _stage_grid(window_end, output_dt)
    else:
        win_grid = np.array([0.0, window_end])
    traj = dynamics.evolve_emission(
        emission.hamiltonian, cfg.rates.gamma3,
        [amps[lvl] for lvl in emission.levels],
        0.0, window_end, _stage_integrator(cfg, emission), t_eval=win_grid,
    )
    if emission.hold_duration > 0:
        if store_trajectory:
            hold_grid = window_end + _stage_grid(emission.hold_duration, output_dt)[1:]
        else:
            hold_grid = np.array([emission.t_end])
        traj = dynamics.extend_with_hold(traj, cfg.rates, emission.hold_duration, t_eval=hold_grid)

    fl_paper = traj.fidelity(LeakageDecayMode.PAPER)
    fl_physical = traj.fidelity(LeakageDecayMode.PHYSICAL)
    fl = traj.fidelity(cfg.leakage_decay_mode)

    if store_trajectory:
        base = _population_columns(amps, 0.0)
        pops = np.tile(base, (len(traj.times), 1))
        for k, lvl in enumerate(emission.levels):
            pops[:, TRAJECTORY_COLUMNS.index(f"P_{lvl}") - 1] = traj.populations[:, k]
        pops[:, 3] = traj.waveguide_population(cfg.leakage_decay_mode)
        emit_rows(emission.t_start + traj.times, pops, skip_first=False)

    for k, lvl in enumerate(emission.levels):
        amps[lvl] = complex(traj.final_amps[k])

    # --- conversion -------------------------------------------------------
    # The accumulated leak enters the two-mode exchange as one collective
    # amplitude of phase zero; final fidelities are phase-insensitive.
    u_w0 = math.sqrt(max(fl, 0.0))
    cav = conversion.levels[0]
    y0 = [u_w0, amps[cav]]
    grid = _stage_grid(conversion.duration, output_dt) if store_trajectory else None
    ctraj = dynamics.evolve(
        conversion.hamiltonian, y0, 0.0, conversion.duration,
        _stage_integrator(cfg, conversion), t_eval=grid,
    )
    in_pop = abs(y0[0]) ** 2 + abs(y0[1]) ** 2
    out_pop = abs(ctraj.final_state[1]) ** 2
    survival = out_pop / in_pop if in_pop > 0 else 1.0

    if store_trajectory:
        base = _population_columns(amps, 0.0)
        pops = np.tile(base, (len(ctraj.times), 1))
        pops[:, 3] = ctraj.populations[:, 0]
        pops[:, TRAJECTORY_COLUMNS.index(f"P_{cav}") - 1] = ctraj.populations[:, 1]
        emit_rows(conversion.t_start + ctraj.times, pops, skip_first=True)

    amps[cav] = complex(ctraj.final_state[1])
    pw_residual = float(abs(ctraj.final_state[0]) ** 2)

    # --- receive ----------------------------------------------------------
    y0 = [amps[lvl] for lvl in receive.levels]
    receive_in = sum(abs(a) ** 2 for a in y0)
    grid = _stage_grid(receive.duration, output_dt) if store_trajectory else None
    rtraj = dynamics.evolve(
        receive.hamiltonian, y0, 0.0, receive.duration,
        _stage_integrator(cfg, receive), t_eval=grid,
    )

    if store_trajectory:
        base = _population_columns(amps, pw_residual)
        pops = np.tile(base, (len(rtraj.times), 1))
        for k, lvl in enumerate(receive.levels):
            pops[:, TRAJECTORY_COLUMNS.index(f"P_{lvl}") - 1] = rtraj.populations[:, k]
        emit_rows(receive.t_start + rtraj.times, pops, skip_first=True)

    for k, lvl in enumerate(receive.levels):
        amps[lvl] = complex(rtraj.final_state[k])

    final = abs(amps[sched.target_level]) ** 2
    receive_stage = final / receive_in if receive_in > 0 else 1.0

    trajectory = None
    if store_trajectory:
        trajectory = StitchedTrajectory(
            times=np.concatenate(rows_t), populations=np.vstack(rows_p)
        )

    return RunResult(
        config=cfg,
        schedule=sched,
        emission_fidelity=fl,
        emission_fidelity_paper=fl_paper,
        emission_fidelity_physical=fl_physical,
        conversion_survival=survival,
        receive_stage_fidelity=receive_stage,
        final_fidelity=final,
        final_amplitudes=dict(amps),
        trajectory=trajectory,
    )


def round_trip(cfg: ProtocolConfig, store_trajectory: bool = False,
               output_dt: float = 0.02) -> RoundTripResult:
    """Forward transfer followed by the mirrored reverse transfer.

    The reverse leg starts from the forward end state (leftover waveguide
    population is treated as lost).  The composite fidelity is the population
    returned to the original source SR.
    """
    forward = run(cfg, store_trajectory=store_trajectory, output_dt=output_dt)
    back_dir = (
        Direction.REVERSE if cfg.direction is Direction.FORWARD else Direction.FORWARD
    )
    reverse_cfg = replace(cfg, direction=back_dir)
    reverse = run(
        reverse_cfg, initial=forward.final_amplitudes,
        store_trajectory=store_trajectory, output_dt=output_dt,
    )
    composite = abs(reverse.final_amplitudes[forward.schedule.source_level]) ** 2
    return RoundTripResult(forward=forward, reverse=reverse, composite_fidelity=composite)


def effective_emission_trajectory(cfg: ProtocolConfig, t_eval: Sequence[float]) -> EmissionTrajectory:
    """Emission-stage populations of the effective model on an exact sample grid.

    Used to compare against the discretized-waveguide oracle, which is
    integrated on the same grid.
    """
    sched = build_schedule(cfg)
    emission = sched.stages[0]
    window_end = emission.pulse_window[1]
    grid = np.asarray(t_eval, dtype=float)
    if grid[0] != 0.0 or grid[-1] > emission.duration + 1e-12:
        raise ValueError("samples must start at 0 and lie inside the emission stage")

    win_grid = grid[grid <= window_end]
    inserted = False
    if win_grid[-1] < window_end:
        win_grid = np.append(win_grid, window_end)
        inserted = True
    traj = dynamics.evolve_emission(
        emission.hamiltonian, cfg.rates.gamma3,
        [1.0, 0.0, 0.0], 0.0, window_end,
        _stage_integrator(cfg, emission), t_eval=win_grid,
    )
    hold_grid = grid[grid > window_end]
    if hold_grid.size:
        traj = dynamics.extend_with_hold(traj, cfg.rates, emission.hold_duration, t_eval=hold_grid)
    if inserted:
        keep = np.ones(len(traj.times), dtype=bool)
        keep[len(win_grid) - 1] = False
        traj = EmissionTrajectory(
            times=traj.times[keep], amps=traj.amps[keep],
            leak_raw=traj.leak_raw[keep], leak_weighted=traj.leak_weighted[keep],
            kappa=traj.kappa, gamma3=traj.gamma3, t0=traj.t0,
        )
    return traj


def write_couplings_csv(schedule: ProtocolSchedule, path: str | Path,
                        dt: float = 0.02) -> Path:
    """Sample every control waveform over the whole protocol into a CSV."""
    n = max(2, int(round(schedule.total_duration / dt)) + 1)
    ts = np.linspace(0.0, schedule.total_duration, n)
    lines = [",".join(COUPLING_COLUMNS)]
    for t in ts:
        row = schedule.couplings_at(float(t))
        lines.append(
            ",".join([format_number(t)] + [format_number(row[c]) for c in COUPLING_COLUMNS[1:]])
        )
    return write_text(path, "\n".join(lines) + "\n")
