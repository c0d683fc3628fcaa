"""Deterministic (v, |G3|) infidelity sweeps.

Each grid point runs the full dissipative protocol at v_l = v_r = v and
g3l = g3r = g3.  Points execute on a bounded worker pool, but rows are always
assembled in row-major order (v outer, g3 inner) and numbers rendered with a
fixed format, so the CSV is byte-identical regardless of worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import __version__
from .dynamics import DissipationRates, IntegratorConfig, LeakageDecayMode
from .protocol import Direction, ProtocolConfig, ReceiveKind, TlConvention, run
from .textio import format_number

__all__ = [
    "SweepGrid",
    "SweepPoint",
    "SweepResult",
    "run_sweep",
    "linear_grid",
    "default_grid",
    "grid_from_provenance",
    "SWEEP_COLUMNS",
]

SWEEP_COLUMNS = ("v", "g3", "infidelity", "t_total")

# Sentinel written for grid points whose run failed; the error text is kept
# in the provenance block.
FAILED_POINT = -1.0


def _default_base() -> ProtocolConfig:
    # Sweeps default to the dissipative protocol with the long-hold emission
    # stage so the cavity is fully drained at every grid point.
    return ProtocolConfig.paper_dissipative(t_l_convention=TlConvention.FIG3_FORMULA)


@dataclass(frozen=True)
class SweepGrid:
    """Strictly increasing v and g3 axes plus the shared config template."""

    v_values: tuple[float, ...]
    g3_values: tuple[float, ...]
    base: ProtocolConfig = field(default_factory=_default_base)

    def __post_init__(self) -> None:
        for name, values in (("v", self.v_values), ("g3", self.g3_values)):
            if len(values) == 0:
                raise ValueError(f"{name} grid is empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{name} grid must be strictly increasing")
            if values[0] <= 0:
                raise ValueError(f"{name} grid must be positive")

    def __len__(self) -> int:
        return len(self.v_values) * len(self.g3_values)

    def points(self) -> list[tuple[float, float]]:
        """Row-major (v outer, g3 inner) list of grid points."""
        return [(v, g3) for v in self.v_values for g3 in self.g3_values]


@dataclass(frozen=True)
class SweepPoint:
    v: float
    g3: float
    infidelity: float
    t_total: float
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    grid: SweepGrid
    points: tuple[SweepPoint, ...]
    provenance: dict

    def to_csv_text(self) -> str:
        lines = [",".join(SWEEP_COLUMNS)]
        for p in self.points:
            lines.append(
                ",".join(
                    format_number(x) for x in (p.v, p.g3, p.infidelity, p.t_total)
                )
            )
        return "\n".join(lines) + "\n"

    def provenance_json(self) -> str:
        return json.dumps(self.provenance, indent=2, sort_keys=True) + "\n"


def linear_grid(lo: float, hi: float, steps: int) -> tuple[float, ...]:
    """Inclusive linear grid with ``steps`` points."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1:
        return (lo,)
    if hi <= lo:
        raise ValueError("need hi > lo for a multi-point grid")
    h = (hi - lo) / (steps - 1)
    return tuple(lo + i * h for i in range(steps))


def default_grid() -> SweepGrid:
    """Default sweep bracketing the (v = 2.62, g3 = 0.5) operating point."""
    return SweepGrid(linear_grid(0.5, 4.0, 15), linear_grid(0.1, 1.0, 10))


def _run_point(task: tuple[int, float, float, ProtocolConfig]) -> tuple[int, SweepPoint]:
    index, v, g3, base = task
    cfg = replace(base, v_l=v, v_r=v, g3l=g3, g3r=g3)
    try:
        result = run(cfg, store_trajectory=False)
        point = SweepPoint(v, g3, result.infidelity, result.total_duration)
    except Exception as exc:  # recorded, never aborts the sweep
        point = SweepPoint(v, g3, FAILED_POINT, FAILED_POINT, f"{type(exc).__name__}: {exc}")
    return index, point


def config_to_dict(cfg: ProtocolConfig) -> dict:
    return {
        "v_l": cfg.v_l,
        "v_r": cfg.v_r,
        "g0": cfg.g0,
        "g3l": cfg.g3l,
        "g3r": cfg.g3r,
        "gamma1": cfg.rates.gamma1,
        "gamma2": cfg.rates.gamma2,
        "gamma3": cfg.rates.gamma3,
        "receive_kind": cfg.receive_kind.value,
        "direction": cfg.direction.value,
        "t_l_convention": cfg.t_l_convention.value,
        "leakage_decay_mode": cfg.leakage_decay_mode.value,
        "integrator_method": cfg.integrator.method,
        "integrator_rtol": cfg.integrator.rtol,
        "integrator_atol": cfg.integrator.atol,
        "integrator_max_step": cfg.integrator.max_step,
    }


def config_from_dict(d: dict) -> ProtocolConfig:
    return ProtocolConfig(
        v_l=d["v_l"],
        v_r=d["v_r"],
        g0=d["g0"],
        g3l=d["g3l"],
        g3r=d["g3r"],
        rates=DissipationRates(d["gamma1"], d["gamma2"], d["gamma3"]),
        receive_kind=ReceiveKind(d["receive_kind"]),
        direction=Direction(d["direction"]),
        t_l_convention=TlConvention(d["t_l_convention"]),
        leakage_decay_mode=LeakageDecayMode(d["leakage_decay_mode"]),
        integrator=IntegratorConfig(
            method=d["integrator_method"],
            rtol=d["integrator_rtol"],
            atol=d["integrator_atol"],
            max_step=d["integrator_max_step"],
        ),
    )


def grid_from_provenance(provenance: dict) -> SweepGrid:
    """Rebuild the exact sweep inputs recorded by :func:`run_sweep`."""
    return SweepGrid(
        v_values=tuple(provenance["v_values"]),
        g3_values=tuple(provenance["g3_values"]),
        base=config_from_dict(provenance["config"]),
    )


def run_sweep(grid: SweepGrid, jobs: int = 1) -> SweepResult:
    """Run every grid point and assemble rows in deterministic order."""
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    tasks = [
        (i, v, g3, grid.base) for i, (v, g3) in enumerate(grid.points())
    ]
    results: list[SweepPoint | None] = [None] * len(tasks)
    if jobs == 1 or len(tasks) == 1:
        for task in tasks:
            index, point = _run_point(task)
            results[index] = point
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for index, point in pool.map(_run_point, tasks):
                results[index] = point

    points = tuple(results)  # type: ignore[arg-type]
    errors = {str(i): p.error for i, p in enumerate(points) if p.error}
    provenance = {
        "tool": "sta-link",
        "version": __version__,
        "config": config_to_dict(grid.base),
        "v_values": list(grid.v_values),
        "g3_values": list(grid.g3_values),
        "row_order": "row-major (v outer, g3 inner)",
        "errors": errors,
    }
    return SweepResult(grid=grid, points=points, provenance=provenance)
