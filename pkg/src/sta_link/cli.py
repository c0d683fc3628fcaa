"""Command-line front end: single runs, sweeps, waveform dumps, validation.

All defaults match the reference operating point (v = 2.62 g0, g3 = 0.5 g0,
dissipation rates 1e-3/1e-4/1e-3 when enabled).  A flat ``key = value``
config file can seed any option; explicit flags win over the file.  Exit
status: 0 on success, 1 on validation failure, 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .checks import CHECK_NAMES, run_checks
from .dynamics import DissipationRates, IntegratorConfig, LeakageDecayMode
from .protocol import (
    Direction,
    ProtocolConfig,
    ReceiveKind,
    SUMMARY_COLUMNS,
    TlConvention,
    round_trip,
    run,
    write_couplings_csv,
)
from .pulses import BarePulsePair, CorrectedPulsePair, truncation_window
from .sweep import SweepGrid, linear_grid, run_sweep
from .textio import format_number, parse_key_value, write_text

__all__ = ["main"]

JOBS_ENV_VAR = "STA_LINK_JOBS"

_MODES = ("double-sta", "sta-stirap", "reverse", "round-trip")
_TL = {"text30": TlConvention.TEXT_30_OVER_V, "fig3": TlConvention.FIG3_FORMULA}
_LEAK = {"paper": LeakageDecayMode.PAPER, "physical": LeakageDecayMode.PHYSICAL}

_SIMULATE_DEFAULTS = {
    "mode": "double-sta",
    "dissipative": False,
    "v": None,
    "v_l": None,
    "v_r": None,
    "g3": None,
    "g3l": None,
    "g3r": None,
    "tl_convention": "text30",
    "leak_mode": "paper",
    "rtol": 1e-10,
    "atol": 1e-12,
    "method": "RK45",
    "output_dt": 0.02,
    "out": None,
}

_SWEEP_DEFAULTS = {
    "v_min": 0.5,
    "v_max": 4.0,
    "v_steps": 15,
    "g3_min": 0.1,
    "g3_max": 1.0,
    "g3_steps": 10,
    "jobs": None,
    "dissipative": True,
    "tl_convention": "fig3",
    "leak_mode": "paper",
    "rtol": 1e-10,
    "atol": 1e-12,
    "method": "RK45",
    "out": ".",
}

_PULSES_DEFAULTS = {
    "node": "a",
    "kind": None,
    "v": 2.62,
    "g3": 0.5,
    "samples": 501,
    "out": None,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sta-link",
        description="Simulate dressed-pulse state transfer across a waveguide link.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one end-to-end protocol")
    sim.add_argument("--mode", choices=_MODES)
    loss = sim.add_mutually_exclusive_group()
    loss.add_argument("--dissipative", dest="dissipative", action="store_const", const=True)
    loss.add_argument("--lossless", dest="dissipative", action="store_const", const=False)
    sim.add_argument("--v", type=float, help="protocol speed for both nodes (g0)")
    sim.add_argument("--v-l", type=float, dest="v_l")
    sim.add_argument("--v-r", type=float, dest="v_r")
    sim.add_argument("--g3", type=float, help="waveguide coupling for both nodes (g0)")
    sim.add_argument("--g3l", type=float)
    sim.add_argument("--g3r", type=float)
    sim.add_argument("--tl-convention", choices=sorted(_TL), dest="tl_convention")
    sim.add_argument("--leak-mode", choices=sorted(_LEAK), dest="leak_mode")
    sim.add_argument("--rtol", type=float)
    sim.add_argument("--atol", type=float)
    sim.add_argument("--method", choices=("RK45", "DOP853"))
    sim.add_argument("--output-dt", type=float, dest="output_dt")
    sim.add_argument("--out", help="directory for trajectory/couplings/summary files")
    sim.add_argument("--config", help="flat key = value file seeding these options")

    swp = sub.add_parser("sweep", help="map infidelity over a (v, g3) grid")
    swp.add_argument("--v-min", type=float, dest="v_min")
    swp.add_argument("--v-max", type=float, dest="v_max")
    swp.add_argument("--v-steps", type=int, dest="v_steps")
    swp.add_argument("--g3-min", type=float, dest="g3_min")
    swp.add_argument("--g3-max", type=float, dest="g3_max")
    swp.add_argument("--g3-steps", type=int, dest="g3_steps")
    swp.add_argument("--jobs", type=int, help=f"worker processes (or ${JOBS_ENV_VAR})")
    loss = swp.add_mutually_exclusive_group()
    loss.add_argument("--dissipative", dest="dissipative", action="store_const", const=True)
    loss.add_argument("--lossless", dest="dissipative", action="store_const", const=False)
    swp.add_argument("--tl-convention", choices=sorted(_TL), dest="tl_convention")
    swp.add_argument("--leak-mode", choices=sorted(_LEAK), dest="leak_mode")
    swp.add_argument("--rtol", type=float)
    swp.add_argument("--atol", type=float)
    swp.add_argument("--method", choices=("RK45", "DOP853"))
    swp.add_argument("--out", help="directory for sweep.csv and provenance.json")
    swp.add_argument("--config")

    pul = sub.add_parser("pulses", help="dump sampled waveforms as CSV")
    pul.add_argument("--node", choices=("a", "b"))
    pul.add_argument("--kind", choices=("satd", "satd-kappa", "vitanov"))
    pul.add_argument("--v", type=float)
    pul.add_argument("--g3", type=float)
    pul.add_argument("--samples", type=int)
    pul.add_argument("--out", help="output file (default: stdout)")
    pul.add_argument("--config")

    val = sub.add_parser("validate", help="run built-in consistency checks")
    val.add_argument("--check", choices=CHECK_NAMES + ("all",), default="all")
    return parser


def _merge_options(args: argparse.Namespace, defaults: dict) -> dict:
    """builtin defaults < config file < explicit flags."""
    merged = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        raw = parse_key_value(Path(config_path).read_text(encoding="utf-8"))
        for key, text in raw.items():
            if key not in defaults:
                raise ValueError(f"unknown config key {key!r}")
            merged[key] = _coerce(text, defaults[key])
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _coerce(text: str, template) -> object:
    if isinstance(template, bool) or text.lower() in ("true", "false"):
        return text.lower() == "true"
    if isinstance(template, int) and not isinstance(template, bool):
        return int(text)
    if isinstance(template, float):
        return float(text)
    try:
        return float(text)
    except ValueError:
        return text


def _simulate_config(opt: dict) -> ProtocolConfig:
    mode = opt["mode"]
    v_l = opt["v_l"] if opt["v_l"] is not None else (opt["v"] if opt["v"] is not None else 2.62)
    if opt["v_r"] is not None:
        v_r = opt["v_r"]
    elif opt["v"] is not None:
        v_r = opt["v"]
    elif mode == "sta-stirap":
        v_r = 1.0
    else:
        v_r = v_l
    g3l = opt["g3l"] if opt["g3l"] is not None else (opt["g3"] if opt["g3"] is not None else 0.5)
    g3r = opt["g3r"] if opt["g3r"] is not None else (opt["g3"] if opt["g3"] is not None else g3l)
    rates = DissipationRates.dissipative_defaults() if opt["dissipative"] else DissipationRates.lossless()
    return ProtocolConfig(
        v_l=v_l,
        v_r=v_r,
        g3l=g3l,
        g3r=g3r,
        rates=rates,
        receive_kind=ReceiveKind.STIRAP if mode == "sta-stirap" else ReceiveKind.SATD,
        direction=Direction.REVERSE if mode == "reverse" else Direction.FORWARD,
        t_l_convention=_TL[opt["tl_convention"]],
        leakage_decay_mode=_LEAK[opt["leak_mode"]],
        integrator=IntegratorConfig(method=opt["method"], rtol=opt["rtol"], atol=opt["atol"]),
    )


def _write_run_outputs(result, out_dir: Path, output_dt: float, suffix: str = "") -> None:
    result.trajectory.write_csv(out_dir / f"trajectory{suffix}.csv")
    write_couplings_csv(result.schedule, out_dir / f"couplings{suffix}.csv", dt=output_dt)


def _cmd_simulate(args: argparse.Namespace) -> int:
    opt = _merge_options(args, _SIMULATE_DEFAULTS)
    cfg = _simulate_config(opt)
    store = opt["out"] is not None
    print(",".join(SUMMARY_COLUMNS))

    if opt["mode"] == "round-trip":
        rt = round_trip(cfg, store_trajectory=store, output_dt=opt["output_dt"])
        print(rt.forward.summary_line())
        print(rt.reverse.summary_line())
        print(f"composite_fidelity,{format_number(rt.composite_fidelity)}")
        if store:
            out_dir = Path(opt["out"])
            _write_run_outputs(rt.forward, out_dir, opt["output_dt"])
            _write_run_outputs(rt.reverse, out_dir, opt["output_dt"], suffix="_reverse")
            summary = {
                "forward": rt.forward.summary_dict(),
                "reverse": rt.reverse.summary_dict(),
                "composite_fidelity": rt.composite_fidelity,
            }
            write_text(out_dir / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
        return 0

    result = run(cfg, store_trajectory=store, output_dt=opt["output_dt"])
    print(result.summary_line())
    if store:
        out_dir = Path(opt["out"])
        _write_run_outputs(result, out_dir, opt["output_dt"])
        write_text(
            out_dir / "summary.csv",
            ",".join(SUMMARY_COLUMNS) + "\n" + result.summary_line() + "\n",
        )
        write_text(
            out_dir / "summary.json",
            json.dumps(result.summary_dict(), indent=2, sort_keys=True) + "\n",
        )
    return 0


def _resolve_jobs(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get(JOBS_ENV_VAR)
    return int(env) if env else 1


def _cmd_sweep(args: argparse.Namespace) -> int:
    opt = _merge_options(args, _SWEEP_DEFAULTS)
    rates = DissipationRates.dissipative_defaults() if opt["dissipative"] else DissipationRates.lossless()
    base = ProtocolConfig(
        rates=rates,
        t_l_convention=_TL[opt["tl_convention"]],
        leakage_decay_mode=_LEAK[opt["leak_mode"]],
        integrator=IntegratorConfig(method=opt["method"], rtol=opt["rtol"], atol=opt["atol"]),
    )
    grid = SweepGrid(
        linear_grid(opt["v_min"], opt["v_max"], opt["v_steps"]),
        linear_grid(opt["g3_min"], opt["g3_max"], opt["g3_steps"]),
        base,
    )
    result = run_sweep(grid, jobs=_resolve_jobs(opt["jobs"]))
    out_dir = Path(opt["out"])
    csv_path = write_text(out_dir / "sweep.csv", result.to_csv_text())
    write_text(out_dir / "provenance.json", result.provenance_json())
    failed = sum(1 for p in result.points if p.error)
    print(f"{csv_path}: {len(result.points)} rows ({failed} failed)")
    return 0


def _cmd_pulses(args: argparse.Namespace) -> int:
    opt = _merge_options(args, _PULSES_DEFAULTS)
    kind = opt["kind"] or ("satd-kappa" if opt["node"] == "a" else "satd")
    v, g3 = opt["v"], opt["g3"]
    if kind == "satd-kappa":
        pair = CorrectedPulsePair.satd_kappa(v, g3)
    elif kind == "satd":
        pair = CorrectedPulsePair.satd(v)
    else:
        pair = BarePulsePair.vitanov(v)
    t0, t1 = truncation_window(v)
    ts = np.linspace(t0, t1, int(opt["samples"]))
    theta = pair.angle.angle(ts)
    mu = pair.dressing.mu(ts) if isinstance(pair, CorrectedPulsePair) else np.zeros_like(ts)
    g1, g2 = pair.g1c(ts), pair.g2c(ts)
    lines = ["t,G1c,G2c,mu,theta"]
    for row in zip(ts, g1, g2, mu, theta):
        lines.append(",".join(format_number(x) for x in row))
    text = "\n".join(lines) + "\n"
    if opt["out"]:
        write_text(opt["out"], text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    ok, lines = run_checks(args.check)
    for name, passed, detail in lines:
        print(f"{name}: {'PASS' if passed else 'FAIL'} ({detail})")
    return 0 if ok else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "pulses": _cmd_pulses,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
