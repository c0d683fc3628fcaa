#!/usr/bin/env python3
"""Reproduce the headline transfer fidelities and timings in one table.

Runs the lossless double-STA transfer, the STA-STIRAP baseline, the
dissipative double-STA transfer (both leakage-decay conventions), and a
lossless round trip, printing fidelity and duration for each.
"""

import time

from sta_link.dynamics import LeakageDecayMode
from sta_link.protocol import ProtocolConfig, round_trip, run


def row(label: str, result, elapsed: float) -> None:
    print(
        f"{label:34s} F_l = {result.emission_fidelity:.6f}  "
        f"F_e = {result.final_fidelity:.6f}  "
        f"t_total = {result.total_duration:8.4f}/g0  ({elapsed * 1e3:5.0f} ms)"
    )


def timed(cfg: ProtocolConfig):
    t0 = time.perf_counter()
    result = run(cfg, store_trajectory=False)
    return result, time.perf_counter() - t0


def main() -> None:
    print(f"{'configuration':34s} {'':10s}")
    row("double-STA, lossless", *timed(ProtocolConfig.paper_lossless()))
    row("STA-STIRAP baseline, lossless", *timed(ProtocolConfig.sta_stirap_baseline()))
    row("double-STA, dissipative (paper)", *timed(ProtocolConfig.paper_dissipative()))
    row(
        "double-STA, dissipative (phys.)",
        *timed(
            ProtocolConfig.paper_dissipative(
                leakage_decay_mode=LeakageDecayMode.PHYSICAL
            )
        ),
    )
    t0 = time.perf_counter()
    rt = round_trip(ProtocolConfig.paper_lossless())
    print(
        f"{'round trip, lossless':34s} composite = {rt.composite_fidelity:.6f}"
        f"{'':26s}({(time.perf_counter() - t0) * 1e3:5.0f} ms)"
    )


if __name__ == "__main__":
    main()
