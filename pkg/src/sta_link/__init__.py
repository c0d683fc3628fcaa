"""Fast state transfer over a waveguide link via dressed-pulse shortcuts.

Subpackages: ``pulses`` (closed-form control waveforms), ``dynamics``
(stage Hamiltonians and amplitude evolution), ``continuum`` (brute-force
discretized-waveguide oracle), ``protocol`` (three-stage scheduling and
end-to-end runs), ``sweep`` (deterministic parameter sweeps), ``cli``
(command-line front end).
"""

__version__ = "0.1.0"

from .dynamics import (  # noqa: E402
    DissipationRates,
    IntegratorConfig,
    LeakageDecayMode,
    Stage,
)
from .protocol import (  # noqa: E402
    Direction,
    ProtocolConfig,
    ReceiveKind,
    RunResult,
    TlConvention,
    build_schedule,
    round_trip,
    run,
)
from .pulses import (  # noqa: E402
    BarePulsePair,
    CorrectedPulsePair,
    DressingKind,
    DressingProfile,
    MixingAngleProfile,
    truncation_window,
)
from .sweep import SweepGrid, SweepResult, default_grid, run_sweep  # noqa: E402

__all__ = [
    "__version__",
    "BarePulsePair",
    "CorrectedPulsePair",
    "Direction",
    "DissipationRates",
    "DressingKind",
    "DressingProfile",
    "IntegratorConfig",
    "LeakageDecayMode",
    "MixingAngleProfile",
    "ProtocolConfig",
    "ReceiveKind",
    "RunResult",
    "Stage",
    "SweepGrid",
    "SweepResult",
    "TlConvention",
    "build_schedule",
    "default_grid",
    "round_trip",
    "run",
    "run_sweep",
    "truncation_window",
]
