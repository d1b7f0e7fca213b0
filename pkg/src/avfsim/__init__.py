"""avfsim: reduced-order simulator of thermo-responsive antagonistic
shape-memory trap actuators.

Public API is re-exported here; see the module docstrings for the model.
"""

from ._kernels import BACKEND as kernel_backend
from ._kernels import available_backends
from .errors import (
    AvfsimError,
    ConfigError,
    ConvergenceError,
    DegenerateGroupError,
    DomainError,
    EmptyTraceError,
    InfeasibleError,
    NoProgressError,
    OverstrainError,
    ParseError,
    ProtocolError,
    UnknownPresetError,
    ValidationError,
)
from .materials import (
    CyclePhase,
    MaterialParams,
    ProgrammedState,
    blocked_recovery_force,
    frozen_fraction,
    modulus,
    program,
    release_ratio,
    retained_strain,
)
from .mechanics import (
    AvfAssembly,
    BistableLobeElement,
    DemonstratorConfig,
    LayoutKind,
    LobeSpec,
    StrandLayout,
    StrandSpec,
    build_assembly,
    double_well_energy,
    double_well_grad,
    lobe_energy,
    strand_energy,
    tip_displacement,
    total_energy,
)
from .solver import (
    EventReport,
    MotionTrace,
    SnapEvent,
    SolverSettings,
    ThermalProtocol,
    detect_events,
    equilibrate_step,
    fold_threshold,
    run_ramp,
)

__version__ = "0.1.0"
