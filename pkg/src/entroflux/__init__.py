"""Finite-volume framework for 1D hyperbolic balance laws with stiff relaxation.

A staggered implicit predictor-corrector central scheme, a reduced 13-moment
shock-tube model with its entropy family, and two treatments of the model's
non-divergence remainder terms: a naive central-difference source and an
entropy-balance closure with a per-cell algebraic unknown.
"""

from .closures import (
    ClosureKind,
    EntropicFullClosure,
    EntropicScalarClosure,
    ExplicitClosure,
    GenericImplicitClosure,
    NaiveClosure,
    StageUnknowns,
    make_closure,
)
from .errors import (
    ConfigError,
    DisagreementError,
    EntrofluxError,
    EvaluationError,
    InvalidState,
    NoBracket,
    SolverDivergence,
    UnknownPreset,
    VacuumError,
)
from .euler import EulerModel, EulerState, exact_riemann
from .moment13 import ModelParams, Moment13Model, PhysicalState
from .newton import SolverConfig, bisect_scalar, fd_jacobian, newton_solve
from .presets import RiemannIC, RunConfig, dump_config, parse_config, preset
from .scheme import (
    FieldArray,
    GridConfig,
    RunResult,
    corrector,
    fill_ghosts,
    predictor,
    project_to_primal,
    riemann_field,
    run,
    step,
)

__version__ = "0.1.0"
