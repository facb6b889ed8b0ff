"""Reflexive feedback pairs y = f(x), x = phi(y) as discrete dynamical
systems: iteration, fixed points and stability, inverse-distance and
boom-bust diagnostics, conjugacy verification, and cobweb/phase rendering.
"""

from .expr import (
    DualValue,
    EvalDomainError,
    Expression,
    ExpressionError,
    MultipleVariablesError,
    NonDifferentiableError,
    ParseError,
    UnknownIdentifierError,
    derivative,
    evaluate,
    parse,
    serialize,
)
from .dynamics import (
    FixedPoint,
    Orbit,
    OrbitNumericError,
    PreconditionError,
    ReflexiveSystem,
    ScalarMap,
    SystemState,
    check_proposition_1,
    classify_stability,
    compose_gamma,
    compose_phi_map,
    find_fixed_points,
    make_system,
    orbit,
    step,
)
from .analysis import (
    BoomBustEvent,
    ConjugacyReport,
    DistanceReport,
    NonMonotoneError,
    OutOfRangeError,
    PeriodReport,
    detect_boom_bust,
    detect_period,
    detect_recurrence,
    function_distance,
    invert_numeric,
    verify_conjugacy,
)
from .render import (
    PhasePortraitTrace,
    RenderOptions,
    StaircaseTrace,
    orbit_states_from_csv,
    phase_portrait,
    staircase,
    to_csv,
    to_svg,
)

__version__ = "0.1.0"
