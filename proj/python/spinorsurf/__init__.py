"""Numerics for spinor surfaces in R^3."""

from ._spinorsurf import (
    ConfigParseError,
    ConformalityError,
    ConstraintError,
    DomainError,
    IncompatibilityError,
    InstabilityError,
    NotFloquetError,
    SingularityError,
    SpinorsurfError,
    UnsupportedGridError,
    ValidationError,
    builtin_scenarios,
    invert_point,
    load_scenario,
    mnv_rhs,
    parse_scenario,
    pipeline_names,
    realize,
    run_pipeline,
    solve_v,
    weierstrass_surface,
)

__all__ = [name for name in dir() if not name.startswith("_")]
