"""Truncated fractional calculus on an extended Mittag-Leffler kernel.

Thin re-export of the compiled module; every operation, its validation, and
its error messages live in the C++ core.
"""

from ._nucalc import (  # noqa: F401
    CheckCase,
    CheckReport,
    ClosedFormKind,
    ConvergenceError,
    DerivResult,
    DomainError,
    Expression,
    ExpressionParseError,
    Params,
    QuadratureControl,
    QuadResult,
    ReportIoError,
    SeriesResult,
    UnsupportedRegimeError,
    ValidationError,
    __version__,
    beta_fn,
    closed_form_deriv,
    closed_form_expression,
    compose_deriv,
    deriv_chain,
    deriv_limit,
    deriv_ml2,
    deriv_ml2_n,
    deriv_n,
    extended_beta,
    gamma_fn,
    integral,
    integral_full,
    integral_ml2,
    integral_power_kernel,
    ml1,
    ml3,
    ml_extended,
    ml_extended_gen,
    nu_constant,
    parse,
    run_suite,
    substitute,
)
