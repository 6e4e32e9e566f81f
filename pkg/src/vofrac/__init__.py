"""Variable-order fractional integrals and derivatives, plus an audit
harness for the Leibniz-type identities built on them.

The package evaluates the left-sided variable-order fractional integral

    I f(t) = integral from a to t of (t - s)^(alpha(t, s) - 1)
             / Gamma(alpha(t, s)) * f(s) ds

and the derivative d/dt applied to the order-(1 - alpha) integral, then
audits product/quotient/power/chain-rule identities by computing both sides
numerically.  Exact identities must agree to quadrature tolerance; asserted
identities are measured, and for the product rules the residual is
reconciled against an independently computed nested mixed term.

Numerical kernels run on a compiled extension when available
(``vofrac._fastcore``) with a pure NumPy fallback; set ``VOFRAC_BACKEND`` to
``fast``, ``pure``, or ``auto`` (default) to choose at import time.
"""

from ._backend import active as active_backend, available as available_backends, use as use_backend
from .exprlang import (
    BoundBivariate,
    BoundUnivariate,
    DomainError,
    EvalError,
    EvalScope,
    Expr,
    ParseError,
    bind_bivariate,
    bind_univariate,
    check_positive_on_box,
    evaluate,
    free_vars,
    parse,
)
from .specialfn import gamma, log_gamma, vo_kernel, KernelPoint
from .quadrature import (
    DivergentIntegralError,
    QuadResult,
    QuadSpec,
    integrate_adaptive,
    integrate_upper_singular,
)
from .vo_operators import (
    OperatorValue,
    OrderValidationError,
    VODerivativeOperator,
    VOIntegralOperator,
    derivative_operator,
    integral_operator,
    vo_derivative,
    vo_integral,
    vo_integral_unit,
)
from .identity_catalog import (
    AuditRecord,
    CaseInputs,
    EXACT_IDS,
    IdentityId,
    classification_of,
    evaluate_case,
    mixed_term,
    required_inputs,
    run_bank,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "active_backend",
    "available_backends",
    "use_backend",
    "BoundBivariate",
    "BoundUnivariate",
    "DomainError",
    "EvalError",
    "EvalScope",
    "Expr",
    "ParseError",
    "bind_bivariate",
    "bind_univariate",
    "check_positive_on_box",
    "evaluate",
    "free_vars",
    "parse",
    "gamma",
    "log_gamma",
    "vo_kernel",
    "KernelPoint",
    "DivergentIntegralError",
    "QuadResult",
    "QuadSpec",
    "integrate_adaptive",
    "integrate_upper_singular",
    "OperatorValue",
    "OrderValidationError",
    "VODerivativeOperator",
    "VOIntegralOperator",
    "derivative_operator",
    "integral_operator",
    "vo_derivative",
    "vo_integral",
    "vo_integral_unit",
    "AuditRecord",
    "CaseInputs",
    "EXACT_IDS",
    "IdentityId",
    "classification_of",
    "evaluate_case",
    "mixed_term",
    "required_inputs",
    "run_bank",
]
