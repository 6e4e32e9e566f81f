"""The left variable-order fractional integral and derivative operators.

The integral of order ``alpha(.,.)`` with lower limit ``a`` is::

    (I f)(t) = integral_a^t (t-s)^(alpha(t,s)-1) / Gamma(alpha(t,s)) f(s) ds

evaluated by :func:`~vofrac.quadrature.integrate_upper_singular` in
distance-to-endpoint coordinates with the exponent hint ``alpha(t,t) - 1``.
The derivative of order ``alpha(.,.)`` (codomain (0,1)) is the literal
``d/dt`` of the order-``1-alpha`` integral, taken by a central finite
difference (forward near ``t = a``); no differentiated-kernel shortcut is
assumed.

Operators are immutable; their order functions are positivity-validated on
the working box ``[a, t_max]^2`` at construction, and applications outside
that box are rejected rather than silently trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import _backend
from .exprlang import (
    BinOp,
    BoundBivariate,
    BoundUnivariate,
    Const,
    DomainError,
    Expr,
    bind_bivariate,
    check_positive_on_box,
    free_vars,
    parse,
)
from .quadrature import QuadSpec, _as_array_fn, integrate_upper_singular
from .specialfn import gamma

__all__ = [
    "OrderValidationError",
    "OperatorValue",
    "VOIntegralOperator",
    "VODerivativeOperator",
    "integral_operator",
    "derivative_operator",
    "vo_integral",
    "vo_integral_unit",
    "vo_derivative",
    "constant_order_power_oracle",
    "constant_order_power_derivative_oracle",
]

_EPS = float(np.finfo(np.float64).eps)

OrderFn = Union[BoundBivariate, Callable[[float, float], float]]


class OrderValidationError(ValueError):
    """The order function violated its codomain on the working box."""


@dataclass(frozen=True)
class OperatorValue:
    """Result of applying an operator at one point; mirrors the
    :class:`~vofrac.quadrature.QuadResult` contract."""

    value: float
    err_estimate: float
    converged: bool


@dataclass(frozen=True)
class VOIntegralOperator:
    """Lower limit, validated order function ``alpha(t, s)`` with codomain
    (0, inf), quadrature policy, and the validated box end ``t_max``."""

    a: float
    order: OrderFn
    spec: QuadSpec
    t_max: float
    _unit_cache: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class VODerivativeOperator:
    """Lower limit, validated order ``alpha(t, s)`` with codomain (0, 1),
    finite-difference policy, and the pre-built order-``1-alpha`` integral
    operator it differentiates."""

    a: float
    order: OrderFn
    fd_step: float
    fd_mode: str
    spec: QuadSpec
    t_max: float
    complement: VOIntegralOperator = field(compare=False, repr=False)


def _as_order_handle(order: Union[str, Expr, OrderFn]) -> OrderFn:
    if isinstance(order, str):
        order = parse(order)
    if isinstance(order, Expr):
        extra = free_vars(order) - {"t", "s"}
        if extra:
            raise ValueError(
                f"order expressions use variables t and s; found {sorted(extra)}"
            )
        return bind_bivariate(order, "t", "s")
    if isinstance(order, BoundBivariate) or callable(order):
        return order
    raise TypeError(f"cannot interpret {order!r} as an order function")


def _order_many(order: OrderFn, t: float, s: np.ndarray) -> np.ndarray:
    if isinstance(order, BoundBivariate):
        return order.eval_many(t, s)
    return np.array([float(order(t, float(v))) for v in s], dtype=np.float64)


def _validate_positive(order: OrderFn, lo: float, hi: float, grid: int, what: str) -> None:
    result = check_positive_on_box(order, ((lo, hi), (lo, hi)), grid=grid, floor=0.0)
    if not result.passed:
        raise OrderValidationError(
            f"{what} must be positive on [{lo!r}, {hi!r}]^2; "
            f"sampled minimum {result.min_value!r} at {result.at!r}"
        )


def integral_operator(
    a: float,
    order: Union[str, Expr, OrderFn],
    spec: QuadSpec = QuadSpec(),
    *,
    t_max: float,
    grid: int = 33,
) -> VOIntegralOperator:
    """Build an integral operator, validating ``order > 0`` on
    ``[a, t_max]^2`` (the box every later application must stay inside)."""
    if not (math.isfinite(a) and math.isfinite(t_max) and t_max > a):
        raise ValueError(f"need finite a < t_max, got a={a!r}, t_max={t_max!r}")
    handle = _as_order_handle(order)
    _validate_positive(handle, a, t_max, grid, "integral order alpha(t, s)")
    return VOIntegralOperator(a=float(a), order=handle, spec=spec, t_max=float(t_max))


def derivative_operator(
    a: float,
    order: Union[str, Expr, OrderFn],
    spec: QuadSpec = QuadSpec(),
    *,
    t_max: float,
    fd_step: float = 1e-5,
    fd_mode: str = "central",
    grid: int = 33,
) -> VODerivativeOperator:
    """Build a derivative operator, validating ``0 < order < 1`` strictly at
    samples of ``[a, box]^2`` where ``box`` extends past ``t_max`` by the
    finite-difference stencil width."""
    if not (math.isfinite(a) and math.isfinite(t_max) and t_max > a):
        raise ValueError(f"need finite a < t_max, got a={a!r}, t_max={t_max!r}")
    if fd_mode not in ("central", "forward"):
        raise ValueError(f"fd_mode must be central or forward, got {fd_mode!r}")
    if not (0.0 < fd_step < 1.0):
        raise ValueError(f"fd_step must be in (0, 1), got {fd_step!r}")
    handle = _as_order_handle(order)
    box_hi = t_max + 2.0 * fd_step * max(1.0, abs(t_max))
    _validate_positive(handle, a, box_hi, grid, "derivative order alpha(t, s)")

    if isinstance(handle, BoundBivariate):
        complement_handle: OrderFn = bind_bivariate(
            BinOp("-", Const(1.0), handle.expr), handle.var1, handle.var2
        )
    else:
        complement_handle = lambda t, s: 1.0 - handle(t, s)  # noqa: E731
    _validate_positive(
        complement_handle, a, box_hi, grid, "derivative order complement 1 - alpha(t, s)"
    )
    inner = VOIntegralOperator(
        a=float(a), order=complement_handle, spec=spec, t_max=box_hi
    )
    return VODerivativeOperator(
        a=float(a),
        order=handle,
        fd_step=float(fd_step),
        fd_mode=fd_mode,
        spec=spec,
        t_max=float(t_max),
        complement=inner,
    )


def vo_integral(
    op: VOIntegralOperator,
    f: Union[BoundUnivariate, Callable[[float], float]],
    t: float,
) -> OperatorValue:
    """Apply the variable-order integral to ``f`` at ``t`` (``t >= a``).

    ``t == a`` is the empty interval and returns 0 exactly.
    """
    if t == op.a:
        return OperatorValue(0.0, 0.0, True)
    if not (op.a < t <= op.t_max):
        raise ValueError(
            f"t={t!r} outside (a, t_max] = ({op.a!r}, {op.t_max!r}] of this operator"
        )
    fa = _as_array_fn(f)
    order = op.order
    alpha_tt = float(order(t, t))
    core = _backend.core

    def integrand_from_dist(u: np.ndarray) -> np.ndarray:
        s = t - u
        alpha = _order_many(order, t, s)
        kern = np.exp((alpha - 1.0) * np.log(u) - core.log_gamma_array(alpha))
        values = kern * fa(s)
        if not np.isfinite(values).all():
            raise DomainError(
                f"non-finite kernel integrand near t={t!r} (order out of range?)"
            )
        return values

    result = integrate_upper_singular(
        None, op.a, t, alpha_tt - 1.0, op.spec, f_from_dist=integrand_from_dist
    )
    return OperatorValue(result.value, result.err_estimate, result.converged)


def _ones(x: np.ndarray) -> np.ndarray:
    return np.ones(x.shape, dtype=np.float64)


def vo_integral_unit(op: VOIntegralOperator, t: float) -> OperatorValue:
    """The unit integral I(1) at ``t``, memoized per operator instance.

    Concurrent duplicate computation is possible and harmless; entries are
    only ever the deterministic result for that ``t``.
    """
    key = float(t)
    cached = op._unit_cache.get(key)
    if cached is None:
        cached = vo_integral(op, _ones, t)
        op._unit_cache[key] = cached
    return cached


def vo_derivative(
    op: VODerivativeOperator,
    f: Union[BoundUnivariate, Callable[[float], float]],
    t: float,
) -> OperatorValue:
    """Apply the variable-order derivative: a finite difference of the
    order-``1-alpha`` integral ``u``.

    Central mode uses ``(u(t+h) - u(t-h)) / 2h`` with ``h = fd_step *
    max(1, |t|)``, falling back to forward mode when ``t - h`` would cross
    the lower limit.  The error estimate combines the inner quadrature
    estimates with an ``O(h^2)`` (central) or ``O(h)`` (forward) truncation
    model.
    """
    if not (t > op.a):
        raise ValueError(f"derivative requires t > a, got t={t!r}, a={op.a!r}")
    h = op.fd_step * max(1.0, abs(t))
    if h < 100.0 * _EPS * abs(t):
        raise ValueError(
            f"fd step {h!r} underflows float spacing at t={t!r}; increase fd_step"
        )
    if t + h > op.complement.t_max:
        raise ValueError(
            f"t={t!r} too close to t_max={op.t_max!r}; rebuild with larger t_max"
        )
    mode = op.fd_mode
    if mode == "central" and t - h <= op.a:
        mode = "forward"
    upper = vo_integral(op.complement, f, t + h)
    if mode == "central":
        lower = vo_integral(op.complement, f, t - h)
        value = (upper.value - lower.value) / (2.0 * h)
        quad_err = (upper.err_estimate + lower.err_estimate) / (2.0 * h)
        trunc = h * h * max(1.0, abs(value))
    else:
        lower = vo_integral(op.complement, f, t)
        value = (upper.value - lower.value) / h
        quad_err = (upper.err_estimate + lower.err_estimate) / h
        trunc = h * max(1.0, abs(value))
    return OperatorValue(value, quad_err + trunc, upper.converged and lower.converged)


def constant_order_power_oracle(alpha: float, mu: float, a: float, t: float) -> float:
    """Closed form for the constant-order integral of ``(s-a)^mu``:
    ``Gamma(mu+1)/Gamma(mu+1+alpha) * (t-a)^(mu+alpha)``."""
    if not t > a:
        raise ValueError(f"requires t > a, got t={t!r}, a={a!r}")
    return gamma(mu + 1.0) / gamma(mu + 1.0 + alpha) * (t - a) ** (mu + alpha)


def constant_order_power_derivative_oracle(
    alpha: float, mu: float, a: float, t: float
) -> float:
    """Closed form for the constant-order derivative of ``(s-a)^mu``:
    ``Gamma(mu+1)/Gamma(mu+1-alpha) * (t-a)^(mu-alpha)``."""
    if not t > a:
        raise ValueError(f"requires t > a, got t={t!r}, a={a!r}")
    return gamma(mu + 1.0) / gamma(mu + 1.0 - alpha) * (t - a) ** (mu - alpha)
