"""Catalog of Leibniz-type identities for variable-order operators.

Every identity is an evaluatable LHS/RHS pair carrying a classification:

* ``exact`` -- equalities whose derivations are complete algebraic
  rearrangements (the two-point product theorem ``THM_MAIN`` and its
  difference form ``THM_DIFF``); these must agree to quadrature tolerance.
* ``asserted`` -- every product/quotient/power/chain rule and their
  consequences, all obtained by collapsing the two evaluation points (or
  equivalent substitutions) while silently dropping the nested mixed term.
  The catalog measures their residuals; it never assumes they hold.

For the four product rules the dropped correction is recomputed
independently (``mixed_term``) and the residual is reconciled against it:
``LHS - RHS`` should equal the mixed term at ``s = t`` for types I/II and
``mixed / (2 I(1))`` for types III/IV.

Both sides are assembled from :func:`~vofrac.vo_operators.vo_integral` /
:func:`~vofrac.vo_operators.vo_derivative` applications with first-order
error propagation; ``err_budget`` is the propagated uncertainty of
``LHS - RHS`` (plus the correction term where reconciliation applies) and is
the yardstick for exact-identity pass/fail.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .exprlang import (
    BinOp,
    BoundBivariate,
    BoundUnivariate,
    Const,
    Expr,
    Var,
    bind_bivariate,
    bind_univariate,
    free_vars,
    parse,
    subst,
)
from .quadrature import QuadSpec
from .vo_operators import (
    OperatorValue,
    VODerivativeOperator,
    VOIntegralOperator,
    derivative_operator,
    integral_operator,
    vo_derivative,
    vo_integral,
    vo_integral_unit,
)

__all__ = [
    "IdentityId",
    "CaseInputs",
    "AuditRecord",
    "IllConditionedError",
    "EXACT_IDS",
    "classification_of",
    "required_inputs",
    "mixed_term",
    "eval_thm_main",
    "eval_product_rule",
    "eval_quotient_rule",
    "eval_power_rule",
    "eval_chain_rule",
    "eval_thm_diff",
    "eval_cor_diff_sq",
    "eval_cor_diff_zero",
    "eval_thm_bivar",
    "eval_deriv_prod_iii",
    "evaluate_case",
    "run_bank",
]

#: Magnitude below which a unit integral may not be inverted.
ILL_COND_FLOOR = 1e-12
#: Quotient rules require |h| to clear this floor at 256 samples per range.
H_FLOOR = 1e-6
_H_SAMPLES = 256


class IllConditionedError(ValueError):
    """A unit integral too close to zero was about to be inverted."""


class IdentityId(str, Enum):
    THM_MAIN = "THM_MAIN"
    PROD_I = "PROD_I"
    PROD_II = "PROD_II"
    PROD_III = "PROD_III"
    PROD_IV = "PROD_IV"
    QUOT_I = "QUOT_I"
    QUOT_II = "QUOT_II"
    QUOT_III = "QUOT_III"
    QUOT_IV = "QUOT_IV"
    POWER_N = "POWER_N"
    CHAIN_I = "CHAIN_I"
    CHAIN_II = "CHAIN_II"
    CHAIN_III = "CHAIN_III"
    CHAIN_IV = "CHAIN_IV"
    THM_DIFF = "THM_DIFF"
    COR_DIFF_SQ = "COR_DIFF_SQ"
    COR_DIFF_ZERO = "COR_DIFF_ZERO"
    THM_BIVAR = "THM_BIVAR"
    DERIV_PROD_III = "DERIV_PROD_III"

    def __str__(self) -> str:  # plain name in reports
        return self.value


EXACT_IDS = frozenset({IdentityId.THM_MAIN, IdentityId.THM_DIFF})

_REQUIRED: dict[IdentityId, frozenset[str]] = {
    IdentityId.THM_MAIN: frozenset({"f", "g", "alpha", "beta", "a", "c", "t", "s"}),
    IdentityId.PROD_I: frozenset({"f", "g", "alpha", "beta", "a", "c", "t"}),
    IdentityId.PROD_II: frozenset({"f", "g", "alpha", "beta", "a", "t"}),
    IdentityId.PROD_III: frozenset({"f", "g", "alpha", "a", "t"}),
    IdentityId.PROD_IV: frozenset({"f", "alpha", "a", "t"}),
    IdentityId.QUOT_I: frozenset({"f", "h", "alpha", "beta", "a", "c", "t"}),
    IdentityId.QUOT_II: frozenset({"f", "h", "alpha", "beta", "a", "t"}),
    IdentityId.QUOT_III: frozenset({"f", "h", "alpha", "a", "t"}),
    IdentityId.QUOT_IV: frozenset({"h", "alpha", "a", "t"}),
    IdentityId.POWER_N: frozenset({"f", "alpha", "a", "t", "n"}),
    IdentityId.CHAIN_I: frozenset({"f", "g", "alpha", "beta", "a", "c", "t"}),
    IdentityId.CHAIN_II: frozenset({"f", "g", "alpha", "a", "c", "t"}),
    IdentityId.CHAIN_III: frozenset({"f", "g", "alpha", "a", "t"}),
    IdentityId.CHAIN_IV: frozenset({"f", "alpha", "a", "t"}),
    IdentityId.THM_DIFF: frozenset({"f", "g", "alpha", "beta", "a", "c", "t", "s"}),
    IdentityId.COR_DIFF_SQ: frozenset({"f", "alpha", "beta", "a", "c", "t", "s"}),
    IdentityId.COR_DIFF_ZERO: frozenset({"f", "g", "alpha", "beta", "a", "c", "t"}),
    IdentityId.THM_BIVAR: frozenset({"F", "G", "alpha", "beta", "a", "c", "t", "s"}),
    IdentityId.DERIV_PROD_III: frozenset({"f", "g", "alpha", "a", "t"}),
}

_OPTIONAL: dict[IdentityId, frozenset[str]] = {
    IdentityId.DERIV_PROD_III: frozenset({"symmetrized"}),
}


def classification_of(identity: IdentityId) -> str:
    return "exact" if identity in EXACT_IDS else "asserted"


def required_inputs(identity: IdentityId) -> frozenset[str]:
    """Exactly the CaseInputs fields the identity consumes."""
    return _REQUIRED[identity]


def _maybe_parse(value: Union[str, Expr, None]) -> Optional[Expr]:
    if isinstance(value, str):
        return parse(value)
    return value


@dataclass(frozen=True, kw_only=True)
class CaseInputs:
    """Bound inputs for one identity case.

    Expression fields accept either :class:`~vofrac.exprlang.Expr` values or
    source strings (parsed on construction).  Exactly the fields required by
    the identity must be present; :func:`validate_inputs` enforces this.
    """

    alpha: Expr
    a: float
    t: float
    beta: Optional[Expr] = None
    c: Optional[float] = None
    s: Optional[float] = None
    f: Optional[Expr] = None
    g: Optional[Expr] = None
    h: Optional[Expr] = None
    F: Optional[Expr] = None
    G: Optional[Expr] = None
    n: Optional[int] = None
    symmetrized: bool = False

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "f", "g", "h", "F", "G"):
            value = getattr(self, name)
            parsed = _maybe_parse(value)
            if parsed is not value:
                object.__setattr__(self, name, parsed)
        if self.alpha is None:
            raise ValueError("alpha is required for every identity")
        if self.n is not None and not (isinstance(self.n, int) and self.n >= 2):
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")


_OPTIONAL_FIELDS = ("beta", "c", "s", "f", "g", "h", "F", "G", "n")


def validate_inputs(identity: IdentityId, inputs: CaseInputs) -> None:
    """Require exactly the identity's input set (no missing, no extras)."""
    present = {"alpha", "a", "t"}
    present.update(name for name in _OPTIONAL_FIELDS if getattr(inputs, name) is not None)
    required = _REQUIRED[identity]
    optional = _OPTIONAL.get(identity, frozenset())
    if inputs.symmetrized and "symmetrized" not in optional:
        raise ValueError(f"{identity} does not take a symmetrized flag")
    missing = sorted(required - present)
    extra = sorted(present - required - optional)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing inputs {missing}")
        if extra:
            parts.append(f"unexpected inputs {extra}")
        raise ValueError(f"{identity}: " + "; ".join(parts))


@dataclass(frozen=True)
class AuditRecord:
    """One audited identity evaluation.

    ``status`` is ``exact-pass``/``exact-fail`` for exact identities (pass
    iff ``abs_res <= max(10 * err_budget, abs_floor)`` with ``abs_floor``
    the quadrature ``abs_tol``), ``asserted-measured`` for successfully
    measured asserted identities, and ``unresolved`` when any constituent
    failed or did not converge (``message`` says why; numeric fields are
    then ``None``).
    """

    identity: IdentityId
    lhs: Optional[float]
    rhs: Optional[float]
    abs_res: Optional[float]
    rel_res: Optional[float]
    classification: str
    status: str
    err_budget: Optional[float]
    mixed_term: Optional[float] = None
    reconciliation_res: Optional[float] = None
    message: str = ""


# --------------------------------------------------------------------------
# Value-with-uncertainty helpers (first-order propagation).  Every operation
# also charges one rounding ulp of its result so err_budget stays honest even
# when all quadrature estimates are exactly zero (float-exact degenerate
# paths).

_ULP = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class _Val:
    v: float
    e: float


def _add(x: _Val, y: _Val) -> _Val:
    v = x.v + y.v
    return _Val(v, x.e + y.e + _ULP * abs(v))


def _sub(x: _Val, y: _Val) -> _Val:
    v = x.v - y.v
    return _Val(v, x.e + y.e + _ULP * abs(v))


def _mul(x: _Val, y: _Val) -> _Val:
    v = x.v * y.v
    return _Val(v, abs(x.v) * y.e + abs(y.v) * x.e + _ULP * abs(v))


def _scale(c: float, x: _Val) -> _Val:
    v = c * x.v
    return _Val(v, abs(c) * x.e + _ULP * abs(v))


def _inv(x: _Val, what: str = "unit integral") -> _Val:
    if abs(x.v) < ILL_COND_FLOOR:
        raise IllConditionedError(
            f"cannot invert {what}: magnitude {abs(x.v)!r} below {ILL_COND_FLOOR!r}"
        )
    v = 1.0 / x.v
    return _Val(v, x.e / (x.v * x.v) + _ULP * abs(v))


def _powi(x: _Val, k: int) -> _Val:
    v = x.v**k
    return _Val(v, abs(k) * abs(x.v) ** (k - 1) * x.e + _ULP * abs(v))


class _Acc:
    """Collects convergence across the operator applications of one case."""

    def __init__(self) -> None:
        self.ok = True

    def val(self, ov: OperatorValue) -> _Val:
        self.ok = self.ok and ov.converged
        return _Val(ov.value, ov.err_estimate + _ULP * abs(ov.value))


# --------------------------------------------------------------------------
# Expression plumbing


def _norm(expr: Expr, var: str) -> Expr:
    """Rewrite a univariate (or constant) expression onto variable ``var``."""
    names = free_vars(expr)
    if len(names) > 1:
        raise ValueError(f"expected a univariate expression, got variables {sorted(names)}")
    if not names:
        return expr
    return subst(expr, names.pop(), Var(var))


def _uni(expr: Expr) -> BoundUnivariate:
    normalized = _norm(expr, "x")
    return bind_univariate(normalized, "x")


def _bi(expr: Expr) -> BoundBivariate:
    extra = free_vars(expr) - {"t", "s"}
    if extra:
        raise ValueError(
            f"bivariate expressions use variables t and s; found {sorted(extra)}"
        )
    return bind_bivariate(expr, "t", "s")


def _product(e1: Expr, e2: Expr) -> Expr:
    return BinOp("*", _norm(e1, "x"), _norm(e2, "x"))


def _tight(spec: QuadSpec) -> QuadSpec:
    """Inner-integral policy: tolerances tightened tenfold so the outer
    error estimate's exact-integrand assumption approximately holds."""
    return replace(spec, rel_tol=spec.rel_tol / 10.0, abs_tol=spec.abs_tol / 10.0)


# --------------------------------------------------------------------------
# Nested quadrature


def _nested(
    outer_op: VOIntegralOperator,
    outer_point: float,
    inner_op: VOIntegralOperator,
    inner_point: float,
    pair: Callable[[np.ndarray, float], np.ndarray],
) -> OperatorValue:
    """Outer variable-order integral of the inner one:
    ``pair(inner_nodes, outer_value)`` is the innermost integrand.

    The propagated error adds the worst inner estimate scaled by the outer
    unit integral to the outer estimate.
    """
    worst_inner = 0.0
    inner_ok = True

    def through_inner(w: float) -> float:
        nonlocal worst_inner, inner_ok
        ov = vo_integral(inner_op, lambda x, _w=w: pair(x, _w), inner_point)
        worst_inner = max(worst_inner, ov.err_estimate)
        inner_ok = inner_ok and ov.converged
        return ov.value

    def outer_integrand(w_arr: np.ndarray) -> np.ndarray:
        return np.array([through_inner(float(w)) for w in w_arr], dtype=np.float64)

    outer = vo_integral(outer_op, outer_integrand, outer_point)
    unit = vo_integral_unit(outer_op, outer_point)
    err = outer.err_estimate + worst_inner * (abs(unit.value) + unit.err_estimate)
    return OperatorValue(
        outer.value, err, outer.converged and inner_ok and unit.converged
    )


def mixed_term(inputs: CaseInputs, spec: QuadSpec = QuadSpec()) -> OperatorValue:
    """The nested correction quantity: the order-``beta`` integral over
    ``y in [c, s]`` of the order-``alpha`` integral over ``x in [a, t]`` of
    ``(f(x) - f(y)) (g(x) - g(y))``.  Inner tolerance is tightened 10x."""
    for name in ("f", "g", "beta"):
        if getattr(inputs, name) is None:
            raise ValueError(f"mixed_term requires {name}")
    if inputs.c is None or inputs.s is None:
        raise ValueError("mixed_term requires c and s")
    f = _uni(inputs.f)
    g = _uni(inputs.g)
    inner_op = integral_operator(inputs.a, _bi(inputs.alpha), _tight(spec), t_max=inputs.t)
    outer_op = integral_operator(inputs.c, _bi(inputs.beta), spec, t_max=inputs.s)

    def pair(x: np.ndarray, y: float) -> np.ndarray:
        return (f.eval_array(x) - f(y)) * (g.eval_array(x) - g(y))

    return _nested(outer_op, inputs.s, inner_op, inputs.t, pair)


# --------------------------------------------------------------------------
# Record assembly


def _finish(
    identity: IdentityId,
    lhs: _Val,
    rhs: _Val,
    acc: _Acc,
    spec: QuadSpec,
    *,
    mixed: Optional[_Val] = None,
    correction: Optional[_Val] = None,
    message: str = "",
) -> AuditRecord:
    classification = classification_of(identity)
    abs_res = abs(lhs.v - rhs.v)
    rel_res = abs_res / max(abs(lhs.v), abs(rhs.v), 1e-300)
    err_budget = lhs.e + rhs.e
    reconciliation = None
    if correction is not None:
        reconciliation = (lhs.v - rhs.v) - correction.v
        err_budget += correction.e
    if not acc.ok:
        status = "unresolved"
        if not message:
            message = "constituent quadrature did not converge"
    elif classification == "exact":
        passed = abs_res <= max(10.0 * err_budget, spec.abs_tol)
        status = "exact-pass" if passed else "exact-fail"
    else:
        status = "asserted-measured"
    return AuditRecord(
        identity=identity,
        lhs=lhs.v,
        rhs=rhs.v,
        abs_res=abs_res,
        rel_res=rel_res,
        classification=classification,
        status=status,
        err_budget=err_budget,
        mixed_term=None if mixed is None else mixed.v,
        reconciliation_res=reconciliation,
        message=message,
    )


def _require_points(inputs: CaseInputs, *, need_s: bool = False, need_c: bool = False) -> None:
    if not inputs.t > inputs.a:
        raise ValueError(f"requires t > a, got t={inputs.t!r}, a={inputs.a!r}")
    if need_c and inputs.c is None:
        raise ValueError("c is required")
    if need_s:
        if inputs.s is None:
            raise ValueError("s is required")
        if inputs.c is not None and not inputs.s > inputs.c:
            raise ValueError(f"requires s > c, got s={inputs.s!r}, c={inputs.c!r}")


# --------------------------------------------------------------------------
# Exact identities


def eval_thm_main(inputs: CaseInputs, spec: QuadSpec = QuadSpec()) -> AuditRecord:
    """Two-point product theorem (exact):
    ``I_t(fg) I_s(1) + I_t(1) I_s(fg) = M + I_t(g) I_s(f) + I_t(f) I_s(g)``
    with ``M`` the nested mixed term."""
    validate_inputs(IdentityId.THM_MAIN, inputs)
    _require_points(inputs, need_s=True, need_c=True)
    acc = _Acc()
    f = _uni(inputs.f)
    g = _uni(inputs.g)
    fg = _uni(_product(inputs.f, inputs.g))
    op_a = integral_operator(inputs.a, _bi(inputs.alpha), spec, t_max=inputs.t)
    op_b = integral_operator(inputs.c, _bi(inputs.beta), spec, t_max=inputs.s)
    t, s = inputs.t, inputs.s

    ia_fg = acc.val(vo_integral(op_a, fg, t))
    ia_f = acc.val(vo_integral(op_a, f, t))
    ia_g = acc.val(vo_integral(op_a, g, t))
    unit_a = acc.val(vo_integral_unit(op_a, t))
    ib_fg = acc.val(vo_integral(op_b, fg, s))
    ib_f = acc.val(vo_integral(op_b, f, s))
    ib_g = acc.val(vo_integral(op_b, g, s))
    unit_b = acc.val(vo_integral_unit(op_b, s))
    mixed = acc.val(mixed_term(inputs, spec))

    lhs = _add(_mul(ia_fg, unit_b), _mul(unit_a, ib_fg))
    rhs = _add(mixed, _add(_mul(ia_g, ib_f), _mul(ia_f, ib_g)))
    return _finish(IdentityId.THM_MAIN, lhs, rhs, acc, spec, mixed=mixed)


def eval_thm_diff(inputs: CaseInputs, spec: QuadSpec = QuadSpec()) -> AuditRecord:
    """Difference form of the two-point theorem (exact): the mixed term
    equals ``I_t(fg) I_s(1) + I_t(1) I_s(fg)
    + (1/2)[I_t(f-g) I_s(f-g) - I_t(f+g) I_s(f+g)]``."""
    validate_inputs(IdentityId.THM_DIFF, inputs)
    _require_points(inputs, need_s=True, need_c=True)
    acc = _Acc()
    fg = _uni(_product(inputs.f, inputs.g))
    fm = _uni(BinOp("-", _norm(inputs.f, "x"), _norm(inputs.g, "x")))
    fp = _uni(BinOp("+", _norm(inputs.f, "x"), _norm(inputs.g, "x")))
    op_a = integral_operator(inputs.a, _bi(inputs.alpha), spec, t_max=inputs.t)
    op_b = integral_operator(inputs.c, _bi(inputs.beta), spec, t_max=inputs.s)
    t, s = inputs.t, inputs.s

    lhs = acc.val(mixed_term(inputs, spec))
    ia_fg = acc.val(vo_integral(op_a, fg, t))
    ib_fg = acc.val(vo_integral(op_b, fg, s))
    unit_a = acc.val(vo_integral_unit(op_a, t))
    unit_b = acc.val(vo_integral_unit(op_b, s))
    ia_fm = acc.val(vo_integral(op_a, fm, t))
    ib_fm = acc.val(vo_integral(op_b, fm, s))
    ia_fp = acc.val(vo_integral(op_a, fp, t))
    ib_fp = acc.val(vo_integral(op_b, fp, s))

    bracket = _sub(_mul(ia_fm, ib_fm), _mul(ia_fp, ib_fp))
    rhs = _add(
        _add(_mul(ia_fg, unit_b), _mul(unit_a, ib_fg)), _scale(0.5, bracket)
    )
    return _finish(IdentityId.THM_DIFF, lhs, rhs, acc, spec, mixed=lhs)


# --------------------------------------------------------------------------
# Product rules (asserted, with reconciliation)

_PRODUCT_IDS = {
    "I": IdentityId.PROD_I,
    "II": IdentityId.PROD_II,
    "III": IdentityId.PROD_III,
    "IV": IdentityId.PROD_IV,
}


def eval_product_rule(
    kind: str,
    inputs: CaseInputs,
    spec: QuadSpec = QuadSpec(),
    *,
    compute_reconciliation: bool = True,
) -> AuditRecord:
    """Product rules I-IV as printed, all obtained from the exact theorem by
    ``s = t`` (I), plus ``a = c`` (II), plus ``alpha = beta`` (III), plus
    ``f = g`` (IV).  The record reconciles ``LHS - RHS`` against the
    independently computed mixed term at ``s = t`` (types I/II) or
    ``mixed / (2 I(1))`` (types III/IV)."""
    identity = _PRODUCT_IDS[kind]
    validate_inputs(identity, inputs)
    _require_points(inputs)
    acc = _Acc()
    t = inputs.t
    g_expr = inputs.g if inputs.g is not None else inputs.f
    f = _uni(inputs.f)
    g = _uni(g_expr)
    fg = _uni(_product(inputs.f, g_expr))
    beta_expr = inputs.beta if inputs.beta is not None else inputs.alpha
    c = inputs.c if inputs.c is not None else inputs.a
    if not t > c:
        raise ValueError(f"requires t > c, got t={t!r}, c={c!r}")
    op_a = integral_operator(inputs.a, _bi(inputs.alpha), spec, t_max=t)

    if kind in ("I", "II"):
        op_b = integral_operator(c, _bi(beta_expr), spec, t_max=t)
        ia_fg = acc.val(vo_integral(op_a, fg, t))
        ia_f = acc.val(vo_integral(op_a, f, t))
        ia_g = acc.val(vo_integral(op_a, g, t))
        unit_a = acc.val(vo_integral_unit(op_a, t))
        ib_fg = acc.val(vo_integral(op_b, fg, t))
        ib_f = acc.val(vo_integral(op_b, f, t))
        ib_g = acc.val(vo_integral(op_b, g, t))
        unit_b = acc.val(vo_integral_unit(op_b, t))
        lhs = _add(_mul(ia_fg, unit_b), _mul(unit_a, ib_fg))
        rhs = _add(_mul(ia_g, ib_f), _mul(ia_f, ib_g))
        correction_of = lambda m: m  # noqa: E731 - kappa = 1
    else:
        ia_fg = acc.val(vo_integral(op_a, fg, t))
        ia_f = acc.val(vo_integral(op_a, f, t))
        ia_g = ia_f if inputs.g is None else acc.val(vo_integral(op_a, g, t))
        unit_a = acc.val(vo_integral_unit(op_a, t))
        lhs = ia_fg
        rhs = _mul(_inv(unit_a), _mul(ia_g, ia_f))
        correction_of = lambda m: _mul(m, _inv(_scale(2.0, unit_a)))  # noqa: E731

    mixed = correction = None
    if compute_reconciliation:
        mixed_inputs = CaseInputs(
            alpha=inputs.alpha,
            beta=beta_expr,
            a=inputs.a,
            c=c,
            t=t,
            s=t,
            f=inputs.f,
            g=g_expr,
        )
        mixed = acc.val(mixed_term(mixed_inputs, spec))
        correction = correction_of(mixed)
    return _finish(identity, lhs, rhs, acc, spec, mixed=mixed, correction=correction)


def eval_quotient_rule(
    kind: str, inputs: CaseInputs, spec: QuadSpec = QuadSpec()
) -> AuditRecord:
    """Quotient rules I-IV: the matching product rule with ``g = 1/h``
    (type IV substitutes ``f = 1/h``).  Requires ``|h| >= 1e-6`` at 256
    samples over every integration range."""
    identity = IdentityId[f"QUOT_{kind}"]
    validate_inputs(identity, inputs)
    h_norm = _norm(inputs.h, "x")
    h_handle = bind_univariate(h_norm, "x")
    ranges = [(inputs.a, inputs.t)]
    if kind == "I":
        ranges.append((inputs.c, inputs.t))
    for lo, hi in ranges:
        samples = np.abs(h_handle.eval_array(np.linspace(lo, hi, _H_SAMPLES)))
        if float(samples.min()) < H_FLOOR:
            raise ValueError(
                f"|h| falls below {H_FLOOR!r} on [{lo!r}, {hi!r}] "
                f"(minimum sample {float(samples.min())!r})"
            )
    reciprocal = BinOp("/", Const(1.0), h_norm)
    if kind == "IV":
        product_inputs = replace(inputs, f=reciprocal, h=None)
    else:
        product_inputs = replace(inputs, g=reciprocal, h=None)
    record = eval_product_rule(
        kind, product_inputs, spec, compute_reconciliation=False
    )
    return replace(record, identity=identity)


def eval_power_rule(inputs: CaseInputs, spec: QuadSpec = QuadSpec()) -> AuditRecord:
    """Power rule: ``I(f^n) = I(1)^-(n-1) I(f)^n`` (asserted)."""
    validate_inputs(IdentityId.POWER_N, inputs)
    _require_points(inputs)
    acc = _Acc()
    t = inputs.t
    f_norm = _norm(inputs.f, "x")
    f = bind_univariate(f_norm, "x")
    fn = _uni(BinOp("^", f_norm, Const(float(inputs.n))))
    op_a = integral_operator(inputs.a, _bi(inputs.alpha), spec, t_max=t)
    lhs = acc.val(vo_integral(op_a, fn, t))
    ia_f = acc.val(vo_integral(op_a, f, t))
    unit_a = acc.val(vo_integral_unit(op_a, t))
    rhs = _mul(_powi(_inv(unit_a), inputs.n - 1), _powi(ia_f, inputs.n))
    return _finish(IdentityId.POWER_N, lhs, rhs, acc, spec)


# --------------------------------------------------------------------------
# Chain rules


_CHAIN_IDS = {
    "I": IdentityId.CHAIN_I,
    "II": IdentityId.CHAIN_II,
    "III": IdentityId.CHAIN_III,
    "IV": IdentityId.CHAIN_IV,
}


def eval_chain_rule(
    kind: str, inputs: CaseInputs, spec: QuadSpec = QuadSpec()
) -> AuditRecord:
    """Chain rules I-IV (asserted): ``I_[a,t](g o f)`` against
    ``I_[c,f(t)](g) * I_[a,t](1) / I_[c,f(t)](1)``, where the second
    operator integrates in the ``f``-variable up to ``f(t)``.  Type II sets
    ``beta = alpha``, type III also ``c = a``, type IV also ``g = f``."""
    identity = _CHAIN_IDS[kind]
    validate_inputs(identity, inputs)
    _require_points(inputs)
    acc = _Acc()
    t = inputs.t
    g_expr = inputs.g if inputs.g is not None else inputs.f
    beta_expr = inputs.beta if inputs.beta is not None else inputs.alpha
    c = inputs.c if inputs.c is not None else inputs.a
    f_x = _norm(inputs.f, "x")
    g_y = _norm(g_expr, "y")
    composed = _uni(subst(g_y, "y", f_x))
    g = _uni(g_expr)
    f_at_t = _uni(inputs.f)(t)
    if not f_at_t > c:
        raise ValueError(
            f"chain rule requires f(t) > c, got f(t)={f_at_t!r}, c={c!r}"
        )
    op_a = integral_operator(inputs.a, _bi(inputs.alpha), spec, t_max=t)
    op_b = integral_operator(c, _bi(beta_expr), spec, t_max=f_at_t)
    lhs = acc.val(vo_integral(op_a, composed, t))
    unit_a = acc.val(vo_integral_unit(op_a, t))
    ib_g = acc.val(vo_integral(op_b, g, f_at_t))
    unit_b = acc.val(vo_integral_unit(op_b, f_at_t))
    rhs = _mul(ib_g, _mul(unit_a, _inv(unit_b)))
    return _finish(identity, lhs, rhs, acc, spec)


# --------------------------------------------------------------------------
# Difference-form corollaries


def eval_cor_diff_sq(inputs: CaseInputs, spec: QuadSpec = QuadSpec()) -> AuditRecord:
    """Squared-difference corollary (asserted; printed form squares the
    fully nested double integral of ``f(x) - f(y)``):
    ``I_t(1)^-1 I_s(1)^-1 N^2 = I_t(f)^2 I_t(1)^-1 I_s(1)
    + I_t(1) I_s(f)^2 I_s(1)^-1 - 2 I_t(f) I_s(f)``."""
    validate_inputs(IdentityId.COR_DIFF_SQ, inputs)
    _require_points(inputs, need_s=True, need_c=True)
    acc = _Acc()
    f = _uni(inputs.f)
    t, s = inputs.t, inputs.s
    op_a = integral_operator(inputs.a, _bi(inputs.alpha), spec, t_max=t)
    op_b = integral_operator(inputs.c, _bi(inputs.beta), spec, t_max=s)
    inner_op = integral_operator(inputs.a, _bi(inputs.alpha), _tight(spec), t_max=t)

    def pair(x: np.ndarray, y: float) -> np.ndarray:
        return f.eval_array(x) - f(y)

    nested = acc.val(_nested(op_b, s, inner_op, t, pair))
    unit_a = acc.val(vo_integral_unit(op_a, t))
    unit_b = acc.val(vo_integral_unit(op_b, s))
    ia_f = acc.val(vo_integral(op_a, f, t))
    ib_f = acc.val(vo_integral(op_b, f, s))

    lhs = _mul(_inv(unit_a), _mul(_inv(unit_b), _powi(nested, 2)))
    rhs = _sub(
        _add(
            _mul(_powi(ia_f, 2), _mul(_inv(unit_a), unit_b)),
            _mul(unit_a, _mul(_powi(ib_f, 2), _inv(unit_b))),
        ),
        _scale(2.0, _mul(ia_f, ib_f)),
    )
    return _finish(IdentityId.COR_DIFF_SQ, lhs, rhs, acc, spec)


def eval_cor_diff_zero(inputs: CaseInputs, spec: QuadSpec = QuadSpec()) -> AuditRecord:
    """Vanishing-combination corollary (asserted): at ``s = t`` the printed
    four-term combination is claimed to be 0.  The record also reports the
    mixed term at ``s = t``, which the exact difference theorem shows the
    combination actually equals."""
    validate_inputs(IdentityId.COR_DIFF_ZERO, inputs)
    _require_points(inputs, need_c=True)
    if not inputs.t > inputs.c:
        raise ValueError(f"requires t > c, got t={inputs.t!r}, c={inputs.c!r}")
    acc = _Acc()
    t = inputs.t
    fg = _uni(_product(inputs.f, inputs.g))
    fm = _uni(BinOp("-", _norm(inputs.f, "x"), _norm(inputs.g, "x")))
    fp = _uni(BinOp("+", _norm(inputs.f, "x"), _norm(inputs.g, "x")))
    op_a = integral_operator(inputs.a, _bi(inputs.alpha), spec, t_max=t)
    op_b = integral_operator(inputs.c, _bi(inputs.beta), spec, t_max=t)

    ia_fg = acc.val(vo_integral(op_a, fg, t))
    ib_fg = acc.val(vo_integral(op_b, fg, t))
    unit_a = acc.val(vo_integral_unit(op_a, t))
    unit_b = acc.val(vo_integral_unit(op_b, t))
    ia_fm = acc.val(vo_integral(op_a, fm, t))
    ib_fm = acc.val(vo_integral(op_b, fm, t))
    ia_fp = acc.val(vo_integral(op_a, fp, t))
    ib_fp = acc.val(vo_integral(op_b, fp, t))

    bracket = _sub(_mul(ia_fm, ib_fm), _mul(ia_fp, ib_fp))
    lhs = _add(
        _add(_mul(ia_fg, unit_b), _mul(unit_a, ib_fg)), _scale(0.5, bracket)
    )
    rhs = _Val(0.0, 0.0)
    mixed = acc.val(mixed_term(replace(inputs, s=t), spec))
    return _finish(IdentityId.COR_DIFF_ZERO, lhs, rhs, acc, spec, mixed=mixed)


def eval_thm_bivar(inputs: CaseInputs, spec: QuadSpec = QuadSpec()) -> AuditRecord:
    """Two-variable product theorem (asserted):
    ``I_t(I_s(F G)) = I_s(1)^-1 I_t(1)^-1 I_t(I_s F) I_t(I_s G)`` with the
    unit integrals taken at the outer (t) and inner (s) points."""
    validate_inputs(IdentityId.THM_BIVAR, inputs)
    _require_points(inputs, need_s=True, need_c=True)
    acc = _Acc()
    t, s = inputs.t, inputs.s
    F = _bi(inputs.F)
    G = _bi(inputs.G)
    op_a = integral_operator(inputs.a, _bi(inputs.alpha), spec, t_max=t)
    op_b_tight = integral_operator(inputs.c, _bi(inputs.beta), _tight(spec), t_max=s)
    op_b = integral_operator(inputs.c, _bi(inputs.beta), spec, t_max=s)

    def pair_fg(y: np.ndarray, x: float) -> np.ndarray:
        return F.eval_many(x, y) * G.eval_many(x, y)

    def pair_f(y: np.ndarray, x: float) -> np.ndarray:
        return F.eval_many(x, y)

    def pair_g(y: np.ndarray, x: float) -> np.ndarray:
        return G.eval_many(x, y)

    lhs = acc.val(_nested(op_a, t, op_b_tight, s, pair_fg))
    nested_f = acc.val(_nested(op_a, t, op_b_tight, s, pair_f))
    nested_g = acc.val(_nested(op_a, t, op_b_tight, s, pair_g))
    unit_a = acc.val(vo_integral_unit(op_a, t))
    unit_b = acc.val(vo_integral_unit(op_b, s))
    rhs = _mul(
        _mul(_inv(unit_b), _inv(unit_a)), _mul(nested_f, nested_g)
    )
    return _finish(IdentityId.THM_BIVAR, lhs, rhs, acc, spec)


def eval_deriv_prod_iii(inputs: CaseInputs, spec: QuadSpec = QuadSpec()) -> AuditRecord:
    """Derivative product rule (asserted): ``D(fg)`` against the printed
    three-term right side assembled from order-``1-alpha`` integrals and
    derivative applications.

    As printed, the last two terms are textually identical (both carry the
    g-integral with the f-derivative) -- a suspected typo.  The record
    evaluates the verbatim form by default; ``inputs.symmetrized`` swaps the
    final term to the f-integral with the g-derivative instead.  Neither
    variant is assumed correct."""
    validate_inputs(IdentityId.DERIV_PROD_III, inputs)
    _require_points(inputs)
    acc = _Acc()
    t = inputs.t
    f = _uni(inputs.f)
    g = _uni(inputs.g)
    fg = _uni(_product(inputs.f, inputs.g))
    dop = derivative_operator(inputs.a, _bi(inputs.alpha), spec, t_max=t)
    iop = dop.complement  # the order-(1-alpha) integral operator

    lhs = acc.val(vo_derivative(dop, fg, t))
    unit_w = acc.val(vo_integral_unit(iop, t))
    i_f = acc.val(vo_integral(iop, f, t))
    i_g = acc.val(vo_integral(iop, g, t))
    d_one = acc.val(vo_derivative(dop, _one_fn, t))
    d_f = acc.val(vo_derivative(dop, f, t))

    inv_w = _inv(unit_w)
    term1 = _scale(-1.0, _mul(_powi(inv_w, 2), _mul(i_g, _mul(i_f, d_one))))
    term2 = _mul(inv_w, _mul(i_g, d_f))
    if inputs.symmetrized:
        d_g = acc.val(vo_derivative(dop, g, t))
        term3 = _mul(inv_w, _mul(i_f, d_g))
        message = "symmetrized variant (final term swapped to f-integral, g-derivative)"
    else:
        term3 = _mul(inv_w, _mul(i_g, d_f))
        message = ""
    rhs = _add(term1, _add(term2, term3))
    return _finish(IdentityId.DERIV_PROD_III, lhs, rhs, acc, spec, message=message)


def _one_fn(x: np.ndarray) -> np.ndarray:
    return np.ones(x.shape, dtype=np.float64)


# --------------------------------------------------------------------------
# Dispatch / banks


def evaluate_case(
    identity: IdentityId, inputs: CaseInputs, spec: QuadSpec = QuadSpec()
) -> AuditRecord:
    """Evaluate one identity case (raises on invalid inputs)."""
    identity = IdentityId(identity)
    if identity is IdentityId.THM_MAIN:
        return eval_thm_main(inputs, spec)
    if identity is IdentityId.THM_DIFF:
        return eval_thm_diff(inputs, spec)
    if identity in _PRODUCT_IDS.values():
        return eval_product_rule(identity.value.split("_")[1], inputs, spec)
    if identity.value.startswith("QUOT_"):
        return eval_quotient_rule(identity.value.split("_")[1], inputs, spec)
    if identity is IdentityId.POWER_N:
        return eval_power_rule(inputs, spec)
    if identity in _CHAIN_IDS.values():
        return eval_chain_rule(identity.value.split("_")[1], inputs, spec)
    if identity is IdentityId.COR_DIFF_SQ:
        return eval_cor_diff_sq(inputs, spec)
    if identity is IdentityId.COR_DIFF_ZERO:
        return eval_cor_diff_zero(inputs, spec)
    if identity is IdentityId.THM_BIVAR:
        return eval_thm_bivar(inputs, spec)
    if identity is IdentityId.DERIV_PROD_III:
        return eval_deriv_prod_iii(inputs, spec)
    raise ValueError(f"unhandled identity {identity!r}")


def _unresolved(identity: IdentityId, exc: Exception) -> AuditRecord:
    return AuditRecord(
        identity=identity,
        lhs=None,
        rhs=None,
        abs_res=None,
        rel_res=None,
        classification=classification_of(identity),
        status="unresolved",
        err_budget=None,
        message=f"{type(exc).__name__}: {exc}",
    )


def run_bank(
    bank: Sequence[tuple[IdentityId, CaseInputs]],
    spec: QuadSpec = QuadSpec(),
    workers: int = 1,
) -> list[AuditRecord]:
    """Evaluate every case; per-case failures become ``unresolved`` records
    (the bank never aborts).  Output order matches input order regardless of
    ``workers``; identical cases produce identical records."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers!r}")

    def one(case: tuple[IdentityId, CaseInputs]) -> AuditRecord:
        identity, inputs = case
        identity = IdentityId(identity)
        try:
            return evaluate_case(identity, inputs, spec)
        except Exception as exc:  # captured, never aborts the bank
            return _unresolved(identity, exc)

    if workers == 1 or len(bank) <= 1:
        return [one(case) for case in bank]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, bank))
