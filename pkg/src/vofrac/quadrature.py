"""Adaptive one-dimensional quadrature with weak-endpoint-singularity support.

Two entry points:

* :func:`integrate_adaptive` -- bisection-adaptive fixed-order Gauss-Legendre
  panels with an embedded lower-order error estimate per panel (the estimate
  interpolates the integrand on the odd-index node subset, so no extra
  evaluations are spent on it).

* :func:`integrate_upper_singular` -- for integrands behaving like
  ``(hi-x)^exponent`` near the upper limit with ``exponent > -1``: a
  geometric mesh graded toward ``hi`` (ratio ``grading_ratio``), each level
  integrated adaptively in distance-to-endpoint coordinates, plus a
  closed-form power-law tail with the bounded factor frozen at its last
  probed value.  Grading is used instead of a fixed Gauss-Jacobi weight
  because the exponent may vary along the interval (variable order); a
  frozen Jacobi weight is only asymptotically correct there.

Non-convergence is a flagged :class:`QuadResult`, never an exception, so
callers can mark affected computations unresolved instead of aborting.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from numpy.polynomial.legendre import leggauss, legval

from .exprlang import BoundUnivariate, EvalError

__all__ = [
    "QuadSpec",
    "QuadResult",
    "DivergentIntegralError",
    "integrate_adaptive",
    "integrate_upper_singular",
]

_EPS = float(np.finfo(np.float64).eps)
_MAX_LEVELS = 500


class DivergentIntegralError(ValueError):
    """The integrand is non-integrable (endpoint exponent at or below -1,
    or within ``min_exponent_guard`` of it)."""


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature policy: tolerances, panel rule, grading."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    panel_order: int = 15
    max_panels: int = 2000
    grading_ratio: float = 0.15
    min_exponent_guard: float = 1e-3

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError(f"rel_tol must be in (0, 1), got {self.rel_tol!r}")
        if not (self.abs_tol > 0.0):
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if not (isinstance(self.panel_order, int) and self.panel_order >= 2):
            raise ValueError(f"panel_order must be an integer >= 2, got {self.panel_order!r}")
        if not (isinstance(self.max_panels, int) and self.max_panels >= 1):
            raise ValueError(f"max_panels must be an integer >= 1, got {self.max_panels!r}")
        if not (0.0 < self.grading_ratio < 1.0):
            raise ValueError(f"grading_ratio must be in (0, 1), got {self.grading_ratio!r}")
        if not (self.min_exponent_guard > 0.0):
            raise ValueError(
                f"min_exponent_guard must be positive, got {self.min_exponent_guard!r}"
            )

    def tolerance(self, value: float) -> float:
        """The convergence target ``max(abs_tol, rel_tol * |value|)``."""
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class QuadResult:
    """Outcome of one integration; ``converged`` certifies that
    ``err_estimate <= max(abs_tol, rel_tol * |value|)``."""

    value: float
    err_estimate: float
    panels_used: int
    converged: bool


@lru_cache(maxsize=None)
def _rule(order: int):
    """Gauss-Legendre nodes/weights of ``order`` plus interpolatory weights
    on the odd-index node subset (the embedded error rule).

    Weights are nudged so a constant integrand is integrated exactly in
    floating point (``dot(weights, ones) == 2.0``).
    """
    nodes, weights = leggauss(order)
    weights = weights.copy()
    ones = np.ones(order)
    for _ in range(4):
        delta = 2.0 - float(np.dot(weights, ones))
        if delta == 0.0:
            break
        weights[order // 2] += delta

    sub_idx = np.arange(1, order, 2)
    m = sub_idx.size
    vander = np.zeros((m, m))
    for k in range(m):
        coeffs = np.zeros(k + 1)
        coeffs[k] = 1.0
        vander[k] = legval(nodes[sub_idx], coeffs)
    rhs = np.zeros(m)
    rhs[0] = 2.0
    sub_weights = np.linalg.solve(vander, rhs)
    sub_ones = np.ones(m)
    for _ in range(4):
        delta = 2.0 - float(np.dot(sub_weights, sub_ones))
        if delta == 0.0:
            break
        sub_weights[m // 2] += delta

    for array in (nodes, weights, sub_idx, sub_weights):
        array.setflags(write=False)
    return nodes, weights, sub_idx, sub_weights


ArrayFn = Callable[[np.ndarray], np.ndarray]


def _as_array_fn(f: Union[BoundUnivariate, Callable]) -> ArrayFn:
    """Adapt a univariate handle or plain callable to array-in/array-out.

    Plain callables are probed once: if they reject or mishandle array
    input they are evaluated pointwise.  Genuine evaluation errors
    (:class:`~vofrac.exprlang.EvalError`) always propagate.
    """
    if isinstance(f, BoundUnivariate):
        return f.eval_array
    if isinstance(f, np.ufunc):
        return f

    mode: list[Optional[str]] = [None]

    def pointwise(x: np.ndarray) -> np.ndarray:
        return np.array([float(f(v)) for v in x], dtype=np.float64)

    def call(x: np.ndarray) -> np.ndarray:
        if mode[0] == "loop":
            return pointwise(x)
        try:
            out = np.asarray(f(x), dtype=np.float64)
        except EvalError:
            raise
        except (TypeError, ValueError):
            mode[0] = "loop"
            return pointwise(x)
        if out.shape == x.shape:
            mode[0] = "vector"
            return out
        if out.size == 1:
            return np.full(x.shape, float(out))
        mode[0] = "loop"
        return pointwise(x)

    return call


def _adapt_core(
    fa: ArrayFn,
    lo: float,
    hi: float,
    rel_tol: float,
    abs_tol: float,
    max_panels: int,
    rule,
) -> tuple[float, float, int]:
    """Worst-panel-first bisection refinement; returns (value, err, panels)."""
    nodes, weights, sub_idx, sub_weights = rule

    def panel(a: float, b: float) -> tuple[float, float]:
        half = 0.5 * (b - a)
        fx = fa(0.5 * (a + b) + half * nodes)
        q = half * float(np.dot(weights, fx))
        q_sub = half * float(np.dot(sub_weights, fx[sub_idx]))
        return q, abs(q - q_sub)

    value, err = panel(lo, hi)
    used = 1
    heap = [(-err, 0, lo, hi, value, err)]
    seq = 1
    while (
        err > max(abs_tol, rel_tol * abs(value))
        and used + 2 <= max_panels
        and heap
    ):
        _, _, a, b, q0, e0 = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        # Resolution floor is relative to the endpoints' own magnitude:
        # graded meshes place panels at tiny distances where an absolute
        # scale would wrongly declare them unsplittable.
        if not (a < mid < b) or (b - a) < 8.0 * _EPS * max(abs(a), abs(b)):
            break  # interval at floating-point resolution; cannot improve
        q1, e1 = panel(a, mid)
        q2, e2 = panel(mid, b)
        used += 2
        value += (q1 + q2) - q0
        err += (e1 + e2) - e0
        heapq.heappush(heap, (-e1, seq, a, mid, q1, e1))
        heapq.heappush(heap, (-e2, seq + 1, mid, b, q2, e2))
        seq += 2
    return value, err, used


def integrate_adaptive(
    f: Union[BoundUnivariate, Callable],
    lo: float,
    hi: float,
    spec: QuadSpec = QuadSpec(),
) -> QuadResult:
    """Integrate ``f`` over ``[lo, hi]`` (finite integrand assumed)."""
    if not (lo < hi):
        raise ValueError(f"requires lo < hi, got [{lo!r}, {hi!r}]")
    value, err, used = _adapt_core(
        _as_array_fn(f), float(lo), float(hi),
        spec.rel_tol, spec.abs_tol, spec.max_panels, _rule(spec.panel_order),
    )
    return QuadResult(value, err, used, err <= spec.tolerance(value))


def integrate_upper_singular(
    f: Union[BoundUnivariate, Callable, None],
    lo: float,
    hi: float,
    exponent_at_hi: float,
    spec: QuadSpec = QuadSpec(),
    *,
    f_from_dist: Union[BoundUnivariate, Callable, None] = None,
) -> QuadResult:
    """Integrate ``f`` over ``[lo, hi]`` where ``f(x) ~ C * (hi-x)^exponent``
    near ``hi`` (``f`` carries the singular factor; ``exponent_at_hi`` is a
    hint, e.g. ``alpha(t, t) - 1``).

    ``f_from_dist``, if given, evaluates the integrand as a function of the
    distance ``u = hi - x`` and is preferred on deep meshes where forming
    ``hi - u`` and then re-deriving ``hi - x`` would cancel catastrophically.

    A non-negative integer exponent means no endpoint singularity at all, and
    the plain adaptive rule is used directly.
    """
    if not (lo < hi):
        raise ValueError(f"requires lo < hi, got [{lo!r}, {hi!r}]")
    if f is None and f_from_dist is None:
        raise ValueError("either f or f_from_dist is required")
    e = float(exponent_at_hi)
    if e <= -1.0:
        raise DivergentIntegralError(
            f"exponent {e!r} <= -1: the endpoint power is not integrable"
        )
    if e <= -1.0 + spec.min_exponent_guard:
        raise DivergentIntegralError(
            f"exponent {e!r} within min_exponent_guard={spec.min_exponent_guard!r} "
            "of the divergence threshold -1"
        )

    d = hi - lo
    if f_from_dist is not None:
        fa_dist = _as_array_fn(f_from_dist)
    else:
        fa_plain = _as_array_fn(f)

        def fa_dist(u: np.ndarray) -> np.ndarray:
            return fa_plain(hi - u)

    if e >= 0.0 and e == math.floor(e):
        value, err, used = _adapt_core(
            fa_dist, 0.0, d, spec.rel_tol, spec.abs_tol, spec.max_panels,
            _rule(spec.panel_order),
        )
        return QuadResult(value, err, used, err <= spec.tolerance(value))

    rule = _rule(spec.panel_order)
    ratio = spec.grading_ratio

    def graded_pass(level_rel, level_abs_of, tail_stop):
        value = 0.0
        err = 0.0
        used = 0
        levels = 0
        tail = None
        u_hi = d
        for k in range(_MAX_LEVELS):
            u_lo = d * ratio ** (k + 1)
            if not (0.0 < u_lo < u_hi):
                break  # distance underflowed floating point
            budget = spec.max_panels - used
            if budget < 1:
                break
            v_k, e_k, p_k = _adapt_core(
                fa_dist, u_lo, u_hi, level_rel, level_abs_of(u_hi - u_lo), budget, rule
            )
            value += v_k
            err += e_k
            used += p_k
            levels += 1
            # Frozen-value analytic tail: with f ~ C*u^e and C estimated from
            # a probe at u_lo, the remaining integral over (0, u_lo) is
            # C*u_lo^(e+1)/(e+1) = f(u_lo)*u_lo/(e+1).
            f_probe = float(fa_dist(np.array([u_lo], dtype=np.float64))[0])
            tail = f_probe * u_lo / (e + 1.0)
            if abs(tail) <= tail_stop(value):
                break
            u_hi = u_lo
        return value, err, used, levels, tail

    # First pass: per-level budgets referenced to the level values (a quarter
    # of the tolerance each for the levels, the tail cut-off, and headroom).
    value, err, used, levels, tail = graded_pass(
        0.25 * spec.rel_tol,
        lambda width: 0.25 * spec.abs_tol * width / d,
        lambda v: 0.25 * max(spec.abs_tol, spec.rel_tol * abs(v)),
    )
    if tail is None:
        return QuadResult(value, err, used, False)  # no level completed
    value += tail
    err += abs(tail)
    if err <= spec.tolerance(value):
        return QuadResult(value, err, used, True)
    # Cancellation between levels can leave |value| far below the level mass
    # the first-pass relative budgets were scaled to.  Retry once with flat
    # absolute per-level budgets referenced to the now-known result size.
    target = spec.tolerance(value)
    per_level = 0.2 * target / max(levels, 1)
    value2, err2, used2, _, tail2 = graded_pass(
        0.0, lambda width: per_level, lambda v: 0.2 * target
    )
    total_used = used + used2
    if tail2 is None:
        return QuadResult(value2, err2, total_used, False)
    value2 += tail2
    err2 += abs(tail2)
    return QuadResult(value2, err2, total_used, err2 <= spec.tolerance(value2))
