"""Adaptive panel quadrature and the graded endpoint-singular rule."""

import math

import mpmath as mp
import numpy as np
import pytest

from vofrac.exprlang import bind_univariate, parse
from vofrac.quadrature import (
    DivergentIntegralError,
    QuadResult,
    QuadSpec,
    integrate_adaptive,
    integrate_upper_singular,
)

mp.mp.dps = 30

_EPS = float(np.finfo(np.float64).eps)


# --------------------------------------------------------------------------
# Spec validation


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rel_tol": 0.0},
        {"rel_tol": 1.0},
        {"rel_tol": -1e-8},
        {"abs_tol": 0.0},
        {"abs_tol": -1.0},
        {"panel_order": 1},
        {"panel_order": 2.5},
        {"max_panels": 0},
        {"grading_ratio": 0.0},
        {"grading_ratio": 1.0},
        {"min_exponent_guard": 0.0},
    ],
)
def test_quadspec_rejects_bad_fields(kwargs):
    with pytest.raises(ValueError):
        QuadSpec(**kwargs)


def test_quadspec_tolerance_rule():
    spec = QuadSpec(rel_tol=1e-6, abs_tol=1e-10)
    assert spec.tolerance(0.0) == 1e-10
    assert spec.tolerance(2.0) == pytest.approx(2e-6)


# --------------------------------------------------------------------------
# Smooth integrands


def test_adaptive_constant_is_exact():
    res = integrate_adaptive(lambda x: np.full_like(x, 1.0), 0.0, 2.0)
    assert res.value == 2.0
    assert res.converged


def test_adaptive_square():
    res = integrate_adaptive(lambda x: x * x, 0.0, 1.0)
    assert res.converged
    assert res.value == pytest.approx(1.0 / 3.0, rel=1e-10)


def test_adaptive_sine_hump():
    res = integrate_adaptive(np.sin, 0.0, math.pi)
    assert res.converged
    assert res.value == pytest.approx(2.0, rel=1e-10)


def test_adaptive_accepts_bound_expression():
    f = bind_univariate(parse("x^2"), "x")
    res = integrate_adaptive(f, 0.0, 1.0)
    assert res.value == pytest.approx(1.0 / 3.0, rel=1e-10)


def test_adaptive_rejects_empty_interval():
    with pytest.raises(ValueError):
        integrate_adaptive(np.sin, 1.0, 1.0)
    with pytest.raises(ValueError):
        integrate_adaptive(np.sin, 2.0, 1.0)


# --------------------------------------------------------------------------
# Endpoint-singular integrands


def test_singular_inverse_sqrt():
    # Strong singularities are driven through the distance form, as the
    # operator layer does: evaluating f(hi - u) would collapse to f(hi) once
    # the graded mesh reaches u below one ulp of hi.
    res = integrate_upper_singular(None, 0.0, 1.0, -0.5, f_from_dist=lambda u: u ** -0.5)
    assert res.converged
    assert res.value == pytest.approx(2.0, rel=1e-6)


def test_singular_linear_times_inverse_sqrt():
    res = integrate_upper_singular(
        None, 0.0, 1.0, -0.5, f_from_dist=lambda u: (1.0 - u) * u ** -0.5
    )
    assert res.converged
    assert res.value == pytest.approx(4.0 / 3.0, rel=1e-6)


def test_singular_integer_exponent_constant_is_exact():
    res = integrate_upper_singular(lambda x: np.full_like(x, 3.0), 0.5, 2.5, 0.0)
    assert res.value == pytest.approx(6.0, rel=4.0 * _EPS)
    assert res.converged
    assert res.panels_used == 1  # no graded mesh for a non-singular exponent


def test_singular_distance_form_matches_plain_form():
    spec = QuadSpec()
    a = integrate_upper_singular(lambda x: (1.0 - x) ** -0.3 * np.cos(x), 0.0, 1.0, -0.3, spec)
    b = integrate_upper_singular(
        None, 0.0, 1.0, -0.3, spec,
        f_from_dist=lambda u: u ** -0.3 * np.cos(1.0 - u),
    )
    assert a.converged and b.converged
    assert a.value == pytest.approx(b.value, rel=1e-9)


@pytest.mark.parametrize("exponent", [-1.0, -1.5, -1.0 + 1e-4])
def test_singular_divergent_exponents_raise(exponent):
    with pytest.raises(DivergentIntegralError):
        integrate_upper_singular(lambda x: (1.0 - x) ** exponent, 0.0, 1.0, exponent)


def test_singular_requires_an_integrand():
    with pytest.raises(ValueError):
        integrate_upper_singular(None, 0.0, 1.0, -0.5)


def test_singular_rejects_empty_interval():
    with pytest.raises(ValueError):
        integrate_upper_singular(lambda x: x, 1.0, 0.5, -0.5)


def test_singular_cancellation_near_zero_total():
    # u^-0.5 - 2.05 integrates to -0.05 on (0, 1): the two graded passes must
    # notice the cancellation and still land on the true value.
    res = integrate_upper_singular(
        None, 0.0, 1.0, -0.5, f_from_dist=lambda u: u ** -0.5 - 2.05
    )
    assert res.converged
    assert res.value == pytest.approx(-0.05, rel=1e-8)


# --------------------------------------------------------------------------
# Estimator honesty: the reported err_estimate must dominate the true error
# on a bank of integrals with independently computed values.

_SMOOTH_BANK = [
    (lambda x: np.exp(x), 0.0, 1.0, math.e - 1.0),
    (lambda x: np.sin(x), 0.0, math.pi, 2.0),
    (lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0, math.pi / 4.0),
    (lambda x: x ** 5, 0.0, 2.0, 64.0 / 6.0),
    (lambda x: np.log(1.0 + x), 0.0, 1.0, 2.0 * math.log(2.0) - 1.0),
    (lambda x: np.cos(10.0 * x), 0.0, 1.0, math.sin(10.0) / 10.0),
    (lambda x: np.exp(-x * x), 0.0, 3.0, float(mp.sqrt(mp.pi) / 2 * mp.erf(3))),
    (lambda x: np.sqrt(x), 0.0, 1.0, 2.0 / 3.0),
    (lambda x: 1.0 / (x + 0.1), 0.0, 1.0, math.log(11.0)),
    (
        lambda x: x * np.sin(30.0 * x),
        0.0,
        1.0,
        math.sin(30.0) / 900.0 - math.cos(30.0) / 30.0,
    ),
]

_SINGULAR_BANK = [
    # (f(u) in distance coordinates u = hi - x, lo, hi, exponent,
    #  truth or None for an mpmath oracle)
    (lambda u: u ** -0.5, 0.0, 1.0, -0.5, 2.0),
    (lambda u: (1.0 - u) * u ** -0.5, 0.0, 1.0, -0.5, 4.0 / 3.0),
    (lambda u: u ** -0.9, 0.0, 1.0, -0.9, 10.0),
    (lambda u: u ** -0.3 * np.cos(1.0 - u), 0.0, 1.0, -0.3, None),
    (lambda u: u ** 0.5, 0.0, 1.0, 0.5, 2.0 / 3.0),
    (lambda u: np.exp(1.0 - u) * u ** -0.5, 0.0, 1.0, -0.5, None),
    (lambda u: (1.0 + (1.0 - u) ** 2) * u ** -0.7, 0.0, 1.0, -0.7, None),
    (lambda u: np.sin(5.0 * (1.0 - u)) * u ** -0.4, 0.0, 1.0, -0.4, None),
    (lambda u: u ** -0.5, 1.0, 2.0, -0.5, 2.0),
    (lambda u: np.log(2.0 - u) * u ** -0.6, 0.0, 1.0, -0.6, None),
    (lambda u: (1.0 - u) ** 2 * u ** -0.5, 0.0, 1.0, -0.5, 16.0 / 15.0),
    (lambda u: np.full_like(u, 3.0), 0.25, 1.75, 0.0, 4.5),
]


def _mp_truth(f, lo, hi):
    return float(mp.quad(lambda u: f(np.array([float(u)]))[0], [0, hi - lo]))


def test_error_estimates_dominate_true_error():
    checked = 0
    honest = 0
    for f, lo, hi, truth in _SMOOTH_BANK:
        res = integrate_adaptive(f, lo, hi)
        assert res.converged
        checked += 1
        if abs(res.value - truth) <= 10.0 * res.err_estimate + 4.0 * _EPS * abs(truth):
            honest += 1
    for f, lo, hi, exponent, truth in _SINGULAR_BANK:
        if truth is None:
            truth = _mp_truth(f, lo, hi)
        res = integrate_upper_singular(None, lo, hi, exponent, f_from_dist=f)
        assert res.converged
        checked += 1
        if abs(res.value - truth) <= 10.0 * res.err_estimate + 4.0 * _EPS * abs(truth):
            honest += 1
    assert checked >= 20
    assert honest / checked >= 0.95, f"only {honest}/{checked} estimates honest"


# --------------------------------------------------------------------------
# Properties


def test_additivity_over_split_point():
    rng = np.random.default_rng(20240818)
    for _ in range(50):
        a1, a2, a3 = rng.uniform(-2.0, 2.0, size=3)
        b = rng.uniform(1.0, 8.0)
        c = rng.uniform(0.0, math.pi)

        def f(x, a1=a1, a2=a2, a3=a3, b=b, c=c):
            return a1 * np.sin(b * x + c) + a2 * x * x + a3 * np.exp(-x)

        m = float(rng.uniform(0.2, 0.8))
        whole = integrate_adaptive(f, 0.0, 1.0)
        left = integrate_adaptive(f, 0.0, m)
        right = integrate_adaptive(f, m, 1.0)
        assert whole.converged and left.converged and right.converged
        gap = abs(whole.value - (left.value + right.value))
        budget = (
            whole.err_estimate
            + left.err_estimate
            + right.err_estimate
            + 16.0 * _EPS * (abs(whole.value) + 1.0)
        )
        assert gap <= budget


def test_tightening_tolerance_does_not_lose_accuracy():
    truth = (1.0 - math.cos(40.0)) / 40.0
    loose = integrate_adaptive(lambda x: np.sin(40.0 * x), 0.0, 1.0, QuadSpec(rel_tol=1e-3))
    tight = integrate_adaptive(lambda x: np.sin(40.0 * x), 0.0, 1.0, QuadSpec(rel_tol=1e-12))
    assert loose.converged and tight.converged
    assert abs(tight.value - truth) <= abs(loose.value - truth) + 8.0 * _EPS * abs(truth)
    assert tight.panels_used >= loose.panels_used


def test_tightening_tolerance_singular_case():
    truth = 2.0
    f = lambda u: u ** -0.5
    loose = integrate_upper_singular(None, 0.0, 1.0, -0.5, QuadSpec(rel_tol=1e-3), f_from_dist=f)
    tight = integrate_upper_singular(None, 0.0, 1.0, -0.5, QuadSpec(rel_tol=1e-10), f_from_dist=f)
    assert loose.converged and tight.converged
    assert abs(tight.value - truth) <= abs(loose.value - truth) + 8.0 * _EPS * truth


def test_non_convergence_is_flagged_not_raised():
    spec = QuadSpec(max_panels=3)
    res = integrate_adaptive(lambda x: np.sin(50.0 * x) / (1.0 + x * x), 0.0, 10.0, spec)
    assert isinstance(res, QuadResult)
    assert not res.converged
    assert res.err_estimate > spec.tolerance(res.value)
    assert res.panels_used <= 3


def test_converged_flag_matches_tolerance_contract():
    for spec in (QuadSpec(), QuadSpec(rel_tol=1e-4, abs_tol=1e-6), QuadSpec(max_panels=2)):
        for f, lo, hi, _ in _SMOOTH_BANK[:5]:
            res = integrate_adaptive(f, lo, hi, spec)
            assert res.converged == (res.err_estimate <= spec.tolerance(res.value))
