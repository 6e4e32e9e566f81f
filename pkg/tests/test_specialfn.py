"""Gamma evaluation and the variable-order kernel factor."""

import math

import mpmath as mp
import numpy as np
import pytest
import scipy.special

from vofrac.specialfn import (
    GAMMA_MAX_X,
    GammaDomainError,
    GammaOverflowError,
    KernelPoint,
    gamma,
    log_gamma,
    vo_kernel,
)

mp.mp.dps = 40


# --------------------------------------------------------------------------
# Known values


def test_gamma_of_one():
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)


def test_gamma_of_five_is_24():
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-13)


def test_gamma_of_half_is_sqrt_pi():
    assert gamma(0.5) == pytest.approx(1.772453850905516, rel=1e-13)


def test_gamma_half_squared_is_pi():
    assert abs(gamma(0.5) ** 2 - math.pi) / math.pi <= 1e-12


def test_log_gamma_of_one_and_two_vanish():
    assert abs(log_gamma(1.0)) <= 1e-13
    assert abs(log_gamma(2.0)) <= 1e-13


def test_log_gamma_of_ten():
    assert log_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-13)


# --------------------------------------------------------------------------
# Independent oracles


def test_gamma_against_mpmath_grid():
    worst = 0.0
    for x in np.logspace(-3, math.log10(170.0), 200):
        x = float(x)
        want = float(mp.gamma(x))
        worst = max(worst, abs(gamma(x) - want) / want)
    assert worst <= 1e-12


def test_log_gamma_against_mpmath_grid():
    worst = 0.0
    for x in np.logspace(-3, 5, 200):
        x = float(x)
        want = float(mp.loggamma(x))
        worst = max(worst, abs(log_gamma(x) - want) / max(abs(want), 1.0))
    assert worst <= 1e-12


def test_gamma_against_scipy_grid():
    xs = np.linspace(0.05, 30.0, 150)
    ours = np.array([gamma(float(x)) for x in xs])
    theirs = scipy.special.gamma(xs)
    assert np.max(np.abs(ours - theirs) / theirs) <= 1e-12


def test_gamma_against_defining_integral():
    # The defining integral (integrated numerically at high precision) is an
    # oracle fully independent of the rational approximation.
    for s in (0.5, 1.5, 3.7, 10.0):
        want = float(mp.quad(lambda x: x ** (s - 1) * mp.e ** (-x), [0, mp.inf]))
        assert gamma(s) == pytest.approx(want, rel=1e-10)


def test_gamma_recurrence_property():
    rng = np.random.default_rng(20240817)
    xs = rng.uniform(0.01, 160.0, size=1000)
    for x in xs:
        x = float(x)
        lhs = gamma(x + 1.0)
        assert abs(lhs - x * gamma(x)) / lhs <= 1e-10


# --------------------------------------------------------------------------
# Domain handling


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, float("nan"), float("inf")])
def test_gamma_domain_errors(x):
    with pytest.raises(GammaDomainError):
        gamma(x)
    with pytest.raises(GammaDomainError):
        log_gamma(x)


def test_gamma_overflow_redirects_to_log_gamma():
    with pytest.raises(GammaOverflowError):
        gamma(GAMMA_MAX_X + 1.0)
    # log_gamma keeps working far beyond the overflow threshold
    assert log_gamma(1e4) == pytest.approx(float(mp.loggamma(1e4)), rel=1e-13)


def test_gamma_near_overflow_threshold_is_finite():
    value = gamma(GAMMA_MAX_X - 1e-3)
    assert math.isfinite(value) and value > 1e300


# --------------------------------------------------------------------------
# Kernel factor


def test_kernel_degenerates_to_one_at_order_one():
    assert vo_kernel(KernelPoint(t=1.0, s=0.0, alpha_value=1.0)) == pytest.approx(
        1.0, rel=1e-13
    )


def test_kernel_half_order_near_singularity():
    # (0.01)^(-0.5) / Gamma(0.5) = 10 / sqrt(pi)
    want = 10.0 / math.sqrt(math.pi)
    got = vo_kernel(KernelPoint(t=1.0, s=0.99, alpha_value=0.5))
    assert got == pytest.approx(want, rel=1e-12)


def test_kernel_order_two_unit_gap():
    assert vo_kernel(KernelPoint(t=2.0, s=1.0, alpha_value=2.0)) == pytest.approx(
        1.0, rel=1e-13
    )


def test_kernel_positive_on_tiny_gaps():
    for u in (1e-1, 1e-6, 1e-12, 1e-100):
        value = vo_kernel(KernelPoint(t=u, s=0.0, alpha_value=0.3))
        assert value > 0.0 and math.isfinite(value)


def test_kernel_log_linear_in_log_distance():
    # ln kernel = (alpha - 1) ln(t - s) - ln Gamma(alpha): slope alpha - 1.
    alpha = 0.35
    us = (1e-3, 1e-4, 1e-5)
    logs = [
        math.log(vo_kernel(KernelPoint(t=1.0, s=1.0 - u, alpha_value=alpha)))
        for u in us
    ]
    for i in range(len(us) - 1):
        slope = (logs[i + 1] - logs[i]) / (math.log(us[i + 1]) - math.log(us[i]))
        assert slope == pytest.approx(alpha - 1.0, abs=1e-8)


def test_kernel_point_invariants():
    with pytest.raises(ValueError):
        KernelPoint(t=1.0, s=1.0, alpha_value=0.5)  # zero gap
    with pytest.raises(ValueError):
        KernelPoint(t=0.0, s=1.0, alpha_value=0.5)  # negative gap
    with pytest.raises(ValueError):
        KernelPoint(t=1.0, s=0.0, alpha_value=0.0)  # order not positive
    with pytest.raises(ValueError):
        KernelPoint(t=float("inf"), s=0.0, alpha_value=0.5)
