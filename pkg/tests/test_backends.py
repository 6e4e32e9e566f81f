"""Parity between the compiled and pure numeric cores."""

import math
import subprocess
import sys

import numpy as np
import pytest

from vofrac import available_backends, use_backend
from vofrac import _backend
from vofrac.exprlang import DomainError, bind_univariate, parse
from vofrac.vo_operators import integral_operator, vo_integral

_HAVE_FAST = "fast" in available_backends()

needs_fast = pytest.mark.skipif(
    not _HAVE_FAST, reason="compiled core not built in this environment"
)


@pytest.fixture
def each_backend():
    """Yield a function evaluating a callable under a named backend, always
    restoring the original core afterwards."""
    original = _backend.active()

    def run_with(name, fn):
        use_backend(name)
        try:
            return fn()
        finally:
            use_backend(original)

    yield run_with
    use_backend(original)


def test_pure_backend_always_available():
    assert "pure" in available_backends()


def test_use_backend_rejects_unknown_name():
    with pytest.raises(ValueError):
        use_backend("bogus")


def test_use_backend_roundtrip(each_backend):
    original = _backend.active()
    previous = use_backend("pure")
    assert previous == original
    assert _backend.active() == "pure"
    use_backend(original)
    assert _backend.active() == original


@needs_fast
def test_log_gamma_array_parity():
    xs = np.concatenate(
        [np.logspace(-3, math.log10(170.0), 400), np.linspace(0.5, 20.0, 200)]
    )
    use_backend("fast")
    try:
        fast = _backend.core.log_gamma_array(xs)
    finally:
        use_backend("pure")
    pure = _backend.core.log_gamma_array(xs)
    scale = np.maximum(np.abs(pure), 1.0)
    assert np.max(np.abs(fast - pure) / scale) <= 1e-13


@needs_fast
def test_log_gamma_array_against_math_lgamma(each_backend):
    xs = np.linspace(0.1, 50.0, 97)
    want = np.array([math.lgamma(float(x)) for x in xs])
    for name in ("fast", "pure"):
        got = each_backend(name, lambda: _backend.core.log_gamma_array(xs))
        scale = np.maximum(np.abs(want), 1.0)
        assert np.max(np.abs(got - want) / scale) <= 1e-12


@needs_fast
@pytest.mark.parametrize(
    "source",
    [
        "2*x+1",
        "x^2 - 3*x + 0.5",
        "sin(x)*cos(2*x)",
        "exp(-x^2)",
        "log(1+x^2)",
        "sqrt(abs(x))",
        "min(x, 1-x) + max(x, 0.25)",
        "pow(2, x)",
        "-x^2 + pi",
        "x/(1+x^2)",
        "tan(x/4)",
        "e^(-x)",
    ],
)
def test_program_execution_parity(each_backend, source):
    f = bind_univariate(parse(source), "x")
    xs = np.linspace(-2.0, 2.0, 257)
    fast = each_backend("fast", lambda: f.eval_array(xs))
    pure = each_backend("pure", lambda: f.eval_array(xs))
    scale = np.maximum(np.abs(pure), 1.0)
    assert np.max(np.abs(fast - pure) / scale) <= 1e-13


@needs_fast
@pytest.mark.filterwarnings("ignore::RuntimeWarning")  # pure core overflows before raising
@pytest.mark.parametrize(
    "source,x",
    [
        ("1/x", 0.0),
        ("log(x)", 0.0),
        ("log(x)", -1.0),
        ("sqrt(x)", -1.0),
        ("x^0.5", -4.0),
        ("exp(x)", 1e6),
    ],
)
def test_domain_error_parity(each_backend, source, x):
    f = bind_univariate(parse(source), "x")
    for name in ("fast", "pure"):
        with pytest.raises(DomainError):
            each_backend(name, lambda: f(x))


@needs_fast
def test_log_gamma_domain_error_parity(each_backend):
    bad = np.array([1.0, -2.0, 3.0])
    for name in ("fast", "pure"):
        with pytest.raises(DomainError):
            each_backend(name, lambda: _backend.core.log_gamma_array(bad))


@needs_fast
def test_operator_value_agrees_across_backends(each_backend):
    def compute():
        op = integral_operator(0.0, "0.5+0.2*sin(t*s)", t_max=2.0)
        return vo_integral(op, bind_univariate(parse("exp(-x)"), "x"), 1.0)

    fast = each_backend("fast", compute)
    pure = each_backend("pure", compute)
    assert fast.converged and pure.converged
    assert fast.value == pytest.approx(pure.value, rel=1e-12)


def test_backend_env_selection_subprocess():
    script = "import vofrac; print(vofrac.active_backend())"
    proc = subprocess.run(
        [sys.executable, "-c", script],
        capture_output=True,
        text=True,
        timeout=120,
        env={"PATH": "/usr/bin:/bin", "VOFRAC_BACKEND": "pure"},
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "pure"


def test_backend_env_rejects_unknown_subprocess():
    script = "import vofrac"
    proc = subprocess.run(
        [sys.executable, "-c", script],
        capture_output=True,
        text=True,
        timeout=120,
        env={"PATH": "/usr/bin:/bin", "VOFRAC_BACKEND": "bogus"},
    )
    assert proc.returncode != 0
    assert "VOFRAC_BACKEND" in proc.stderr
