"""Compare the compiled and pure numeric cores.

Times the three layers where the backend choice matters: expression-program
execution, vectorized log-gamma, and a full variable-order integral.  Run
from the repository root:

    python3 benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from vofrac import available_backends, use_backend
from vofrac import _backend
from vofrac.exprlang import bind_univariate, parse
from vofrac.vo_operators import integral_operator, vo_integral


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_program(n):
    f = bind_univariate(parse("0.5*sin(3*x) + exp(-x^2) / (1 + x^2)"), "x")
    xs = np.linspace(-2.0, 2.0, n)
    return lambda: f.eval_array(xs)


def bench_log_gamma(n):
    xs = np.linspace(0.1, 150.0, n)
    return lambda: _backend.core.log_gamma_array(xs)


def bench_integral():
    op = integral_operator(0.0, "0.5+0.2*sin(t*s)", t_max=2.0)
    f = bind_univariate(parse("exp(-x)*(1+x^2)"), "x")
    return lambda: vo_integral(op, f, 1.5)


CASES = [
    ("program n=1e3", bench_program(1_000)),
    ("program n=1e5", bench_program(100_000)),
    ("log_gamma n=1e3", bench_log_gamma(1_000)),
    ("log_gamma n=1e5", bench_log_gamma(100_000)),
    ("vo_integral", bench_integral()),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="best-of repeats")
    args = parser.parse_args()

    backends = available_backends()
    if "fast" not in backends:
        print("compiled core not available; timing the pure core only")

    results = {}
    for name in backends:
        use_backend(name)
        for label, fn in CASES:
            fn()  # warm caches before timing
            results[(name, label)] = best_of(fn, args.repeats)

    width = max(len(label) for label, _ in CASES)
    if "fast" in backends:
        print(f"{'case':<{width}}  {'fast':>10}  {'pure':>10}  {'pure/fast':>9}")
        for label, _ in CASES:
            fast = results[("fast", label)]
            pure = results[("pure", label)]
            print(
                f"{label:<{width}}  {fast * 1e3:>8.3f}ms  {pure * 1e3:>8.3f}ms  "
                f"{pure / fast:>8.1f}x"
            )
    else:
        print(f"{'case':<{width}}  {'pure':>10}")
        for label, _ in CASES:
            print(f"{label:<{width}}  {results[('pure', label)] * 1e3:>8.3f}ms")


if __name__ == "__main__":
    main()
