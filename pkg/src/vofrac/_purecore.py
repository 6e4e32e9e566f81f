"""Pure-NumPy numeric core.

Executes compiled expression :class:`~vofrac.exprlang.Program` objects over
arrays and provides the vectorized log-gamma used by every kernel
evaluation.  Semantics (including which inputs are domain errors) match the
scalar reference walker in :mod:`vofrac.exprlang`; the compiled core in
``_fastcore`` implements the same contract.
"""

from __future__ import annotations

import numpy as np

from .exprlang import (
    OP_ABS,
    OP_ADD,
    OP_CONST,
    OP_COS,
    OP_DIV,
    OP_EXP,
    OP_LOG,
    OP_MAX,
    OP_MIN,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_SIN,
    OP_SQRT,
    OP_SUB,
    OP_TAN,
    OP_VAR,
    DomainError,
)

NAME = "pure"

# Lanczos approximation (g = 607/128, 15 terms); relative error below 1e-12
# over the positive axis range used by the operators.
LANCZOS_G = 607.0 / 128.0
LANCZOS_COEFFS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_TWO_PI = 0.91893853320467274178


def log_gamma_array(x: np.ndarray) -> np.ndarray:
    """Elementwise ln Gamma for strictly positive ``x``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.size and np.any(x <= 0.0):
        bad = float(x[np.argmax(x <= 0.0)])
        raise DomainError(f"log_gamma of non-positive value {bad!r}")
    series = np.full_like(x, LANCZOS_COEFFS[0])
    for k in range(1, len(LANCZOS_COEFFS)):
        series += LANCZOS_COEFFS[k] / (x - 1.0 + k)
    t = x + (LANCZOS_G - 0.5)
    return _HALF_LOG_TWO_PI + (x - 0.5) * np.log(t) - t + np.log(series)


def run_program(
    code: np.ndarray,
    arg: np.ndarray,
    consts: np.ndarray,
    vars2d: np.ndarray,
    stack_need: int,
) -> np.ndarray:
    """Execute a postfix program over ``vars2d`` (one row per variable)."""
    npts = vars2d.shape[1]
    stack = np.empty((stack_need, npts), dtype=np.float64)
    sp = 0
    for i in range(code.shape[0]):
        op = int(code[i])
        if op == OP_CONST:
            stack[sp] = consts[arg[i]]
            sp += 1
        elif op == OP_VAR:
            stack[sp] = vars2d[arg[i]]
            sp += 1
        elif op == OP_NEG:
            np.negative(stack[sp - 1], out=stack[sp - 1])
        elif op == OP_ADD:
            sp -= 1
            np.add(stack[sp - 1], stack[sp], out=stack[sp - 1])
            _require_finite(stack[sp - 1], "+")
        elif op == OP_SUB:
            sp -= 1
            np.subtract(stack[sp - 1], stack[sp], out=stack[sp - 1])
            _require_finite(stack[sp - 1], "-")
        elif op == OP_MUL:
            sp -= 1
            np.multiply(stack[sp - 1], stack[sp], out=stack[sp - 1])
            _require_finite(stack[sp - 1], "*")
        elif op == OP_DIV:
            sp -= 1
            if np.any(stack[sp] == 0.0):
                raise DomainError("division by zero")
            np.divide(stack[sp - 1], stack[sp], out=stack[sp - 1])
            _require_finite(stack[sp - 1], "/")
        elif op == OP_POW:
            sp -= 1
            stack[sp - 1] = _pow_checked(stack[sp - 1], stack[sp])
        elif op == OP_SIN:
            np.sin(stack[sp - 1], out=stack[sp - 1])
        elif op == OP_COS:
            np.cos(stack[sp - 1], out=stack[sp - 1])
        elif op == OP_TAN:
            np.tan(stack[sp - 1], out=stack[sp - 1])
        elif op == OP_EXP:
            np.exp(stack[sp - 1], out=stack[sp - 1])
            _require_finite(stack[sp - 1], "exp")
        elif op == OP_LOG:
            if np.any(stack[sp - 1] <= 0.0):
                raise DomainError("log of non-positive value")
            np.log(stack[sp - 1], out=stack[sp - 1])
        elif op == OP_SQRT:
            if np.any(stack[sp - 1] < 0.0):
                raise DomainError("sqrt of negative value")
            np.sqrt(stack[sp - 1], out=stack[sp - 1])
        elif op == OP_ABS:
            np.abs(stack[sp - 1], out=stack[sp - 1])
        elif op == OP_MIN:
            sp -= 1
            np.minimum(stack[sp - 1], stack[sp], out=stack[sp - 1])
        elif op == OP_MAX:
            sp -= 1
            np.maximum(stack[sp - 1], stack[sp], out=stack[sp - 1])
        else:
            raise ValueError(f"unknown opcode {op}")
    return stack[0].copy()


def _require_finite(values: np.ndarray, what: str) -> None:
    if not np.isfinite(values).all():
        raise DomainError(f"non-finite result in {what}")


def _pow_checked(base: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    neg = base < 0.0
    if np.any(neg & (exponent != np.floor(exponent))):
        raise DomainError("negative base with non-integer exponent")
    if np.any((base == 0.0) & (exponent < 0.0)):
        raise DomainError("zero raised to a negative power")
    out = np.power(base, exponent)
    _require_finite(out, "^")
    return out
