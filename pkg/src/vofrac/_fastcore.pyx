# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled numeric core.

Same contract as ``vofrac._purecore`` (program execution and vectorized
log-gamma) with the per-point loops in C.  The opcode table is checked
against :mod:`vofrac.exprlang` at import so the two can never drift apart
silently.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport (cos, exp, fabs, floor, fmax, fmin, isfinite, log,
                        pow, sin, sqrt, tan)

cnp.import_array()

from . import exprlang as _el
from .exprlang import DomainError

NAME = "fast"

cdef enum:
    OP_CONST = 0
    OP_VAR = 1
    OP_NEG = 2
    OP_ADD = 3
    OP_SUB = 4
    OP_MUL = 5
    OP_DIV = 6
    OP_POW = 7
    OP_SIN = 8
    OP_COS = 9
    OP_TAN = 10
    OP_EXP = 11
    OP_LOG = 12
    OP_SQRT = 13
    OP_ABS = 14
    OP_MIN = 15
    OP_MAX = 16

if not (
    OP_CONST == _el.OP_CONST
    and OP_VAR == _el.OP_VAR
    and OP_NEG == _el.OP_NEG
    and OP_ADD == _el.OP_ADD
    and OP_SUB == _el.OP_SUB
    and OP_MUL == _el.OP_MUL
    and OP_DIV == _el.OP_DIV
    and OP_POW == _el.OP_POW
    and OP_SIN == _el.OP_SIN
    and OP_COS == _el.OP_COS
    and OP_TAN == _el.OP_TAN
    and OP_EXP == _el.OP_EXP
    and OP_LOG == _el.OP_LOG
    and OP_SQRT == _el.OP_SQRT
    and OP_ABS == _el.OP_ABS
    and OP_MIN == _el.OP_MIN
    and OP_MAX == _el.OP_MAX
):
    raise ImportError("vofrac._fastcore opcode table out of sync with exprlang")

cdef enum:
    ERR_NONE = 0
    ERR_DIV0 = 1
    ERR_LOG = 2
    ERR_SQRT = 3
    ERR_POW_NEG = 4
    ERR_POW_ZERO = 5
    ERR_NONFINITE = 6

_ERR_MESSAGES = {
    ERR_DIV0: "division by zero",
    ERR_LOG: "log of non-positive value",
    ERR_SQRT: "sqrt of negative value",
    ERR_POW_NEG: "negative base with non-integer exponent",
    ERR_POW_ZERO: "zero raised to a negative power",
    ERR_NONFINITE: "non-finite result",
}


def run_program(
    const cnp.int64_t[::1] code,
    const cnp.int64_t[::1] arg,
    const double[::1] consts,
    const double[:, ::1] vars2d,
    int stack_need,
):
    """Execute a postfix program over ``vars2d`` (one row per variable)."""
    cdef Py_ssize_t ninstr = code.shape[0]
    cdef Py_ssize_t npts = vars2d.shape[1]
    stack_arr = np.empty((stack_need, npts), dtype=np.float64)
    cdef double[:, ::1] stack = stack_arr
    cdef Py_ssize_t i, j
    cdef int sp = 0
    cdef int op
    cdef int err = ERR_NONE
    cdef cnp.int64_t a
    cdef double x, y, r

    with nogil:
        for i in range(ninstr):
            op = <int> code[i]
            a = arg[i]
            if op == OP_CONST:
                x = consts[a]
                for j in range(npts):
                    stack[sp, j] = x
                sp += 1
            elif op == OP_VAR:
                for j in range(npts):
                    stack[sp, j] = vars2d[a, j]
                sp += 1
            elif op == OP_NEG:
                for j in range(npts):
                    stack[sp - 1, j] = -stack[sp - 1, j]
            elif op == OP_ADD:
                sp -= 1
                for j in range(npts):
                    r = stack[sp - 1, j] + stack[sp, j]
                    if not isfinite(r):
                        err = ERR_NONFINITE
                        break
                    stack[sp - 1, j] = r
            elif op == OP_SUB:
                sp -= 1
                for j in range(npts):
                    r = stack[sp - 1, j] - stack[sp, j]
                    if not isfinite(r):
                        err = ERR_NONFINITE
                        break
                    stack[sp - 1, j] = r
            elif op == OP_MUL:
                sp -= 1
                for j in range(npts):
                    r = stack[sp - 1, j] * stack[sp, j]
                    if not isfinite(r):
                        err = ERR_NONFINITE
                        break
                    stack[sp - 1, j] = r
            elif op == OP_DIV:
                sp -= 1
                for j in range(npts):
                    y = stack[sp, j]
                    if y == 0.0:
                        err = ERR_DIV0
                        break
                    r = stack[sp - 1, j] / y
                    if not isfinite(r):
                        err = ERR_NONFINITE
                        break
                    stack[sp - 1, j] = r
            elif op == OP_POW:
                sp -= 1
                for j in range(npts):
                    x = stack[sp - 1, j]
                    y = stack[sp, j]
                    if x < 0.0 and y != floor(y):
                        err = ERR_POW_NEG
                        break
                    if x == 0.0 and y < 0.0:
                        err = ERR_POW_ZERO
                        break
                    r = pow(x, y)
                    if not isfinite(r):
                        err = ERR_NONFINITE
                        break
                    stack[sp - 1, j] = r
            elif op == OP_SIN:
                for j in range(npts):
                    stack[sp - 1, j] = sin(stack[sp - 1, j])
            elif op == OP_COS:
                for j in range(npts):
                    stack[sp - 1, j] = cos(stack[sp - 1, j])
            elif op == OP_TAN:
                for j in range(npts):
                    stack[sp - 1, j] = tan(stack[sp - 1, j])
            elif op == OP_EXP:
                for j in range(npts):
                    r = exp(stack[sp - 1, j])
                    if not isfinite(r):
                        err = ERR_NONFINITE
                        break
                    stack[sp - 1, j] = r
            elif op == OP_LOG:
                for j in range(npts):
                    x = stack[sp - 1, j]
                    if x <= 0.0:
                        err = ERR_LOG
                        break
                    stack[sp - 1, j] = log(x)
            elif op == OP_SQRT:
                for j in range(npts):
                    x = stack[sp - 1, j]
                    if x < 0.0:
                        err = ERR_SQRT
                        break
                    stack[sp - 1, j] = sqrt(x)
            elif op == OP_ABS:
                for j in range(npts):
                    stack[sp - 1, j] = fabs(stack[sp - 1, j])
            elif op == OP_MIN:
                sp -= 1
                for j in range(npts):
                    stack[sp - 1, j] = fmin(stack[sp - 1, j], stack[sp, j])
            elif op == OP_MAX:
                sp -= 1
                for j in range(npts):
                    stack[sp - 1, j] = fmax(stack[sp - 1, j], stack[sp, j])
            else:
                err = -1
            if err != ERR_NONE:
                break

    if err == -1:
        raise ValueError("unknown opcode")
    if err != ERR_NONE:
        raise DomainError(_ERR_MESSAGES[err])
    return stack_arr[0].copy()


# Lanczos approximation (g = 607/128, 15 terms); the coefficient table must
# match vofrac._purecore.LANCZOS_COEFFS (asserted by the backend test suite).
cdef double LANCZOS_G = 607.0 / 128.0
cdef double HALF_LOG_TWO_PI = 0.91893853320467274178
cdef double[::1] _LANCZOS = np.array(
    [
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
    ],
    dtype=np.float64,
)


cdef double _log_gamma(double x) noexcept nogil:
    cdef double series = _LANCZOS[0]
    cdef double t
    cdef int k
    for k in range(1, 15):
        series += _LANCZOS[k] / (x - 1.0 + k)
    t = x + (LANCZOS_G - 0.5)
    return HALF_LOG_TWO_PI + (x - 0.5) * log(t) - t + log(series)


def log_gamma_array(x):
    """Elementwise ln Gamma for strictly positive ``x``."""
    x_arr = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] xv = x_arr
    out_arr = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out_arr
    cdef Py_ssize_t j
    cdef Py_ssize_t bad = -1
    with nogil:
        for j in range(xv.shape[0]):
            if xv[j] <= 0.0:
                bad = j
                break
            ov[j] = _log_gamma(xv[j])
    if bad >= 0:
        raise DomainError(f"log_gamma of non-positive value {x_arr[bad]!r}")
    return out_arr
