"""A small arithmetic expression language.

Expressions written as text (``"0.5 + 0.3*exp(-(t-s)^2)"``) are parsed into an
immutable AST (:class:`Expr`), evaluated either by a reference tree walker
(:func:`evaluate`) or compiled to a flat postfix :class:`Program` executed by
the active numeric backend over NumPy arrays (:class:`BoundUnivariate`,
:class:`BoundBivariate`).

Grammar (``^`` is right-associative and binds tighter than unary minus, so
``-2^2 == -4`` and ``2^3^2 == 512``)::

    expression := term (('+'|'-') term)*
    term       := factor (('*'|'/') factor)*
    factor     := '-' factor | power
    power      := atom ('^' factor)?
    atom       := NUMBER | NAME | NAME '(' expression (',' expression)* ')'
                | '(' expression ')'

Recognized constants: ``pi``, ``e``.  Recognized functions: ``sin``, ``cos``,
``tan``, ``exp``, ``log``, ``sqrt``, ``abs`` (unary) and ``min``, ``max``,
``pow`` (binary).  Any other name is a free variable.

Domain violations (``log`` of a non-positive value, division by zero,
``0^negative``, a negative base with a non-integer exponent, non-finite
intermediate results) raise :class:`DomainError` -- never a silent NaN -- so
failures inside quadrature loops are attributable to their inputs.
"""

from __future__ import annotations

import math
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Callable, Iterator, Union

import numpy as np

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "EvalScope",
    "ParseError",
    "EvalError",
    "DomainError",
    "UnboundVariableError",
    "Program",
    "BoundUnivariate",
    "BoundBivariate",
    "PositivityResult",
    "parse",
    "evaluate",
    "free_vars",
    "to_source",
    "subst",
    "compile_expr",
    "bind_univariate",
    "bind_bivariate",
    "check_positive_on_box",
]

UNARY_FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs")
BINARY_FUNCTIONS = ("min", "max", "pow")
FUNCTION_ARITY: dict[str, int] = {name: 1 for name in UNARY_FUNCTIONS}
FUNCTION_ARITY.update({name: 2 for name in BINARY_FUNCTIONS})

CONSTANTS = {"pi": math.pi, "e": math.e}


class ParseError(Exception):
    """Syntax error with the byte offset and offending token text."""

    def __init__(self, offset: int, message: str, token: str = ""):
        self.offset = offset
        self.message = message
        self.token = token
        where = f" at offset {offset}"
        what = f" (near {token!r})" if token else ""
        super().__init__(f"{message}{where}{what}")


class EvalError(ValueError):
    """Base class for evaluation failures."""


class DomainError(EvalError):
    """A mathematically undefined or non-finite operation was attempted."""


class UnboundVariableError(EvalError):
    """A free variable had no binding in the evaluation scope."""


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Expr:
    """Base class of all AST nodes.  Instances are immutable and hashable."""

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    args: tuple[Expr, ...]

    def __post_init__(self) -> None:
        arity = FUNCTION_ARITY.get(self.fn)
        if arity is None:
            raise ValueError(f"unknown function {self.fn!r}")
        if len(self.args) != arity:
            raise ValueError(
                f"{self.fn} expects {arity} argument(s), got {len(self.args)}"
            )


@dataclass(frozen=True)
class EvalScope:
    """Variable bindings for one evaluation.  Missing names are errors."""

    bindings: Mapping[str, float]

    def get(self, name: str) -> float:
        try:
            return self.bindings[name]
        except KeyError:
            raise UnboundVariableError(f"unbound variable {name!r}") from None


# --------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | op | end
    text: str
    offset: int


def _tokenize(source: str) -> Iterator[_Token]:
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(pos, "unexpected character", source[pos])
        kind = m.lastgroup
        text = m.group()
        if kind == "number":
            nxt = m.end()
            if nxt < n and (source[nxt].isalnum() or source[nxt] in "._"):
                bad = text + source[nxt]
                raise ParseError(pos, "malformed number", bad)
            yield _Token("number", text, pos)
        elif kind == "name":
            yield _Token("name", text, pos)
        elif kind == "op":
            yield _Token("op", text, pos)
        pos = m.end()
    yield _Token("end", "", n)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = list(_tokenize(source))
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, text: str) -> None:
        tok = self.cur
        if tok.kind != "op" or tok.text != text:
            raise ParseError(tok.offset, f"expected {text!r}", tok.text)
        self.advance()

    def at_op(self, *texts: str) -> bool:
        return self.cur.kind == "op" and self.cur.text in texts

    def parse(self) -> Expr:
        expr = self.expression()
        tok = self.cur
        if tok.kind != "end":
            raise ParseError(tok.offset, "unexpected token", tok.text)
        return expr

    def expression(self) -> Expr:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Expr:
        tok = self.cur
        if tok.kind == "number":
            self.advance()
            try:
                return Const(float(tok.text))
            except ValueError:
                raise ParseError(tok.offset, "malformed number", tok.text) from None
        if tok.kind == "name":
            self.advance()
            if self.at_op("("):
                return self.call(tok)
            if tok.text in CONSTANTS:
                return Const(CONSTANTS[tok.text])
            return Var(tok.text)
        if self.at_op("("):
            self.advance()
            node = self.expression()
            self.expect_op(")")
            return node
        raise ParseError(tok.offset, "expected a value", tok.text)

    def call(self, name_tok: _Token) -> Expr:
        fn = name_tok.text
        arity = FUNCTION_ARITY.get(fn)
        if arity is None:
            raise ParseError(name_tok.offset, "unknown function", fn)
        self.expect_op("(")
        args = [self.expression()]
        while self.at_op(","):
            self.advance()
            args.append(self.expression())
        self.expect_op(")")
        if len(args) != arity:
            raise ParseError(
                name_tok.offset,
                f"{fn} expects {arity} argument(s), got {len(args)}",
                fn,
            )
        return Call(fn, tuple(args))


def parse(source: str) -> Expr:
    """Parse ``source`` into an :class:`Expr`.

    Raises :class:`ParseError` on unknown function names, wrong arity,
    unbalanced parentheses, or malformed numbers.
    """
    if not isinstance(source, str) or not source.strip():
        raise ParseError(0, "empty expression")
    return _Parser(source).parse()


# --------------------------------------------------------------------------
# Reference evaluation (scalar tree walk)


def _check_finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise DomainError(f"non-finite result in {what}")
    return value


def _pow(base: float, exponent: float) -> float:
    if base < 0.0 and exponent != math.floor(exponent):
        raise DomainError(f"negative base {base!r} with non-integer exponent")
    if base == 0.0 and exponent < 0.0:
        raise DomainError("zero raised to a negative power")
    try:
        return math.pow(base, exponent)
    except OverflowError:
        raise DomainError("overflow in power") from None


_UNARY_IMPL: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "abs": abs,
}


def evaluate(expr: Expr, scope: Union[EvalScope, Mapping[str, float]]) -> float:
    """Evaluate ``expr`` with every free variable bound in ``scope``.

    This is the scalar reference semantics; the compiled backends agree with
    it to rounding.  Returns a finite float or raises :class:`EvalError`.
    """
    if not isinstance(scope, EvalScope):
        scope = EvalScope(scope)
    return _eval(expr, scope)


def _eval(expr: Expr, scope: EvalScope) -> float:
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return scope.get(expr.name)
    if isinstance(expr, Neg):
        return -_eval(expr.child, scope)
    if isinstance(expr, BinOp):
        a = _eval(expr.left, scope)
        b = _eval(expr.right, scope)
        if expr.op == "+":
            return _check_finite(a + b, "+")
        if expr.op == "-":
            return _check_finite(a - b, "-")
        if expr.op == "*":
            return _check_finite(a * b, "*")
        if expr.op == "/":
            if b == 0.0:
                raise DomainError("division by zero")
            return _check_finite(a / b, "/")
        if expr.op == "^":
            return _check_finite(_pow(a, b), "^")
        raise ValueError(f"unknown operator {expr.op!r}")
    if isinstance(expr, Call):
        vals = [_eval(arg, scope) for arg in expr.args]
        fn = expr.fn
        if fn == "log":
            if vals[0] <= 0.0:
                raise DomainError(f"log of non-positive value {vals[0]!r}")
            return math.log(vals[0])
        if fn == "sqrt":
            if vals[0] < 0.0:
                raise DomainError(f"sqrt of negative value {vals[0]!r}")
            return math.sqrt(vals[0])
        if fn == "min":
            return min(vals)
        if fn == "max":
            return max(vals)
        if fn == "pow":
            return _check_finite(_pow(vals[0], vals[1]), "pow")
        try:
            return _check_finite(_UNARY_IMPL[fn](vals[0]), fn)
        except OverflowError:
            raise DomainError(f"overflow in {fn}") from None
    raise TypeError(f"not an Expr node: {expr!r}")


# --------------------------------------------------------------------------
# Structural helpers


def free_vars(expr: Expr) -> set[str]:
    """The exact set of variable names occurring in ``expr``."""
    out: set[str] = set()
    _collect_vars(expr, out)
    return out


def _collect_vars(expr: Expr, out: set[str]) -> None:
    if isinstance(expr, Var):
        out.add(expr.name)
    elif isinstance(expr, Neg):
        _collect_vars(expr.child, out)
    elif isinstance(expr, BinOp):
        _collect_vars(expr.left, out)
        _collect_vars(expr.right, out)
    elif isinstance(expr, Call):
        for arg in expr.args:
            _collect_vars(arg, out)


def to_source(expr: Expr) -> str:
    """Emit a fully parenthesized form; ``parse(to_source(e))`` evaluates
    identically to ``e`` in every scope."""
    if isinstance(expr, Const):
        return repr(float(expr.value))
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{to_source(expr.child)})"
    if isinstance(expr, BinOp):
        return f"({to_source(expr.left)}{expr.op}{to_source(expr.right)})"
    if isinstance(expr, Call):
        return f"{expr.fn}({','.join(to_source(a) for a in expr.args)})"
    raise TypeError(f"not an Expr node: {expr!r}")


def subst(expr: Expr, name: str, replacement: Expr) -> Expr:
    """Replace every occurrence of variable ``name`` with ``replacement``.

    Used to build compositions such as ``g(f(x))`` from separate expressions.
    """
    if isinstance(expr, Var):
        return replacement if expr.name == name else expr
    if isinstance(expr, Neg):
        return Neg(subst(expr.child, name, replacement))
    if isinstance(expr, BinOp):
        return BinOp(
            expr.op,
            subst(expr.left, name, replacement),
            subst(expr.right, name, replacement),
        )
    if isinstance(expr, Call):
        return Call(expr.fn, tuple(subst(a, name, replacement) for a in expr.args))
    return expr


# --------------------------------------------------------------------------
# Compilation to a flat postfix program

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

_BINOP_CODE = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV, "^": OP_POW}
_CALL_CODE = {
    "sin": OP_SIN,
    "cos": OP_COS,
    "tan": OP_TAN,
    "exp": OP_EXP,
    "log": OP_LOG,
    "sqrt": OP_SQRT,
    "abs": OP_ABS,
    "min": OP_MIN,
    "max": OP_MAX,
    "pow": OP_POW,
}


@dataclass(frozen=True)
class Program:
    """Postfix form of an :class:`Expr`, executable by the numeric backends.

    ``code[i]`` is an opcode; ``arg[i]`` indexes ``consts`` (for ``OP_CONST``)
    or the variable row (for ``OP_VAR``) and is 0 otherwise.
    """

    code: np.ndarray
    arg: np.ndarray
    consts: np.ndarray
    var_names: tuple[str, ...]
    stack_need: int

    def __post_init__(self) -> None:
        for name in ("code", "arg", "consts"):
            array = getattr(self, name)
            array.setflags(write=False)


def compile_expr(expr: Expr, var_order: tuple[str, ...]) -> Program:
    """Flatten ``expr`` to a :class:`Program` reading variables in the given
    order.  Every free variable must appear in ``var_order``."""
    missing = free_vars(expr) - set(var_order)
    if missing:
        raise UnboundVariableError(
            f"free variable(s) {sorted(missing)} not in {var_order}"
        )
    code: list[int] = []
    arg: list[int] = []
    consts: list[float] = []
    var_index = {name: i for i, name in enumerate(var_order)}

    def emit(node: Expr) -> None:
        if isinstance(node, Const):
            code.append(OP_CONST)
            arg.append(len(consts))
            consts.append(float(node.value))
        elif isinstance(node, Var):
            code.append(OP_VAR)
            arg.append(var_index[node.name])
        elif isinstance(node, Neg):
            emit(node.child)
            code.append(OP_NEG)
            arg.append(0)
        elif isinstance(node, BinOp):
            emit(node.left)
            emit(node.right)
            code.append(_BINOP_CODE[node.op])
            arg.append(0)
        elif isinstance(node, Call):
            for a in node.args:
                emit(a)
            code.append(_CALL_CODE[node.fn])
            arg.append(0)
        else:
            raise TypeError(f"not an Expr node: {node!r}")

    emit(expr)

    depth = 0
    peak = 0
    for c in code:
        if c in (OP_CONST, OP_VAR):
            depth += 1
        elif c in (OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POW, OP_MIN, OP_MAX):
            depth -= 1
        peak = max(peak, depth)
    return Program(
        code=np.asarray(code, dtype=np.int64),
        arg=np.asarray(arg, dtype=np.int64),
        consts=np.asarray(consts, dtype=np.float64),
        var_names=tuple(var_order),
        stack_need=max(peak, 1),
    )


def _run(program: Program, columns: list[np.ndarray]) -> np.ndarray:
    from . import _backend

    npts = columns[0].shape[0] if columns else 1
    vars2d = np.empty((max(len(columns), 1), npts), dtype=np.float64)
    for i, col in enumerate(columns):
        vars2d[i, :] = col
    return _backend.core.run_program(
        program.code, program.arg, program.consts, vars2d, program.stack_need
    )


# --------------------------------------------------------------------------
# Bound handles


@dataclass(frozen=True)
class BoundUnivariate:
    """A compiled single-variable function handle.

    Calling with a float returns a float; :meth:`eval_array` maps a NumPy
    array through the same compiled program in one backend call.
    """

    expr: Expr
    var: str
    program: Program = field(compare=False, repr=False)

    def __call__(self, value: float) -> float:
        return float(_run(self.program, [np.array([value], dtype=np.float64)])[0])

    def eval_array(self, values: np.ndarray) -> np.ndarray:
        values = np.ascontiguousarray(values, dtype=np.float64)
        return _run(self.program, [values])


@dataclass(frozen=True)
class BoundBivariate:
    """A compiled two-variable function handle.

    Calling with two floats returns a float; :meth:`eval_many` broadcasts a
    scalar first argument against an array second argument, the access
    pattern of every kernel-order evaluation.
    """

    expr: Expr
    var1: str
    var2: str
    program: Program = field(compare=False, repr=False)

    def __call__(self, v1: float, v2: float) -> float:
        cols = [
            np.array([v1], dtype=np.float64),
            np.array([v2], dtype=np.float64),
        ]
        return float(_run(self.program, cols)[0])

    def eval_many(self, v1: float, v2: np.ndarray) -> np.ndarray:
        v2 = np.ascontiguousarray(v2, dtype=np.float64)
        col1 = np.full(v2.shape[0], v1, dtype=np.float64)
        return _run(self.program, [col1, v2])


def bind_univariate(expr: Expr, var: str) -> BoundUnivariate:
    """Bind ``expr`` as a function of the single variable ``var``."""
    extra = free_vars(expr) - {var}
    if extra:
        raise UnboundVariableError(
            f"free variable(s) {sorted(extra)} not bindable as {var!r}"
        )
    return BoundUnivariate(expr=expr, var=var, program=compile_expr(expr, (var,)))


def bind_bivariate(expr: Expr, var1: str, var2: str) -> BoundBivariate:
    """Bind ``expr`` as a function of ``(var1, var2)``."""
    extra = free_vars(expr) - {var1, var2}
    if extra:
        raise UnboundVariableError(
            f"free variable(s) {sorted(extra)} not bindable as ({var1!r}, {var2!r})"
        )
    return BoundBivariate(
        expr=expr, var1=var1, var2=var2, program=compile_expr(expr, (var1, var2))
    )


# --------------------------------------------------------------------------
# Positivity sampling


@dataclass(frozen=True)
class PositivityResult:
    passed: bool
    min_value: float
    at: tuple[float, float]


def check_positive_on_box(
    handle,
    box: tuple[tuple[float, float], tuple[float, float]],
    grid: int = 33,
    floor: float = 0.0,
) -> PositivityResult:
    """Sample ``handle`` on a ``grid`` x ``grid`` lattice over ``box``
    (corners included) and fail if any sample is <= ``floor``.

    The handle may be a :class:`BoundBivariate` or any ``(float, float) ->
    float`` callable.  Evaluation errors propagate to the caller.
    """
    (lo1, hi1), (lo2, hi2) = box
    if not (grid >= 2):
        raise ValueError("grid must be >= 2")
    if not (hi1 > lo1 and hi2 > lo2):
        raise ValueError("box must be non-degenerate")
    axis1 = np.linspace(lo1, hi1, grid)
    axis2 = np.linspace(lo2, hi2, grid)
    best = math.inf
    best_at = (axis1[0], axis2[0])
    vectorized = isinstance(handle, BoundBivariate)
    for v1 in axis1:
        if vectorized:
            row = handle.eval_many(float(v1), axis2)
        else:
            row = np.array([handle(float(v1), float(v2)) for v2 in axis2])
        k = int(np.argmin(row))
        if row[k] < best:
            best = float(row[k])
            best_at = (float(v1), float(axis2[k]))
    return PositivityResult(passed=best > floor, min_value=best, at=best_at)
