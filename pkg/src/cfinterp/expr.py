"""A small expression language for ``f(s)`` and node functions ``x_i(z)``.

Grammar (one free variable per expression)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INTEGER)*
    atom    := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := exp | log | sin | cos | sqrt

Exponents are integer literals so that derivatives stay closed-form. The
parser folds constant subtrees; :func:`derive` differentiates symbolically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EvaluationError(ArithmeticError):
    def __init__(self, message: str, node: "Ast | None" = None):
        where = f" in '{unparse(node)}'" if node is not None else ""
        super().__init__(message + where)
        self.node = node


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Ast"


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Ast"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Pow:
    base: "Ast"
    exponent: int


Ast = Union[Const, Var, Neg, Func, BinOp, Pow]


# --------------------------------------------------------------------------
# construction helpers (constant folding lives here)


def _fold(node: Ast) -> Ast:
    try:
        value = _eval(node, 0.0)
    except (EvaluationError, OverflowError, ValueError, ZeroDivisionError):
        return node
    if not math.isfinite(value):
        return node
    return Const(value)


def _is_const(node: Ast, value: float | None = None) -> bool:
    return isinstance(node, Const) and (value is None or node.value == value)


def neg(u: Ast) -> Ast:
    if isinstance(u, Const):
        return Const(-u.value)
    if isinstance(u, Neg):
        return u.arg
    return Neg(u)


def add(u: Ast, v: Ast) -> Ast:
    if _is_const(u, 0.0):
        return v
    if _is_const(v, 0.0):
        return u
    node = BinOp("+", u, v)
    return _fold(node) if _is_const(u) and _is_const(v) else node


def sub(u: Ast, v: Ast) -> Ast:
    if _is_const(v, 0.0):
        return u
    if _is_const(u, 0.0):
        return neg(v)
    node = BinOp("-", u, v)
    return _fold(node) if _is_const(u) and _is_const(v) else node


def mul(u: Ast, v: Ast) -> Ast:
    if _is_const(u, 0.0) or _is_const(v, 0.0):
        return Const(0.0)
    if _is_const(u, 1.0):
        return v
    if _is_const(v, 1.0):
        return u
    node = BinOp("*", u, v)
    return _fold(node) if _is_const(u) and _is_const(v) else node


def div(u: Ast, v: Ast) -> Ast:
    if _is_const(v, 1.0):
        return u
    node = BinOp("/", u, v)
    return _fold(node) if _is_const(u) and _is_const(v) else node


def power(u: Ast, n: int) -> Ast:
    if n == 0:
        return Const(1.0)
    if n == 1:
        return u
    node = Pow(u, n)
    return _fold(node) if _is_const(u) else node


def func(name: str, u: Ast) -> Ast:
    node = Func(name, u)
    return _fold(node) if _is_const(u) else node


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, var_name: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.var = var_name

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value:
            found = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Ast:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing token {text!r}", pos)
        return node

    def expr(self) -> Ast:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = _fold_binary(op, node, self.term())
        return node

    def term(self) -> Ast:
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = _fold_binary(op, node, rhs)
        return node

    def unary(self) -> Ast:
        if self.peek()[1] == "-":
            self.take()
            arg = self.unary()
            return _fold(Neg(arg)) if _is_const(arg) else Neg(arg)
        return self.power()

    def power(self) -> Ast:
        node = self.atom()
        while self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, text, pos = self.take()
            if kind != "num":
                found = "end of input" if kind == "end" else repr(text)
                raise ParseError(f"exponent must be an integer literal, found {found}", pos)
            value = float(text)
            if value != int(value):
                raise ParseError(f"exponent must be an integer, got {text}", pos)
            node = Pow(node, sign * int(value))
            if _is_const(node.base):
                node = _fold(node)
        return node

    def atom(self) -> Ast:
        kind, text, pos = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text == self.var:
                return Var(text)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                node = Func(text, arg)
                return _fold(node) if _is_const(arg) else node
            raise ParseError(f"unknown identifier {text!r}", pos)
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {found}", pos)


def _fold_binary(op, u, v):
    node = BinOp(op, u, v)
    return _fold(node) if _is_const(u) and _is_const(v) else node


def parse(text: str, var_name: str) -> Ast:
    """Parse ``text`` as an expression in the single free variable ``var_name``.

    Examples
    --------
    >>> eval_at(parse("1+z*z", "z"), 2.0)
    5.0
    >>> parse("2*3+1", "s")
    Const(value=7.0)
    """
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(text, var_name).parse()


# The parser keeps BinOp nodes as written and folds only all-constant
# subtrees; the identity-eliminating helpers above serve derive().


# --------------------------------------------------------------------------
# evaluation


def _eval(node: Ast, x: float) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.arg, x)
    if isinstance(node, BinOp):
        u = _eval(node.left, x)
        v = _eval(node.right, x)
        if node.op == "+":
            return u + v
        if node.op == "-":
            return u - v
        if node.op == "*":
            return u * v
        if v == 0.0:
            raise EvaluationError("division by zero", node)
        return u / v
    if isinstance(node, Pow):
        u = _eval(node.base, x)
        if u == 0.0 and node.exponent < 0:
            raise EvaluationError("zero raised to a negative power", node)
        try:
            return u ** node.exponent
        except OverflowError:
            raise EvaluationError("overflow", node) from None
    if isinstance(node, Func):
        u = _eval(node.arg, x)
        name = node.name
        if name == "exp":
            try:
                return math.exp(u)
            except OverflowError:
                raise EvaluationError("overflow", node) from None
        if name == "log":
            if u <= 0.0:
                raise EvaluationError(f"log of non-positive value {u!r}", node)
            return math.log(u)
        if name == "sqrt":
            if u < 0.0:
                raise EvaluationError(f"sqrt of negative value {u!r}", node)
            return math.sqrt(u)
        if name == "sin":
            return math.sin(u)
        if name == "cos":
            return math.cos(u)
    raise TypeError(f"not an expression node: {node!r}")


def eval_at(ast: Ast, value: float) -> float:
    """Evaluate ``ast`` with its free variable set to ``value``.

    Raises
    ------
    EvaluationError
        On division by zero, ``log``/``sqrt`` outside their domain or
        overflow, naming the offending subexpression.
    """
    result = _eval(ast, float(value))
    if not math.isfinite(result):
        raise EvaluationError(f"non-finite result {result!r}", ast)
    return result


def eval_increment(ast: Ast, base: float, delta: float) -> float:
    """``f(base + delta) - f(base)`` without the cancellation of the naive difference.

    Each node propagates its value at ``base`` together with its increment,
    so small ``delta`` keeps full relative accuracy (``exp`` uses ``expm1``,
    ``log`` uses ``log1p`` and so on). For ``f(s) = s`` the result is exactly
    ``delta``.
    """
    _, d = _incr(ast, float(base), float(delta))
    if not math.isfinite(d):
        raise EvaluationError(f"non-finite increment {d!r}", ast)
    return d


def _incr(node: Ast, x: float, dx: float) -> tuple[float, float]:
    if isinstance(node, Const):
        return node.value, 0.0
    if isinstance(node, Var):
        return x, dx
    if isinstance(node, Neg):
        v, d = _incr(node.arg, x, dx)
        return -v, -d
    if isinstance(node, BinOp):
        u, du = _incr(node.left, x, dx)
        v, dv = _incr(node.right, x, dx)
        if node.op == "+":
            return u + v, du + dv
        if node.op == "-":
            return u - v, du - dv
        if node.op == "*":
            return u * v, du * (v + dv) + u * dv
        if v == 0.0 or v + dv == 0.0:
            raise EvaluationError("division by zero", node)
        return u / v, (du * v - u * dv) / (v * (v + dv))
    if isinstance(node, Pow):
        u, du = _incr(node.base, x, dx)
        n = node.exponent
        if n == 0:
            return 1.0, 0.0
        m = abs(n)
        w = u + du
        # (u+du)^m - u^m = du * sum_i w^i u^(m-1-i)
        grow = du * math.fsum(w ** i * u ** (m - 1 - i) for i in range(m))
        if n > 0:
            return u ** m, grow
        if u == 0.0 or w == 0.0:
            raise EvaluationError("zero raised to a negative power", node)
        um, wm = u ** m, w ** m
        return 1.0 / um, -grow / (um * wm)
    if isinstance(node, Func):
        u, du = _incr(node.arg, x, dx)
        name = node.name
        if name == "exp":
            try:
                e = math.exp(u)
                return e, e * math.expm1(du)
            except OverflowError:
                raise EvaluationError("overflow", node) from None
        if name == "log":
            if u <= 0.0 or u + du <= 0.0:
                raise EvaluationError("log of non-positive value", node)
            return math.log(u), math.log1p(du / u)
        if name == "sqrt":
            if u < 0.0 or u + du < 0.0:
                raise EvaluationError("sqrt of negative value", node)
            r0, r1 = math.sqrt(u), math.sqrt(u + du)
            if r0 + r1 == 0.0:
                return 0.0, 0.0
            return r0, du / (r0 + r1)
        half = 0.5 * du
        if name == "sin":
            return math.sin(u), 2.0 * math.cos(u + half) * math.sin(half)
        if name == "cos":
            return math.cos(u), -2.0 * math.sin(u + half) * math.sin(half)
    raise TypeError(f"not an expression node: {node!r}")


# --------------------------------------------------------------------------
# differentiation


def derive(ast: Ast) -> Ast:
    """Symbolic derivative with respect to the free variable."""
    if isinstance(ast, Const):
        return Const(0.0)
    if isinstance(ast, Var):
        return Const(1.0)
    if isinstance(ast, Neg):
        return neg(derive(ast.arg))
    if isinstance(ast, BinOp):
        u, v = ast.left, ast.right
        du, dv = derive(u), derive(v)
        if ast.op == "+":
            return add(du, dv)
        if ast.op == "-":
            return sub(du, dv)
        if ast.op == "*":
            return add(mul(du, v), mul(u, dv))
        return div(sub(mul(du, v), mul(u, dv)), power(v, 2))
    if isinstance(ast, Pow):
        n = ast.exponent
        if n == 0:
            return Const(0.0)
        return mul(mul(Const(float(n)), power(ast.base, n - 1)), derive(ast.base))
    if isinstance(ast, Func):
        u = ast.arg
        du = derive(u)
        if ast.name == "exp":
            outer = ast
        elif ast.name == "log":
            return div(du, u)
        elif ast.name == "sin":
            outer = func("cos", u)
        elif ast.name == "cos":
            outer = neg(func("sin", u))
        else:  # sqrt
            return div(du, mul(Const(2.0), ast))
        return mul(outer, du)
    raise TypeError(f"not an expression node: {ast!r}")


def free_variable(ast: Ast) -> str | None:
    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Const):
        return None
    children = (
        (ast.left, ast.right) if isinstance(ast, BinOp)
        else (ast.base,) if isinstance(ast, Pow)
        else (ast.arg,)
    )
    for child in children:
        name = free_variable(child)
        if name is not None:
            return name
    return None


# --------------------------------------------------------------------------
# unparsing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Ast) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    if isinstance(node, Const) and node.value < 0:
        return 3  # prints with a leading minus
    return 5


def _num(value: float) -> str:
    text = repr(float(value))
    if text.endswith(".0"):
        text = text[:-2]
    return text


def unparse(ast: Ast) -> str:
    """Render ``ast`` back into the grammar; ``parse(unparse(t))`` rebuilds ``t``."""
    if isinstance(ast, Const):
        return _num(ast.value)
    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Func):
        return f"{ast.name}({unparse(ast.arg)})"
    if isinstance(ast, Neg):
        inner = unparse(ast.arg)
        return f"-{inner}" if _prec(ast.arg) >= 3 else f"-({inner})"
    if isinstance(ast, Pow):
        base = unparse(ast.base)
        if _prec(ast.base) <= 4:
            base = f"({base})"
        return f"{base}^{ast.exponent}"
    p = _PREC[ast.op]
    left = unparse(ast.left)
    if _prec(ast.left) < p:
        left = f"({left})"
    right = unparse(ast.right)
    if _prec(ast.right) <= p:
        right = f"({right})"
    return f"{left}{ast.op}{right}"
