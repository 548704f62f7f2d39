"""Expression language for the command line.

Grammar (``^`` binds tighter than unary minus, which binds tighter than ``* /``)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT | "^" "-1")?
    atom   := NUMBER | NAME | DERIV | "(" expr ("," expr)* [","] ")"
            | "[" row ("," row)* "]"
    row    := "[" expr ("," expr)* "]"

NAME is ``i``, ``sqrt2``, ``z8`` or a variable (``x, y, z, w`` for n <= 4,
``x1 .. xn`` always); DERIV is ``d/dx`` style.  ``^-1`` is accepted on
matrices only.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any

from . import linalg
from .coeff import I, SQRT2, Z8, CycRational, as_cyc
from .diffeo import JetDiffeo
from .errors import MismatchError, ParseError
from .render import var_names
from .series import TruncSeries
from .vfield import JetVectorField

__all__ = ["Node", "parse", "evaluate", "parse_value", "tokenize"]

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<deriv>d/d[A-Za-z][A-Za-z0-9]*)
  | (?P<number>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),\[\]])
    """,
    re.VERBOSE,
)

CONSTANTS = {"i": I, "sqrt2": SQRT2, "z8": Z8, "zeta8": Z8}


@dataclass(frozen=True)
class Token:
    kind: str  # number, name, deriv, op, eof
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class Node:
    """AST node.  ``kind`` is one of num, name, deriv, neg, add, sub, mul,
    div, pow, inv, tuple, matrix."""

    kind: str
    line: int
    col: int
    value: Any = None
    children: tuple = ()


def tokenize(src: str) -> list[Token]:
    out = []
    line, line_start, pos = 1, 0, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col,
                             ("number", "name", "operator"))
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, len(src) - line_start + 1))
    return out


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected) -> None:
        t = self.cur
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {what}", t.line, t.col, tuple(expected))

    def accept(self, text: str) -> Token | None:
        if self.cur.kind == "op" and self.cur.text == text:
            t = self.cur
            self.i += 1
            return t
        return None

    def expect(self, text: str, also=()) -> Token:
        t = self.accept(text)
        if t is None:
            self.fail((repr(text),) + tuple(also))
        return t

    def parse(self) -> Node:
        node = self.expr()
        if self.cur.kind != "eof":
            self.fail(("operator", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            t = self.accept("+") or self.accept("-")
            if t is None:
                return node
            rhs = self.term()
            node = Node("add" if t.text == "+" else "sub", t.line, t.col, children=(node, rhs))

    def term(self) -> Node:
        node = self.unary()
        while True:
            t = self.accept("*") or self.accept("/")
            if t is None:
                return node
            rhs = self.unary()
            node = Node("mul" if t.text == "*" else "div", t.line, t.col, children=(node, rhs))

    def unary(self) -> Node:
        t = self.accept("-")
        if t is not None:
            return Node("neg", t.line, t.col, children=(self.unary(),))
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        t = self.accept("^")
        if t is None:
            return base
        if self.accept("-"):
            n = self.cur
            if n.kind != "number" or n.text != "1":
                self.fail(("1",))
            self.i += 1
            return Node("inv", t.line, t.col, children=(base,))
        n = self.cur
        if n.kind != "number":
            self.fail(("integer exponent", "'-1'"))
        self.i += 1
        return Node("pow", t.line, t.col, int(n.text), (base,))

    def atom(self) -> Node:
        t = self.cur
        if t.kind == "number":
            self.i += 1
            return Node("num", t.line, t.col, int(t.text))
        if t.kind == "name":
            self.i += 1
            return Node("name", t.line, t.col, t.text)
        if t.kind == "deriv":
            self.i += 1
            return Node("deriv", t.line, t.col, t.text[3:])
        if self.accept("("):
            items = [self.expr()]
            trailing = False
            while self.accept(","):
                if self.cur.kind == "op" and self.cur.text == ")":
                    trailing = True
                    break
                items.append(self.expr())
            self.expect(")", ("','",))
            if len(items) == 1 and not trailing:
                return items[0]
            return Node("tuple", t.line, t.col, children=tuple(items))
        if self.accept("["):
            rows = [self.row()]
            while self.accept(","):
                rows.append(self.row())
            self.expect("]", ("','",))
            width = {len(r) for r in rows}
            if len(width) != 1:
                raise ParseError("matrix rows differ in length", t.line, t.col, ("row of equal length",))
            return Node("matrix", t.line, t.col, children=tuple(rows))
        self.fail(("number", "name", "d/dx", "'('", "'['"))

    def row(self) -> tuple:
        self.expect("[")
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        self.expect("]", ("','",))
        return tuple(items)


def parse(src: str) -> Node:
    """Parse text to an AST; raises ``ParseError`` with line:col on bad input."""
    return _Parser(tokenize(src)).parse()


# -- evaluation ------------------------------------------------------------------

class _Field:
    """Formal sum of f_j d/dx_j before the X(m) in m check."""

    def __init__(self, comps: dict):
        self.comps = {j: f for j, f in comps.items() if not f.is_zero()}

    def __add__(self, other):
        out = dict(self.comps)
        for j, f in other.comps.items():
            out[j] = out[j] + f if j in out else f
        return _Field(out)

    def __neg__(self):
        return _Field({j: -f for j, f in self.comps.items()})

    def times(self, f):
        return _Field({j: f * g for j, g in self.comps.items()})

    def to_field(self, n: int, K: int) -> JetVectorField:
        return JetVectorField([self.comps.get(j, TruncSeries.zero(n, K)) for j in range(n)])


class Context:
    """Dimension n and order K that give meaning to variable names."""

    def __init__(self, n: int, K: int):
        self.n = n
        self.K = K
        self.vars = {}
        for j, name in enumerate(var_names(n)):
            self.vars[name] = j
        for j in range(n):
            self.vars[f"x{j + 1}"] = j


def _err(node: Node, msg: str, expected=()) -> ParseError:
    return ParseError(msg, node.line, node.col, tuple(expected))


def _is_matrix(v) -> bool:
    return isinstance(v, tuple) and bool(v) and all(isinstance(r, tuple) and r and isinstance(r[0], CycRational) for r in v)


def _lift(v, ctx: Context):
    """Scalars become constant series so they mix with series."""
    if isinstance(v, CycRational):
        return TruncSeries.constant(ctx.n, ctx.K, v)
    return v


def _binary(kind: str, a, b, node: Node, ctx: Context):
    if kind in ("add", "sub"):
        if isinstance(a, _Field) or isinstance(b, _Field):
            if not (isinstance(a, _Field) and isinstance(b, _Field)):
                raise _err(node, "cannot add a vector field and a function")
            return a + (-b if kind == "sub" else b)
        if _is_matrix(a) and _is_matrix(b):
            return linalg.add(a, b) if kind == "add" else linalg.sub(a, b)
        if isinstance(a, CycRational) and isinstance(b, CycRational):
            return a + b if kind == "add" else a - b
        if isinstance(a, (CycRational, TruncSeries)) and isinstance(b, (CycRational, TruncSeries)):
            a, b = _lift(a, ctx), _lift(b, ctx)
            return a + b if kind == "add" else a - b
        raise _err(node, "operands cannot be added")
    if kind == "mul":
        if isinstance(a, _Field) and isinstance(b, _Field):
            raise _err(node, "vector fields cannot be multiplied")
        if isinstance(b, _Field):
            a, b = b, a
        if isinstance(a, _Field):
            if isinstance(b, CycRational):
                return a.times(TruncSeries.constant(ctx.n, ctx.K, b))
            if isinstance(b, TruncSeries):
                return a.times(b)
            raise _err(node, "a vector field can only be multiplied by a function")
        if _is_matrix(a) or _is_matrix(b):
            if _is_matrix(a) and _is_matrix(b):
                return linalg.mul(a, b)
            if isinstance(a, CycRational):
                return linalg.scale(a, b)
            if isinstance(b, CycRational):
                return linalg.scale(b, a)
            raise _err(node, "matrices multiply only with matrices and scalars")
        if isinstance(a, CycRational) and isinstance(b, CycRational):
            return a * b
        if isinstance(a, (CycRational, TruncSeries)) and isinstance(b, (CycRational, TruncSeries)):
            if isinstance(a, CycRational):
                return b.scale(a)
            if isinstance(b, CycRational):
                return a.scale(b)
            return a * b
        raise _err(node, "operands cannot be multiplied")
    if kind == "div":
        if isinstance(b, CycRational):
            if b.is_zero():
                raise ZeroDivisionError("division by zero")
            if isinstance(a, CycRational):
                return a / b
            inv = b.inverse()
            if isinstance(a, TruncSeries):
                return a.scale(inv)
            if isinstance(a, _Field):
                return a.times(TruncSeries.constant(ctx.n, ctx.K, inv))
            if _is_matrix(a):
                return linalg.scale(inv, a)
        if isinstance(b, TruncSeries) and isinstance(a, (CycRational, TruncSeries)):
            return _lift(a, ctx) * b.invert()
        raise _err(node, "operands cannot be divided")
    raise AssertionError(kind)


def evaluate(node: Node, ctx: Context):
    """AST -> CycRational, TruncSeries, vector field, tuple or matrix."""
    k = node.kind
    if k == "num":
        return as_cyc(node.value)
    if k == "name":
        name = node.value
        if name in CONSTANTS:
            return CONSTANTS[name]
        if name in ctx.vars:
            return TruncSeries.variable(ctx.n, ctx.K, ctx.vars[name])
        raise _err(node, f"unknown name {name!r} for n={ctx.n}", sorted(ctx.vars) + sorted(CONSTANTS))
    if k == "deriv":
        if node.value not in ctx.vars:
            raise _err(node, f"unknown variable in d/d{node.value} for n={ctx.n}", sorted(ctx.vars))
        return _Field({ctx.vars[node.value]: TruncSeries.one(ctx.n, ctx.K)})
    if k == "neg":
        v = evaluate(node.children[0], ctx)
        if _is_matrix(v):
            return linalg.scale(-1, v)
        if isinstance(v, tuple):
            raise _err(node, "cannot negate a tuple")
        return -v
    if k in ("add", "sub", "mul", "div"):
        a = evaluate(node.children[0], ctx)
        b = evaluate(node.children[1], ctx)
        if isinstance(a, tuple) and not _is_matrix(a) or isinstance(b, tuple) and not _is_matrix(b):
            raise _err(node, "arithmetic on tuples is not defined")
        return _binary(k, a, b, node, ctx)
    if k == "pow":
        v = evaluate(node.children[0], ctx)
        e = node.value
        if _is_matrix(v):
            return linalg.power(v, e)
        if isinstance(v, (CycRational, TruncSeries)):
            return v ** e
        raise _err(node, "only functions, scalars and matrices have powers")
    if k == "inv":
        v = evaluate(node.children[0], ctx)
        if not _is_matrix(v):
            raise _err(node, "'^-1' applies to matrices only", ("integer exponent",))
        return linalg.inverse(v)
    if k == "tuple":
        return tuple(evaluate(c, ctx) for c in node.children)
    if k == "matrix":
        rows = []
        for row in node.children:
            vals = []
            for c in row:
                v = evaluate(c, ctx)
                if not isinstance(v, CycRational):
                    raise _err(c, "matrix entries must be constants")
                vals.append(v)
            rows.append(tuple(vals))
        return tuple(rows)
    raise AssertionError(k)


# -- typed front ends --------------------------------------------------------------

def parse_value(src: str, kind: str, n: int = 1, K: int = 4):
    """Parse and coerce to ``kind``: scalar, series, diffeo, field, matrix or any."""
    ctx = Context(n, K)
    node = parse(src)
    v = evaluate(node, ctx)
    if kind == "any":
        if isinstance(v, _Field):
            return v.to_field(n, K)
        if isinstance(v, tuple) and not _is_matrix(v):
            return _as_diffeo(v, node, ctx)
        return v
    if kind == "scalar":
        if isinstance(v, CycRational):
            return v
        raise _err(node, "expected a constant", ("constant",))
    if kind == "series":
        if isinstance(v, (CycRational, TruncSeries)):
            return _lift(v, ctx)
        raise _err(node, "expected a function", ("function",))
    if kind == "field":
        if isinstance(v, _Field):
            return v.to_field(n, K)
        if isinstance(v, (CycRational, TruncSeries)) and _lift(v, ctx).is_zero():
            return JetVectorField.zero(n, K)
        raise _err(node, "expected a vector field like (x^2)*d/dx", ("vector field",))
    if kind == "diffeo":
        if isinstance(v, TruncSeries) and n == 1:
            v = (v,)
        if isinstance(v, tuple) and not _is_matrix(v):
            return _as_diffeo(v, node, ctx)
        raise _err(node, f"expected a tuple of {n} functions", ("tuple",))
    if kind == "matrix":
        if _is_matrix(v):
            return v
        raise _err(node, "expected a matrix literal [[...], ...]", ("matrix",))
    raise ValueError(f"unknown value kind {kind!r}")


def _as_diffeo(v: tuple, node: Node, ctx: Context) -> JetDiffeo:
    if len(v) != ctx.n:
        raise MismatchError(f"expected {ctx.n} components, got {len(v)}")
    comps = []
    for c in v:
        if isinstance(c, (CycRational, TruncSeries)):
            comps.append(_lift(c, ctx))
        else:
            raise _err(node, "diffeomorphism components must be functions", ("function",))
    return JetDiffeo(comps)


