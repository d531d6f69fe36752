"""Expression language with exact forward-mode derivatives.

Problem definitions (velocity-component functions, initial data, potentials)
are written in a small infix language::

    -atanh(u) + 2*atanh(v)
    exp(-x^2 - 2*y^2)

Grammar (standard precedence, ``^`` right-associative, unary minus binds
below ``^`` so that ``-u^2`` means ``-(u^2)``)::

    expression := term (('+'|'-') term)*
    term       := unary (('*'|'/') unary)*
    unary      := ('-'|'+') unary | power
    power      := atom ('^' unary)?
    atom       := NUMBER | NAME | NAME '(' expression ')' | '(' expression ')'

Supported functions: tanh, atanh, exp, log, sqrt, sin, cos, abs.

Derivatives are exact, computed with truncated Taylor jets (forward-mode
dual numbers carrying gradient, Hessian and, when requested, third-order
terms).  Jets broadcast over numpy arrays, so lattice evaluations of values
and Jacobians are vectorized.  Domain violations (atanh at |x| >= 1, log of
a non-positive number, ...) raise :class:`EvalDomainError` naming the
offending sub-expression instead of propagating NaNs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class ExprError(Exception):
    """Base class for expression-language errors."""


class ParseError(ExprError):
    """Syntax error; ``offset`` is the byte offset into the source text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"syntax error at offset {offset}: {message}")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    """An identifier that is neither a declared variable nor a function."""


class FunctionArityError(ParseError):
    """A function called with the wrong number of arguments."""


class EvalDomainError(ExprError):
    """Evaluation left the domain of a sub-expression (or overflowed)."""

    def __init__(self, reason: str, where: str):
        super().__init__(f"{reason} in '{where}'")
        self.reason = reason
        self.where = where


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Add:
    a: object
    b: object


@dataclass(frozen=True)
class Sub:
    a: object
    b: object


@dataclass(frozen=True)
class Mul:
    a: object
    b: object


@dataclass(frozen=True)
class Div:
    a: object
    b: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


FUNCTION_NAMES = ("tanh", "atanh", "exp", "log", "sqrt", "sin", "cos", "abs")


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []  # (kind, value, offset)
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0
        self.var_index = {name: i for i, name in enumerate(variables)}

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, op):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", off)
        return self.advance()

    def parse(self):
        node = self.expression()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", off)
        return node

    def expression(self):
        node = self.term()
        while True:
            kind, val, off = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                node = Add(node, rhs) if val == "+" else Sub(node, rhs)
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, val, off = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.unary()
                node = Mul(node, rhs) if val == "*" else Div(node, rhs)
            else:
                return node

    def unary(self):
        kind, val, off = self.peek()
        if kind == "op" and val in "+-":
            self.advance()
            node = self.unary()
            return node if val == "+" else Neg(node)
        return self.power()

    def power(self):
        node = self.atom()
        kind, val, off = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            exponent = self.unary()  # right-associative; allows 2^-3
            return Pow(node, exponent)
        return node

    def atom(self):
        kind, val, off = self.advance()
        if kind == "number":
            return Num(float(val))
        if kind == "name":
            nxt_kind, nxt_val, _ = self.peek()
            if nxt_kind == "op" and nxt_val == "(":
                if val not in FUNCTION_NAMES:
                    raise UnknownIdentifierError(f"unknown function {val!r}", off)
                self.advance()
                arg = self.expression()
                k2, v2, off2 = self.peek()
                if k2 == "op" and v2 == ",":
                    raise FunctionArityError(
                        f"function {val!r} takes exactly one argument", off2
                    )
                self.expect_op(")")
                return Call(val, arg)
            if val not in self.var_index:
                raise UnknownIdentifierError(f"unknown identifier {val!r}", off)
            return Var(self.var_index[val])
        if kind == "op" and val == "(":
            node = self.expression()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected {val!r}" if val else "unexpected end of input", off)


# ---------------------------------------------------------------------------
# Printing (minimal parentheses; parse(print(parse(s))) is the identity)

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _node_prec(node):
    if isinstance(node, (Num, Var, Call)):
        return _PREC_ATOM
    if isinstance(node, Pow):
        return _PREC_POW
    if isinstance(node, Neg):
        return _PREC_UNARY
    if isinstance(node, (Mul, Div)):
        return _PREC_MUL
    return _PREC_ADD


def _to_text(node, variables, required):
    prec = _node_prec(node)
    if isinstance(node, Num):
        s = repr(node.value)
    elif isinstance(node, Var):
        s = variables[node.index]
    elif isinstance(node, Call):
        s = f"{node.func}({_to_text(node.arg, variables, _PREC_ADD)})"
    elif isinstance(node, Neg):
        s = "-" + _to_text(node.arg, variables, _PREC_UNARY)
    elif isinstance(node, Add):
        s = _to_text(node.a, variables, _PREC_ADD) + " + " + _to_text(node.b, variables, _PREC_MUL)
    elif isinstance(node, Sub):
        s = _to_text(node.a, variables, _PREC_ADD) + " - " + _to_text(node.b, variables, _PREC_MUL)
    elif isinstance(node, Mul):
        s = _to_text(node.a, variables, _PREC_MUL) + "*" + _to_text(node.b, variables, _PREC_UNARY)
    elif isinstance(node, Div):
        s = _to_text(node.a, variables, _PREC_MUL) + "/" + _to_text(node.b, variables, _PREC_UNARY)
    elif isinstance(node, Pow):
        s = (
            _to_text(node.base, variables, _PREC_ATOM)
            + "^"
            + _to_text(node.exponent, variables, _PREC_UNARY)
        )
    else:
        raise TypeError(f"not an AST node: {node!r}")
    if prec < required:
        return "(" + s + ")"
    return s


# ---------------------------------------------------------------------------
# Scalar function table: value, domain checks, derivatives up to third order

def _tanh_derivs(x, order):
    th = np.tanh(x)
    f1 = 1.0 - th * th
    out = [th, f1]
    if order >= 2:
        out.append(-2.0 * th * f1)
    if order >= 3:
        out.append(-2.0 * f1 * (1.0 - 3.0 * th * th))
    return out


def _atanh_derivs(x, order):
    w = 1.0 / (1.0 - x * x)
    out = [np.arctanh(x), w]
    if order >= 2:
        out.append(2.0 * x * w * w)
    if order >= 3:
        out.append((2.0 + 6.0 * x * x) * w * w * w)
    return out


def _exp_derivs(x, order):
    e = np.exp(x)
    return [e] * (order + 1)


def _log_derivs(x, order):
    out = [np.log(x), 1.0 / x]
    if order >= 2:
        out.append(-1.0 / (x * x))
    if order >= 3:
        out.append(2.0 / (x * x * x))
    return out


def _sqrt_derivs(x, order):
    s = np.sqrt(x)
    out = [s, 0.5 / s]
    if order >= 2:
        out.append(-0.25 / (s * x))
    if order >= 3:
        out.append(0.375 / (s * x * x))
    return out


def _sin_derivs(x, order):
    s, c = np.sin(x), np.cos(x)
    return [s, c, -s, -c][: order + 1]


def _cos_derivs(x, order):
    s, c = np.sin(x), np.cos(x)
    return [c, -s, -c, s][: order + 1]


def _abs_derivs(x, order):
    sg = np.sign(x)
    out = [np.abs(x), sg]
    while len(out) < order + 1:
        out.append(np.zeros_like(np.asarray(x, dtype=float)))
    return out


def _recip_derivs(x, order):
    w = 1.0 / x
    out = [w, -w * w]
    if order >= 2:
        out.append(2.0 * w * w * w)
    if order >= 3:
        out.append(-6.0 * w * w * w * w)
    return out


# (derivs, value-domain check, derivative-domain check); checks return a
# human-readable reason when violated, else None.
def _check_atanh(x, order):
    if np.any(np.abs(x) >= 1.0):
        return "atanh argument with |x| >= 1"
    return None


def _check_log(x, order):
    if np.any(x <= 0.0):
        return "log of a non-positive number"
    return None


def _check_sqrt(x, order):
    if np.any(x < 0.0):
        return "sqrt of a negative number"
    if order >= 1 and np.any(x == 0.0):
        return "derivative of sqrt at 0"
    return None


def _check_abs(x, order):
    if order >= 1 and np.any(x == 0.0):
        return "derivative of abs at 0"
    return None


_FUNCS: dict[str, tuple[Callable, Callable]] = {
    "tanh": (_tanh_derivs, lambda x, order: None),
    "atanh": (_atanh_derivs, _check_atanh),
    "exp": (_exp_derivs, lambda x, order: None),
    "log": (_log_derivs, _check_log),
    "sqrt": (_sqrt_derivs, _check_sqrt),
    "sin": (_sin_derivs, lambda x, order: None),
    "cos": (_cos_derivs, lambda x, order: None),
    "abs": (_abs_derivs, _check_abs),
}


# ---------------------------------------------------------------------------
# Truncated Taylor jets

class Jet:
    """Value plus derivative blocks of orders 1..3 w.r.t. n variables.

    ``v`` has an arbitrary broadcast shape S; ``g`` is (n,)+S, ``h`` is
    (n,n)+S and ``t3`` is (n,n,n)+S.  ``h`` and ``t3`` are ``None`` below
    the requested order.  All blocks for symmetric index groups are built
    from commutative sums of identical products, so Hessians (and third
    blocks) are symmetric bitwise.
    """

    __slots__ = ("v", "g", "h", "t3")

    def __init__(self, v, g, h=None, t3=None):
        self.v = v
        self.g = g
        self.h = h
        self.t3 = t3

    @property
    def order(self):
        return 1 if self.h is None else (2 if self.t3 is None else 3)

    @staticmethod
    def constant(value, n, order, shape=()):
        v = np.broadcast_to(np.asarray(value, dtype=float), shape).copy() if shape else float(value)
        g = np.zeros((n,) + shape)
        h = np.zeros((n, n) + shape) if order >= 2 else None
        t3 = np.zeros((n, n, n) + shape) if order >= 3 else None
        return Jet(v, g, h, t3)

    @staticmethod
    def variable(value, index, n, order, shape=()):
        jet = Jet.constant(value, n, order, shape)
        jet.g[index] = 1.0
        return jet

    def __neg__(self):
        return Jet(
            -self.v,
            -self.g,
            None if self.h is None else -self.h,
            None if self.t3 is None else -self.t3,
        )

    def __add__(self, other):
        return Jet(
            self.v + other.v,
            self.g + other.g,
            None if self.h is None else self.h + other.h,
            None if self.t3 is None else self.t3 + other.t3,
        )

    def __sub__(self, other):
        return Jet(
            self.v - other.v,
            self.g - other.g,
            None if self.h is None else self.h - other.h,
            None if self.t3 is None else self.t3 - other.t3,
        )

    def __mul__(self, other):
        a, b = self, other
        v = a.v * b.v
        g = a.g * b.v + b.g * a.v
        h = t3 = None
        if a.h is not None:
            gg = np.einsum("i...,j...->ij...", a.g, b.g)
            h = a.h * b.v + b.h * a.v + gg + np.swapaxes(gg, 0, 1)
        if a.t3 is not None:
            gh_ab = np.einsum("i...,jk...->ijk...", a.g, b.h)
            gh_ba = np.einsum("i...,jk...->ijk...", b.g, a.h)
            t3 = a.t3 * b.v + b.t3 * a.v
            for blk in (gh_ab, gh_ba):
                t3 = t3 + blk + np.moveaxis(blk, 0, 1) + np.moveaxis(blk, 0, 2)
        return Jet(v, g, h, t3)

    def apply(self, derivs):
        """Chain rule for a scalar function given [f, f', f'', f'''](v)."""
        f0, f1 = derivs[0], derivs[1]
        v = f0
        g = f1 * self.g
        h = t3 = None
        if self.h is not None:
            f2 = derivs[2]
            gg = np.einsum("i...,j...->ij...", self.g, self.g)
            h = f1 * self.h + f2 * gg
        if self.t3 is not None:
            f2, f3 = derivs[2], derivs[3]
            gh = np.einsum("i...,jk...->ijk...", self.g, self.h)
            ggg = np.einsum("i...,jk...->ijk...", self.g, gg)
            t3 = f1 * self.t3 + f3 * ggg
            t3 = t3 + f2 * (gh + np.moveaxis(gh, 0, 1) + np.moveaxis(gh, 0, 2))
        return Jet(v, g, h, t3)


# ---------------------------------------------------------------------------
# Evaluation

def _node_text(node, variables):
    return _to_text(node, variables, _PREC_ADD)


# Scalar fast path for values-with-gradients: plain Python floats beat tiny
# numpy arrays by an order of magnitude, and single-point gradients sit in
# the inner loop of every search.

def _scalar_tanh(x):
    v = math.tanh(x)
    return v, 1.0 - v * v


def _scalar_atanh(x):
    return math.atanh(x), 1.0 / (1.0 - x * x)


def _scalar_exp(x):
    v = math.exp(x)
    return v, v


def _scalar_log(x):
    return math.log(x), 1.0 / x


def _scalar_sqrt(x):
    v = math.sqrt(x)
    return v, 0.5 / v


def _scalar_sin(x):
    return math.sin(x), math.cos(x)


def _scalar_cos(x):
    return math.cos(x), -math.sin(x)


def _scalar_abs(x):
    return abs(x), math.copysign(1.0, x)


_SCALAR_FUNCS = {
    "tanh": (_scalar_tanh, None),
    "atanh": (_scalar_atanh, lambda x: "atanh argument with |x| >= 1" if abs(x) >= 1.0 else None),
    "exp": (_scalar_exp, None),
    "log": (_scalar_log, lambda x: "log of a non-positive number" if x <= 0.0 else None),
    "sqrt": (_scalar_sqrt, lambda x: "sqrt of a non-positive number" if x <= 0.0 else None),
    "sin": (_scalar_sin, None),
    "cos": (_scalar_cos, None),
    "abs": (_scalar_abs, lambda x: "derivative of abs at 0" if x == 0.0 else None),
}


def _eval_grad(node, coords, n, variables):
    """(value, gradient list) of a node at scalar coordinates."""
    if isinstance(node, Num):
        return node.value, [0.0] * n
    if isinstance(node, Var):
        g = [0.0] * n
        g[node.index] = 1.0
        return coords[node.index], g
    if isinstance(node, Neg):
        v, g = _eval_grad(node.arg, coords, n, variables)
        return -v, [-c for c in g]
    if isinstance(node, Add):
        va, ga = _eval_grad(node.a, coords, n, variables)
        vb, gb = _eval_grad(node.b, coords, n, variables)
        return va + vb, [a + b for a, b in zip(ga, gb)]
    if isinstance(node, Sub):
        va, ga = _eval_grad(node.a, coords, n, variables)
        vb, gb = _eval_grad(node.b, coords, n, variables)
        return va - vb, [a - b for a, b in zip(ga, gb)]
    if isinstance(node, Mul):
        va, ga = _eval_grad(node.a, coords, n, variables)
        vb, gb = _eval_grad(node.b, coords, n, variables)
        return va * vb, [a * vb + b * va for a, b in zip(ga, gb)]
    if isinstance(node, Div):
        va, ga = _eval_grad(node.a, coords, n, variables)
        vb, gb = _eval_grad(node.b, coords, n, variables)
        if vb == 0.0:
            _domain(node, variables, "division by zero")
        inv = 1.0 / vb
        v = va * inv
        if not math.isfinite(v):
            _domain(node, variables, "non-finite result")
        return v, [(a - v * b) * inv for a, b in zip(ga, gb)]
    if isinstance(node, Pow):
        vb, gb = _eval_grad(node.base, coords, n, variables)
        exponent = node.exponent
        if isinstance(exponent, Neg) and isinstance(exponent.arg, Num):
            exponent = Num(-exponent.arg.value)
        if isinstance(exponent, Num):
            p = exponent.value
            if float(p).is_integer():
                p = int(p)
                if p == 0:
                    return 1.0, [0.0] * n
                if vb == 0.0 and p < 0:
                    _domain(node, variables, "zero raised to a negative power")
            else:
                if vb < 0.0:
                    _domain(node, variables, "negative base with fractional exponent")
                if vb == 0.0 and p < 1:
                    _domain(node, variables, "fractional power at 0")
            try:
                v = vb**p
                coeff = p * vb ** (p - 1) if (vb != 0.0 or p >= 1) else 0.0
            except OverflowError:
                _domain(node, variables, "non-finite result")
            if not math.isfinite(v):
                _domain(node, variables, "non-finite result")
            return v, [coeff * b for b in gb]
        if vb <= 0.0:
            _domain(node, variables, "non-positive base with variable exponent")
        ve, ge = _eval_grad(node.exponent, coords, n, variables)
        lv = math.log(vb)
        try:
            v = math.exp(ve * lv)
        except OverflowError:
            _domain(node, variables, "non-finite result")
        if not math.isfinite(v):
            _domain(node, variables, "non-finite result")
        return v, [v * (e * lv + ve * b / vb) for e, b in zip(ge, gb)]
    if isinstance(node, Call):
        va, ga = _eval_grad(node.arg, coords, n, variables)
        fn, check = _SCALAR_FUNCS[node.func]
        if check is not None:
            reason = check(va)
            if reason is not None:
                _domain(node, variables, reason)
        try:
            v, f1 = fn(va)
        except (OverflowError, ValueError):
            _domain(node, variables, "non-finite result")
        if not math.isfinite(v):
            _domain(node, variables, "non-finite result")
        return v, [f1 * a for a in ga]
    raise TypeError(f"not an AST node: {node!r}")


def _domain(node, variables, reason):
    raise EvalDomainError(reason, _node_text(node, variables))


def _require_finite(node, variables, value):
    if not np.all(np.isfinite(value)):
        _domain(node, variables, "non-finite result")
    return value


def _pow_const(node, variables, base_jet, p, order):
    # x^p with constant exponent; integer p is valid for any base.
    x = base_jet.v
    p_int = float(p).is_integer()
    if p_int:
        p = int(p)
        if p < 0 and np.any(x == 0.0):
            _domain(node, variables, "zero raised to a negative power")
    else:
        if np.any(x < 0.0):
            _domain(node, variables, "negative base with fractional exponent")
        if np.any(x == 0.0) and (p < order or p <= 0):
            _domain(node, variables, "fractional power at 0")
    derivs = []
    coeff = 1.0
    for k in range(order + 1):
        e = p - k
        if coeff == 0.0:
            derivs.append(np.zeros_like(np.asarray(x, dtype=float)) + 0.0)
        elif e == 0:
            derivs.append(coeff * np.ones_like(np.asarray(x, dtype=float)) + 0.0)
        else:
            derivs.append(coeff * np.power(x, e))
        coeff *= p - k
    return base_jet.apply(derivs)


def _eval_jet(node, coords, n, order, variables, shape):
    if isinstance(node, Num):
        return Jet.constant(node.value, n, order, shape)
    if isinstance(node, Var):
        return Jet.variable(coords[node.index], node.index, n, order, shape)
    if isinstance(node, Neg):
        return -_eval_jet(node.arg, coords, n, order, variables, shape)
    if isinstance(node, Add):
        return _eval_jet(node.a, coords, n, order, variables, shape) + _eval_jet(
            node.b, coords, n, order, variables, shape
        )
    if isinstance(node, Sub):
        return _eval_jet(node.a, coords, n, order, variables, shape) - _eval_jet(
            node.b, coords, n, order, variables, shape
        )
    if isinstance(node, Mul):
        return _eval_jet(node.a, coords, n, order, variables, shape) * _eval_jet(
            node.b, coords, n, order, variables, shape
        )
    if isinstance(node, Div):
        a = _eval_jet(node.a, coords, n, order, variables, shape)
        b = _eval_jet(node.b, coords, n, order, variables, shape)
        if np.any(b.v == 0.0):
            _domain(node, variables, "division by zero")
        out = a * b.apply(_recip_derivs(b.v, order))
        _require_finite(node, variables, out.v)
        return out
    if isinstance(node, Pow):
        base = _eval_jet(node.base, coords, n, order, variables, shape)
        if isinstance(node.exponent, Num):
            out = _pow_const(node, variables, base, node.exponent.value, order)
        elif isinstance(node.exponent, Neg) and isinstance(node.exponent.arg, Num):
            out = _pow_const(node, variables, base, -node.exponent.arg.value, order)
        else:
            if np.any(base.v <= 0.0):
                _domain(node, variables, "non-positive base with variable exponent")
            expo = _eval_jet(node.exponent, coords, n, order, variables, shape)
            out = (expo * base.apply(_log_derivs(base.v, order))).apply(
                _exp_derivs(
                    expo.v * np.log(base.v), order
                )
            )
        _require_finite(node, variables, out.v)
        return out
    if isinstance(node, Call):
        arg = _eval_jet(node.arg, coords, n, order, variables, shape)
        derivs_fn, check = _FUNCS[node.func]
        reason = check(arg.v, order)
        if reason is not None:
            _domain(node, variables, reason)
        out = arg.apply(derivs_fn(arg.v, order))
        _require_finite(node, variables, out.v)
        return out
    raise TypeError(f"not an AST node: {node!r}")


def _eval_value(node, coords, variables):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return coords[node.index]
    if isinstance(node, Neg):
        return -_eval_value(node.arg, coords, variables)
    if isinstance(node, Add):
        return _eval_value(node.a, coords, variables) + _eval_value(node.b, coords, variables)
    if isinstance(node, Sub):
        return _eval_value(node.a, coords, variables) - _eval_value(node.b, coords, variables)
    if isinstance(node, Mul):
        return _eval_value(node.a, coords, variables) * _eval_value(node.b, coords, variables)
    if isinstance(node, Div):
        a = _eval_value(node.a, coords, variables)
        b = _eval_value(node.b, coords, variables)
        if np.any(b == 0.0):
            _domain(node, variables, "division by zero")
        return _require_finite(node, variables, a / b)
    if isinstance(node, Pow):
        x = _eval_value(node.base, coords, variables)
        if isinstance(node.exponent, Num) or (
            isinstance(node.exponent, Neg) and isinstance(node.exponent.arg, Num)
        ):
            p = (
                node.exponent.value
                if isinstance(node.exponent, Num)
                else -node.exponent.arg.value
            )
            if float(p).is_integer():
                if p < 0 and np.any(x == 0.0):
                    _domain(node, variables, "zero raised to a negative power")
                return _require_finite(node, variables, np.power(x, int(p)))
            if np.any(x < 0.0):
                _domain(node, variables, "negative base with fractional exponent")
            if p <= 0 and np.any(x == 0.0):
                _domain(node, variables, "fractional power at 0")
            return _require_finite(node, variables, np.power(x, p))
        if np.any(x <= 0.0):
            _domain(node, variables, "non-positive base with variable exponent")
        p = _eval_value(node.exponent, coords, variables)
        return _require_finite(node, variables, np.exp(p * np.log(x)))
    if isinstance(node, Call):
        x = _eval_value(node.arg, coords, variables)
        derivs_fn, check = _FUNCS[node.func]
        reason = check(x, 0)
        if reason is not None:
            _domain(node, variables, reason)
        return _require_finite(node, variables, derivs_fn(x, 0)[0])
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Public wrappers


@dataclass(frozen=True)
class Expression:
    """A parsed scalar expression in ``arity`` variables."""

    ast: object
    variables: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.variables)

    def _coords(self, point):
        p = np.asarray(point, dtype=float).reshape(-1)
        if p.size != self.arity:
            raise ValueError(f"expected {self.arity} coordinates, got {p.size}")
        return [float(c) for c in p]

    def __call__(self, point) -> float:
        with np.errstate(all="ignore"):
            value = _eval_value(self.ast, self._coords(point), self.variables)
        return float(_require_finite(self.ast, self.variables, value))

    def _jet(self, point, order):
        with np.errstate(all="ignore"):
            return _eval_jet(
                self.ast, self._coords(point), self.arity, order, self.variables, ()
            )

    def gradient(self, point) -> np.ndarray:
        _, g = _eval_grad(self.ast, self._coords(point), self.arity, self.variables)
        return np.array(g)

    def value_and_gradient(self, point) -> tuple:
        v, g = _eval_grad(self.ast, self._coords(point), self.arity, self.variables)
        return float(v), np.array(g)

    def hessian(self, point) -> np.ndarray:
        return np.asarray(self._jet(point, 2).h, dtype=float)

    def third(self, point) -> np.ndarray:
        return np.asarray(self._jet(point, 3).t3, dtype=float)

    def _grid_coords(self, coords):
        arrays = [np.asarray(c, dtype=float) for c in coords]
        if len(arrays) != self.arity:
            raise ValueError(f"expected {self.arity} coordinate arrays")
        shape = np.broadcast_shapes(*(a.shape for a in arrays))
        return [np.broadcast_to(a, shape) for a in arrays], shape

    def eval_grid(self, coords) -> np.ndarray:
        arrays, shape = self._grid_coords(coords)
        with np.errstate(all="ignore"):
            value = _eval_value(self.ast, arrays, self.variables)
        return np.broadcast_to(np.asarray(value, dtype=float), shape)

    def gradient_grid(self, coords) -> np.ndarray:
        arrays, shape = self._grid_coords(coords)
        with np.errstate(all="ignore"):
            jet = _eval_jet(self.ast, arrays, self.arity, 1, self.variables, shape)
        return np.asarray(jet.g, dtype=float)

    def hessian_grid(self, coords) -> np.ndarray:
        arrays, shape = self._grid_coords(coords)
        with np.errstate(all="ignore"):
            jet = _eval_jet(self.ast, arrays, self.arity, 2, self.variables, shape)
        return np.asarray(jet.h, dtype=float)

    def used_variables(self) -> set:
        found = set()

        def walk(node):
            if isinstance(node, Var):
                found.add(node.index)
            elif isinstance(node, (Neg, Call)):
                walk(node.arg)
            elif isinstance(node, Pow):
                walk(node.base)
                walk(node.exponent)
            elif isinstance(node, (Add, Sub, Mul, Div)):
                walk(node.a)
                walk(node.b)

        walk(self.ast)
        return found

    def text(self) -> str:
        return _node_text(self.ast, self.variables)

    def __str__(self) -> str:
        return self.text()


def parse(text: str, variables: Sequence[str]) -> Expression:
    """Parse ``text`` over the given distinct variable names."""
    names = tuple(variables)
    if not names:
        raise ValueError("variables must be nonempty")
    if len(set(names)) != len(names):
        raise ValueError("variable names must be distinct")
    ast = _Parser(text, names).parse()
    return Expression(ast=ast, variables=names)


class VectorFunction:
    """n scalar expressions in n shared variables, with exact derivatives."""

    def __init__(self, components: Sequence[Expression]):
        components = tuple(components)
        if not components:
            raise ValueError("need at least one component")
        variables = components[0].variables
        for c in components:
            if c.variables != variables:
                raise ValueError("components must share one variable list")
        if len(components) != len(variables):
            raise ValueError(
                f"{len(components)} components but {len(variables)} variables; "
                "vector functions are square"
            )
        self.components = components
        self.variables = variables

    @classmethod
    def parse(cls, texts: Sequence[str], variables: Sequence[str]) -> "VectorFunction":
        return cls([parse(t, variables) for t in texts])

    @property
    def arity(self) -> int:
        return len(self.variables)

    def __call__(self, point) -> np.ndarray:
        return np.array([c(point) for c in self.components])

    def jacobian(self, point) -> np.ndarray:
        """Row i is the gradient of component i."""
        coords = self.components[0]._coords(point)
        n = self.arity
        return np.array(
            [_eval_grad(c.ast, coords, n, c.variables)[1] for c in self.components]
        )

    def value_and_jacobian(self, point) -> tuple:
        coords = self.components[0]._coords(point)
        n = self.arity
        pairs = [_eval_grad(c.ast, coords, n, c.variables) for c in self.components]
        return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])

    def hessians(self, point) -> np.ndarray:
        """Shape (n, n, n); entry [i] is the (symmetric) Hessian of component i."""
        return np.stack([c.hessian(point) for c in self.components])

    def eval_grid(self, coords) -> np.ndarray:
        return np.stack([c.eval_grid(coords) for c in self.components])

    def jacobian_grid(self, coords) -> np.ndarray:
        """Shape (n, n) + S for coordinate arrays of broadcast shape S."""
        return np.stack([c.gradient_grid(coords) for c in self.components])

    def __str__(self):
        return "(" + ", ".join(c.text() for c in self.components) + ")"


@dataclass(frozen=True)
class Box:
    """An axis-aligned open box of admissible values.

    ``margin`` is the relative shrink factor applied per axis when sampling
    or gridding; components like atanh diverge on the box boundary, so all
    numeric work stays on the shrunk box.
    """

    lower: tuple
    upper: tuple
    margin: float = 0.02

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if len(lo) != len(hi):
            raise ValueError("lower/upper dimension mismatch")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("need lower_k < upper_k on every axis")
        if not (0.0 < self.margin < 0.5):
            raise ValueError("margin must lie in (0, 0.5)")

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def center(self) -> np.ndarray:
        return (np.asarray(self.lower) + np.asarray(self.upper)) / 2.0

    @property
    def span(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    def inner_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        pad = self.margin * (hi - lo)
        return lo + pad, hi - pad

    def contains(self, point) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p > self.lower) and np.all(p < self.upper))

    def sample(self, rng, count: int) -> np.ndarray:
        lo, hi = self.inner_bounds()
        return rng.uniform(lo, hi, size=(count, self.n))

    def axes(self, nodes: int) -> list[np.ndarray]:
        lo, hi = self.inner_bounds()
        return [np.linspace(lo[k], hi[k], nodes) for k in range(self.n)]
