"""Small arithmetic expression language for scalar functions of x1..xn.

Grammar (highest precedence first):

    unary minus          -u          (binds tighter than ^)
    power                u ^ v       (right associative)
    product / quotient   u * v, u / v
    sum / difference     u + v, u - v

Functions: sin, cos, exp, log, sqrt, abs, min, max, pow. Variables are
written x1..xn (1-based). No implicit multiplication.

Evaluation supports plain values and forward-mode dual numbers, giving
exact directional derivatives <grad f(x), d>. Nondifferentiable points of
abs/min/max (exact ties) propagate the first branch's derivative and set
a flag.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParseError",
    "EvalError",
    "Const",
    "Var",
    "Unary",
    "Binary",
    "Call",
    "parse",
    "pretty_print",
    "eval_expr",
    "eval_dual",
    "eval_batch",
    "grad_batch",
    "DualResult",
]

FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
    "pow": 2,
}


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.message = message
        self.pos = pos


class EvalError(ArithmeticError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.message = message
        self.pos = pos


# ---------------------------------------------------------------------------
# AST nodes


@dataclass(frozen=True)
class Const:
    value: float
    pos: int = 0


@dataclass(frozen=True)
class Var:
    index: int  # 1-based
    pos: int = 0


@dataclass(frozen=True)
class Unary:
    op: str  # only "-"
    child: "Node"
    pos: int = 0


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"
    pos: int = 0


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    pos: int = 0


Node = Const | Var | Unary | Binary | Call


def ast_equal(a: Node, b: Node) -> bool:
    """Structural equality ignoring source positions."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Const):
        return a.value == b.value
    if isinstance(a, Var):
        return a.index == b.index
    if isinstance(a, Unary):
        return a.op == b.op and ast_equal(a.child, b.child)
    if isinstance(a, Binary):
        return a.op == b.op and ast_equal(a.left, b.left) and ast_equal(a.right, b.right)
    if isinstance(a, Call):
        return (
            a.name == b.name
            and len(a.args) == len(b.args)
            and all(ast_equal(p, q) for p, q in zip(a.args, b.args))
        )
    raise TypeError(type(a))


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<number>\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?)
    |(?P<ident>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>[-+*/^])
    |(?P<paren>[()])
    |(?P<comma>,)
    |(?P<ws>\s+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    i = 0
    while i < len(source):
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}", i)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), i))
        i = m.end()
    return tokens


# ---------------------------------------------------------------------------
# Recursive descent parser

_VAR_RE = re.compile(r"^x([1-9]\d*)$")


class _Parser:
    def __init__(self, tokens: list[Token], dimension: int, source_len: int):
        self.tokens = tokens
        self.dim = dimension
        self.i = 0
        self.end = source_len

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Token | None:
        t = self.peek()
        if t is not None:
            self.i += 1
        return t

    def expect(self, text: str, what: str) -> Token:
        t = self.peek()
        if t is None or t.text != text:
            pos = t.pos if t is not None else self.end
            raise ParseError(f"expected {what}", pos)
        return self.next()

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while (t := self.peek()) is not None and t.text in ("+", "-"):
            self.next()
            rhs = self.parse_term()
            node = Binary(t.text, node, rhs, t.pos)
        return node

    def parse_term(self) -> Node:
        node = self.parse_power()
        while (t := self.peek()) is not None and t.text in ("*", "/"):
            self.next()
            rhs = self.parse_power()
            node = Binary(t.text, node, rhs, t.pos)
        return node

    def parse_power(self) -> Node:
        # unary minus binds tighter than ^; ^ is right associative
        base = self.parse_signed()
        t = self.peek()
        if t is not None and t.text == "^":
            self.next()
            exponent = self.parse_power()
            return Binary("^", base, exponent, t.pos)
        return base

    def parse_signed(self) -> Node:
        t = self.peek()
        if t is not None and t.text == "-":
            self.next()
            return Unary("-", self.parse_signed(), t.pos)
        return self.parse_primary()

    def parse_primary(self) -> Node:
        t = self.next()
        if t is None:
            raise ParseError("unexpected end of input", self.end)
        if t.kind == "number":
            return Const(float(t.text), t.pos)
        if t.kind == "paren" and t.text == "(":
            node = self.parse_expr()
            nxt = self.peek()
            if nxt is None or nxt.text != ")":
                raise ParseError("unclosed parenthesis", nxt.pos if nxt else self.end)
            self.next()
            return node
        if t.kind == "ident":
            m = _VAR_RE.match(t.text)
            if m:
                index = int(m.group(1))
                if index > self.dim:
                    raise ParseError(
                        f"variable x{index} exceeds dimension {self.dim}", t.pos
                    )
                return Var(index, t.pos)
            if t.text in FUNCTIONS:
                self.expect("(", f"'(' after {t.text}")
                args = [self.parse_expr()]
                while (nxt := self.peek()) is not None and nxt.text == ",":
                    self.next()
                    args.append(self.parse_expr())
                nxt = self.peek()
                if nxt is None or nxt.text != ")":
                    raise ParseError("unclosed parenthesis", nxt.pos if nxt else self.end)
                self.next()
                arity = FUNCTIONS[t.text]
                if len(args) != arity:
                    raise ParseError(
                        f"{t.text} takes {arity} argument(s), got {len(args)}", t.pos
                    )
                return Call(t.text, tuple(args), t.pos)
            raise ParseError(f"unknown identifier {t.text!r}", t.pos)
        raise ParseError(f"unexpected token {t.text!r}", t.pos)


def parse(source: str, dimension: int) -> Node:
    """Parse `source` into an AST; variables x1..x<dimension> are allowed."""
    if not source or not source.strip():
        raise ParseError("empty expression", 0)
    tokens = tokenize(source)
    parser = _Parser(tokens, dimension, len(source))
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing is not None:
        raise ParseError(f"unexpected token {trailing.text!r}", trailing.pos)
    return node


def max_var_index(e: Node) -> int:
    if isinstance(e, Const):
        return 0
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Unary):
        return max_var_index(e.child)
    if isinstance(e, Binary):
        return max(max_var_index(e.left), max_var_index(e.right))
    return max((max_var_index(a) for a in e.args), default=0)


# ---------------------------------------------------------------------------
# Pretty printer


def _fmt_const(v: float) -> str:
    s = repr(float(v))
    return s


def pretty_print(e: Node) -> str:
    """Fully parenthesized form that reparses to a structurally equal AST.

    Constants are assumed nonnegative (parser output never contains
    negative constants; negation is a Unary node).
    """
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Unary):
        return f"(-{pretty_print(e.child)})"
    if isinstance(e, Binary):
        return f"({pretty_print(e.left)} {e.op} {pretty_print(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(pretty_print(a) for a in e.args)})"
    raise TypeError(type(e))


# ---------------------------------------------------------------------------
# Evaluation

def _int_exponent(node: Node) -> int | None:
    """Constant integer exponent (possibly negated), else None."""
    sign = 1
    while isinstance(node, Unary):
        sign = -sign
        node = node.child
    if isinstance(node, Const) and float(node.value).is_integer():
        return sign * int(node.value)
    return None


def _eval(e: Node, x: np.ndarray, strict: bool):
    """Evaluate over an (..., n) point array. strict=True raises EvalError
    on domain violations; strict=False lets NaN/inf propagate."""
    if isinstance(e, Const):
        return np.broadcast_to(np.float64(e.value), x.shape[:-1]).copy() if x.ndim > 1 else np.float64(e.value)
    if isinstance(e, Var):
        return x[..., e.index - 1]
    if isinstance(e, Unary):
        return -_eval(e.child, x, strict)
    if isinstance(e, Binary):
        a = _eval(e.left, x, strict)
        if e.op == "^":
            return _power(e, a, e.right, x, strict)
        b = _eval(e.right, x, strict)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if strict and np.any(b == 0):
                raise EvalError("division by zero", e.pos)
            return a / b
        raise TypeError(e.op)
    if isinstance(e, Call):
        args = [_eval(a, x, strict) for a in e.args]
        return _call(e, args, strict)
    raise TypeError(type(e))


def _call(e: Call, args, strict: bool):
    a = args[0]
    if e.name == "sin":
        return np.sin(a)
    if e.name == "cos":
        return np.cos(a)
    if e.name == "exp":
        return np.exp(a)
    if e.name == "log":
        if strict and np.any(a <= 0):
            raise EvalError("log of non-positive value", e.pos)
        return np.log(a)
    if e.name == "sqrt":
        if strict and np.any(a < 0):
            raise EvalError("sqrt of negative value", e.pos)
        return np.sqrt(a)
    if e.name == "abs":
        return np.abs(a)
    b = args[1]
    if e.name == "min":
        return np.minimum(a, b)
    if e.name == "max":
        return np.maximum(a, b)
    if e.name == "pow":
        if strict and np.any(a <= 0):
            raise EvalError("pow requires positive base", e.pos)
        with np.errstate(invalid="ignore"):
            return np.power(np.where(a > 0, a, np.nan), b)
    raise TypeError(e.name)


def _power(node: Binary, base_val, exp_node: Node, x, strict: bool):
    """`^` with the restriction: non-integer exponents need a positive base."""
    k = _int_exponent(exp_node)
    if k is not None:
        if k < 0 and strict and np.any(base_val == 0):
            raise EvalError("zero raised to a negative power", node.pos)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.power(base_val, float(k))
    e_val = _eval(exp_node, x, strict)
    if strict and np.any(base_val <= 0):
        raise EvalError("non-integer power of non-positive base", node.pos)
    with np.errstate(invalid="ignore", divide="ignore"):
        safe = np.where(base_val > 0, base_val, np.nan)
        return np.power(safe, e_val)


def _power_dual(node: Binary, base_val, base_der, x, strict: bool, d):
    """Dual-number `^`: constant integer exponent uses the power rule,
    anything else requires a positive base."""
    exp_node = node.right
    k = _int_exponent(exp_node)
    if k is not None:
        if k < 0 and strict and np.any(base_val == 0):
            raise EvalError("zero raised to a negative power", node.pos)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.power(base_val, float(k))
            if k == 0:
                der = np.zeros_like(np.asarray(base_der, dtype=float))
            else:
                der = float(k) * np.power(base_val, float(k - 1)) * base_der
            return val, der
    e_val, e_der, _ = _eval_dual_node(exp_node, x, strict, d)
    if strict and np.any(base_val <= 0):
        raise EvalError("non-integer power of non-positive base", node.pos)
    with np.errstate(invalid="ignore", divide="ignore"):
        safe = np.where(base_val > 0, base_val, np.nan)
        val = np.power(safe, e_val)
        der = val * (e_der * np.log(safe) + e_val * base_der / safe)
        return val, der


def eval_expr(e: Node, x) -> float:
    """Strict scalar evaluation; raises EvalError with the node position."""
    x = np.asarray(x, dtype=float)
    val = _eval(e, x, strict=True)
    return float(val)


def eval_batch(e: Node, X: np.ndarray) -> np.ndarray:
    """Vectorized evaluation over (..., n) points; invalid points yield NaN."""
    with np.errstate(all="ignore"):
        out = _eval(e, np.asarray(X, dtype=float), strict=False)
    return np.asarray(out, dtype=float)


@dataclass(frozen=True)
class DualResult:
    value: float
    deriv: float
    nondiff: bool


def _eval_dual_node(e: Node, x: np.ndarray, strict: bool, d):
    """Returns (value, deriv, nondiff_flag) arrays; `d` is the direction,
    broadcastable against x."""
    if isinstance(e, Const):
        z = np.zeros(np.shape(x)[:-1])
        return np.full_like(z, e.value, dtype=float), z, np.zeros_like(z, dtype=bool)
    if isinstance(e, Var):
        val = np.asarray(x[..., e.index - 1], dtype=float)
        der = np.broadcast_to(np.asarray(d)[..., e.index - 1], val.shape).astype(float)
        return val, der, np.zeros_like(val, dtype=bool)
    if isinstance(e, Unary):
        v, dv, fl = _eval_dual_node(e.child, x, strict, d)
        return -v, -dv, fl
    if isinstance(e, Binary):
        if e.op == "^":
            av, ad, afl = _eval_dual_node(e.left, x, strict, d)
            val, der = _power_dual(e, av, ad, x, strict, d)
            return val, der, afl
        av, ad, afl = _eval_dual_node(e.left, x, strict, d)
        bv, bd, bfl = _eval_dual_node(e.right, x, strict, d)
        fl = afl | bfl
        if e.op == "+":
            return av + bv, ad + bd, fl
        if e.op == "-":
            return av - bv, ad - bd, fl
        if e.op == "*":
            return av * bv, ad * bv + av * bd, fl
        if e.op == "/":
            if strict and np.any(bv == 0):
                raise EvalError("division by zero", e.pos)
            with np.errstate(divide="ignore", invalid="ignore"):
                return av / bv, (ad * bv - av * bd) / (bv * bv), fl
        raise TypeError(e.op)
    if isinstance(e, Call):
        av, ad, afl = _eval_dual_node(e.args[0], x, strict, d)
        if e.name == "sin":
            return np.sin(av), np.cos(av) * ad, afl
        if e.name == "cos":
            return np.cos(av), -np.sin(av) * ad, afl
        if e.name == "exp":
            ev = np.exp(av)
            return ev, ev * ad, afl
        if e.name == "log":
            if strict and np.any(av <= 0):
                raise EvalError("log of non-positive value", e.pos)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.log(av), ad / av, afl
        if e.name == "sqrt":
            if strict and np.any(av < 0):
                raise EvalError("sqrt of negative value", e.pos)
            with np.errstate(divide="ignore", invalid="ignore"):
                sv = np.sqrt(av)
                return sv, ad / (2.0 * sv), afl
        if e.name == "abs":
            # tie at 0: keep the +branch derivative and flag
            tie = av == 0
            der = np.where(av >= 0, ad, -ad)
            return np.abs(av), der, afl | tie
        bv, bd, bfl = _eval_dual_node(e.args[1], x, strict, d)
        fl = afl | bfl
        if e.name == "min":
            tie = av == bv
            pick_a = av <= bv
            return np.minimum(av, bv), np.where(pick_a, ad, bd), fl | tie
        if e.name == "max":
            tie = av == bv
            pick_a = av >= bv
            return np.maximum(av, bv), np.where(pick_a, ad, bd), fl | tie
        if e.name == "pow":
            if strict and np.any(av <= 0):
                raise EvalError("pow requires positive base", e.pos)
            with np.errstate(invalid="ignore", divide="ignore"):
                safe = np.where(av > 0, av, np.nan)
                val = np.power(safe, bv)
                der = val * (bd * np.log(safe) + bv * ad / safe)
            return val, der, fl
        raise TypeError(e.name)
    raise TypeError(type(e))


def eval_dual(e: Node, x, d) -> DualResult:
    """Value and directional derivative <grad f(x), d> at a point, strict."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    if x.shape != d.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {d.shape}")
    val, der, flag = _eval_dual_node(e, x, strict=True, d=d)
    return DualResult(float(val), float(der), bool(flag))


def eval_dual_batch(e: Node, X: np.ndarray, d: np.ndarray):
    """Vectorized dual evaluation: (values, derivs, nondiff_mask)."""
    X = np.asarray(X, dtype=float)
    with np.errstate(all="ignore"):
        val, der, flag = _eval_dual_node(e, X, strict=False, d=np.asarray(d, dtype=float))
    return np.asarray(val, dtype=float), np.asarray(der, dtype=float), np.asarray(flag, dtype=bool)


def grad_batch(e: Node, X: np.ndarray, dimension: int):
    """Gradient at each row of X via `dimension` dual passes.

    Returns (grads, nondiff_mask); grads has shape X.shape, mask X.shape[:-1].
    """
    X = np.asarray(X, dtype=float)
    grads = np.empty_like(X)
    mask = np.zeros(X.shape[:-1], dtype=bool)
    for i in range(dimension):
        d = np.zeros(dimension)
        d[i] = 1.0
        _, der, flag = eval_dual_batch(e, X, d)
        grads[..., i] = der
        mask |= flag
    return grads, mask
