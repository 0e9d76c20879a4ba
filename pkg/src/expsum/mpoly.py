"""Sparse multivariate polynomials over F_q.

Coefficients are stored as field codes (see :mod:`expsum.ff`); the public
accessors hand out :class:`FieldElement` values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .ff import FieldElement, FieldSpec, extension

Monomial = tuple[int, ...]

EXPONENT_LIMIT = 2 ** 31 - 1


class PolyError(ValueError):
    pass


class ParseError(PolyError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


# --- term orders; each key is increasing in the order


def _grevlex_key(m: Monomial):
    return (sum(m), tuple(-e for e in reversed(m)))


def _grlex_key(m: Monomial):
    return (sum(m), m)


def _lex_key(m: Monomial):
    return m


@dataclass(frozen=True)
class TermOrder:
    kind: str = "grevlex"
    perm: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "grlex"):
            raise PolyError(f"unknown term order {self.kind!r}")

    def key(self, m: Monomial):
        if self.perm is not None:
            m = tuple(m[j] for j in self.perm)
        if self.kind == "grevlex":
            return _grevlex_key(m)
        if self.kind == "lex":
            return _lex_key(m)
        return _grlex_key(m)


GREVLEX = TermOrder("grevlex")
LEX = TermOrder("lex")


class MultiPoly:
    """Polynomial in x1..xn over ``field``; ``terms`` maps exponent tuples to nonzero codes."""

    __slots__ = ("n", "field", "terms")

    def __init__(self, n: int, field: FieldSpec, terms: Mapping[Monomial, int] | None = None):
        self.n = n
        self.field = field
        clean: dict[Monomial, int] = {}
        if terms:
            for m, c in terms.items():
                if len(m) != n:
                    raise PolyError(f"monomial {m} has wrong length for n={n}")
                if c:
                    if any(e < 0 or e > EXPONENT_LIMIT for e in m):
                        raise PolyError(f"exponent out of range in {m}")
                    clean[tuple(m)] = c
        self.terms = clean

    # --- constructors

    @classmethod
    def zero(cls, n: int, field: FieldSpec) -> MultiPoly:
        return cls(n, field)

    @classmethod
    def constant(cls, n: int, field: FieldSpec, c: int | FieldElement) -> MultiPoly:
        code = c.code if isinstance(c, FieldElement) else field.from_int(c)
        return cls(n, field, {(0,) * n: code})

    @classmethod
    def var(cls, n: int, field: FieldSpec, i: int) -> MultiPoly:
        """The variable x_i, 1-based."""
        if not 1 <= i <= n:
            raise PolyError(f"variable index {i} out of range 1..{n}")
        m = [0] * n
        m[i - 1] = 1
        return cls(n, field, {tuple(m): 1})

    @classmethod
    def monomial(cls, n: int, field: FieldSpec, m: Monomial, c: int = 1) -> MultiPoly:
        return cls(n, field, {tuple(m): c})

    # --- basic queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def coeff(self, m: Monomial) -> FieldElement:
        return FieldElement(self.field, self.terms.get(tuple(m), 0))

    def sorted_terms(self, order: TermOrder = GREVLEX) -> list[tuple[Monomial, int]]:
        """Terms in descending order."""
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading(self, order: TermOrder = GREVLEX) -> tuple[Monomial, int]:
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        return max(self.terms.items(), key=lambda t: order.key(t[0]))

    def _check(self, other: MultiPoly):
        if self.n != other.n or self.field is not other.field:
            raise PolyError("polynomials live in different rings")

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.n == other.n and self.field is other.field and self.terms == other.terms
        if isinstance(other, int):
            return self == MultiPoly.constant(self.n, self.field, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    # --- ring operations

    def _lift(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, FieldElement)):
            return MultiPoly.constant(self.n, self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        F = self.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = F.add(out.get(m, 0), c)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return MultiPoly(self.n, F, out)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        F = self.field
        return MultiPoly(self.n, F, {m: F.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        F = self.field
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = F.add(out.get(m, 0), F.mul(c1, c2))
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return MultiPoly(self.n, F, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> MultiPoly:
        if e < 0:
            raise PolyError("negative power of a polynomial")
        acc = MultiPoly.constant(self.n, self.field, 1)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def scale(self, c: int) -> MultiPoly:
        """Multiply by the field element coded c."""
        F = self.field
        if c == 0:
            return MultiPoly(self.n, F)
        return MultiPoly(self.n, F, {m: F.mul(v, c) for m, v in self.terms.items()})

    def shift(self, m: Monomial, c: int = 1) -> MultiPoly:
        """Multiply by c * x^m."""
        F = self.field
        return MultiPoly(self.n, F, {tuple(a + b for a, b in zip(k, m)): F.mul(v, c)
                                     for k, v in self.terms.items()})

    def monic(self, order: TermOrder = GREVLEX) -> MultiPoly:
        _, c = self.leading(order)
        return self.scale(self.field.inv(c))

    def map_coeffs(self, fn: Callable[[int], int], field: FieldSpec) -> MultiPoly:
        return MultiPoly(self.n, field, {m: fn(c) for m, c in self.terms.items()})

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"MultiPoly({format_poly(self)!r}, n={self.n}, field={self.field!r})"


# --- printing and parsing


def _format_coeff(field: FieldSpec, c: int) -> str:
    if field.a == 1:
        return str(c)
    parts = []
    for j, d in reversed(list(enumerate(field.digits(c)))):
        if d == 0:
            continue
        g = "" if j == 0 else ("g" if j == 1 else f"g^{j}")
        if not g:
            parts.append(str(d))
        elif d == 1:
            parts.append(g)
        else:
            parts.append(f"{d}*{g}")
    s = " + ".join(parts)
    return s if len(parts) == 1 else f"({s})"


def format_poly(f: MultiPoly, order: TermOrder = GREVLEX) -> str:
    """Canonical text: descending term order, explicit ``*`` and ``^``."""
    if not f.terms:
        return "0"
    out = []
    for m, c in f.sorted_terms(order):
        factors = []
        for i, e in enumerate(m):
            if e == 1:
                factors.append(f"x{i + 1}")
            elif e > 1:
                factors.append(f"x{i + 1}^{e}")
        cs = _format_coeff(f.field, c)
        if not factors:
            out.append(cs)
        elif c == 1:
            out.append("*".join(factors))
        else:
            out.append("*".join([cs] + factors))
    return " + ".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|(x)(\d+)|(g)|(\*\*|[-+*^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}",
                             pos + len(text[pos:]) - len(text[pos:].lstrip()))
        start = m.start(0) + len(m.group(0)) - len(m.group(0).lstrip())
        if m.group(1) is not None:
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2) is not None:
            toks.append(("var", int(m.group(3)), start))
        elif m.group(4) is not None:
            toks.append(("gen", None, start))
        else:
            op = m.group(5)
            toks.append(("op", "^" if op == "**" else op, start))
        pos = m.end(0)
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, n: int, field: FieldSpec):
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n
        self.field = field

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])

    def parse(self) -> MultiPoly:
        f = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError("unexpected trailing input", t[2])
        return f

    def expr(self) -> MultiPoly:
        sign = None
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = t[1]
        acc = self.term()
        if sign == "-":
            acc = -acc
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    def term(self) -> MultiPoly:
        acc = self.power()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                acc = acc * self.power()
            elif t[0] in ("num", "var", "gen") or (t[0] == "op" and t[1] == "("):
                acc = acc * self.power()  # implicit multiplication, e.g. 2x1
            else:
                return acc

    def power(self) -> MultiPoly:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                raise ParseError("exponent must be a non-negative integer", e[2])
            if e[1] > EXPONENT_LIMIT:
                raise ParseError("exponent exceeds 32-bit range", e[2])
            return base ** e[1]
        return base

    def atom(self) -> MultiPoly:
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return MultiPoly.constant(self.n, self.field, val)
        if kind == "var":
            if not 1 <= val <= self.n:
                raise ParseError(f"variable x{val} out of range 1..{self.n}", pos)
            return MultiPoly.var(self.n, self.field, val)
        if kind == "gen":
            if self.field.a == 1:
                raise ParseError("generator g only exists for a > 1", pos)
            return MultiPoly(self.n, self.field, {(0,) * self.n: self.field.p})
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "op" and val == "-":
            return -self.power()
        raise ParseError("expected a number, variable or '('", pos)


def parse(text: str, n: int, field: FieldSpec) -> MultiPoly:
    """Parse ``text`` in variables x1..xn; integers reduce into F_p, ``g`` is the field generator."""
    return _Parser(text, n, field).parse()


# --- homogeneous structure and calculus


@dataclass
class HomogDecomp:
    parts: list[MultiPoly]
    delta: int
    delta_prime: int | None

    @property
    def top(self) -> MultiPoly:
        return self.parts[self.delta]

    @property
    def second(self) -> MultiPoly | None:
        return None if self.delta_prime is None else self.parts[self.delta_prime]


def homogeneous_parts(f: MultiPoly) -> HomogDecomp:
    if f.is_zero():
        raise PolyError("zero polynomial has no homogeneous decomposition")
    delta = f.degree
    buckets: list[dict] = [dict() for _ in range(delta + 1)]
    for m, c in f.terms.items():
        buckets[sum(m)][m] = c
    parts = [MultiPoly(f.n, f.field, b) for b in buckets]
    # degree 0 is not a valid delta'; constants never enter df
    dprime = next((j for j in range(delta - 1, 0, -1) if parts[j]), None)
    return HomogDecomp(parts, delta, dprime)


def partial_derivative(f: MultiPoly, i: int) -> MultiPoly:
    """d f / d x_i, 1-based."""
    if not 1 <= i <= f.n:
        raise PolyError(f"variable index {i} out of range 1..{f.n}")
    F = f.field
    out = {}
    k = i - 1
    for m, c in f.terms.items():
        e = m[k]
        if e % F.p == 0:
            continue
        v = F.mul(F.from_int(e), c)
        mm = list(m)
        mm[k] -= 1
        out[tuple(mm)] = v
    return MultiPoly(f.n, F, out)


def gradient(f: MultiPoly) -> list[MultiPoly]:
    return [partial_derivative(f, i) for i in range(1, f.n + 1)]


def _embedding_for(f: MultiPoly, target: FieldSpec) -> Callable[[int], int]:
    if target is f.field:
        return lambda c: c
    src = f.field
    if target.p != src.p or target.a % src.a:
        raise PolyError("evaluation point is not in an extension of the coefficient field")
    ext = extension(src, target.a // src.a)
    if ext.field is not target:
        raise PolyError("evaluation point is not in the canonical extension")
    table = ext.embed_table
    return lambda c: table[c]


def evaluate(f: MultiPoly, point: Sequence[FieldElement]) -> FieldElement:
    """f(point) with point coordinates in F_q or one of its canonical extensions."""
    if len(point) != f.n:
        raise PolyError(f"point has {len(point)} coordinates, polynomial has {f.n} variables")
    if f.n == 0:
        target = f.field
    else:
        target = point[0].field
        if any(x.field is not target for x in point):
            raise PolyError("point coordinates lie in different fields")
    emb = _embedding_for(f, target)
    F = target
    codes = [x.code for x in point]
    powers: list[dict[int, int]] = [dict() for _ in codes]
    acc = 0
    for m, c in f.terms.items():
        v = emb(c)
        for j, e in enumerate(m):
            if e:
                pw = powers[j].get(e)
                if pw is None:
                    pw = powers[j][e] = F.pow(codes[j], e)
                v = F.mul(v, pw)
                if v == 0:
                    break
        acc = F.add(acc, v)
    return FieldElement(F, acc)


def substitute(f: MultiPoly, images: Sequence[MultiPoly]) -> MultiPoly:
    """f(images[0], ..., images[n-1]); images share a ring."""
    if len(images) != f.n:
        raise PolyError("need one image per variable")
    tgt = images[0]
    out = MultiPoly(tgt.n, tgt.field)
    for m, c in f.terms.items():
        t = MultiPoly.constant(tgt.n, tgt.field, FieldElement(tgt.field, c))
        for img, e in zip(images, m):
            if e:
                t = t * img ** e
        out = out + t
    return out


def product(polys: Iterable[MultiPoly], n: int, field: FieldSpec) -> MultiPoly:
    acc = MultiPoly.constant(n, field, 1)
    for g in polys:
        acc = acc * g
    return acc
