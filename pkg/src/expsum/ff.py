"""Finite fields F_{p^a} in the polynomial basis.

Elements are coded as integers ``c_0 + c_1 p + ... + c_{a-1} p^{a-1}`` where
``c_0 + c_1 g + ... + c_{a-1} g^{a-1}`` is the element and ``g`` is a root of
the field modulus.  All scalar arithmetic on :class:`FieldSpec` works on these
codes; :class:`FieldElement` is a thin operator-overloading wrapper.
"""

from __future__ import annotations

import functools
from typing import Iterator, Sequence

import numpy as np


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- univariate helpers over F_p; polynomials are coefficient lists, low degree first


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Product of a and b reduced modulo the monic polynomial m."""
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _polymod(prod, m, p)


def _polymod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv_lead % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return _trim(a[:dm] if len(a) > dm else a)


def _polygcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _polymod(a, b, p)
    return a


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Ben-Or test: gcd(x^{p^j} - x, m) = 1 for all j <= deg(m)/2."""
    a = len(modulus) - 1
    if a == 1:
        return True
    if modulus[0] % p == 0:
        return False
    xpow = [0, 1]
    for _ in range(a // 2):
        # xpow <- xpow^p mod m
        acc = [1]
        base, e = xpow, p
        while e:
            if e & 1:
                acc = _polymulmod(acc, base, modulus, p)
            base = _polymulmod(base, base, modulus, p)
            e >>= 1
        xpow = acc
        diff = list(xpow) + [0] * max(0, 2 - len(xpow))
        diff[1] = (diff[1] - 1) % p
        if len(_polygcd(list(modulus), _trim(diff), p)) != 1:
            return False
    return True


def _find_modulus(p: int, a: int) -> tuple[int, ...]:
    # lexicographic order on (c_0, ..., c_{a-1}) with c_0 most significant
    for code in range(p ** a):
        coeffs = []
        for _ in range(a):
            coeffs.append(code % p)
            code //= p
        coeffs.reverse()
        cand = tuple(coeffs) + (1,)
        if _is_irreducible(cand, p):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {a} over F_{p}")  # unreachable


class FieldSpec:
    """The finite field F_{p^a}."""

    def __init__(self, p: int, a: int, modulus: tuple[int, ...] | None):
        self.p = p
        self.a = a
        self.modulus = modulus
        self.q = p ** a
        self._powers = [p ** j for j in range(a)]
        self._tables: tuple | None = None

    def __repr__(self) -> str:
        if self.a == 1:
            return f"FieldSpec(p={self.p})"
        return f"FieldSpec(p={self.p}, a={self.a}, modulus={list(self.modulus)})"

    def __reduce__(self):
        return (make_field, (self.p, self.a, self.modulus))

    # --- coding

    def digits(self, x: int) -> list[int]:
        out = []
        for _ in range(self.a):
            out.append(x % self.p)
            x //= self.p
        return out

    def from_digits(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.a:
            raise FieldError("too many coefficients for this field")
        return sum((c % self.p) * w for c, w in zip(coeffs, self._powers))

    def from_int(self, n: int) -> int:
        return n % self.p

    def element(self, x: int | Sequence[int]) -> FieldElement:
        if isinstance(x, int):
            return FieldElement(self, self.from_int(x))
        return FieldElement(self, self.from_digits(x))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def generator(self) -> FieldElement:
        """The polynomial-basis generator g (root of the modulus)."""
        return FieldElement(self, 1 if self.a == 1 else self.p)

    # --- scalar arithmetic on codes

    def add(self, x: int, y: int) -> int:
        if self.a == 1:
            return (x + y) % self.p
        t = self.tables
        if t[3] is not None:
            return t[3][x][y]
        p = self.p
        out = 0
        for w in self._powers:
            out += ((x % p + y % p) % p) * w
            x //= p
            y //= p
        return out

    def neg(self, x: int) -> int:
        if self.a == 1:
            return -x % self.p
        p = self.p
        out = 0
        for w in self._powers:
            out += (-(x % p) % p) * w
            x //= p
        return out

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if self.a == 1:
            return x * y % self.p
        if x == 0 or y == 0:
            return 0
        exp, log = self.tables[0], self.tables[1]
        return exp[(log[x] + log[y]) % (self.q - 1)]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.a == 1:
            return pow(x, -1, self.p)
        exp, log = self.tables[0], self.tables[1]
        return exp[-log[x] % (self.q - 1)]

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            x, e = self.inv(x), -e
        if self.a == 1:
            return pow(x, e, self.p)
        if x == 0:
            return 1 if e == 0 else 0
        exp, log = self.tables[0], self.tables[1]
        return exp[log[x] * e % (self.q - 1)]

    def scale_int(self, n: int, x: int) -> int:
        return self.mul(self.from_int(n), x)

    def trace(self, x: int) -> int:
        """Absolute trace to F_p of the element coded by x."""
        if self.a == 1:
            return x
        return self.tables[2][x]

    # --- tables

    @property
    def tables(self):
        """(exp, log, trace, add-or-None) lookup lists, built on first use."""
        if self._tables is None:
            self._tables = self._build_tables()
        return self._tables

    def _mul_slow(self, x: int, y: int) -> int:
        r = _polymulmod(self.digits(x), self.digits(y), self.modulus, self.p)
        return self.from_digits(r)

    def _build_tables(self):
        q, p = self.q, self.p
        if self.a == 1:
            g = primitive_root(p)
            exp = [1] * (q - 1)
            for k in range(1, q - 1):
                exp[k] = exp[k - 1] * g % p
            log = [0] * q
            for k, v in enumerate(exp):
                log[v] = k
            return exp, log, list(range(q)), None
        factors = prime_factors(q - 1)
        gen = None
        for cand in range(2, q):
            if all(self._pow_slow(cand, (q - 1) // r) != 1 for r in factors):
                gen = cand
                break
        if gen is None:  # q == 2 handled above; q - 1 == 1 impossible for a > 1
            raise FieldError("no primitive element found")
        exp = [1] * (q - 1)
        cur = self.digits(1)
        for k in range(1, q - 1):
            cur = _polymulmod(cur, self.digits(gen), self.modulus, p)
            exp[k] = self.from_digits(cur)
        log = [0] * q
        for k, v in enumerate(exp):
            log[v] = k
        # Tr is F_p-linear: Tr(sum c_j g^j) = sum c_j Tr(g^j)
        basis_tr = []
        for j in range(self.a):
            b = self._powers[j]
            acc, cur = 0, b
            for _ in range(self.a):
                acc = self._add_slow(acc, cur)
                cur = self._pow_slow(cur, p)
            if acc >= p:
                raise FieldError("trace left the prime field; modulus corrupt")
            basis_tr.append(acc)
        digits = np.array([self.digits(x) for x in range(q)], dtype=np.int64)
        trace = ((digits @ np.array(basis_tr, dtype=np.int64)) % p).tolist()
        add = None
        if q <= 512:
            add = [[self._add_slow(x, y) for y in range(q)] for x in range(q)]
        return exp, log, trace, add

    def _add_slow(self, x: int, y: int) -> int:
        return self.from_digits([(u + v) % self.p for u, v in zip(self.digits(x), self.digits(y))])

    def _pow_slow(self, x: int, e: int) -> int:
        acc = 1
        while e:
            if e & 1:
                acc = self._mul_slow(acc, x)
            x = self._mul_slow(x, x)
            e >>= 1
        return acc

    def np_tables(self):
        """numpy copies of (exp, log, trace) for vectorised enumeration."""
        exp, log, trace, _ = self.tables
        return (np.asarray(exp, dtype=np.int64), np.asarray(log, dtype=np.int64),
                np.asarray(trace, dtype=np.int64))


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in factors):
            return g
    raise FieldError(f"no primitive root mod {p}")


@functools.lru_cache(maxsize=None)
def _make_field(p: int, a: int, modulus: tuple[int, ...] | None) -> FieldSpec:
    return FieldSpec(p, a, modulus)


def make_field(p: int, a: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Validated, cached F_{p^a}.

    ``modulus`` is the coefficient list (constant term first) of a monic
    irreducible polynomial of degree a.  If omitted for a > 1, the
    lexicographically smallest irreducible one is used.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if a < 1:
        raise FieldError("extension degree must be >= 1")
    if a == 1:
        if modulus is not None and len(modulus) not in (0, 2):
            raise FieldError("a degree-1 field takes no modulus")
        return _make_field(p, 1, None)
    if modulus is None:
        mod = _find_modulus(p, a)
    else:
        mod = tuple(int(c) % p for c in modulus)
        if len(mod) == a:
            mod = mod + (1,)
        if len(mod) != a + 1 or mod[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {a}")
        if not _is_irreducible(mod, p):
            raise FieldError(f"modulus {list(mod)} is reducible over F_{p}")
    return _make_field(p, a, mod)


class FieldElement:
    __slots__ = ("field", "code")

    def __init__(self, field: FieldSpec, code: int):
        self.field = field
        self.code = code

    @property
    def coeffs(self) -> list[int]:
        return self.field.digits(self.code)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldError("elements of different fields")
            return other.code
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.add(self.code, y))

    __radd__ = __add__

    def __sub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.sub(self.code, y))

    def __rsub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.sub(y, self.code))

    def __mul__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.mul(self.code, y))

    __rmul__ = __mul__

    def __truediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return FieldElement(self.field, self.field.mul(self.code, self.field.inv(y)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.code, e))

    def inverse(self) -> FieldElement:
        return FieldElement(self.field, self.field.inv(self.code))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field is other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == self.field.from_int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((id(self.field), self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __repr__(self) -> str:
        if self.field.a == 1:
            return f"{self.code}"
        return f"FieldElement({self.coeffs})"


def absolute_trace(x: FieldElement) -> int:
    """x + x^p + ... + x^{p^{m-1}} as a residue mod p."""
    return x.field.trace(x.code)


def enumerate_field(spec: FieldSpec) -> Iterator[FieldElement]:
    """All p^a elements, ordered by code (c_{a-1} most significant)."""
    for code in range(spec.q):
        yield FieldElement(spec, code)


class ExtensionSpec:
    """F_{q^i} realised as F_{p^{a i}} with an embedding of F_q.

    The embedding sends the base generator to the smallest root (by code)
    of the base modulus in the extension.
    """

    def __init__(self, base: FieldSpec, i: int):
        if i < 1:
            raise FieldError("extension step must be >= 1")
        self.base = base
        self.i = i
        self.field = make_field(base.p, base.a * i)
        self.embed_table = self._embedding()
        self.restrict_table = {v: k for k, v in enumerate(self.embed_table)}

    def _embedding(self) -> list[int]:
        base, ext = self.base, self.field
        if base.a == 1:
            return list(range(base.p))
        if self.i == 1 and ext is base:
            return list(range(base.q))
        root = None
        for cand in range(ext.q):
            acc = 0
            for c in reversed(base.modulus):
                acc = ext.add(ext.mul(acc, cand), c)
            if acc == 0:
                root = cand
                break
        if root is None:
            raise FieldError("base modulus has no root in the extension")
        powers = [1]
        for _ in range(base.a - 1):
            powers.append(ext.mul(powers[-1], root))
        table = []
        for code in range(base.q):
            acc = 0
            for c, r in zip(base.digits(code), powers):
                if c:
                    acc = ext.add(acc, ext.mul(c, r))
            table.append(acc)
        return table

    def embed(self, x: FieldElement | int) -> FieldElement:
        code = x.code if isinstance(x, FieldElement) else x
        return FieldElement(self.field, self.embed_table[code])

    def restrict(self, y: FieldElement) -> FieldElement:
        """Inverse of embed on its image."""
        try:
            return FieldElement(self.base, self.restrict_table[y.code])
        except KeyError:
            raise FieldError("element does not lie in the embedded base field") from None


@functools.lru_cache(maxsize=None)
def extension(base: FieldSpec, i: int) -> ExtensionSpec:
    return ExtensionSpec(base, i)


def relative_trace(x: FieldElement, down_to: FieldSpec) -> FieldElement:
    """Trace from x's field F_{q^i} down to F_q = down_to."""
    big = x.field
    if big is down_to:
        return x
    if big.p != down_to.p or big.a % down_to.a:
        raise FieldError("element is not in an extension of the target field")
    ext = extension(down_to, big.a // down_to.a)
    if ext.field is not big:
        raise FieldError("element is not in the canonical extension of the target field")
    acc, cur = 0, x.code
    for _ in range(ext.i):
        acc = big.add(acc, cur)
        cur = big.pow(cur, down_to.q)
    return ext.restrict(FieldElement(big, acc))
