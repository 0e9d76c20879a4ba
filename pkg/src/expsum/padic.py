"""Z_p[pi] / p^N with pi^{p-1} = -p: the integers of Q_p(zeta_p) at fixed precision."""

from __future__ import annotations

import functools
from fractions import Fraction
from typing import Sequence


def vp(n: int, p: int) -> int | None:
    """p-adic valuation of an integer; None for 0."""
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicRing:
    """R_N on the basis 1, pi, ..., pi^{p-2}."""

    def __init__(self, p: int, N: int):
        if N < 1:
            raise ValueError("precision must be >= 1")
        self.p = p
        self.N = N
        self.mod = p ** N
        self.e = p - 1  # ramification index

    def __repr__(self) -> str:
        return f"PadicRing(p={self.p}, N={self.N})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PadicRing) and (self.p, self.N) == (other.p, other.N)

    def __hash__(self) -> int:
        return hash((self.p, self.N))

    def __call__(self, coeffs: Sequence[int] | int) -> PadicElement:
        if isinstance(coeffs, int):
            coeffs = [coeffs]
        c = [0] * self.e
        for j, v in enumerate(coeffs):
            # pi^j = (-p)^{j // e} pi^{j % e}
            q, r = divmod(j, self.e)
            c[r] += v * (-self.p) ** q
        return PadicElement(self, [x % self.mod for x in c])

    @property
    def zero(self) -> PadicElement:
        return PadicElement(self, [0] * self.e)

    @property
    def one(self) -> PadicElement:
        return self(1)

    @property
    def pi(self) -> PadicElement:
        return self.pi_power(1)

    def pi_power(self, k: int) -> PadicElement:
        q, r = divmod(k, self.e)
        c = [0] * self.e
        c[r] = (-self.p) ** q
        return PadicElement(self, [x % self.mod for x in c])


class PadicElement:
    __slots__ = ("ring", "c")

    def __init__(self, ring: PadicRing, c: list[int]):
        self.ring = ring
        self.c = c

    def _coerce(self, other) -> PadicElement:
        if isinstance(other, PadicElement):
            if other.ring != self.ring:
                raise ValueError("elements of different p-adic rings")
            return other
        if isinstance(other, int):
            return self.ring(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        m = self.ring.mod
        return PadicElement(self.ring, [(a + b) % m for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        m = self.ring.mod
        return PadicElement(self.ring, [-a % m for a in self.c])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        m = self.ring.mod
        return PadicElement(self.ring, [(a - b) % m for a, b in zip(self.c, o.c)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        R = self.ring
        e, p, m = R.e, R.p, R.mod
        if e == 1:
            return PadicElement(R, [self.c[0] * o.c[0] % m])
        acc = [0] * (2 * e - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        acc[i + j] += a * b
        out = acc[:e]
        for j in range(e, 2 * e - 1):
            out[j - e] -= p * acc[j]
        return PadicElement(R, [x % m for x in out])

    __rmul__ = __mul__

    def __pow__(self, k: int) -> PadicElement:
        if k < 0:
            return self.inverse() ** (-k)
        acc = self.ring.one
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.c == o.c

    def __hash__(self) -> int:
        return hash((self.ring.p, self.ring.N, tuple(self.c)))

    def is_zero(self) -> bool:
        return not any(self.c)

    def valuation(self) -> Fraction | None:
        """min_j v_p(c_j) + j/(p-1); None when the element is 0 in R_N (valuation >= N)."""
        best = None
        for j, a in enumerate(self.c):
            v = vp(a, self.ring.p)
            if v is None:
                continue
            val = Fraction(v) + Fraction(j, self.ring.e)
            if best is None or val < best:
                best = val
        return best

    def divisible_by_p_power(self, k: int) -> bool:
        m = self.ring.p ** k
        return all(a % m == 0 for a in self.c)

    def is_unit(self) -> bool:
        return self.c[0] % self.ring.p != 0

    def inverse(self) -> PadicElement:
        """Newton inverse x <- x (2 - a x) for units."""
        R = self.ring
        if not self.is_unit():
            raise ZeroDivisionError("element is not a unit in R_N")
        x = R(pow(self.c[0], -1, R.p))
        # each step doubles the pi-adic precision; N(p-1) digits needed
        steps = max(1, (R.N * R.e).bit_length() + 1)
        for _ in range(steps):
            x = x * (2 - self * x)
        return x

    def to_json(self):
        return list(self.c)

    def __repr__(self) -> str:
        return f"PadicElement(p={self.ring.p}, N={self.ring.N}, {self.c})"


@functools.lru_cache(maxsize=None)
def padic_ring(p: int, N: int) -> PadicRing:
    return PadicRing(p, N)
