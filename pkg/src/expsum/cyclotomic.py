"""Exact arithmetic in Z[zeta_p] and Q(zeta_p).

Elements are stored on the power basis 1, zeta, ..., zeta^{p-2}; the relation
1 + zeta + ... + zeta^{p-1} = 0 eliminates zeta^{p-1}.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Sequence

import mpmath


class CycInt:
    __slots__ = ("p", "coords")

    def __init__(self, p: int, coords: Sequence[int]):
        self.p = p
        self.coords = tuple(int(c) for c in coords)
        if len(self.coords) != p - 1:
            raise ValueError(f"CycInt over zeta_{p} needs {p - 1} coordinates")

    @classmethod
    def from_int(cls, p: int, n: int) -> CycInt:
        return cls(p, [n] + [0] * (p - 2))

    @classmethod
    def zeta_power(cls, p: int, j: int) -> CycInt:
        return cls.from_full(p, [1 if k == j % p else 0 for k in range(p)])

    @classmethod
    def from_full(cls, p: int, full: Sequence[int]) -> CycInt:
        """From coefficients of 1, zeta, ..., zeta^{p-1} (length p)."""
        top = full[p - 1]
        return cls(p, [full[k] - top for k in range(p - 1)])

    def full(self) -> list[int]:
        return list(self.coords) + [0]

    def _coerce(self, other) -> CycInt:
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise ValueError("cyclotomic elements of different orders")
            return other
        if isinstance(other, int):
            return CycInt.from_int(self.p, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycInt(self.p, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self) -> CycInt:
        return CycInt(self.p, [-a for a in self.coords])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycInt(self.p, [a - b for a, b in zip(self.coords, o.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        full = [0] * p
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        full[(i + j) % p] += a * b
        return CycInt.from_full(p, full)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> CycInt:
        if e < 0:
            raise ValueError("negative power of a cyclotomic integer")
        acc = CycInt.from_int(self.p, 1)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = CycInt.from_int(self.p, other)
        if isinstance(other, CycInt):
            return self.p == other.p and self.coords == other.coords
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.coords))

    def __bool__(self) -> bool:
        return any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def galois(self, c: int) -> CycInt:
        """sigma_c: zeta -> zeta^c, for c prime to p."""
        p = self.p
        if c % p == 0:
            raise ValueError("Galois exponent must be prime to p")
        full = [0] * p
        for j, a in enumerate(self.coords):
            full[j * c % p] += a
        return CycInt.from_full(p, full)

    def norm(self) -> int:
        acc = self
        for c in range(2, self.p):
            acc = acc * self.galois(c)
        if not acc.is_rational():
            raise ArithmeticError("norm is not rational; arithmetic corrupt")
        return acc.coords[0]

    def content(self) -> int:
        return reduce(math.gcd, self.coords, 0)

    def embed(self, c: int = 1, dps: int = 50) -> mpmath.mpc:
        """Complex value under zeta -> exp(2 pi i c / p)."""
        with mpmath.workdps(dps):
            z = mpmath.expjpi(mpmath.mpf(2 * c) / self.p)
            acc = mpmath.mpc(0)
            zk = mpmath.mpc(1)
            for a in self.coords:
                if a:
                    acc += a * zk
                zk *= z
            return +acc

    def to_json(self) -> list[int]:
        return list(self.coords)

    def __repr__(self) -> str:
        return f"CycInt({self.p}, {list(self.coords)})"

    def __str__(self) -> str:
        parts = []
        for j, a in enumerate(self.coords):
            if a == 0:
                continue
            z = "" if j == 0 else ("z" if j == 1 else f"z^{j}")
            if not z:
                parts.append(str(a))
            elif a == 1:
                parts.append(z)
            else:
                parts.append(f"{a}*{z}")
        return " + ".join(parts) if parts else "0"


class CycRational:
    """num / den with den > 0 and gcd(content(num), den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: CycInt, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(num.content(), den)
        if g > 1:
            num = CycInt(num.p, [a // g for a in num.coords])
            den //= g
        self.num = num
        self.den = den

    @property
    def p(self) -> int:
        return self.num.p

    @classmethod
    def from_int(cls, p: int, n: int | Fraction) -> CycRational:
        n = Fraction(n)
        return cls(CycInt.from_int(p, n.numerator), n.denominator)

    @classmethod
    def lift(cls, x) -> CycRational:
        if isinstance(x, CycRational):
            return x
        if isinstance(x, CycInt):
            return cls(x, 1)
        raise TypeError(f"cannot lift {type(x).__name__}")

    def is_integral(self) -> bool:
        return self.den == 1

    def _coerce(self, other):
        if isinstance(other, CycRational):
            return other
        if isinstance(other, CycInt):
            return CycRational(other, 1)
        if isinstance(other, (int, Fraction)):
            return CycRational.from_int(self.p, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycRational(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return CycRational(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycRational(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> CycRational:
        if not self.num:
            raise ZeroDivisionError("inverse of zero in Q(zeta_p)")
        conj = CycInt.from_int(self.p, 1)
        for c in range(2, self.p):
            conj = conj * self.num.galois(c)
        nrm = (conj * self.num).coords[0]
        return CycRational(conj * self.den, nrm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __bool__(self) -> bool:
        return bool(self.num)

    def to_cycint(self) -> CycInt:
        if self.den != 1:
            raise ArithmeticError(f"{self} is not a cyclotomic integer")
        return self.num

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den}

    def __repr__(self) -> str:
        return f"CycRational({self.num!r}, {self.den})"

    def __str__(self) -> str:
        return str(self.num) if self.den == 1 else f"({self.num})/{self.den}"
