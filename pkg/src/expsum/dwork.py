"""Truncated Dwork theory over F_p: splitting function, Frobenius operators
alpha_k on monomial bases, the trace-formula congruence, and the b-range
arithmetic of the degeneration theorem.

Only q = p is supported for the operator computations.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .charsum import DEFAULT_BUDGET, exponential_sum
from .cyclotomic import CycInt
from .koszul import monomials_of_degree
from .mpoly import MultiPoly
from .padic import PadicElement, PadicRing, padic_ring

Monomial = tuple[int, ...]


class DworkError(ArithmeticError):
    pass


class PrecisionError(DworkError):
    pass


class ValuationBoundViolation(DworkError):
    pass


class CongruenceFailure(DworkError):
    pass


# --- gamma, theta and Teichmueller lifts


@dataclass
class Gamma:
    value: PadicElement
    unit: int  # gamma = pi * unit, unit in Z_p
    terms: int  # number of terms t^{p^i}/p^i kept


def _gamma_terms(p: int, N: int) -> list[tuple[int, int]]:
    """(sign * p^{m_i - i}, p^i) for the equation divided by pi, keeping coefficients nonzero mod p^N.

    With t = pi u: t^{p^i}/p^i = pi * (-1)^{m_i} p^{m_i - i} u^{p^i}, m_i = (p^i - 1)/(p - 1).
    """
    out = []
    i = 0
    while True:
        m = (p ** i - 1) // (p - 1)
        if m - i >= N and i >= 2:
            break
        coeff = (-1) ** m * p ** (m - i)
        out.append((coeff, p ** i))
        i += 1
    return out


@functools.lru_cache(maxsize=None)
def solve_gamma(p: int, N: int) -> Gamma:
    """Root gamma of sum_i t^{p^i}/p^i = 0 with ord gamma = 1/(p-1), to precision p^N.

    gamma = pi u with u in Z_p, u = 1 mod p; u comes from Newton iteration.
    """
    if N < 1:
        raise ValueError("precision must be >= 1")
    R = padic_ring(p, N)
    mod = p ** N
    terms = _gamma_terms(p, N)
    u = 1
    for _ in range(2 * N.bit_length() + 4):
        h = sum(c * pow(u, e, mod) for c, e in terms) % mod
        if h == 0:
            break
        dh = sum(c * e * pow(u, e - 1, mod) for c, e in terms) % mod
        u = (u - h * pow(dh, -1, mod)) % mod
    else:
        if sum(c * pow(u, e, mod) for c, e in terms) % mod:
            raise DworkError("Newton iteration for gamma did not converge")
    return Gamma(R.pi * u, u, len(terms))


@functools.lru_cache(maxsize=None)
def artin_hasse(p: int, kmax: int) -> tuple[Fraction, ...]:
    """Coefficients of E(t) = exp(sum_i t^{p^i}/p^i) up to t^kmax, via k e_k = sum_{p^i <= k} e_{k-p^i}."""
    e = [Fraction(1)]
    for k in range(1, kmax + 1):
        acc = Fraction(0)
        pk = 1
        while pk <= k:
            acc += e[k - pk]
            pk *= p
        e.append(acc / k)
    return tuple(e)


def _fraction_to_ring(x: Fraction, R: PadicRing) -> PadicElement:
    if x.denominator % R.p == 0:
        raise DworkError(f"{x} is not p-integral")
    return R(x.numerator * pow(x.denominator, -1, R.mod))


@dataclass
class ThetaSeries:
    ring: PadicRing
    coeffs: list[PadicElement]


def theta_coefficients(gamma: Gamma | PadicElement, imax: int, N: int | None = None) -> ThetaSeries:
    """lambda_0..lambda_imax of theta(t) = E(gamma t), checking ord lambda_i >= i/(p-1)."""
    g = gamma.value if isinstance(gamma, Gamma) else gamma
    R = g.ring if N is None else padic_ring(g.ring.p, N)
    if R != g.ring:
        g = R(g.c)
    p = R.p
    ah = artin_hasse(p, imax)
    out = []
    gk = R.one
    for i in range(imax + 1):
        lam = _fraction_to_ring(ah[i], R) * gk
        v = lam.valuation()
        if v is not None and v < Fraction(i, p - 1):
            raise ValuationBoundViolation(f"ord lambda_{i} = {v} < {i}/{p - 1}")
        out.append(lam)
        gk = gk * g
    return ThetaSeries(R, out)


def teichmuller(c: int, p: int, N: int) -> PadicElement:
    """Lift of c in F_p with lift^p = lift, via x <- x^p."""
    R = padic_ring(p, N)
    x = c % p
    for _ in range(N):
        x = pow(x, p, R.mod)
    return R(x)


def teichmuller_int(c: int, p: int, N: int) -> int:
    return teichmuller(c, p, N).c[0]


# --- the Frobenius series F and operators


def _require_prime_field(f: MultiPoly):
    if f.field.a != 1:
        raise DworkError("Dwork operators are implemented for q = p only")


def _trunc_mul(A: dict, B: dict, n: int, limit: int, R: PadicRing) -> dict:
    out: dict = {}
    for ma, ca in A.items():
        da = sum(ma)
        for mb, cb in B.items():
            if da + sum(mb) > limit:
                continue
            m = tuple(x + y for x, y in zip(ma, mb))
            prod = ca * cb
            if m in out:
                out[m] = out[m] + prod
            else:
                out[m] = prod
    return {m: c for m, c in out.items() if not c.is_zero()}


def f0_coefficients(f: MultiPoly, limit: int, N: int) -> dict[Monomial, PadicElement]:
    """Coefficients of F(x) = prod_u theta(hat a_u x^u) for |w| <= limit, in R_N.

    Asserts ord F_w >= |w| / (delta (p - 1)) on every computed coefficient.
    """
    _require_prime_field(f)
    p, n = f.field.p, f.n
    R = padic_ring(p, N)
    gamma = solve_gamma(p, N)
    nonconst = [sum(m) for m in f.terms if any(m)]
    imax = max([limit // d for d in nonconst] + [N * (p - 1)])
    theta = theta_coefficients(gamma, imax, N).coeffs
    zero = (0,) * n
    acc: dict = {zero: R.one}
    for m, c in sorted(f.terms.items()):
        hat = teichmuller(c, p, N)
        d = sum(m)
        series: dict = {}
        hk = R.one
        if d == 0:
            s = R.zero
            for lam in theta[: N * (p - 1) + 1]:
                s = s + lam * hk
                hk = hk * hat
            series[zero] = s
        else:
            for i in range(limit // d + 1):
                term = theta[i] * hk
                if not term.is_zero():
                    series[tuple(i * e for e in m)] = term
                hk = hk * hat
        acc = _trunc_mul(acc, series, n, limit, R)
    delta = f.degree
    if delta >= 1:
        for w, c in acc.items():
            v = c.valuation()
            if v is not None and v < Fraction(sum(w), delta * (p - 1)):
                raise ValuationBoundViolation(f"ord F_{w} = {v} < |w|/(delta(p-1))")
    return acc


def psi(series: dict[Monomial, PadicElement], p: int) -> dict[Monomial, PadicElement]:
    """sum A_u x^u -> sum A_{pu} x^u."""
    return {tuple(e // p for e in m): c for m, c in series.items() if all(e % p == 0 for e in m)}


def guaranteed_precision(delta: int, D: int, N: int) -> int:
    """Traces of truncated powers agree with the true traces mod p^G.

    Any cycle through a basis monomial of degree > D has valuation >= (D+1)/delta.
    """
    if delta < 1:
        return N
    return min(N, (D + 1) // delta)


def basis_monomials(n: int, D: int) -> list[Monomial]:
    out = []
    for d in range(D + 1):
        out.extend(monomials_of_degree(n, d))
    return out


@dataclass
class TruncatedOperator:
    k: int
    subset: tuple[int, ...]
    basis: list[Monomial]
    matrix: list[list[PadicElement]]  # matrix[v][u]
    D: int
    guaranteed_precision: int
    ring: PadicRing

    def trace(self) -> PadicElement:
        acc = self.ring.zero
        for i in range(len(self.basis)):
            acc = acc + self.matrix[i][i]
        return acc

    def power(self, e: int) -> list[list[PadicElement]]:
        M = self.matrix
        out = M
        for _ in range(e - 1):
            out = _matmul(out, M, self.ring)
        return out

    def power_trace(self, e: int) -> PadicElement:
        P = self.power(e)
        acc = self.ring.zero
        for i in range(len(P)):
            acc = acc + P[i][i]
        return acc


def _matmul(A, B, R: PadicRing):
    n = len(A)
    m = len(B[0]) if B else 0
    out = [[R.zero] * m for _ in range(n)]
    for i in range(n):
        row = A[i]
        for k, a in enumerate(row):
            if a.is_zero():
                continue
            bk = B[k]
            oi = out[i]
            for j in range(m):
                b = bk[j]
                if not b.is_zero():
                    oi[j] = oi[j] + a * b
    return out


def default_cutoff(delta: int) -> int:
    return 3 * max(delta, 1)


def default_precision(delta: int, D: int) -> int:
    return (D + 1) // max(delta, 1) + 1


def coefficient_limit(p: int, n: int, D: int) -> int:
    """Largest |w| read by any alpha_k entry: p(D + k) - k <= pD + (p-1)n."""
    return p * D + (p - 1) * n


def alpha_k_matrix(f: MultiPoly, subset: Sequence[int], D: int, N: int,
                   F0: dict | None = None, requested: int | None = None) -> TruncatedOperator:
    """Block of alpha_k for the form dx_S, S = subset (0-based), on monomials |v| <= D.

    Entry (v, u) = q^{n-k} F_{p(v + 1_S) - (u + 1_S)}.
    """
    _require_prime_field(f)
    p, n = f.field.p, f.n
    R = padic_ring(p, N)
    S = tuple(sorted(subset))
    k = len(S)
    G = guaranteed_precision(f.degree, D, N)
    if requested is not None and G < requested:
        raise PrecisionError(f"cutoff D={D} guarantees only p^{G}, requested p^{requested}")
    if F0 is None:
        F0 = f0_coefficients(f, coefficient_limit(p, n, D), N)
    basis = basis_monomials(n, D)
    ones = tuple(1 if i in S else 0 for i in range(n))
    scale = R(p ** (n - k))
    zero = R.zero
    M = []
    for v in basis:
        row = []
        pv = tuple(p * (a + b) for a, b in zip(v, ones))
        for u in basis:
            w = tuple(x - (a + b) for x, a, b in zip(pv, u, ones))
            if min(w) < 0:
                row.append(zero)
                continue
            c = F0.get(w)
            row.append(zero if c is None else scale * c)
        M.append(row)
    return TruncatedOperator(k, S, basis, M, D, G, R)


def zeta_in_ring(R: PadicRing) -> PadicElement:
    """The primitive p-th root of unity 1 + pi w with w = 1 mod pi.

    w solves Phi_p(1 + pi w) / p = 0 by Newton iteration; this root equals theta(1).
    """
    p = R.p
    if p == 2:
        return R(-1)
    pi = R.pi
    binoms = [math.comb(p, j) // p for j in range(p + 1)]
    pipow = [R.one]
    for _ in range(p):
        pipow.append(pipow[-1] * pi)
    w = R.one
    for _ in range((R.N * R.e).bit_length() + 3):
        g = R.one - w ** (p - 1)
        dg = R(-(p - 1)) * w ** (p - 2)
        for j in range(2, p):
            g = g + R(binoms[j]) * pipow[j - 1] * w ** (j - 1)
            dg = dg + R(binoms[j] * (j - 1)) * pipow[j - 1] * w ** (j - 2)
        if g.is_zero():
            break
        w = w - g * dg.inverse()
    return R.one + pi * w


def cyc_to_ring(x: CycInt, zeta: PadicElement) -> PadicElement:
    R = zeta.ring
    acc = R.zero
    zk = R.one
    for c in x.coords:
        if c:
            acc = acc + R(c) * zk
        zk = zk * zeta
    return acc


@dataclass
class CongruenceRow:
    i: int
    trace_sum: PadicElement
    exact_sum: PadicElement
    precision: int
    holds: bool
    difference_valuation: Fraction | None

    def to_json(self):
        v = self.difference_valuation
        return {
            "i": self.i,
            "T_i": self.trace_sum.to_json(),
            "S_i": self.exact_sum.to_json(),
            "modulus_exponent": self.precision,
            "difference_valuation": None if v is None else str(v),
            "holds": self.holds,
        }


@dataclass
class CongruenceReport:
    p: int
    n: int
    D: int
    N: int
    G: int
    rows: list[CongruenceRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.rows)

    def to_json(self):
        return {
            "p": self.p, "n": self.n, "cutoff_D": self.D, "precision_N": self.N,
            "guaranteed_precision": self.G,
            "guaranteed_precision_note": "derived from ord lambda_i >= i/(p-1) and the cutoff D",
            "rows": [r.to_json() for r in self.rows],
            "passed": self.passed,
        }


def trace_formula_check(f: MultiPoly, i_max: int, D: int | None = None, N: int | None = None,
                        sums: Sequence[CycInt] | None = None, budget: int = DEFAULT_BUDGET,
                        strict: bool = False) -> CongruenceReport:
    """T_i = sum_k (-1)^k Tr(alpha_k^i) against the exact S_i, modulo p^G.

    With strict=True a failed congruence raises CongruenceFailure.
    """
    _require_prime_field(f)
    p, n = f.field.p, f.n
    delta = max(f.degree, 1)
    D = default_cutoff(delta) if D is None else D
    N = default_precision(delta, D) if N is None else N
    R = padic_ring(p, N)
    F0 = f0_coefficients(f, coefficient_limit(p, n, D), N)
    blocks = []
    for k in range(n + 1):
        for S in itertools.combinations(range(n), k):
            blocks.append(alpha_k_matrix(f, S, D, N, F0))
    G = guaranteed_precision(f.degree, D, N)
    zeta = zeta_in_ring(R)
    rep = CongruenceReport(p, n, D, N, G)
    powers = {id(b): b.matrix for b in blocks}
    for i in range(1, i_max + 1):
        T = R.zero
        for b in blocks:
            if i > 1:
                powers[id(b)] = _matmul(powers[id(b)], b.matrix, R)
            M = powers[id(b)]
            tr = R.zero
            for j in range(len(M)):
                tr = tr + M[j][j]
            T = T + tr if b.k % 2 == 0 else T - tr
        s = sums[i - 1] if sums is not None and i <= len(sums) else exponential_sum(f, i, budget)
        Si = cyc_to_ring(s, zeta)
        diff = T - Si
        holds = diff.divisible_by_p_power(G)
        row = CongruenceRow(i, T, Si, G, holds, diff.valuation())
        rep.rows.append(row)
        if strict and not holds:
            raise CongruenceFailure(f"T_{i} != S_{i} mod p^{G}")
    return rep


# --- b-range arithmetic


@dataclass(frozen=True)
class BRange:
    p: int
    delta: int
    e: int
    lower: Fraction
    upper: Fraction

    @property
    def nonempty(self) -> bool:
        return self.lower < self.upper

    def to_json(self):
        return {"p": self.p, "delta": self.delta, "e": self.e,
                "lower": str(self.lower), "upper": str(self.upper), "nonempty": self.nonempty}

    def __str__(self) -> str:
        if not self.nonempty:
            return "empty"
        return f"({self.lower}, {self.upper})"


def _check_range_args(p: int, delta: int, e: int):
    if delta < 1:
        raise ValueError("delta must be >= 1")
    if not 1 <= e <= delta:
        raise ValueError(f"page e={e} must satisfy 1 <= e <= delta={delta}")


def b_range(p: int, delta: int, e: int) -> BRange:
    """delta/((p-1)(delta-e+1)) < b < p delta/((p-1) delta + e - 1), exact."""
    _check_range_args(p, delta, e)
    lower = Fraction(delta, (p - 1) * (delta - e + 1))
    upper = Fraction(p * delta, (p - 1) * delta + e - 1)
    return BRange(p, delta, e, lower, upper)


def b_range_nonempty(p: int, delta: int, e: int) -> bool:
    """(1 + p/(p-1)^2)(e - 1) < delta."""
    _check_range_args(p, delta, e)
    return (1 + Fraction(p, (p - 1) ** 2)) * (e - 1) < delta
