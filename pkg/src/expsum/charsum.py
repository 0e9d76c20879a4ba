"""Exponential sums on affine space and the associated L-function.

The additive character is Psi(t) = zeta_p^{Tr(t)}, Tr the absolute trace.
Sums are exact elements of Z[zeta_p].
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .cyclotomic import CycInt, CycRational
from .ff import extension
from .mpoly import MultiPoly

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 8
_CHUNK = 1 << 18


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} evaluations, budget is {budget}")
        self.required = required
        self.budget = budget


class IntegralityError(ArithmeticError):
    pass


class DegreeMismatch(ArithmeticError):
    pass


class ReconstructionError(ArithmeticError):
    pass


class RootFindingError(RuntimeError):
    pass


# --- exponential sums


def _prepared_terms(f: MultiPoly, i: int):
    """Embedded coefficient logs and exponent rows for the vectorised kernel."""
    ext = extension(f.field, i)
    E = ext.field
    _, logt, _, _ = E.tables
    const_trace = 0
    logs, exps = [], []
    for m, c in f.terms.items():
        code = ext.embed_table[c]
        if not any(m):
            const_trace = (const_trace + E.trace(code)) % E.p
            continue
        logs.append(logt[code])
        exps.append(m)
    return E, const_trace, logs, exps


def trace_values(f: MultiPoly, i: int, start: int, stop: int) -> np.ndarray:
    """Tr_{F_{q^i}/F_p} f(x) for points with index start..stop-1.

    Point index k encodes coordinates x_j = (k // Q^j) % Q as field codes.
    Trace is additive, so each term contributes Tr(c x^u) separately and the
    value of f itself is never formed.
    """
    E, const_trace, logs, exps = _prepared_terms(f, i)
    Q, p = E.q, E.p
    expt, logt, trt = E.np_tables()
    idx = np.arange(start, stop, dtype=np.int64)
    coords = []
    for _ in range(f.n):
        coords.append(idx % Q)
        idx = idx // Q
    xlogs = [logt[c] for c in coords]
    zeros = [c == 0 for c in coords]
    total = np.full(stop - start, const_trace, dtype=np.int64)
    order = Q - 1
    for lc, m in zip(logs, exps):
        acc = np.full(stop - start, lc, dtype=np.int64)
        dead = np.zeros(stop - start, dtype=bool)
        for j, e in enumerate(m):
            if e:
                acc += (e % order) * xlogs[j] if order > 1 else 0
                dead |= zeros[j]
        val = trt[expt[acc % order]]
        val[dead] = 0
        total += val
    return total % p


def _count_chunk(f: MultiPoly, i: int, start: int, stop: int) -> np.ndarray:
    p = f.field.p
    return np.bincount(trace_values(f, i, start, stop), minlength=p)


def trace_counts(f: MultiPoly, i: int, budget: int = DEFAULT_BUDGET, workers: int = 1) -> list[int]:
    """N_t = #{x in F_{q^i}^n : Tr f(x) = t} for t in F_p."""
    if i < 1:
        raise ValueError("extension step must be >= 1")
    total = f.field.q ** (f.n * i)
    if total > budget:
        raise BudgetExceeded(total, budget)
    p = f.field.p
    bounds = [(s, min(s + _CHUNK, total)) for s in range(0, total, _CHUNK)]
    counts = np.zeros(p, dtype=np.int64)
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(lambda b: _count_chunk(f, i, *b), bounds):
                counts += part
    else:
        for b in bounds:
            counts += _count_chunk(f, i, *b)
    return [int(c) for c in counts]


def exponential_sum(f: MultiPoly, i: int = 1, budget: int = DEFAULT_BUDGET, workers: int = 1) -> CycInt:
    """S(A^n(F_{q^i}), f) = sum over x of Psi(Tr f(x)), exactly."""
    counts = trace_counts(f, i, budget, workers)
    return CycInt.from_full(f.field.p, counts)


def exponential_sums(f: MultiPoly, m: int, budget: int = DEFAULT_BUDGET, workers: int = 1) -> list[CycInt]:
    return [exponential_sum(f, i, budget, workers) for i in range(1, m + 1)]


# --- L-function series


def l_series(sums: Sequence[CycInt], check_integral: bool = True) -> list[CycRational]:
    """Coefficients L_0..L_m of exp(sum_i S_i t^i / i).

    Uses k L_k = sum_{j=1}^k S_j L_{k-j}.
    """
    if not sums:
        raise ValueError("need at least one sum")
    p = sums[0].p
    L = [CycRational.from_int(p, 1)]
    for k in range(1, len(sums) + 1):
        acc = CycRational.from_int(p, 0)
        for j in range(1, k + 1):
            acc = acc + L[k - j] * sums[j - 1]
        c = CycRational(acc.num, acc.den * k)
        if check_integral and not c.is_integral():
            raise IntegralityError(f"L-series coefficient t^{k} = {c} is not integral")
        L.append(c)
    return L


def power_sums_from_series(series: Sequence) -> list[CycRational]:
    """Inverse of l_series: S_1..S_m from L_0 = 1, L_1..L_m."""
    coeffs = [CycRational.lift(c) for c in series]
    p = coeffs[0].p
    S: list[CycRational] = []
    for k in range(1, len(coeffs)):
        acc = coeffs[k] * k
        for j in range(1, k):
            acc = acc - S[j - 1] * coeffs[k - j]
        S.append(acc)
    return S


def series_mul(a: Sequence, b: Sequence, m: int) -> list[CycRational]:
    """Product of two power series truncated to t^0..t^m."""
    a = [CycRational.lift(x) for x in a]
    b = [CycRational.lift(x) for x in b]
    p = (a or b)[0].p
    out = []
    for k in range(m + 1):
        acc = CycRational.from_int(p, 0)
        for j in range(k + 1):
            if j < len(a) and k - j < len(b) and a[j] and b[k - j]:
                acc = acc + a[j] * b[k - j]
        out.append(acc)
    return out


def lambda_from_newton(sums: Sequence[CycInt], n: int, d: int) -> list[CycInt]:
    """Lambda(t) = L^{(-1)^{n+1}}, assumed a polynomial of degree d.

    Power sums of the reciprocal roots are P_i = (-1)^n S_i.  Sums beyond
    index d, if supplied, are used as consistency checks.
    """
    if d < 0:
        raise ValueError("degree must be non-negative")
    if len(sums) < d:
        raise ValueError(f"need at least {d} sums, got {len(sums)}")
    if d == 0 and not sums:
        raise ValueError("need at least one sum to confirm degree 0")
    p = sums[0].p
    sign = -1 if n % 2 else 1
    P = [CycRational.lift(s * sign) for s in sums]
    e = [CycRational.from_int(p, 1)]
    for k in range(1, d + 1):
        acc = CycRational.from_int(p, 0)
        for i in range(1, k + 1):
            term = e[k - i] * P[i - 1]
            acc = acc + term if i % 2 == 1 else acc - term
        ek = CycRational(acc.num, acc.den * k)
        if not ek.is_integral():
            raise DegreeMismatch(f"e_{k} = {ek} is not integral: degree {d} is wrong")
        e.append(ek)
    # Newton for k > d with e_k = 0: sum_{i=1}^{d+... } must reproduce P_k
    for k in range(d + 1, len(sums) + 1):
        acc = CycRational.from_int(p, 0)
        for i in range(1, k + 1):
            if k - i <= d:
                term = e[k - i] * P[i - 1]
                acc = acc + term if i % 2 == 1 else acc - term
        if acc:
            raise DegreeMismatch(f"sum S_{k} inconsistent with a degree-{d} polynomial")
    return [(x if k % 2 == 0 else -x).to_cycint() for k, x in enumerate(e)]


def lambda_power_sums(lam: Sequence[CycInt], n: int, m: int) -> list[CycInt]:
    """S_1..S_m implied by Lambda; inverse of lambda_from_newton."""
    p = lam[0].p
    coeffs = [CycRational.lift(c) for c in lam] + [CycRational.from_int(p, 0)] * max(0, m + 1 - len(lam))
    # log Lambda = -sum_i P_i t^i / i and Lambda' / Lambda gives P via the same recursion as l_series
    neg_p = power_sums_from_series(coeffs[: m + 1])
    sign = -1 if n % 2 else 1
    return [(-(x) * sign).to_cycint() for x in neg_p]


@dataclass
class RationalFunction:
    numerator: list[CycRational]
    denominator: list[CycRational]

    @property
    def is_polynomial(self) -> bool:
        return len(self.denominator) == 1

    def expand(self, m: int) -> list[CycRational]:
        """Power series of numerator/denominator up to t^m."""
        den = self.denominator
        inv0 = den[0].inverse()
        out = []
        for k in range(m + 1):
            acc = self.numerator[k] if k < len(self.numerator) else CycRational.from_int(den[0].p, 0)
            for j in range(1, min(k, len(den) - 1) + 1):
                acc = acc - den[j] * out[k - j]
            out.append(acc * inv0)
        return out

    def to_json(self):
        return {"numerator": [c.to_json() for c in self.numerator],
                "denominator": [c.to_json() for c in self.denominator]}


def _solve_exact(rows: list[list[CycRational]], rhs: list[CycRational], nvar: int):
    """A particular solution of rows * x = rhs over Q(zeta_p), or None if inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(nvar):
        piv = next((k for k in range(r, len(aug)) if aug[k][col]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = aug[r][col].inverse()
        aug[r] = [v * inv for v in aug[r]]
        for k in range(len(aug)):
            if k != r and aug[k][col]:
                c = aug[k][col]
                aug[k] = [a - c * b for a, b in zip(aug[k], aug[r])]
        pivots.append(col)
        r += 1
    for k in range(r, len(aug)):
        if aug[k][nvar]:
            return None
    p = rhs[0].p if rhs else 2
    x = [CycRational.from_int(p, 0)] * nvar
    for k, col in enumerate(pivots):
        x[col] = aug[k][nvar]
    return x


def rational_reconstruct(series: Sequence, dmax_num: int, dmax_den: int) -> RationalFunction:
    """Smallest numerator/denominator (denominator constant term 1) matching the series.

    ``series`` holds L_0..L_m; requires m >= dmax_num + dmax_den + 1.  Pairs
    of degrees are tried in order of total degree, then denominator degree.
    """
    coeffs = [CycRational.lift(c) for c in series]
    m = len(coeffs) - 1
    if m < dmax_num + dmax_den + 1:
        raise ValueError(f"series order {m} too short for degree bounds ({dmax_num}, {dmax_den})")
    p = coeffs[0].p
    zero = CycRational.from_int(p, 0)
    pairs = sorted(((a, b) for a in range(dmax_num + 1) for b in range(dmax_den + 1)),
                   key=lambda t: (t[0] + t[1], t[1]))
    for dn, dd in pairs:
        # coefficient of t^k in series * (1 + q_1 t + ... + q_dd t^dd) vanishes for dn < k <= m
        rows, rhs = [], []
        for k in range(dn + 1, m + 1):
            rows.append([coeffs[k - j] if k - j >= 0 else zero for j in range(1, dd + 1)])
            rhs.append(-coeffs[k])
        if dd == 0:
            if all(not c for c in coeffs[dn + 1:]):
                num = coeffs[: dn + 1]
                return RationalFunction(_strip(num), [CycRational.from_int(p, 1)])
            continue
        sol = _solve_exact(rows, rhs, dd)
        if sol is None:
            continue
        den = [CycRational.from_int(p, 1)] + sol
        num = series_mul(coeffs, den, dn)
        return RationalFunction(_strip(num), _strip(den))
    raise ReconstructionError(f"no rational function with degrees <= ({dmax_num}, {dmax_den}) matches")


def _strip(cs: list[CycRational]) -> list[CycRational]:
    cs = list(cs)
    while len(cs) > 1 and not cs[-1]:
        cs.pop()
    return cs


# --- archimedean checks


@dataclass
class WeilReport:
    target: str
    moduli: dict[int, list[str]]
    max_deviation: str
    tol: float
    passed: bool
    dps: int
    degree: int

    def to_json(self):
        return {
            "target_modulus": self.target,
            "reciprocal_root_moduli": {str(c): v for c, v in self.moduli.items()},
            "max_deviation": self.max_deviation,
            "tolerance": repr(self.tol),
            "precision_digits": self.dps,
            "degree": self.degree,
            "passed": self.passed,
        }


def _roots(coeffs_high_first, dps: int):
    with mpmath.workdps(dps):
        return mpmath.polyroots(coeffs_high_first, maxsteps=200 + 20 * len(coeffs_high_first),
                                extraprec=2 * dps)


def reciprocal_roots(lam: Sequence[CycInt], c: int, dps: int = 50, max_dps: int = 800):
    """Reciprocal roots of Lambda embedded by zeta -> exp(2 pi i c / p), with precision escalation."""
    coeffs = list(lam)
    while len(coeffs) > 1 and not coeffs[-1]:
        coeffs.pop()
    if len(coeffs) == 1:
        return [], dps
    cur = dps
    while True:
        try:
            with mpmath.workdps(cur):
                emb = [x.embed(c, cur) for x in coeffs]
                roots = _roots(list(reversed(emb)), cur)
                return [1 / r for r in roots], cur
        except mpmath.libmp.libhyper.NoConvergence:
            if cur >= max_dps:
                raise RootFindingError(f"root finding failed at {cur} digits") from None
            cur = min(2 * cur, max_dps)


def weil_check(lam: Sequence[CycInt], q: int, n: int, tol: float = 1e-9, dps: int = 50) -> WeilReport:
    """Deviation of all reciprocal-root moduli of Lambda from q^{n/2}, over every embedding."""
    p = lam[0].p
    moduli: dict[int, list[str]] = {}
    used = dps
    with mpmath.workdps(dps):
        target = mpmath.sqrt(mpmath.mpf(q) ** n)
        worst = mpmath.mpf(0)
    degree = 0
    for c in range(1, p):
        roots, used_c = reciprocal_roots(lam, c, dps)
        used = max(used, used_c)
        degree = len(roots)
        with mpmath.workdps(used_c):
            mods = [abs(r) for r in roots]
            for m in mods:
                worst = max(worst, abs(m - target))
            moduli[c] = [mpmath.nstr(m, dps - 5) for m in mods]
    return WeilReport(
        target=mpmath.nstr(target, dps - 5),
        moduli=moduli,
        max_deviation=mpmath.nstr(worst, 10),
        tol=tol,
        passed=bool(worst <= tol),
        dps=used,
        degree=degree,
    )


@dataclass
class SumBoundReport:
    rows: list[dict] = field(default_factory=list)
    passed: bool = True

    def to_json(self):
        return {"rows": self.rows, "passed": self.passed}


def sum_bound_check(f: MultiPoly, milnor: int, i_max: int, budget: int = DEFAULT_BUDGET,
                    sums: Sequence[CycInt] | None = None, dps: int = 50) -> SumBoundReport:
    """Compare max over embeddings of |S_i| with M_f q^{ni/2}; evidence only, never a theorem."""
    p, q, n = f.field.p, f.field.q, f.n
    rep = SumBoundReport()
    slack = mpmath.mpf(10) ** (-(dps - 10))
    for i in range(1, i_max + 1):
        s = sums[i - 1] if sums is not None and i <= len(sums) else exponential_sum(f, i, budget)
        with mpmath.workdps(dps):
            biggest = max(abs(s.embed(c, dps)) for c in range(1, p))
            bound = milnor * mpmath.sqrt(mpmath.mpf(q) ** (n * i))
            ok = biggest <= bound * (1 + slack) + slack
            rep.rows.append({
                "i": i,
                "max_abs_sum": mpmath.nstr(biggest, 30),
                "bound": mpmath.nstr(bound, 30),
                "margin": mpmath.nstr(bound - biggest, 30),
                "within_bound": bool(ok),
            })
        rep.passed = rep.passed and bool(ok)
    return rep


@dataclass
class LReport:
    p: int
    n: int
    sums: list[CycInt]
    series: list[CycRational]
    lam: list[CycInt] | None = None
    rational: RationalFunction | None = None
    weil: WeilReport | None = None
    method: str = ""

    @property
    def lambda_degree(self) -> int | None:
        return None if self.lam is None else len(self.lam) - 1

    def to_json(self):
        out = {
            "sums": [s.to_json() for s in self.sums],
            "l_series": [c.to_json() for c in self.series],
            "method": self.method,
            "lambda": None if self.lam is None else [c.to_json() for c in self.lam],
            "lambda_degree": self.lambda_degree,
        }
        if self.rational is not None:
            out["rational"] = self.rational.to_json()
        if self.weil is not None:
            out["weil"] = self.weil.to_json()
        return out


def default_order(delta: int, n: int) -> int:
    return 2 * max(delta - 1, 0) ** n + 2


def l_function(f: MultiPoly, degree_hint: int | None = None, m: int | None = None,
               budget: int = DEFAULT_BUDGET, workers: int = 1, tol: float = 1e-9,
               weil: bool = True) -> LReport:
    """Sums, L-series and Lambda for f.

    With a degree hint, Lambda comes from Newton's identities on S_1..S_m
    (default m = hint + 1).  Without one, L is rationally reconstructed from
    m = 2 (delta - 1)^n + 2 sums.
    """
    n, p = f.n, f.field.p
    if m is None:
        m = degree_hint + 1 if degree_hint is not None else default_order(max(f.degree, 1), n)
    sums = exponential_sums(f, m, budget, workers)
    series = l_series(sums)
    rep = LReport(p=p, n=n, sums=sums, series=series)
    if degree_hint is not None:
        rep.lam = lambda_from_newton(sums, n, degree_hint)
        rep.method = "newton"
    else:
        half = (m - 1) // 2
        rep.rational = rational_reconstruct(series, half, m - 1 - half)
        rep.method = "rational-reconstruction"
        # Lambda = L for odd n, 1/L for even n
        side = rep.rational.numerator if n % 2 else rep.rational.denominator
        other = rep.rational.denominator if n % 2 else rep.rational.numerator
        if len(other) == 1 and other[0] == 1 and all(c.is_integral() for c in side):
            rep.lam = [c.to_cycint() for c in side]
    if weil and rep.lam is not None:
        rep.weil = weil_check(rep.lam, f.field.q, n, tol)
    return rep
