"""Groebner bases over F_q, quotient dimensions, Milnor numbers, and the
smooth-complete-intersection hypothesis checks for the second-highest-degree
degeneration criterion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .ff import FieldSpec
from .mpoly import GREVLEX, MultiPoly, PolyError, TermOrder, format_poly, gradient, homogeneous_parts, product

Monomial = tuple[int, ...]

INFINITE = None  # quotient_dim result for positive-dimensional ideals


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _quo(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


@dataclass
class GroebnerBasis:
    order: TermOrder
    generators: list[MultiPoly]
    n: int
    field: FieldSpec

    @property
    def leading_monomials(self) -> list[Monomial]:
        return [g.leading(self.order)[0] for g in self.generators]

    def is_unit(self) -> bool:
        return any(not any(m) for m in self.leading_monomials)

    def is_zero(self) -> bool:
        return not self.generators

    def __str__(self) -> str:
        return "[" + ", ".join(format_poly(g, self.order) for g in self.generators) + "]"


def _reduce(f: MultiPoly, basis: Sequence[MultiPoly], order: TermOrder,
            leads: Sequence[tuple[Monomial, int]]) -> MultiPoly:
    """Full remainder of f modulo basis (all terms reduced)."""
    F = f.field
    key = order.key
    work = dict(f.terms)
    rem: dict[Monomial, int] = {}
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        for g, (lm, lc) in zip(basis, leads):
            if _divides(lm, m):
                shift = _quo(m, lm)
                factor = F.neg(F.mul(c, F.inv(lc)))
                for gm, gc in g.terms.items():
                    if gm == lm:
                        continue
                    t = tuple(a + b for a, b in zip(gm, shift))
                    v = F.add(work.get(t, 0), F.mul(factor, gc))
                    if v:
                        work[t] = v
                    else:
                        work.pop(t, None)
                break
        else:
            rem[m] = c
    return MultiPoly(f.n, F, rem)


def _spoly(f: MultiPoly, g: MultiPoly, order: TermOrder) -> MultiPoly:
    F = f.field
    lf, cf = f.leading(order)
    lg, cg = g.leading(order)
    L = _lcm(lf, lg)
    return f.shift(_quo(L, lf), F.inv(cf)) - g.shift(_quo(L, lg), F.inv(cg))


def buchberger(gens: Sequence[MultiPoly], order: TermOrder = GREVLEX) -> GroebnerBasis:
    """Reduced Groebner basis, normal selection strategy with the coprime and chain criteria."""
    if not gens:
        raise PolyError("buchberger needs at least one generator")
    n, F = gens[0].n, gens[0].field
    gens = [g for g in gens if g]
    for g in gens:
        if g.n != n or g.field is not F:
            raise PolyError("generators live in different rings")
    key = order.key
    G: list[MultiPoly] = []
    leads: list[tuple[Monomial, int]] = []
    pairs: set[tuple[int, int]] = set()

    def add(h: MultiPoly):
        h = h.monic(order)
        lm = h.leading(order)[0]
        k = len(G)
        G.append(h)
        leads.append((lm, 1))
        for j in range(k):
            pairs.add((j, k))

    for g in gens:
        h = _reduce(g, G, order, leads)
        if h:
            add(h)
    while pairs:
        # normal strategy: smallest lcm of leading monomials first
        i, j = min(pairs, key=lambda t: (key(_lcm(leads[t[0]][0], leads[t[1]][0])), t))
        pairs.discard((i, j))
        li, lj = leads[i][0], leads[j][0]
        L = _lcm(li, lj)
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading monomials
        chain = False
        for k in range(len(G)):
            if k in (i, j):
                continue
            if _divides(leads[k][0], L):
                a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
                if a not in pairs and b not in pairs:
                    chain = True
                    break
        if chain:
            continue
        h = _reduce(_spoly(G[i], G[j], order), G, order, leads)
        if h:
            add(h)
    return _reduced(G, order, n, F)


def _reduced(G: list[MultiPoly], order: TermOrder, n: int, F: FieldSpec) -> GroebnerBasis:
    leads = [g.leading(order)[0] for g in G]
    keep = []
    for k, lm in enumerate(leads):
        redundant = False
        for j, other in enumerate(leads):
            if j == k:
                continue
            if _divides(other, lm) and (other != lm or j < k):
                redundant = True
                break
        if not redundant:
            keep.append(G[k])
    out = []
    for k, g in enumerate(keep):
        rest = keep[:k] + keep[k + 1:]
        rl = [(r.leading(order)[0], r.leading(order)[1]) for r in rest]
        lm, lc = g.leading(order)
        tail = MultiPoly(n, F, {m: c for m, c in g.terms.items() if m != lm})
        tail = _reduce(tail, rest, order, rl)
        out.append((MultiPoly(n, F, {lm: lc}) + tail).monic(order))
    out.sort(key=lambda g: order.key(g.leading(order)[0]))
    return GroebnerBasis(order, out, n, F)


def normal_form(f: MultiPoly, gb: GroebnerBasis) -> MultiPoly:
    if gb.is_zero():
        return f
    leads = [g.leading(gb.order) for g in gb.generators]
    return _reduce(f, gb.generators, gb.order, leads)


def in_ideal(f: MultiPoly, gb: GroebnerBasis) -> bool:
    return normal_form(f, gb).is_zero()


def standard_monomials(gb: GroebnerBasis) -> list[Monomial] | None:
    """Monomials outside the leading-term ideal, or None when there are infinitely many."""
    if gb.is_zero():
        return None
    n = gb.n
    leads = gb.leading_monomials
    caps = []
    for i in range(n):
        pure = [m[i] for m in leads if all(e == 0 for j, e in enumerate(m) if j != i) and m[i] > 0]
        if not pure and not gb.is_unit():
            return None
        caps.append(min(pure) if pure else 0)
    if gb.is_unit():
        return []
    out = []
    for m in itertools.product(*(range(c) for c in caps)):
        if not any(_divides(l, m) for l in leads):
            out.append(tuple(m))
    return out


def quotient_dim(gb: GroebnerBasis) -> int | None:
    """dim_{F_q} of the quotient ring; None means infinite."""
    std = standard_monomials(gb)
    return None if std is None else len(std)


def jacobian_ideal(f: MultiPoly, order: TermOrder = GREVLEX) -> GroebnerBasis:
    grads = [g for g in gradient(f) if g]
    if not grads:
        return GroebnerBasis(order, [], f.n, f.field)
    return buchberger(grads, order)


def milnor_sum(f: MultiPoly, order: TermOrder = GREVLEX) -> int | None:
    """M_f = dim F_q[x]/(df/dx_1, ..., df/dx_n); None for a non-isolated critical locus."""
    return quotient_dim(jacobian_ideal(f, order))


def origin_supported(gb: GroebnerBasis) -> bool:
    """True iff the only common zero (over the algebraic closure) is the origin, or there is none."""
    D = quotient_dim(gb)
    if D is None:
        return False
    if D == 0:
        return True
    for j in range(gb.n):
        m = [0] * gb.n
        m[j] = D
        if not in_ideal(MultiPoly.monomial(gb.n, gb.field, tuple(m)), gb):
            return False
    return True


# --- Hilbert series of monomial ideals


def _minimalize(gens: list[Monomial]) -> list[Monomial]:
    gens = sorted(set(gens), key=sum)
    out: list[Monomial] = []
    for g in gens:
        if not any(_divides(h, g) for h in out):
            out.append(g)
    return out


def _kpoly(gens: list[Monomial]) -> dict[int, int]:
    """Numerator K(t) of the Hilbert series K(t)/(1-t)^n of S/(gens)."""
    gens = _minimalize(gens)
    if not gens:
        return {0: 1}
    if len(gens) == 1:
        d = sum(gens[0])
        return {0: 1, d: -1} if d else {}
    last = gens[-1]
    rest = gens[:-1]
    a = _kpoly(rest)
    colon = [tuple(max(x - y, 0) for x, y in zip(g, last)) for g in rest]
    b = _kpoly(colon)
    d = sum(last)
    out = dict(a)
    for k, v in b.items():
        out[k + d] = out.get(k + d, 0) - v
    return {k: v for k, v in out.items() if v}


def hilbert_numerator(gb: GroebnerBasis) -> dict[int, int]:
    return _kpoly(gb.leading_monomials)


def ci_numerator(degrees: Sequence[int]) -> dict[int, int]:
    """prod_j (1 - t^{d_j})."""
    out = {0: 1}
    for d in degrees:
        nxt: dict[int, int] = {}
        for k, v in out.items():
            nxt[k] = nxt.get(k, 0) + v
            nxt[k + d] = nxt.get(k + d, 0) - v
        out = {k: v for k, v in nxt.items() if v}
    return out


# --- smoothness checks


def _det(mat: list[list[MultiPoly]]) -> MultiPoly:
    k = len(mat)
    if k == 1:
        return mat[0][0]
    acc = None
    for j in range(k):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor)
        acc = term if acc is None else (acc + term if j % 2 == 0 else acc - term)
    return acc


def jacobian_minors(forms: Sequence[MultiPoly]) -> list[MultiPoly]:
    k = len(forms)
    n = forms[0].n
    jac = [gradient(g) for g in forms]
    out = []
    for cols in itertools.combinations(range(n), k):
        d = _det([[row[c] for c in cols] for row in jac])
        if d:
            out.append(d)
    return out


@dataclass
class CICheck:
    forms: list[str]
    codim: int
    passed: bool
    reason: str
    witness: list[str] | None = None

    def to_json(self):
        return {"forms": self.forms, "codim": self.codim, "passed": self.passed,
                "reason": self.reason, "witness": self.witness}


def smooth_ci_check(forms: Sequence[MultiPoly]) -> CICheck:
    """Do the forms cut out a smooth complete intersection of codimension len(forms) in P^{n-1}?

    When len(forms) >= n the only admissible locus is the empty one.
    """
    if not forms:
        raise PolyError("need at least one form")
    for g in forms:
        if g.is_zero() or not g.is_homogeneous():
            raise PolyError(f"{format_poly(g)} is not a nonzero homogeneous form")
    n = forms[0].n
    k = len(forms)
    names = [format_poly(g) for g in forms]
    gb = buchberger(list(forms))
    if k >= n:
        ok = origin_supported(gb)
        return CICheck(names, k, ok, "empty projective locus" if ok else "nonempty projective locus",
                       None if ok else [format_poly(g) for g in gb.generators])
    hs = hilbert_numerator(gb)
    want = ci_numerator([g.degree for g in forms])
    if hs != want:
        return CICheck(names, k, False, "not a complete intersection (Hilbert series mismatch)",
                       [format_poly(g) for g in gb.generators])
    aug = buchberger(list(forms) + jacobian_minors(forms))
    if not origin_supported(aug):
        return CICheck(names, k, False, "singular: forms and Jacobian minors share a projective zero",
                       [format_poly(g) for g in aug.generators])
    return CICheck(names, k, True, "smooth complete intersection")


@dataclass
class CIReport:
    subsets: list[dict] = field(default_factory=list)
    coprime: bool = False
    coprime_product: int = 0
    p: int = 0
    delta: int = 0
    delta_prime: int | None = None
    passed: bool = False
    predicted_e: int | None = None

    def to_json(self):
        return {
            "subsets": self.subsets,
            "p": self.p,
            "delta": self.delta,
            "delta_prime": self.delta_prime,
            "coprime_product": self.coprime_product,
            "coprime": self.coprime,
            "passed": self.passed,
            "predicted_e": self.predicted_e,
        }


class FactorizationError(ValueError):
    pass


def theorem_1_18_check(factors: Sequence[tuple[MultiPoly, int]], fdelta_prime: MultiPoly | None,
                       f: MultiPoly) -> CIReport:
    """Check the factorisation hypotheses that force degeneration at page delta - delta' + 1.

    ``factors`` is [(f_i, a_i)] with prod f_i^{a_i} equal to the top homogeneous
    part of f; ``fdelta_prime`` must be the second-highest homogeneous part.
    """
    dec = homogeneous_parts(f)
    if not factors:
        raise FactorizationError("empty factorisation")
    n, F = f.n, f.field
    prod = product((g ** a for g, a in factors), n, F)
    if prod != dec.top:
        raise FactorizationError(f"product of factors {format_poly(prod)} != top part {format_poly(dec.top)}")
    if dec.delta_prime is None:
        raise FactorizationError("f is homogeneous: no second-highest homogeneous part")
    if fdelta_prime is None:
        fdelta_prime = dec.second
    elif fdelta_prime != dec.second:
        raise FactorizationError(f"supplied f^(delta') {format_poly(fdelta_prime)} != {format_poly(dec.second)}")
    rep = CIReport(p=F.p, delta=dec.delta, delta_prime=dec.delta_prime)
    mult = dec.delta * dec.delta_prime * math.prod(a for _, a in factors)
    rep.coprime_product = mult
    rep.coprime = math.gcd(F.p, mult) == 1
    ok = rep.coprime
    r = len(factors)
    for k in range(1, r + 1):
        for sub in itertools.combinations(range(r), k):
            forms = [factors[i][0] for i in sub]
            entry = {"subset": [i + 1 for i in sub]}
            chk = smooth_ci_check(forms)
            entry["factors"] = chk.to_json()
            ok = ok and chk.passed
            if k >= 2 or factors[sub[0]][1] > 1:
                chk2 = smooth_ci_check([fdelta_prime] + forms)
                entry["with_second_part"] = chk2.to_json()
                ok = ok and chk2.passed
            rep.subsets.append(entry)
    rep.passed = ok
    if ok:
        rep.predicted_e = dec.delta - dec.delta_prime + 1
    return rep
