"""The complex (Omega^., df ^ -) over F_q with its weight filtration.

A k-form is a dict mapping (subset, monomial) to a nonzero field code, where
subset is a strictly increasing tuple of 0-based variable indices.  The basis
element x^m dx_S has weight |m| + (n - k)(delta - 1); F_l is spanned by basis
elements of weight <= l, and df ^ - preserves F_l.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .ff import FieldSpec
from .ideals import buchberger, milnor_sum, quotient_dim
from .linalg import nullspace, row_reduce
from .mpoly import MultiPoly, PolyError, gradient

Monomial = tuple[int, ...]
Form = dict  # (subset, monomial) -> code
BasisIndex = tuple[tuple[int, ...], Monomial]


class NonIsolatedCriticalLocus(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def monomials_of_degree(n: int, d: int) -> tuple[Monomial, ...]:
    if d < 0:
        return ()
    if n == 0:
        return ((),) if d == 0 else ()
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


def form_weight(n: int, delta: int, k: int, coeff_deg: int) -> int:
    return coeff_deg + (n - k) * (delta - 1)


def wedge_dx(i: int, S: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """dx_i ^ dx_S = sign * dx_{S + i}, or None if i in S."""
    if i in S:
        return None
    below = sum(1 for s in S if s < i)
    return (-1 if below % 2 else 1), tuple(sorted(S + (i,)))


def phi(f: MultiPoly, omega: Form, grad: list[MultiPoly] | None = None) -> Form:
    """df ^ omega."""
    F = f.field
    grad = gradient(f) if grad is None else grad
    out: dict = {}
    for (S, m), c in omega.items():
        for i, g in enumerate(grad):
            w = wedge_dx(i, S)
            if w is None or not g:
                continue
            sign, T = w
            cc = c if sign == 1 else F.neg(c)
            for gm, gc in g.terms.items():
                key = (T, tuple(a + b for a, b in zip(gm, m)))
                v = F.add(out.get(key, 0), F.mul(gc, cc))
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
    return out


def weighted_basis(n: int, delta: int, k: int, weight: int) -> list[BasisIndex]:
    """Basis k-forms of exactly the given weight."""
    l = weight - (n - k) * (delta - 1)
    if l < 0 or not 0 <= k <= n:
        return []
    mons = monomials_of_degree(n, l)
    return [(S, m) for S in itertools.combinations(range(n), k) for m in mons]


def filtered_basis(n: int, delta: int, k: int, r: int) -> list[BasisIndex]:
    """Basis of F_r Omega^k, ordered by weight then index."""
    out = []
    for w in range(0, r + 1):
        out.extend(weighted_basis(n, delta, k, w))
    return out


def _weight_of(n: int, delta: int, b: BasisIndex) -> int:
    S, m = b
    return form_weight(n, delta, len(S), sum(m))


def _image_columns(f: MultiPoly, grad, basis: list[BasisIndex]) -> list[Form]:
    return [phi(f, {b: 1}, grad) for b in basis]


def _matrix(F: FieldSpec, columns: list[Form], targets: list[BasisIndex]) -> list[list[int]]:
    """Rows indexed by targets, columns by the source vectors."""
    pos = {b: i for i, b in enumerate(targets)}
    rows = [[0] * len(columns) for _ in targets]
    for j, col in enumerate(columns):
        for b, c in col.items():
            i = pos.get(b)
            if i is not None:
                rows[i][j] = c
    return rows


def graded_piece_dims(fdelta: MultiPoly, r: int, s: int, delta: int | None = None) -> int:
    """dim E_1^{r,s}: Koszul cohomology of the weight-r slice for the homogeneous top part."""
    if not fdelta.is_homogeneous() or fdelta.is_zero():
        raise PolyError("graded_piece_dims needs a nonzero homogeneous form")
    n, F = fdelta.n, fdelta.field
    delta = fdelta.degree if delta is None else delta
    k = r + s
    if not 0 <= k <= n:
        return 0
    grad = gradient(fdelta)
    src = weighted_basis(n, delta, k, r)
    if not src:
        return 0

    def rank_of(kk: int) -> int:
        a = weighted_basis(n, delta, kk, r)
        b = weighted_basis(n, delta, kk + 1, r)
        if not a or not b:
            return 0
        M = _matrix(F, _image_columns(fdelta, grad, a), b)
        return len(row_reduce(F, M, len(a))[0])

    return len(src) - rank_of(k) - (rank_of(k - 1) if k >= 1 else 0)


def regular_sequence_check(fdelta: MultiPoly) -> tuple[bool, int | None]:
    """Partials of the form are a regular sequence iff the Jacobian quotient has dim (delta-1)^n."""
    if not fdelta.is_homogeneous() or fdelta.degree < 1:
        raise PolyError("regular_sequence_check needs a homogeneous form of degree >= 1")
    grads = [g for g in gradient(fdelta) if g]
    if not grads:
        return False, None
    dim = quotient_dim(buchberger(grads))
    return dim == (fdelta.degree - 1) ** fdelta.n, dim


@dataclass
class CellResult:
    dim: int
    witness: Form | None = None


def _require_nonconstant(f: MultiPoly):
    if f.degree < 1:
        raise PolyError("the weight filtration needs a polynomial of degree >= 1")


def _spectral_cell(f: MultiPoly, delta: int, t: int, r: int, k: int, want_witness: bool) -> CellResult:
    n, F = f.n, f.field
    if not 0 <= k <= n or r < 0:
        return CellResult(0)
    grad = gradient(f)

    # Z_t^r = {w in F_r Omega^k : phi(w) in F_{r-t}}
    src = filtered_basis(n, delta, k, r)
    top = [b for b in src if _weight_of(n, delta, b) == r]
    if not top:
        return CellResult(0)
    if k < n:
        high = [b for w in range(max(r - t + 1, 0), r + 1) for b in weighted_basis(n, delta, k + 1, w)]
    else:
        high = []
    if high:
        M = _matrix(F, _image_columns(f, grad, src), high)
        Z = nullspace(F, M, len(src))
    else:
        Z = [[1 if j == i else 0 for j in range(len(src))] for i in range(len(src))]
    top_idx = [i for i, b in enumerate(src) if _weight_of(n, delta, b) == r]
    zproj = [[v[i] for i in top_idx] for v in Z]

    # boundaries: phi(Z_{t-1}^{r+t-1}) projected to weight r
    bproj: list[list[int]] = []
    if k >= 1:
        bsrc = filtered_basis(n, delta, k - 1, r + t - 1)
        if bsrc:
            images = _image_columns(f, grad, bsrc)
            above = [b for w in range(r + 1, r + t) for b in weighted_basis(n, delta, k, w)]
            if above:
                M2 = _matrix(F, images, above)
                Zb = nullspace(F, M2, len(bsrc))
            else:
                Zb = [[1 if j == i else 0 for j in range(len(bsrc))] for i in range(len(bsrc))]
            img_rows = _matrix(F, images, top)  # rows: weight-r targets, cols: bsrc
            for v in Zb:
                vec = []
                for row in img_rows:
                    acc = 0
                    for a, b in zip(row, v):
                        if a and b:
                            acc = F.add(acc, F.mul(a, b))
                    vec.append(acc)
                bproj.append(vec)
    ncols = len(top)
    rb = len(row_reduce(F, bproj, ncols)[0])
    rz = len(row_reduce(F, bproj + zproj, ncols)[0])
    dim = rz - rb
    witness = None
    if dim and want_witness:
        cur = rb
        for v, zp in zip(Z, zproj):
            nr = len(row_reduce(F, bproj + [zp], ncols)[0])
            if nr > cur:
                witness = {src[i]: c for i, c in enumerate(v) if c}
                break
    return CellResult(dim, witness)


def spectral_page(f: MultiPoly, t: int, r: int, s: int, delta: int | None = None) -> int:
    """dim E_t^{r,s} = dim (Z_t^r + F_{r-1}) / (phi(Z_{t-1}^{r+t-1}) + F_{r-1}) in total degree r+s."""
    if t < 1:
        raise ValueError("page index must be >= 1")
    _require_nonconstant(f)
    delta = f.degree if delta is None else delta
    return _spectral_cell(f, delta, t, r, r + s, False).dim


@dataclass
class PageTable:
    t: int
    r_max: int
    n: int
    cells: dict[tuple[int, int], int] = field(default_factory=dict)
    witnesses: dict[tuple[int, int], Form] = field(default_factory=dict)

    def to_json(self):
        return {
            "t": self.t,
            "r_max": self.r_max,
            "cells": {f"{r},{s}": d for (r, s), d in sorted(self.cells.items())},
            "witnesses": {f"{r},{s}": form_to_json(w) for (r, s), w in sorted(self.witnesses.items())},
        }


def form_to_json(w: Form) -> list:
    return [{"dx": [i + 1 for i in S], "monomial": list(m), "coeff": c} for (S, m), c in sorted(w.items())]


def page_table(f: MultiPoly, t: int, r_max: int, witnesses: bool = False) -> PageTable:
    if t < 1:
        raise ValueError("page index must be >= 1")
    _require_nonconstant(f)
    delta = f.degree
    tab = PageTable(t, r_max, f.n)
    for r in range(r_max + 1):
        for k in range(f.n + 1):
            res = _spectral_cell(f, delta, t, r, k, witnesses)
            tab.cells[(r, k - r)] = res.dim
            if res.witness:
                tab.witnesses[(r, k - r)] = res.witness
    return tab


@dataclass
class VanishingVerdict:
    e: int
    r_bound: int
    degrees: list[int]
    verified: bool
    cell: tuple[int, int] | None = None
    dim: int = 0
    witness: Form | None = None
    top_dims: dict[int, int] = field(default_factory=dict)

    def to_json(self):
        return {
            "e": self.e,
            "r_bound": self.r_bound,
            "total_degrees": self.degrees,
            "verdict": "verified-to-bound" if self.verified else "counterexample",
            "cell": None if self.cell is None else f"{self.cell[0]},{self.cell[1]}",
            "dim": self.dim,
            "witness": None if self.witness is None else form_to_json(self.witness),
            "top_degree_dims": {str(r): d for r, d in sorted(self.top_dims.items())},
        }


def default_r_bound(n: int, delta: int) -> int:
    return (n + 1) * max(delta - 1, 1)


def check_vanishing(f: MultiPoly, e: int, mode: str | int = "all", r_bound: int | None = None,
                    collect_top: bool = False) -> VanishingVerdict:
    """Scan E_e^{r,s} for r <= r_bound in total degrees != n (mode "all") or = m (mode int).

    A clean scan is only "verified up to r_bound", never a proof for all r.
    """
    n, delta = f.n, f.degree
    if e < 1:
        raise ValueError("page index must be >= 1")
    _require_nonconstant(f)
    r_bound = default_r_bound(n, delta) if r_bound is None else r_bound
    degrees = [k for k in range(n + 1) if k != n] if mode == "all" else [int(mode)]
    verdict = VanishingVerdict(e, r_bound, degrees, True)
    for r in range(r_bound + 1):
        for k in degrees:
            res = _spectral_cell(f, delta, e, r, k, True)
            if res.dim:
                verdict.verified = False
                verdict.cell = (r, k - r)
                verdict.dim = res.dim
                verdict.witness = res.witness
                return verdict
    if collect_top:
        for r in range(r_bound + 1):
            verdict.top_dims[r] = _spectral_cell(f, delta, e, r, n, False).dim
    return verdict


def h_top_dimension(f: MultiPoly) -> int:
    """dim H^n = dim of the Jacobian quotient = M_f."""
    m = milnor_sum(f)
    if m is None:
        raise NonIsolatedCriticalLocus("Jacobian quotient is infinite-dimensional: critical locus not isolated")
    return m
