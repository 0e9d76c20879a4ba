"""Dense row reduction over F_q on lists of field codes."""

from __future__ import annotations

from .ff import FieldSpec


def row_reduce(F: FieldSpec, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form; pivots are taken left to right.

    Returns the nonzero reduced rows and their pivot columns.  The input is
    not modified.
    """
    rows = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    out: list[list[int]] = []
    prime = F.a == 1
    p = F.p
    col = 0
    while rows and col < ncols:
        piv = next((k for k, r in enumerate(rows) if r[col]), None)
        if piv is None:
            col += 1
            continue
        r = rows.pop(piv)
        inv = F.inv(r[col])
        if prime:
            r = [v * inv % p for v in r]
        else:
            r = [F.mul(v, inv) for v in r]
        for k, other in enumerate(rows):
            c = other[col]
            if c:
                if prime:
                    rows[k] = [(a - c * b) % p for a, b in zip(other, r)]
                else:
                    nc = F.neg(c)
                    rows[k] = [F.add(a, F.mul(nc, b)) for a, b in zip(other, r)]
        for k, other in enumerate(out):
            c = other[col]
            if c:
                if prime:
                    out[k] = [(a - c * b) % p for a, b in zip(other, r)]
                else:
                    nc = F.neg(c)
                    out[k] = [F.add(a, F.mul(nc, b)) for a, b in zip(other, r)]
        rows = [x for x in rows if any(x)]
        out.append(r)
        pivots.append(col)
        col += 1
    return out, pivots


def rank(F: FieldSpec, rows: list[list[int]], ncols: int) -> int:
    return len(row_reduce(F, rows, ncols)[0])


def nullspace(F: FieldSpec, rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis of {v : M v = 0} for the matrix with the given rows."""
    red, pivots = row_reduce(F, rows, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for r, pc in zip(red, pivots):
            if r[free]:
                v[pc] = F.neg(r[free])
        basis.append(v)
    return basis


def transpose(rows: list[list[int]], ncols: int) -> list[list[int]]:
    if not rows:
        return [[] for _ in range(ncols)]
    return [list(col) for col in zip(*rows)]


def apply(F: FieldSpec, mat_rows: list[list[int]], v: list[int]) -> list[int]:
    out = []
    for r in mat_rows:
        acc = 0
        for a, b in zip(r, v):
            if a and b:
                acc = F.add(acc, F.mul(a, b))
        out.append(acc)
    return out
