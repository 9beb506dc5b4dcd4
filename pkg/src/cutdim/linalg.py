"""Exact linear algebra over the rationals.

Vectors are tuples of rationals and matrices are tuples of row tuples;
both are immutable so they can be shared freely between threads.  All
eliminations run in exact arithmetic, so rank and span questions are
decided, never estimated.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Optional, Sequence

from .rational import ZERO, rat

Vector = tuple
Matrix = tuple


class LinAlgError(ValueError):
    pass


def vector(values: Iterable) -> Vector:
    return tuple(rat(v) for v in values)


def matrix(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(vector(r) for r in rows)
    widths = {len(r) for r in out}
    if len(widths) > 1:
        raise LinAlgError("ragged matrix")
    return out


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise LinAlgError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), ZERO)


def vec_sub(u: Sequence, v: Sequence) -> Vector:
    if len(u) != len(v):
        raise LinAlgError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def vec_add_scaled(u: Sequence, t, v: Sequence) -> Vector:
    """u + t*v"""
    if len(u) != len(v):
        raise LinAlgError(f"dimension mismatch: {len(u)} vs {len(v)}")
    t = rat(t)
    return tuple(a + t * b for a, b in zip(u, v))


def _echelon(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form. Returns (rref rows, pivot columns)."""
    work = [[rat(v) for v in row] for row in rows]
    if not work:
        return [], []
    ncols = len(work[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(work):
            break
        # partial pivot by largest magnitude keeps entries small-ish
        best = None
        for i in range(r, len(work)):
            if work[i][c] != 0 and (best is None or abs(work[i][c]) > abs(work[best][c])):
                best = i
        if best is None:
            continue
        work[r], work[best] = work[best], work[r]
        inv = 1 / work[r][c]
        work[r] = [v * inv for v in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    return work, pivots


def rank(rows: Sequence[Sequence]) -> int:
    _, pivots = _echelon(rows)
    return len(pivots)


def is_in_span(candidate: Sequence, rows: Sequence[Sequence]) -> bool:
    """True when `candidate` lies in the row span of `rows`."""
    rows = list(rows)
    if not rows:
        return all(v == 0 for v in candidate)
    base = rank(rows)
    return rank(rows + [list(candidate)]) == base


def integerize(vec: Sequence) -> Vector:
    """Scale to coprime integer entries, leading nonzero positive.

    The zero vector is returned unchanged.
    """
    vals = [rat(v) for v in vec]
    nonzero = [v for v in vals if v != 0]
    if not nonzero:
        return tuple(vals)
    scale = 1
    for v in vals:
        d = v.denominator
        scale = scale * d // gcd(scale, d)
    ints = [int(v * scale) for v in vals]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    first = next(v for v in ints if v != 0)
    if first < 0:
        ints = [-v for v in ints]
    return vector(ints)


def orthogonal_complement_basis(vectors: Sequence[Sequence], n: int) -> list[Vector]:
    """Basis of {y : v . y = 0 for every v in `vectors`} in Q^n.

    Basis vectors come from the reduced echelon form of the input (one
    per free column, unit entry on that column) and are scaled to coprime
    integers, so the output is deterministic and sparse when possible.
    With no input vectors this is the standard basis of Q^n.
    """
    for v in vectors:
        if len(v) != n:
            raise LinAlgError(f"vector of length {len(v)} in Q^{n}")
    rref, pivots = _echelon(vectors)
    pivot_set = set(pivots)
    basis: list[Vector] = []
    for free in range(n):
        if free in pivot_set:
            continue
        y = [ZERO] * n
        y[free] = rat(1)
        for row_idx, pc in enumerate(pivots):
            y[pc] = -rref[row_idx][free]
        basis.append(integerize(y))
    return basis


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of `points`; -1 when there are none."""
    pts = list(points)
    if not pts:
        return -1
    base = pts[0]
    return rank([vec_sub(p, base) for p in pts[1:]])


def solve_linear_system(rows: Sequence[Sequence], rhs: Sequence) -> Optional[Vector]:
    """One exact solution of rows . x = rhs, or None when inconsistent.

    Free variables are set to zero.
    """
    rows = list(rows)
    if len(rows) != len(rhs):
        raise LinAlgError("system shape mismatch")
    if not rows:
        return ()
    n = len(rows[0])
    aug = [list(r) + [rat(b)] for r, b in zip(rows, rhs)]
    rref, pivots = _echelon(aug)
    if n in pivots:
        return None  # pivot in the rhs column: inconsistent
    x = [ZERO] * n
    for row_idx, pc in enumerate(pivots):
        x[pc] = rref[row_idx][n]
    return tuple(x)
