"""Shared test utilities: independent reference oracles.

The reference LP solver here deliberately avoids the package's own
linear algebra: it enumerates candidate vertices with a plain
Fraction-based Gaussian elimination, so a simplex bug cannot hide
behind shared code.  Instance generators are reused from the package's
selftest module (they are data producers, not implementations under
test).
"""

from __future__ import annotations

import itertools
import os
from fractions import Fraction
from typing import Optional, Sequence


def gauss_solve(rows, rhs) -> Optional[list]:
    """Solve a square system exactly with Fractions; None if singular."""
    n = len(rows)
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col]
        aug[col] = [v / inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * p for v, p in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def reference_lp(objective, rows, rhs, lower, upper):
    """Maximize over a boxed polyhedron by exhaustive vertex enumeration.

    All bounds must be finite, which makes the feasible set a polytope:
    if it is nonempty some vertex is optimal, and every vertex solves n
    of the constraints (rows plus box faces) with equality.  Returns
    (value, point) or (None, None) for an empty set.
    """
    n = len(objective)
    all_rows = [list(map(Fraction, row)) for row in rows]
    all_rhs = [Fraction(b) for b in rhs]
    for j in range(n):
        low = [Fraction(0)] * n
        low[j] = Fraction(-1)
        all_rows.append(low)
        all_rhs.append(-Fraction(lower[j]))
        high = [Fraction(0)] * n
        high[j] = Fraction(1)
        all_rows.append(high)
        all_rhs.append(Fraction(upper[j]))

    def feasible(x) -> bool:
        return all(
            sum(a * v for a, v in zip(row, x)) <= b
            for row, b in zip(all_rows, all_rhs)
        )

    best_value = None
    best_point = None
    for subset in itertools.combinations(range(len(all_rows)), n):
        point = gauss_solve([all_rows[i] for i in subset], [all_rhs[i] for i in subset])
        if point is None or not feasible(point):
            continue
        value = sum(Fraction(c) * v for c, v in zip(objective, point))
        if best_value is None or value > best_value:
            best_value = value
            best_point = point
    return best_value, best_point


def random_boxed_lp(rng, max_vars: int = 4, max_rows: int = 4):
    """Random integer-data LP over a small box, as plain lists."""
    n = rng.randint(1, max_vars)
    m = rng.randint(0, max_rows)
    rows = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)]
    rhs = [rng.randint(-6, 10) for _ in range(m)]
    lower = [rng.randint(-3, 0) for _ in range(n)]
    upper = [lo + rng.randint(0, 4) for lo in lower]
    objective = [rng.randint(-5, 5) for _ in range(n)]
    return objective, rows, rhs, lower, upper


def miplib_file(name: str) -> Optional[str]:
    """Path of a benchmark MPS file, or None when not available."""
    roots = []
    env = os.environ.get("CUTDIM_MIPLIB_DIR")
    if env:
        roots.append(env)
    roots.append(os.path.join(os.path.dirname(__file__), "data", "miplib"))
    for root in roots:
        for candidate in (f"{name}.mps", name):
            path = os.path.join(root, candidate)
            if os.path.exists(path):
                return path
    return None
