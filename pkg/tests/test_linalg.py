import random

import pytest

from cutdim.linalg import (
    LinAlgError,
    affine_rank,
    dot,
    integerize,
    is_in_span,
    orthogonal_complement_basis,
    rank,
    solve_linear_system,
    vector,
)
from cutdim.rational import rat


def test_rank_fixtures():
    assert rank([]) == 0
    assert rank([[1, 0], [0, 1]]) == 2
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[0, 0, 0]]) == 0


def test_rank_invariance_properties():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randint(1, 4)
        m = rng.randint(1, 4)
        rows = [[rat(rng.randint(-5, 5)) for _ in range(n)] for _ in range(m)]
        r = rank(rows)
        shuffled = rows[:]
        rng.shuffle(shuffled)
        assert rank(shuffled) == r
        scale = rat(rng.randint(1, 7), rng.randint(1, 7))
        assert rank([[scale * v for v in row] for row in rows]) == r


def test_is_in_span():
    assert is_in_span([2, 4], [[1, 2]])
    assert not is_in_span([1, 0], [[0, 1]])
    assert is_in_span([0, 0], [])


def test_orthogonal_complement_fixtures():
    basis = orthogonal_complement_basis([], 2)
    assert len(basis) == 2 and rank(basis) == 2

    basis = orthogonal_complement_basis([[1, 0, 0]], 3)
    assert len(basis) == 2
    for b in basis:
        assert dot(b, [1, 0, 0]) == 0

    basis = orthogonal_complement_basis([[1, 1]], 2)
    assert len(basis) == 1
    (b,) = basis
    # proportional to (1, -1)
    assert b[0] * (-1) == b[1] * 1 and b[0] != 0


def test_orthogonal_complement_property():
    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(1, 5)
        m = rng.randint(0, 5)
        rows = [[rat(rng.randint(-4, 4)) for _ in range(n)] for _ in range(m)]
        basis = orthogonal_complement_basis(rows, n)
        assert len(basis) == n - rank(rows)
        assert rank(basis) == len(basis)
        for b in basis:
            for row in rows:
                assert dot(b, row) == 0


def test_affine_rank_fixtures():
    assert affine_rank([]) == -1
    assert affine_rank([[1, 1]]) == 0
    assert affine_rank([[0, 0], [1, 0], [0, 1]]) == 2


def test_affine_rank_combination_property():
    rng = random.Random(17)
    for _ in range(30):
        n = rng.randint(1, 4)
        pts = [
            vector([rng.randint(-3, 3) for _ in range(n)])
            for _ in range(rng.randint(1, 5))
        ]
        r = affine_rank(pts)
        # affine combination: coefficients summing to one
        weights = [rat(rng.randint(-2, 2)) for _ in pts]
        weights[0] += 1 - sum(weights)
        combo = vector(
            [sum(w * p[j] for w, p in zip(weights, pts)) for j in range(n)]
        )
        assert affine_rank(pts + [combo]) == r


def test_integerize():
    assert integerize([rat(1, 2), rat(-1, 3)]) == vector([3, -2])
    assert integerize([rat(-1, 2)]) == vector([1])  # leading entry positive
    assert integerize([0, 0]) == vector([0, 0])


def test_solve_linear_system():
    x = solve_linear_system([[1, 1], [1, -1]], [3, 1])
    assert x == vector([2, 1])
    assert solve_linear_system([[1, 1], [2, 2]], [1, 3]) is None  # inconsistent
    x = solve_linear_system([[1, 1]], [2])  # underdetermined: free vars at 0
    assert x is not None and dot([1, 1], x) == 2


def test_dimension_mismatch():
    from cutdim.linalg import matrix

    with pytest.raises(LinAlgError):
        dot([1, 2], [1])
    with pytest.raises(LinAlgError):
        matrix([[1, 2], [1]])
