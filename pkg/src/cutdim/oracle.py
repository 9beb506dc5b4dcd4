"""Optimization oracles and the shared point cache.

The dimension algorithm only ever talks to an oracle: give it a
direction w, get back either a maximizer, an unboundedness certificate
(ray plus feasible witness), or infeasibility.  Two providers implement
that contract, one backed by the exact branch-and-bound solver and one
by explicit lattice enumeration (small instances; it doubles as the
reference implementation in tests).

Every optimal point an oracle returns is remembered in a PointCache.
Later runs, in particular face dimension runs for other cuts, can often
pull an affinely independent point straight from the cache instead of
paying two oracle calls.

Responses are verified on every query (feasibility, objective value,
ray directions); a failed check raises OracleSoundnessError rather than
letting a wrong point silently corrupt a dimension.  Set
VERIFY_RESPONSES to False to skip the checks.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .linalg import Vector, dot, vector
from .model import Inequality, MipInstance, evaluate
from .rational import rat
from .solver import SolveOptions, SolveStatus, solve_mip

VERIFY_RESPONSES = True

MAX_LATTICE_POINTS = 10**6


class OracleError(RuntimeError):
    pass


class OracleSoundnessError(OracleError):
    """An oracle response failed exact verification: a solver bug."""


class OracleInconclusive(OracleError):
    """The oracle hit its node or time limit before reaching a proof."""

    def __init__(self, message: str, status: Optional[SolveStatus] = None):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class Optimal:
    point: Vector
    value: object


@dataclass(frozen=True)
class Unbounded:
    ray: Vector
    witness: Optional[Vector] = None  # feasible point, when the solver has one


@dataclass(frozen=True)
class Infeasible:
    pass


OracleResponse = Union[Optimal, Unbounded, Infeasible]


class PointCache:
    """Feasible points seen so far, in first-seen order.

    Thread safe; `points()` returns an immutable snapshot.  When built
    with an instance, every insert is checked exactly against it, so a
    cache can never launder an infeasible point into a dimension proof.
    """

    def __init__(self, instance: Optional[MipInstance] = None, verify: bool = True):
        self._instance = instance
        self._verify = verify and instance is not None
        self._lock = threading.Lock()
        self._points: list[Vector] = []
        self._seen: set[Vector] = set()

    def add(self, point: Sequence) -> bool:
        """Insert a point; returns True when it was new."""
        pt = vector(point)
        if self._verify and not self._instance.is_feasible_point(pt):
            raise OracleSoundnessError(f"cached point is infeasible: {pt}")
        with self._lock:
            if pt in self._seen:
                return False
            self._seen.add(pt)
            self._points.append(pt)
            return True

    def points(self) -> tuple:
        with self._lock:
            return tuple(self._points)

    def snapshot(self) -> "PointCache":
        """Independent copy; concurrent analyses probe a frozen view."""
        clone = PointCache(self._instance, verify=False)
        clone._verify = self._verify
        with self._lock:
            clone._points = list(self._points)
            clone._seen = set(self._seen)
        return clone

    def __len__(self) -> int:
        with self._lock:
            return len(self._points)

    def __contains__(self, point) -> bool:
        with self._lock:
            return vector(point) in self._seen


def cache_probe(cache: PointCache, d: Sequence, gamma=None, face: Optional[Inequality] = None):
    """Look for a cached point proving progress along direction d.

    With `gamma` given, returns the first cached point whose d-value
    differs from gamma.  Without it, returns the first point that is
    part of a pair with distinct d-values (the caller re-probes with
    that point's value to get the partner).  `face` restricts the view
    to points lying on the face's hyperplane.  Returns None when the
    cache cannot help.
    """
    d = vector(d)
    pts = cache.points()
    if face is not None:
        pts = tuple(p for p in pts if evaluate(face, p) == 0)
    if gamma is not None:
        gamma = rat(gamma)
        for p in pts:
            if dot(d, p) != gamma:
                return p
        return None
    if not pts:
        return None
    first_value = dot(d, pts[0])
    for p in pts[1:]:
        if dot(d, p) != first_value:
            return pts[0]
    return None


def oracle_maximize(provider, w: Sequence) -> OracleResponse:
    """One oracle query: maximize w over the provider's feasible set.

    Validates the direction, verifies the response when enabled, and
    feeds optimal points (and unbounded witnesses) into the provider's
    cache.  All query accounting goes through here.
    """
    w = vector(w)
    if len(w) != provider.n:
        raise OracleError(f"direction has {len(w)} entries, oracle expects {provider.n}")
    response = provider.solve(w)
    if VERIFY_RESPONSES:
        _verify_response(provider, w, response)
    if provider.cache is not None:
        if isinstance(response, Optimal):
            provider.cache.add(response.point)
        elif isinstance(response, Unbounded) and response.witness is not None:
            provider.cache.add(response.witness)
    provider.query_count += 1
    return response


def _verify_response(provider, w, response) -> None:
    inst = provider.instance
    if isinstance(response, Infeasible):
        return
    if isinstance(response, Optimal):
        if not inst.is_feasible_point(response.point):
            raise OracleSoundnessError("optimal point violates the instance")
        for coeffs, beta in provider.equations:
            if dot(coeffs, response.point) != beta:
                raise OracleSoundnessError("optimal point leaves the face hyperplane")
        if dot(w, response.point) != response.value:
            raise OracleSoundnessError("reported value disagrees with the point")
        return
    ray, witness = response.ray, response.witness
    if all(v == 0 for v in ray):
        raise OracleSoundnessError("unbounded response with a zero ray")
    if dot(w, ray) <= 0:
        raise OracleSoundnessError("ray does not improve the objective")
    for row in inst.constraint_matrix:
        if dot(row, ray) > 0:
            raise OracleSoundnessError("ray leaves the constraint rows")
    for j in range(inst.num_vars):
        if inst.lower_bounds[j] is not None and ray[j] < 0:
            raise OracleSoundnessError("ray leaves a lower bound")
        if inst.upper_bounds[j] is not None and ray[j] > 0:
            raise OracleSoundnessError("ray leaves an upper bound")
    for coeffs, _ in provider.equations:
        if dot(coeffs, ray) != 0:
            raise OracleSoundnessError("ray leaves the face hyperplane")
    if witness is not None:
        if not inst.is_feasible_point(witness):
            raise OracleSoundnessError("unbounded witness is infeasible")
        for coeffs, beta in provider.equations:
            if dot(coeffs, witness) != beta:
                raise OracleSoundnessError("unbounded witness leaves the face hyperplane")


class MipOracle:
    """Oracle backed by the exact branch-and-bound solver.

    `equations` restrict the feasible set to a hyperplane intersection;
    `restrict` stacks one more, sharing instance and cache, which is how
    face dimension runs are built.
    """

    def __init__(
        self,
        instance: MipInstance,
        cache: Optional[PointCache] = None,
        equations: Sequence = (),
        time_limit: Optional[float] = 60.0,
        node_limit: Optional[int] = None,
    ):
        self.instance = instance
        self.cache = cache
        self.equations = tuple((vector(a), rat(b)) for a, b in equations)
        self.time_limit = time_limit
        self.node_limit = node_limit
        self.query_count = 0

    @property
    def n(self) -> int:
        return self.instance.num_vars

    def restrict(self, coefficients: Sequence, beta) -> "MipOracle":
        return MipOracle(
            self.instance,
            cache=self.cache,
            equations=self.equations + ((vector(coefficients), rat(beta)),),
            time_limit=self.time_limit,
            node_limit=self.node_limit,
        )

    def solve(self, w: Vector) -> OracleResponse:
        result = solve_mip(
            self.instance,
            objective=w,
            options=SolveOptions(
                extra_equations=self.equations,
                time_limit=self.time_limit,
                node_limit=self.node_limit,
            ),
        )
        if result.status is SolveStatus.OPTIMAL:
            return Optimal(result.best_point, result.primal_value)
        if result.status is SolveStatus.INFEASIBLE:
            return Infeasible()
        if result.status is SolveStatus.UNBOUNDED:
            return Unbounded(result.ray, result.best_point)
        raise OracleInconclusive(
            f"solver stopped at {result.status.value} after {result.node_count} nodes",
            status=result.status,
        )


class BruteForceOracle:
    """Oracle by explicit lattice enumeration.

    Only for pure-integer instances whose bounding box holds at most
    MAX_LATTICE_POINTS points; the feasible set is enumerated once and
    every query is an exact argmax scan in lexicographic point order.
    """

    def __init__(
        self,
        instance: MipInstance,
        cache: Optional[PointCache] = None,
        equations: Sequence = (),
        _points: Optional[tuple] = None,
    ):
        self.instance = instance
        self.cache = cache
        self.equations = tuple((vector(a), rat(b)) for a, b in equations)
        self.query_count = 0
        if _points is not None:
            self.points = _points
        else:
            self.points = tuple(enumerate_lattice(instance))
        for coeffs, beta in self.equations:
            self.points = tuple(p for p in self.points if dot(coeffs, p) == beta)

    @property
    def n(self) -> int:
        return self.instance.num_vars

    def restrict(self, coefficients: Sequence, beta) -> "BruteForceOracle":
        return BruteForceOracle(
            self.instance,
            cache=self.cache,
            equations=self.equations + ((vector(coefficients), rat(beta)),),
            _points=self.points,
        )

    def solve(self, w: Vector) -> OracleResponse:
        if not self.points:
            return Infeasible()
        best = None
        best_point = None
        for p in self.points:
            v = sum(wi * pi for wi, pi in zip(w, p))
            if best is None or v > best:
                best = v
                best_point = p
        return Optimal(vector(best_point), rat(best))


def enumerate_lattice(instance: MipInstance) -> list[tuple]:
    """All feasible points of a boxed pure-integer instance, lex order."""
    n = instance.num_vars
    if not instance.is_pure_integer():
        raise ValueError("lattice enumeration needs a pure-integer instance")
    ranges = []
    size = 1
    for j in range(n):
        lo, hi = instance.lower_bounds[j], instance.upper_bounds[j]
        if lo is None or hi is None:
            raise ValueError(f"variable {j} is unbounded; cannot enumerate")
        lo_i = int(math.ceil(rat(lo)))
        hi_i = int(math.floor(rat(hi)))
        size *= max(0, hi_i - lo_i + 1)
        if size > MAX_LATTICE_POINTS:
            raise ValueError(f"bounding box exceeds {MAX_LATTICE_POINTS} lattice points")
        ranges.append(range(lo_i, hi_i + 1))
    rows = instance.constraint_matrix
    rhs = instance.rhs
    out = []
    for pt in itertools.product(*ranges):
        if all(dot(row, pt) <= b for row, b in zip(rows, rhs)):
            out.append(pt)
    return out
