"""Exact branch and bound for mixed-integer programs.

Every bound is an exact rational, so pruning decisions, the incumbent
and the reported dual bound are never victims of drift.  The search is
deterministic: best-bound node selection with ties broken by depth and
creation order, most-fractional branching with ties broken by variable
index, down branch created before the up branch.

A node means one LP relaxation solved; the root is node 1.  Nodes that
are pruned by bound before their LP is solved are discarded uncounted.
After every counted node the current dual bound (max of primal value and
best open node bound) is appended to a trace, which is what the cut
impact protocol reads at a fixed node budget.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .linalg import Vector, dot, integerize, vector
from .model import Inequality, MipInstance
from .rational import is_integral, rat, rat_floor
from .simplex import LPStatus, solve_lp


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NODE_LIMIT = "node_limit"
    TIME_LIMIT = "time_limit"


@dataclass(frozen=True)
class SolveOptions:
    """Knobs for one solve.

    extra_constraints are appended to the instance rows (this is how a
    cut enters a run); extra_equations restrict to a hyperplane, which
    face dimension runs use.  An incumbent seeds the primal bound and
    must be feasible.  Limits of None mean unlimited.
    """

    extra_constraints: tuple = ()
    extra_equations: tuple = ()
    incumbent: Optional[Sequence] = None
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    best_point: Optional[Vector]
    primal_value: object  # rational, or -inf with no incumbent, +inf if unbounded
    dual_bound: object  # rational or +-inf
    node_count: int
    trace: tuple  # ((node index, dual bound at that node), ...)
    ray: Optional[Vector] = None  # recession direction when UNBOUNDED


@dataclass(order=True)
class _Node:
    sort_key: tuple
    bound: object = field(compare=False)  # parent LP value, +inf at the root
    depth: int = field(compare=False)
    lower: tuple = field(compare=False)
    upper: tuple = field(compare=False)


def _node_key(bound, depth: int, index: int) -> tuple:
    # +inf bounds first, then larger bounds, then shallower, then older
    if bound == math.inf:
        return (0, 0, depth, index)
    return (1, -bound, depth, index)


def solve_mip(
    inst: MipInstance,
    objective: Optional[Sequence] = None,
    options: Optional[SolveOptions] = None,
) -> SolveResult:
    """Maximize `objective` (default: the instance objective) over `inst`."""
    options = options or SolveOptions()
    obj = vector(objective) if objective is not None else inst.objective
    if len(obj) != inst.num_vars:
        raise ValueError(
            f"objective has {len(obj)} entries, instance has {inst.num_vars} variables"
        )

    rows = list(inst.constraint_matrix)
    rhs = list(inst.rhs)
    for cut in options.extra_constraints:
        coeffs = cut.coefficients if isinstance(cut, Inequality) else vector(cut[0])
        cut_rhs = cut.rhs if isinstance(cut, Inequality) else rat(cut[1])
        if len(coeffs) != inst.num_vars:
            raise ValueError("extra constraint length mismatch")
        rows.append(coeffs)
        rhs.append(cut_rhs)
    eq_rows = []
    eq_rhs = []
    for coeffs, value in options.extra_equations:
        coeffs = vector(coeffs)
        if len(coeffs) != inst.num_vars:
            raise ValueError("extra equation length mismatch")
        eq_rows.append(coeffs)
        eq_rhs.append(rat(value))

    primal = -math.inf
    best: Optional[Vector] = None
    if options.incumbent is not None:
        inc = vector(options.incumbent)
        if not inst.is_feasible_point(inc) or any(
            dot(r, inc) > b for r, b in zip(rows[inst.num_constraints:], rhs[inst.num_constraints:])
        ) or any(dot(r, inc) != b for r, b in zip(eq_rows, eq_rhs)):
            raise ValueError("incumbent is not feasible for this run")
        primal = dot(obj, inc)
        best = inc

    deadline = None
    if options.time_limit is not None:
        deadline = time.monotonic() + options.time_limit

    heap: list[_Node] = []
    counter = 0
    root = _Node(
        _node_key(math.inf, 0, counter), math.inf, 0, inst.lower_bounds, inst.upper_bounds
    )
    heapq.heappush(heap, root)
    node_count = 0
    trace: list[tuple] = []
    dual = math.inf
    status: Optional[SolveStatus] = None
    int_vars = sorted(inst.integer_vars)

    def open_bound():
        if not heap:
            return -math.inf
        return heap[0].bound

    while heap:
        # discard nodes that cannot improve the incumbent; they are not solved
        while heap and heap[0].bound != math.inf and heap[0].bound <= primal:
            heapq.heappop(heap)
        if not heap:
            break
        if deadline is not None and time.monotonic() > deadline:
            status = SolveStatus.TIME_LIMIT
            break
        if options.node_limit is not None and node_count >= options.node_limit:
            status = SolveStatus.NODE_LIMIT
            break

        node = heapq.heappop(heap)
        node_count += 1
        lp = solve_lp(obj, rows, rhs, eq_rows, eq_rhs, node.lower, node.upper)

        if lp.status is LPStatus.UNBOUNDED:
            # only possible at the root: child regions are subsets
            return _resolve_unbounded(inst, rows, rhs, eq_rows, eq_rhs, lp, deadline, node_count)

        if lp.status is LPStatus.OPTIMAL:
            val, point = lp.value, lp.point
            if val > primal:
                frac_var = _pick_branch_variable(point, int_vars)
                if frac_var is None:
                    primal = val
                    best = point
                else:
                    v = point[frac_var]
                    fl = rat(rat_floor(v))
                    child_depth = node.depth + 1
                    counter += 1
                    down = _replace_bound(node, frac_var, upper=fl)
                    heapq.heappush(
                        heap, _Node(_node_key(val, child_depth, counter), val, child_depth, *down)
                    )
                    counter += 1
                    up = _replace_bound(node, frac_var, lower=fl + 1)
                    heapq.heappush(
                        heap, _Node(_node_key(val, child_depth, counter), val, child_depth, *up)
                    )

        dual = max(primal, open_bound())
        trace.append((node_count, dual))

    if status is None:
        status = SolveStatus.OPTIMAL if best is not None else SolveStatus.INFEASIBLE
        dual = primal if best is not None else -math.inf

    return SolveResult(
        status=status,
        best_point=best,
        primal_value=primal,
        dual_bound=dual,
        node_count=node_count,
        trace=tuple(trace),
    )


def _pick_branch_variable(point, int_vars) -> Optional[int]:
    """Most fractional integer variable, ties to the smallest index."""
    best_j = None
    best_score = None
    for j in int_vars:
        v = rat(point[j])
        if is_integral(v):
            continue
        f = v - rat_floor(v)
        score = min(f, 1 - f)
        if best_score is None or score > best_score:
            best_score = score
            best_j = j
    return best_j


def _replace_bound(node: _Node, j: int, lower=None, upper=None):
    lo = list(node.lower)
    hi = list(node.upper)
    if lower is not None:
        lo[j] = lower
    if upper is not None:
        hi[j] = upper
    return tuple(lo), tuple(hi)


def _resolve_unbounded(inst, rows, rhs, eq_rows, eq_rhs, lp, deadline, node_count):
    """Root LP is unbounded: decide between UNBOUNDED and INFEASIBLE.

    For rational data the recession cones of the relaxation and of the
    mixed-integer hull coincide, so an unbounded relaxation plus any
    feasible mixed-integer point certifies an unbounded problem.  The
    probe solves the same instance with a zero objective; its nodes are
    bookkeeping of the probe, not of this solve.
    """
    remaining = None
    if deadline is not None:
        remaining = max(0.0, deadline - time.monotonic())
    probe_inst = MipInstance(
        name=inst.name,
        num_vars=inst.num_vars,
        constraint_matrix=tuple(rows),
        rhs=tuple(rhs),
        objective=vector([0] * inst.num_vars),
        integer_vars=inst.integer_vars,
        lower_bounds=inst.lower_bounds,
        upper_bounds=inst.upper_bounds,
    )
    probe = solve_mip(
        probe_inst,
        options=SolveOptions(
            extra_equations=tuple(zip(eq_rows, eq_rhs)), time_limit=remaining
        ),
    )
    if probe.status is SolveStatus.TIME_LIMIT:
        return SolveResult(
            status=SolveStatus.TIME_LIMIT,
            best_point=None,
            primal_value=-math.inf,
            dual_bound=math.inf,
            node_count=node_count,
            trace=((node_count, math.inf),),
        )
    if probe.status is SolveStatus.INFEASIBLE:
        return SolveResult(
            status=SolveStatus.INFEASIBLE,
            best_point=None,
            primal_value=-math.inf,
            dual_bound=-math.inf,
            node_count=node_count,
            trace=((node_count, -math.inf),),
        )
    return SolveResult(
        status=SolveStatus.UNBOUNDED,
        best_point=probe.best_point,
        primal_value=math.inf,
        dual_bound=math.inf,
        node_count=node_count,
        trace=((node_count, math.inf),),
        ray=integerize(lp.ray),
    )


def solve_lp_relaxation(
    inst: MipInstance,
    objective: Optional[Sequence] = None,
    extra_constraints: Sequence = (),
    extra_equations: Sequence = (),
):
    """LP relaxation of the instance, integrality dropped."""
    obj = vector(objective) if objective is not None else inst.objective
    rows = list(inst.constraint_matrix)
    rhs = list(inst.rhs)
    for cut in extra_constraints:
        if isinstance(cut, Inequality):
            rows.append(cut.coefficients)
            rhs.append(cut.rhs)
        else:
            rows.append(vector(cut[0]))
            rhs.append(rat(cut[1]))
    eq_rows = [vector(coeffs) for coeffs, _ in extra_equations]
    eq_rhs = [rat(v) for _, v in extra_equations]
    return solve_lp(obj, rows, rhs, eq_rows, eq_rhs, inst.lower_bounds, inst.upper_bounds)
