"""Exact integer solvers for the ratio-preservation balance equations.

Each affected tree node yields one linear equation ``a*x - b*y = c`` over the
instances to add, where ``a``/``b`` come from the node's original class ratio.
This module finds the full one-parameter solution family, the minimal natural
solution under look-ahead lower bounds, the chained/merged system under the
monotonicity conditions, and ratio relaxations when an equation is unsolvable
or too expensive.

All arithmetic uses Python's exact integers, so there is no overflow to guard
against.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence


class UnsolvableError(ValueError):
    """An equation (or a node of a system) admits no integer solution."""

    def __init__(self, message: str, node_id: int | None = None):
        super().__init__(message)
        self.node_id = node_id


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) and a*s + b*t = g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class Ratio:
    """Target class balance P:N of a node, kept unreduced."""

    p: int
    n: int

    def __post_init__(self) -> None:
        if self.p < 1 or self.n < 1:
            raise ValueError(f"ratio parts must be >= 1, got {self.p}:{self.n}")

    def __str__(self) -> str:
        return f"{self.p}:{self.n}"


@dataclass(frozen=True)
class DiophantineEq:
    """``a*x - b*y = c`` with a = target N, b = target P; c may be negative."""

    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        if self.a < 1 or self.b < 1:
            raise ValueError("coefficients must be positive")

    def holds(self, x: int, y: int) -> bool:
        return self.a * x - self.b * y == self.c

    def __str__(self) -> str:
        return f"{self.a}x - {self.b}y = {self.c}"


@dataclass(frozen=True)
class GeneralSolution:
    """One-parameter family (x0 + step_x*t, y0 + step_y*t) covering all solutions.

    Both coordinates are nondecreasing in t, which makes "minimal natural
    under lower bounds" well defined.
    """

    eq: DiophantineEq
    x0: int
    y0: int
    step_x: int
    step_y: int
    g: int

    def member(self, t: int) -> tuple[int, int]:
        return self.x0 + self.step_x * t, self.y0 + self.step_y * t

    def contains(self, x: int, y: int) -> bool:
        if not self.eq.holds(x, y):
            return False
        dx = x - self.x0
        return dx % self.step_x == 0 and y == self.y0 + self.step_y * (dx // self.step_x)


def solve_general(eq: DiophantineEq) -> GeneralSolution | None:
    """Full integer solution family of the equation, or None when unsolvable.

    The particular solution is canonicalized to the smallest member with
    x >= 0.
    """
    g, s, _ = extended_gcd(eq.a, eq.b)
    if eq.c % g:
        return None
    step_x = eq.b // g
    step_y = eq.a // g
    # a*s + b*t = g  =>  a*(s*c/g) - b*(-t*c/g) = c
    x0 = s * (eq.c // g)
    y0 = (eq.a * x0 - eq.c) // eq.b
    shift = -(x0 // step_x)  # brings x0 into [0, step_x)
    x0 += step_x * shift
    y0 += step_y * shift
    return GeneralSolution(eq, x0, y0, step_x, step_y, g)


def _ceil_div(num: int, den: int) -> int:
    # den > 0; exact integer ceiling (floats would lose precision on big c)
    return -((-num) // den)


def minimal_natural(sol: GeneralSolution, lb_x: int = 0, lb_y: int = 0) -> tuple[int, int]:
    """The family member with the least parameter t such that
    x >= max(0, lb_x) and y >= max(0, lb_y).  Unique by monotonicity.
    """
    lo_x = max(0, lb_x)
    lo_y = max(0, lb_y)
    t = max(
        _ceil_div(lo_x - sol.x0, sol.step_x),
        _ceil_div(lo_y - sol.y0, sol.step_y),
    )
    return sol.member(t)


def ratio_equation(target: Ratio, current: tuple[int, int]) -> DiophantineEq:
    """Equation for additions (x, y) restoring ``current`` to the target ratio:
    (p' + x)/(n' + y) = P/N  <=>  N*x - P*y = P*n' - N*p'.
    """
    p_now, n_now = current
    return DiophantineEq(a=target.n, b=target.p, c=target.p * n_now - target.n * p_now)


@dataclass(frozen=True)
class NodeConstraint:
    """One node of the affected skeleton: its equation plus the skeleton
    children whose cumulative solutions act as lower bounds."""

    node_id: int
    target: Ratio
    current: tuple[int, int]
    children: tuple[int, ...] = ()

    @property
    def eq(self) -> DiophantineEq:
        return ratio_equation(self.target, self.current)


@dataclass
class NodeSolution:
    node_id: int
    target: Ratio
    eq: DiophantineEq
    cumulative: tuple[int, int]
    relaxed_from: Ratio | None = None


@dataclass
class SystemSolution:
    """Cumulative (x*, y*) per node; every node dominates the sum of its
    children componentwise, and the assignment is the componentwise minimum
    among all feasible ones (each node takes the least family member above
    its children's sums, and both coordinates are monotone in the family
    parameter, so lowering any node violates the bounds or naturality)."""

    nodes: dict[int, NodeSolution]

    def cumulative(self, node_id: int) -> tuple[int, int]:
        return self.nodes[node_id].cumulative

    @property
    def relaxations(self) -> list[tuple[int, Ratio, Ratio]]:
        return [
            (ns.node_id, ns.relaxed_from, ns.target)
            for ns in self.nodes.values()
            if ns.relaxed_from is not None
        ]


class RelaxMode(Enum):
    SOLVABILITY = "solvability"
    COST = "cost"


def relax_ratio(
    target: Ratio,
    current: tuple[int, int],
    lb: tuple[int, int] = (0, 0),
    max_shift: int = 0,
    mode: RelaxMode = RelaxMode.COST,
) -> tuple[Ratio, DiophantineEq, tuple[int, int]]:
    """Search the nearby ratios (P-d, N+d) and (P+d, N-d) for d <= max_shift.

    SOLVABILITY returns the smallest d whose equation is solvable; COST
    returns the candidate minimizing x* + y* under the lower bounds, breaking
    ties by smaller d, then by the (P-d, N+d) direction.  Candidate shifts
    preserve P + N and keep both parts >= 1.
    """
    if target.p + target.n < 2:
        raise ValueError("ratio too small to relax")
    candidates: list[tuple[int, int, Ratio]] = []  # (d, direction, ratio)
    for d in range(max_shift + 1):
        for direction, (p, n) in enumerate(((target.p - d, target.n + d), (target.p + d, target.n - d))):
            if d == 0 and direction == 1:
                continue
            if p < 1 or n < 1:
                continue
            candidates.append((d, direction, Ratio(p, n)))

    best: tuple[tuple[int, int, int], Ratio, DiophantineEq, tuple[int, int]] | None = None
    for d, direction, ratio in candidates:
        eq = ratio_equation(ratio, current)
        sol = solve_general(eq)
        if sol is None:
            continue
        xy = minimal_natural(sol, *lb)
        if mode is RelaxMode.SOLVABILITY:
            return ratio, eq, xy
        key = (xy[0] + xy[1], d, direction)
        if best is None or key < best[0]:
            best = (key, ratio, eq, xy)
    if best is None:
        raise UnsolvableError(
            f"no solvable ratio within shift {max_shift} of {target} for counts {current}"
        )
    return best[1], best[2], best[3]


def solve_system(
    constraints: Sequence[NodeConstraint],
    relax: Mapping[int, int] | None = None,
) -> SystemSolution:
    """Solve the skeleton bottom-up: each node takes the minimal natural
    solution of its family at or above the componentwise sum of its
    children's cumulative solutions (condition C2; C1 is the single-child
    case).

    Nodes listed in ``relax`` may shift their target ratio by up to the given
    budget (cost-minimizing).  An unsolvable node without budget raises
    UnsolvableError carrying the node id.
    """
    relax = dict(relax or {})
    by_id = {c.node_id: c for c in constraints}
    if len(by_id) != len(constraints):
        raise ValueError("duplicate node ids in constraint system")

    solved: dict[int, NodeSolution] = {}

    def solve_node(constraint: NodeConstraint) -> None:
        if constraint.node_id in solved:
            return
        lb_x = lb_y = 0
        for child_id in constraint.children:
            if child_id not in by_id:
                raise ValueError(f"constraint {constraint.node_id} references unknown child {child_id}")
            solve_node(by_id[child_id])
            cx, cy = solved[child_id].cumulative
            lb_x += cx
            lb_y += cy
        budget = relax.get(constraint.node_id, 0)
        if budget > 0:
            ratio, eq, xy = relax_ratio(
                constraint.target, constraint.current, (lb_x, lb_y), budget, RelaxMode.COST
            )
            relaxed_from = constraint.target if ratio != constraint.target else None
            solved[constraint.node_id] = NodeSolution(
                constraint.node_id, ratio, eq, xy, relaxed_from
            )
            return
        eq = constraint.eq
        family = solve_general(eq)
        if family is None:
            raise UnsolvableError(
                f"node {constraint.node_id}: {eq} has no integer solution "
                f"(gcd({eq.a},{eq.b}) does not divide {eq.c}); a relax budget may help",
                node_id=constraint.node_id,
            )
        solved[constraint.node_id] = NodeSolution(
            constraint.node_id, constraint.target, eq, minimal_natural(family, lb_x, lb_y)
        )

    for constraint in constraints:
        solve_node(constraint)
    return SystemSolution(solved)
