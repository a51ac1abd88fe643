"""Sanitization pipeline: swap labels at sensitive leaves, add ratio-preserving
instances bottom-up with look-ahead, then complete the new instances top-down.

The bottom-up pass (class swapping plus instance addition) computes, per
affected node, the exact minimum number of instances that keeps the node's
class ratio, by solving the chained balance equations under the monotonicity
conditions.  The top-down pass assigns the attributes the new instances left
unspecified, holding back a child's information gain so neither the child's
own split nor its parent's is displaced on re-induction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from typing import Mapping, Sequence

from .dataset import (
    Dataset,
    Instance,
    Label,
    Provenance,
    add_partial_instances,
    swap_class,
)
from .diophantine import DiophantineEq, NodeConstraint, Ratio, solve_system
from .tree import (
    GAIN_TOLERANCE,
    DecisionTree,
    NodeStats,
    RulePath,
    RuleNotFoundError,
    better_gain,
    entropy,
    induce,
    information_gain,
    route_instances,
)


class HidingError(ValueError):
    """A hiding request cannot be honored on this tree."""


class CompletionStrategy(Enum):
    TWO_LEVEL_HOLDBACK = "holdback"
    EVEN_SPLIT = "evensplit"


@dataclass(frozen=True)
class HidingRequest:
    rule: RulePath

    @staticmethod
    def of(rule: RulePath | str, schema_names: Sequence[str]) -> "HidingRequest":
        if isinstance(rule, str):
            return HidingRequest(RulePath.parse(rule, schema_names))
        return HidingRequest(rule)


@dataclass
class SkeletonNode:
    node_id: int
    parent_id: int | None  # nearest skeleton ancestor
    children: tuple[int, ...]  # skeleton children
    delta: tuple[int, int]  # swap effect (dp, dn) absorbed by this node


@dataclass
class AffectedSkeleton:
    """Ancestors of the collapsed parents, with per-node swap deltas.

    Nodes with more than one skeleton child are intersection nodes where the
    effects of distinct hiding requests merge.
    """

    nodes: dict[int, SkeletonNode]
    collapsed: dict[int, int]  # request index -> collapsed parent node id (-1: none)
    leaf_ids: dict[int, int]  # request index -> sensitive leaf node id
    normalized_out: list[int] = field(default_factory=list)  # dropped duplicate/sibling requests
    #: nodes (collapsed parents and their sensitive leaves) that the
    #: swapped-away class must never re-enter
    hidden_class: dict[int, Label] = field(default_factory=dict)


@dataclass
class NodePlan:
    node_id: int
    path: tuple[tuple[int, int], ...]
    target: Ratio
    post_swap: tuple[int, int]
    equation: DiophantineEq
    cumulative: tuple[int, int]
    local: tuple[int, int]
    relaxed_from: Ratio | None = None
    synthetic_range: tuple[int, int] = (0, 0)  # [start, end) rows in the augmented dataset


@dataclass
class HidingPlan:
    requests: list[str]
    swapped_indices: list[int]
    nodes: dict[int, NodePlan]
    skeleton: AffectedSkeleton
    total_added: int
    warnings: list[str] = field(default_factory=list)
    side_effects: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "requests": self.requests,
            "swapped_indices": self.swapped_indices,
            "nodes": [
                {
                    "node": np.node_id,
                    "target": str(np.target),
                    "post_swap": list(np.post_swap),
                    "equation": {"a": np.equation.a, "b": np.equation.b, "c": np.equation.c},
                    "cumulative": list(np.cumulative),
                    "local": list(np.local),
                    "relaxed_from": str(np.relaxed_from) if np.relaxed_from else None,
                    "synthetic_rows": list(np.synthetic_range),
                }
                for np in sorted(self.nodes.values(), key=lambda np: np.node_id)
            ],
            "total_added": self.total_added,
            "warnings": self.warnings,
            "side_effects": self.side_effects,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)


def _leaf_delta(leaf_stats: NodeStats, klass: Label) -> tuple[int, int]:
    # Swapping the k rule-class instances at the leaf moves k from one class
    # to the other.
    if klass is Label.P:
        return -leaf_stats.p, leaf_stats.p
    return leaf_stats.n, -leaf_stats.n


def build_skeleton(
    tree: DecisionTree, requests: Sequence[HidingRequest | RulePath | str]
) -> AffectedSkeleton:
    """Resolve requests to leaves and collect the affected ancestor skeleton.

    Duplicate requests and sibling pairs (whose shared parent collapses
    either way) are normalized to a single representative.
    """
    resolved: list[tuple[int, RulePath]] = []
    for request in requests:
        rule = request.rule if isinstance(request, HidingRequest) else request
        if isinstance(rule, str):
            rule = RulePath.parse(rule, tree.schema_names)
        node_id = tree.locate_node(rule)
        node = tree.node(node_id)
        if not node.is_leaf:
            raise RuleNotFoundError(
                f"rule resolves to an internal node: {rule.format(tree.schema_names)}"
            )
        if node.leaf_class is not rule.klass:
            raise RuleNotFoundError(
                f"rule not found: leaf at {rule.format(tree.schema_names)} classifies as "
                f"{node.leaf_class.value}"
            )
        resolved.append((node_id, rule))

    kept: list[tuple[int, int, RulePath]] = []  # (request index, leaf id, rule)
    normalized_out: list[int] = []
    seen_leaves: set[int] = set()
    seen_parents: set[int | None] = set()
    for idx, (leaf_id, rule) in enumerate(resolved):
        parent = tree.parent_id(leaf_id)
        if leaf_id in seen_leaves or (parent is not None and parent in seen_parents):
            normalized_out.append(idx)
            continue
        seen_leaves.add(leaf_id)
        seen_parents.add(parent)
        kept.append((idx, leaf_id, rule))

    collapsed: dict[int, int] = {}
    leaf_ids: dict[int, int] = {}
    deltas: dict[int, list[int]] = {}
    collapsed_set: set[int] = set()
    hidden_class: dict[int, Label] = {}
    for idx, leaf_id, rule in kept:
        leaf = tree.node(leaf_id)
        delta = _leaf_delta(leaf.stats, rule.klass)
        parent_id = tree.parent_id(leaf_id)
        leaf_ids[idx] = leaf_id
        if parent_id is None:
            collapsed[idx] = -1  # hiding the only rule of a single-leaf tree
            continue
        parent = tree.node(parent_id)
        post = (parent.stats.p + delta[0], parent.stats.n + delta[1])
        if min(post) != 0:
            raise HidingError(
                f"request {rule.format(tree.schema_names)}: parent node {parent_id} keeps "
                f"both classes after the swap ({post[0]}p/{post[1]}n); not hidable by collapse"
            )
        collapsed[idx] = parent_id
        collapsed_set.add(parent_id)
        hidden_class[parent_id] = rule.klass
        # should additions be forced into the collapsed subtree anyway, keep
        # them off the sensitive leaf's own branch
        hidden_class[leaf_id] = rule.klass
        for anc in tree.ancestors(parent_id):
            slot = deltas.setdefault(anc, [0, 0])
            slot[0] += delta[0]
            slot[1] += delta[1]

    members = {node_id for node_id in deltas if node_id not in collapsed_set}
    nodes: dict[int, SkeletonNode] = {}
    children: dict[int, list[int]] = {node_id: [] for node_id in members}
    for node_id in members:
        up = tree.parent_id(node_id)
        while up is not None and up not in members:
            up = tree.parent_id(up)
        if up is not None:
            children[up].append(node_id)
        nodes[node_id] = SkeletonNode(node_id, up, (), tuple(deltas[node_id]))
    for node_id, kids in children.items():
        nodes[node_id].children = tuple(sorted(kids))
    return AffectedSkeleton(nodes, collapsed, leaf_ids, normalized_out, hidden_class)


def _resolve_relax(
    tree: DecisionTree, relax: Mapping[int | str, int] | None
) -> dict[int, int]:
    budgets: dict[int, int] = {}
    for key, value in (relax or {}).items():
        if key == "root":
            budgets[tree.root.node_id] = int(value)
        else:
            budgets[int(key)] = int(value)
    return budgets


def swap_and_add(
    tree: DecisionTree,
    ds: Dataset,
    requests: Sequence[HidingRequest | RulePath | str],
    relax: Mapping[int | str, int] | None = None,
) -> tuple[HidingPlan, Dataset]:
    """Bottom-up pass: swap the sensitive leaves, then append the exact
    minimal ratio-preserving partial instances along each path to the root.

    Each node's batch has the attributes on its root path fixed and
    everything else unspecified; the top-down pass completes them.
    """
    skeleton = build_skeleton(tree, requests)
    budgets = _resolve_relax(tree, relax)
    warnings: list[str] = []
    for node_id in budgets:
        if node_id not in skeleton.nodes and skeleton.nodes:
            warnings.append(f"relax budget for node {node_id} ignored: not an affected node")

    members = route_instances(tree, ds)
    swap_indices: list[int] = []
    rule_strings: list[str] = []
    for request in requests:
        rule = request.rule if isinstance(request, HidingRequest) else request
        if isinstance(rule, str):
            rule = RulePath.parse(rule, tree.schema_names)
        rule_strings.append(rule.format(tree.schema_names))
    for idx, leaf_id in skeleton.leaf_ids.items():
        if idx in skeleton.normalized_out:
            continue
        rule = RulePath.parse(rule_strings[idx], tree.schema_names)
        swap_indices.extend(
            i for i in members[leaf_id] if ds.instances[i].label is rule.klass
        )
    swap_indices = sorted(set(swap_indices))
    swapped = swap_class(ds, swap_indices)

    constraints = []
    for node_id, snode in skeleton.nodes.items():
        stats = tree.node(node_id).stats
        constraints.append(
            NodeConstraint(
                node_id=node_id,
                target=Ratio(stats.p, stats.n),
                current=(stats.p + snode.delta[0], stats.n + snode.delta[1]),
                children=snode.children,
            )
        )
    solution = solve_system(constraints, budgets)

    plans: dict[int, NodePlan] = {}
    augmented = swapped
    total = 0
    for node_id in sorted(skeleton.nodes):
        snode = skeleton.nodes[node_id]
        ns = solution.nodes[node_id]
        child_sum = [0, 0]
        for child in snode.children:
            cx, cy = solution.cumulative(child)
            child_sum[0] += cx
            child_sum[1] += cy
        local = (ns.cumulative[0] - child_sum[0], ns.cumulative[1] - child_sum[1])
        assert local[0] >= 0 and local[1] >= 0, "look-ahead bounds guarantee nonnegative locals"
        path = tree.path_to(node_id)
        fixed = {tree.schema_names[attr]: value for attr, value in path}
        start = len(augmented.instances)
        augmented = add_partial_instances(augmented, local[0], local[1], fixed)
        plans[node_id] = NodePlan(
            node_id=node_id,
            path=path,
            target=ns.target,
            post_swap=(
                tree.node(node_id).stats.p + snode.delta[0],
                tree.node(node_id).stats.n + snode.delta[1],
            ),
            equation=ns.eq,
            cumulative=ns.cumulative,
            local=local,
            relaxed_from=ns.relaxed_from,
            synthetic_range=(start, len(augmented.instances)),
        )
        total += local[0] + local[1]

    side_effects = [
        rule_strings[idx] + " (sibling collapse)" for idx in skeleton.normalized_out
    ]
    plan = HidingPlan(
        requests=rule_strings,
        swapped_indices=swap_indices,
        nodes=plans,
        skeleton=skeleton,
        total_added=total,
        warnings=warnings,
        side_effects=side_effects,
    )
    return plan, augmented


class _Allocator:
    """Top-down completion of partially specified synthetic instances.

    Tracks, per tree node, the rows known to be routed through it; synthetic
    rows enter deeper nodes only as their branch attributes get assigned.
    Gains over populations that still contain unspecified values treat the
    unspecified rows as a third, unsplittable group.
    """

    def __init__(self, tree: DecisionTree, ds: Dataset, plan: HidingPlan):
        self.tree = tree
        self.plan = plan
        self.labels = [inst.label for inst in ds.instances]
        self.values: list[list[int | None]] = [list(inst.values) for inst in ds.instances]
        self.synthetic = [inst.provenance is Provenance.SYNTHETIC for inst in ds.instances]
        self.warnings: list[str] = []
        self.processed: list[int] = []

        self.members: dict[int, list[int]] = {node.node_id: [] for node in tree.nodes()}
        self.pops: dict[int, list[int]] = {node.node_id: [0, 0] for node in tree.nodes()}
        self.pool: dict[int, list[int]] = {node.node_id: [] for node in tree.nodes()}
        self.leaf_arrivals: dict[int, list[int]] = {}
        self.locked = set(plan.nodes)  # nodes whose population is fixed by an equation
        # A collapsed parent went one-class; letting the swapped-away class back
        # in would offer re-induction the hidden rule again.
        self.block_class: dict[int, Label] = dict(plan.skeleton.hidden_class)

        for i, inst in enumerate(ds.instances):
            if self.synthetic[i]:
                continue
            node = tree.root
            while True:
                self._enter(node.node_id, i)
                if node.is_leaf:
                    break
                node = node.children()[inst.values[node.attribute]]
        for node_id, np_ in plan.nodes.items():
            start, end = np_.synthetic_range
            chain = [node_id] + tree.ancestors(node_id)
            for i in range(start, end):
                for anc in chain:
                    self._enter(anc, i)
                self.pool[node_id].append(i)

    def _enter(self, node_id: int, row: int) -> None:
        self.members[node_id].append(row)
        self.pops[node_id][self.labels[row] is Label.N] += 1

    def _stats(self, node_id: int) -> NodeStats:
        p, n = self.pops[node_id]
        return NodeStats(p, n)

    def _three_way_gain(self, node_id: int, attr: int) -> float:
        """Gain of ``attr`` over the node's current population; rows without a
        value for ``attr`` form their own group (they cannot be separated)."""
        groups = {0: [0, 0], 1: [0, 0], None: [0, 0]}
        for i in self.members[node_id]:
            groups[self.values[i][attr]][self.labels[i] is Label.N] += 1
        parent = self._stats(node_id)
        if parent.total == 0:
            return 0.0
        gain = entropy(parent)
        for counts in groups.values():
            weight = (counts[0] + counts[1]) / parent.total
            gain -= weight * entropy((counts[0], counts[1]))
        return gain

    def _competitors(self, node_id: int) -> list[tuple[int, float]]:
        node = self.tree.node(node_id)
        on_path = {attr for attr, _ in self.tree.path_to(node_id)} | {node.attribute}
        return [
            (attr, self._three_way_gain(node_id, attr))
            for attr in range(len(self.tree.schema_names))
            if attr not in on_path
        ]

    def _keeps_argmax(self, node_id: int, incumbent_gain: float) -> bool:
        attr = self.tree.node(node_id).attribute
        return not any(
            better_gain(gain, cand, incumbent_gain, attr)
            for cand, gain in self._competitors(node_id)
        )

    def _split_gain(self, node_id: int, extra_left: tuple[int, int], extra_right: tuple[int, int]) -> float:
        node = self.tree.node(node_id)
        left, right = node.children()
        lp, ln = self.pops[left.node_id]
        rp, rn = self.pops[right.node_id]
        lstats = (lp + extra_left[0], ln + extra_left[1])
        rstats = (rp + extra_right[0], rn + extra_right[1])
        parent = (lstats[0] + rstats[0], lstats[1] + rstats[1])
        return information_gain(parent, lstats, rstats)

    def _parent_threatened(self, node_id: int, pending: tuple[tuple[int, int], tuple[int, int]]) -> bool:
        """Would this node's attribute displace its parent's attribute at the
        parent on re-induction?  Compared over the parent's population, with
        this node's pool hypothetically assigned as ``pending``."""
        parent_id = self.tree.parent_id(node_id)
        if parent_id is None:
            return False
        node = self.tree.node(node_id)
        parent = self.tree.node(parent_id)
        groups = {0: [0, 0], 1: [0, 0], None: [0, 0]}
        pool_rows = set(self.pool[node_id])
        for i in self.members[parent_id]:
            if i in pool_rows:
                continue
            groups[self.values[i][node.attribute]][self.labels[i] is Label.N] += 1
        (to_left, to_right) = pending
        for side, counts in ((0, to_left), (1, to_right)):
            groups[side][0] += counts[0]
            groups[side][1] += counts[1]
        parent_stats = self._stats(parent_id)
        child_gain_at_parent = entropy(parent_stats)
        for counts in groups.values():
            weight = (counts[0] + counts[1]) / parent_stats.total
            child_gain_at_parent -= weight * entropy((counts[0], counts[1]))
        pl, pr = parent.children()
        parent_gain = information_gain(
            parent_stats, self._stats(pl.node_id), self._stats(pr.node_id)
        )
        return better_gain(child_gain_at_parent, node.attribute, parent_gain, parent.attribute)

    # -- assignment strategies ------------------------------------------------

    def _assign(self, node_id: int, p_left: int, n_left: int) -> None:
        """Set the node's split attribute: the first ``p_left`` pool P-rows go
        to the 0-branch, the rest to the 1-branch (same for N-rows)."""
        node = self.tree.node(node_id)
        left, right = node.children()
        p_rows = [i for i in self.pool[node_id] if self.labels[i] is Label.P]
        n_rows = [i for i in self.pool[node_id] if self.labels[i] is Label.N]
        for rows, take_left in ((p_rows, p_left), (n_rows, n_left)):
            for pos, i in enumerate(rows):
                side = left if pos < take_left else right
                self.values[i][node.attribute] = 0 if pos < take_left else 1
                self._enter(side.node_id, i)
                if side.is_leaf:
                    self.leaf_arrivals.setdefault(side.node_id, []).append(i)
                else:
                    self.pool[side.node_id].append(i)
        self.pool[node_id] = []

    def _choose_corner(
        self, node_id: int, dp: int, dn: int, allowed: Sequence[tuple[int, int]]
    ) -> tuple[int, int]:
        """Pick, among all-to-one-branch assignments, the one maximizing the
        gain margin of the incumbent attribute over its best competitor."""
        competitors = self._competitors(node_id)
        best_comp = 0.0
        for _, gain in competitors:
            best_comp = max(best_comp, gain)
        best = None
        for p_side, n_side in allowed:
            extra_left = (dp if p_side == 0 else 0, dn if n_side == 0 else 0)
            extra_right = (dp - extra_left[0], dn - extra_left[1])
            margin = self._split_gain(node_id, extra_left, extra_right) - best_comp
            if best is None or margin > best[0] + GAIN_TOLERANCE:
                best = (margin, p_side, n_side)
        assert best is not None
        return best[1], best[2]

    def _blocked_sides(self, node_id: int) -> tuple[Label | None, Label | None]:
        left, right = self.tree.node(node_id).children()
        return (
            self.block_class.get(left.node_id),
            self.block_class.get(right.node_id),
        )

    def _admissible_corners(self, node_id: int, dp: int, dn: int) -> list[tuple[int, int]]:
        blocked = self._blocked_sides(node_id)
        corners = []
        for p_side in (0, 1):
            for n_side in (0, 1):
                if dp and blocked[p_side] is Label.P:
                    continue
                if dn and blocked[n_side] is Label.N:
                    continue
                corners.append((p_side, n_side))
        if not corners:
            self.warnings.append(
                f"node {node_id}: every branch would re-admit a hidden class; "
                "allocation may disturb a collapsed node"
            )
            corners = [(0, 0), (0, 1), (1, 0), (1, 1)]
        return corners

    def _holdback(self, node_id: int) -> None:
        node = self.tree.node(node_id)
        left, right = node.children()
        pool = self.pool[node_id]
        dp = sum(1 for i in pool if self.labels[i] is Label.P)
        dn = len(pool) - dp

        locked_sides = [c.node_id in self.locked for c in (left, right)]
        if all(locked_sides):
            split = self._ratio_decomposition(node_id, dp, dn)
            if split is not None:
                self._assign(node_id, *split)
                return
            self.warnings.append(
                f"node {node_id}: additions cannot be split along both fixed-ratio branches; "
                "ratios below may drift"
            )
            allowed = [(0, 0), (0, 1), (1, 0), (1, 1)]
        elif locked_sides[0]:
            self._finish_guarded(node_id, dp, dn, open_side=1)
            return
        elif locked_sides[1]:
            self._finish_guarded(node_id, dp, dn, open_side=0)
            return
        else:
            allowed = self._admissible_corners(node_id, dp, dn)

        p_side, n_side = self._choose_corner(node_id, dp, dn, allowed)
        state = [[0, 0], [0, 0]]  # [side][class] counts of pool rows
        state[p_side][0] = dp
        state[n_side][1] = dn

        def pending() -> tuple[tuple[int, int], tuple[int, int]]:
            return (state[0][0], state[0][1]), (state[1][0], state[1][1])

        def incumbent_gain() -> float:
            return self._split_gain(node_id, *pending())

        # Walk instances toward the other branch while this node's attribute
        # would displace its parent's attribute at the parent.
        blocked = self._blocked_sides(node_id)
        class_of = (Label.P, Label.N)
        while self._parent_threatened(node_id, pending()):
            moves = []
            for klass, src in ((0, p_side), (1, n_side)):
                if state[src][klass] > 0 and blocked[1 - src] is not class_of[klass]:
                    state[src][klass] -= 1
                    state[1 - src][klass] += 1
                    moves.append((incumbent_gain(), klass, src))
                    state[src][klass] += 1
                    state[1 - src][klass] -= 1
            applied = False
            for gain_after, klass, src in sorted(moves, key=lambda m: (m[0], m[1])):
                if gain_after > incumbent_gain() + GAIN_TOLERANCE:
                    continue  # only move along a non-increasing slope
                if not self._keeps_argmax(node_id, gain_after):
                    continue
                state[src][klass] -= 1
                state[1 - src][klass] += 1
                applied = True
                break
            if not applied:
                break  # argmax safety caps the walk; verification reports any leftover threat
        self._assign(node_id, state[0][0], state[0][1])

    def _finish_guarded(self, node_id: int, dp: int, dn: int, open_side: int) -> None:
        """One branch leads into ratio-locked nodes: every unallocated instance
        must take the open branch, and no holdback walk can cross over.  If the
        open branch is a collapsed node that must not re-admit a class, hiding
        wins over ratio fidelity and that class crosses into the locked side.
        """
        blocked = self._blocked_sides(node_id)
        to_open = [dp, dn]
        for klass, count in enumerate((dp, dn)):
            if count and blocked[open_side] is (Label.P, Label.N)[klass]:
                to_open[klass] = 0
                self.warnings.append(
                    f"node {node_id}: routed {count} instances into a fixed-ratio branch "
                    "to keep a hidden class out of a collapsed node; ratios below may drift"
                )
        if open_side == 0:
            self._assign(node_id, to_open[0], to_open[1])
        else:
            self._assign(node_id, dp - to_open[0], dn - to_open[1])

    def _ratio_decomposition(self, node_id: int, dp: int, dn: int) -> tuple[int, int] | None:
        """Split (dp, dn) into batches proportional to both children's target
        ratios so neither fixed ratio drifts; None when no exact split exists."""
        node = self.tree.node(node_id)
        left, right = node.children()
        steps = []
        for child in (left, right):
            target = self.plan.nodes[child.node_id].target
            g = gcd(target.p, target.n)
            steps.append((target.p // g, target.n // g))
        (s1p, s1n), (s2p, s2n) = steps
        det = s1p * s2n - s1n * s2p
        if det == 0:
            if dp * s1n == dn * s1p and (s1p == 0 or dp % s1p == 0):
                return dp, dn  # everything fits one shared direction; send left
            return None
        num1 = dp * s2n - dn * s2p
        num2 = s1p * dn - s1n * dp
        if num1 % det or num2 % det:
            return None
        u1 = num1 // det
        u2 = num2 // det
        if u1 < 0 or u2 < 0:
            return None
        return u1 * s1p, u1 * s1n

    def _even_split(self, node_id: int) -> None:
        pool = self.pool[node_id]
        dp = sum(1 for i in pool if self.labels[i] is Label.P)
        dn = len(pool) - dp
        blocked = self._blocked_sides(node_id)
        # Odd remainders go to the 0-branch; a class barred from a collapsed
        # branch takes the other branch wholesale.
        split = [(dp + 1) // 2, (dn + 1) // 2]
        for klass, count in enumerate((dp, dn)):
            label = (Label.P, Label.N)[klass]
            if blocked[0] is label and blocked[1] is label:
                if count:
                    self.warnings.append(
                        f"node {node_id}: every branch would re-admit a hidden class; "
                        "allocation may disturb a collapsed node"
                    )
            elif blocked[0] is label:
                split[klass] = 0
            elif blocked[1] is label:
                split[klass] = count
        self._assign(node_id, split[0], split[1])

    # -- leaf completion -------------------------------------------------------

    def _fill_leaves(self) -> None:
        for leaf_id, rows in sorted(self.leaf_arrivals.items()):
            originals = [i for i in self.members[leaf_id] if not self.synthetic[i]]
            for attr in range(len(self.tree.schema_names)):
                pending = [i for i in rows if self.values[i][attr] is None]
                if not pending:
                    continue
                for klass in (Label.P, Label.N):
                    batch = [i for i in pending if self.labels[i] is klass]
                    if not batch:
                        continue
                    reference = [i for i in originals if self.labels[i] is klass] or originals
                    if reference:
                        ones = sum(1 for i in reference if self.values[i][attr] == 1)
                        target_ones = round(len(batch) * ones / len(reference))
                    else:
                        target_ones = 0
                    for pos, i in enumerate(batch):
                        self.values[i][attr] = 1 if pos < target_ones else 0

    def _final_gain(self, node_id: int, attr: int) -> float:
        groups = [[0, 0], [0, 0]]
        for i in self.members[node_id]:
            groups[self.values[i][attr]][self.labels[i] is Label.N] += 1
        parent = self._stats(node_id)
        return information_gain(parent, tuple(groups[0]), tuple(groups[1]))

    def _verify_allocation(self) -> None:
        """Check, on the fully specified result, that each touched split kept
        its attribute dominant and does not displace its parent's; these are
        the conditions the holdback walk aims at, so leftovers get recorded."""
        for node_id in self.processed:
            node = self.tree.node(node_id)
            on_path = {attr for attr, _ in self.tree.path_to(node_id)} | {node.attribute}
            incumbent = self._final_gain(node_id, node.attribute)
            for attr in range(len(self.tree.schema_names)):
                if attr in on_path:
                    continue
                gain = self._final_gain(node_id, attr)
                if gain > GAIN_TOLERANCE and better_gain(gain, attr, incumbent, node.attribute):
                    self.warnings.append(
                        f"node {node_id}: attribute {self.tree.schema_names[attr]} now outweighs "
                        f"{self.tree.schema_names[node.attribute]}; the split may not survive re-induction"
                    )
                    break
            parent_id = self.tree.parent_id(node_id)
            if parent_id is None:
                continue
            parent = self.tree.node(parent_id)
            child_at_parent = self._final_gain(parent_id, node.attribute)
            parent_gain = self._final_gain(parent_id, parent.attribute)
            if child_at_parent > GAIN_TOLERANCE and better_gain(
                child_at_parent, node.attribute, parent_gain, parent.attribute
            ):
                self.warnings.append(
                    f"node {node_id}: its attribute {self.tree.schema_names[node.attribute]} "
                    f"outweighs the parent's split at node {parent_id}"
                )

    def run(self, strategy: CompletionStrategy) -> list[list[int | None]]:
        for node in self.tree.nodes():  # preorder: parents before children
            if node.is_leaf or not self.pool[node.node_id]:
                continue
            self.processed.append(node.node_id)
            if strategy is CompletionStrategy.EVEN_SPLIT:
                self._even_split(node.node_id)
            else:
                self._holdback(node.node_id)
        self._fill_leaves()
        self._verify_allocation()
        return self.values


def allocate_and_set(
    tree: DecisionTree,
    ds: Dataset,
    plan: HidingPlan,
    strategy: CompletionStrategy = CompletionStrategy.TWO_LEVEL_HOLDBACK,
) -> Dataset:
    """Top-down pass: fully specify every synthetic instance.

    TWO_LEVEL_HOLDBACK starts each batch at the all-to-one-branch corner that
    best protects the node's split, then walks instances toward the other
    branch while the node's attribute would displace its parent's; branches
    leading into ratio-locked nodes never receive unplanned instances.
    EVEN_SPLIT halves every batch recursively instead.
    """
    allocator = _Allocator(tree, ds, plan)
    values = allocator.run(strategy)
    plan.warnings.extend(allocator.warnings)
    instances = tuple(
        Instance(tuple(vals), inst.label, inst.provenance, inst.pre_swap_label)
        for vals, inst in zip(values, ds.instances)
    )
    out = Dataset(ds.schema, instances)
    if not out.is_fully_specified():
        raise HidingError("internal error: allocation left unspecified values")
    return out


@dataclass
class SanitizationResult:
    original_dataset: Dataset
    original_tree: DecisionTree
    plan: HidingPlan
    sanitized: Dataset
    retrained_tree: DecisionTree


def hide(
    ds: Dataset,
    requests: Sequence[HidingRequest | RulePath | str],
    relax: Mapping[int | str, int] | None = None,
    strategy: CompletionStrategy = CompletionStrategy.TWO_LEVEL_HOLDBACK,
) -> SanitizationResult:
    """Full pipeline: induce, swap-and-add (all requests in parallel),
    allocate-and-set, re-induce."""
    tree = induce(ds)
    plan, augmented = swap_and_add(tree, ds, requests, relax)
    sanitized = allocate_and_set(tree, augmented, plan, strategy)
    retrained = induce(sanitized)
    return SanitizationResult(ds, tree, plan, sanitized, retrained)


def serial_hide(
    ds: Dataset,
    ordering: Sequence[str],
    relax: Mapping[int | str, int] | None = None,
    strategy: CompletionStrategy = CompletionStrategy.TWO_LEVEL_HOLDBACK,
) -> list[SanitizationResult]:
    """Hide one request, re-induce, then recurse on the remaining requests.

    Experimental oracle only: parallel hiding never needs more additions than
    the best serial ordering.
    """
    results = []
    current = ds
    for rule_text in ordering:
        result = hide(current, [rule_text], relax, strategy)
        results.append(result)
        current = result.sanitized
    return results
