"""Deterministic binary decision-tree induction with information-gain splitting.

Trees are immutable after induction.  Node ids are stable preorder indices so
plans and reports can reference nodes across serialization.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .dataset import Dataset, DatasetError, Instance, Label

#: Gains within this tolerance are treated as equal; ties resolve to the
#: lower schema index so induction is fully deterministic.
GAIN_TOLERANCE = 1e-12


class TreeError(ValueError):
    """Invalid tree construction or navigation."""


class RuleNotFoundError(TreeError):
    """A rule path does not match any node of the tree."""


class NodeStats(NamedTuple):
    p: int
    n: int

    @property
    def total(self) -> int:
        return self.p + self.n

    def __add__(self, other: "NodeStats") -> "NodeStats":  # type: ignore[override]
        return NodeStats(self.p + other.p, self.n + other.n)


def entropy(stats: NodeStats | tuple[int, int]) -> float:
    """Binary entropy in bits; one-class and empty nodes have entropy 0.

    Depends only on the p:n ratio, so nodes with proportional counts have
    bit-identical entropies.
    """
    p, n = stats
    t = p + n
    if t == 0 or p == 0 or n == 0:
        return 0.0
    fp = p / t
    fn = n / t
    return -fp * math.log2(fp) - fn * math.log2(fn)


def information_gain(
    parent: NodeStats | tuple[int, int],
    left: NodeStats | tuple[int, int],
    right: NodeStats | tuple[int, int],
) -> float:
    """Entropy reduction of splitting ``parent`` into ``left``/``right``."""
    pp, pn = parent
    if (pp, pn) != (left[0] + right[0], left[1] + right[1]):
        raise TreeError(f"split counts {left}+{right} do not add up to parent {parent}")
    total = pp + pn
    if total == 0:
        return 0.0
    gain = entropy(parent)
    for side in (left, right):
        weight = (side[0] + side[1]) / total
        gain -= weight * entropy(side)
    return gain


@dataclass(frozen=True)
class TreeNode:
    node_id: int
    stats: NodeStats
    attribute: int | None = None  # split attribute index; None for leaves
    left: "TreeNode | None" = None  # branch for attribute value 0
    right: "TreeNode | None" = None  # branch for attribute value 1
    leaf_class: Label | None = None

    @property
    def is_leaf(self) -> bool:
        return self.attribute is None

    def children(self) -> tuple["TreeNode", "TreeNode"]:
        if self.is_leaf:
            raise TreeError(f"node {self.node_id} is a leaf")
        assert self.left is not None and self.right is not None
        return self.left, self.right


@dataclass(frozen=True)
class RulePath:
    """Root-to-leaf classification pattern: (attribute, branch) steps plus class."""

    steps: tuple[tuple[int, int], ...]
    klass: Label

    def format(self, schema_names: Sequence[str]) -> str:
        if not self.steps:
            return f"* => {self.klass.value}"
        chain = ",".join(f"{schema_names[attr]}={value}" for attr, value in self.steps)
        return f"{chain} => {self.klass.value}"

    @staticmethod
    def parse(text: str, schema_names: Sequence[str]) -> "RulePath":
        """Parse ``x=1,y=0 => p`` (the class part is optional)."""
        text = text.strip()
        klass: Label | None = None
        if "=>" in text:
            chain_part, class_part = text.split("=>", 1)
            klass = Label(class_part.strip())
        else:
            chain_part = text
        steps = []
        chain_part = chain_part.strip()
        if chain_part and chain_part != "*":
            for item in chain_part.split(","):
                name, _, value = item.partition("=")
                name = name.strip()
                value = value.strip()
                if name not in schema_names:
                    raise RuleNotFoundError(f"unknown attribute {name!r} in rule {text!r}")
                if value not in ("0", "1"):
                    raise RuleNotFoundError(f"non-binary branch value in rule {text!r}")
                steps.append((list(schema_names).index(name), int(value)))
        if len({attr for attr, _ in steps}) != len(steps):
            raise RuleNotFoundError(f"repeated attribute in rule {text!r}")
        return RulePath(tuple(steps), klass if klass is not None else Label.P)


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    schema_names: tuple[str, ...]
    _index: dict[int, TreeNode] = field(default_factory=dict, repr=False, compare=False)
    _parents: dict[int, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[int, TreeNode] = {}
        parents: dict[int, int] = {}
        stack = [self.root]
        while stack:
            node = stack.pop()
            index[node.node_id] = node
            if not node.is_leaf:
                left, right = node.children()
                parents[left.node_id] = node.node_id
                parents[right.node_id] = node.node_id
                stack.extend((right, left))
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_parents", parents)

    def node(self, node_id: int) -> TreeNode:
        try:
            return self._index[node_id]
        except KeyError:
            raise TreeError(f"unknown node id {node_id}") from None

    def nodes(self) -> Iterator[TreeNode]:
        """All nodes in preorder (ids ascend)."""
        for node_id in sorted(self._index):
            yield self._index[node_id]

    def __len__(self) -> int:
        return len(self._index)

    def parent_id(self, node_id: int) -> int | None:
        self.node(node_id)
        return self._parents.get(node_id)

    def ancestors(self, node_id: int) -> list[int]:
        """Proper-ancestor chain, node side first, ending at the root."""
        chain = []
        current = self.parent_id(node_id)
        while current is not None:
            chain.append(current)
            current = self._parents.get(current)
        return chain

    def path_to(self, node_id: int) -> tuple[tuple[int, int], ...]:
        """(attribute, branch) steps from the root down to ``node_id``."""
        self.node(node_id)
        chain = [node_id] + self.ancestors(node_id)
        chain.reverse()
        steps = []
        for upper, lower in zip(chain, chain[1:]):
            parent = self.node(upper)
            left, right = parent.children()
            steps.append((parent.attribute, 0 if left.node_id == lower else 1))
        return tuple(steps)

    def locate_node(self, path: RulePath | Sequence[tuple[int, int]]) -> int:
        steps = path.steps if isinstance(path, RulePath) else tuple(path)
        node = self.root
        for attr, value in steps:
            if node.is_leaf or node.attribute != attr:
                raise RuleNotFoundError("rule not found: path diverges from the tree")
            node = node.children()[value]
        return node.node_id

    def classify(self, values: Sequence[int | None]) -> Label:
        node = self.root
        while not node.is_leaf:
            value = values[node.attribute]
            if value is None:
                raise TreeError("cannot classify a partially specified instance")
            node = node.children()[value]
        assert node.leaf_class is not None
        return node.leaf_class

    def leaf_for(self, values: Sequence[int | None]) -> TreeNode:
        node = self.root
        while not node.is_leaf:
            node = node.children()[values[node.attribute]]
        return node

    def extract_rules(self) -> list[RulePath]:
        """One rule per leaf in left-to-right order; mutually exclusive and exhaustive."""
        rules: list[RulePath] = []

        def walk(node: TreeNode, steps: tuple[tuple[int, int], ...]) -> None:
            if node.is_leaf:
                rules.append(RulePath(steps, node.leaf_class))
                return
            left, right = node.children()
            walk(left, steps + ((node.attribute, 0),))
            walk(right, steps + ((node.attribute, 1),))

        walk(self.root, ())
        return rules

    def to_json_dict(self) -> dict:
        def encode(node: TreeNode) -> dict:
            doc = {"id": node.node_id, "p": node.stats.p, "n": node.stats.n}
            if node.is_leaf:
                doc["kind"] = "leaf"
                doc["class"] = node.leaf_class.value
            else:
                doc["kind"] = "split"
                doc["attribute"] = self.schema_names[node.attribute]
                left, right = node.children()
                doc["children"] = [encode(left), encode(right)]
            return doc
        return {"schema": list(self.schema_names), "root": encode(self.root)}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)


def majority_class(stats: NodeStats) -> Label:
    # Ties resolve to P: arbitrary but fixed.
    return Label.P if stats.p >= stats.n else Label.N


def better_gain(candidate: float, candidate_attr: int, best: float, best_attr: int) -> bool:
    """True when ``candidate`` should replace ``best`` under the tie rule."""
    if candidate > best + GAIN_TOLERANCE:
        return True
    if candidate >= best - GAIN_TOLERANCE and candidate_attr < best_attr:
        return True
    return False


def induce(ds: Dataset) -> DecisionTree:
    """Greedy top-down induction maximizing information gain at every node.

    Stops at pure nodes, exhausted attributes, or when no split has positive
    gain; deterministic given the dataset.
    """
    if not ds.instances:
        raise DatasetError("cannot induce a tree from an empty dataset")
    if not ds.is_fully_specified():
        raise DatasetError("cannot induce a tree from partially specified instances")

    counter = iter(range(10 ** 9))

    def stats_of(indices: list[int]) -> NodeStats:
        p = sum(1 for i in indices if ds.instances[i].label is Label.P)
        return NodeStats(p, len(indices) - p)

    def build(indices: list[int], available: list[int]) -> TreeNode:
        node_id = next(counter)
        stats = stats_of(indices)
        if stats.p == 0 or stats.n == 0 or not available:
            return TreeNode(node_id, stats, leaf_class=majority_class(stats))

        best_attr = -1
        best_gain = 0.0
        best_split: tuple[list[int], list[int]] | None = None
        for attr in available:
            left = [i for i in indices if ds.instances[i].values[attr] == 0]
            right = [i for i in indices if ds.instances[i].values[attr] == 1]
            gain = information_gain(stats, stats_of(left), stats_of(right))
            if best_split is None:
                if gain > GAIN_TOLERANCE:
                    best_attr, best_gain, best_split = attr, gain, (left, right)
            elif better_gain(gain, attr, best_gain, best_attr):
                best_attr, best_gain, best_split = attr, gain, (left, right)
        if best_split is None:
            return TreeNode(node_id, stats, leaf_class=majority_class(stats))

        remaining = [a for a in available if a != best_attr]
        left_node = build(best_split[0], remaining)
        right_node = build(best_split[1], remaining)
        return TreeNode(node_id, stats, attribute=best_attr, left=left_node, right=right_node)

    root = build(list(range(len(ds.instances))), list(range(len(ds.schema))))
    return DecisionTree(root, ds.schema.names)


def route_instances(tree: DecisionTree, ds: Dataset) -> dict[int, list[int]]:
    """Instance indices routed through every node (fully specified rows only)."""
    members: dict[int, list[int]] = {node.node_id: [] for node in tree.nodes()}
    for i, inst in enumerate(ds.instances):
        node = tree.root
        members[node.node_id].append(i)
        while not node.is_leaf:
            node = node.children()[inst.values[node.attribute]]
            members[node.node_id].append(i)
    return members


def node_populations(tree: DecisionTree, ds: Dataset) -> dict[int, NodeStats]:
    """Class counts of the dataset rows routed through every node."""
    pops: dict[int, list[int]] = {node.node_id: [0, 0] for node in tree.nodes()}
    for inst in ds.instances:
        node = tree.root
        while True:
            slot = pops[node.node_id]
            if inst.label is Label.P:
                slot[0] += 1
            else:
                slot[1] += 1
            if node.is_leaf:
                break
            node = node.children()[inst.values[node.attribute]]
    return {node_id: NodeStats(p, n) for node_id, (p, n) in pops.items()}
