"""Shared generators for the randomized property suites."""

from __future__ import annotations

import random

from rulehide.dataset import AttributeSchema, Dataset, Instance, Label
from rulehide.hiding import build_skeleton
from rulehide.tree import DecisionTree


def random_dataset(rng: random.Random, max_attrs: int = 6, max_rows: int = 128) -> Dataset:
    n_attrs = rng.randint(2, max_attrs)
    n_rows = rng.randint(4, max_rows)
    names = tuple(f"a{i + 1}" for i in range(n_attrs))
    rows = tuple(
        Instance(
            tuple(rng.randint(0, 1) for _ in range(n_attrs)),
            Label.P if rng.random() < rng.uniform(0.3, 0.7) else Label.N,
        )
        for _ in range(n_rows)
    )
    return Dataset(AttributeSchema(names), rows)


def feasible_requests(tree: DecisionTree) -> list[str]:
    """Rules whose leaf swap collapses the parent (exact mode never lacks
    integer solutions, so collapse is the only feasibility condition)."""
    out = []
    for rule in tree.extract_rules():
        text = rule.format(tree.schema_names)
        try:
            build_skeleton(tree, [text])
        except Exception:
            continue
        out.append(text)
    return out


def non_sibling_pairs(tree: DecisionTree, rules: list[str]) -> list[tuple[str, str]]:
    pairs = []
    for i, first in enumerate(rules):
        for second in rules[i + 1:]:
            leaf_a = tree.locate_node(_parse(tree, first))
            leaf_b = tree.locate_node(_parse(tree, second))
            if tree.parent_id(leaf_a) != tree.parent_id(leaf_b):
                pairs.append((first, second))
    return pairs


def _parse(tree: DecisionTree, text: str):
    from rulehide.tree import RulePath

    return RulePath.parse(text, tree.schema_names)
