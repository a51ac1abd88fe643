#!/usr/bin/env python3
"""Walk through both reference scenarios end to end and print every
intermediate artifact: the induced tree, the balance equations with their
look-ahead solutions, per-node additions, and the evaluation report."""

from __future__ import annotations

import argparse

from rulehide.evaluation import build_report
from rulehide.fixtures import (
    PARALLEL_HIDING_RULES,
    SINGLE_HIDING_RULE,
    parallel_hiding_dataset,
    single_hiding_dataset,
)
from rulehide.hiding import hide


def show_tree(tree, node=None, depth=0, branch=""):
    node = node or tree.root
    kind = (
        f"leaf {node.leaf_class.value}"
        if node.is_leaf
        else f"split on {tree.schema_names[node.attribute]}"
    )
    print(f"  {'  ' * depth}{branch}[{node.node_id}] {node.stats.p}p/{node.stats.n}n  {kind}")
    if not node.is_leaf:
        left, right = node.children()
        show_tree(tree, left, depth + 1, f"{tree.schema_names[node.attribute]}=0 ")
        show_tree(tree, right, depth + 1, f"{tree.schema_names[node.attribute]}=1 ")


def run(title, ds, requests, relax=None):
    print(f"=== {title} ===")
    result = hide(ds, requests, relax=relax)
    print("original tree:")
    show_tree(result.original_tree)
    print("\nbalance equations (bottom-up, with look-ahead bounds):")
    for node_id in sorted(result.plan.nodes, reverse=True):
        np = result.plan.nodes[node_id]
        relaxed = f"  (ratio relaxed from {np.relaxed_from})" if np.relaxed_from else ""
        print(
            f"  node {node_id}: {np.equation}  ->  cumulative {np.cumulative},"
            f" local additions {np.local[0]}p/{np.local[1]}n{relaxed}"
        )
    print(f"\ninstances added: {result.plan.total_added}"
          f"  (dataset grows {len(ds)} -> {len(result.sanitized)})")
    print("\nre-induced tree:")
    show_tree(result.retrained_tree)
    print("\nevaluation:")
    print(build_report(result).to_text())
    print()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--skip-parallel", action="store_true")
    args = parser.parse_args()

    run("single hiding request, exact ratios", single_hiding_dataset(), [SINGLE_HIDING_RULE])
    run(
        "single hiding request, root ratio relaxed by 1",
        single_hiding_dataset(),
        [SINGLE_HIDING_RULE],
        relax={"root": 1},
    )
    if not args.skip_parallel:
        run("two hiding requests in parallel", parallel_hiding_dataset(), list(PARALLEL_HIDING_RULES))


if __name__ == "__main__":
    main()
