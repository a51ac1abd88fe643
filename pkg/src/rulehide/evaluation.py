"""Verification and quality measurement of a sanitization run.

Checks that the hidden rules are gone from the re-induced tree, quantifies
how well each affected node's class ratio (and hence entropy and gain) was
preserved, and scores the structural and behavioral similarity between the
original and re-induced trees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .dataset import Dataset, Provenance
from .hiding import SanitizationResult
from .tree import DecisionTree, RulePath, entropy, information_gain, node_populations


@dataclass
class NodeRatioReport:
    node_id: int
    target: str
    achieved: tuple[int, int]
    exact: bool
    entropy_delta: float
    gain_delta: float
    added: tuple[int, int]


@dataclass
class EvaluationReport:
    hidden: dict[str, bool]
    side_effects: list[str]
    node_reports: list[NodeRatioReport]
    total_added: int
    syntactic: float
    semantic: float
    warnings: list[str] = field(default_factory=list)

    @property
    def all_hidden(self) -> bool:
        return all(self.hidden.values())

    def to_json_dict(self) -> dict:
        return {
            "hidden": self.hidden,
            "all_hidden": self.all_hidden,
            "side_effects": self.side_effects,
            "nodes": [
                {
                    "node": nr.node_id,
                    "target": nr.target,
                    "achieved": list(nr.achieved),
                    "exact": nr.exact,
                    "entropy_delta": nr.entropy_delta,
                    "gain_delta": nr.gain_delta,
                    "added": list(nr.added),
                }
                for nr in self.node_reports
            ],
            "total_added": self.total_added,
            "syntactic_similarity": self.syntactic,
            "semantic_agreement": self.semantic,
            "warnings": self.warnings,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)

    def to_text(self) -> str:
        lines = []
        for rule, ok in self.hidden.items():
            lines.append(f"hidden   {'yes' if ok else 'NO '}  {rule}")
        for rule in self.side_effects:
            lines.append(f"side     hidden as side effect: {rule}")
        if self.node_reports:
            lines.append("node  target      achieved      exact  dH         dIG")
            for nr in self.node_reports:
                achieved = f"{nr.achieved[0]}p/{nr.achieved[1]}n"
                lines.append(
                    f"{nr.node_id:<5d} {nr.target:<11s} {achieved:<13s} "
                    f"{'yes' if nr.exact else 'no':<6s} {nr.entropy_delta:<10.3e} {nr.gain_delta:.3e}"
                )
        lines.append(f"added instances: {self.total_added}")
        lines.append(f"syntactic similarity: {self.syntactic:.4f}")
        lines.append(f"semantic agreement:   {self.semantic:.4f}")
        for warning in self.warnings:
            lines.append(f"warning: {warning}")
        return "\n".join(lines)


def verify_hidden(result: SanitizationResult) -> dict[str, bool]:
    """Per request: is the rule (steps plus class) absent from the re-induced
    tree's rule set?"""
    names = result.retrained_tree.schema_names
    retrained = {
        (rule.steps, rule.klass) for rule in result.retrained_tree.extract_rules()
    }
    out: dict[str, bool] = {}
    for rule_text in result.plan.requests:
        rule = RulePath.parse(rule_text, names)
        out[rule_text] = (rule.steps, rule.klass) not in retrained
    return out


def ratio_report(result: SanitizationResult) -> list[NodeRatioReport]:
    """Per affected node: achieved vs target ratio, entropy and gain deltas.

    Achieved counts route the sanitized dataset through the original tree.
    In exact (unrelaxed) mode the achieved ratio equals the target as exact
    rationals and the entropy delta vanishes.
    """
    tree = result.original_tree
    populations = node_populations(tree, result.sanitized)
    reports = []
    for node_id in sorted(result.plan.nodes):
        np_ = result.plan.nodes[node_id]
        achieved = populations[node_id]
        target = np_.target
        exact = achieved.p * target.n == achieved.n * target.p
        node = tree.node(node_id)
        left, right = node.children()
        gain_now = information_gain(
            achieved, populations[left.node_id], populations[right.node_id]
        )
        gain_before = information_gain(node.stats, left.stats, right.stats)
        reports.append(
            NodeRatioReport(
                node_id=node_id,
                target=str(target),
                achieved=(achieved.p, achieved.n),
                exact=exact,
                entropy_delta=abs(entropy(achieved) - entropy((target.p, target.n))),
                gain_delta=abs(gain_now - gain_before),
                added=np_.local,
            )
        )
    return reports


def syntactic_similarity(a: DecisionTree, b: DecisionTree) -> float:
    """|shared| / max(|a|, |b|) where shared counts positions (identical root
    paths of (attribute, branch) labels) present in both trees whose nodes
    agree: splits must name the same attribute, leaves the same class.  A
    split facing a leaf still marks the position as shared, but nothing below
    it can match.
    """
    if a.schema_names != b.schema_names:
        raise ValueError("trees were induced over different schemas")

    def walk(na, nb) -> int:
        if na.is_leaf and nb.is_leaf:
            return 1 if na.leaf_class is nb.leaf_class else 0
        if na.is_leaf or nb.is_leaf:
            return 1
        if na.attribute != nb.attribute:
            return 0
        la, ra = na.children()
        lb, rb = nb.children()
        return 1 + walk(la, lb) + walk(ra, rb)

    shared = walk(a.root, b.root)
    return shared / max(len(a), len(b))


def semantic_agreement(a: DecisionTree, b: DecisionTree, probe: Dataset) -> float:
    """Fraction of probe instances classified identically by both trees."""
    if not probe.instances:
        return 1.0
    same = sum(
        1 for inst in probe.instances if a.classify(inst.values) is b.classify(inst.values)
    )
    return same / len(probe.instances)


def build_report(result: SanitizationResult, probe: Dataset | None = None) -> EvaluationReport:
    """Full evaluation; the probe defaults to the original (pre-synthetic)
    training rows to avoid scoring agreement on self-generated data."""
    if probe is None:
        originals = tuple(
            inst for inst in result.original_dataset.instances
            if inst.provenance is not Provenance.SYNTHETIC
        )
        probe = Dataset(result.original_dataset.schema, originals)
    return EvaluationReport(
        hidden=verify_hidden(result),
        side_effects=list(result.plan.side_effects),
        node_reports=ratio_report(result),
        total_added=result.plan.total_added,
        syntactic=syntactic_similarity(result.original_tree, result.retrained_tree),
        semantic=semantic_agreement(result.original_tree, result.retrained_tree, probe),
        warnings=list(result.plan.warnings),
    )
