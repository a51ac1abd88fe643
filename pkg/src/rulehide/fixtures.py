"""Reference datasets whose induced trees reproduce the worked scenarios.

Each dataset is written as a chunk table: (row count, class, attribute
values).  Attribute values omitted from a chunk are 0.  The single-hiding
dataset induces a five-level chain; its 9-positive leaf is the sensitive
rule used across tests, docs, and the demo UI.
"""

from __future__ import annotations

from .dataset import AttributeSchema, Dataset, Instance, Label

Chunk = tuple[int, Label, dict[str, int]]


def _build(names: tuple[str, ...], chunks: list[Chunk]) -> Dataset:
    schema = AttributeSchema(names)
    rows = []
    for count, label, assignment in chunks:
        values = tuple(assignment.get(name, 0) for name in names)
        rows.extend(Instance(values, label) for _ in range(count))
    return Dataset(schema, tuple(rows))


#: Rule identifying the sensitive 9-positive leaf of the single-hiding dataset.
SINGLE_HIDING_RULE = "a1=1,a2=1,a3=1,a4=1,a5=1 => p"


def single_hiding_dataset() -> Dataset:
    """1000 rows, 541p/459n; induces the chain root -> a1 -> a2 -> a3 -> a4 -> a5
    with node stats (541,459), (352,137), (58,137), (58,37), (9,28) and a pure
    9p leaf at the a5=1 branch.
    """
    names = ("a1", "a2", "a3", "a4", "a5")
    on = {"a1": 1, "a2": 1, "a3": 1, "a4": 1, "a5": 1}
    chunks: list[Chunk] = [
        (9, Label.P, on),  # the sensitive leaf
        (28, Label.N, {"a1": 1, "a2": 1, "a3": 1, "a4": 1}),
        (49, Label.P, {"a1": 1, "a2": 1, "a3": 1}),
        (9, Label.N, {"a1": 1, "a2": 1, "a3": 1}),
        (100, Label.N, {"a1": 1, "a2": 1}),
        (294, Label.P, {"a1": 1}),
        (189, Label.P, {}),
        (322, Label.N, {}),
    ]
    return _build(names, chunks)


#: Rules for the two sensitive leaves of the parallel-hiding dataset.
PARALLEL_HIDING_RULES = (
    "a1=1,a2=1,a3=1,a4=1,a5=1 => p",  # 10-positive leaf, swap (-10p, +10n)
    "a1=1,a2=0,a6=1,a7=1,a8=1 => n",  # 5-negative leaf, swap (+5p, -5n)
)


def parallel_hiding_dataset() -> Dataset:
    """1000 rows, 541p/459n; induces a tree whose root splits into a 352p/230n
    subtree (two chains merging there) and a 189p/229n subtree, matching the
    two-request scenario.

    Off-path attribute assignments inside the leaf chunks keep every
    competitor attribute's gain strictly below the intended split's at every
    node while staying class-independent within each leaf.  In particular the
    right-chain attributes a6/a7/a8, whose branches isolate positive-heavy
    groups, are diluted with matching-ratio blocks carved out of the pure
    0p/100n leaf, the 60p/45n leaf and the two big mixed leaves.
    """
    names = ("a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8")
    left = {"a1": 1, "a2": 1}  # chain N2=(58,137) -> N1=(58,37) -> N0=(10,27)
    right = {"a1": 1, "a2": 0}  # chain N2'=(294,93) -> N1'=(120,50) -> N0'=(60,5)
    chunks: list[Chunk] = [
        # -- left chain ---------------------------------------------------------
        (10, Label.P, {**left, "a3": 1, "a4": 1, "a5": 1}),  # sensitive leaf
        (27, Label.N, {**left, "a3": 1, "a4": 1}),
        (48, Label.P, {**left, "a3": 1}),  # S1 = (48, 10)
        (10, Label.N, {**left, "a3": 1}),
        # S2 = (0, 100) in three blocks diluting a6 and a7 at the upper nodes
        (52, Label.N, {**left, "a6": 1}),
        (42, Label.N, {**left, "a7": 1}),
        (6, Label.N, left),
        # -- right chain ----------------------------------------------------------
        (60, Label.P, {**right, "a6": 1, "a7": 1}),  # p-leaf of N0'
        (5, Label.N, {**right, "a6": 1, "a7": 1, "a8": 1}),  # sensitive leaf
        # S1' = (60, 45); the 44p/33n sub-block keeps a8 class-proportional here
        (44, Label.P, {**right, "a6": 1, "a8": 1}),
        (33, Label.N, {**right, "a6": 1, "a8": 1}),
        (16, Label.P, {**right, "a6": 1}),
        (12, Label.N, {**right, "a6": 1}),
        # S2' = (174, 43), split by a7 into (19,20) and (155,23)
        (19, Label.P, {**right, "a7": 1}),
        (20, Label.N, {**right, "a7": 1}),
        (155, Label.P, {**right, "a8": 1}),
        (23, Label.N, {**right, "a8": 1}),
        # -- root sibling S4' = (189, 229), split by a2 into (180,60) and (9,169)
        (180, Label.P, {"a2": 1}),
        (60, Label.N, {"a2": 1}),
        (9, Label.P, {"a8": 1}),
        (169, Label.N, {"a8": 1}),
    ]
    return _build(names, chunks)
