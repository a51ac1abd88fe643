"""Binary-attribute, binary-class dataset model with CSV ingestion and export.

Datasets are immutable: every mutating operation returns a new value, so
instances can be shared freely across threads.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Mapping

#: Placeholder for an attribute value that has not been assigned yet.
UNSPECIFIED = None

PROVENANCE_COLUMN = "_prov"
CLASS_COLUMN = "class"


class Label(Enum):
    P = "p"
    N = "n"

    def flipped(self) -> "Label":
        return Label.N if self is Label.P else Label.P


class Provenance(Enum):
    ORIGINAL = "orig"
    SWAPPED = "swap"
    SYNTHETIC = "synth"


class DatasetError(ValueError):
    """Malformed input data or an illegal dataset operation."""


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered binary attributes; order is stable across load/export round-trips."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if any(not name for name in self.names):
            raise DatasetError("attribute names must be non-empty")
        if len(set(self.names)) != len(self.names):
            raise DatasetError("attribute names must be unique")
        if CLASS_COLUMN in self.names or PROVENANCE_COLUMN in self.names:
            raise DatasetError(
                f"attribute names may not shadow the reserved columns "
                f"{CLASS_COLUMN!r}/{PROVENANCE_COLUMN!r}"
            )

    def __len__(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DatasetError(f"unknown attribute {name!r}") from None


@dataclass(frozen=True)
class Instance:
    """One row: per-attribute values in {0, 1, UNSPECIFIED} plus a class label.

    SWAPPED instances keep their pre-swap label for audit reports; the label is
    never exported.
    """

    values: tuple[int | None, ...]
    label: Label
    provenance: Provenance = Provenance.ORIGINAL
    pre_swap_label: Label | None = None

    def is_fully_specified(self) -> bool:
        return all(v is not None for v in self.values)


@dataclass(frozen=True)
class Dataset:
    schema: AttributeSchema
    instances: tuple[Instance, ...]

    def __post_init__(self) -> None:
        width = len(self.schema)
        for i, inst in enumerate(self.instances):
            if len(inst.values) != width:
                raise DatasetError(f"instance {i} has {len(inst.values)} values, schema has {width}")
            if inst.provenance is not Provenance.SYNTHETIC and not inst.is_fully_specified():
                raise DatasetError(f"instance {i} is {inst.provenance.value} but not fully specified")

    def __len__(self) -> int:
        return len(self.instances)

    def is_fully_specified(self) -> bool:
        return all(inst.is_fully_specified() for inst in self.instances)


def load_csv(source: bytes | str | io.IOBase) -> Dataset:
    """Parse a CSV stream into a Dataset with ORIGINAL provenance for all rows.

    The header names the attributes followed by a final ``class`` column; an
    optional trailing ``_prov`` column is accepted and ignored.  Body cells
    must be 0/1 and class cells ``p``/``n``.  Errors name the 1-based line.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DatasetError("empty input: missing header at line 1")

    header = [cell.strip() for cell in rows[0]]
    has_prov = bool(header) and header[-1] == PROVENANCE_COLUMN
    if has_prov:
        header = header[:-1]
    if not header or header[-1] != CLASS_COLUMN:
        raise DatasetError(f"malformed header at line 1: last column must be {CLASS_COLUMN!r}")
    try:
        schema = AttributeSchema(tuple(header[:-1]))
    except DatasetError as exc:
        raise DatasetError(f"malformed header at line 1: {exc}") from None

    width = len(schema)
    instances = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue  # blank trailing line
        expected = width + 1 + (1 if has_prov else 0)
        if len(row) != expected:
            raise DatasetError(f"ragged row at line {lineno}: expected {expected} cells, got {len(row)}")
        values = []
        for name, cell in zip(schema.names, row):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise DatasetError(f"non-binary value at line {lineno}: {name}={cell!r}")
            values.append(int(cell))
        class_cell = row[width].strip()
        try:
            label = Label(class_cell)
        except ValueError:
            raise DatasetError(f"unknown class token at line {lineno}: {class_cell!r}") from None
        instances.append(Instance(tuple(values), label))
    return Dataset(schema, tuple(instances))


def write_csv(ds: Dataset, include_provenance: bool = False, allow_partial: bool = False) -> str:
    """Serialize a dataset to CSV text; round-trips values, labels and order.

    UNSPECIFIED cells are only representable (as ``?``) when ``allow_partial``
    is set; the published sanitized dataset must be fully specified.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = list(ds.schema.names) + [CLASS_COLUMN]
    if include_provenance:
        header.append(PROVENANCE_COLUMN)
    writer.writerow(header)
    for i, inst in enumerate(ds.instances):
        cells = []
        for name, value in zip(ds.schema.names, inst.values):
            if value is None:
                if not allow_partial:
                    raise DatasetError(f"instance {i} has unspecified attribute {name!r}; export forbids partial rows")
                cells.append("?")
            else:
                cells.append(str(value))
        cells.append(inst.label.value)
        if include_provenance:
            cells.append(inst.provenance.value)
        writer.writerow(cells)
    return out.getvalue()


def swap_class(ds: Dataset, selector: Iterable[int]) -> Dataset:
    """Flip the class label of the selected instances.

    ORIGINAL instances become SWAPPED and record their pre-swap label;
    SYNTHETIC instances keep their provenance so the ORIGINAL+SWAPPED
    population stays constant across the pipeline.
    """
    indices = set(selector)
    for i in indices:
        if not 0 <= i < len(ds.instances):
            raise DatasetError(f"swap index {i} out of range")
    new_instances = []
    for i, inst in enumerate(ds.instances):
        if i not in indices:
            new_instances.append(inst)
            continue
        if inst.provenance is Provenance.SYNTHETIC:
            new_instances.append(replace(inst, label=inst.label.flipped()))
        else:
            new_instances.append(
                replace(
                    inst,
                    label=inst.label.flipped(),
                    provenance=Provenance.SWAPPED,
                    pre_swap_label=inst.label,
                )
            )
    return Dataset(ds.schema, tuple(new_instances))


def add_partial_instances(
    ds: Dataset,
    count_p: int,
    count_n: int,
    fixed: Mapping[str, int] | None = None,
) -> Dataset:
    """Append synthetic instances with only the ``fixed`` attributes assigned.

    P-instances come before N-instances so the output is deterministic.
    """
    if count_p < 0 or count_n < 0:
        raise DatasetError("instance counts must be non-negative")
    fixed = dict(fixed or {})
    template: list[int | None] = [UNSPECIFIED] * len(ds.schema)
    for name, value in fixed.items():
        if value not in (0, 1):
            raise DatasetError(f"non-binary fixed value {name}={value!r}")
        template[ds.schema.index_of(name)] = value
    values = tuple(template)
    new = [Instance(values, Label.P, Provenance.SYNTHETIC) for _ in range(count_p)]
    new += [Instance(values, Label.N, Provenance.SYNTHETIC) for _ in range(count_n)]
    return Dataset(ds.schema, ds.instances + tuple(new))


def class_counts(
    ds: Dataset, predicate: Callable[[Instance], bool] | None = None
) -> tuple[int, int]:
    """Exact (P, N) counts over the instances satisfying ``predicate``."""
    p = n = 0
    for inst in ds.instances:
        if predicate is not None and not predicate(inst):
            continue
        if inst.label is Label.P:
            p += 1
        else:
            n += 1
    return p, n
