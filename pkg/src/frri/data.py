"""Decision systems, min-max normalization and dataset ingestion (KEEL ``.dat`` and CSV)."""

from __future__ import annotations

import csv
import io
import logging
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .fuzzy import RelationKind

log = logging.getLogger(__name__)


class ParseError(ValueError):
    """Malformed dataset text. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SchemaMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class RawDataset:
    values: np.ndarray
    labels: tuple[str, ...]
    attribute_names: tuple[str, ...]
    relation: str = "dataset"
    label_name: str = "class"


@dataclass(frozen=True)
class NormalizationParams:
    """Training-set min/max for every retained attribute.

    ``source_columns`` maps retained attributes back to the raw column
    layout (``n_source`` columns), so raw rows of either arity can be
    transformed.
    """

    mins: np.ndarray
    maxs: np.ndarray
    source_columns: tuple[int, ...]
    n_source: int

    def __post_init__(self):
        if np.any(self.mins > self.maxs):
            raise ValueError("normalization min exceeds max")

    def select(self, raw: np.ndarray) -> np.ndarray:
        raw = np.atleast_2d(np.asarray(raw, dtype=float))
        if raw.shape[1] == len(self.mins):
            return raw
        if raw.shape[1] == self.n_source:
            return raw[:, list(self.source_columns)]
        raise SchemaMismatchError(
            f"row has {raw.shape[1]} values, expected {len(self.mins)} (retained) or {self.n_source} (raw)")

    def to_dict(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist(),
                "source_columns": list(self.source_columns), "n_source": self.n_source}

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationParams":
        return cls(np.asarray(d["mins"], float), np.asarray(d["maxs"], float),
                   tuple(d["source_columns"]), int(d["n_source"]))


@dataclass(frozen=True)
class DecisionSystem:
    values: np.ndarray
    labels: np.ndarray
    attribute_names: tuple[str, ...]
    class_vocabulary: tuple[str, ...]
    norm_params: NormalizationParams
    relation_kinds: tuple[RelationKind, ...] = ()
    dropped: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.relation_kinds:
            object.__setattr__(self, "relation_kinds",
                               (RelationKind.INDISCERNIBILITY,) * self.values.shape[1])
        self.values.setflags(write=False)
        self.labels.setflags(write=False)

    @property
    def n_objects(self) -> int:
        return self.values.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.values.shape[1]

    @property
    def class_codes(self) -> np.ndarray:
        index = {c: k for k, c in enumerate(self.class_vocabulary)}
        return np.array([index[c] for c in self.labels], dtype=int)

    @property
    def class_counts(self) -> tuple[int, ...]:
        return tuple(int(np.sum(self.labels == c)) for c in self.class_vocabulary)

    def subset(self, attributes: Sequence[int]) -> "DecisionSystem":
        """Keep only ``attributes`` (in the given order)."""
        attributes = list(attributes)
        p = self.norm_params
        params = NormalizationParams(p.mins[attributes], p.maxs[attributes],
                                     tuple(p.source_columns[a] for a in attributes), p.n_source)
        return DecisionSystem(self.values[:, attributes].copy(), self.labels.copy(),
                              tuple(self.attribute_names[a] for a in attributes),
                              self.class_vocabulary, params,
                              tuple(self.relation_kinds[a] for a in attributes), self.dropped)

    def transform(self, raw) -> np.ndarray:
        return transform_new(self.norm_params, raw)


def _vocabulary(labels: Sequence[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(labels))


def fit_normalize(raw, labels: Sequence, attribute_names: Sequence[str] | None = None) -> DecisionSystem:
    """Min-max normalize ``raw``; constant attributes are dropped with a warning."""
    values = np.asarray(raw, dtype=float)
    if values.ndim != 2 or values.shape[0] == 0:
        raise ValueError("cannot normalize a dataset with zero objects")
    if len(labels) != values.shape[0]:
        raise ValueError(f"{len(labels)} labels for {values.shape[0]} objects")
    if not np.isfinite(values).all():
        r, c = np.argwhere(~np.isfinite(values))[0]
        raise ParseError(f"non-finite value at row {r}, column {c}")
    n_source = values.shape[1]
    names = tuple(attribute_names) if attribute_names is not None else tuple(f"a{j + 1}" for j in range(n_source))
    mins, maxs = values.min(axis=0), values.max(axis=0)
    keep = [j for j in range(n_source) if maxs[j] > mins[j]]
    dropped = tuple(names[j] for j in range(n_source) if j not in keep)
    for name in dropped:
        warnings.warn(f"attribute {name!r} is constant and was removed", stacklevel=2)
    if not keep:
        raise ValueError("no attribute has a non-zero range")
    params = NormalizationParams(mins[keep], maxs[keep], tuple(keep), n_source)
    labels = np.array([str(x) for x in labels], dtype=object)
    normalized = (values[:, keep] - params.mins) / (params.maxs - params.mins)
    return DecisionSystem(normalized, labels, tuple(names[j] for j in keep),
                          _vocabulary(list(labels)), params, dropped=dropped)


def transform_new(params: NormalizationParams, raw_row) -> np.ndarray:
    """Normalize unseen rows with training parameters, clamping to [0, 1]."""
    raw = np.asarray(raw_row, dtype=float)
    single = raw.ndim == 1
    rows = params.select(raw)
    with np.errstate(over="ignore"):
        out = np.clip((rows - params.mins) / (params.maxs - params.mins), 0.0, 1.0)
    return out[0] if single else out


# --------------------------------------------------------------------------
# KEEL .dat

_ATTR_RE = re.compile(
    r"^@attribute\s+('[^']*'|[^\s{\[]+)\s*(\{.*\}|[a-z]+)?\s*(\[.*\])?\s*$", re.IGNORECASE)
_NUMERIC_TYPES = {"real", "integer", "numeric"}


def _split_names(rest: str) -> list[str]:
    return [x.strip().strip("'") for x in rest.split(",") if x.strip()]


def parse_keel(text: str) -> RawDataset:
    relation = "dataset"
    attrs: list[tuple[str, bool]] = []  # (name, numeric)
    inputs: list[str] | None = None
    outputs: list[str] | None = None
    data_start = None
    lines = text.splitlines()
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        low = s.lower()
        if low.startswith("@relation"):
            relation = s[len("@relation"):].strip() or relation
        elif low.startswith("@attribute"):
            m = _ATTR_RE.match(s)
            if not m:
                raise ParseError(f"malformed attribute declaration: {s!r}", lineno)
            name, kind = m.group(1).strip("'"), (m.group(2) or "real")
            numeric = not kind.startswith("{")
            if numeric and kind.lower() not in _NUMERIC_TYPES:
                raise ParseError(f"unknown attribute type {kind!r}", lineno)
            attrs.append((name, numeric))
        elif low.startswith("@input"):
            inputs = _split_names(s.split(None, 1)[1] if " " in s else "")
        elif low.startswith("@output"):
            outputs = _split_names(s.split(None, 1)[1] if " " in s else "")
        elif low.startswith("@data"):
            data_start = lineno
            break
        else:
            raise ParseError(f"unexpected header line: {s!r}", lineno)
    if data_start is None:
        raise ParseError("missing @data section")
    if not attrs:
        raise ParseError("no @attribute declarations")
    names = [a for a, _ in attrs]
    if outputs is None:
        outputs = [names[-1]]
    if len(outputs) != 1:
        raise ParseError(f"expected exactly one output attribute, got {outputs}")
    if inputs is None:
        inputs = [a for a in names if a not in outputs]
    for a in inputs + outputs:
        if a not in names:
            raise ParseError(f"unknown attribute {a!r} in @inputs/@outputs")
    pos = {a: k for k, a in enumerate(names)}
    numeric = dict(attrs)
    kept = []
    for a in inputs:
        if numeric[a]:
            kept.append(a)
        else:
            warnings.warn(f"categorical input attribute {a!r} removed", stacklevel=2)
    out_col = pos[outputs[0]]
    rows, labels = [], []
    for lineno in range(data_start + 1, len(lines) + 1):
        s = lines[lineno - 1].strip()
        if not s or s.startswith("%"):
            continue
        if s.startswith("{"):
            raise ParseError("sparse KEEL rows are not supported", lineno)
        cells = [c.strip() for c in s.split(",")]
        if len(cells) != len(names):
            raise ParseError(f"expected {len(names)} values, got {len(cells)}", lineno)
        row = []
        for a in kept:
            cell = cells[pos[a]]
            if cell in ("?", "<null>", ""):
                raise ParseError(f"missing value for attribute {a!r}", lineno)
            try:
                row.append(float(cell))
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r} for attribute {a!r}", lineno) from None
        label = cells[out_col]
        if label in ("?", "<null>", ""):
            raise ParseError("missing class label", lineno)
        rows.append(row)
        labels.append(label)
    values = np.array(rows, dtype=float).reshape(len(rows), len(kept))
    return RawDataset(values, tuple(labels), tuple(kept), relation, outputs[0])


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def serialize_keel(raw: RawDataset) -> str:
    lines = [f"@relation {raw.relation}"]
    for j, name in enumerate(raw.attribute_names):
        col = raw.values[:, j]
        kind = "integer" if all(float(v).is_integer() for v in col) else "real"
        lo, hi = (col.min(), col.max()) if len(col) else (0.0, 0.0)
        lines.append(f"@attribute {name} {kind} [{_fmt(lo)}, {_fmt(hi)}]")
    lines.append(f"@attribute {raw.label_name} {{{', '.join(_vocabulary(raw.labels))}}}")
    lines.append(f"@inputs {', '.join(raw.attribute_names)}")
    lines.append(f"@outputs {raw.label_name}")
    lines.append("@data")
    for row, label in zip(raw.values, raw.labels):
        lines.append(", ".join([_fmt(v) for v in row] + [label]))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# CSV

def parse_csv(text: str, label_column: str, delimiter: str = ",") -> RawDataset:
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    table = [r for r in reader if any(c.strip() for c in r)]
    if not table:
        raise ParseError("empty CSV input")
    header = [h.strip() for h in table[0]]
    body = table[1:]
    if label_column not in header:
        raise ParseError(f"label column {label_column!r} not found; available columns: {header}")
    if not body:
        raise ParseError("CSV has a header but no rows")
    label_at = header.index(label_column)
    for k, r in enumerate(body, 2):
        if len(r) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(r)}", k)

    def numeric(cell: str) -> bool:
        try:
            float(cell)
            return True
        except ValueError:
            return False

    columns = []
    for j, name in enumerate(header):
        if j == label_at:
            continue
        flags = [numeric(r[j].strip()) for r in body]
        if all(flags):
            columns.append(j)
        elif not any(flags):
            warnings.warn(f"non-numeric column {name!r} removed", stacklevel=2)
        else:
            k = flags.index(False)
            raise ParseError(f"non-numeric value {body[k][j]!r} in column {name!r}", k + 2)
    values = np.array([[float(r[j]) for j in columns] for r in body], dtype=float).reshape(len(body), len(columns))
    return RawDataset(values, tuple(r[label_at].strip() for r in body),
                      tuple(header[j] for j in columns), label_name=label_column)


def read_dataset(path: str | Path, label_column: str | None = None) -> RawDataset:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        return parse_csv(text, label_column or "class")
    return parse_keel(text)


# --------------------------------------------------------------------------
# Folds

@dataclass(frozen=True)
class FoldSplit:
    train_indices: np.ndarray
    test_indices: np.ndarray


def load_fold_pair(train_file: str | Path, test_file: str | Path):
    """Fit normalization on the training file; return ``(ds, test_values, test_labels)``."""
    train, test = read_dataset(train_file), read_dataset(test_file)
    if train.attribute_names != test.attribute_names:
        raise SchemaMismatchError(
            f"attribute mismatch: {train.attribute_names} vs {test.attribute_names}")
    ds = fit_normalize(train.values, train.labels, train.attribute_names)
    if len(test.labels) == 0:
        raise ParseError(f"{test_file}: no data rows")
    return ds, transform_new(ds.norm_params, test.values), np.array(test.labels, dtype=object)


def make_folds(labels: Sequence, k: int, seed: int = 0) -> list[FoldSplit]:
    """Seeded stratified partition into ``k`` folds."""
    labels = np.asarray(labels, dtype=object)
    n = len(labels)
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= {n}, got k={k}")
    rng = np.random.default_rng(seed)
    assignment = np.empty(n, dtype=int)
    offset = 0
    for c in _vocabulary(list(labels)):
        idx = np.flatnonzero(labels == c)
        if len(idx) < k:
            warnings.warn(f"class {c!r} has {len(idx)} members for {k} folds", stacklevel=2)
        idx = rng.permutation(idx)
        assignment[idx] = (offset + np.arange(len(idx))) % k
        offset = (offset + len(idx)) % k
    everything = np.arange(n)
    return [FoldSplit(everything[assignment != f], everything[assignment == f]) for f in range(k)]
