"""Cross-validation of FRRI variants and the three reported metrics."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import FoldSplit, RawDataset, fit_normalize, make_folds, transform_new
from .induction import FRRIConfig, Ruleset, classify, fit
from .ranking import AttributeOrder, Method, RetentionPolicy, apply_policy, rank_attributes


def balanced_accuracy(true_labels, predicted_labels, vocabulary=None) -> float:
    """Mean per-class recall over the classes present in ``true_labels``.

    ``vocabulary`` only fixes the order; a true class missing from it still
    counts (its recall is whatever the predictions achieve, usually 0).
    """
    y = np.asarray(true_labels, dtype=object)
    p = np.asarray(predicted_labels, dtype=object)
    if len(y) == 0:
        raise ValueError("balanced accuracy of an empty sample")
    if len(y) != len(p):
        raise ValueError("label and prediction lengths differ")
    classes = [c for c in dict.fromkeys(list(vocabulary or ()) + list(y)) if np.any(y == c)]
    return float(np.mean([np.mean(p[y == c] == c) for c in classes]))


def mean_rule_length(ruleset: Ruleset) -> float:
    if not ruleset.rules:
        raise ValueError("mean rule length of an empty ruleset")
    return float(np.mean([r.length for r in ruleset.rules]))


@dataclass(frozen=True)
class Variant:
    """A ranking method plus retention policy, e.g. ``ofrfs-0.9``."""

    name: str
    method: Method
    policy: RetentionPolicy

    @classmethod
    def parse(cls, text: str) -> "Variant":
        s = text.strip().lower()
        if s == "control":
            return cls("control", Method.IDENTITY, RetentionPolicy("full"))
        method, sep, level = s.partition("-")
        if not sep:
            raise ValueError(f"variant {text!r} must look like control, ofrfs-1, mi-0.9 or ofrfs-0")
        try:
            m = Method(method)
        except ValueError:
            raise ValueError(f"unknown ranking method {method!r} in variant {text!r}") from None
        policy = RetentionPolicy.parse(level)
        if policy.kind == "superreduct" and m is not Method.OFRFS:
            raise ValueError(f"superreduct retention is only defined for ofrfs, got {text!r}")
        return cls(f"{m.value}-{policy.label}", m, policy)

    @property
    def retention(self) -> float | None:
        """Retained fraction for plotting; None for the superreduct cut."""
        if self.policy.kind == "full":
            return 1.0
        if self.policy.kind == "fraction":
            return self.policy.tenths / 10
        return None


@dataclass
class FoldResult:
    dataset: str
    variant: str
    fold: int
    balanced_accuracy: float
    rule_count: int
    mean_rule_length: float
    n_attributes: int
    n_retained: int
    optimal: bool
    seconds: float
    ruleset: Ruleset | None = None

    def row(self) -> dict:
        return {k: getattr(self, k) for k in ("dataset", "variant", "fold", "balanced_accuracy", "rule_count",
                                              "mean_rule_length", "n_attributes", "n_retained", "optimal")}


def fit_variant(ds, variant: Variant, cfg: FRRIConfig, order: AttributeOrder | None = None,
                source_attributes: Sequence[str] | None = None) -> Ruleset:
    """Rank (unless ``order`` is given), retain, and fit FRRI on the reduced system."""
    if order is None:
        order = rank_attributes(ds, variant.method, cfg.tnorm, cfg.implicator, cfg.scale)
    retained = apply_policy(order, variant.policy, ds.n_attributes) or list(order.ranked_indices[:1])
    columns = sorted(retained)
    reduced = ds.subset(columns)
    position = {a: k for k, a in enumerate(columns)}
    meta = {"variant": variant.name, "retained_attributes": [ds.attribute_names[a] for a in retained]}
    if source_attributes is not None:
        meta["source_attributes"] = list(source_attributes)
    return fit(reduced, [position[a] for a in retained], cfg, meta)


def evaluate_fold(raw: RawDataset, split: FoldSplit, variants: Sequence[Variant], cfg: FRRIConfig,
                  dataset: str = "dataset", fold: int = 0, keep_rulesets: bool = False) -> list[FoldResult]:
    """Fit every variant on one training fold and score it on the test fold.

    Rankings are computed once per method and shared between variants.
    Nothing from the test rows is used before prediction.
    """
    train_labels = [raw.labels[i] for i in split.train_indices]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ds = fit_normalize(raw.values[split.train_indices], train_labels, raw.attribute_names)
    test_raw = raw.values[split.test_indices]
    test_labels = np.array([raw.labels[i] for i in split.test_indices], dtype=object)
    orders: dict[Method, AttributeOrder] = {}
    results = []
    for variant in variants:
        start = time.perf_counter()
        if variant.method not in orders:
            orders[variant.method] = rank_attributes(ds, variant.method, cfg.tnorm, cfg.implicator, cfg.scale)
        ruleset = fit_variant(ds, variant, cfg, orders[variant.method], raw.attribute_names)
        predictions = classify(ruleset, _transform(ruleset, test_raw))
        results.append(FoldResult(
            dataset, variant.name, fold,
            balanced_accuracy(test_labels, predictions, ds.class_vocabulary),
            len(ruleset), mean_rule_length(ruleset), ds.n_attributes, len(ruleset.attributes),
            ruleset.optimal, time.perf_counter() - start, ruleset if keep_rulesets else None))
    return results


def _transform(ruleset: Ruleset, raw_rows: np.ndarray) -> np.ndarray:
    return transform_new(ruleset.norm_params, raw_rows)


def run_cv(raw: RawDataset, variants: Sequence[Variant | str], cfg: FRRIConfig = FRRIConfig(),
           folds: Sequence[FoldSplit] | None = None, k: int = 10, seed: int = 0,
           dataset: str = "dataset", keep_rulesets: bool = False) -> list[FoldResult]:
    variants = [v if isinstance(v, Variant) else Variant.parse(v) for v in variants]
    if folds is None:
        folds = make_folds(raw.labels, k, seed)
    results = []
    for f, split in enumerate(folds):
        results.extend(evaluate_fold(raw, split, variants, cfg, dataset, f, keep_rulesets))
    return results


def aggregate(results: Sequence[FoldResult]) -> dict[tuple[str, str], dict[str, float]]:
    """Per (dataset, variant) means of the three metrics."""
    groups: dict[tuple[str, str], list[FoldResult]] = {}
    for r in results:
        groups.setdefault((r.dataset, r.variant), []).append(r)
    return {key: {"balanced_accuracy": float(np.mean([r.balanced_accuracy for r in rs])),
                  "rule_count": float(np.mean([r.rule_count for r in rs])),
                  "mean_rule_length": float(np.mean([r.mean_rule_length for r in rs])),
                  "folds": len(rs),
                  "all_optimal": all(r.optimal for r in rs)}
            for key, rs in groups.items()}
