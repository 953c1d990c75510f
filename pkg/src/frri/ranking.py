"""Attribute orderings: ordered QuickReduct, mutual information and Pearson correlation.

Each method returns an :class:`AttributeOrder`; :func:`apply_policy` turns an
order into the retained attribute prefix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import digamma

from .fuzzy import (DegenerateSystemError, Implicator, TNorm, attribute_relation,
                    positive_region_from_relation)

GAMMA_TOL = 1e-9


class Method(str, Enum):
    OFRFS = "ofrfs"
    MI = "mi"
    PCC = "pcc"
    IDENTITY = "identity"


@dataclass(frozen=True)
class AttributeOrder:
    ranked_indices: tuple[int, ...]
    method: Method
    scores: tuple[float, ...] | None = None
    gamma_trace: tuple[float, ...] | None = None
    superreduct_size: int | None = None

    def to_dict(self, names=None) -> dict:
        out = {"method": self.method.value, "ranked_attributes": list(self.ranked_indices)}
        if names is not None:
            out["ranked_names"] = [names[a] for a in self.ranked_indices]
        if self.scores is not None:
            out["scores"] = list(self.scores)
        if self.gamma_trace is not None:
            out["gamma_trace"] = list(self.gamma_trace)
        if self.superreduct_size is not None:
            out["superreduct_size"] = self.superreduct_size
        return out


def identity_order(ds) -> AttributeOrder:
    return AttributeOrder(tuple(range(ds.n_attributes)), Method.IDENTITY)


def quickreduct_ordered(ds, t=TNorm.MINIMUM, i=Implicator.LUKASIEWICZ, scale: float = 1.0) -> AttributeOrder:
    """Greedy QuickReduct that records selection order.

    Each round adds the first attribute (by index) with the largest
    dependency degree. When no candidate strictly improves, the first
    maximizer is still added so the loop always reaches gamma = 1.
    Unselected attributes are appended in index order afterwards.
    """
    t, i = TNorm(t), Implicator(i)
    n_att = ds.n_attributes
    if n_att < 1:
        raise ValueError("decision system has no attributes")
    labels = ds.labels
    relations = {}

    def rel(a):
        if a not in relations:
            relations[a] = attribute_relation(ds.values[:, a], ds.relation_kinds[a], scale)
        return relations[a]

    full_rel = t.reduce(np.stack([rel(a) for a in range(n_att)])) if n_att > 1 else rel(0)
    pos_full = positive_region_from_relation(full_rel, labels, i).sum()
    if pos_full <= 0.0:
        raise DegenerateSystemError("positive region of the full attribute set is empty")

    def dependency(r):
        return positive_region_from_relation(r, labels, i).sum() / pos_full

    selected: list[int] = []
    trace: list[float] = []
    current = np.ones((ds.n_objects, ds.n_objects))
    g_current = dependency(current)
    while g_current < 1.0 - GAMMA_TOL and len(selected) < n_att:
        best, best_g, best_rel = None, -np.inf, None
        for a in range(n_att):
            if a in selected:
                continue
            cand = t(current, rel(a))
            g = dependency(cand)
            if g > best_g:
                best, best_g, best_rel = a, g, cand
        selected.append(best)
        current, g_current = best_rel, best_g
        trace.append(float(best_g))
    stop = len(selected)
    rest = [a for a in range(n_att) if a not in selected]
    return AttributeOrder(tuple(selected + rest), Method.OFRFS, gamma_trace=tuple(trace),
                          superreduct_size=stop)


def _sorted_by_score(scores: np.ndarray) -> tuple[int, ...]:
    return tuple(sorted(range(len(scores)), key=lambda a: (-scores[a], a)))


def mi_continuous_discrete(x: np.ndarray, labels: np.ndarray, k: int = 3) -> float:
    """k-NN mutual information between a continuous column and class labels.

    Ross-style estimator without random jitter. Ties are handled by
    counting every point within the k-th same-class neighbour distance,
    both inside the class (k_i) and overall (m_i); on tie-free data this
    is the usual estimator. Objects whose class occurs only once are ignored.
    """
    x = np.asarray(x, dtype=float)
    labels = np.asarray(labels, dtype=object)
    radius = np.zeros(len(x))
    k_all = np.zeros(len(x))
    counts = np.zeros(len(x), dtype=int)
    for c in dict.fromkeys(labels):
        mask = labels == c
        n_c = int(mask.sum())
        counts[mask] = n_c
        if n_c > 1:
            kc = min(k, n_c - 1)
            xc = x[mask]
            d = np.abs(xc[:, None] - xc[None, :])
            # position 0 after partition is the self-distance
            kth = np.partition(d, kc, axis=1)[:, kc]
            radius[mask] = kth
            k_all[mask] = (d <= kth[:, None]).sum(axis=1) - 1
    keep = counts > 1
    n = int(keep.sum())
    if n == 0:
        return 0.0
    xk, rk = x[keep], radius[keep]
    m_all = (np.abs(xk[:, None] - xk[None, :]) <= rk[:, None]).sum(axis=1) - 1
    mi = digamma(n) + digamma(k_all[keep]).mean() - digamma(counts[keep]).mean() - digamma(m_all).mean()
    return max(0.0, float(mi))


def mi_scores(ds, k: int = 3) -> AttributeOrder:
    if ds.n_objects < 2:
        raise ValueError("mutual information needs at least two objects")
    if len(ds.class_vocabulary) < 2:
        warnings.warn("single-class system: all mutual information scores are 0", stacklevel=2)
        scores = np.zeros(ds.n_attributes)
    else:
        scores = np.array([mi_continuous_discrete(ds.values[:, a], ds.labels, k)
                           for a in range(ds.n_attributes)])
    return AttributeOrder(_sorted_by_score(scores), Method.MI, scores=tuple(float(s) for s in scores))


def pcc_scores(ds) -> AttributeOrder:
    """|Pearson r| between each attribute and the integer-coded class."""
    if ds.n_objects < 2:
        raise ValueError("correlation needs at least two objects")
    y = ds.class_codes.astype(float)
    yc = y - y.mean()
    if not np.any(yc):
        warnings.warn("single-class system: all correlation scores are 0", stacklevel=2)
        scores = np.zeros(ds.n_attributes)
    else:
        X = ds.values - ds.values.mean(axis=0)
        scores = np.abs(X.T @ yc) / (np.sqrt((X ** 2).sum(axis=0)) * np.sqrt((yc ** 2).sum()))
    return AttributeOrder(_sorted_by_score(scores), Method.PCC, scores=tuple(float(s) for s in scores))


def rank_attributes(ds, method, t=TNorm.MINIMUM, i=Implicator.LUKASIEWICZ, scale: float = 1.0) -> AttributeOrder:
    method = Method(method)
    if method is Method.OFRFS:
        return quickreduct_ordered(ds, t, i, scale)
    if method is Method.MI:
        return mi_scores(ds)
    if method is Method.PCC:
        return pcc_scores(ds)
    return identity_order(ds)


@dataclass(frozen=True)
class RetentionPolicy:
    """``full`` (-1), ``fraction`` with tenths in 1..9 (-.x), or ``superreduct`` (-0)."""

    kind: str
    tenths: int | None = None

    def __post_init__(self):
        if self.kind not in ("full", "fraction", "superreduct"):
            raise ValueError(f"unknown retention kind {self.kind!r}")
        if self.kind == "fraction" and self.tenths not in range(1, 10):
            raise ValueError(f"fraction retention needs tenths in 1..9, got {self.tenths}")

    @classmethod
    def parse(cls, text: str) -> "RetentionPolicy":
        s = str(text).strip().lower()
        if s in ("1", "1.0", "full"):
            return cls("full")
        if s in ("0", "0.0", "superreduct"):
            return cls("superreduct")
        try:
            value = float(s)
        except ValueError:
            raise ValueError(f"unknown retention policy {text!r}") from None
        tenths = round(value * 10)
        if not np.isclose(value * 10, tenths) or tenths not in range(1, 10):
            raise ValueError(f"retention fraction must be one of 0.1..0.9, got {text!r}")
        return cls("fraction", tenths)

    @property
    def label(self) -> str:
        return {"full": "1", "superreduct": "0"}.get(self.kind) or f"0.{self.tenths}"


def retained_count(tenths: int, total: int) -> int:
    """``floor(tenths / 10 * total)``, escalated until at least two attributes remain."""
    for x in range(tenths, 10):
        count = x * total // 10
        if count >= 2:
            return count
    return total


def apply_policy(order: AttributeOrder, policy: RetentionPolicy, total_attributes: int) -> list[int]:
    ranked = list(order.ranked_indices)
    if policy.kind == "full":
        return ranked
    if policy.kind == "superreduct":
        if order.method is not Method.OFRFS or order.superreduct_size is None:
            raise ValueError("superreduct retention requires an ofrfs order")
        return ranked[:order.superreduct_size]
    return ranked[:retained_count(policy.tenths, total_attributes)]
