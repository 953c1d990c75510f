"""Fuzzy connectives, fuzzy relations and fuzzy rough approximations.

Fuzzy sets are plain 1-D numpy arrays of memberships in [0, 1]; fuzzy
relations are dense square matrices. Every function here is pure.
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

import numpy as np

TOL = 1e-12


class ContractError(ValueError):
    """Raised when an input violates a documented precondition."""


class DegenerateSystemError(ValueError):
    """Raised when the full-attribute positive region has zero sigma-count."""


class TNorm(str, Enum):
    MINIMUM = "minimum"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"

    def __call__(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self is TNorm.MINIMUM:
            return np.minimum(a, b)
        if self is TNorm.PRODUCT:
            return a * b
        return np.maximum(0.0, a + b - 1.0)

    def reduce(self, stack: np.ndarray) -> np.ndarray:
        """Aggregate along the first axis."""
        stack = np.asarray(stack, dtype=float)
        if self is TNorm.MINIMUM:
            return stack.min(axis=0)
        if self is TNorm.PRODUCT:
            return stack.prod(axis=0)
        return np.maximum(0.0, stack.sum(axis=0) - (stack.shape[0] - 1))


class Implicator(str, Enum):
    KLEENE_DIENES = "kleene-dienes"
    LUKASIEWICZ = "lukasiewicz"
    GODEL = "godel"

    def __call__(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self is Implicator.KLEENE_DIENES:
            return np.maximum(1.0 - a, b)
        if self is Implicator.LUKASIEWICZ:
            return np.minimum(1.0, 1.0 - a + b)
        return np.where(a <= b, 1.0, b)


def _check_degrees(*values) -> None:
    for v in values:
        arr = np.asarray(v, dtype=float)
        if arr.size and (np.isnan(arr).any() or arr.min() < 0.0 or arr.max() > 1.0):
            raise ContractError(f"degree outside [0, 1]: {v!r}")


def tnorm_apply(t: TNorm | str, a: float, b: float) -> float:
    _check_degrees(a, b)
    return float(TNorm(t)(a, b))


def implicator_apply(i: Implicator | str, a: float, b: float) -> float:
    _check_degrees(a, b)
    return float(Implicator(i)(a, b))


def _check_scale(scale: float) -> None:
    if not 0.0 < scale <= 1.0:
        raise ContractError(f"similarity scale must lie in (0, 1], got {scale}")


def indiscernibility(x, y, scale: float = 1.0):
    """``1 - |x - y|``, or ``max(0, 1 - |x - y| / scale)`` for scale < 1."""
    _check_degrees(x, y)
    _check_scale(scale)
    out = np.maximum(0.0, 1.0 - np.abs(np.asarray(x, float) - np.asarray(y, float)) / scale)
    return float(out) if out.ndim == 0 else out


def dominance(x, y, scale: float = 1.0):
    """Degree to which ``x`` dominates ``y``: ``min(1 - (y - x), 1)``.

    The same scale knob as :func:`indiscernibility` applies; ``scale=1``
    is the unscaled relation.
    """
    _check_degrees(x, y)
    _check_scale(scale)
    diff = np.asarray(y, float) - np.asarray(x, float)
    out = np.clip(1.0 - diff / scale, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


class RelationKind(str, Enum):
    INDISCERNIBILITY = "indiscernibility"
    DOMINANCE = "dominance"


def attribute_relation(column: np.ndarray, kind: RelationKind | str = RelationKind.INDISCERNIBILITY,
                       scale: float = 1.0) -> np.ndarray:
    """Object x object relation matrix R_a for one normalized column."""
    column = np.asarray(column, dtype=float)
    _check_degrees(column)
    _check_scale(scale)
    diff = column[None, :] - column[:, None]  # diff[u, v] = a(v) - a(u)
    if RelationKind(kind) is RelationKind.INDISCERNIBILITY:
        return np.maximum(0.0, 1.0 - np.abs(diff) / scale)
    return np.clip(1.0 - diff / scale, 0.0, 1.0)


def b_indiscernibility(ds, attributes: Sequence[int], per_attribute_kinds=None,
                       t: TNorm | str = TNorm.MINIMUM, scale: float = 1.0) -> np.ndarray:
    """T-aggregated relation R_B over the attribute subset ``attributes``."""
    attributes = list(attributes)
    if not attributes:
        raise ContractError("relation over an empty attribute subset is undefined")
    t = TNorm(t)
    kinds = per_attribute_kinds if per_attribute_kinds is not None else ds.relation_kinds
    rel = None
    for a in attributes:
        r_a = attribute_relation(ds.values[:, a], kinds[a], scale)
        rel = r_a if rel is None else t(rel, r_a)
    return rel


def _check_universe(A: np.ndarray, R: np.ndarray) -> None:
    if R.ndim != 2 or R.shape[0] != R.shape[1] or R.shape[1] != A.shape[0]:
        raise ContractError(f"fuzzy set of size {A.shape[0]} does not match relation {R.shape}")


def lower_approximation(A, R, i: Implicator | str = Implicator.LUKASIEWICZ) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    R = np.asarray(R, dtype=float)
    _check_universe(A, R)
    return Implicator(i)(R, A[None, :]).min(axis=1)


def upper_approximation(A, R, t: TNorm | str = TNorm.MINIMUM) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    R = np.asarray(R, dtype=float)
    _check_universe(A, R)
    return TNorm(t)(R, A[None, :]).max(axis=1)


def positive_region_from_relation(R: np.ndarray, labels: np.ndarray,
                                  i: Implicator | str = Implicator.LUKASIEWICZ) -> np.ndarray:
    """POS(u): membership of u in the lower approximation of its own class."""
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    return Implicator(i)(R, same.astype(float)).min(axis=1)


def positive_region(ds, attributes: Sequence[int], t: TNorm | str = TNorm.MINIMUM,
                    i: Implicator | str = Implicator.LUKASIEWICZ, scale: float = 1.0) -> np.ndarray:
    R = b_indiscernibility(ds, attributes, t=t, scale=scale)
    return positive_region_from_relation(R, ds.labels, i)


def gamma(ds, attributes: Sequence[int], t: TNorm | str = TNorm.MINIMUM,
          i: Implicator | str = Implicator.LUKASIEWICZ, scale: float = 1.0) -> float:
    """Degree of dependency of the decision on ``attributes``."""
    full = positive_region(ds, range(ds.n_attributes), t, i, scale).sum()
    if full <= 0.0:
        raise DegenerateSystemError("positive region of the full attribute set is empty")
    return float(positive_region(ds, attributes, t, i, scale).sum() / full)
