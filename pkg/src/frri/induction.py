"""Fuzzy-rough rule induction: rule shortening, set-cover rule selection and inference."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from .data import DecisionSystem, NormalizationParams
from .fuzzy import Implicator, TNorm, attribute_relation, positive_region_from_relation
from .setcover import InfeasibleError, SetCoverProblem, solve_exact


class ConditionKind(str, Enum):
    UNUSED = "UNUSED"
    SIMILAR = "SIMILAR"
    DOMINANT = "DOMINANT"
    DOMINATED = "DOMINATED"


# order in which rule_prune tries to relax a condition
TRIAL_ORDER = (ConditionKind.UNUSED, ConditionKind.DOMINANT, ConditionKind.DOMINATED, ConditionKind.SIMILAR)


@dataclass(frozen=True)
class FRRIConfig:
    tnorm: TNorm = TNorm.MINIMUM
    implicator: Implicator = Implicator.LUKASIEWICZ
    scale: float = 1.0       # similarity scale (1 = unscaled relation)
    epsilon: float = 0.0     # consistency tolerance
    theta: float = 0.5       # coverage threshold for the set-cover matrix
    node_budget: int = 5_000_000
    time_limit: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "tnorm", TNorm(self.tnorm))
        object.__setattr__(self, "implicator", Implicator(self.implicator))
        if not 0.0 < self.scale <= 1.0:
            raise ValueError(f"scale must lie in (0, 1], got {self.scale}")
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tnorm"], d["implicator"] = self.tnorm.value, self.implicator.value
        return d


@dataclass(frozen=True)
class Rule:
    generator: int
    anchors: tuple[float, ...]
    kinds: tuple[ConditionKind, ...]
    consequent: str
    consequent_degree: float

    @property
    def length(self) -> int:
        return sum(k is not ConditionKind.UNUSED for k in self.kinds)

    def describe(self, names: Sequence[str], params: NormalizationParams | None = None) -> str:
        ops = {ConditionKind.SIMILAR: "~", ConditionKind.DOMINANT: "<=", ConditionKind.DOMINATED: ">="}
        terms = []
        for a, (kind, anchor) in enumerate(zip(self.kinds, self.anchors)):
            if kind is ConditionKind.UNUSED:
                continue
            value = anchor
            if params is not None:
                value = params.mins[a] + anchor * (params.maxs[a] - params.mins[a])
            terms.append(f"{names[a]} {ops[kind]} {value:.6g}")
        body = " AND ".join(terms) if terms else "TRUE"
        return f"IF {body} THEN {self.consequent} [{self.consequent_degree:.3f}]"


@dataclass
class Ruleset:
    rules: list[Rule]
    attributes: tuple[str, ...]
    class_vocabulary: tuple[str, ...]
    class_counts: tuple[int, ...]
    theta: float
    norm_params: NormalizationParams | None = None
    optimal: bool = True
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rules)

    def to_dict(self) -> dict:
        return {
            "attributes": list(self.attributes),
            "class_vocabulary": list(self.class_vocabulary),
            "class_counts": list(self.class_counts),
            "theta": self.theta,
            "optimal": self.optimal,
            "norm_params": self.norm_params.to_dict() if self.norm_params is not None else None,
            "meta": self.meta,
            "rules": [{"generator": r.generator, "kinds": [k.value for k in r.kinds],
                       "anchors": list(r.anchors), "class": r.consequent,
                       "consequent_degree": r.consequent_degree} for r in self.rules],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Ruleset":
        rules = [Rule(int(r["generator"]), tuple(float(x) for x in r["anchors"]),
                      tuple(ConditionKind(k) for k in r["kinds"]), str(r["class"]),
                      float(r["consequent_degree"])) for r in d["rules"]]
        params = NormalizationParams.from_dict(d["norm_params"]) if d.get("norm_params") else None
        return cls(rules, tuple(d["attributes"]), tuple(d["class_vocabulary"]),
                   tuple(d.get("class_counts") or [0] * len(d["class_vocabulary"])),
                   float(d["theta"]), params, bool(d.get("optimal", True)), d.get("meta", {}))

    @classmethod
    def from_json(cls, text: str) -> "Ruleset":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CoverInstance:
    z: np.ndarray
    selected: np.ndarray
    optimal: bool


# --------------------------------------------------------------------------
# relations and degrees

def _full_relation(ds: DecisionSystem, cfg: FRRIConfig) -> np.ndarray:
    if ds.n_attributes == 0:
        return np.ones((ds.n_objects, ds.n_objects))
    return cfg.tnorm.reduce(np.stack([attribute_relation(ds.values[:, a], ds.relation_kinds[a], cfg.scale)
                                      for a in range(ds.n_attributes)]))


def consequent_degrees(ds: DecisionSystem, cfg: FRRIConfig = FRRIConfig()) -> np.ndarray:
    """Lower-approximation membership of every object in its own class."""
    return positive_region_from_relation(_full_relation(ds, cfg), ds.labels, cfg.implicator)


def _condition_values(anchors: np.ndarray, kinds: Sequence[ConditionKind], rows: np.ndarray,
                      scale: float) -> np.ndarray:
    """Per-attribute relation values, shape (n_attributes, n_rows)."""
    rows = np.atleast_2d(rows)
    out = np.ones((len(kinds), rows.shape[0]))
    for a, kind in enumerate(kinds):
        if kind is ConditionKind.SIMILAR:
            out[a] = np.maximum(0.0, 1.0 - np.abs(rows[:, a] - anchors[a]) / scale)
        elif kind is ConditionKind.DOMINANT:
            out[a] = np.clip(1.0 - (rows[:, a] - anchors[a]) / scale, 0.0, 1.0)
        elif kind is ConditionKind.DOMINATED:
            out[a] = np.clip(1.0 - (anchors[a] - rows[:, a]) / scale, 0.0, 1.0)
    return out


def _check_rows(rule: Rule, rows) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[1] != len(rule.kinds):
        raise ValueError(f"row has {rows.shape[1]} attributes, rule has {len(rule.kinds)}")
    return rows


def matching_degree(rule: Rule, rows, scale: float = 1.0):
    arr = np.asarray(rows, dtype=float)
    vals = _condition_values(np.asarray(rule.anchors), rule.kinds, _check_rows(rule, arr), scale)
    m = vals.min(axis=0) if len(rule.kinds) else np.ones(vals.shape[1])
    return float(m[0]) if arr.ndim == 1 else m


def covering_membership(rule: Rule, rows, scale: float = 1.0):
    m = matching_degree(rule, rows, scale)
    return np.minimum(m, rule.consequent_degree) if isinstance(m, np.ndarray) else min(m, rule.consequent_degree)


# --------------------------------------------------------------------------
# rule shortening

def total_rule(ds: DecisionSystem, u: int, cfg: FRRIConfig = FRRIConfig(), degrees=None) -> Rule:
    if degrees is None:
        degrees = consequent_degrees(ds, cfg)
    return Rule(int(u), tuple(float(v) for v in ds.values[u]), (ConditionKind.SIMILAR,) * ds.n_attributes,
                str(ds.labels[u]), float(degrees[u]))


def is_consistent(ds: DecisionSystem, rule: Rule, epsilon: float = 0.0, scale: float = 1.0) -> bool:
    """True iff the rule's covering set is a fuzzy subset of its (crisp) class, up to ``epsilon``."""
    cover = covering_membership(rule, ds.values, scale)
    in_class = (ds.labels == rule.consequent).astype(float)
    return bool(np.all(cover <= in_class + epsilon))


def _check_order(attr_order, n_att: int) -> list[int]:
    order = [int(a) for a in attr_order]
    if sorted(order) != list(range(n_att)):
        raise ValueError(f"attribute order {order} is not a permutation of 0..{n_att - 1}")
    return order


def rule_prune(ds: DecisionSystem, u: int, attr_order=None, cfg: FRRIConfig = FRRIConfig(),
               degrees=None) -> Rule:
    """Greedily relax the total rule of ``u`` one attribute at a time."""
    n_att = ds.n_attributes
    order = _check_order(range(n_att) if attr_order is None else attr_order, n_att)
    base = total_rule(ds, u, cfg, degrees)
    cdeg = base.consequent_degree
    other = ds.labels != ds.labels[u]
    if not other.any() or cdeg <= cfg.epsilon:
        # nothing outside the class can be covered above epsilon
        return replace(base, kinds=(ConditionKind.UNUSED,) * n_att)

    anchors = ds.values[u]
    rows = ds.values[other]
    rel = {kind: _condition_values(anchors, (kind,) * n_att, rows, cfg.scale)
           for kind in (ConditionKind.SIMILAR, ConditionKind.DOMINANT, ConditionKind.DOMINATED)}
    # suffix[j]: min over attributes order[j:] of the SIMILAR relation (still untouched conditions)
    suffix = np.ones((n_att + 1, rows.shape[0]))
    for j in range(n_att - 1, -1, -1):
        suffix[j] = np.minimum(suffix[j + 1], rel[ConditionKind.SIMILAR][order[j]])

    kinds = [ConditionKind.SIMILAR] * n_att
    fixed = np.ones(rows.shape[0])
    for j, a in enumerate(order):
        context = np.minimum(fixed, suffix[j + 1])
        chosen = ConditionKind.SIMILAR
        for kind in TRIAL_ORDER:
            cand = context if kind is ConditionKind.UNUSED else np.minimum(context, rel[kind][a])
            if np.minimum(cand, cdeg).max() <= cfg.epsilon:
                chosen = kind
                break
        kinds[a] = chosen
        if chosen is not ConditionKind.UNUSED:
            fixed = np.minimum(fixed, rel[chosen][a])
    return replace(base, kinds=tuple(kinds))


def shorten_all(ds: DecisionSystem, attr_order=None, cfg: FRRIConfig = FRRIConfig()) -> list[Rule]:
    degrees = consequent_degrees(ds, cfg)
    return [rule_prune(ds, u, attr_order, cfg, degrees) for u in range(ds.n_objects)]


# --------------------------------------------------------------------------
# rule selection

def coverage_matrix(ds: DecisionSystem, rules: Sequence[Rule], theta: float, scale: float = 1.0) -> np.ndarray:
    """z[r, v] = covering degree of object v by rule r is at least theta; generators always cover themselves."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    z = np.zeros((len(rules), ds.n_objects), dtype=bool)
    for r, rule in enumerate(rules):
        z[r] = covering_membership(rule, ds.values, scale) >= theta
        z[r, rule.generator] = True
    return z


def select_rules(z: np.ndarray, node_budget: int = 5_000_000, time_limit: float | None = None) -> CoverInstance:
    problem = SetCoverProblem(z)
    try:
        sol = solve_exact(problem, node_budget=node_budget, time_limit=time_limit)
    except InfeasibleError:
        raise
    return CoverInstance(problem.membership, sol.selected, sol.optimal)


def fit(ds: DecisionSystem, attr_order=None, cfg: FRRIConfig = FRRIConfig(), meta: dict | None = None) -> Ruleset:
    """Shorten one rule per training object, then keep a minimum covering subset."""
    rules = shorten_all(ds, attr_order, cfg)
    cover = select_rules(coverage_matrix(ds, rules, cfg.theta, cfg.scale), cfg.node_budget, cfg.time_limit)
    chosen = [rules[r] for r in np.flatnonzero(cover.selected)]
    info = {"config": cfg.to_dict()}
    if attr_order is not None:
        info["attribute_order"] = [int(a) for a in attr_order]
    info.update(meta or {})
    return Ruleset(chosen, ds.attribute_names, ds.class_vocabulary, ds.class_counts, cfg.theta,
                   ds.norm_params, cover.optimal, info)


# --------------------------------------------------------------------------
# inference

def covering_matrix(ruleset: Ruleset, rows, scale: float = 1.0) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    return np.stack([covering_membership(r, rows, scale) for r in ruleset.rules])


def classify(ruleset: Ruleset, rows, scale: float | None = None):
    """Class of the rule(s) with the highest covering degree.

    Ties go to the class with the larger training count, then to the
    earlier class in the vocabulary.
    """
    if not ruleset.rules:
        raise ValueError("cannot classify with an empty ruleset")
    if scale is None:
        scale = ruleset.meta.get("config", {}).get("scale", 1.0)
    arr = np.asarray(rows, dtype=float)
    cover = covering_matrix(ruleset, arr, scale)
    vocab = {c: k for k, c in enumerate(ruleset.class_vocabulary)}
    rank = {c: (-ruleset.class_counts[k], k) for c, k in vocab.items()}
    consequents = np.array([r.consequent for r in ruleset.rules], dtype=object)
    out = []
    for col in cover.T:
        winners = set(consequents[col == col.max()])
        out.append(min(winners, key=rank.__getitem__))
    return out[0] if arr.ndim == 1 else np.array(out, dtype=object)
