"""Fuzzy-rough rule induction (FRRI) with attribute ordering and feature selection."""

__version__ = "0.1.0"

from .data import DecisionSystem, fit_normalize, make_folds, parse_csv, parse_keel, read_dataset, transform_new
from .evaluation import Variant, balanced_accuracy, mean_rule_length, run_cv
from .fuzzy import Implicator, TNorm, gamma, lower_approximation, positive_region, upper_approximation
from .induction import FRRIConfig, Rule, Ruleset, classify, fit
from .ranking import RetentionPolicy, apply_policy, mi_scores, pcc_scores, quickreduct_ordered

__all__ = [
    "DecisionSystem", "fit_normalize", "make_folds", "parse_csv", "parse_keel", "read_dataset", "transform_new",
    "Variant", "balanced_accuracy", "mean_rule_length", "run_cv",
    "Implicator", "TNorm", "gamma", "lower_approximation", "positive_region", "upper_approximation",
    "FRRIConfig", "Rule", "Ruleset", "classify", "fit",
    "RetentionPolicy", "apply_policy", "mi_scores", "pcc_scores", "quickreduct_ordered",
]
