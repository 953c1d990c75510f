"""Command-line front end: ``frri rank | fit | predict | experiment``.

Exit codes: 0 success, 1 partial failure, 2 usage/config error,
3 internal contract violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig
from .data import (FoldSplit, ParseError, RawDataset, SchemaMismatchError, fit_normalize, make_folds,
                   read_dataset, transform_new)
from .evaluation import Variant, balanced_accuracy, evaluate_fold, fit_variant
from .fuzzy import ContractError, DegenerateSystemError
from .induction import Ruleset, classify
from .ranking import Method, RetentionPolicy, apply_policy, rank_attributes
from .report import write_report
from .setcover import InfeasibleError

log = logging.getLogger("frri")

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
USAGE_ERRORS = (ConfigError, ParseError, SchemaMismatchError, DegenerateSystemError, FileNotFoundError, ValueError)
INTERNAL_ERRORS = (ContractError, InfeasibleError, AssertionError)

FRRI_FLAGS = ("theta", "scale", "epsilon", "tnorm", "implicator", "node_budget", "time_limit", "label_column")


def _add_frri_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--theta", help="coverage threshold in (0, 1]")
    p.add_argument("--scale", help="similarity scale in (0, 1]")
    p.add_argument("--epsilon", help="consistency tolerance")
    p.add_argument("--tnorm", choices=["minimum", "product", "lukasiewicz"])
    p.add_argument("--implicator", choices=["kleene-dienes", "lukasiewicz", "godel"])
    p.add_argument("--node-budget", dest="node_budget")
    p.add_argument("--time-limit", dest="time_limit", help="seconds per set-cover solve")
    p.add_argument("--label-column", dest="label_column", help="label column for CSV input")


def _load_config(args) -> ExperimentConfig:
    overrides = {k: str(getattr(args, k)) for k in FRRI_FLAGS if getattr(args, k, None) is not None}
    for k in ("jobs", "output", "seed", "folds"):
        if args.command == "experiment" and getattr(args, k, None) is not None:
            overrides[k] = str(getattr(args, k))
    return ExperimentConfig.load(getattr(args, "config", None), overrides)


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_rank(args) -> int:
    cfg = _load_config(args)
    raw = read_dataset(args.dataset, cfg.label_column)
    ds = fit_normalize(raw.values, raw.labels, raw.attribute_names)
    frri_cfg = cfg.frri_config()
    order = rank_attributes(ds, Method(args.method), frri_cfg.tnorm, frri_cfg.implicator, frri_cfg.scale)
    policy = RetentionPolicy.parse(args.retain)
    retained = apply_policy(order, policy, ds.n_attributes)
    doc = order.to_dict(ds.attribute_names)
    doc["full_order"] = doc["ranked_attributes"]
    doc["ranked_attributes"] = retained
    doc["ranked_names"] = [ds.attribute_names[a] for a in retained]
    doc["retain"] = policy.label
    _write(json.dumps(doc, indent=1) + "\n", args.output)
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = _load_config(args)
    raw = read_dataset(args.train, cfg.label_column)
    ds = fit_normalize(raw.values, raw.labels, raw.attribute_names)
    variant = Variant.parse("control" if args.method == "identity" and args.retain in ("1", "full")
                            else f"{args.method}-{args.retain}")
    ruleset = fit_variant(ds, variant, cfg.frri_config(), source_attributes=raw.attribute_names)
    ruleset.meta["resolved_config"] = cfg.resolved()
    _write(ruleset.to_json(), args.output)
    if args.show:
        for rule in ruleset.rules:
            print(rule.describe(ruleset.attributes, ruleset.norm_params), file=sys.stderr)
    log.info("%d rules, optimal selection: %s", len(ruleset), ruleset.optimal)
    return EXIT_OK


def cmd_predict(args) -> int:
    ruleset = Ruleset.from_json(Path(args.ruleset).read_text(encoding="utf-8"))
    raw = read_dataset(args.test, args.label_column or "class")
    if len(raw.labels) == 0:
        raise ParseError(f"{args.test}: no data rows")
    expected = ruleset.meta.get("source_attributes")
    if expected is not None and list(raw.attribute_names) != list(expected):
        raise SchemaMismatchError(f"test attributes {list(raw.attribute_names)} do not match "
                                  f"training attributes {expected}")
    rows = transform_new(ruleset.norm_params, raw.values)
    predictions = classify(ruleset, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row", "true", "predicted"])
    for k, (y, p) in enumerate(zip(raw.labels, predictions)):
        writer.writerow([k, y, p])
    _write(buf.getvalue(), args.output)
    ba = balanced_accuracy(raw.labels, predictions)
    print(f"balanced_accuracy = {ba:.6f}", file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


# --------------------------------------------------------------------------
# experiment

def discover_folds(path: Path, k: int, use_fold_files: bool, label_column: str):
    """Yield (fold_raw, split) pairs for one dataset.

    KEEL partitions named ``<name>-<k>-<i>tra.dat`` / ``<name>-<k>-<i>tst.dat``
    next to ``path`` (or with ``path`` as the prefix) are used when present;
    otherwise the whole file is split with a seeded stratified partition.
    """
    stem = path.name[:-len(path.suffix)] if path.suffix in (".dat", ".csv") else path.name
    pairs = [(path.parent / f"{stem}-{k}-{i}tra.dat", path.parent / f"{stem}-{k}-{i}tst.dat")
             for i in range(1, k + 1)]
    if use_fold_files and all(a.exists() and b.exists() for a, b in pairs):
        out = []
        for tra, tst in pairs:
            a, b = read_dataset(tra, label_column), read_dataset(tst, label_column)
            if a.attribute_names != b.attribute_names:
                raise SchemaMismatchError(f"{tra.name} and {tst.name} have different attributes")
            merged = RawDataset(np.vstack([a.values, b.values]), a.labels + b.labels, a.attribute_names,
                                a.relation, a.label_name)
            n = len(a.labels)
            out.append((merged, FoldSplit(np.arange(n), np.arange(n, n + len(b.labels)))))
        return stem, out, "keel-folds"
    return stem, None, "generated"


def _fold_job(job):
    name, raw, split, fold, variants, frri_cfg = job
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = evaluate_fold(raw, split, [Variant.parse(v) for v in variants], frri_cfg, name, fold)
    log.info("%s fold %d: %.1fs", name, fold, sum(r.seconds for r in results))
    return results


def run_experiment(cfg: ExperimentConfig, output: str | None = None):
    frri_cfg = cfg.frri_config()
    jobs, failures, sources = [], {}, {}
    for path in cfg.dataset_paths():
        name = path.stem
        try:
            name, pairs, source = discover_folds(path, cfg.folds, cfg.fold_files, cfg.label_column)
            if pairs is None:
                raw = read_dataset(path, cfg.label_column)
                pairs = [(raw, split) for split in make_folds(raw.labels, cfg.folds, cfg.seed)]
            sources[name] = source
            for f, (raw, split) in enumerate(pairs):
                jobs.append((name, raw, split, f, cfg.variants, frri_cfg))
        except Exception as exc:  # reported and skipped
            failures[name] = f"{type(exc).__name__}: {exc}"
            log.error("dataset %s skipped: %s", name, exc)

    results, failed_jobs = [], set()
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(_fold_job, job) for job in jobs]
            outcomes = []
            for job, fut in zip(jobs, futures):
                try:
                    outcomes.append((job, fut.result()))
                except Exception as exc:
                    outcomes.append((job, exc))
    else:
        outcomes = []
        for job in jobs:
            try:
                outcomes.append((job, _fold_job(job)))
            except Exception as exc:
                outcomes.append((job, exc))
    for job, outcome in outcomes:
        if isinstance(outcome, Exception):
            failures.setdefault(job[0], f"fold {job[3]}: {type(outcome).__name__}: {outcome}")
            failed_jobs.add(job[0])
        else:
            results.extend(outcome)
    results = [r for r in results if r.dataset not in failed_jobs]
    config_text = cfg.to_text() + "".join(f"# folds[{n}] = {s}\n" for n, s in sources.items())
    doc = write_report(output or cfg.output, config_text, results, failures)
    return doc, failures


def cmd_experiment(args) -> int:
    cfg = _load_config(args)
    if not cfg.datasets:
        raise ConfigError("config lists no datasets")
    doc, failures = run_experiment(cfg)
    log.info("report written to %s", cfg.output)
    for row in doc["summary"]:
        print(f"{row['dataset']:>12} {row['variant']:>10}  bal.acc {row['balanced_accuracy']:.3f}  "
              f"rules {row['rule_count']:7.1f}  length {row['mean_rule_length']:.2f}")
    return EXIT_PARTIAL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frri", description="Fuzzy-rough rule induction with attribute ordering")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = sub.add_parser("rank", parents=[common], help="rank attributes of a dataset and print JSON")
    p.add_argument("dataset")
    p.add_argument("--method", required=True, choices=[m.value for m in Method])
    p.add_argument("--retain", default="full", help="full/1, 0.1..0.9, or 0 (superreduct, ofrfs only)")
    p.add_argument("-o", "--output")
    _add_frri_flags(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("fit", parents=[common], help="induce a ruleset from a training file")
    p.add_argument("train")
    p.add_argument("-o", "--output")
    p.add_argument("--method", default="identity", choices=[m.value for m in Method])
    p.add_argument("--retain", default="1")
    p.add_argument("--show", action="store_true", help="print the rules to stderr")
    _add_frri_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", parents=[common], help="classify a test file with a saved ruleset")
    p.add_argument("ruleset")
    p.add_argument("test")
    p.add_argument("-o", "--output")
    p.add_argument("--label-column", dest="label_column")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("experiment", parents=[common], help="run a cross-validated comparison from a config file")
    p.add_argument("config")
    p.add_argument("--jobs", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except INTERNAL_ERRORS as exc:
        print(f"frri: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except USAGE_ERRORS as exc:
        print(f"frri: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
