"""Command-line interface: fuse, optimize, compare, eval.

Every command reads either the embedded synthetic benchmark
(``--synthetic``) or a labeled score CSV (``--input``), and writes its
results under ``--out``.  Machine-readable results are JSON, series
(fused scores, convergence history, ROC curves, comparison tables) are
CSV.  An optional JSON config file supplies defaults; explicit flags win.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal
numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .aggregate import FusionRule, choquet_fuse_batch, rule_fuse_batch
from .data import DataFormatError, load_csv, synthetic_dataset
from .ga import GaConfig, evolve
from .measures import ConvergenceError, LambdaMeasure
from .metrics import LabeledScoreSet, evaluate_scores, write_roc_csv

__all__ = ["main"]

# weighted_sum is omitted: compare has no weights source, and synthesizing
# uniform weights just duplicates the mean row.
_COMPARE_RULES = ("and", "or", "prod", "mean", "min", "max", "majority_vote")


class UsageError(Exception):
    """Bad flags or config; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit-code control in main()
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="choqfuse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--input", help="labeled score CSV (person_id,label,m1,...)")
        p.add_argument("--synthetic", action="store_true",
                       help="use the embedded synthetic benchmark")
        p.add_argument("--normalize", action="store_true",
                       help="min-max normalize each CSV score column")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--config", help="JSON config file; flags override it")

    def add_measure_source(p):
        p.add_argument("--densities", help="comma-separated singleton densities")
        p.add_argument("--measure-file",
                       help="JSON file with a 'densities' list (optimize output)")

    fuse = sub.add_parser("fuse", help="Choquet-fuse every person's scores")
    add_common(fuse)
    add_measure_source(fuse)

    optimize = sub.add_parser("optimize", help="learn densities with the GA")
    add_common(optimize)
    optimize.add_argument("--seed", type=int, help="GA RNG seed (default 0)")
    optimize.add_argument("--generations", type=int, help="max generations (default 1000)")
    optimize.add_argument("--population", type=int, help="population size (default 30)")
    optimize.add_argument("--stop-eer", type=float, help="early-stop EER (default 0.04)")

    compare = sub.add_parser("compare", help="error-rate table across fusion rules")
    add_common(compare)
    add_measure_source(compare)
    compare.add_argument("--threshold", type=float,
                         help="decision threshold for the rule table (default 0.5)")

    evaluate = sub.add_parser("eval", help="detailed report for one rule or measure")
    add_common(evaluate)
    add_measure_source(evaluate)
    evaluate.add_argument("--rule", help="fusion rule name (default: choquet)")
    evaluate.add_argument("--threshold", type=float,
                          help="operating threshold to report (default 0.5)")

    return parser


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the optional JSON config file."""
    if not args.config:
        return args
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            values = json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {args.config}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {args.config} is not valid JSON: {exc}") from None
    if not isinstance(values, dict):
        raise UsageError(f"config file {args.config} must hold a JSON object")
    for key, value in values.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"config key {key!r} is not a known option")
        current = getattr(args, attr)
        if current is None or current is False:  # unset flag; explicit 0 wins
            setattr(args, attr, value)
    return args


def _load_dataset(args) -> LabeledScoreSet:
    if bool(args.input) == bool(args.synthetic):
        raise UsageError("exactly one input source required: --input PATH or --synthetic")
    if args.synthetic:
        return synthetic_dataset()
    try:
        return load_csv(args.input, normalize=args.normalize)
    except FileNotFoundError:
        raise DataFormatError(f"input file not found: {args.input}") from None


def _load_measure(args) -> LambdaMeasure | None:
    if getattr(args, "densities", None) and getattr(args, "measure_file", None):
        raise UsageError("give either --densities or --measure-file, not both")
    if getattr(args, "densities", None):
        try:
            values = [float(v) for v in str(args.densities).split(",")]
        except ValueError:
            raise UsageError(f"--densities must be comma-separated numbers, "
                             f"got {args.densities!r}") from None
        return LambdaMeasure(tuple(values))
    if getattr(args, "measure_file", None):
        try:
            with open(args.measure_file, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except FileNotFoundError:
            raise UsageError(f"measure file not found: {args.measure_file}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"measure file is not valid JSON: {exc}") from None
        if "densities" not in payload:
            raise UsageError(f"measure file {args.measure_file} lacks a "
                             f"'densities' entry")
        return LambdaMeasure(tuple(float(v) for v in payload["densities"]))
    return None


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _subset_label(mask: int, n: int) -> str:
    return "{" + ",".join(str(i + 1) for i in range(n) if mask >> i & 1) + "}"


def _measure_json(measure: LambdaMeasure) -> dict:
    payload = {
        "densities": list(measure.densities),
        "lambda": measure.lam,
        "n_modalities": measure.n,
    }
    if measure.n <= 6:
        table = measure.dense_table()
        payload["subset_measures"] = {
            _subset_label(mask, measure.n): float(table[mask])
            for mask in range(1, 1 << measure.n)
        }
    return payload


def _print_measure(measure: LambdaMeasure) -> None:
    print(f"lambda = {measure.lam:.6f}")
    if measure.n > 6:
        return
    table = measure.dense_table()
    masks = sorted(range(1, 1 << measure.n), key=lambda m: (bin(m).count("1"), m))
    for mask in masks:
        print(f"m({_subset_label(mask, measure.n)}) = {table[mask]:.6f}")


def _cmd_fuse(args) -> int:
    dataset = _load_dataset(args)
    measure = _load_measure(args)
    if measure is None:
        raise UsageError("fuse needs --densities or --measure-file")
    if measure.n != dataset.n_modalities:
        raise UsageError(f"measure has {measure.n} densities but the data has "
                         f"{dataset.n_modalities} modalities")
    _print_measure(measure)
    out = _out_dir(args)
    fused_path = out / "fused_scores.csv"
    with open(fused_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["person_id", "label", "fused"])
        for label, ids, scores in (
            ("client", dataset.client_ids, dataset.client_scores),
            ("impostor", dataset.impostor_ids, dataset.impostor_scores),
        ):
            fused = choquet_fuse_batch(scores, measure)
            for pid, value in zip(ids, fused):
                writer.writerow([pid, label, repr(float(value))])
    print(f"wrote {fused_path}")
    return 0


def _cmd_optimize(args) -> int:
    dataset = _load_dataset(args)
    cfg = GaConfig(
        population_size=args.population if args.population is not None else 30,
        max_generations=args.generations if args.generations is not None else 1000,
        eer_stop_threshold=args.stop_eer if args.stop_eer is not None else 0.04,
        rng_seed=args.seed if args.seed is not None else 0,
    )
    best, history = evolve(dataset, cfg)
    measure = LambdaMeasure(best.genes)
    stop_reason = ("eer_threshold" if best.fitness <= cfg.eer_stop_threshold
                   else "max_generations")

    out = _out_dir(args)
    history_path = out / "history.csv"
    with open(history_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        n = dataset.n_modalities
        writer.writerow(["generation", "best_eer"] + [f"gene{i + 1}" for i in range(n)])
        for record in history:
            writer.writerow([record.generation, repr(record.best_eer)]
                            + [repr(g) for g in record.best_genes])

    fused_clients = choquet_fuse_batch(dataset.client_scores, measure)
    fused_impostors = choquet_fuse_batch(dataset.impostor_scores, measure)
    report = evaluate_scores(fused_clients, fused_impostors)
    min_rate, min_threshold = report.min_error_rate()
    payload = _measure_json(measure)
    payload.update({
        "eer": best.fitness,
        "eer_threshold": report.eer_threshold,
        "min_error_rate": min_rate,
        "min_error_threshold": min_threshold,
        "stop_reason": stop_reason,
        "generations_run": history[-1].generation,
        "config": {
            "population_size": cfg.population_size,
            "max_generations": cfg.max_generations,
            "eer_stop_threshold": cfg.eer_stop_threshold,
            "mutation_bound": cfg.mutation_bound,
            "rng_seed": cfg.rng_seed,
        },
    })
    measure_path = out / "measure.json"
    with open(measure_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")

    print(f"best EER = {best.fitness:.6f} after {history[-1].generation} "
          f"generations (stop: {stop_reason})")
    print(f"densities = {', '.join(f'{g:.6f}' for g in best.genes)}")
    print(f"wrote {measure_path} and {history_path}")
    return 0


def _rule_row(dataset: LabeledScoreSet, rule: FusionRule) -> tuple[np.ndarray, np.ndarray]:
    fused_clients = rule_fuse_batch(dataset.client_scores, rule)
    fused_impostors = rule_fuse_batch(dataset.impostor_scores, rule)
    return fused_clients, fused_impostors


def _cmd_compare(args) -> int:
    dataset = _load_dataset(args)
    measure = _load_measure(args)
    threshold = args.threshold if args.threshold is not None else 0.5
    n = dataset.n_modalities
    out = _out_dir(args)

    rows: list[tuple[str, float]] = []

    def add_row(name: str, fused_clients, fused_impostors, error_rate: float):
        rows.append((name, 100.0 * error_rate))
        report = evaluate_scores(fused_clients, fused_impostors)
        write_roc_csv(report, out / f"roc_{name}.csv")

    for j in range(n):
        fc, fi = dataset.client_scores[:, j], dataset.impostor_scores[:, j]
        rate = evaluate_scores(fc, fi).error_rate_at(threshold)
        add_row(f"m{j + 1}", fc, fi, rate)

    for tag in _COMPARE_RULES:
        weights = tuple([1.0 / n] * n) if tag == "weighted_sum" else None
        rule = FusionRule(tag=tag, weights=weights, threshold=threshold)
        fc, fi = _rule_row(dataset, rule)
        # Decision rules emit 0/1 decisions scored at the fixed 0.5 level;
        # score rules are thresholded at the requested level.
        at = 0.5 if rule.is_decision else threshold
        add_row(tag, fc, fi, evaluate_scores(fc, fi).error_rate_at(at))

    if measure is not None:
        if measure.n != n:
            raise UsageError(f"measure has {measure.n} densities but the data "
                             f"has {n} modalities")
        fc = choquet_fuse_batch(dataset.client_scores, measure)
        fi = choquet_fuse_batch(dataset.impostor_scores, measure)
        # Reported at its best operating point (minimum total error over the
        # threshold sweep).
        rate, _ = evaluate_scores(fc, fi).min_error_rate()
        add_row("choquet", fc, fi, rate)
    else:
        print("note: no --densities/--measure-file given; skipping the choquet row")

    width = max(len(name) for name, _ in rows)
    print(f"{'rule':<{width}}  error rate (%)")
    for name, rate in rows:
        print(f"{name:<{width}}  {rate:.2f}")

    table_path = out / "comparison.csv"
    with open(table_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rule", "error_rate_percent"])
        for name, rate in rows:
            writer.writerow([name, f"{rate:.2f}"])
    print(f"wrote {table_path} and per-rule ROC CSVs")
    return 0


def _cmd_eval(args) -> int:
    dataset = _load_dataset(args)
    measure = _load_measure(args)
    threshold = args.threshold if args.threshold is not None else 0.5
    tag = args.rule or "choquet"
    n = dataset.n_modalities
    if tag == "choquet":
        if measure is None:
            raise UsageError("eval of the choquet rule needs --densities or "
                             "--measure-file")
        rule = FusionRule(tag="choquet", measure=measure)
    else:
        weights = tuple([1.0 / n] * n) if tag == "weighted_sum" else None
        rule = FusionRule(tag=tag, weights=weights, threshold=threshold)

    fused_clients = rule_fuse_batch(dataset.client_scores, rule)
    fused_impostors = rule_fuse_batch(dataset.impostor_scores, rule)
    report = evaluate_scores(fused_clients, fused_impostors)
    operating = 0.5 if rule.is_decision else threshold
    min_rate, min_threshold = report.min_error_rate()

    out = _out_dir(args)
    roc_path = out / f"roc_{tag}.csv"
    write_roc_csv(report, roc_path)
    payload = {
        "rule": tag,
        "eer": report.eer,
        "eer_threshold": report.eer_threshold,
        "threshold": operating,
        "error_rate_at_threshold": report.error_rate_at(operating),
        "min_error_rate": min_rate,
        "min_error_threshold": min_threshold,
        "n_clients": report.n_clients,
        "n_impostors": report.n_impostors,
    }
    if tag == "choquet":
        payload["measure"] = _measure_json(measure)
    report_path = out / "eval.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"{tag}: EER = {report.eer:.4f} at t = {report.eer_threshold:.4f}; "
          f"error at t = {operating:g}: {100.0 * payload['error_rate_at_threshold']:.2f}%")
    print(f"wrote {report_path} and {roc_path}")
    return 0


_COMMANDS = {
    "fuse": _cmd_fuse,
    "optimize": _cmd_optimize,
    "compare": _cmd_compare,
    "eval": _cmd_eval,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args = _merge_config(args)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
