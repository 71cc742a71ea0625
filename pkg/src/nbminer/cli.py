"""Command line entry point: fit, mine, baselines, generate, evaluate, benchmark.

Every command that writes an output file also writes a JSON run manifest
next to it (``<out>.manifest.json``) recording the resolved flags, seed,
input/output paths, timing and tool version.  Output files themselves are
deterministic: rerunning a command with the same flags and inputs produces
byte-identical files (wall-clock values live only in the manifest).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

from . import __version__
from .baselines import mine_allconf, mine_frequent
from .evaluation import (
    ALLCONF_GRID,
    SUPPORT_GRID,
    SweepEntry,
    pi_grid_for_theta,
    positives_for_mode,
    score,
    write_sweep,
)
from .mining import MinerConfig, nb_dfs, read_itemsets, write_itemsets
from .nbmodel import FreqHistogram, fit_database, gof_chi2, read_model, write_model
from .synthgen import GenConfig, PRESETS, generate, preset_config, read_truth, write_truth
from .transactions import load_basket, write_basket

__all__ = ["main"]


def _write_manifest(anchor_path: str, command: str, args: argparse.Namespace,
                    seed, inputs, outputs, started_utc: str, elapsed: float) -> None:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "command": command,
        "version": __version__,
        "flags": flags,
        "seed": seed,
        "inputs": list(inputs),
        "outputs": list(outputs),
        "started_utc": started_utc,
        "elapsed_seconds": elapsed,
    }
    with open(f"{anchor_path}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _fit_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--trim", type=float, default=0.025,
                     help="fraction of item occurrences to trim from the most "
                          "frequent classes before fitting (default 0.025)")
    sub.add_argument("--total-items", type=int, default=None,
                     help="known total number of available items; skips the "
                          "zero-class EM estimate")
    sub.add_argument("--max-iter", type=int, default=1000,
                     help="EM iteration cap (default 1000)")


def cmd_fit(args: argparse.Namespace) -> int:
    started, t0 = _now(), time.perf_counter()
    db = load_basket(args.basket)
    params, hist = fit_database(db, trim_fraction=args.trim,
                                n_known=args.total_items, max_iter=args.max_iter)
    write_model(params, args.out)
    print(f"fitted: k={params.k:.6g} a={params.a:.6g} n_total={params.n_total} "
          f"em_iterations={params.em_iterations} trimmed_items={params.trimmed_items}")
    # the zero class is part of the fitted model, so it joins the test
    zero = params.n_total - round(hist.total_items())
    gof_hist = FreqHistogram({0: float(zero), **hist.counts}) if zero > 0 else hist
    try:
        gof = gof_chi2(gof_hist, params)
    except ValueError as exc:
        print(f"warning: goodness of fit not computable: {exc}", file=sys.stderr)
    else:
        print(f"gof: chi2={gof.chi2:.6g} df={gof.df} p={gof.p_value:.6g}")
    _write_manifest(args.out, "fit", args, None, [args.basket], [args.out],
                    started, time.perf_counter() - t0)
    return 0


def cmd_mine(args: argparse.Namespace) -> int:
    started, t0 = _now(), time.perf_counter()
    db = load_basket(args.basket)
    inputs = [args.basket]
    if args.model:
        params = read_model(args.model)
        inputs.append(args.model)
    else:
        params, _ = fit_database(db, trim_fraction=args.trim,
                                 n_known=args.total_items, max_iter=args.max_iter)
    mined = nb_dfs(db, MinerConfig(params, pi=args.pi, theta=args.theta),
                   max_size=args.max_size)
    write_itemsets(args.out, mined)
    max_size = max((len(m.items) for m in mined), default=0)
    print(f"mined {len(mined)} itemsets (max size {max_size}) -> {args.out}")
    _write_manifest(args.out, "mine", args, None, inputs, [args.out],
                    started, time.perf_counter() - t0)
    return 0


def cmd_mine_support(args: argparse.Namespace) -> int:
    started, t0 = _now(), time.perf_counter()
    db = load_basket(args.basket)
    found = mine_frequent(db, args.min_support)
    write_itemsets(args.out, [(f.items, f.freq, args.min_support, None) for f in found])
    max_size = max((len(f.items) for f in found), default=0)
    print(f"mined {len(found)} itemsets (max size {max_size}) -> {args.out}")
    _write_manifest(args.out, "mine-support", args, None, [args.basket], [args.out],
                    started, time.perf_counter() - t0)
    return 0


def cmd_mine_allconf(args: argparse.Namespace) -> int:
    started, t0 = _now(), time.perf_counter()
    db = load_basket(args.basket)
    found = mine_allconf(db, args.min_allconf)
    write_itemsets(args.out, [(f.items, f.freq, args.min_allconf, None) for f in found])
    max_size = max((len(f.items) for f in found), default=0)
    print(f"mined {len(found)} itemsets (max size {max_size}) -> {args.out}")
    _write_manifest(args.out, "mine-allconf", args, None, [args.basket], [args.out],
                    started, time.perf_counter() - t0)
    return 0


# generator flag name -> GenConfig field
_GEN_FIELDS = {
    "transactions": "n_transactions",
    "avg_transaction_size": "avg_transaction_size",
    "items": "n_items",
    "patterns": "n_patterns",
    "avg_pattern_size": "avg_pattern_size",
    "correlation": "correlation",
    "corruption": "corruption",
    "seed": "seed",
}


def _gen_config(args: argparse.Namespace) -> GenConfig:
    overrides = {field: getattr(args, flag)
                 for flag, field in _GEN_FIELDS.items()
                 if getattr(args, flag) is not None}
    if args.preset:
        return preset_config(args.preset, **overrides)
    required = ("n_transactions", "avg_transaction_size", "n_items",
                "n_patterns", "avg_pattern_size")
    missing = [f for f in required if f not in overrides]
    if missing:
        raise ValueError(f"without --preset these are required: {missing}")
    return GenConfig(**overrides)


def cmd_generate(args: argparse.Namespace) -> int:
    started, t0 = _now(), time.perf_counter()
    config = _gen_config(args)
    db, truth = generate(config)
    write_basket(db, args.out)
    write_truth(truth, args.truth)
    mean = db.incidence_total / len(db)
    print(f"generated {len(db)} transactions (mean size {mean:.4g}) and "
          f"{len(truth)} patterns, seed {config.seed}")
    _write_manifest(args.out, "generate", args, config.seed, [],
                    [args.out, args.truth], started, time.perf_counter() - t0)
    return 0


def _report_lines(report) -> list:
    by_size = " ".join(f"{size}:{tp}/{fp}" for size, (tp, fp) in report.by_size.items())
    fmt = lambda v: "" if v is None else f"{v:.12g}"
    return [
        f"tp\t{report.true_positives}",
        f"fp\t{report.false_positives}",
        f"positives_total\t{report.positives_total}",
        f"precision\t{fmt(report.precision)}",
        f"recall\t{fmt(report.recall)}",
        f"by_size\t{by_size}",
    ]


def cmd_evaluate(args: argparse.Namespace) -> int:
    started, t0 = _now(), time.perf_counter()
    mined = [row[0] for row in read_itemsets(args.mined)]
    truth = read_truth(args.truth)
    report = score(mined, truth, scoring_mode=args.scoring_mode)
    text = "\n".join(_report_lines(report)) + "\n"
    print(text, end="")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _write_manifest(args.out, "evaluate", args, None,
                        [args.mined, args.truth], [args.out],
                        started, time.perf_counter() - t0)
    return 0


def _bench_init(db, params):
    global _BENCH_DB, _BENCH_PARAMS
    _BENCH_DB, _BENCH_PARAMS = db, params


def _bench_job(job):
    """Run one grid point; returns ("ok", item tuples) or ("error", message)."""
    try:
        kind = job[0]
        if kind == "nb":
            _, theta, pi = job
            mined = nb_dfs(_BENCH_DB, MinerConfig(_BENCH_PARAMS, pi=pi, theta=theta))
            return ("ok", [m.items for m in mined])
        if kind == "support":
            return ("ok", [f.items for f in mine_frequent(_BENCH_DB, job[1])])
        return ("ok", [f.items for f in mine_allconf(_BENCH_DB, job[1])])
    except Exception as exc:
        return ("error", f"{type(exc).__name__}: {exc}")


def _csv_floats(text: str) -> tuple:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def cmd_benchmark(args: argparse.Namespace) -> int:
    started, t0 = _now(), time.perf_counter()
    methods = tuple(tok.strip() for tok in args.methods.split(",") if tok.strip())
    unknown = set(methods) - {"nb", "support", "allconf"}
    if unknown:
        raise ValueError(f"unknown methods: {sorted(unknown)}")

    if args.basket:
        if not args.truth:
            raise ValueError("--basket requires --truth for scoring")
        db = load_basket(args.basket)
        truth = read_truth(args.truth)
        seed = None
        inputs = [args.basket, args.truth]
    elif args.preset:
        overrides = {}
        if args.transactions is not None:
            overrides["n_transactions"] = args.transactions
        if args.seed is not None:
            overrides["seed"] = args.seed
        config = preset_config(args.preset, **overrides)
        db, truth = generate(config)
        seed = config.seed
        inputs = []
    else:
        raise ValueError("either --basket or --preset is required")

    jobs = []
    if "nb" in methods:
        params, _ = fit_database(db, trim_fraction=args.trim)
        for theta in _csv_floats(args.theta):
            grid = _csv_floats(args.pi_grid) if args.pi_grid else pi_grid_for_theta(theta)
            jobs.extend(("nb", theta, pi) for pi in grid)
    else:
        params = None
    if "support" in methods:
        grid = _csv_floats(args.support_grid) if args.support_grid else SUPPORT_GRID
        jobs.extend(("support", sigma) for sigma in grid)
    if "allconf" in methods:
        grid = _csv_floats(args.allconf_grid) if args.allconf_grid else ALLCONF_GRID
        jobs.extend(("allconf", gamma) for gamma in grid)

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs, initializer=_bench_init,
                                 initargs=(db, params)) as pool:
            outcomes = list(pool.map(_bench_job, jobs))
    else:
        _bench_init(db, params)
        outcomes = [_bench_job(job) for job in jobs]

    positives = positives_for_mode(truth, args.scoring_mode)
    entries = []
    for job, (status, payload) in zip(jobs, outcomes):
        if job[0] == "nb":
            method, parameter = f"nb-theta{job[1]:g}", job[2]
        else:
            method, parameter = job[0], job[1]
        if status == "error":
            entries.append(SweepEntry(method, parameter, 0, 0, None, payload))
            print(f"warning: {method} at {parameter:g} failed: {payload}",
                  file=sys.stderr)
            continue
        report = score(payload, truth, scoring_mode=args.scoring_mode,
                       positives=positives)
        scored = report.true_positives + report.false_positives
        entries.append(SweepEntry(method, parameter, scored,
                                  max(report.by_size, default=0), report))
    write_sweep(args.out, entries)
    done = sum(e.report is not None for e in entries)
    print(f"benchmark: {done}/{len(entries)} grid points -> {args.out}")
    _write_manifest(args.out, "benchmark", args, seed, inputs, [args.out],
                    started, time.perf_counter() - t0)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbminer",
        description="Mine itemsets whose co-occurrence beats a negative "
                    "binomial item-frequency model, plus baselines and a "
                    "synthetic data generator.")
    parser.add_argument("--version", action="version", version=f"nbminer {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fit", help="fit the frequency model to a basket file")
    p.add_argument("basket")
    p.add_argument("--out", required=True, help="model file to write")
    _fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = subs.add_parser("mine", help="mine itemsets with model-derived thresholds")
    p.add_argument("basket")
    p.add_argument("--out", required=True, help="itemset file to write")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", help="model file from `fit`")
    src.add_argument("--fit-inline", action="store_true",
                     help="fit the model from the basket file first")
    p.add_argument("--pi", type=float, default=0.95,
                   help="required predicted precision (default 0.95)")
    p.add_argument("--theta", type=float, default=0.5,
                   help="fraction of subsets that must propose an itemset "
                        "(default 0.5)")
    p.add_argument("--max-size", type=int, default=None,
                   help="stop extending itemsets beyond this size")
    _fit_flags(p)
    p.set_defaults(func=cmd_mine)

    p = subs.add_parser("mine-support", help="mine frequent itemsets (baseline)")
    p.add_argument("basket")
    p.add_argument("--out", required=True)
    p.add_argument("--min-support", type=float, required=True)
    p.set_defaults(func=cmd_mine_support)

    p = subs.add_parser("mine-allconf", help="mine all-confidence itemsets (baseline)")
    p.add_argument("basket")
    p.add_argument("--out", required=True)
    p.add_argument("--min-allconf", type=float, required=True)
    p.set_defaults(func=cmd_mine_allconf)

    p = subs.add_parser("generate", help="generate synthetic transactions")
    p.add_argument("--out", required=True, help="basket file to write")
    p.add_argument("--truth", required=True, help="ground truth pattern file to write")
    p.add_argument("--preset", choices=sorted(PRESETS),
                   help="named configuration; explicit flags override its fields")
    p.add_argument("--transactions", type=int)
    p.add_argument("--avg-transaction-size", type=float)
    p.add_argument("--items", type=int)
    p.add_argument("--patterns", type=int)
    p.add_argument("--avg-pattern-size", type=float)
    p.add_argument("--correlation", type=float)
    p.add_argument("--corruption", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_generate)

    p = subs.add_parser("evaluate", help="score a mined itemset file against ground truth")
    p.add_argument("--mined", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--scoring-mode", choices=("closure", "maximal"), default="closure")
    p.add_argument("--out", help="also write the report to this file")
    p.set_defaults(func=cmd_evaluate)

    p = subs.add_parser("benchmark", help="sweep methods over parameter grids and score")
    p.add_argument("--basket", help="existing basket file (requires --truth)")
    p.add_argument("--truth", help="ground truth for --basket")
    p.add_argument("--preset", choices=sorted(PRESETS),
                   help="generate the dataset from a preset instead")
    p.add_argument("--transactions", type=int, help="override preset transaction count")
    p.add_argument("--seed", type=int, help="override preset seed")
    p.add_argument("--out", required=True, help="sweep table to write")
    p.add_argument("--methods", default="nb,support,allconf")
    p.add_argument("--theta", default="0,0.5,1",
                   help="comma list of theta settings for the nb method")
    p.add_argument("--pi-grid", default=None,
                   help="comma list of pi values (default: built-in grid, "
                        "restricted per theta)")
    p.add_argument("--support-grid", default=None)
    p.add_argument("--allconf-grid", default=None)
    p.add_argument("--scoring-mode", choices=("closure", "maximal"), default="closure")
    p.add_argument("--trim", type=float, default=0.025)
    p.add_argument("--jobs", type=int, default=1,
                   help="run grid points in this many processes")
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
