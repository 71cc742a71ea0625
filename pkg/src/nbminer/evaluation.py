"""Precision/recall scoring against generator ground truth, plus sweeps.

A mined itemset is a true positive when it was "used to generate the
data": by default that means it is a subset (size >= 2) of some ground
truth pattern, because the generator plants every subset of a pattern
whenever the pattern fires.  ``scoring_mode="maximal"`` restricts
positives to the patterns themselves for comparison.

``sweep`` runs a list of mining configurations over one database and
scores each, recording mined count and maximal itemset size alongside
the report so the output table is directly plottable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .baselines import mine_allconf, mine_frequent
from .mining import MinerConfig, nb_dfs
from .nbmodel import NBParams
from .synthgen import GroundTruth
from .transactions import TransactionDatabase

__all__ = [
    "ALLCONF_GRID",
    "PI_GRID",
    "SUPPORT_GRID",
    "EvalReport",
    "SweepEntry",
    "allconf_runs",
    "nb_runs",
    "pi_grid_for_theta",
    "positives_closure",
    "positives_for_mode",
    "read_sweep",
    "score",
    "support_runs",
    "sweep",
    "write_sweep",
]

# Grid defaults used by the benchmark command.
PI_GRID = (0.999, 0.99, 0.95, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)
SUPPORT_GRID = (0.01, 0.005, 0.004, 0.003, 0.002, 0.0015, 0.0013, 0.001, 0.0007, 0.0005)
ALLCONF_GRID = (0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.04, 0.03, 0.02, 0.01)

_SCORING_MODES = ("closure", "maximal")


@dataclass(frozen=True)
class EvalReport:
    """Precision/recall of a mined itemset collection.

    ``precision`` is None when nothing was mined, ``recall`` is None
    when the ground truth contributes no positives.  ``by_size`` maps
    itemset size to its (tp, fp) share of the mined collection.
    """

    true_positives: int
    false_positives: int
    positives_total: int
    precision: float | None
    recall: float | None
    by_size: Mapping[int, tuple[int, int]]

    def __post_init__(self) -> None:
        tp, fp = self.true_positives, self.false_positives
        if tp < 0 or fp < 0 or self.positives_total < 0:
            raise ValueError("negative counts in report")
        if (self.precision is None) != (tp + fp == 0):
            raise ValueError("precision must be None exactly when nothing was scored")
        if (self.recall is None) != (self.positives_total == 0):
            raise ValueError("recall must be None exactly when there are no positives")
        if sum(t + f for t, f in self.by_size.values()) != tp + fp:
            raise ValueError("per-size breakdown does not add up")


def _truth_patterns(truth: GroundTruth | Iterable[Iterable[int]]) -> list[frozenset[int]]:
    if isinstance(truth, GroundTruth):
        return list(truth.patterns)
    return [frozenset(p) for p in truth]


def positives_closure(truth: GroundTruth | Iterable[Iterable[int]]) -> frozenset[frozenset[int]]:
    """All size >= 2 subsets of the ground truth patterns.

    Size-1 itemsets are never counted as positives: a single item is
    not an association.
    """
    out: set[frozenset[int]] = set()
    for pattern in _truth_patterns(truth):
        items = sorted(pattern)
        for size in range(2, len(items) + 1):
            out.update(map(frozenset, itertools.combinations(items, size)))
    return frozenset(out)


def positives_for_mode(
    truth: GroundTruth | Iterable[Iterable[int]], scoring_mode: str
) -> frozenset[frozenset[int]]:
    """The positives set for a scoring mode: subset closure or the patterns."""
    if scoring_mode == "closure":
        return positives_closure(truth)
    if scoring_mode == "maximal":
        return frozenset(p for p in _truth_patterns(truth) if len(p) >= 2)
    raise ValueError(f"scoring_mode must be one of {_SCORING_MODES}, got {scoring_mode!r}")


def _normalize_mined(mined: Iterable) -> set[frozenset[int]]:
    out: set[frozenset[int]] = set()
    for entry in mined:
        items = getattr(entry, "items", entry)
        itemset = frozenset(items)
        if len(itemset) >= 2:
            out.add(itemset)
    return out


def score(
    mined: Iterable,
    truth: GroundTruth | Iterable[Iterable[int]],
    *,
    scoring_mode: str = "closure",
    positives: frozenset[frozenset[int]] | None = None,
) -> EvalReport:
    """Score mined itemsets against the ground truth.

    ``mined`` entries may be MinedItemset records or plain item
    collections; size-1 entries are dropped before scoring.  Pass a
    precomputed ``positives`` set to skip the closure enumeration when
    scoring many runs against one truth.
    """
    if positives is None:
        positives = positives_for_mode(truth, scoring_mode)
    elif scoring_mode not in _SCORING_MODES:
        raise ValueError(f"scoring_mode must be one of {_SCORING_MODES}, got {scoring_mode!r}")
    itemsets = _normalize_mined(mined)

    by_size: dict[int, list[int]] = {}
    tp = 0
    for itemset in itemsets:
        hit = itemset in positives
        tp += hit
        cell = by_size.setdefault(len(itemset), [0, 0])
        cell[0 if hit else 1] += 1
    fp = len(itemsets) - tp

    return EvalReport(
        true_positives=tp,
        false_positives=fp,
        positives_total=len(positives),
        precision=tp / (tp + fp) if itemsets else None,
        recall=tp / len(positives) if positives else None,
        by_size={size: (t, f) for size, (t, f) in sorted(by_size.items())},
    )


@dataclass(frozen=True)
class SweepEntry:
    """One scored grid point: method label, parameter value, outcome.

    ``mined_count`` counts the size >= 2 itemsets that were scored and
    ``max_size`` is the largest mined itemset (0 when none).  When the
    run raised, ``report`` is None and ``error`` holds the message.
    """

    method: str
    parameter: float
    mined_count: int
    max_size: int
    report: EvalReport | None
    error: str | None = None


Runner = Callable[[TransactionDatabase], Iterable]
RunSpec = tuple[str, float, Runner]


def sweep(
    db: TransactionDatabase,
    truth: GroundTruth | Iterable[Iterable[int]],
    runs: Sequence[RunSpec],
    *,
    scoring_mode: str = "closure",
) -> list[SweepEntry]:
    """Run and score each (method, parameter, runner) against ``db``.

    A failing run is recorded with its error message and the sweep
    continues with the remaining grid points.
    """
    positives = positives_for_mode(truth, scoring_mode)
    entries = []
    for method, parameter, runner in runs:
        try:
            mined = _normalize_mined(runner(db))
        except Exception as exc:
            entries.append(SweepEntry(method, parameter, 0, 0, None, f"{type(exc).__name__}: {exc}"))
            continue
        report = score(mined, truth, scoring_mode=scoring_mode, positives=positives)
        max_size = max(map(len, mined), default=0)
        entries.append(SweepEntry(method, parameter, len(mined), max_size, report))
    return entries


def pi_grid_for_theta(theta: float, grid: Sequence[float] = PI_GRID) -> tuple[float, ...]:
    """Trim the precision grid to the region that stays tractable.

    Low theta values prune almost nothing, so candidate growth explodes
    as pi drops; the benchmark only runs pi >= 0.5 at theta = 0.5 and
    pi >= 0.8 at theta = 0.
    """
    if theta == 0:
        return tuple(pi for pi in grid if pi >= 0.8)
    if theta == 0.5:
        return tuple(pi for pi in grid if pi >= 0.5)
    return tuple(grid)


def nb_runs(
    params: NBParams,
    theta: float,
    pi_grid: Sequence[float] | None = None,
    *,
    max_size: int | None = None,
) -> list[RunSpec]:
    """Model-based runs at one theta across a pi grid."""
    grid = pi_grid_for_theta(theta) if pi_grid is None else tuple(pi_grid)
    method = f"nb-theta{theta:g}"

    def runner_for(pi: float) -> Runner:
        return lambda db: nb_dfs(db, MinerConfig(params, pi=pi, theta=theta), max_size=max_size)

    return [(method, pi, runner_for(pi)) for pi in grid]


def support_runs(sigma_grid: Sequence[float] | None = None) -> list[RunSpec]:
    """Minimum-support baseline runs across a support grid."""
    grid = SUPPORT_GRID if sigma_grid is None else tuple(sigma_grid)

    def runner_for(sigma: float) -> Runner:
        return lambda db: mine_frequent(db, sigma)

    return [("support", sigma, runner_for(sigma)) for sigma in grid]


def allconf_runs(gamma_grid: Sequence[float] | None = None) -> list[RunSpec]:
    """All-confidence baseline runs across a threshold grid."""
    grid = ALLCONF_GRID if gamma_grid is None else tuple(gamma_grid)

    def runner_for(gamma: float) -> Runner:
        return lambda db: mine_allconf(db, gamma)

    return [("allconf", gamma, runner_for(gamma)) for gamma in grid]


_SWEEP_HEADER = (
    "method",
    "parameter",
    "mined_count",
    "max_size",
    "tp",
    "fp",
    "positives_total",
    "precision",
    "recall",
)


def write_sweep(path, entries: Iterable[SweepEntry]) -> None:
    """Write scored sweep entries as a plottable tab-separated table.

    Failed entries are skipped; the table holds results only.
    """
    lines = ["\t".join(_SWEEP_HEADER)]
    for e in entries:
        if e.report is None:
            continue
        r = e.report
        lines.append(
            "\t".join(
                (
                    e.method,
                    f"{e.parameter:.12g}",
                    str(e.mined_count),
                    str(e.max_size),
                    str(r.true_positives),
                    str(r.false_positives),
                    str(r.positives_total),
                    "" if r.precision is None else f"{r.precision:.12g}",
                    "" if r.recall is None else f"{r.recall:.12g}",
                )
            )
        )
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_sweep(path) -> list[dict]:
    """Read a table written by write_sweep as one dict per row.

    Values are typed (counts int, parameter/precision/recall float,
    blank precision/recall None); per-size detail is not stored in the
    table, so rows are plain mappings rather than SweepEntry objects.
    """
    rows = []
    with open(path, encoding="ascii") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != _SWEEP_HEADER:
            raise ValueError(f"unexpected sweep header: {header}")
        for lineno, line in enumerate(fh, start=2):
            fields = line.rstrip("\n").split("\t")
            if len(fields) != len(_SWEEP_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(_SWEEP_HEADER)} fields")
            method, parameter, mined, max_size, tp, fp, total, prec, rec = fields
            rows.append(
                {
                    "method": method,
                    "parameter": float(parameter),
                    "mined_count": int(mined),
                    "max_size": int(max_size),
                    "tp": int(tp),
                    "fp": int(fp),
                    "positives_total": int(total),
                    "precision": float(prec) if prec else None,
                    "recall": float(rec) if rec else None,
                }
            )
    return rows
