"""Itemset mining with a model-derived local frequency threshold.

Instead of one global minimum support, each itemset ``l`` gets its own
threshold: the fitted frequency model, rescaled to l's conditional
database, predicts how many candidate extensions would reach any given
co-occurrence count by chance. The smallest count whose predicted
precision (the fraction of observed candidates at or above it that the
baseline cannot explain) stays above ``pi`` becomes l's threshold.
Candidate extensions at or above it are kept, and a superset is accepted
once at least ``theta * size`` of its already-accepted subsets propose it
(at least one). The search is depth-first; a repository of every superset
ever proposed makes the subset counting exact and deduplicates output
across branches.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .nbmodel import NBParams, nb_pmf_prefix, nb_tail
from .transactions import ExtensionCounts, TransactionDatabase


@dataclass(frozen=True)
class MinerConfig:
    """Run parameters: the fitted model plus precision and subset thresholds."""

    params: NBParams
    pi: float = 0.95
    theta: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.pi <= 1.0):
            raise ValueError(f"pi must be in (0, 1], got {self.pi}")
        if not (0.0 <= self.theta <= 1.0):
            raise ValueError(f"theta must be in [0, 1], got {self.theta}")


@dataclass(frozen=True)
class MinedItemset:
    """An accepted itemset and the local evidence that admitted it.

    ``sigma_freq`` is the local frequency threshold of the subset whose
    expansion emitted this itemset; ``predicted_precision`` is the model's
    precision estimate at that threshold.
    """

    items: tuple
    freq: int
    sigma_freq: int
    predicted_precision: float

    def __post_init__(self):
        if len(self.items) < 2 or list(self.items) != sorted(set(self.items)):
            raise ValueError(f"items must be >= 2 distinct ascending ids, got {self.items}")
        if not (self.freq >= self.sigma_freq >= 1):
            raise ValueError(f"freq {self.freq} below threshold {self.sigma_freq}")
        if not (0.0 <= self.predicted_precision <= 1.0):
            raise ValueError(f"precision out of range: {self.predicted_precision}")

    def itemset(self) -> frozenset:
        return frozenset(self.items)


class Selection(NamedTuple):
    """Result of thresholding one itemset's candidate extensions."""

    items: frozenset
    sigma_freq: Optional[int]
    predicted_precision: Optional[float]


@dataclass
class RepoEntry:
    """Repository record: has the itemset been accepted, and by how many subsets proposed."""

    frequent: bool = False
    count: int = 0


def _counts_of(o_hist) -> dict:
    return getattr(o_hist, "counts", o_hist)


def predicted_precision(o_hist, n_candidates: int, k: float, a_l: float,
                        rho: int) -> float:
    """Predicted precision of selecting candidates with count >= rho.

    ``o_hist`` maps co-occurrence counts to how many candidates showed that
    count. Precision is (o - e) / o with o the observed candidates at or
    above rho and e = n_candidates * Pr[count >= rho] the number the model
    expects by chance; 0.0 whenever e exceeds o or nothing is observed.
    """
    if rho < 1:
        raise ValueError(f"rho must be at least 1, got {rho}")
    if n_candidates <= 0:
        raise ValueError(f"n_candidates must be positive, got {n_candidates}")
    counts = _counts_of(o_hist)
    o = sum(c for r, c in counts.items() if r >= rho)
    if o <= 0:
        return 0.0
    e = n_candidates * nb_tail(k, a_l, rho)
    if e > o:
        return 0.0
    return float((o - e) / o)


def _threshold_scan(counts: dict, n_candidates: int, k: float, a_l: float,
                    pi: float):
    """Scan rho downward from the highest observed count; return the last
    rho whose predicted precision is still >= pi, with that precision.

    Stops at the first failing rho (precision is not monotone in rho, and
    the useful threshold is the lowest one in the run of passes that starts
    at the top). Returns (None, None) when even the top count fails.
    """
    r_max = max((r for r, c in counts.items() if c > 0), default=0)
    if r_max < 1:
        return None, None
    cum = np.cumsum(nb_pmf_prefix(k, a_l, r_max)).tolist()
    o_suffix = [0] * (r_max + 2)
    for r, c in counts.items():
        if r >= 1:
            o_suffix[r] += c
    for r in range(r_max - 1, 0, -1):
        o_suffix[r] += o_suffix[r + 1]
    best = (None, None)
    for rho in range(r_max, 0, -1):
        o = o_suffix[rho]
        tail = min(1.0, max(0.0, 1.0 - cum[rho - 1]))
        e = n_candidates * tail
        prec = (o - e) / o if (o > 0 and e <= o) else 0.0
        if prec >= pi:
            best = (rho, prec)
        else:
            break
    return best


def find_threshold(o_hist, n_candidates: int, k: float, a_l: float,
                   pi: float) -> Optional[int]:
    """Local frequency threshold for precision target pi, or None if even
    the highest observed count cannot reach it."""
    if not (0.0 <= pi <= 1.0):
        raise ValueError(f"pi must be in [0, 1], got {pi}")
    if n_candidates <= 0:
        raise ValueError(f"n_candidates must be positive, got {n_candidates}")
    sigma, _ = _threshold_scan(_counts_of(o_hist), n_candidates, k, a_l, pi)
    return sigma


def nb_select(itemset, ext: ExtensionCounts, params: NBParams,
              pi: float) -> Selection:
    """Select the candidate extensions of ``itemset`` that beat the model.

    The model's scale is rescaled to the conditional database's incidence
    mass (``ext.rescale_sum``); candidates whose co-occurrence count reaches
    the threshold are returned. Empty selection when no threshold exists,
    when the conditional database carries no extension incidences, or when
    the model has no candidates left (n_total <= |itemset|).
    """
    l = frozenset(itemset)
    if ext.base != l:
        raise ValueError(f"extension counts are for base {sorted(ext.base)}, "
                         f"not {sorted(l)}")
    n_cand = params.n_total - len(l)
    if n_cand <= 0 or ext.rescale_sum <= 0 or not ext.counts:
        return Selection(frozenset(), None, None)
    a_l = params.a_per_incidence * ext.rescale_sum
    o_hist = Counter(ext.counts.values())
    sigma, prec = _threshold_scan(o_hist, n_cand, params.k, a_l, pi)
    if sigma is None:
        return Selection(frozenset(), None, None)
    chosen = frozenset(c for c, n in ext.counts.items() if n >= sigma)
    return Selection(chosen, sigma, prec)


def nb_gen(itemset, candidates, theta: float, repo: dict) -> list:
    """Register each candidate extension in the repository; return the
    supersets that just crossed the subset-agreement threshold.

    A superset of size s is emitted once theta * s of its subsets have
    proposed it (and at least one); supersets already emitted earlier in
    the run are dropped. Candidates are processed in ascending id order.
    """
    l = frozenset(itemset)
    emitted = []
    for c in sorted(candidates):
        if c in l:
            raise ValueError(f"candidate {c} already in base {sorted(l)}")
        lp = l | {c}
        entry = repo.get(lp)
        if entry is None:
            entry = repo[lp] = RepoEntry()
        if entry.frequent:
            continue
        entry.count += 1
        if entry.count < theta * len(lp):
            continue
        entry.frequent = True
        emitted.append(lp)
    return emitted


def nb_dfs(db: TransactionDatabase, config: MinerConfig,
           max_size: int = None) -> list:
    """Depth-first mining of all itemsets accepted under ``config``.

    Returns MinedItemset records (sizes 2 and up; single items are accepted
    by definition and not reported), sorted by size then items. Expansion
    order is ascending item id throughout, so output is deterministic.
    ``max_size`` caps the itemset size when given.
    """
    if max_size is not None and max_size < 1:
        raise ValueError(f"max_size must be at least 1, got {max_size}")
    params = config.params
    k = params.k
    apc = params.a_per_incidence
    pi = config.pi
    theta = config.theta
    repo: dict = {}
    results: list = []

    items0 = sorted(db.item_freq)
    nb_gen(frozenset(), items0, theta, repo)  # singles are accepted by definition
    if not items0 or max_size == 1:
        return results

    index = {i: [] for i in items0}
    for s in db.sets:
        for i in s:
            index[i].append(s)

    def expand(l, txns, size):
        if not txns or (max_size is not None and size >= max_size):
            return
        counter = Counter()
        for t in txns:
            counter.update(t)
        for i in l:
            del counter[i]
        if not counter:
            return
        n_cand = params.n_total - size
        if n_cand <= 0:
            return
        rescale = sum(counter.values())
        a_l = apc * rescale
        if a_l <= 0:
            return
        sigma, prec = _threshold_scan(Counter(counter.values()), n_cand, k, a_l, pi)
        if sigma is None:
            return
        selected = [c for c, n in counter.items() if n >= sigma]
        for lp in nb_gen(l, selected, theta, repo):
            (c,) = lp - l
            results.append(MinedItemset(items=tuple(sorted(lp)), freq=counter[c],
                                        sigma_freq=sigma, predicted_precision=prec))
            expand(lp, [t for t in txns if c in t], size + 1)

    for i in items0:
        expand(frozenset((i,)), index[i], 1)
    results.sort(key=lambda m: (len(m.items), m.items))
    return results


def write_itemsets(path, records) -> None:
    """Write itemset records as `ids TAB freq TAB threshold TAB precision`.

    Records are (items, freq, threshold, precision) tuples or MinedItemset.
    A None threshold/precision leaves the field empty (baseline miners have
    no per-itemset precision; their global threshold goes in the third
    column).
    """
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            if isinstance(rec, MinedItemset):
                items, freq, sigma, prec = (rec.items, rec.freq, rec.sigma_freq,
                                            rec.predicted_precision)
            else:
                items, freq, sigma, prec = rec
            sig = "" if sigma is None else f"{sigma:.12g}" if isinstance(sigma, float) else str(sigma)
            pre = "" if prec is None else f"{prec:.12g}"
            fh.write(f"{' '.join(map(str, items))}\t{freq}\t{sig}\t{pre}\n")


def read_itemsets(path) -> list:
    """Read an itemset file back into (items, freq, threshold, precision) tuples."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.rstrip("\n")
            if not s.strip() or s.startswith("#"):
                continue
            fields = s.split("\t")
            if len(fields) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
            ids, freq, sigma, prec = fields
            items = tuple(int(tok) for tok in ids.split())
            out.append((items, int(freq),
                        float(sigma) if sigma else None,
                        float(prec) if prec else None))
    return out
