"""Reference miners: global minimum support and all-confidence.

Both run level-wise with candidate generation over the previous level
(prefix join plus subset pruning); all-confidence is anti-monotone, so the
same pruning applies.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from itertools import combinations
from typing import NamedTuple

from .transactions import TransactionDatabase


class FrequentItemset(NamedTuple):
    items: tuple
    freq: int


def _apriori_gen(prev_level) -> list:
    """Size k+1 candidates from sorted k-tuples sharing a k-1 prefix."""
    prev = set(prev_level)
    by_prefix = defaultdict(list)
    for t in prev:
        by_prefix[t[:-1]].append(t[-1])
    out = []
    for prefix, lasts in by_prefix.items():
        lasts.sort()
        for i, x in enumerate(lasts):
            for y in lasts[i + 1:]:
                cand = prefix + (x, y)
                if all(cand[:j] + cand[j + 1:] in prev
                       for j in range(len(cand) - 2)):
                    out.append(cand)
    return out


def _count_candidates(txns, cands, k) -> Counter:
    """Count occurrences of the size-k candidate tuples in the transactions."""
    pool = {i for c in cands for i in c}
    counts = Counter()
    cand_set = set(cands)
    for t in txns:
        tt = [i for i in t if i in pool]
        if len(tt) >= k:
            for combo in combinations(tt, k):
                if combo in cand_set:
                    counts[combo] += 1
    return counts


def mine_frequent(db: TransactionDatabase, min_support: float) -> list:
    """All itemsets (size >= 1) with support >= min_support, with frequencies."""
    if not (0.0 < min_support <= 1.0):
        raise ValueError(f"min_support must be in (0, 1], got {min_support}")
    n = len(db)
    if n == 0:
        raise ValueError("cannot mine an empty database")
    out = []
    singles = {i: f for i, f in db.item_freq.items() if f / n >= min_support}
    out.extend(((i,), f) for i, f in singles.items())
    if not singles:
        return []
    txns = [tuple(i for i in t if i in singles) for t in db.transactions]
    counts = Counter()
    for t in txns:
        counts.update(combinations(t, 2))
    level = {c: f for c, f in counts.items() if f / n >= min_support}
    out.extend(level.items())
    k = 3
    while level:
        cands = _apriori_gen(level)
        if not cands:
            break
        counts = _count_candidates(txns, cands, k)
        level = {c: f for c, f in counts.items() if f / n >= min_support}
        out.extend(level.items())
        k += 1
    out.sort(key=lambda rec: (len(rec[0]), rec[0]))
    return [FrequentItemset(items, f) for items, f in out]


def all_confidence(db: TransactionDatabase, itemset) -> float:
    """Support of the itemset over the largest support of its single items."""
    z = frozenset(itemset)
    if not z:
        raise ValueError("all-confidence is undefined for the empty itemset")
    if len(db) == 0:
        raise ValueError("all-confidence is undefined on an empty database")
    denom = max(db.item_freq.get(i, 0) for i in z)
    if denom == 0:
        return 0.0
    freq = sum(1 for s in db.sets if z <= s)
    return freq / denom


def mine_allconf(db: TransactionDatabase, min_allconf: float) -> list:
    """All itemsets (size >= 2) with all-confidence >= min_allconf."""
    if not (0.0 < min_allconf <= 1.0):
        raise ValueError(f"min_allconf must be in (0, 1], got {min_allconf}")
    n = len(db)
    if n == 0:
        raise ValueError("cannot mine an empty database")
    single = db.item_freq
    txns = db.transactions
    counts = Counter()
    for t in txns:
        counts.update(combinations(t, 2))
    level = {c: f for c, f in counts.items()
             if f / max(single[c[0]], single[c[1]]) >= min_allconf}
    out = list(level.items())
    k = 3
    while level:
        cands = _apriori_gen(level)
        if not cands:
            break
        counts = _count_candidates(txns, cands, k)
        level = {c: f for c, f in counts.items()
                 if f / max(single[i] for i in c) >= min_allconf}
        out.extend(level.items())
        k += 1
    out.sort(key=lambda rec: (len(rec[0]), rec[0]))
    return [FrequentItemset(items, f) for items, f in out]


def confidence(db: TransactionDatabase, antecedent, consequent_item: int) -> float:
    """conf(antecedent -> {consequent_item}) = freq(both) / freq(antecedent)."""
    l = frozenset(antecedent)
    if consequent_item in l:
        raise ValueError("consequent must not be part of the antecedent")
    if len(db) == 0:
        raise ValueError("confidence is undefined on an empty database")
    freq_l = len(db) if not l else sum(1 for s in db.sets if l <= s)
    if freq_l == 0:
        raise ValueError("antecedent never occurs; confidence undefined")
    both = l | {consequent_item}
    return sum(1 for s in db.sets if both <= s) / freq_l
