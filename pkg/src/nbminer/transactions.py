"""Transaction databases: loading, projection, and co-occurrence counting.

A transaction is a set of non-negative integer item ids. The basket file
format is one transaction per line, item ids separated by whitespace;
blank lines and lines starting with ``#`` are skipped, and duplicate ids
within a line are collapsed.
"""

from __future__ import annotations

import operator
from collections import Counter
from dataclasses import dataclass
from itertools import chain
from typing import Iterable, Iterator


class BasketFormatError(ValueError):
    """A basket file line could not be parsed."""


class TransactionDatabase:
    """Immutable sequence of transactions with cached item statistics.

    Transactions keep their input order and are stored as sorted tuples of
    distinct ids. ``item_freq`` maps each observed item to the number of
    transactions containing it; ``incidence_total`` is the sum of all
    transaction sizes.
    """

    __slots__ = ("transactions", "item_freq", "incidence_total", "_sets")

    def __init__(self, transactions: Iterable[Iterable[int]]):
        rows = []
        for t in transactions:
            try:
                items = sorted({operator.index(i) for i in t})
            except TypeError:
                raise ValueError(f"non-integer item id in transaction {t!r}") from None
            if items and items[0] < 0:
                raise ValueError(f"negative item id in transaction {t!r}")
            rows.append(tuple(items))
        self._init_from_rows(tuple(rows))

    def _init_from_rows(self, rows: tuple[tuple[int, ...], ...]) -> None:
        self.transactions = rows
        self.item_freq = dict(Counter(chain.from_iterable(rows)))
        self.incidence_total = sum(len(t) for t in rows)
        self._sets = None

    @classmethod
    def _from_rows(cls, rows: Iterable[tuple[int, ...]]) -> "TransactionDatabase":
        # fast path for already-normalized rows (projection shares references)
        db = cls.__new__(cls)
        db._init_from_rows(tuple(rows))
        return db

    @property
    def transaction_count(self) -> int:
        return len(self.transactions)

    @property
    def sets(self) -> tuple[frozenset, ...]:
        if self._sets is None:
            self._sets = tuple(frozenset(t) for t in self.transactions)
        return self._sets

    def __len__(self) -> int:
        return len(self.transactions)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.transactions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransactionDatabase):
            return NotImplemented
        return self.transactions == other.transactions

    def __hash__(self):
        return hash(self.transactions)

    def __repr__(self) -> str:
        return (f"TransactionDatabase({len(self)} transactions, "
                f"{len(self.item_freq)} items, {self.incidence_total} incidences)")


@dataclass(frozen=True)
class ExtensionCounts:
    """Co-occurrence counts of candidate extension items for a base itemset.

    ``counts[c]`` is the number of transactions of the conditional database
    that contain ``base ∪ {c}``; ``rescale_sum`` is the total of all counts,
    i.e. the incidences remaining after removing the base's own items.
    """

    base: frozenset
    counts: dict
    rescale_sum: int


def load_basket(path) -> TransactionDatabase:
    """Read a basket file into a TransactionDatabase.

    Raises BasketFormatError (with the offending line number) on any token
    that is not a non-negative decimal integer.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            items = set()
            for tok in s.split():
                if not (tok.isascii() and tok.isdigit()):
                    raise BasketFormatError(
                        f"{path}:{lineno}: invalid item id {tok!r}")
                items.add(int(tok))
            rows.append(tuple(sorted(items)))
    return TransactionDatabase._from_rows(rows)


def write_basket(db: TransactionDatabase, path) -> None:
    """Write a TransactionDatabase in basket format (one line per transaction)."""
    with open(path, "w", encoding="utf-8") as fh:
        for t in db.transactions:
            fh.write(" ".join(map(str, t)))
            fh.write("\n")


def support(db: TransactionDatabase, itemset) -> float:
    """Fraction of transactions containing ``itemset``; 1.0 for the empty set."""
    if len(db) == 0:
        raise ValueError("support is undefined on an empty database")
    z = frozenset(itemset)
    if not z:
        return 1.0
    return sum(1 for s in db.sets if z <= s) / len(db)


def project(db: TransactionDatabase, itemset) -> TransactionDatabase:
    """Conditional database: the transactions containing ``itemset``.

    Projection on the empty set returns ``db`` itself; otherwise the
    surviving transactions are shared by reference, in their original order.
    """
    l = frozenset(itemset)
    if not l:
        return db
    keep = [t for t, s in zip(db.transactions, db.sets) if l <= s]
    return TransactionDatabase._from_rows(keep)


def extension_counts(db_l: TransactionDatabase, itemset) -> ExtensionCounts:
    """Count candidate extensions of ``itemset`` over its conditional database.

    ``db_l`` must already be the conditional database of ``itemset`` (every
    transaction a superset); violating that is a contract error.
    """
    l = frozenset(itemset)
    m = len(db_l)
    for i in l:
        if db_l.item_freq.get(i, 0) != m:
            raise ValueError(
                f"database is not conditional on {sorted(l)}: "
                f"item {i} occurs in {db_l.item_freq.get(i, 0)} of {m} transactions")
    counts = {i: f for i, f in db_l.item_freq.items() if i not in l}
    return ExtensionCounts(base=l, counts=counts, rescale_sum=sum(counts.values()))
