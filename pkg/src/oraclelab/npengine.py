"""Bounded-witness existential decision procedure: the desk-scale NP oracle.

decide() answers one existential query by complete lexicographic search and
always returns the least satisfying witness.  decide_batch() answers a list of
queries while charging the ledger a single parallel round, which is what makes
adaptive-vs-parallel accounting meaningful downstream.

A query may carry a structured `searcher` instead of a raw predicate: a
callable producing the same (answer, lex-least witness) result by a smarter
complete search (the learner's pruned DFS over input sequences, for example).
Ledger accounting is identical either way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import ConfigError, SearchBudgetError

Witness = tuple[int, ...]
Answer = tuple[int, Optional[Witness]]

DEFAULT_SEARCH_CAP = 24  # witnesses up to 2^24 are searched exhaustively


@dataclass
class QueryLedger:
    """Monotone counters: parallel rounds, total queries, target-oracle probes."""

    batches: int = 0
    queries: int = 0
    f_probes: int = 0

    def snapshot(self) -> "QueryLedger":
        return QueryLedger(self.batches, self.queries, self.f_probes)

    def as_dict(self) -> dict:
        return {"batches": self.batches, "queries": self.queries, "f_probes": self.f_probes}


@dataclass(frozen=True)
class WitnessQuery:
    """An existential question over {0,1}^witness_length.

    Exactly one of `predicate` (total decision procedure on witness bit
    tuples) or `searcher` (complete structured search returning the same
    answer as exhaustive lexicographic search) must be given.
    """

    witness_length: int
    predicate: Optional[Callable[[Witness], bool]] = None
    searcher: Optional[Callable[[], Answer]] = None
    label: str = ""

    def __post_init__(self):
        if (self.predicate is None) == (self.searcher is None):
            raise ConfigError("exactly one of predicate/searcher required")


class OracleFun:
    """A target function f whose probes are charged to the ledger."""

    def __init__(self, fn: Callable[[Witness], int], ledger: QueryLedger):
        self._fn = fn
        self._ledger = ledger

    def __call__(self, x: Witness) -> int:
        self._ledger.f_probes += 1
        return int(self._fn(tuple(x)))


class NPEngine:
    def __init__(self, ledger: Optional[QueryLedger] = None, search_cap: int = DEFAULT_SEARCH_CAP):
        self.ledger = ledger if ledger is not None else QueryLedger()
        self.search_cap = search_cap

    def _answer(self, q: WitnessQuery) -> Answer:
        if q.searcher is not None:
            bit, wit = q.searcher()
            return (int(bit), None if wit is None else tuple(wit))
        if q.witness_length > self.search_cap:
            raise SearchBudgetError(
                f"witness length {q.witness_length} exceeds cap {self.search_cap}")
        length = q.witness_length
        for v in range(1 << length):
            w = tuple((v >> (length - 1 - k)) & 1 for k in range(length))
            if q.predicate(w):
                return (1, w)
        return (0, None)

    def decide(self, q: WitnessQuery) -> Answer:
        """One adaptive query: one round, one query in the ledger."""
        self.ledger.batches += 1
        self.ledger.queries += 1
        return self._answer(q)

    def decide_batch(self, qs: Sequence[WitnessQuery]) -> list[Answer]:
        """One parallel round answering every query in qs."""
        self.ledger.batches += 1
        self.ledger.queries += len(qs)
        return [self._answer(q) for q in qs]
