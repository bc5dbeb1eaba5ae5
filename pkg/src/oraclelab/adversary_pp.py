"""Adversarial oracle construction against threshold-polynomial machines.

The world is a bit table with 2^rho rows and one column per (machine, input)
pair.  Each column carries an always-odd integer multilinear polynomial over
table cells; the machine's answer is the sign test p >= 1.  Encoding a row
writes every column's current answer into that row's cells.  The construction
repeats: if some row can be encoded without flipping any answer, encode it and
halt (the row then hardwires every machine, condition (C)); otherwise a
doubling set of rows is sought whose snapshot-encoding at least doubles the
progress product

    Q(A) = prod over columns, b in {0,1}, k in 0..K of
           2^(2k-3) + (2^k + (-1)^b p(A))^2,

which is bounded between (1/8)^#terms and (5*2^(2K))^#terms, so only finitely
many doublings can occur.  All Q arithmetic is exact rational; every committed
step carries a machine-checked certificate Q(after) >= 2*Q(before).

Two appendix variants are supported: timestamp mode additionally writes the
running encode count into auxiliary cells, letting an adaptive binary search
through the NP engine retrieve the last-encoded row; XOR mode writes
parity-corrected bits so that at halt every column's machine answer equals the
XOR of its whole column.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import ConfigError, InternalInvariantError, StalledError
from .npengine import NPEngine, WitnessQuery
from .polynomials import Multilinear, oddmaxbit_poly

Cell = tuple  # ("c", row, col) table cells; ("t", row, bit) timestamp cells


def col_cell(r: int, c: int) -> Cell:
    return ("c", r, c)


def time_cell(r: int, j: int) -> Cell:
    return ("t", r, j)


# ---------------------------------------------------------------------------
# Machines


@dataclass(frozen=True)
class ThresholdMachine:
    """Sign of an always-odd integer multilinear polynomial over table cells."""

    poly: Multilinear
    degree: int
    p_max: int
    k_bits: int

    @classmethod
    def from_poly(cls, poly: Multilinear) -> "ThresholdMachine":
        if not poly.always_odd():
            raise ConfigError(
                "threshold polynomial must be odd on every 0/1 assignment "
                "(odd constant, even term coefficients)")
        p_max = poly.magnitude_bound()
        return cls(poly, poly.degree, p_max, max(0, (p_max - 1).bit_length()))

    def value(self, on_cells: frozenset) -> int:
        return self.poly.evaluate(on_cells)

    def output(self, on_cells: frozenset) -> int:
        return 1 if self.poly.evaluate(on_cells) >= 1 else 0

    @property
    def rows_read(self) -> frozenset:
        return frozenset(cell[1] for cell in self.poly.support)


def machine_output(machine: ThresholdMachine, table: "OracleTable") -> int:
    return machine.output(table.on)


def _parse_cell(entry) -> Cell:
    if len(entry) == 3 and entry[0] == "t":
        return time_cell(int(entry[1]), int(entry[2]))
    if len(entry) == 2:
        return col_cell(int(entry[0]), int(entry[1]))
    raise ConfigError(f"bad cell spec {entry!r}")


def machine_from_spec(spec: dict) -> ThresholdMachine:
    kind = spec.get("kind")
    if kind == "const":
        value = int(spec["value"])
        return ThresholdMachine.from_poly(Multilinear.build(value, []))
    if kind == "dictator":
        cell = _parse_cell(spec["cell"])
        if spec.get("negate", False):
            poly = Multilinear.build(1, [(-2, [cell])])
        else:
            poly = Multilinear.build(-1, [(2, [cell])])
        return ThresholdMachine.from_poly(poly)
    if kind == "oddmaxbit":
        cells = [_parse_cell(e) for e in spec["cells"]]
        if not cells:
            raise ConfigError("oddmaxbit needs a nonempty cell block")
        return ThresholdMachine.from_poly(oddmaxbit_poly(cells))
    if kind == "poly":
        terms = [(int(coeff), [_parse_cell(e) for e in cells])
                 for coeff, cells in spec.get("terms", [])]
        return ThresholdMachine.from_poly(Multilinear.build(int(spec["constant"]), terms))
    raise ConfigError(f"unknown machine kind {kind!r}")


def random_sparse_machine(rng: random.Random, rows: int, cols: int,
                          degree: int = 2, terms: int = 3,
                          coeff_bound: int = 4) -> ThresholdMachine:
    """Random always-odd sparse polynomial (even coefficients, odd constant)."""
    raw = []
    for _ in range(terms):
        width = rng.randint(1, degree)
        cells = {col_cell(rng.randrange(rows), rng.randrange(cols)) for _ in range(width)}
        raw.append((2 * rng.randint(-coeff_bound, coeff_bound), sorted(cells)))
    constant = 2 * rng.randint(-coeff_bound, coeff_bound) + 1
    return ThresholdMachine.from_poly(Multilinear.build(constant, raw))


# ---------------------------------------------------------------------------
# The oracle table


@dataclass(frozen=True)
class OracleTable:
    """Immutable snapshot: rows x cols bits plus timestamp cells, all sparse."""

    rows: int
    cols: int
    time_bits: int
    on: frozenset = frozenset()

    def cell(self, r: int, c: int) -> int:
        return 1 if col_cell(r, c) in self.on else 0

    def row_bits(self, r: int) -> tuple[int, ...]:
        return tuple(self.cell(r, c) for c in range(self.cols))

    def timestamp(self, r: int) -> int:
        t = 0
        for j in range(self.time_bits):
            t |= (1 if time_cell(r, j) in self.on else 0) << j
        return t

    def with_writes(self, writes: dict[Cell, int]) -> "OracleTable":
        added = {cell for cell, bit in writes.items() if bit}
        removed = {cell for cell, bit in writes.items() if not bit}
        return OracleTable(self.rows, self.cols, self.time_bits,
                           (self.on - frozenset(removed)) | frozenset(added))


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class PPConfig:
    n: int
    machine_count: int
    rho: int
    K: int
    mode: str = "plain"  # plain | timestamp | xor
    seed: int = 0
    candidate_cap: Optional[int] = None
    subset_cap: int = 12      # exhaustive doubling-set search up to 2^subset_cap subsets
    search_budget: int = 20000
    max_iters: Optional[int] = None

    @property
    def rows(self) -> int:
        return 1 << self.rho

    @property
    def cols(self) -> int:
        return self.machine_count * (1 << self.n)


def config_from_dict(raw: dict) -> tuple[PPConfig, list[ThresholdMachine]]:
    try:
        cfg = PPConfig(
            n=int(raw["n"]),
            machine_count=int(raw["machine_count"]),
            rho=int(raw["rho"]),
            K=int(raw["K"]) if raw.get("K") is not None else -1,
            mode=raw.get("mode", "plain"),
            seed=int(raw.get("seed", 0)),
            candidate_cap=raw.get("candidate_cap"),
            subset_cap=int(raw.get("subset_cap", 12)),
            search_budget=int(raw.get("search_budget", 20000)),
            max_iters=raw.get("max_iters"),
        )
    except KeyError as exc:
        raise ConfigError(f"missing config field {exc}") from exc
    if cfg.mode not in ("plain", "timestamp", "xor"):
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    machines = [machine_from_spec(s) for s in raw["machines"]]
    if len(machines) != cfg.cols:
        raise ConfigError(
            f"need one machine per column: {cfg.cols} columns, {len(machines)} machines")
    k_needed = max((m.k_bits for m in machines), default=0)
    if cfg.K < 0:
        cfg = PPConfig(**{**cfg.__dict__, "K": k_needed})
    elif cfg.K < k_needed:
        raise ConfigError(f"K={cfg.K} too small; machines need K >= {k_needed}")
    return cfg, machines


# ---------------------------------------------------------------------------
# Progress algebra


def q_term(machine: ThresholdMachine, table: OracleTable, b: int, k: int) -> Fraction:
    """2^(2k-3) + (2^k + (-1)^b p(A))^2, exact."""
    val = machine.value(table.on)
    signed = val if b % 2 == 0 else -val
    return Fraction(4 ** k, 8) + (2 ** k + signed) ** 2


@dataclass(frozen=True)
class ProgressQ:
    value: Fraction
    num_terms: int
    k_max: int
    breakdown: Optional[tuple] = None

    @property
    def q_min(self) -> Fraction:
        return Fraction(1, 8) ** self.num_terms

    @property
    def q_max(self) -> Fraction:
        return Fraction(5 * 4 ** self.k_max) ** self.num_terms


def progress_q(machines: Sequence[ThresholdMachine], table: OracleTable, K: int,
               breakdown: bool = False) -> ProgressQ:
    """The full triple product over columns, b in {0,1}, k in 0..K."""
    value = Fraction(1)
    detail = [] if breakdown else None
    for c, machine in enumerate(machines):
        val = machine.value(table.on)
        for b in (0, 1):
            signed = val if b == 0 else -val
            for k in range(K + 1):
                term = Fraction(4 ** k, 8) + (2 ** k + signed) ** 2
                value *= term
                if detail is not None:
                    detail.append(((c, b, k), term))
    num_terms = len(machines) * 2 * (K + 1)
    return ProgressQ(value, num_terms, K, tuple(detail) if detail is not None else None)


# ---------------------------------------------------------------------------
# The construction


@dataclass(frozen=True)
class DoublingChoice:
    rows: tuple[int, ...]
    case: str  # "weight1" | "subset"
    q_before: Fraction
    q_after: Fraction
    evals: int


@dataclass
class PPResult:
    halted: bool
    advice_row: Optional[int]
    final_table: OracleTable
    trace: list
    doublings: int
    encode_count: int


class PPWorld:
    """Binds a config and machine family; all operations live here."""

    def __init__(self, config: PPConfig, machines: Sequence[ThresholdMachine]):
        self.config = config
        self.machines = list(machines)
        if len(self.machines) != config.cols:
            raise ConfigError("one machine per column required")
        bound_iters = config.max_iters if config.max_iters is not None else (
            self._doubling_bound() + 2)
        self.max_iters = bound_iters
        self.time_bits = max(4, (bound_iters * config.rows + 1).bit_length()) \
            if config.mode == "timestamp" else 0
        self._watchers: dict[int, list[int]] = {}
        for c, m in enumerate(self.machines):
            for r in m.rows_read:
                self._watchers.setdefault(r, []).append(c)

    # -- basics -----------------------------------------------------------

    def empty_table(self) -> OracleTable:
        return OracleTable(self.config.rows, self.config.cols, self.time_bits)

    def outputs(self, table: OracleTable) -> tuple[int, ...]:
        return tuple(m.output(table.on) for m in self.machines)

    def column_label(self, c: int) -> str:
        per_machine = 1 << self.config.n
        i, xv = divmod(c, per_machine)
        return f"M{i + 1}|x={xv:0{self.config.n}b}"

    def _doubling_bound(self) -> int:
        # floor(log2(Q_max / Q_min)) with the finite-parameter bounds
        num_terms = self.config.cols * 2 * (self.config.K + 1)
        ratio = Fraction(5 * 4 ** self.config.K) ** num_terms / Fraction(1, 8) ** num_terms
        d = 0
        while Fraction(2) ** (d + 1) <= ratio:
            d += 1
        return d

    def doubling_bound(self) -> int:
        return self._doubling_bound()

    # -- encoding ---------------------------------------------------------

    def encode_set(self, table: OracleTable, rows: Iterable[int],
                   base_time: int = 0) -> OracleTable:
        """Encode every row in the set with machine answers from `table`.

        All rows receive the same output vector, read from the shared
        pre-encoding snapshot.  In timestamp mode rows are stamped with
        consecutive encode counts (ascending row order); in XOR mode each
        row's bits are parity-corrected against the other rows of the running
        table, still using the snapshot outputs.
        """
        outs = self.outputs(table)
        mode = self.config.mode
        current = table
        stamp = base_time
        for r in sorted(set(rows)):
            writes: dict[Cell, int] = {}
            for c, out in enumerate(outs):
                if mode == "xor":
                    parity = 0
                    for cell in current.on:
                        if cell[0] == "c" and cell[2] == c and cell[1] != r:
                            parity ^= 1
                    writes[col_cell(r, c)] = out ^ parity
                else:
                    writes[col_cell(r, c)] = out
            if mode == "timestamp":
                stamp += 1
                for j in range(self.time_bits):
                    writes[time_cell(r, j)] = (stamp >> j) & 1
            current = current.with_writes(writes)
        return current

    def encode_row(self, table: OracleTable, r: int, base_time: int = 0) -> OracleTable:
        return self.encode_set(table, [r], base_time)

    # -- sensitivity ------------------------------------------------------

    def sensitive_pairs(self, table: OracleTable, r: int,
                        base_time: int = 0) -> list[int]:
        """Columns whose machine answer flips if row r is encoded now."""
        watchers = self._watchers.get(r)
        if not watchers:
            return []
        after = self.encode_row(table, r, base_time)
        out = []
        for c in watchers:
            m = self.machines[c]
            if m.output(table.on) != m.output(after.on):
                out.append(c)
        return sorted(out)

    def find_insensitive_row(self, table: OracleTable,
                             base_time: int = 0) -> Optional[int]:
        """First row no pair is sensitive to, verified to yield condition (C)."""
        for r in range(self.config.rows):
            if self.sensitive_pairs(table, r, base_time):
                continue
            encoded = self.encode_row(table, r, base_time)
            outs = self.outputs(encoded)
            if any(encoded.cell(r, c) != outs[c] for c in range(self.config.cols)):
                raise InternalInvariantError(
                    f"row {r} is insensitive but condition (C) failed after encoding")
            return r
        return None

    def condition_c_holds(self, table: OracleTable, r: int) -> bool:
        outs = self.outputs(table)
        return all(table.cell(r, c) == outs[c] for c in range(self.config.cols))

    # -- doubling step ----------------------------------------------------

    def busiest_pair(self, table: OracleTable, base_time: int = 0) -> tuple[int, list[int]]:
        """The column sensitive to the most rows, with those rows in order."""
        rows_for: dict[int, list[int]] = {c: [] for c in range(self.config.cols)}
        for r in range(self.config.rows):
            for c in self.sensitive_pairs(table, r, base_time):
                rows_for[c].append(r)
        best = max(rows_for, key=lambda c: (len(rows_for[c]), -c))
        need = -(-self.config.rows // self.config.cols)  # ceil
        if len(rows_for[best]) < need:
            raise InternalInvariantError(
                f"counting argument violated: busiest pair covers "
                f"{len(rows_for[best])} rows < ceil(rows/cols) = {need}")
        cap = self.config.candidate_cap
        rows = rows_for[best] if cap is None else rows_for[best][:cap]
        return best, rows

    def _y_degree_bound(self) -> int:
        # Q as a polynomial in the candidate indicators: each q term is
        # quadratic in its column's p, whose Y-degree is at most deg(p).
        return sum(2 * (self.config.K + 1) * 2 * m.degree for m in self.machines)

    def select_doubling_set(self, table: OracleTable, busy: int,
                            candidates: Sequence[int],
                            base_time: int = 0) -> DoublingChoice:
        """A certified row set whose snapshot-encoding doubles Q.

        Scans singletons first (the 2/3-v test), then searches subsets for
        v >= 6 v(A) (exhaustively under the cap, else seeded random + greedy
        bit flips).  Whatever is returned has been recertified by exact
        recomputation of Q; exhausting the budget raises StalledError with a
        diagnostic that reports whether the search was inside the low-degree
        regime where a witness provably exists.
        """
        cfg = self.config
        machine = self.machines[busy]
        if not candidates:
            raise StalledError("no candidate rows", {
                "reason": "empty-candidates", "num_candidates": 0,
                "lemma_precondition_held": False})
        b = machine.output(table.on)
        p_val = machine.value(table.on)
        k = max(0, (abs(p_val) - 1).bit_length())
        q_a = q_term(machine, table, b, k)
        big_q_a = progress_q(self.machines, table, cfg.K).value
        v_a = big_q_a / q_a
        evals = 0

        def q_and_v(rows: Sequence[int]) -> tuple[Fraction, Fraction]:
            nonlocal evals
            evals += 1
            after = self.encode_set(table, rows, base_time)
            big = progress_q(self.machines, after, cfg.K).value
            return big, big / q_term(machine, after, b, k)

        def certified(rows: Sequence[int], big_after: Fraction, case: str) -> DoublingChoice:
            if big_after < 2 * big_q_a:
                raise InternalInvariantError(
                    f"case-{case} algebra violated: Q ratio "
                    f"{big_after / big_q_a} < 2 on rows {sorted(rows)}")
            return DoublingChoice(tuple(sorted(rows)), case, big_q_a, big_after, evals)

        best_w1 = Fraction(0)
        for r in candidates:
            big, v = q_and_v([r])
            best_w1 = max(best_w1, v / v_a)
            if 3 * v >= 2 * v_a:
                return certified([r], big, "weight1")

        n_cand = len(candidates)
        deg_bound = self._y_degree_bound()
        lemma_ok = (7 * deg_bound) ** 2 <= n_cand

        if n_cand <= cfg.subset_cap:
            for mask in range(1, 1 << n_cand):
                rows = [candidates[i] for i in range(n_cand) if (mask >> i) & 1]
                big, v = q_and_v(rows)
                if v >= 6 * v_a:
                    return certified(rows, big, "subset")
                if evals >= cfg.search_budget:
                    break
        else:
            rng = random.Random(cfg.seed)
            while evals < cfg.search_budget:
                mask = rng.getrandbits(n_cand) or 1
                rows = {candidates[i] for i in range(n_cand) if (mask >> i) & 1}
                big, v = q_and_v(sorted(rows))
                improved = True
                while improved and evals < cfg.search_budget:
                    improved = False
                    for i in range(n_cand):
                        trial = set(rows)
                        trial.symmetric_difference_update({candidates[i]})
                        if not trial:
                            continue
                        big2, v2 = q_and_v(sorted(trial))
                        if v2 > v:
                            rows, big, v = trial, big2, v2
                            improved = True
                    if v >= 6 * v_a:
                        return certified(sorted(rows), big, "subset")
                if v >= 6 * v_a:
                    return certified(sorted(rows), big, "subset")

        raise StalledError("doubling-set search exhausted its budget", {
            "reason": "budget",
            "num_candidates": n_cand,
            "evals_used": evals,
            "weight1_best_ratio": str(best_w1),
            "deg_bound": deg_bound,
            "lemma_precondition_held": lemma_ok,
        })

    # -- main loop --------------------------------------------------------

    def run_construction(self) -> PPResult:
        cfg = self.config
        table = self.empty_table()
        prog = progress_q(self.machines, table, cfg.K)
        trace: list[dict] = []
        trace.append({
            "record": "header", "kind": "adversary-pp", "mode": cfg.mode,
            "rows": cfg.rows, "cols": cfg.cols, "rho": cfg.rho, "K": cfg.K,
            "num_terms": prog.num_terms,
            "q_min": _frac(prog.q_min), "q_max": _frac(prog.q_max),
            "doubling_bound": self.doubling_bound(),
            "advice_bits": cfg.rho,
            "column_labels": [self.column_label(c) for c in range(cfg.cols)],
        })
        doublings = 0
        encode_count = 0
        for iteration in range(1, self.max_iters + 1):
            r = self.find_insensitive_row(table, encode_count)
            if r is not None:
                table = self.encode_row(table, r, encode_count)
                encode_count += 1
                outs = self.outputs(table)
                if not self.condition_c_holds(table, r):
                    raise InternalInvariantError("condition (C) failed at halting row")
                trace.append({
                    "record": "iteration", "iter": iteration, "action": "halt",
                    "rows": [r], "advice_row": r,
                    "row_cells": list(table.row_bits(r)),
                    "machine_outputs": list(outs),
                    "q": _frac(progress_q(self.machines, table, cfg.K).value),
                    "certified": True,
                })
                if cfg.mode == "xor":
                    ok = verify_parity(self, table)
                    trace[-1]["xor_parity_ok"] = bool(ok)
                    if not ok:
                        raise InternalInvariantError("XOR parity identity failed at halt")
                trace.append(self._summary(True, r, doublings, encode_count))
                return PPResult(True, r, table, trace, doublings, encode_count)

            busy, candidates = self.busiest_pair(table, encode_count)
            try:
                choice = self.select_doubling_set(table, busy, candidates, encode_count)
            except StalledError as exc:
                trace.append({
                    "record": "iteration", "iter": iteration, "action": "stalled",
                    "busy_pair": self.column_label(busy),
                    "diagnostic": exc.diagnostic,
                })
                trace.append(self._summary(False, None, doublings, encode_count))
                exc.diagnostic["trace"] = trace
                raise
            table = self.encode_set(table, choice.rows, encode_count)
            encode_count += len(choice.rows)
            doublings += 1
            q_after = progress_q(self.machines, table, cfg.K).value
            if q_after != choice.q_after:
                raise InternalInvariantError("committed table disagrees with certificate")
            if Fraction(2) ** doublings > prog.q_max / prog.q_min:
                raise InternalInvariantError(
                    f"{doublings} doublings exceed log2(Q_max/Q_min)")
            trace.append({
                "record": "iteration", "iter": iteration, "action": "double",
                "case": choice.case, "rows": list(choice.rows),
                "busy_pair": self.column_label(busy),
                "candidates": list(candidates),
                "q_before": _frac(choice.q_before), "q_after": _frac(choice.q_after),
                "certified": True,
            })
        raise StalledError(f"no halt within {self.max_iters} iterations",
                           {"reason": "max_iters", "trace": trace})

    def _summary(self, halted: bool, advice_row: Optional[int],
                 doublings: int, encode_count: int) -> dict:
        return {
            "record": "summary", "halted": halted, "advice_row": advice_row,
            "doublings": doublings, "encode_count": encode_count,
            "advice_bits": self.config.rho,
        }


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Appendix variants


def encode_row_with_time(world: PPWorld, table: OracleTable, r: int,
                         t: int) -> OracleTable:
    """Encode row r and stamp it with time t+1 (timestamp mode)."""
    if world.config.mode != "timestamp":
        raise ConfigError("encode_row_with_time requires timestamp mode")
    return world.encode_set(table, [r], base_time=t)


def find_latest_row(world: PPWorld, table: OracleTable,
                    engine: NPEngine) -> Optional[int]:
    """Binary-search the most recently encoded row via adaptive NP queries.

    Timestamps are unique (one per row-encode), so the row carrying the
    maximum stamp is the last one encoded.  Uses at most
    ceil(log2 T_cap) + 1 adaptive queries, within the 2*ceil(log2 T_max)+1
    budget; each query's witness is the lex-least row at or above the probed
    stamp, so the final witness is the answer.
    """
    rho = world.config.rho
    t_cap = (1 << world.time_bits) - 1

    def exists_at_least(threshold: int):
        def searcher():
            for r in range(world.config.rows):
                if table.timestamp(r) >= threshold:
                    return (1, tuple((r >> (rho - 1 - i)) & 1 for i in range(rho)))
            return (0, None)
        return searcher

    bit, wit = engine.decide(WitnessQuery(rho, searcher=exists_at_least(1),
                                          label="ts>=1"))
    if not bit:
        return None
    lo, hi = 1, t_cap
    while lo < hi:
        mid = (lo + hi + 1) // 2
        bit, w = engine.decide(WitnessQuery(rho, searcher=exists_at_least(mid),
                                            label=f"ts>={mid}"))
        if bit:
            lo, wit = mid, w
        else:
            hi = mid - 1
    row = 0
    for b in wit:
        row = (row << 1) | b
    # stamps are unique, so the lex-least witness at the maximum is the row
    return row


def encode_row_xor(world: PPWorld, table: OracleTable, r: int) -> OracleTable:
    """XOR-corrected encode: cell := answer XOR parity of the other rows."""
    if world.config.mode != "xor":
        raise ConfigError("encode_row_xor requires xor mode")
    return world.encode_set(table, [r])


def verify_parity(world: PPWorld, table: OracleTable) -> int:
    """1 iff every column's XOR over all rows equals its machine answer."""
    outs = world.outputs(table)
    for c in range(world.config.cols):
        parity = 0
        for cell in table.on:
            if cell[0] == "c" and cell[2] == c:
                parity ^= 1
        if parity != outs[c]:
            return 0
    return 1


# ---------------------------------------------------------------------------
# Lemma-1 style search utility


@dataclass(frozen=True)
class NsResult:
    x: Optional[tuple[int, ...]]
    preconditions_held: bool
    degree_ok: bool
    weight1_ok: bool
    base_value: int
    found_value: Optional[int]


def ns_search(p: Multilinear, n_vars: int, budget: int = 1 << 20,
              seed: int = 0) -> NsResult:
    """Search X with |p(X)| >= 6 |p(0^N)| for a polynomial over vars 0..N-1.

    Exhaustive in ascending order when 2^N fits the budget, otherwise the
    weight-1 points are scanned and then seeded random restarts with greedy
    bit flips spend the remaining budget.  Any returned X is certified by
    direct evaluation.  When nothing is found, the flags report whether the
    guarantee's preconditions (degree <= sqrt(N)/7 and no large weight-1
    value) actually held.
    """
    masks = [(sum(1 << v for v in vars_), coeff) for vars_, coeff in p.terms.items()]

    def value(x: int) -> int:
        return p.constant + sum(c for m, c in masks if m & x == m)

    base = abs(value(0))
    target = 6 * base
    degree_ok = (7 * p.degree) ** 2 <= n_vars
    weight1_ok = True
    for i in range(n_vars):
        if 3 * abs(value(1 << i)) > 2 * base:
            weight1_ok = False
            break

    def result(x_mask: Optional[int]) -> NsResult:
        if x_mask is None:
            return NsResult(None, degree_ok and weight1_ok, degree_ok, weight1_ok,
                            base, None)
        got = value(x_mask)
        if abs(got) < target:
            raise InternalInvariantError("ns_search certificate failed")
        bits = tuple((x_mask >> (n_vars - 1 - i)) & 1 for i in range(n_vars))
        return NsResult(bits, degree_ok and weight1_ok, degree_ok, weight1_ok,
                        base, got)

    if (1 << n_vars) <= budget:
        for x in range(1 << n_vars):
            if abs(value(x)) >= target:
                return result(x)
        return result(None)

    evals = 0
    for i in range(n_vars):
        evals += 1
        if abs(value(1 << i)) >= target:
            return result(1 << i)
    rng = random.Random(seed)
    while evals < budget:
        x = rng.getrandbits(n_vars)
        best = abs(value(x))
        evals += 1
        improved = True
        while improved and evals < budget:
            improved = False
            for i in range(n_vars):
                y = x ^ (1 << i)
                got = abs(value(y))
                evals += 1
                if got > best:
                    x, best = y, got
                    improved = True
            if best >= target:
                return result(x)
        if best >= target:
            return result(x)
    return result(None)
