"""Adversarial oracle construction against bounded-error parallel-NP machines.

Each column carries an explicit machine: an ordered list of NP queries (each a
list of paths, a path being a set of cell reads it must see), randomness
z in {1..Z}, and an output table mapping (z, query answers) to a bit.  The
acceptance probability p of a column is the exact average of its output over
z.  Encoding a row writes round(p) per column; a column is sensitive to a row
if encoding it moves p by at least 1/6.

Each iteration either finds a row no column is sensitive to (encode, halt:
the row then answers every promise-respecting machine) or takes the pair
sensitive to the most rows, evaluates the progress measure

    W(A) = sum over columns of EX_z |accepted queries|

exactly on every candidate single-row encode, and commits the argmax.  The
union-bound fact that killing an accepted query requires touching a row its
lexicographically first accepting path reads is checked as a hard assertion,
as is the finite-parameter mean-progress inequality

    EX_k[W(A^(k))] >= W(A) (1 - d q_max / N') + 1/6 - d q_max / N'

with d the path read budget, q_max the per-machine query budget, and N' the
candidate count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ConfigError, InternalInvariantError, StalledError

Cell = tuple  # ("c", row, col), matching the threshold-side convention


def col_cell(r: int, c: int) -> Cell:
    return ("c", r, c)


Path = tuple  # of (Cell, expected bit)
Query = tuple  # of Path


@dataclass(frozen=True)
class ParallelNPMachine:
    """Queries shared across z; the output map consumes (z, answer vector)."""

    queries: tuple[Query, ...]
    z_count: int
    output_table: dict

    def __post_init__(self):
        if self.z_count < 1:
            raise ConfigError("z_count must be positive")
        for z in range(1, self.z_count + 1):
            for answers in _all_bit_vectors(len(self.queries)):
                if (z, answers) not in self.output_table:
                    raise ConfigError(f"output table not total: missing (z={z}, {answers})")

    def output(self, z: int, answers: tuple[int, ...]) -> int:
        return self.output_table[(z, answers)]

    @property
    def max_rows_per_path(self) -> int:
        best = 0
        for q in self.queries:
            for path in q:
                best = max(best, len({cell[1] for cell, _ in path}))
        return best


def _all_bit_vectors(k: int):
    for v in range(1 << k):
        yield tuple((v >> (k - 1 - i)) & 1 for i in range(k))


@dataclass(frozen=True)
class OracleTable:
    rows: int
    cols: int
    on: frozenset = frozenset()

    def cell(self, r: int, c: int) -> int:
        return 1 if col_cell(r, c) in self.on else 0

    def row_bits(self, r: int) -> tuple[int, ...]:
        return tuple(self.cell(r, c) for c in range(self.cols))

    def with_writes(self, writes: dict[Cell, int]) -> "OracleTable":
        added = {cell for cell, bit in writes.items() if bit}
        removed = {cell for cell, bit in writes.items() if not bit}
        return OracleTable(self.rows, self.cols,
                           (self.on - frozenset(removed)) | frozenset(added))


# ---------------------------------------------------------------------------
# Machine evaluation


def path_consistent(path: Path, table: OracleTable) -> bool:
    return all((cell in table.on) == bool(bit) for cell, bit in path)


def accepting_path_index(query: Query, table: OracleTable) -> Optional[int]:
    """Index of the lex-first (earliest) accepting path, or None."""
    for idx, path in enumerate(query):
        if path_consistent(path, table):
            return idx
    return None


def query_answers(machine: ParallelNPMachine, table: OracleTable) -> tuple[int, ...]:
    return tuple(0 if accepting_path_index(q, table) is None else 1
                 for q in machine.queries)


def accepted_queries(machine: ParallelNPMachine, z: int,
                     table: OracleTable) -> frozenset:
    """The set S of accepting query indices (shared across z here)."""
    return frozenset(i for i, a in enumerate(query_answers(machine, table)) if a)


def accept_prob(machine: ParallelNPMachine, table: OracleTable) -> Fraction:
    """Exact acceptance probability: average output over z."""
    answers = query_answers(machine, table)
    hits = sum(machine.output(z, answers) for z in range(1, machine.z_count + 1))
    return Fraction(hits, machine.z_count)


def round_half_up(p: Fraction) -> int:
    return 1 if p >= Fraction(1, 2) else 0


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class ParConfig:
    n: int
    machine_count: int
    rho: int
    seed: int = 0
    candidate_count: Optional[int] = None  # None: the pigeonhole bound ceil(rows/cols)
    max_iters: Optional[int] = None

    @property
    def rows(self) -> int:
        return 1 << self.rho

    @property
    def cols(self) -> int:
        return self.machine_count * (1 << self.n)


def _parse_path(raw) -> Path:
    return tuple((col_cell(int(cell[0]), int(cell[1])), int(bit)) for cell, bit in raw)


def machine_from_spec(spec: dict) -> ParallelNPMachine:
    queries = tuple(tuple(_parse_path(p) for p in q) for q in spec.get("queries", []))
    z_count = int(spec.get("z", 1))
    table: dict = {}
    outputs = spec["outputs"]
    if len(outputs) != z_count:
        raise ConfigError(f"need {z_count} output maps, got {len(outputs)}")
    for z, mapping in enumerate(outputs, start=1):
        for key, bit in mapping.items():
            answers = tuple(int(ch) for ch in key)
            if len(answers) != len(queries):
                raise ConfigError(f"answer key {key!r} has wrong width")
            table[(z, answers)] = int(bit)
    return ParallelNPMachine(queries, z_count, table)


def config_from_dict(raw: dict) -> tuple[ParConfig, list[ParallelNPMachine]]:
    try:
        cfg = ParConfig(
            n=int(raw["n"]),
            machine_count=int(raw["machine_count"]),
            rho=int(raw["rho"]),
            seed=int(raw.get("seed", 0)),
            candidate_count=raw.get("candidate_count"),
            max_iters=raw.get("max_iters"),
        )
    except KeyError as exc:
        raise ConfigError(f"missing config field {exc}") from exc
    machines = [machine_from_spec(s) for s in raw["machines"]]
    if len(machines) != cfg.cols:
        raise ConfigError(
            f"need one machine per column: {cfg.cols} columns, {len(machines)} machines")
    return cfg, machines


# ---------------------------------------------------------------------------
# The construction


@dataclass
class ParResult:
    halted: bool
    advice_row: Optional[int]
    final_table: OracleTable
    trace: list
    steps: int


class ParWorld:
    def __init__(self, config: ParConfig, machines: Sequence[ParallelNPMachine]):
        self.config = config
        self.machines = list(machines)
        if len(self.machines) != config.cols:
            raise ConfigError("one machine per column required")
        self.d = max((m.max_rows_per_path for m in self.machines), default=0)
        self.q_max = max((len(m.queries) for m in self.machines), default=0)
        self.w_max = Fraction(config.cols * self.q_max)

    def empty_table(self) -> OracleTable:
        return OracleTable(self.config.rows, self.config.cols)

    def column_label(self, c: int) -> str:
        per_machine = 1 << self.config.n
        i, xv = divmod(c, per_machine)
        return f"M{i + 1}|x={xv:0{self.config.n}b}"

    def probs(self, table: OracleTable) -> list[Fraction]:
        return [accept_prob(m, table) for m in self.machines]

    def progress_w(self, table: OracleTable) -> Fraction:
        total = Fraction(0)
        for m in self.machines:
            # queries are shared across z, so EX_z |S| is just |S|
            total += Fraction(len(accepted_queries(m, 1, table)))
        return total

    def encode_row_round(self, table: OracleTable, r: int) -> OracleTable:
        probs = self.probs(table)
        writes = {col_cell(r, c): round_half_up(p) for c, p in enumerate(probs)}
        return table.with_writes(writes)

    def sensitive(self, c: int, r: int, table: OracleTable) -> bool:
        """|p after encoding r - p before| >= 1/6, exactly."""
        before = accept_prob(self.machines[c], table)
        after = accept_prob(self.machines[c], self.encode_row_round(table, r))
        return abs(after - before) >= Fraction(1, 6)

    def sensitive_pairs(self, table: OracleTable, r: int) -> list[int]:
        after = self.encode_row_round(table, r)
        out = []
        for c, m in enumerate(self.machines):
            if abs(accept_prob(m, after) - accept_prob(m, table)) >= Fraction(1, 6):
                out.append(c)
        return out

    def find_insensitive_row(self, table: OracleTable) -> Optional[int]:
        for r in range(self.config.rows):
            if not self.sensitive_pairs(table, r):
                return r
        return None

    def kill_count(self, col: int, query_index: int, z: int, table: OracleTable,
                   candidates: Sequence[int]) -> int:
        """Candidates whose encoding removes an accepted query, with the
        union-bound certificate that this never exceeds the row dependence of
        the lexicographically first accepting path."""
        machine = self.machines[col]
        query = machine.queries[query_index]
        first = accepting_path_index(query, table)
        if first is None:
            raise InternalInvariantError("kill_count requires an accepting query")
        kills = 0
        for r in candidates:
            after = self.encode_row_round(table, r)
            if accepting_path_index(query, after) is None:
                kills += 1
        path_rows = {cell[1] for cell, _ in query[first]}
        if kills > len(path_rows):
            raise InternalInvariantError(
                f"kill bound violated: {kills} kills > {len(path_rows)} path rows "
                f"(col {col}, query {query_index})")
        return kills

    def busiest_pair(self, table: OracleTable) -> tuple[int, list[int]]:
        rows_for: dict[int, list[int]] = {c: [] for c in range(self.config.cols)}
        for r in range(self.config.rows):
            for c in self.sensitive_pairs(table, r):
                rows_for[c].append(r)
        best = max(rows_for, key=lambda c: (len(rows_for[c]), -c))
        need = -(-self.config.rows // self.config.cols)
        if len(rows_for[best]) < need:
            raise InternalInvariantError(
                f"counting argument violated: busiest pair covers "
                f"{len(rows_for[best])} rows < ceil(rows/cols) = {need}")
        take = self.config.candidate_count
        take = need if take is None else take
        return best, rows_for[best][:max(take, 1)]

    def step(self, table: OracleTable) -> tuple[str, OracleTable, dict]:
        """One iteration: halt on an insensitive row or commit the argmax encode."""
        r = self.find_insensitive_row(table)
        if r is not None:
            encoded = self.encode_row_round(table, r)
            return "halt", encoded, {"row": r}

        busy, candidates = self.busiest_pair(table)
        w_before = self.progress_w(table)
        w_values = []
        for k in candidates:
            w_values.append(self.progress_w(self.encode_row_round(table, k)))
        ex_k = sum(w_values, Fraction(0)) / len(w_values)
        n_prime = len(candidates)
        slack = Fraction(self.d * self.q_max, n_prime)
        bound_rhs = w_before * (1 - slack) + Fraction(1, 6) - slack
        if ex_k < bound_rhs:
            raise InternalInvariantError(
                f"mean-progress inequality violated: EX_k[W] = {ex_k} < {bound_rhs}")
        best = max(range(n_prime), key=lambda i: (w_values[i], -i))
        committed = self.encode_row_round(table, candidates[best])
        if w_values[best] < ex_k:
            raise InternalInvariantError("argmax fell below the candidate mean")

        kill_checks = 0
        for c, m in enumerate(self.machines):
            for qi in sorted(accepted_queries(m, 1, table)):
                self.kill_count(c, qi, 1, table, candidates)
                kill_checks += 1

        detail = {
            "busy_pair": self.column_label(busy),
            "candidates": list(candidates),
            "w_before": _frac(w_before),
            "w_values": [_frac(w) for w in w_values],
            "ex_k": _frac(ex_k),
            "bound_rhs": _frac(bound_rhs),
            "committed_row": candidates[best],
            "w_after": _frac(w_values[best]),
            "kill_checks": kill_checks,
            "d": self.d, "q_max": self.q_max, "n_prime": n_prime,
        }
        return "step", committed, detail

    def run_construction(self) -> ParResult:
        cfg = self.config
        table = self.empty_table()
        max_iters = cfg.max_iters if cfg.max_iters is not None else (
            int(self.w_max * 6) + cfg.rows + 4)
        trace: list[dict] = [{
            "record": "header", "kind": "adversary-par",
            "rows": cfg.rows, "cols": cfg.cols, "rho": cfg.rho,
            "d": self.d, "q_max": self.q_max, "w_max": _frac(self.w_max),
            "advice_bits": cfg.rho,
            "column_labels": [self.column_label(c) for c in range(cfg.cols)],
        }]
        seen = {table.on}
        steps = 0
        for iteration in range(1, max_iters + 1):
            action, new_table, detail = self.step(table)
            if action == "halt":
                r = detail["row"]
                table = new_table
                probs = self.probs(table)
                promise = []
                for c, p in enumerate(probs):
                    side = "high" if p >= Fraction(2, 3) else (
                        "low" if p <= Fraction(1, 3) else "none")
                    ok = True
                    if side == "high":
                        ok = table.cell(r, c) == 1
                    elif side == "low":
                        ok = table.cell(r, c) == 0
                    if not ok:
                        raise InternalInvariantError(
                            f"promise column {c} disagrees with advice cell")
                    promise.append({"col": self.column_label(c), "p": _frac(p),
                                    "side": side, "cell": table.cell(r, c), "ok": ok})
                trace.append({
                    "record": "iteration", "iter": iteration, "action": "halt",
                    "advice_row": r, "row_cells": list(table.row_bits(r)),
                    "promise": promise, "w": _frac(self.progress_w(table)),
                })
                trace.append({"record": "summary", "halted": True, "advice_row": r,
                              "steps": steps, "advice_bits": cfg.rho})
                return ParResult(True, r, table, trace, steps)
            steps += 1
            table = new_table
            if table.on in seen:
                trace.append({"record": "iteration", "iter": iteration,
                              "action": "stalled", **detail})
                raise StalledError(
                    "table state revisited; W cannot make progress",
                    {"reason": "cycle", "trace": trace})
            seen.add(table.on)
            trace.append({"record": "iteration", "iter": iteration,
                          "action": "w-step", **detail})
        raise StalledError(f"no halt within {max_iters} iterations",
                           {"reason": "max_iters", "trace": trace})


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Remark-(6) expansion: adaptive queries as a nonadaptive tree


@dataclass(frozen=True)
class AdaptiveTwoQuery:
    """A machine that asks `first`, then one of `if0`/`if1`, and answers the
    second answer.  The nonadaptive expansion asks all three at once."""

    first: Query
    if0: Query
    if1: Query

    def run_adaptive(self, table: OracleTable) -> int:
        a1 = 0 if accepting_path_index(self.first, table) is None else 1
        second = self.if1 if a1 else self.if0
        return 0 if accepting_path_index(second, table) is None else 1

    def cells(self) -> frozenset:
        out = set()
        for q in (self.first, self.if0, self.if1):
            for path in q:
                for cell, _ in path:
                    out.add(cell)
        return frozenset(out)


def expand_adaptive(spec: AdaptiveTwoQuery, z_count: int = 1) -> ParallelNPMachine:
    """2 adaptive queries become <= 2^2 nonadaptive ones (here exactly 3)."""
    table = {}
    for z in range(1, z_count + 1):
        for answers in _all_bit_vectors(3):
            a1, a0, a1b = answers
            table[(z, answers)] = a1b if a1 else a0
    return ParallelNPMachine((spec.first, spec.if0, spec.if1), z_count, table)


def adaptive_expansion_equivalent(spec: AdaptiveTwoQuery, rows: int, cols: int) -> bool:
    """Exhaustively confirm the expansion computes the adaptive behavior."""
    machine = expand_adaptive(spec)
    cells = sorted(spec.cells())
    for assignment in range(1 << len(cells)):
        on = frozenset(cell for i, cell in enumerate(cells) if (assignment >> i) & 1)
        table = OracleTable(rows, cols, on)
        answers = query_answers(machine, table)
        for z in range(1, machine.z_count + 1):
            if machine.output(z, answers) != spec.run_adaptive(table):
                return False
    return True
