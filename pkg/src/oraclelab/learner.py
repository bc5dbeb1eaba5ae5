"""Exact black-box circuit learning against a simulated NP oracle.

Two learners over the enumerated class B of circuits of size <= s:

* learn_adaptive — version-space halving: each adaptive NP round asks for an
  input on which at least a theta fraction of the surviving circuits disagree
  with f, then samples survivors and outputs their majority vote, verified
  exactly against f (zero error, resampling on failure).

* learn_parallel — one round of parallel NP queries.  Query Q_t asks whether
  some input list X_t shrinks the survivor count by a factor 2/3 at every
  prefix; query R_{t,j} asks whether some accepting witness of Q_t leads to a
  reconstruction circuit whose j-th description bit is 1.  The largest
  accepting t pins a witness-independent circuit, read off bitwise from the
  R answers: the lexicographically first circuit in B computing f exactly.

Survivor sets are tracked as truth-table multisets (ClassIndex), which makes
every count exact and cheap; the promise-gap comparisons of the underlying
approximate-counting machinery are collapsed to exact counting, as the
simulated P = NP world allows.  learn_nplog recovers the parallel learner's
output from a single number: how many of its queries answered yes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .circuits import (
    Circuit,
    ClassIndex,
    TruthTable,
    class_index,
    encode,
    decode,
    encoding_length,
    eval_circuit,
    majority_compose,
    table_mask,
    truth_table,
)
from .errors import InstanceError, InternalInvariantError, SearchBudgetError
from .npengine import NPEngine, QueryLedger, WitnessQuery

Input = tuple[int, ...]
WitnessZ = tuple[tuple[Input, int], ...]  # ordered (x, f(x)) pairs

RESAMPLE_CAP = 200
SWEEP_CAP = 6


@dataclass(frozen=True)
class LearnInstance:
    """A learning task: recover a circuit for f among circuits of size <= s.

    The caller asserts that some circuit of size <= s computes f; theta is the
    halving learner's culling fraction.
    """

    n: int
    s: int
    f: Callable[[Input], int]
    theta: Fraction = Fraction(1, 3)

    @classmethod
    def from_table(cls, table: TruthTable, s: int, theta: Fraction = Fraction(1, 3)) -> "LearnInstance":
        def probe(x: Input) -> int:
            v = 0
            for b in x:
                v = (v << 1) | b
            return table.bits[v]

        return cls(table.n, s, probe, theta)


@dataclass(frozen=True)
class LearnerOutput:
    circuit: Circuit
    ledger: QueryLedger
    ratio: Optional[Fraction]  # size(circuit)/s; None when s == 0
    retries: int = 0
    advice: Optional[int] = None


def _ratio(circuit: Circuit, s: int) -> Optional[Fraction]:
    return Fraction(circuit.size, s) if s > 0 else None


class _Run:
    """Per-run context: ledger, engine, memoized oracle probes, class index."""

    def __init__(self, inst: LearnInstance):
        self.inst = inst
        self.ledger = QueryLedger()
        self.engine = NPEngine(self.ledger)
        self.index = class_index(inst.n, inst.s)
        self._fmemo: dict[int, int] = {}

    def probe(self, x_index: int) -> int:
        if x_index not in self._fmemo:
            bits = tuple((x_index >> (self.inst.n - 1 - k)) & 1 for k in range(self.inst.n))
            self.ledger.f_probes += 1
            self._fmemo[x_index] = int(self.inst.f(bits))
        return self._fmemo[x_index]

    def f_table_mask(self) -> int:
        m = 0
        for v in range(1 << self.inst.n):
            m |= self.probe(v) << v
        return m


def _consistent_counts(index: ClassIndex, s: int, constraints) -> dict[int, int]:
    counts = index.table_counts(s)
    for xi, fx in constraints:
        counts = {m: c for m, c in counts.items() if (m >> xi) & 1 == fx}
    return counts


@dataclass(frozen=True)
class SurvivorState:
    """The halving learner's view: inputs seen so far and who is still alive.

    Survivors are stored as a truth-table multiset (mask -> circuit count),
    which determines every quantity the learner needs.
    """

    n: int
    s: int
    X: tuple[Input, ...]
    fvals: tuple[int, ...]
    table_counts: dict[int, int] = field(hash=False)
    prefix_counts: tuple[int, ...]

    @property
    def count(self) -> int:
        return self.prefix_counts[-1]

    @classmethod
    def initial(cls, run: _Run) -> "SurvivorState":
        counts = run.index.table_counts(run.inst.s)
        return cls(run.inst.n, run.inst.s, (), (), counts, (sum(counts.values()),))

    def extend(self, x: Input, fx: int) -> "SurvivorState":
        xi = _to_index(x)
        counts = {m: c for m, c in self.table_counts.items() if (m >> xi) & 1 == fx}
        return SurvivorState(
            self.n, self.s, self.X + (x,), self.fvals + (fx,),
            counts, self.prefix_counts + (sum(counts.values()),))


def _to_index(x: Input) -> int:
    v = 0
    for b in x:
        v = (v << 1) | (b & 1)
    return v


def _to_bits(v: int, n: int) -> Input:
    return tuple((v >> (n - 1 - k)) & 1 for k in range(n))


def find_hard_input(st: SurvivorState, theta: Fraction,
                    probe: Callable[[int], int]) -> Optional[Input]:
    """Lex-least input where >= theta of the survivors disagree with f."""
    total = st.count
    if total == 0:
        raise InstanceError("survivor set is empty")
    for xi in range(1 << st.n):
        fx = probe(xi)
        agreeing = sum(c for m, c in st.table_counts.items() if (m >> xi) & 1 == fx)
        failing = total - agreeing
        if failing >= theta * total:
            return _to_bits(xi, st.n)
    return None


def learn_adaptive(inst: LearnInstance, m: int = 5,
                   rng: Optional[random.Random] = None) -> LearnerOutput:
    """Halving learner: adaptive NP rounds, then verified majority of samples."""
    if m % 2 == 0 or m < 1:
        raise InstanceError(f"sample count must be odd and positive, got {m}")
    rng = rng if rng is not None else random.Random(0)
    run = _Run(inst)
    st = SurvivorState.initial(run)

    while True:
        state = st

        def searcher(state=state):
            x = find_hard_input(state, inst.theta, run.probe)
            return (0, None) if x is None else (1, x)

        bit, wit = run.engine.decide(
            WitnessQuery(inst.n, searcher=searcher, label="hard-input"))
        if not bit:
            break
        st = st.extend(wit, run.probe(_to_index(wit)))
        if st.count == 0:
            raise InstanceError("no circuit of size <= s is consistent with f")

    target = run.f_table_mask()
    population = sorted(st.table_counts)
    weights = [st.table_counts[mask] for mask in population]
    retries = 0
    while True:
        sampled = rng.choices(population, weights=weights, k=m)
        reps = [run.index.lex_first_for_mask(mask, inst.s) for mask in sampled]
        candidate = majority_compose(reps)
        if table_mask(candidate) == target:
            break
        retries += 1
        if retries > RESAMPLE_CAP:
            raise InstanceError(
                f"majority verification kept failing after {RESAMPLE_CAP} resamples; "
                "instance precondition likely violated")
    return LearnerOutput(candidate, run.ledger.snapshot(), _ratio(candidate, inst.s),
                         retries=retries)


# ---------------------------------------------------------------------------
# One-round parallel learner


class _ParallelWorld:
    """Shared lazy state for the batched queries of one parallel run.

    Frontier t holds every survivor state reachable by some accepting witness
    X_t (a constraint set: the order stopped mattering once it was checked),
    together with the lex-least ordered witness that reaches it.
    """

    def __init__(self, run: _Run):
        self.run = run
        self._frontiers: Optional[list[dict[frozenset, tuple]]] = None
        self._lex_memo: dict[frozenset, Optional[tuple[Circuit, tuple[int, ...]]]] = {}

    def frontiers(self) -> list[dict[frozenset, tuple]]:
        if self._frontiers is not None:
            return self._frontiers
        run = self.run
        n, s = run.inst.n, run.inst.s
        counts_of: dict[frozenset, int] = {}
        top = sum(run.index.table_counts(s).values())
        start: frozenset = frozenset()
        counts_of[start] = top
        levels: list[dict[frozenset, tuple]] = [{start: ()}]
        while True:
            frontier = levels[-1]
            nxt: dict[frozenset, tuple] = {}
            for state, seq in sorted(frontier.items(), key=lambda kv: kv[1]):
                parent_count = counts_of[state]
                seen = {xi for xi, _ in state}
                for xi in range(1 << n):
                    if xi in seen:
                        continue
                    fx = run.probe(xi)
                    child = state | {(xi, fx)}
                    if child in counts_of:
                        child_count = counts_of[child]
                    else:
                        child_count = sum(
                            c for m, c in _consistent_counts(run.index, s, child).items())
                        counts_of[child] = child_count
                    if 3 * child_count <= 2 * parent_count:
                        cand = seq + (xi,)
                        if child not in nxt or cand < nxt[child]:
                            nxt[child] = cand
            if not nxt:
                break
            levels.append(nxt)
        self._counts_of = counts_of
        self._frontiers = levels
        return levels

    def survivor_counts(self, state: frozenset) -> dict[int, int]:
        return _consistent_counts(self.run.index, self.run.inst.s, state)

    def majority_mask(self, state: frozenset) -> Optional[int]:
        """Majority-vote table over the state's survivors; None if empty."""
        counts = self.survivor_counts(state)
        total = sum(counts.values())
        if total == 0:
            return None
        mask = 0
        for xi in range(1 << self.run.inst.n):
            ones = sum(c for m, c in counts.items() if (m >> xi) & 1)
            if 2 * ones > total:
                mask |= 1 << xi
        return mask

    def lex_circuit_bits(self, state: frozenset) -> Optional[tuple[Circuit, tuple[int, ...]]]:
        # None when the survivor set is empty or no class circuit matches the
        # majority table; such witnesses contribute nothing to an R query.
        if state not in self._lex_memo:
            mask = self.majority_mask(state)
            circ = None if mask is None else self.run.index.lex_first_for_mask(
                mask, self.run.inst.s)
            self._lex_memo[state] = None if circ is None else (
                circ, encode(circ, self.run.inst.s))
        return self._lex_memo[state]

    def witness_bits(self, state: frozenset, seq: tuple[int, ...]) -> tuple[int, ...]:
        n = self.run.inst.n
        bits: list[int] = []
        for xi in seq:
            bits.extend(_to_bits(xi, n))
        for xi in seq:
            bits.append(self.run.probe(xi))
        return tuple(bits)


def _pigeonhole_t_max(class_size: int) -> int:
    t = 0
    while Fraction(3, 2) ** (t + 1) <= class_size:
        t += 1
    return t


def _build_parallel_queries(run: _Run, world: _ParallelWorld):
    """The full one-round query set: Q_t for t <= t_max, then R_{t,j}."""
    inst = run.inst
    t_max = _pigeonhole_t_max(run.index.class_size(inst.s))
    enc_len = encoding_length(inst.n, inst.s)

    def q_searcher(t: int):
        def search():
            levels = world.frontiers()
            if t >= len(levels) or not levels[t]:
                return (0, None)
            state, seq = min(levels[t].items(), key=lambda kv: kv[1])
            return (1, world.witness_bits(state, seq))
        return search

    def r_searcher(t: int, j: int):
        def search():
            levels = world.frontiers()
            if t >= len(levels):
                return (0, None)
            best = None
            for state, seq in levels[t].items():
                hit = world.lex_circuit_bits(state)
                if hit is not None and hit[1][j - 1] == 1:
                    if best is None or seq < best[1]:
                        best = (state, seq)
            if best is None:
                return (0, None)
            return (1, world.witness_bits(best[0], best[1]))
        return search

    queries = []
    for t in range(t_max + 1):
        queries.append(WitnessQuery(
            (inst.n + 1) * t, searcher=q_searcher(t), label=f"Q_{t}"))
    for t in range(t_max + 1):
        for j in range(1, enc_len + 1):
            queries.append(WitnessQuery(
                (inst.n + 1) * t, searcher=r_searcher(t, j), label=f"R_{t},{j}"))
    return queries, t_max, enc_len


def _run_parallel_round(inst: LearnInstance):
    run = _Run(inst)
    world = _ParallelWorld(run)
    queries, t_max, enc_len = _build_parallel_queries(run, world)
    answers = run.engine.decide_batch(queries)
    q_answers = [a for a, _ in answers[: t_max + 1]]
    r_answers = [a for a, _ in answers[t_max + 1:]]
    return run, t_max, enc_len, q_answers, r_answers


def _reconstruct(run: _Run, t_max: int, enc_len: int,
                 q_answers: Sequence[int], r_answers: Sequence[int]) -> Circuit:
    inst = run.inst
    t_star = max(t for t in range(t_max + 1) if q_answers[t])
    bits = tuple(r_answers[t_star * enc_len + (j - 1)] for j in range(1, enc_len + 1))
    try:
        circuit = decode(bits, inst.n, inst.s)
    except Exception as exc:
        raise InstanceError(
            f"reconstruction bits do not decode ({exc}); instance precondition "
            "likely violated") from exc
    if table_mask(circuit) != run.f_table_mask():
        raise InstanceError(
            "reconstructed circuit does not compute f; instance precondition violated")
    return circuit


def learn_parallel(inst: LearnInstance) -> LearnerOutput:
    """One-round learner: all Q_t and R_{t,j} queries in a single NP batch."""
    run, t_max, enc_len, q_answers, r_answers = _run_parallel_round(inst)
    circuit = _reconstruct(run, t_max, enc_len, q_answers, r_answers)
    return LearnerOutput(circuit, run.ledger.snapshot(), _ratio(circuit, inst.s))


def learn_nplog(inst: LearnInstance) -> LearnerOutput:
    """Recover learn_parallel's output from the count of positive answers.

    The advice is the number of yes answers in the parallel round.  The
    reconstruction re-derives the query set, checks that exactly that many
    answer yes (the guess-and-verify step of the NP/log machine, collapsed to
    a deterministic re-run), and reads the circuit off the answers.
    """
    _, t_max, enc_len, q_answers, r_answers = _run_parallel_round(inst)
    advice = sum(q_answers) + sum(r_answers)

    rerun, t_max2, enc_len2, q2, r2 = _run_parallel_round(inst)
    if (t_max2, enc_len2) != (t_max, enc_len) or sum(q2) + sum(r2) != advice:
        raise InternalInvariantError("re-derivation disagrees with advice count")
    circuit = _reconstruct(rerun, t_max2, enc_len2, q2, r2)
    return LearnerOutput(circuit, rerun.ledger.snapshot(), _ratio(circuit, inst.s),
                         advice=advice)


# ---------------------------------------------------------------------------
# Standalone forms of the parallel round's ingredients


def qt_accepts(inst: LearnInstance, t: int,
               engine: Optional[NPEngine] = None) -> tuple[int, set]:
    """Does some X_t shrink survivors by 2/3 at every prefix?  Returns the
    accepting bit and the full set of accepted ordered witnesses."""
    if t < 0:
        raise InstanceError(f"t must be nonnegative, got {t}")
    run = _Run(inst)
    witnesses: set[tuple[Input, ...]] = set()

    def dfs(state: SurvivorState, depth: int):
        if depth == t:
            witnesses.add(state.X)
            return
        for xi in range(1 << inst.n):
            x = _to_bits(xi, inst.n)
            if x in state.X:
                continue
            child = state.extend(x, run.probe(xi))
            if 3 * child.count <= 2 * state.count:
                dfs(child, depth + 1)

    def searcher():
        dfs(SurvivorState.initial(run), 0)
        if not witnesses:
            return (0, None)
        first = min(witnesses)
        flat: list[int] = []
        for x in first:
            flat.extend(x)
        for x in first:
            flat.append(run.probe(_to_index(x)))
        return (1, tuple(flat))

    eng = engine if engine is not None else run.engine
    bit, _ = eng.decide(WitnessQuery((inst.n + 1) * t, searcher=searcher, label=f"Q_{t}"))
    return bit, witnesses


def _state_from_witness(z: WitnessZ) -> frozenset:
    return frozenset((_to_index(x), fx) for x, fx in z)


def at_predicate(inst: LearnInstance, z: WitnessZ, x: Input) -> int:
    """Strict majority vote of the survivors B(X_t) at x; ties answer 0."""
    run = _Run(inst)
    counts = _consistent_counts(run.index, inst.s, _state_from_witness(z))
    total = sum(counts.values())
    if total == 0:
        raise InstanceError("empty survivor set")
    xi = _to_index(x)
    ones = sum(c for m, c in counts.items() if (m >> xi) & 1)
    return 1 if 2 * ones > total else 0


def lex_circuit(inst: LearnInstance, z: WitnessZ) -> Circuit:
    """Lex-first circuit in the class agreeing with at_predicate(z, .) everywhere."""
    run = _Run(inst)
    world = _ParallelWorld(run)
    hit = world.lex_circuit_bits(_state_from_witness(z))
    if hit is None:
        raise InstanceError("no circuit in the class matches the majority predicate")
    return hit[0]


# ---------------------------------------------------------------------------
# Black-box minimization


def minimize_blackbox(c: Circuit, mode: str = "parallel", m: int = 5,
                      rng: Optional[random.Random] = None,
                      s_cap: int = SWEEP_CAP) -> LearnerOutput:
    """Minimize by relearning c through its input/output behavior only.

    Sweeps the size bound upward from 0 until the selected learner succeeds.
    In parallel mode the output is the globally lex-first circuit computing
    the same function as c (so its size is the true minimum size).
    """
    if mode not in ("adaptive", "parallel"):
        raise InstanceError(f"unknown mode {mode!r}")
    c.validate()

    def f(x: Input) -> int:
        return eval_circuit(c, x)

    for s in range(s_cap + 1):
        inst = LearnInstance(c.n, s, f)
        try:
            if mode == "parallel":
                return learn_parallel(inst)
            return learn_adaptive(inst, m=m, rng=rng if rng is not None else random.Random(0))
        except InstanceError:
            continue
    raise SearchBudgetError(f"no circuit of size <= {s_cap} reproduces the oracle")


def is_minimal(c: Circuit) -> int:
    """1 iff no strictly smaller circuit computes the same function."""
    from .circuits import min_size

    return int(min_size(truth_table(c), c.size) == c.size)
