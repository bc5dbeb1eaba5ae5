"""NP engine: complete witness search and round accounting."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oraclelab.circuits import Circuit, decode, encoding_length, lex_first_matching, truth_table
from oraclelab.errors import ConfigError, SearchBudgetError
from oraclelab.npengine import NPEngine, OracleFun, QueryLedger, WitnessQuery


def bits_query(length, predicate, label=""):
    return WitnessQuery(length, predicate=predicate, label=label)


class TestDecide:
    def test_point_witness(self):
        eng = NPEngine()
        bit, wit = eng.decide(bits_query(3, lambda w: w == (1, 0, 1)))
        assert (bit, wit) == (1, (1, 0, 1))

    def test_unsatisfiable(self):
        eng = NPEngine()
        bit, wit = eng.decide(bits_query(2, lambda w: False))
        assert (bit, wit) == (0, None)

    def test_ledger_single_query(self):
        eng = NPEngine()
        eng.decide(bits_query(2, lambda w: True))
        assert eng.ledger.batches == 1 and eng.ledger.queries == 1

    def test_circuit_witness_query(self):
        # "w encodes a circuit of size <= 1 computing AND2", cross-checked
        # against the enumeration oracle
        n, s = 2, 1
        length = encoding_length(n, s)

        def pred(w):
            try:
                c = decode(w, n, s)
            except Exception:
                return False
            return truth_table(c).bits == (0, 0, 0, 1)

        eng = NPEngine()
        bit, wit = eng.decide(bits_query(length, pred))
        assert bit == 1
        assert decode(wit, n, s) == lex_first_matching(n, s, (0, 0, 0, 1))

    def test_cap(self):
        eng = NPEngine(search_cap=4)
        with pytest.raises(SearchBudgetError):
            eng.decide(bits_query(5, lambda w: True))

    def test_lex_least_exhaustive(self):
        # the returned witness is minimal among all satisfying ones
        rng = random.Random(11)
        for _ in range(50):
            length = rng.randint(1, 6)
            good = {tuple(rng.randint(0, 1) for _ in range(length))
                    for _ in range(rng.randint(1, 5))}
            eng = NPEngine()
            bit, wit = eng.decide(bits_query(length, lambda w: w in good))
            assert bit == 1 and wit == min(good)


class TestBatch:
    def test_mixed_batch_one_round(self):
        eng = NPEngine()
        answers = eng.decide_batch([
            bits_query(3, lambda w: w == (1, 0, 1)),
            bits_query(2, lambda w: False),
        ])
        assert answers == [(1, (1, 0, 1)), (0, None)]
        assert eng.ledger.batches == 1 and eng.ledger.queries == 2

    def test_empty_batch(self):
        eng = NPEngine()
        assert eng.decide_batch([]) == []
        assert eng.ledger.batches == 1 and eng.ledger.queries == 0

    def test_batch_equals_sequential(self):
        rng = random.Random(3)
        qs = []
        for _ in range(8):
            length = rng.randint(1, 4)
            target = rng.getrandbits(length)
            qs.append(bits_query(
                length,
                lambda w, t=target, L=length: sum(b << (L - 1 - i) for i, b in enumerate(w)) >= t))
        batch_eng = NPEngine()
        seq_eng = NPEngine()
        assert batch_eng.decide_batch(qs) == [seq_eng.decide(q) for q in qs]
        assert batch_eng.ledger.queries == seq_eng.ledger.queries == 8
        assert batch_eng.ledger.batches == 1 and seq_eng.ledger.batches == 8

    @settings(max_examples=50, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_permutation_invariance(self, rnd):
        qs = []
        for _ in range(5):
            length = rnd.randint(1, 4)
            keep = frozenset(rnd.getrandbits(length) for _ in range(3))
            qs.append(bits_query(
                length,
                lambda w, k=keep, L=length: sum(b << (L - 1 - i) for i, b in enumerate(w)) in k))
        base = NPEngine().decide_batch(qs)
        order = list(range(5))
        rnd.shuffle(order)
        shuffled = NPEngine().decide_batch([qs[i] for i in order])
        assert [base[i] for i in order] == shuffled

    def test_ledger_conservation(self):
        eng = NPEngine()
        sizes = [3, 0, 5, 2]
        for k in sizes:
            eng.decide_batch([bits_query(2, lambda w: True)] * k)
        assert eng.ledger.queries == sum(sizes)
        assert eng.ledger.batches == len(sizes)


class TestOracleFun:
    def test_probe_counting(self):
        ledger = QueryLedger()
        f = OracleFun(lambda x: x[0], ledger)
        assert f((1, 0)) == 1 and f((0, 1)) == 0
        assert ledger.f_probes == 2

    def test_snapshot_is_copy(self):
        ledger = QueryLedger(1, 2, 3)
        snap = ledger.snapshot()
        ledger.queries += 1
        assert snap.queries == 2


class TestQueryValidation:
    def test_needs_exactly_one_of_predicate_searcher(self):
        with pytest.raises(ConfigError):
            WitnessQuery(2)
        with pytest.raises(ConfigError):
            WitnessQuery(2, predicate=lambda w: True, searcher=lambda: (0, None))

    def test_searcher_contract_matches_exhaustive(self):
        # a structured searcher must agree with brute force; spot-check one
        target = (0, 1, 1)

        def searcher():
            return (1, target)

        q_fast = WitnessQuery(3, searcher=searcher)
        q_slow = bits_query(3, lambda w: w >= target)
        assert NPEngine().decide(q_fast) == NPEngine().decide(q_slow)
