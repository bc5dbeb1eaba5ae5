"""Hashing and gap counting: exact family statistics, planted-boundary trials."""

import itertools
import random
from collections import Counter
from fractions import Fraction

import pytest

from oraclelab.approxcount import (
    POWER,
    Verdict,
    all_hashes,
    exact_count,
    gap_decide,
    sample_hash,
    tuple_membership,
)
from oraclelab.errors import ConfigError, SearchBudgetError


def bits_of(v, width):
    return tuple((v >> (width - 1 - k)) & 1 for k in range(width))


def planted(points, m):
    pts = set(points)

    def member(bits):
        v = 0
        for b in bits:
            v = (v << 1) | b
        return v in pts

    return member


class TestAffineFamily:
    def test_determinism(self):
        h = sample_hash(4, 2, random.Random(0))
        x = (1, 0, 1, 1)
        assert h.apply(x) == h.apply(x)

    def test_apply_matches_int_form(self):
        rng = random.Random(5)
        for _ in range(50):
            h = sample_hash(5, 3, rng)
            v = rng.getrandbits(5)
            bits = h.apply(bits_of(v, 5))
            assert sum(b << (3 - 1 - i) for i, b in enumerate(bits)) == h.apply_int(v)

    def test_pairwise_independence_exact_full_family(self):
        # every (h(x), h(y)) pair value appears with frequency exactly 2^-2j
        for m, j in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)]:
            family = list(all_hashes(m, j))
            expected = len(family) // (1 << (2 * j))
            for x, y in itertools.combinations(range(1 << m), 2):
                stats = Counter((h.apply_int(x), h.apply_int(y)) for h in family)
                assert all(stats[pair] == expected
                           for pair in itertools.product(range(1 << j), repeat=2))
                assert sum(stats.values()) == len(family)

    def test_sampling_frequencies_m1_j1(self):
        # 4 maps, each should be drawn about a quarter of the time
        rng = random.Random(99)
        stats = Counter()
        for _ in range(10_000):
            h = sample_hash(1, 1, rng)
            stats[(h.rows, h.offset)] += 1
        assert len(stats) == 4
        for count in stats.values():
            assert 2300 <= count <= 2700

    def test_bad_geometry(self):
        with pytest.raises(ConfigError):
            sample_hash(2, 3, random.Random(0))


class TestExactCount:
    def test_constant_false(self):
        assert exact_count(lambda b: False, 3) == 0

    def test_constant_true(self):
        assert exact_count(lambda b: True, 3) == 8

    def test_even_parity_half(self):
        assert exact_count(lambda b: sum(b) % 2 == 0, 4) == 8

    def test_cap(self):
        with pytest.raises(SearchBudgetError):
            exact_count(lambda b: True, 30)


class TestTupleAmplification:
    def test_exact_count_powers(self):
        # the c-tuple predicate's count is the base count to the c-th power
        for m, pts in [(3, {1, 5}), (4, {0, 3, 9})]:
            member = planted(pts, m)
            base = exact_count(member, m)
            squared = exact_count(tuple_membership(member, m, 2), 2 * m)
            assert squared == base ** 2

    def test_power_constant(self):
        assert Fraction(9, 8) ** POWER >= 4
        assert Fraction(9, 8) ** (POWER - 1) < 4


class TestGapDecide:
    def test_empty_set_low(self):
        v = gap_decide(lambda b: False, 6, 4, Fraction(1, 10), random.Random(0),
                       hash_draws=4, reps=3)
        assert v.verdict is Verdict.LOW

    def test_full_domain_high(self):
        # S = 2^m = T satisfies the HIGH promise with room to spare
        v = gap_decide(lambda b: True, 2, 1 << 2, Fraction(1, 10), random.Random(0),
                       hash_draws=4, reps=3)
        assert v.verdict is Verdict.HIGH

    def test_planted_boundaries_m10(self):
        # S = floor(2T/3) and ceil(3T/4) at T=3: the promise boundaries
        T, m = 3, 10
        lo, hi = (2 * T) // 3, -(-3 * T // 4)
        rng = random.Random(123)
        errors = 0
        trials = 60
        for _ in range(trials):
            pts = rng.sample(range(1 << m), lo)
            v = gap_decide(planted(pts, m), m, T, Fraction(1, 10), rng,
                           hash_draws=4, reps=3)
            errors += v.verdict is not Verdict.LOW
            pts = rng.sample(range(1 << m), hi)
            v = gap_decide(planted(pts, m), m, T, Fraction(1, 10), rng,
                           hash_draws=4, reps=3)
            errors += v.verdict is not Verdict.HIGH
        assert errors <= (2 * trials) // 10

    def test_default_parameters_run(self):
        rng = random.Random(1)
        v = gap_decide(planted({3, 77}, 10), 10, 3, Fraction(1, 10), rng)
        assert v.verdict is Verdict.LOW
        assert v.trials == 64 * 5

    def test_budget_guard(self):
        with pytest.raises(SearchBudgetError):
            gap_decide(lambda b: False, 12, 512, Fraction(1, 10), random.Random(0))

    def test_validation(self):
        with pytest.raises(ConfigError):
            gap_decide(lambda b: False, 4, 0, Fraction(1, 10), random.Random(0))
        with pytest.raises(ConfigError):
            gap_decide(lambda b: False, 4, 2, Fraction(1, 10), random.Random(0), reps=4)
