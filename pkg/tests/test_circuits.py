"""Circuit core: evaluation, encoding, enumeration, minimization, majority."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oraclelab.circuits import (
    Circuit,
    ClassIndex,
    GateRecord,
    Op,
    TruthTable,
    circuit_from_text,
    circuit_to_text,
    class_index,
    decode,
    encode,
    encoding_key,
    encoding_length,
    enumerate_circuits,
    eval_circuit,
    field_width,
    lex_first_matching,
    majority_compose,
    majority_overhead,
    min_size,
    table_from_hex,
    table_to_hex,
    table_mask,
    truth_table,
)
from oraclelab.errors import ArityError, EncodingError, WellFormednessError

# frozen by exhaustive generation (enumeration is its own oracle)
ENUM_COUNT_2_2 = 12064
ENUM_COUNT_2_1 = 184
XOR2_MIN_SIZE = 4

AND2 = Circuit(2, (GateRecord(Op.AND, 0, 1),), 4)
XOR2 = Circuit(2, (GateRecord(Op.AND, 0, 1), GateRecord(Op.OR, 0, 1),
                   GateRecord(Op.NOT, 4, 0), GateRecord(Op.AND, 5, 6)), 7)


def naive_eval(c: Circuit, x) -> int:
    """Independent evaluator: recursive from the output wire, memoized."""
    memo = {}

    def wire(w: int) -> int:
        if w < c.n:
            return x[w]
        if w == c.n:
            return 0
        if w == c.n + 1:
            return 1
        if w not in memo:
            g = c.gates[w - c.n - 2]
            if g.opcode is Op.AND:
                memo[w] = wire(g.in1) & wire(g.in2)
            elif g.opcode is Op.OR:
                memo[w] = wire(g.in1) | wire(g.in2)
            else:
                memo[w] = 1 - wire(g.in1)
        return memo[w]

    return wire(c.output)


def random_circuit(rng: random.Random, n: int, s: int) -> Circuit:
    gates = []
    for j in range(s):
        limit = n + 2 + j
        op = rng.choice([Op.AND, Op.OR, Op.NOT])
        in1 = rng.randrange(limit)
        in2 = 0 if op is Op.NOT else rng.randrange(limit)
        gates.append(GateRecord(op, in1, in2))
    return Circuit(n, tuple(gates), rng.randrange(n + 2 + s))


class TestEval:
    def test_and_on_11(self):
        assert eval_circuit(AND2, (1, 1)) == 1

    def test_const0_leaf(self):
        c = Circuit(2, (), 2)
        for x in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            assert eval_circuit(c, x) == 0

    def test_not_on_0(self):
        c = Circuit(1, (GateRecord(Op.NOT, 0, 0),), 3)
        assert eval_circuit(c, (0,)) == 1

    def test_malformed_raises(self):
        bad = Circuit(2, (GateRecord(Op.AND, 0, 9),), 4)
        with pytest.raises(WellFormednessError):
            eval_circuit(bad, (0, 0))
        bad_not = Circuit(2, (GateRecord(Op.NOT, 0, 1),), 4)
        with pytest.raises(WellFormednessError):
            eval_circuit(bad_not, (0, 0))

    def test_differential_vs_naive_10k(self):
        rng = random.Random(20240601)
        for _ in range(10_000):
            n = rng.randint(1, 3)
            c = random_circuit(rng, n, rng.randint(0, 4))
            x = tuple(rng.randint(0, 1) for _ in range(n))
            assert eval_circuit(c, x) == naive_eval(c, x)


class TestTruthTable:
    def test_and_table(self):
        assert truth_table(AND2).bits == (0, 0, 0, 1)

    def test_const1_n1(self):
        assert truth_table(Circuit(1, (), 2)).bits == (1, 1)

    def test_xor_by_hand(self):
        # AND(OR(x1,x2), NOT(AND(x1,x2))) evaluated by hand
        assert truth_table(XOR2).bits == (0, 1, 1, 0)

    def test_mask_roundtrip(self):
        t = TruthTable(2, (1, 0, 0, 1))
        assert TruthTable.from_mask(2, t.mask) == t

    def test_bad_length(self):
        with pytest.raises(ArityError):
            TruthTable(2, (0, 1))


class TestEnumeration:
    def test_n1_s0_exactly_three(self):
        cs = list(enumerate_circuits(1, 0))
        assert [(c.gates, c.output) for c in cs] == [((), 0), ((), 1), ((), 2)]

    def test_n2_s0_exactly_four(self):
        assert sum(1 for _ in enumerate_circuits(2, 0)) == 4

    def test_frozen_count_2_2(self):
        assert sum(1 for _ in enumerate_circuits(2, 2)) == ENUM_COUNT_2_2

    def test_frozen_count_2_1(self):
        assert sum(1 for _ in enumerate_circuits(2, 1)) == ENUM_COUNT_2_1

    def test_strictly_increasing_no_duplicates(self):
        seen = set()
        prev = -1
        for c in enumerate_circuits(2, 2):
            key = encoding_key(c, 2)
            assert key > prev
            assert key not in seen
            seen.add(key)
            prev = key

    def test_all_well_formed(self):
        for c in enumerate_circuits(2, 2):
            c.validate()


class TestEncoding:
    def test_field_width_formula(self):
        # w = ceil(log2(n + 2 + s_max + 1))
        assert field_width(1, 0) == 2
        assert field_width(2, 2) == 3
        assert field_width(3, 3) == 4

    def test_roundtrip_small_classes_full(self):
        for n, s in [(1, 2), (2, 2), (3, 2)]:
            for c in enumerate_circuits(n, s):
                assert decode(encode(c, s), n, s) == c

    def test_roundtrip_3_3_prefix_and_stride(self):
        # the full (3,3) class has ~3.6M members; check a bounded slice
        import itertools

        for i, c in enumerate(itertools.islice(enumerate_circuits(3, 3), 40_000)):
            if i % 37 == 0:
                assert decode(encode(c, 3), 3, 3) == c

    def test_bits_roundtrip(self):
        for c in enumerate_circuits(2, 1):
            bits = encode(c, 1)
            assert encode(decode(bits, 2, 1), 1) == bits

    def test_length_depends_only_on_geometry(self):
        lengths = {len(encode(c, 2)) for c in enumerate_circuits(2, 2)}
        assert lengths == {encoding_length(2, 2)}

    def test_nonzero_padding_rejected(self):
        bits = list(encode(Circuit(2, (), 0), 2))
        w = field_width(2, 2)
        bits[w + 1] = 1  # corrupt a padding record
        with pytest.raises(EncodingError):
            decode(tuple(bits), 2, 2)

    def test_size_field_most_significant(self):
        small = max(enumerate_circuits(2, 2), key=lambda c: (c.size == 0, encoding_key(c, 2)))
        big = min((c for c in enumerate_circuits(2, 2) if c.size == 2),
                  key=lambda c: encoding_key(c, 2))
        assert small.size == 0 and encoding_key(small, 2) < encoding_key(big, 2)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 3), st.randoms(use_true_random=False))
    def test_roundtrip_random(self, n, s, rnd):
        c = random_circuit(rnd, n, s)
        assert decode(encode(c, s), n, s) == c


class TestLexFirstMatching:
    def test_projection(self):
        c = lex_first_matching(2, 0, truth_table(Circuit(2, (), 0)).bits)
        assert c == Circuit(2, (), 0)

    def test_all_wildcard_is_first(self):
        first = next(iter(enumerate_circuits(2, 2)))
        assert lex_first_matching(2, 2, (None,) * 4) == first

    def test_xor_not_found_at_2(self):
        assert lex_first_matching(2, 2, (0, 1, 1, 0)) is None

    def test_xor_found_at_4(self):
        c = lex_first_matching(2, 4, (0, 1, 1, 0))
        assert c is not None and truth_table(c).bits == (0, 1, 1, 0)
        assert c.size == XOR2_MIN_SIZE

    def test_wildcards(self):
        c = lex_first_matching(2, 1, (1, None, None, 0))
        assert c is not None
        t = truth_table(c)
        assert t.bits[0] == 1 and t.bits[3] == 0


class TestMinSize:
    def test_constants_are_size_0(self):
        assert min_size(TruthTable(2, (0, 0, 0, 0)), 2) == 0

    def test_and_is_size_1(self):
        assert min_size(TruthTable(2, (0, 0, 0, 1)), 2) == 1

    def test_xor_frozen(self):
        assert min_size(TruthTable(2, (0, 1, 1, 0)), 4) == XOR2_MIN_SIZE
        assert min_size(TruthTable(2, (0, 1, 1, 0)), 3) is None

    def test_min_size_at_most_size_across_class(self):
        for c in enumerate_circuits(2, 2):
            assert min_size(truth_table(c), c.size) <= c.size


class TestClassIndex:
    def test_counts_match_raw_enumeration(self):
        for n, s in [(1, 2), (2, 2)]:
            idx = class_index(n, s)
            raw: dict[int, int] = {}
            for c in enumerate_circuits(n, s):
                m = table_mask(c)
                raw[m] = raw.get(m, 0) + 1
            assert idx.table_counts() == raw
            assert idx.class_size() == sum(raw.values())

    def test_lex_first_matches_scan(self):
        idx = class_index(2, 2)
        for mask in idx.tables():
            spec = tuple((mask >> v) & 1 for v in range(4))
            assert idx.lex_first_for_mask(mask) == lex_first_matching(2, 2, spec)

    def test_min_size_matches_public_op(self):
        idx = class_index(2, 2)
        for mask in idx.tables():
            assert idx.min_size_for_mask(mask) == min_size(TruthTable.from_mask(2, mask), 2)


class TestMajority:
    def test_single_vote(self):
        c = majority_compose([AND2])
        assert truth_table(c).bits == truth_table(AND2).bits

    def test_unanimous(self):
        c = majority_compose([AND2, AND2, AND2])
        assert truth_table(c).bits == truth_table(AND2).bits

    def test_mixed_three(self):
        or2 = Circuit(2, (GateRecord(Op.OR, 0, 1),), 4)
        proj = Circuit(2, (), 0)
        c = majority_compose([AND2, or2, proj])
        assert truth_table(c).bits == (0, 0, 1, 1)

    def test_even_count_rejected(self):
        with pytest.raises(ArityError):
            majority_compose([AND2, AND2])

    def test_mixed_n_rejected(self):
        with pytest.raises(ArityError):
            majority_compose([AND2, Circuit(1, (), 0), AND2])

    def test_size_bound(self):
        rng = random.Random(7)
        for k in (1, 3, 5):
            cs = [random_circuit(rng, 2, rng.randint(0, 2)) for _ in range(k)]
            composed = majority_compose(cs)
            assert composed.size <= sum(c.size for c in cs) + majority_overhead(k)
            assert majority_overhead(k) <= 2 * k * ((k + 1) // 2)

    @settings(max_examples=60, deadline=None)
    @given(st.randoms(use_true_random=False), st.sampled_from([1, 3, 5]))
    def test_pointwise_majority_property(self, rnd, k):
        cs = [random_circuit(rnd, 2, rnd.randint(0, 2)) for _ in range(k)]
        got = truth_table(majority_compose(cs)).bits
        for v in range(4):
            votes = sum(truth_table(c).bits[v] for c in cs)
            assert got[v] == (1 if 2 * votes > k else 0)


class TestTextFormat:
    def test_roundtrip(self):
        for c in [AND2, XOR2, Circuit(2, (), 3), Circuit(3, (GateRecord(Op.NOT, 1, 0),), 5)]:
            assert circuit_from_text(circuit_to_text(c)) == c

    def test_known_shape(self):
        text = circuit_to_text(XOR2)
        assert text.splitlines() == [
            "inputs 2", "g1 AND x1 x2", "g2 OR x1 x2", "g3 NOT g1", "g4 AND g2 g3",
            "output g4"]

    def test_parse_errors(self):
        with pytest.raises(EncodingError):
            circuit_from_text("inputs 2\ng2 AND x1 x2\noutput g2\n")
        with pytest.raises(EncodingError):
            circuit_from_text("inputs 2\ng1 AND x1\noutput g1\n")


class TestHexTables:
    def test_and2(self):
        assert table_to_hex(TruthTable(2, (0, 0, 0, 1))) == "1"
        assert table_from_hex(2, "1").bits == (0, 0, 0, 1)

    def test_roundtrip_n3(self):
        for mask in (0, 0x96, 0xFF, 0x1, 0x80):
            t = TruthTable.from_mask(3, mask)
            assert table_from_hex(3, table_to_hex(t)) == t
