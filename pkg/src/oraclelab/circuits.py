"""Boolean circuits over {AND, OR, NOT} with a canonical fixed-length bit encoding.

Wire numbering for a circuit with n inputs and s gates:

    0 .. n-1      inputs x1 .. xn
    n             constant 0
    n+1           constant 1
    n+2 .. n+1+s  gate outputs g1 .. gs

Every gate input references a strictly earlier wire, so evaluation is a single
forward pass.  The canonical encoding is a fixed-length bit string

    [size : w bits] [gate 1 : 2+2w bits] ... [gate s_max : 2+2w bits] [output : w bits]

with w = ceil(log2(n + 2 + s_max + 1)) and absent gate records all-zero.  The
total order on circuits is unsigned big-endian comparison of encodings; the
leading size field makes smaller circuits sort first, so the lexicographically
first circuit matching a truth table is also a minimum-size one.

Truth tables are indexed by the integer value of the input string x1..xn
(x1 most significant), so AND(x1,x2) has table (0,0,0,1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from .errors import ArityError, EncodingError, WellFormednessError

OPCODE_BITS = 2


class Op(IntEnum):
    AND = 0
    OR = 1
    NOT = 2


@dataclass(frozen=True)
class GateRecord:
    opcode: Op
    in1: int
    in2: int


@dataclass(frozen=True)
class Circuit:
    """An immutable gate list; use validate() to check well-formedness."""

    n: int
    gates: tuple[GateRecord, ...]
    output: int

    @property
    def size(self) -> int:
        return len(self.gates)

    def validate(self) -> None:
        if self.n < 1:
            raise WellFormednessError(f"need at least one input, got n={self.n}")
        for j, g in enumerate(self.gates):
            limit = self.n + 2 + j
            if g.opcode not in (Op.AND, Op.OR, Op.NOT):
                raise WellFormednessError(f"gate {j + 1}: bad opcode {g.opcode!r}")
            if not (0 <= g.in1 < limit):
                raise WellFormednessError(f"gate {j + 1}: in1={g.in1} out of range")
            if g.opcode is Op.NOT:
                if g.in2 != 0:
                    raise WellFormednessError(f"gate {j + 1}: NOT gate must carry in2=0")
            elif not (0 <= g.in2 < limit):
                raise WellFormednessError(f"gate {j + 1}: in2={g.in2} out of range")
        if not (0 <= self.output < self.n + 2 + self.size):
            raise WellFormednessError(f"output wire {self.output} out of range")


@dataclass(frozen=True)
class TruthTable:
    """2^n output bits, bits[v] = f(x) where v = int(x1..xn as binary)."""

    n: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != 1 << self.n:
            raise ArityError(f"table for n={self.n} needs {1 << self.n} bits, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ArityError("table bits must be 0/1")

    @property
    def mask(self) -> int:
        """The table packed as an integer, bit v = bits[v]."""
        m = 0
        for v, b in enumerate(self.bits):
            m |= b << v
        return m

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "TruthTable":
        return cls(n, tuple((mask >> v) & 1 for v in range(1 << n)))


# ---------------------------------------------------------------------------
# Evaluation


def eval_circuit(c: Circuit, x: Sequence[int]) -> int:
    """Evaluate c on one input, gate by gate."""
    c.validate()
    if len(x) != c.n:
        raise ArityError(f"input length {len(x)} != n={c.n}")
    wires = list(x) + [0, 1]
    for g in c.gates:
        if g.opcode is Op.AND:
            wires.append(wires[g.in1] & wires[g.in2])
        elif g.opcode is Op.OR:
            wires.append(wires[g.in1] | wires[g.in2])
        else:
            wires.append(1 - wires[g.in1])
    return wires[c.output]


def _leaf_masks(n: int) -> list[int]:
    """Bit-parallel truth tables of the n+2 leaf wires."""
    full = (1 << (1 << n)) - 1
    masks = []
    for i in range(1, n + 1):
        m = 0
        for v in range(1 << n):
            if (v >> (n - i)) & 1:
                m |= 1 << v
        masks.append(m)
    masks.append(0)
    masks.append(full)
    return masks


def table_mask(c: Circuit) -> int:
    """Truth table of c as an integer mask (bit-parallel evaluation)."""
    c.validate()
    full = (1 << (1 << c.n)) - 1
    masks = _leaf_masks(c.n)
    for g in c.gates:
        if g.opcode is Op.AND:
            masks.append(masks[g.in1] & masks[g.in2])
        elif g.opcode is Op.OR:
            masks.append(masks[g.in1] | masks[g.in2])
        else:
            masks.append(full ^ masks[g.in1])
    return masks[c.output]


def truth_table(c: Circuit) -> TruthTable:
    """Full truth table of c, bits indexed by input in lexicographic order."""
    return TruthTable.from_mask(c.n, table_mask(c))


# ---------------------------------------------------------------------------
# Canonical encoding


def field_width(n: int, s_max: int) -> int:
    return (n + 2 + s_max).bit_length()  # == ceil(log2(n + 2 + s_max + 1))


def encoding_length(n: int, s_max: int) -> int:
    w = field_width(n, s_max)
    return w + s_max * (OPCODE_BITS + 2 * w) + w


def encode(c: Circuit, s_max: int) -> tuple[int, ...]:
    """Fixed-length canonical encoding of c within the (n, s_max) class."""
    c.validate()
    if c.size > s_max:
        raise EncodingError(f"circuit size {c.size} exceeds s_max={s_max}")
    w = field_width(c.n, s_max)
    bits: list[int] = []

    def emit(value: int, width: int) -> None:
        for k in range(width - 1, -1, -1):
            bits.append((value >> k) & 1)

    emit(c.size, w)
    for g in c.gates:
        emit(int(g.opcode), OPCODE_BITS)
        emit(g.in1, w)
        emit(g.in2, w)
    for _ in range(s_max - c.size):
        emit(0, OPCODE_BITS + 2 * w)
    emit(c.output, w)
    return tuple(bits)


def decode(bits: Sequence[int], n: int, s_max: int) -> Circuit:
    """Inverse of encode; raises EncodingError on any ill-formed string."""
    if len(bits) != encoding_length(n, s_max):
        raise EncodingError(f"expected {encoding_length(n, s_max)} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise EncodingError("encoding must be 0/1 bits")
    w = field_width(n, s_max)
    pos = 0

    def take(width: int) -> int:
        nonlocal pos
        v = 0
        for _ in range(width):
            v = (v << 1) | bits[pos]
            pos += 1
        return v

    size = take(w)
    if size > s_max:
        raise EncodingError(f"size field {size} exceeds s_max={s_max}")
    gates = []
    for j in range(s_max):
        op = take(OPCODE_BITS)
        a = take(w)
        b = take(w)
        if j < size:
            if op > 2:
                raise EncodingError(f"gate {j + 1}: bad opcode {op}")
            gates.append(GateRecord(Op(op), a, b))
        elif op or a or b:
            raise EncodingError(f"padding record {j + 1} not all-zero")
    output = take(w)
    c = Circuit(n, tuple(gates), output)
    try:
        c.validate()
    except WellFormednessError as exc:
        raise EncodingError(str(exc)) from exc
    return c


def encoding_key(c: Circuit, s_max: int) -> int:
    """Encoding as an unsigned integer; the canonical total order."""
    key = 0
    for b in encode(c, s_max):
        key = (key << 1) | b
    return key


# ---------------------------------------------------------------------------
# Enumeration

# Raw gates are (op, in1, in2) int triples; Circuit objects are built only
# where callers need them, since the class at (n=3, s_max=3) has ~3.6M members.


def _gate_options(wire_count: int) -> list[tuple[int, int, int]]:
    """All valid raw gates over the first wire_count wires, in encoding order."""
    opts = []
    for a in range(wire_count):
        for b in range(wire_count):
            opts.append((0, a, b))
    for a in range(wire_count):
        for b in range(wire_count):
            opts.append((1, a, b))
    for a in range(wire_count):
        opts.append((2, a, 0))
    return opts


def _raw_to_circuit(n: int, raw_gates: Sequence[tuple[int, int, int]], output: int) -> Circuit:
    return Circuit(n, tuple(GateRecord(Op(op), a, b) for op, a, b in raw_gates), output)


def enumerate_circuits(n: int, s_max: int) -> Iterator[Circuit]:
    """Yield every well-formed circuit of size <= s_max, in canonical order."""
    if n < 1 or s_max < 0:
        raise ArityError("need n >= 1 and s_max >= 0")
    opts = [_gate_options(n + 2 + d) for d in range(s_max)]
    gates: list[tuple[int, int, int]] = []

    def walk(depth: int, target: int) -> Iterator[Circuit]:
        if depth == target:
            for out in range(n + 2 + target):
                yield _raw_to_circuit(n, gates, out)
            return
        for g in opts[depth]:
            gates.append(g)
            yield from walk(depth + 1, target)
            gates.pop()

    for size in range(s_max + 1):
        yield from walk(0, size)


MatchSpec = Sequence[Optional[int]]


def lex_first_matching(n: int, s_max: int, spec: MatchSpec) -> Optional[Circuit]:
    """First circuit in enumeration order whose table matches spec.

    spec has one entry per input in lexicographic order: 0, 1, or None for
    "don't care".  Returns None if no circuit of size <= s_max matches.
    """
    if len(spec) != 1 << n:
        raise ArityError(f"spec length {len(spec)} != 2^{n}")
    care = 0
    want = 0
    for v, b in enumerate(spec):
        if b is not None:
            care |= 1 << v
            want |= (b & 1) << v
    full = (1 << (1 << n)) - 1
    leaf = _leaf_masks(n)
    opts = [_gate_options(n + 2 + d) for d in range(s_max)]
    gates: list[tuple[int, int, int]] = []
    masks = list(leaf)

    def walk(depth: int, target: int) -> Optional[Circuit]:
        if depth == target:
            for out in range(n + 2 + target):
                if masks[out] & care == want:
                    return _raw_to_circuit(n, gates, out)
            return None
        for g in opts[depth]:
            op, a, b = g
            if op == 0:
                m = masks[a] & masks[b]
            elif op == 1:
                m = masks[a] | masks[b]
            else:
                m = full ^ masks[a]
            gates.append(g)
            masks.append(m)
            found = walk(depth + 1, target)
            masks.pop()
            gates.pop()
            if found is not None:
                return found
        return None

    for size in range(s_max + 1):
        found = walk(0, size)
        if found is not None:
            return found
    return None


def min_size(f: TruthTable, s_cap: int) -> Optional[int]:
    """Least size of a circuit computing f, or None if above s_cap."""
    c = lex_first_matching(f.n, s_cap, f.bits)
    return None if c is None else c.size


# ---------------------------------------------------------------------------
# Class index: per-size truth-table statistics of the enumerated class.

# The learner and diagonalizer need survivor counts and lex-first witnesses
# over classes of up to a few million circuits; grouping circuits by truth
# table (at most 2^(2^n) masks) makes every later query cheap.  This is the
# same enumeration as enumerate_circuits, inlined for speed.


class ClassIndex:
    """Truth-table histogram and lex-first witnesses for a circuit class.

    Counts come from a DP over wire-mask tuples: gate lists sharing the same
    per-wire truth tables are interchangeable for counting, so the state space
    stays tiny while the counts remain those of the full enumeration.
    Lex-first witnesses are recovered lazily by an early-exit enumeration scan
    bounded at the table's minimum size.
    """

    def __init__(self, n: int, s_max: int):
        self.n = n
        self.s_max = s_max
        self.counts_by_size: list[dict[int, int]] = []
        self._lex_memo: dict[tuple[int, int], Optional[Circuit]] = {}
        self._build()

    def _build(self) -> None:
        n, s_max = self.n, self.s_max
        full = (1 << (1 << n)) - 1
        opts = [_gate_options(n + 2 + d) for d in range(s_max)]
        level: dict[tuple[int, ...], int] = {tuple(_leaf_masks(n)): 1}
        for size in range(s_max + 1):
            counts: dict[int, int] = {}
            for state, cnt in level.items():
                for m in state:
                    counts[m] = counts.get(m, 0) + cnt
            self.counts_by_size.append(counts)
            if size == s_max:
                break
            nxt: dict[tuple[int, ...], int] = {}
            for state, cnt in level.items():
                for op, a, b in opts[size]:
                    if op == 0:
                        mm = state[a] & state[b]
                    elif op == 1:
                        mm = state[a] | state[b]
                    else:
                        mm = full ^ state[a]
                    key = state + (mm,)
                    nxt[key] = nxt.get(key, 0) + cnt
            level = nxt

    # -- queries ----------------------------------------------------------

    def class_size(self, s: Optional[int] = None) -> int:
        """Number of circuits of size <= s in the class."""
        s = self.s_max if s is None else s
        return sum(sum(c.values()) for c in self.counts_by_size[: s + 1])

    def table_counts(self, s: Optional[int] = None) -> dict[int, int]:
        """Mask -> number of circuits of size <= s computing it."""
        s = self.s_max if s is None else s
        agg: dict[int, int] = {}
        for counts in self.counts_by_size[: s + 1]:
            for m, c in counts.items():
                agg[m] = agg.get(m, 0) + c
        return agg

    def tables(self, s: Optional[int] = None) -> list[int]:
        """Sorted list of distinct truth-table masks realized at size <= s."""
        return sorted(self.table_counts(s))

    def min_size_for_mask(self, mask: int, s: Optional[int] = None) -> Optional[int]:
        s = self.s_max if s is None else s
        for size in range(s + 1):
            if mask in self.counts_by_size[size]:
                return size
        return None

    def lex_first_for_mask(self, mask: int, s: Optional[int] = None) -> Optional[Circuit]:
        """Lex-first circuit of size <= s with the given table, or None."""
        s = self.s_max if s is None else s
        smallest = self.min_size_for_mask(mask, s)
        if smallest is None:
            return None
        key = (mask, smallest)
        if key not in self._lex_memo:
            spec = tuple((mask >> v) & 1 for v in range(1 << self.n))
            self._lex_memo[key] = lex_first_matching(self.n, smallest, spec)
        return self._lex_memo[key]


@lru_cache(maxsize=8)
def class_index(n: int, s_max: int) -> ClassIndex:
    return ClassIndex(n, s_max)


# ---------------------------------------------------------------------------
# Majority composition


def majority_overhead(k: int) -> int:
    """Gates the majority gadget adds on top of the spliced voters.

    Computed from the gadget itself (votes replaced by size-0 projectors);
    bounded by 2 * k * ceil(k/2).
    """
    if k < 1 or k % 2 == 0:
        raise ArityError(f"majority arity must be odd and positive, got {k}")
    probe = Circuit(1, (), 0)
    return majority_compose([probe] * k).size


def majority_compose(cs: Sequence[Circuit]) -> Circuit:
    """Circuit computing the pointwise majority of an odd list of circuits."""
    if len(cs) % 2 == 0:
        raise ArityError(f"majority needs an odd number of circuits, got {len(cs)}")
    ns = {c.n for c in cs}
    if len(ns) != 1:
        raise ArityError(f"majority needs a single input count, got {sorted(ns)}")
    n = ns.pop()
    for c in cs:
        c.validate()

    gates: list[GateRecord] = []

    def add(op: Op, a: int, b: int = 0) -> int:
        gates.append(GateRecord(op, a, b))
        return n + 1 + len(gates)

    # splice each voter's gates, remapping wires past the shared leaves
    vote_wires = []
    for c in cs:
        offset = len(gates)

        def remap(wire: int, off: int = offset, src: Circuit = c) -> int:
            return wire if wire < src.n + 2 else wire + off

        for g in c.gates:
            gates.append(GateRecord(g.opcode, remap(g.in1), remap(g.in2) if g.opcode is not Op.NOT else 0))
        vote_wires.append(remap(c.output))

    k = len(cs)
    if k == 1:
        return Circuit(n, tuple(gates), vote_wires[0])

    # threshold DP: th[t] = wire computing [>= t of the first j votes], with
    # th[0] = const 1; recurrence th'[t] = (vote_j AND th[t-1]) OR th[t]
    t_goal = (k + 1) // 2
    const0, const1 = n, n + 1
    th: list[int] = [const1] + [const0] * t_goal
    for j, v in enumerate(vote_wires, start=1):
        new = list(th)
        for t in range(min(j, t_goal), 0, -1):
            carry = add(Op.AND, v, th[t - 1]) if th[t - 1] != const1 else v
            if th[t] == const0:
                new[t] = carry
            else:
                new[t] = add(Op.OR, carry, th[t])
        th = new
    return Circuit(n, tuple(gates), th[t_goal])


# ---------------------------------------------------------------------------
# Text format

# inputs <n>
# g<i> <AND|OR|NOT> <wire> [<wire>]
# output <wire>
# with wires named x1..xn, c0, c1, g1..gs.


def _wire_name(n: int, wire: int) -> str:
    if wire < n:
        return f"x{wire + 1}"
    if wire == n:
        return "c0"
    if wire == n + 1:
        return "c1"
    return f"g{wire - n - 1}"


def _wire_index(n: int, name: str) -> int:
    if name == "c0":
        return n
    if name == "c1":
        return n + 1
    if name.startswith("x"):
        i = int(name[1:])
        if not 1 <= i <= n:
            raise EncodingError(f"input {name} out of range for n={n}")
        return i - 1
    if name.startswith("g"):
        return n + 1 + int(name[1:])
    raise EncodingError(f"bad wire name {name!r}")


def circuit_to_text(c: Circuit) -> str:
    c.validate()
    lines = [f"inputs {c.n}"]
    for j, g in enumerate(c.gates, start=1):
        if g.opcode is Op.NOT:
            lines.append(f"g{j} NOT {_wire_name(c.n, g.in1)}")
        else:
            lines.append(f"g{j} {g.opcode.name} {_wire_name(c.n, g.in1)} {_wire_name(c.n, g.in2)}")
    lines.append(f"output {_wire_name(c.n, c.output)}")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("inputs "):
        raise EncodingError("first line must be 'inputs <n>'")
    n = int(lines[0].split()[1])
    gates: list[GateRecord] = []
    output: Optional[int] = None
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "output":
            output = _wire_index(n, parts[1])
            continue
        if output is not None:
            raise EncodingError("gate line after output line")
        expected = f"g{len(gates) + 1}"
        if parts[0] != expected:
            raise EncodingError(f"expected {expected}, got {parts[0]}")
        op = Op[parts[1]]
        if op is Op.NOT:
            if len(parts) != 3:
                raise EncodingError(f"NOT takes one wire: {ln!r}")
            gates.append(GateRecord(op, _wire_index(n, parts[2]), 0))
        else:
            if len(parts) != 4:
                raise EncodingError(f"{op.name} takes two wires: {ln!r}")
            gates.append(GateRecord(op, _wire_index(n, parts[2]), _wire_index(n, parts[3])))
    if output is None:
        raise EncodingError("missing output line")
    c = Circuit(n, tuple(gates), output)
    c.validate()
    return c


def table_from_hex(n: int, hex_digits: str) -> TruthTable:
    """Truth table from hex, bits[0] the most significant bit of the value."""
    width = 1 << n
    value = int(hex_digits, 16)
    if value >= 1 << width:
        raise EncodingError(f"hex table {hex_digits!r} too wide for n={n}")
    bits = tuple((value >> (width - 1 - v)) & 1 for v in range(width))
    return TruthTable(n, bits)


def table_to_hex(t: TruthTable) -> str:
    width = 1 << t.n
    value = 0
    for b in t.bits:
        value = (value << 1) | b
    return format(value, f"0{max(1, (width + 3) // 4)}x")
