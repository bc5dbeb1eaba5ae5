"""Pairwise-independent hashing and hash-based gap counting.

The gap decider distinguishes |S| <= (2/3)T from |S| >= (3/4)T.  A single
pairwise-independent hash cannot resolve a 9/8 ratio, so the set is first
amplified by a Cartesian power: membership of a c-tuple means membership of
every component, which raises the count to |S|^c and the ratio to (9/8)^c >= 4
for c = 12.  Zero-bucket occupancy of an affine hash over the tuple domain is
then computed exactly by per-block value distributions folded with XOR
convolution, and Chebyshev plus repetition-with-majority brings the failure
probability under the requested bound.

The hash output width j tracks log2 of the boundary count, so the exact
convolution is only affordable when the powered count is moderate; beyond the
state cap the decider raises SearchBudgetError rather than degrade silently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import ConfigError, SearchBudgetError

Membership = Callable[[tuple[int, ...]], bool]

EXHAUSTIVE_CAP_BITS = 22
STATE_CAP_BITS = 20

# smallest c with (9/8)^c >= 4
POWER = 12
assert Fraction(9, 8) ** POWER >= 4 > Fraction(9, 8) ** (POWER - 1)


@dataclass(frozen=True)
class AffineHash:
    """x -> Mx + b over GF(2), from m bits to j bits.

    rows[i] is the i-th matrix row as an m-bit integer; offset is a j-bit
    integer.  Drawing rows and offset uniformly gives a pairwise-independent
    family: for x != y the pair (h(x), h(y)) is uniform over j-bit pairs.
    """

    m: int
    j: int
    rows: tuple[int, ...]
    offset: int

    def apply_int(self, x: int) -> int:
        out = self.offset
        for i, row in enumerate(self.rows):
            if (row & x).bit_count() & 1:
                out ^= 1 << (self.j - 1 - i)
        return out

    def apply(self, bits: Sequence[int]) -> tuple[int, ...]:
        x = 0
        for b in bits:
            x = (x << 1) | (b & 1)
        v = self.apply_int(x)
        return tuple((v >> (self.j - 1 - i)) & 1 for i in range(self.j))


class Verdict(Enum):
    LOW = "LOW"
    HIGH = "HIGH"


@dataclass(frozen=True)
class GapVerdict:
    verdict: Verdict
    trials: int
    confidence: Fraction


def sample_hash(m: int, j: int, rng: random.Random) -> AffineHash:
    """Uniform draw from the affine family on m-bit inputs, j-bit outputs."""
    if not 1 <= j <= m:
        raise ConfigError(f"need 1 <= j <= m, got j={j}, m={m}")
    rows = tuple(rng.getrandbits(m) for _ in range(j))
    return AffineHash(m, j, rows, rng.getrandbits(j))


def all_hashes(m: int, j: int):
    """The full affine family, for exact pairwise-independence checks."""
    for packed in range(1 << (j * m)):
        rows = tuple((packed >> (i * m)) & ((1 << m) - 1) for i in range(j))
        for offset in range(1 << j):
            yield AffineHash(m, j, rows, offset)


def _int_to_bits(v: int, width: int) -> tuple[int, ...]:
    return tuple((v >> (width - 1 - k)) & 1 for k in range(width))


def exact_count(membership: Membership, m: int) -> int:
    """|{w in {0,1}^m : membership(w)}| by complete enumeration."""
    if m > EXHAUSTIVE_CAP_BITS:
        raise SearchBudgetError(f"m={m} exceeds exhaustive cap {EXHAUSTIVE_CAP_BITS}")
    return sum(1 for v in range(1 << m) if membership(_int_to_bits(v, m)))


def tuple_membership(membership: Membership, m: int, c: int) -> Membership:
    """Membership on {0,1}^(c*m): every m-bit block must be a member.

    The exact count of this predicate is (exact count of membership)^c, which
    is the amplification the gap decider relies on.
    """

    def pred(bits: tuple[int, ...]) -> bool:
        if len(bits) != c * m:
            return False
        return all(membership(bits[i * m:(i + 1) * m]) for i in range(c))

    return pred


def _zero_bucket_count(members: Sequence[int], m: int, c: int, j: int,
                       rng: random.Random) -> int:
    """Exact #{(w_1..w_c) in S^c : h(w_1..w_c) = 0} for a fresh affine h.

    h is a uniform affine map on the c*m-bit tuple domain.  Each block
    contributes an XOR of matrix columns selected by its member's bits, so the
    zero-bucket count is the XOR-convolution of c per-block value
    distributions, evaluated at the offset.
    """
    cols = [rng.getrandbits(j) for _ in range(c * m)]
    offset = rng.getrandbits(j)
    conv: dict[int, int] = {0: 1}
    for block in range(c):
        dist: dict[int, int] = {}
        base = block * m
        for w in members:
            v = 0
            for t in range(m):
                if (w >> (m - 1 - t)) & 1:
                    v ^= cols[base + t]
            dist[v] = dist.get(v, 0) + 1
        nxt: dict[int, int] = {}
        for u, cu in conv.items():
            for v, cv in dist.items():
                key = u ^ v
                nxt[key] = nxt.get(key, 0) + cu * cv
        conv = nxt
        if not conv:
            return 0
    return conv.get(offset, 0)


def gap_decide(membership: Membership, m: int, T: int, delta: Fraction,
               rng: random.Random, *, hash_draws: int = 64,
               reps: int = 5) -> GapVerdict:
    """Decide LOW (true count <= 2T/3) vs HIGH (>= 3T/4) under that promise.

    Each repetition averages zero-bucket counts over `hash_draws` independent
    hashes on the 12th Cartesian power and compares the average against the
    geometric midpoint of the powered boundaries; the verdict is the majority
    over `reps` repetitions.  The defaults keep the per-repetition Chebyshev
    failure bound a small constant, so majority-of-5 is far below delta=1/10;
    pass larger values for tighter delta.  Never checks the promise.
    """
    if T < 1:
        raise ConfigError(f"threshold must be positive, got {T}")
    if not 0 < delta < 1:
        raise ConfigError(f"delta must be in (0,1), got {delta}")
    if reps % 2 == 0:
        raise ConfigError("reps must be odd for majority voting")
    if m > EXHAUSTIVE_CAP_BITS:
        raise SearchBudgetError(f"m={m} exceeds exhaustive cap {EXHAUSTIVE_CAP_BITS}")

    low_boundary = Fraction(2 * T, 3) ** POWER
    high_boundary = Fraction(3 * T, 4) ** POWER
    # aim the expected zero-bucket occupancy near 40 at the LOW boundary
    j = 1
    while (1 << (j + 1)) * 40 <= low_boundary:
        j += 1
    if j > STATE_CAP_BITS:
        raise SearchBudgetError(
            f"hash width {j} exceeds state cap {STATE_CAP_BITS}; "
            f"threshold {T} is too large for exact tuple-domain counting")
    j = min(j, POWER * m)

    members = [v for v in range(1 << m) if membership(_int_to_bits(v, m))]

    mid_sq = low_boundary * high_boundary  # (geometric midpoint)^2
    high_votes = 0
    for _ in range(reps):
        total = sum(_zero_bucket_count(members, m, POWER, j, rng)
                    for _ in range(hash_draws))
        estimate = Fraction(total, hash_draws) * (1 << j)
        if estimate * estimate >= mid_sq:
            high_votes += 1
    verdict = Verdict.HIGH if 2 * high_votes > reps else Verdict.LOW
    return GapVerdict(verdict, trials=reps * hash_draws, confidence=1 - delta)
