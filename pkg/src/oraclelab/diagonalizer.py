"""Iterative majority-halving: a language every circuit in a class gets wrong.

The class is the set of distinct Boolean functions realized by circuits of
size <= s on n inputs.  Walking the first N inputs in lexicographic order and
always answering against the (weak) majority of the surviving functions kills
at least half of them per step; N = ceil(log2 |class|) + 1 steps leave the
class empty, so every circuit errs on one of the first N inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuits import class_index, enumerate_circuits, eval_circuit
from .errors import GeometryError, InstanceError


@dataclass(frozen=True)
class HardLanguage:
    n: int
    s: int
    bits: tuple[int, ...]               # L(x_1) .. L(x_N), inputs in lex order
    survivor_counts: tuple[int, ...]    # |C_0| .. |C_N|

    @property
    def N(self) -> int:
        return len(self.bits)


def _halve(masks: list[int], n: int, steps: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    bits: list[int] = []
    counts = [len(masks)]
    alive = list(masks)
    for t in range(steps):
        accepting = sum(1 for m in alive if (m >> t) & 1)
        # "at least half accept" puts x_t outside the language (ties included)
        bit = 0 if 2 * accepting >= len(alive) else 1
        bits.append(bit)
        alive = [m for m in alive if (m >> t) & 1 == bit]
        if len(alive) > counts[-1] // 2:
            raise InstanceError("halving failed; majority rule broken")
        counts.append(len(alive))
    return tuple(bits), tuple(counts)


def build_hard_language(n: int, s: int) -> HardLanguage:
    """Diagonalize against the distinct functions of the (n, s) circuit class."""
    masks = class_index(n, s).tables(s)
    if not masks:
        raise InstanceError("empty circuit class")
    N = max(len(masks) - 1, 0).bit_length() + 1  # ceil(log2 |class|) + 1
    if N > 1 << n:
        raise GeometryError(
            f"need N={N} inputs but only {1 << n} exist; class too large")
    bits, counts = _halve(masks, n, N)
    if counts[-1] != 0:
        raise InstanceError("class not empty after N steps")
    return HardLanguage(n, s, bits, counts)


def verify_hardness(h: HardLanguage) -> int:
    """1 iff every circuit of size <= s errs on some x_t with t <= N.

    Checked against the circuits themselves (direct evaluation), independent
    of the table bookkeeping the builder used.
    """
    for c in enumerate_circuits(h.n, h.s):
        for t, bit in enumerate(h.bits):
            x = tuple((t >> (h.n - 1 - k)) & 1 for k in range(h.n))
            if eval_circuit(c, x) != bit:
                break
        else:
            return 0
    return 1


def language_errs_every_table(bits: tuple[int, ...], masks: list[int]) -> bool:
    """Naive checker used as the differential oracle in tests."""
    for m in masks:
        if all((m >> t) & 1 == bit for t, bit in enumerate(bits)):
            return False
    return True
