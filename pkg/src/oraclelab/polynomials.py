"""Sparse multilinear polynomials with integer coefficients.

Variables are arbitrary hashable keys; a term maps a nonempty variable set to
its coefficient.  On 0/1 assignments a term contributes its coefficient
exactly when all of its variables are 1, so evaluation takes a set of true
variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import AbstractSet, Hashable, Iterable, Mapping

Var = Hashable


@dataclass(frozen=True)
class Multilinear:
    constant: int
    terms: Mapping[frozenset, int] = field(default_factory=dict)

    @classmethod
    def build(cls, constant: int, raw_terms: Iterable[tuple[int, Iterable[Var]]]) -> "Multilinear":
        acc: dict[frozenset, int] = {}
        const = constant
        for coeff, vars_ in raw_terms:
            key = frozenset(vars_)
            if not key:
                const += coeff
                continue
            acc[key] = acc.get(key, 0) + coeff
        return cls(const, {k: v for k, v in acc.items() if v})

    def evaluate(self, true_vars: AbstractSet[Var]) -> int:
        total = self.constant
        for vars_, coeff in self.terms.items():
            if vars_ <= true_vars:
                total += coeff
        return total

    @property
    def degree(self) -> int:
        return max((len(v) for v in self.terms), default=0)

    @property
    def support(self) -> frozenset:
        out: set[Var] = set()
        for vars_ in self.terms:
            out |= vars_
        return frozenset(out)

    def magnitude_bound(self) -> int:
        """L1 bound: |p(X)| never exceeds this on 0/1 assignments."""
        return abs(self.constant) + sum(abs(c) for c in self.terms.values())

    def always_odd(self) -> bool:
        """Whether p(X) is odd on every 0/1 assignment.

        Over GF(2) the multilinear representation of X -> p(X) mod 2 is
        unique, so p is identically odd iff its constant is odd and every
        other coefficient is even.
        """
        return self.constant % 2 == 1 and all(c % 2 == 0 for c in self.terms.values())


def oddmaxbit_poly(cells: list[Var]) -> Multilinear:
    """The odd-max-bit threshold polynomial over an ordered cell block.

    p(u) = 1 + 2 * sum_i s_i * [u_i = 1 and u_j = 0 for all j > i], with
    s_i = +1 for odd i and -1 for even i (1-based).  Takes value 3 when the
    highest set cell has odd index, -1 when even, and 1 on the all-zero block
    (accept by default).  Always odd, so it is a valid threshold machine.
    """
    terms: list[tuple[int, list[Var]]] = []
    b = len(cells)
    for i in range(1, b + 1):
        sign = 1 if i % 2 == 1 else -1
        tail = cells[i:]
        # expand u_i * prod_{j>i} (1 - u_j) over subsets of the tail
        for subset_mask in range(1 << len(tail)):
            chosen = [tail[t] for t in range(len(tail)) if (subset_mask >> t) & 1]
            coeff = 2 * sign * ((-1) ** len(chosen))
            terms.append((coeff, [cells[i - 1]] + chosen))
    return Multilinear.build(1, terms)
