"""Sets of ordered state pairs backed by a single big-integer bitset.

A pair (i, j) over a fixed state ordering maps to bit index(i) * n + index(j).
All set algebra is integer bit twiddling, so membership is O(1) and the whole
relation occupies O(|X|^2) bits regardless of how full it is.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

from .errors import UsageError


class PairRelation:
    """Immutable set of ordered pairs over a fixed, sorted state universe."""

    __slots__ = ("states", "_index", "bits")

    def __init__(self, states: Sequence[str], bits: int = 0):
        self.states = tuple(states)
        self._index = {s: i for i, s in enumerate(self.states)}
        self.bits = bits

    @classmethod
    def from_pairs(cls, states, pairs):
        rel = cls(states)
        bits = 0
        n = len(rel.states)
        for a, b in pairs:
            try:
                bits |= 1 << (rel._index[a] * n + rel._index[b])
            except KeyError:
                raise UsageError("pair (%s, %s) outside the state universe" % (a, b)) from None
        return cls(rel.states, bits)

    @classmethod
    def diagonal(cls, states):
        rel = cls(states)
        n = len(rel.states)
        bits = 0
        for i in range(n):
            bits |= 1 << (i * n + i)
        return cls(rel.states, bits)

    @classmethod
    def full(cls, states):
        n = len(tuple(states))
        return cls(states, (1 << (n * n)) - 1)

    # -- queries -----------------------------------------------------------

    @property
    def n(self):
        return len(self.states)

    def __contains__(self, pair):
        a, b = pair
        ia = self._index.get(a)
        ib = self._index.get(b)
        if ia is None or ib is None:
            return False
        return bool(self.bits >> (ia * self.n + ib) & 1)

    def __len__(self):
        return self.bits.bit_count()

    def __bool__(self):
        return self.bits != 0

    def __eq__(self, other):
        if not isinstance(other, PairRelation):
            return NotImplemented
        return self.states == other.states and self.bits == other.bits

    def __hash__(self):
        return hash((self.states, self.bits))

    def __iter__(self):
        return iter(self.pairs())

    def pairs(self) -> list:
        """Sorted list of (state, state) pairs."""
        out = []
        n = self.n
        bits = self.bits
        while bits:
            low = bits & -bits
            idx = low.bit_length() - 1
            out.append((self.states[idx // n], self.states[idx % n]))
            bits ^= low
        return out

    def __repr__(self):
        return "PairRelation(%r)" % (self.pairs(),)

    # -- algebra -----------------------------------------------------------

    def _check(self, other):
        if self.states != other.states:
            raise UsageError("relations over different state universes")

    def __and__(self, other):
        self._check(other)
        return PairRelation(self.states, self.bits & other.bits)

    def __or__(self, other):
        self._check(other)
        return PairRelation(self.states, self.bits | other.bits)

    def __sub__(self, other):
        self._check(other)
        return PairRelation(self.states, self.bits & ~other.bits)

    def complement(self):
        n = self.n
        return PairRelation(self.states, ~self.bits & ((1 << (n * n)) - 1))

    def issubset(self, other):
        self._check(other)
        return self.bits & ~other.bits == 0

    def symmetric_closure(self):
        n = self.n
        bits = self.bits
        extra = 0
        while bits:
            low = bits & -bits
            idx = low.bit_length() - 1
            extra |= 1 << ((idx % n) * n + idx // n)
            bits ^= low
        return PairRelation(self.states, self.bits | extra)

    def is_symmetric(self):
        return self.bits == self.symmetric_closure().bits


def product_relation(states, left: Iterable[str], right: Iterable[str]) -> PairRelation:
    """The rectangle left x right as a PairRelation."""
    rel = PairRelation(states)
    n = rel.n
    row = 0
    for b in right:
        row |= 1 << rel._index[b]
    bits = 0
    for a in left:
        bits |= row << (rel._index[a] * n)
    return PairRelation(states, bits)


def same_block(states, omega: Iterable[str]) -> PairRelation:
    """(Omega x Omega) union (complement x complement): pairs on the same side."""
    om = set(omega)
    rest = [s for s in states if s not in om]
    inside = product_relation(states, om, om)
    outside = product_relation(states, rest, rest)
    return inside | outside


@dataclass(frozen=True)
class FixpointSeries:
    """Trace of a monotone pair-relation recursion in O(|X|^2) memory.

    Instead of storing one relation per step, we keep the first relation and a
    per-pair step annotation: for a growing series, the step at which each pair
    appeared; for a shrinking one, the step after which it disappeared.  Any
    intermediate relation is reconstructed on demand.
    """

    direction: str                  # "grow" or "shrink"
    first: PairRelation             # the k = 1 relation
    fixed_point: PairRelation
    convergence_step: int           # min k with R_k = fixed point
    change_step: dict               # pair bit-index -> step (added_at / removed_at)
    emptied_at: Optional[int] = None

    def at(self, k: int) -> PairRelation:
        """The relation at step k (clamped past convergence)."""
        if k < 1:
            raise UsageError("series steps start at 1")
        if k >= self.convergence_step:
            return self.fixed_point
        if self.direction == "grow":
            bits = self.first.bits
            for idx, step in self.change_step.items():
                if 1 < step <= k:
                    bits |= 1 << idx
        else:
            bits = self.first.bits
            for idx, step in self.change_step.items():
                if step <= k:
                    bits &= ~(1 << idx)
        return PairRelation(self.first.states, bits)

    def __iter__(self):
        for k in range(1, self.convergence_step + 1):
            yield self.at(k)
