"""Cyclic rotations on {1, ..., q} with a marked subset: exact hit statistics.

The dynamics is fixed: x -> x + 1 for x < q, q -> 1, with the uniform measure.
Every statistic here derives from the multiset of cyclic gaps between
consecutive marked residues.  A gap of length g contributes exactly one point
with hitting time k for each k = 1..g, so

    #(points with hitting time k) = #(gaps >= k),

which is also why the k-th jump of the hitting CDF equals the measure of the
marked points whose return time is at least k.  Working from the gap multiset
keeps the cost O(|marked| log |marked|) instead of O(q), so towers with
q ~ 2^23 stay cheap.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .curves import StepCDF
from .errors import InvariantError


@dataclass(frozen=True)
class CyclicSystem:
    """A q-cycle with nonempty marked subset (1-based residues, kept sorted)."""

    q: int
    marked: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or self.q < 1:
            raise InvariantError(f"q must be a positive integer, got {self.q!r}")
        if not self.marked:
            raise InvariantError("marked set must be nonempty (empty sets never recur)")
        ordered = tuple(sorted(self.marked))
        if any(not isinstance(x, int) for x in ordered):
            raise InvariantError("marked residues must be integers")
        if ordered[0] < 1 or ordered[-1] > self.q:
            bad = ordered[0] if ordered[0] < 1 else ordered[-1]
            raise InvariantError(f"residue {bad} outside 1..{self.q}")
        for a, b in zip(ordered, ordered[1:]):
            if a == b:
                raise InvariantError(f"duplicate residue {a}")
        object.__setattr__(self, "marked", ordered)

    @property
    def measure(self) -> Fraction:
        """mu(U) = |marked| / q."""
        return Fraction(len(self.marked), self.q)


def make_cyclic(q: int, marked: Iterable[int]) -> CyclicSystem:
    return CyclicSystem(q, tuple(marked))


def gap_counts(sys: CyclicSystem) -> dict[int, int]:
    """Multiset of forward gaps from each marked residue to the next (cyclically).

    Gaps sum to q; the gap at a marked point is its return time.
    """
    m = sys.marked
    gaps = Counter(b - a for a, b in zip(m, m[1:]))
    gaps[m[0] + sys.q - m[-1]] += 1
    return dict(gaps)


def hitting_times(sys: CyclicSystem) -> dict[int, int]:
    """Histogram k -> #(points with first entry time k); counts sum to q."""
    gaps = gap_counts(sys)
    max_gap = max(gaps)
    hist: dict[int, int] = {}
    tail = 0
    for k in range(max_gap, 0, -1):
        tail += gaps.get(k, 0)
        hist[k] = tail
    return dict(sorted(hist.items()))


def hitting_cdf(sys: CyclicSystem) -> StepCDF:
    """CDF of mu(U) * (hitting time) under the uniform measure; total mass 1."""
    mu = sys.measure
    hist = hitting_times(sys)
    jumps = tuple((k * mu, Fraction(c, sys.q)) for k, c in hist.items())
    cdf = StepCDF(jumps)
    assert cdf.total_mass == 1
    return cdf


def return_cdf(sys: CyclicSystem) -> StepCDF:
    """CDF of mu(U) * (return time) over the marked points; total mass 1."""
    mu = sys.measure
    p = len(sys.marked)
    jumps = tuple(
        (g * mu, Fraction(c, p)) for g, c in sorted(gap_counts(sys).items())
    )
    cdf = StepCDF(jumps)
    assert cdf.total_mass == 1
    return cdf


def kac_expectation(sys: CyclicSystem) -> Fraction:
    """E(mu(U) tau_U) under the induced measure on U; always exactly 1."""
    total = sum(g * c for g, c in gap_counts(sys).items())
    return Fraction(total, sys.q)


@dataclass(frozen=True)
class KacTown:
    """Juxtaposed skyscrapers over the marked set, one per distinct return time.

    Each skyscraper is (height, base width); the union of all floors has
    measure exactly 1.
    """

    skyscrapers: tuple[tuple[int, Fraction], ...]
    ground_mass: Fraction

    def __post_init__(self) -> None:
        floors = sum(h * w for h, w in self.skyscrapers)
        if floors != 1:
            raise InvariantError(f"total floor measure {floors} != 1")
        if sum(w for _, w in self.skyscrapers) != self.ground_mass:
            raise InvariantError("ground mass must equal the sum of base widths")


def kac_town(sys: CyclicSystem) -> KacTown:
    towers = tuple(
        (g, Fraction(c, sys.q)) for g, c in sorted(gap_counts(sys).items())
    )
    return KacTown(towers, sys.measure)


def shift_system(sys: CyclicSystem, c: int) -> CyclicSystem:
    """Conjugate system with every marked residue shifted by c (mod q)."""
    return CyclicSystem(sys.q, tuple((x - 1 + c) % sys.q + 1 for x in sys.marked))
