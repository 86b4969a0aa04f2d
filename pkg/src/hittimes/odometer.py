"""Tower stamping on the dyadic odometer and the full realization pipeline.

The binary odometer (add one with carry) maps each m-cylinder onto the next
one: on cylinder indices it acts as +1 mod 2^m.  Its height-2^m towers are
therefore exact (no residual error), and hitting statistics of any union of
m-cylinders are computed exactly in the cyclic factor Z/2^m.  Stamping
r = floor(2^m / q) consecutive height-q blocks with a height-q stamp marks
r*p cylinders; the 2^m mod q topmost levels stay unmarked, and they are the
only source of discrepancy between the tower's hitting CDF and the staircase
law the stamp encodes.

`realize` chains everything: admissible target -> staircase law (per stage
tolerance) -> stamp -> tower -> exact hitting CDF, recording the exact Levy
distance to the target at every stage.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .conditions import RationalF
from .curves import StepCDF, TargetF, levy_distance
from .cyclic import CyclicSystem, hitting_cdf
from .errors import InvariantError
from .rationalize import rationalize_target
from .stamps import StampParams, derive_params, make_stamp


@dataclass(frozen=True)
class TowerStamping:
    """Layout of a stamped height-2^m tower: r full blocks plus leftovers."""

    m: int
    params: StampParams
    r: int
    leftover: int

    def __post_init__(self) -> None:
        height = 1 << self.m
        if height < self.params.q:
            raise InvariantError(
                f"tower of height 2^{self.m} cannot fit a stamp of height {self.params.q}"
            )
        if self.r != height // self.params.q or self.leftover != height % self.params.q:
            raise InvariantError("inconsistent tower division")
        mu = self.mu
        ratio = Fraction(self.params.p, self.params.q)
        if not (ratio * (1 - Fraction(self.params.q, height)) < mu <= ratio):
            raise InvariantError(f"marked measure {mu} outside its bracket")

    @property
    def height(self) -> int:
        return 1 << self.m

    @property
    def marked_count(self) -> int:
        return self.r * self.params.p

    @property
    def mu(self) -> Fraction:
        return Fraction(self.marked_count, self.height)


def plan_tower(m: int, sp: StampParams) -> TowerStamping:
    height = 1 << m
    return TowerStamping(m, sp, height // sp.q, height % sp.q)


def stamp_tower(m: int, sp: StampParams) -> CyclicSystem:
    """Cyclic factor of the stamped tower: block j covers levels
    [j*q, (j+1)*q) and carries the stamp offsets; levels are 1-based
    residues (residue i encodes the m-cylinder of index i - 1)."""
    ts = plan_tower(m, sp)
    offsets = make_stamp(sp).marked_offsets
    marked = tuple(
        j * sp.q + off + 1 for j in range(ts.r) for off in offsets
    )
    return CyclicSystem(ts.height, marked)


def subtower_conditional_counts(ts: TowerStamping, j: int) -> list[int]:
    """Within block j, the count of levels whose hitting time is <= i for
    i = 1..K (K the largest stamp return time)."""
    system = stamp_tower(ts.m, ts.params)
    return _block_counts(system, ts.params, j)


def _block_counts(system: CyclicSystem, sp: StampParams, j: int) -> list[int]:
    """Hitting times of all q levels of block j, cumulated up to the largest
    stamp return time; tau(x) is the distance to the next mark in Z/2^m."""
    q = sp.q
    k_max = sp.k[-1]
    marks = system.marked
    counts = [0] * (k_max + 1)
    for x in range(j * q + 1, (j + 1) * q + 1):
        i = bisect.bisect_right(marks, x)
        if i < len(marks):
            tau = marks[i] - x
        else:
            tau = marks[0] + system.q - x
        if tau <= k_max:
            counts[tau] += 1
    for i in range(1, k_max + 1):
        counts[i] += counts[i - 1]
    return counts[1:]


def subtower_exactness_check(ts: TowerStamping) -> bool:
    """True iff on every block with another block above, the conditional CDF
    of (p/q) * tau at the multiples of p/q up to the largest return time
    equals the staircase law exactly."""
    if ts.r < 2:
        raise InvariantError(f"need r >= 2 blocks, got r = {ts.r}")
    sp = ts.params
    system = stamp_tower(ts.m, sp)
    # expected q * F(i * alpha): cumulative jump numerators
    run_cums: list[int] = []
    acc = 0
    run_idx = 0
    for i in range(1, sp.k[-1] + 1):
        if i > sp.k[run_idx]:
            run_idx += 1
        acc += sp.pvals[run_idx]
        run_cums.append(acc)
    for j in range(ts.r - 1):
        if _block_counts(system, sp, j) != run_cums:
            return False
    return True


@dataclass(frozen=True)
class RealizationStage:
    eps: Fraction
    n_grid: int
    law: RationalF
    q: int
    m: int
    mu_u: Fraction
    hitting: StepCDF
    levy_to_target: Fraction
    system: CyclicSystem | None = None


@dataclass(frozen=True)
class RealizationTrace:
    margin: int
    stages: tuple[RealizationStage, ...]

    def __post_init__(self) -> None:
        prev = None
        for st in self.stages:
            if prev is not None and st.eps >= prev:
                raise InvariantError("eps schedule must be strictly decreasing")
            prev = st.eps
            floor_m = _ceil_log2_ratio(st.q, st.eps)
            if st.m < floor_m:
                raise InvariantError(f"stage m = {st.m} below minimum {floor_m}")


def _ceil_log2_ratio(q: int, eps: Fraction) -> int:
    """Smallest m with 2^m >= q / eps."""
    target = Fraction(q) / eps
    m = 0
    while (1 << m) < target:
        m += 1
    return m


def realize(
    target: TargetF,
    eps_schedule: Sequence[Fraction],
    margin: int = 2,
    keep_systems: bool = False,
) -> RealizationTrace:
    """Run the full pipeline for each tolerance in a decreasing schedule.

    Per stage: build the staircase law at tolerance eps, stamp it across a
    tower of height 2^m with m = ceil(log2(q / eps)) + margin, and record the
    exact hitting CDF of the marked cylinders together with its Levy distance
    to the target.  The marked measure at stage n is at most 1/N_n < eps_n,
    so it tends to zero along any schedule.
    """
    if not eps_schedule:
        raise InvariantError("eps schedule must be nonempty")
    stages = []
    for eps in eps_schedule:
        law = rationalize_target(target, eps)
        sp = derive_params(law)
        m = _ceil_log2_ratio(sp.q, eps) + margin
        system = stamp_tower(m, sp)
        cdf = hitting_cdf(system)
        stage = RealizationStage(
            eps=eps,
            n_grid=law.alpha.denominator,
            law=law,
            q=sp.q,
            m=m,
            mu_u=system.measure,
            hitting=cdf,
            levy_to_target=levy_distance(cdf, target),
            system=system if keep_systems else None,
        )
        stages.append(stage)
    return RealizationTrace(margin, tuple(stages))
