"""The stamp machine: from a staircase law to a concrete cyclic system.

Reading off the run structure of the jumps gives the skyscraper data
(distinct return times k_j with multiplicities p_j - p_{j+1}); placing marks
along a q-cycle with exactly those spacings rebuilds a system whose hitting
CDF is the original staircase, jump for jump.  A stamp is the same marking
expressed as 0-based offsets inside a height-q block, ready to be repeated
along a tower.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conditions import RationalF
from .cyclic import CyclicSystem, hitting_cdf
from .errors import InvariantError


@dataclass(frozen=True)
class StampParams:
    """Run structure of a staircase law over its common denominator q.

    k: strictly increasing run end indices (the distinct return times);
    pvals: corresponding strictly decreasing jump numerators, pvals[0] = p.
    The partition identity q = sum k_j (p_j - p_{j+1}) + k_s p_s must hold.
    """

    q: int
    p: int
    k: tuple[int, ...]
    pvals: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.k) != len(self.pvals) or not self.k:
            raise InvariantError("k and pvals must be nonempty and equally long")
        if any(x < 1 for x in self.k) or any(x < 1 for x in self.pvals):
            raise InvariantError("k and pvals must be positive")
        if list(self.k) != sorted(set(self.k)):
            raise InvariantError(f"k must be strictly increasing, got {self.k}")
        if list(self.pvals) != sorted(set(self.pvals), reverse=True):
            raise InvariantError(f"pvals must be strictly decreasing, got {self.pvals}")
        if self.p != self.pvals[0]:
            raise InvariantError(f"p = {self.p} must equal pvals[0] = {self.pvals[0]}")
        acc = self.k[-1] * self.pvals[-1]
        for j in range(len(self.k) - 1):
            acc += self.k[j] * (self.pvals[j] - self.pvals[j + 1])
        if acc != self.q:
            raise InvariantError(f"partition identity broken: {acc} != q = {self.q}")


@dataclass(frozen=True)
class Stamp:
    """Height-q marking pattern: 0-based offsets of the marked levels."""

    height: int
    marked_offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(not (0 <= o < self.height) for o in self.marked_offsets):
            raise InvariantError("offsets must lie in [0, height)")
        if len(set(self.marked_offsets)) != len(self.marked_offsets):
            raise InvariantError("duplicate offsets")


def derive_params(f: RationalF) -> StampParams:
    """Collect jump runs (values and lengths) into stamp parameters."""
    return StampParams(
        q=f.q,  # type: ignore[attr-defined]
        p=f.p,  # type: ignore[attr-defined]
        k=f.change_indices,  # type: ignore[attr-defined]
        pvals=f.run_values,  # type: ignore[attr-defined]
    )


def build_system(sp: StampParams) -> CyclicSystem:
    """Place p marks on the q-cycle: start at 1, take p_j - p_{j+1} steps of
    size k_j for each run (p_{s+1} = 0; the last step of size k_s wraps back
    to the start, so only p_s - 1 of them are taken explicitly)."""
    residues = [1]
    pos = 1
    s = len(sp.k)
    for j in range(s):
        steps = sp.pvals[j] - sp.pvals[j + 1] if j < s - 1 else sp.pvals[j] - 1
        for _ in range(steps):
            pos += sp.k[j]
            residues.append(pos)
    if len(residues) != sp.p:
        raise InvariantError(f"built {len(residues)} marks, expected p = {sp.p}")
    if pos + sp.k[-1] != sp.q + 1:
        raise InvariantError("marking does not wrap to the start")
    return CyclicSystem(sp.q, tuple(residues))


def make_stamp(sp: StampParams) -> Stamp:
    system = build_system(sp)
    return Stamp(sp.q, tuple(u - 1 for u in system.marked))


def verify_roundtrip(f: RationalF) -> bool:
    """True iff the hitting CDF of the rebuilt system equals f exactly."""
    system = build_system(derive_params(f))
    return hitting_cdf(system) == f.induced_step_cdf()
