"""Monte Carlo first-hit sampling for symbolic systems.

Sampling is the one place floating point is allowed (uniform draws and
threshold comparisons); every recorded hitting time is an integer and every
reported statistic is computed exactly from the integer sample afterwards.

Determinism contract: trajectory i draws exclusively from a counter-based
generator keyed by the run seed with counter block i * 2^128, so results are
bit-identical for a given (seed, spec, samples, horizon) no matter how the
work is chunked, and extending the horizon never changes values already
collected.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .curves import StepCDF, TargetF, sup_distance
from .cyclic import CyclicSystem
from .errors import InvariantError

_KEY_MASK = (1 << 128) - 1
_FIXED_POINT_BITS = 128  # rotation orbits carry 128 fractional bits


@dataclass(frozen=True)
class BernoulliSpec:
    """IID shift over a finite alphabet; target = cylinder word at the origin."""

    probs: tuple[Fraction, ...]
    word: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.probs) < 2:
            raise InvariantError("need at least two symbols")
        if any(p <= 0 for p in self.probs):
            raise InvariantError("symbol probabilities must be positive")
        if sum(self.probs) != 1:
            raise InvariantError(f"probabilities sum to {sum(self.probs)}, not 1")
        if not self.word:
            raise InvariantError("cylinder word must be nonempty")
        if any(not (0 <= s < len(self.probs)) for s in self.word):
            raise InvariantError("word symbol out of alphabet range")


@dataclass(frozen=True)
class MarkovSpec:
    """Stationary Markov shift; target = cylinder word at the origin."""

    matrix: tuple[tuple[Fraction, ...], ...]
    stationary: tuple[Fraction, ...]
    word: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.matrix)
        if n < 2 or any(len(row) != n for row in self.matrix):
            raise InvariantError("matrix must be square with at least two states")
        for i, row in enumerate(self.matrix):
            if any(x < 0 for x in row):
                raise InvariantError(f"negative entry in row {i}")
            if sum(row) != 1:
                raise InvariantError(f"row {i} sums to {sum(row)}, not 1")
        if len(self.stationary) != n or any(x < 0 for x in self.stationary):
            raise InvariantError("stationary vector malformed")
        if sum(self.stationary) != 1:
            raise InvariantError("stationary vector must sum to 1")
        for j in range(n):
            if sum(self.stationary[i] * self.matrix[i][j] for i in range(n)) != self.stationary[j]:
                raise InvariantError(f"vector is not stationary at state {j}")
        if not self.word:
            raise InvariantError("cylinder word must be nonempty")
        if any(not (0 <= s < n) for s in self.word):
            raise InvariantError("word symbol out of state range")


@dataclass(frozen=True)
class RotationSpec:
    """Circle rotation by a fixed angle; target = arc [a, b)."""

    angle: Fraction
    arc: tuple[Fraction, Fraction]

    def __post_init__(self) -> None:
        a, b = self.arc
        if not (0 <= a < b <= 1):
            raise InvariantError(f"arc must satisfy 0 <= a < b <= 1, got [{a}, {b})")


@dataclass(frozen=True)
class CyclicSpec:
    system: CyclicSystem


SystemSpec = Union[BernoulliSpec, MarkovSpec, RotationSpec, CyclicSpec]


def target_measure(spec: SystemSpec) -> Fraction:
    """Exact invariant measure of the target event."""
    if isinstance(spec, BernoulliSpec):
        mu = Fraction(1)
        for s in spec.word:
            mu *= spec.probs[s]
        return mu
    if isinstance(spec, MarkovSpec):
        mu = spec.stationary[spec.word[0]]
        for a, b in zip(spec.word, spec.word[1:]):
            mu *= spec.matrix[a][b]
        if mu == 0:
            raise InvariantError("cylinder word has measure zero under this chain")
        return mu
    if isinstance(spec, RotationSpec):
        return spec.arc[1] - spec.arc[0]
    if isinstance(spec, CyclicSpec):
        return spec.system.measure
    raise InvariantError(f"unknown spec {type(spec).__name__}")


@dataclass(frozen=True)
class EmpiricalCDF:
    """Aggregated sample of scaled hitting times mu(U) * tau.

    `samples` holds sorted distinct values with multiplicities; `count` is the
    number of trajectories launched and `censored` how many never hit within
    the horizon (their mass is reported, never folded into the statistic).
    """

    samples: tuple[tuple[Fraction, int], ...]
    count: int
    censored: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise InvariantError("empirical CDF needs at least one trajectory")
        if not (0 <= self.censored <= self.count):
            raise InvariantError("censored count out of range")
        if sum(c for _, c in self.samples) != self.count - self.censored:
            raise InvariantError("sample multiplicities do not match the counts")
        prev = None
        for v, c in self.samples:
            if c < 1 or v <= 0:
                raise InvariantError("samples need positive values and counts")
            if prev is not None and v <= prev:
                raise InvariantError("sample values must be sorted and distinct")
            prev = v

    @property
    def uncensored(self) -> int:
        return self.count - self.censored

    @property
    def all_censored(self) -> bool:
        return self.censored == self.count

    def to_step_cdf(self, denominator: str = "total") -> StepCDF:
        """Empirical step CDF; denominator 'total' keeps censored mass out at
        the top (sub-probability), 'uncensored' renormalizes to mass one."""
        if denominator == "total":
            den = self.count
        elif denominator == "uncensored":
            den = self.uncensored
            if den == 0:
                raise InvariantError("no uncensored samples to normalize over")
        else:
            raise InvariantError(f"unknown denominator {denominator!r}")
        return StepCDF(tuple((v, Fraction(c, den)) for v, c in self.samples))


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for trajectory `index`: Philox keyed by the seed, counter
    advanced to block index * 2^128 (disjoint for every trajectory)."""
    bitgen = np.random.Philox(key=seed & _KEY_MASK, counter=index << 128)
    return np.random.Generator(bitgen)


def _simulate_cyclic(
    system: CyclicSystem, samples: int, seed: int, horizon: int
) -> tuple[Counter, int]:
    q = system.q
    starts = np.empty(samples, dtype=np.int64)
    for i in range(samples):
        starts[i] = trajectory_rng(seed, i).integers(1, q + 1)
    marked_mask = np.zeros(q + 1, dtype=bool)
    marked_mask[list(system.marked)] = True
    pos = starts
    taus: Counter = Counter()
    active = np.ones(samples, dtype=bool)
    step = 0
    while step < horizon and active.any():
        step += 1
        pos = np.where(active, pos % q + 1, pos)
        hits = active & marked_mask[pos]
        n_hits = int(hits.sum())
        if n_hits:
            taus[step] = n_hits
            active &= ~hits
    return taus, int(active.sum())


def _word_match_first(sym: np.ndarray, word: np.ndarray, start: int, stop: int) -> int | None:
    """First position k in [start, stop] with sym[k:k+len(word)] == word."""
    length = len(word)
    if stop < start:
        return None
    ok = np.ones(stop - start + 1, dtype=bool)
    for j in range(length):
        ok &= sym[start + j : start + j + len(ok)] == word[j]
    idx = np.flatnonzero(ok)
    return int(idx[0]) + start if idx.size else None


def _draw_symbols(rng: np.random.Generator, cum: np.ndarray, n: int) -> np.ndarray:
    u = rng.random(n)
    return np.searchsorted(cum, u, side="right").astype(np.int16)


def _simulate_bernoulli(
    spec: BernoulliSpec, samples: int, seed: int, horizon: int
) -> tuple[Counter, int]:
    word = np.array(spec.word, dtype=np.int16)
    length = len(spec.word)
    cum = np.cumsum([float(p) for p in spec.probs])[:-1]  # thresholds between symbols
    taus: Counter = Counter()
    censored = 0
    chunk = 2048
    for i in range(samples):
        rng = trajectory_rng(seed, i)
        sym = _draw_symbols(rng, cum, min(chunk, horizon + length))
        pos = 1
        tau = None
        while True:
            limit = len(sym) - length  # last checkable position in current buffer
            hit = _word_match_first(sym, word, pos, min(limit, horizon))
            if hit is not None:
                tau = hit
                break
            if len(sym) >= horizon + length:
                break
            pos = limit + 1
            extra = min(chunk, horizon + length - len(sym))
            sym = np.concatenate([sym, _draw_symbols(rng, cum, extra)])
        if tau is None:
            censored += 1
        else:
            taus[tau] += 1
    return taus, censored


def _simulate_markov(
    spec: MarkovSpec, samples: int, seed: int, horizon: int
) -> tuple[Counter, int]:
    n = len(spec.matrix)
    start_cum = np.cumsum([float(p) for p in spec.stationary])[:-1]
    row_cums = [np.cumsum([float(p) for p in row])[:-1] for row in spec.matrix]
    word = spec.word
    length = len(word)
    taus: Counter = Counter()
    censored = 0
    for i in range(samples):
        rng = trajectory_rng(seed, i)
        u = rng.random(horizon + length)
        seq = [int(np.searchsorted(start_cum, u[0], side="right"))]
        for k in range(1, horizon + length):
            seq.append(int(np.searchsorted(row_cums[seq[-1]], u[k], side="right")))
        tau = None
        for k in range(1, horizon + 1):
            if tuple(seq[k : k + length]) == word:
                tau = k
                break
        if tau is None:
            censored += 1
        else:
            taus[tau] += 1
    return taus, censored


def _simulate_rotation(
    spec: RotationSpec, samples: int, seed: int, horizon: int
) -> tuple[Counter, int]:
    scale = 1 << _FIXED_POINT_BITS
    ang = round(spec.angle * scale) % scale
    a_fp = -((-spec.arc[0].numerator * scale) // spec.arc[0].denominator)  # ceil
    b_fp = -((-spec.arc[1].numerator * scale) // spec.arc[1].denominator)
    taus: Counter = Counter()
    censored = 0
    for i in range(samples):
        rng = trajectory_rng(seed, i)
        hi, lo = rng.integers(0, 1 << 64, size=2, dtype=np.uint64)
        x = (int(hi) << 64) | int(lo)
        tau = None
        for k in range(1, horizon + 1):
            x = (x + ang) % scale
            if a_fp <= x < b_fp:
                tau = k
                break
        if tau is None:
            censored += 1
        else:
            taus[tau] += 1
    return taus, censored


def simulate_hitting(
    spec: SystemSpec, samples: int, seed: int, horizon: int
) -> EmpiricalCDF:
    """Sample first entry times from stationary starts, scaled by mu(U).

    Trajectories that never enter the target within `horizon` steps are
    counted as censored.  A result with every trajectory censored is returned
    as such (flagged via `all_censored`), since downstream statistics reject
    empty samples explicitly.
    """
    if samples < 1:
        raise InvariantError(f"samples must be >= 1, got {samples}")
    if horizon < 1:
        raise InvariantError(f"horizon must be >= 1, got {horizon}")
    mu = target_measure(spec)
    if mu == 0:
        raise InvariantError("target event has measure zero")
    if isinstance(spec, CyclicSpec):
        taus, censored = _simulate_cyclic(spec.system, samples, seed, horizon)
    elif isinstance(spec, BernoulliSpec):
        taus, censored = _simulate_bernoulli(spec, samples, seed, horizon)
    elif isinstance(spec, MarkovSpec):
        taus, censored = _simulate_markov(spec, samples, seed, horizon)
    elif isinstance(spec, RotationSpec):
        taus, censored = _simulate_rotation(spec, samples, seed, horizon)
    else:
        raise InvariantError(f"unknown spec {type(spec).__name__}")
    values = tuple((k * mu, taus[k]) for k in sorted(taus))
    return EmpiricalCDF(values, samples, censored)


def ks_distance(e: EmpiricalCDF, ref: Union[StepCDF, TargetF]) -> Fraction:
    """Exact sup of |empirical - reference| over all sample points and
    reference breakpoints (one-sided limits included); censored mass is
    reported on the EmpiricalCDF, not folded in here."""
    if e.uncensored == 0:
        raise InvariantError("empirical sample is empty after censoring")
    emp = e.to_step_cdf("total")
    last_emp = e.samples[-1][0]
    if isinstance(ref, StepCDF):
        last_ref = ref.jumps[-1][0] if ref.jumps else Fraction(0)
    else:
        last_ref = ref.t_max
    return sup_distance(emp, ref, max(last_emp, last_ref) + 1)
