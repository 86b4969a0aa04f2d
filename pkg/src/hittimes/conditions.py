"""Structural checkers: hitting-CDF necessary conditions, admissible limit
class membership, and the modulus-of-continuity inequality.

A genuine hitting CDF of a finite system has a rigid staircase shape: jumps
exactly at the consecutive multiples alpha, 2 alpha, ..., K alpha of the
marked-set measure, nonincreasing jump sizes, and first jump equal to alpha.
`RationalF` is the canonical carrier of that shape with finite rational data;
it is exactly what the stamp machine consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .curves import StepCDF, TargetF
from .errors import InvariantError

# class members have all slopes <= 1: the first slope is F(t1)/t1 <= 1 because
# F stays below the identity, and concavity only lowers later slopes
_CONTINUITY_SLOPE_BOUND = Fraction(1)


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: str


@dataclass(frozen=True)
class CReport:
    passed: bool
    violations: tuple[Violation, ...]

    def __post_init__(self) -> None:
        if self.passed != (not self.violations):
            raise InvariantError("pass flag inconsistent with violation list")


def _report(violations: list[Violation]) -> CReport:
    return CReport(not violations, tuple(violations))


def check_conditions_c(f: StepCDF) -> CReport:
    """Check the staircase conditions on a step CDF.

      1. jump locations are exactly alpha, 2 alpha, ..., K alpha where alpha is
         the first location (consecutive multiples, no gaps);
      2. zero before alpha -- structural for a StepCDF, never violated;
      3. jump sizes nonincreasing;
      4. first jump size equals alpha.
    """
    if not f.jumps:
        raise InvariantError("conditions check needs at least one jump")
    violations: list[Violation] = []
    alpha = f.jumps[0][0]
    for i, (loc, _) in enumerate(f.jumps, start=1):
        if loc != i * alpha:
            violations.append(
                Violation("1", f"jump {i} at {loc}, expected {i * alpha} (= {i} * {alpha})")
            )
            break
    prev = None
    for i, (_, size) in enumerate(f.jumps, start=1):
        if prev is not None and size > prev:
            violations.append(
                Violation("3", f"jump size increases at jump {i}: {prev} -> {size}")
            )
            break
        prev = size
    if f.jumps[0][1] != alpha:
        violations.append(
            Violation("4", f"first jump size {f.jumps[0][1]} != spacing {alpha}")
        )
    return _report(violations)


@dataclass(frozen=True)
class RationalF:
    """Finite staircase law: jump beta_k at k*alpha, with beta_1 = alpha,
    nonincreasing betas summing to 1.

    Derived on construction: the common denominator q (lcm of all value
    denominators), p = alpha q, the run structure of equal jump values
    (change indices k_1 < ... < k_s with distinct numerators p_1 > ... > p_s),
    and the partition identity

        q = k_1 (p_1 - p_2) + ... + k_{s-1} (p_{s-1} - p_s) + k_s p_s,

    which is equivalent to the betas summing to 1.
    """

    alpha: Fraction
    betas: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not (0 < self.alpha <= 1):
            raise InvariantError(f"alpha must be in ]0, 1], got {self.alpha}")
        if not self.betas:
            raise InvariantError("betas must be nonempty")
        if self.betas[0] != self.alpha:
            raise InvariantError(f"beta_1 = {self.betas[0]} must equal alpha = {self.alpha}")
        prev = None
        for i, b in enumerate(self.betas, start=1):
            if b <= 0:
                raise InvariantError(f"beta_{i} = {b} must be positive")
            if prev is not None and b > prev:
                raise InvariantError(f"betas must be nonincreasing, beta_{i} = {b} > {prev}")
            prev = b
        if sum(self.betas) != 1:
            raise InvariantError(f"betas must sum to 1, got {sum(self.betas)}")

        q = math.lcm(self.alpha.denominator, *(b.denominator for b in self.betas))
        numerators = [b.numerator * (q // b.denominator) for b in self.betas]
        change_indices: list[int] = []
        run_values: list[int] = []
        for i, c in enumerate(numerators, start=1):
            if i < len(numerators) and numerators[i] == c:
                continue
            change_indices.append(i)
            run_values.append(c)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", self.alpha.numerator * (q // self.alpha.denominator))
        object.__setattr__(self, "change_indices", tuple(change_indices))
        object.__setattr__(self, "run_values", tuple(run_values))
        if self.partition_identity_lhs() != q:
            raise InvariantError(
                f"partition identity broken: {self.partition_identity_lhs()} != {q}"
            )

    @property
    def k_count(self) -> int:
        """K, the number of jumps."""
        return len(self.betas)

    def partition_identity_lhs(self) -> int:
        ks: tuple[int, ...] = self.change_indices  # type: ignore[attr-defined]
        ps: tuple[int, ...] = self.run_values  # type: ignore[attr-defined]
        acc = ks[-1] * ps[-1]
        for j in range(len(ks) - 1):
            acc += ks[j] * (ps[j] - ps[j + 1])
        return acc

    def induced_step_cdf(self) -> StepCDF:
        return StepCDF(tuple((k * self.alpha, b) for k, b in enumerate(self.betas, start=1)))


def to_rational_f(f: StepCDF) -> RationalF:
    """Extract the staircase data of a mass-one step CDF passing the checks."""
    report = check_conditions_c(f)
    if not report.passed:
        raise InvariantError(
            "not a staircase law: " + "; ".join(v.witness for v in report.violations)
        )
    if f.total_mass != 1:
        raise InvariantError(f"total mass {f.total_mass} < 1")
    return RationalF(f.jumps[0][0], tuple(size for _, size in f.jumps))


def check_class_f(f: TargetF) -> CReport:
    """Decide membership in the admissible limit class on the PWL data.

    Checks: values in [0, 1] and nondecreasing, F(0) = 0, slopes nonincreasing
    (concavity), F(t) <= t at breakpoints (sufficient along segments by
    concavity).  Candidates flagged as encoding a jump are additionally
    audited for continuity via the slope bound 1 (every true class member has
    first slope F(t1)/t1 <= 1 and concavity only lowers the rest).
    """
    violations: list[Violation] = []
    pts = f.breakpoints
    if pts[0][1] != 0:
        violations.append(Violation("origin", f"F(0) = {pts[0][1]} != 0"))
    for t, v in pts:
        if not (0 <= v <= 1):
            violations.append(Violation("range", f"F({t}) = {v} outside [0, 1]"))
            break
    for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
        if v1 < v0:
            violations.append(Violation("monotone", f"F decreases: F({t0}) = {v0} > F({t1}) = {v1}"))
            break
    prev_slope = None
    for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
        slope = (v1 - v0) / (t1 - t0)
        if prev_slope is not None and slope > prev_slope:
            violations.append(
                Violation("concave", f"slope increases at t = {t0}: {prev_slope} -> {slope}")
            )
            break
        prev_slope = slope
    for t, v in pts:
        if v > t:
            violations.append(Violation("bound", f"F({t}) = {v} > t"))
            break
    if f.encodes_jump:
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            slope = (v1 - v0) / (t1 - t0)
            if slope > _CONTINUITY_SLOPE_BOUND:
                violations.append(
                    Violation(
                        "continuity",
                        f"flagged jump encoding: slope {slope} > {_CONTINUITY_SLOPE_BOUND} "
                        f"on [{t0}, {t1}]",
                    )
                )
                break
    return _report(violations)


def check_inequality_i(f: StepCDF, alpha: Fraction) -> bool:
    """Check f(t) - f(s) <= t - s + alpha for all 0 <= s < t, exactly.

    Writing g(x) = f(x) - x, the condition is g(t) - g(s) <= alpha.  g falls
    off jumps, so the binding t are jump points (right values) and the binding
    s are left limits at jumps at or before t; a prefix-minimum sweep settles
    all pairs in one pass.
    """
    if alpha <= 0:
        raise InvariantError(f"alpha must be positive, got {alpha}")
    running_min = Fraction(0)  # s = 0 sentinel: g(0) = 0
    for loc, size in f.jumps:
        left = f.left_value(loc)
        g_left = left - loc
        if g_left < running_min:
            running_min = g_left
        if (left + size - loc) - running_min > alpha:
            return False
    return True
