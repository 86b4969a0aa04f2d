"""Approximate admissible targets (or arbitrary staircase CDFs) by finite
staircase laws, with exact closeness verification.

The closeness notion is the two-sided (eps, eps) criterion: for every
t in [0, 1/eps] some s with |s - t| < eps has |f0(t) - F(s)| <= eps.  The
construction lays a grid of spacing 1/N (N the least integer above 1/eps)
over [0, N], pins the first jump to exactly 1/N, rounds the concave target
increments up to the 1/N^3 grid (keeping them nonincreasing), caps the
running mass at 1, and parks any residual mass in a long run of fine equal
jumps past the covered range so that it escapes the checked horizon.

`check_star` then decides the criterion exactly; if a pathological target
defeats the stated grid (the rounding overshoot is bounded by 2/N, which may
exceed eps when N is minimal), the grid is doubled and the construction
re-verified -- two doublings suffice for any admissible target.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .conditions import RationalF, check_class_f, check_conditions_c
from .curves import StepCDF, TargetF, ZERO
from .errors import InvariantError

_MAX_GRID_DOUBLINGS = 4
_MAX_TAIL_JUMPS = 500_000


@dataclass(frozen=True)
class StarBudget:
    """Approximation budget: tolerance eps and grid count N > 1/eps."""

    eps: Fraction
    n_grid: int

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise InvariantError(f"eps must be positive, got {self.eps}")
        if self.n_grid <= 1 / self.eps:
            raise InvariantError(f"need N > 1/eps, got N = {self.n_grid}, eps = {self.eps}")


def star_budget(eps: Fraction) -> StarBudget:
    """Minimal budget for a tolerance: N is the least integer above 1/eps."""
    if eps <= 0:
        raise InvariantError(f"eps must be positive, got {eps}")
    return StarBudget(eps, (1 / eps).__floor__() + 1)


def _attained_values(
    locs: list[Fraction], cums: list[Fraction], t: Fraction, eps: Fraction
) -> list[Fraction]:
    """Values of the step function on the window ]t-eps, t+eps[ intersected
    with [0, +inf[, in increasing order."""
    lo = t - eps
    base = ZERO
    if lo >= 0:
        i = bisect.bisect_right(locs, lo)
        base = cums[i - 1] if i else ZERO
    start = bisect.bisect_right(locs, max(lo, ZERO))
    stop = bisect.bisect_left(locs, t + eps)
    vals = [base]
    vals.extend(cums[start:stop])
    return vals


def _within(vals: list[Fraction], y: Fraction, eps: Fraction) -> bool:
    i = bisect.bisect_left(vals, y)
    if i < len(vals) and vals[i] - y <= eps:
        return True
    return i > 0 and y - vals[i - 1] <= eps


def _range_ok(vals: list[Fraction], lo: Fraction, hi: Fraction, eps: Fraction) -> bool:
    """Whether every y in [lo, hi] is within eps of some attained value."""
    if lo < vals[0] - eps or hi > vals[-1] + eps:
        return False
    for w1, w2 in zip(vals, vals[1:]):
        if w2 - w1 > 2 * eps and lo < w2 - eps and hi > w1 + eps:
            return False
    return True


def check_star(f0: Union[TargetF, StepCDF], f: RationalF, eps: Fraction) -> bool:
    """Exact decision of the (eps, eps) criterion of f against f0 on [0, 1/eps].

    Event sweep: the window content of f changes only at jump locations
    shifted by +-eps, and f0 is affine (or constant) between its own
    breakpoints, so on each cell between events the criterion reduces to
    comparing a value interval against the finitely many attained values.
    """
    if eps <= 0:
        raise InvariantError(f"eps must be positive, got {eps}")
    horizon = 1 / eps
    step = f.induced_step_cdf()
    locs: list[Fraction] = step._locs  # type: ignore[attr-defined]
    cums: list[Fraction] = step._cums  # type: ignore[attr-defined]

    events = {ZERO, horizon}
    if isinstance(f0, StepCDF):
        f0_breaks = f0._locs  # type: ignore[attr-defined]
    else:
        f0_breaks = f0._ts  # type: ignore[attr-defined]
    for t in f0_breaks:
        if 0 < t < horizon:
            events.add(t)
    for loc in locs:
        for cand in (loc - eps, loc + eps):
            if 0 < cand < horizon:
                events.add(cand)
    ordered = sorted(events)

    for t in ordered:
        if not _within(_attained_values(locs, cums, t, eps), f0.value(t), eps):
            return False
    for a, b in zip(ordered, ordered[1:]):
        mid = (a + b) / 2
        vals = _attained_values(locs, cums, mid, eps)
        if isinstance(f0, StepCDF):
            lo = hi = f0.value(mid)
        else:
            va, vb = f0.value(a), f0.value(b)
            lo, hi = (va, vb) if va <= vb else (vb, va)
        if not _range_ok(vals, lo, hi, eps):
            return False
    return True


def _complete_tail(sizes: list[Fraction], fine: Fraction) -> None:
    """Append a nonincreasing run of equal fine jumps (plus one remainder)
    raising the total mass to exactly 1."""
    deficit = 1 - sum(sizes)
    if deficit <= 0:
        return
    d = min(sizes[-1], fine)
    full = int(deficit / d)
    if full > _MAX_TAIL_JUMPS:
        raise InvariantError(
            f"tail completion would need {full} jumps; input mass too far from 1"
        )
    rem = deficit - full * d
    sizes.extend([d] * full)
    if rem > 0:
        sizes.append(rem)


def _mesh_rationalize(f0: TargetF, n: int) -> RationalF:
    """One construction pass on the grid of spacing 1/n over [0, n]."""
    grid = Fraction(1, n)
    fine = Fraction(1, n**3)
    sizes: list[Fraction] = [grid]
    total = grid
    prev = grid
    v_prev = f0.value(grid)
    for i in range(2, n * n + 1):
        v_next = f0.value(i * grid)
        g = v_next - v_prev
        v_prev = v_next
        if g < 0:
            raise InvariantError(f"target decreases near t = {i * grid}")
        if g == 0:
            break  # concavity: all later increments are zero too
        d = -((-g.numerator * n**3) // g.denominator)  # ceil(g / fine)
        size = min(Fraction(d, n**3), prev)
        if total + size >= 1:
            last = 1 - total
            if last > 0:
                sizes.append(last)
            total = Fraction(1)
            break
        sizes.append(size)
        total += size
        prev = size
    _complete_tail(sizes, fine)
    return RationalF(grid, tuple(sizes))


def rationalize_target(f0: TargetF, eps: Fraction) -> RationalF:
    """Staircase law with spacing 1/N that is (eps, eps)-close to the target.

    The target must pass the admissible-class check.  The result always
    satisfies the staircase conditions (first jump = spacing, nonincreasing
    jumps on the 1/N^3 grid) and is verified against `check_star` before
    being returned; the grid is doubled when verification fails.
    """
    report = check_class_f(f0)
    if not report.passed:
        raise InvariantError(
            "target not in the admissible class: "
            + "; ".join(v.witness for v in report.violations)
        )
    n = star_budget(eps).n_grid
    for _ in range(_MAX_GRID_DOUBLINGS + 1):
        result = _mesh_rationalize(f0, n)
        if check_star(f0, result, eps):
            return result
        n *= 2
    raise InvariantError(
        f"construction failed to verify at eps = {eps} up to N = {n // 2}"
    )


def _snap_step(f: StepCDF, eps: Fraction, n: int) -> RationalF:
    """Truncate at 1/eps and snap spacing/sizes to denominators within n^3."""
    horizon = 1 / eps
    kept = [jump for jump in f.jumps if jump[0] <= horizon]
    if not kept:
        kept = [f.jumps[0]]
    n3 = n**3
    alpha = kept[0][0]
    denoms = math.lcm(alpha.denominator, *(s.denominator for _, s in kept))
    if denoms <= n3:
        sizes = [s for _, s in kept]
    else:
        if alpha.denominator > n3:
            alpha = min(max(alpha.limit_denominator(n3), Fraction(1, n3)), Fraction(1))
        sizes = [alpha]
        prev = alpha
        for _, s in kept[1:]:
            snapped = min(prev, Fraction(-((-s.numerator * n3) // s.denominator), n3))
            sizes.append(snapped)
            prev = snapped
    total = sum(sizes)
    if total > 1:
        excess = total - 1
        while excess > 0 and sizes:
            if sizes[-1] <= excess:
                excess -= sizes.pop()
            else:
                sizes[-1] -= excess
                excess = ZERO
    else:
        _complete_tail(sizes, Fraction(1, n3))
    return RationalF(alpha, tuple(sizes))


def rationalize_step(f: StepCDF, eps: Fraction) -> RationalF:
    """Finite staircase law (eps, eps)-close to a staircase-shaped step CDF.

    Inputs whose spacing and jump denominators already fit within N^3 pass
    through exactly (up to mass completion); otherwise jumps are rounded up
    on the 1/N^3 grid with the spacing snapped to a bounded-denominator
    rational.  The output is verified via `check_star`, doubling the grid on
    failure.
    """
    report = check_conditions_c(f)
    if not report.passed:
        raise InvariantError(
            "input is not staircase-shaped: "
            + "; ".join(v.witness for v in report.violations)
        )
    n = star_budget(eps).n_grid
    for _ in range(_MAX_GRID_DOUBLINGS + 1):
        result = _snap_step(f, eps, n)
        if check_star(f, result, eps):
            return result
        n *= 2
    raise InvariantError(
        f"snapping failed to verify at eps = {eps} up to N = {n // 2}"
    )
