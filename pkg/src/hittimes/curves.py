"""Step CDFs, piecewise-linear targets, and exact distances between them.

Two curve families cover everything the package manipulates:

* `StepCDF` — a finitely supported jump distribution (right-continuous step
  function), the exact form of every hitting/return-time CDF of a finite
  system.
* `TargetF` — a continuous piecewise-linear candidate limit law on [0, t_max],
  constant beyond its last breakpoint and zero on the negative axis.

All coordinates are Fractions and the sup / Levy distances are computed
exactly by sweeps over the finitely many breakpoints; no floating point is
involved anywhere here.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import InvariantError

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class StepCDF:
    """Right-continuous step function: 0 before the first jump, nondecreasing.

    `jumps` is a tuple of (location, size) with strictly increasing positive
    locations, strictly positive sizes, and total mass at most 1.  The empty
    tuple is the zero function (useful for truncations).
    """

    jumps: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        locs: list[Fraction] = []
        cums: list[Fraction] = []
        total = ZERO
        prev = ZERO
        for i, (loc, size) in enumerate(self.jumps):
            if loc <= prev:
                raise InvariantError(
                    f"jump locations must be strictly increasing and > 0; "
                    f"jump {i + 1} at {loc} after {prev}"
                )
            if size <= 0:
                raise InvariantError(f"jump {i + 1} at {loc} has size {size} <= 0")
            total += size
            locs.append(loc)
            cums.append(total)
            prev = loc
        if total > 1:
            raise InvariantError(f"total jump mass {total} exceeds 1")
        object.__setattr__(self, "_locs", locs)
        object.__setattr__(self, "_cums", cums)

    @property
    def total_mass(self) -> Fraction:
        cums: list[Fraction] = self._cums  # type: ignore[attr-defined]
        return cums[-1] if cums else ZERO

    def value(self, t: Fraction) -> Fraction:
        """F(t): sum of jump sizes at locations <= t (right-continuous)."""
        locs: list[Fraction] = self._locs  # type: ignore[attr-defined]
        cums: list[Fraction] = self._cums  # type: ignore[attr-defined]
        i = bisect.bisect_right(locs, t)
        return cums[i - 1] if i else ZERO

    def left_value(self, t: Fraction) -> Fraction:
        """F(t-): sum of jump sizes at locations strictly below t."""
        locs: list[Fraction] = self._locs  # type: ignore[attr-defined]
        cums: list[Fraction] = self._cums  # type: ignore[attr-defined]
        i = bisect.bisect_left(locs, t)
        return cums[i - 1] if i else ZERO

    def truncated(self, horizon: Fraction) -> "StepCDF":
        """The sub-probability step keeping only jumps at locations <= horizon."""
        locs: list[Fraction] = self._locs  # type: ignore[attr-defined]
        i = bisect.bisect_right(locs, horizon)
        return StepCDF(self.jumps[:i])


@dataclass(frozen=True)
class TargetF:
    """Continuous piecewise-linear candidate on [0, t_max].

    Interpretation: linear between breakpoints, equal to the last value beyond
    t_max, zero on the negative axis.  The constructor enforces only the
    structural shape (t = 0 first, strictly increasing abscissae, values in
    [0, 1]); membership in the admissible limit class (monotone, concave,
    F(t) <= t, F(0) = 0) is decided by `conditions.check_class_f`, so that
    deliberately violating candidates can be represented and rejected.

    `encodes_jump` flags candidates whose near-vertical segments stand in for
    a genuine discontinuity; the class checker audits those against a slope
    bound.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...]
    encodes_jump: bool = False

    def __post_init__(self) -> None:
        if not self.breakpoints:
            raise InvariantError("TargetF needs at least one breakpoint")
        if self.breakpoints[0][0] != 0:
            raise InvariantError(
                f"first breakpoint must be at t = 0, got t = {self.breakpoints[0][0]}"
            )
        prev = None
        for t, v in self.breakpoints:
            if prev is not None and t <= prev:
                raise InvariantError(f"breakpoint abscissae must increase, got {t} after {prev}")
            if not (0 <= v <= 1):
                raise InvariantError(f"breakpoint value {v} at t = {t} outside [0, 1]")
            prev = t
        object.__setattr__(self, "_ts", [t for t, _ in self.breakpoints])

    @property
    def t_max(self) -> Fraction:
        return self.breakpoints[-1][0]

    @property
    def final_value(self) -> Fraction:
        return self.breakpoints[-1][1]

    def value(self, t: Fraction) -> Fraction:
        if t < 0:
            return ZERO
        ts: list[Fraction] = self._ts  # type: ignore[attr-defined]
        if t >= ts[-1]:
            return self.breakpoints[-1][1]
        i = bisect.bisect_right(ts, t)
        if i == 0:
            # t in [0, first abscissa[ cannot happen: first abscissa is 0
            return self.breakpoints[0][1]
        (t0, v0), (t1, v1) = self.breakpoints[i - 1], self.breakpoints[i]
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    def left_value(self, t: Fraction) -> Fraction:
        # continuous on [0, inf[; the only one-sided gap is at 0 when v(0) > 0
        if t <= 0:
            return ZERO
        return self.value(t)


Curve = Union[StepCDF, TargetF]


def value_at(f: Curve, t: Fraction) -> Fraction:
    """Evaluate either curve kind at t (right-continuous for steps)."""
    return f.value(t)


def left_value_at(f: Curve, t: Fraction) -> Fraction:
    return f.left_value(t)


def _breakpoint_locations(f: Curve) -> list[Fraction]:
    if isinstance(f, StepCDF):
        return list(f._locs)  # type: ignore[attr-defined]
    return list(f._ts)  # type: ignore[attr-defined]


def sup_distance(f: Curve, g: Curve, horizon: Fraction) -> Fraction:
    """Exact sup of |f - g| over [0, horizon], one-sided limits included.

    Between breakpoints both curves are affine, so |f - g| attains its sup at
    breakpoint values or one-sided limits there.
    """
    if horizon <= 0:
        raise InvariantError(f"horizon must be positive, got {horizon}")
    events = {ZERO, horizon}
    for h in (f, g):
        for t in _breakpoint_locations(h):
            if 0 < t <= horizon:
                events.add(t)
    best = ZERO
    for t in events:
        d = abs(f.value(t) - g.value(t))
        if d > best:
            best = d
        d = abs(f.left_value(t) - g.left_value(t))
        if d > best:
            best = d
    return best


def _graph_vertices(f: Curve) -> list[tuple[Fraction, Fraction]]:
    """Vertices of the completed (filled-in) graph, a monotone polyline.

    The curve is extended by horizontal rays: y = 0 left of the first vertex
    and y = final mass right of the last one.  Jumps contribute vertical
    segments, so the polyline is parameterized bijectively by u = x + y.
    """
    verts: list[tuple[Fraction, Fraction]] = []
    if isinstance(f, StepCDF):
        y = ZERO
        for loc, size in f.jumps:
            verts.append((loc, y))
            y += size
            verts.append((loc, y))
        return verts
    prev_v = None
    for t, v in f.breakpoints:
        if prev_v is not None and v < prev_v:
            raise InvariantError("Levy distance needs nondecreasing curves")
        prev_v = v
    if f.breakpoints[0][1] > 0:
        verts.append((ZERO, ZERO))
    verts.extend(f.breakpoints)
    return verts


def _y_at_u(verts: list[tuple[Fraction, Fraction]], us: list[Fraction], u: Fraction) -> Fraction:
    """Ordinate of the completed-graph point with x + y = u."""
    if not verts:
        return ZERO
    if u <= us[0]:
        # horizontal ray at y = 0 left of the first vertex
        return ZERO
    if u >= us[-1]:
        return verts[-1][1]
    i = bisect.bisect_right(us, u)
    (x0, y0), (x1, y1) = verts[i - 1], verts[i]
    if x1 == x0:  # vertical segment
        return u - x0
    if y1 == y0:  # horizontal segment
        return y0
    m = (y1 - y0) / (x1 - x0)
    x = (u - y0 + m * x0) / (1 + m)
    return u - x


def levy_distance(f: Curve, g: Curve) -> Fraction:
    """Exact Levy distance: least eps with f(t-eps)-eps <= g(t) <= f(t+eps)+eps.

    Computed through the diagonal parameterization of the completed graphs:
    for monotone curves, the distance equals sup_u |y_f(u) - y_g(u)| where
    each graph is traversed by u = x + y, and the sup is attained at a vertex
    of either polyline (or in the common horizontal tail).
    """
    vf = _graph_vertices(f)
    vg = _graph_vertices(g)
    uf = [x + y for x, y in vf]
    ug = [x + y for x, y in vg]
    events = sorted(set(uf) | set(ug))
    if not events:
        return ZERO
    events.append(events[-1] + 1)  # common tail: constant difference of masses
    best = ZERO
    for u in events:
        d = abs(_y_at_u(vf, uf, u) - _y_at_u(vg, ug, u))
        if d > best:
            best = d
    return best


def tail_integral(f: StepCDF) -> Fraction:
    """Exact integral of (1 - F) over [0, +inf[ for a mass-one step CDF."""
    if f.total_mass != 1:
        raise InvariantError(
            f"tail integral diverges: total mass {f.total_mass} < 1"
        )
    acc = ZERO
    prev_loc = ZERO
    prev_cum = ZERO
    for (loc, _), cum in zip(f.jumps, f._cums):  # type: ignore[attr-defined]
        acc += (1 - prev_cum) * (loc - prev_loc)
        prev_loc, prev_cum = loc, cum
    return acc


# ---------------------------------------------------------------------------
# closed-form builtins sampled onto TargetF grids
# ---------------------------------------------------------------------------

_EXP_GRID = 1 << 96  # denominator bound for sampled exponential values


def exp_neg_bounds(t: Fraction, tol: Fraction) -> tuple[Fraction, Fraction]:
    """Rigorous rational bounds for exp(-t), t >= 0, within tol of each other.

    Alternating Taylor series; once the term index exceeds t the terms
    decrease, so the first omitted term bounds the remainder.
    """
    if t < 0:
        raise InvariantError(f"exp_neg_bounds needs t >= 0, got {t}")
    s = ONE
    term = ONE
    k = 0
    while True:
        nxt = term * t / (k + 1)
        if k + 1 > t and nxt <= tol:
            break
        k += 1
        term = nxt
        s = s + term if k % 2 == 0 else s - term
    return s - nxt, s + nxt


def _exp_neg_lower(t: Fraction) -> Fraction:
    """Lower bound for exp(-t) on the 2^-96 grid (keeps denominators compact)."""
    lo, _ = exp_neg_bounds(t, Fraction(1, _EXP_GRID))
    floored = (lo.numerator * _EXP_GRID) // lo.denominator
    return Fraction(max(floored, 0), _EXP_GRID)


def _exp_neg_upper(t: Fraction) -> Fraction:
    _, hi = exp_neg_bounds(t, Fraction(1, _EXP_GRID))
    ceiled = -((-hi.numerator * _EXP_GRID) // hi.denominator)
    return Fraction(min(max(ceiled, 0), _EXP_GRID), _EXP_GRID)


def _sample_scaled_exp(a: Fraction, lam: Fraction, mesh: Fraction) -> TargetF:
    # horizon: first mesh multiple where the certified remaining rise a*e^(-lam t)
    # drops to mesh or below
    guess = math.log(max(float(a / mesh), 1.0)) / float(lam)
    k_max = max(1, math.ceil(guess / float(mesh)))
    while a * _exp_neg_upper(lam * k_max * mesh) > mesh:
        k_max += max(1, k_max // 8)
    pts: list[tuple[Fraction, Fraction]] = [(ZERO, ZERO)]
    for k in range(1, k_max + 1):
        t = k * mesh
        pts.append((t, a * (1 - _exp_neg_lower(lam * t))))
    prev_inc = None
    for i in range(1, len(pts)):
        inc = pts[i][1] - pts[i - 1][1]
        if inc < 0 or (prev_inc is not None and inc > prev_inc):
            raise InvariantError(
                "sampling grid too fine for the exponential bounds; "
                f"monotone/concave shape lost near t = {pts[i][0]}"
            )
        prev_inc = inc
    return TargetF(tuple(pts))


def cdf_from_builtin(name: str, params: Sequence[Fraction], mesh: Fraction) -> TargetF:
    """Sample a closed-form candidate onto a piecewise-linear target.

    Builtins:
      exp1            -- 1 - e^(-t), no parameters
      capped_linear c -- min(c t, 1) with 0 < c <= 1 (exact representation)
      scaled_exp a l  -- a (1 - e^(-l t)) with a in ]0,1], l > 0, a*l <= 1

    Exponential values are rational upper approximations within 2^-95, tight
    enough that the sampled points stay concave and below the identity.
    """
    if mesh <= 0:
        raise InvariantError(f"mesh must be positive, got {mesh}")
    if name == "exp1":
        if params:
            raise InvariantError("exp1 takes no parameters")
        return _sample_scaled_exp(ONE, ONE, mesh)
    if name == "capped_linear":
        if len(params) != 1:
            raise InvariantError("capped_linear takes one parameter c")
        c = params[0]
        if not (0 < c <= 1):
            raise InvariantError(f"capped_linear needs 0 < c <= 1, got {c}")
        pts: list[tuple[Fraction, Fraction]] = []
        k = 0
        while k * mesh < 1 / c:
            pts.append((k * mesh, c * k * mesh))
            k += 1
        pts.append((1 / c, ONE))
        return TargetF(tuple(pts))
    if name == "scaled_exp":
        if len(params) != 2:
            raise InvariantError("scaled_exp takes parameters a, lam")
        a, lam = params
        if not (0 < a <= 1) or lam <= 0 or a * lam > 1:
            raise InvariantError(
                f"scaled_exp needs 0 < a <= 1, lam > 0, a*lam <= 1; got a={a}, lam={lam}"
            )
        return _sample_scaled_exp(a, lam, mesh)
    raise InvariantError(f"unknown builtin {name!r}")
