"""Nice intervals, first-return maps, gap transport and avoidance measures.

A nice interval is an open interval around the break point whose boundary
orbits never re-enter it; first-return maps to nice intervals decompose into
monotone branches of constant return time, and the complement of the points
that never visit the interval is exhausted by gaps that map onto it.
All orbit-avoidance claims here are horizon-bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .map_core import (
    LorenzMapSpec,
    Side,
    apply_raw,
    branch_value,
    branch_inverse_array,
    critical_values,
    deriv_array,
    eval_array,
)
from .periodic import PeriodicOrbitRecord, find_periodic_points

FULL_TOLERANCE = 1e-6


@dataclass
class NiceInterval:
    interval: tuple[float, float]
    horizon: int
    is_nice: bool
    boundary_periodic: tuple[int | None, int | None]
    undetermined: bool = False  # a boundary orbit hit the break point

    def to_dict(self) -> dict:
        return {
            "interval": list(self.interval),
            "horizon": self.horizon,
            "is_nice": self.is_nice,
            "boundary_periodic": list(self.boundary_periodic),
            "undetermined": self.undetermined,
        }


@dataclass
class ReturnMapBranch:
    domain: tuple[float, float]
    return_time: int
    image: tuple[float, float]
    is_full: bool
    touches_c: bool

    def to_dict(self) -> dict:
        return {
            "domain": list(self.domain),
            "return_time": self.return_time,
            "image": list(self.image),
            "is_full": self.is_full,
            "touches_c": self.touches_c,
        }


@dataclass
class ReturnMapRec:
    J: tuple[float, float]
    branches: list[ReturnMapBranch]
    uncovered_measure: float

    def to_dict(self) -> dict:
        return {
            "J": list(self.J),
            "branches": [b.to_dict() for b in self.branches],
            "uncovered_measure": self.uncovered_measure,
        }


@dataclass
class GapRecord:
    gap: tuple[float, float]
    order: int
    image_is_J: bool
    # a gap sharing an endpoint with J marks a non-perfect avoiding set
    # (isolated boundary points); reported, not acted on
    touches_boundary: bool = False


@dataclass
class PhobicEstimate:
    J: tuple[float, float]
    n: int
    surviving_measure: float
    surviving_cells: tuple[int, ...]
    grid: int


@dataclass
class ExpansionFit:
    lam: float
    prefactor: float
    survivors: int
    n: int
    passed: bool


@dataclass
class RootIntervalResult:
    interval: tuple[float, float]
    candidates: int
    notes: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------


def _boundary_orbit_avoids(
    spec: LorenzMapSpec, start: float, J: tuple[float, float], horizon: int
) -> tuple[bool, int | None, bool]:
    """(avoids J, period if the orbit closes up, hit_critical flag).

    Detects periodic closure early so periodic boundaries cost one cycle
    instead of the whole horizon.
    """
    lo, hi = J
    tol = spec.tolerance
    x = start
    period = None
    for k in range(1, horizon + 1):
        if abs(x - spec.c) <= tol:
            return True, period, True
        x = apply_raw(spec, x, Side.NONE)
        if lo + tol < x < hi - tol:
            return False, None, False
        if abs(x - start) <= 10 * tol:
            return True, k, False
    return True, None, False


def is_nice(spec: LorenzMapSpec, J: tuple[float, float], horizon: int = 10_000) -> NiceInterval:
    """Do the forward orbits of both endpoints avoid the open interval?"""
    lo, hi = J
    if not (lo < spec.c < hi):
        raise ValueError("nice-interval test needs c inside J")
    if horizon > 10**6:
        raise ValueError("horizon capped at 1e6")
    ok_a, per_a, hit_a = _boundary_orbit_avoids(spec, lo, J, horizon)
    ok_b, per_b, hit_b = _boundary_orbit_avoids(spec, hi, J, horizon)
    return NiceInterval(
        interval=J,
        horizon=horizon,
        is_nice=ok_a and ok_b,
        boundary_periodic=(per_a, per_b),
        undetermined=hit_a or hit_b,
    )


def push_interval(
    spec: LorenzMapSpec, interval: tuple[float, float], steps: int
) -> tuple[float, float] | None:
    """Forward image of an interval under f^steps, tracked while monotone.

    Returns None when an intermediate image straddles the break point, i.e.
    the iterate is no longer monotone on the interval.
    """
    u, v = interval
    c, tol = spec.c, spec.tolerance
    for _ in range(steps):
        if u + tol < c < v - tol:
            return None
        if v <= c + tol:
            side, lo_d, hi_d = "left", 0.0, c
        else:
            side, lo_d, hi_d = "right", c, 1.0
        u = branch_value(spec, side, min(max(u, lo_d), hi_d))
        v = branch_value(spec, side, min(max(v, lo_d), hi_d))
        u = min(max(u, 0.0), 1.0)
        v = min(max(v, 0.0), 1.0)
    return (u, v)


def order(spec: LorenzMapSpec, I: tuple[float, float], horizon: int = 1000) -> int | None:
    """Smallest k with c in the interior of f^k(I); None if not found within
    the horizon ("infinite up to horizon")."""
    u, v = I
    if not (u < v):
        raise ValueError("empty interval")
    tol = spec.tolerance
    for k in range(horizon + 1):
        if u + tol < spec.c < v - tol:
            return k
        side = "left" if v <= spec.c + tol else "right"
        u = min(max(branch_value(spec, side, max(u, 0.0) if side == "left" else max(u, spec.c)), 0.0), 1.0)
        v = min(max(branch_value(spec, side, min(v, spec.c) if side == "left" else min(v, 1.0)), 0.0), 1.0)
        if v - u <= 2 * tol:
            return None  # collapsed below resolution, cannot cover c
    return None


def _directed_iterate(spec: LorenzMapSpec, x: float, side: Side, steps: int) -> float:
    """f^steps with a persistent approach side (one-sided limit semantics:
    increasing branches preserve the approach direction)."""
    for _ in range(steps):
        x = apply_raw(spec, x, side)
    return x


def _branch_path(spec: LorenzMapSpec, x: float, steps: int) -> list[str] | None:
    """Branch sequence taken by the orbit of x, None if it grazes c."""
    path = []
    for _ in range(steps):
        if abs(x - spec.c) <= spec.tolerance:
            return None
        side = "left" if x < spec.c else "right"
        path.append(side)
        x = apply_raw(spec, x, Side.NONE)
    return path


def _apply_path(spec: LorenzMapSpec, x: float, path: list[str]) -> float:
    """Evaluate the fixed branch composition along path at x.

    This is the monotone continuous extension of the composition taken by a
    return branch; it stays defined across the branch edge where the actual
    orbit would switch branches. Power-form branches clamp their radicand,
    polynomial formulas extend as they are.
    """
    for side in path:
        br = spec.left if side == "left" else spec.right
        if br.kind == "power_form":
            lo_d, hi_d = (0.0, spec.c) if side == "left" else (spec.c, 1.0)
            x = branch_value(spec, side, min(max(x, lo_d), hi_d))
        else:
            x = branch_value(spec, side, x)
    return x


def _first_return_time(spec: LorenzMapSpec, x: float, J: tuple[float, float], horizon: int) -> int:
    lo, hi = J
    tol = spec.tolerance
    y = x
    for k in range(1, horizon + 1):
        if abs(y - spec.c) <= tol:
            return -1
        y = apply_raw(spec, y, Side.NONE)
        if lo + tol < y < hi - tol:
            return k
    return 0


def first_return_map(
    spec: LorenzMapSpec,
    J: tuple[float, float],
    horizon: int = 1000,
    resolution: int = 1 << 12,
) -> ReturnMapRec:
    """Branch decomposition of the first-return map to J.

    Branch domains are grid runs of constant return time with boundaries
    refined by bisection; runs thinner than the grid are dropped into
    uncovered_measure rather than guessed at.
    """
    lo, hi = J
    tol = spec.tolerance
    xs = np.linspace(lo, hi, resolution + 2)[1:-1]
    times = np.zeros(xs.shape, dtype=np.int64)
    alive = np.ones(xs.shape, dtype=bool)
    y = xs.copy()
    for k in range(1, horizon + 1):
        if not alive.any():
            break
        y[alive] = eval_array(spec, y[alive])
        dead = alive & np.isnan(y)
        if dead.any():
            times[dead] = -1
            alive &= ~dead
        back = alive & (y > lo + tol) & (y < hi - tol)
        times[back] = k
        alive &= ~back
    if not (times > 0).any():
        raise ValueError("no returns observed within the horizon")

    # maximal runs of equal positive return time, split at the break point
    # (the two sides of c can share a return time yet belong to different
    # monotone branches)
    branches: list[ReturnMapBranch] = []
    runs: list[tuple[int, int, int]] = []
    i = 0
    while i < len(xs):
        t = times[i]
        j = i
        while j + 1 < len(xs) and times[j + 1] == t and not (xs[j] < spec.c <= xs[j + 1]):
            j += 1
        if t > 0:
            runs.append((i, j, int(t)))
        i = j + 1

    def refine(x_in: float, x_out: float, t_in: int) -> tuple[float, float]:
        # boundary between return-time regimes located by bisection;
        # x_in returns at time t_in, x_out does not
        for _ in range(60):
            m = 0.5 * (x_in + x_out)
            if _first_return_time(spec, m, J, horizon) == t_in:
                x_in = m
            else:
                x_out = m
        return float(x_in), float(x_out)

    def polish_edge(x_in: float, x_out: float, path: list[str], target: float) -> float:
        # the return-time bisection stops at the numerical dead zone around
        # orbits that graze c; the branch composition extends continuously
        # and monotonically across the true edge, so solve f^t(x) = target
        # along the frozen path
        v_in = _apply_path(spec, x_in, path)
        v_out = _apply_path(spec, x_out, path)
        if not (min(v_in, v_out) - 1e-12 <= target <= max(v_in, v_out) + 1e-12):
            return x_in
        a, b = x_in, x_out
        for _ in range(70):
            m = 0.5 * (a + b)
            vm = _apply_path(spec, m, path)
            if (vm < target) == (v_in < target):
                a = m
            else:
                b = m
        return 0.5 * (a + b)

    step = xs[1] - xs[0]
    covered = 0.0
    for (i, j, t) in runs:
        eps = step * 1e-6
        left_out = None
        right_out = None
        if i == 0:
            if _first_return_time(spec, lo + eps, J, horizon) == t:
                left = lo
            else:
                left, left_out = refine(xs[0], lo, t)
        elif xs[i - 1] < spec.c <= xs[i]:
            left = spec.c  # run begins at the break point
        else:
            left, left_out = refine(xs[i], xs[i - 1], t)
        if j == len(xs) - 1:
            if _first_return_time(spec, hi - eps, J, horizon) == t:
                right = hi
            else:
                right, right_out = refine(xs[j], hi, t)
        elif xs[j] < spec.c <= xs[j + 1]:
            right = spec.c  # run ends at the break point
        else:
            right, right_out = refine(xs[j], xs[j + 1], t)
        # drop unresolvably thin runs: within a branch of width w the
        # tolerance ball around c smears images by about |J|/w * tolerance,
        # so image claims at FULL_TOLERANCE are only decidable above this
        # width; the remainder is measured, not guessed at
        if right - left <= max(2 * tol, (hi - lo) * 10 * tol / FULL_TOLERANCE):
            continue
        # constant-return-time audit on interior samples; a failure means the
        # run still holds branch structure below grid resolution (plateaus
        # accumulating at c), which is dropped into uncovered_measure
        if any(
            _first_return_time(spec, left + frac * (right - left), J, horizon) != t
            for frac in (0.25, 0.5, 0.75)
        ):
            continue
        # a branch is a single monotone composition: all of the run must
        # share one branch path, else it is a conglomerate of equal-time
        # pieces with sub-resolution gaps and is dropped as uncovered
        w = right - left
        paths = []
        for frac in (1e-6, 0.5, 1.0 - 1e-6):
            p = _branch_path(spec, left + frac * w, t)
            if p is None:
                p = _branch_path(spec, left + (frac if frac == 0.5 else (1e-3 if frac < 0.5 else 1.0 - 1e-3)) * w, t)
            if p is not None:
                paths.append(p)
        if len(paths) < 2 or any(p != paths[0] for p in paths[1:]):
            continue
        path = paths[0]
        if left_out is not None:
            left = polish_edge(left, left_out, path, lo)
        if right_out is not None:
            right = polish_edge(right, right_out, path, hi)
        img_lo = _apply_path(spec, left, path) if abs(left - spec.c) > 10 * tol else _directed_iterate(
            spec, spec.c, Side.PLUS, t
        )
        img_hi = _apply_path(spec, right, path) if abs(right - spec.c) > 10 * tol else _directed_iterate(
            spec, spec.c, Side.MINUS, t
        )
        img_lo = min(max(img_lo, 0.0), 1.0)
        img_hi = min(max(img_hi, 0.0), 1.0)
        touches = abs(left - spec.c) <= 10 * tol or abs(right - spec.c) <= 10 * tol
        full = abs(img_lo - lo) <= FULL_TOLERANCE and abs(img_hi - hi) <= FULL_TOLERANCE
        branches.append(
            ReturnMapBranch(
                domain=(left, right),
                return_time=t,
                image=(img_lo, img_hi),
                is_full=full,
                touches_c=touches,
            )
        )
        covered += right - left
    return ReturnMapRec(J=J, branches=branches, uncovered_measure=max((hi - lo) - covered, 0.0))


# ---------------------------------------------------------------------------
# gaps and avoidance


def gaps(
    spec: LorenzMapSpec,
    J: tuple[float, float],
    max_order: int = 25,
    budget: int = 100_000,
) -> list[GapRecord]:
    """Backward enumeration of the intervals that reach J monotonically.

    J itself has order 0; each further gap is a one-branch preimage of a
    known gap that stays clear of J until it lands on it. Gaps are verified
    to map onto J at their order.
    """
    lo, hi = J
    v0, v1 = critical_values(spec)
    tol = spec.tolerance
    out: list[GapRecord] = [GapRecord(gap=J, order=0, image_is_J=True)]
    seen = {(round(lo, 12), round(hi, 12))}
    frontier = [(lo, hi)]
    depth = 0
    while frontier and depth < max_order and len(out) < budget:
        depth += 1
        nxt: list[tuple[float, float]] = []
        for (u, v) in frontier:
            for side, vmin, vmax in (("left", 0.0, v1), ("right", v0, 1.0)):
                if u < vmin - tol or v > vmax + tol:
                    continue  # clipped preimage would abut c and meet J
                uu = float(branch_inverse_array(spec, side, np.array([u]))[0])
                vv = float(branch_inverse_array(spec, side, np.array([v]))[0])
                if math.isnan(uu) or math.isnan(vv) or vv - uu <= 2 * tol:
                    continue
                if uu < hi and vv > lo:
                    continue  # meets J: those points belong to the gap J itself
                key = (round(uu, 12), round(vv, 12))
                if key in seen:
                    continue
                seen.add(key)
                img = push_interval(spec, (uu, vv), depth)
                ok = img is not None and abs(img[0] - lo) <= FULL_TOLERANCE and abs(img[1] - hi) <= FULL_TOLERANCE
                shares = min(abs(uu - lo), abs(uu - hi), abs(vv - lo), abs(vv - hi)) <= 10 * tol
                out.append(
                    GapRecord(gap=(uu, vv), order=depth, image_is_J=bool(ok), touches_boundary=shares)
                )
                nxt.append((uu, vv))
                if len(out) >= budget:
                    break
        frontier = nxt
    return out


def phobic_measure(
    spec: LorenzMapSpec,
    J: tuple[float, float],
    n: int = 50,
    grid: int = 100_000,
) -> PhobicEstimate:
    """Fraction of a uniform grid whose first n iterates (time 0 included)
    stay outside J."""
    lo, hi = J
    if not (lo < spec.c < hi):
        raise ValueError("J must contain c")
    xs = (np.arange(grid) + 0.5) / grid
    alive = ~((xs > lo) & (xs < hi))
    y = xs.copy()
    for _ in range(n):
        y[alive] = eval_array(spec, y[alive])
        alive &= ~np.isnan(y)
        alive &= ~((y > lo) & (y < hi))
    cells = tuple(int(i) for i in np.nonzero(alive)[0])
    return PhobicEstimate(
        J=J,
        n=n,
        surviving_measure=float(alive.sum()) / grid,
        surviving_cells=cells,
        grid=grid,
    )


def mane_expansion_check(
    spec: LorenzMapSpec,
    J: tuple[float, float],
    samples: int = 100_000,
    n: int = 40,
    rng: np.random.Generator | None = None,
) -> ExpansionFit:
    """Fit |Df^k| ~ C lambda^k over orbits avoiding J for n steps.

    Caller contract: the map should have no neutral orbits outside J up to
    moderate period, else the expansion statement does not apply.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    lo, hi = J
    xs = rng.uniform(0.0, 1.0, samples)
    xs = xs[(xs <= lo) | (xs >= hi)]
    alive = np.ones(xs.shape, dtype=bool)
    y = xs.copy()
    for _ in range(n):
        y[alive] = eval_array(spec, y[alive])
        alive &= ~np.isnan(y)
        alive &= ~((y > lo) & (y < hi))
    survivors = xs[alive]
    if survivors.size < 10:
        raise ValueError(f"insufficient survivors: {survivors.size} < 10")
    # pooled regression of cumulative log-derivative against step count
    y = survivors.copy()
    cum = np.zeros(survivors.shape)
    ks: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    mins = np.full(survivors.shape, np.inf)
    for k in range(1, n + 1):
        d = np.abs(deriv_array(spec, y))
        cum = cum + np.log(d)
        y = eval_array(spec, y)
        ks.append(np.full(survivors.shape, float(k)))
        vals.append(cum.copy())
        mins = np.minimum(mins, cum)
    K = np.concatenate(ks)
    V = np.concatenate(vals)
    kbar, vbar = K.mean(), V.mean()
    slope = float(((K - kbar) * (V - vbar)).sum() / ((K - kbar) ** 2).sum())
    lam = math.exp(slope)
    prefactor = float(np.exp(mins.min()))
    return ExpansionFit(lam=lam, prefactor=prefactor, survivors=int(survivors.size), n=n, passed=lam > 1.0)


# ---------------------------------------------------------------------------
# root of a periodic nice interval


def root_interval(
    spec: LorenzMapSpec,
    J: tuple[float, float],
    max_period: int = 12,
    catalog: list[PeriodicOrbitRecord] | None = None,
    horizon: int = 10_000,
) -> RootIntervalResult:
    """Smallest periodic nice interval strictly containing closure(J) with
    boundary periods bounded by J's own; (0,1) when no candidate exists."""
    lo, hi = J
    tol = spec.tolerance
    if catalog is None:
        catalog = find_periodic_points(spec, max_period)
    nice = is_nice(spec, J, horizon)
    notes = []
    if not nice.is_nice:
        notes.append("input interval failed the niceness probe")
    per_a, per_b = nice.boundary_periodic
    per_a = per_a or max_period
    per_b = per_b or max_period

    best: tuple[float, float] | None = None
    count = 0
    for o1 in catalog:
        if o1.period > per_a:
            continue
        left_pts = [p for p in o1.points if p <= lo - tol]
        if not left_pts:
            continue
        a2 = max(left_pts)
        for o2 in catalog:
            if o2.period > per_b:
                continue
            right_pts = [q for q in o2.points if q >= hi + tol]
            if not right_pts:
                continue
            b2 = min(right_pts)
            inside = [p for p in o1.points + o2.points if a2 + tol < p < b2 - tol]
            if inside:
                continue
            count += 1
            if best is None:
                best = (a2, b2)
            else:
                best = (max(best[0], a2), min(best[1], b2))
    if best is None:
        return RootIntervalResult(
            interval=(0.0, 1.0),
            candidates=0,
            notes=notes + ["no periodic nice candidate found; using the whole interval"],
        )
    # consistency spot check: the root boundary orbit must avoid the root interval
    a2, b2 = best
    chk = is_nice(spec, best, min(horizon, 10_000))
    if not chk.is_nice:
        notes.append("intersection of candidates failed the niceness probe")
    for g in gaps(spec, J, max_order=6, budget=64)[1:4]:
        if not g.image_is_J:
            notes.append(f"gap {g.gap} at order {g.order} failed to map onto J")
    return RootIntervalResult(interval=best, candidates=count, notes=notes)
