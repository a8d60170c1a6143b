"""Periodic orbit search and classification on monotone laps.

The search scans a fine grid of sign changes of f^n(x) - x, bisects each
bracket in a batch, and adds a minima fallback for tangential (saddle-node)
roots that produce no sign change. Every accepted orbit is re-verified
against |f^period(x) - x| <= 10 * tolerance, which also discards brackets
that converged onto a discontinuity of f^n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .map_core import (
    LorenzMapSpec,
    Side,
    apply_raw,
    branch_inverse_array,
    derivative,
    eval_array,
)
from .orbits import itinerary


class PeriodicSearchError(ValueError):
    pass


class NoPeriodicOrbitFound(PeriodicSearchError):
    pass


class VariationalPrincipleViolated(PeriodicSearchError):
    pass


NEUTRAL_TOLERANCE = 1e-4


@dataclass
class Lap:
    interval: tuple[float, float]
    n: int
    itinerary_prefix: str


@dataclass
class PeriodicOrbitRecord:
    points: list[float]  # one cycle in orbit order, starting at the smallest point
    period: int
    multiplier: float
    kind: str  # attracting | repelling | neutral | super
    side_word: str
    neutral_attracting_probe: bool | None = None

    def min_point(self) -> float:
        return min(self.points)

    def intersects(self, lo: float, hi: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= p <= hi + tol for p in self.points)

    def to_dict(self) -> dict:
        d = {
            "points": list(self.points),
            "period": self.period,
            "multiplier": self.multiplier,
            "kind": self.kind,
            "side_word": self.side_word,
        }
        if self.neutral_attracting_probe is not None:
            d["neutral_attracting_probe"] = self.neutral_attracting_probe
        return d


def laps(spec: LorenzMapSpec, n: int, budget: int = 1 << 16) -> list[Lap]:
    """Maximal intervals on which f^n is continuous and monotone.

    Boundaries are the preimages of c up to depth n-1, found by pulling c
    back through the branch inverses.
    """
    if n > 30:
        raise ValueError("n capped at 30 (lap count grows like 2^n)")
    boundaries = {0.0, 1.0, spec.c}
    level = np.array([spec.c])
    for _ in range(n - 1):
        pre_l = branch_inverse_array(spec, "left", level)
        pre_r = branch_inverse_array(spec, "right", level)
        level = np.concatenate([pre_l, pre_r])
        level = level[~np.isnan(level)]
        level = np.unique(np.round(level, 14))
        boundaries.update(float(v) for v in level)
        if len(boundaries) > budget:
            raise PeriodicSearchError(
                f"lap budget {budget} exceeded at pullback depth with {len(boundaries)} boundaries"
            )
    pts = sorted(boundaries)
    out = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi - lo <= 2 * spec.tolerance:
            continue
        mid = 0.5 * (lo + hi)
        word = itinerary(spec, mid, Side.NONE, n).word
        out.append(Lap(interval=(lo, hi), n=n, itinerary_prefix=word))
    return out


def _iterate_array(spec: LorenzMapSpec, x: np.ndarray, n: int) -> np.ndarray:
    y = np.asarray(x, dtype=float).copy()
    for _ in range(n):
        y = eval_array(spec, y)
    return y


def _directed_cycle(spec: LorenzMapSpec, x: float, n: int) -> list[float] | None:
    """Orbit of length n that closes up to x within 10 * tolerance, or None.

    An orbit through the break point is accepted only if a one-sided
    continuation closes up (a super-attractor cycle); everything else that
    lands on c is a bisection artifact on a discontinuity of f^n.
    """
    tol = spec.tolerance
    for first_side in (Side.NONE, Side.MINUS, Side.PLUS):
        pts = [x]
        good = True
        used_side = False
        for _ in range(n):
            cur = pts[-1]
            if abs(cur - spec.c) <= tol:
                if first_side == Side.NONE or used_side:
                    good = False
                    break
                pts.append(apply_raw(spec, cur, first_side))
                used_side = True
            else:
                pts.append(apply_raw(spec, cur, Side.NONE))
        if good and abs(pts[n] - pts[0]) <= 10 * tol:
            return pts[:n]
        if first_side == Side.NONE and not any(abs(v - spec.c) <= tol for v in pts):
            return None  # undirected orbit complete but not closed
    return None


def _roots_for_period(spec: LorenzMapSpec, n: int, resolution: int) -> list[float]:
    grid = np.linspace(0.0, 1.0, resolution + 1)
    fn = _iterate_array(spec, grid, n)
    g = fn - grid
    ok = ~np.isnan(g)
    roots: list[float] = []

    # exact hits on the grid
    zero = ok & (np.abs(g) <= 10 * spec.tolerance)
    roots.extend(float(v) for v in grid[zero])

    s = np.sign(g)
    pair = ok[:-1] & ok[1:] & (s[:-1] * s[1:] < 0)
    lo = grid[:-1][pair].copy()
    hi = grid[1:][pair].copy()
    if lo.size:
        lo_neg = g[:-1][pair] < 0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            gm = _iterate_array(spec, mid, n) - mid
            move_lo = (gm < 0) == lo_neg
            lo = np.where(move_lo, mid, lo)
            hi = np.where(move_lo, hi, mid)
        roots.extend(float(v) for v in 0.5 * (lo + hi))

    # tangential roots: local minima of |g| that nearly touch zero
    absg = np.abs(g)
    cand = np.zeros(absg.shape, dtype=bool)
    cand[1:-1] = (
        ok[1:-1]
        & ok[:-2]
        & ok[2:]
        & (absg[1:-1] <= absg[:-2])
        & (absg[1:-1] <= absg[2:])
        & (absg[1:-1] < 1e-7)
    )
    for i in np.nonzero(cand)[0]:
        a, b = grid[i - 1], grid[i + 1]
        for _ in range(80):
            m1 = a + (b - a) / 3
            m2 = b - (b - a) / 3
            g1 = abs(float(_iterate_array(spec, np.array([m1]), n)[0]) - m1)
            g2 = abs(float(_iterate_array(spec, np.array([m2]), n)[0]) - m2)
            if g1 < g2:
                b = m2
            else:
                a = m1
        x = 0.5 * (a + b)
        fx = float(_iterate_array(spec, np.array([x]), n)[0])
        if abs(fx - x) <= 10 * spec.tolerance:
            roots.append(x)
    return roots


def _neutral_probe(spec: LorenzMapSpec, cycle: list[float], period: int) -> bool:
    """Does a one-sided perturbation fall back onto the cycle?"""
    x = cycle[0] + 1e-6
    if x >= 1.0:
        x = cycle[0] - 1e-6
    tol = spec.tolerance
    for _ in range(4000 * period):
        if abs(x - spec.c) <= tol:
            return False
        x = apply_raw(spec, x, Side.NONE)
    return min(abs(x - p) for p in cycle) < 1e-4


def _polish_root(spec: LorenzMapSpec, x: float, n: int, h: float = 2e-5) -> float:
    """Refine a fixed point of f^n near x; handles tangential roots by
    minimizing |f^n - id| when there is no sign change."""

    def g(v: float) -> float | None:
        y = v
        for _ in range(n):
            if abs(y - spec.c) <= spec.tolerance:
                return None
            y = apply_raw(spec, y, Side.NONE)
        return y - v

    a, b = max(x - h, 0.0), min(x + h, 1.0)
    ga, gb = g(a), g(b)
    if ga is None or gb is None:
        return x
    if (ga < 0) != (gb < 0):
        for _ in range(70):
            m = 0.5 * (a + b)
            gm = g(m)
            if gm is None:
                return x
            if (gm < 0) == (ga < 0):
                a = m
            else:
                b = m
        return 0.5 * (a + b)
    for _ in range(90):
        m1 = a + (b - a) / 3
        m2 = b - (b - a) / 3
        g1, g2 = g(m1), g(m2)
        if g1 is None or g2 is None:
            return x
        if abs(g1) < abs(g2):
            b = m2
        else:
            a = m1
    return 0.5 * (a + b)


def _merge_radius(rec: PeriodicOrbitRecord, tol: float) -> float:
    """Roots of f^n - id are isolated at scale |g| ~ |mult - 1| * dx, but a
    tangential root (multiplier near 1) passes the closure test throughout a
    basin of width ~ (tol / g''')^(1/3); near-neutral records therefore
    merge over a much wider radius."""
    gap = abs(abs(rec.multiplier) - 1.0)
    if gap <= 10 * NEUTRAL_TOLERANCE:
        return 2e-3
    return min(2e-3, max(1e-7, 30.0 * tol / gap))


def find_periodic_points(
    spec: LorenzMapSpec, max_period: int = 12, resolution: int = 1 << 14
) -> list[PeriodicOrbitRecord]:
    """All periodic orbits of period <= max_period found at the grid scale."""
    if max_period > 20:
        raise ValueError("max_period capped at 20")
    tol = spec.tolerance
    raw: list[PeriodicOrbitRecord] = []
    seen: set[tuple[int, int]] = set()

    def register(x: float, n: int):
        orbit = _directed_cycle(spec, x, n)
        if orbit is None:
            return
        # minimal period divides n
        period = n
        for d in range(1, n):
            if n % d == 0 and abs(orbit[d] - orbit[0]) <= 10 * tol:
                period = d
                break
        cycle = orbit[:period]
        start = int(np.argmin(cycle))
        cycle = cycle[start:] + cycle[:start]
        is_super = any(abs(p - spec.c) <= tol for p in cycle)
        if not is_super:
            # the rotation to the smallest point loses accuracy on strongly
            # repelling cycles (the root error is amplified along the way);
            # a guarded Newton step on f^period - id restores it cheaply
            def closure_gap(v: float) -> float | None:
                y = v
                for _ in range(period):
                    if abs(y - spec.c) <= tol:
                        return None
                    y = apply_raw(spec, y, Side.NONE)
                return y - v

            mult0 = 1.0
            for p in cycle:
                if abs(p - spec.c) > tol:
                    mult0 *= derivative(spec, p)
            gap0 = closure_gap(cycle[0])
            if gap0 is not None and abs(gap0) > 10 * tol and abs(mult0 - 1.0) > 1e-3:
                x0 = cycle[0]
                g = gap0
                for _ in range(5):
                    step = g / (mult0 - 1.0)
                    if abs(step) > 1e-6:
                        break
                    x0 -= step
                    g = closure_gap(x0)
                    if g is None or abs(g) <= tol:
                        break
                if g is not None and abs(g) <= 10 * tol:
                    rebuilt = _directed_cycle(spec, x0, period)
                    if rebuilt is not None:
                        cycle = rebuilt
                else:
                    x1 = _polish_root(spec, cycle[0], period)
                    rebuilt = _directed_cycle(spec, x1, period)
                    if rebuilt is not None:
                        cycle = rebuilt
        if is_super:
            mult = 0.0
            kind = "super"
        else:
            mult = 1.0
            for p in cycle:
                mult *= derivative(spec, p)
            if abs(abs(mult) - 1.0) <= NEUTRAL_TOLERANCE:
                kind = "neutral"
            elif abs(mult) < 1.0:
                kind = "attracting"
            else:
                kind = "repelling"
        # key on the sorted cycle: the rotation to the smallest point is
        # ambiguous when two cycle points nearly coincide, so min-point keys
        # would register the same orbit twice
        key = (period,) + tuple(int(round(p / 1e-7)) for p in sorted(cycle))
        if key in seen:
            return
        seen.add(key)
        bits = []
        for p in cycle:
            if abs(p - spec.c) <= tol:
                bits.append("*")
            else:
                bits.append("0" if p < spec.c else "1")
        raw.append(
            PeriodicOrbitRecord(
                points=cycle,
                period=period,
                multiplier=mult,
                kind=kind,
                side_word="".join(bits),
            )
        )

    # endpoint fixed points are part of the map's definition
    register(0.0, 1)
    register(1.0, 1)
    for n in range(1, max_period + 1):
        for x in _roots_for_period(spec, n, resolution):
            if 0.0 < x < 1.0:
                register(x, n)

    # stability-aware cluster merge: a tangential (near-neutral) root passes
    # the closure test over a wide basin, and rotated twins of one orbit can
    # survive the exact key; compare sorted cycles over a small neighbor
    # window in min-point order
    def residual(r: PeriodicOrbitRecord) -> float:
        if "*" in r.side_word:
            return 0.0
        y = r.points[0]
        for _ in range(r.period):
            y = apply_raw(spec, y, Side.NONE)
        return abs(y - r.points[0])

    raw.sort(key=lambda r: (r.period, r.points[0]))
    res_cache = [residual(r) for r in raw]
    sorted_pts = [sorted(r.points) for r in raw]
    keep = [True] * len(raw)
    for i in range(len(raw)):
        if not keep[i]:
            continue
        j = i + 1
        while j < len(raw) and raw[j].period == raw[i].period:
            gap = raw[j].points[0] - raw[i].points[0]
            if gap > 2e-3:  # beyond the widest possible merge radius
                break
            if keep[j]:
                radius = max(_merge_radius(raw[i], tol), _merge_radius(raw[j], tol))
                if gap <= radius and max(
                    abs(a - b) for a, b in zip(sorted_pts[i], sorted_pts[j])
                ) <= radius:
                    if res_cache[j] < res_cache[i]:
                        raw[i], raw[j] = raw[j], raw[i]
                        res_cache[i], res_cache[j] = res_cache[j], res_cache[i]
                        sorted_pts[i], sorted_pts[j] = sorted_pts[j], sorted_pts[i]
                    keep[j] = False
            j += 1
    merged = [r for r, k in zip(raw, keep) if k]
    for rec in merged:
        if rec.kind == "neutral":
            rec.neutral_attracting_probe = _neutral_probe(spec, rec.points, rec.period)
    return merged


def count_nonrepelling(spec: LorenzMapSpec, max_period: int = 12, resolution: int = 1 << 14) -> int:
    """Number of distinct non-repelling orbits (attracting, neutral or super)."""
    catalog = find_periodic_points(spec, max_period, resolution)
    return sum(1 for r in catalog if r.kind in ("attracting", "neutral", "super"))


def minimal_period_orbit_in(
    spec: LorenzMapSpec,
    J: tuple[float, float],
    max_period: int = 12,
    resolution: int = 1 << 14,
    catalog: list[PeriodicOrbitRecord] | None = None,
) -> PeriodicOrbitRecord:
    """The unique minimal-period orbit meeting J (closure, at tolerance).

    Raises VariationalPrincipleViolated when two distinct orbits tie: either
    the no-attractor hypothesis of the underlying uniqueness statement fails
    for this map, or the catalog holds a numerical duplicate.
    """
    lo, hi = J
    tol = spec.tolerance
    if catalog is None:
        catalog = find_periodic_points(spec, max_period, resolution)
    hits = [r for r in catalog if r.intersects(lo, hi, tol)]
    if not hits:
        raise NoPeriodicOrbitFound(f"none found (budget): no orbit of period <= {max_period} meets {J}")
    best = min(r.period for r in hits)
    winners = [r for r in hits if r.period == best]
    if len(winners) > 1:
        raise VariationalPrincipleViolated(
            f"variational principle violated: {len(winners)} orbits of period {best} meet {J} "
            "(hypothesis violation or numeric duplicate)"
        )
    return winners[0]
