"""Renormalization intervals: detection, classification, cycles and traps.

A renormalization interval is a nice interval (a, b) around c with periodic
endpoints whose one-sided boundary-period returns map each side back into
[a, b]; equivalently the first-return map is again a two-branch map of the
same kind. Regular means both one-sided returns cover c. When a proper
renormalization is absent but a periodic attractor pulls one side of c into
itself, the structure degenerates to a half-interval (a, c) or (c, a) that
self-maps with the complementary critical orbit staying clear.

Candidate boundaries come exclusively from the periodic-orbit catalog, so
renormalizations with boundary periods beyond the search budget are
invisible; every certification records the budgets it ran under.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .map_core import LorenzMapSpec, Side, apply_raw, branch_value, critical_values
from .periodic import PeriodicOrbitRecord, find_periodic_points
from .return_maps import is_nice, push_interval


@dataclass
class RenormalizationRecord:
    J: tuple[float, float]
    period_a: int
    period_b: int
    regular: bool
    left_image: tuple[float, float]
    right_image: tuple[float, float]

    @property
    def width(self) -> float:
        return self.J[1] - self.J[0]

    def to_dict(self) -> dict:
        return {
            "a": self.J[0],
            "b": self.J[1],
            "period_a": self.period_a,
            "period_b": self.period_b,
            "regular": self.regular,
            "left_image": list(self.left_image),
            "right_image": list(self.right_image),
        }


@dataclass
class DegenerateRecord:
    I: tuple[float, float]  # half interval with c as one endpoint
    n: int
    avoidance_horizon: int
    boundary_point: float

    def to_dict(self) -> dict:
        return {
            "interval": list(self.I),
            "n": self.n,
            "avoidance_horizon": self.avoidance_horizon,
            "boundary_point": self.boundary_point,
        }


@dataclass
class NestedSequence:
    intervals: list[RenormalizationRecord]
    maximal_nonregular: RenormalizationRecord | None = None
    degenerate: DegenerateRecord | None = None
    depth_cap_hit: bool = False
    notes: list[str] = field(default_factory=list)

    def chain(self) -> list[RenormalizationRecord]:
        """Regular chain followed by the maximal non-regular interval, if any."""
        out = list(self.intervals)
        if self.maximal_nonregular is not None:
            out.append(self.maximal_nonregular)
        return out

    def to_dict(self) -> dict:
        return {
            "chain": [r.to_dict() for r in self.intervals],
            "j_max": self.maximal_nonregular.to_dict() if self.maximal_nonregular else None,
            "degenerate": self.degenerate.to_dict() if self.degenerate else None,
            "depth_cap_hit": self.depth_cap_hit,
            "notes": self.notes,
        }


def _one_sided_images(
    spec: LorenzMapSpec, J: tuple[float, float], la: int, rb: int
) -> tuple[tuple[float, float] | None, tuple[float, float] | None, bool]:
    """Images f^period(a)([a,c)) and f^period(b)((c,b]) tracked monotonically.

    Returns (left_image, right_image, clean). clean is False when an image
    straddles c mid-way or re-enters J before the boundary period, which
    disqualifies the candidate (the side would not be a single branch).
    """
    a, b = J
    tol = spec.tolerance
    c = spec.c

    def track(u: float, v: float, steps: int) -> tuple[float, float] | None:
        for k in range(steps):
            if u + tol < c < v - tol:
                return None
            if k > 0 and u > a + tol and v < b - tol:
                return None  # early return into J: not a single return branch
            side = "left" if v <= c + tol else "right"
            lo_d, hi_d = (0.0, c) if side == "left" else (c, 1.0)
            u = min(max(branch_value(spec, side, min(max(u, lo_d), hi_d)), 0.0), 1.0)
            v = min(max(branch_value(spec, side, min(max(v, lo_d), hi_d)), 0.0), 1.0)
        return (u, v)

    li = track(a, c, la)
    ri = track(c, b, rb)
    return li, ri, li is not None and ri is not None


def is_renormalization(
    spec: LorenzMapSpec,
    J: tuple[float, float],
    horizon: int = 10_000,
    catalog: list[PeriodicOrbitRecord] | None = None,
    max_period: int = 12,
) -> tuple[bool, RenormalizationRecord | None, str]:
    """Certify J = (a, b): periodic boundaries, niceness, one-sided return
    inclusions at the boundary periods, and regularity (both one-sided
    returns cover c)."""
    a, b = J
    tol = spec.tolerance
    if not (a < spec.c < b):
        return False, None, "c not inside J"
    if a <= tol and b >= 1.0 - tol:
        return False, None, "whole interval is not a proper renormalization"

    def detect_period(x: float) -> int | None:
        y = x
        for k in range(1, horizon + 1):
            if abs(y - spec.c) <= tol:
                return None
            y = apply_raw(spec, y, Side.NONE)
            if abs(y - x) <= 10 * tol:
                return k
            if k > max(64, 4 * max_period):
                return None
        return None

    la = detect_period(a)
    rb = detect_period(b)
    if la is None or rb is None:
        return False, None, f"boundary not periodic within budget (periods {la}, {rb})"
    nice = is_nice(spec, J, horizon)
    if not nice.is_nice:
        return False, None, "boundary orbit re-enters J"
    li, ri, clean = _one_sided_images(spec, J, la, rb)
    if not clean:
        return False, None, "one-sided image split at c or returned early"
    if not (li[0] >= a - 10 * tol and li[1] <= b + 10 * tol):
        return False, None, f"f^{la}([a,c)) = {li} not inside [a,b]"
    if not (ri[0] >= a - 10 * tol and ri[1] <= b + 10 * tol):
        return False, None, f"f^{rb}((c,b]) = {ri} not inside [a,b]"
    regular = (li[1] > spec.c + tol) and (ri[0] < spec.c - tol)
    rec = RenormalizationRecord(
        J=J, period_a=la, period_b=rb, regular=regular, left_image=li, right_image=ri
    )
    return True, rec, "ok"


def _candidate_pairs(
    spec: LorenzMapSpec, catalog: list[PeriodicOrbitRecord]
) -> list[tuple[float, float, int, int]]:
    """Boundary candidates (a, b, period_a, period_b) from orbit pairs.

    a is an orbit's point adjacent to c from below, b another orbit's point
    adjacent from above; both orbits must stay clear of (a, b), which is an
    exact finite-set check on catalog orbits (no iteration needed). The
    orbit of a entering (a, b) at its first step already disqualifies any
    boundary period above 1, which prunes most pairs of expanding maps.
    """
    tol = spec.tolerance
    c = spec.c
    info = []
    for o in catalog:
        below = [p for p in o.points if p < c - tol]
        above = [p for p in o.points if p > c + tol]
        a = max(below) if below else None
        b = min(above) if above else None

        def successor(x):
            i = o.points.index(x)
            return o.points[(i + 1) % o.period]

        info.append(
            (
                a,
                b,
                o.period,
                successor(a) if a is not None else None,
                successor(b) if b is not None else None,
            )
        )
    pairs: dict[tuple[float, float], tuple[int, int]] = {}
    for (lo_i, hi_i, per_i, fa_i, _) in info:
        if lo_i is None:
            continue
        for (lo_j, hi_j, per_j, _, fb_j) in info:
            if hi_j is None:
                continue
            a, b = lo_i, hi_j
            if a <= tol and b >= 1.0 - tol:
                continue
            # orbit of a must not enter (a, b): its least point above c is >= b
            if hi_i is not None and hi_i < b - tol:
                continue
            # orbit of b must not enter (a, b): its greatest point below c is <= a
            if lo_j is not None and lo_j > a + tol:
                continue
            # unless a is fixed, f((a,c)) = (f(a), v1) must clear (a, b) at once
            if per_i > 1 and fa_i < b - tol:
                continue
            if per_j > 1 and fb_j > a + tol:
                continue
            key = (a, b)
            if key not in pairs:
                pairs[key] = (per_i, per_j)
    return sorted(
        ((a, b, la, rb) for (a, b), (la, rb) in pairs.items()),
        key=lambda t: t[0] - t[1],
    )


def detect_degenerate(
    spec: LorenzMapSpec,
    max_period: int = 12,
    horizon: int = 10_000,
    catalog: list[PeriodicOrbitRecord] | None = None,
) -> DegenerateRecord | None:
    """Widest half-interval (alpha, c) or (c, alpha) with f^period(alpha)
    mapping it into itself while both the orbit of alpha and the opposite
    one-sided critical orbit stay clear of it."""
    tol = spec.tolerance
    c = spec.c
    if catalog is None:
        catalog = find_periodic_points(spec, max_period)
    v0, v1 = critical_values(spec)

    def orbit_points(start: float) -> np.ndarray:
        pts = []
        x = start
        for _ in range(horizon):
            pts.append(x)
            if abs(x - c) <= tol:
                break
            nxt = apply_raw(spec, x, Side.NONE)
            if abs(nxt - x) <= tol:
                pts.append(nxt)
                break
            x = nxt
        return np.asarray(pts)

    orbit_v0 = orbit_points(v0)  # forward orbit of f(c+)
    orbit_v1 = orbit_points(v1)  # forward orbit of f(c-)

    def avoids(arr: np.ndarray, lo: float, hi: float) -> bool:
        return not bool(np.any((arr > lo + tol) & (arr < hi - tol)))

    best: DegenerateRecord | None = None
    for o in catalog:
        if o.kind == "super":
            continue
        for p in o.points:
            if abs(p - c) <= tol:
                continue
            if p < c:
                I = (p, c)
                img = push_interval(spec, I, o.period)
                inside = img is not None and img[0] >= p - 10 * tol and img[1] <= c + 10 * tol
                opp = avoids(orbit_v0, *I)
            else:
                I = (c, p)
                img = push_interval(spec, I, o.period)
                inside = img is not None and img[0] >= c - 10 * tol and img[1] <= p + 10 * tol
                opp = avoids(orbit_v1, *I)
            if not (inside and opp):
                continue
            if not all(not (I[0] + tol < q < I[1] - tol) for q in o.points):
                continue
            if best is None or I[1] - I[0] > best.I[1] - best.I[0]:
                best = DegenerateRecord(
                    I=I, n=o.period, avoidance_horizon=horizon, boundary_point=p
                )
    return best


def find_renormalizations(
    spec: LorenzMapSpec,
    max_period: int = 12,
    max_depth: int = 8,
    horizon: int = 10_000,
    catalog: list[PeriodicOrbitRecord] | None = None,
) -> NestedSequence:
    """Nested sequence of certified renormalization intervals.

    Regular intervals are sorted by strict inclusion; if any non-regular
    interval certifies, their union re-certifies as the maximal non-regular
    interval and ends the chain. Otherwise a degenerate half-interval is
    searched for. depth_cap_hit marks a chain that filled max_depth with
    still-shrinking diameters (an infinitely-renormalizable candidate at
    these budgets).
    """
    if catalog is None:
        catalog = find_periodic_points(spec, max_period)
    notes: list[str] = [f"budgets: max_period={max_period}, max_depth={max_depth}, horizon={horizon}"]
    regular: list[RenormalizationRecord] = []
    nonregular: list[RenormalizationRecord] = []
    tol = spec.tolerance

    # one-sided critical orbits, used as an O(1) necessary condition:
    # f^period(a)([a,c)) = (a, f^(period(a)-1)(v1)) when the side certifies,
    # so the critical orbit must re-enter [a,b] at exactly that time
    v0, v1 = critical_values(spec)

    def short_orbit(start: float) -> list[float]:
        pts = [start]
        x = start
        for _ in range(max(p.period for p in catalog) if catalog else max_period):
            if abs(x - spec.c) <= tol:
                break
            x = apply_raw(spec, x, Side.NONE)
            pts.append(x)
        return pts

    orb_v0 = short_orbit(v0)
    orb_v1 = short_orbit(v1)

    for (a, b, la, rb) in _candidate_pairs(spec, catalog):
        if la > 1 and la - 1 < len(orb_v1) and not (a - tol <= orb_v1[la - 1] <= b + tol):
            continue
        if rb > 1 and rb - 1 < len(orb_v0) and not (a - tol <= orb_v0[rb - 1] <= b + tol):
            continue
        # boundary periodicity and niceness are exact catalog facts here;
        # only the one-sided return inclusions remain to be tracked
        li, ri, clean = _one_sided_images(spec, (a, b), la, rb)
        if not clean:
            continue
        if not (li[0] >= a - 10 * tol and li[1] <= b + 10 * tol):
            continue
        if not (ri[0] >= a - 10 * tol and ri[1] <= b + 10 * tol):
            continue
        rec = RenormalizationRecord(
            J=(a, b),
            period_a=la,
            period_b=rb,
            regular=(li[1] > spec.c + tol) and (ri[0] < spec.c - tol),
            left_image=li,
            right_image=ri,
        )
        (regular if rec.regular else nonregular).append(rec)

    regular.sort(key=lambda r: -r.width)
    chain: list[RenormalizationRecord] = []
    for rec in regular:
        if not chain:
            chain.append(rec)
            continue
        prev = chain[-1]
        a0, b0 = prev.J
        a1, b1 = rec.J
        if a1 > a0 + spec.tolerance and b1 < b0 - spec.tolerance:
            chain.append(rec)
        elif abs(a1 - a0) <= spec.tolerance and abs(b1 - b0) <= spec.tolerance:
            continue  # numerical duplicate
        else:
            notes.append(f"dropped non-nested regular interval {rec.J} against {prev.J}")

    depth_cap = False
    if len(chain) > max_depth:
        chain = chain[:max_depth]
        depth_cap = True
    elif len(chain) == max_depth and len(regular) >= max_depth:
        depth_cap = True
    diameters = [r.width for r in chain]
    if depth_cap and all(d2 < d1 for d1, d2 in zip(diameters, diameters[1:])):
        notes.append("solenoid candidate (depth-capped, diameters shrinking)")

    j_max: RenormalizationRecord | None = None
    degenerate: DegenerateRecord | None = None
    if nonregular:
        a = min(r.J[0] for r in nonregular)
        b = max(r.J[1] for r in nonregular)
        ok, rec, why = is_renormalization(spec, (a, b), horizon, catalog, max_period)
        if ok and not rec.regular:
            j_max = rec
        else:
            j_max = max(nonregular, key=lambda r: r.width)
            notes.append(f"union of non-regular intervals failed re-certification ({why})")
        if chain and not (chain[-1].J[0] < a and b < chain[-1].J[1]):
            notes.append("maximal non-regular interval not nested inside the deepest regular one")
    else:
        degenerate = detect_degenerate(spec, max_period, horizon, catalog)
    return NestedSequence(
        intervals=chain,
        maximal_nonregular=j_max,
        degenerate=degenerate,
        depth_cap_hit=depth_cap,
        notes=notes,
    )


def renormalization_cycle(spec: LorenzMapSpec, rec: RenormalizationRecord) -> list[tuple[float, float]]:
    """The period(a) forward images of (a,c) and period(b) images of (c,b)."""
    a, b = rec.J
    c = spec.c
    comps: list[tuple[float, float]] = []
    cur = (a, c)
    for _ in range(rec.period_a):
        comps.append(cur)
        nxt = push_interval(spec, cur, 1)
        cur = nxt if nxt is not None else cur
    cur = (c, b)
    for _ in range(rec.period_b):
        comps.append(cur)
        nxt = push_interval(spec, cur, 1)
        cur = nxt if nxt is not None else cur
    # pairwise-disjointness audit (shared endpoints allowed)
    tol = max(spec.tolerance * 10, 1e-9)
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            lo = max(comps[i][0], comps[j][0])
            hi = min(comps[i][1], comps[j][1])
            if hi - lo > tol and not (
                abs(comps[i][0] - comps[j][0]) <= tol and abs(comps[i][1] - comps[j][1]) <= tol
            ):
                raise ValueError(
                    f"cycle components {comps[i]} and {comps[j]} overlap beyond tolerance"
                )
    return comps


def trapping_region(
    spec: LorenzMapSpec,
    rec: RenormalizationRecord,
    probe_points: int = 100,
    probe_steps: int = 100,
    rng: np.random.Generator | None = None,
) -> list[tuple[float, float]]:
    """Union of gaps enclosing the renormalization cycle components.

    The gap around the cycle component at age i is the monotone pullback of
    J along the branches the component still has to traverse before landing
    in J; a forward-invariance spot check runs on random points of the
    union.
    """
    from .map_core import branch_inverse_array

    a, b = rec.J
    c = spec.c
    comps: list[tuple[float, float]] = []

    def walk(start: tuple[float, float], period: int):
        # forward pass: the side of each cycle component
        sides: list[str] = []
        cur = start
        for _ in range(period):
            sides.append("left" if cur[1] <= c + spec.tolerance else "right")
            nxt = push_interval(spec, cur, 1)
            if nxt is None:
                break
            cur = nxt
        comps.append(rec.J)
        # component i maps into J through sides[i:], so its gap is the
        # pullback of J along exactly that tail
        for i in range(1, len(sides)):
            lo, hi = rec.J
            for side in reversed(sides[i:]):
                vr_lo = branch_value(spec, side, 0.0 if side == "left" else c)
                vr_hi = branch_value(spec, side, c if side == "left" else 1.0)
                lo2 = min(max(lo, vr_lo), vr_hi)
                hi2 = min(max(hi, vr_lo), vr_hi)
                lo = float(branch_inverse_array(spec, side, np.array([lo2]))[0])
                hi = float(branch_inverse_array(spec, side, np.array([hi2]))[0])
            if not (math.isnan(lo) or math.isnan(hi)) and hi - lo > spec.tolerance:
                comps.append((lo, hi))

    walk((a, c), rec.period_a)
    walk((c, b), rec.period_b)
    # deduplicate by interval
    uniq: list[tuple[float, float]] = []
    for iv in comps:
        if not any(abs(iv[0] - u[0]) <= 1e-9 and abs(iv[1] - u[1]) <= 1e-9 for u in uniq):
            uniq.append(iv)
    uniq.sort()

    if rng is None:
        rng = np.random.default_rng(0)
    for _ in range(probe_points):
        k = int(rng.integers(0, len(uniq)))
        lo, hi = uniq[k]
        x = float(rng.uniform(lo, hi))
        for _ in range(probe_steps):
            if abs(x - c) <= spec.tolerance:
                break
            x = apply_raw(spec, x, Side.NONE)
            if not any(u[0] - 1e-9 <= x <= u[1] + 1e-9 for u in uniq):
                raise ValueError(f"invariance probe left the trapping region at x={x}")
    return uniq
