"""Orbit iteration with directed semantics, itineraries, limit-set estimates,
Lyapunov exponents and rotation numbers.

Orbits that land within tolerance of the break point without a side are
truncated and flagged instead of silently choosing a branch: the two sides
of c are distinct points for this dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .map_core import (
    DirectedPoint,
    LorenzMapSpec,
    Side,
    apply_raw,
    derivative,
)


@dataclass
class OrbitSegment:
    points: list[DirectedPoint]
    log_derivative_sum: float
    hit_critical_at: int | None = None

    @property
    def length(self) -> int:
        return len(self.points)

    def xs(self) -> np.ndarray:
        return np.array([p.x for p in self.points])


@dataclass
class Itinerary:
    word: str
    start: DirectedPoint


@dataclass
class LimitSetEstimate:
    cells: tuple[int, ...]
    resolution: int
    burn_in: int
    sample_len: int
    contains_c: bool
    truncated: bool = False

    def cell_intervals(self) -> list[tuple[float, float]]:
        w = 1.0 / self.resolution
        return [(i * w, (i + 1) * w) for i in self.cells]


@dataclass
class AlphaLimitEstimate:
    cells: tuple[int, ...]
    resolution: int
    depth: int
    node_count: int
    j_x_est: tuple[float, float] | None
    complete: bool


@dataclass
class LyapunovEstimate:
    value: float
    window_averages: list[float]
    steps: int
    tail_windows: int
    hit_critical: bool = False

    def __float__(self):
        return self.value


def _step(spec: LorenzMapSpec, x: float, side: Side) -> float:
    return apply_raw(spec, x, side)


def iterate_orbit(spec: LorenzMapSpec, x0: float, side: Side = Side.NONE, n: int = 100) -> OrbitSegment:
    """Forward orbit of up to n steps starting at (x0, side).

    The side applies to x0 only; later iterates landing within tolerance of c
    stop the orbit with hit_critical_at set. log_derivative_sum accumulates
    log|Df| over the steps taken, skipping a step made from the break point.
    """
    if not (0.0 <= x0 <= 1.0):
        raise ValueError("x0 outside [0,1]")
    tol = spec.tolerance
    pts = [DirectedPoint(x0, side)]
    logsum = 0.0
    hit = None
    x, s = x0, side
    if abs(x0 - spec.c) <= tol and s == Side.NONE:
        return OrbitSegment(pts, 0.0, hit_critical_at=0)
    for _ in range(n):
        at_c = abs(x - spec.c) <= tol
        if at_c and s == Side.NONE:
            hit = len(pts) - 1
            break
        if not at_c:
            logsum += math.log(abs(derivative(spec, x)))
        x = _step(spec, x, s)
        s = Side.NONE
        pts.append(DirectedPoint(x, s))
    return OrbitSegment(pts, logsum, hit_critical_at=hit)


def itinerary(spec: LorenzMapSpec, x0: float, side: Side = Side.NONE, n: int = 100) -> Itinerary:
    """Binary word: 0 when the iterate is left of c (or at c with side minus)."""
    seg = iterate_orbit(spec, x0, side, n)
    bits = []
    for p in seg.points[:n]:
        if abs(p.x - spec.c) <= spec.tolerance:
            if p.side == Side.NONE:
                break
            bits.append("0" if p.side == Side.MINUS else "1")
        else:
            bits.append("0" if p.x < spec.c else "1")
    return Itinerary(word="".join(bits), start=DirectedPoint(x0, side))


def lyapunov(
    spec: LorenzMapSpec,
    x0: float,
    n: int = 10_000,
    tail_windows: int = 10,
    side: Side = Side.NONE,
) -> LyapunovEstimate:
    """Lower Lyapunov exponent estimate: minimum of the trailing running
    averages of log|Df| (the liminf is approximated by a min over windows)."""
    if n < 1000:
        raise ValueError("n must be at least 1000")
    tol = spec.tolerance
    stride = max(1, n // 100)
    checkpoints = sorted({n - j * stride for j in range(tail_windows)} | {n})
    averages: list[float] = []
    x, s = x0, side
    total = 0.0
    k = 0
    hit = False
    nxt = 0
    while k < n:
        at_c = abs(x - spec.c) <= tol
        if at_c and s == Side.NONE:
            hit = True
            break
        if not at_c:
            d = abs(derivative(spec, x))
            if d <= 0:
                hit = True
                break
            total += math.log(d)
        x = apply_raw(spec, x, s)
        s = Side.NONE
        k += 1
        if nxt < len(checkpoints) and k == checkpoints[nxt]:
            averages.append(total / k)
            nxt += 1
    if not averages:
        averages = [total / max(k, 1)]
    return LyapunovEstimate(
        value=min(averages),
        window_averages=averages,
        steps=k,
        tail_windows=tail_windows,
        hit_critical=hit,
    )


def estimate_omega_limit(
    spec: LorenzMapSpec,
    x0: float,
    burn_in: int = 1000,
    sample_len: int = 10_000,
    resolution: int = 1024,
    side: Side = Side.NONE,
) -> LimitSetEstimate:
    """Cells visited by the orbit after burn-in, on a dyadic grid."""
    if burn_in + sample_len > 10**8:
        raise ValueError("burn_in + sample_len too large")
    tol = spec.tolerance
    x, s = x0, side
    truncated = False
    k = 0
    cells: set[int] = set()
    contains_c = False
    cw = 1.0 / resolution
    while k < burn_in + sample_len:
        at_c = abs(x - spec.c) <= tol
        if at_c and s == Side.NONE:
            truncated = True
            if k >= burn_in:
                contains_c = True
                cells.add(min(int(x * resolution), resolution - 1))
            break
        if k >= burn_in:
            cells.add(min(int(x * resolution), resolution - 1))
            if abs(x - spec.c) <= cw:
                contains_c = True
        x = apply_raw(spec, x, s)
        s = Side.NONE
        k += 1
    return LimitSetEstimate(
        cells=tuple(sorted(cells)),
        resolution=resolution,
        burn_in=burn_in,
        sample_len=sample_len,
        contains_c=contains_c,
        truncated=truncated,
    )


def estimate_alpha_limit(
    spec: LorenzMapSpec,
    x: float,
    depth: int = 25,
    cap: int = 10**6,
    resolution: int = 1024,
) -> AlphaLimitEstimate:
    """Breadth-first preimage tree of x.

    Cells of nodes in the deeper half approximate the alpha-limit set; the
    connected uncovered region around c (from all nodes) estimates the
    critical gap of the backward dynamics.
    """
    if depth > 60:
        raise ValueError("depth capped at 60")
    from .map_core import branch_inverse_array

    tol = spec.tolerance
    level = np.array([x])
    all_nodes: list[tuple[int, float]] = [(0, x)]
    complete = True
    for d in range(1, depth + 1):
        pre_l = branch_inverse_array(spec, "left", level)
        pre_r = branch_inverse_array(spec, "right", level)
        nxt = np.concatenate([pre_l, pre_r])
        nxt = nxt[~np.isnan(nxt)]
        nxt = np.unique(np.round(nxt, 13))
        if len(all_nodes) + nxt.size > cap:
            complete = False
            break
        all_nodes.extend((d, float(v)) for v in nxt)
        level = nxt
        if level.size == 0:
            break
    deep = [v for (d, v) in all_nodes if d >= depth / 2]
    cells = tuple(sorted({min(int(v * resolution), resolution - 1) for v in deep}))
    below = [v for (_, v) in all_nodes if v <= spec.c - tol]
    above = [v for (_, v) in all_nodes if v >= spec.c + tol]
    lo = max(below) if below else 0.0
    hi = min(above) if above else 1.0
    j_x: tuple[float, float] | None = (lo, hi)
    if hi - lo <= 2.0 / resolution:
        j_x = None
    return AlphaLimitEstimate(
        cells=cells,
        resolution=resolution,
        depth=depth,
        node_count=len(all_nodes),
        j_x_est=j_x,
        complete=complete,
    )


def rotation_number(spec: LorenzMapSpec, returnmap, x0: float, n: int = 10_000) -> float:
    """Frequency of left-component visits of a two-branch return map.

    For the glued circle map of a renormalization return this is the
    classical rotation number. Periodic return orbits give the exact
    rational visits/period.
    """
    branches = list(returnmap.branches)
    if len(branches) != 2:
        raise ValueError("rotation number needs a return map with exactly 2 branches")
    if not all(b.touches_c for b in branches):
        raise ValueError("rotation number needs both branches adjacent to c")
    lo, hi = returnmap.J
    tol = spec.tolerance
    left = min(branches, key=lambda b: b.domain[0])
    right = max(branches, key=lambda b: b.domain[0])
    x = x0
    visits = 0
    for k in range(n):
        if not (lo - tol <= x <= hi + tol):
            raise ValueError("not forward invariant: return orbit escaped the interval")
        if abs(x - spec.c) <= tol:
            n = k
            break
        if x < spec.c:
            visits += 1
            t = left.return_time
        else:
            t = right.return_time
        for _ in range(t):
            x = apply_raw(spec, x, Side.NONE)
        if abs(x - x0) <= 10 * tol and k + 1 >= 1:
            return visits / (k + 1)
    if n == 0:
        raise ValueError("no return steps taken")
    return visits / n
