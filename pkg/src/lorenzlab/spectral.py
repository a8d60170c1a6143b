"""Non-wandering strata, attractor classification and entropy estimates.

The non-wandering set is stratified by the nested trapping regions of the
renormalization chain: stratum s collects the grid cells of the s-th
trapping annulus whose orbits return to within one cell of themselves. The
final stratum is classified into a periodic / super attractor, a depth-capped
solenoid candidate, a Cherry candidate (irrational return rotation), a cycle
of intervals, or a Cantor-like remainder. Every verdict is a budgeted
numerical probe, and the report says which budgets it ran under.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .map_core import (
    LorenzMapSpec,
    Side,
    apply_raw,
    critical_values,
    eval_array,
)
from .orbits import estimate_omega_limit, rotation_number
from .periodic import (
    NoPeriodicOrbitFound,
    PeriodicOrbitRecord,
    VariationalPrincipleViolated,
    find_periodic_points,
)
from .renorm import (
    NestedSequence,
    RenormalizationRecord,
    find_renormalizations,
    renormalization_cycle,
    trapping_region,
)
from .return_maps import FULL_TOLERANCE, first_return_map, push_interval

CRITICAL_VALUE_TOL = 1e-9

OMEGA0_FULL = "full_interval"
OMEGA0_ZERO = "{0}"
OMEGA0_ONE = "{1}"
OMEGA0_BOTH = "{0,1}"


@dataclass
class Budgets:
    max_period: int = 12
    max_depth: int = 8
    horizon: int = 10_000
    grid_resolution: int = 1 << 14
    samples: int = 100_000
    seed: int = 0
    recurrence_resolution: int = 1 << 10
    probe_resolution: int = 1 << 8

    def to_dict(self) -> dict:
        return {
            "max_period": self.max_period,
            "max_depth": self.max_depth,
            "horizon": self.horizon,
            "grid_resolution": self.grid_resolution,
            "samples": self.samples,
            "seed": self.seed,
            "recurrence_resolution": self.recurrence_resolution,
            "probe_resolution": self.probe_resolution,
        }

    @staticmethod
    def from_dict(d: dict) -> "Budgets":
        b = Budgets()
        for k, v in d.items():
            if not hasattr(b, k):
                raise KeyError(f"unknown budget field {k!r}")
            setattr(b, k, int(v))
        for k, v in vars(b).items():
            if k != "seed" and v <= 0:
                raise ValueError(f"budget {k} must be positive")
        if b.seed < 0:
            raise ValueError("seed must be non-negative")
        return b


@dataclass
class AttractorClass:
    kind: str  # periodic_attractor | super_attractor | cherry | solenoid |
    #            interval_cycle | cantor_chaotic_heuristic | wild_candidate
    evidence: dict = field(default_factory=dict)
    confidence: str = "normal"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "confidence": self.confidence, "evidence": self.evidence}


@dataclass
class Stratum:
    n: int
    K_n: list[tuple[float, float]]
    recurrent_cells: tuple[int, ...]
    resolution: int
    transitive_probe: bool | None = None
    block_decomposition: list[tuple[float, float]] | None = None
    block_return_steps: list[int] | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "K_n": [list(iv) for iv in self.K_n],
            "recurrent_cells": list(self.recurrent_cells),
            "resolution": self.resolution,
            "transitive_probe": self.transitive_probe,
            "block_decomposition": [list(iv) for iv in self.block_decomposition]
            if self.block_decomposition
            else None,
            "block_return_steps": self.block_return_steps,
            "notes": self.notes,
        }


@dataclass
class DecompositionRecord:
    n_f: int
    omega0: str
    strata: list[Stratum]
    final_class: AttractorClass
    depth_cap_hit: bool
    notes: list[str] = field(default_factory=list)
    # experimental: critical-value annuli between consecutive regular levels;
    # the subtraction convention for the inner interval is not settled, so
    # this field is reported but nothing downstream depends on it
    experimental_annuli: list[list[tuple[float, float]]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_f": self.n_f,
            "omega0": self.omega0,
            "strata": [s.to_dict() for s in self.strata],
            "final_class": self.final_class.to_dict(),
            "depth_cap_hit": self.depth_cap_hit,
            "notes": self.notes,
            "experimental_p_n": [[list(iv) for iv in level] for level in self.experimental_annuli],
        }


def omega0(spec: LorenzMapSpec) -> str:
    """Endpoint stratum by the four-case table on the critical values."""
    v0, v1 = critical_values(spec)
    hits_zero = v0 <= CRITICAL_VALUE_TOL
    hits_one = v1 >= 1.0 - CRITICAL_VALUE_TOL
    if hits_zero and hits_one:
        return OMEGA0_FULL
    if not hits_zero and hits_one:
        return OMEGA0_ZERO
    if hits_zero and not hits_one:
        return OMEGA0_ONE
    return OMEGA0_BOTH


# ---------------------------------------------------------------------------
# cell machinery


def _cells_of_intervals(intervals: list[tuple[float, float]], resolution: int) -> np.ndarray:
    mask = np.zeros(resolution, dtype=bool)
    for (lo, hi) in intervals:
        i0 = max(int(math.floor(lo * resolution)), 0)
        i1 = min(int(math.ceil(hi * resolution)), resolution)
        mask[i0:i1] = True
    return mask


def _in_any(x: np.ndarray, intervals: list[tuple[float, float]]) -> np.ndarray:
    out = np.zeros(x.shape, dtype=bool)
    for (lo, hi) in intervals:
        out |= (x >= lo) & (x <= hi)
    return out


def _recurrent_cells(
    spec: LorenzMapSpec,
    region: list[tuple[float, float]],
    holes: list[tuple[float, float]],
    resolution: int,
    horizon: int,
) -> tuple[int, ...]:
    """Cells with center in region and not entirely inside a hole whose
    orbit comes back to within one cell of the start within the horizon.

    Cells straddling a hole boundary stay in play: the boundary points of a
    trapping region belong to the outer stratum.
    """
    centers = (np.arange(resolution) + 0.5) / resolution
    keep = _in_any(centers, region)
    if holes:
        lo_edges = np.arange(resolution) / resolution
        hi_edges = (np.arange(resolution) + 1) / resolution
        swallowed = np.zeros(resolution, dtype=bool)
        for (lo, hi) in holes:
            swallowed |= (lo_edges >= lo) & (hi_edges <= hi)
        keep &= ~swallowed
    idx = np.nonzero(keep)[0]
    if idx.size == 0:
        return ()
    start = centers[idx]
    x = start.copy()
    active = np.ones(idx.shape, dtype=bool)
    recurrent = np.zeros(idx.shape, dtype=bool)
    cw = 1.0 / resolution
    for _ in range(horizon):
        if not active.any():
            break
        x[active] = eval_array(spec, x[active])
        dead = active & np.isnan(x)
        active &= ~dead
        back = active & (np.abs(x - start) <= cw)
        recurrent |= back
        active &= ~back
    return tuple(int(i) for i in idx[recurrent])


def _coverage_probe(
    spec: LorenzMapSpec,
    seed_interval: tuple[float, float],
    target_cells: set[int],
    resolution: int,
    horizon: int,
    component_cap: int = 4096,
    stop_fraction: float = 0.95,
) -> float:
    """Fraction of target cells covered by forward images of seed_interval,
    pushing intervals with splitting at c (budgeted)."""
    if not target_cells:
        return 1.0
    covered: set[int] = set()
    comps = [seed_interval]
    tol = spec.tolerance

    def mark(iv: tuple[float, float]):
        i0 = max(int(iv[0] * resolution), 0)
        i1 = min(int(iv[1] * resolution), resolution - 1)
        for i in range(i0, i1 + 1):
            if i in target_cells:
                covered.add(i)

    mark(seed_interval)
    for _ in range(horizon):
        if len(covered) / len(target_cells) >= stop_fraction:
            break
        nxt: list[tuple[float, float]] = []
        for (u, v) in comps:
            if u + tol < spec.c < v - tol:
                pieces = [(u, spec.c), (spec.c, v)]
            else:
                pieces = [(u, v)]
            for (a, b) in pieces:
                img = push_interval(spec, (a, b), 1)
                if img is not None and img[1] - img[0] > tol:
                    nxt.append(img)
                    mark(img)
        # merge overlapping components to keep the list bounded
        nxt.sort()
        merged: list[tuple[float, float]] = []
        for iv in nxt:
            if merged and iv[0] <= merged[-1][1] + tol:
                merged[-1] = (merged[-1][0], max(merged[-1][1], iv[1]))
            else:
                merged.append(iv)
        comps = merged[:component_cap]
        if not comps:
            break
    return len(covered) / len(target_cells)


# ---------------------------------------------------------------------------
# classification


def _absorbed_by_cycle(
    spec: LorenzMapSpec, x0: float, cycle: list[float], horizon: int
) -> bool:
    """Does the forward orbit of x0 end up at the cycle (late-time distance
    below 1e-3)?"""
    x = x0
    tol = spec.tolerance
    tail = max(horizon // 10, 10)
    best = math.inf
    for k in range(horizon):
        if abs(x - spec.c) <= tol:
            break
        x = apply_raw(spec, x, Side.NONE)
        if k >= horizon - tail:
            best = min(best, min(abs(x - p) for p in cycle))
    return best < 1e-3


def classify_attractor(
    spec: LorenzMapSpec,
    budgets: Budgets | None = None,
    catalog: list[PeriodicOrbitRecord] | None = None,
    seq: NestedSequence | None = None,
) -> AttractorClass:
    """Decision procedure over budgeted probes, in order: absorbing periodic
    or super attractor, depth-capped solenoid candidate, irrational-rotation
    (Cherry) candidate, interval-cycle coverage, Cantor-like remainder with
    a wild-candidate note."""
    if budgets is None:
        budgets = Budgets()
    if catalog is None:
        catalog = find_periodic_points(spec, budgets.max_period, budgets.grid_resolution)
    if seq is None:
        seq = find_renormalizations(
            spec, budgets.max_period, budgets.max_depth, budgets.horizon, catalog
        )
    evidence: dict = {"budgets": budgets.to_dict(), "renorm_depth": len(seq.chain())}
    v0, v1 = critical_values(spec)
    chain = seq.chain()
    deepest: tuple[float, float] = chain[-1].J if chain else (0.0, 1.0)

    # (1) attracting or super orbit absorbing the critical orbits
    nonrep = [
        r
        for r in catalog
        if r.kind in ("attracting", "super")
        or (r.kind == "neutral" and r.neutral_attracting_probe)
    ]
    for rec in nonrep:
        absorbed0 = _absorbed_by_cycle(spec, v0, rec.points, budgets.horizon)
        absorbed1 = _absorbed_by_cycle(spec, v1, rec.points, budgets.horizon)
        both = absorbed0 and absorbed1
        one_with_degenerate = (absorbed0 or absorbed1) and (
            seq.degenerate is not None or seq.maximal_nonregular is not None
        )
        if both or one_with_degenerate:
            evidence["orbit"] = rec.to_dict()
            evidence["critical_orbits_absorbed"] = [absorbed0, absorbed1]
            kind = "super_attractor" if rec.kind == "super" else "periodic_attractor"
            return AttractorClass(kind=kind, evidence=evidence)

    # (2) depth-capped chain with shrinking diameters
    if seq.depth_cap_hit:
        widths = [r.width for r in chain]
        if all(b < a for a, b in zip(widths, widths[1:])):
            evidence["chain_widths"] = widths
            return AttractorClass(kind="solenoid", evidence=evidence, confidence="depth-capped")

    # (3) no periodic points strictly inside the deepest interval: rotation probe
    tol = spec.tolerance
    interior_orbits = [
        r
        for r in catalog
        if any(deepest[0] + tol < p < deepest[1] - tol for p in r.points)
    ]
    if not interior_orbits:
        try:
            frm = first_return_map(spec, deepest, budgets.horizon, 1 << 10)
            two = [b for b in frm.branches if b.touches_c]
            if len(two) == 2:
                probe_rec = type(frm)(J=frm.J, branches=two, uncovered_measure=0.0)
                x0 = spec.c - (deepest[1] - deepest[0]) / 1000.0
                rot = rotation_number(spec, probe_rec, x0, min(budgets.horizon, 10_000))
                evidence["rotation_estimate"] = rot
                far = all(
                    abs(rot - p / q) > 1e-4
                    for q in range(1, 51)
                    for p in range(0, q + 1)
                )
                if far:
                    return AttractorClass(kind="cherry", evidence=evidence)
        except ValueError as e:
            evidence["rotation_probe_error"] = str(e)

    # (4) do the near-critical orbits cover the deepest trapping region?
    res = budgets.probe_resolution
    if chain:
        trap = trapping_region(spec, chain[-1])
    else:
        trap = [(0.0, 1.0)]
    trap_cells = set(int(i) for i in np.nonzero(_cells_of_intervals(trap, res))[0])
    h = 1.0 / res
    cover: set[int] = set()
    truncated = False
    for x0 in (spec.c - h, spec.c + h):
        est = estimate_omega_limit(
            spec, x0, burn_in=1000, sample_len=budgets.samples // 2, resolution=res
        )
        truncated |= est.truncated
        cover.update(est.cells)
    coverage = len(cover & trap_cells) / max(len(trap_cells), 1)
    evidence["critical_cover_fraction"] = coverage
    if coverage >= 0.9:
        evidence["interval_cycle_support"] = trap
        return AttractorClass(kind="interval_cycle", evidence=evidence)

    # (5) Cantor-like remainder; flag a wild candidate when the critical
    # cover misses much of the recurrent set
    rec_cells = set(
        _recurrent_cells(spec, trap, [], res, budgets.horizon)
    )
    missing = rec_cells - cover
    evidence["recurrent_cells"] = len(rec_cells)
    evidence["critical_cover_misses"] = len(missing)
    kind = "cantor_chaotic_heuristic"
    if rec_cells and len(missing) > 0.1 * len(rec_cells):
        evidence["wild_candidate"] = True
    confidence = "low" if truncated else "normal"
    return AttractorClass(kind=kind, evidence=evidence, confidence=confidence)


# ---------------------------------------------------------------------------
# stratum blocks


@dataclass
class StratumBlocks:
    x0: tuple[float, float]
    blocks: list[tuple[float, float]]
    return_steps: list[int]
    overlaps_ok: bool
    minimal_orbit: PeriodicOrbitRecord


def stratum_blocks(
    spec: LorenzMapSpec,
    stratum_index: int,
    chain: list[RenormalizationRecord],
    catalog: list[PeriodicOrbitRecord],
    budgets: Budgets | None = None,
) -> StratumBlocks:
    """Block decomposition of a middle stratum: the central component of the
    complement of the minimal-period orbit, plus the finitely many gaps of
    its avoiding set met by the enclosing renormalization cycle."""
    if budgets is None:
        budgets = Budgets()
    n_f = len(chain) + 1
    if not (0 < stratum_index < n_f):
        raise ValueError("blocks are defined for middle strata only")
    tol = spec.tolerance
    chain_ext: list[tuple[float, float]] = [(0.0, 1.0)] + [r.J for r in chain]
    I_prev = chain_ext[stratum_index - 1]
    I_next = chain_ext[stratum_index]

    def in_region(p: float) -> bool:
        inside_prev = I_prev[0] + tol < p < I_prev[1] - tol
        inside_next = I_next[0] + tol < p < I_next[1] - tol
        return inside_prev and not inside_next

    candidates = [r for r in catalog if any(in_region(p) for p in r.points)]
    if not candidates:
        raise NoPeriodicOrbitFound(
            f"none found (budget): no orbit meets stratum {stratum_index} region"
        )
    best = min(r.period for r in candidates)
    winners = [r for r in candidates if r.period == best]
    if len(winners) > 1:
        raise VariationalPrincipleViolated(
            f"variational principle violated on stratum {stratum_index}: "
            f"{len(winners)} orbits of period {best}"
        )
    orbit = winners[0]
    below = [p for p in orbit.points if p < spec.c]
    above = [p for p in orbit.points if p > spec.c]
    if not below or not above:
        raise ValueError("minimal orbit does not straddle c")
    L = (max(below), min(above))

    # intervals whose enclosing gaps form the blocks: the previous-level
    # renormalization cycle (or the two sides of the whole interval)
    if stratum_index == 1:
        sources = [(0.0, spec.c), (spec.c, 1.0)]
    else:
        prev_rec = chain[stratum_index - 2]
        sources = renormalization_cycle(spec, prev_rec)

    def entry_sides(x: float, cap: int) -> list[str] | None:
        sides: list[str] = []
        y = x
        for _ in range(cap):
            if L[0] + tol < y < L[1] - tol:
                return sides
            if abs(y - spec.c) <= tol:
                return None
            sides.append("left" if y < spec.c else "right")
            y = apply_raw(spec, y, Side.NONE)
        return None

    from .map_core import branch_inverse_array

    blocks: list[tuple[float, float]] = [L]
    steps: list[int] = [0]
    cap = max(64, 8 * budgets.max_period)
    for (u, v) in sources:
        for frac in (0.5, 0.25, 0.75, 0.125, 0.875):
            w = u + frac * (v - u)
            sides = entry_sides(w, cap)
            if sides is None:
                continue
            lo, hi = L
            for side in reversed(sides):
                lo = float(branch_inverse_array(spec, side, np.array([lo]))[0])
                hi = float(branch_inverse_array(spec, side, np.array([hi]))[0])
            if math.isnan(lo) or math.isnan(hi):
                continue
            if not any(abs(lo - b[0]) <= 1e-9 and abs(hi - b[1]) <= 1e-9 for b in blocks):
                img = push_interval(spec, (lo, hi), len(sides))
                if img is None or abs(img[0] - L[0]) > FULL_TOLERANCE or abs(img[1] - L[1]) > FULL_TOLERANCE:
                    continue
                blocks.append((lo, hi))
                steps.append(len(sides))

    overlaps_ok = True
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            lo = max(blocks[i][0], blocks[j][0])
            hi = min(blocks[i][1], blocks[j][1])
            if hi - lo > 10 * tol:
                overlaps_ok = False
    return StratumBlocks(
        x0=L, blocks=blocks, return_steps=steps, overlaps_ok=overlaps_ok, minimal_orbit=orbit
    )


# ---------------------------------------------------------------------------
# decomposition


def decompose(spec: LorenzMapSpec, budgets: Budgets | None = None) -> DecompositionRecord:
    """Full stratification: trapping chain, per-stratum recurrence cells,
    transitivity probes, middle-stratum blocks and final classification."""
    if budgets is None:
        budgets = Budgets()
    catalog = find_periodic_points(spec, budgets.max_period, budgets.grid_resolution)
    seq = find_renormalizations(
        spec, budgets.max_period, budgets.max_depth, budgets.horizon, catalog
    )
    chain = seq.chain()
    om0 = omega0(spec)
    notes = list(seq.notes)

    K: list[list[tuple[float, float]]] = [[(0.0, 1.0)]]
    for rec in chain:
        try:
            K.append(trapping_region(spec, rec))
        except ValueError as e:
            notes.append(f"trapping region of {rec.J} failed its invariance probe: {e}")
            K.append([rec.J])

    n_f = 0 if om0 == OMEGA0_FULL else len(chain) + 1
    res = budgets.recurrence_resolution
    tol = spec.tolerance
    strata: list[Stratum] = []
    count = max(n_f, 1)
    for s in range(1, count + 1):
        region = K[s - 1] if s - 1 < len(K) else K[-1]
        holes = K[s] if s < len(K) else []
        probed = set(_recurrent_cells(spec, region, holes, res, budgets.horizon))
        # certified periodic points are exact non-wandering members; add
        # their cells when they sit in this annulus (typically on a trapping
        # region boundary, where a center-seeded probe drifts away)
        for r in catalog:
            for p in r.points:
                in_region = any(lo + tol < p < hi - tol for (lo, hi) in region)
                in_hole = any(lo + tol < p < hi - tol for (lo, hi) in holes)
                if in_region and not in_hole:
                    probed.add(min(int(p * res), res - 1))
        cells = tuple(sorted(probed))
        stratum = Stratum(
            n=s if n_f > 0 else 0,
            K_n=region,
            recurrent_cells=cells,
            resolution=res,
        )
        # transitivity probe: forward images of one recurrent cell should
        # cover most of the stratum's recurrent cells
        if cells:
            targets = set(cells)
            probes = cells if len(cells) <= 16 else [cells[i] for i in
                np.linspace(0, len(cells) - 1, 16).astype(int)]
            results = []
            for ci in probes:
                seed = (ci / res, (ci + 1) / res)
                results.append(
                    _coverage_probe(spec, seed, targets, res, budgets.horizon, stop_fraction=0.9)
                    >= 0.9
                )
            stratum.transitive_probe = all(results)
        if 0 < s < n_f:
            if s == 1:
                v0x, v1x = critical_values(spec)
                outer_regular = v0x < spec.c < v1x
            else:
                outer_regular = chain[s - 2].regular
            if outer_regular:
                try:
                    sb = stratum_blocks(spec, s, chain, catalog, budgets)
                    stratum.block_decomposition = sb.blocks
                    stratum.block_return_steps = sb.return_steps
                    if not sb.overlaps_ok:
                        stratum.notes.append("block overlap exceeded a point")
                except (NoPeriodicOrbitFound, VariationalPrincipleViolated, ValueError) as e:
                    stratum.notes.append(f"block decomposition unavailable: {e}")
        strata.append(stratum)

    # strata disjointness audit, exempting certified periodic-orbit cells
    periodic_cells = set()
    for r in catalog:
        for p in r.points:
            periodic_cells.add(min(int(p * res), res - 1))
    for i in range(len(strata)):
        for j in range(i + 1, len(strata)):
            overlap = set(strata[i].recurrent_cells) & set(strata[j].recurrent_cells)
            hard = overlap - periodic_cells
            if hard:
                notes.append(
                    f"strata {strata[i].n} and {strata[j].n} share non-periodic cells: {sorted(hard)[:8]}"
                )
            elif overlap:
                notes.append(
                    f"strata {strata[i].n} and {strata[j].n} share periodic-orbit cells (exempted)"
                )

    # experimental annuli between consecutive regular levels: the interval
    # spanned by the one-sided critical values at the minimal-orbit boundary
    # periods, minus the next chain interval
    annuli: list[list[tuple[float, float]]] = []
    v0, v1 = critical_values(spec)
    for s in range(1, len(chain) + 1):
        rec = chain[s - 1]
        if not rec.regular:
            continue
        try:
            sb = stratum_blocks(spec, s, chain, catalog, budgets) if s < n_f else None
        except (NoPeriodicOrbitFound, VariationalPrincipleViolated, ValueError):
            sb = None
        if sb is None:
            continue
        per_lo = sb.minimal_orbit.period
        u = v0
        v = v1
        for _ in range(per_lo - 1):
            u = apply_raw(spec, u, Side.NONE) if abs(u - spec.c) > tol else u
            v = apply_raw(spec, v, Side.NONE) if abs(v - spec.c) > tol else v
        if u < v:
            inner = chain[s].J if s < len(chain) else None
            if inner and inner[0] > u and inner[1] < v:
                annuli.append([(u, inner[0]), (inner[1], v)])
            else:
                annuli.append([(u, v)])

    final = classify_attractor(spec, budgets, catalog, seq)
    return DecompositionRecord(
        n_f=n_f,
        omega0=om0,
        strata=strata,
        final_class=final,
        depth_cap_hit=seq.depth_cap_hit,
        notes=notes,
        experimental_annuli=annuli,
    )


# ---------------------------------------------------------------------------
# entropy


def entropy_estimate(
    spec: LorenzMapSpec,
    n: int = 20,
    samples: int = 100_000,
    rng: np.random.Generator | None = None,
    burn_in: int = 512,
    windows_per_orbit: int = 32,
) -> float:
    """Word-count entropy: (1/n) log of the number of distinct length-n
    itinerary words observed along sampled orbits after a burn-in.

    The count is capped by 2^n, so the estimate never exceeds log 2.
    """
    if n > 30:
        raise ValueError("word length capped at 30")
    if samples < 10_000:
        raise ValueError("need at least 1e4 samples")
    if rng is None:
        rng = np.random.default_rng(0)
    m = samples
    L = burn_in + n + windows_per_orbit
    x = rng.uniform(0.0, 1.0, m)
    bits = np.zeros((m, n + windows_per_orbit), dtype=bool)
    alive = np.ones(m, dtype=bool)
    for k in range(L):
        if k >= burn_in:
            bits[:, k - burn_in] = x >= spec.c
        x = eval_array(spec, x)
        alive &= ~np.isnan(x)
        x[~alive] = 0.0  # keep the array clean; dead rows are dropped below
    bits = bits[alive]
    if bits.shape[0] == 0:
        return 0.0
    # rolling n-bit codes across each orbit's window strip
    code = np.zeros(bits.shape[0], dtype=np.uint64)
    for j in range(n):
        code = (code << np.uint64(1)) | bits[:, j].astype(np.uint64)
    words = [code.copy()]
    mask = np.uint64((1 << n) - 1)
    for k in range(1, windows_per_orbit):
        code = ((code << np.uint64(1)) | bits[:, n + k - 1].astype(np.uint64)) & mask
        words.append(code.copy())
    distinct = np.unique(np.concatenate(words)).size
    return math.log(distinct) / n


def solenoid_entropy_bound(chain: list[RenormalizationRecord]) -> float | None:
    """log 2 / (min boundary period at the deepest certified level)."""
    if not chain:
        return None
    gamma = min(chain[-1].period_a, chain[-1].period_b)
    return math.log(2.0) / gamma
