import math

import numpy as np
import pytest

from lorenzlab import (
    first_return_map,
    gaps,
    is_nice,
    mane_expansion_check,
    order,
    phobic_measure,
    root_interval,
)
from lorenzlab.map_core import Side, apply_raw
from lorenzlab.return_maps import _first_return_time
from conftest import A3, B3, P_CYCLE


def test_is_nice_renormalization_interval(ex3):
    rec = is_nice(ex3, (A3, B3), 10_000)
    assert rec.is_nice
    assert rec.boundary_periodic == (2, 2)


def test_is_nice_whole_interval(ex1):
    rec = is_nice(ex1, (0.0, 1.0), 1000)
    assert rec.is_nice
    assert rec.boundary_periodic == (1, 1)


def test_is_nice_simulation_report(ex1):
    rec = is_nice(ex1, (0.49, 0.51), 1000)
    assert isinstance(rec.is_nice, bool)
    assert not rec.undetermined


def test_is_nice_catches_reentry(ex2):
    # orbit of 0.4: 0.96 -> 0.8464 -> 0.47997..., re-entering at step 3
    rec = is_nice(ex2, (0.4, 0.6), 1000)
    assert not rec.is_nice


def test_order_basics(ex1):
    assert order(ex1, (0.49, 0.51)) == 0
    k = order(ex1, (0.1, 0.2))
    # direct-simulation oracle
    lo, hi = 0.1, 0.2
    for j in range(20):
        if lo < 0.5 < hi:
            break
        side = Side.NONE
        lo, hi = apply_raw(ex1, lo, side), apply_raw(ex1, hi, side)
    assert k == j


def test_order_trapped_interval(ex1):
    eps = 1e-6
    assert order(ex1, (P_CYCLE - eps, P_CYCLE + eps), 100) is None


def test_return_map_renormalization_case(ex3):
    rec = first_return_map(ex3, (A3, B3), 1000, 1 << 12)
    assert len(rec.branches) == 2
    assert all(b.touches_c for b in rec.branches)
    assert [b.return_time for b in rec.branches] == [2, 2]
    left, right = rec.branches
    assert left.domain == pytest.approx((A3, 0.5), abs=1e-9)
    assert right.domain == pytest.approx((0.5, B3), abs=1e-9)
    # one-sided images computed by hand: f^2(c-) = 0.5665, f^2(c+) = 0.4335
    assert left.image == pytest.approx((A3, 0.5665), abs=1e-9)
    assert right.image == pytest.approx((0.4335, B3), abs=1e-9)
    assert not any(b.is_full for b in rec.branches)
    assert rec.uncovered_measure < 1e-6


def test_full_branch_law(ex2):
    J = (0.25, 0.75)
    assert is_nice(ex2, J, 1000).is_nice
    rec = first_return_map(ex2, J, 1000, 1 << 12)
    interior = [b for b in rec.branches if not b.touches_c]
    assert interior
    for b in interior:
        assert b.is_full
        assert b.image == pytest.approx(J, abs=1e-6)


def test_full_branch_per_point_oracle(ex2):
    J = (0.25, 0.75)
    rec = first_return_map(ex2, J, 1000, 1 << 12)
    for b in rec.branches[:6]:
        if b.touches_c or not b.is_full:
            continue
        lo, hi = b.domain
        w = hi - lo
        for x0, target in ((lo + 1e-9 * w, J[0]), (hi - 1e-9 * w, J[1])):
            x = x0
            for _ in range(b.return_time):
                x = apply_raw(ex2, x, Side.NONE)
            assert x == pytest.approx(target, abs=1e-6)


def test_boundary_periodicity_law(ex2, ex1):
    # periodic boundary 0.25 of EX2's (0.25, 0.75) owns a branch edge
    rec = first_return_map(ex2, (0.25, 0.75), 1000, 1 << 12)
    assert any(abs(b.domain[0] - 0.25) <= 1e-9 for b in rec.branches)
    assert any(abs(b.domain[1] - 0.75) <= 1e-9 for b in rec.branches)
    # non-periodic boundaries own no branch edge
    rec2 = first_return_map(ex1, (0.49, 0.51), 1000, 1 << 10)
    nice2 = is_nice(ex1, (0.49, 0.51), 1000)
    if nice2.is_nice and nice2.boundary_periodic == (None, None):
        for b in rec2.branches:
            assert abs(b.domain[0] - 0.49) > 1e-9
            assert abs(b.domain[1] - 0.51) > 1e-9


def test_return_time_consistency(ex2, rng):
    J = (0.25, 0.75)
    rec = first_return_map(ex2, J, 1000, 1 << 12)
    for b in rec.branches[:8]:
        lo, hi = b.domain
        for _ in range(3):
            x = float(rng.uniform(lo + 1e-9, hi - 1e-9))
            assert _first_return_time(ex2, x, J, 1000) == b.return_time


def test_gaps_structure(ex2):
    J = (0.25, 0.75)
    out = gaps(ex2, J, 25, 100_000)
    assert out[0].gap == J and out[0].order == 0
    assert all(g.image_is_J for g in out)
    # pairwise disjoint interiors
    ivs = sorted(g.gap for g in out)
    for (a1, b1), (a2, b2) in zip(ivs[:-1], ivs[1:]):
        assert b1 <= a2 + 1e-9
    total = sum(b - a for (a, b) in ivs)
    assert total >= 0.98


def test_gaps_trivial(ex1):
    out = gaps(ex1, (0.45, 0.55), 0, 100)
    assert len(out) == 1
    assert out[0].gap == (0.45, 0.55)


def test_gap_boundary_sharing_flag(ex3):
    # when both boundary points lie on one orbit, a neighbor gap shares an
    # endpoint with J (the avoiding set has isolated boundary points)
    out = gaps(ex3, (A3, B3), 3, 100)
    assert any(g.touches_boundary for g in out[1:])
    side = next(g for g in out if g.touches_boundary)
    assert min(abs(side.gap[0] - B3), abs(side.gap[1] - A3)) <= 1e-9


def test_gap_survivor_disjointness(ex2):
    J = (0.25, 0.75)
    out = gaps(ex2, J, 12, 10_000)
    ph = phobic_measure(ex2, J, 30, 20_000)
    centers = (np.array(ph.surviving_cells) + 0.5) / ph.grid
    for (a, b) in (g.gap for g in out):
        assert not np.any((centers > a + 1e-9) & (centers < b - 1e-9))


def test_phobic_measure_decay(ex2):
    vals = [phobic_measure(ex2, (0.4, 0.6), n, 100_000).surviving_measure for n in (5, 10, 20, 50)]
    assert vals == sorted(vals, reverse=True)
    assert vals[-1] < 0.02


def test_phobic_whole_interval(ex1):
    est = phobic_measure(ex1, (0.0 + 1e-12, 1.0 - 1e-12), 5, 1000)
    assert est.surviving_measure == 0.0


def test_mane_expansion(ex2, rng):
    fit = mane_expansion_check(ex2, (0.4, 0.6), samples=200_000, n=40, rng=rng)
    assert fit.passed
    assert fit.lam > 1.0
    assert fit.survivors >= 10


def test_mane_fixed_point_rate(ex2):
    # the orbit sitting at 0 avoids any interval around c forever and its
    # per-step log-derivative is exactly log 4
    from lorenzlab import derivative

    assert math.log(abs(derivative(ex2, 0.0))) == pytest.approx(math.log(4.0))


def test_mane_insufficient_survivors(ex1, rng):
    with pytest.raises(ValueError, match="insufficient survivors"):
        mane_expansion_check(ex1, (0.05, 0.95), samples=200, n=50, rng=rng)


def test_root_interval(ex3, cat3):
    res = root_interval(ex3, (A3, B3), 8, catalog=cat3)
    assert res.interval == (0.0, 1.0)
    # always contains the closure of its input
    assert res.interval[0] <= A3 and res.interval[1] >= B3


def test_root_interval_whole(ex1, cat1):
    res = root_interval(ex1, (1e-9, 1 - 1e-9), 8, catalog=cat1)
    assert res.interval == (0.0, 1.0)


def test_root_interval_nested(ex3, cat3, seq3):
    # the root of the deepest certified interval is the level above it
    J_inner = seq3.chain()[1].J
    res = root_interval(ex3, J_inner, 8, catalog=cat3)
    assert res.interval[0] <= seq3.intervals[0].J[0] + 1e-9
    assert res.interval[1] >= seq3.intervals[0].J[1] - 1e-9
