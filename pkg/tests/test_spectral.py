import math

import pytest

from lorenzlab import (
    Budgets,
    classify_attractor,
    embed_unimodal,
    entropy_estimate,
    find_periodic_points,
    logistic,
    omega0,
    quadratic_pair,
)
from lorenzlab.map_core import Side, apply_raw
from lorenzlab.spectral import stratum_blocks
from lorenzlab.renorm import find_renormalizations
from conftest import A3, B3, P_CYCLE, Q_CYCLE


def test_omega0_four_cases(ex1, ex2, ex3):
    assert omega0(ex1) == "{1}"
    assert omega0(ex2) == "full_interval"
    assert omega0(ex3) == "{0,1}"
    assert omega0(quadratic_pair(4.0, 3.4)) == "{0}"


def test_decompose_paper_pair(dec1):
    assert dec1.n_f == 1
    assert dec1.omega0 == "{1}"
    assert dec1.final_class.kind == "periodic_attractor"
    res = dec1.strata[0].resolution
    cells = set(dec1.strata[0].recurrent_cells)
    for p in (P_CYCLE, Q_CYCLE):
        assert min(int(p * res), res - 1) in cells


def test_decompose_full_map(dec2):
    assert dec2.n_f == 0
    assert len(dec2.strata) == 1
    assert dec2.final_class.kind == "interval_cycle"
    assert dec2.strata[0].transitive_probe is True
    assert len(dec2.strata[0].recurrent_cells) >= 0.95 * dec2.strata[0].resolution


def test_decompose_embedded_pair(dec3):
    assert dec3.final_class.kind == "periodic_attractor"
    assert dec3.omega0 == "{0,1}"
    # the outer stratum carries exactly the boundary 2-cycle
    s1 = dec3.strata[0]
    res = s1.resolution
    assert set(s1.recurrent_cells) == {
        min(int(A3 * res), res - 1),
        min(int(B3 * res), res - 1),
    }
    assert s1.transitive_probe is True
    # the deepest stratum sits around the attracting 4-cycle
    deep = dec3.strata[-1]
    centers = [(i + 0.5) / deep.resolution for i in deep.recurrent_cells]
    a = 3.4
    x1 = ((a + 1) - math.sqrt((a + 1) * (a - 3))) / (2 * a)
    assert any(abs(v - x1) < 2.0 / deep.resolution for v in centers)


def test_strata_disjoint_modulo_periodic(dec1, dec2, dec3):
    for dec in (dec1, dec2, dec3):
        assert not any("non-periodic cells" in n for n in dec.notes)


def test_trap_chain_invariance(ex3, dec3, rng):
    for s in dec3.strata:
        K = s.K_n
        for _ in range(100):
            k = int(rng.integers(0, len(K)))
            x = float(rng.uniform(*K[k]))
            for _ in range(1000):
                if abs(x - ex3.c) <= 1e-10:
                    break
                x = apply_raw(ex3, x, Side.NONE)
                if not any(lo - 1e-9 <= x <= hi + 1e-9 for (lo, hi) in K):
                    raise AssertionError(f"left K_{s.n} at {x}")


def test_stratum_blocks_outer(ex3, cat3, seq3):
    sb = stratum_blocks(ex3, 1, seq3.chain(), cat3)
    assert sb.minimal_orbit.period == 2
    assert sb.x0 == pytest.approx((A3, B3), abs=1e-9)
    assert sb.blocks[0] == sb.x0
    assert sb.x0[0] < ex3.c < sb.x0[1]
    assert sb.overlaps_ok
    assert len(sb.blocks) >= 1
    # every later block maps into the central one after its recorded steps
    from lorenzlab.return_maps import push_interval

    for iv, s in zip(sb.blocks[1:], sb.return_steps[1:]):
        img = push_interval(ex3, iv, s)
        assert img is not None
        assert img == pytest.approx(sb.x0, abs=1e-6)


def test_stratum_blocks_overlap_at_most_point(ex3, cat3, seq3):
    sb = stratum_blocks(ex3, 1, seq3.chain(), cat3)
    for i in range(len(sb.blocks)):
        for j in range(i + 1, len(sb.blocks)):
            lo = max(sb.blocks[i][0], sb.blocks[j][0])
            hi = min(sb.blocks[i][1], sb.blocks[j][1])
            assert hi - lo <= 1e-9


def test_classify_examples(ex1, ex2, ex3):
    assert classify_attractor(ex1).kind == "periodic_attractor"
    assert classify_attractor(ex2).kind == "interval_cycle"
    cls3 = classify_attractor(ex3)
    assert cls3.kind == "periodic_attractor"
    assert cls3.evidence["orbit"]["period"] == 4


def test_classify_solenoid_candidate():
    spec = embed_unimodal(logistic(3.569945671870944))
    budgets = Budgets(max_period=16, max_depth=3)
    cls = classify_attractor(spec, budgets)
    assert cls.kind == "solenoid"
    assert cls.confidence == "depth-capped"


def test_classify_nonregular_case():
    spec = embed_unimodal(logistic(3.2))
    cls = classify_attractor(spec, Budgets(max_period=8))
    assert cls.kind == "periodic_attractor"


def test_entropy_bounds(ex1, ex2, ex3):
    for spec in (ex1, ex2, ex3):
        h = entropy_estimate(spec, 20, 20_000)
        assert h <= math.log(2.0) + 2.0 / 20
    assert entropy_estimate(ex1, 20, 100_000) <= 0.05
    assert entropy_estimate(ex2, 20, 100_000) >= 0.6


def test_entropy_attracting_four_cycle(ex3):
    h = entropy_estimate(ex3, 20, 50_000)
    # four itinerary phases of the 4-cycle
    assert h <= math.log(4.0) / 20 + 1e-9


def test_periodic_density_on_attractor(ex2, dec2):
    # on the interval-cycle attractor, every recurrent cell at coarse
    # resolution holds a periodic point of period <= 16
    catalog = find_periodic_points(ex2, 16, 1 << 17)
    res = 1 << 8
    cells = {min(int(p * res), res - 1) for r in catalog for p in r.points}
    coarse = {int(i * res // dec2.strata[0].resolution) for i in dec2.strata[0].recurrent_cells}
    missing = coarse - cells
    assert not missing


def test_solenoid_entropy_bound():
    # the refinement is a reported bound on the attractor entropy; the
    # finite-time word count still sees slow transients at this parameter,
    # so only the universal log-2 bound is asserted against the estimate
    from lorenzlab.spectral import solenoid_entropy_bound

    spec = embed_unimodal(logistic(3.569945671870944))
    seq = find_renormalizations(spec, 16, 3)
    bound = solenoid_entropy_bound(seq.chain())
    assert bound == pytest.approx(math.log(2.0) / 8)
    h = entropy_estimate(spec, 20, 20_000)
    assert h <= math.log(2.0) + 2.0 / 20
    assert h < 0.35  # far below a chaotic word count even with transients


def test_experimental_annuli(dec3):
    assert dec3.experimental_annuli
    level = dec3.experimental_annuli[0]
    # ring between the return images of the critical values and the deepest
    # interval
    assert level[0][0] == pytest.approx(0.4335, abs=1e-9)
    assert level[-1][1] == pytest.approx(0.5665, abs=1e-9)


def test_wild_is_never_asserted(ex1, ex2, ex3):
    for spec in (ex1, ex2, ex3):
        assert classify_attractor(spec).kind != "wild_candidate"
