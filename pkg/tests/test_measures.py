"""Masses, averages, packing: frozen oracles and comparison properties."""

import random
from fractions import Fraction as Q

import pytest

from twoweightlab.enclosure import Enclosure
from twoweightlab.measures import (MeasureQuery, ap_product, average, mass,
                                   packing_partial, packing_sum, smallest_carrier)
from twoweightlab.triadic import IntervalQ, TriadicCell
from twoweightlab.weights import ConstructionParams, build_construction

UNIT = IntervalQ(Q(0), Q(1))


def model(k=2, p=2, depth=3, placement="right"):
    lo = max(Q(1), 1 / (Q(p) - 1))
    r = (lo + Q(p) / (Q(p) - 1)) / 2
    return build_construction(
        ConstructionParams(k=k, p=Q(p), r=r, depth=depth, placement=placement))


def sigma_mass_series_oracle(k: int, p: int, terms: int = 60) -> Q:
    """Direct summation of the support-cell sigma masses plus the exact tail."""
    rho = Q(3 ** k, 3 ** (k - 1) + 1)
    b = rho ** (1 - p)
    partial = Q(0)
    for gen in range(1, terms + 1):
        count = 3 ** ((gen - 1) * (k - 1))
        partial += count * Q(1, 3 ** (gen * k)) * b ** gen
    ratio = 3 ** (k - 1) * Q(1, 3 ** k) * b  # per-generation growth factor
    tail = (3 ** (terms * (k - 1)) * Q(1, 3 ** ((terms + 1) * k)) * b ** (terms + 1)) \
        / (1 - ratio)
    return partial + tail


def test_sigma_mass_unit_interval_frozen():
    # geometric series in exact rationals: sum of 3^(l-1) 9^-l (4/9)^l = 4/69
    assert sigma_mass_series_oracle(2, 2) == Q(4, 69)
    m = model()
    enc = mass(m, MeasureQuery("sigma", UNIT))
    assert enc.is_exact and enc.lo == Q(4, 69)


def test_w_mass_unit_and_vanishing_left_third():
    m = model()
    assert mass(m, MeasureQuery("w", UNIT)).lo == 1
    enc = mass(m, MeasureQuery("w", IntervalQ(Q(0), Q(1, 3))))
    assert enc.is_exact and enc.lo == 0


def test_carrier_averages_match_closed_forms():
    for k, p in ((2, 2), (3, 2), (2, 3)):
        m = model(k=k, p=p, depth=2)
        for gen in range(3):
            cell = m.kcell(gen, 0)
            aw = average(m, MeasureQuery("w", cell.interval(), 200))
            assert aw.is_exact and aw.lo == m.rho ** gen
            asig = average(m, MeasureQuery("sigma", cell.interval(), 200))
            assert asig.is_exact and asig.lo == m.avg_sigma_carrier(gen).lo


def test_gen1_average_is_nine_quarters():
    m = model()
    enc = average(m, MeasureQuery("w", m.kcell(1, 0).interval()))
    assert enc.lo == Q(9, 4)


def test_ap_products():
    m = model()
    support = m.support_cells(1)[0].cell
    assert ap_product(m, support.interval()).lo == 1
    assert ap_product(m, UNIT).lo == Q(4, 69)
    # on any carrier the forward product is c * 3^-k, independent of gen
    for gen in (0, 1, 2):
        enc = ap_product(m, m.kcell(gen, 0).interval(), max_depth=200)
        assert enc.lo == m.c.lo * Q(1, 9)
    dual = ap_product(m, support.interval(), "dual")
    assert dual.lo == 1


def test_wtilde_scale():
    m = model()
    enc = mass(m, MeasureQuery("wTilde", UNIT))
    assert enc.encloses(m.scale)
    assert float(enc.width) < 1e-18


def test_packing_closed_forms():
    m = model()
    root = TriadicCell("")
    enc = packing_sum(m, root, "w")
    assert enc.is_exact and enc.lo == 4
    ratio = enc.lo / 9
    assert Q(1, 3) < ratio <= Q(4, 9)
    sig = packing_sum(m, root, "sigma")
    assert sig.encloses(Enclosure.exact(Q(4, 69) / (1 - Q(4, 27))))
    partial = packing_partial(m, 0, 25, "w")
    assert partial.lo < 4
    tail = Q(3, 4) ** 26 * 4
    assert partial.lo + tail == 4


def test_packing_rejects_non_carrier():
    m = model()
    with pytest.raises(ValueError):
        packing_sum(m, TriadicCell("0"), "w")


def test_direct_sum_masses():
    from twoweightlab.weights import direct_sum
    models = [model(k=k, depth=2) for k in (4, 5)]
    comp = direct_sum(models, (4, 5))
    shift = 9 ** 4
    enc = mass(comp, MeasureQuery("sigma", IntervalQ(Q(shift), Q(shift + 1))))
    want = models[0].c.lo * Q(1, 3 ** 4)
    assert enc.is_exact and enc.lo == want
    wt = mass(comp, MeasureQuery("wTilde", IntervalQ(Q(shift), Q(shift + 1))))
    assert wt.encloses(models[0].scale)
    empty = mass(comp, MeasureQuery("sigma", IntervalQ(Q(1), Q(2))))
    assert empty.lo == 0 and empty.hi == 0


def test_enclosure_soundness_under_refinement():
    m = model()
    iv = IntervalQ(Q(0), Q(1, 2))
    prev = mass(m, MeasureQuery("w", iv, 6))
    for depth in (10, 20, 40, 80):
        cur = mass(m, MeasureQuery("w", iv, depth))
        assert prev.encloses(cur)
        prev = cur
    assert float(prev.width) < 1e-9


def test_recursion_guard_at_half():
    # 1/2 sits inside the active region at every generation; the budget stops
    # the descent with a certified enclosure instead of diverging
    m = model(depth=2)
    enc = mass(m, MeasureQuery("w", IntervalQ(Q(1, 3), Q(1, 2)), 12))
    assert enc.width > 0
    finer = mass(m, MeasureQuery("w", IntervalQ(Q(1, 3), Q(1, 2)), 36))
    assert enc.encloses(finer) and finer.width < enc.width


def test_policy_independence_mirror():
    right = model(placement="right")
    left = model(placement="left")
    rng = random.Random(11)
    for _ in range(40):
        a = Q(rng.randint(0, 3 ** 5 - 2), 3 ** 5)
        b = Q(rng.randint(int(a * 3 ** 5) + 1, 3 ** 5), 3 ** 5)
        direct = mass(right, MeasureQuery("w", IntervalQ(a, b), 200))
        mirror = mass(left, MeasureQuery("w", IntervalQ(1 - b, 1 - a), 200))
        assert direct.lo == mirror.lo and direct.hi == mirror.hi
    alternating = model(placement="alternating")
    for which in ("w", "sigma"):
        total = mass(right, MeasureQuery(which, UNIT)).lo
        assert mass(left, MeasureQuery(which, UNIT)).lo == total
        assert mass(alternating, MeasureQuery(which, UNIT)).lo == total


def test_smallest_carrier():
    m = model()
    carrier, gen, core, placed = smallest_carrier(m, IntervalQ(Q(4, 9), Q(5, 9)))
    assert carrier.address == "11" and gen == 1
    carrier, gen, _, _ = smallest_carrier(m, IntervalQ(Q(1, 9), Q(7, 9)))
    assert carrier.address == "" and gen == 0


def _case_of(m, iv):
    carrier, gen, core, placed = smallest_carrier(m, iv)
    meets_core = not iv.is_disjoint(core.interval())
    meets_support = not iv.is_disjoint(placed.interval())
    return carrier, gen, core, placed, meets_core, meets_support


def test_comparison_cases_over_random_intervals():
    """Average comparisons for random intervals, by case, across k."""
    case_b_constants = {}
    case_c_constants = {}
    for k in (2, 3, 4, 5, 6):
        m = model(k=k, depth=2)
        rng = random.Random(100 + k)
        cb, cc = 0.0, 0.0
        for _ in range(150):
            den = 3 ** rng.randint(2, min(3 * k, 12)) * 2 ** rng.randint(0, 4)
            a = Q(rng.randint(0, den - 2), den)
            b = Q(rng.randint(int(a * den) + 1, den), den)
            iv = IntervalQ(a, b)
            carrier, gen, core, placed, mc, ms = _case_of(m, iv)
            aw = average(m, MeasureQuery("w", iv, 240))
            asig = average(m, MeasureQuery("sigma", iv, 240))
            wval = m.w_value(gen + 1)
            sval = m.sigma_value(gen + 1).lo
            if not mc:
                assert aw.hi <= wval
                assert asig.hi <= sval
            elif mc and not ms:
                cb = max(cb, float(aw.hi) / float(m.avg_w_carrier(gen)))
            else:
                ratio = float(asig.hi) * float(iv.length) / \
                    (float(placed.length) * float(sval))
                cc = max(cc, ratio)
        case_b_constants[k] = cb
        case_c_constants[k] = cc
    for consts in (case_b_constants, case_c_constants):
        vals = [v for v in consts.values() if v > 0]
        assert vals and max(vals) / min(vals) <= 2


def test_endpoint_comparison_monotone():
    """Nested intervals sharing a carrier endpoint have comparable averages."""
    constants = {}
    for k in (2, 3, 4, 5):
        m = model(k=k, depth=2)
        rng = random.Random(77 + k)
        worst = 0.0
        for _ in range(60):
            den = 3 ** rng.randint(1, 8) * 2 ** rng.randint(0, 3)
            b1 = Q(rng.randint(2, den), den)
            b2 = Q(rng.randint(1, int(b1 * den) - 1), den)
            big = average(m, MeasureQuery("w", IntervalQ(Q(0), b1), 240))
            small = average(m, MeasureQuery("w", IntervalQ(Q(0), b2), 240))
            if big.lo > 0:
                worst = max(worst, float(small.hi) / float(big.lo))
        constants[k] = worst
    vals = list(constants.values())
    assert max(vals) / min(vals) <= 2
