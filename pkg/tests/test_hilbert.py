"""Log-kernel transform and maximal function: identities and enclosures."""

import math
from fractions import Fraction as Q

import pytest

from twoweightlab.hilbert import (BoundaryError, hilbert_indicator, hilbert_weight,
                                  hilbert_pointwise_report, maximal_at,
                                  maximal_report, probe_points)
from twoweightlab.weights import ConstructionParams, build_construction


def model(k=4, depth=2, placement="right"):
    return build_construction(
        ConstructionParams(k=k, depth=depth, placement=placement))


def test_indicator_closed_forms():
    assert abs(hilbert_indicator(0, 1, 2) - math.log(2)) < 1e-12
    assert hilbert_indicator(Q(1, 4), Q(3, 4), Q(1, 2)) == 0.0
    assert abs(hilbert_indicator(0, 1, Q(1, 3)) + math.log(2)) < 1e-12


def test_indicator_endpoint_rejection():
    with pytest.raises(BoundaryError):
        hilbert_indicator(0, 1, 1)
    with pytest.raises(BoundaryError):
        hilbert_indicator(0, 1, 0)


def test_indicator_additivity():
    a, b, c, x = Q(0), Q(2, 7), Q(1), Q(5, 3)
    whole = hilbert_indicator(a, c, x)
    parts = hilbert_indicator(a, b, x) + hilbert_indicator(b, c, x)
    assert abs(whole - parts) < 1e-12


def test_far_field_enclosure():
    m = model()
    hv = hilbert_weight(m, Q(2), tail_budget=0.4)
    # total mass 1 and kernel between 1/2 and 1 on [0,1)
    assert 0.5 <= hv.value.lo and hv.value.hi <= 1.0
    far = hilbert_weight(m, Q(11), tail_budget=1e-3)
    assert far.value.hi <= 1 / 10


def test_boundary_point_rejected():
    m = model(k=2)
    support = m.support_cells(1)[0].cell
    with pytest.raises(BoundaryError):
        hilbert_weight(m, support.left, tail_budget=1e-3)


def test_gen1_ratio_matches_harmonic_sum():
    """At a generation-1 probe midpoint the own-core tiles dominate and give
    roughly the harmonic sum over 3^(k-1) tiles."""
    m = model(k=4)
    (probe, x) = probe_points(m, 1, 1, 1, 0)[0]
    hv = hilbert_weight(m, x, tail_budget=1e-3)
    ratio = hv.value.mid / float(m.w_value(1))
    harmonic = sum(1 / j for j in range(1, 3 ** 3 + 1))
    assert abs(ratio - harmonic) < 0.35
    assert hv.converged


def test_reflection_antisymmetry():
    right = model(k=3)
    left = model(k=3, placement="left")
    for x in (Q(7, 10), Q(13, 16), Q(2)):
        a = hilbert_weight(right, x, tail_budget=1e-4)
        b = hilbert_weight(left, 1 - x, tail_budget=1e-4)
        assert abs(a.value.mid + b.value.mid) < 3e-4


def test_probe_points_deterministic_and_inside():
    m = model(k=6)
    pts = probe_points(m, 2, 5, 2, seed=9)
    again = probe_points(m, 2, 5, 2, seed=9)
    assert [(c.address, x) for c, x in pts] == [(c.address, x) for c, x in again]
    for cell, x in pts:
        assert cell.contains_point(x)


def test_pointwise_report_widths_and_values():
    m = model(k=6)
    rep = hilbert_pointwise_report(m, 2, cells_per_gen=4, seed=3)
    assert rep["max_rel_width"] <= 0.01
    for row in rep["rows"]:
        assert row["w"] == m.w_value(row["gen"])
        assert row["converged"]
    assert rep["min_ratio"] > 1


def test_pointwise_report_depth_guard():
    m = model(k=4, depth=1)
    with pytest.raises(ValueError):
        hilbert_pointwise_report(m, 2)


def test_maximal_basic_bounds():
    m = model(k=4)
    (probe, x) = probe_points(m, 1, 1, 1, 0)[0]
    res = maximal_at(m, x)
    assert res["lower"] >= res["w"]  # averaging over the constancy cell
    assert res["upper"] >= res["lower"]
    deeper = maximal_at(m, x, extra_gens=4)
    assert deeper["lower"] >= res["lower"]
    assert deeper["upper"] <= res["upper"]


def test_maximal_rejects_outside_support():
    m = model(k=3)
    with pytest.raises(ValueError, match="support"):
        maximal_at(m, Q(1, 10))


def test_maximal_report_within_13():
    m = model(k=5)
    rep = maximal_report(m, 2, cells_per_gen=3, seed=1)
    assert rep["all_within_13"]
