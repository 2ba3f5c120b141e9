"""Sparse families: validators, generators, testing sums, exact inequalities."""

import math
import random
from fractions import Fraction as Q

import pytest

from twoweightlab.measures import MeasureQuery, mass
from twoweightlab.sparse import (FamilyError, SparseFamily, carleson_check,
                                 chain_decay_check, children_map,
                                 gen_adversarial, gen_random_martingale,
                                 gen_weak_family, is_martingale_sparse,
                                 restricted_packing_check, sparse_apply,
                                 sparse_maximal, sparse_packing_check,
                                 split_parameters, split_weak_to_martingale,
                                 transplant_family, validate_weak_witness)
from twoweightlab.sparse import testing_report as run_testing_report
from twoweightlab.sparse import testing_sum as run_testing_sum
from twoweightlab.triadic import IntervalQ, TriadicCell, cell_from_index
from twoweightlab.weights import ConstructionParams, build_construction, direct_sum

UNIT = IntervalQ(Q(0), Q(1))


def model(k=2, p=2, depth=2):
    return build_construction(ConstructionParams(k=k, p=Q(p), depth=depth))


def iv(a, b):
    return IntervalQ(Q(a), Q(b))


def test_martingale_validator_trivial_cases():
    ok, _ = is_martingale_sparse([iv(0, 1), IntervalQ(Q(0), Q(1, 3))], Q(1, 3))
    assert ok
    ok, report = is_martingale_sparse(
        [iv(0, 1), IntervalQ(Q(0), Q(1, 3)), IntervalQ(Q(1, 3), Q(2, 3))], Q(1, 3))
    assert not ok and report["excess"] == Q(1, 3)
    chain = [IntervalQ(Q(0), Q(1, 3 ** i)) for i in range(4)]
    ok, _ = is_martingale_sparse(chain, Q(1, 3))
    assert ok


def test_validator_rejects_overlap():
    with pytest.raises(FamilyError, match="overlap"):
        is_martingale_sparse([iv(0, Q(2, 3)), iv(Q(1, 3), 1)], Q(1, 2))


def test_children_map_forest():
    members = [iv(0, 1), IntervalQ(Q(0), Q(1, 3)), IntervalQ(Q(0), Q(1, 9)),
               IntervalQ(Q(2, 3), Q(1))]
    ch = children_map(members)
    assert set(ch[iv(0, 1)]) == {IntervalQ(Q(0), Q(1, 3)), IntervalQ(Q(2, 3), Q(1))}
    assert ch[IntervalQ(Q(0), Q(1, 3))] == [IntervalQ(Q(0), Q(1, 9))]


def test_random_generator_validates_and_is_deterministic():
    for seed in range(30):
        fam = gen_random_martingale(3, Q(1, 3), seed)
        if fam.members:
            ok, _ = is_martingale_sparse(fam)
            assert ok
        again = gen_random_martingale(3, Q(1, 3), seed)
        assert fam.members == again.members
    tight = gen_random_martingale(3, Q(1, 100), 7)
    if tight.members:
        ok, _ = is_martingale_sparse(tight)
        assert ok


def test_adversarial_kinds_validate():
    m = model(k=4)
    for kind in ("chainToward_IJ", "S1", "S2", "S3", "S4", "boundaryChain"):
        for eps in (Q(1, 3), Q(1, 2)):
            fam = gen_adversarial(m, kind, TriadicCell(""), eps)
            if fam.members:
                ok, report = is_martingale_sparse(fam)
                assert ok, (kind, eps, report)


def test_s3_chain_length_law():
    for k in (4, 6, 8, 10, 12):
        m = model(k=k, depth=1)
        for eps in (Q(1, 3), Q(1, 2)):
            fam = gen_adversarial(m, "S3", TriadicCell(""), eps)
            # maximal by construction: lengths eps^n while >= 2*3^-k
            n = 0
            length = eps
            while length >= 2 * Q(1, 3 ** k):
                n += 1
                length *= eps
            assert len(fam.members) == n
            bound = (k * math.log(3) - math.log(2)) / math.log(1 / float(eps)) + 1
            assert len(fam.members) <= bound


def test_singleton_budget_chain():
    m = model(k=3)
    fam = gen_adversarial(m, "chainToward_IJ", TriadicCell(""), Q(1, 3))
    assert fam.members[0] == UNIT


def test_testing_sum_frozen_values():
    m = model()
    fam = SparseFamily((UNIT,), "martingale", Q(1, 2))
    enc = run_testing_sum(m, fam, UNIT)
    assert enc.is_exact and enc.lo == Q(4, 69)
    assert run_testing_sum(m, SparseFamily((iv(0, Q(1, 3)),), "martingale", Q(1, 2)),
                       UNIT).lo == 0  # vanishing region: zero averages
    empty = run_testing_sum(m, SparseFamily(tuple(), "martingale", Q(1, 2)), UNIT)
    assert empty.lo == 0 and empty.hi == 0


def test_testing_report_ratio_example():
    m = model()
    fam = SparseFamily((UNIT,), "martingale", Q(1, 2))
    rep = run_testing_report(m, fam, UNIT)
    assert abs(rep.ratio - 1 / 69) < 1e-12
    assert rep.kfree_ratio is not None
    assert rep.verdict == "report-only"


def test_testing_report_flags_zero_mass_violation():
    m = model()
    fam = SparseFamily((iv(0, Q(1, 3)),), "martingale", Q(1, 2))
    rep = run_testing_report(m, fam, iv(0, Q(1, 3)))
    assert rep.ratio == 0.0


def test_transplant_preserves_sparseness():
    m = model(k=3)
    fam = gen_random_martingale(4, Q(1, 2), 3)
    support = m.support_cells(1)[0].cell
    local = transplant_family(fam, support)
    ok, _ = is_martingale_sparse(local)
    assert ok
    assert all(support.interval().contains(mem) for mem in local.members)


def test_sparse_packing_and_chain_inequalities():
    for seed in range(50):
        fam = gen_random_martingale(4, Q(1, 2), seed)
        if not fam.members:
            continue
        res = sparse_packing_check(fam, UNIT)
        assert res["ok"]
    chain = [IntervalQ(Q(0), Q(1, 2 ** i)) for i in range(6)]
    res = chain_decay_check(chain, Q(1, 32), 2, Q(1, 2))
    assert res["ok"]
    with pytest.raises(FamilyError):
        chain_decay_check([iv(0, Q(1, 2)), iv(Q(1, 2), 1)], Q(1, 4), 2, Q(1, 2))


def test_carleson_trivial_and_named_rejection():
    res = carleson_check(0, {"": Q(1)}, [Q(1)], 2, 1)
    assert res["ok"] and res["lhs"] == 1 and res["rhs"] == 4
    res = carleson_check(1, {"": Q(1), "0": Q(3)}, [Q(1), Q(0), Q(0)], 2, 1)
    assert not res["ok"] and res["stage"] == "precondition" and res["cell"] == "0"


def test_carleson_reproduces_restricted_packing():
    rng = random.Random(5)
    for seed in range(25):
        fam = gen_random_martingale(3, Q(1, 2), 900 + seed, max_members=12)
        if not fam.members:
            continue
        coeffs = {}
        for member in fam.members:
            depth = 0
            length = member.length
            while length < 1:
                length *= 3
                depth += 1
            coeffs[cell_from_index(depth, int(member.left * 3 ** depth)).address] = Q(1)
        pieces = [cell_from_index(3, rng.randrange(27)).interval()
                  for _ in range(rng.randint(1, 4))]
        f = [Q(0)] * 27
        for i in range(27):
            leaf = cell_from_index(3, i).interval()
            f[i] = sum((1 for p in pieces if not leaf.is_disjoint(p) and
                        p.intersect(leaf) is not None and
                        p.intersect(leaf).length == leaf.length), Q(0))
            f[i] = min(f[i], Q(1))
        res = carleson_check(3, coeffs, f, 3, Q(2))
        assert res["ok"]
        rp = restricted_packing_check(fam, pieces, UNIT, 2)
        assert rp["ok"]


def test_sparse_apply_and_maximal():
    f = [(UNIT, Q(1))]
    fam = SparseFamily((UNIT, IntervalQ(Q(0), Q(1, 3))), "martingale", Q(1, 2))
    val, inner = sparse_apply(fam, f, 2, Q(1, 6))
    assert inner == 2 and abs(val - math.sqrt(2)) < 1e-12
    assert sparse_apply(fam, f, 2, Q(5, 6))[1] == 1
    assert sparse_apply(fam, f, 2, Q(3, 2))[1] == 0  # outside every member
    assert sparse_maximal(fam, f, Q(1, 6)) == 1
    # two nested intervals with averages a, b -> sqrt(a^2 + b^2)
    g = [(IntervalQ(Q(0), Q(1, 2)), Q(2))]
    val, inner = sparse_apply(fam, g, 2, Q(1, 6))
    assert inner == Q(1) + Q(4)  # averages 1 and 2
    assert abs(val - math.sqrt(5)) < 1e-12
    # p = 1 degenerates to the plain sparse operator (sum of averages)
    val1, inner1 = sparse_apply(fam, g, 1, Q(1, 6))
    assert inner1 == 3 and abs(val1 - 3.0) < 1e-12


def test_split_parameters_match_the_reduction():
    m, eps = split_parameters(Q(1, 2))
    assert m == 12 and eps == Q(11, 12)
    m, eps = split_parameters(Q(3, 4))
    assert 0 < eps < 1


def test_split_already_martingale_unchanged():
    members = (UNIT, IntervalQ(Q(0), Q(1, 3)))
    fam = SparseFamily(members, "weak", Q(1, 2))
    out = split_weak_to_martingale(fam)
    assert len(out) == 1 and out[0].members == members
    # two disjoint intervals are already a valid martingale family
    fam2 = SparseFamily((iv(0, Q(1, 3)), iv(Q(2, 3), 1)), "weak", Q(1, 2))
    out2 = split_weak_to_martingale(fam2)
    assert len(out2) == 1
    assert sorted(out2[0].members, key=lambda i: i.left) == sorted(
        fam2.members, key=lambda i: i.left)


def test_split_random_weak_families():
    for seed in (1, 2, 3):
        fam = gen_weak_family(seed, count=50, eta=Q(1, 2))
        assert len(fam.members) == 50
        validate_weak_witness(fam)
        out = split_weak_to_martingale(fam)
        m, eps = split_parameters(Q(1, 2))
        assert len(out) <= 3 * m
        total = sum(len(f.members) for f in out)
        assert total == len(fam.members)
        seen = set()
        for piece in out:
            ok, report = is_martingale_sparse(piece)
            assert ok, report
            for member in piece.members:
                assert member not in seen
                seen.add(member)


def test_weak_witness_validation_catches_bad_sets():
    fam = SparseFamily((UNIT,), "weak", Q(1, 2),
                       witness=((UNIT, (IntervalQ(Q(0), Q(1, 4)),)),))
    with pytest.raises(FamilyError, match="too small"):
        validate_weak_witness(fam)


def test_composite_testing_uniform_over_copies():
    """Testing ratios over the shifted direct sum stay bounded."""
    models = [model(k=k, depth=2) for k in (4, 5)]
    comp = direct_sum(models, (4, 5))
    members = []
    for k in (4, 5):
        shift = 9 ** k
        members.append(IntervalQ(Q(shift), Q(shift + 1)))
        members.append(IntervalQ(Q(shift), Q(shift) + Q(1, 3)))
    members.append(IntervalQ(Q(9 ** 4), Q(9 ** 5 + 1)))
    fam = SparseFamily(tuple(members), "martingale", Q(1, 2))
    big = IntervalQ(Q(0), Q(9 ** 5 + 2))
    total = Q(0)
    p = Q(2)
    for member in fam.members:
        aw = mass(comp, MeasureQuery("wTilde", member)) * (1 / member.length)
        asig = mass(comp, MeasureQuery("sigma", member)) * (1 / member.length)
        total += aw.hi ** 2 * asig.hi * member.length
    wl = mass(comp, MeasureQuery("wTilde", big))
    ratio = total * Q(1, 2) / wl.lo
    assert ratio < 2
