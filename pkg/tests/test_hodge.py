import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from pertalg.algebra import element, series_constant, differential
from pertalg.generators import random_complex, random_perturbation
from pertalg.hodge import (
    ChainComplex,
    GradedMap,
    GradedSpace,
    HodgeData,
    MCViolation,
    SingularPerturbation,
    EvaluationError,
    build_hodge,
    evaluate_element,
    gauge_conjugation,
    make_perturbation,
    nilpotency_index,
    representation_report,
    transferred_structure,
    verify_hodge,
    verify_transfer,
)

F = Fraction


def small():
    """deg0 {a, b}, deg1 {c}, d(a) = c."""
    V = GradedSpace({0: ("a", "b"), 1: ("c",)})
    return ChainComplex(V, GradedMap.from_entries(V, 1, [("a", "c", 1)]))


def x_map(C, entries):
    return GradedMap.from_entries(C.space, 1, entries)


def entries(gm):
    return sorted(gm.entries())


# -- build / verify --------------------------------------------------------------


def test_zero_differential_gives_identity_t():
    V = GradedSpace({0: ("a",), 1: ("b", "c")})
    C = ChainComplex(V, GradedMap.zero(V, shift=1))
    hd = build_hodge(C)
    assert hd.t == GradedMap.identity(V)
    assert hd.s.is_zero()
    assert all(r.passed for r in verify_hodge(C, hd))


def test_acyclic_two_term():
    V = GradedSpace({0: ("a",), 1: ("c",)})
    C = ChainComplex(V, GradedMap.from_entries(V, 1, [("a", "c", 1)]))
    hd = build_hodge(C)
    assert hd.t.is_zero()
    assert entries(hd.s) == [("c", "a", 1)]


def test_pivot_rule_example():
    C = small()
    hd = build_hodge(C)
    assert entries(hd.t) == [("b", "b", 1)]
    assert entries(hd.s) == [("c", "a", 1)]
    assert all(r.passed for r in verify_hodge(C, hd))


def test_verify_hodge_reports_failure_with_witness():
    V = GradedSpace({0: ("a",), 1: ("b",)})
    C = ChainComplex(V, GradedMap.zero(V, shift=1))
    good = HodgeData(GradedMap.zero(V, shift=-1), GradedMap.identity(V))
    assert all(r.passed for r in verify_hodge(C, good))
    bad = HodgeData(GradedMap.zero(V, shift=-1), GradedMap.zero(V))
    reports = verify_hodge(C, bad)
    failed = [r for r in reports if not r.passed]
    assert [r.identity_id for r in failed] == ["HD2 sd+ds=1-t"]
    assert failed[0].witness is not None


def test_d_squared_checked():
    V = GradedSpace({0: ("a",), 1: ("b",), 2: ("c",)})
    with pytest.raises(ValueError):
        ChainComplex(V, GradedMap.from_entries(V, 1, [("a", "b", 1), ("b", "c", 1)]))


@pytest.mark.parametrize("seed", range(20))
def test_random_complexes_harmonious(seed):
    rng = random.Random(seed)
    C = random_complex(rng)
    hd = build_hodge(C)
    assert all(r.passed for r in verify_hodge(C, hd))
    # tV computes the homology; the oracle ranks in floating point
    dims_t = {n: oracles.float_rank(hd.t.block(n)) for n in C.space.degrees}
    want = oracles.homology_dims(C.space, C.d.blocks)
    assert dims_t == want == C.cohomology_dims()
    assert (C.d @ hd.t).is_zero()


def test_build_hodge_deterministic():
    C = random_complex(random.Random(3))
    a, b = build_hodge(C), build_hodge(C)
    assert a.s == b.s and a.t == b.t


# -- perturbations ---------------------------------------------------------------


def test_zero_perturbation():
    C = small()
    hd = build_hodge(C)
    p = make_perturbation(C, hd, GradedMap.zero(C.space, shift=1))
    assert p.alpha_V == GradedMap.identity(C.space) == p.beta_V
    tr = transferred_structure(C, hd, p)
    assert tr.xi.is_zero()
    assert tr.hd_perturbed.s == hd.s and tr.hd_perturbed.t == hd.t
    g, rep = gauge_conjugation(C, hd, p)
    assert g == GradedMap.identity(C.space) and rep.passed


def test_alpha_example():
    C = small()
    hd = build_hodge(C)
    p = make_perturbation(C, hd, x_map(C, [("a", "c", 1), ("b", "c", 1)]))
    assert entries(p.alpha_V) == [("a", "a", F(1, 2)), ("b", "a", F(-1, 2)), ("b", "b", 1), ("c", "c", 1)]


def test_singular_perturbation():
    C = small()
    hd = build_hodge(C)
    with pytest.raises(SingularPerturbation, match="degree 0"):
        make_perturbation(C, hd, x_map(C, [("a", "c", -1)]))


def test_mc_violation():
    V = GradedSpace({0: ("a",), 1: ("b",), 2: ("c",)})
    C = ChainComplex(V, GradedMap.zero(V, shift=1))
    hd = build_hodge(C)
    with pytest.raises(MCViolation):
        make_perturbation(C, hd, GradedMap.from_entries(V, 1, [("a", "b", 1), ("b", "c", 1)]))


def test_transfer_example():
    C = small()
    hd = build_hodge(C)
    p = make_perturbation(C, hd, x_map(C, [("a", "c", 1), ("b", "c", 1)]))
    tr = transferred_structure(C, hd, p)
    assert tr.tspace.labels == {0: ("b",)}
    assert tr.xi.is_zero()
    assert C.cohomology_dims(p.x) == {0: 1, 1: 0}
    assert all(r.passed for r in verify_transfer(C, hd, p, tr))


def test_d_zero_trivial_hodge_xi_is_x():
    V = GradedSpace({0: ("a",), 1: ("b",), 2: ("c",)})
    C = ChainComplex(V, GradedMap.zero(V, shift=1))
    hd = build_hodge(C)
    x = GradedMap.from_entries(V, 1, [("a", "b", 2)])
    p = make_perturbation(C, hd, x)
    tr = transferred_structure(C, hd, p)
    assert tr.xi == x
    g, rep = gauge_conjugation(C, hd, p)
    assert g == GradedMap.identity(V) and rep.passed


def test_gauge_example():
    C = small()
    hd = build_hodge(C)
    p = make_perturbation(C, hd, x_map(C, [("a", "c", 1), ("b", "c", 1)]))
    g, rep = gauge_conjugation(C, hd, p)
    assert entries(g) == [("a", "a", 1), ("b", "a", F(1, 2)), ("b", "b", 1), ("c", "c", F(1, 2))]
    assert rep.passed
    # independent 3x3 check: g (d + x) g^-1 = d + t x alpha t
    dx = C.d + p.x
    xi_full = hd.t @ p.x @ p.alpha_V @ hd.t
    assert g @ dx == (C.d + xi_full) @ g


@pytest.mark.parametrize("seed", range(15))
def test_random_linear_transfer(seed):
    rng = random.Random(100 + seed)
    C = random_complex(rng)
    hd = build_hodge(C)
    p = random_perturbation(rng, C, hd)
    tr = transferred_structure(C, hd, p)
    assert all(r.passed for r in verify_transfer(C, hd, p, tr))
    g, rep = gauge_conjugation(C, hd, p)
    assert rep.passed
    dx = {n: (C.d + p.x).block(n) for n in C.space.degrees}
    assert oracles.homology_dims(C.space, dx) == C.cohomology_dims(p.x)


# -- symbolic bridge -----------------------------------------------------------


def _pert_example():
    C = small()
    hd = build_hodge(C)
    return C, hd, make_perturbation(C, hd, x_map(C, [("a", "c", 1), ("b", "c", 1)]))


def test_evaluate_examples():
    C, hd, p = _pert_example()
    assert evaluate_element(C, hd, p, element("tt")) == hd.t
    assert evaluate_element(C, hd, p, differential(element("s"))) == C.d @ hd.s + hd.s @ C.d
    g, _ = gauge_conjugation(C, hd, p)
    # s x(a) = a here, so named constants use their closed forms
    assert nilpotency_index(hd.s @ p.x) is None
    assert evaluate_element(C, hd, p, series_constant("g", 6)) == g
    assert evaluate_element(C, hd, p, series_constant("alpha", 2)) == p.alpha_V


def test_evaluate_needs_closed_form_when_not_nilpotent():
    C, hd, p = _pert_example()
    from pertalg.algebra import TruncatedSeries
    with pytest.raises(EvaluationError):
        evaluate_element(C, hd, p, TruncatedSeries(3, element({"sx": 1, "sxsx": 1})))
    with pytest.raises(EvaluationError):
        evaluate_element(C, hd, p, element({"s": 1, "x": 1}))


def test_evaluate_sums_series_when_nilpotent():
    C = small()
    hd = build_hodge(C)
    p = make_perturbation(C, hd, x_map(C, [("b", "c", 3)]))
    n = nilpotency_index(hd.s @ p.x)
    assert n == 2
    assert entries(p.alpha_V) == [("a", "a", 1), ("b", "a", -3), ("b", "b", 1), ("c", "c", 1)]
    assert evaluate_element(C, hd, p, series_constant("alpha", n)) == p.alpha_V
    g, _ = gauge_conjugation(C, hd, p)
    assert evaluate_element(C, hd, p, series_constant("g", n + 1)) == g


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6), st.text("stx", max_size=5), st.text("stx", max_size=5))
def test_representation_property(seed, u, v):
    rng = random.Random(seed)
    C = random_complex(rng, degrees=range(-1, 2), max_dim=3)
    hd = build_hodge(C)
    p = random_perturbation(rng, C, hd)
    assert representation_report(C, hd, p, element(u), element(v)) == []
