from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from pertalg.algebra import (
    AlgebraElement,
    NotInvertibleError,
    TruncatedSeries,
    apply_phi,
    apply_rho,
    coproduct,
    counit,
    degree,
    differential,
    element,
    gauge_action,
    invert_series,
    multiply,
    normal_form,
    series_constant,
    tensor,
    twisted_differential,
    xcount,
)
from pertalg.scalars import GF

words = st.text(alphabet="stx", max_size=8)
normal_words = words.map(oracles.nf).filter(lambda w: w is not None)
coeffs = st.integers(-3, 3).filter(lambda c: c != 0)
elements = st.dictionaries(normal_words, coeffs, max_size=4).map(element)


def E(spec) -> AlgebraElement:
    return element(spec)


def T(spec, cap) -> TruncatedSeries:
    return TruncatedSeries(cap, element(spec))


# -- normal forms and products ------------------------------------------------


@pytest.mark.parametrize("letters, expected", [
    ("tt", "t"), ("st", None), ("sxs", "sxs"), ("ss", None), ("ts", None),
    ("ttt", "t"), ("xtttx", "xtx"), ("", ""),
])
def test_normal_form(letters, expected):
    got = normal_form(letters)
    assert got == (E({}) if expected is None else E(expected))


@given(words)
def test_normal_form_matches_string_rewriting(w):
    want = oracles.nf(w)
    assert normal_form(w) == (E({}) if want is None else E(want))


def test_multiply_examples():
    assert multiply(E("t"), E("t")) == E("t")
    assert multiply(E("sx"), E("st")) == E({})
    assert multiply(E({"": 1, "sx": -1}), E({"": 1, "sx": 1})) == E({"": 1, "sxsx": -1})


@given(elements, elements)
def test_multiply_matches_oracle(a, b):
    assert oracles.as_dict(a * b) == oracles.mul(oracles.as_dict(a), oracles.as_dict(b))


@given(elements, elements, elements)
def test_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


def test_canonical_term_order():
    a = E({"x": 1, "s": 2, "": 3, "ts": 5, "xs": 4})
    assert [w for _, w in a.terms] == ["", "s", "x", "xs"]


# -- differential --------------------------------------------------------------


def test_differential_examples():
    assert differential(E("s")) == E({"": 1, "t": -1})
    assert differential(E("x")) == E({"xx": -1})
    assert differential(E("t")) == E({})
    assert differential(E("sx")) == E({"x": 1, "tx": -1, "sxx": 1})
    assert differential(differential(E("sx"))) == E({})


@settings(max_examples=1000)
@given(normal_words)
def test_d_squared_zero(w):
    assert differential(differential(E(w))).is_zero()


@given(elements)
def test_differential_matches_oracle(a):
    assert oracles.as_dict(differential(a)) == oracles.d(oracles.as_dict(a))


@given(normal_words, normal_words)
def test_leibniz(u, v):
    a, b = E(u), E(v)
    sign = -1 if degree(u) % 2 else 1
    assert differential(a * b) == differential(a) * b + (a * differential(b)).scale(sign)


# -- coproduct and counit ------------------------------------------------------


def test_coproduct_examples():
    assert coproduct(E("t")) == tensor(E("t"), E("t"))
    assert coproduct(E("")) == tensor(E(""), E(""))
    lhs = coproduct(E({"": 1, "sx": 1}))
    rhs = (tensor(E({"": 1, "sx": 1}), E("")) + tensor(E("s"), E("x"))
           - tensor(E("tx"), E("s")) + tensor(E("t"), E("sx")))
    assert lhs == rhs


def _d_tensor(z):
    out = None
    for (l, r), c in z.items():
        sign = -1 if degree(l) % 2 else 1
        term = tensor(differential(E(l)).scale(c), E(r)) + tensor(E(l).scale(c * sign), differential(E(r)))
        out = term if out is None else out + term
    return out if out is not None else tensor(E({}), E({}))


@given(normal_words)
def test_coproduct_is_chain_map(w):
    assert coproduct(differential(E(w))) == _d_tensor(coproduct(E(w)))


def _delta_left(z):
    """(Delta (x) id) as a dict of triples."""
    out = {}
    for (l, r), c in z.items():
        for (a, b), e in coproduct(E(l)).items():
            out[(a, b, r)] = out.get((a, b, r), 0) + c * e
    return {k: v for k, v in out.items() if v != 0}


def _delta_right(z):
    out = {}
    for (l, r), c in z.items():
        for (a, b), e in coproduct(E(r)).items():
            out[(l, a, b)] = out.get((l, a, b), 0) + c * e
    return {k: v for k, v in out.items() if v != 0}


@given(normal_words)
def test_coassociative(w):
    z = coproduct(E(w))
    assert _delta_left(z) == _delta_right(z)


@given(normal_words)
def test_counit_axioms(w):
    z = coproduct(E(w))
    left = E({})
    right = E({})
    for (l, r), c in z.items():
        left = left + E(r).scale(c * counit(E(l)))
        right = right + E(l).scale(c * counit(E(r)))
    assert left == E(w) and right == E(w)


def test_counit_examples():
    assert counit(E("t")) == 1
    assert counit(E("sxt")) == 0
    assert counit(E("")) == 1


@given(normal_words, normal_words)
def test_coproduct_multiplicative(u, v):
    assert coproduct(E(u) * E(v)) == coproduct(E(u)) * coproduct(E(v))


# -- rho ----------------------------------------------------------------------


def test_rho_examples():
    assert apply_rho(E("x")) == E({"x": -1})
    assert apply_rho(E("t")) == E("t")
    assert apply_rho(E("s")) == E("s")
    assert apply_rho(E("sx")) == E("xs")
    assert apply_rho(apply_rho(E("sx"))) == E("sx")


@given(normal_words, normal_words)
def test_rho_anti_automorphism(u, v):
    sign = -1 if (degree(u) * degree(v)) % 2 else 1
    assert apply_rho(E(u) * E(v)) == (apply_rho(E(v)) * apply_rho(E(u))).scale(sign)


@given(elements)
def test_rho_involution(a):
    assert apply_rho(apply_rho(a)) == a


@settings(max_examples=50)
@given(normal_words.filter(lambda w: len(w) <= 5), st.integers(0, 4))
def test_rho_commutes_with_phi(w, cap):
    assert apply_rho(apply_phi(E(w), cap)) == apply_phi(apply_rho(E(w)), cap)


# -- series constants ---------------------------------------------------------


def test_series_examples():
    assert series_constant("alpha", 2) == T({"": 1, "sx": -1, "sxsx": 1}, 2)
    assert series_constant("xi", 0).is_zero()
    assert series_constant("xi", 1) == T("txt", 1)
    assert series_constant("g", 1) == T({"": 1, "xs": -1, "sxt": 1}, 1)
    assert series_constant("alpha_inv", 5) == T({"": 1, "sx": 1}, 5)
    assert series_constant("beta_inv", 5) == T({"": 1, "xs": 1}, 5)
    with pytest.raises(KeyError):
        series_constant("gamma", 2)


@pytest.mark.parametrize("cap", range(7))
def test_alpha_matches_oracle(cap):
    assert oracles.as_dict(series_constant("alpha", cap)) == oracles.geometric("sx", cap)
    assert oracles.as_dict(series_constant("beta", cap)) == oracles.geometric("xs", cap)


def test_invert_series_examples():
    assert invert_series(T({"": 1, "sx": 1}, 6)) == series_constant("alpha", 6)
    assert invert_series(T("", 3)) == T("", 3)
    assert invert_series(series_constant("g", 4)) == series_constant("g_inv", 4)


def test_invert_series_units_of_h():
    u = T({"": 2, "t": 1, "s": 3, "sx": 1}, 4)
    v = invert_series(u)
    assert u * v == T("", 4) and v * u == T("", 4)
    with pytest.raises(NotInvertibleError):
        invert_series(T({"": 1, "t": -1}, 3))
    with pytest.raises(NotInvertibleError):
        invert_series(T("x", 3))


# -- phi, twisted differential, gauge action ----------------------------------


def test_phi_examples():
    assert apply_phi(E("x"), 3) == T({"x": -1}, 3)
    assert apply_phi(E("t"), 1) == T({"t": 1, "sxt": -1, "txs": -1}, 1)
    assert apply_phi(apply_phi(E("s"), 4), 4) == T("s", 4)


@settings(max_examples=40)
@given(normal_words.filter(lambda w: len(w) <= 4))
def test_phi_involution(w):
    assert apply_phi(apply_phi(E(w), 4), 4) == T(w, 4)


def test_twisted_differential_examples():
    assert twisted_differential(E(""), 3).is_zero()
    assert twisted_differential(E("t"), 3) == T({"xt": 1, "tx": -1}, 3)
    phi_s = apply_phi(E("s"), 3)
    phi_t = apply_phi(E("t"), 3)
    assert twisted_differential(phi_s, 3) == T("", 3) - phi_t


@settings(max_examples=60)
@given(elements, st.integers(0, 4))
def test_twisted_differential_squares_to_zero(a, cap):
    assert twisted_differential(twisted_differential(a, cap), cap).is_zero()


def test_gauge_examples():
    x = T("x", 6)
    assert gauge_action(T("", 6), x) == x
    assert gauge_action(series_constant("g", 6), x) == series_constant("xi", 6)
    beta = series_constant("beta", 6)
    assert gauge_action(beta, x) == beta * x * T("t", 6)


def test_gauge_preserves_mc():
    cap = 5
    y = gauge_action(series_constant("alpha", cap), T("x", cap))
    assert (differential(y) + y * y).is_zero()


# -- homogeneity and truncation -----------------------------------------------


@given(normal_words)
def test_homogeneity(w):
    d = degree(w)
    assert differential(E(w)).degrees() <= {d + 1}
    assert apply_rho(E(w)).degrees() <= {d}
    assert (E("s") * E(w)).degrees() <= {d - 1}
    assert apply_phi(E(w), 3).element.degrees() <= {d}
    for (l, r), _ in coproduct(E(w)).items():
        assert degree(l) + degree(r) == d


NAMES = ("alpha", "beta", "alpha_inv", "beta_inv", "xi", "g", "g_inv", "k")


@pytest.mark.parametrize("name", NAMES)
def test_truncation_coherence_constants(name):
    top = series_constant(name, 6)
    for m in range(6):
        assert top.truncate(m) == series_constant(name, m)


@settings(max_examples=30)
@given(normal_words.filter(lambda w: len(w) <= 4), st.integers(0, 3))
def test_truncation_coherence_operations(w, m):
    n = m + 2
    a = E(w)
    assert apply_phi(a, n).truncate(m) == apply_phi(a, m)
    assert twisted_differential(a, n).truncate(m) == twisted_differential(a, m)
    g_n, g_m = series_constant("g", n), series_constant("g", m)
    assert gauge_action(g_n, T("x", n)).truncate(m) == gauge_action(g_m, T("x", m))
    assert (series_constant("alpha", n) * T(w, n)).truncate(m) == series_constant("alpha", m) * T(w, m)
    assert invert_series(g_n).truncate(m) == invert_series(g_m)


def test_series_store_bounded_xcount():
    s = series_constant("g_inv", 3)
    assert all(xcount(w) <= 3 for _, w in s.element.terms)


# -- prime-field mode ---------------------------------------------------------


def test_prime_field_constants_reduce():
    F = GF(7)
    a = series_constant("alpha", 3, F)
    q = series_constant("alpha", 3)
    assert [(int(c.v) if hasattr(c, "v") else c, w) for c, w in a.element.terms] == \
        [(int(c) % 7, w) for c, w in q.element.terms]
    with pytest.raises(ValueError):
        GF(8)
