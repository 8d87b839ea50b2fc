from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import mark, raises

from heatsos.diffform import (
    DiffPoly, FormParseError, LaurentForm, Q, compare_monomials, compare_syms,
    differentiate, dsym, encode_monomial, encode_poly, encode_symbol,
    heat_axis_derivation, heat_time_derivative, laurent, mono, mono_degree,
    mono_mul, mono_order, mono_total_order, parse_monomial, parse_poly,
    parse_symbol, poly_term, subst_axes,
)

parametrize = mark.parametrize

F = dsym()
F1, F2, F3, F4, F5 = (dsym(*([1] * k)) for k in range(1, 6))


# ---------------------------------------------------------------------------
# frozen differentiation examples

def test_derivative_of_gradient_power():
    # d/dx (f1^5) = 5 f1^4 f2
    got = differentiate(poly_term(1, *([F1] * 5)), 1)
    assert got == poly_term(5, F1, F1, F1, F1, F2)


def test_derivative_product_rule_three_groups():
    # d/dx (f^3 f2 f3) = 3 f^2 f1 f2 f3 + f^3 f3^2 + f^3 f2 f4
    got = differentiate(poly_term(1, F, F, F, F2, F3), 1)
    want = (poly_term(3, F, F, F1, F2, F3) + poly_term(1, F, F, F, F3, F3)
            + poly_term(1, F, F, F, F2, F4))
    assert got == want


def test_heat_derivative_of_symbol():
    # d/dt f1 = (1/2) f3 in one dimension
    assert heat_time_derivative(poly_term(1, F1), 1) == poly_term(Q(1, 2), F3)


def test_heat_derivative_of_density_two_axes():
    got = heat_time_derivative(poly_term(1, F), 2)
    want = poly_term(Q(1, 2), dsym(1, 1)) + poly_term(Q(1, 2), dsym(2, 2))
    assert got == want


def test_heat_derivative_quotient():
    # d/dt (f1^2 / f) = (f f1 f3 - (1/2) f1^2 f2) / f^2
    got = heat_time_derivative(laurent(poly_term(1, F1, F1), 1), 1)
    assert got.p_power == 2
    assert got.num == poly_term(1, F, F1, F3) + poly_term(Q(-1, 2), F1, F1, F2)


def test_heat_derivative_rejects_abstract_axes():
    with raises(ValueError):
        heat_time_derivative(poly_term(1, dsym("a")), 2)


# ---------------------------------------------------------------------------
# ordering

def test_one_axis_cubic_basis_order():
    # f^2 f3 > f f1 f2 > f1^3
    m1, m2, m3 = mono(F, F, F3), mono(F, F1, F2), mono(F1, F1, F1)
    assert compare_monomials(m1, m2) == 1
    assert compare_monomials(m2, m3) == 1
    assert compare_monomials(m1, m3) == 1
    assert compare_monomials(m2, m1) == -1
    assert compare_monomials(m2, m2) == 0


def _two_axis_cubic_listing():
    p, d1, d2 = dsym(), dsym(1), dsym(2)
    d11, d12, d22 = dsym(1, 1), dsym(1, 2), dsym(2, 2)
    d111, d112, d122, d222 = (dsym(1, 1, 1), dsym(1, 1, 2), dsym(1, 2, 2),
                              dsym(2, 2, 2))
    return [
        mono(p, p, d222), mono(p, p, d122), mono(p, p, d112), mono(p, p, d111),
        mono(p, d22, d2), mono(p, d22, d1), mono(p, d12, d2), mono(p, d12, d1),
        mono(p, d11, d2), mono(p, d11, d1),
        mono(d2, d2, d2), mono(d2, d2, d1), mono(d2, d1, d1), mono(d1, d1, d1),
    ]


def test_two_axis_cubic_listing_strictly_decreasing():
    ms = _two_axis_cubic_listing()
    assert len(ms) == 14
    for a, b in zip(ms, ms[1:]):
        assert compare_monomials(a, b) == 1


def test_symbol_order_ranks_total_order_first():
    assert compare_syms(dsym(1, 1, 1), dsym(2, 2)) == 1
    assert compare_syms(dsym(2, 2), dsym(1, 2)) == 1
    assert compare_syms(dsym(2), dsym(1)) == 1
    assert compare_syms(dsym(), dsym()) == 0


def test_compare_rejects_mixed_axis_kinds():
    with raises(ValueError):
        compare_monomials(mono(dsym(1)), mono(dsym("a")))


# ---------------------------------------------------------------------------
# substitution

def test_subst_axes_merges_colliding_axes():
    m = mono(dsym("a"), dsym("b"))  # da p * db p -> (d1 p)^2
    got = subst_axes(DiffPoly({m: Q(1)}), {"a": 1, "b": 1})
    assert got == poly_term(1, F1, F1)
    sym = dsym("a", "b", "b")
    got = subst_axes(DiffPoly({mono(sym): Q(1)}), {"a": 2, "b": 1})
    assert got == poly_term(1, dsym(1, 1, 2))


def test_subst_axes_accumulates_coefficients():
    pol = poly_term(1, dsym("a")) + poly_term(2, dsym("b"))
    got = subst_axes(pol, {"a": 1, "b": 1})
    assert got == poly_term(3, F1)


# ---------------------------------------------------------------------------
# Laurent forms

def test_laurent_cancels_common_density_factor():
    lf = laurent(poly_term(2, F, F1) + poly_term(1, F, F, F2), 3)
    assert lf.p_power == 2
    assert lf.num == poly_term(2, F1) + poly_term(1, F, F2)


def test_laurent_as_poly_requires_cancellation():
    with raises(ValueError):
        laurent(poly_term(1, F1), 1).as_poly()
    assert laurent(poly_term(1, F, F1), 1).as_poly() == poly_term(1, F1)


def test_laurent_arithmetic():
    a = laurent(poly_term(1, F1), 1)
    b = laurent(poly_term(1, F2), 2)
    s = a + b
    assert s.p_power == 2
    assert s.num == poly_term(1, F, F1) + poly_term(1, F2)


# ---------------------------------------------------------------------------
# encoding

@parametrize("text", [
    "d[]", "d[1:2]", "d[a:1,b:2]", "d[1:1,2:3]",
])
def test_symbol_roundtrip(text):
    assert encode_symbol(parse_symbol(text)) == text


@parametrize("text", [
    "1", "d[]^2*d[1:3]", "d[]*d[1:1]*d[1:2]", "d[a:1]*d[b:1]",
])
def test_monomial_roundtrip(text):
    assert encode_monomial(parse_monomial(text)) == text


def test_poly_roundtrip_bytes_stable():
    p = (poly_term(Q(1, 4), F, F, F, F, F3, F3)
         + poly_term(-3, F, F1, F2) + poly_term(1, F1, F1, F1))
    text = encode_poly(p)
    assert parse_poly(text) == p
    assert encode_poly(parse_poly(text)) == text


@parametrize("bad", [
    "d[1:0]", "d[0:1]", "d[x:1]", "d[1]", "d[1:1,1:2]", "d",
])
def test_symbol_parse_errors(bad):
    with raises(FormParseError):
        parse_symbol(bad)


def test_rational_parse_errors():
    with raises(FormParseError):
        parse_poly("1/0*d[]")
    with raises(FormParseError):
        parse_poly("d[]")  # term without coefficient


# ---------------------------------------------------------------------------
# property tests

axes_st = st.sampled_from([1, 2])
sym_st = st.builds(lambda axs: dsym(*axs), st.lists(axes_st, max_size=3))
mono_st = st.builds(lambda ss: mono(*ss), st.lists(sym_st, max_size=3))
coef_st = st.integers(min_value=-4, max_value=4)
poly_st = st.builds(
    lambda items: DiffPoly({m: Q(c) for m, c in items}),
    st.lists(st.tuples(mono_st, coef_st), max_size=4),
)


@given(poly_st)
def test_mixed_partials_commute(p):
    assert differentiate(differentiate(p, 1), 2) == \
        differentiate(differentiate(p, 2), 1)


@given(poly_st, poly_st)
def test_heat_derivation_leibniz(p, q):
    da = heat_axis_derivation(p * q, 1)
    assert da == heat_axis_derivation(p, 1) * q + p * heat_axis_derivation(q, 1)


@given(poly_st, poly_st)
def test_differentiate_additive(p, q):
    assert differentiate(p + q, 2) == differentiate(p, 2) + differentiate(q, 2)


@given(mono_st, mono_st)
def test_compare_antisymmetric(m1, m2):
    c = compare_monomials(m1, m2)
    assert compare_monomials(m2, m1) == -c
    assert (c == 0) == (m1 == m2)


@given(mono_st, mono_st, mono_st)
def test_compare_transitive(m1, m2, m3):
    ms = sorted([m1, m2, m3],
                key=lambda m: (compare_monomials(m, m1) + compare_monomials(m, m2)
                               + compare_monomials(m, m3)))
    assert compare_monomials(ms[0], ms[1]) <= 0
    assert compare_monomials(ms[1], ms[2]) <= 0
    assert compare_monomials(ms[0], ms[2]) <= 0


@given(st.lists(sym_st, max_size=4))
def test_monomial_canonicalization_idempotent(ss):
    m = mono(*ss)
    assert mono(*m) == m
    assert mono(*reversed(m)) == m


@given(mono_st, mono_st)
def test_stats_add_under_product(m1, m2):
    m = mono_mul(m1, m2)
    assert mono_degree(m) == mono_degree(m1) + mono_degree(m2)
    assert mono_total_order(m) == mono_total_order(m1) + mono_total_order(m2)
    assert mono_order(m) == max(mono_order(m1), mono_order(m2))


@given(poly_st)
def test_poly_encoding_roundtrip(p):
    assert parse_poly(encode_poly(p)) == p


@given(poly_st, poly_st, poly_st)
@settings(max_examples=50)
def test_ring_distributivity(p, q, r):
    assert p * (q + r) == p * q + p * r


def test_rational_type_matches_stdlib_fractions():
    assert Q(1, 3) == Fraction(1, 3)
    assert Q("-7/2") == Fraction(-7, 2)
