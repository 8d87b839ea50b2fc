import math

from hypothesis import given, settings, strategies as st
from pytest import approx, mark, raises

from heatsos.constraints import (
    IntegralConstraint, divergence_constraint, integral_constraints,
    log_concave_constraints, log_concave_matrix, pair_auxiliary_kernels,
    principal_minors, signed_minor,
)
from heatsos.diffform import (
    Q, differentiate, dsym, laurent, mono_degree, mono_total_order, poly_sum,
    poly_term, subst_axes,
)
from heatsos.oracle import eval_form, integrate_form, mixture

parametrize = mark.parametrize

F = dsym()
F1, F2, F3, F4, F5, F6 = (dsym(*([1] * k)) for k in range(1, 7))

MIX1 = mixture([(0.6, (-0.5,), 1.0), (0.4, (0.7,), 1.5)])
MIX2 = mixture([(0.6, (-0.5, 0.3), 1.0), (0.4, (0.7, -0.2), 1.5)])
STD2 = mixture([(1.0, (0.0, 0.0), 1.0)])


# ---------------------------------------------------------------------------
# divergence constraints

def test_single_divergence_constraint():
    # G = f1^5, axis 1, m=3: p G' - 4 G p' = 5 f f1^4 f2 - 4 f1^6
    con = divergence_constraint((F1,) * 5, 1, 3)
    assert con.form == poly_term(5, F, F1, F1, F1, F1, F2) + \
        poly_term(-4, F1, F1, F1, F1, F1, F1)
    assert con.generator == (F1,) * 5
    assert con.axis == 1


def test_univariate_m3_constraint_set():
    # the classical six third-order constraints, in generator order
    cons = integral_constraints(3, (1,))
    assert len(cons) == 6
    want = [
        poly_term(1, F, F, F, F, F1, F5) + poly_term(1, F, F, F, F, F2, F4)
        - poly_term(1, F, F, F, F1, F1, F4),
        poly_term(1, F, F, F, F, F2, F4) + poly_term(1, F, F, F, F, F3, F3)
        - poly_term(1, F, F, F, F1, F2, F3),
        poly_term(1, F, F, F, F1, F1, F4) + poly_term(2, F, F, F, F1, F2, F3)
        - poly_term(2, F, F, F1, F1, F1, F3),
        poly_term(2, F, F, F, F1, F2, F3) + poly_term(1, F, F, F, F2, F2, F2)
        - poly_term(2, F, F, F1, F1, F2, F2),
        poly_term(1, F, F, F1, F1, F1, F3) + poly_term(3, F, F, F1, F1, F2, F2)
        - poly_term(3, F, F1, F1, F1, F1, F2),
        poly_term(5, F, F1, F1, F1, F1, F2) - poly_term(4, F1, F1, F1, F1, F1, F1),
    ]
    assert [c.form for c in cons] == want


def test_golden_multiplier_identity_m3():
    # E(2,3,1) equals an explicit rational combination of the six constraints
    # plus the square (1/2)(f^2 f3 - 3 f f1 f2 + 2 f1^3)^2, exactly
    from heatsos.targets import target_E
    cons = integral_constraints(3, (1,))
    lam = [Q(1, 4), Q(-1, 4), Q(1, 8), Q(1), Q(-7, 4), Q(3, 4)]
    vec = poly_term(1, F, F, F3) + poly_term(-3, F, F1, F2) + poly_term(2, F1, F1, F1)
    combo = poly_sum(c.form.scale(l) for c, l in zip(cons, lam))
    residue = target_E(2, 3, 1) - combo - (vec * vec).scale(Q(1, 2))
    assert not residue


@parametrize("m,axes,count", [
    (2, (1,), 2), (2, (1, 2), 20), (2, ("a", "b"), 20),
    (3, (1,), 6), (3, (1, 2), 128),
])
def test_constraint_counts(m, axes, count):
    assert len(integral_constraints(m, axes)) == count


def test_rejects_first_derivative_order():
    with raises(ValueError):
        integral_constraints(1, (1,))


def test_provenance_encoding():
    con = integral_constraints(2, (1,))[0]
    enc = con.encode_provenance()
    assert set(enc) == {"g", "axis"}
    assert enc["axis"] == "1"


@given(st.integers(0, 5), st.integers(0, 127), st.integers(0, 1))
def test_divergence_is_homogeneous(gi, gj, ax):
    # every generated constraint is a form of degree 2m and total order 2m
    for m, axes in ((3, (1,)), (3, (1, 2))):
        cons = integral_constraints(m, axes)
        con = cons[(gi if m == 3 and len(axes) == 1 else gj) % len(cons)]
        for mono in con.form.terms:
            assert mono_degree(mono) == 2 * m
            assert mono_total_order(mono) == 2 * m
        assert con.axis in axes


@parametrize("m,axes,density", [
    (2, (1,), MIX1), (3, (1,), MIX1),
    (2, (1, 2), MIX2), (3, (1, 2), MIX2),
])
def test_constraints_integrate_to_zero(m, axes, density):
    # independent quadrature: integral of R / p^(2m-1) vanishes
    scale, _ = integrate_form(
        laurent(poly_term(1, *(F,) * (2 * m)), 2 * m - 1), density, 1.0)
    for con in integral_constraints(m, axes):
        val, err = integrate_form(laurent(con.form, 2 * m - 1), density, 1.0)
        assert abs(val) / scale < 1e-6


def test_pair_auxiliary_kernels_integrate_to_zero():
    r1, r2 = pair_auxiliary_kernels()
    for k in (r1, r2):
        form = subst_axes(k, {"a": 1, "b": 2})
        val, _ = integrate_form(laurent(form, 3), MIX2, 1.0)
        assert abs(val) < 1e-7
        # and summed over all of [2]^2 (the aggregated zero-mean combination)
        total = poly_sum(subst_axes(k, {"a": i, "b": j})
                        for i in (1, 2) for j in (1, 2))
        val, _ = integrate_form(laurent(total, 3), MIX2, 1.0)
        assert abs(val) < 1e-7


# ---------------------------------------------------------------------------
# log-concavity

def test_matrix_entries_and_symmetry():
    lm = log_concave_matrix(("a", "b"))
    pa, pb = dsym("a"), dsym("b")
    assert lm[0][0] == poly_term(1, F, dsym("a", "a")) - poly_term(1, pa, pa)
    assert lm[0][1] == lm[1][0]
    assert lm[0][1] == poly_term(1, F, dsym("a", "b")) - poly_term(1, pa, pb)


def test_two_by_two_signed_minor_expansion():
    pa, pb = dsym("a"), dsym("b")
    paa, pab, pbb = dsym("a", "a"), dsym("a", "b"), dsym("b", "b")
    want = (poly_term(1, F, F, paa, pbb) - poly_term(1, F, paa, pb, pb)
            - poly_term(1, F, pa, pa, pbb) - poly_term(1, F, F, pab, pab)
            + poly_term(2, F, pa, pb, pab))
    assert signed_minor(("a", "b"), ("a", "b")) == want


def test_signed_minor_univariate_weight():
    # order 1: the pointwise-nonnegative quantity is f1^2 - f f2
    assert signed_minor((1,), (1,)) == \
        poly_term(1, F1, F1) - poly_term(1, F, F2)


def test_principal_minor_subsets():
    lm = log_concave_matrix((1, 2, 3))
    ones = principal_minors(lm, 1)
    assert [sub for sub, _ in ones] == [(0,), (1,), (2,)]
    twos = principal_minors(lm, 2)
    assert [sub for sub, _ in twos] == [(0, 1), (0, 2), (1, 2)]
    assert len(principal_minors(lm, 3)) == 1


@parametrize("m,axes,inc,count", [
    (3, (1,), False, 1), (2, ("a", "b"), False, 3), (2, ("a", "b"), True, 4),
    (3, (1, 2), False, 3), (3, ("a", "b", "c"), False, 7),
    (4, (1, 2), False, 3),
])
def test_family_counts(m, axes, inc, count):
    assert len(log_concave_constraints(m, axes, include_products=inc)) == count


def test_multiplier_bases_univariate_m3():
    fam = log_concave_constraints(3, (1,))[0]
    assert fam.minor_subsets == ((1,),)
    assert fam.weight == poly_term(1, F1, F1) - poly_term(1, F, F2)
    assert fam.y_basis == ((F, F2), (F1, F1))
    assert fam.q_basis() == [(F, F, F2, F2), (F, F1, F1, F2), (F1,) * 4]


def test_family_homogeneity():
    # weight degree 2k, multiplier-product degree 2(m-k): P*q has degree 2m
    for fam in log_concave_constraints(3, (1, 2)):
        k = sum(len(s) for s in fam.minor_subsets)
        for mono in fam.weight.terms:
            assert mono_degree(mono) == 2 * k
            assert mono_total_order(mono) == 2 * k
        for q in fam.q_basis():
            assert mono_degree(q) == 2 * (3 - k)
            assert mono_total_order(q) == 2 * (3 - k)


def test_product_families_bounded_by_m():
    fams = log_concave_constraints(2, ("a", "b"), include_products=True)
    prod = [f for f in fams if len(f.minor_subsets) > 1]
    assert len(prod) == 1
    assert prod[0].minor_subsets == ((("a",)), (("b",)))
    assert prod[0].y_basis == ((),)   # scalar multiplier


@parametrize("x", [(-1.3, 0.4), (0.0, 0.0), (0.8, -0.9), (2.0, 1.5)])
def test_signed_minors_nonnegative_for_gaussian(x):
    # a single Gaussian is log-concave, so all signed minors are >= 0
    for sub in (("a",), ("b",), ("a", "b")):
        form = subst_axes(signed_minor(("a", "b"), sub), {"a": 1, "b": 2})
        assert eval_form(form, STD2, 0.7, list(x)) >= -1e-18


def test_signed_minor_can_fail_without_log_concavity():
    # a well-separated bimodal mixture violates log-concavity somewhere
    bimodal = mixture([(0.5, (-2.0,), 0.3), (0.5, (2.0,), 0.3)])
    form = subst_axes(signed_minor(("a",), ("a",)), {"a": 1})
    vals = [eval_form(form, bimodal, 0.1, [x / 10.0]) for x in range(-30, 31)]
    assert min(vals) < 0


@given(st.sampled_from([(2, ("a", "b")), (3, (1, 2))]),
       st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_minor_determinants_match_cofactor_recursion(case, seed):
    # spot-check _det through signed_minor: expanding the 2x2 via entries
    m, axes = case
    lm = log_concave_matrix(axes)
    want = lm[0][0] * lm[1][1] - lm[0][1] * lm[1][0]
    got = signed_minor(axes, tuple(axes[:2]))
    assert got == want
