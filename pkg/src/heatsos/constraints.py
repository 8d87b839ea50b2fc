"""Constraint generation.

Integral constraints: for every monomial G of degree and total order 2m-1
with factor orders at most 2m-2, and every axis a, the divergence identity
integral d/dx_a (G / p^(2m-2)) dx = 0 expands to a degree-2m form

    R_{G,a} = p dG/dx_a - (2m-2) G dp/dx_a

whose integral against p^-(2m-1) vanishes for any Schwartz-tailed positive
density.  These are the linear side conditions the prover may add freely.

Log-concavity constraints: with L(p) = p Hess(p) - grad(p) grad(p)^T, the
matrix L/p^2 is the Hessian of log p, so log-concavity makes (-1)^k times
each k x k principal minor of L nonnegative.  A family pairs a product P of
signed minors with an unknown polynomial multiplier Q constrained (through
its Gram matrix over the half-degree basis) to be a pointwise-nonnegative
combination, so P*Q >= 0 pointwise and can be subtracted from a target.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

from .diffform import (
    DiffPoly, P_SYM, Q, differentiate, dsym, enumerate_monomials, mono_key,
    mono_mul, poly_term,
)

P_POLY = DiffPoly({(P_SYM,): Q(1)})


@dataclass(frozen=True)
class IntegralConstraint:
    """R_{G,a} with its provenance (generator monomial, axis)."""

    form: DiffPoly
    generator: tuple   # the monomial G
    axis: object

    def encode_provenance(self):
        from .diffform import encode_axis, encode_monomial
        return {"g": encode_monomial(self.generator), "axis":
                encode_axis(self.axis)}


def divergence_constraint(g_monomial, axis, m):
    """p dG/dx_a - (2m-2) G dp/dx_a for a single generator monomial."""
    g_poly = DiffPoly({g_monomial: Q(1)})
    form = (P_POLY * differentiate(g_poly, axis)
            - Q(2 * m - 2) * (g_poly * poly_term(1, dsym(axis))))
    return IntegralConstraint(form, g_monomial, axis)


def integral_constraints(m, axes):
    """All deduplicated divergence constraints for order m over the axes."""
    if m < 2:
        raise ValueError("integral constraints need m >= 2")
    axes = tuple(axes)
    gens = enumerate_monomials(2 * m - 1, 2 * m - 1, axes,
                               max_factor_order=2 * m - 2)
    out, seen = [], set()
    for g in gens:
        for ax in axes:
            con = divergence_constraint(g, ax, m)
            if not con.form:
                continue
            key = tuple(sorted(con.form.terms.items(),
                               key=lambda it: mono_key(it[0])))
            if key in seen:
                continue
            seen.add(key)
            out.append(con)
    return out


def pair_auxiliary_kernels():
    """The two summable aid kernels for the generic-n pair problem; both lie
    in the span of the generated m=2 constraints over axes (a, b)."""
    p, pa, pb = dsym(), dsym("a"), dsym("b")
    paa, pab, pbb = dsym("a", "a"), dsym("a", "b"), dsym("b", "b")
    pabb = dsym("a", "b", "b")
    r1 = (poly_term(1, p, p, pabb, pa) + poly_term(1, p, p, paa, pbb)
          - poly_term(1, p, paa, pb, pb))
    r2 = (poly_term(1, p, paa, pb, pb) + poly_term(2, p, pa, pab, pb)
          - poly_term(2, pa, pa, pb, pb))
    return r1, r2


# ---------------------------------------------------------------------------
# log-concavity

def log_concave_matrix(axes):
    """L(p) = p Hess(p) - grad(p) grad(p)^T over the given axes."""
    axes = tuple(axes)
    return [[poly_term(1, dsym(), dsym(ai, aj)) - poly_term(1, dsym(ai), dsym(aj))
             for aj in axes] for ai in axes]


def _det(mat):
    n = len(mat)
    out = DiffPoly()
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n)
                  if perm[i] > perm[j])
        term = poly_term(1)
        for i in range(n):
            term = term * mat[i][perm[i]]
        out = out + (term if inv % 2 == 0 else term.scale(Q(-1)))
    return out


def principal_minors(lmat, k):
    """All k x k principal minors; list of (index subset, determinant)."""
    n = len(lmat)
    out = []
    for sub in combinations(range(n), k):
        minor = _det([[lmat[i][j] for j in sub] for i in sub])
        out.append((sub, minor))
    return out


def signed_minor(axes, subset):
    """(-1)^k Delta for the principal minor on the given axis subset; this is
    the quantity that is pointwise nonnegative under log-concavity."""
    axes = tuple(axes)
    idx = tuple(sorted(axes.index(ax) for ax in subset))
    lmat = log_concave_matrix(axes)
    minor = _det([[lmat[i][j] for j in idx] for i in idx])
    return minor.scale(Q(-1) ** len(idx))


@dataclass(frozen=True)
class LogConcaveFamily:
    """A product P of signed principal minors paired with an unknown
    multiplier Q over the half-degree monomial basis."""

    minor_subsets: tuple   # tuple of axis subsets; P = prod of signed minors
    weight: DiffPoly       # P itself
    y_basis: tuple         # half-degree basis for the Gram parametrization
    axes: tuple

    @property
    def multiplier_degree(self):
        return len(self.y_basis[0]) if self.y_basis else 0

    def q_basis(self):
        """Distinct products of two y-basis monomials, descending."""
        prods = {mono_mul(a, b) for a in self.y_basis for b in self.y_basis}
        return sorted(prods, key=mono_key, reverse=True)


def _family(axes, subsets, m):
    weight = poly_term(1)
    for sub in subsets:
        weight = weight * signed_minor(axes, sub)
    d = m - sum(len(s) for s in subsets)
    y_basis = tuple(enumerate_monomials(d, d, axes))
    return LogConcaveFamily(tuple(subsets), weight, y_basis, tuple(axes))


def log_concave_constraints(m, axes, include_products=False):
    """Families of signed-minor products with Gram-parametrized multipliers.

    Only single-minor families are used by the prover; include_products adds
    products of distinct minors with total size at most m.
    """
    if m < 2:
        raise ValueError("log-concave families need m >= 2")
    axes = tuple(axes)
    subsets = []
    for k in range(1, len(axes) + 1):
        if k > m:
            break
        subsets.extend(combinations(axes, k))
    out = [_family(axes, (sub,), m) for sub in subsets if len(sub) <= m]
    if include_products:
        for r in range(2, len(subsets) + 1):
            for combo in combinations(subsets, r):
                if sum(len(s) for s in combo) <= m:
                    out.append(_family(axes, combo, m))
    return out
