"""Semidefinite feasibility and exact certificate extraction.

The question posed here: can a reduced target quadratic form be written as

    target + sum_s c_s * shared_s
        = sum_k p_k * constraint_k + sum_f weight_f * Q_f + S

where the p_k are free multipliers on independent constraint forms, each
multiplier polynomial Q_f is a sum of squares over its own half-degree
basis, and S is a sum of squares over the block basis?  Gram matrices make
this a semidefinite feasibility problem.  We solve it numerically with a
margin-maximizing objective, round every free scalar to a nearby rational,
rebuild the main Gram matrix exactly, and factor every Gram with an exact
LDL pass.  The rounding succeeds iff every factorization does; retries
raise the denominator bound a hundredfold each time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .diffform import DiffPoly, Q, QZERO, mono_key, mono_mul
from .reduction import (
    _axpy,
    _gram_key,
    QuadraticForm,
    half_basis,
    intrinsic_relations,
    quadratic_form_of,
)

MARGIN_CAP = 1.0
ELIGIBLE_MARGIN = 1e-6
NEGATIVE_MARGIN = -1e-6
DEFAULT_SOLVERS = ("CVXOPT", "CLARABEL", "SCS")
DEFAULT_DENOM_BOUND = 10 ** 4
DENOM_GROWTH = 100


class NotSumOfSquares(Exception):
    """An exact Gram matrix failed its LDL factorization."""


class RationalizationError(Exception):
    """No denominator bound in the retry ladder produced exact certificates."""


class IrreducibleTarget(Exception):
    """A block target cannot be brought to quadratic shape by the rules."""


# ---------------------------------------------------------------------------
# prepared problem data


@dataclass(frozen=True)
class PreparedConstraint:
    """A zero-integral (or formally zero) quadratic form with provenance.

    kind "integral": a reduced constraint row; combo maps original
    constraint indices to the multipliers that assemble it.  kind "formal":
    a collision relation that expands to zero in the ring; combo is empty.
    """

    kind: str
    form: QuadraticForm
    combo: dict


@dataclass(frozen=True)
class PreparedFamily:
    """A pointwise-nonnegative weight with a Gram-parametrized multiplier.

    pairs holds one entry (r, s, mult, form, combo) per unordered index
    pair of the multiplier basis: form is the reduced quadratic shape of
    weight * y_r * y_s, combo its reduction provenance, mult the monomial
    multiplicity (2 off the diagonal, 1 on it).
    """

    subsets: tuple
    weight: DiffPoly
    y_basis: tuple
    pairs: tuple


@dataclass(frozen=True)
class PreparedBlock:
    """One feasibility block: target, optional shared-scalar forms, an
    independent constraint list, and multiplier families."""

    name: str
    basis: tuple
    target_form: QuadraticForm
    target_combo: dict
    shared_forms: tuple
    shared_combos: tuple
    constraints: tuple
    families: tuple


def prepare_constraints(system, m, axes):
    """Independent multiplier list: reduced quadratic rows first, then the
    collision relations that still enlarge the span."""
    pivots = {}
    out = []

    def try_add(qf, kind, combo):
        row = dict(qf.coeffs)
        while row:
            lead = max(row, key=_gram_key)
            hit = pivots.get(lead)
            if hit is None:
                break
            _axpy(row, hit, -row[lead])
        if not row:
            return
        lead = max(row, key=_gram_key)
        inv = Q(1) / row[lead]
        pivots[lead] = {k: c * inv for k, c in row.items()}
        out.append(PreparedConstraint(kind, qf, dict(combo)))

    for _, row, combo in system.quadratic_rows():
        try_add(quadratic_form_of(row), "integral", combo)
    for qf in intrinsic_relations(m, axes):
        try_add(qf, "formal", {})
    return tuple(out)


def reduce_to_quadratic(system, poly):
    """Reduce a polynomial by the rules and represent the residual as a
    quadratic form.  Raises ValueError if anything non-quadratic remains."""
    row, combo = system.reduce(poly)
    return quadratic_form_of(row), combo


def prepare_family(family, system):
    """Reduce every weight * y_r * y_s product to quadratic shape; returns
    None when some product escapes the span (the family is then unusable
    as a Gram-parametrized multiplier)."""
    pairs = []
    y = family.y_basis
    for r in range(len(y)):
        for s in range(r, len(y)):
            prod = family.weight * DiffPoly({mono_mul(y[r], y[s]): Q(1)})
            try:
                form, combo = reduce_to_quadratic(system, prod)
            except ValueError:
                return None
            pairs.append((r, s, 1 if r == s else 2, form, combo))
    return PreparedFamily(tuple(family.minor_subsets), family.weight,
                          tuple(y), tuple(pairs))


def prepare_block(name, system, m, axes, target_poly, shared_polys=(),
                  families=()):
    """Assemble one feasibility block.  Families that cannot be reduced
    are dropped; an irreducible target or shared term is an error."""
    basis = half_basis(m, axes)
    try:
        target_form, target_combo = reduce_to_quadratic(system, target_poly)
    except ValueError as exc:
        raise IrreducibleTarget(f"{name}: target: {exc}") from exc
    shared_forms = []
    shared_combos = []
    for i, sh in enumerate(shared_polys):
        try:
            form, combo = reduce_to_quadratic(system, sh)
        except ValueError as exc:
            raise IrreducibleTarget(f"{name}: shared {i}: {exc}") from exc
        shared_forms.append(form)
        shared_combos.append(combo)
    kept = []
    for fam in families:
        prepared = prepare_family(fam, system)
        if prepared is not None:
            kept.append(prepared)
    return PreparedBlock(name, tuple(basis), target_form, dict(target_combo),
                         tuple(shared_forms), tuple(shared_combos),
                         prepare_constraints(system, m, axes), tuple(kept))


# ---------------------------------------------------------------------------
# matrices

def form_qmatrix(form, index, size):
    """Exact symmetric Gram matrix of a quadratic form over an index map."""
    g = [[QZERO] * size for _ in range(size)]
    for (u, v), c in form.coeffs.items():
        i = index[u]
        j = index[v]
        if i == j:
            g[i][i] += c
        else:
            g[i][j] += c / 2
            g[j][i] += c / 2
    return g


def form_matrix(form, index, size):
    """Floating-point Gram matrix of a quadratic form."""
    return np.array([[float(x) for x in row]
                     for row in form_qmatrix(form, index, size)])


# ---------------------------------------------------------------------------
# numeric solve


@dataclass
class NumericSolution:
    status: str
    solver: str
    margins: dict
    margin: float
    shared: tuple
    p: dict
    grams: dict


def _block_matrices(block):
    index = {mo: i for i, mo in enumerate(block.basis)}
    u = len(block.basis)
    target = form_matrix(block.target_form, index, u)
    shared = [form_matrix(f, index, u) for f in block.shared_forms]
    cons = [form_matrix(c.form, index, u) for c in block.constraints]
    fams = []
    for fam in block.families:
        fams.append([(r, s, mult, form_matrix(form, index, u))
                     for r, s, mult, form, _ in fam.pairs])
    return u, target, shared, cons, fams


def _block_expr(cp, mats, shared_var, pvar, yvars):
    u, target, shared, cons, fams = mats
    expr = cp.Constant(target)
    for k, mat in enumerate(shared):
        expr = expr + shared_var[k] * cp.Constant(mat)
    if cons:
        amat = np.stack([m.flatten(order="F") for m in cons])
        expr = expr - cp.reshape(amat.T @ pvar, (u, u), order="F")
    for fam_pairs, yvar in zip(fams, yvars):
        hmat = np.stack([(mult * m).flatten(order="F")
                         for _, _, mult, m in fam_pairs])
        yvec = cp.hstack([yvar[r, s] for r, s, _, _ in fam_pairs])
        expr = expr - cp.reshape(hmat.T @ yvec, (u, u), order="F")
    return (expr + expr.T) / 2


def _try_solvers(prob, solvers):
    for name in solvers:
        try:
            prob.solve(solver=name)
        except Exception:
            continue
        if prob.status in ("optimal", "optimal_inaccurate"):
            return name
    return None


def solve_blocks(blocks, n_shared=0, solvers=DEFAULT_SOLVERS,
                 margin_cap=MARGIN_CAP):
    """Two-stage numeric solve.  Stage one maximizes the sum of per-block
    margins (negative allowed) to decide feasibility; stage two pushes a
    common margin on the blocks that can take one, for rounding headroom."""
    import cvxpy as cp

    all_mats = [_block_matrices(b) for b in blocks]

    def build(margin_mode):
        shared_var = cp.Variable(n_shared) if n_shared else ()
        pvars, yvars_all, exprs = [], [], []
        for block, mats in zip(blocks, all_mats):
            pvar = cp.Variable(len(block.constraints)) if block.constraints \
                else None
            yvars = [cp.Variable((len(f.y_basis), len(f.y_basis)), PSD=True)
                     for f in block.families]
            pvars.append(pvar)
            yvars_all.append(yvars)
            exprs.append(_block_expr(cp, mats, shared_var, pvar, yvars))
        cons = []
        if margin_mode == "per-block":
            tvar = cp.Variable(len(blocks))
            for expr, mats in zip(exprs, all_mats):
                cons.append(expr >> tvar[len(cons)] * np.eye(mats[0]))
            cons.append(tvar <= margin_cap)
            objective = cp.Maximize(cp.sum(tvar))
        else:
            tvar = cp.Variable()
            for expr, mats, block in zip(exprs, all_mats, blocks):
                if block.name in margin_mode:
                    cons.append(expr >> tvar * np.eye(mats[0]))
                else:
                    cons.append(expr >> 0)
            cons.append(tvar <= margin_cap)
            objective = cp.Maximize(tvar)
        return cp.Problem(objective, cons), shared_var, pvars, yvars_all, tvar

    prob, shared_var, pvars, yvars_all, tvar = build("per-block")
    solver = _try_solvers(prob, solvers)
    if solver is None:
        return NumericSolution("solver-error", "", {}, 0.0, (), {}, {})
    stage1 = {b.name: float(tvar.value[i]) for i, b in enumerate(blocks)}
    if min(stage1.values()) < NEGATIVE_MARGIN:
        return NumericSolution("no-certificate", solver, stage1,
                               min(stage1.values()), (), {}, {})

    eligible = {name for name, t in stage1.items() if t > ELIGIBLE_MARGIN}
    margin = 0.0
    if eligible:
        prob, shared_var, pvars, yvars_all, tvar = build(eligible)
        solver2 = _try_solvers(prob, solvers)
        if solver2 is not None:
            solver = solver2
            margin = float(tvar.value)

    shared = tuple(float(x) for x in shared_var.value) if n_shared else ()
    p = {}
    grams = {}
    for block, pvar, yvars in zip(blocks, pvars, yvars_all):
        p[block.name] = [float(x) for x in pvar.value] if pvar is not None \
            else []
        grams[block.name] = [np.asarray(y.value, dtype=float) for y in yvars]
    return NumericSolution("candidate", solver, stage1, margin, shared, p,
                           grams)


# ---------------------------------------------------------------------------
# exact extraction


@dataclass(frozen=True)
class SquareTerm:
    """One summand coeff * (sum_j vector_j * basis_j)^2 of a sum of
    squares; the leading nonzero vector entry is 1."""

    coeff: object
    vector: tuple


@dataclass(frozen=True)
class BlockCertificate:
    """Exact data for one block: multipliers on the original constraints,
    one sum of squares per kept family, and the main sum of squares."""

    name: str
    lambdas: dict
    family_sos: tuple
    sos: tuple


def rationalize(x, denom_bound):
    fr = Fraction(float(x)).limit_denominator(int(denom_bound))
    return Q(fr.numerator, fr.denominator)


def rational_symmetric(mat, denom_bound):
    a = np.asarray(mat, dtype=float)
    a = (a + a.T) / 2
    n = a.shape[0]
    out = [[QZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = rationalize(a[i, j], denom_bound)
            out[i][j] = v
            out[j][i] = v
    return out


def add_ridge(gram, ridge):
    out = [list(row) for row in gram]
    for i in range(len(out)):
        out[i][i] += ridge
    return out


def ldl_terms(gram):
    """Exact LDL factorization of a rational symmetric matrix as a sum of
    squares.  Zero pivots demand a fully zero residual row; a negative
    pivot or a nonzero row over a zero pivot raises NotSumOfSquares."""
    n = len(gram)
    a = [[Q(x) for x in row] for row in gram]
    terms = []
    for i in range(n):
        d = a[i][i]
        if d == 0:
            if any(a[i][j] for j in range(i, n)):
                raise NotSumOfSquares(f"zero pivot with nonzero row at {i}")
            continue
        if d < 0:
            raise NotSumOfSquares(f"negative pivot {d} at {i}")
        vec = [QZERO] * n
        for j in range(i, n):
            vec[j] = a[i][j] / d
        terms.append(SquareTerm(d, tuple(vec)))
        for r in range(i + 1, n):
            f = a[r][i]
            if not f:
                continue
            fr = f / d
            for s in range(i + 1, n):
                a[r][s] -= fr * a[i][s]
    return tuple(terms)


def gram_from_terms(terms, size):
    g = [[QZERO] * size for _ in range(size)]
    for t in terms:
        support = [(j, e) for j, e in enumerate(t.vector) if e]
        for j, ej in support:
            for k, ek in support:
                g[j][k] += t.coeff * ej * ek
    return g


def sos_expand(terms, basis):
    """Ring expansion of a sum of squares over the given monomial basis."""
    out = {}
    for t in terms:
        support = [(basis[j], e) for j, e in enumerate(t.vector) if e]
        for i, (u, eu) in enumerate(support):
            for v, ev in support[i:]:
                mult = 1 if v is u else 2
                mo = mono_mul(u, v)
                c = out.get(mo, QZERO) + mult * t.coeff * eu * ev
                if c:
                    out[mo] = c
                else:
                    out.pop(mo, None)
    return DiffPoly(out)


def fold_multipliers(block, p_rat, shared_rat, fam_grams):
    """Multipliers on the original constraints that realize the block
    identity in the ring: the target's own reduction, plus each scalar's
    provenance, minus what the family products borrowed."""
    lam = dict(block.target_combo)
    for c, combo in zip(shared_rat, block.shared_combos):
        _axpy(lam, combo, c)
    for pk, con in zip(p_rat, block.constraints):
        _axpy(lam, con.combo, pk)
    for fam, gram in zip(block.families, fam_grams):
        for r, s, mult, _, combo in fam.pairs:
            _axpy(lam, combo, -mult * gram[r][s])
    return lam


def exact_main_gram(block, p_rat, shared_rat, fam_grams):
    """Rebuild the block Gram matrix exactly at the rationalized point."""
    index = {mo: i for i, mo in enumerate(block.basis)}
    u = len(block.basis)
    g = form_qmatrix(block.target_form, index, u)

    def axpy_matrix(scale, mat):
        if not scale:
            return
        for i in range(u):
            for j in range(u):
                g[i][j] += scale * mat[i][j]

    for c, form in zip(shared_rat, block.shared_forms):
        axpy_matrix(c, form_qmatrix(form, index, u))
    for pk, con in zip(p_rat, block.constraints):
        axpy_matrix(-pk, form_qmatrix(con.form, index, u))
    for fam, gram in zip(block.families, fam_grams):
        for r, s, mult, form, _ in fam.pairs:
            axpy_matrix(-mult * gram[r][s], form_qmatrix(form, index, u))
    return g


def _extract_at(blocks, numeric, bound):
    shared_rat = tuple(rationalize(v, bound) for v in numeric.shared)
    certs = []
    for block in blocks:
        p_rat = [rationalize(v, bound) for v in numeric.p[block.name]]
        fam_grams = []
        fam_sos = []
        for fam, yfloat in zip(block.families, numeric.grams[block.name]):
            yq = rational_symmetric(yfloat, bound)
            try:
                terms = ldl_terms(yq)
            except NotSumOfSquares:
                yq = add_ridge(yq, Q(2 * len(yq), bound))
                terms = ldl_terms(yq)
            fam_grams.append(yq)
            fam_sos.append(terms)
        main = exact_main_gram(block, p_rat, shared_rat, fam_grams)
        sos = ldl_terms(main)
        lam = fold_multipliers(block, p_rat, shared_rat, fam_grams)
        certs.append(BlockCertificate(block.name, lam, tuple(fam_sos), sos))
    return shared_rat, certs


def extract_block_certificates(blocks, numeric, denom_bound=None,
                               max_retries=3):
    """Rationalize the numeric solution and factor every Gram exactly,
    raising the denominator bound a hundredfold on failure."""
    bound = int(denom_bound or DEFAULT_DENOM_BOUND)
    last = None
    for _ in range(max_retries + 1):
        try:
            shared_rat, certs = _extract_at(blocks, numeric, bound)
            return shared_rat, certs, bound
        except NotSumOfSquares as exc:
            last = exc
            bound *= DENOM_GROWTH
    raise RationalizationError(
        f"no exact certificate up to denominator bound {bound // DENOM_GROWTH}"
        f": {last}")
