"""Exact linear reduction of differential-form systems.

Monomials of a fixed degree-2m form space are treated as variables.  A
monomial is *quadratic* when it factors as a product of two half-degree
monomials (degree m, total order m each); quadratic monomials rank below the
rest, so reduced row echelon elimination over exact rationals splits a
constraint system into rewrite rules (pivot on a non-quadratic monomial) and
purely quadratic constraints.  Every produced row carries its expression as a
rational combination of the original input forms, so certificates can quote
multipliers on the original constraints only.

Distinct half-degree products can collide in the ring (e.g. (uv)(u'v') with
the same factor multiset); each collision class yields intrinsic relations:
formal quadratic-form differences that are identically zero as differential
forms and hence free for the semidefinite stage.
"""

from __future__ import annotations

from itertools import combinations

from .diffform import (
    DiffPoly, Q, QZERO, enumerate_monomials, mono_key, mono_mul,
    mono_total_order,
)


def half_basis(m, axes):
    """Degree-m, total-order-m monomials, descending (the m-variables)."""
    return enumerate_monomials(m, m, tuple(axes))


def quadratic_splits(mono):
    """All unordered pairs (u, v), u >= v, of half-degree monomials with
    u*v == mono; empty when the monomial is not quadratic."""
    deg = len(mono)
    if deg % 2:
        return ()
    m = deg // 2
    if mono_total_order(mono) != 2 * m:
        return ()
    out, seen = [], set()
    for idx in combinations(range(deg), m):
        u = tuple(mono[i] for i in idx)
        if u in seen:
            continue
        seen.add(u)
        if mono_total_order(u) != m:
            continue
        rest = list(mono)
        for i in reversed(idx):
            del rest[i]
        v = tuple(rest)
        pair = (u, v) if mono_key(u) >= mono_key(v) else (v, u)
        if pair not in out:
            out.append(pair)
    out.sort(key=lambda p: (mono_key(p[0]), mono_key(p[1])), reverse=True)
    return tuple(out)


_SPLIT_CACHE = {}


def splits_of(mono):
    try:
        return _SPLIT_CACHE[mono]
    except KeyError:
        s = quadratic_splits(mono)
        _SPLIT_CACHE[mono] = s
        return s


def is_quadratic(mono):
    return bool(splits_of(mono))


def canonical_split(mono):
    """Deterministic representative split (the largest by monomial order)."""
    s = splits_of(mono)
    if not s:
        raise ValueError("monomial is not a product of half-degree monomials")
    return s[0]


def _col_key(mono):
    # non-quadratic monomials rank above quadratic ones, then monomial order
    return (0 if is_quadratic(mono) else 1, mono_key(mono))


def _leading(row):
    return max(row, key=_col_key)


class ReducedSystem:
    """Reduced row echelon form of a constraint system with provenance.

    rows: list of (pivot monomial, row dict, combo dict); combo maps original
    constraint indices to rational multipliers.  Rules and quadratic rows are
    distinguished by whether the pivot monomial is quadratic.
    """

    def __init__(self, rows, n_inputs):
        self.rows = rows
        self.n_inputs = n_inputs
        self.rule_index = {piv: (row, combo) for piv, row, combo in rows
                           if not is_quadratic(piv)}

    @property
    def rank(self):
        return len(self.rows)

    def rules(self):
        return [(p, r, c) for p, r, c in self.rows if not is_quadratic(p)]

    def quadratic_rows(self):
        return [(p, r, c) for p, r, c in self.rows if is_quadratic(p)]

    def split_counts(self):
        nq = len(self.quadratic_rows())
        return nq, self.rank - nq

    def reduce(self, form):
        """Eliminate rule pivots from the form; returns (residual row dict,
        combo dict on the original constraints whose subtraction achieves
        it): form - sum combo_i * original_i = residual."""
        row = {mo: c for mo, c in form.terms.items()}
        combo = {}
        again = True
        while again:
            again = False
            for mo in sorted(row, key=_col_key, reverse=True):
                hit = self.rule_index.get(mo)
                if hit is None:
                    continue
                rrow, rcombo = hit
                f = row[mo]
                _axpy(row, rrow, -f)
                _axpy(combo, rcombo, f)
                again = True
                break
        return row, combo


def _axpy(dst, src, factor):
    if not factor:
        return
    for k, v in src.items():
        c = dst.get(k, QZERO) + factor * v
        if c:
            dst[k] = c
        else:
            dst.pop(k, None)


def rref(forms):
    """Reduced row echelon form with provenance over the original forms."""
    pivots = []   # list of (pivot, row, combo), echelon order of insertion
    by_pivot = {}
    for idx, form in enumerate(forms):
        row = {mo: c for mo, c in form.terms.items()}
        combo = {idx: Q(1)}
        while row:
            lead = _leading(row)
            hit = by_pivot.get(lead)
            if hit is None:
                break
            prow, pcombo = hit
            f = row[lead]
            _axpy(row, prow, -f)
            _axpy(combo, pcombo, -f)
        if not row:
            continue
        lead = _leading(row)
        inv = Q(1) / row[lead]
        row = {mo: c * inv for mo, c in row.items()}
        combo = {i: c * inv for i, c in combo.items()}
        by_pivot[lead] = (row, combo)
        pivots.append(lead)
    # back-substitute to clear pivot columns from every other row
    order = sorted(pivots, key=_col_key)
    for piv in order:
        prow, pcombo = by_pivot[piv]
        for other in pivots:
            if other == piv:
                continue
            orow, ocombo = by_pivot[other]
            f = orow.get(piv)
            if f:
                _axpy(orow, prow, -f)
                _axpy(ocombo, pcombo, -f)
    rows = [(piv, by_pivot[piv][0], by_pivot[piv][1]) for piv in
            sorted(pivots, key=_col_key, reverse=True)]
    return ReducedSystem(rows, len(forms))


def row_poly(row):
    return DiffPoly(dict(row))


# ---------------------------------------------------------------------------
# formal quadratic forms over the half-degree basis

class QuadraticForm:
    """A formal quadratic form sum q[(u, v)] * u * v with u >= v over
    half-degree monomials.  Distinct keys may expand to the same monomial;
    expansion maps back to the ring."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = dict(coeffs) if coeffs else {}

    def __bool__(self):
        return bool(self.coeffs)

    def expand(self):
        out = {}
        for (u, v), c in self.coeffs.items():
            mo = mono_mul(u, v)
            s = out.get(mo, QZERO) + c
            if s:
                out[mo] = s
            else:
                out.pop(mo, None)
        return DiffPoly(out)

    def items_sorted(self):
        return sorted(self.coeffs.items(),
                      key=lambda kv: (mono_key(kv[0][0]), mono_key(kv[0][1])),
                      reverse=True)


def quadratic_form_of(row):
    """Represent a row supported on quadratic monomials via canonical
    splits.  Raises ValueError on any non-quadratic monomial."""
    coeffs = {}
    for mo, c in row.items():
        coeffs[canonical_split(mo)] = coeffs.get(canonical_split(mo), QZERO) + c
    return QuadraticForm({k: v for k, v in coeffs.items() if v})


def intrinsic_relations(m, axes):
    """All pairwise differences of colliding half-degree products: formal
    quadratic forms that expand to zero in the ring."""
    basis = half_basis(m, axes)
    classes = {}
    for i, u in enumerate(basis):
        for v in basis[i:]:
            w = mono_mul(u, v)
            pair = (u, v) if mono_key(u) >= mono_key(v) else (v, u)
            classes.setdefault(w, set()).add(pair)
    out = []
    for w in sorted(classes, key=mono_key, reverse=True):
        reps = sorted(classes[w],
                      key=lambda p: (mono_key(p[0]), mono_key(p[1])),
                      reverse=True)
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                out.append(QuadraticForm({reps[i]: Q(1), reps[j]: Q(-1)}))
    return out


def _gram_key(pair):
    return (mono_key(pair[0]), mono_key(pair[1]))


def quadratic_rank(forms):
    """Rank of formal quadratic forms, eliminating over (u, v) keys."""
    pivots = {}
    rank = 0
    for qf in forms:
        row = dict(qf.coeffs)
        while row:
            lead = max(row, key=_gram_key)
            hit = pivots.get(lead)
            if hit is None:
                break
            _axpy(row, hit, -row[lead])
        if not row:
            continue
        lead = max(row, key=_gram_key)
        inv = Q(1) / row[lead]
        pivots[lead] = {k: c * inv for k, c in row.items()}
        rank += 1
    return rank


def independent_quadratic_count(system, m, axes):
    """Joint rank of the quadratic constraint rows and intrinsic relations."""
    forms = [quadratic_form_of(row) for _, row, _ in system.quadratic_rows()]
    forms.extend(intrinsic_relations(m, axes))
    return quadratic_rank(forms)
