"""Dimension-generic assembly by symmetrization.

A target that is a sum of one kernel per axis tuple can be regrouped over
*sorted* tuples: each unordered choice of distinct axes collects its own
orbit of kernel instantiations, weighted by how many sorted tuples contain
the diagonal ones.  For pairs,

    sum_{x,y in [n]} f(x,y) = sum_{x<y} [ (f(x,x)+f(y,y))/(n-1) + f(x,y)+f(y,x) ],

and for triples the diagonal weights are 2/((n-1)(n-2)) and 1/(n-2).  Proving
one abstract-axis summand nonnegative (all weights positive) proves the full
target nonnegative in every dimension where the weights stay positive.

The pair blocks carry two shared unknowns (c1, c2): multiples of the two
aggregated zero-integral kernels that may be added to the target before
splitting, because their total integral vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

from .constraints import pair_auxiliary_kernels
from .diffform import DiffPoly, Q, poly_sum, qstr, subst_axes
from .targets import pair_kernel_parts, target_E, tuple_kernels

PAIR_AXES = ("a", "b")
TRIPLE_AXES = ("a", "b", "c")


@dataclass(frozen=True)
class Prefactor:
    """const / prod(n - r): an explicitly positive weight for n > max(r)."""

    const: object
    poles: tuple = ()

    def at(self, n):
        val = Q(self.const)
        for r in self.poles:
            if n <= r:
                raise ValueError(f"prefactor undefined or nonpositive at n={n}")
            val /= Q(n - r)
        return val

    @property
    def min_dimension(self):
        return max(self.poles) + 1 if self.poles else 1

    def encode(self):
        return {"const": qstr(Q(self.const)), "poles": list(self.poles)}


# ---------------------------------------------------------------------------
# generic pair decomposition (m = 2)

@dataclass(frozen=True)
class PairBlock:
    """prefactor * (base + c1*shared[0] + c2*shared[1]) over abstract axes."""

    name: str
    prefactor: Prefactor
    base: DiffPoly
    shared: tuple

    def form(self, c1=Q(0), c2=Q(0)):
        return (self.base + self.shared[0].scale(Q(c1))
                + self.shared[1].scale(Q(c2)))


def _pair_parts():
    g, h = pair_kernel_parts()
    r1, r2 = pair_auxiliary_kernels()

    def at(form, x, y):
        return subst_axes(form, {"a": x, "b": y})
    return g, h, r1, r2, at


def pair_blocks():
    """The three abstract blocks whose weighted sum over x < y rebuilds the
    m = 2 combined target plus c-multiples of the aggregated kernels."""
    g, h, r1, r2, at = _pair_parts()
    a, b = PAIR_AXES
    diag = lambda f: at(f, a, a) + at(f, b, b)
    offd = lambda f: at(f, a, b) + at(f, b, a)
    l1 = PairBlock("L1", Prefactor(Q(1), (1,)),
                   diag(g) - diag(h).scale(Q(1, 2)),
                   (diag(r1), diag(r2)))
    l2 = PairBlock("L2", Prefactor(Q(1, 2), (0,)),
                   diag(h) - offd(h),
                   (DiffPoly(), DiffPoly()))
    l3 = PairBlock("L3", Prefactor(Q(1)),
                   offd(g),
                   (offd(r1), offd(r2)))
    return l1, l2, l3


def pair_aggregated_kernels(n):
    """Sums over [n]^2 of the two zero-integral kernels."""
    _, _, r1, r2, at = _pair_parts()
    axes = range(1, n + 1)
    return tuple(poly_sum(at(r, x, y) for x in axes for y in axes)
                 for r in (r1, r2))


def pair_assembled(n, c1=Q(0), c2=Q(0)):
    """sum_{x<y} of the weighted concrete blocks; equals the combined target
    plus c1, c2 multiples of the aggregated kernels (see tests)."""
    blocks = pair_blocks()
    out = DiffPoly()
    for x, y in combinations(range(1, n + 1), 2):
        for blk in blocks:
            w = blk.prefactor.at(n)
            out = out + subst_axes(blk.form(c1, c2),
                                   {"a": x, "b": y}).scale(w)
    return out


def pair_tiling_residual(n, c1=Q(0), c2=Q(0)):
    agg1, agg2 = pair_aggregated_kernels(n)
    want = (target_E(2, 2, n) + agg1.scale(Q(c1)) + agg2.scale(Q(c2)))
    return pair_assembled(n, c1, c2) - want


# ---------------------------------------------------------------------------
# triple symmetrization (m = 3)

def triple_orbit_tuples():
    """Axis tuples grouped by diagonal type: pure (xxx), two-distinct, and
    all-distinct, over the abstract triple."""
    a, b, c = TRIPLE_AXES
    pure = tuple((x, x, x) for x in TRIPLE_AXES)
    doubles = []
    for x, y in permutations(TRIPLE_AXES, 2):
        doubles.extend({(x, x, y), (x, y, x), (y, x, x)})
    doubles = tuple(sorted(set(doubles)))
    assert len(doubles) == 18
    distinct = tuple(permutations(TRIPLE_AXES, 3))
    return pure, doubles, distinct


def triple_prefactors():
    return {"pure": Prefactor(Q(2), (1, 2)),
            "double": Prefactor(Q(1), (2,)),
            "distinct": Prefactor(Q(1))}


def symmetrized_triple(n):
    """The one-orbit summand J of the m = 3 combined target at concrete
    dimension n >= 3, over abstract axes; sum over sorted axis triples of
    its instantiations equals the full target."""
    if n < 3:
        raise ValueError("the triple symmetrization needs n >= 3")
    fam = tuple_kernels(3, 3)
    pure, doubles, distinct = triple_orbit_tuples()
    pref = triple_prefactors()
    out = DiffPoly()
    for name, tuples in (("pure", pure), ("double", doubles),
                         ("distinct", distinct)):
        w = pref[name].at(n)
        out = out + poly_sum(fam.instantiate(t, n)
                             for t in tuples).scale(w)
    return out


def triple_assembled(n):
    """sum over sorted concrete triples of the substituted summand."""
    j = symmetrized_triple(n)
    out = DiffPoly()
    for x, y, z in combinations(range(1, n + 1), 3):
        out = out + subst_axes(j, {"a": x, "b": y, "c": z})
    return out


def triple_tiling_residual(n):
    return triple_assembled(n) - target_E(3, 3, n)
