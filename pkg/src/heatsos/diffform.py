"""Exact arithmetic for differential forms in the partial derivatives of a
positive density p(x, t) driven by the heat equation dp/dt = (1/2) laplacian(p).

Representations (all immutable values, all coefficients exact rationals):

* axis        -- concrete coordinate as a positive int, or an abstract
                 pairwise-distinct placeholder axis 'a'..'d'.  The two kinds
                 are never mixed inside one comparison.
* symbol      -- one partial derivative of p: a tuple of (axis, order) pairs
                 sorted by axis, orders >= 1.  The empty tuple is p itself.
* monomial    -- a product of symbols: a tuple of symbols sorted ascending in
                 the symbol order.  The empty tuple is the constant monomial 1.
* DiffPoly    -- finite rational combination of monomials (dict, no zeros).
* LaurentForm -- quotient (DiffPoly) / p**k, canonicalized so that not every
                 numerator monomial retains a factor p while k > 0.

The symbol order ranks by total derivative order first, then by comparing the
multi-index at the highest axis where two symbols differ.  Monomials compare
by their descending factor lists, which is the usual "highest differing factor
multiplicity decides" rule.

>>> f, f1 = dsym(), dsym(1)
>>> str(differentiate(poly_term(1, f1, f1), 1))
'2*d[1:1]*d[1:2]'
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    Q = Fraction

QZERO = Q(0)
QONE = Q(1)
QHALF = Q(1, 2)

ABSTRACT_AXES = ("a", "b", "c", "d")
_ABSTRACT_KEY = {s: i + 1 for i, s in enumerate(ABSTRACT_AXES)}


class FormParseError(ValueError):
    """Raised when a canonical text encoding cannot be parsed."""


def qparse(text):
    """Parse an exact rational from 'num' or 'num/den' text."""
    try:
        return Q(text.strip())
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise FormParseError(f"bad rational {text!r}: {exc}") from None


def qstr(x):
    return str(Q(x))


def axis_key(axis):
    """Total order on axes; abstract 'a'..'d' rank like concrete 1..4."""
    if isinstance(axis, bool):
        raise ValueError(f"invalid axis {axis!r}")
    if isinstance(axis, int):
        if axis < 1:
            raise ValueError(f"concrete axis must be >= 1, got {axis}")
        return axis
    if axis in _ABSTRACT_KEY:
        return _ABSTRACT_KEY[axis]
    raise ValueError(f"invalid axis {axis!r}")


def is_abstract(axis):
    return isinstance(axis, str)


# ---------------------------------------------------------------------------
# symbols

P_SYM = ()

_sym_key_cache = {}


def dsym(*axes):
    """Derivative symbol from a list of axes with repetition; dsym() is p.

    dsym(1, 1, 2) is d^3 p / dx1^2 dx2.
    """
    orders = {}
    for ax in axes:
        axis_key(ax)  # validates
        orders[ax] = orders.get(ax, 0) + 1
    return sym_from_orders(orders)


def sym_from_orders(orders):
    items = [(ax, o) for ax, o in orders.items() if o]
    for ax, o in items:
        if not isinstance(o, int) or o < 1:
            raise ValueError(f"derivative order must be a positive int, got {o!r}")
    items.sort(key=lambda it: axis_key(it[0]))
    keys = [axis_key(ax) for ax, _ in items]
    if len(set(keys)) != len(keys):
        raise ValueError(f"colliding axis keys in {items!r}")
    return tuple(items)


def sym_order(sym):
    return sum(o for _, o in sym)


def sym_axes(sym):
    return [ax for ax, _ in sym]


def sym_key(sym):
    """Sort key: (total order, (axis_key, order) pairs by descending axis)."""
    k = _sym_key_cache.get(sym)
    if k is None:
        pairs = tuple(sorted(((axis_key(ax), o) for ax, o in sym), reverse=True))
        k = (sym_order(sym), pairs)
        _sym_key_cache[sym] = k
    return k


def sym_raise(sym, axis, by=1):
    """Add `by` to the derivative order along `axis`."""
    orders = dict(sym)
    orders[axis] = orders.get(axis, 0) + by
    return sym_from_orders(orders)


def _axes_kind(axes):
    kinds = {is_abstract(ax) for ax in axes}
    if len(kinds) > 1:
        raise ValueError("concrete and abstract axes mixed in one comparison")
    return bool(kinds) and kinds.pop()


def compare_syms(s1, s2):
    _axes_kind(sym_axes(s1) + sym_axes(s2))
    k1, k2 = sym_key(s1), sym_key(s2)
    return (k1 > k2) - (k1 < k2)


# ---------------------------------------------------------------------------
# monomials

_mono_key_cache = {}


def mono(*syms):
    return tuple(sorted(syms, key=sym_key))


def mono_key(m):
    k = _mono_key_cache.get(m)
    if k is None:
        k = tuple(sorted((sym_key(s) for s in m), reverse=True))
        _mono_key_cache[m] = k
    return k


def compare_monomials(m1, m2):
    """-1, 0, or 1 comparing canonical monomials in the monomial order."""
    axes = []
    for m in (m1, m2):
        for s in m:
            axes.extend(sym_axes(s))
    _axes_kind(axes)
    k1, k2 = mono_key(m1), mono_key(m2)
    return (k1 > k2) - (k1 < k2)


def mono_mul(m1, m2):
    return tuple(sorted(m1 + m2, key=sym_key))


def mono_degree(m):
    return len(m)


def mono_order(m):
    return max((sym_order(s) for s in m), default=0)


def mono_total_order(m):
    return sum(sym_order(s) for s in m)


def mono_axes(m):
    axes = set()
    for s in m:
        axes.update(sym_axes(s))
    return axes


def mono_p_multiplicity(m):
    return sum(1 for s in m if s == P_SYM)


def mono_divide(m, d):
    """Multiset quotient m / d, or None if d does not divide m."""
    rest = list(m)
    for s in d:
        try:
            rest.remove(s)
        except ValueError:
            return None
    return tuple(rest)


# ---------------------------------------------------------------------------
# polynomials

class DiffPoly:
    """Rational linear combination of monomials; zero coefficients dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        tidy = {}
        if terms:
            for m, c in terms.items():
                c = Q(c)
                if c:
                    tidy[m] = c
        self.terms = tidy

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, DiffPoly) and self.terms == other.terms

    def __ne__(self, other):
        return not self == other

    def __neg__(self):
        return DiffPoly({m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, QZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        res = DiffPoly.__new__(DiffPoly)
        res.terms = out
        return res

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DiffPoly):
            out = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = mono_mul(m1, m2)
                    s = out.get(m, QZERO) + c1 * c2
                    if s:
                        out[m] = s
                    else:
                        out.pop(m, None)
            res = DiffPoly.__new__(DiffPoly)
            res.terms = out
            return res
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = Q(c)
        if not c:
            return DiffPoly()
        res = DiffPoly.__new__(DiffPoly)
        res.terms = {m: c * v for m, v in self.terms.items()}
        return res

    def coeff(self, m):
        return self.terms.get(m, QZERO)

    def terms_sorted(self):
        """Terms from the highest monomial down."""
        return sorted(self.terms.items(), key=lambda it: mono_key(it[0]),
                      reverse=True)

    def axes(self):
        axes = set()
        for m in self.terms:
            axes.update(mono_axes(m))
        return axes

    def is_form(self, degree, total_order):
        """Every monomial has the given degree and total order."""
        return all(mono_degree(m) == degree and mono_total_order(m) == total_order
                   for m in self.terms)

    def __repr__(self):
        return f"DiffPoly({encode_poly(self)})"


ZERO = DiffPoly()


def poly_term(coef, *factors):
    return DiffPoly({mono(*factors): Q(coef)})


def poly_sum(polys):
    out = DiffPoly()
    for p in polys:
        out = out + p
    return out


def differentiate(obj, axis):
    """Spatial partial derivative d/dx_axis, by the Leibniz rule."""
    axis_key(axis)
    if isinstance(obj, tuple):
        obj = DiffPoly({obj: QONE})
    out = {}
    for m, c in obj.terms.items():
        for i, s in enumerate(m):
            nm = mono(*(m[:i] + (sym_raise(s, axis),) + m[i + 1:]))
            v = out.get(nm, QZERO) + c
            if v:
                out[nm] = v
            else:
                out.pop(nm, None)
    res = DiffPoly.__new__(DiffPoly)
    res.terms = out
    return res


def subst_axes(obj, mapping):
    """Relabel axes; colliding targets merge derivative orders."""
    if isinstance(obj, LaurentForm):
        return LaurentForm(subst_axes(obj.num, mapping), obj.p_power)

    def sub_sym(s):
        orders = {}
        for ax, o in s:
            tgt = mapping.get(ax, ax)
            axis_key(tgt)
            orders[tgt] = orders.get(tgt, 0) + o
        return sym_from_orders(orders)

    out = {}
    for m, c in obj.terms.items():
        nm = mono(*(sub_sym(s) for s in m))
        v = out.get(nm, QZERO) + c
        if v:
            out[nm] = v
        else:
            out.pop(nm, None)
    res = DiffPoly.__new__(DiffPoly)
    res.terms = out
    return res


# ---------------------------------------------------------------------------
# heat-flow derivations

def heat_axis_derivation(obj, axis):
    """The derivation D_axis sending each symbol v to (1/2) d^2 v / dx_axis^2.

    Summed over all axes this is the time derivative along the heat flow.
    """
    axis_key(axis)
    if isinstance(obj, LaurentForm):
        # quotient rule: D(u / p^k) = D(u)/p^k - k u D(p) / p^(k+1)
        k = obj.p_power
        num = heat_axis_derivation(obj.num, axis) * DiffPoly({(P_SYM,): QONE})
        if k:
            dp = poly_term(QHALF, dsym(axis, axis))
            num = num - Q(k) * (obj.num * dp)
        return LaurentForm(num, k + 1)
    out = {}
    for m, c in obj.terms.items():
        for i, s in enumerate(m):
            nm = mono(*(m[:i] + (sym_raise(s, axis, 2),) + m[i + 1:]))
            v = out.get(nm, QZERO) + c * QHALF
            if v:
                out[nm] = v
            else:
                out.pop(nm, None)
    res = DiffPoly.__new__(DiffPoly)
    res.terms = out
    return res


def heat_time_derivative(obj, n):
    """d/dt along the heat flow in dimension n (concrete axes only)."""
    axes = obj.num.axes() if isinstance(obj, LaurentForm) else obj.axes()
    if any(is_abstract(ax) for ax in axes):
        raise ValueError("time derivative needs concrete axes")
    if isinstance(obj, LaurentForm):
        out = LaurentForm(ZERO, 0)
        for e in range(1, n + 1):
            out = out + heat_axis_derivation(obj, e)
        return out
    return poly_sum(heat_axis_derivation(obj, e) for e in range(1, n + 1))


# ---------------------------------------------------------------------------
# Laurent forms

class LaurentForm:
    """num / p**p_power with the common p factor cancelled."""

    __slots__ = ("num", "p_power")

    def __init__(self, num, p_power):
        if p_power < 0:
            raise ValueError("p_power must be >= 0")
        if not num:
            num, p_power = DiffPoly(), 0
        while p_power > 0 and all(mono_p_multiplicity(m) for m in num.terms):
            num = DiffPoly({mono_divide(m, (P_SYM,)): c
                            for m, c in num.terms.items()})
            p_power -= 1
        self.num = num
        self.p_power = p_power

    def __eq__(self, other):
        return (isinstance(other, LaurentForm) and self.p_power == other.p_power
                and self.num == other.num)

    def __bool__(self):
        return bool(self.num)

    def __add__(self, other):
        if isinstance(other, DiffPoly):
            other = LaurentForm(other, 0)
        k = max(self.p_power, other.p_power)
        pk1 = DiffPoly({(P_SYM,) * (k - self.p_power): QONE})
        pk2 = DiffPoly({(P_SYM,) * (k - other.p_power): QONE})
        return LaurentForm(self.num * pk1 + other.num * pk2, k)

    def __sub__(self, other):
        return self + (-QONE) * other

    def __mul__(self, other):
        if isinstance(other, LaurentForm):
            return LaurentForm(self.num * other.num,
                               self.p_power + other.p_power)
        return LaurentForm(self.num * other, self.p_power)

    def __rmul__(self, other):
        return LaurentForm(self.num * other, self.p_power)

    def as_poly(self):
        if self.p_power:
            raise ValueError(f"denominator p^{self.p_power} does not cancel")
        return self.num

    def __repr__(self):
        return f"LaurentForm({encode_poly(self.num)!r}, {self.p_power})"


def laurent(num, p_power=0):
    return LaurentForm(num, p_power)


# ---------------------------------------------------------------------------
# enumeration

def enumerate_symbols(total_order, axes):
    """All derivative symbols of the given total order over the axes."""
    axes = list(axes)
    out = []

    def go(i, remaining, picked):
        if i == len(axes) - 1:
            if remaining or picked:
                out.append(dsym(*(picked + [axes[i]] * remaining)))
            return
        for o in range(remaining + 1):
            go(i + 1, remaining - o, picked + [axes[i]] * o)

    if total_order == 0:
        return [P_SYM]
    go(0, total_order, [])
    return sorted(out, key=sym_key, reverse=True)


def enumerate_monomials(degree, total_order, axes, max_factor_order=None):
    """Monomials with exactly the given degree and total order, padded with p
    factors; optionally capping individual factor orders.  Sorted descending
    in the monomial order."""
    cap = total_order if max_factor_order is None else max_factor_order
    pool = []
    for o in range(1, min(cap, total_order) + 1):
        pool.extend(enumerate_symbols(o, axes))
    out = []

    def go(i, remaining, slots, picked):
        if remaining == 0:
            out.append(mono(*(picked + [P_SYM] * slots)))
            return
        if i == len(pool) or slots == 0:
            return
        s = pool[i]
        o = sym_order(s)
        go(i + 1, remaining, slots, picked)
        k = 1
        while k * o <= remaining and k <= slots:
            go(i + 1, remaining - k * o, slots - k, picked + [s] * k)
            k += 1

    go(0, total_order, degree, [])
    return sorted(out, key=mono_key, reverse=True)


# ---------------------------------------------------------------------------
# canonical text encoding

def encode_axis(ax):
    return ax if is_abstract(ax) else str(ax)


def _parse_axis(token):
    if token in _ABSTRACT_KEY:
        return token
    if token.isdigit() and not token.startswith("0"):
        return int(token)
    raise FormParseError(f"bad axis token {token!r}")


def encode_symbol(s):
    inner = ",".join(f"{encode_axis(ax)}:{o}" for ax, o in s)
    return f"d[{inner}]"


def parse_symbol(text):
    if not (text.startswith("d[") and text.endswith("]")):
        raise FormParseError(f"bad derivative token {text!r}")
    inner = text[2:-1]
    if not inner:
        return P_SYM
    orders = {}
    for part in inner.split(","):
        bits = part.split(":")
        if len(bits) != 2:
            raise FormParseError(f"bad axis:order pair {part!r}")
        ax = _parse_axis(bits[0])
        if not bits[1].isdigit() or int(bits[1]) < 1:
            raise FormParseError(f"bad order in {part!r}")
        if ax in orders:
            raise FormParseError(f"repeated axis in {text!r}")
        orders[ax] = int(bits[1])
    return sym_from_orders(orders)


def encode_monomial(m):
    if not m:
        return "1"
    parts = []
    for s in m:  # canonical ascending order; group repeats
        tok = encode_symbol(s)
        if parts and parts[-1][0] == tok:
            parts[-1][1] += 1
        else:
            parts.append([tok, 1])
    return "*".join(t if e == 1 else f"{t}^{e}" for t, e in parts)


def parse_monomial(text):
    if text == "1":
        return ()
    syms = []
    for factor in text.split("*"):
        if "^" in factor:
            base, _, exp = factor.partition("^")
            if not exp.isdigit() or int(exp) < 1:
                raise FormParseError(f"bad exponent in {factor!r}")
            syms.extend([parse_symbol(base)] * int(exp))
        else:
            syms.append(parse_symbol(factor))
    return mono(*syms)


def encode_poly(p):
    if not p:
        return "0"
    return " + ".join(f"{qstr(c)}*{encode_monomial(m)}"
                      for m, c in p.terms_sorted())


def parse_poly(text):
    text = text.strip()
    if text == "0":
        return DiffPoly()
    terms = {}
    for chunk in text.split(" + "):
        coef, star, rest = chunk.partition("*")
        if not star:
            raise FormParseError(f"term without coefficient: {chunk!r}")
        m = parse_monomial(rest)
        terms[m] = terms.get(m, QZERO) + qparse(coef)
    return DiffPoly(terms)
