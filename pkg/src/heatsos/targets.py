"""Construction of the target differential forms.

For a density p on R^n driven by dp/dt = (1/2) lap p, with H the differential
entropy, the m-th signed entropy derivative is an integral of a homogeneous
differential form of degree 2m and total order 2m against p^-(2m-1):

* target_E1(m, n): the form whose integral over p^(2m-1) equals
  (-1)^(m+1) d^m H / dt^m; built by applying the heat-flow time derivative
  m-1 times to |grad p|^2 / p and clearing the denominator.
* target_E0(m, n): (|grad p|^2 - p lap p)^m, the m-th power of the
  score-covariance defect; its normalized integral is the m-th moment of the
  (sign-flipped) Gaussian score field.
* target_E(s, m, n): E1 minus the multiple of E0 that subtracts the exact
  Gaussian value -- s = 2 uses (m-1)!/(2 n^(m-1)) (enough for the convexity
  chain), s = 3 the stronger (m-1)!/(2 n^m).

Each target also decomposes into per-axis-tuple kernels: E0 over m-tuples as a
product of single-axis defects, E1 over (a, b_1..b_{m-1}) by applying one-axis
heat derivations in the b's to (d_a p)^2 / p.  Summing a kernel over all
tuples in [n]^arity reproduces the full target; the kernels are what the
symmetrized generic-n route works with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .diffform import (
    DiffPoly, LaurentForm, P_SYM, Q, dsym, heat_axis_derivation,
    heat_time_derivative, laurent, poly_sum, poly_term,
)


def axis_defect(axis):
    """(d_axis p)^2 - p d_axis^2 p; nonnegative when log p is concave."""
    return (poly_term(1, dsym(axis), dsym(axis))
            - poly_term(1, dsym(), dsym(axis, axis)))


def grad_square(axes):
    return poly_sum(poly_term(1, dsym(ax), dsym(ax)) for ax in axes)


def _p_power(k):
    return DiffPoly({(P_SYM,) * k: Q(1)})


def target_E0(m, n):
    if m < 2:
        raise ValueError("the defect-power target needs m >= 2")
    if n < 1:
        raise ValueError("n must be a positive int")
    total = poly_sum(axis_defect(ax) for ax in range(1, n + 1))
    out = total
    for _ in range(m - 1):
        out = out * total
    return out


def target_E1(m, n):
    if m < 1:
        raise ValueError("m must be >= 1")
    if n < 1:
        raise ValueError("n must be a positive int")
    lf = laurent(grad_square(range(1, n + 1)), 1)
    for _ in range(m - 1):
        lf = heat_time_derivative(lf, n)
    sign = Q(1) if m % 2 else Q(-1)
    if lf.p_power > 2 * m - 1:
        raise RuntimeError("denominator power exceeded 2m-1; broken derivation")
    num = lf.num * _p_power(2 * m - 1 - lf.p_power)
    out = num.scale(sign * Q(1, 2))
    if not out.is_form(2 * m, 2 * m):
        raise RuntimeError("target is not homogeneous of degree/order 2m")
    return out


def gaussian_gap_coefficient(s, m, n):
    """Multiple of E0 subtracted from E1 for the s-family target."""
    if s not in (2, 3):
        raise ValueError("s must be 2 or 3")
    power = m - 1 if s == 2 else m
    return Q(math.factorial(m - 1), 2) / Q(n) ** power


def target_E(s, m, n):
    if m < 2:
        raise ValueError("the combined target needs m >= 2")
    return target_E1(m, n) - gaussian_gap_coefficient(s, m, n) * target_E0(m, n)


# ---------------------------------------------------------------------------
# per-tuple kernels

@dataclass(frozen=True)
class KernelFamily:
    """One differential form per axis tuple; summed over [n]^arity it equals
    the corresponding full target."""

    s: int
    m: int
    arity: int
    needs_n: bool
    _build: object

    def instantiate(self, axes, n=None):
        if len(axes) != self.arity:
            raise ValueError(f"kernel takes {self.arity} axes, got {len(axes)}")
        if self.needs_n and n is None:
            raise ValueError("this kernel family needs the dimension n")
        return self._build(tuple(axes), n)


def _e0_kernel(axes, _n):
    out = poly_term(1)
    for ax in axes:
        out = out * axis_defect(ax)
    return out


def _e1_kernel_builder(m):
    def build(axes, _n):
        a, rest = axes[0], axes[1:]
        lf = laurent(poly_term(1, dsym(a), dsym(a)), 1)
        for b in rest:
            lf = heat_axis_derivation(lf, b)
        if lf.p_power > 2 * m - 1:
            raise RuntimeError("kernel denominator exceeded 2m-1")
        sign = Q(1) if m % 2 else Q(-1)
        return (lf.num * _p_power(2 * m - 1 - lf.p_power)).scale(sign * Q(1, 2))
    return build


def tuple_kernels(s, m):
    """Kernel family for the target with index s in {0, 1, 2, 3}."""
    if m < 1 or m > 4:
        raise ValueError("kernels are provided for 1 <= m <= 4")
    if s == 0:
        if m < 2:
            raise ValueError("the defect-power kernel needs m >= 2")
        return KernelFamily(0, m, m, False, _e0_kernel)
    if s == 1:
        return KernelFamily(1, m, m, False, _e1_kernel_builder(m))
    if s in (2, 3):
        if m < 2:
            raise ValueError("the combined kernel needs m >= 2")
        e1 = _e1_kernel_builder(m)

        def build(axes, n):
            coef = gaussian_gap_coefficient(s, m, n)
            return e1(axes, n) - coef * _e0_kernel(axes, n)
        return KernelFamily(s, m, m, True, build)
    raise ValueError("s must be one of 0, 1, 2, 3")


def kernel_sum(s, m, n):
    """Sum the kernel family over all of [n]^arity (defines the target)."""
    fam = tuple_kernels(s, m)
    axes = range(1, n + 1)
    tuples = [()]
    for _ in range(fam.arity):
        tuples = [t + (ax,) for t in tuples for ax in axes]
    return poly_sum(fam.instantiate(t, n) for t in tuples)


def pair_kernel_parts():
    """The two n-free pieces of the m = 2 combined kernel on abstract axes:
    g(a, b) from the entropy side and h(a, b) = defect product, so that the
    full kernel is g - h/(2n)."""
    e1 = _e1_kernel_builder(2)
    g = e1(("a", "b"), None)
    h = _e0_kernel(("a", "b"), None)
    return g, h


def validate_kernels(s, m, n):
    """Exact check that the kernel family tiles the concrete target."""
    if s == 0:
        want = target_E0(m, n)
    elif s == 1:
        want = target_E1(m, n)
    else:
        want = target_E(s, m, n)
    got = kernel_sum(s, m, n)
    if got != want:
        raise RuntimeError(f"kernel family (s={s}, m={m}) fails to tile n={n}")
    return True
