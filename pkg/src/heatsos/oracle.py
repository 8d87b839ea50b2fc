"""Independent numeric ground truth: Gaussian-mixture densities evolved in
closed form under the heat semigroup, pointwise evaluation of differential
forms, and tensor-grid quadrature with an error estimate.

Nothing here shares code with the symbolic pipeline beyond the form data
structures, so agreement between the two is meaningful evidence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .diffform import DiffPoly, LaurentForm, Q, is_abstract, qstr


@dataclass(frozen=True)
class MixtureDensity:
    """Isotropic Gaussian mixture; component variances grow by t under heat."""

    weights: tuple
    means: tuple   # tuple of length-n tuples
    variances: tuple

    def __post_init__(self):
        if not (len(self.weights) == len(self.means) == len(self.variances)):
            raise ValueError("component lists must have equal length")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {sum(self.weights)}, not 1")
        if any(v < 0 for v in self.variances):
            raise ValueError("variances must be >= 0")
        dims = {len(mu) for mu in self.means}
        if len(dims) != 1:
            raise ValueError("component means disagree on dimension")

    @property
    def n(self):
        return len(self.means[0])


def mixture(components):
    """Build a MixtureDensity from (weight, mean, variance) triples."""
    ws, mus, vs = [], [], []
    for w, mu, v in components:
        ws.append(float(w))
        mus.append(tuple(float(c) for c in mu))
        vs.append(float(v))
    return MixtureDensity(tuple(ws), tuple(mus), tuple(vs))


def load_density(path):
    with open(path) as fh:
        data = json.load(fh)
    try:
        comps = [(c["weight"], c["mean"], c["var"]) for c in data["components"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad density file {path}: {exc}") from None
    return mixture(comps)


def _hermite_factors(z, kmax):
    """He_0..He_kmax at z (probabilists'), stacked on a new leading axis."""
    out = [np.ones_like(z)]
    if kmax >= 1:
        out.append(z.copy())
    for k in range(1, kmax):
        out.append(z * out[k] - k * out[k - 1])
    return out


def _axis_factor_table(x, mu, var, kmax):
    """Per-axis factors d^k/dx^k of the 1-d Gaussian, k = 0..kmax."""
    z = (x - mu) / math.sqrt(var)
    g = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi * var)
    he = _hermite_factors(z, kmax)
    return [((-1.0) ** k) * var ** (-0.5 * k) * he[k] * g
            for k in range(kmax + 1)]


class _GridEval:
    """Evaluates derivative symbols of an evolved mixture on a tensor grid."""

    def __init__(self, density, t, axis_points):
        self.n = density.n
        if len(axis_points) != self.n:
            raise ValueError("axis count mismatch")
        self.tables = []  # [component][axis] -> list over k
        self.weights = density.weights
        kmax = 8  # enough for order 2m-1 with m <= 4
        for mu, v in zip(density.means, density.variances):
            vt = v + t
            if vt <= 0:
                raise ValueError("variance + t must be positive")
            self.tables.append([
                _axis_factor_table(np.asarray(axis_points[ax], float),
                                   mu[ax], vt, kmax)
                for ax in range(self.n)
            ])
        self.cache = {}

    def symbol(self, sym):
        got = self.cache.get(sym)
        if got is not None:
            return got
        orders = dict(sym)
        for ax in orders:
            if is_abstract(ax):
                raise ValueError("cannot evaluate abstract axes numerically")
            if not (1 <= ax <= self.n):
                raise ValueError(f"axis {ax} out of range for n={self.n}")
        total = 0.0
        for w, tabs in zip(self.weights, self.tables):
            prod = None
            for ax in range(self.n):
                f1 = tabs[ax][orders.get(ax + 1, 0)]
                # reshape for tensor-product broadcasting
                shape = [1] * self.n
                shape[ax] = f1.shape[0]
                f1 = f1.reshape(shape)
                prod = f1 if prod is None else prod * f1
            total = total + w * prod
        self.cache[sym] = total
        return total

    def poly(self, p):
        total = 0.0
        for m, c in p.terms.items():
            term = float(c)
            for s in m:
                term = term * self.symbol(s)
            total = total + term
        return total

    def form(self, form):
        if isinstance(form, LaurentForm):
            return self.poly(form.num) / self.symbol(()) ** form.p_power
        return self.poly(form)


def eval_form(form, density, t, x):
    """Evaluate a DiffPoly or LaurentForm at points x (shape (n,) or (n, M))."""
    x = np.asarray(x, float)
    if x.ndim == 1:
        x = x[:, None]
        squeeze = True
    else:
        squeeze = False
    if x.shape[0] != density.n:
        raise ValueError("point dimension mismatch")
    # a "grid" with one shared index per axis would tensor them; evaluate
    # pointwise instead by running each point through a 1-point grid
    n = density.n
    ev = _GridEval.__new__(_GridEval)
    ev.n = n
    ev.weights = density.weights
    ev.cache = {}
    kmax = 8
    ev.tables = []
    for mu, v in zip(density.means, density.variances):
        vt = v + t
        ev.tables.append([_axis_factor_table(x[ax], mu[ax], vt, kmax)
                          for ax in range(n)])
    # flatten tensor broadcasting: every axis shares the same point index
    out = 0.0
    if isinstance(form, LaurentForm):
        num, den_pow = form.num, form.p_power
    else:
        num, den_pow = form, 0

    def sym_vals(sym):
        orders = dict(sym)
        for ax in orders:
            if is_abstract(ax):
                raise ValueError("cannot evaluate abstract axes numerically")
            if not (1 <= ax <= n):
                raise ValueError(f"axis {ax} out of range for n={n}")
        total = 0.0
        for w, tabs in zip(ev.weights, ev.tables):
            prod = 1.0
            for ax in range(n):
                prod = prod * tabs[ax][orders.get(ax + 1, 0)]
            total = total + w * prod
        return total

    cache = {}
    for m, c in num.terms.items():
        term = float(c)
        for s in m:
            if s not in cache:
                cache[s] = sym_vals(s)
            term = term * cache[s]
        out = out + term
    if den_pow:
        if () not in cache:
            cache[()] = sym_vals(())
        out = out / cache[()] ** den_pow
    out = np.broadcast_to(np.asarray(out, float), x.shape[1:])
    return float(out[0]) if squeeze else np.array(out)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor trapezoid grid: +-padding * max std around the component means."""

    padding: float = 8.0
    points: tuple = (201, 121, 61)   # per-axis counts for n = 1, 2, 3

    def axis_count(self, n):
        if not (1 <= n <= len(self.points)):
            raise ValueError(f"quadrature supports 1 <= n <= 3, got {n}")
        return self.points[n - 1]


def _grid_axes(density, t, spec):
    n = density.n
    smax = math.sqrt(max(density.variances) + t)
    npts = spec.axis_count(n)
    axes = []
    for ax in range(n):
        lo = min(mu[ax] for mu in density.means) - spec.padding * smax
        hi = max(mu[ax] for mu in density.means) + spec.padding * smax
        axes.append(np.linspace(lo, hi, npts))
    return axes


def _tensor_trapezoid(values, axes):
    out = values
    for ax in reversed(range(len(axes))):
        out = np.trapezoid(out, x=axes[ax], axis=ax)
    return float(out)


def integrate_form(form, density, t, spec=QuadratureSpec()):
    """Integrate a form over R^n; returns (value, error_estimate).

    The error estimate compares the full grid with its stride-2 subgrid
    (Richardson); callers should treat results with a large estimate as
    unconverged rather than wrong.
    """
    axes = _grid_axes(density, t, spec)
    ev = _GridEval(density, t, axes)
    vals = ev.form(form)
    vals = np.broadcast_to(vals, tuple(len(a) for a in axes))
    full = _tensor_trapezoid(vals, axes)
    coarse = _tensor_trapezoid(vals[(slice(None, None, 2),) * len(axes)],
                               [a[::2] for a in axes])
    return full, abs(full - coarse) / 3.0


def gaussian_reference(m, n, var, t):
    """Exact value of the m-th entropy-derivative functional for an isotropic
    Gaussian with variance var at heat time t: n (m-1)! / (2 (var+t)^m)."""
    if m < 1 or n < 1:
        raise ValueError("need m >= 1, n >= 1")
    vt = Q(var) + Q(t)
    if vt <= 0:
        raise ValueError("variance + t must be positive")
    return Q(n * math.factorial(m - 1)) / (2 * vt ** m)


def score_field_reference(n, var, t):
    """Exact value of (p lap p - |grad p|^2)/p^2 for an isotropic Gaussian:
    constant in x, equal to -n/(var+t)."""
    vt = Q(var) + Q(t)
    return -Q(n) / vt


def density_to_json(density):
    comps = [{"weight": w, "mean": list(mu), "var": v}
             for w, mu, v in zip(density.weights, density.means,
                                 density.variances)]
    return {"components": comps}
