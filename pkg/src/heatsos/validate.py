"""Numeric cross-checks of the symbolic pipeline against quadrature
oracles: constraint integrals vanish, the first-derivative target matches
the Gaussian closed form, and the closed-form heat evolution satisfies
the heat equation.  Shared by the validate command and the acceptance
suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import integral_constraints
from .diffform import Q, dsym, laurent, poly_term
from .oracle import eval_form, gaussian_reference, integrate_form, mixture
from .targets import target_E1


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    ok: bool
    value: float
    bound: float


def validation_suite(tol=1e-6):
    """Run every numeric check; returns one record per check."""
    checks = []
    mix1 = mixture([(0.6, (-0.5,), 1.0), (0.4, (0.7,), 1.5)])
    mix2 = mixture([(0.6, (-0.5, 0.3), 1.0), (0.4, (0.7, -0.2), 1.5)])

    # every generated constraint integrates to zero against 1/p^(2m-1)
    f = dsym()
    for m, axes, dens in ((2, (1,), mix1), (3, (1,), mix1),
                          (2, (1, 2), mix2), (3, (1, 2), mix2)):
        scale, _ = integrate_form(
            laurent(poly_term(1, *(f,) * (2 * m)), 2 * m - 1), dens, 1.0)
        worst = max(abs(integrate_form(laurent(c.form, 2 * m - 1),
                                       dens, 1.0)[0])
                    for c in integral_constraints(m, axes)) / scale
        checks.append(ValidationCheck(
            f"constraint integrals vanish (m={m}, n={len(axes)})",
            worst < tol, float(worst), tol))

    # the first-derivative integral matches n (m-1)! / (2 (var+t)^m)
    for m in (1, 2, 3):
        for n in (1, 2):
            dens = mixture([(1.0, (0.0,) * n, 1.0)])
            for t in (Q(1, 2), Q(1), Q(2)):
                val, err = integrate_form(
                    laurent(target_E1(m, n), 2 * m - 1), dens, float(t))
                want = float(gaussian_reference(m, n, 1, t))
                rel = abs(val - want) / abs(want)
                checks.append(ValidationCheck(
                    f"Gaussian closed form (m={m}, n={n}, t={t})",
                    rel < tol and err < tol, float(rel), tol))

    # d p / dt from the closed-form evolution matches (1/2) lap p
    h = 1e-4
    lap = sum((poly_term(Q(1, 2), dsym(ax, ax)) for ax in (1, 2)),
              poly_term(0, dsym()))
    p = poly_term(1, dsym())
    pts = np.array([[0.1, -0.4, 1.3], [0.5, 0.2, -0.9]])
    fd = (eval_form(p, mix2, 1.0 + h, pts)
          - eval_form(p, mix2, 1.0 - h, pts)) / (2 * h)
    closed = eval_form(lap, mix2, 1.0, pts)
    worst = float(np.max(np.abs(fd - closed)))
    checks.append(ValidationCheck("heat-equation finite difference",
                                  worst < tol, worst, tol))
    return checks
