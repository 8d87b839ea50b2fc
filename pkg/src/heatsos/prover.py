"""Proof search: pick a decomposition path for the requested inequality,
solve the semidefinite relaxation, extract exact rational data, verify it,
and emit a certificate.

Three paths exist.  The concrete path proves one target at a fixed
dimension n over axes 1..n.  The pair path proves the order-2 target for
every dimension at once via three abstract blocks with two shared
scalars; since the optimal Gram matrices there are singular, the shared
scalars are snapped to simple rationals and the blocks re-solved with
them fixed.  The triple path proves the order-3 target at a fixed
dimension n >= 3 through its symmetrized three-axis summand, which keeps
the basis independent of n.

Every emitted certificate has already passed the independent verifier;
outcomes that find no certificate say so without claiming a disproof.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import certify
from .constraints import integral_constraints, log_concave_constraints
from .reduction import rref
from .sdp import (
    DEFAULT_DENOM_BOUND,
    DEFAULT_SOLVERS,
    ELIGIBLE_MARGIN,
    NEGATIVE_MARGIN,
    RationalizationError,
    extract_block_certificates,
    prepare_block,
    rationalize,
    solve_blocks,
)
from .symmetry import PAIR_AXES, TRIPLE_AXES, pair_blocks, symmetrized_triple
from .targets import target_E, target_E0, target_E1

FAMILIES = ("C1", "C2", "C3", "E0")
NO_CERTIFICATE_MESSAGE = (
    "no certificate found: the feasibility search terminated with a "
    "negative answer; this is not a disproof of the inequality")
SHARED_SNAP_DENOMS = (1, 2, 4, 8, 16, 64, 256, 1024)


@dataclass(frozen=True)
class ProveOptions:
    log_concave: bool = True
    method: str = "auto"            # auto | concrete | pair | triple
    denom_bound: int = DEFAULT_DENOM_BOUND
    max_retries: int = 3
    solvers: tuple = DEFAULT_SOLVERS


@dataclass
class ProveOutcome:
    status: str                     # certificate | no-certificate |
                                    # rationalization-failed | solver-error |
                                    # unsupported
    message: str
    certificate: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def exit_code(self):
        if self.status == "certificate":
            return 0
        if self.status == "no-certificate":
            return 1
        return 2


_SYSTEM_CACHE = {}


def build_system(m, axes):
    """Constraint list and its reduction, cached per (m, axes)."""
    key = (m, tuple(axes))
    hit = _SYSTEM_CACHE.get(key)
    if hit is None:
        cons = integral_constraints(m, axes)
        hit = (cons, rref([c.form for c in cons]))
        _SYSTEM_CACHE[key] = hit
    return hit


def concrete_target(family, m, n):
    if family == "E0":
        return target_E0(m, n)
    if family == "C1":
        return target_E1(m, n)
    return target_E(2 if family == "C2" else 3, m, n)


def _note_block_stats(diagnostics, blocks, bcs=None):
    diagnostics["basis_size"] = max(len(b.basis) for b in blocks)
    diagnostics["independent_constraints"] = max(len(b.constraints)
                                                 for b in blocks)
    diagnostics["families_available"] = sum(len(b.families) for b in blocks)
    if bcs is not None:
        diagnostics["families_used"] = sum(
            1 for bc in bcs for fs in bc.family_sos if fs)


def describe_target(family, m, n, method="auto"):
    """The target polynomial the auto dispatch would certify, or None for
    the generic pair (whose target is split across blocks)."""
    if family not in FAMILIES or n is None:
        return None
    if method in ("auto", "triple") and family == "C3" and m == 3 and n >= 3:
        return symmetrized_triple(n)
    return concrete_target(family, m, n)


def _verified(outcome):
    """Emit a certificate only if the independent verifier accepts it."""
    res = certify.verify_certificate(outcome.certificate)
    if res.ok:
        outcome.diagnostics["verified_checks"] = len(res.checks)
        return outcome
    bad = "; ".join(f"{c.name}: {c.detail}" for c in res.errors())
    return ProveOutcome("solver-error",
                        f"internal error: extracted certificate failed "
                        f"verification ({bad})", None, outcome.diagnostics)


def _failure_status(num, diagnostics):
    """Classify a search that produced no exact certificate."""
    margin = min(num.margins.values()) if num.margins else 0.0
    if num.status == "solver-error":
        return ProveOutcome("solver-error", "no solver returned a solution",
                            None, diagnostics)
    if margin < ELIGIBLE_MARGIN:
        return ProveOutcome("no-certificate", NO_CERTIFICATE_MESSAGE, None,
                            diagnostics)
    return ProveOutcome(
        "rationalization-failed",
        "the numeric solution has positive margin but no nearby rational "
        "certificate was found; raise --denom-bound or --max-retries",
        None, diagnostics)


def _solve_single_block(block, opts, diagnostics):
    _note_block_stats(diagnostics, [block])
    num = solve_blocks([block], solvers=opts.solvers)
    diagnostics.update(solver=num.solver, margins=num.margins,
                       margin=num.margin)
    if num.status != "candidate":
        return None, _failure_status(num, diagnostics)
    try:
        _, certs, bound = extract_block_certificates(
            [block], num, opts.denom_bound, opts.max_retries)
    except RationalizationError:
        return None, _failure_status(num, diagnostics)
    diagnostics["denominator_bound"] = bound
    _note_block_stats(diagnostics, [block], certs)
    return certs[0], None


def prove_concrete(family, m, n, opts):
    diagnostics = {"path": "concrete"}
    axes = tuple(range(1, n + 1))
    cons, system = build_system(m, axes)
    fams = log_concave_constraints(m, axes) if opts.log_concave else ()
    block = prepare_block("main", system, m, axes,
                          concrete_target(family, m, n), families=fams)
    bc, failure = _solve_single_block(block, opts, diagnostics)
    if failure is not None:
        return failure
    meta = {"solver": diagnostics["solver"],
            "denominator_bound": diagnostics["denominator_bound"]}
    cert = certify.concrete_certificate(family, m, n, cons, block, bc, meta)
    return _verified(ProveOutcome("certificate", "certificate found", cert,
                                  diagnostics))


def prove_triple(n, opts):
    diagnostics = {"path": "triple"}
    m, axes = 3, TRIPLE_AXES
    cons, system = build_system(m, axes)
    fams = log_concave_constraints(m, axes) if opts.log_concave else ()
    block = prepare_block("triple", system, m, axes, symmetrized_triple(n),
                          families=fams)
    bc, failure = _solve_single_block(block, opts, diagnostics)
    if failure is not None:
        return failure
    meta = {"solver": diagnostics["solver"],
            "denominator_bound": diagnostics["denominator_bound"]}
    cert = certify.triple_certificate(n, cons, block, bc, meta)
    return _verified(ProveOutcome("certificate", "certificate found", cert,
                                  diagnostics))


def prove_pair(opts):
    diagnostics = {"path": "pair"}
    m, axes = 2, PAIR_AXES
    cons, system = build_system(m, axes)
    pbs = pair_blocks()
    blocks = [prepare_block(pb.name, system, m, axes, pb.base,
                            shared_polys=pb.shared) for pb in pbs]
    _note_block_stats(diagnostics, blocks)
    num = solve_blocks(blocks, n_shared=2, solvers=opts.solvers)
    diagnostics.update(solver=num.solver, margins=num.margins)
    if num.status != "candidate":
        return _failure_status(num, diagnostics)

    # The optimal faces here are singular, so free rounding cannot land on
    # them.  Snap the shared scalars to nearby simple rationals, re-solve
    # with them fixed, and round the now well-determined blocks.
    tried = set()
    for denom in SHARED_SNAP_DENOMS:
        cand = tuple(rationalize(v, denom) for v in num.shared)
        if cand in tried:
            continue
        tried.add(cand)
        fixed = [prepare_block(pb.name, system, m, axes, pb.form(*cand))
                 for pb in pbs]
        num2 = solve_blocks(fixed, solvers=opts.solvers)
        if num2.status != "candidate":
            continue
        try:
            _, bcs, bound = extract_block_certificates(
                fixed, num2, opts.denom_bound, opts.max_retries)
        except RationalizationError:
            continue
        diagnostics.update(shared=[str(c) for c in cand],
                           denominator_bound=bound, margins=num2.margins,
                           solver=num2.solver)
        _note_block_stats(diagnostics, fixed, bcs)
        meta = {"solver": num2.solver, "denominator_bound": bound}
        cert = certify.pair_certificate(cand, cons, fixed, bcs, meta)
        return _verified(ProveOutcome("certificate", "certificate found",
                                      cert, diagnostics))
    return _failure_status(num, diagnostics)


def prove(family, m, n=None, options=None):
    """Prove the family inequality at order m and dimension n (None for
    the generic-dimension pair statement)."""
    opts = options or ProveOptions()
    start = time.monotonic()

    def done(outcome):
        outcome.diagnostics["wall"] = round(time.monotonic() - start, 3)
        return outcome

    if family not in FAMILIES:
        return done(ProveOutcome("unsupported",
                                 f"unknown family {family!r}"))
    if not isinstance(m, int) or m < 2:
        return done(ProveOutcome("unsupported",
                                 f"order m must be an integer >= 2, got "
                                 f"{m!r}"))
    if m > 4:
        return done(ProveOutcome("unsupported",
                                 "orders above m = 4 are out of scope"))
    if n is None:
        if opts.method in ("auto", "pair") and family == "C2" and m == 2:
            return done(prove_pair(opts))
        return done(ProveOutcome(
            "unsupported",
            "generic dimension is only supported for family C2 at m = 2"))
    if not isinstance(n, int) or n < 1:
        return done(ProveOutcome("unsupported",
                                 f"dimension n must be an integer >= 1 or "
                                 f"generic, got {n!r}"))
    if n > 4:
        return done(ProveOutcome("unsupported",
                                 "dimensions above n = 4 are out of scope"))
    if opts.method == "pair":
        return done(ProveOutcome("unsupported",
                                 "the pair path takes generic dimension"))
    if opts.method == "triple" or (opts.method == "auto" and family == "C3"
                                   and m == 3 and n >= 3):
        if family != "C3" or m != 3 or n < 3:
            return done(ProveOutcome(
                "unsupported",
                "the triple path needs family C3, m = 3, and n >= 3"))
        return done(prove_triple(n, opts))
    if opts.method not in ("auto", "concrete"):
        return done(ProveOutcome("unsupported",
                                 f"unknown method {opts.method!r}"))
    return done(prove_concrete(family, m, n, opts))
