"""Exact certificates: canonical JSON serialization and an independent
verifier.

A certificate stores only provenance and rational scalars: generator
monomials with their derivative axis, minor subsets, basis monomials,
multipliers, and square coefficients.  The verifier rebuilds every
polynomial object from that provenance and checks the ring identity

    target = sum_i lambda_i * R_i + sum_f weight_f * Q_f + S

exactly, together with nonnegativity of every square coefficient.  R_i is
a divergence constraint (zero integral against 1/p^(2m-1)), weight_f is a
product of signed concavity minors (pointwise nonnegative on log-concave
densities), and Q_f, S are explicit sums of squares.  Nothing numeric
enters verification.

Generic certificates cover every dimension at once.  The pair kind proves
three abstract two-axis blocks whose prefactor-weighted sums over ordered
axis pairs tile the full order-2 target; the tiling identity is confirmed
at enough spot dimensions to pin the rational-in-n coefficients, and the
two shared kernels are checked to lie in the constraint span both
abstractly and under the diagonal axis merge.  The triple kind proves the
one symmetrized three-axis summand whose instantiations tile the order-3
target at the stored dimension.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .constraints import (
    divergence_constraint,
    integral_constraints,
    pair_auxiliary_kernels,
    signed_minor,
)
from .diffform import (
    Q,
    encode_monomial,
    is_abstract,
    mono_degree,
    mono_order,
    mono_total_order,
    parse_monomial,
    qparse,
    qstr,
    subst_axes,
)
from .reduction import rref
from .sdp import SquareTerm, sos_expand
from .symmetry import (
    PAIR_AXES,
    TRIPLE_AXES,
    pair_blocks,
    pair_tiling_residual,
    symmetrized_triple,
    triple_tiling_residual,
)
from .targets import target_E, target_E0, target_E1

SCHEMA = "sos-entropy-certificate/1"
FAMILY_ORDERS = {"E0": 0, "C1": 1, "C2": 2, "C3": 3}

# Spot dimensions for the pair tiling.  Cleared of its 1/(n (n-1)) poles
# the per-pattern residual is polynomial in n of degree at most four, so
# six distinct evaluation points force it to vanish identically.
PAIR_SPOT_DIMENSIONS = (2, 3, 4, 5, 6, 7)


# ---------------------------------------------------------------------------
# building


def _encode_sos(terms):
    return [{"c": qstr(t.coeff), "e": [qstr(e) for e in t.vector]}
            for t in terms]


def _encode_block(block, bc, used_map):
    fams = []
    for fam, terms in zip(block.families, bc.family_sos):
        if not terms:
            continue
        fams.append({"subsets": [list(s) for s in fam.subsets],
                     "y_basis": [encode_monomial(y) for y in fam.y_basis],
                     "sos": _encode_sos(terms)})
    lam = {str(used_map[i]): qstr(v)
           for i, v in sorted(bc.lambdas.items()) if v}
    return {"name": block.name,
            "basis": [encode_monomial(b) for b in block.basis],
            "lambdas": lam,
            "families": fams,
            "sos": _encode_sos(bc.sos)}


def _used_generators(constraints, block_certs):
    used = sorted({i for bc in block_certs
                   for i, v in bc.lambdas.items() if v})
    gens = [{"g": encode_monomial(constraints[i].generator),
             "axis": constraints[i].axis} for i in used]
    return gens, {i: k for k, i in enumerate(used)}


def concrete_certificate(family, m, n, constraints, block, bc, meta=None):
    gens, used_map = _used_generators(constraints, [bc])
    cert = {"schema": SCHEMA, "kind": "concrete", "family": family,
            "m": m, "n": n, "axes": list(range(1, n + 1)),
            "generators": gens,
            "block": _encode_block(block, bc, used_map)}
    if meta:
        cert["meta"] = meta
    return cert


def triple_certificate(n, constraints, block, bc, meta=None):
    gens, used_map = _used_generators(constraints, [bc])
    cert = {"schema": SCHEMA, "kind": "triple-symmetrized", "family": "C3",
            "m": 3, "n": n, "axes": list(TRIPLE_AXES),
            "generators": gens,
            "block": _encode_block(block, bc, used_map)}
    if meta:
        cert["meta"] = meta
    return cert


def pair_certificate(shared, constraints, blocks, bcs, meta=None):
    gens, used_map = _used_generators(constraints, bcs)
    cert = {"schema": SCHEMA, "kind": "pair-generic", "family": "C2",
            "m": 2, "n": "generic", "axes": list(PAIR_AXES),
            "shared": {"c1": qstr(shared[0]), "c2": qstr(shared[1])},
            "generators": gens,
            "blocks": [_encode_block(block, bc, used_map)
                       for block, bc in zip(blocks, bcs)]}
    if meta:
        cert["meta"] = meta
    return cert


def canonical_dumps(cert):
    """The one serialized form: sorted keys, two-space indent, newline."""
    return json.dumps(cert, sort_keys=True, indent=2) + "\n"


def save_certificate(cert, path):
    with open(path, "w") as fh:
        fh.write(canonical_dumps(cert))


def load_certificate(path):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerifyResult:
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return bool(self.checks) and all(c.ok for c in self.checks)

    def add(self, name, ok, detail=""):
        self.checks.append(Check(name, bool(ok), detail))
        return bool(ok)

    def errors(self):
        return [c for c in self.checks if not c.ok]


class _Stop(Exception):
    """Abort verification after a failed structural check."""


def verify_certificate(cert):
    res = VerifyResult()
    try:
        _verify(cert, res)
    except _Stop:
        pass
    except Exception as exc:
        res.add("well-formed", False, repr(exc))
    return res


def _require(res, name, ok, detail=""):
    if not res.add(name, ok, detail):
        raise _Stop


def _valid_axis(ax):
    return (isinstance(ax, int) and ax >= 1) or \
        (isinstance(ax, str) and is_abstract(ax))


def _rebuild_generators(cert, m, axes, res):
    gens = []
    ok = True
    detail = ""
    for item in cert.get("generators", ()):
        g = parse_monomial(item["g"])
        ax = item["axis"]
        if not (ax in axes
                and mono_degree(g) == 2 * m - 1
                and mono_total_order(g) == 2 * m - 1
                and mono_order(g) <= 2 * m - 2):
            ok = False
            detail = f"bad generator {item}"
            break
        gens.append(divergence_constraint(g, ax, m))
    _require(res, "generators well-formed", ok, detail)
    return gens


def _parse_sos(items, size, res, label):
    terms = []
    ok = True
    detail = ""
    nonneg = True
    for item in items:
        c = qparse(item["c"])
        e = tuple(qparse(x) for x in item["e"])
        if len(e) != size:
            ok = False
            detail = f"square vector length {len(e)} != basis size {size}"
            break
        if c < 0:
            nonneg = False
        terms.append(SquareTerm(c, e))
    _require(res, f"{label}: squares well-formed", ok, detail)
    res.add(f"{label}: square coefficients nonnegative", nonneg)
    return terms


def _block_identity(block_json, target, m, axes, gens, res):
    label = block_json.get("name", "block")
    basis = [parse_monomial(t) for t in block_json["basis"]]
    lam = {int(k): qparse(v) for k, v in block_json["lambdas"].items()}
    _require(res, f"{label}: multiplier indices valid",
             all(0 <= i < len(gens) for i in lam))
    acc = target
    for i, lv in sorted(lam.items()):
        acc = acc - lv * gens[i].form
    for fam in block_json["families"]:
        subsets = [tuple(s) for s in fam["subsets"]]
        good = all(sub and len(set(sub)) == len(sub)
                   and all(ax in axes for ax in sub) for sub in subsets)
        _require(res, f"{label}: minor subsets valid", good, repr(subsets))
        weight = None
        for sub in subsets:
            minor = signed_minor(axes, sub)
            weight = minor if weight is None else weight * minor
        y = [parse_monomial(t) for t in fam["y_basis"]]
        terms = _parse_sos(fam["sos"], len(y), res,
                           f"{label}: multiplier {subsets}")
        acc = acc - weight * sos_expand(terms, y)
    terms = _parse_sos(block_json["sos"], len(basis), res, f"{label}: main")
    acc = acc - sos_expand(terms, basis)
    res.add(f"{label}: ring identity residual is zero", not acc,
            "" if not acc else f"{len(acc.terms)} residual terms")


def _in_span(forms, candidate):
    return rref(list(forms) + [candidate]).rank == rref(list(forms)).rank


def _verify(cert, res):
    _require(res, "schema", cert.get("schema") == SCHEMA,
             repr(cert.get("schema")))
    kind = cert.get("kind")
    _require(res, "kind known",
             kind in ("concrete", "triple-symmetrized", "pair-generic"),
             repr(kind))
    family = cert.get("family")
    _require(res, "family known", family in FAMILY_ORDERS, repr(family))
    m = cert.get("m")
    _require(res, "order m valid", isinstance(m, int) and m >= 2, repr(m))
    axes = tuple(cert.get("axes", ()))
    _require(res, "axes valid",
             axes and all(_valid_axis(ax) for ax in axes)
             and len(set(axes)) == len(axes), repr(axes))

    if kind == "concrete":
        n = cert.get("n")
        _require(res, "dimension valid", isinstance(n, int) and n >= 1,
                 repr(n))
        _require(res, "axes match dimension",
                 axes == tuple(range(1, n + 1)), repr(axes))
        gens = _rebuild_generators(cert, m, axes, res)
        if family == "E0":
            target = target_E0(m, n)
        elif family == "C1":
            target = target_E1(m, n)
        else:
            target = target_E(FAMILY_ORDERS[family], m, n)
        _block_identity(cert["block"], target, m, axes, gens, res)
        return

    if kind == "triple-symmetrized":
        n = cert.get("n")
        _require(res, "family is C3 at order 3",
                 family == "C3" and m == 3, f"{family} m={m}")
        _require(res, "dimension valid", isinstance(n, int) and n >= 3,
                 repr(n))
        _require(res, "axes are the abstract triple",
                 axes == TRIPLE_AXES, repr(axes))
        gens = _rebuild_generators(cert, m, axes, res)
        target = symmetrized_triple(n)
        _block_identity(cert["block"], target, m, axes, gens, res)
        res.add("summand instantiations tile the full target",
                not triple_tiling_residual(n))
        return

    # pair-generic
    _require(res, "family is C2 at order 2", family == "C2" and m == 2,
             f"{family} m={m}")
    _require(res, "dimension is generic", cert.get("n") == "generic",
             repr(cert.get("n")))
    _require(res, "axes are the abstract pair", axes == PAIR_AXES,
             repr(axes))
    c1 = qparse(cert["shared"]["c1"])
    c2 = qparse(cert["shared"]["c2"])
    gens = _rebuild_generators(cert, m, axes, res)
    pbs = pair_blocks()
    blocks_json = cert.get("blocks", ())
    _require(res, "all three blocks present",
             [b.get("name") for b in blocks_json] == [pb.name for pb in pbs])
    for pb, block_json in zip(pbs, blocks_json):
        _block_identity(block_json, pb.form(c1, c2), m, axes, gens, res)
        res.add(f"{pb.name}: prefactor positive for every dimension >= 2",
                pb.prefactor.const > 0
                and all(pole <= 1 for pole in pb.prefactor.poles))
    r1, r2 = pair_auxiliary_kernels()
    abstract_forms = [c.form for c in integral_constraints(2, PAIR_AXES)]
    merged_forms = [c.form for c in integral_constraints(2, (1,))]
    for name, r in (("first", r1), ("second", r2)):
        res.add(f"{name} shared kernel lies in the constraint span",
                _in_span(abstract_forms, r))
        res.add(f"{name} shared kernel diagonal lies in the merged span",
                _in_span(merged_forms, subst_axes(r, {"a": 1, "b": 1})))
    for n in PAIR_SPOT_DIMENSIONS:
        res.add(f"block sums tile the full target at dimension {n}",
                not pair_tiling_residual(n, c1, c2))
