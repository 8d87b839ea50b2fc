import json
import random

from pytest import mark

from heatsos.certify import (
    SCHEMA, canonical_dumps, load_certificate, save_certificate,
    verify_certificate,
)
from conftest import rational_leaves
from heatsos.diffform import Q

parametrize = mark.parametrize

GOLDENS = ["golden_univariate", "golden_pair", "golden_triple"]


def _clone(cert):
    return json.loads(json.dumps(cert))


def _golden(request, name):
    return request.getfixturevalue(name).certificate


# ---------------------------------------------------------------------------
# serialization

@parametrize("name", GOLDENS)
def test_round_trip_is_byte_stable(request, tmp_path, name):
    cert = _golden(request, name)
    blob = canonical_dumps(cert)
    assert canonical_dumps(json.loads(blob)) == blob
    path = tmp_path / "cert.json"
    save_certificate(cert, path)
    raw = path.read_bytes()
    assert raw.decode() == blob
    assert canonical_dumps(load_certificate(path)) == blob
    save_certificate(load_certificate(path), path)
    assert path.read_bytes() == raw


def test_canonical_form_is_sorted_and_terminated(golden_univariate):
    blob = canonical_dumps(golden_univariate.certificate)
    assert blob.endswith("\n")
    assert json.loads(blob) == golden_univariate.certificate
    keys = list(json.loads(blob))
    assert keys == sorted(keys)


def test_schema_tag(golden_univariate):
    assert golden_univariate.certificate["schema"] == SCHEMA


# ---------------------------------------------------------------------------
# the verifier on genuine certificates

@parametrize("name", GOLDENS)
def test_verifier_accepts_goldens(request, name):
    res = verify_certificate(_golden(request, name))
    assert res.ok
    assert res.errors() == []
    names = [c.name for c in res.checks]
    assert "schema" in names
    assert any("ring identity residual is zero" in x for x in names)


def test_meta_is_not_load_bearing(golden_univariate):
    cert = _clone(golden_univariate.certificate)
    cert["meta"] = {"solver": "somebody-else", "denominator_bound": 7}
    assert verify_certificate(cert).ok


# ---------------------------------------------------------------------------
# tampering: every stored scalar matters

@parametrize("name", GOLDENS)
def test_single_coefficient_perturbations_rejected(request, name):
    cert = _golden(request, name)
    rng = random.Random(name)
    for _ in range(12):
        broken = _clone(cert)
        leaves = rational_leaves(broken)
        assert leaves
        holder, key = leaves[rng.randrange(len(leaves))]
        holder[key] = str(Q(holder[key]) + Q(rng.randint(1, 5)))
        assert not verify_certificate(broken).ok


def test_lambda_index_out_of_range(golden_univariate):
    cert = _clone(golden_univariate.certificate)
    lam = cert["block"]["lambdas"]
    lam["99"] = lam.pop(next(iter(lam)))
    res = verify_certificate(cert)
    assert not res.ok
    assert any("multiplier indices valid" in c.name for c in res.errors())


def test_negative_square_coefficient(golden_univariate):
    cert = _clone(golden_univariate.certificate)
    sq = cert["block"]["sos"][0]
    sq["c"] = str(-Q(sq["c"]))
    res = verify_certificate(cert)
    assert not res.ok
    assert any("nonnegative" in c.name for c in res.errors())


def test_tampered_generator_rejected(golden_univariate):
    cert = _clone(golden_univariate.certificate)
    cert["generators"][0]["axis"] = 2  # not an axis of this instance
    res = verify_certificate(cert)
    assert not res.ok
    assert any("generators well-formed" in c.name for c in res.errors())


def test_pair_block_order_is_fixed(golden_pair):
    cert = _clone(golden_pair.certificate)
    cert["blocks"] = cert["blocks"][::-1]
    assert not verify_certificate(cert).ok


def test_shared_scalars_are_load_bearing(golden_pair):
    cert = _clone(golden_pair.certificate)
    cert["shared"]["c1"] = "1/2"
    assert not verify_certificate(cert).ok


# ---------------------------------------------------------------------------
# malformed input never raises, only fails

@parametrize("broken", [
    {},
    [],
    {"schema": "something/9"},
    {"schema": SCHEMA, "kind": "imaginary"},
    {"schema": SCHEMA, "kind": "concrete", "family": "C9"},
])
def test_malformed_certificates_fail_closed(broken):
    res = verify_certificate(broken)
    assert not res.ok
    assert res.errors()


def test_wrong_dimension_axes_mismatch(golden_univariate):
    cert = _clone(golden_univariate.certificate)
    cert["n"] = 2
    res = verify_certificate(cert)
    assert not res.ok


def test_truncated_certificate_fails_closed(golden_univariate):
    cert = _clone(golden_univariate.certificate)
    del cert["block"]
    assert not verify_certificate(cert).ok


def test_corrupt_rational_fails_closed(golden_univariate):
    cert = _clone(golden_univariate.certificate)
    key = next(iter(cert["block"]["lambdas"]))
    cert["block"]["lambdas"][key] = "one half"
    assert not verify_certificate(cert).ok
