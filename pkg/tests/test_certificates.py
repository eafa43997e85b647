import copy
import json

import pytest

from cyclo_slv.certificates import (
    certificate_from_json,
    certificate_to_json,
    digest,
    verify_certificate,
)
from cyclo_slv.cyclo import build_profile
from cyclo_slv.exceptions import PreconditionError
from cyclo_slv.multiset import Multiset
from cyclo_slv.slv import build_gamma_A, split_by_prime_partition


@pytest.fixture(scope="module")
def document(two_scale, two_scale_profile):
    cert = build_gamma_A(two_scale, two_scale_profile)
    return json.loads(json.dumps(certificate_to_json(cert)))


def _tampered(document, edit, redigest):
    doc = copy.deepcopy(document)
    edit(doc["payload"])
    if redigest:
        doc["digest"] = digest(doc["payload"])
    return doc


def test_round_trip(two_scale, two_scale_profile, document):
    cert = build_gamma_A(two_scale, two_scale_profile)
    parsed = certificate_from_json(document)
    assert parsed == cert
    assert parsed.gamma.base.measure() == cert.measure
    assert document["payload"]["lambda"] == "1/3"
    assert document["payload"]["target"] == "1/9"


def test_valid_certificate_verifies(document):
    result = verify_certificate(document)
    assert result.ok, result.errors
    assert result.beats_inverse_cardinality
    assert result.to_json()["measure"] == document["payload"]["measure"]


def test_manual_partition_certificate_verifies(two_scale_profile):
    cert = split_by_prime_partition(None, two_scale_profile, [3, 2])
    doc = certificate_to_json(cert)
    assert doc["payload"]["prime"] is None
    assert verify_certificate(doc).ok


def _bump_rho(payload):
    payload["clusters"][0]["rho"] = "1/100"


def _bump_measure(payload):
    payload["measure"] = "1/2"


def _bump_separation(payload):
    payload["separation"] = "1/7"


def _bump_target(payload):
    payload["target"] = "1/10"


def _drop_member(payload):
    payload["S_A"] = payload["S_A"][:-1]


def _swap_multiset(payload):
    payload["multiset"] = Multiset.delta(36).to_json()


@pytest.mark.parametrize("edit", [_bump_rho, _bump_measure, _bump_separation, _bump_target, _drop_member,
                                  _swap_multiset])
@pytest.mark.parametrize("redigest", [False, True])
def test_tampering_is_rejected(document, edit, redigest):
    result = verify_certificate(_tampered(document, edit, redigest))
    assert not result.ok
    digest_failed = any("digest" in e for e in result.errors)
    assert digest_failed != redigest


def test_digest_only_change_is_rejected(document):
    doc = copy.deepcopy(document)
    doc["digest"] = "0" * 64
    result = verify_certificate(doc)
    assert result.errors == ["digest does not match the payload"]


def test_wrong_kind_and_malformed_payloads(document):
    assert not verify_certificate({**document, "kind": "other"}).ok
    assert not verify_certificate({**document, "payload": None}).ok
    broken = _tampered(document, lambda p: p.pop("clusters"), True)
    assert not verify_certificate(broken).ok
    with pytest.raises(PreconditionError):
        certificate_from_json({"payload": {}})


def test_incomplete_divisor_set_is_rejected(two_scale):
    # 36 left out of S_A, so every listed s still divides A
    profile = build_profile(13, 13, 36, [6, 12, 18])
    doc = certificate_to_json(build_gamma_A(two_scale, profile))
    assert doc["digest"] == digest(doc["payload"])
    result = verify_certificate(doc)
    assert not result.ok
    assert result.errors == ["S_A omits [36], which divide the embedded multiset"]
