"""
SLV certificate serialization and independent verification.

A certificate file is a JSON object

    {"kind": "slv-certificate", "version": 1, "payload": {...}, "digest": "<sha256>"}

where the digest is taken over the canonical dump of the payload (sorted keys,
compact separators). Verification re-derives every claim from the payload
alone: it never rebuilds the divisor profile.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional

from cyclo_slv.core import divisors, format_rational, parse_rational
from cyclo_slv.cyclo import divides_cyclotomic
from cyclo_slv.exceptions import PreconditionError
from cyclo_slv.intervals import IntervalUnion, PeriodicSet
from cyclo_slv.multiset import Multiset
from cyclo_slv.slv import ClusterRecord, SlvCertificate
from utils.constants import CERTIFICATE_KIND, CERTIFICATE_VERSION

logger = logging.getLogger(__name__)


def canonical_dump(payload: Mapping[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def digest(payload: Mapping[str, Any]) -> str:
    """sha256 hex digest of the canonical payload"""
    return hashlib.sha256(canonical_dump(payload).encode("utf-8")).hexdigest()


def certificate_payload(cert: SlvCertificate) -> Dict[str, Any]:
    lam = cert.lam
    return {
        "cardinality": cert.cardinality,
        "L": cert.L,
        "S_A": list(cert.S_A),
        "prime": cert.prime,
        "E": cert.E,
        "lambda": None if lam is None else format_rational(lam),
        "target": format_rational(cert.target),
        "clusters": [record.to_json() for record in cert.clusters],
        "measure": format_rational(cert.measure),
        "separation": format_rational(cert.separation),
        "multiset": None if cert.multiset is None else cert.multiset.to_json(),
    }


def certificate_to_json(cert: SlvCertificate) -> Dict[str, Any]:
    payload = certificate_payload(cert)
    return {
        "kind": CERTIFICATE_KIND,
        "version": CERTIFICATE_VERSION,
        "payload": payload,
        "digest": digest(payload),
    }


def certificate_from_json(data: Mapping[str, Any]) -> SlvCertificate:
    """
    Parse a certificate document without verifying it.

    Raises:
        PreconditionError: the document is malformed
    """
    try:
        payload = data["payload"]
        clusters = tuple(ClusterRecord.from_json(c) for c in payload["clusters"])
        multiset = payload.get("multiset")
        cert = SlvCertificate(
            cardinality=int(payload["cardinality"]),
            L=int(payload["L"]),
            S_A=tuple(int(s) for s in payload["S_A"]),
            prime=None if payload.get("prime") is None else int(payload["prime"]),
            clusters=clusters,
            measure=parse_rational(payload["measure"]),
            separation=parse_rational(payload["separation"]),
            multiset=None if multiset is None else Multiset.from_json(multiset),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise PreconditionError(f"malformed certificate: {e}") from e
    return replace(cert, gamma=cert.rebuild_gamma())


@dataclass
class VerificationResult:
    """Outcome of an independent certificate check"""
    ok: bool = True
    errors: List[str] = field(default_factory=list)
    measure: Optional[Fraction] = None
    separation: Optional[Fraction] = None
    beats_inverse_cardinality: Optional[bool] = None

    def fail(self, message: str) -> None:
        self.ok = False
        self.errors.append(message)

    def to_json(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "errors": list(self.errors),
            "measure": None if self.measure is None else format_rational(self.measure),
            "separation": None if self.separation is None else format_rational(self.separation),
            "beats_inverse_cardinality": self.beats_inverse_cardinality,
        }


def _lattice_separation(members: List[int], Q: int, rho: Fraction) -> Fraction:
    # Γ - Γ for halfwidth ρ/2 around (1/Q)Z is the ρ-neighbourhood of (1/Q)Z
    best = None
    for s in members:
        for b in range(1, s):
            if math.gcd(b, s) != 1:
                continue
            frac = Fraction(b * Q, s) % 1
            d = min(frac, 1 - frac) / Q
            if best is None or d < best:
                best = d
    if best is None:
        return Fraction(0)
    return max(Fraction(0), best - rho)


def _check_cluster(index: int, data: Mapping[str, Any], result: VerificationResult) -> Optional[Dict[str, Any]]:
    label = f"cluster {index}"
    try:
        members = [int(s) for s in data["members"]]
        Q = int(data["Q"])
        T = int(data["T"])
        rho = parse_rational(data["rho"])
        tau = parse_rational(data["tau"])
        lam = parse_rational(data["lambda"])
        measure = parse_rational(data["measure"])
        separation = parse_rational(data["separation"])
    except (KeyError, TypeError, ValueError) as e:
        result.fail(f"{label}: malformed ({e})")
        return None
    if not members or Q < 1 or min(members) < 2:
        result.fail(f"{label}: needs members >= 2 and Q >= 1")
        return None
    if any(Q % s == 0 for s in members):
        result.fail(f"{label}: some member divides Q = {Q}")
    if T != max(s // math.gcd(s, Q) for s in members):
        result.fail(f"{label}: recorded T = {T} is wrong")
    if not 0 < rho < Fraction(1, Q * T):
        result.fail(f"{label}: rho = {rho} is outside (0, 1/(QT))")
    if measure != Q * rho:
        result.fail(f"{label}: measure {measure} differs from Q rho = {Q * rho}")
    if not 0 < lam < measure:
        result.fail(f"{label}: lambda = {lam} is not in (0, measure)")
    prime = data.get("prime")
    if prime is not None and any(s % int(prime) for s in members):
        result.fail(f"{label}: prime {prime} does not divide every member")
    recomputed = _lattice_separation(members, Q, rho)
    if recomputed != separation:
        result.fail(f"{label}: separation {separation} differs from recomputed {recomputed}")
    if recomputed <= 0:
        result.fail(f"{label}: the difference set meets a zero")
    return {"members": members, "Q": Q, "rho": rho, "tau": tau, "lambda": lam, "separation": recomputed}


def verify_certificate(data: Mapping[str, Any]) -> VerificationResult:
    """
    Re-check a certificate document exactly.

    Args:
        data: Parsed JSON document

    Returns:
        VerificationResult with ``ok`` and the list of failed checks
    """
    result = VerificationResult()
    if data.get("kind") != CERTIFICATE_KIND or data.get("version") != CERTIFICATE_VERSION:
        result.fail(f"unsupported certificate kind/version: {data.get('kind')}/{data.get('version')}")
        return result
    payload = data.get("payload")
    if not isinstance(payload, dict):
        result.fail("missing payload")
        return result
    if data.get("digest") != digest(payload):
        result.fail("digest does not match the payload")

    try:
        cardinality = int(payload["cardinality"])
        L = int(payload["L"])
        S_A = sorted(int(s) for s in payload["S_A"])
        target = parse_rational(payload["target"])
        claimed_measure = parse_rational(payload["measure"])
        claimed_separation = parse_rational(payload["separation"])
        raw_clusters = list(payload["clusters"])
    except (KeyError, TypeError, ValueError) as e:
        result.fail(f"malformed payload: {e}")
        return result

    clusters = [c for c in (_check_cluster(i, raw, result) for i, raw in enumerate(raw_clusters)) if c]
    if len(clusters) != len(raw_clusters):
        return result
    if not clusters:
        result.fail("certificate has no clusters")
        return result
    if int(payload.get("E", len(clusters))) != len(clusters):
        result.fail("E differs from the number of clusters")
    if sorted(s for c in clusters for s in c["members"]) != S_A:
        result.fail("clusters do not partition S_A")
    if any(math.gcd(s, L) != 1 for s in S_A):
        result.fail(f"some element of S_A is not coprime to L = {L}")

    product = math.prod((c["lambda"] for c in clusters), start=Fraction(1))
    if product != target:
        result.fail(f"target {target} differs from the product of lambdas {product}")

    current: Optional[IntervalUnion] = None
    for c in clusters:
        h = c["rho"] / 2
        piece = PeriodicSet.from_intervals(
            Fraction(1), ((Fraction(k, c["Q"]) + c["tau"] - h, Fraction(k, c["Q"]) + c["tau"] + h)
                          for k in range(c["Q"]))
        ).base
        current = piece if current is None else current.intersect(piece)
    measure = current.measure()
    result.measure = measure
    if measure != claimed_measure:
        result.fail(f"claimed measure {claimed_measure} differs from recomputed {measure}")
    if not measure > target:
        result.fail(f"measure {measure} does not exceed the target {target}")
    result.beats_inverse_cardinality = measure * cardinality > 1

    separation = min(c["separation"] for c in clusters)
    result.separation = separation
    if separation != claimed_separation:
        result.fail(f"claimed separation {claimed_separation} differs from recomputed {separation}")

    if payload.get("multiset") is not None:
        try:
            A = Multiset.from_json(payload["multiset"])
        except PreconditionError as e:
            result.fail(str(e))
        else:
            if A.total_weight() != cardinality:
                result.fail(f"embedded multiset has weight {A.total_weight()}, not {cardinality}")
            for s in S_A:
                if not divides_cyclotomic(A, s):
                    result.fail(f"Phi_{s} does not divide the embedded multiset")
            # S_A must be complete
            listed = set(S_A)
            missing = [
                s for s in divisors(A.modulus)
                if s > 1 and s not in listed and math.gcd(s, L) == 1 and divides_cyclotomic(A, s)
            ]
            if missing:
                result.fail(f"S_A omits {missing}, which divide the embedded multiset")

    logger.info(f"certificate verification: {'ok' if result.ok else f'{len(result.errors)} failures'}")
    return result
