"""
Lower bounds on |A| as checkers with witnesses.

Each checker verifies its hypotheses, computes the claimed bound and returns
a BoundReport. A report that is not satisfied contradicts a proven statement;
``BoundReport.require_satisfied`` turns it into a FalsificationError.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from cyclo_slv.core import DEFAULT_GUARDS, ScaleGuards, check_prime, valuation
from cyclo_slv.cyclo import (
    Cuboid,
    DivisorProfile,
    cuboid_evaluations,
    divides_cyclotomic,
    first_nonvanishing_cuboid,
)
from cyclo_slv.exceptions import (
    CoprimalityError,
    DivisibilityError,
    FalsificationError,
    PreconditionError,
)
from cyclo_slv.multiset import Multiset
from utils.constants import SMALL_CARD_RANGE

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundReport:
    """
    Outcome of a lower-bound check.

    Attributes:
        name: Which bound was checked
        bound: The claimed lower bound
        cardinality: |A|
        witness: Nonvanishing cuboid backing the bound, when one is used
        witness_value: Its evaluation
        details: Bound-specific data (E_p, exponents, primes ...)
    """
    name: str
    bound: int
    cardinality: int
    witness: Optional[Cuboid] = None
    witness_value: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.cardinality >= self.bound

    def require_satisfied(self) -> "BoundReport":
        if not self.satisfied:
            raise FalsificationError(
                f"{self.name}: |A| = {self.cardinality} is below the bound {self.bound}",
                self.to_json()
            )
        return self

    def to_json(self) -> Dict[str, Any]:
        data = {
            "name": self.name,
            "bound": self.bound,
            "cardinality": self.cardinality,
            "satisfied": self.satisfied,
            "details": self.details,
        }
        if self.witness is not None:
            data["witness"] = self.witness.to_json()
            data["witness_value"] = self.witness_value
        return data


def lam_leung_check(k: int, primes: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """
    Represent k as a nonnegative combination sum a_j p_j.

    The search is depth first, trying the largest coefficient of each prime
    first, so the returned tuple favours the earlier primes.

    Args:
        k: Positive integer
        primes: Distinct primes

    Returns:
        Coefficients (a_1, ..., a_K) or None when k is not representable
    """
    if k < 1:
        raise PreconditionError(f"k must be positive, got {k}")
    if len(set(primes)) != len(primes):
        raise PreconditionError(f"primes must be distinct, got {list(primes)}")
    for p in primes:
        check_prime(p)

    def search(remaining: int, index: int) -> Optional[List[int]]:
        if index == len(primes):
            return [] if remaining == 0 else None
        p = primes[index]
        for a in range(remaining // p, -1, -1):
            rest = search(remaining - a * p, index + 1)
            if rest is not None:
                return [a] + rest
        return None

    found = search(k, 0)
    return tuple(found) if found is not None else None


def _require_nonnegative(A: Multiset) -> None:
    if A.is_empty() or not A.is_nonnegative():
        raise PreconditionError("a nonempty nonnegative multiset is required")


def two_prime_bound(A: Multiset, p: int, q: int, divisors: Sequence[int]) -> BoundReport:
    """
    Check |A| >= p^{E_p} for Phi_{m_1} ... Phi_{m_k} | A, m_j = p^{a_j} q^{b_j}.

    Args:
        A: Nonnegative multiset
        p: Prime whose exponents are counted
        q: The other prime; q must not divide |A|
        divisors: The m_j

    Returns:
        BoundReport with E_p and the distinct exponents in ``details``

    Raises:
        DivisibilityError: some Phi_{m_j} does not divide A
        CoprimalityError: q divides |A|
    """
    check_prime(p, "p")
    check_prime(q, "q")
    if p == q:
        raise PreconditionError("p and q must be distinct")
    _require_nonnegative(A)
    if not divisors:
        raise PreconditionError("at least one divisor m_j is required")
    for m in divisors:
        if m < 1 or m != p ** valuation(m, p) * q ** valuation(m, q):
            raise PreconditionError(f"m = {m} is not of the form p^a q^b for p = {p}, q = {q}")
    cardinality = A.total_weight()
    if cardinality % q == 0:
        raise CoprimalityError(f"q = {q} divides |A| = {cardinality}")
    for m in divisors:
        if not divides_cyclotomic(A, m):
            raise DivisibilityError(m)
    exponents = sorted({valuation(m, p) for m in divisors})
    report = BoundReport(
        name="two-prime",
        bound=p ** len(exponents),
        cardinality=cardinality,
        details={"p": p, "q": q, "E_p": len(exponents), "exponents": exponents, "divisors": list(divisors)},
    )
    logger.info(f"two-prime bound: |A| = {cardinality} >= {report.bound} (E_p = {len(exponents)})")
    return report


def two_prime_bound_from_profile(A: Multiset, profile: DivisorProfile, p: int) -> BoundReport:
    """two_prime_bound with m_j = S_A, for s_A with exactly two primes"""
    primes = profile.primes
    if len(primes) != 2 or p not in primes:
        raise PreconditionError(f"s_A = {profile.s_A} must have exactly two primes including {p}")
    q = primes[1] if primes[0] == p else primes[0]
    return two_prime_bound(A, p, q, profile.S_A)


def _check_exponents(exponents: Sequence[int]) -> List[int]:
    exps = list(exponents)
    if any(a < 1 for a in exps) or any(b <= a for a, b in zip(exps, exps[1:])):
        raise PreconditionError(f"exponents must satisfy 1 <= a_1 < ... < a_l, got {exps}")
    return exps


def _check_cuboid_order_hypotheses(A: Multiset, m0: int, p: int, exponents: Sequence[int]) -> List[int]:
    check_prime(p, "p")
    exps = _check_exponents(exponents)
    if m0 < 1 or m0 % p == 0:
        raise PreconditionError(f"m0 = {m0} must be a positive integer coprime to p = {p}")
    top = m0 * p ** (exps[-1] if exps else 0)
    if A.modulus % top != 0:
        raise PreconditionError(f"m0 p^a_l = {top} does not divide the modulus {A.modulus}")
    for a in exps:
        if not divides_cyclotomic(A, m0 * p ** a):
            raise DivisibilityError(m0 * p ** a)
    return exps


def cuboid_order(
    A: Multiset,
    m0: int,
    p: int,
    exponents: Sequence[int],
    n_jobs: int = 1,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> bool:
    """
    Whether p^l divides every m0-cuboid evaluation of A.

    Args:
        A: Multiset in Z_M
        m0: Cuboid scale, coprime to p, with m0 p^{a_l} | M
        p: Prime
        exponents: 1 <= a_1 < ... < a_l with Phi_{m0 p^{a_j}} | A

    Returns:
        True when every evaluation is divisible by p^l (always the case
        under the hypotheses)
    """
    exps = _check_cuboid_order_hypotheses(A, m0, p, exponents)
    modulus = p ** len(exps)
    table, _ = cuboid_evaluations(A, m0, n_jobs=n_jobs, guards=guards)
    holds = not (table % modulus).any()
    logger.debug(f"cuboid order: m0 = {m0}, p^l = {modulus}, holds = {holds}")
    return holds


def cuboid_prime_power_bound(
    A: Multiset,
    m0: int,
    p: int,
    exponents: Sequence[int],
    n_jobs: int = 1,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> BoundReport:
    """
    |A| >= p^l from a nonvanishing m0-cuboid, when additionally Phi_{m0} does not divide A.
    """
    _require_nonnegative(A)
    exps = _check_cuboid_order_hypotheses(A, m0, p, exponents)
    if divides_cyclotomic(A, m0):
        raise PreconditionError(f"Phi_{m0} divides A, so no nonvanishing {m0}-cuboid exists")
    if not cuboid_order(A, m0, p, exps, n_jobs=n_jobs, guards=guards):
        raise FalsificationError(
            f"some {m0}-cuboid evaluation is not divisible by {p}^{len(exps)}",
            {"m0": m0, "p": p, "exponents": exps}
        )
    return _witnessed_report(A, m0, p ** len(exps), "cuboid-prime-power", {"m0": m0, "p": p, "exponents": exps},
                             n_jobs, guards)


def _witnessed_report(
    A: Multiset,
    m: int,
    bound: int,
    name: str,
    details: Dict[str, Any],
    n_jobs: int,
    guards: ScaleGuards
) -> BoundReport:
    found = first_nonvanishing_cuboid(A, m, n_jobs=n_jobs, guards=guards)
    if found is None:
        raise FalsificationError(f"Phi_{m} does not divide A but every {m}-cuboid vanishes", {"m": m})
    witness, value = found
    if value % bound != 0 or abs(value) < bound:
        raise FalsificationError(
            f"witness evaluation {value} is not a nonzero multiple of {bound}",
            {"m": m, "witness": witness.to_json(), "value": value}
        )
    report = BoundReport(
        name=name,
        bound=bound,
        cardinality=A.total_weight(),
        witness=witness,
        witness_value=value,
        details=details,
    )
    logger.info(f"{name} bound: |A| = {report.cardinality} >= {bound}, witness value {value}")
    return report


def multi_prime_bound(
    A: Multiset,
    m: int,
    primes: Sequence[int],
    n_jobs: int = 1,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> BoundReport:
    """
    Check A(1) >= p_1 ... p_I from Phi_{p_i m} | A and Phi_m not dividing A.

    The witness is the lexicographically first m-cuboid with a nonzero
    evaluation; that evaluation is a multiple of p_1 ... p_I.

    Args:
        A: Nonnegative multiset in Z_M with m p_1 ... p_I | M
        m: Base scale
        primes: Distinct primes p_i

    Returns:
        BoundReport carrying the witness cuboid
    """
    _require_nonnegative(A)
    if not primes or len(set(primes)) != len(primes):
        raise PreconditionError(f"primes must be distinct and nonempty, got {list(primes)}")
    for p in primes:
        check_prime(p)
    bound = math.prod(primes)
    if m < 1 or A.modulus % (m * bound) != 0:
        raise PreconditionError(f"m p_1...p_I = {m * bound} does not divide the modulus {A.modulus}")
    for p in primes:
        if not divides_cyclotomic(A, p * m):
            raise DivisibilityError(p * m)
    if divides_cyclotomic(A, m):
        raise PreconditionError(f"Phi_{m} divides A")
    return _witnessed_report(A, m, bound, "multi-prime", {"m": m, "primes": list(primes)}, n_jobs, guards)


# p_1 for each small cardinality: the larger fiber direction of a two-direction
# union, and 2 for |A| = 7 where every admissible structure has a 2-fiber
PREFERRED_SMALL_CARD_PRIME = {5: 3, 7: 2, 8: 5, 9: 5, 10: 7}


def small_card_candidates(A: Multiset, profile: DivisorProfile) -> List[Tuple[int, int]]:
    """
    Every prime p with p | s for all s in S_A, gcd(p, |A|) = 1 and p^{E_p} < |A|.

    Returns:
        (p, E_p) pairs sorted by p^{E_p}, then by p
    """
    cardinality = A.total_weight()
    candidates = []
    for p in profile.primes:
        if not profile.divides_all(p) or cardinality % p == 0:
            continue
        E = profile.E(p)
        if p ** E < cardinality:
            candidates.append((p, E))
    return sorted(candidates, key=lambda pe: (pe[0] ** pe[1], pe[0]))


def small_card_split(A: Multiset, profile: DivisorProfile, strict: bool = True) -> Optional[int]:
    """
    Find p_1 with p_1 | s for all s in S_A, p_1 coprime to |A| and p_1^{E_1} < |A|.

    For 2 <= |A| <= 10 such a prime always exists; its absence there raises
    a FalsificationError.

    Args:
        A: Nonnegative multiset
        profile: Its divisor profile, S_A nonempty
        strict: Reject cardinalities outside the small range

    Returns:
        The preferred prime for |A| when it qualifies, else the largest
        qualifying prime; None when none exists (only possible outside the
        small range)
    """
    _require_nonnegative(A)
    if not profile.S_A:
        raise PreconditionError("S_A is empty")
    cardinality = A.total_weight()
    low, high = SMALL_CARD_RANGE
    in_range = low <= cardinality <= high
    if strict and not in_range:
        raise PreconditionError(f"|A| = {cardinality} is outside [{low}, {high}]")
    candidates = dict(small_card_candidates(A, profile))
    if candidates:
        preferred = PREFERRED_SMALL_CARD_PRIME.get(cardinality)
        p = preferred if preferred in candidates else max(candidates)
        E = candidates[p]
        logger.info(f"small-cardinality split: p_1 = {p}, E_1 = {E}, {p ** E} < {cardinality}")
        return p
    if in_range:
        raise FalsificationError(
            f"no prime p_1 with p_1^E_1 < |A| = {cardinality}",
            {"S_A": list(profile.S_A), "cardinality": cardinality}
        )
    logger.info(f"small-cardinality split: no admissible prime for |A| = {cardinality}")
    return None
