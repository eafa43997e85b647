"""
Set-of-Large-Values constructions with exact rational bookkeeping.

A cluster C of elements of S_A with a scale Q (no member divides Q) yields
Γ(C, ρ) = {ξ : dist(ξ, (1/Q)Z) < ρ/2}. For 0 < ρ < 1/(QT) the difference set
Γ - Γ stays a positive distance away from every zero b/s of Φ_s, s ∈ C, and
|[0, 1] ∩ Γ| = Qρ. Clusters are combined by translating and intersecting.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from cyclo_slv.core import (
    DEFAULT_GUARDS,
    ScaleGuards,
    check_prime,
    format_rational,
    lcm_all,
    parse_rational,
    valuation,
)
from cyclo_slv.cyclo import DivisorProfile, IntPolynomial, build_profile, cyclotomic_poly
from cyclo_slv.exceptions import FalsificationError, PreconditionError
from cyclo_slv.intervals import IntervalUnion, PeriodicSet, best_shift
from cyclo_slv.multiset import Multiset
from utils.constants import DEFAULT_PHI_SAMPLES

logger = logging.getLogger(__name__)

MAX_PHI_SAMPLES = 2 ** 22


def sigma_set(members: Sequence[int]) -> List[Fraction]:
    """All b/s in [0, 1) with gcd(b, s) = 1 for s in members, sorted"""
    points = set()
    for s in members:
        if s < 2:
            raise PreconditionError(f"zero sets are defined for s >= 2, got {s}")
        points.update(Fraction(b, s) for b in range(1, s) if math.gcd(b, s) == 1)
    return sorted(points)


def circle_distance(x: Fraction, y: Fraction) -> Fraction:
    """Distance between x and y on R/Z"""
    d = (x - y) % 1
    return min(d, 1 - d)


@dataclass(frozen=True)
class PeriodicIntervalSet:
    """
    Period-1 union of open intervals of equal halfwidth around rational centers.

    Attributes:
        centers: Sorted distinct centers in [0, 1)
        halfwidth: Common halfwidth
    """
    centers: Tuple[Fraction, ...]
    halfwidth: Fraction

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(sorted({Fraction(c) % 1 for c in self.centers})))
        if self.halfwidth <= 0:
            raise PreconditionError(f"halfwidth must be positive, got {self.halfwidth}")

    @classmethod
    def lattice(cls, Q: int, halfwidth: Fraction) -> "PeriodicIntervalSet":
        """Intervals around (1/Q)Z"""
        return cls(tuple(Fraction(k, Q) for k in range(Q)), Fraction(halfwidth))

    @property
    def lattice_size(self) -> Optional[int]:
        Q = len(self.centers)
        if all(c == Fraction(k, Q) for k, c in enumerate(self.centers)):
            return Q
        return None

    def to_periodic(self) -> PeriodicSet:
        h = self.halfwidth
        return PeriodicSet.from_intervals(Fraction(1), ((c - h, c + h) for c in self.centers))

    def measure(self) -> Fraction:
        """|[0, 1] ∩ Γ|, by merged-interval sweep"""
        return self.to_periodic().unit_measure()

    def translate(self, tau: Fraction) -> "PeriodicIntervalSet":
        return PeriodicIntervalSet(tuple(c + tau for c in self.centers), self.halfwidth)

    def difference_set(self, guards: ScaleGuards = DEFAULT_GUARDS) -> "PeriodicIntervalSet":
        """Γ - Γ: pairwise center differences with doubled halfwidth"""
        if self.lattice_size is not None:
            return PeriodicIntervalSet(self.centers, 2 * self.halfwidth)
        guards.check("center differences", len(self.centers) ** 2, "max_intervals")
        diffs = {(a - b) % 1 for a in self.centers for b in self.centers}
        return PeriodicIntervalSet(tuple(diffs), 2 * self.halfwidth)

    def to_json(self) -> Dict[str, Any]:
        return {
            "centers": [format_rational(c) for c in self.centers],
            "halfwidth": format_rational(self.halfwidth),
        }


def verify_separation(
    gamma: PeriodicIntervalSet,
    sigma: Sequence[Fraction],
    guards: ScaleGuards = DEFAULT_GUARDS
) -> Fraction:
    """
    Exact distance from the points of Σ to Γ - Γ (0 when they meet).

    Args:
        gamma: A periodic interval set
        sigma: Rational points

    Returns:
        min over σ of max(0, dist(σ, centers of Γ - Γ) - halfwidth of Γ - Γ)
    """
    if not sigma:
        raise PreconditionError("separation against an empty point set is undefined")
    diff = gamma.difference_set(guards)
    if diff.halfwidth >= Fraction(1, 2):
        return Fraction(0)
    Q = diff.lattice_size
    best: Optional[Fraction] = None
    for s in sigma:
        if Q is not None:
            frac = (s * Q) % 1
            d = min(frac, 1 - frac) / Q
        else:
            d = min(circle_distance(s, c) for c in diff.centers)
        if best is None or d < best:
            best = d
    return max(Fraction(0), best - diff.halfwidth)


@dataclass(frozen=True)
class Cluster:
    """
    A group of elements of S_A sharing one scale Q.

    Attributes:
        members: Sorted elements s_j
        Q: Scale; no member may divide Q
        prime: The prime whose exponent defines the cluster, if any
    """
    members: Tuple[int, ...]
    Q: int
    prime: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))
        if not self.members:
            raise PreconditionError("a cluster needs at least one member")
        if self.Q < 1:
            raise PreconditionError(f"Q must be positive, got {self.Q}")

    def r(self, s: int) -> int:
        return math.gcd(s, self.Q)

    def t(self, s: int) -> int:
        return s // self.r(s)

    @property
    def T(self) -> int:
        return max(self.t(s) for s in self.members)

    def is_separable(self) -> bool:
        """No member divides Q"""
        return all(self.Q % s for s in self.members)

    def to_json(self) -> Dict[str, Any]:
        return {"members": list(self.members), "Q": self.Q, "T": self.T, "prime": self.prime}


def rho_ceiling(cluster: Cluster) -> Fraction:
    return Fraction(1, cluster.Q * cluster.T)


def default_rho(cluster: Cluster, floor: Optional[Fraction] = None) -> Fraction:
    """
    ρ = (1/(QT)) (1 - 1/(2QT)), moved toward the ceiling when Qρ must exceed ``floor``.
    """
    QT = cluster.Q * cluster.T
    rho = Fraction(1, QT) * (1 - Fraction(1, 2 * QT))
    if floor is not None and cluster.Q * rho <= floor:
        rho = (Fraction(floor) / cluster.Q + Fraction(1, QT)) / 2
    return rho


def build_cluster_gamma(
    cluster: Cluster,
    rho: Optional[Fraction] = None,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> PeriodicIntervalSet:
    """
    Γ(C, ρ) with both properties checked exactly.

    Args:
        cluster: Separable cluster
        rho: Width with 0 < ρ < 1/(QT); defaults to ``default_rho``

    Returns:
        PeriodicIntervalSet with measure Qρ and positive separation from Σ(C)
    """
    if not cluster.is_separable():
        raise PreconditionError(f"some member of {list(cluster.members)} divides Q = {cluster.Q}")
    rho = default_rho(cluster) if rho is None else Fraction(rho)
    if not 0 < rho < rho_ceiling(cluster):
        raise PreconditionError(f"rho = {rho} is outside (0, 1/(QT)) = (0, {rho_ceiling(cluster)})")
    guards.check("cluster scale Q", cluster.Q, "max_intervals")
    gamma = PeriodicIntervalSet.lattice(cluster.Q, rho / 2)
    measure = gamma.measure()
    if measure != cluster.Q * rho:
        raise FalsificationError(f"measure {measure} differs from Q rho = {cluster.Q * rho}")
    separation = verify_separation(gamma, sigma_set(cluster.members), guards)
    if separation <= 0:
        raise FalsificationError(
            "cluster set difference meets a zero of the bad factor",
            {"cluster": cluster.to_json(), "rho": format_rational(rho)}
        )
    logger.debug(f"cluster {list(cluster.members)}: Q = {cluster.Q}, T = {cluster.T}, measure {measure}")
    return gamma


def split_clusters(profile: DivisorProfile, p: int) -> List[Cluster]:
    """
    One cluster per exponent α of p across S_A, with Q = p^{α-1} lcm(q-parts).

    Every member s = p^α m then has t = s / gcd(s, Q) = p.

    Raises:
        PreconditionError: some s in S_A is not divisible by p
    """
    check_prime(p)
    if not profile.S_A:
        raise PreconditionError("S_A is empty")
    if not profile.divides_all(p):
        raise PreconditionError(f"p = {p} does not divide every element of S_A = {list(profile.S_A)}")
    groups: Dict[int, List[int]] = {}
    for s in profile.S_A:
        groups.setdefault(valuation(s, p), []).append(s)
    clusters = []
    for alpha in sorted(groups):
        members = groups[alpha]
        Q = p ** (alpha - 1) * lcm_all(s // p ** alpha for s in members)
        cluster = Cluster(tuple(members), Q, p)
        if any(cluster.t(s) != p for s in members):
            raise FalsificationError(f"cluster {members} has some t_j != {p}", cluster.to_json())
        clusters.append(cluster)
    return clusters


def choose_lambda(p: int, E: int, cardinality: int) -> Fraction:
    """
    λ = (1/p)(1 - 1/k) for the smallest k >= 2 with 1/|A| < λ^E < p^{-E}.
    """
    if p ** E >= cardinality:
        raise PreconditionError(f"p^E = {p ** E} is not below |A| = {cardinality}")
    k = 2
    while (Fraction(1, p) * (1 - Fraction(1, k))) ** E * cardinality <= 1:
        k += 1
    return Fraction(1, p) * (1 - Fraction(1, k))


def intersect_translated(
    gammas: Sequence[Any],
    targets: Sequence[Fraction],
    guards: ScaleGuards = DEFAULT_GUARDS
) -> Tuple[List[Fraction], PeriodicSet, Fraction]:
    """
    Translate and intersect period-1 sets so the result beats ∏ λ_l.

    τ_1 = 0; each next τ_l maximizes the measure of the running intersection
    with Γ_l + τ_l, which is at least the running measure times |Γ_l|.

    Args:
        gammas: PeriodicIntervalSet or period-1 PeriodicSet values
        targets: λ_l with λ_l < |[0, 1] ∩ Γ_l|

    Returns:
        (taus, intersection, measure) with measure > ∏ λ_l
    """
    if len(gammas) != len(targets) or not gammas:
        raise PreconditionError("need one target per set and at least one set")
    sets = [g.to_periodic() if isinstance(g, PeriodicIntervalSet) else g for g in gammas]
    for g, lam in zip(sets, targets):
        if g.period != 1:
            raise PreconditionError("translated intersections need period-1 sets")
        if not Fraction(lam) < g.density():
            raise PreconditionError(f"target {lam} is not below the measure {g.density()}")
    taus = [Fraction(0)]
    current = sets[0].base
    for g in sets[1:]:
        tau, value = best_shift(current, g, guards)
        current = current.intersect(g.shift(tau).base)
        if current.measure() != value:
            raise FalsificationError(f"intersection measure {current.measure()} differs from sweep value {value}")
        taus.append(tau)
    measure = current.measure()
    target = math.prod(Fraction(t) for t in targets)
    if not measure > target:
        raise FalsificationError(f"intersection measure {measure} does not exceed {target}")
    logger.info(f"translated intersection of {len(sets)} sets: measure {measure} > {target}")
    return taus, PeriodicSet(Fraction(1), current), measure


@dataclass(frozen=True)
class ClusterRecord:
    """One cluster of a certificate with its width, translation and target"""
    cluster: Cluster
    rho: Fraction
    tau: Fraction
    lam: Fraction
    measure: Fraction
    separation: Fraction

    def gamma(self) -> PeriodicIntervalSet:
        return PeriodicIntervalSet.lattice(self.cluster.Q, self.rho / 2)

    def to_json(self) -> Dict[str, Any]:
        return {
            "prime": self.cluster.prime,
            "members": list(self.cluster.members),
            "Q": self.cluster.Q,
            "T": self.cluster.T,
            "rho": format_rational(self.rho),
            "tau": format_rational(self.tau),
            "lambda": format_rational(self.lam),
            "measure": format_rational(self.measure),
            "separation": format_rational(self.separation),
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "ClusterRecord":
        try:
            cluster = Cluster(tuple(int(s) for s in data["members"]), int(data["Q"]),
                              None if data.get("prime") is None else int(data["prime"]))
            return cls(
                cluster=cluster,
                rho=parse_rational(data["rho"]),
                tau=parse_rational(data["tau"]),
                lam=parse_rational(data["lambda"]),
                measure=parse_rational(data["measure"]),
                separation=parse_rational(data["separation"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise PreconditionError(f"malformed cluster record: {e}") from e


@dataclass(frozen=True)
class SlvCertificate:
    """
    Γ_A together with everything needed to re-check it.

    Attributes:
        cardinality: |A|
        L: Copriming modulus of the profile
        S_A: The bad divisors
        prime: Cluster prime p_i (None for a manual prime partition)
        clusters: Per-cluster records
        measure: |[0, 1] ∩ Γ_A|
        separation: Lower bound on dist(Γ_A - Γ_A, Σ_A)
        multiset: The source multiset, when embedded
        gamma: Γ_A itself
    """
    cardinality: int
    L: int
    S_A: Tuple[int, ...]
    prime: Optional[int]
    clusters: Tuple[ClusterRecord, ...]
    measure: Fraction
    separation: Fraction
    multiset: Optional[Multiset] = None
    gamma: Optional[PeriodicSet] = field(default=None, compare=False, repr=False)

    @property
    def E(self) -> int:
        return len(self.clusters)

    @property
    def target(self) -> Fraction:
        return math.prod((r.lam for r in self.clusters), start=Fraction(1))

    @property
    def lam(self) -> Optional[Fraction]:
        lams = {r.lam for r in self.clusters}
        return lams.pop() if len(lams) == 1 else None

    def sigma(self) -> List[Fraction]:
        return sigma_set(self.S_A)

    def rebuild_gamma(self, guards: ScaleGuards = DEFAULT_GUARDS) -> PeriodicSet:
        """The intersection of the recorded translated cluster sets"""
        current: Optional[IntervalUnion] = None
        for record in self.clusters:
            piece = record.gamma().to_periodic().shift(record.tau).base
            current = piece if current is None else current.intersect(piece)
        return PeriodicSet(Fraction(1), current if current is not None else IntervalUnion())


def select_prime(profile: DivisorProfile) -> Tuple[int, int]:
    """
    The cluster prime: p | s for all s in S_A and p^{E_p} < |A|, minimizing p^{E_p}.
    """
    candidates = [
        (p ** profile.E(p), p) for p in profile.primes
        if profile.divides_all(p) and p ** profile.E(p) < profile.cardinality
    ]
    if not candidates:
        raise PreconditionError(f"no prime p divides all of S_A = {list(profile.S_A)} with p^E_p < |A|")
    _, p = min(candidates)
    return p, profile.E(p)


def _certify(
    clusters: Sequence[Cluster],
    lambdas: Sequence[Fraction],
    profile: DivisorProfile,
    prime: Optional[int],
    A: Optional[Multiset],
    guards: ScaleGuards
) -> SlvCertificate:
    gammas, rhos, separations = [], [], []
    for cluster, lam in zip(clusters, lambdas):
        rho = default_rho(cluster, floor=lam)
        gamma = build_cluster_gamma(cluster, rho, guards)
        gammas.append(gamma)
        rhos.append(rho)
        separations.append(verify_separation(gamma, sigma_set(cluster.members), guards))
    taus, intersection, measure = intersect_translated(gammas, lambdas, guards)
    records = tuple(
        ClusterRecord(cluster, rho, tau, Fraction(lam), gamma.measure(), sep)
        for cluster, rho, tau, lam, gamma, sep in zip(clusters, rhos, taus, lambdas, gammas, separations)
    )
    certificate = SlvCertificate(
        cardinality=profile.cardinality,
        L=profile.L,
        S_A=profile.S_A,
        prime=prime,
        clusters=records,
        measure=measure,
        separation=min(separations),
        multiset=A,
        gamma=intersection,
    )
    logger.info(
        f"SLV certificate: {len(records)} clusters, measure {measure} > target {certificate.target}, "
        f"separation {certificate.separation}"
    )
    return certificate


def build_gamma_A(
    A: Optional[Multiset],
    profile: DivisorProfile,
    p: Optional[int] = None,
    lam: Optional[Fraction] = None,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> SlvCertificate:
    """
    Build Γ_A for a profile whose elements share the prime p.

    Args:
        A: Source multiset to embed in the certificate (optional)
        profile: Divisor profile, S_A nonempty
        p: Cluster prime; chosen by ``select_prime`` when omitted
        lam: 0 < λ < 1/p; chosen by ``choose_lambda`` when omitted

    Returns:
        SlvCertificate with measure > λ^{E_p} and positive separation
    """
    if not profile.S_A:
        raise PreconditionError("S_A is empty, so every set is an SLV set")
    if p is None:
        p, E = select_prime(profile)
    else:
        check_prime(p)
        E = profile.E(p)
    if lam is None:
        lam = choose_lambda(p, E, profile.cardinality)
    lam = Fraction(lam)
    if not 0 < lam < Fraction(1, p):
        raise PreconditionError(f"lambda = {lam} must lie in (0, 1/{p})")
    clusters = split_clusters(profile, p)
    return _certify(clusters, [lam] * len(clusters), profile, p, A, guards)


def split_by_prime_partition(
    A: Optional[Multiset],
    profile: DivisorProfile,
    primes: Sequence[int],
    lambdas: Optional[Dict[int, Fraction]] = None,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> SlvCertificate:
    """
    Manual split of S_A: each s goes to the first listed prime dividing it,
    each part is clustered by that prime, and all clusters are intersected.

    No lower bound on |A| backs the resulting target.
    """
    parts: Dict[int, List[int]] = {p: [] for p in primes}
    for s in profile.S_A:
        owner = next((p for p in primes if s % p == 0), None)
        if owner is None:
            raise PreconditionError(f"no listed prime divides s = {s}")
        parts[owner].append(s)
    lambdas = lambdas or {}
    clusters: List[Cluster] = []
    lams: List[Fraction] = []
    for p, members in parts.items():
        if not members:
            continue
        part_profile = build_profile(profile.cardinality, profile.L, profile.modulus, members)
        lam = Fraction(lambdas.get(p, Fraction(3, 4 * p)))
        if not 0 < lam < Fraction(1, p):
            raise PreconditionError(f"lambda = {lam} must lie in (0, 1/{p})")
        for cluster in split_clusters(part_profile, p):
            clusters.append(cluster)
            lams.append(lam)
    return _certify(clusters, lams, profile, None, A, guards)


@dataclass(frozen=True)
class NaiveClusterReport:
    """Best possible measure of Γ(S_A, ρ) at a fixed scale Q"""
    Q: int
    T: int
    rho_ceiling: Fraction
    measure_ceiling: Fraction
    cardinality: int

    @property
    def feasible(self) -> bool:
        return self.measure_ceiling > Fraction(1, self.cardinality)

    def to_json(self) -> Dict[str, Any]:
        return {
            "Q": self.Q,
            "T": self.T,
            "rho_ceiling": format_rational(self.rho_ceiling),
            "measure_ceiling": format_rational(self.measure_ceiling),
            "cardinality": self.cardinality,
            "feasible": self.feasible,
        }


def naive_single_cluster(profile: DivisorProfile, Q: int) -> NaiveClusterReport:
    """
    Put all of S_A in one cluster at scale Q.

    The measure Qρ stays below Q/(QT) = 1/T; when 1/T <= 1/|A| no choice of
    ρ can give a useful set.
    """
    cluster = Cluster(profile.S_A, Q)
    if not cluster.is_separable():
        raise PreconditionError(f"some element of S_A divides Q = {Q}")
    ceiling = rho_ceiling(cluster)
    return NaiveClusterReport(Q, cluster.T, ceiling, Q * ceiling, profile.cardinality)


def bad_factor_polynomial(S_A: Sequence[int]) -> IntPolynomial:
    """A'' = ∏ Φ_s over s in S_A"""
    poly = IntPolynomial((1,))
    for s in S_A:
        poly = poly * cyclotomic_poly(s)
    return poly


def _admissible_windows(sigma: Sequence[Fraction], delta: Fraction) -> List[Tuple[float, float]]:
    windows = []
    for i, s in enumerate(sigma):
        nxt = sigma[i + 1] if i + 1 < len(sigma) else sigma[0] + 1
        lo, hi = s + delta, nxt - delta
        if lo <= hi:
            windows.append((float(lo), float(hi)))
    return windows


def bad_factor_lower_bound(
    S_A: Sequence[int],
    separation: Fraction,
    samples: int = DEFAULT_PHI_SAMPLES,
    max_samples: int = MAX_PHI_SAMPLES
) -> float:
    """
    Lower bound c_A for |A''(e^{2πiξ})| on {ξ : dist(ξ, Σ_A) >= separation}.

    The minimum over a grid of spacing h is reduced by the Lipschitz margin
    π h Σ k|a_k|; the grid is refined until the bound is positive.

    Returns:
        A positive lower bound (1.0 when S_A is empty)
    """
    if not S_A:
        return 1.0
    if separation <= 0:
        raise PreconditionError("separation must be positive")
    poly = bad_factor_polynomial(S_A)
    coeffs = np.asarray(poly.coefficients[::-1], dtype=np.float64)
    lipschitz = 2 * math.pi * sum(k * abs(c) for k, c in enumerate(poly.coefficients))
    windows = _admissible_windows(sigma_set(S_A), Fraction(separation))
    if not windows:
        raise PreconditionError("no point lies at the requested distance from Σ_A")
    total = sum(hi - lo for lo, hi in windows)
    n = max(samples, 2)
    while n <= max_samples:
        h = max(total / n, 1e-300)
        xs = np.concatenate([
            np.linspace(lo, hi, max(2, int(math.ceil((hi - lo) / h)) + 1)) for lo, hi in windows
        ])
        values = np.abs(np.polyval(coeffs, np.exp(2j * np.pi * xs)))
        bound = float(values.min()) - lipschitz * h / 2
        if bound > 0:
            logger.debug(f"bad factor bound {bound:.3e} from {xs.size} samples")
            return bound
        n *= 2
    raise PreconditionError(f"could not certify a positive bound with {max_samples} samples")


@dataclass(frozen=True)
class MultiscaleResult:
    """Outcome of the multiscale intersection"""
    m: int
    t: Fraction
    L: int
    R: int
    epsilon: Fraction
    taus_A: Tuple[Fraction, ...]
    taus_B: Tuple[Fraction, ...]
    nu_A: Fraction
    nu_B: Fraction
    measure: Fraction
    factor: Fraction
    feasible: bool
    c: Optional[float] = None
    gamma: Optional[IntervalUnion] = field(default=None, compare=False, repr=False)

    @property
    def bound(self) -> Fraction:
        return (self.factor * self.nu_A * self.nu_B) ** self.m

    @property
    def C_1(self) -> Optional[float]:
        if self.c is None:
            return None
        return 2 * math.log(1 / self.c) / math.log(self.L)

    def to_json(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "t": format_rational(self.t),
            "L": self.L,
            "R": self.R,
            "epsilon": format_rational(self.epsilon),
            "taus_A": [format_rational(x) for x in self.taus_A],
            "taus_B": [format_rational(x) for x in self.taus_B],
            "nu_A": format_rational(self.nu_A),
            "nu_B": format_rational(self.nu_B),
            "measure": format_rational(self.measure),
            "bound": format_rational(self.bound),
            "feasible": self.feasible,
            "c": self.c,
            "C_1": self.C_1,
        }


def _size_factor(R: int, t: Fraction) -> Fraction:
    return Fraction(R - 1, R) * (R - 1 / t) / R


def _meets_size_target(x: Fraction, L: int, epsilon: Fraction) -> bool:
    # x >= L^{-(1 - ε)} with ε = a/b  <=>  x^b L^{b - a} >= 1
    a, b = epsilon.numerator, epsilon.denominator
    return x ** b * Fraction(L) ** (b - a) >= 1


def choose_R(nu: Fraction, t: Fraction, L: int, epsilon: Fraction) -> int:
    """
    Smallest integer R > 1/t with ((R-1)(R-1/t)/R^2) ν >= L^{-(1-ε)}.

    Raises:
        PreconditionError: ν itself does not exceed L^{-(1-ε)}
    """
    a, b = epsilon.numerator, epsilon.denominator
    if nu ** b * Fraction(L) ** (b - a) <= 1:
        raise PreconditionError(f"nu_A nu_B = {nu} does not exceed L^-(1-eps) for L = {L}, eps = {epsilon}")
    low = math.floor(1 / t) + 1
    high = low
    while not _meets_size_target(_size_factor(high, t) * nu, L, epsilon):
        high *= 2
    while low < high:
        mid = (low + high) // 2
        if _meets_size_target(_size_factor(mid, t) * nu, L, epsilon):
            high = mid
        else:
            low = mid + 1
    return low


def multiscale_gamma(
    cert_A: SlvCertificate,
    cert_B: SlvCertificate,
    t: Fraction,
    m: int,
    L: int,
    R: Optional[int] = None,
    epsilon: Fraction = Fraction(1, 2),
    samples: Optional[int] = None,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> MultiscaleResult:
    """
    Intersect (L^{-k} Γ_A - τ_{k,A}) and (t^{-1} L^{-k} Γ_B - τ_{k,B}) for k < m on [0, 1].

    Each translation is searched over one period of the scaled set and is
    chosen to maximize the running intersection, so the final measure is at
    least (ν_A ν_B)^m, which dominates the stated bound.

    Args:
        cert_A, cert_B: Single-scale certificates with ν_A > 1/|A|, ν_B > 1/|B|
        t: Rational in [1/2, 1]
        m: Number of scales
        L: Scale factor
        R: Integer R > 1/t; chosen by ``choose_R`` when omitted
        epsilon: Rational in (0, 1) for the size target L^{-(1-ε)}
        samples: When given, also compute c = min(c_A, c_B) by sampling

    Returns:
        MultiscaleResult
    """
    t = Fraction(t)
    epsilon = Fraction(epsilon)
    if not Fraction(1, 2) <= t <= 1:
        raise PreconditionError(f"t = {t} must lie in [1/2, 1]")
    if m < 1 or L < 2:
        raise PreconditionError(f"need m >= 1 and L >= 2, got m = {m}, L = {L}")
    if not 0 < epsilon < 1:
        raise PreconditionError(f"epsilon = {epsilon} must lie in (0, 1)")
    nu_A, nu_B = cert_A.measure, cert_B.measure
    if not (nu_A * cert_A.cardinality > 1 and nu_B * cert_B.cardinality > 1):
        raise PreconditionError("certificate measures must exceed 1/|A| and 1/|B|")
    for cert in (cert_A, cert_B):
        if cert.gamma is None:
            raise PreconditionError("certificate carries no set")
    nu = nu_A * nu_B
    if R is None:
        R = choose_R(nu, t, L, epsilon)
    elif not R > 1 / t:
        raise PreconditionError(f"R = {R} must exceed 1/t = {1 / t}")
    factor = _size_factor(R, t)
    feasible = _meets_size_target(factor * nu, L, epsilon)

    current = IntervalUnion(((Fraction(0), Fraction(1)),))
    taus_A, taus_B = [], []
    for k in range(m):
        scale = Fraction(1, L ** k)
        for cert, taus, stretch in ((cert_A, taus_A, Fraction(1)), (cert_B, taus_B, 1 / t)):
            scaled = cert.gamma.scale(scale * stretch)
            sigma, _ = best_shift(current, scaled, guards)
            current = current.intersect(scaled.shift(sigma).window(Fraction(0), Fraction(1), guards))
            taus.append((-sigma) % scaled.period)
    measure = current.measure()
    if measure < nu ** m:
        raise FalsificationError(f"multiscale measure {measure} is below (nu_A nu_B)^m = {nu ** m}")
    c = None
    if samples:
        c = min(
            bad_factor_lower_bound(cert_A.S_A, cert_A.separation, samples),
            bad_factor_lower_bound(cert_B.S_A, cert_B.separation, samples),
        )
    result = MultiscaleResult(
        m=m, t=t, L=L, R=R, epsilon=epsilon,
        taus_A=tuple(taus_A), taus_B=tuple(taus_B),
        nu_A=nu_A, nu_B=nu_B, measure=measure,
        factor=factor, feasible=feasible, c=c, gamma=current,
    )
    logger.info(f"multiscale set: m = {m}, R = {R}, measure {float(measure):.6g} >= bound {float(result.bound):.6g}")
    return result
