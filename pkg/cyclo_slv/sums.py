"""
Vanishing sums of N-th roots of unity: enumeration, minimality and templates.

A nonnegative multiset A in Z_N is a vanishing sum exactly when Phi_N divides
its mask. The fiber remainder is a linear map into Z^{phi(N)} that vanishes
exactly on such masks, so sums of weight k are found by meeting two halves
with opposite remainders.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from cyclo_slv.bounds import lam_leung_check
from cyclo_slv.core import DEFAULT_GUARDS, ScaleGuards, check_prime, prime_factors
from cyclo_slv.cyclo import divides_cyclotomic, fiber_remainder
from cyclo_slv.exceptions import FalsificationError, PreconditionError
from cyclo_slv.multiset import Multiset, fiber
from utils.constants import DEFAULT_N_JOBS, SMALL_CARD_RANGE

logger = logging.getLogger(__name__)

# Templates are known to exhaust the minimal sums up to this weight
CLASSIFIED_WEIGHT = 10


@dataclass(frozen=True)
class MinimalTemplate:
    """R_p (a p-fiber) or (R_p:kR_q)"""
    p: int
    q: Optional[int] = None
    k: Optional[int] = None

    @property
    def kind(self) -> str:
        return "R_p" if self.q is None else "RpkRq"

    @property
    def expected_weight(self) -> int:
        if self.q is None:
            return self.p
        return self.p + self.k * self.q - 2 * self.k

    @property
    def label(self) -> str:
        if self.q is None:
            return f"R_{self.p}"
        return f"(R_{self.p}:{self.k}R_{self.q})"

    def to_json(self) -> Dict[str, Any]:
        return {"kind": self.kind, "p": self.p, "q": self.q, "k": self.k, "label": self.label}


@dataclass(frozen=True)
class VanishingSum:
    """A nonnegative multiset of Z_N whose mask is divisible by Phi_N"""
    multiset: Multiset

    def __post_init__(self):
        if self.multiset.is_empty() or not self.multiset.is_nonnegative():
            raise PreconditionError("a vanishing sum is a nonempty nonnegative multiset")
        if not divides_cyclotomic(self.multiset, self.modulus):
            raise PreconditionError(f"Phi_{self.modulus} does not divide {self.multiset!r}")

    @property
    def modulus(self) -> int:
        return self.multiset.modulus

    @property
    def weight(self) -> int:
        return self.multiset.total_weight()

    def residues(self) -> Tuple[int, ...]:
        return tuple(x for x, w in self.multiset.items for _ in range(w))

    def to_json(self) -> Dict[str, Any]:
        return {"N": self.modulus, "weight": self.weight, "residues": list(self.residues())}


def canonical_translate(A: Multiset) -> Multiset:
    """The lexicographically least translate of A that contains 0"""
    if A.is_empty():
        return A
    return min((A.translate(-x) for x in A.support()), key=lambda B: B.items)


def canonical_orbit(A: Multiset) -> Multiset:
    """Least canonical translate over all images u * A with u a unit of Z_N"""
    N = A.modulus
    images = (
        Multiset.from_weights(N, {u * x: w for x, w in A.items})
        for u in range(1, N) if math.gcd(u, N) == 1
    )
    return min((canonical_translate(B) for B in images), key=lambda B: B.items)


def construct_Rp(N: int, p: int, base: int = 0) -> VanishingSum:
    """The N-fiber x * F_p^N"""
    check_prime(p)
    return VanishingSum(fiber(N, p, base))


def construct_RpkRq(
    N: int,
    p: int,
    q: int,
    k: int,
    choices: Optional[Sequence[int]] = None,
    base: int = 0
) -> VanishingSum:
    """
    Build a configuration of type (R_p:kR_q).

    Start with the p-fiber through ``base``, cancel the points with the given
    fiber indices by subtracting their q-fibers, then repair each negative
    point with a 2-fiber through it.

    Args:
        N: Modulus with 2pq | N
        p, q: Distinct primes
        k: Number of replaced points, 1 <= k < p
        choices: Indices j of the points base + jN/p to replace (default 1..k)
        base: Starting point of the p-fiber

    Returns:
        VanishingSum of weight p + kq - 2k
    """
    check_prime(p)
    check_prime(q, "q")
    if p == q:
        raise PreconditionError("p and q must be distinct")
    if N % (2 * p * q):
        raise PreconditionError(f"2pq = {2 * p * q} does not divide N = {N}")
    if not 1 <= k < p:
        raise PreconditionError(f"k must satisfy 1 <= k < p, got k = {k}")
    choices = tuple(range(1, k + 1)) if choices is None else tuple(choices)
    if len(choices) != k or len(set(choices)) != k or any(not 0 <= j < p for j in choices):
        raise PreconditionError(f"need {k} distinct fiber indices in [0, {p}), got {list(choices)}")
    A = fiber(N, p, base)
    for j in choices:
        x = base + j * (N // p)
        A = A - fiber(N, q, x)
        for l in range(1, q):
            A = A + fiber(N, 2, x + l * (N // q))
    if not A.is_nonnegative():
        raise PreconditionError(f"fiber choices {list(choices)} leave negative weights")
    return VanishingSum(A)


@lru_cache(maxsize=None)
def _template_forms(N: int, template: MinimalTemplate) -> FrozenSet[Tuple[Tuple[int, int], ...]]:
    if template.q is None:
        return frozenset({canonical_translate(fiber(N, template.p)).items})
    forms = set()
    for choices in itertools.combinations(range(template.p), template.k):
        try:
            v = construct_RpkRq(N, template.p, template.q, template.k, choices)
        except PreconditionError:
            continue
        forms.add(canonical_translate(v.multiset).items)
    return frozenset(forms)


def candidate_templates(N: int, weight: int) -> List[MinimalTemplate]:
    """Templates of the given weight instantiable in Z_N: R_p first, then larger p"""
    primes = prime_factors(N)
    out = [MinimalTemplate(p) for p in primes if p == weight]
    for p in sorted(primes, reverse=True):
        for q in primes:
            if q == p or N % (2 * p * q):
                continue
            for k in range(1, p):
                template = MinimalTemplate(p, q, k)
                if template.expected_weight == weight:
                    out.append(template)
    return out


def _proper_submultisets(A: Multiset, min_weight: int) -> Iterable[Multiset]:
    support = A.support()
    ranges = [range(w + 1) for _, w in A.items]
    total = A.total_weight()
    subs = []
    for choice in itertools.product(*ranges):
        weight = sum(choice)
        if min_weight <= weight < total:
            subs.append((weight, choice))
    subs.sort()
    for _, choice in subs:
        yield Multiset(A.modulus, tuple((x, c) for x, c in zip(support, choice) if c))


def find_vanishing_part(v: VanishingSum) -> Optional[Multiset]:
    """A nonempty proper sub-multiset that also vanishes, lightest first"""
    smallest = min(prime_factors(v.modulus)) if v.modulus > 1 else 1
    for sub in _proper_submultisets(v.multiset, smallest):
        if divides_cyclotomic(sub, v.modulus):
            return sub
    return None


def is_minimal(v: VanishingSum) -> bool:
    """Property (M): no nonempty proper sub-multiset vanishes"""
    return find_vanishing_part(v) is None


def decompose_minimal(v: VanishingSum) -> List[VanishingSum]:
    """Peel vanishing parts recursively into minimal sums"""
    part = find_vanishing_part(v)
    if part is None:
        return [v]
    return decompose_minimal(VanishingSum(part)) + decompose_minimal(VanishingSum(v.multiset - part))


def classify_minimal(v: VanishingSum) -> Optional[MinimalTemplate]:
    """
    Match a minimal vanishing sum against R_p and (R_p:kR_q), up to translation.

    Raises:
        PreconditionError: v is not minimal
    """
    if not is_minimal(v):
        raise PreconditionError("classification needs a minimal vanishing sum")
    form = canonical_translate(v.multiset).items
    for template in candidate_templates(v.modulus, v.weight):
        if form in _template_forms(v.modulus, template):
            return template
    return None


def _residue_vectors(N: int) -> np.ndarray:
    remainders = [fiber_remainder({x: 1}, N) for x in range(N)]
    basis = sorted({y for r in remainders for y in r})
    index = {y: i for i, y in enumerate(basis)}
    vectors = np.zeros((N, max(len(basis), 1)), dtype=np.int64)
    for x, r in enumerate(remainders):
        for y, w in r.items():
            vectors[x, index[y]] = w
    return vectors


def _half_table(N: int, length: int, vectors: np.ndarray, guards: ScaleGuards) -> Tuple[np.ndarray, np.ndarray]:
    count = math.comb(N + length - 1, length)
    guards.check("census half states", count, "census_max_states")
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros((1, vectors.shape[1]), dtype=np.int64)
    tuples = np.array(list(itertools.combinations_with_replacement(range(N), length)), dtype=np.int64)
    return tuples, vectors[tuples].sum(axis=1)


def _join_chunk(
    firsts: np.ndarray,
    first_sums: np.ndarray,
    index: Dict[bytes, List[Tuple[int, ...]]]
) -> List[Tuple[int, ...]]:
    found = []
    for row, total in zip(firsts, first_sums):
        last = int(row[-1])
        for second in index.get((-total).tobytes(), ()):
            if not second or second[0] >= last:
                found.append(tuple(int(x) for x in row) + second)
    return found


def enumerate_vanishing(
    N: int,
    k_max: int,
    up_to_translation: bool = True,
    up_to_units: bool = False,
    n_jobs: int = DEFAULT_N_JOBS,
    chunk_size: int = 2048,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> List[VanishingSum]:
    """
    All nonnegative multisets of Z_N with weight <= k_max and Phi_N | mask.

    Each sorted candidate x_1 <= ... <= x_k is split into a first half
    starting at 0 and a second half; the two halves must have opposite fiber
    remainders. Results are canonical translates unless ``up_to_translation``
    is False, in which case every translate is listed.

    Args:
        N: Modulus >= 2
        k_max: Largest weight
        up_to_translation: Return one canonical representative per class
        up_to_units: Also merge classes related by multiplication by units
        n_jobs: joblib workers for the join step

    Returns:
        VanishingSum values sorted by (weight, items)
    """
    if N < 2 or k_max < 1:
        raise PreconditionError(f"need N >= 2 and k_max >= 1, got N = {N}, k_max = {k_max}")
    guards.check("modulus", N, "max_dense_modulus")
    vectors = _residue_vectors(N)
    tables: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}

    def table(length: int) -> Tuple[np.ndarray, np.ndarray]:
        if length not in tables:
            tables[length] = _half_table(N, length, vectors, guards)
        return tables[length]

    forms = set()
    for k in range(2, k_max + 1):
        k1, k2 = (k + 1) // 2, k // 2
        rest, rest_sums = table(k1 - 1)
        firsts = np.hstack([np.zeros((rest.shape[0], 1), dtype=np.int64), rest])
        first_sums = rest_sums + vectors[0]
        seconds, second_sums = table(k2)
        index: Dict[bytes, List[Tuple[int, ...]]] = {}
        for row, total in zip(seconds, second_sums):
            index.setdefault(total.tobytes(), []).append(tuple(int(x) for x in row))
        chunks = [slice(i, i + chunk_size) for i in range(0, firsts.shape[0], chunk_size)]
        results = Parallel(n_jobs=n_jobs)(
            delayed(_join_chunk)(firsts[c], first_sums[c], index) for c in chunks
        )
        found = 0
        for chunk in results:
            for residues in chunk:
                A = canonical_translate(Multiset.from_residues(N, residues))
                if up_to_units:
                    A = canonical_orbit(A)
                forms.add(A.items)
                found += 1
        logger.debug(f"weight {k}: {found} raw matches")

    sums = [Multiset(N, items) for items in forms]
    if not up_to_translation:
        sums = list({A.translate(t).items: A.translate(t) for A in sums for t in range(N)}.values())
    result = sorted((VanishingSum(A) for A in sums), key=lambda v: (v.weight, v.multiset.items))
    logger.info(f"enumerated {len(result)} vanishing sums in Z_{N} up to weight {k_max}")
    return result


@dataclass(frozen=True)
class CensusEntry:
    """One enumerated sum with its minimality and template"""
    sum: VanishingSum
    minimal: bool
    template: Optional[MinimalTemplate]
    representation: Tuple[int, ...]

    @property
    def label(self) -> str:
        if not self.minimal:
            return "non-minimal"
        return self.template.label if self.template else "unclassified"

    def to_json(self) -> Dict[str, Any]:
        data = self.sum.to_json()
        data.update({
            "minimal": self.minimal,
            "template": None if self.template is None else self.template.label,
            "lam_leung": list(self.representation),
        })
        return data


def census(
    N: int,
    k_max: int,
    n_jobs: int = DEFAULT_N_JOBS,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> List[CensusEntry]:
    """
    Enumerate, test minimality and classify every vanishing sum up to k_max.

    Raises:
        FalsificationError: a weight is not a nonnegative combination of the
            primes of N, or a minimal sum of weight <= 10 matches no template
    """
    primes = list(prime_factors(N))
    entries = []
    for v in enumerate_vanishing(N, k_max, n_jobs=n_jobs, guards=guards):
        representation = lam_leung_check(v.weight, primes)
        if representation is None:
            raise FalsificationError(f"weight {v.weight} is not a combination of {primes}", v.to_json())
        minimal = is_minimal(v)
        template = classify_minimal(v) if minimal else None
        if minimal and template is None and v.weight <= CLASSIFIED_WEIGHT:
            raise FalsificationError("minimal vanishing sum matches no template", v.to_json())
        entries.append(CensusEntry(v, minimal, template, representation))
    return entries


def census_summary(entries: Iterable[CensusEntry]) -> Dict[Tuple[int, str], int]:
    """Counts keyed by (weight, template label or "non-minimal")"""
    counts: Dict[Tuple[int, str], int] = {}
    for entry in entries:
        key = (entry.sum.weight, entry.label)
        counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items()))


@dataclass(frozen=True)
class StructureDescriptor:
    """
    A union of fibers (prime, count) or a single (R_p:kR_q) configuration
    that a small vanishing set of the given cardinality can have.
    """
    cardinality: int
    fibers: Tuple[Tuple[int, int], ...] = ()
    template: Optional[MinimalTemplate] = None

    @property
    def primes(self) -> Tuple[int, ...]:
        if self.template is not None:
            return tuple(sorted({2, self.template.p, self.template.q}))
        return tuple(p for p, _ in self.fibers)

    @property
    def label(self) -> str:
        if self.template is not None:
            return self.template.label
        return " + ".join(f"{count}x F_{p}" for p, count in self.fibers)

    def admits(self, N: int) -> bool:
        if self.template is not None:
            return N % (2 * self.template.p * self.template.q) == 0
        return all(N % p == 0 for p in self.primes)

    def to_json(self) -> Dict[str, Any]:
        return {
            "cardinality": self.cardinality,
            "fibers": [list(f) for f in self.fibers],
            "template": None if self.template is None else self.template.to_json(),
            "label": self.label,
        }


# Fiber directions coprime to |A|; 9 = 2 + 7 completes the list for |A| = 9
ADMISSIBLE_STRUCTURES: Dict[int, Tuple[StructureDescriptor, ...]] = {
    5: (StructureDescriptor(5, ((2, 1), (3, 1))),),
    7: (
        StructureDescriptor(7, ((2, 1), (5, 1))),
        StructureDescriptor(7, ((2, 2), (3, 1))),
        StructureDescriptor(7, template=MinimalTemplate(5, 3, 2)),
    ),
    8: (StructureDescriptor(8, ((3, 1), (5, 1))),),
    9: (
        StructureDescriptor(9, ((2, 2), (5, 1))),
        StructureDescriptor(9, ((2, 1), (7, 1))),
    ),
    10: (StructureDescriptor(10, ((3, 1), (7, 1))),),
}


def admissible_structures(cardinality: int, N: Optional[int] = None) -> List[StructureDescriptor]:
    """
    Structures of a vanishing set with |A| = cardinality whose fiber
    directions are all coprime to |A|, optionally restricted to those
    instantiable in Z_N.
    """
    low, high = SMALL_CARD_RANGE
    if not low <= cardinality <= high:
        raise PreconditionError(f"cardinality must lie in [{low}, {high}], got {cardinality}")
    structures = list(ADMISSIBLE_STRUCTURES.get(cardinality, ()))
    if N is not None:
        structures = [s for s in structures if s.admits(N)]
    return structures
