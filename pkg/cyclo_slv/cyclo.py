"""
Cyclotomic polynomials and cyclotomic divisibility of mask polynomials.

Three independent ways to decide Phi_s | A are provided:

- ``divides_by_remainder``: exact polynomial remainder (via the radical
  reduction Phi_s(X) = Phi_r(X^{s/r}), r = rad(s)),
- ``divides_by_cuboids``: vanishing of every s-cuboid evaluation,
- ``divides_cyclotomic``: sparse fiber elimination on CRT top digits, the
  fast path used by everything else.
"""

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from cyclo_slv.core import (
    DEFAULT_GUARDS,
    ScaleGuards,
    crt_combine,
    divisors,
    euler_phi,
    factorize,
    is_prime_power,
    lcm_all,
    mobius,
    radical,
    valuation,
)
from cyclo_slv.exceptions import DivisibilityError, FalsificationError, PreconditionError
from cyclo_slv.multiset import Multiset, fiber, grid_partition

logger = logging.getLogger(__name__)

_INT64_SAFE = 2 ** 62


def _trim(coefficients: Iterable[int]) -> Tuple[int, ...]:
    coeffs = [int(c) for c in coefficients]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _convolve(a: Sequence[int], b: Sequence[int]) -> List[int]:
    if not a or not b:
        return []
    bound = max(abs(x) for x in a) * max(abs(y) for y in b) * min(len(a), len(b))
    if bound < _INT64_SAFE:
        return np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)).tolist()
    result = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                result[i + j] += x * y
    return result


@dataclass(frozen=True)
class IntPolynomial:
    """
    Integer polynomial, coefficients[i] is the coefficient of X^i.

    Trailing zeros are trimmed, so the zero polynomial has no coefficients
    and degree -1.
    """
    coefficients: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _trim(self.coefficients))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPolynomial":
        return cls((0,) * k + (c,))

    @classmethod
    def x_power_minus_one(cls, n: int) -> "IntPolynomial":
        return cls((-1,) + (0,) * (n - 1) + (1,))

    @classmethod
    def from_multiset(cls, A: Multiset) -> "IntPolynomial":
        """The literal mask polynomial sum w(a) X^a, exponents in [0, M)"""
        if A.is_empty():
            return cls(())
        coeffs = [0] * (A.support()[-1] + 1)
        for x, w in A.items:
            coeffs[x] = w
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def leading_coefficient(self) -> int:
        return self.coefficients[-1] if self.coefficients else 0

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (0,) * (n - len(self.coefficients))
        b = other.coefficients + (0,) * (n - len(other.coefficients))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial(tuple(_convolve(self.coefficients, other.coefficients)))

    def __call__(self, x: Any) -> Any:
        value = 0
        for c in reversed(self.coefficients):
            value = value * x + c
        return value

    def evaluate_complex(self, z: np.ndarray) -> np.ndarray:
        """Evaluate at complex point(s) with numpy (highest power first)"""
        if self.is_zero():
            return np.zeros_like(np.asarray(z, dtype=np.complex128))
        return np.polyval(np.asarray(self.coefficients[::-1], dtype=np.float64), z)

    def substitute_power(self, k: int) -> "IntPolynomial":
        """P(X^k)"""
        if k < 1:
            raise PreconditionError(f"substitution power must be positive, got {k}")
        coeffs = [0] * (self.degree * k + 1) if self.coefficients else []
        for i, c in enumerate(self.coefficients):
            coeffs[i * k] = c
        return IntPolynomial(tuple(coeffs))

    def divmod(self, divisor: "IntPolynomial") -> Tuple["IntPolynomial", "IntPolynomial"]:
        """
        Long division by a polynomial with leading coefficient +1 or -1.

        Returns:
            (quotient, remainder) with deg(remainder) < deg(divisor)
        """
        lead = divisor.leading_coefficient()
        if lead not in (1, -1):
            raise PreconditionError("divisor must have leading coefficient +1 or -1")
        d = divisor.degree
        if self.degree < d:
            return IntPolynomial(()), self
        rem = np.array(self.coefficients, dtype=object)
        div = np.array(divisor.coefficients, dtype=object)
        quotient = [0] * (self.degree - d + 1)
        for i in range(self.degree, d - 1, -1):
            c = rem[i]
            if c:
                c = c * lead
                quotient[i - d] = c
                rem[i - d:i + 1] -= c * div
        return IntPolynomial(tuple(quotient)), IntPolynomial(tuple(rem[:d].tolist()))

    def __mod__(self, divisor: "IntPolynomial") -> "IntPolynomial":
        return self.divmod(divisor)[1]

    def to_json(self) -> List[int]:
        return list(self.coefficients)

    def nonzero_terms(self) -> Dict[int, int]:
        return {i: c for i, c in enumerate(self.coefficients) if c}


def _times_x_power_minus_one(coeffs: List[int], d: int) -> List[int]:
    result = [0] * (len(coeffs) + d)
    for i, c in enumerate(coeffs):
        result[i + d] += c
        result[i] -= c
    return result


def _divide_x_power_minus_one(coeffs: List[int], d: int) -> List[int]:
    # coeffs = (X^d - 1) q  =>  q_k = q_{k-d} - coeffs_k
    q = [0] * (len(coeffs) - d)
    for k in range(len(q)):
        q[k] = (q[k - d] if k >= d else 0) - coeffs[k]
    return q


@lru_cache(maxsize=2048)
def _cyclotomic_coefficients(s: int) -> Tuple[int, ...]:
    numerator = [d for d in divisors(s) if mobius(s // d) == 1]
    denominator = [d for d in divisors(s) if mobius(s // d) == -1]
    coeffs = [1]
    for d in numerator:
        coeffs = _times_x_power_minus_one(coeffs, d)
    for d in denominator:
        coeffs = _divide_x_power_minus_one(coeffs, d)
    return _trim(coeffs)


def cyclotomic_poly(s: int, guards: ScaleGuards = DEFAULT_GUARDS) -> IntPolynomial:
    """
    The s-th cyclotomic polynomial.

    Computed as the Moebius product of (X^d - 1)^{mu(s/d)}, which is the exact
    quotient of X^s - 1 by the product of Phi_d over proper divisors d of s.

    Args:
        s: Positive integer
        guards: The degree phi(s) must not exceed ``max_poly_degree``

    Returns:
        Monic IntPolynomial of degree phi(s)
    """
    if not isinstance(s, int) or s < 1:
        raise PreconditionError(f"cyclotomic index must be a positive integer, got {s!r}")
    guards.check("cyclotomic degree", euler_phi(s), "max_poly_degree")
    return IntPolynomial(_cyclotomic_coefficients(s))


def mask_polynomial(A: Multiset) -> IntPolynomial:
    return IntPolynomial.from_multiset(A)


def _top_digit(x: int, prime_power: int, p: int) -> int:
    return (x % prime_power) // (prime_power // p)


def _eliminate_fibers(
    weights: Mapping[int, int],
    s: int,
    record: bool = False
) -> Tuple[Dict[int, int], Dict[int, Dict[int, int]]]:
    """
    Subtract s-fibers until no point has a top CRT digit equal to p - 1.

    The surviving points all have top digits in [0, p - 2] for every prime,
    a basis of Z[Z_s] modulo the fiber span, so the remainder is zero exactly
    when Phi_s divides the mask.
    """
    current: Dict[int, int] = defaultdict(int)
    for x, w in weights.items():
        if w:
            current[x % s] += w
    coefficients: Dict[int, Dict[int, int]] = {}
    for p, e in factorize(s).factors:
        q = p ** e
        step = s // p
        terms: Dict[int, int] = defaultdict(int)
        pending = [(x, w) for x, w in current.items() if w and _top_digit(x, q, p) == p - 1]
        for x, w in pending:
            base = x
            for j in range(p):
                y = (x + j * step) % s
                current[y] -= w
                if _top_digit(y, q, p) == 0:
                    base = y
            if record:
                terms[base] += w
        if record:
            coefficients[p] = {x: w for x, w in terms.items() if w}
    remainder = {x: w for x, w in current.items() if w}
    return remainder, coefficients


def divides_cyclotomic(A: Multiset, s: int) -> bool:
    """
    Fast sparse test of Phi_s | A(X).

    The exponents of A are reduced mod s (valid since Phi_s | X^s - 1), then
    fibers are eliminated; works for moduli far beyond dense reach.
    """
    if s < 1:
        raise PreconditionError(f"cyclotomic index must be positive, got {s}")
    if s == 1:
        return A.total_weight() == 0
    remainder, _ = _eliminate_fibers(A.weights, s)
    return not remainder


def fiber_remainder(weights: Mapping[int, int], s: int) -> Dict[int, int]:
    """
    Reduced form of a mask modulo the span of s-fibers.

    Linear in the weights; empty exactly when Phi_s divides the mask. The
    support lies on points whose top CRT digits are all at most p - 2.
    """
    if s < 2:
        raise PreconditionError(f"fiber remainders need s >= 2, got {s}")
    remainder, _ = _eliminate_fibers(weights, s)
    return remainder


def _polynomial_divisible(poly: IntPolynomial, s: int) -> bool:
    if s == 1:
        return sum(poly.coefficients) == 0
    remainder, _ = _eliminate_fibers(poly.nonzero_terms(), s)
    return not remainder


def divides_by_remainder(A: Multiset, s: int, guards: ScaleGuards = DEFAULT_GUARDS) -> bool:
    """
    Decide Phi_s | A(X) by exact polynomial remainder.

    The mask is reduced mod X^s - 1. With r = rad(s) and k = s / r we have
    Phi_s(X) = Phi_r(X^k); splitting exponents by their class j mod k gives
    A(X) = sum_j X^j B_j(X^k), and Phi_s | A exactly when Phi_r | B_j for all j.
    Each B_j (degree < r) is divided by Phi_r densely.

    Args:
        A: Multiset in any Z_M
        s: Positive integer
        guards: r must not exceed ``max_dense_modulus``

    Returns:
        True iff every remainder vanishes
    """
    if s < 1:
        raise PreconditionError(f"cyclotomic index must be positive, got {s}")
    r = radical(s) if s > 1 else 1
    guards.check("radical", r, "max_dense_modulus")
    k = s // r
    reduced = A.reduce_exponents(s)
    classes: Dict[int, List[int]] = {}
    for x, w in reduced.items:
        j, m = x % k, x // k
        classes.setdefault(j, [0] * r)[m] += w
    phi_r = cyclotomic_poly(r, guards)
    for block in classes.values():
        if not (IntPolynomial(tuple(block)) % phi_r).is_zero():
            return False
    return True


@dataclass(frozen=True)
class Cuboid:
    """
    An N-cuboid with mask X^c prod_j (1 - X^{d_j N / p_j}).

    Attributes:
        modulus: N
        offset: c in Z_N
        directions: (p_j, d_j) for every prime p_j | N, 1 <= d_j < p_j
    """
    modulus: int
    offset: int
    directions: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        primes = factorize(self.modulus).primes
        if tuple(p for p, _ in self.directions) != primes:
            raise PreconditionError(
                f"cuboid directions {self.directions} do not match the primes {primes} of {self.modulus}"
            )
        for p, d in self.directions:
            if not 1 <= d < p:
                raise PreconditionError(f"direction d = {d} for p = {p} must lie in [1, {p})")
        object.__setattr__(self, "offset", self.offset % self.modulus)

    def vertex_offsets(self) -> List[Tuple[int, int]]:
        """(offset from c, sign) for all 2^K vertices, before collisions"""
        steps = [d * (self.modulus // p) for p, d in self.directions]
        vertices = []
        for eps in itertools.product((0, 1), repeat=len(steps)):
            shift = sum(e * st for e, st in zip(eps, steps)) % self.modulus
            vertices.append((shift, -1 if sum(eps) % 2 else 1))
        return vertices

    def as_multiset(self) -> Multiset:
        weights: Dict[int, int] = defaultdict(int)
        for shift, sign in self.vertex_offsets():
            weights[self.offset + shift] += sign
        return Multiset.from_weights(self.modulus, weights)

    def translate(self, t: int) -> "Cuboid":
        return Cuboid(self.modulus, self.offset + t, self.directions)

    def to_json(self) -> Dict[str, Any]:
        return {
            "N": self.modulus,
            "c": self.offset,
            "d": {str(p): d for p, d in self.directions},
        }


def cuboid_direction_choices(N: int) -> List[Tuple[Tuple[int, int], ...]]:
    """All direction tuples of N-cuboids in lexicographic order"""
    primes = factorize(N).primes
    return [
        tuple(zip(primes, ds))
        for ds in itertools.product(*[range(1, p) for p in primes])
    ]


def iter_cuboids(N: int) -> Iterable[Cuboid]:
    """All N-cuboids in lexicographic (c, d) order"""
    choices = cuboid_direction_choices(N)
    for c in range(N):
        for directions in choices:
            yield Cuboid(N, c, directions)


def delta_evaluate(A: Multiset, cuboid: Cuboid) -> int:
    """
    The evaluation A^N[Δ] = sum_x w^N_A(x) w_Δ(x).

    Raises:
        PreconditionError: if N does not divide the modulus of A
    """
    N = cuboid.modulus
    if A.modulus % N != 0:
        raise PreconditionError(f"cuboid modulus {N} does not divide {A.modulus}")
    reduced = A.reduce_mod(N).weights
    return sum(reduced.get(x, 0) * w for x, w in cuboid.as_multiset().items)


def _evaluations_for(dense: np.ndarray, N: int, choices: Sequence[Tuple[Tuple[int, int], ...]]) -> np.ndarray:
    out = np.zeros((N, len(choices)), dtype=np.int64)
    for col, directions in enumerate(choices):
        steps = [d * (N // p) for p, d in directions]
        for eps in itertools.product((0, 1), repeat=len(steps)):
            shift = sum(e * st for e, st in zip(eps, steps)) % N
            sign = -1 if sum(eps) % 2 else 1
            out[:, col] += sign * np.roll(dense, -shift)
    return out


def cuboid_evaluations(
    A: Multiset,
    N: int,
    n_jobs: int = 1,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> Tuple[np.ndarray, List[Tuple[Tuple[int, int], ...]]]:
    """
    Table of all N-cuboid evaluations of A.

    Args:
        A: Multiset whose modulus is a multiple of N
        N: Cuboid scale
        n_jobs: joblib workers over chunks of direction tuples
        guards: N and the table size are guarded

    Returns:
        (table, choices): table[c, j] is the evaluation at offset c with
        direction tuple choices[j]
    """
    if A.modulus % N != 0:
        raise PreconditionError(f"cuboid modulus {N} does not divide {A.modulus}")
    choices = cuboid_direction_choices(N)
    guards.check("cuboid count", N * len(choices), "max_cuboids")
    dense = A.reduce_mod(N).to_dense(guards)
    if n_jobs == 1 or len(choices) < 2:
        return _evaluations_for(dense, N, choices), choices
    size = max(1, math.ceil(len(choices) / max(1, abs(n_jobs))))
    chunks = [choices[i:i + size] for i in range(0, len(choices), size)]
    parts = Parallel(n_jobs=n_jobs)(delayed(_evaluations_for)(dense, N, chunk) for chunk in chunks)
    return np.concatenate(parts, axis=1), choices


def divides_by_cuboids(A: Multiset, N: int, guards: ScaleGuards = DEFAULT_GUARDS) -> bool:
    """Phi_N | A iff every N-cuboid evaluation vanishes"""
    if N < 1:
        raise PreconditionError(f"cuboid scale must be positive, got {N}")
    if A.modulus % N != 0:
        A = A.reduce_exponents(N)
    table, _ = cuboid_evaluations(A, N, guards=guards)
    return not table.any()


def first_nonvanishing_cuboid(
    A: Multiset,
    N: int,
    n_jobs: int = 1,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> Optional[Tuple[Cuboid, int]]:
    """The lexicographically first (c, d) cuboid with nonzero evaluation, if any"""
    table, choices = cuboid_evaluations(A, N, n_jobs=n_jobs, guards=guards)
    nonzero = np.flatnonzero(table.ravel())
    if nonzero.size == 0:
        return None
    index = int(nonzero[0])
    c, j = divmod(index, len(choices))
    return Cuboid(N, c, choices[j]), int(table[c, j])


def divides_by_grid_split(A: Multiset, N: int, m: int) -> bool:
    """
    Decide Phi_N | A grid by grid.

    For m | D(N) = N / rad(N), Phi_N | A holds exactly when Phi_N divides
    the restriction of A (reduced mod N) to every m-grid.
    """
    d_n = N // radical(N) if N > 1 else 1
    if m < 1 or d_n % m != 0:
        raise PreconditionError(f"{m} does not divide D({N}) = {d_n}")
    reduced = A.reduce_mod(N) if A.modulus % N == 0 else A.reduce_exponents(N)
    return all(
        divides_cyclotomic(reduced.restrict_to_grid(grid), N)
        for grid in grid_partition(N, m)
    )


@dataclass(frozen=True)
class FiberTerm:
    """One direction of a fiber decomposition: P_i(X) F_i^N(X)"""
    prime: int
    coefficients: Multiset

    def expand(self) -> Multiset:
        return self.coefficients.convolve(fiber(self.coefficients.modulus, self.prime, 0))


@dataclass(frozen=True)
class FiberDecomposition:
    """A(X) = sum_i P_i(X) F_i^N(X) mod X^N - 1"""
    modulus: int
    terms: Tuple[FiberTerm, ...]

    def recombine(self) -> Multiset:
        total = Multiset.empty(self.modulus)
        for term in self.terms:
            total = total + term.expand()
        return total

    def is_nonnegative(self) -> bool:
        return all(term.coefficients.is_nonnegative() for term in self.terms)

    def to_json(self) -> Dict[str, Any]:
        return {
            "N": self.modulus,
            "terms": [
                {"prime": t.prime, "coefficients": t.coefficients.to_json()["weights"]}
                for t in self.terms
            ],
        }


def _reduce_for(A: Multiset, N: int) -> Multiset:
    if A.modulus % N == 0:
        return A.reduce_mod(N)
    raise PreconditionError(f"{N} does not divide the modulus {A.modulus}")


def fiber_decompose(A: Multiset, N: int, nonnegative: bool = False) -> FiberDecomposition:
    """
    Write A mod N as a combination of N-fibers.

    Args:
        A: Multiset with N | M and Phi_N | A
        N: Target modulus
        nonnegative: Require nonnegative coefficients (N with exactly two
            prime factors and A >= 0)

    Returns:
        FiberDecomposition with one term per prime of N (zero terms omitted)
    """
    reduced = _reduce_for(A, N)
    if nonnegative:
        return _nonnegative_two_prime(reduced, N)
    remainder, coefficients = _eliminate_fibers(reduced.weights, N, record=True)
    if remainder:
        raise DivisibilityError(N)
    terms = tuple(
        FiberTerm(p, Multiset.from_weights(N, coeffs))
        for p, coeffs in coefficients.items() if coeffs
    )
    return FiberDecomposition(N, terms)


def _nonnegative_two_prime(A: Multiset, N: int) -> FiberDecomposition:
    fact = factorize(N)
    if len(fact.factors) != 2:
        raise PreconditionError(f"nonnegative decomposition needs exactly two primes, N = {N}")
    if not A.is_nonnegative():
        raise PreconditionError("nonnegative decomposition needs a nonnegative multiset")
    if not divides_cyclotomic(A, N):
        raise DivisibilityError(N)
    (p, a), (q, b) = fact.factors
    pa, qb = p ** a, q ** b
    low_p, low_q = pa // p, qb // q

    # Each class of lower digits carries a p x q table W[t_p][t_q] = col[t_q] + row[t_p].
    tables: Dict[Tuple[int, int], np.ndarray] = {}
    for x, w in A.items:
        xp, xq = x % pa, x % qb
        key = (xp % low_p, xq % low_q)
        table = tables.setdefault(key, np.zeros((p, q), dtype=np.int64))
        table[xp // low_p, xq // low_q] += w

    p_terms: Dict[int, int] = {}
    q_terms: Dict[int, int] = {}
    for (rp, rq), table in tables.items():
        rows = table.min(axis=1)
        cols = table - rows[:, None]
        if not (cols == cols[0]).all():
            raise FalsificationError(
                "weight table is not a sum of row and column fibers",
                {"N": N, "class": [rp, rq]}
            )
        for t_q, value in enumerate(cols[0]):
            if value:
                point = crt_combine({pa: rp, qb: rq + t_q * low_q})
                p_terms[point] = int(value)
        for t_p, value in enumerate(rows):
            if value:
                point = crt_combine({pa: rp + t_p * low_p, qb: rq})
                q_terms[point] = int(value)
    terms = tuple(
        FiberTerm(prime, Multiset.from_weights(N, coeffs))
        for prime, coeffs in ((p, p_terms), (q, q_terms)) if coeffs
    )
    return FiberDecomposition(N, terms)


@dataclass(frozen=True)
class DivisorProfile:
    """
    The bad cyclotomic divisors of A relative to L.

    Attributes:
        cardinality: |A|
        L: Copriming modulus
        modulus: M, the modulus the candidates were drawn from
        S_A: Sorted s > 1 with Phi_s | A and gcd(s, L) = 1
        exponents: For each prime of s_A, the exponent of that prime in each
            element of S_A (same order as S_A)
    """
    cardinality: int
    L: int
    modulus: int
    S_A: Tuple[int, ...]
    exponents: Dict[int, Tuple[int, ...]] = field(default_factory=dict)

    @property
    def s_A(self) -> int:
        return lcm_all(self.S_A)

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.exponents))

    def exp_set(self, p: int) -> Tuple[int, ...]:
        """EXP(i): the distinct exponents of p across S_A (0 included)"""
        return tuple(sorted(set(self.exponents.get(p, ()))))

    def E(self, p: int) -> int:
        return len(self.exp_set(p))

    def divides_all(self, p: int) -> bool:
        return bool(self.S_A) and all(s % p == 0 for s in self.S_A)

    def to_json(self) -> Dict[str, Any]:
        return {
            "cardinality": self.cardinality,
            "L": self.L,
            "modulus": self.modulus,
            "S_A": list(self.S_A),
            "s_A": self.s_A,
            "exp": {str(p): list(self.exp_set(p)) for p in self.primes},
            "E": {str(p): self.E(p) for p in self.primes},
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "DivisorProfile":
        try:
            S_A = tuple(int(s) for s in data["S_A"])
            return build_profile(int(data["cardinality"]), int(data["L"]), int(data["modulus"]), S_A)
        except (KeyError, TypeError, ValueError) as e:
            raise PreconditionError(f"malformed profile JSON: {e}") from e


def build_profile(cardinality: int, L: int, modulus: int, S_A: Iterable[int]) -> DivisorProfile:
    S = tuple(sorted(set(S_A)))
    primes = sorted({p for s in S for p in factorize(s).primes})
    exponents = {p: tuple(valuation(s, p) for s in S) for p in primes}
    return DivisorProfile(cardinality, L, modulus, S, exponents)


def divisor_profile(A: Multiset, L: int, guards: ScaleGuards = DEFAULT_GUARDS) -> DivisorProfile:
    """
    Compute S_A = {s > 1 : Phi_s | A, gcd(s, L) = 1} over the divisors of M.

    L must be divisible by every prime of |A|. Then each s in S_A is coprime
    to |A|, which the bounds and cluster constructions built on the profile
    assume; a prime power in S_A is a falsification event.

    Args:
        A: Nonempty multiset in Z_M
        L: Copriming modulus; every prime of |A| must divide L
        guards: Scale guards for M

    Returns:
        DivisorProfile with EXP(i) and E_i for every prime of s_A

    Raises:
        PreconditionError: A is empty, L < 2, or a prime of |A| does not divide L
        FalsificationError: a prime power lies in S_A
    """
    if A.is_empty():
        raise PreconditionError("divisor profile of an empty multiset")
    if L < 2:
        raise PreconditionError(f"L must be at least 2, got {L}")
    cardinality = A.total_weight()
    if cardinality != 0:
        stray = [p for p in factorize(abs(cardinality)).primes if L % p]
        if stray:
            raise PreconditionError(f"primes {stray} of |A| = {cardinality} do not divide L = {L}")
    guards.check("modulus", A.modulus, "max_modulus")
    candidates = [s for s in divisors(A.modulus) if s > 1 and math.gcd(s, L) == 1]
    S_A = [s for s in candidates if divides_cyclotomic(A, s)]
    for s in S_A:
        if is_prime_power(s):
            raise FalsificationError(
                f"prime power {s} divides A although it is coprime to L",
                {"s": s, "cardinality": cardinality, "L": L}
            )
    profile = build_profile(cardinality, L, A.modulus, S_A)
    logger.info(f"Divisor profile: |A| = {cardinality}, L = {L}, S_A = {list(profile.S_A)}")
    return profile


def _candidate_bound_reached(s: int, degree: int) -> bool:
    # Lower bound phi(s) > s / (e^gamma log log s + 2.51 / log log s) for s >= 3.
    if s < 30:
        return False
    loglog = math.log(math.log(s))
    return s / (1.7811 * loglog + 2.51 / loglog) > degree


@dataclass(frozen=True)
class GoodBadSplit:
    """
    Cyclotomic part of a mask split by coprimality with L.

    Attributes:
        good: Phi_s multiplicities with gcd(s, L) != 1
        bad: Phi_s multiplicities with gcd(s, L) = 1 (the factor A'')
        quotient: The remaining non-cyclotomic factor, unsplit
    """
    L: int
    good: Dict[int, int]
    bad: Dict[int, int]
    quotient: IntPolynomial

    @staticmethod
    def _product(factors: Mapping[int, int]) -> IntPolynomial:
        result = IntPolynomial((1,))
        for s, mult in sorted(factors.items()):
            for _ in range(mult):
                result = result * cyclotomic_poly(s)
        return result

    def good_polynomial(self) -> IntPolynomial:
        return self._product(self.good)

    def bad_polynomial(self) -> IntPolynomial:
        return self._product(self.bad)

    def reconstruct(self) -> IntPolynomial:
        return self.good_polynomial() * self.bad_polynomial() * self.quotient

    def to_json(self) -> Dict[str, Any]:
        return {
            "L": self.L,
            "good": {str(s): m for s, m in sorted(self.good.items())},
            "bad": {str(s): m for s, m in sorted(self.bad.items())},
            "quotient_degree": self.quotient.degree,
        }


def mask_cyclotomic_factors(poly: IntPolynomial, guards: ScaleGuards = DEFAULT_GUARDS) -> Tuple[Dict[int, int], IntPolynomial]:
    """
    Multiplicity of every Phi_s in a nonzero polynomial.

    Candidates are all s with phi(s) <= deg P, which is complete because
    Phi_s | P forces phi(s) <= deg P.

    Returns:
        (multiplicities, quotient) with P = prod Phi_s^{m_s} * quotient
    """
    if poly.is_zero():
        raise PreconditionError("the zero polynomial has no finite factorization")
    guards.check("polynomial degree", poly.degree, "max_poly_degree")
    multiplicities: Dict[int, int] = {}
    current = poly
    s = 1
    while not _candidate_bound_reached(s, current.degree):
        if euler_phi(s) <= current.degree:
            while current.degree >= 1 and _polynomial_divisible(current, s):
                current, rem = current.divmod(cyclotomic_poly(s, guards))
                if not rem.is_zero():
                    raise FalsificationError(f"sparse and dense tests disagree for Phi_{s}", {"s": s})
                multiplicities[s] = multiplicities.get(s, 0) + 1
        s += 1
    return multiplicities, current


def good_bad_split(A: Multiset, L: int, guards: ScaleGuards = DEFAULT_GUARDS) -> GoodBadSplit:
    """
    Split the literal mask of A into good cyclotomic, bad cyclotomic and
    non-cyclotomic parts.

    Args:
        A: Nonempty multiset
        L: Copriming modulus

    Returns:
        GoodBadSplit whose three parts multiply back to the mask
    """
    multiplicities, quotient = mask_cyclotomic_factors(mask_polynomial(A), guards)
    good = {s: m for s, m in multiplicities.items() if math.gcd(s, L) != 1}
    bad = {s: m for s, m in multiplicities.items() if math.gcd(s, L) == 1}
    logger.debug(f"good/bad split: good = {good}, bad = {bad}, quotient degree = {quotient.degree}")
    return GoodBadSplit(L, good, bad, quotient)


def single_prime_split(profile: DivisorProfile) -> Optional[Tuple[int, int]]:
    """
    Look for a factorization s_A = s_1 s_2 with s_2 < |A| such that no
    element of S_A divides s_1.

    Since every divisor of s_1 is coprime to L, Phi_s | A for s | s_1 happens
    exactly when s is in S_A, so the profile alone decides feasibility.

    Returns:
        (s_1, s_2) with the smallest admissible s_2, or None
    """
    if not profile.S_A:
        return None
    s_A = profile.s_A
    for s2 in divisors(s_A):
        if s2 >= profile.cardinality:
            break
        s1 = s_A // s2
        if not any(s1 % s == 0 for s in profile.S_A):
            return s1, s2
    return None
