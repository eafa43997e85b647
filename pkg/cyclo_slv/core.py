"""
Exact integer arithmetic: factorization, divisors, CRT coordinates, rationals.

All moduli handled by the toolkit stay below a configurable ceiling, so
trial division is sufficient for factorization.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Dict, Iterable, List, Tuple, Union

from cyclo_slv.exceptions import PreconditionError, ScaleGuardError
from utils.constants import (
    DEFAULT_CENSUS_MAX_STATES,
    DEFAULT_MAX_CUBOIDS,
    DEFAULT_MAX_DENSE_MODULUS,
    DEFAULT_MAX_INTERVALS,
    DEFAULT_MAX_MODULUS,
    DEFAULT_MAX_POINTS,
    DEFAULT_MAX_POLY_DEGREE,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScaleGuards:
    """Size ceilings shared by every operation that can blow up"""
    max_modulus: int = DEFAULT_MAX_MODULUS
    max_dense_modulus: int = DEFAULT_MAX_DENSE_MODULUS
    max_points: int = DEFAULT_MAX_POINTS
    max_cuboids: int = DEFAULT_MAX_CUBOIDS
    census_max_states: int = DEFAULT_CENSUS_MAX_STATES
    max_poly_degree: int = DEFAULT_MAX_POLY_DEGREE
    max_intervals: int = DEFAULT_MAX_INTERVALS

    def check(self, what: str, value: int, limit_name: str) -> None:
        limit = getattr(self, limit_name)
        if value > limit:
            raise ScaleGuardError(what, value, limit)


DEFAULT_GUARDS = ScaleGuards()


@dataclass(frozen=True)
class PrimeFactorization:
    """
    Ordered prime factorization of a positive integer.

    Attributes:
        factors: (prime, exponent) pairs with strictly increasing primes
    """
    factors: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def value(self) -> int:
        result = 1
        for p, e in self.factors:
            result *= p ** e
        return result

    def exponent(self, p: int) -> int:
        for prime, e in self.factors:
            if prime == p:
                return e
        return 0

    def prime_powers(self) -> Tuple[int, ...]:
        return tuple(p ** e for p, e in self.factors)

    def to_json(self) -> List[List[int]]:
        return [[p, e] for p, e in self.factors]


@lru_cache(maxsize=4096)
def _trial_division(n: int) -> Tuple[Tuple[int, int], ...]:
    factors = []
    remaining = n
    for p in (2, 3):
        if remaining % p == 0:
            e = 0
            while remaining % p == 0:
                remaining //= p
                e += 1
            factors.append((p, e))
    d = 5
    step = 2
    while d * d <= remaining:
        if remaining % d == 0:
            e = 0
            while remaining % d == 0:
                remaining //= d
                e += 1
            factors.append((d, e))
        d += step
        step = 6 - step
    if remaining > 1:
        factors.append((remaining, 1))
    return tuple(factors)


def factorize(n: int, guards: ScaleGuards = DEFAULT_GUARDS) -> PrimeFactorization:
    """
    Factor a positive integer by trial division.

    Args:
        n: Integer to factor, n >= 1
        guards: Scale guards; n must not exceed ``max_modulus``

    Returns:
        PrimeFactorization whose product is n (empty for n = 1)
    """
    if not isinstance(n, int) or n < 1:
        raise PreconditionError(f"factorize requires a positive integer, got {n!r}")
    guards.check("modulus", n, "max_modulus")
    return PrimeFactorization(_trial_division(n))


def prime_factors(n: int) -> Tuple[int, ...]:
    return factorize(n).primes


def is_prime(n: int) -> bool:
    return n >= 2 and _trial_division(n) == ((n, 1),)


def is_prime_power(n: int) -> bool:
    return n >= 2 and len(_trial_division(n)) == 1


def valuation(n: int, p: int) -> int:
    """Exponent of the prime p in n (n != 0)"""
    if n == 0:
        raise PreconditionError("valuation of 0 is undefined")
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def radical(n: int) -> int:
    return math.prod(factorize(n).primes)


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n).primes:
        result = result // p * (p - 1)
    return result


def mobius(n: int) -> int:
    factors = factorize(n).factors
    if any(e > 1 for _, e in factors):
        return 0
    return -1 if len(factors) % 2 else 1


@lru_cache(maxsize=4096)
def _divisors_cached(n: int) -> Tuple[int, ...]:
    divs = [1]
    for p, e in _trial_division(n):
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return tuple(sorted(divs))


def divisors(n: int) -> List[int]:
    """
    All positive divisors of n in increasing order.

    Args:
        n: Positive integer

    Returns:
        Sorted list of divisors; its length is the product of (n_i + 1)
    """
    factorize(n)
    return list(_divisors_cached(n))


def lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def lcm_all(values: Iterable[int]) -> int:
    return reduce(lcm, values, 1)


@dataclass(frozen=True)
class CrtCoordinates:
    """Coordinates of a residue mod M, one per prime power p_i^{n_i} of M"""
    modulus: PrimeFactorization
    coords: Tuple[int, ...]

    def join(self) -> int:
        return crt_join(self)


def _as_factorization(M: Union[int, PrimeFactorization]) -> PrimeFactorization:
    if isinstance(M, PrimeFactorization):
        return M
    return factorize(M)


def crt_split(x: int, M: Union[int, PrimeFactorization]) -> CrtCoordinates:
    """
    Split a residue of Z_M into its Z_{p_i^{n_i}} coordinates.

    Args:
        x: Residue with 0 <= x < M
        M: Modulus or its factorization

    Returns:
        CrtCoordinates with coords[i] = x mod p_i^{n_i}
    """
    fact = _as_factorization(M)
    modulus = fact.value
    if not 0 <= x < modulus:
        raise PreconditionError(f"residue {x} is not in Z_{modulus}")
    return CrtCoordinates(fact, tuple(x % q for q in fact.prime_powers()))


def crt_join(coordinates: CrtCoordinates) -> int:
    """Inverse of crt_split"""
    fact = coordinates.modulus
    modulus = fact.value
    total = 0
    for residue, q in zip(coordinates.coords, fact.prime_powers()):
        cofactor = modulus // q
        total += residue * cofactor * pow(cofactor, -1, q)
    return total % modulus


def crt_combine(residues: Dict[int, int]) -> int:
    """Solve x = r_m (mod m) for pairwise coprime moduli m"""
    modulus = math.prod(residues)
    total = 0
    for m, r in residues.items():
        cofactor = modulus // m
        total += r * cofactor * pow(cofactor, -1, m)
    return total % modulus


Rational = Fraction


def format_rational(value: Fraction) -> str:
    """Serialize a rational as "num/den" (integers as "num")"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """
    Parse a rational from "num/den", an integer, or a Fraction.

    Raises:
        PreconditionError: on malformed input or a zero denominator
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise PreconditionError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise PreconditionError(f"not a rational: {text!r}") from e


def parse_int_list(text: str) -> List[int]:
    """Parse "2,3,5" into [2, 3, 5]"""
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise PreconditionError(f"expected a comma-separated integer list, got {text!r}") from e


def check_prime(p: int, name: str = "p") -> None:
    if not is_prime(p):
        raise PreconditionError(f"{name} = {p} is not prime")

