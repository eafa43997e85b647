"""
Generators for the worked examples and randomized instances.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from cyclo_slv.core import check_prime, crt_combine, is_prime, valuation
from cyclo_slv.exceptions import PreconditionError
from cyclo_slv.multiset import Multiset, fiber
from cyclo_slv.sums import StructureDescriptor, construct_RpkRq

logger = logging.getLogger(__name__)


def progression(N: int, step: int, count: int, base: int = 0) -> Multiset:
    """{base, base + step, ..., base + (count - 1) step} in Z_N"""
    return Multiset.from_residues(N, (base + j * step for j in range(count)))


def _distinct_primes(*primes: int) -> None:
    for p in primes:
        check_prime(p)
    if len(set(primes)) != len(primes):
        raise PreconditionError(f"primes must be distinct, got {list(primes)}")


def example_two_scale(p: int, q: int, e: int) -> Multiset:
    """
    The two-scale set in Z_N, N = p^e q^e:

        F_p(X^{N/p}) F_p(X^{N/p^e}) + F_q(X^{N/q}) F_q(X^{N/q^e})

    with |A| = p^2 + q^2 and Phi_N, Phi_pq among its divisors.
    """
    _distinct_primes(p, q)
    if e < 1:
        raise PreconditionError(f"exponent must be positive, got {e}")
    N = p ** e * q ** e
    p_part = progression(N, N // p, p).convolve(progression(N, N // p ** e, p))
    q_part = progression(N, N // q, q).convolve(progression(N, N // q ** e, q))
    return p_part + q_part


def long_fiber(p: int, q: int, alphas: Sequence[int], beta: int, alpha: Optional[int] = None) -> Multiset:
    """
    prod_j Phi_p(X^{p^{alpha_j - 1} q^beta}) in Z_{p^alpha q^beta}.

    A set of p^k points, divisible by Phi_s whenever v_p(s) is one of the
    alpha_j and s | p^{alpha_j} q^beta.
    """
    _distinct_primes(p, q)
    alphas = sorted(alphas)
    if not alphas or alphas[0] < 1 or len(set(alphas)) != len(alphas):
        raise PreconditionError(f"need distinct positive exponents, got {alphas}")
    alpha = alphas[-1] if alpha is None else alpha
    if alpha < alphas[-1] or beta < 0:
        raise PreconditionError(f"need alpha >= {alphas[-1]} and beta >= 0")
    N = p ** alpha * q ** beta
    A = Multiset.delta(N)
    for a in alphas:
        A = A.convolve(progression(N, p ** (a - 1) * q ** beta, p))
    return A


def long_fiber_divisors(p: int, q: int, alphas: Sequence[int], beta: int) -> List[int]:
    """The divisors p^{alpha_j} q^beta certified by ``long_fiber``"""
    return [p ** a * q ** beta for a in sorted(alphas)]


def _next_prime_outside(excluded: Sequence[int]) -> int:
    u = 3
    while u in excluded or not is_prime(u):
        u += 1
    return u


def three_prime_example(p: int, q: int, r: int, M: Optional[int] = None) -> Multiset:
    """
    (a * F_p * F_q) + (a' * F_q * F_r) + (a'' * F_p * F_r) with offsets 0, 1, 2
    in distinct classes modulo an extra prime factor of M, so |A| = pq + pr + qr.
    """
    _distinct_primes(p, q, r)
    if M is None:
        M = p * q * r * _next_prime_outside((p, q, r))
    if M % (p * q * r):
        raise PreconditionError(f"pqr = {p * q * r} does not divide M = {M}")
    A = Multiset.empty(M)
    for offset, (a, b) in enumerate(((p, q), (q, r), (p, r))):
        A = A + fiber(M, a, offset).convolve(fiber(M, b, 0))
    if not A.is_set():
        raise PreconditionError(f"components overlap in Z_{M}; choose M with a further prime factor")
    return A


def one_scale_many_primes(p1: int = 5, p2: int = 7, q1: int = 13, q2: int = 11) -> Multiset:
    """
    A set of N = p1 + q1 = p2 + q2 integers in Z_{s1 s2} (s_i = p_i q_i) whose
    reduction mod s_i is a p_i-fiber plus a disjoint q_i-fiber, glued by CRT.
    """
    _distinct_primes(p1, p2, q1, q2)
    if p1 + q1 != p2 + q2:
        raise PreconditionError("need p1 + q1 = p2 + q2")
    s1, s2 = p1 * q1, p2 * q2
    first = list(fiber(s1, p1, 0).support()) + list(fiber(s1, q1, 1).support())
    second = list(fiber(s2, p2, 0).support()) + list(fiber(s2, q2, 1).support())
    return Multiset.from_residues(s1 * s2, (crt_combine({s1: a, s2: b}) for a, b in zip(first, second)))


def xi_example(N: int = 30) -> Multiset:
    """
    F_5 - (X^{N/5} + X^{2N/5}) F_3 + sum_{i,j=1,2} X^{iN/5 + jN/3} F_2, weight 7
    """
    return construct_RpkRq(N, 5, 3, 2, (1, 2)).multiset


def admissible_instance(
    structure: StructureDescriptor,
    N: int,
    rng: Optional[np.random.Generator] = None
) -> Multiset:
    """
    A set in Z_N with the given structure, fibers placed disjointly.

    Bases are taken in increasing order, or at random when ``rng`` is given.

    Raises:
        PreconditionError: N is incompatible with the structure or not coprime to |A|
    """
    if not structure.admits(N):
        raise PreconditionError(f"{structure.label} cannot be placed in Z_{N}")
    if math.gcd(N, structure.cardinality) != 1:
        raise PreconditionError(f"N = {N} is not coprime to |A| = {structure.cardinality}")
    if structure.template is not None:
        t = structure.template
        base = 0 if rng is None else int(rng.integers(N))
        return construct_RpkRq(N, t.p, t.q, t.k, base=base).multiset
    A = Multiset.empty(N)
    for p, count in structure.fibers:
        for _ in range(count):
            order = range(N) if rng is None else (int(x) for x in rng.permutation(N))
            for base in order:
                piece = fiber(N, p, base)
                if not set(piece.support()) & set(A.support()):
                    A = A + piece
                    break
            else:
                raise PreconditionError(f"no room for another {p}-fiber in Z_{N}")
    return A


def random_fiber_sum(
    p: int,
    q: int,
    alphas: Sequence[int],
    beta: int,
    rng: np.random.Generator,
    max_copies: int = 3
) -> Tuple[Multiset, List[int]]:
    """
    Random translates of a long fiber plus random q-fibers, with q not dividing |A|.

    Returns:
        (A, divisors) where Phi_m | A for every m in divisors
    """
    base = long_fiber(p, q, alphas, beta)
    N = base.modulus
    if valuation(N, q) < 1:
        raise PreconditionError("q-fibers need beta >= 1")
    copies = int(rng.integers(1, max_copies + 1))
    while copies % q == 0:
        copies = int(rng.integers(1, max_copies + 1))
    A = Multiset.empty(N)
    for _ in range(copies):
        A = A + base.translate(int(rng.integers(N)))
    for _ in range(int(rng.integers(0, max_copies + 1))):
        A = A + fiber(N, q, int(rng.integers(N)))
    return A, long_fiber_divisors(p, q, alphas, beta)
