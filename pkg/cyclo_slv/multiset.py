"""
Weighted multisets over Z_M, grids and fibers.

A multiset is stored sparsely as sorted (residue, weight) pairs with all
weights nonzero. Negative weights are allowed; nonnegativity is a checked
refinement (``is_nonnegative``).
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from cyclo_slv.core import DEFAULT_GUARDS, ScaleGuards, is_prime, valuation
from cyclo_slv.exceptions import PreconditionError

logger = logging.getLogger(__name__)


def _normalize(modulus: int, weights: Mapping[int, int]) -> Tuple[Tuple[int, int], ...]:
    reduced: Dict[int, int] = defaultdict(int)
    for x, w in weights.items():
        reduced[int(x) % modulus] += int(w)
    return tuple(sorted((x, w) for x, w in reduced.items() if w != 0))


@dataclass(frozen=True)
class Multiset:
    """
    A weighted multiset in Z_M, i.e. a mask polynomial modulo X^M - 1.

    Attributes:
        modulus: The modulus M >= 1
        items: Sorted (residue, weight) pairs, residues in [0, M), weights nonzero
    """
    modulus: int
    items: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if not isinstance(self.modulus, int) or self.modulus < 1:
            raise PreconditionError(f"modulus must be a positive integer, got {self.modulus!r}")

    @classmethod
    def from_weights(
        cls,
        modulus: int,
        weights: Mapping[int, int],
        guards: ScaleGuards = DEFAULT_GUARDS
    ) -> "Multiset":
        """Build a multiset from a residue -> weight map (residues reduced mod M)"""
        guards.check("modulus", modulus, "max_modulus")
        if modulus < 1:
            raise PreconditionError(f"modulus must be positive, got {modulus}")
        return cls(modulus, _normalize(modulus, weights))

    @classmethod
    def from_residues(cls, modulus: int, residues: Iterable[int]) -> "Multiset":
        """Build a multiset with weight = multiplicity of each residue"""
        counts: Dict[int, int] = defaultdict(int)
        for x in residues:
            counts[x] += 1
        return cls.from_weights(modulus, counts)

    @classmethod
    def empty(cls, modulus: int) -> "Multiset":
        return cls(modulus, ())

    @classmethod
    def delta(cls, modulus: int, x: int = 0) -> "Multiset":
        return cls.from_weights(modulus, {x: 1})

    @property
    def weights(self) -> Dict[int, int]:
        return dict(self.items)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.items)

    def weight(self, x: int) -> int:
        return self.weights.get(x % self.modulus, 0)

    def support(self) -> Tuple[int, ...]:
        return tuple(x for x, _ in self.items)

    def total_weight(self) -> int:
        """|A| = A(1), the sum of all weights"""
        return sum(w for _, w in self.items)

    def is_empty(self) -> bool:
        return not self.items

    def is_nonnegative(self) -> bool:
        return all(w > 0 for _, w in self.items)

    def is_set(self) -> bool:
        return all(w == 1 for _, w in self.items)

    def _check_same_modulus(self, other: "Multiset") -> None:
        if self.modulus != other.modulus:
            raise PreconditionError(
                f"modulus mismatch: {self.modulus} vs {other.modulus}"
            )

    def __add__(self, other: "Multiset") -> "Multiset":
        self._check_same_modulus(other)
        combined: Dict[int, int] = defaultdict(int, self.items)
        for x, w in other.items:
            combined[x] += w
        return Multiset(self.modulus, _normalize(self.modulus, combined))

    def __neg__(self) -> "Multiset":
        return Multiset(self.modulus, tuple((x, -w) for x, w in self.items))

    def __sub__(self, other: "Multiset") -> "Multiset":
        return self + (-other)

    def scale(self, k: int) -> "Multiset":
        if k == 0:
            return Multiset.empty(self.modulus)
        return Multiset(self.modulus, tuple((x, k * w) for x, w in self.items))

    def translate(self, t: int) -> "Multiset":
        """x * A: shift every residue by t"""
        return Multiset(
            self.modulus,
            _normalize(self.modulus, {x + t: w for x, w in self.items})
        )

    def convolve(self, other: "Multiset") -> "Multiset":
        """
        A * B with w_{A*B} = w_A * w_B (cyclic convolution).

        Args:
            other: Multiset with the same modulus

        Returns:
            Multiset whose mask is A(X) B(X) mod X^M - 1
        """
        self._check_same_modulus(other)
        result: Dict[int, int] = defaultdict(int)
        for x, wx in self.items:
            for y, wy in other.items:
                result[(x + y) % self.modulus] += wx * wy
        return Multiset(self.modulus, _normalize(self.modulus, result))

    def reduce_mod(self, N: int) -> "Multiset":
        """
        Induced multiset in Z_N: w^N(x) = sum of w(x') over x' = x mod N.

        Raises:
            PreconditionError: if N does not divide M
        """
        if N < 1 or self.modulus % N != 0:
            raise PreconditionError(f"{N} does not divide the modulus {self.modulus}")
        if N == self.modulus:
            return self
        return Multiset(N, _normalize(N, self.weights))

    def reduce_exponents(self, s: int) -> "Multiset":
        """The mask with exponents reduced mod s (s need not divide M)"""
        if s < 1:
            raise PreconditionError(f"cannot reduce exponents mod {s}")
        return Multiset(s, _normalize(s, self.weights))

    def restrict_to_grid(self, grid: "Grid") -> "Multiset":
        """A ∩ Λ with multiplicity"""
        if grid.modulus != self.modulus:
            raise PreconditionError(
                f"grid modulus {grid.modulus} differs from multiset modulus {self.modulus}"
            )
        return Multiset(self.modulus, tuple((x, w) for x, w in self.items if grid.contains(x)))

    def rescale(self, p: int, beta: int, c: Optional[int] = None) -> "Multiset":
        """
        Rescale a multiset supported on a single p^beta-grid.

        The result lives in Z_{M/p^beta} with w'(x) = w(c + p^beta x), so that
        for p^beta | m | M the divisibility Phi_m | A holds exactly when
        Phi_{m/p^beta} | A' does.

        Args:
            p: Prime dividing M
            beta: Grid exponent with 0 < beta < v_p(M)
            c: Any point of the grid; defaults to the first support point

        Returns:
            The rescaled multiset
        """
        if not is_prime(p) or self.modulus % p != 0:
            raise PreconditionError(f"{p} is not a prime divisor of {self.modulus}")
        n_p = valuation(self.modulus, p)
        if not 0 < beta < n_p:
            raise PreconditionError(f"beta must satisfy 0 < beta < {n_p}, got {beta}")
        step = p ** beta
        if c is None:
            c = self.items[0][0] if self.items else 0
        c %= self.modulus
        if any((x - c) % step for x, _ in self.items):
            raise PreconditionError(f"support is not contained in the grid {c % step} + {step}Z")
        new_modulus = self.modulus // step
        return Multiset(
            new_modulus,
            _normalize(new_modulus, {((x - c) % self.modulus) // step: w for x, w in self.items})
        )

    def unrescale(self, p: int, beta: int, c: int, modulus: int) -> "Multiset":
        """Inverse of rescale: place A' back on the grid c + p^beta Z in Z_modulus"""
        step = p ** beta
        if modulus != self.modulus * step:
            raise PreconditionError(f"modulus {modulus} is not {self.modulus} * {step}")
        return Multiset.from_weights(modulus, {c + step * x: w for x, w in self.items})

    def to_dense(self, guards: ScaleGuards = DEFAULT_GUARDS) -> np.ndarray:
        """Weight vector of length M"""
        guards.check("dense modulus", self.modulus, "max_dense_modulus")
        dense = np.zeros(self.modulus, dtype=np.int64)
        for x, w in self.items:
            dense[x] = w
        return dense

    def to_json(self) -> Dict[str, Any]:
        return {
            "modulus": self.modulus,
            "weights": {str(x): w for x, w in self.items},
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Multiset":
        try:
            modulus = int(data["modulus"])
            weights = {int(x): int(w) for x, w in data["weights"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise PreconditionError(f"malformed multiset JSON: {e}") from e
        return cls.from_weights(modulus, weights)

    def __repr__(self) -> str:
        body = ", ".join(f"{x}:{w}" for x, w in self.items[:8])
        more = ", ..." if len(self.items) > 8 else ""
        return f"Multiset(Z_{self.modulus}; {body}{more})"


@dataclass(frozen=True)
class Grid:
    """
    The grid Λ(x, D) = x + D Z_N inside Z_N.

    Attributes:
        modulus: N
        base: a point of the grid (normalized to [0, D))
        step: D, a divisor of N
    """
    modulus: int
    base: int
    step: int

    def __post_init__(self):
        if self.step < 1 or self.modulus % self.step != 0:
            raise PreconditionError(f"grid step {self.step} does not divide {self.modulus}")
        object.__setattr__(self, "base", self.base % self.step)

    def contains(self, x: int) -> bool:
        return (x - self.base) % self.step == 0

    def points(self) -> List[int]:
        return list(range(self.base, self.modulus, self.step))

    def indicator(self) -> Multiset:
        return Multiset.from_residues(self.modulus, self.points())


def fiber(N: int, p: int, base: int = 0) -> Multiset:
    """
    The N-fiber x * F_p^N = Λ(x, N/p): p points spaced N/p apart.

    Args:
        N: Modulus
        p: Prime divisor of N
        base: Starting point x

    Returns:
        Multiset of total weight p
    """
    if not is_prime(p) or N % p != 0:
        raise PreconditionError(f"{p} is not a prime divisor of {N}")
    step = N // p
    return Multiset.from_residues(N, (base + j * step for j in range(p)))


def grid_partition(N: int, m: int) -> List[Grid]:
    """The m-grids Λ(y, m), y = 0..m-1, which partition Z_N"""
    if m < 1 or N % m != 0:
        raise PreconditionError(f"{m} does not divide {N}")
    return [Grid(N, y, m) for y in range(m)]
