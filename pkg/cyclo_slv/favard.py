"""
Product Cantor sets, projection lengths and Favard length estimates.

S_n is the set of points A_n x B_n thickened by a disc of radius L^{-n}, where
A_{n+1} = A_n + L^{-n-1} A. The projection of a disc is an interval, so every
projection of S_n is a union of equal-width intervals.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from cyclo_slv.core import DEFAULT_GUARDS, ScaleGuards, format_rational
from cyclo_slv.cyclo import divisor_profile
from cyclo_slv.exceptions import FalsificationError, PreconditionError
from cyclo_slv.intervals import IntervalUnion
from cyclo_slv.multiset import Multiset
from cyclo_slv.slv import MultiscaleResult, SlvCertificate, bad_factor_lower_bound, bad_factor_polynomial
from utils.constants import DEFAULT_FAVARD_CHUNK, DEFAULT_FAVARD_NODES, DEFAULT_N_JOBS, MIN_FAVARD_NODES

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class CantorProductSpec:
    """
    Digit sets A, B of nonnegative integers with scale L = |A||B|.

    Attributes:
        A: Distinct digits, at least two
        B: Distinct digits, at least two
    """
    A: Tuple[int, ...]
    B: Tuple[int, ...]

    def __post_init__(self):
        for name, digits in (("A", self.A), ("B", self.B)):
            if len(digits) < 2 or len(set(digits)) != len(digits) or min(digits) < 0:
                raise PreconditionError(f"{name} needs at least two distinct nonnegative digits, got {digits}")
        object.__setattr__(self, "A", tuple(sorted(self.A)))
        object.__setattr__(self, "B", tuple(sorted(self.B)))

    @classmethod
    def four_corner(cls) -> "CantorProductSpec":
        return cls((0, 3), (0, 3))

    @property
    def L(self) -> int:
        return len(self.A) * len(self.B)

    def to_json(self) -> Dict[str, Any]:
        return {"A": list(self.A), "B": list(self.B), "L": self.L}


def _digit_numerators(digits: Sequence[int], L: int, n: int) -> np.ndarray:
    """Numerators of A_n over the common denominator L^n"""
    values = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        values = (values[:, None] * L + np.asarray(digits, dtype=np.int64)[None, :]).ravel()
    return values


def _point_numerators(spec: CantorProductSpec, n: int, guards: ScaleGuards) -> np.ndarray:
    if n < 0:
        raise PreconditionError(f"iteration depth must be nonnegative, got {n}")
    guards.check("Cantor points", spec.L ** n, "max_points")
    xs = _digit_numerators(spec.A, spec.L, n)
    ys = _digit_numerators(spec.B, spec.L, n)
    return np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)


def iterate_points(spec: CantorProductSpec, n: int, guards: ScaleGuards = DEFAULT_GUARDS) -> List[Point]:
    """
    The L^n points of A_n x B_n as exact rationals with denominator L^n.
    """
    denominator = spec.L ** n
    return [
        (Fraction(int(x), denominator), Fraction(int(y), denominator))
        for x, y in _point_numerators(spec, n, guards)
    ]


def point_array(spec: CantorProductSpec, n: int, guards: ScaleGuards = DEFAULT_GUARDS) -> np.ndarray:
    """Floating (L^n, 2) array of the points of A_n x B_n"""
    return _point_numerators(spec, n, guards).astype(np.float64) / float(spec.L ** n)


def _union_length(projections: np.ndarray, radius: float) -> float:
    xs = np.sort(projections)
    gaps = np.diff(xs)
    return float(2 * radius + np.minimum(gaps, 2 * radius).sum())


def projection_length(
    points: Union[np.ndarray, Sequence[Point]],
    theta: Union[float, Fraction],
    radius: Union[float, Fraction]
) -> Union[float, Fraction]:
    """
    Length of the union of [proj_θ(p) - r, proj_θ(p) + r] over the points.

    With rational points, a rational radius and θ = 0 (exactly), the result
    is an exact Fraction; θ = π/2 is requested by passing the string "pi/2".
    """
    if radius <= 0:
        raise PreconditionError(f"radius must be positive, got {radius}")
    exact_axis = {0: 0, "pi/2": 1}.get(theta) if isinstance(theta, (int, str, Fraction)) else None
    if exact_axis is not None and not isinstance(points, np.ndarray) and isinstance(radius, Fraction):
        r = radius
        return IntervalUnion.from_intervals((p[exact_axis] - r, p[exact_axis] + r) for p in points).measure()
    if isinstance(theta, str):
        theta = math.pi / 2
    array = np.asarray([[float(x), float(y)] for x, y in points]) if not isinstance(points, np.ndarray) else points
    if array.size == 0:
        return 0.0
    projections = array[:, 0] * math.cos(float(theta)) + array[:, 1] * math.sin(float(theta))
    return _union_length(projections, float(radius))


def _chunk_lengths(points: np.ndarray, thetas: np.ndarray, radius: float) -> np.ndarray:
    cos, sin = np.cos(thetas), np.sin(thetas)
    projections = points[:, 0][None, :] * cos[:, None] + points[:, 1][None, :] * sin[:, None]
    xs = np.sort(projections, axis=1)
    gaps = np.minimum(np.diff(xs, axis=1), 2 * radius)
    return 2 * radius + gaps.sum(axis=1)


@dataclass(frozen=True)
class FavardEstimate:
    """Midpoint-rule estimate of Fav(S_n) and its error bound"""
    n: int
    nodes: int
    value: float
    error_bound: float
    points: int

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "nodes": self.nodes,
            "favard": self.value,
            "error_bound": self.error_bound,
            "points": self.points,
        }


def favard_length(
    spec: CantorProductSpec,
    n: int,
    nodes: int = DEFAULT_FAVARD_NODES,
    n_jobs: int = DEFAULT_N_JOBS,
    chunk_size: int = DEFAULT_FAVARD_CHUNK,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> FavardEstimate:
    """
    (1/π) ∫_0^π |proj_θ S_n| dθ by the composite midpoint rule.

    The reported bound is h (diam + 2r) / 4 with node spacing h, from the
    Lipschitz constant of θ -> |proj_θ S_n| taken as the thickened diameter.

    Args:
        spec: Digit sets
        n: Iteration depth
        nodes: Number of quadrature nodes (>= 16)
        n_jobs: joblib workers over node chunks
        chunk_size: Nodes per chunk

    Returns:
        FavardEstimate
    """
    if nodes < MIN_FAVARD_NODES:
        raise PreconditionError(f"need at least {MIN_FAVARD_NODES} quadrature nodes, got {nodes}")
    points = point_array(spec, n, guards)
    radius = float(spec.L) ** (-n)
    h = math.pi / nodes
    thetas = (np.arange(nodes) + 0.5) * h
    chunks = [thetas[i:i + chunk_size] for i in range(0, nodes, chunk_size)]
    logger.debug(f"Favard quadrature: n = {n}, {len(points)} points, {nodes} nodes in {len(chunks)} chunks")
    parts = Parallel(n_jobs=n_jobs)(delayed(_chunk_lengths)(points, c, radius) for c in chunks)
    lengths = np.concatenate(parts)
    value = float(lengths.sum() / nodes)
    extent = points.max(axis=0) - points.min(axis=0)
    diameter = float(np.hypot(*extent))
    error_bound = h * (diameter + 2 * radius) / 4
    logger.info(f"Fav(S_{n}) = {value:.6f} (error bound {error_bound:.2e})")
    return FavardEstimate(n, nodes, value, error_bound, len(points))


def favard_table(
    spec: CantorProductSpec,
    depths: Sequence[int],
    nodes: int = DEFAULT_FAVARD_NODES,
    n_jobs: int = DEFAULT_N_JOBS,
    chunk_size: int = DEFAULT_FAVARD_CHUNK,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> List[FavardEstimate]:
    return [favard_length(spec, n, nodes, n_jobs, chunk_size, guards) for n in depths]


def phi_bad(S_A: Sequence[int], xi: Union[float, Fraction, np.ndarray]) -> Union[float, np.ndarray]:
    """
    |prod_{s in S_A} Phi_s(e^{2πiξ})|, exactly 0 at rational zeros b/s.
    """
    if isinstance(xi, Fraction):
        if (xi % 1).denominator in set(S_A):
            return 0.0
        xi = float(xi)
    coefficients = np.asarray(bad_factor_polynomial(S_A).coefficients[::-1], dtype=np.float64)
    values = np.abs(np.polyval(coefficients, np.exp(2j * np.pi * np.asarray(xi, dtype=np.float64))))
    return float(values) if np.ndim(values) == 0 else values


def phi_bad_for(A: Multiset, L: int, xi: Union[float, Fraction, np.ndarray]) -> Union[float, np.ndarray]:
    """``phi_bad`` with S_A taken from the divisor profile of A"""
    return phi_bad(divisor_profile(A, L).S_A, xi)


@dataclass(frozen=True)
class SlvValueReport:
    """Sampled check of the multiscale lower bound on Γ - Γ"""
    samples: int
    c: float
    bound: float
    min_product: float

    @property
    def ok(self) -> bool:
        return self.min_product >= self.bound

    def to_json(self) -> Dict[str, Any]:
        return {
            "samples": self.samples,
            "c": self.c,
            "bound": self.bound,
            "min_product": self.min_product,
            "ok": self.ok,
        }


def slv_value_check(
    cert_A: SlvCertificate,
    cert_B: SlvCertificate,
    result: MultiscaleResult,
    samples: int,
    rng: Optional[np.random.Generator] = None,
    phi_samples: int = 4096
) -> SlvValueReport:
    """
    Sample ξ in Γ - Γ and check prod_{k<m} |φ_A(L^k ξ)| |φ_B(L^k t ξ)| >= L^{-C_1 m}.

    Since L^{-C_1 m} = c^{2m} with c = min(c_A, c_B), the check runs in that form.

    Raises:
        FalsificationError: a sample violates the bound
    """
    if result.gamma is None or result.gamma.is_empty():
        raise PreconditionError("multiscale result carries no set")
    rng = rng if rng is not None else np.random.default_rng(0)
    c = result.c
    if c is None:
        c = min(
            bad_factor_lower_bound(cert_A.S_A, cert_A.separation, phi_samples),
            bad_factor_lower_bound(cert_B.S_A, cert_B.separation, phi_samples),
        )
    xi = result.gamma.sample(rng, samples) - result.gamma.sample(rng, samples)
    product = np.ones(samples)
    t = float(result.t)
    for k in range(result.m):
        scale = float(result.L) ** k
        product *= phi_bad(cert_A.S_A, np.mod(scale * xi, 1.0)) * phi_bad(cert_B.S_A, np.mod(scale * t * xi, 1.0))
    bound = c ** (2 * result.m)
    report = SlvValueReport(samples, c, bound, float(product.min()))
    if not report.ok:
        raise FalsificationError(
            f"sampled product {report.min_product:.3e} is below c^(2m) = {bound:.3e}",
            {"t": format_rational(result.t), "m": result.m}
        )
    logger.info(f"SLV value check: min product {report.min_product:.3e} >= {bound:.3e} over {samples} samples")
    return report
