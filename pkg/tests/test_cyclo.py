import itertools

import numpy as np
import pytest
import sympy

from cyclo_slv.core import divisors, is_prime_power
from cyclo_slv.cyclo import (
    Cuboid,
    IntPolynomial,
    cuboid_evaluations,
    cyclotomic_poly,
    delta_evaluate,
    divides_by_cuboids,
    divides_by_grid_split,
    divides_by_remainder,
    divides_cyclotomic,
    divisor_profile,
    fiber_decompose,
    fiber_remainder,
    first_nonvanishing_cuboid,
    good_bad_split,
    iter_cuboids,
    mask_cyclotomic_factors,
    mask_polynomial,
    single_prime_split,
)
from cyclo_slv.exceptions import DivisibilityError, FalsificationError, PreconditionError
from cyclo_slv.multiset import Multiset, fiber

X = sympy.Symbol("X")


@pytest.mark.parametrize("s", list(range(1, 121)) + [210, 360, 1001])
def test_cyclotomic_matches_sympy(s):
    expected = sympy.Poly(sympy.cyclotomic_poly(s, X), X).all_coeffs()[::-1]
    assert list(cyclotomic_poly(s).coefficients) == [int(c) for c in expected]


def test_product_over_divisors_is_x_power_minus_one():
    for N in range(1, 1001):
        product = IntPolynomial((1,))
        for s in divisors(N):
            product = product * cyclotomic_poly(s)
        assert product == IntPolynomial.x_power_minus_one(N), N


def test_values_at_one():
    for s in range(2, 1001):
        value = cyclotomic_poly(s)(1)
        if is_prime_power(s):
            assert value == sympy.primefactors(s)[0]
        else:
            assert value == 1


def test_polynomial_division():
    P = IntPolynomial.x_power_minus_one(12)
    q, r = P.divmod(cyclotomic_poly(12))
    assert r.is_zero()
    assert q * cyclotomic_poly(12) == P
    with pytest.raises(PreconditionError):
        P.divmod(IntPolynomial((1, 2)))


def test_mask_cyclotomic_factors_of_x12_minus_one():
    multiplicities, quotient = mask_cyclotomic_factors(IntPolynomial.x_power_minus_one(12))
    assert multiplicities == {d: 1 for d in divisors(12)}
    assert quotient == IntPolynomial((1,))


def test_oracles_agree_on_every_subset_of_z12():
    for bits in range(1 << 12):
        A = Multiset.from_residues(12, [x for x in range(12) if bits >> x & 1])
        for s in divisors(12):
            by_cuboids = divides_by_cuboids(A, s)
            assert divides_by_remainder(A, s) == by_cuboids, (bits, s)
            assert divides_cyclotomic(A, s) == by_cuboids, (bits, s)


@pytest.mark.slow
def test_oracles_agree_on_random_weighted_z30(rng):
    for _ in range(10_000):
        weights = rng.integers(-3, 4, size=30)
        A = Multiset.from_weights(30, {x: int(w) for x, w in enumerate(weights)})
        for s in divisors(30):
            by_cuboids = divides_by_cuboids(A, s)
            assert divides_by_remainder(A, s) == by_cuboids
            assert divides_cyclotomic(A, s) == by_cuboids


def test_divisibility_of_fibers_and_large_moduli():
    # a p-fiber in Z_N is divisible by Phi_N
    assert divides_cyclotomic(fiber(30, 5, 7), 30)
    assert not divides_cyclotomic(Multiset.delta(30, 7), 30)
    # sparse test works far beyond dense reach
    N = 2 ** 10 * 3 ** 10
    A = fiber(N, 2, 5) + fiber(N, 3, 11)
    assert divides_cyclotomic(A, N)
    assert not divides_cyclotomic(A, N // 2)


def test_fiber_remainder_is_linear_and_detects_divisibility():
    A = fiber(30, 2, 1) + fiber(30, 3, 4)
    assert fiber_remainder(A.weights, 30) == {}
    B = Multiset.from_residues(30, [0, 1])
    rem_b = fiber_remainder(B.weights, 30)
    assert rem_b
    assert fiber_remainder((A + B).weights, 30) == rem_b
    with pytest.raises(PreconditionError):
        fiber_remainder(B.weights, 1)


def test_grid_split_equals_direct_test(rng):
    N = 36
    for _ in range(300):
        A = Multiset.from_weights(N, {x: int(w) for x, w in enumerate(rng.integers(0, 2, size=N))})
        direct = divides_cyclotomic(A, N)
        for m in (1, 2, 3, 6):
            assert divides_by_grid_split(A, N, m) == direct
    with pytest.raises(PreconditionError):
        divides_by_grid_split(Multiset.delta(36), 36, 4)


def test_cuboid_evaluations_match_direct_evaluation():
    A = Multiset.from_residues(60, [0, 1, 7, 22, 45])
    table, choices = cuboid_evaluations(A, 30)
    for cuboid in itertools.islice(iter_cuboids(30), 40):
        assert table[cuboid.offset, choices.index(cuboid.directions)] == delta_evaluate(A, cuboid)


def test_parallel_cuboid_table_matches_serial():
    A = Multiset.from_residues(210, [0, 3, 17, 101])
    serial, _ = cuboid_evaluations(A, 210)
    parallel, _ = cuboid_evaluations(A, 210, n_jobs=2)
    assert np.array_equal(serial, parallel)


def test_first_nonvanishing_cuboid():
    found = first_nonvanishing_cuboid(Multiset.delta(12), 12)
    assert found == (Cuboid(12, 0, ((2, 1), (3, 1))), 1)
    assert first_nonvanishing_cuboid(fiber(12, 2, 0), 12) is None


def test_cuboid_rejects_bad_directions():
    with pytest.raises(PreconditionError):
        Cuboid(12, 0, ((2, 1),))
    with pytest.raises(PreconditionError):
        Cuboid(12, 0, ((2, 2), (3, 1)))


def test_fiber_decompose_recombines():
    A = fiber(30, 2, 1) + fiber(30, 3, 4) - fiber(30, 5, 0)
    decomposition = fiber_decompose(A, 30)
    assert decomposition.recombine() == A
    with pytest.raises(DivisibilityError):
        fiber_decompose(Multiset.delta(30), 30)


def test_nonnegative_two_prime_decomposition(two_scale):
    decomposition = fiber_decompose(two_scale, 36, nonnegative=True)
    assert decomposition.is_nonnegative()
    assert decomposition.recombine() == two_scale
    with pytest.raises(PreconditionError):
        fiber_decompose(fiber(30, 5, 0), 30, nonnegative=True)


def test_two_scale_profile(two_scale, two_scale_profile):
    assert two_scale.total_weight() == 13
    assert two_scale.weight(0) == 2
    profile = two_scale_profile
    assert profile.S_A == (6, 12, 18, 36)
    assert profile.s_A == 36
    assert profile.exp_set(2) == (1, 2) and profile.E(2) == 2
    assert profile.exp_set(3) == (1, 2) and profile.E(3) == 2
    assert profile.divides_all(2) and profile.divides_all(3)
    assert type(profile).from_json(profile.to_json()) == profile


def test_single_prime_split(two_scale_profile):
    assert single_prime_split(two_scale_profile) == (9, 4)


def test_divisor_profile_preconditions(two_scale):
    with pytest.raises(PreconditionError):
        divisor_profile(two_scale, 5)
    # |A| = 13 is prime to L = 30
    with pytest.raises(PreconditionError, match="do not divide L"):
        divisor_profile(two_scale, 2 * 3 * 5)
    assert divisor_profile(two_scale, 13 * 7).S_A == (6, 12, 18, 36)
    with pytest.raises(PreconditionError):
        divisor_profile(Multiset.empty(36), 13)


def test_prime_power_in_profile_is_a_falsification():
    # |A| = 0 lets Phi_3 divide a mask while staying coprime to L
    A = Multiset.from_weights(6, {0: 1, 3: -1})
    with pytest.raises(FalsificationError):
        divisor_profile(A, 2)


def test_good_bad_split_reconstructs_mask(two_scale, two_scale_profile):
    split = good_bad_split(two_scale, 13)
    assert split.reconstruct() == mask_polynomial(two_scale)
    assert set(two_scale_profile.S_A) <= set(split.bad)
    assert all(s % 13 == 0 for s in split.good)
