import itertools

import pytest

from cyclo_slv.bounds import (
    BoundReport,
    cuboid_order,
    cuboid_prime_power_bound,
    lam_leung_check,
    multi_prime_bound,
    small_card_candidates,
    small_card_split,
    two_prime_bound,
    two_prime_bound_from_profile,
)
from cyclo_slv.constructions import (
    admissible_instance,
    example_two_scale,
    long_fiber,
    long_fiber_divisors,
    one_scale_many_primes,
    random_fiber_sum,
    three_prime_example,
)
from cyclo_slv.core import divisors
from cyclo_slv.cyclo import divides_cyclotomic, divisor_profile
from cyclo_slv.exceptions import (
    CoprimalityError,
    DivisibilityError,
    FalsificationError,
    PreconditionError,
)
from cyclo_slv.multiset import Multiset, fiber
from cyclo_slv.sums import admissible_structures


def test_lam_leung_representations():
    assert lam_leung_check(1, [2, 3, 5]) is None
    assert lam_leung_check(4, [3, 5]) is None
    assert lam_leung_check(8, [3, 5]) == (1, 1)
    for k in range(2, 40):
        coeffs = lam_leung_check(k, [2, 3, 5])
        assert coeffs is not None
        assert sum(a * p for a, p in zip(coeffs, [2, 3, 5])) == k
    with pytest.raises(PreconditionError):
        lam_leung_check(0, [2, 3])


@pytest.mark.parametrize("p, q", [(2, 3), (3, 2), (2, 5), (3, 5)])
def test_two_prime_bound_is_sharp_on_long_fibers(p, q):
    for k in range(1, 5):
        for alphas in itertools.combinations(range(1, 5), k):
            A = long_fiber(p, q, alphas, 1)
            report = two_prime_bound(A, p, q, long_fiber_divisors(p, q, alphas, 1))
            assert report.satisfied
            assert report.bound == p ** k == A.total_weight()


@pytest.mark.parametrize("e", [1, 2, 3])
def test_two_prime_bound_on_two_scale_sets(e):
    A = example_two_scale(2, 3, e)
    N = A.modulus
    found = [s for s in divisors(N) if s > 1 and divides_cyclotomic(A, s)]
    assert N in found
    for p, q in ((2, 3), (3, 2)):
        report = two_prime_bound(A, p, q, found)
        assert report.satisfied
        assert report.cardinality == 13


def test_two_prime_bound_on_random_fiber_sums(rng):
    pairs = [(2, 3), (3, 2), (2, 5), (5, 2), (3, 5)]
    for _ in range(1000):
        p, q = pairs[int(rng.integers(len(pairs)))]
        size = int(rng.integers(1, 4))
        alphas = sorted(int(a) for a in rng.choice([1, 2, 3], size=size, replace=False))
        beta = int(rng.integers(1, 3))
        A, found = random_fiber_sum(p, q, alphas, beta, rng)
        report = two_prime_bound(A, p, q, found)
        assert report.satisfied, report.to_json()


def test_two_prime_bound_preconditions():
    with pytest.raises(CoprimalityError):
        two_prime_bound(fiber(6, 3, 0), 2, 3, [6])
    with pytest.raises(DivisibilityError):
        two_prime_bound(Multiset.delta(6), 2, 3, [6])
    with pytest.raises(PreconditionError):
        two_prime_bound(Multiset.delta(30), 2, 3, [10])
    with pytest.raises(PreconditionError):
        two_prime_bound(Multiset.delta(6), 2, 2, [6])


def test_two_prime_bound_from_profile(two_scale, two_scale_profile):
    report = two_prime_bound_from_profile(two_scale, two_scale_profile, 2)
    assert report.bound == 4
    assert report.satisfied
    assert report.to_json()["satisfied"] is True


def test_cuboid_order_and_prime_power_bound():
    # {0, 3, 6, 9} in Z_12, divisible by Phi_6 and Phi_12
    A = long_fiber(2, 3, [1, 2], 1)
    assert A.support() == (0, 3, 6, 9)
    assert cuboid_order(A, 3, 2, [1, 2])
    report = cuboid_prime_power_bound(A, 3, 2, [1, 2])
    assert report.bound == 4 == report.cardinality
    assert report.witness is not None
    assert report.witness_value % 4 == 0 and report.witness_value != 0
    assert "witness" in report.to_json()


def test_cuboid_bound_preconditions():
    A = long_fiber(2, 3, [1, 2], 1)
    with pytest.raises(PreconditionError):
        cuboid_order(A, 6, 2, [1])
    with pytest.raises(PreconditionError):
        cuboid_order(A, 3, 2, [2, 1])
    with pytest.raises(DivisibilityError):
        cuboid_order(Multiset.delta(12), 3, 2, [1])
    # covers Z_6 and Z_3 uniformly, so Phi_3 divides it
    B = fiber(12, 3, 0) + fiber(12, 3, 1)
    with pytest.raises(PreconditionError):
        cuboid_prime_power_bound(B, 3, 2, [1])


def test_multi_prime_bound_on_three_prime_example():
    A = three_prime_example(2, 3, 5, M=210)
    assert A.is_set() and A.total_weight() == 31
    report = multi_prime_bound(A, 3, [2, 5])
    assert report.bound == 10
    assert report.satisfied
    assert report.witness_value % 10 == 0


def test_multi_prime_bound_on_one_scale_set():
    A = one_scale_many_primes()
    report = multi_prime_bound(A, 13, [5])
    assert report.bound == 5
    assert report.cardinality == 18


def test_multi_prime_bound_preconditions():
    A = three_prime_example(2, 3, 5, M=210)
    with pytest.raises(PreconditionError):
        multi_prime_bound(A, 3, [2, 2])
    with pytest.raises(PreconditionError):
        multi_prime_bound(A, 4, [2, 5])
    with pytest.raises(DivisibilityError):
        multi_prime_bound(Multiset.delta(210), 3, [2])
    with pytest.raises(PreconditionError):
        multi_prime_bound(Multiset.from_residues(30, range(30)), 3, [5])


def test_bound_report_falsification():
    report = BoundReport(name="demo", bound=8, cardinality=5)
    assert not report.satisfied
    with pytest.raises(FalsificationError) as info:
        report.require_satisfied()
    assert info.value.details["bound"] == 8
    assert BoundReport(name="demo", bound=5, cardinality=5).require_satisfied().satisfied


# Z_N chosen coprime to |A| and large enough for disjoint fibers
SMALL_CARD_MODULI = {5: 42, 7: 30, 8: 105, 9: 70, 10: 63}

# p_1 per admissible structure, in admissible_structures order
SMALL_CARD_PRIMES = {5: [3], 7: [2, 2, 2], 8: [5], 9: [5, 7], 10: [7]}


@pytest.mark.parametrize("cardinality", sorted(SMALL_CARD_MODULI))
def test_small_card_split_on_admissible_structures(cardinality, rng):
    N = SMALL_CARD_MODULI[cardinality]
    structures = admissible_structures(cardinality, N)
    assert len(structures) == len(SMALL_CARD_PRIMES[cardinality])
    for structure, expected in zip(structures, SMALL_CARD_PRIMES[cardinality]):
        for generator in (None, rng):
            A = admissible_instance(structure, N, rng=generator)
            assert A.is_set() and A.total_weight() == cardinality
            profile = divisor_profile(A, cardinality)
            p = small_card_split(A, profile)
            assert p == expected
            E = profile.E(p)
            assert p ** E < cardinality
            assert cardinality % p != 0
            assert all(s % p == 0 for s in profile.S_A)


def test_small_card_split_outside_range():
    A = one_scale_many_primes()
    profile = divisor_profile(A, 324)
    assert profile.S_A == (65, 77)
    assert small_card_candidates(A, profile) == []
    assert small_card_split(A, profile, strict=False) is None
    with pytest.raises(PreconditionError):
        small_card_split(A, profile)


def test_small_card_split_prefers_larger_direction():
    A = fiber(42, 2, 0) + fiber(42, 3, 1)
    profile = divisor_profile(A, 5)
    assert [p for p, _ in small_card_candidates(A, profile)] == [2, 3]
    assert small_card_split(A, profile) == 3
