import numpy as np
import pytest

from cyclo_slv.core import ScaleGuards, divisors
from cyclo_slv.cyclo import divides_by_remainder
from cyclo_slv.exceptions import PreconditionError, ScaleGuardError
from cyclo_slv.multiset import Grid, Multiset, fiber, grid_partition


def test_from_residues_counts_multiplicity():
    A = Multiset.from_residues(10, [1, 11, 3, 3, 3])
    assert A.weights == {1: 2, 3: 3}
    assert A.total_weight() == 5
    assert A.is_nonnegative() and not A.is_set()


def test_zero_weights_are_dropped():
    A = Multiset.from_weights(6, {0: 1, 6: -1, 2: 4})
    assert A.items == ((2, 4),)


def test_arithmetic():
    A = Multiset.from_residues(12, [0, 4, 8])
    B = Multiset.from_residues(12, [0, 6])
    assert (A + B).weights == {0: 2, 4: 1, 6: 1, 8: 1}
    assert (A - A).is_empty()
    assert (-A).total_weight() == -3
    assert A.scale(3).weight(4) == 3
    assert A.scale(0).is_empty()
    assert A.translate(5).support() == (1, 5, 9)


def test_modulus_mismatch():
    with pytest.raises(PreconditionError):
        Multiset.delta(12) + Multiset.delta(6)


def test_convolution_multiplies_masks():
    A = Multiset.from_residues(36, [0, 18])
    B = Multiset.from_residues(36, [0, 9])
    assert A.convolve(B).support() == (0, 9, 18, 27)
    # wraps around mod M
    C = Multiset.from_residues(5, [3]).convolve(Multiset.from_residues(5, [4]))
    assert C.support() == (2,)


def test_reduce_mod():
    A = Multiset.from_residues(12, [0, 3, 6, 9])
    assert A.reduce_mod(6).weights == {0: 2, 3: 2}
    assert A.reduce_mod(12) is A
    with pytest.raises(PreconditionError):
        A.reduce_mod(5)


def test_reduce_exponents_allows_any_modulus():
    A = Multiset.from_residues(12, [0, 7])
    assert A.reduce_exponents(5).weights == {0: 1, 2: 1}


def test_rescale_and_unrescale():
    # support on the grid 2 + 4Z inside Z_48
    A = Multiset.from_residues(48, [2, 6, 18, 42])
    rescaled = A.rescale(2, 2)
    assert rescaled.modulus == 12
    assert rescaled.support() == (0, 1, 4, 10)
    assert rescaled.unrescale(2, 2, 2, 48) == A


def test_rescale_uses_the_base_point():
    A = Multiset.from_residues(48, [4, 8, 12])
    assert A.rescale(2, 2).support() == (0, 1, 2)
    # w'(x) = w(8 + 4x), so 4 sits at x = -1
    assert A.rescale(2, 2, c=8).support() == (0, 1, 11)
    assert A.rescale(2, 2, c=52) == A.rescale(2, 2)
    assert A.rescale(2, 2, c=8).unrescale(2, 2, 8, 48) == A


def test_rescale_rejects_off_grid_support():
    A = Multiset.from_residues(48, [0, 1])
    with pytest.raises(PreconditionError):
        A.rescale(2, 2)


def test_to_dense_and_guard():
    A = Multiset.from_weights(6, {1: 2, 4: -1})
    assert np.array_equal(A.to_dense(), np.array([0, 2, 0, 0, -1, 0]))
    with pytest.raises(ScaleGuardError):
        A.to_dense(ScaleGuards(max_dense_modulus=5))


def test_json_round_trip_and_errors():
    A = Multiset.from_weights(30, {0: 1, 7: -2})
    assert Multiset.from_json(A.to_json()) == A
    with pytest.raises(PreconditionError):
        Multiset.from_json({"modulus": 30})


def test_fiber_and_grid():
    F = fiber(30, 5, 2)
    assert F.support() == (2, 8, 14, 20, 26)
    with pytest.raises(PreconditionError):
        fiber(30, 7)
    grid = Grid(12, 7, 4)
    assert grid.base == 3
    assert grid.points() == [3, 7, 11]
    assert Multiset.from_residues(12, range(12)).restrict_to_grid(grid).support() == (3, 7, 11)


def test_grid_partition_covers_once():
    grids = grid_partition(30, 6)
    assert len(grids) == 6
    covered = sorted(x for g in grids for x in g.points())
    assert covered == list(range(30))
    with pytest.raises(PreconditionError):
        grid_partition(30, 7)


def _random_multiset(rng, modulus, size=4):
    residues = rng.integers(0, modulus, size=size)
    weights = rng.integers(-3, 4, size=size)
    return Multiset.from_weights(modulus, {int(x): int(w) for x, w in zip(residues, weights)})


def test_convolution_is_commutative_and_associative_on_z12():
    # bilinear, so the delta basis covers every multiset of Z_12
    deltas = [Multiset.delta(12, x) for x in range(12)]
    for a in deltas:
        for b in deltas:
            ab = a.convolve(b)
            assert ab == b.convolve(a)
            for c in deltas:
                assert ab.convolve(c) == a.convolve(b.convolve(c))


def test_convolution_matches_cyclic_mask_product(rng):
    for _ in range(100):
        A, B = _random_multiset(rng, 12), _random_multiset(rng, 12)
        product = np.convolve(A.to_dense(), B.to_dense())
        cyclic = product[:12] + np.concatenate([product[12:], [0]])
        assert np.array_equal(A.convolve(B).to_dense(), cyclic)
        assert A.convolve(B) == B.convolve(A)


def test_grid_restrictions_add_back_to_the_multiset(rng):
    for _ in range(20):
        A = _random_multiset(rng, 36, size=10)
        for m in divisors(36):
            pieces = [A.restrict_to_grid(g) for g in grid_partition(36, m)]
            total = Multiset.empty(36)
            for piece in pieces:
                total = total + piece
            assert total == A
            assert sum(len(piece.items) for piece in pieces) == len(A.items)


@pytest.mark.parametrize("M, p, beta", [(36, 3, 1), (36, 2, 1), (48, 2, 2), (72, 2, 2)])
def test_rescale_transfers_divisibility(rng, M, p, beta):
    step = p ** beta
    small = M // step
    primes = [q for q in (2, 3) if small % q == 0]
    for _ in range(25):
        B = Multiset.empty(small)
        for q in primes:
            for _ in range(int(rng.integers(0, 3))):
                B = B + fiber(small, q, int(rng.integers(small)))
        if rng.random() < 0.5:
            B = B + Multiset.delta(small, int(rng.integers(small)))
        if B.is_empty():
            continue
        c = int(rng.integers(0, 2 * M))
        A = B.unrescale(p, beta, c, M)
        assert A.rescale(p, beta, c) == B
        for m in divisors(M):
            if m % step == 0:
                assert divides_by_remainder(A, m) == divides_by_remainder(B, m // step)
