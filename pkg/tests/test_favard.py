from fractions import Fraction as F

import numpy as np
import pytest

from cyclo_slv.core import ScaleGuards
from cyclo_slv.exceptions import PreconditionError, ScaleGuardError
from cyclo_slv.favard import (
    CantorProductSpec,
    favard_length,
    favard_table,
    iterate_points,
    phi_bad,
    phi_bad_for,
    point_array,
    projection_length,
    slv_value_check,
)
from cyclo_slv.slv import build_gamma_A, multiscale_gamma


@pytest.fixture(scope="module")
def four_corner():
    return CantorProductSpec.four_corner()


def test_spec_validation():
    assert CantorProductSpec((3, 0), (1, 0)).A == (0, 3)
    assert CantorProductSpec.four_corner().L == 4
    for digits in ((0,), (1, 1), (-1, 2)):
        with pytest.raises(PreconditionError):
            CantorProductSpec(digits, (0, 1))


def test_iterate_points(four_corner):
    assert set(iterate_points(four_corner, 1)) == {(0, 0), (0, F(3, 4)), (F(3, 4), 0), (F(3, 4), F(3, 4))}
    assert len(iterate_points(four_corner, 2)) == 16
    assert iterate_points(four_corner, 0) == [(0, 0)]
    with pytest.raises(ScaleGuardError):
        iterate_points(four_corner, 4, ScaleGuards(max_points=100))


def test_each_point_lies_near_its_parent(four_corner):
    for n in range(4):
        parents = point_array(four_corner, n)
        children = point_array(four_corner, n + 1)
        gaps = np.abs(children[:, None, :] - parents[None, :, :]).max(axis=2).min(axis=1)
        assert (gaps < four_corner.L ** (-n)).all()


def test_projection_length_exact_axes(four_corner):
    points = iterate_points(four_corner, 1)
    assert projection_length(points, 0, F(1, 4)) == 1
    assert projection_length(points, "pi/2", F(1, 4)) == 1
    assert projection_length(iterate_points(four_corner, 2), 0, F(1, 16)) == F(1, 2)
    assert projection_length(point_array(four_corner, 1), 0.0, 0.25) == pytest.approx(1.0)


def test_projection_length_basic_properties(four_corner):
    assert projection_length([(F(0), F(0))], 0.3, 0.5) == pytest.approx(1.0)
    points = point_array(four_corner, 3)
    lengths = [projection_length(points, 0.7, r) for r in (0.001, 0.01, 0.05)]
    assert lengths == sorted(lengths)
    assert lengths[0] <= 2 * 0.001 * len(points)
    with pytest.raises(PreconditionError):
        projection_length(points, 0.7, 0)


def test_favard_table_decays(four_corner):
    estimates = favard_table(four_corner, range(1, 7), n_jobs=1)
    values = [e.value for e in estimates]
    assert all(e.error_bound < 1e-3 for e in estimates)
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    assert values[-1] < values[0]
    assert [e.points for e in estimates] == [4 ** n for n in range(1, 7)]
    assert set(estimates[0].to_json()) == {"n", "nodes", "favard", "error_bound", "points"}


def test_node_doubling_stays_within_bound(four_corner):
    for n in (1, 2):
        coarse = favard_length(four_corner, n, nodes=256, n_jobs=1)
        fine = favard_length(four_corner, n, nodes=512, n_jobs=1)
        assert abs(coarse.value - fine.value) < coarse.error_bound


def test_parallel_quadrature_matches_serial(four_corner):
    serial = favard_length(four_corner, 3, nodes=256, n_jobs=1, chunk_size=32)
    parallel = favard_length(four_corner, 3, nodes=256, n_jobs=2, chunk_size=32)
    assert parallel.value == pytest.approx(serial.value, rel=1e-12)
    with pytest.raises(PreconditionError):
        favard_length(four_corner, 1, nodes=8)


def test_phi_bad_zeros_and_symmetry(two_scale, two_scale_profile):
    S = two_scale_profile.S_A
    assert phi_bad(S, F(1, 6)) == 0.0
    assert phi_bad(S, F(5, 36)) == 0.0
    assert phi_bad(S, F(7, 6)) == 0.0
    assert phi_bad(S, 0.0) == pytest.approx(1.0)
    assert phi_bad_for(two_scale, 13, F(1, 12)) == 0.0
    xs = np.linspace(-1, 1, 101)
    assert np.allclose(phi_bad(S, xs), phi_bad(S, xs + 1))
    assert np.allclose(phi_bad(S, xs), phi_bad(S, -xs))


@pytest.mark.parametrize("m", [1, 2])
def test_slv_value_check(two_scale, two_scale_profile, rng, m):
    cert = build_gamma_A(two_scale, two_scale_profile)
    result = multiscale_gamma(cert, cert, F(1), m=m, L=13, R=2)
    report = slv_value_check(cert, cert, result, samples=2000, rng=rng, phi_samples=1024)
    assert report.ok
    assert report.min_product >= report.c ** (2 * m)
    assert report.to_json()["samples"] == 2000
