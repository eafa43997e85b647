import pytest

from cyclo_slv.constructions import xi_example
from cyclo_slv.exceptions import PreconditionError
from cyclo_slv.multiset import Multiset, fiber
from cyclo_slv.sums import (
    MinimalTemplate,
    VanishingSum,
    admissible_structures,
    canonical_orbit,
    canonical_translate,
    candidate_templates,
    census,
    census_summary,
    classify_minimal,
    construct_Rp,
    construct_RpkRq,
    decompose_minimal,
    enumerate_vanishing,
    find_vanishing_part,
    is_minimal,
)


@pytest.fixture(scope="module")
def census_30():
    return census(30, 7, n_jobs=1)


def test_templates():
    assert MinimalTemplate(5).label == "R_5"
    template = MinimalTemplate(5, 3, 2)
    assert template.label == "(R_5:2R_3)"
    assert template.expected_weight == 7
    assert template.to_json()["kind"] == "RpkRq"
    assert MinimalTemplate(5, 3, 1) in candidate_templates(30, 6)
    assert candidate_templates(30, 4) == []


def test_construct_Rp_and_RpkRq():
    assert construct_Rp(30, 5, 2).multiset == fiber(30, 5, 2)
    v = construct_RpkRq(30, 5, 3, 2)
    assert v.weight == 7
    assert v.multiset.is_set()
    for k in (1, 2, 3, 4):
        assert construct_RpkRq(30, 5, 3, k).weight == 5 + 3 * k - 2 * k
    assert construct_RpkRq(60, 5, 3, 1, choices=(3,), base=7).weight == 6


@pytest.mark.parametrize(
    "args, kwargs",
    [
        ((15, 5, 3, 1), {}),
        ((30, 5, 5, 1), {}),
        ((30, 5, 3, 5), {}),
        ((30, 5, 3, 2), {"choices": (1, 1)}),
        ((30, 5, 3, 1), {"choices": (7,)}),
    ],
)
def test_construct_RpkRq_rejects(args, kwargs):
    with pytest.raises(PreconditionError):
        construct_RpkRq(*args, **kwargs)


def test_xi_is_minimal_and_classified():
    v = VanishingSum(xi_example())
    assert v.weight == 7
    assert is_minimal(v)
    assert classify_minimal(v) == MinimalTemplate(5, 3, 2)


def test_vanishing_sum_validation():
    with pytest.raises(PreconditionError):
        VanishingSum(Multiset.delta(30))
    with pytest.raises(PreconditionError):
        VanishingSum(Multiset.empty(30))
    with pytest.raises(PreconditionError):
        VanishingSum(-fiber(30, 2))


def test_non_minimal_sums_decompose():
    v = VanishingSum(fiber(30, 2, 0) + fiber(30, 3, 1))
    assert not is_minimal(v)
    assert find_vanishing_part(v).total_weight() == 2
    parts = decompose_minimal(v)
    assert sorted(p.weight for p in parts) == [2, 3]
    assert all(is_minimal(p) for p in parts)
    with pytest.raises(PreconditionError):
        classify_minimal(v)


def test_canonical_forms():
    A = Multiset.from_residues(30, [3, 8, 20])
    canonical = canonical_translate(A)
    assert 0 in canonical.support()
    assert canonical_translate(A.translate(11)) == canonical
    # 7 is a unit mod 30
    B = Multiset.from_residues(30, [7 * x % 30 for x in A.support()])
    assert canonical_orbit(B) == canonical_orbit(A)


def test_enumerate_small_modulus():
    sums = enumerate_vanishing(6, 3, n_jobs=1)
    assert [v.residues() for v in sums] == [(0, 3), (0, 2, 4)]
    assert len(enumerate_vanishing(6, 3, up_to_translation=False, n_jobs=1)) == 5
    with pytest.raises(PreconditionError):
        enumerate_vanishing(1, 3)


def test_enumeration_agrees_with_brute_force():
    found = {v.multiset.items for v in enumerate_vanishing(12, 4, up_to_translation=False, n_jobs=1)}
    expected = set()
    for a in range(12):
        for b in range(a, 12):
            for c in range(b, 12):
                for d in range(c, 12):
                    for residues in ((a, b), (a, b, c), (a, b, c, d)):
                        A = Multiset.from_residues(12, residues)
                        try:
                            VanishingSum(A)
                        except PreconditionError:
                            continue
                        expected.add(A.items)
    assert found == expected


def test_census_minimal_weights(census_30):
    minimal = [e for e in census_30 if e.minimal]
    assert {e.sum.weight for e in minimal} == {2, 3, 5, 6, 7}
    assert {e.label for e in minimal if e.sum.weight == 7} == {"(R_5:2R_3)"}
    assert {e.label for e in minimal if e.sum.weight == 2} == {"R_2"}
    assert all(e.template is not None for e in minimal)
    assert all(e.label == "non-minimal" for e in census_30 if not e.minimal)


def test_census_representations(census_30):
    for entry in census_30:
        assert sum(a * p for a, p in zip(entry.representation, (2, 3, 5))) == entry.sum.weight
    data = census_30[0].to_json()
    assert set(data) >= {"N", "weight", "residues", "minimal", "template", "lam_leung"}


def test_census_summary(census_30):
    counts = census_summary(census_30)
    assert sum(counts.values()) == len(census_30)
    assert counts[(2, "R_2")] == 1
    assert counts[(3, "R_3")] == 1


@pytest.mark.parametrize("N", [6, 12, 30])
def test_lam_leung_holds(N):
    entries = census(N, 6, n_jobs=1)
    assert entries
    assert all(e.representation is not None for e in entries)


def test_admissible_structures():
    assert len(admissible_structures(7)) == 3
    assert len(admissible_structures(7, 30)) == 3
    only = admissible_structures(7, 10)
    assert [s.label for s in only] == ["1x F_2 + 1x F_5"]
    assert admissible_structures(4) == []
    assert [s.label for s in admissible_structures(9)] == ["2x F_2 + 1x F_5", "1x F_2 + 1x F_7"]
    assert admissible_structures(7)[2].primes == (2, 3, 5)
    with pytest.raises(PreconditionError):
        admissible_structures(11)
