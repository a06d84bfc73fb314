import pytest

from dgnerve.amod import affine_line, line_bundle_sheaf, projective_space, skyscraper_sheaf
from dgnerve.dgmod import DegreeBox
from dgnerve.oracle import cech_oracle, koszul_ext_on_line, line_bundle_cohomology_at

P1 = projective_space(1)
P2 = projective_space(2)


@pytest.mark.parametrize("d", [0, 1, 2, 3])
def test_sections_of_nonnegative_twists(d):
    table, conv = cech_oracle(line_bundle_sheaf(P1, [d]), DegreeBox.cube(1, 2), mode="h")
    assert conv and table == {0: d + 1}


def test_minus_two_has_h1():
    table, conv = cech_oracle(line_bundle_sheaf(P1, [-2]), DegreeBox.cube(1, 2), mode="h")
    assert conv and table == {1: 1}


def test_structure_sheaf_of_p2():
    table, conv = cech_oracle(line_bundle_sheaf(P2, [0]), DegreeBox.cube(2, 1), mode="h")
    assert conv and table == {0: 1}


def test_canonical_bundle_of_p2():
    table, _ = cech_oracle(line_bundle_sheaf(P2, [-3]), DegreeBox.cube(2, 1), mode="h")
    assert table == {2: 1}


def test_ext_of_sum():
    table, conv = cech_oracle(line_bundle_sheaf(P1, [0, 2]), DegreeBox.cube(1, 2))
    assert conv and table == {0: 5, 1: 1}


def test_single_weight():
    # O(2) at weight (1,): the monomial t lives on both charts
    assert line_bundle_cohomology_at(P1, {0: (0,), 1: (2,)}, (1,)) == {0: 1, 1: 0}


def test_koszul_ext():
    assert koszul_ext_on_line() == {0: 1, 1: 1}


def test_rejects_non_line_bundles():
    with pytest.raises(ValueError):
        cech_oracle(skyscraper_sheaf(affine_line()), DegreeBox.cube(1, 1))
