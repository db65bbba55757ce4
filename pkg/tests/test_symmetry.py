import numpy as np
import pytest

from sectorlab.algebra import block_diagonal_algebra, diagonal_algebra, full_matrix_algebra, representation
from sectorlab.errors import InvalidAction
from sectorlab.groups import FiniteAbelianGroup, TableGroup
from sectorlab.symmetry import (
    GroupAction,
    augmented_algebra,
    averaging_projector,
    breaking_analysis,
    character_projections,
    crossed_product,
    dhr_toy,
    fixed_point_algebra,
    sector_permutation,
)

Z2 = FiniteAbelianGroup([2])
Z3 = FiniteAbelianGroup([3])


def block_swap(n):
    """Permutation of C^{2n} exchanging the two halves."""
    return list(range(n, 2 * n)) + list(range(n))


def inner_z2_m2():
    return GroupAction.from_generators(full_matrix_algebra(2), Z2, [np.diag([1.0, -1.0])])


def swap_m2_m2():
    f = block_diagonal_algebra([(2, 1), (2, 1)])
    return f, GroupAction.from_permutations(f, Z2, [list(range(4)), block_swap(2)])


def mixed_action():
    f = block_diagonal_algebra([(2, 1), (2, 1), (2, 1)])
    u = np.zeros((6, 6))
    u[0, 0], u[1, 1] = 1, -1
    u[2:4, 4:6] = np.eye(2)
    u[4:6, 2:4] = np.eye(2)
    return f, GroupAction.from_generators(f, Z2, [u])


def test_inner_action_is_unbroken():
    act = inner_z2_m2()
    rep = breaking_analysis(act.algebra, act)
    assert rep.verdict == "unbroken"
    assert rep.ergodic_components == [[0]]


def test_block_swap_is_broken_with_one_orbit():
    f, act = swap_m2_m2()
    rep = breaking_analysis(f, act)
    assert rep.verdict == "broken"
    assert rep.ergodic_components == [[0, 1]]
    assert rep.sector_permutations["1"] == (1, 0)
    assert rep.stabilizer == [0]


def test_swap_with_all_weight_on_one_sector_still_broken():
    f, act = swap_m2_m2()
    assert breaking_analysis(f, act, weights=[1.0, 0.0]).verdict == "broken"


def test_mixed_example_components():
    f, act = mixed_action()
    rep = breaking_analysis(f, act)
    assert rep.ergodic_components == [[0], [1, 2]]
    assert rep.component_verdicts == ["unbroken", "broken"]
    d = rep.as_dict()
    assert d["verdict"] == "broken"


def test_weights_confined_to_fixed_sector_are_unbroken():
    f, act = mixed_action()
    assert breaking_analysis(f, act, weights=[1.0, 0.0, 0.0]).verdict == "unbroken"


def test_representation_must_carry_the_action():
    f, act = swap_m2_m2()
    with pytest.raises(InvalidAction):
        breaking_analysis(f, act, representation(f, [1, 0]))


def test_implementability_tracks_multiplicities():
    f, act = swap_m2_m2()
    rep = breaking_analysis(f, act, representation(f, [1, 2]))
    assert rep.unitarily_implementable == {"0": True, "1": False}


def test_non_preserving_unitary_rejected():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    with pytest.raises(InvalidAction):
        GroupAction.from_unitaries(diagonal_algebra(2), Z2, [np.eye(2), h])


def test_non_homomorphic_unitaries_rejected():
    f = full_matrix_algebra(3)
    w = np.diag([1, np.exp(2j * np.pi / 3), 1])
    with pytest.raises(InvalidAction):
        GroupAction.from_unitaries(f, Z3, [np.eye(3), w, w])


def test_fixed_points_of_diagonal_z3_on_m3():
    w = np.exp(2j * np.pi / 3)
    act = GroupAction.from_generators(full_matrix_algebra(3), Z3, [np.diag([1, w, w * w])])
    fixed = fixed_point_algebra(act.algebra, act)
    assert fixed.structure == ((1, 1), (1, 1), (1, 1))
    p = averaging_projector(act)
    np.testing.assert_allclose(p @ p, p, atol=1e-12)


def test_sector_permutation_identity_for_trivial_action():
    f = block_diagonal_algebra([(1, 1), (2, 1)])
    act = GroupAction.trivial(f, Z3)
    assert all(sector_permutation(f, act, g) == (0, 1) for g in range(3))


@pytest.mark.parametrize("which", ["inner", "swap", "mixed"])
def test_crossed_product_dimension(which):
    if which == "inner":
        act = inner_z2_m2()
        f = act.algebra
    elif which == "swap":
        f, act = swap_m2_m2()
    else:
        f, act = mixed_action()
    cp = crossed_product(f, act)
    assert cp.dim == act.order * f.dim
    assert cp.ambient_dim == act.order * f.ambient_dim


def test_dhr_m2_z2():
    act = inner_z2_m2()
    d = dhr_toy(act.algebra, act)
    assert d["pi_a_equals_u_commutant"] < 1e-9
    assert d["u_equals_pi_a_commutant"] < 1e-9
    assert d["center_dim"] == 2
    assert d["labels_bijective"]


def test_character_projections_cover_identity():
    w = np.exp(2j * np.pi / 3)
    act = GroupAction.from_generators(full_matrix_algebra(3), Z3, [np.diag([1, w, w * w])])
    total = sum(p for _, p in character_projections(act))
    np.testing.assert_allclose(total, np.eye(3), atol=1e-12)


def test_dhr_requires_abelian_group():
    s3 = TableGroup.from_permutations([[1, 0, 2], [1, 2, 0]])
    # elements of a permutation group are labelled by their permutations
    act = GroupAction.from_permutations(full_matrix_algebra(3), s3, [list(p) for p in s3.labels])
    with pytest.raises(InvalidAction):
        dhr_toy(act.algebra, act)


def test_augmented_algebra_implements_swap():
    f, act = swap_m2_m2()
    aug = augmented_algebra(f, act)
    assert aug.report["implemented"]
    assert aug.report["implementer_residual"] < 1e-9
    assert aug.report["center_dim"] == 4
    assert len(aug.cosets) == 2


def test_augmented_algebra_rejects_breaking_subgroup():
    f, act = swap_m2_m2()
    with pytest.raises(InvalidAction):
        augmented_algebra(f, act, subgroup=[(0,), (1,)])


def test_augmented_algebra_trivial_quotient():
    act = inner_z2_m2()
    assert augmented_algebra(act.algebra, act).report["trivial_quotient"]
