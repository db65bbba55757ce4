import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectorlab.algebra import (
    block_diagonal_algebra,
    diagonal_algebra,
    full_matrix_algebra,
    representation,
    represented_algebra,
)
from sectorlab.errors import NotFaithful, NotStandard
from sectorlab.modular import (
    biorth_identities,
    central_support,
    check_tomita,
    disjoint_complement,
    galois_identities,
    is_standard,
    quasi_equiv_via_biorth,
    standard_form,
    standard_representation,
    standard_universality,
    tomita_passes,
)
from sectorlab.randomized import random_element, random_faithful_state
from sectorlab.states import State, quasi_equivalent


def ratio_spectrum(rho):
    p = np.linalg.eigvalsh(rho)
    return np.sort([a / b for a in p for b in p])


def test_diag_07_03_spectrum():
    md = standard_form(full_matrix_algebra(2), State(np.diag([0.7, 0.3])))
    np.testing.assert_allclose(md.spectrum(), [3 / 7, 1, 1, 7 / 3], atol=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([2, 3]))
def test_spectrum_matches_eigenvalue_ratios(seed, n):
    omega = random_faithful_state(n, seed)
    md = standard_form(full_matrix_algebra(n), omega)
    np.testing.assert_allclose(md.spectrum(), ratio_spectrum(omega.density), rtol=1e-9)


def test_tracial_state_has_trivial_delta():
    a = block_diagonal_algebra([(2, 1), (3, 1)])
    md = standard_form(a, State(np.eye(5) / 5))
    assert np.linalg.norm(md.delta - np.eye(md.dim)) < 1e-12


@pytest.mark.parametrize("structure", [[(2, 1)], [(3, 1)], [(2, 1), (3, 1)], [(1, 1), (1, 1)]])
def test_tomita_identities(structure, rng):
    a = block_diagonal_algebra(structure)
    omega = random_faithful_state(a.ambient_dim, rng)
    rep = check_tomita(standard_form(a, omega))
    assert tomita_passes(rep, 1e-8)


def test_state_value_and_j_fix_omega(rng):
    a = full_matrix_algebra(3)
    omega = random_faithful_state(3, rng)
    md = standard_form(a, omega)
    x = random_element(a, rng)
    # the cyclic vector reproduces the state in the standard representation
    assert abs(md.state_value(md.representation.image(x)) - omega.expect(x)) < 1e-12
    assert np.linalg.norm(md.apply_j(md.omega) - md.omega) < 1e-12
    assert np.linalg.norm(md.apply_j(md.apply_j(md.omega + 1j)) - (md.omega + 1j)) < 1e-12


def test_wrong_conjugation_breaks_commutant_check():
    import dataclasses

    md = standard_form(full_matrix_algebra(2), State(np.diag([0.7, 0.3])))
    fake = dataclasses.replace(md, j_matrix=np.eye(md.dim))
    assert check_tomita(fake)["jmj_commutant"] > 0.5


def test_non_faithful_state_is_rejected():
    with pytest.raises(NotFaithful):
        standard_form(full_matrix_algebra(2), State(np.diag([1.0, 0.0])))


@pytest.mark.parametrize("structure", [[(2, 1)], [(1, 1), (1, 1)], [(2, 1), (3, 1)]])
def test_galois_identities(structure):
    a = block_diagonal_algebra(structure)
    md = standard_form(a, random_faithful_state(a.ambient_dim, 3))
    m = represented_algebra(md.representation)
    g = galois_identities(m)
    assert g["join_equals_center_commutant"] < 1e-9
    assert g["fixed_points_equal_m"] < 1e-9
    assert g["factor_iff_ergodic"]


def test_d2_join_is_d2_in_standard_form():
    a = diagonal_algebra(2)
    md = standard_form(a, State(np.diag([0.4, 0.6])))
    g = galois_identities(represented_algebra(md.representation))
    assert g["join_structure"] == [[1, 1], [1, 1]]
    assert not g["join_is_everything"]


def patterns(k):
    return [set(s) for r in range(k + 1) for s in itertools.combinations(range(k), r)]


def test_support_identities_exhaustive():
    a = block_diagonal_algebra([(1, 1), (2, 1), (1, 1)])
    k = a.num_sectors
    one = np.eye(a.ambient_dim)
    for s in patterns(k):
        pi = representation(a, [2 if i in s else 0 for i in range(k)])
        ids = biorth_identities(pi)
        assert ids["complement_is_c_perp"] and ids["bicomplement_is_c"]
        assert ids["triple_equals_single"] and ids["contained_in_bicomplement"]
        c = central_support(pi).matrix
        expected = sum((a.central_projections[i] for i in s), np.zeros_like(one))
        np.testing.assert_allclose(c, expected, atol=1e-12)
        assert disjoint_complement(pi).support == frozenset(range(k)) - frozenset(s)


def test_quasi_equivalence_via_bicomplement_matches_intertwiners():
    a = block_diagonal_algebra([(1, 1), (2, 1)])
    for s1, s2 in itertools.product(patterns(2), repeat=2):
        p1 = representation(a, [1 if i in s1 else 0 for i in range(2)])
        p2 = representation(a, [3 if i in s2 else 0 for i in range(2)])
        assert quasi_equiv_via_biorth(p1, p2) == quasi_equivalent(p1, p2) == (s1 == s2)


def test_standard_universality_m2():
    a = full_matrix_algebra(2)
    rep = standard_universality(representation(a, [1]), standard_representation(a))
    assert (rep["rep_dim"], rep["std_dim"]) == (2, 2)
    assert rep["factorization_residual"] < 1e-9
    assert rep["factor_intertwining_residual"] < 1e-9


def test_standard_universality_block_algebra():
    a = block_diagonal_algebra([(1, 1), (2, 1)])
    rep = standard_universality(representation(a, [3, 1]), standard_representation(a))
    assert rep["dims_equal"]
    assert rep["num_eta"] == 4
    assert rep["factorization_residual"] < 1e-9


def test_standard_universality_needs_standard_target():
    a = full_matrix_algebra(2)
    assert is_standard(standard_representation(a))
    with pytest.raises(NotStandard):
        standard_universality(representation(a, [1]), representation(a, [1]))
