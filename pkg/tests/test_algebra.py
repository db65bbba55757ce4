import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import null_space

from sectorlab.algebra import (
    FiniteDimAlgebra,
    Projection,
    block_diagonal_algebra,
    center,
    commutant,
    defining_representation,
    diagonal_algebra,
    direct_sum,
    full_matrix_algebra,
    generate_algebra,
    intertwiner_space,
    irreducible_representation,
    join,
    minimal_central_projections,
    reduced_universal_representation,
    representation,
    represented_algebra,
    scalar_algebra,
    tensor_product,
)
from sectorlab.errors import InputError, NotSubalgebra
from sectorlab.linalg import subspace_distance
from sectorlab.randomized import random_algebra, random_element, random_generated_algebra, random_unitary


def commutant_dim_bruteforce(mats, n):
    """Dimension of {X : [X, a] = 0 for all a}, from scipy's null space."""
    eye = np.eye(n)
    rows = [np.kron(a, eye) - np.kron(eye, a.T) for a in mats]
    return null_space(np.vstack(rows)).shape[1]


def test_diag_122_structure():
    a = generate_algebra([np.diag([1.0, 2.0, 2.0])], 3)
    assert a.structure == ((1, 1), (1, 2))
    np.testing.assert_allclose(a.central_projections[0], np.diag([1, 0, 0]), atol=1e-12)
    np.testing.assert_allclose(a.central_projections[1], np.diag([0, 1, 1]), atol=1e-12)


def test_flip_generates_commutative_pair():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    a = generate_algebra([sx], 2)
    assert a.dim == 2
    assert a.is_commutative
    assert a.structure == ((1, 1), (1, 1))


def test_full_and_scalar():
    assert full_matrix_algebra(3).structure == ((3, 1),)
    assert full_matrix_algebra(3).is_factor
    assert scalar_algebra(3).structure == ((1, 3),)
    assert diagonal_algebra(4).dim == 4


def test_missing_identity_is_rejected():
    with pytest.raises(NotSubalgebra):
        FiniteDimAlgebra.from_span([np.diag([1.0, 0.0])], 2)


def test_not_subalgebra_is_input_error():
    assert issubclass(NotSubalgebra, InputError)


@pytest.mark.parametrize("structure", [[(2, 1)], [(1, 2)], [(2, 1), (3, 1)], [(1, 1), (2, 2)], [(2, 3), (1, 1), (1, 2)]])
def test_commutant_swaps_structure(structure):
    a = block_diagonal_algebra(structure)
    c = commutant(a)
    assert sorted(c.structure) == sorted((m, n) for n, m in structure)
    assert c.dim == commutant_dim_bruteforce(a.basis, a.ambient_dim)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31))
def test_bicommutant_random_generated(seed):
    a = random_generated_algebra(seed, max_dim=8)
    assert subspace_distance(commutant(commutant(a)).basis, a.basis) < 1e-9
    assert a.closure_defect() < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31))
def test_central_projections_partition_identity(seed):
    a = random_algebra(seed, max_dim=8)
    zs = a.central_projections
    np.testing.assert_allclose(zs.sum(axis=0), np.eye(a.ambient_dim), atol=1e-9)
    for i, j in itertools.product(range(len(zs)), repeat=2):
        expected = zs[i] if i == j else np.zeros_like(zs[i])
        np.testing.assert_allclose(zs[i] @ zs[j], expected, atol=1e-9)
    # ranks are n_k m_k
    ranks = [int(round(np.trace(z).real)) for z in zs]
    assert ranks == [n * m for n, m in a.structure]


def test_center_of_algebra_and_commutant_agree():
    a = random_algebra(3, structure=[(2, 1), (1, 2)])
    assert subspace_distance(center(a).basis, center(commutant(a)).basis) < 1e-9
    assert len(minimal_central_projections(a)) == 2


def test_blocks_round_trip(rng):
    a = block_diagonal_algebra([(2, 1), (1, 2)])
    x = random_element(a, rng)
    np.testing.assert_allclose(a.from_blocks(a.blocks(x)), x, atol=1e-12)


def test_canonical_order_is_unitary_invariant():
    a = random_algebra(5, structure=[(1, 2), (2, 1), (1, 1)])
    b = random_algebra(6, structure=[(1, 1), (1, 2), (2, 1)])
    assert a.structure == b.structure


def test_tensor_product_and_join():
    a = full_matrix_algebra(2)
    d = diagonal_algebra(2)
    t = tensor_product(a, d)
    assert t.structure == ((2, 1), (2, 1))
    j = join(d, commutant(d))
    assert j.structure == ((1, 1), (1, 1))


def test_projection_validation():
    assert Projection(np.diag([1.0, 0.0, 1.0])).rank == 2
    with pytest.raises(InputError):
        Projection(np.diag([0.5, 1.0]))


@pytest.mark.parametrize("m1,m2", [((1, 0), (2, 1)), ((2, 1), (1, 3)), ((0, 1), (1, 0))])
def test_intertwiner_dimension_is_sum_of_multiplicity_products(m1, m2):
    a = block_diagonal_algebra([(2, 1), (1, 1)])
    hom = intertwiner_space(representation(a, m1), representation(a, m2))
    assert len(hom) == sum(x * y for x, y in zip(m1, m2))


def test_intertwiners_actually_intertwine():
    a = block_diagonal_algebra([(2, 1), (1, 1)])
    p1, p2 = representation(a, (1, 2)), representation(a, (2, 1))
    for t in intertwiner_space(p1, p2):
        for x, y in zip(p1.matrices, p2.matrices):
            assert np.linalg.norm(t @ x - y @ t) < 1e-9


def test_representation_multiplicities_recovered():
    a = random_algebra(8, structure=[(2, 1), (1, 1)])
    # canonical order puts the 1-dim block first
    assert a.structure == ((1, 1), (2, 1))
    rep = representation(a, (0, 3))
    assert rep.dim == 6
    assert rep.support == frozenset({1})
    assert rep.homomorphism_defect() < 1e-9
    assert defining_representation(a).multiplicities == (1, 1)
    assert reduced_universal_representation(a).dim == 3


def test_direct_sum_and_represented_algebra():
    a = block_diagonal_algebra([(2, 1), (1, 1)])
    s = direct_sum(irreducible_representation(a, 0), irreducible_representation(a, 1, copies=2))
    assert tuple(s.multiplicities) == (1, 2)
    # block 0 is C, block 1 is M2 with two copies
    assert represented_algebra(s).structure == ((1, 1), (2, 2))


def test_unitary_conjugation_preserves_structure():
    base = block_diagonal_algebra([(2, 2), (1, 1)])
    u = random_unitary(base.ambient_dim, 11)
    conj = FiniteDimAlgebra.from_span(np.einsum("ij,kjl,ml->kim", u, base.basis, u.conj()), base.ambient_dim)
    assert conj.structure == base.structure
