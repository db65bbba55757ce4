import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from sectorlab.linalg import (
    cluster_sorted,
    flat_basis,
    hermitian_power,
    intertwiner_gram,
    gram_nullspace,
    orthonormalize,
    permutation_matrix,
    subspace_distance,
)
from sectorlab.randomized import random_unitary


def test_orthonormalize_drops_dependent_rows():
    v = np.array([[1, 0, 0], [2, 0, 0], [0, 1, 0], [1e-15, 0, 0]], dtype=complex)
    q = orthonormalize(v)
    assert q.shape == (2, 3)
    np.testing.assert_allclose(q @ q.conj().T, np.eye(2), atol=1e-14)


def test_orthonormalize_drops_tiny_noise_rows():
    v = np.array([[1, 0], [0, 1e-17]], dtype=complex)
    assert len(orthonormalize(v)) == 1


def test_subspace_distance_identical_spans_is_tiny(rng):
    mats = rng.normal(size=(4, 3, 3)) + 1j * rng.normal(size=(4, 3, 3))
    mix = rng.normal(size=(4, 4))
    other = np.einsum("ab,bij->aij", mix, mats)
    assert subspace_distance(mats, other) < 1e-13


def test_subspace_distance_orthogonal_lines():
    a = np.array([[1.0, 0.0]])
    b = np.array([[0.0, 1.0]])
    assert abs(subspace_distance(a, b) - 1.0) < 1e-15


def test_subspace_distance_dimension_mismatch():
    assert subspace_distance(np.eye(3)[:1], np.eye(3)[:2]) == 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0, np.pi / 2), st.integers(0, 2**31))
def test_subspace_distance_is_sine_of_angle(theta, seed):
    u = random_unitary(3, seed)
    a = (u @ np.array([1, 0, 0]))[None, :]
    b = (u @ np.array([np.cos(theta), np.sin(theta), 0]))[None, :]
    assert abs(subspace_distance(a, b) - np.sin(theta)) < 1e-12


def test_permutation_matrix_convention():
    p = permutation_matrix([2, 0, 1])
    e0 = np.array([1, 0, 0])
    np.testing.assert_array_equal(p @ e0, [0, 0, 1])


def test_hermitian_power_square_root(rng):
    x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = x @ x.conj().T + np.eye(4)
    r = hermitian_power(h, 0.5)
    np.testing.assert_allclose(r @ r, h, atol=1e-12)


def test_intertwiner_gram_kernel_is_commutant(rng):
    # commutant of diag(1, 1, 2) is M2 + C
    d = np.diag([1.0, 1.0, 2.0]).astype(complex)[None]
    null = gram_nullspace(intertwiner_gram(d, d))
    assert len(null) == 5


def test_flat_basis_rank():
    mats = np.array([np.eye(2), 2 * np.eye(2), np.diag([1, -1])], dtype=complex)
    assert flat_basis(mats).shape == (4, 2)


def test_cluster_sorted():
    groups = cluster_sorted(np.array([0.0, 1e-12, 1.0, 1.0 + 1e-12, 3.0]), 1e-6)
    assert [list(g) for g in groups] == [[0, 1], [2, 3], [4]]
