import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectorlab.algebra import block_diagonal_algebra, diagonal_algebra, full_matrix_algebra, generate_algebra
from sectorlab.errors import NotCommutative, NotMaximal, NotSubalgebra
from sectorlab.groups import (
    FiniteAbelianGroup,
    TableGroup,
    check_pentagonal,
    conditional_sector_structure,
    convolution,
    delta,
    dual_group,
    fourier_matrix,
    lambda_of,
    multiplicative_unitary,
    translation,
    verify_masa,
)

GROUPS = [[2], [3], [4], [2, 2], [6], [2, 3], [3, 4]]


def dense_leg_operators(group):
    """V12, V13, V23 built directly from V|s,t> = |s, s+t> on basis triples."""
    n = group.order
    els = group.elements

    def op(legs):
        m = np.zeros((n**3, n**3))
        for a, b, c in itertools.product(range(n), repeat=3):
            idx = [a, b, c]
            i, j = legs
            idx[j] = group.index(group.add(els[idx[i]], els[idx[j]]))
            m[(idx[0] * n + idx[1]) * n + idx[2], (a * n + b) * n + c] = 1.0
        return m

    return op((0, 1)), op((0, 2)), op((1, 2))


@pytest.mark.parametrize("orders", GROUPS)
def test_pentagonal_exact(orders):
    g = FiniteAbelianGroup(orders)
    assert check_pentagonal(multiplicative_unitary(g)) == 0.0


@pytest.mark.parametrize("orders", [[2], [3], [2, 2]])
def test_pentagonal_against_dense_oracle(orders):
    g = FiniteAbelianGroup(orders)
    v12, v13, v23 = dense_leg_operators(g)
    assert np.array_equal(v12 @ v13 @ v23, v23 @ v12)


def test_swap_is_not_pentagonal():
    n = 2
    swap = np.zeros((4, 4))
    for a, b in itertools.product(range(n), repeat=2):
        swap[b * n + a, a * n + b] = 1
    assert check_pentagonal(swap) > 1.0


def test_dense_and_permutation_paths_agree():
    v = multiplicative_unitary(FiniteAbelianGroup([3]))
    assert check_pentagonal(v.matrix()) == 0.0


def test_group_arithmetic():
    g = FiniteAbelianGroup([2, 3])
    assert g.order == 6
    assert g.identity == (0, 0)
    assert g.add((1, 2), (1, 2)) == (0, 1)
    assert g.neg((1, 1)) == (1, 2)
    assert g.index(g.elements[4]) == 4
    assert dual_group(g) == g


def test_character_table_orthogonality():
    g = FiniteAbelianGroup([2, 4])
    c = g.character_table()
    np.testing.assert_allclose(c @ c.conj().T, g.order * np.eye(g.order), atol=1e-12)


@pytest.mark.parametrize("orders", [[4], [2, 2], [6]])
def test_fourier_diagonalizes_translations(orders):
    g = FiniteAbelianGroup(orders)
    f = fourier_matrix(g)
    np.testing.assert_allclose(f @ f.conj().T, np.eye(g.order), atol=1e-12)
    for el in g.elements:
        d = f @ translation(g, el) @ f.conj().T
        np.testing.assert_allclose(d, np.diag(np.diag(d)), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(GROUPS), st.integers(0, 2**31))
def test_lambda_is_algebra_homomorphism(orders, seed):
    g = FiniteAbelianGroup(orders)
    v = multiplicative_unitary(g)
    rng = np.random.default_rng(seed)
    w1 = rng.normal(size=g.order)
    w2 = rng.normal(size=g.order)
    lhs = lambda_of(convolution(w1, w2, g), v)
    rhs = lambda_of(w1, v) @ lambda_of(w2, v)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_lambda_of_delta_is_translation():
    g = FiniteAbelianGroup([3])
    v = multiplicative_unitary(g)
    for el in g.elements:
        np.testing.assert_array_equal(lambda_of(delta(g, el), v).real, translation(g, el))


def test_table_group_from_permutations():
    # S3 generated by a transposition and a 3-cycle
    g = TableGroup.from_permutations([[1, 0, 2], [1, 2, 0]])
    assert g.order == 6
    assert not g.abelian
    for i in range(g.order):
        assert g.mul_index(i, g.inv_index(i)) == 0


def test_verify_masa_diagonal():
    m = verify_masa(full_matrix_algebra(3), diagonal_algebra(3))
    assert m.num_outcomes == 3
    assert m.group == FiniteAbelianGroup([3])
    total = sum(m.projections)
    np.testing.assert_allclose(total, np.eye(3), atol=1e-12)


def test_verify_masa_errors():
    with pytest.raises(NotMaximal):
        verify_masa(full_matrix_algebra(3), block_diagonal_algebra([(1, 1), (1, 2)]))
    with pytest.raises(NotCommutative):
        verify_masa(full_matrix_algebra(3), block_diagonal_algebra([(1, 1), (2, 1)]))
    with pytest.raises(NotSubalgebra):
        flip = generate_algebra([np.array([[0, 1], [1, 0]])], 2)
        verify_masa(diagonal_algebra(2), flip)


def test_conditional_sector_structure():
    out = conditional_sector_structure(full_matrix_algebra(2), diagonal_algebra(2))
    assert out["holds"]
    assert out["sectors"] == 2
