"""Seeded random algebras, states and elements for property checks."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .algebra import FiniteDimAlgebra, block_diagonal_algebra, generate_algebra
from .linalg import DEFAULT_TOL
from .states import State


def make_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(n: int, rng) -> np.ndarray:
    rng = make_rng(rng)
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def random_unit_vector(n: int, rng) -> np.ndarray:
    rng = make_rng(rng)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_structure(rng, max_blocks: int = 4, max_dim: int = 16, max_block: int = 3, max_mult: int = 3) -> list:
    """Block data ``[(n_k, m_k)]`` with ``sum n_k m_k <= max_dim``."""
    rng = make_rng(rng)
    k = int(rng.integers(1, max_blocks + 1))
    out, used = [], 0
    for _ in range(k):
        nk = int(rng.integers(1, max_block + 1))
        mk = int(rng.integers(1, max_mult + 1))
        if used + nk * mk > max_dim:
            break
        out.append((nk, mk))
        used += nk * mk
    return out or [(1, 1)]


def random_algebra(rng, structure=None, tol: float = DEFAULT_TOL, **kw) -> FiniteDimAlgebra:
    """A block algebra in a random orthonormal frame."""
    rng = make_rng(rng)
    structure = random_structure(rng, **kw) if structure is None else structure
    base = block_diagonal_algebra(structure, tol)
    u = random_unitary(base.ambient_dim, rng)
    basis = np.einsum("ij,kjl,ml->kim", u, base.basis, u.conj())
    return FiniteDimAlgebra.from_span(basis, base.ambient_dim, tol)


def random_element(a: FiniteDimAlgebra, rng) -> np.ndarray:
    rng = make_rng(rng)
    c = rng.normal(size=a.dim) + 1j * rng.normal(size=a.dim)
    return np.einsum("k,kij->ij", c, a.basis)


def random_positive(a: FiniteDimAlgebra, rng) -> np.ndarray:
    x = random_element(a, rng)
    return x @ x.conj().T


def random_central(a: FiniteDimAlgebra, rng) -> np.ndarray:
    rng = make_rng(rng)
    c = rng.normal(size=a.num_sectors) + 1j * rng.normal(size=a.num_sectors)
    return np.einsum("k,kij->ij", c, a.central_projections)


def random_generated_algebra(rng, tol: float = DEFAULT_TOL, **kw) -> FiniteDimAlgebra:
    """``generate_algebra`` of two random elements of a random block algebra."""
    rng = make_rng(rng)
    host = random_algebra(rng, tol=tol, **kw)
    gens = [random_element(host, rng) for _ in range(2)]
    return generate_algebra(gens, host.ambient_dim, tol)


def random_density(n: int, rng, rank: int | None = None) -> np.ndarray:
    rng = make_rng(rng)
    r = n if rank is None else rank
    x = rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def random_faithful_state(n: int, rng, floor: float = 0.05) -> State:
    """Full-rank density with smallest eigenvalue at least ``floor / n``."""
    rho = random_density(n, rng)
    rho = (1 - floor) * rho + floor * np.eye(n) / n
    return State(rho)


def random_state_in(a: FiniteDimAlgebra, rng, faithful: bool = True) -> State:
    """A state whose density lies in the algebra."""
    s = random_faithful_state(a.ambient_dim, rng) if faithful else State(random_density(a.ambient_dim, rng, 1))
    rho = a.project(s.density)
    return State((rho + rho.conj().T) / 2)
