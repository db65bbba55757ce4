"""States, the GNS construction and the sector (central) structure of a state."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    FiniteDimAlgebra,
    RepresentationData,
    _check_same_algebra,
    intertwiner_space,
    represented_algebra,
)
from .errors import DimensionMismatch, InvalidState, NotFaithful
from .linalg import DEFAULT_TOL, as_matrix, flat_basis


@dataclass(frozen=True, eq=False)
class State:
    """A normal state ``x -> trace(density @ x)`` on matrices of one size."""

    density: np.ndarray
    label: str = "ambient"
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        try:
            rho = as_matrix(self.density)
        except ValueError as exc:
            raise InvalidState(str(exc)) from None
        herm = np.linalg.norm(rho - rho.conj().T)
        if herm > self.tol * max(1.0, rho.shape[0]):
            raise InvalidState(f"density is not Hermitian (defect {herm:.3e})")
        rho = (rho + rho.conj().T) / 2
        lo = float(np.linalg.eigvalsh(rho).min())
        if lo < -self.tol * max(1.0, rho.shape[0]):
            raise InvalidState(f"density has negative eigenvalue {lo:.3e}")
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > self.tol * max(1.0, rho.shape[0]):
            raise InvalidState(f"density has trace {tr:.12g}, expected 1")
        object.__setattr__(self, "density", rho)

    @classmethod
    def pure(cls, vector, label: str = "ambient", tol: float = DEFAULT_TOL) -> "State":
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InvalidState("zero vector does not define a state")
        v = v / norm
        return cls(np.outer(v, v.conj()), label, tol)

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    def expect(self, x) -> complex:
        return complex(np.trace(self.density @ np.asarray(x, dtype=complex)))

    def __call__(self, x) -> complex:
        return self.expect(x)


def _check_state(a: FiniteDimAlgebra, omega: State):
    if omega.dim != a.ambient_dim:
        raise DimensionMismatch(f"state acts on dimension {omega.dim}, algebra on {a.ambient_dim}")


@dataclass(frozen=True)
class SectorDistribution:
    weights: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size and (w.min() < -self.tol or abs(w.sum() - 1.0) > self.tol * max(1, w.size)):
            raise InvalidState(f"not a probability vector: {w}")
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))

    def __len__(self):
        return len(self.weights)

    @classmethod
    def delta(cls, k: int, size: int) -> "SectorDistribution":
        w = np.zeros(size)
        w[k] = 1.0
        return cls(w)


@dataclass(frozen=True)
class GNSTriple:
    """``(pi, Omega)`` together with the map ``embedding`` from coefficient vectors
    of the algebra basis to the GNS space: ``[a] = embedding @ coefficients(a)``."""

    representation: RepresentationData
    cyclic_vector: np.ndarray
    embedding: np.ndarray
    state: State

    @property
    def dim(self) -> int:
        return self.representation.dim

    def vector(self, x) -> np.ndarray:
        return self.embedding @ self.representation.algebra.coefficients(x)


def gns(a: FiniteDimAlgebra, omega: State) -> GNSTriple:
    """GNS representation of ``omega`` restricted to ``a``.

    The space is ``a`` modulo the null space of ``<x, y> = omega(x* y)``; it is
    computed from the eigendecomposition of the Gram matrix on ``a``'s basis.
    """
    _check_state(a, omega)
    e = a.basis
    # gram[k, m] = trace(rho e_k^* e_m)
    gram = np.einsum("ij,klj,mli->km", omega.density, e.conj(), e, optimize=True)
    gram = (gram + gram.conj().T) / 2
    w, v = np.linalg.eigh(gram)
    keep = w > a.tol * max(1.0, float(w[-1]))
    lam, vecs = w[keep], v[:, keep]
    emb = np.sqrt(lam)[:, None] * vecs.conj().T
    back = vecs / np.sqrt(lam)[None, :]
    # left multiplication in the basis: L_x[i, j] = <e_i, x e_j>
    prods = np.einsum("aij,bjk->abik", e, e, optimize=True)
    lmul = np.einsum("cik,abik->acb", e.conj(), prods, optimize=True)
    mats = np.einsum("ri,aij,js->ars", emb, lmul, back)
    rep = RepresentationData.from_matrices(a, mats)
    omega_vec = emb @ a.coefficients(np.eye(a.ambient_dim))
    return GNSTriple(rep, omega_vec, emb, omega)


def gns_equivalence(t1: GNSTriple, t2: GNSTriple):
    """The unitary ``U`` with ``U pi1(x) Omega1 = pi2(x) Omega2``, and its defects.

    Returns ``(U, unitarity_defect, covariance_defect)``.
    """
    _check_same_algebra(t1.representation, t2.representation)
    psi1 = np.einsum("kij,j->ik", t1.representation.matrices, t1.cyclic_vector)
    psi2 = np.einsum("kij,j->ik", t2.representation.matrices, t2.cyclic_vector)
    u = psi2 @ np.linalg.pinv(psi1, rcond=t1.representation.algebra.tol)
    if u.shape[0] != u.shape[1]:
        return u, float("inf"), float("inf")
    unit = float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[1])))
    cov = float(
        max(
            np.linalg.norm(u @ m1 - m2 @ u)
            for m1, m2 in zip(t1.representation.matrices, t2.representation.matrices)
        )
    )
    return u, unit, cov


def sector_distribution(a: FiniteDimAlgebra, omega: State) -> SectorDistribution:
    """The q->c channel: weights ``omega(z_k)`` over the canonical sectors."""
    _check_state(a, omega)
    w = np.array([np.trace(omega.density @ z).real for z in a.central_projections])
    return SectorDistribution(w, a.tol)


def is_factor_state(a: FiniteDimAlgebra, omega: State) -> bool:
    """Whether ``pi_omega(a)''`` has trivial center."""
    triple = gns(a, omega)
    return represented_algebra(triple.representation).num_sectors == 1


def quasi_equivalent(pi1: RepresentationData, pi2: RepresentationData) -> bool:
    """Equal central supports, decided from the concrete intertwiners.

    The ranges of all intertwiners ``pi1 -> pi2`` must fill ``H2`` and the
    ranges of their adjoints must fill ``H1``.
    """
    _check_same_algebra(pi1, pi2)
    if pi1.dim == 0 or pi2.dim == 0:
        return pi1.dim == pi2.dim
    ts = intertwiner_space(pi1, pi2)
    if not ts:
        return False
    tol = pi1.algebra.tol
    ranges = flat_basis(np.array([t.T for t in ts]).reshape(-1, pi2.dim)[:, None, :], tol)
    coranges = flat_basis(np.array([t.conj() for t in ts]).reshape(-1, pi1.dim)[:, None, :], tol)
    return ranges.shape[1] == pi2.dim and coranges.shape[1] == pi1.dim


def disjoint(pi1: RepresentationData, pi2: RepresentationData) -> bool:
    return len(intertwiner_space(pi1, pi2)) == 0


@dataclass(frozen=True)
class CentralDecomposition:
    """``omega = sum_k w_k omega_k`` on the algebra, zero-weight sectors omitted."""

    sectors: tuple
    weights: np.ndarray
    states: tuple
    restricted_density: np.ndarray = field(repr=False)

    @property
    def components(self):
        return list(zip(self.weights, self.states))

    def barycenter(self) -> np.ndarray:
        return sum(w * s.density for w, s in zip(self.weights, self.states))


def central_decomposition(a: FiniteDimAlgebra, omega: State) -> CentralDecomposition:
    _check_state(a, omega)
    rho_a = a.project(omega.density)
    rho_a = (rho_a + rho_a.conj().T) / 2
    dist = sector_distribution(a, omega)
    idx, weights, states = [], [], []
    for k, (z, w) in enumerate(zip(a.central_projections, dist.weights)):
        if w <= a.tol:
            continue
        idx.append(k)
        weights.append(w)
        states.append(State(z @ rho_a @ z / w, omega.label, max(a.tol, 1e-8)))
    return CentralDecomposition(tuple(idx), np.array(weights), tuple(states), rho_a)


@dataclass(frozen=True, eq=False)
class ConditionalExpectation:
    """``Lambda(x) = sum_k omega(z_k x) / omega(z_k) z_k``, onto the center of ``algebra``."""

    algebra: FiniteDimAlgebra
    state: State
    weights: np.ndarray

    def __call__(self, x) -> np.ndarray:
        x = as_matrix(x, self.algebra.ambient_dim)
        out = np.zeros_like(x)
        for z, w in zip(self.algebra.central_projections, self.weights):
            out = out + (np.trace(self.state.density @ z @ x) / w) * z
        return out

    def sector_state(self, k: int) -> State:
        """``omega_k = delta_k o Lambda`` as a density matrix in the algebra."""
        a = self.algebra
        z = a.central_projections[k]
        rho = a.project(self.state.density)
        return State(z @ rho @ z / self.weights[k], self.state.label, max(a.tol, 1e-8))


def conditional_expectation(a: FiniteDimAlgebra, omega: State) -> ConditionalExpectation:
    dist = sector_distribution(a, omega)
    missing = [k for k, w in enumerate(dist.weights) if w <= a.tol]
    if missing:
        raise NotFaithful(f"state has zero weight on sectors {missing}; the central measure is not faithful")
    return ConditionalExpectation(a, omega, dist.weights)


def c_to_q_channel(a: FiniteDimAlgebra, omega: State, target) -> State:
    """``Lambda*`` applied to a sector distribution: ``sum_k target_k omega_k``."""
    t = target.weights if isinstance(target, SectorDistribution) else SectorDistribution(target, a.tol).weights
    if len(t) != a.num_sectors:
        raise DimensionMismatch(f"target has {len(t)} entries, algebra has {a.num_sectors} sectors")
    lam = conditional_expectation(a, omega)
    rho = sum(tk * lam.sector_state(k).density for k, tk in enumerate(t) if tk > 0)
    return State(rho, omega.label, max(a.tol, 1e-8))


def central_support_projection(triple: GNSTriple) -> np.ndarray:
    """``P = [Z Omega]``, the projection onto the closure of the center applied to ``Omega``."""
    rep = triple.representation
    a = rep.algebra
    vecs = np.array([rep.image(z) @ triple.cyclic_vector for z in a.central_projections])
    q = flat_basis(vecs[:, None, :], a.tol)
    return q @ q.conj().T


def central_measure_pairing(a: FiniteDimAlgebra, omega: State, x1, x2) -> tuple:
    """Both sides of ``mu(A1^ A2^) = <Omega, pi(A1) P pi(A2) Omega>``.

    The left side integrates ``k -> omega_k(A1) omega_k(A2)`` against the
    sector weights; the right side is evaluated in the GNS space.
    """
    triple = gns(a, omega)
    dist = sector_distribution(a, omega)
    lhs = 0.0j
    rho = a.project(omega.density)
    for z, w in zip(a.central_projections, dist.weights):
        if w <= a.tol:
            continue
        rk = z @ rho @ z / w
        lhs += w * np.trace(rk @ x1) * np.trace(rk @ x2)
    p = central_support_projection(triple)
    om = triple.cyclic_vector
    rep = triple.representation
    rhs = np.vdot(om, rep.image(x1) @ p @ rep.image(x2) @ om)
    return complex(lhs), complex(rhs)
