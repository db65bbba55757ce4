"""Measurement coupling of a factor with the pointer space of its MASA spectrum.

The coupling is ``phi(V) = sum_gamma E(gamma) (x) lambda_gamma`` on
``H (x) C[G]``; the pointer starts in the neutral position ``|iota>`` and the
instrument is ``J(Delta|omega)(B) = trace[(rho (x) |iota><iota|) phi(V)^* (B (x) chi_Delta) phi(V)]``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import generate_algebra
from .errors import DimensionMismatch, InvalidAction, NoOutcome, NotInAlgebra
from .groups import FiniteAbelianGroup, MasaData, multiplicative_unitary, translation
from .linalg import unitarity_defect
from .states import State


@dataclass(frozen=True, eq=False)
class MeasurementSetup:
    system: MasaData
    group: FiniteAbelianGroup
    coupling: np.ndarray

    @property
    def system_dim(self) -> int:
        return self.system.factor.ambient_dim

    @property
    def pointer_dim(self) -> int:
        return self.group.order

    @property
    def neutral(self) -> tuple:
        return self.group.identity

    @property
    def tol(self) -> float:
        return self.system.factor.tol

    def pointer_vector(self, gamma=None) -> np.ndarray:
        e = np.zeros(self.pointer_dim)
        e[self.group.index(self.neutral if gamma is None else gamma)] = 1.0
        return e

    def outcome_projector(self, delta) -> np.ndarray:
        """``chi_Delta``, diagonal on pointer basis vectors in ``delta``."""
        chi = np.zeros(self.pointer_dim)
        for g in delta:
            chi[self.group.index(g)] = 1.0
        return np.diag(chi)

    def isometry(self) -> np.ndarray:
        """``xi -> phi(V)(xi (x) |iota>)`` as a ``(d*N, d)`` matrix."""
        d, n = self.system_dim, self.pointer_dim
        cols = np.arange(d) * n + self.group.index(self.neutral)
        return self.coupling[:, cols]


def build_coupling(masa: MasaData, group: FiniteAbelianGroup | None = None) -> MeasurementSetup:
    group = masa.group if group is None else group
    if group.order != masa.num_outcomes:
        raise DimensionMismatch(f"group of order {group.order} for {masa.num_outcomes} spectral projections")
    phi = sum(np.kron(e, translation(group, g)) for e, g in zip(masa.projections, group.elements))
    phi = np.asarray(phi, dtype=complex)
    defect = unitarity_defect(phi)
    if defect > masa.factor.tol * phi.shape[0]:
        raise InvalidAction(f"coupling is not unitary (defect {defect:.3e})")
    return MeasurementSetup(masa, group, phi)


def _swap_last_two(d: int, n: int) -> np.ndarray:
    perm = np.arange(d * n * n).reshape(d, n, n).transpose(0, 2, 1).reshape(-1)
    s = np.zeros((d * n * n, d * n * n))
    s[perm, np.arange(d * n * n)] = 1.0
    return s


def modified_pentagonal_residual(coupling, system_dim: int, group: FiniteAbelianGroup) -> float:
    """``||phi12 phi13 V23 - V23 phi12||_F`` on ``H (x) C[G] (x) C[G]``."""
    d, n = system_dim, group.order
    phi = np.asarray(coupling, dtype=complex)
    if phi.shape != (d * n, d * n):
        raise DimensionMismatch(f"coupling has shape {phi.shape}, expected {(d * n, d * n)}")
    v = multiplicative_unitary(group).matrix()
    phi12 = np.kron(phi, np.eye(n))
    v23 = np.kron(np.eye(d), v)
    sw = _swap_last_two(d, n)
    phi13 = sw @ phi12 @ sw
    return float(np.linalg.norm(phi12 @ phi13 @ v23 - v23 @ phi12))


def check_modified_pentagonal(setup: MeasurementSetup) -> float:
    return modified_pentagonal_residual(setup.coupling, setup.system_dim, setup.group)


def cyclic_shift_representation(setup: MeasurementSetup) -> list:
    """Unitaries ``u_gamma`` moving the range of ``E(delta)`` onto that of ``E(gamma + delta)``."""
    ranges = []
    for e in setup.system.projections:
        w, v = np.linalg.eigh(e)
        ranges.append(v[:, w > 0.5])
    g = setup.group
    out = []
    for gamma in g.elements:
        u = np.zeros((setup.system_dim, setup.system_dim), dtype=complex)
        for i, dlt in enumerate(g.elements):
            j = g.index(g.add(gamma, dlt))
            u += ranges[j] @ ranges[i].conj().T
        out.append(u)
    return out


def check_imprimitivity(setup: MeasurementSetup, shift_rep) -> dict:
    """Residuals of ``u E(Delta) u^* = E(gamma + Delta)`` and of the intertwining relation.

    ``shift_rep`` lists one unitary per group element in element order.
    Singletons ``Delta`` suffice since ``E`` is additive.
    """
    g = setup.group
    us = [np.asarray(u, dtype=complex) for u in shift_rep]
    if len(us) != g.order:
        raise DimensionMismatch(f"need {g.order} unitaries, got {len(us)}")
    for i, u in enumerate(us):
        if u.shape != (setup.system_dim, setup.system_dim) or unitarity_defect(u) > setup.tol * setup.system_dim:
            raise InvalidAction(f"shift unitary {i} is not unitary on the system space")
    proj = setup.system.projections
    covariance = 0.0
    intertwining = 0.0
    eye = np.eye(setup.pointer_dim)
    for gamma, u in zip(g.elements, us):
        for i, dlt in enumerate(g.elements):
            j = g.index(g.add(gamma, dlt))
            covariance = max(covariance, float(np.linalg.norm(u @ proj[i] @ u.conj().T - proj[j])))
        lhs = setup.coupling @ np.kron(u, eye)
        rhs = np.kron(u, translation(g, gamma)) @ setup.coupling
        intertwining = max(intertwining, float(np.linalg.norm(lhs - rhs)))
    return {
        "covariance": covariance,
        "intertwining": intertwining,
        "residual": max(covariance, intertwining),
    }


def correlate(setup: MeasurementSetup, xi) -> np.ndarray:
    """``phi(V)(xi (x) |iota>)``; a non-unit ``xi`` is normalized with a warning."""
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    if xi.shape[0] != setup.system_dim:
        raise DimensionMismatch(f"vector has length {xi.shape[0]}, system dimension is {setup.system_dim}")
    norm = np.linalg.norm(xi)
    if norm == 0:
        raise ValueError("cannot correlate the zero vector")
    if abs(norm - 1.0) > setup.tol:
        warnings.warn(f"input vector has norm {norm:.6g}; normalizing", stacklevel=2)
        xi = xi / norm
    return setup.coupling @ np.kron(xi, setup.pointer_vector())


def _density(setup: MeasurementSetup, omega) -> np.ndarray:
    if isinstance(omega, State):
        rho = omega.density
    else:
        arr = np.asarray(omega, dtype=complex)
        rho = State.pure(arr).density if arr.ndim == 1 else State(arr).density
    if rho.shape[0] != setup.system_dim:
        raise DimensionMismatch(f"state has dimension {rho.shape[0]}, system dimension is {setup.system_dim}")
    return rho


def instrument_operator(setup: MeasurementSetup, omega, delta) -> np.ndarray:
    """The operator ``X`` with ``J(Delta|omega)(B) = trace(X B)`` for every ``B``.

    ``X = Tr_pointer[(1 (x) chi_Delta) W rho W^*]`` with ``W`` the coupling
    restricted to the neutral pointer position.
    """
    rho = _density(setup, omega)
    d, n = setup.system_dim, setup.pointer_dim
    w = setup.isometry()
    joint = (w @ rho @ w.conj().T).reshape(d, n, d, n)
    chi = np.diag(setup.outcome_projector(delta))
    return np.einsum("iaja,a->ij", joint, chi)


def instrument(setup: MeasurementSetup, omega, delta, b, strict: bool = True) -> complex:
    b = np.asarray(b, dtype=complex)
    m = setup.system.factor
    if b.shape != (setup.system_dim, setup.system_dim):
        raise DimensionMismatch(f"observable has shape {b.shape}")
    if not m.contains(b):
        if strict:
            raise NotInAlgebra("observable is not in the measured algebra")
        b = m.project(b)
    return complex(np.trace(instrument_operator(setup, omega, delta) @ b))


def instrument_brute_force(setup: MeasurementSetup, omega, delta, b) -> complex:
    """Direct evaluation of the defining formula on the full joint space."""
    rho = _density(setup, omega)
    iota = setup.pointer_vector()
    big = np.kron(rho, np.outer(iota, iota))
    phi = setup.coupling
    op = phi.conj().T @ np.kron(np.asarray(b, dtype=complex), setup.outcome_projector(delta)) @ phi
    return complex(np.trace(big @ op))


@dataclass(frozen=True)
class InstrumentResult:
    probability: float
    post_state: State
    outcome_set: tuple


def measure(setup: MeasurementSetup, omega, delta) -> InstrumentResult:
    """Outcome probability and post-measurement state for the outcome set ``delta``.

    The post state is recovered from the functional ``B -> J(Delta|omega)(B) / p``
    by evaluating it on a trace-orthonormal basis ``e_j`` of the algebra:
    ``sigma = sum_j J(e_j^*) e_j / p``.
    """
    delta = tuple(setup.group.normalize(g) for g in delta)
    x = instrument_operator(setup, omega, delta)
    p = float(np.trace(x).real)
    if p < setup.tol:
        raise NoOutcome(f"outcome set {list(delta)} has probability {p:.3e}")
    m = setup.system.factor
    values = np.einsum("ij,kji->k", x, m.basis.conj().transpose(0, 2, 1))
    sigma = np.einsum("k,kij->ij", values, m.basis) / p
    sigma = (sigma + sigma.conj().T) / 2
    return InstrumentResult(min(p, 1.0), State(sigma, tol=max(setup.tol, 1e-8)), delta)


def outcome_probabilities(setup: MeasurementSetup, omega) -> np.ndarray:
    return np.array([instrument_operator(setup, omega, [g]).trace().real for g in setup.group.elements])


def sample_outcomes(setup: MeasurementSetup, omega, count: int, seed: int = 0) -> np.ndarray:
    """Counts per group element (element order) from ``count`` i.i.d. draws.

    Uses a counter-based Philox generator, so a seed fixes the histogram.
    """
    if count <= 0:
        raise ValueError("count must be positive")
    p = np.clip(outcome_probabilities(setup, omega), 0.0, None)
    p = p / p.sum()
    rng = np.random.Generator(np.random.Philox(seed))
    draws = rng.choice(len(p), size=int(count), p=p)
    return np.bincount(draws, minlength=len(p))


def crossed_product_report(setup: MeasurementSetup, shift_rep=None) -> dict:
    """Whether ``phi(V)`` lies in ``alpha(M) v (1 (x) lambda(G))`` for two embeddings ``alpha``.

    ``coupling``: ``alpha(B) = phi(V)(B (x) 1)phi(V)^*``.
    ``shift``: ``alpha(B) = sum_gamma u_gamma^* B u_gamma (x) |gamma><gamma|``.
    """
    m = setup.system.factor
    g = setup.group
    n = g.order
    shifts = cyclic_shift_representation(setup) if shift_rep is None else shift_rep
    lam = [np.kron(np.eye(setup.system_dim), translation(g, x)) for x in g.elements]
    phi = setup.coupling
    out = {}
    embeddings = {
        "coupling": [phi @ np.kron(b, np.eye(n)) @ phi.conj().T for b in m.basis],
        "shift": [
            sum(np.kron(u.conj().T @ b @ u, np.diag(np.eye(n)[i])) for i, u in enumerate(shifts))
            for b in m.basis
        ],
    }
    for name, images in embeddings.items():
        alg = generate_algebra(images + lam, setup.system_dim * n, setup.tol)
        out[name] = {
            "structure": [list(s) for s in alg.structure],
            "dim": alg.dim,
            "contains_coupling": bool(alg.contains(phi)),
            "distance": alg.distance(phi),
        }
    return out


def born_weights(setup: MeasurementSetup, xi) -> np.ndarray:
    """``|c_gamma|^2 = ||E(gamma) xi||^2`` for a unit vector ``xi``."""
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    xi = xi / np.linalg.norm(xi)
    return np.array([np.linalg.norm(e @ xi) ** 2 for e in setup.system.projections])


def sigma_bound(p: float, count: int) -> float:
    return math.sqrt(max(count * p * (1 - p), 0.0))

