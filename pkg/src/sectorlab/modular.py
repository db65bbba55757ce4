"""Standard form, modular data ``(J, Delta)`` and support calculus of representations.

Representations are compared against the reduced universal representation
(one copy of each irreducible block), so ``pi°`` carries multiplicity one on
every block outside the support of ``pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .algebra import (
    FiniteDimAlgebra,
    Projection,
    RepresentationData,
    _check_same_algebra,
    center,
    commutant,
    commutant_vectors,
    intertwiner_space,
    irreducible_representation,
    join,
    representation,
    represented_algebra,
)
from .errors import NotFaithful, NotStandard
from .linalg import hermitian_power, hermitian_spanning_set, intersect_spans, subspace_distance
from .states import GNSTriple, State, gns

FLOW_TIMES = (0.3, 1.0, math.pi)


def support(pi: RepresentationData) -> frozenset:
    return pi.support


def _from_support(algebra: FiniteDimAlgebra, blocks) -> RepresentationData:
    blocks = set(blocks)
    return representation(algebra, [1 if k in blocks else 0 for k in range(algebra.num_sectors)])


def disjoint_complement(pi: RepresentationData) -> RepresentationData:
    """``pi°``: the largest subrepresentation of the reference disjoint from ``pi``."""
    a = pi.algebra
    return _from_support(a, set(range(a.num_sectors)) - pi.support)


def central_support(pi: RepresentationData) -> Projection:
    """``c(pi)``: sum of the minimal central projections of the supported blocks."""
    a = pi.algebra
    z = np.zeros((a.ambient_dim, a.ambient_dim), dtype=complex)
    for k in sorted(pi.support):
        z = z + a.central_projections[k]
    return Projection(z, a.tol)


def biorth_identities(pi: RepresentationData) -> dict:
    """The support identities for ``pi``, ``pi°``, ``pi°°`` and ``pi°°°``."""
    a = pi.algebra
    one = np.eye(a.ambient_dim)
    c = central_support(pi).matrix
    p1 = disjoint_complement(pi)
    p2 = disjoint_complement(p1)
    p3 = disjoint_complement(p2)
    return {
        "support": sorted(pi.support),
        "complement_support": sorted(p1.support),
        "complement_is_c_perp": bool(np.allclose(central_support(p1).matrix, one - c, atol=a.tol)),
        "bicomplement_is_c": bool(np.allclose(central_support(p2).matrix, c, atol=a.tol)),
        "triple_equals_single": p3.support == p1.support,
        "contained_in_bicomplement": pi.support <= p2.support,
    }


def quasi_equiv_via_biorth(pi1: RepresentationData, pi2: RepresentationData) -> bool:
    _check_same_algebra(pi1, pi2)
    return disjoint_complement(disjoint_complement(pi1)).support == disjoint_complement(
        disjoint_complement(pi2)
    ).support


# -- standard form ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModularData:
    """Modular objects in the GNS space of a faithful state.

    ``J`` acts as ``v -> j_matrix @ conj(v)`` and ``S`` as ``v -> s_matrix @ conj(v)``.
    """

    triple: GNSTriple
    delta: np.ndarray
    j_matrix: np.ndarray
    s_matrix: np.ndarray
    tol: float = field(default=1e-9)

    @property
    def representation(self) -> RepresentationData:
        return self.triple.representation

    @property
    def omega(self) -> np.ndarray:
        return self.triple.cyclic_vector

    @property
    def dim(self) -> int:
        return self.delta.shape[0]

    def apply_j(self, v) -> np.ndarray:
        return self.j_matrix @ np.conj(v)

    def conjugate_by_j(self, x) -> np.ndarray:
        """``J x J`` for a linear operator ``x``."""
        return self.j_matrix @ np.conj(x) @ np.conj(self.j_matrix)

    def delta_power(self, z) -> np.ndarray:
        return hermitian_power(self.delta, z)

    def flow(self, x, t) -> np.ndarray:
        """``sigma_t(x) = Delta^{it} x Delta^{-it}``; ``t`` may be complex."""
        return self.delta_power(1j * t) @ x @ self.delta_power(-1j * t)

    def spectrum(self) -> np.ndarray:
        return np.sort(np.linalg.eigvalsh(self.delta))

    def state_value(self, x) -> complex:
        return complex(np.vdot(self.omega, x @ self.omega))


def standard_form(a: FiniteDimAlgebra, phi: State) -> ModularData:
    """GNS of a faithful state, with ``S: x Omega -> x^* Omega`` and its polar parts."""
    triple = gns(a, phi)
    if triple.dim != a.dim:
        raise NotFaithful(f"state is not faithful on the algebra (GNS dimension {triple.dim} < {a.dim})")
    t = triple.embedding
    # q[j, i] = <e_j, e_i^*>
    q = np.einsum("jab,iba->ji", a.basis.conj(), a.basis.conj())
    s_m = t @ q @ np.conj(np.linalg.inv(t))
    delta = s_m.T @ np.conj(s_m)
    delta = (delta + delta.conj().T) / 2
    j_m = s_m @ np.conj(hermitian_power(delta, -0.5))
    return ModularData(triple, delta, j_m, s_m, a.tol)


def _random_elements(rep: RepresentationData, count: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    d = rep.algebra.dim
    return [
        np.einsum("k,kij->ij", rng.normal(size=d) + 1j * rng.normal(size=d), rep.matrices)
        for _ in range(count)
    ]


def check_tomita(md: ModularData, samples: int = 6, seed: int = 0) -> dict:
    """Residuals of the modular identities; every entry is a norm, ``tol`` is echoed."""
    rep = md.representation
    mats = rep.matrices
    om = md.omega
    half = md.delta_power(0.5)
    s_res = max(
        float(np.linalg.norm(md.apply_j(half @ (x @ om)) - x.conj().T @ om)) for x in mats
    )
    m_alg = represented_algebra(rep)
    comm = commutant_vectors(mats, md.dim, md.tol)
    jmj = np.array([md.conjugate_by_j(x) for x in mats])
    jmj_res = subspace_distance(jmj, comm, md.tol)
    flow_res = 0.0
    center_res = 0.0
    zs = [rep.image(z) for z in rep.algebra.central_projections]
    for t in FLOW_TIMES:
        for x in mats:
            flow_res = max(flow_res, m_alg.distance(md.flow(x, t)))
        for z in zs:
            center_res = max(center_res, float(np.linalg.norm(md.flow(z, t) - z)))
    kms = 0.0
    xs = _random_elements(rep, samples, seed)
    ys = _random_elements(rep, samples, seed + 1)
    for x, y in zip(xs, ys):
        scale = max(1.0, float(np.linalg.norm(x) * np.linalg.norm(y)))
        lhs = md.state_value(x @ md.flow(y, -1j))
        rhs = md.state_value(y @ x)
        kms = max(kms, abs(lhs - rhs) / scale)
    jj = float(np.linalg.norm(md.j_matrix @ np.conj(md.j_matrix) - np.eye(md.dim)))
    return {
        "s_identity": s_res,
        "jmj_commutant": jmj_res,
        "flow_invariance": flow_res,
        "center_fixed": center_res,
        "kms": kms,
        "delta_omega": float(np.linalg.norm(md.delta @ om - om)),
        "j_omega": float(np.linalg.norm(md.apply_j(om) - om)),
        "j_squared": jj,
        "tol": md.tol,
    }


def tomita_passes(report: dict, tol: float | None = None) -> bool:
    tol = report["tol"] if tol is None else tol
    return all(v < tol for k, v in report.items() if k != "tol")


# -- Galois-type identities --------------------------------------------------------

def _unitaries_of(alg: FiniteDimAlgebra) -> list:
    """``exp(i h / ||h||)`` over a Hermitian spanning set; they generate ``alg``."""
    out = []
    for h in hermitian_spanning_set(alg.basis):
        norm = np.linalg.norm(h, 2)
        if norm > alg.tol:
            out.append(expm(1j * h / norm))
    return out


def galois_identities(m: FiniteDimAlgebra) -> dict:
    """``Z(M)' = M v M'``, ``M = (M v M')^{U(M')}`` and factoriality versus ergodicity."""
    n = m.ambient_dim
    mc = commutant(m)
    joined = join(m, mc)
    zc = commutant(center(m))
    join_res = subspace_distance(joined.basis, zc.basis, m.tol)
    us = _unitaries_of(mc)
    fixed_q = intersect_spans(
        joined.basis.reshape(joined.dim, -1).T,
        commutant_vectors(np.array(us), n, m.tol).reshape(-1, n * n).T,
        m.tol,
    )
    fixed = fixed_q.T.reshape(-1, n, n)
    fixed_res = subspace_distance(fixed, m.basis, m.tol)
    full = joined.dim == n * n
    return {
        "join_structure": [list(s) for s in joined.structure],
        "join_dim": joined.dim,
        "center_commutant_dim": zc.dim,
        "join_equals_center_commutant": join_res,
        "fixed_points_equal_m": fixed_res,
        "is_factor": m.is_factor,
        "join_is_everything": full,
        "factor_iff_ergodic": m.is_factor == full,
        "tol": m.tol,
    }


# -- universality of pi°° ----------------------------------------------------------

def is_standard(sigma: RepresentationData) -> bool:
    a = sigma.algebra
    return tuple(sigma.multiplicities) == a.block_dims


def standard_representation(a: FiniteDimAlgebra) -> RepresentationData:
    return representation(a, a.block_dims)


def standard_universality(pi: RepresentationData, sigma: RepresentationData, seed: int = 0) -> dict:
    """Factor every ``T in Rep(pi, sigma)`` through the canonical maps ``eta``.

    ``pi`` is ``(+)_k pi_k (x) 1_{mu_k}`` and ``pi°°`` is ``(+)_{k in supp} pi_k``.
    For each block ``k`` and slot ``r < mu_k`` the coisometry
    ``eta_{k,r}: H_pi -> H_{pi°°}`` reads off that slot, so
    ``T = sum_{k,r} T°°_{k,r} eta_{k,r}`` with ``T°°_{k,r} in Rep(pi°°, sigma)``.
    """
    _check_same_algebra(pi, sigma)
    if not is_standard(sigma):
        raise NotStandard(
            f"multiplicities {tuple(sigma.multiplicities)} differ from block sizes {sigma.algebra.block_dims}"
        )
    a = pi.algebra
    bi = disjoint_complement(disjoint_complement(pi))
    rep_space = intertwiner_space(pi, sigma)
    std_dim = sum(
        pi.multiplicities[k] * len(intertwiner_space(irreducible_representation(a, k), sigma))
        for k in sorted(pi.support)
    )
    # canonical coordinates of pi and pi°°
    etas = []
    o_pi = 0
    offsets_bi = {}
    o = 0
    for k, (nk, _) in enumerate(a.structure):
        if k in bi.support:
            offsets_bi[k] = o
            o += nk
    for k, (nk, _) in enumerate(a.structure):
        mu = pi.multiplicities[k]
        for r in range(mu):
            eta = np.zeros((bi.dim, pi.dim))
            for i in range(nk):
                eta[offsets_bi[k] + i, o_pi + i * mu + r] = 1.0
            etas.append(eta)
        o_pi += nk * mu
    residual = 0.0
    intertwining = 0.0
    if rep_space:
        rng = np.random.default_rng(seed)
        coeffs = rng.normal(size=len(rep_space)) + 1j * rng.normal(size=len(rep_space))
        t = np.einsum("k,kij->ij", coeffs, np.array(rep_space))
        rebuilt = np.zeros_like(t)
        for eta in etas:
            t_bi = t @ eta.T
            rebuilt = rebuilt + t_bi @ eta
            for x, y in zip(bi.matrices, sigma.matrices):
                intertwining = max(intertwining, float(np.linalg.norm(t_bi @ x - y @ t_bi)))
        residual = float(np.linalg.norm(t - rebuilt))
    eta_unitary = len(etas) == len(bi.support) and all(m <= 1 for m in pi.multiplicities)
    return {
        "rep_dim": len(rep_space),
        "std_dim": std_dim,
        "dims_equal": len(rep_space) == std_dim,
        "num_eta": len(etas),
        "eta_unitary": eta_unitary,
        "factorization_residual": residual,
        "factor_intertwining_residual": intertwining,
        "tol": a.tol,
    }
