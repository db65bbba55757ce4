"""Finite-dimensional *-algebras of matrices and their block structure.

A :class:`FiniteDimAlgebra` is a unital *-subalgebra of ``M_n`` stored by an
orthonormal basis (trace inner product) together with its Wedderburn data:
in the basis given by ``block_unitary`` every element has the form
``diag(a_1 (x) 1_{m_1}, ..., a_K (x) 1_{m_K})`` with ``a_k`` an ``n_k x n_k``
matrix.  Blocks are the sectors; their order is canonical (block dimension
ascending, then the rounded diagonal of the central projection, earliest
support first).
"""

from __future__ import annotations

import math
from functools import cached_property
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InputError, MismatchedAlgebra, NotSubalgebra, NumericalError
from .linalg import (
    DEFAULT_TOL,
    SPLIT_SEED,
    as_matrix,
    cluster_sorted,
    dagger,
    flat_basis,
    gram_nullspace,
    hermitian_spanning_set,
    intersect_spans,
    intertwiner_gram,
    orthonormalize,
    stack,
)

_MAX_SPLIT_ATTEMPTS = 8


@dataclass(frozen=True)
class Projection:
    """An orthogonal projection, checked on construction."""

    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        p = np.asarray(self.matrix, dtype=complex)
        defect = max(np.linalg.norm(p - p.conj().T), np.linalg.norm(p @ p - p))
        if defect > max(self.tol, 1e-12) * max(1.0, p.shape[0]):
            raise InputError(f"not an orthogonal projection (defect {defect:.3e})")
        object.__setattr__(self, "matrix", p)

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.matrix).real))


@dataclass(frozen=True, eq=False)
class FiniteDimAlgebra:
    ambient_dim: int
    basis: np.ndarray
    structure: tuple
    block_unitary: np.ndarray
    central_projections: np.ndarray
    center_basis: np.ndarray
    commutant_basis: np.ndarray
    tol: float = DEFAULT_TOL
    name: str = ""

    @classmethod
    def from_span(cls, mats, ambient_dim=None, tol=DEFAULT_TOL, name="") -> "FiniteDimAlgebra":
        """Build the algebra spanned by ``mats``; the span must be a unital *-algebra."""
        mats = stack(mats)
        if ambient_dim is None:
            if mats.shape[0] == 0:
                raise DimensionMismatch("cannot infer ambient dimension from an empty span")
            ambient_dim = mats.shape[1]
        n = int(ambient_dim)
        if mats.shape[0] and mats.shape[1:] != (n, n):
            raise DimensionMismatch(f"span elements must be {n}x{n}, got {mats.shape[1:]}")
        basis = _orthonormal_basis(mats, n, tol)
        ident = np.eye(n) / math.sqrt(n)
        coeff = np.einsum("kij,ij->k", basis.conj(), ident)
        if np.linalg.norm(coeff) < 1 - math.sqrt(tol):
            raise NotSubalgebra("span does not contain the identity")
        return _decompose(basis, n, tol, name)

    # -- basic views -------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def num_sectors(self) -> int:
        return len(self.structure)

    @property
    def block_dims(self) -> tuple:
        return tuple(nk for nk, _ in self.structure)

    @property
    def multiplicities(self) -> tuple:
        return tuple(mk for _, mk in self.structure)

    @property
    def is_factor(self) -> bool:
        return len(self.structure) == 1

    @property
    def is_commutative(self) -> bool:
        return all(nk == 1 for nk, _ in self.structure)

    def coefficients(self, x) -> np.ndarray:
        x = as_matrix(x, self.ambient_dim)
        return np.einsum("kij,ij->k", self.basis.conj(), x)

    def project(self, x) -> np.ndarray:
        """Trace-orthogonal projection onto the algebra (a conditional expectation)."""
        return np.einsum("k,kij->ij", self.coefficients(x), self.basis)

    def distance(self, x) -> float:
        x = as_matrix(x, self.ambient_dim)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol=None) -> bool:
        tol = self.tol if tol is None else tol
        x = as_matrix(x, self.ambient_dim)
        return self.distance(x) <= tol * max(1.0, float(np.linalg.norm(x)))

    def _offsets(self):
        out, o = [], 0
        for nk, mk in self.structure:
            out.append(o)
            o += nk * mk
        return out

    def blocks(self, x) -> list:
        """The ``n_k x n_k`` matrices ``a_k`` of ``x``; ``x`` is projected first."""
        y = self.block_unitary.conj().T @ self.project(x) @ self.block_unitary
        out = []
        for (nk, mk), o in zip(self.structure, self._offsets()):
            sub = y[o:o + nk * mk, o:o + nk * mk].reshape(nk, mk, nk, mk)
            out.append(np.einsum("irjr->ij", sub) / mk)
        return out

    @cached_property
    def basis_blocks(self) -> list:
        """``blocks(e)`` for every basis element, stacked per sector: ``(dim, n_k, n_k)`` arrays."""
        y = np.einsum("ji,ajk,kl->ail", self.block_unitary.conj(), self.basis, self.block_unitary)
        out = []
        for (nk, mk), o in zip(self.structure, self._offsets()):
            sub = y[:, o:o + nk * mk, o:o + nk * mk].reshape(-1, nk, mk, nk, mk)
            out.append(np.einsum("airjr->aij", sub) / mk)
        return out

    def from_blocks(self, blocks) -> np.ndarray:
        if len(blocks) != len(self.structure):
            raise DimensionMismatch(f"expected {len(self.structure)} blocks, got {len(blocks)}")
        y = np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        for (nk, mk), o, a in zip(self.structure, self._offsets(), blocks):
            y[o:o + nk * mk, o:o + nk * mk] = np.kron(as_matrix(a, nk), np.eye(mk))
        return self.block_unitary @ y @ self.block_unitary.conj().T

    def closure_defect(self) -> float:
        """Largest distance from the span of a product or adjoint of basis elements."""
        worst = 0.0
        q = self.basis.reshape(self.dim, -1)
        for e in self.basis:
            prods = np.einsum("ij,kjl->kil", e, self.basis).reshape(self.dim, -1)
            resid = prods - (prods @ q.conj().T) @ q
            worst = max(worst, float(np.abs(np.linalg.norm(resid, axis=1)).max()))
        adj = dagger(self.basis).reshape(self.dim, -1)
        resid = adj - (adj @ q.conj().T) @ q
        return max(worst, float(np.linalg.norm(resid, axis=1).max()))

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<FiniteDimAlgebra{label} n={self.ambient_dim} dim={self.dim} structure={list(self.structure)}>"


def _orthonormal_basis(mats: np.ndarray, n: int, tol: float) -> np.ndarray:
    if mats.shape[0] == 0:
        return np.zeros((0, n, n), dtype=complex)
    flat = mats.reshape(len(mats), -1)
    gram = flat.conj() @ flat.T
    if gram.shape[0] <= n * n and np.allclose(gram, np.eye(len(gram)), atol=tol):
        return mats.astype(complex)
    return orthonormalize(mats, tol)


def commutant_vectors(mats, n: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ``{X : X Y = Y X for all Y in mats}``."""
    mats = stack(mats)
    if mats.shape[0] == 0:
        return np.eye(n * n, dtype=complex).reshape(n * n, n, n)
    null = gram_nullspace(intertwiner_gram(mats, mats), tol)
    return null.reshape(-1, n, n)


def _rng(attempt: int) -> np.random.Generator:
    return np.random.default_rng([SPLIT_SEED, attempt])


def _split_commutative(herm: np.ndarray, expected: int, tol: float, on: np.ndarray | None = None):
    """Spectral subspaces of a generic combination of commuting Hermitian matrices.

    Returns a list of matrices whose orthonormal columns span the joint
    eigenspaces, in ascending order of the random combination's eigenvalue.
    """
    for attempt in range(_MAX_SPLIT_ATTEMPTS):
        rng = _rng(attempt)
        coeffs = rng.normal(size=len(herm))
        h = np.einsum("k,kij->ij", coeffs, herm)
        if on is not None:
            h = on.conj().T @ h @ on
        h = (h + h.conj().T) / 2
        w, v = np.linalg.eigh(h)
        scale = max(1.0, float(np.abs(w).max()) if w.size else 1.0)
        groups = cluster_sorted(w, math.sqrt(tol) * scale)
        if len(groups) == expected:
            vecs = [v[:, g] for g in groups]
            return [on @ x for x in vecs] if on is not None else vecs
    raise NumericalError(f"could not split a commutative family into {expected} joint eigenspaces")


def _decompose(basis: np.ndarray, n: int, tol: float, name: str) -> FiniteDimAlgebra:
    d = len(basis)
    comm = commutant_vectors(basis, n, tol)
    qa = basis.reshape(d, -1).T
    qc = comm.reshape(len(comm), -1).T
    zq = intersect_spans(qa, qc, tol)
    center = zq.T.reshape(-1, n, n)
    num = len(center)
    if num == 0:
        raise NumericalError("empty center; the span is not a unital *-algebra")

    if num == 1:
        ranges = [np.eye(n, dtype=complex)]
    else:
        ranges = _split_commutative(hermitian_spanning_set(center), num, tol)

    sectors = []
    for vk in ranges:
        z = vk @ vk.conj().T
        zb = flat_basis(np.einsum("ij,kjl->kil", z, basis), tol)
        dim_k = zb.shape[1]
        nk = math.isqrt(dim_k)
        rank = vk.shape[1]
        if nk * nk != dim_k or rank % nk:
            raise NumericalError(
                f"central summand of dimension {dim_k} on a rank-{rank} projection is not a full matrix block"
            )
        mk = rank // nk
        key = (nk, tuple(-np.round(np.real(np.diag(z)), 6)))
        sectors.append((key, nk, mk, vk, zb.T.reshape(-1, n, n)))
    sectors.sort(key=lambda s: s[0])

    columns = []
    for _, nk, mk, vk, zbasis in sectors:
        columns.append(_matrix_unit_columns(nk, mk, vk, zbasis, tol))
    u = np.hstack(columns)
    if np.linalg.norm(u.conj().T @ u - np.eye(n)) > math.sqrt(tol) * n:
        raise NumericalError("block change of basis is not unitary")

    projections = np.array([vk @ vk.conj().T for _, _, _, vk, _ in sectors])
    structure = tuple((nk, mk) for _, nk, mk, _, _ in sectors)
    return FiniteDimAlgebra(
        ambient_dim=n,
        basis=basis,
        structure=structure,
        block_unitary=u,
        central_projections=projections,
        center_basis=center,
        commutant_basis=comm,
        tol=tol,
        name=name,
    )


def _matrix_unit_columns(nk: int, mk: int, vk: np.ndarray, zbasis: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal columns ordered ``(j, r)`` so the block acts as ``a (x) 1_mk``."""
    if nk == 1:
        return vk
    local = np.einsum("ai,kab,bj->kij", vk.conj(), zbasis, vk)
    herm = hermitian_spanning_set(local)
    for attempt in range(_MAX_SPLIT_ATTEMPTS):
        try:
            eig = _split_commutative(herm, nk, tol) if attempt == 0 else None
        except NumericalError:
            eig = None
        if eig is None:
            rng = _rng(100 + attempt)
            h = np.einsum("k,kij->ij", rng.normal(size=len(herm)), herm)
            w, v = np.linalg.eigh((h + h.conj().T) / 2)
            groups = cluster_sorted(w, math.sqrt(tol) * max(1.0, float(np.abs(w).max())))
            if len(groups) != nk:
                continue
            eig = [v[:, g] for g in groups]
        if any(e.shape[1] != mk for e in eig):
            continue
        rng = _rng(200 + attempt)
        y = np.einsum("k,kij->ij", rng.normal(size=len(local)) + 1j * rng.normal(size=len(local)), local)
        cols = [eig[0]]
        ok = True
        for wj in eig[1:]:
            mj = wj.conj().T @ y @ eig[0]
            c = math.sqrt(max(np.trace(mj.conj().T @ mj).real / mk, 0.0))
            if c < math.sqrt(tol):
                ok = False
                break
            uj = mj / c
            if np.linalg.norm(uj.conj().T @ uj - np.eye(mk)) > math.sqrt(tol):
                ok = False
                break
            cols.append(wj @ uj)
        if ok:
            return vk @ np.hstack(cols)
    raise NumericalError(f"could not find matrix units for a {nk}x{nk} block")


# -- construction ---------------------------------------------------------------

def generate_algebra(generators, ambient_dim: int, tol: float = DEFAULT_TOL, name: str = "") -> FiniteDimAlgebra:
    """Smallest unital *-algebra containing ``generators``, as a double commutant."""
    n = int(ambient_dim)
    gens = [np.asarray(g, dtype=complex) for g in generators]
    for i, g in enumerate(gens):
        if g.shape != (n, n):
            raise DimensionMismatch(f"generator {i} has shape {g.shape}, expected ({n}, {n})")
    gens.append(np.eye(n, dtype=complex))
    comm = commutant_vectors(np.array(gens), n, tol)
    bicomm = commutant_vectors(comm, n, tol)
    return FiniteDimAlgebra.from_span(bicomm, n, tol, name)


def commutant(a: FiniteDimAlgebra) -> FiniteDimAlgebra:
    return FiniteDimAlgebra.from_span(a.commutant_basis, a.ambient_dim, a.tol, f"{a.name}'" if a.name else "")


def center(a: FiniteDimAlgebra) -> FiniteDimAlgebra:
    return FiniteDimAlgebra.from_span(a.center_basis, a.ambient_dim, a.tol, f"Z({a.name})" if a.name else "")


def minimal_central_projections(a: FiniteDimAlgebra) -> list:
    return [Projection(z, a.tol) for z in a.central_projections]


def full_matrix_algebra(n: int, tol: float = DEFAULT_TOL) -> FiniteDimAlgebra:
    units = np.eye(n * n, dtype=complex).reshape(n * n, n, n)
    return FiniteDimAlgebra.from_span(units, n, tol, f"M{n}")


def diagonal_algebra(n: int, tol: float = DEFAULT_TOL) -> FiniteDimAlgebra:
    units = np.array([np.diag(np.eye(n)[i]) for i in range(n)], dtype=complex)
    return FiniteDimAlgebra.from_span(units, n, tol, f"D{n}")


def scalar_algebra(n: int, tol: float = DEFAULT_TOL) -> FiniteDimAlgebra:
    return FiniteDimAlgebra.from_span([np.eye(n)], n, tol, "C")


def block_diagonal_algebra(structure, tol: float = DEFAULT_TOL) -> FiniteDimAlgebra:
    """``(+)_k M_{n_k} (x) 1_{m_k}`` placed along the diagonal in the given order."""
    structure = [(int(nk), int(mk)) for nk, mk in structure]
    n = sum(nk * mk for nk, mk in structure)
    mats, o = [], 0
    for nk, mk in structure:
        for i in range(nk):
            for j in range(nk):
                x = np.zeros((n, n), dtype=complex)
                unit = np.zeros((nk, nk))
                unit[i, j] = 1.0
                x[o:o + nk * mk, o:o + nk * mk] = np.kron(unit, np.eye(mk)) / math.sqrt(mk)
                mats.append(x)
        o += nk * mk
    name = "+".join(f"M{nk}" + (f"x{mk}" if mk > 1 else "") for nk, mk in structure)
    return FiniteDimAlgebra.from_span(np.array(mats), n, tol, name)


def tensor_product(a: FiniteDimAlgebra, b: FiniteDimAlgebra) -> FiniteDimAlgebra:
    mats = np.einsum("aij,bkl->abikjl", a.basis, b.basis)
    n = a.ambient_dim * b.ambient_dim
    mats = mats.reshape(a.dim * b.dim, n, n)
    name = f"{a.name}(x){b.name}" if a.name and b.name else ""
    return FiniteDimAlgebra.from_span(mats, n, min(a.tol, b.tol), name)


def join(a: FiniteDimAlgebra, b: FiniteDimAlgebra) -> FiniteDimAlgebra:
    """The algebra generated by two algebras on the same space."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("algebras act on different spaces")
    mats = np.concatenate([a.basis, b.basis])
    n = a.ambient_dim
    return FiniteDimAlgebra.from_span(commutant_vectors(commutant_vectors(mats, n, a.tol), n, a.tol), n, a.tol)


# -- representations --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RepresentationData:
    """A *-representation of ``algebra`` given by the images of its basis.

    ``matrices[i]`` is the image of ``algebra.basis[i]``; ``multiplicities[k]``
    counts copies of the ``k``-th irreducible block (canonical order).
    """

    algebra: FiniteDimAlgebra
    matrices: np.ndarray
    multiplicities: tuple = field(default=())

    @property
    def dim(self) -> int:
        return int(self.matrices.shape[1]) if self.matrices.ndim == 3 else 0

    @property
    def support(self) -> frozenset:
        return frozenset(k for k, m in enumerate(self.multiplicities) if m > 0)

    def image(self, x) -> np.ndarray:
        c = self.algebra.coefficients(x)
        return np.einsum("k,kij->ij", c, self.matrices)

    @classmethod
    def from_matrices(cls, algebra: FiniteDimAlgebra, matrices) -> "RepresentationData":
        mats = stack(matrices)
        if len(mats) != algebra.dim:
            raise DimensionMismatch(f"expected {algebra.dim} basis images, got {len(mats)}")
        mult = []
        for z, (nk, _) in zip(algebra.central_projections, algebra.structure):
            c = algebra.coefficients(z)
            rank = np.trace(np.einsum("k,kij->ij", c, mats)).real if mats.shape[1] else 0.0
            mult.append(int(round(rank / nk)))
        return cls(algebra, mats, tuple(mult))

    def homomorphism_defect(self, samples: int = 8) -> float:
        """Residual of ``pi(xy) = pi(x)pi(y)`` and ``pi(x*) = pi(x)*`` on random pairs."""
        if self.dim == 0:
            return 0.0
        rng = _rng(300)
        worst = 0.0
        a = self.algebra
        for _ in range(samples):
            cx = rng.normal(size=a.dim) + 1j * rng.normal(size=a.dim)
            cy = rng.normal(size=a.dim) + 1j * rng.normal(size=a.dim)
            x = np.einsum("k,kij->ij", cx, a.basis)
            y = np.einsum("k,kij->ij", cy, a.basis)
            px, py = self.image(x), self.image(y)
            worst = max(worst, float(np.linalg.norm(self.image(x @ y) - px @ py)))
            worst = max(worst, float(np.linalg.norm(self.image(x.conj().T) - px.conj().T)))
        return worst


def representation(algebra: FiniteDimAlgebra, multiplicities) -> RepresentationData:
    """``(+)_k pi_k (x) 1_{mu_k}`` with ``pi_k`` the ``k``-th irreducible block."""
    mult = tuple(int(m) for m in multiplicities)
    if len(mult) != algebra.num_sectors or any(m < 0 for m in mult):
        raise DimensionMismatch(f"need {algebra.num_sectors} non-negative multiplicities, got {mult}")
    dim = sum(nk * m for (nk, _), m in zip(algebra.structure, mult))
    mats = np.zeros((algebra.dim, dim, dim), dtype=complex)
    o = 0
    for a, (nk, _), m in zip(algebra.basis_blocks, algebra.structure, mult):
        if m:
            # kron(a, 1_m) for the whole stack at once
            mats[:, o:o + nk * m, o:o + nk * m] = np.einsum("aij,rs->airjs", a, np.eye(m)).reshape(-1, nk * m, nk * m)
            o += nk * m
    return RepresentationData(algebra, mats, mult)


def defining_representation(algebra: FiniteDimAlgebra) -> RepresentationData:
    return RepresentationData(algebra, algebra.basis.copy(), algebra.multiplicities)


def reduced_universal_representation(algebra: FiniteDimAlgebra) -> RepresentationData:
    """One copy of every irreducible block."""
    return representation(algebra, [1] * algebra.num_sectors)


def irreducible_representation(algebra: FiniteDimAlgebra, k: int, copies: int = 1) -> RepresentationData:
    mult = [0] * algebra.num_sectors
    mult[k] = copies
    return representation(algebra, mult)


def direct_sum(*reps: RepresentationData) -> RepresentationData:
    _check_same_algebra(*reps)
    a = reps[0].algebra
    dim = sum(r.dim for r in reps)
    mats = np.zeros((a.dim, dim, dim), dtype=complex)
    o = 0
    for r in reps:
        mats[:, o:o + r.dim, o:o + r.dim] = r.matrices
        o += r.dim
    mult = tuple(sum(ms) for ms in zip(*(r.multiplicities for r in reps)))
    return RepresentationData(a, mats, mult)


def represented_algebra(rep: RepresentationData) -> FiniteDimAlgebra:
    """The concrete algebra ``pi(A)`` (equal to its weak closure here)."""
    if rep.dim == 0:
        raise DimensionMismatch("zero representation has no represented algebra")
    return FiniteDimAlgebra.from_span(rep.matrices, rep.dim, rep.algebra.tol)


def _same_algebra(a: FiniteDimAlgebra, b: FiniteDimAlgebra) -> bool:
    if a is b:
        return True
    return a.basis.shape == b.basis.shape and np.allclose(a.basis, b.basis, atol=a.tol)


def _check_same_algebra(*reps: RepresentationData):
    first = reps[0].algebra
    for r in reps[1:]:
        if not _same_algebra(first, r.algebra):
            raise MismatchedAlgebra("representations belong to different algebras")


def intertwiner_space(pi1: RepresentationData, pi2: RepresentationData) -> list:
    """Basis of ``{T : T pi1(a) = pi2(a) T}``; ``T`` has shape ``(dim pi2, dim pi1)``."""
    _check_same_algebra(pi1, pi2)
    if pi1.dim == 0 or pi2.dim == 0:
        return []
    tol = pi1.algebra.tol
    null = gram_nullspace(intertwiner_gram(pi1.matrices, pi2.matrices), tol)
    return [v.reshape(pi2.dim, pi1.dim) for v in null]
