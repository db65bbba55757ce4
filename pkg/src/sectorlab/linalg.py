"""Dense linear-algebra helpers on spaces of complex matrices.

Matrices are flattened row-major, so ``vec(A @ X @ B) = kron(A, B.T) @ vec(X)``
and the Frobenius inner product of two flattened matrices is the trace inner
product ``<X, Y> = trace(X^* Y)``.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-9

# Fixed seed for the generic random combinations used in spectral splitting.
SPLIT_SEED = 0x5EC7


def as_matrix(x, n=None) -> np.ndarray:
    a = np.asarray(x, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ValueError(f"expected a {n}x{n} matrix, got {a.shape[0]}x{a.shape[1]}")
    return a


def stack(mats) -> np.ndarray:
    """Return matrices as a ``(k, r, c)`` complex array (``k`` may be 0)."""
    if isinstance(mats, np.ndarray) and mats.ndim == 3:
        return mats.astype(complex, copy=False)
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        return np.zeros((0, 0, 0), dtype=complex)
    return np.stack(mats)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def orthonormalize(vectors: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Modified Gram-Schmidt (two passes) over the rows of ``vectors``.

    Rows shorter than ``tol`` times the longest row are dropped, as are rows
    whose residual after projection falls below ``tol`` times their original
    norm.  Returns an array with orthonormal rows.
    """
    vectors = np.asarray(vectors, dtype=complex)
    shape = vectors.shape[1:]
    flat = vectors.reshape(len(vectors), -1)
    out: list[np.ndarray] = []
    norms = np.linalg.norm(flat, axis=1) if len(flat) else np.zeros(0)
    floor = tol * float(norms.max()) if norms.size else 0.0
    for v, norm0 in zip(flat, norms):
        if norm0 <= floor or norm0 == 0.0:
            continue
        w = v / norm0
        for _ in range(2):
            for q in out:
                w = w - np.vdot(q, w) * q
        r = np.linalg.norm(w)
        if r > tol:
            out.append(w / r)
    if not out:
        return np.zeros((0,) + shape, dtype=complex)
    return np.array(out).reshape((len(out),) + shape)


def kron_sum(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """``sum_a kron(left[a], right[a])`` without forming each product."""
    a, i, k = left.shape
    _, j, l = right.shape
    t = np.tensordot(left, right, axes=(0, 0))  # (i, k, j, l)
    return t.transpose(0, 2, 1, 3).reshape(i * j, k * l)


def intertwiner_gram(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Gram matrix of ``T -> T p1[a] - p2[a] T`` summed over ``a``.

    ``p1`` has shape ``(k, d1, d1)`` and ``p2`` shape ``(k, d2, d2)``; the
    result acts on row-major ``vec(T)`` for ``T`` of shape ``(d2, d1)``.
    """
    k, d1, _ = p1.shape
    d2 = p2.shape[1]
    if k == 0:
        return np.zeros((d1 * d2, d1 * d2), dtype=complex)
    left = np.einsum("aij,akj->ik", np.conj(p1), p1)  # sum conj(P1) P1^T
    right = np.einsum("aji,ajk->ik", np.conj(p2), p2)  # sum P2^* P2
    g = np.kron(np.eye(d2), left) + np.kron(right, np.eye(d1))
    g -= kron_sum(p2, np.conj(p1))
    g -= kron_sum(dagger(p2), np.swapaxes(p1, 1, 2))
    return (g + g.conj().T) / 2


def gram_nullspace(gram: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal null vectors (as rows) of a positive semidefinite Gram matrix.

    The Gram matrix squares singular values, so the cut is ``tol`` relative on
    its eigenvalues, i.e. ``sqrt(tol)`` relative on the singular values.
    """
    if gram.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    w, v = np.linalg.eigh(gram)
    scale = max(float(w[-1]), 1.0)
    keep = w <= tol * scale
    return v[:, keep].T.copy()


def nullspace(mat: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal null vectors (rows) of ``mat`` by singular-value thresholding."""
    mat = np.asarray(mat, dtype=complex)
    ncols = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    scale = max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int(np.sum(s > tol * scale))
    return vh[rank:].conj()


def flat_basis(mats: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the span of flattened matrices."""
    mats = np.asarray(mats, dtype=complex)
    if mats.size == 0 or len(mats) == 0:
        n = int(np.prod(mats.shape[1:])) if mats.ndim > 1 else 0
        return np.zeros((n, 0), dtype=complex)
    flat = mats.reshape(len(mats), -1).T
    u, s, _ = np.linalg.svd(flat, full_matrices=False)
    scale = max(float(s[0]), 1e-300)
    rank = int(np.sum(s > tol * scale))
    return u[:, :rank]


def subspace_distance(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """Spectral norm of the difference of the orthogonal projectors onto two spans.

    ``a`` and ``b`` are stacks of matrices (or of vectors).  The value is the
    sine of the largest principal angle, and 1.0 when dimensions differ.
    """
    qa = flat_basis(a, tol)
    qb = flat_basis(b, tol)
    if qa.shape[1] != qb.shape[1]:
        return 1.0
    if qa.shape[1] == 0:
        return 0.0
    # sine of the largest angle, computed without the cancellation in sqrt(1 - cos^2)
    resid = qb - qa @ (qa.conj().T @ qb)
    return float(np.linalg.norm(resid, 2))


def residual_from_span(x: np.ndarray, q: np.ndarray) -> float:
    """Norm of the component of flattened ``x`` orthogonal to columns ``q``."""
    v = np.asarray(x, dtype=complex).reshape(-1)
    if q.shape[1] == 0:
        return float(np.linalg.norm(v))
    return float(np.linalg.norm(v - q @ (q.conj().T @ v)))


def intersect_spans(qa: np.ndarray, qb: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the intersection of two column spans.

    Both inputs must have orthonormal columns.
    """
    if qa.shape[1] == 0 or qb.shape[1] == 0:
        return np.zeros((qa.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(qa.conj().T @ qb, full_matrices=False)
    keep = s > 1.0 - np.sqrt(tol)
    return qa @ u[:, keep]


def cluster_sorted(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Split indices of ascending ``values`` wherever consecutive gaps exceed ``gap``."""
    if len(values) == 0:
        return []
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] > gap:
            groups.append([i])
        else:
            groups[-1].append(i)
    return [np.array(g) for g in groups]


def hermitian_spanning_set(mats: np.ndarray) -> np.ndarray:
    """Hermitian and anti-Hermitian parts (made Hermitian) of each matrix."""
    mats = stack(mats)
    herm = (mats + dagger(mats)) / 2
    anti = (mats - dagger(mats)) / 2j
    return np.concatenate([herm, anti])


def hermitian_power(h: np.ndarray, p) -> np.ndarray:
    """``h**p`` for Hermitian positive definite ``h`` (``p`` may be complex)."""
    w, v = np.linalg.eigh(h)
    return (v * np.power(w.astype(complex), p)) @ v.conj().T


def unitarity_defect(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=complex)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[1])))


def permutation_matrix(perm) -> np.ndarray:
    """Matrix with ``P e_i = e_{perm[i]}``."""
    perm = np.asarray(perm, dtype=int)
    p = np.zeros((len(perm), len(perm)))
    p[perm, np.arange(len(perm))] = 1.0
    return p
