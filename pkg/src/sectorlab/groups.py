"""Finite groups, characters, the multiplicative unitary and MASA data."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import FiniteDimAlgebra, tensor_product
from .errors import DimensionMismatch, InvalidAction, NotCommutative, NotMaximal, NotSubalgebra
from .linalg import intersect_spans, permutation_matrix, subspace_distance


class FiniteAbelianGroup:
    """``Z_{n_1} x ... x Z_{n_r}`` with elements as tuples, indexed in row-major mixed radix."""

    abelian = True

    def __init__(self, cyclic_orders=()):
        orders = tuple(int(n) for n in cyclic_orders)
        if any(n < 1 for n in orders):
            raise ValueError(f"cyclic orders must be positive, got {orders}")
        self.cyclic_orders = orders

    def __repr__(self):
        if not self.cyclic_orders:
            return "FiniteAbelianGroup(trivial)"
        return "FiniteAbelianGroup(" + " x ".join(f"Z{n}" for n in self.cyclic_orders) + ")"

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.cyclic_orders == other.cyclic_orders

    def __hash__(self):
        return hash(self.cyclic_orders)

    @property
    def order(self) -> int:
        return math.prod(self.cyclic_orders)

    @cached_property
    def elements(self) -> list:
        return list(itertools.product(*(range(n) for n in self.cyclic_orders)))

    @property
    def identity(self) -> tuple:
        return tuple(0 for _ in self.cyclic_orders)

    def normalize(self, g) -> tuple:
        if isinstance(g, (int, np.integer)):
            g = (int(g),) if len(self.cyclic_orders) == 1 else self.elements[int(g)]
        g = tuple(int(x) for x in g)
        if len(g) != len(self.cyclic_orders):
            raise ValueError(f"element {g} does not match {self}")
        return tuple(x % n for x, n in zip(g, self.cyclic_orders))

    def index(self, g) -> int:
        i = 0
        for x, n in zip(self.normalize(g), self.cyclic_orders):
            i = i * n + x
        return i

    def add(self, g, h) -> tuple:
        return self.normalize(tuple(a + b for a, b in zip(self.normalize(g), self.normalize(h))))

    def neg(self, g) -> tuple:
        return self.normalize(tuple(-a for a in self.normalize(g)))

    # index-level interface shared with TableGroup
    def mul_index(self, i: int, j: int) -> int:
        return self.index(self.add(self.elements[i], self.elements[j]))

    def inv_index(self, i: int) -> int:
        return self.index(self.neg(self.elements[i]))

    @property
    def identity_index(self) -> int:
        return 0

    def pairing(self, chi, g) -> complex:
        """``chi(g) = exp(2 pi i sum_j k_j g_j / n_j)`` for the exponent tuple ``chi``."""
        chi, g = self.normalize(chi), self.normalize(g)
        phase = sum(k * x / n for k, x, n in zip(chi, g, self.cyclic_orders))
        return complex(np.exp(2j * np.pi * phase))

    def character_table(self) -> np.ndarray:
        """``table[chi, g] = chi(g)`` with both axes in element order."""
        return np.array([[self.pairing(c, g) for g in self.elements] for c in self.elements])


def dual_group(g: FiniteAbelianGroup) -> FiniteAbelianGroup:
    """The character group, identified with ``g`` through exponent tuples."""
    return FiniteAbelianGroup(g.cyclic_orders)


def pairing(group: FiniteAbelianGroup, chi, g) -> complex:
    return group.pairing(chi, g)


class TableGroup:
    """A finite group given by its multiplication table on indices ``0..N-1``."""

    abelian = False

    def __init__(self, table, labels=None):
        t = np.asarray(table, dtype=int)
        n = t.shape[0]
        if t.shape != (n, n) or any(sorted(row) != list(range(n)) for row in t.tolist()):
            raise InvalidAction("multiplication table must be a Latin square")
        ident = [e for e in range(n) if list(t[e]) == list(range(n))]
        if not ident:
            raise InvalidAction("multiplication table has no identity")
        self.table = t
        self.identity_index = ident[0]
        self.labels = list(labels) if labels is not None else list(range(n))
        self.abelian = bool(np.array_equal(t, t.T))

    @classmethod
    def from_permutations(cls, generators) -> "TableGroup":
        """Closure of a set of permutations (tuples of images) under composition."""
        gens = [tuple(int(x) for x in p) for p in generators]
        size = len(gens[0]) if gens else 1
        ident = tuple(range(size))
        elems, frontier = [ident], [ident]
        while frontier:
            new = []
            for p in frontier:
                for s in gens:
                    q = tuple(s[p[i]] for i in range(size))
                    if q not in elems:
                        elems.append(q)
                        new.append(q)
            frontier = new
        pos = {p: i for i, p in enumerate(elems)}
        table = [[pos[tuple(a[b[i]] for i in range(size))] for b in elems] for a in elems]
        return cls(table, elems)

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def elements(self) -> list:
        return self.labels

    def mul_index(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inv_index(self, i: int) -> int:
        return int(np.flatnonzero(self.table[i] == self.identity_index)[0])

    def __repr__(self):
        return f"TableGroup(order={self.order})"


# -- multiplicative unitary ------------------------------------------------------

@dataclass(frozen=True)
class MultiplicativeUnitary:
    """``V|s, t> = |s, s + t>`` stored as the index map ``perm[s*N + t]``."""

    group: FiniteAbelianGroup
    perm: np.ndarray

    @property
    def dim(self) -> int:
        return self.group.order

    def matrix(self) -> np.ndarray:
        return permutation_matrix(self.perm)


def multiplicative_unitary(group: FiniteAbelianGroup) -> MultiplicativeUnitary:
    n = group.order
    perm = np.empty(n * n, dtype=int)
    for s, gs in enumerate(group.elements):
        for t, gt in enumerate(group.elements):
            perm[s * n + t] = s * n + group.index(group.add(gs, gt))
    return MultiplicativeUnitary(group, perm)


def _leg_perm(perm: np.ndarray, n: int, legs: tuple) -> np.ndarray:
    """Index map of a two-leg permutation acting on ``legs`` of a triple tensor power."""
    out = np.empty(n ** 3, dtype=int)
    for a, b, c in itertools.product(range(n), repeat=3):
        idx = [a, b, c]
        i, j = legs
        img = perm[idx[i] * n + idx[j]]
        idx[i], idx[j] = divmod(int(img), n)
        out[(a * n + b) * n + c] = (idx[0] * n + idx[1]) * n + idx[2]
    return out


def _swap23(n: int) -> np.ndarray:
    s = np.zeros((n ** 3, n ** 3))
    for a, b, c in itertools.product(range(n), repeat=3):
        s[(a * n + c) * n + b, (a * n + b) * n + c] = 1.0
    return s


def check_pentagonal(v, dim: int | None = None) -> float:
    """``||V12 V13 V23 - V23 V12||_F`` on the triple tensor power.

    A :class:`MultiplicativeUnitary` is checked by exact composition of index
    maps; any other square matrix densely.
    """
    if isinstance(v, MultiplicativeUnitary):
        n = v.dim
        p12, p13, p23 = (_leg_perm(v.perm, n, legs) for legs in [(0, 1), (0, 2), (1, 2)])
        lhs = p12[p13[p23]]
        rhs = p23[p12]
        # two permutation matrices differ by sqrt(2) per mismatched column
        return math.sqrt(2.0 * int(np.count_nonzero(lhs != rhs)))
    v = np.asarray(v, dtype=complex)
    size = v.shape[0]
    n = dim if dim is not None else math.isqrt(size)
    if v.shape != (size, size) or n * n != size:
        raise DimensionMismatch(f"operator of size {v.shape} is not on a tensor square")
    eye = np.eye(n)
    v12 = np.kron(v, eye)
    v23 = np.kron(eye, v)
    sw = _swap23(n)
    v13 = sw @ v12 @ sw
    return float(np.linalg.norm(v12 @ v13 @ v23 - v23 @ v12))


def lambda_of(weights, v: MultiplicativeUnitary) -> np.ndarray:
    """Slice of ``V`` by a functional on the function leg: ``sum_s w_s lambda_s``."""
    n = v.dim
    w = np.asarray(weights, dtype=complex).reshape(-1)
    if len(w) != n:
        raise DimensionMismatch(f"functional has {len(w)} weights, group has order {n}")
    v4 = v.matrix().reshape(n, n, n, n)
    return np.einsum("s,sasb->ab", w, v4)


def translation(group: FiniteAbelianGroup, g) -> np.ndarray:
    """``lambda_g |t> = |g + t>``."""
    perm = [group.index(group.add(g, t)) for t in group.elements]
    return permutation_matrix(perm)


def delta(group: FiniteAbelianGroup, g) -> np.ndarray:
    w = np.zeros(group.order)
    w[group.index(g)] = 1.0
    return w


def convolution(w1, w2, group: FiniteAbelianGroup) -> np.ndarray:
    w1 = np.asarray(w1, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    out = np.zeros(group.order, dtype=complex)
    for i, a in enumerate(group.elements):
        for j, b in enumerate(group.elements):
            out[group.index(group.add(a, b))] += w1[i] * w2[j]
    return out


def fourier_matrix(group: FiniteAbelianGroup) -> np.ndarray:
    """Unitary with rows ``<f_chi|``, ``f_chi = sum_t chi(t)|t> / sqrt(N)``.

    ``F lambda_g F^* = diag(conj(chi(g)))``.
    """
    return group.character_table().conj() / math.sqrt(group.order)


# -- MASA data -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MasaData:
    factor: FiniteDimAlgebra
    masa: FiniteDimAlgebra
    eigenbasis: np.ndarray
    projections: np.ndarray
    group: FiniteAbelianGroup
    labels: tuple

    @property
    def num_outcomes(self) -> int:
        return len(self.projections)

    def projection(self, gamma) -> np.ndarray:
        return self.projections[self.labels.index(self.group.normalize(gamma))]


def verify_masa(m: FiniteDimAlgebra, n: FiniteDimAlgebra, group: FiniteAbelianGroup | None = None) -> MasaData:
    """Check ``N' cap M = N`` and label the spectral projections of ``N`` by ``group``.

    Projections are taken in the canonical sector order of ``N`` and the
    ``j``-th one is labelled by the ``j``-th group element (``Z_K`` by default).
    """
    if m.ambient_dim != n.ambient_dim:
        raise DimensionMismatch("M and N act on different spaces")
    worst = max(m.distance(x) for x in n.basis)
    if worst > m.tol * max(1.0, math.sqrt(m.ambient_dim)):
        raise NotSubalgebra(f"N is not contained in M (distance {worst:.3e})")
    if not n.is_commutative:
        raise NotCommutative(f"N has block structure {list(n.structure)}")
    qm = m.basis.reshape(m.dim, -1).T
    qc = n.commutant_basis.reshape(len(n.commutant_basis), -1).T
    rel = intersect_spans(qm, qc, m.tol)
    if rel.shape[1] > n.dim:
        raise NotMaximal(f"relative commutant has dimension {rel.shape[1]} > dim N = {n.dim}")
    k = n.num_sectors
    if group is None:
        group = FiniteAbelianGroup((k,))
    if group.order != k:
        raise DimensionMismatch(f"group of order {group.order} cannot label {k} spectral projections")
    cols = []
    for z in n.central_projections:
        w, v = np.linalg.eigh(z)
        cols.append(v[:, w > 0.5])
    basis = np.hstack(cols)
    return MasaData(m, n, basis, n.central_projections.copy(), group, tuple(group.elements))


def conditional_sector_structure(m: FiniteDimAlgebra, n: FiniteDimAlgebra) -> dict:
    """Center of ``M (x) N`` compared with ``1 (x) N``."""
    data = verify_masa(m, n)
    t = tensor_product(m, n)
    d = m.ambient_dim
    one_n = np.array([np.kron(np.eye(d), f) for f in n.basis])
    dist = subspace_distance(t.center_basis, one_n, m.tol)
    return {
        "sectors": t.num_sectors,
        "center_dim": len(t.center_basis),
        "spectrum_size": data.num_outcomes,
        "structure": [list(s) for s in t.structure],
        "center_distance": dist,
        "tol": m.tol,
        "holds": dist < m.tol and t.num_sectors == data.num_outcomes,
    }
