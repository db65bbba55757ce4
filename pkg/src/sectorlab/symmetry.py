"""Finite group actions on algebras: fixed points, crossed products and sector breaking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import polar

from .algebra import (
    FiniteDimAlgebra,
    RepresentationData,
    commutant,
    defining_representation,
    generate_algebra,
)
from .errors import InvalidAction
from .groups import FiniteAbelianGroup, translation
from .linalg import gram_nullspace, intertwiner_gram, permutation_matrix, subspace_distance


@dataclass(frozen=True, eq=False)
class GroupAction:
    """``g -> alpha_g`` as superoperators on row-major ``vec(x)``.

    ``unitaries`` holds implementers ``u_g`` (``alpha_g = Ad u_g``) when the
    action was given that way, otherwise ``None``.
    """

    algebra: FiniteDimAlgebra
    group: object
    superops: np.ndarray
    unitaries: np.ndarray | None = None

    def __post_init__(self):
        self.validate()

    @property
    def order(self) -> int:
        return self.group.order

    def apply(self, g: int, x) -> np.ndarray:
        n = self.algebra.ambient_dim
        return (self.superops[g] @ np.asarray(x, dtype=complex).reshape(-1)).reshape(n, n)

    def validate(self):
        a = self.algebra
        n, g = a.ambient_dim, self.group
        if self.superops.shape != (g.order, n * n, n * n):
            raise InvalidAction(f"expected {g.order} superoperators on {n}x{n} matrices")
        scale = a.tol * max(1.0, n)
        for i in range(g.order):
            imgs = np.array([self.apply(i, e) for e in a.basis])
            worst = max(a.distance(y) for y in imgs)
            if worst > scale:
                raise InvalidAction(f"element {i} does not preserve the algebra (distance {worst:.3e})")
            adj = max(
                float(np.linalg.norm(self.apply(i, e.conj().T) - y.conj().T)) for e, y in zip(a.basis, imgs)
            )
            if adj > scale:
                raise InvalidAction(f"element {i} does not commute with the adjoint (defect {adj:.3e})")
        e = g.identity_index
        ident = max(float(np.linalg.norm(self.apply(e, x) - x)) for x in a.basis)
        if ident > scale:
            raise InvalidAction("identity element does not act trivially")
        for i in range(g.order):
            for j in range(g.order):
                k = g.mul_index(i, j)
                worst = max(
                    float(np.linalg.norm(self.apply(i, self.apply(j, x)) - self.apply(k, x))) for x in a.basis
                )
                if worst > scale:
                    raise InvalidAction(f"alpha_{i} alpha_{j} != alpha_{k} (defect {worst:.3e})")

    @classmethod
    def from_unitaries(cls, algebra: FiniteDimAlgebra, group, unitaries) -> "GroupAction":
        us = np.array([np.asarray(u, dtype=complex) for u in unitaries])
        n = algebra.ambient_dim
        if us.shape != (group.order, n, n):
            raise InvalidAction(f"need {group.order} unitaries of size {n}, got shape {us.shape}")
        for i, u in enumerate(us):
            if np.linalg.norm(u.conj().T @ u - np.eye(n)) > algebra.tol * n:
                raise InvalidAction(f"implementer {i} is not unitary")
        ops = np.array([np.kron(u, u.conj()) for u in us])
        return cls(algebra, group, ops, us)

    @classmethod
    def from_generators(cls, algebra: FiniteDimAlgebra, group: FiniteAbelianGroup, generators) -> "GroupAction":
        """``g -> prod_j u_j^{g_j}`` for one unitary per cyclic factor."""
        gens = [np.asarray(u, dtype=complex) for u in generators]
        if len(gens) != len(group.cyclic_orders):
            raise InvalidAction(f"need one generator per cyclic factor ({len(group.cyclic_orders)})")
        n = algebra.ambient_dim
        us = []
        for g in group.elements:
            u = np.eye(n, dtype=complex)
            for gj, uj in zip(g, gens):
                u = u @ np.linalg.matrix_power(uj, gj)
            us.append(u)
        return cls.from_unitaries(algebra, group, us)

    @classmethod
    def from_permutations(cls, algebra: FiniteDimAlgebra, group, permutations) -> "GroupAction":
        """Each element permutes the ambient basis: ``u_g e_i = e_{perm_g[i]}``."""
        return cls.from_unitaries(algebra, group, [permutation_matrix(p) for p in permutations])

    @classmethod
    def from_basis_maps(cls, algebra: FiniteDimAlgebra, group, maps) -> "GroupAction":
        """``alpha_g(e_i) = sum_j maps[g][j, i] e_j`` on the algebra's orthonormal basis."""
        d = algebra.dim
        flat = algebra.basis.reshape(d, -1)
        ops = []
        for m in maps:
            m = np.asarray(m, dtype=complex)
            if m.shape != (d, d):
                raise InvalidAction(f"basis map must be {d}x{d}")
            ops.append(flat.T @ m @ flat.conj())
        return cls(algebra, group, np.array(ops))

    @classmethod
    def trivial(cls, algebra: FiniteDimAlgebra, group) -> "GroupAction":
        n = algebra.ambient_dim
        return cls.from_unitaries(algebra, group, [np.eye(n)] * group.order)


# -- fixed points ----------------------------------------------------------------------

def averaging_projector(act: GroupAction) -> np.ndarray:
    return act.superops.mean(axis=0)


def fixed_point_algebra(f: FiniteDimAlgebra, act: GroupAction) -> FiniteDimAlgebra:
    if act.algebra is not f and act.algebra.basis.shape != f.basis.shape:
        raise InvalidAction("action is defined on a different algebra")
    p = averaging_projector(act)
    n = f.ambient_dim
    imgs = (f.basis.reshape(f.dim, -1) @ p.T).reshape(f.dim, n, n)
    return FiniteDimAlgebra.from_span(imgs, n, f.tol, f"{f.name}^G" if f.name else "")


# -- sector breaking -----------------------------------------------------------------

def sector_permutation(f: FiniteDimAlgebra, act: GroupAction, g: int) -> tuple:
    """``perm[k] = j`` where ``alpha_g(z_k) = z_j``."""
    zs = f.central_projections
    perm = []
    for z in zs:
        img = act.apply(g, z)
        dists = [float(np.linalg.norm(img - w)) for w in zs]
        j = int(np.argmin(dists))
        if dists[j] > math.sqrt(f.tol) * max(1.0, math.sqrt(f.ambient_dim)):
            raise InvalidAction(f"alpha_{g} does not map a minimal central projection onto another one")
        perm.append(j)
    if sorted(perm) != list(range(len(zs))):
        raise InvalidAction(f"alpha_{g} induces a non-bijective sector map {perm}")
    return tuple(perm)


@dataclass(frozen=True)
class BreakingReport:
    sector_permutations: dict
    verdict: str
    ergodic_components: list
    component_verdicts: list
    stabilizer: list
    sector_labels: list
    weights: list
    unitarily_implementable: dict
    annotation: str | None = None
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "sector_permutations": {str(k): list(v) for k, v in self.sector_permutations.items()},
            "ergodic_components": [list(c) for c in self.ergodic_components],
            "component_verdicts": list(self.component_verdicts),
            "stabilizer": list(self.stabilizer),
            "sector_labels": list(self.sector_labels),
            "weights": list(self.weights),
            "unitarily_implementable": {str(k): v for k, v in self.unitarily_implementable.items()},
            "annotation": self.annotation,
            "notes": list(self.notes),
        }


def _orbits(perms: list, size: int) -> list:
    seen, out = set(), []
    for k in range(size):
        if k in seen:
            continue
        orbit, frontier = {k}, [k]
        while frontier:
            nxt = []
            for s in frontier:
                for p in perms:
                    if p[s] not in orbit:
                        orbit.add(p[s])
                        nxt.append(p[s])
            frontier = nxt
        seen |= orbit
        out.append(sorted(orbit))
    return out


def _element_label(group, i: int) -> str:
    e = group.elements[i]
    return ",".join(str(x) for x in e) if isinstance(e, tuple) else str(e)


def breaking_analysis(
    f: FiniteDimAlgebra,
    act: GroupAction,
    rep: RepresentationData | None = None,
    weights=None,
    annotation: str | None = None,
) -> BreakingReport:
    """Induced action of ``G`` on the sectors of ``pi(F)''`` and the broken/unbroken verdict.

    Sectors of ``pi(F)''`` are the blocks of ``F`` carried by ``pi`` (canonical
    order).  A sector with zero weight is ignored by the verdict.
    """
    rep = defining_representation(f) if rep is None else rep
    supp = sorted(rep.support)
    full = [sector_permutation(f, act, g) for g in range(act.order)]
    for g, p in enumerate(full):
        if sorted(p[k] for k in supp) != supp:
            raise InvalidAction(f"alpha_{g} does not map the represented algebra to itself")
    local = {k: i for i, k in enumerate(supp)}
    perms = [tuple(local[p[k]] for k in supp) for p in full]
    size = len(supp)
    w = np.ones(size) / max(size, 1) if weights is None else np.asarray(weights, dtype=float)
    if len(w) != size:
        raise InvalidAction(f"{len(w)} weights for {size} represented sectors")
    live = [k for k in range(size) if w[k] > f.tol]
    moved = any(p[k] != k for p in perms for k in live)
    orbits = _orbits(perms, size)
    comp_verdicts = [
        "unbroken" if all(p[k] == k for p in perms for k in orb if w[k] > f.tol) else "broken" for orb in orbits
    ]
    stab = [g for g, p in enumerate(perms) if all(p[k] == k for k in live)]
    implementable = {}
    for g, p in enumerate(full):
        implementable[_element_label(act.group, g)] = all(
            rep.multiplicities[p[k]] == rep.multiplicities[k] for k in range(f.num_sectors)
        )
    notes = []
    if moved and all(implementable.values()):
        notes.append("broken on the sector spectrum although unitarily implemented on this representation")
    if not moved and not all(implementable.values()):
        notes.append("unbroken on the weighted sectors but not unitarily implemented on this representation")
    return BreakingReport(
        sector_permutations={_element_label(act.group, g): p for g, p in enumerate(perms)},
        verdict="broken" if moved else "unbroken",
        ergodic_components=orbits,
        component_verdicts=comp_verdicts,
        stabilizer=stab,
        sector_labels=[list(f.structure[k]) for k in supp],
        weights=[float(x) for x in w],
        unitarily_implementable=implementable,
        annotation=annotation,
        notes=notes,
    )


# -- crossed products ---------------------------------------------------------------------

def _require_abelian(act: GroupAction):
    if not isinstance(act.group, FiniteAbelianGroup):
        raise InvalidAction("this construction needs an abelian group given by cyclic orders")


def crossed_product(m: FiniteDimAlgebra, act: GroupAction) -> FiniteDimAlgebra:
    """``M x| G`` on ``H (x) C[G]``, generated by ``pi(x) = sum_g alpha_{-g}(x) (x) |g><g|`` and ``1 (x) lambda_g``."""
    _require_abelian(act)
    g = act.group
    n, order = m.ambient_dim, g.order
    gens = []
    for x in m.basis:
        y = np.zeros((n * order, n * order), dtype=complex)
        for i, el in enumerate(g.elements):
            unit = np.zeros((order, order))
            unit[i, i] = 1.0
            y += np.kron(act.apply(g.index(g.neg(el)), x), unit)
        gens.append(y)
    for el in g.elements:
        gens.append(np.kron(np.eye(n), translation(g, el)))
    name = f"{m.name}xG" if m.name else ""
    return generate_algebra(gens, n * order, m.tol, name)


# -- DHR toy model --------------------------------------------------------------------------

def character_projections(act: GroupAction) -> list:
    """``(chi, P_chi)`` for characters with ``P_chi = |G|^-1 sum_g conj(chi(g)) U_g != 0``."""
    g = act.group
    out = []
    for chi in g.elements:
        p = sum(np.conj(g.pairing(chi, el)) * u for el, u in zip(g.elements, act.unitaries)) / g.order
        if np.linalg.norm(p) > act.algebra.tol:
            out.append((chi, p))
    return out


def dhr_toy(f: FiniteDimAlgebra, act: GroupAction) -> dict:
    """Observable algebra ``A = F^G`` against the implementing representation ``U``."""
    _require_abelian(act)
    if act.unitaries is None:
        raise InvalidAction("the action must be given by implementing unitaries")
    g = act.group
    us = act.unitaries
    tol = f.tol
    n = f.ambient_dim
    for i in range(g.order):
        for j in range(g.order):
            k = g.mul_index(i, j)
            if np.linalg.norm(us[i] @ us[j] - us[k]) > tol * n:
                raise InvalidAction(f"U is not a representation: U_{i} U_{j} != U_{k}")
    a = fixed_point_algebra(f, act)
    ug = generate_algebra(list(us), n, tol)
    pi_a_vs_ug_comm = subspace_distance(a.basis, commutant(ug).basis, tol)
    ug_vs_a_comm = subspace_distance(ug.basis, commutant(a).basis, tol)
    chars = character_projections(act)
    labels = []
    for z in a.central_projections:
        match = [chi for chi, p in chars if np.linalg.norm(p - z) < math.sqrt(tol)]
        labels.append(list(match[0]) if len(match) == 1 else None)
    bijective = all(lab is not None for lab in labels) and len(labels) == len(chars)
    return {
        "observable_structure": [list(s) for s in a.structure],
        "observable_dim": a.dim,
        "field_dim": f.dim,
        "group_order": g.order,
        "pi_a_equals_u_commutant": pi_a_vs_ug_comm,
        "u_equals_pi_a_commutant": ug_vs_a_comm,
        "center_dim": len(a.center_basis),
        "characters_in_u": [list(chi) for chi, _ in chars],
        "sector_characters": labels,
        "labels_bijective": bijective,
        "tol": tol,
    }


# -- augmented algebra ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AugmentedAlgebra:
    algebra: FiniteDimAlgebra
    cosets: list
    subgroup: list
    implementers: list
    report: dict


def _is_subgroup(group: FiniteAbelianGroup, h: list) -> bool:
    hs = set(h)
    return group.identity_index in hs and all(group.mul_index(a, b) in hs for a in hs for b in hs)


def _implementer(sources: np.ndarray, targets: np.ndarray, tol: float):
    """A unitary ``W`` with ``W s = t W`` for paired generators, or ``None``."""
    null = gram_nullspace(intertwiner_gram(sources, targets), tol)
    if len(null) == 0:
        return None, float("inf")
    d = sources.shape[1]
    rng = np.random.default_rng(17)
    w = np.einsum("k,kij->ij", rng.normal(size=len(null)) + 1j * rng.normal(size=len(null)), null.reshape(-1, d, d))
    if np.linalg.svd(w, compute_uv=False).min() < math.sqrt(tol):
        return None, float("inf")
    u, _ = polar(w)
    res = max(float(np.linalg.norm(u @ s - t @ u)) for s, t in zip(sources, targets))
    return u, res


def augmented_algebra(f: FiniteDimAlgebra, act: GroupAction, subgroup=None) -> AugmentedAlgebra:
    """``F`` doubled over ``G/H`` so that the broken directions become unitarily implemented.

    On ``H_F (x) l2(G/H)`` the algebra is generated by
    ``pi(x) = sum_q alpha_{-q}(x) (x) |q><q|`` and ``1 (x) l_inf(G/H)``; the
    action ``pi(x) -> pi(alpha_g x)``, ``delta_q -> delta_{q+g}`` is then
    searched for unitary implementers.
    """
    _require_abelian(act)
    g = act.group
    stab = breaking_analysis(f, act).stabilizer
    h = sorted(stab) if subgroup is None else sorted(g.index(x) for x in subgroup)
    if not _is_subgroup(g, h):
        raise InvalidAction(f"{h} is not a subgroup")
    if not set(h) <= set(stab):
        raise InvalidAction(f"subgroup {h} contains elements acting non-trivially on sectors")
    cosets, seen = [], set()
    for i in range(g.order):
        if i in seen:
            continue
        c = sorted(g.mul_index(i, j) for j in h)
        seen |= set(c)
        cosets.append(c)
    coset_of = {i: ci for ci, c in enumerate(cosets) for i in c}
    nq = len(cosets)
    n = f.ambient_dim
    if nq == 1:
        report = {
            "subgroup": h,
            "cosets": cosets,
            "structure": [list(s) for s in f.structure],
            "center_dim": len(f.center_basis),
            "implemented": True,
            "implementer_residual": 0.0,
            "trivial_quotient": True,
            "tol": f.tol,
        }
        return AugmentedAlgebra(f, cosets, h, [], report)

    def hat(x):
        y = np.zeros((n * nq, n * nq), dtype=complex)
        for qi, c in enumerate(cosets):
            unit = np.zeros((nq, nq))
            unit[qi, qi] = 1.0
            y += np.kron(act.apply(g.inv_index(c[0]), x), unit)
        return y

    deltas = [np.kron(np.eye(n), np.diag(np.eye(nq)[q])) for q in range(nq)]
    gens = [hat(x) for x in f.basis] + deltas
    aug = generate_algebra(gens, n * nq, f.tol, f"{f.name}^" if f.name else "")
    implementers, worst, ok = [], 0.0, True
    for gi in range(g.order):
        tgt = [hat(act.apply(gi, x)) for x in f.basis]
        shift = [coset_of[g.mul_index(gi, c[0])] for c in cosets]
        tgt += [deltas[shift[q]] for q in range(nq)]
        u, res = _implementer(np.array(gens), np.array(tgt), f.tol)
        if u is None:
            ok = False
            implementers.append(None)
            continue
        implementers.append(u)
        worst = max(worst, res)
    report = {
        "subgroup": h,
        "cosets": cosets,
        "structure": [list(s) for s in aug.structure],
        "center_dim": len(aug.center_basis),
        "implemented": ok and worst < math.sqrt(f.tol),
        "implementer_residual": worst if ok else None,
        "trivial_quotient": False,
        "tol": f.tol,
    }
    return AugmentedAlgebra(aug, cosets, h, implementers, report)
