"""Command implementations and the invariant suites behind ``verify``."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import algebra as alg_mod
from .algebra import (
    center,
    commutant,
    defining_representation,
    intertwiner_space,
    reduced_universal_representation,
    representation,
    represented_algebra,
)
from .errors import InputError, NoOutcome
from .groups import (
    FiniteAbelianGroup,
    check_pentagonal,
    conditional_sector_structure,
    convolution,
    delta,
    fourier_matrix,
    lambda_of,
    multiplicative_unitary,
    translation,
)
from .io import (
    ProblemSpec,
    build_action,
    build_algebra,
    build_group,
    build_measurement,
    build_representation,
    build_state,
    encode_matrix,
    parse_spec,
)
from .linalg import DEFAULT_TOL, subspace_distance
from .measurement import (
    born_weights,
    check_imprimitivity,
    check_modified_pentagonal,
    correlate,
    crossed_product_report,
    cyclic_shift_representation,
    instrument,
    instrument_brute_force,
    instrument_operator,
    measure,
    outcome_probabilities,
    sample_outcomes,
)
from .modular import (
    biorth_identities,
    check_tomita,
    disjoint_complement,
    galois_identities,
    quasi_equiv_via_biorth,
    standard_form,
)
from .randomized import make_rng, random_central, random_element, random_positive, random_unitary
from .report import Report, check, flag
from .states import (
    GNSTriple,
    State,
    c_to_q_channel,
    central_decomposition,
    central_measure_pairing,
    conditional_expectation,
    gns,
    gns_equivalence,
    is_factor_state,
    quasi_equivalent,
    sector_distribution,
)
from .symmetry import (
    augmented_algebra,
    averaging_projector,
    breaking_analysis,
    crossed_product,
    dhr_toy,
    fixed_point_algebra,
)

COMMANDS = ("sectors", "gns", "measure", "modular", "symmetry", "crossed", "verify")

ACCEPTED_KINDS = {
    "sectors": ("algebra", "state", "modular"),
    "gns": ("state", "modular"),
    "measure": ("measurement",),
    "modular": ("modular",),
    "symmetry": ("symmetry", "action"),
    "crossed": ("symmetry", "action", "measurement"),
    "verify": None,
}

PRIMARY_COMMAND = {
    "algebra": "sectors",
    "state": "sectors",
    "measurement": "measure",
    "modular": "modular",
    "symmetry": "symmetry",
    "action": "symmetry",
}


@dataclass
class Flags:
    tol: float = DEFAULT_TOL
    samples: int | None = None
    seed: int | None = None


def _tol(spec: ProblemSpec, flags: Flags) -> float:
    return float(spec.tolerance) if spec.tolerance is not None else float(flags.tol)


def _input_entry(spec: ProblemSpec) -> dict:
    return {"file": Path(spec.source).name, "kind": spec.kind, "name": spec.name}


def _structure(a) -> list:
    return [list(s) for s in a.structure]


# -- primary commands -----------------------------------------------------------------

def cmd_sectors(spec: ProblemSpec, flags: Flags) -> dict:
    tol = _tol(spec, flags)
    p = spec.payload
    a = build_algebra(p if spec.kind == "algebra" else p["algebra"], tol)
    weights = None
    if spec.kind in ("state", "modular"):
        weights = sector_distribution(a, build_state(p, a.ambient_dim, tol)).weights
    rows = []
    for k, ((nk, mk), z) in enumerate(zip(a.structure, a.central_projections)):
        row = {"sector": k + 1, "dim": nk, "multiplicity": mk, "rank": int(round(np.trace(z).real))}
        if weights is not None:
            row["weight"] = float(weights[k])
        rows.append(row)
    out = {
        "title": spec.name or "sectors",
        "ambient_dim": a.ambient_dim,
        "algebra_dim": a.dim,
        "structure": _structure(a),
        "is_factor": a.is_factor,
        "commutant_structure": _structure(commutant(a)),
        "sectors": rows,
    }
    if weights is not None:
        out["q_to_c"] = [float(w) for w in weights]
    return out


def cmd_gns(spec: ProblemSpec, flags: Flags) -> dict:
    tol = _tol(spec, flags)
    a = build_algebra(spec.payload["algebra"], tol)
    omega = build_state(spec.payload, a.ambient_dim, tol)
    t = gns(a, omega)
    pa = represented_algebra(t.representation)
    repro = max(abs(np.vdot(t.cyclic_vector, m @ t.cyclic_vector) - omega.expect(e)) for m, e in zip(t.representation.matrices, a.basis))
    return {
        "title": spec.name or "gns",
        "gns_dim": t.dim,
        "multiplicities": list(t.representation.multiplicities),
        "represented_structure": _structure(pa),
        "commutant_structure": _structure(commutant(pa)),
        "is_factor_state": is_factor_state(a, omega),
        "reproduction_residual": float(repro),
        "tol": tol,
    }


def _label(g) -> str:
    return ",".join(str(x) for x in g)


def cmd_measure(spec: ProblemSpec, flags: Flags) -> dict:
    tol = _tol(spec, flags)
    p = spec.payload
    setup, omega = build_measurement(p, tol)
    if omega is None:
        raise InputError("measure needs a state: give 'vector' or 'density' in the payload")
    group = setup.group
    probs = outcome_probabilities(setup, omega)
    rows = [{"outcome": _label(g), "probability": float(pr)} for g, pr in zip(group.elements, probs)]
    sets = p.get("outcome_sets")
    sets = [[group.elements[i]] for i in range(group.order)] if sets is None else [[group.elements[i] for i in s] for s in sets]
    posts = []
    for s in sets:
        entry = {"outcome_set": [_label(g) for g in s]}
        try:
            r = measure(setup, omega, s)
            entry["probability"] = r.probability
            entry["post_state"] = encode_matrix(r.post_state.density)
        except NoOutcome:
            entry["probability"] = float(np.trace(instrument_operator(setup, omega, s)).real)
            entry["post_state"] = None
        posts.append(entry)
    out = {
        "title": spec.name or "measurement",
        "system_dim": setup.system_dim,
        "group": list(group.cyclic_orders),
        "probabilities": rows,
        "post_states": posts,
    }
    samples = flags.samples if flags.samples is not None else p.get("samples", 0)
    seed = flags.seed if flags.seed is not None else p.get("seed", 0)
    if samples:
        counts = sample_outcomes(setup, omega, samples, seed)
        out["sampling"] = {
            "samples": int(samples),
            "seed": int(seed),
            "counts": [{"outcome": _label(g), "count": int(c), "expected": float(samples * pr)} for g, c, pr in zip(group.elements, counts, probs)],
        }
    return out


def _modular_objects(spec: ProblemSpec, flags: Flags):
    tol = _tol(spec, flags)
    a = build_algebra(spec.payload["algebra"], tol)
    phi = build_state(spec.payload, a.ambient_dim, tol)
    return a, phi, standard_form(a, phi)


def closed_form_delta_spectrum(a, phi: State) -> np.ndarray:
    """``{p_i / p_j}`` over eigenvalues ``p`` of each block of the restricted density."""
    rho = a.project(phi.density)
    vals = []
    for blk in a.blocks(rho):
        p = np.linalg.eigvalsh((blk + blk.conj().T) / 2)
        vals += [x / y for x in p for y in p]
    return np.sort(np.array(vals))


def cmd_modular(spec: ProblemSpec, flags: Flags) -> dict:
    a, phi, md = _modular_objects(spec, flags)
    return {
        "title": spec.name or "modular",
        "standard_dim": md.dim,
        "delta_spectrum": [float(x) for x in md.spectrum()],
        "closed_form_spectrum": [float(x) for x in closed_form_delta_spectrum(a, phi)],
        "tomita": check_tomita(md),
        "galois": galois_identities(represented_algebra(md.representation)),
    }


def _symmetry_objects(spec: ProblemSpec, flags: Flags):
    tol = _tol(spec, flags)
    act = build_action(spec.payload, tol)
    rep = build_representation(spec.payload, act.algebra)
    return act, rep


def _dhr_applies(act) -> bool:
    """Field/observable duality needs an irreducible field algebra and a true representation."""
    return (
        act.unitaries is not None
        and isinstance(act.group, FiniteAbelianGroup)
        and act.algebra.is_factor
        and act.algebra.multiplicities == (1,)
    )


def cmd_symmetry(spec: ProblemSpec, flags: Flags) -> dict:
    act, rep = _symmetry_objects(spec, flags)
    p = spec.payload
    f = act.algebra
    rpt = breaking_analysis(f, act, rep, p.get("weights"), p.get("annotation"))
    fixed = fixed_point_algebra(f, act)
    out = {
        "title": spec.name or "symmetry",
        "field_structure": _structure(f),
        "fixed_point_structure": _structure(fixed),
        "breaking": rpt.as_dict(),
    }
    if _dhr_applies(act):
        out["dhr"] = dhr_toy(f, act)
    sub = p.get("subgroup")
    aug = augmented_algebra(f, act, [tuple(x) for x in sub] if sub is not None else None)
    out["augmented"] = aug.report
    return out


def cmd_crossed(spec: ProblemSpec, flags: Flags) -> dict:
    if spec.kind == "measurement":
        setup, _ = build_measurement(spec.payload, _tol(spec, flags))
        return {"title": spec.name or "crossed", "embeddings": crossed_product_report(setup)}
    act, _ = _symmetry_objects(spec, flags)
    cp = crossed_product(act.algebra, act)
    return {
        "title": spec.name or "crossed",
        "algebra_structure": _structure(act.algebra),
        "group": list(act.group.cyclic_orders),
        "crossed_structure": _structure(cp),
        "crossed_dim": cp.dim,
        "crossed_ambient_dim": cp.ambient_dim,
    }


PRIMARY = {
    "sectors": cmd_sectors,
    "gns": cmd_gns,
    "measure": cmd_measure,
    "modular": cmd_modular,
    "symmetry": cmd_symmetry,
    "crossed": cmd_crossed,
}


# -- invariant suites -----------------------------------------------------------------------

def suite_algebra(a) -> dict:
    tol = a.tol
    out = {}
    out["closure"] = check(a.closure_defect(), tol)
    n = a.ambient_dim
    out["dimension_count"] = flag(
        sum(nk * nk for nk, _ in a.structure) == a.dim and sum(nk * mk for nk, mk in a.structure) == n
    )
    ac = commutant(a)
    out["bicommutant"] = check(subspace_distance(commutant(ac).basis, a.basis, tol), tol)
    out["commutant_structure_swaps"] = flag(
        sorted((m, k) for k, m in a.structure) == sorted(ac.structure), _structure(ac)
    )
    zs = a.central_projections
    orth = max(
        float(np.linalg.norm(zs[i] @ zs[j] - (zs[i] if i == j else 0)))
        for i in range(len(zs))
        for j in range(len(zs))
    )
    out["central_projections_orthogonal"] = check(orth, tol)
    out["central_projections_sum"] = check(float(np.linalg.norm(zs.sum(axis=0) - np.eye(n))), tol)
    comm = max(float(np.linalg.norm(z @ e - e @ z)) for z in zs for e in a.basis)
    out["central_projections_central"] = check(comm, tol)
    out["center_of_commutant"] = check(subspace_distance(center(a).basis, center(ac).basis, tol), tol)
    hom = len(intertwiner_space(reduced_universal_representation(a), defining_representation(a)))
    out["intertwiner_dimension"] = flag(hom == sum(mk for _, mk in a.structure), hom)
    return out


def suite_state(a, omega: State, seed: int = 0) -> dict:
    tol = a.tol
    rng = make_rng(seed)
    out = {}
    t = gns(a, omega)
    repro = max(abs(np.vdot(t.cyclic_vector, m @ t.cyclic_vector) - omega.expect(e)) for m, e in zip(t.representation.matrices, a.basis))
    out["gns_reproduces_state"] = check(repro, tol)
    vecs = np.array([m @ t.cyclic_vector for m in t.representation.matrices])
    out["gns_cyclic"] = flag(np.linalg.matrix_rank(vecs, tol) == t.dim)
    out["gns_homomorphism"] = check(t.representation.homomorphism_defect(), tol * 10)
    u = random_unitary(t.dim, rng)
    rep2 = alg_mod.RepresentationData(a, np.einsum("ij,kjl,ml->kim", u, t.representation.matrices, u.conj()), t.representation.multiplicities)
    t2 = GNSTriple(rep2, u @ t.cyclic_vector, u @ t.embedding, omega)
    _, unit, cov = gns_equivalence(t, t2)
    out["gns_uniqueness"] = check(max(unit, cov), tol * 10)
    dist = sector_distribution(a, omega)
    dec = central_decomposition(a, omega)
    out["barycenter"] = check(float(np.linalg.norm(dec.barycenter() - dec.restricted_density)), tol)
    out["components_are_factor_states"] = flag(all(is_factor_state(a, s) for s in dec.states))
    x1, x2 = random_element(a, rng), random_element(a, rng)
    lhs, rhs = central_measure_pairing(a, omega, x1, x2)
    out["central_measure_pairing"] = check(abs(lhs - rhs) / max(1.0, abs(lhs)), tol)
    if min(dist.weights) <= tol:
        out["conditional_expectation"] = flag(True, "skipped: central measure not faithful")
        return out
    k = a.num_sectors
    targets = [dist.weights, np.ones(k) / k] + [np.eye(k)[i] for i in range(k)]
    sec = max(float(np.abs(sector_distribution(a, c_to_q_channel(a, omega, w)).weights - w).max()) for w in targets)
    out["section_property"] = check(sec, tol)
    lam = conditional_expectation(a, omega)
    xs = [random_element(a, rng) for _ in range(3)]
    out["lambda_idempotent"] = check(max(float(np.linalg.norm(lam(lam(x)) - lam(x))) for x in xs), tol * 10)
    out["lambda_unital"] = check(float(np.linalg.norm(lam(np.eye(a.ambient_dim)) - np.eye(a.ambient_dim))), tol)
    pos = min(float(np.linalg.eigvalsh((lam(y) + lam(y).conj().T) / 2).min()) for y in (random_positive(a, rng) for _ in range(3)))
    out["lambda_positive"] = check(max(0.0, -pos), tol)
    z1, z2 = random_central(a, rng), random_central(a, rng)
    bim = max(float(np.linalg.norm(lam(z1 @ x @ z2) - z1 @ lam(x) @ z2)) for x in xs)
    out["lambda_bimodule"] = check(bim, tol * 10)
    return out


def suite_group(g: FiniteAbelianGroup) -> dict:
    out = {}
    v = multiplicative_unitary(g)
    vm = v.matrix()
    out["pentagonal_exact"] = check(check_pentagonal(v), 0.0)
    out["v_unitary"] = check(float(np.linalg.norm(vm.T @ vm - np.eye(len(vm)))), 0.0)
    hom = 0.0
    inter = 0.0
    for a_, b_ in itertools.product(g.elements, repeat=2):
        lhs = lambda_of(convolution(delta(g, a_), delta(g, b_), g), v)
        hom = max(hom, float(np.linalg.norm(lhs - lambda_of(delta(g, a_), v) @ lambda_of(delta(g, b_), v))))
    for a_ in g.elements:
        lam = translation(g, a_)
        inter = max(inter, float(np.linalg.norm(vm @ np.kron(lam, np.eye(g.order)) - np.kron(lam, lam) @ vm)))
    out["lambda_homomorphism"] = check(hom, 0.0)
    out["v_intertwines_coproduct"] = check(inter, 0.0)
    f = fourier_matrix(g)
    off = 0.0
    for a_ in g.elements:
        d = f @ translation(g, a_) @ f.conj().T
        off = max(off, float(np.linalg.norm(d - np.diag(np.diag(d)))))
    out["fourier_diagonalizes"] = check(off, 1e-12)
    return out


def suite_measurement(setup, omega, seed: int = 0) -> dict:
    tol = setup.tol
    rng = make_rng(seed)
    out = {}
    out["modified_pentagonal"] = check(check_modified_pentagonal(setup), 1e-12)
    out["imprimitivity"] = check(check_imprimitivity(setup, cyclic_shift_representation(setup))["residual"], 1e-12)
    corr = 0.0
    ranges = []
    for e in setup.system.projections:
        w, v = np.linalg.eigh(e)
        ranges.append(v[:, w > 0.5])
    for g, r in zip(setup.group.elements, ranges):
        for xi in r.T:
            corr = max(corr, float(np.linalg.norm(correlate(setup, xi) - np.kron(xi, setup.pointer_vector(g)))))
    out["perfect_correlation"] = check(corr, 0.0)
    cond = conditional_sector_structure(setup.system.factor, setup.system.masa)
    out["conditional_sector_structure"] = check(cond["center_distance"], tol)
    if omega is None:
        return out
    probs = outcome_probabilities(setup, omega)
    out["completeness"] = check(abs(probs.sum() - 1.0), 1e-10)
    m = setup.system.factor
    els = setup.group.elements
    b = random_element(m, rng)
    brute = max(abs(instrument(setup, omega, [g], b) - instrument_brute_force(setup, omega, [g], b)) for g in els)
    out["instrument_formula"] = check(brute, tol)
    cp = min(instrument(setup, omega, [g], random_positive(m, rng)).real for g in els)
    out["complete_positivity"] = check(max(0.0, -cp), 1e-10)
    if len(els) >= 2:
        split = len(els) // 2
        d1, d2 = els[:split], els[split:]
        add = abs(instrument(setup, omega, els, b) - instrument(setup, omega, d1, b) - instrument(setup, omega, d2, b))
        out["additivity"] = check(add, 1e-12 * max(1.0, float(np.linalg.norm(b))))
    rep = 0.0
    for g, p in zip(els, probs):
        if p > tol:
            post = measure(setup, omega, [g]).post_state
            rep = max(rep, 1.0 - measure(setup, post, [g]).probability)
    out["repeatability"] = check(rep, 1e-9)
    rho = omega.density
    if np.linalg.matrix_rank(rho, 1e-10) == 1:
        w, v = np.linalg.eigh(rho)
        born = born_weights(setup, v[:, -1])
        out["born_rule"] = check(float(np.abs(born - probs).max()), 1e-10)
    return out


def suite_modular(a, phi: State, md) -> dict:
    tol = a.tol
    out = {}
    rep = check_tomita(md)
    for key in ("s_identity", "jmj_commutant", "flow_invariance", "center_fixed", "kms", "delta_omega", "j_omega", "j_squared"):
        out[key] = check(rep[key], tol * 10)
    spec = md.spectrum()
    closed = closed_form_delta_spectrum(a, phi)
    out["delta_closed_form"] = check(float(np.abs(spec - closed).max()) if len(spec) == len(closed) else float("inf"), 1e-8)
    gal = galois_identities(represented_algebra(md.representation))
    out["join_equals_center_commutant"] = check(gal["join_equals_center_commutant"], tol)
    out["fixed_points_equal_m"] = check(gal["fixed_points_equal_m"], tol)
    out["factor_iff_ergodic"] = flag(gal["factor_iff_ergodic"])
    k = a.num_sectors
    ok, qe_ok = True, True
    patterns = [set(s) for r in range(k + 1) for s in itertools.combinations(range(k), r)]
    for s in patterns:
        pi = representation(a, [2 if i in s else 0 for i in range(k)])
        rep_ = biorth_identities(pi)
        ok &= all(v for key, v in rep_.items() if isinstance(v, bool))
    for s1, s2 in itertools.product(patterns, repeat=2):
        p1 = representation(a, [1 if i in s1 else 0 for i in range(k)])
        p2 = representation(a, [2 if i in s2 else 0 for i in range(k)])
        qe_ok &= quasi_equiv_via_biorth(p1, p2) == quasi_equivalent(p1, p2)
        if s1 <= s2:
            ok &= disjoint_complement(p1).support >= disjoint_complement(p2).support
    out["support_identities"] = flag(ok)
    out["quasi_equivalence_consistent"] = flag(qe_ok)
    return out


def suite_symmetry(act, rep=None, weights=None) -> dict:
    f = act.algebra
    tol = f.tol
    out = {}
    p = averaging_projector(act)
    out["averaging_idempotent"] = check(float(np.linalg.norm(p @ p - p)), tol)
    fixed = fixed_point_algebra(f, act)
    inv = max(float(np.linalg.norm(act.apply(g, x) - x)) for g in range(act.order) for x in fixed.basis)
    out["fixed_points_invariant"] = check(inv, tol)
    rpt = breaking_analysis(f, act, rep, weights)
    covered = sorted(k for c in rpt.ergodic_components for k in c)
    out["orbits_partition_sectors"] = flag(covered == list(range(len(rpt.sector_labels))))
    w = np.asarray(rpt.weights)
    moved = any(perm[k] != k for perm in rpt.sector_permutations.values() for k in range(len(w)) if w[k] > tol)
    out["verdict_consistent"] = flag((rpt.verdict == "broken") == moved, rpt.verdict)
    if _dhr_applies(act):
        d = dhr_toy(f, act)
        out["dhr_pi_a_is_u_commutant"] = check(d["pi_a_equals_u_commutant"], tol)
        out["dhr_u_is_pi_a_commutant"] = check(d["u_equals_pi_a_commutant"], tol)
        out["dhr_sector_labels"] = flag(d["labels_bijective"] and d["center_dim"] == len(d["characters_in_u"]))
    if isinstance(act.group, FiniteAbelianGroup):
        aug = augmented_algebra(f, act).report
        out["augmented_implemented"] = flag(aug["implemented"])
        if rpt.verdict == "broken":
            out["augmented_center_nontrivial"] = flag(aug["center_dim"] >= 2, aug["center_dim"])
    return out


def run_suites(spec: ProblemSpec, flags: Flags) -> dict:
    tol = _tol(spec, flags)
    p = spec.payload
    seed = flags.seed or 0
    if spec.kind == "algebra":
        return {"algebra": suite_algebra(build_algebra(p, tol))}
    if spec.kind == "state":
        a = build_algebra(p["algebra"], tol)
        return {"algebra": suite_algebra(a), "state": suite_state(a, build_state(p, a.ambient_dim, tol), seed)}
    if spec.kind == "group":
        return {"group": suite_group(build_group(p))}
    if spec.kind == "measurement":
        setup, omega = build_measurement(p, tol)
        return {"group": suite_group(setup.group), "measurement": suite_measurement(setup, omega, seed)}
    if spec.kind == "modular":
        a, phi, md = _modular_objects(spec, flags)
        return {"algebra": suite_algebra(a), "state": suite_state(a, phi, seed), "modular": suite_modular(a, phi, md)}
    act, rep = _symmetry_objects(spec, flags)
    return {"algebra": suite_algebra(act.algebra), "symmetry": suite_symmetry(act, rep, p.get("weights"))}


# -- regression against expected reports ----------------------------------------------------------

def compare_trees(expected, actual, path="", atol: float = 1e-7) -> list:
    """Differences between two report trees; floats compare within ``atol``."""
    diffs = []
    if isinstance(expected, dict) and isinstance(actual, dict):
        for k in sorted(set(expected) | set(actual)):
            if k not in expected or k not in actual:
                diffs.append(f"{path}/{k}: missing")
            else:
                diffs += compare_trees(expected[k], actual[k], f"{path}/{k}", atol)
    elif isinstance(expected, list) and isinstance(actual, list):
        if len(expected) != len(actual):
            diffs.append(f"{path}: length {len(expected)} != {len(actual)}")
        else:
            for i, (x, y) in enumerate(zip(expected, actual)):
                diffs += compare_trees(x, y, f"{path}[{i}]", atol)
    elif isinstance(expected, bool) or isinstance(actual, bool):
        if expected is not actual:
            diffs.append(f"{path}: {expected} != {actual}")
    elif isinstance(expected, (int, float)) and isinstance(actual, (int, float)):
        if abs(expected - actual) > atol:
            diffs.append(f"{path}: {expected} != {actual}")
    elif expected != actual:
        diffs.append(f"{path}: {expected!r} != {actual!r}")
    return diffs


def expected_path(spec: ProblemSpec) -> Path | None:
    src = Path(spec.source)
    if not src.name.endswith(".json"):
        return None
    cand = src.with_name(src.name[: -len(".json")] + ".expected.json")
    return cand if cand.exists() else None


def primary_report(spec: ProblemSpec, flags: Flags) -> Report | None:
    cmd = PRIMARY_COMMAND.get(spec.kind)
    if cmd is None:
        return None
    return run_command(cmd, [spec], flags)


def corpus_files() -> list:
    root = resources.files("sectorlab") / "corpus"
    return sorted(str(p) for p in root.iterdir() if p.name.endswith(".json") and not p.name.endswith(".expected.json"))


def cmd_verify(specs: list, flags: Flags) -> Report:
    report = Report("verify")
    for spec in specs:
        report.inputs.append(_input_entry(spec))
        key = spec.name or Path(spec.source).stem
        verdicts = run_suites(spec, flags)
        exp = expected_path(spec)
        if exp is not None:
            actual = primary_report(spec, flags).tree()
            expected = json.loads(exp.read_text())
            diffs = compare_trees(expected["results"], actual["results"])
            verdicts["regression"] = {"expected_report": flag(not diffs, diffs[:5] if diffs else exp.name)}
        report.verdicts[key] = verdicts
        report.results.append({"title": key, "kind": spec.kind, "suites": sorted(verdicts)})
    return report


def run_command(command: str, specs, flags: Flags | None = None) -> Report:
    """Run ``command`` on parsed specs (or paths); ``verify`` with no specs uses the bundled corpus."""
    flags = Flags() if flags is None else flags
    if command not in COMMANDS:
        raise InputError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    specs = [s if isinstance(s, ProblemSpec) else parse_spec(s) for s in specs]
    if command == "verify":
        if not specs:
            specs = [parse_spec(p) for p in corpus_files()]
        return cmd_verify(specs, flags)
    if not specs:
        raise InputError(f"{command} needs at least one spec file")
    report = Report(command)
    for spec in specs:
        if spec.kind not in ACCEPTED_KINDS[command]:
            raise InputError(
                f"{command} does not accept kind {spec.kind!r} ({Path(spec.source).name}); "
                f"expected one of {', '.join(ACCEPTED_KINDS[command])}"
            )
        report.inputs.append(_input_entry(spec))
        result = PRIMARY[command](spec, flags)
        if command == "modular":
            tol = _tol(spec, flags)
            t = result["tomita"]
            report.verdicts[result["title"]] = {
                k: check(v, tol * 10) for k, v in t.items() if k != "tol"
            }
        report.results.append(result)
    return report
