"""Problem spec files: JSON with a schema per kind, complex numbers as ``[re, im]``."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from .algebra import FiniteDimAlgebra, block_diagonal_algebra, full_matrix_algebra, generate_algebra, representation
from .errors import InputError, SchemaError
from .groups import FiniteAbelianGroup, verify_masa
from .linalg import DEFAULT_TOL
from .measurement import build_coupling
from .states import State
from .symmetry import GroupAction

SCHEMA_VERSION = 1
KINDS = ("algebra", "state", "group", "action", "measurement", "modular", "symmetry")

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_VECTOR = {"type": "array", "items": _COMPLEX, "minItems": 1}
_MATRIX = {"type": "array", "items": _VECTOR, "minItems": 1}
_POS = {"type": "integer", "minimum": 1}

_ALGEBRA = {
    "type": "object",
    "oneOf": [
        {"required": ["ambient_dim", "generators"]},
        {"required": ["blocks"]},
        {"required": ["full"]},
    ],
    "properties": {
        "ambient_dim": _POS,
        "generators": {"type": "array", "items": _MATRIX},
        "blocks": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2},
        },
        "full": _POS,
        "name": {"type": "string"},
    },
    "additionalProperties": False,
}

_GROUP = {
    "type": "object",
    "required": ["cyclic_orders"],
    "properties": {"cyclic_orders": {"type": "array", "items": _POS}},
    "additionalProperties": False,
}

_STATE_FIELDS = {"density": _MATRIX, "vector": _VECTOR}

_ACTION_FIELDS = {
    "algebra": _ALGEBRA,
    "group": _GROUP,
    "unitaries": {"type": "array", "items": _MATRIX},
    "generators": {"type": "array", "items": _MATRIX},
    "permutations": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
}

_ACTION = {
    "type": "object",
    "required": ["algebra", "group"],
    "oneOf": [{"required": ["unitaries"]}, {"required": ["generators"]}, {"required": ["permutations"]}],
    "properties": _ACTION_FIELDS,
    "additionalProperties": False,
}

_SYMMETRY = {
    "type": "object",
    "required": ["algebra", "group"],
    "oneOf": [{"required": ["unitaries"]}, {"required": ["generators"]}, {"required": ["permutations"]}],
    "properties": {
        **_ACTION_FIELDS,
        "multiplicities": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "annotation": {"enum": ["explicit", "spontaneous"]},
        "subgroup": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
    },
    "additionalProperties": False,
}

PAYLOAD_SCHEMAS = {
    "algebra": _ALGEBRA,
    "group": _GROUP,
    "state": {
        "type": "object",
        "required": ["algebra"],
        "oneOf": [{"required": ["density"]}, {"required": ["vector"]}],
        "properties": {"algebra": _ALGEBRA, **_STATE_FIELDS},
        "additionalProperties": False,
    },
    "modular": {
        "type": "object",
        "required": ["algebra", "density"],
        "properties": {"algebra": _ALGEBRA, "density": _MATRIX},
        "additionalProperties": False,
    },
    "measurement": {
        "type": "object",
        "oneOf": [{"required": ["n"]}, {"required": ["factor", "masa"]}],
        "properties": {
            "n": _POS,
            "factor": _ALGEBRA,
            "masa": _ALGEBRA,
            "group": _GROUP,
            **_STATE_FIELDS,
            "outcome_sets": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
            "samples": {"type": "integer", "minimum": 0},
            "seed": {"type": "integer", "minimum": 0},
        },
        "additionalProperties": False,
    },
    "action": _ACTION,
    "symmetry": _SYMMETRY,
}

SPEC_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "kind", "payload"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "payload": {"type": "object"},
    },
    "additionalProperties": False,
}


@dataclass
class ProblemSpec:
    kind: str
    payload: dict
    name: str = ""
    description: str = ""
    tolerance: float | None = None
    source: str = ""
    raw: dict = field(default_factory=dict, repr=False)


def _validate(instance, schema, prefix=()):
    err = best_match(Draft202012Validator(schema).iter_errors(instance))
    if err is not None:
        raise SchemaError(err.message, prefix + tuple(err.absolute_path))


def parse_spec(source) -> ProblemSpec:
    """Read and validate a spec from a path, an open stream, or an already-parsed dict."""
    if isinstance(source, dict):
        data, label = source, "<dict>"
    elif hasattr(source, "read"):
        label = getattr(source, "name", "<stream>")
        data = _load_json(source.read(), label)
    else:
        path = Path(source)
        label = str(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        data = _load_json(text, label)
    _validate(data, SPEC_SCHEMA)
    kind = data["kind"]
    _validate(data["payload"], PAYLOAD_SCHEMAS[kind], ("payload",))
    spec = ProblemSpec(
        kind=kind,
        payload=data["payload"],
        name=data.get("name", ""),
        description=data.get("description", ""),
        tolerance=data.get("tolerance"),
        source=label,
        raw=data,
    )
    _check_shapes(spec)
    return spec


def _load_json(text: str, label: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {label}: {exc.msg} (line {exc.lineno})") from None


def decode_matrix(data, path=()) -> np.ndarray:
    rows = len(data)
    cols = {len(r) for r in data}
    if len(cols) != 1:
        raise SchemaError("rows have different lengths", path)
    a = np.array([[complex(re, im) for re, im in row] for row in data])
    if a.shape[0] != a.shape[1]:
        raise SchemaError(f"matrix is {rows}x{a.shape[1]}, expected square", path)
    return a


def decode_vector(data) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data])


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(a) -> list:
    return [[encode_complex(z) for z in row] for row in np.asarray(a)]


def _check_shapes(spec: ProblemSpec):
    """Matrix shapes and declared unitaries, which the JSON schema cannot express."""

    def walk(node, path):
        if isinstance(node, dict):
            for k, v in node.items():
                if k in ("density",):
                    decode_matrix(v, path + (k,))
                elif k in ("generators", "unitaries"):
                    for i, m in enumerate(v):
                        a = decode_matrix(m, path + (k, i))
                        if k == "unitaries" or (k == "generators" and "group" in node):
                            defect = np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0]))
                            if defect > (spec.tolerance or DEFAULT_TOL) * max(1, a.shape[0]):
                                raise SchemaError(f"declared unitary has defect {defect:.3e}", path + (k, i))
                else:
                    walk(v, path + (k,))

    walk(spec.payload, ("payload",))


# -- building library objects -------------------------------------------------------

def build_algebra(data: dict, tol: float) -> FiniteDimAlgebra:
    if "blocks" in data:
        return block_diagonal_algebra([tuple(b) for b in data["blocks"]], tol)
    if "full" in data:
        return full_matrix_algebra(int(data["full"]), tol)
    n = int(data["ambient_dim"])
    gens = []
    for i, g in enumerate(data["generators"]):
        m = decode_matrix(g, ("generators", i))
        if m.shape != (n, n):
            raise SchemaError(f"generator is {m.shape[0]}x{m.shape[1]}, ambient_dim is {n}", ("generators", i))
        gens.append(m)
    return generate_algebra(gens, n, tol, data.get("name", ""))


def build_group(data: dict) -> FiniteAbelianGroup:
    return FiniteAbelianGroup(data["cyclic_orders"])


def build_state(data: dict, dim: int, tol: float) -> State:
    if "density" in data:
        rho = decode_matrix(data["density"], ("density",))
        if rho.shape[0] != dim:
            raise SchemaError(f"density is {rho.shape[0]}x{rho.shape[0]}, expected {dim}", ("density",))
        return State(rho, tol=max(tol, 1e-8))
    v = decode_vector(data["vector"])
    if v.shape[0] != dim:
        raise SchemaError(f"vector has length {v.shape[0]}, expected {dim}", ("vector",))
    return State.pure(v, tol=max(tol, 1e-8))


def build_action(data: dict, tol: float) -> GroupAction:
    alg = build_algebra(data["algebra"], tol)
    grp = build_group(data["group"])
    if "unitaries" in data:
        return GroupAction.from_unitaries(alg, grp, [decode_matrix(u) for u in data["unitaries"]])
    if "generators" in data:
        return GroupAction.from_generators(alg, grp, [decode_matrix(u) for u in data["generators"]])
    perms = data["permutations"]
    for i, p in enumerate(perms):
        if sorted(p) != list(range(alg.ambient_dim)):
            raise SchemaError("not a permutation of the ambient basis", ("payload", "permutations", i))
    return GroupAction.from_permutations(alg, grp, perms)


def build_representation(data: dict, alg: FiniteDimAlgebra):
    if "multiplicities" not in data:
        return None
    mult = data["multiplicities"]
    if len(mult) != alg.num_sectors:
        raise SchemaError(f"{len(mult)} multiplicities for {alg.num_sectors} sectors", ("payload", "multiplicities"))
    return representation(alg, mult)


def build_measurement(data: dict, tol: float):
    if "n" in data:
        from .algebra import diagonal_algebra

        n = int(data["n"])
        factor, masa = full_matrix_algebra(n, tol), diagonal_algebra(n, tol)
    else:
        factor, masa = build_algebra(data["factor"], tol), build_algebra(data["masa"], tol)
    group = build_group(data["group"]) if "group" in data else None
    setup = build_coupling(verify_masa(factor, masa, group))
    state = None
    if "density" in data or "vector" in data:
        state = build_state(data, factor.ambient_dim, tol)
    return setup, state
