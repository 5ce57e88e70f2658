"""JSON encodings for scalars, spaces, triples, stages, games and reports.

Scalars are exact strings: "p/q" when rational, otherwise an object
{"rat": "p/q", "sqrt2": "r/s"}. Output is deterministic: keys are sorted and
lists keep construction order.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .errors import ShapeError
from .metric import Embedding, FiniteMetricSpace, ValidationReport
from .scalar import Scalar
from .triple import AttachTo, ExtensionSpec, NewRetractPoint, Triple

SCHEMA_VERSION = 1


class SchemaError(ShapeError):
    """Input JSON does not match the expected shape."""


def _frac(text: Any) -> Fraction:
    if isinstance(text, bool):
        raise SchemaError("booleans are not scalars")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad rational {text!r}") from exc
    raise SchemaError(f"expected a rational string, got {type(text).__name__}")


def scalar_to_json(s: Scalar) -> Any:
    if s.is_rational():
        return str(s.rat)
    return {"rat": str(s.rat), "sqrt2": str(s.irr)}


def scalar_from_json(obj: Any) -> Scalar:
    if isinstance(obj, dict):
        if set(obj) - {"rat", "sqrt2"}:
            raise SchemaError(f"unexpected scalar keys {sorted(obj)}")
        return Scalar(_frac(obj.get("rat", "0")), _frac(obj.get("sqrt2", "0")))
    return Scalar(_frac(obj))


def _require(obj: Any, *keys: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError("expected a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise SchemaError(f"missing keys {missing}")


def unwrap(obj: Any, *keys: str) -> Any:
    """Descend into a command result envelope such as {"result": ...}."""
    stop_at_stage = "triple" not in keys
    while isinstance(obj, dict) and "points" not in obj and not (stop_at_stage and "triple" in obj):
        inner = next((obj[k] for k in keys if k in obj), None)
        if inner is None:
            return obj
        obj = inner
    return obj


_ENVELOPES = ("result", "triple", "stage")


def space_to_json(space: FiniteMetricSpace) -> dict:
    return {
        "points": list(space.points),
        "dist": [[scalar_to_json(v) for v in row] for row in space.dist],
    }


def space_from_json(obj: Any) -> FiniteMetricSpace:
    obj = unwrap(obj, *_ENVELOPES)
    _require(obj, "points", "dist")
    if not isinstance(obj["points"], list) or not isinstance(obj["dist"], list):
        raise SchemaError("points and dist must be lists")
    rows = obj["dist"]
    if any(not isinstance(row, list) for row in rows):
        raise SchemaError("dist must be a list of rows")
    return FiniteMetricSpace(obj["points"], [[scalar_from_json(v) for v in row] for row in rows])


def triple_to_json(t: Triple) -> dict:
    out = space_to_json(t.space)
    out["retraction"] = list(t.retraction)
    out["potential"] = [scalar_to_json(v) for v in t.potential]
    return out


def triple_from_json(obj: Any) -> Triple:
    obj = unwrap(obj, *_ENVELOPES)
    _require(obj, "points", "dist", "retraction", "potential")
    space = space_from_json(obj)
    r = obj["retraction"]
    if not isinstance(r, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in r):
        raise SchemaError("retraction must be a list of indices")
    return Triple(space, r, [scalar_from_json(v) for v in obj["potential"]])


def is_triple_json(obj: Any) -> bool:
    obj = unwrap(obj, *_ENVELOPES)
    return isinstance(obj, dict) and "retraction" in obj and "potential" in obj


def embedding_to_json(e: Embedding) -> dict:
    return {"mapping": list(e.mapping), "max_distortion": scalar_to_json(e.max_distortion)}


def mapping_from_json(obj: Any) -> list[int]:
    m = obj.get("mapping") if isinstance(obj, dict) else obj
    if not isinstance(m, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in m):
        raise SchemaError("an embedding is a list of target indices")
    return list(m)


def report_to_json(rep: ValidationReport) -> dict:
    return {
        "ok": rep.ok,
        "violations": [
            {"kind": v.kind, "witness": list(v.witness), "detail": v.detail} for v in rep.violations
        ],
    }


def mode_to_json(mode) -> dict:
    if isinstance(mode, NewRetractPoint):
        return {"kind": "new-retract-point"}
    return {"kind": "attach-to", "c0": mode.c0}


def mode_from_json(obj: Any):
    _require(obj, "kind")
    if obj["kind"] == "new-retract-point":
        return NewRetractPoint()
    if obj["kind"] == "attach-to":
        _require(obj, "c0")
        return AttachTo(int(obj["c0"]))
    raise SchemaError(f"unknown retract mode {obj['kind']!r}")


def spec_to_json(spec: ExtensionSpec) -> dict:
    return {
        "f": [scalar_to_json(v) for v in spec.f.values],
        "mode": mode_to_json(spec.retract_mode),
        "potential": scalar_to_json(spec.new_potential),
    }


# -- stages and games ---------------------------------------------------------------------------


def stage_to_json(stage) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "stage",
        "generation": stage.generation,
        "triple": triple_to_json(stage.triple),
        "absorbed": [
            {"generation": a.generation, "kind": a.kind, "added": list(a.added), "note": a.note}
            for a in stage.absorbed
        ],
    }


def stage_from_json(obj: Any):
    from .fraisse.stage import AbsorptionRecord, AmbientStage

    obj = unwrap(obj, "stage", "result")
    if isinstance(obj, dict) and "points" in obj:
        return AmbientStage(triple_from_json(obj))
    _require(obj, "triple")
    _check_version(obj)
    log = [
        AbsorptionRecord(int(a["generation"]), str(a["kind"]), tuple(a["added"]), str(a.get("note", "")))
        for a in obj.get("absorbed", [])
    ]
    return AmbientStage(triple_from_json(obj["triple"]), int(obj.get("generation", 0)), log)


def _check_version(obj: dict) -> None:
    v = obj.get("schema_version", SCHEMA_VERSION)
    if v != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {v}")


def game_to_json(gs) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "game",
        "cursor": gs.cursor,
        "stage": stage_to_json(gs.stage),
        "chain": [triple_to_json(t) for t in gs.chain],
        "embeddings": [list(f) for f in gs.embeddings],
        "history": [
            {
                "round": h.round_index,
                "eve_added": h.eve_added,
                "cursor": h.cursor,
                "cursor_point": h.cursor_point,
                "noop": h.noop,
                "adam_added": h.adam_added,
            }
            for h in gs.history
        ],
    }


def game_from_json(obj: Any):
    from .fraisse.game import GameState, RoundRecord

    if isinstance(obj, dict) and "chain" not in obj and isinstance(obj.get("game"), dict):
        obj = obj["game"]
    _require(obj, "stage", "chain", "embeddings")
    _check_version(obj)
    hist = tuple(
        RoundRecord(h["round"], h["eve_added"], h["cursor"], h["cursor_point"], h["noop"], h["adam_added"])
        for h in obj.get("history", [])
    )
    return GameState(
        tuple(triple_from_json(t) for t in obj["chain"]),
        tuple(tuple(mapping_from_json(f)) for f in obj["embeddings"]),
        stage_from_json(obj["stage"]),
        int(obj.get("cursor", 0)),
        hist,
    )


def trace_to_json(tr) -> dict:
    def opt(v):
        return None if v is None else scalar_to_json(v)

    return {
        "additive_triples": [list(t) for t in tr.additive_triples],
        "distances_b": [scalar_to_json(v) for v in tr.distances_b],
        "irrational_c": [scalar_to_json(v) for v in tr.irrational_c],
        "eps": str(tr.eps),
        "eps0": opt(tr.eps0),
        "eps1": opt(tr.eps1),
        "eps2": opt(tr.eps2),
        "eps3": opt(tr.eps3),
        "eps4": opt(tr.eps4),
        "eps5": opt(tr.eps5),
        "scale": str(tr.scale),
        "pairs": [
            {
                "x": p.x,
                "y": p.y,
                "d": scalar_to_json(p.d),
                "eta": scalar_to_json(p.eta),
                "rho": scalar_to_json(p.rho),
                "branch": p.branch,
            }
            for p in tr.pairs
        ],
        "potentials": [
            {"x": q.x, "p": scalar_to_json(q.p), "scaled": scalar_to_json(q.scaled), "new": scalar_to_json(q.new)}
            for q in tr.potentials
        ],
        "conflicts": [[c[0], c[1], scalar_to_json(c[2]), scalar_to_json(c[3])] for c in tr.conflicts],
    }


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- schemas ----------------------------------------------------------------------------------

_RATIONAL = {"type": "string", "pattern": r"^\s*-?\d+(/\d+)?\s*$"}
_SCALAR = {
    "oneOf": [
        _RATIONAL,
        {
            "type": "object",
            "properties": {"rat": _RATIONAL, "sqrt2": _RATIONAL},
            "additionalProperties": False,
        },
    ]
}
_SPACE = {
    "type": "object",
    "required": ["points", "dist"],
    "properties": {
        "points": {"type": "array", "items": {"type": "string"}},
        "dist": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/definitions/scalar"}}},
    },
}
_TRIPLE = {
    "type": "object",
    "required": ["points", "dist", "retraction", "potential"],
    "properties": {
        **_SPACE["properties"],
        "retraction": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "potential": {"type": "array", "items": {"$ref": "#/definitions/scalar"}},
    },
}
SCHEMAS = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "schema_version": SCHEMA_VERSION,
    "definitions": {
        "scalar": _SCALAR,
        "space": _SPACE,
        "triple": _TRIPLE,
        "embedding": {
            "oneOf": [
                {"type": "array", "items": {"type": "integer", "minimum": 0}},
                {"type": "object", "required": ["mapping"]},
            ]
        },
        "stage": {
            "type": "object",
            "required": ["schema_version", "triple"],
            "properties": {
                "schema_version": {"const": SCHEMA_VERSION},
                "generation": {"type": "integer"},
                "triple": {"$ref": "#/definitions/triple"},
                "absorbed": {"type": "array"},
            },
        },
        "game": {
            "type": "object",
            "required": ["schema_version", "stage", "chain", "embeddings"],
            "properties": {
                "cursor": {"type": "integer"},
                "chain": {"type": "array", "items": {"$ref": "#/definitions/triple"}},
                "embeddings": {"type": "array", "items": {"type": "array"}},
            },
        },
        "eve_move": {
            "type": "object",
            "required": ["f", "mode"],
            "properties": {
                "f": {
                    "oneOf": [
                        {"type": "array", "items": {"$ref": "#/definitions/scalar"}},
                        {"type": "object", "additionalProperties": {"$ref": "#/definitions/scalar"}},
                    ]
                },
                "mode": {
                    "type": "object",
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["new-retract-point", "attach-to"]},
                        "c0": {"type": "integer"},
                    },
                },
                "potential": {"$ref": "#/definitions/scalar"},
            },
        },
    },
}
