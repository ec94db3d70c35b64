"""Versioned JSON documents for star products, equivalences and operators."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .cochain import MultiDiffOp, StarProduct, op_from_json, op_to_json
from .equiv import Equivalence
from .formal import coeff_from_json, coeff_to_json, series_from_json, series_to_json
from .poisson import LieAlgebra, PoissonTensor, poisson_from_json, poisson_to_json

SCHEMA = "starlab/v1"


class SchemaError(ValueError):
    category = "parse"


def check_schema(doc: Any, kind: str | None = None) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError("expected a JSON object")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise SchemaError(f"unsupported schema {doc.get('schema')!r}")
    if kind is not None and doc.get("kind", kind) != kind:
        raise SchemaError(f"expected a {kind!r} document, got {doc.get('kind')!r}")
    return doc


def op_document(op: MultiDiffOp) -> dict:
    return {"schema": SCHEMA, "kind": "multidiffop", "arity": op.arity, "dim": op.dim, "terms": op_to_json(op)}


def op_from_document(doc) -> MultiDiffOp:
    if isinstance(doc, list):
        return op_from_json(doc)
    return op_from_json(check_schema(doc, "multidiffop"))


def star_to_json(s: StarProduct) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "star_product",
        "name": s.name,
        "dim": s.dim,
        "order": s.order,
        "poisson": poisson_to_json(s.poisson),
        "tolerance": s.tol,
        "cochains": [{"arity": 2, "dim": s.dim, "terms": op_to_json(C)} for C in s.cochains],
    }


def star_from_json(doc: dict) -> StarProduct:
    doc = check_schema(doc, "star_product")
    P = poisson_from_json(doc["poisson"])
    cochains = [op_from_json(c, 2, P.dim) for c in doc["cochains"]]
    if "order" in doc and doc["order"] != len(cochains):
        raise SchemaError("order does not match the number of cochains")
    return StarProduct(P, cochains, name=doc.get("name", "star"), tol=float(doc.get("tolerance", 0.0)))


def equivalence_to_json(E: Equivalence) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "equivalence",
        "dim": E.dim,
        "order": E.order,
        "ops": [{"arity": 1, "dim": E.dim, "terms": op_to_json(T)} for T in E.ops],
        "param": None if E.param is None else [coeff_to_json(c) for c in E.param],
    }


def equivalence_from_json(doc: dict) -> Equivalence:
    doc = check_schema(doc, "equivalence")
    dim = int(doc["dim"])
    ops = [op_from_json(t, 1, dim) for t in doc["ops"]]
    param = doc.get("param")
    return Equivalence(dim, ops, None if param is None else [coeff_from_json(c) for c in param])


def series_document(s) -> dict:
    return {"schema": SCHEMA, "kind": "series", **series_to_json(s)}


def series_from_document(doc):
    return series_from_json(check_schema(doc, "series"))


def lie_document(g: LieAlgebra) -> dict:
    return {"schema": SCHEMA, "kind": "lie_algebra", **g.to_json()}


def poisson_document(P: PoissonTensor) -> dict:
    return {"schema": SCHEMA, "kind": "poisson", **poisson_to_json(P)}


def dumps(doc: dict) -> str:
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load(path) -> Any:
    return json.loads(Path(path).read_text())
