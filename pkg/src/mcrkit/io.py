"""JSON instance and result files.

Documents are validated against the bundled JSON schemas and the geometry is
checked on load.  NaN and Infinity are rejected at parse time.  Floats are
written with ``repr`` precision, so a load/save cycle returns the same values.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .config import Tolerances
from .errors import InvalidGeometry, InvalidSCP, SchemaError
from .geometry import SimplePolygon, TriMeshPolyhedron
from .reduction import _check


@lru_cache(maxsize=None)
def _validator(name: str):
    text = resources.files("mcrkit").joinpath("schemas").joinpath(f"{name}.json").read_text()
    schema = json.loads(text)
    cls = jsonschema.validators.validator_for(schema)
    cls.check_schema(schema)
    return cls(schema)


def _reject_constant(tok):
    raise ValueError(f"non-finite number {tok} is not allowed")


def _parse(text: str) -> dict:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, f"line {e.lineno}, column {e.colno}") from None
    except ValueError as e:
        raise SchemaError(str(e)) from None
    return doc


def _validate(doc, name: str):
    e = jsonschema.exceptions.best_match(_validator(name).iter_errors(doc))
    if e is not None:
        where = "/" + "/".join(str(p) for p in e.absolute_path)
        raise SchemaError(e.message, where)


@dataclass
class Instance:
    """A validated instance document plus the geometry built from it."""

    kind: str
    doc: dict
    polygon: SimplePolygon | None = field(default=None, repr=False)
    mesh: TriMeshPolyhedron | None = field(default=None, repr=False)

    def __eq__(self, other):
        return isinstance(other, Instance) and self.doc == other.doc

    @property
    def points(self) -> np.ndarray:
        dim = 3 if self.kind == "fixed3d" else 2
        return np.asarray(self.doc.get("points", []), dtype=float).reshape(-1, dim)

    @property
    def center(self):
        c = self.doc.get("center")
        return None if c is None else np.asarray(c, dtype=float)

    @property
    def segment(self):
        s = self.doc.get("segment")
        return None if s is None else np.asarray(s, dtype=float)

    @property
    def chain(self):
        s = self.doc.get("chain")
        return None if s is None else np.asarray(s, dtype=float)

    @property
    def tolerances(self) -> Tolerances:
        t = self.doc.get("tolerances", {})
        return Tolerances(eps_len=t.get("eps_len"), eps_ang=t.get("eps_ang", Tolerances.eps_ang))

    @property
    def seed(self):
        return self.doc.get("provenance", {}).get("seed")


def instance_from_doc(doc: dict) -> Instance:
    _validate(doc, "instance")
    kind = doc["kind"]
    inst = Instance(kind, doc)
    try:
        if "polygon" in doc:
            pg = doc["polygon"]
            inst.polygon = SimplePolygon.from_rings(pg["outer"], pg.get("holes", []))
        if "mesh" in doc:
            m = doc["mesh"]
            inst.mesh = TriMeshPolyhedron.from_arrays(np.asarray(m["vertices"], float), _fan(m["facets"]))
    except InvalidGeometry as e:
        raise SchemaError(str(e), "/polygon" if "polygon" in doc else "/mesh") from None
    if kind == "scp":
        try:
            _check(doc["A"], doc["B"])
        except InvalidSCP as e:
            raise SchemaError(str(e), "/B") from None
    return inst


def _fan(facets):
    """Fan-triangulate polygonal facets."""
    out = []
    for f in facets:
        for k in range(1, len(f) - 1):
            out.append([f[0], f[k], f[k + 1]])
    return np.asarray(out, dtype=np.int64)


def parse_instance(text: str) -> Instance:
    return instance_from_doc(_parse(text))


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def save_instance(path, inst) -> None:
    doc = inst.doc if isinstance(inst, Instance) else inst
    _validate(doc, "instance")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


def save_result(path, result: dict) -> None:
    _validate(result, "result")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(result))


def load_result(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = _parse(fh.read())
    _validate(doc, "result")
    return doc
