"""JSON tower specifications.

Format::

    {
      "name": "ramified_triangle",
      "p": 2, "d": 1,
      "vertices": ["A", "B", "C"],
      "edges": [{"id": "e1", "from": "A", "to": "B", "voltage": [1]}, ...],
      "inertia": {"B": [[1]], "C": [[1]]},
      "embedding": {"A": ["e1", "e3~"], ...},
      "outer_face": "e1~",
      "expect": {...}
    }

Dart ``e~`` is the reversal of edge ``e``.  ``embedding`` and ``outer_face``
are optional; ``outer_face`` is a dart id on the outer face or a face index.
``expect`` is free-form data used by the verification harness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .graph import REVERSE_SUFFIX, Graph, GraphError, validate
from .planar import Embedding, EmbeddingError, RotationSystem
from .tower import GroupSpec, TowerError, TowerSpec


class SpecError(ValueError):
    """Malformed spec; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class SpecFile:
    spec: TowerSpec
    embedding: Embedding | None = None
    outer_face: Any = None
    expect: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.spec.name


def _int(x, path) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SpecError(path, f"expected an integer, got {x!r}")
    return x


def _vector(x, d, path) -> tuple:
    if not isinstance(x, list):
        raise SpecError(path, f"expected a list of {d} integers")
    if len(x) != d:
        raise SpecError(path, f"expected length {d}, got {len(x)}")
    return tuple(_int(a, f"{path}[{i}]") for i, a in enumerate(x))


def parse_spec(data: dict) -> SpecFile:
    if not isinstance(data, dict):
        raise SpecError("$", "spec must be a JSON object")
    for key in ("p", "d", "vertices", "edges"):
        if key not in data:
            raise SpecError(f"$.{key}", "missing field")
    p = _int(data["p"], "$.p")
    d = _int(data["d"], "$.d")
    try:
        group = GroupSpec(p, d)
    except TowerError as exc:
        raise SpecError("$.p" if "prime" in str(exc) else "$.d", str(exc)) from None
    verts = data["vertices"]
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise SpecError("$.vertices", "expected a list of vertex names")
    if len(set(verts)) != len(verts):
        raise SpecError("$.vertices", "duplicate vertex name")
    edges = data["edges"]
    if not isinstance(edges, list):
        raise SpecError("$.edges", "expected a list of edge records")
    triples, voltage, ids = [], {}, set()
    for i, e in enumerate(edges):
        path = f"$.edges[{i}]"
        if not isinstance(e, dict):
            raise SpecError(path, "expected an object")
        for key in ("id", "from", "to"):
            if key not in e:
                raise SpecError(f"{path}.{key}", "missing field")
        eid = e["id"]
        if not isinstance(eid, str) or not eid or eid.endswith(REVERSE_SUFFIX):
            raise SpecError(f"{path}.id", f"edge ids must be non-empty strings not ending in {REVERSE_SUFFIX!r}")
        if eid in ids:
            raise SpecError(f"{path}.id", f"duplicate edge id {eid!r}")
        ids.add(eid)
        for key in ("from", "to"):
            if e[key] not in verts:
                raise SpecError(f"{path}.{key}", f"unknown vertex {e[key]!r}")
        vol = _vector(e.get("voltage", [0] * d), d, f"{path}.voltage")
        triples.append((eid, e["from"], e["to"]))
        voltage[eid] = vol
        voltage[eid + REVERSE_SUFFIX] = tuple(-a for a in vol)
    base = Graph.from_edges(verts, triples)
    problem = validate(base)
    if problem:
        raise SpecError("$.edges", problem)
    inertia = {}
    raw_inertia = data.get("inertia", {}) or {}
    if not isinstance(raw_inertia, dict):
        raise SpecError("$.inertia", "expected an object")
    for v, gens in raw_inertia.items():
        path = f"$.inertia.{v}"
        if v not in verts:
            raise SpecError(path, f"unknown vertex {v!r}")
        if not isinstance(gens, list):
            raise SpecError(path, "expected a list of generator vectors")
        inertia[v] = [_vector(g, d, f"{path}[{i}]") for i, g in enumerate(gens)]
    try:
        spec = TowerSpec(base, group, voltage, inertia, str(data.get("name", "")))
    except (GraphError, TowerError) as exc:
        raise SpecError("$", str(exc)) from None
    emb = None
    if data.get("embedding") is not None:
        rot = data["embedding"]
        if not isinstance(rot, dict):
            raise SpecError("$.embedding", "expected an object vertex -> dart list")
        for v, cyc in rot.items():
            if v not in verts:
                raise SpecError(f"$.embedding.{v}", f"unknown vertex {v!r}")
            for j, x in enumerate(cyc):
                if x not in base.dart:
                    raise SpecError(f"$.embedding.{v}[{j}]", f"unknown dart {x!r}")
        try:
            emb = Embedding(base, RotationSystem({v: tuple(c) for v, c in rot.items()}))
        except EmbeddingError as exc:
            raise SpecError("$.embedding", str(exc)) from None
    outer = data.get("outer_face")
    if outer is not None and emb is None:
        raise SpecError("$.outer_face", "outer face given without an embedding")
    if isinstance(outer, str) and outer not in base.dart:
        raise SpecError("$.outer_face", f"unknown dart {outer!r}")
    return SpecFile(spec, emb, outer, dict(data.get("expect", {}) or {}), data)


def load_spec(path) -> SpecFile:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SpecError("$", f"invalid JSON: {exc}") from None
    except OSError as exc:
        raise SpecError("$", f"cannot read {path}: {exc}") from None
    return parse_spec(data)


def serialize_spec(sf: SpecFile) -> dict:
    spec = sf.spec
    out: dict = {
        "name": spec.name,
        "p": spec.p,
        "d": spec.d,
        "vertices": list(spec.base.vertices),
        "edges": [
            {"id": e.id, "from": e.origin, "to": e.terminus, "voltage": list(spec.voltage[e.id])}
            for e in spec.base.edges()
        ],
        "inertia": {v: [list(g) for g in gens] for v, gens in spec.inertia.items()},
    }
    if sf.embedding is not None:
        out["embedding"] = {v: list(c) for v, c in sf.embedding.rotation.cycles.items()}
    if sf.outer_face is not None:
        out["outer_face"] = sf.outer_face
    if sf.expect:
        out["expect"] = sf.expect
    return out


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def corpus_dir() -> Path:
    return Path(__file__).parent / "corpus"


def corpus_files(path=None) -> list[Path]:
    root = Path(path) if path is not None else corpus_dir()
    return sorted(root.glob("*.json"))
