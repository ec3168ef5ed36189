"""Finite multigraphs built from paired directed darts.

A graph is a vertex sequence plus a dart sequence.  Every dart has an origin,
a terminus and a partner (its reversal); undirected edges are the partner
pairs.  Loops and parallel edges are allowed everywhere.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

REVERSE_SUFFIX = "~"


class GraphError(ValueError):
    """Raised for structurally invalid graphs or morphisms."""


@dataclass(frozen=True)
class Dart:
    id: Hashable
    origin: Hashable
    terminus: Hashable
    partner: Hashable


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    darts: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "darts", tuple(self.darts))

    @classmethod
    def from_edges(cls, vertices: Iterable, edges: Iterable[tuple]) -> "Graph":
        """Build a graph from ``(edge_id, origin, terminus)`` triples.

        Edge ``e`` becomes the dart ``e`` and its reversal ``e~``.
        """
        darts = []
        for eid, u, w in edges:
            rev = reverse_id(eid)
            darts.append(Dart(eid, u, w, rev))
            darts.append(Dart(rev, w, u, eid))
        return cls(tuple(vertices), tuple(darts))

    @cached_property
    def dart(self) -> dict:
        return {d.id: d for d in self.darts}

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def dart_index(self) -> dict:
        return {d.id: i for i, d in enumerate(self.darts)}

    @cached_property
    def outgoing(self) -> dict:
        out = {v: [] for v in self.vertices}
        for d in self.darts:
            if d.origin in out:
                out[d.origin].append(d.id)
        return {v: tuple(ds) for v, ds in out.items()}

    def partner(self, dart_id):
        return self.dart[dart_id].partner

    def origin(self, dart_id):
        return self.dart[dart_id].origin

    def terminus(self, dart_id):
        return self.dart[dart_id].terminus

    def edges(self) -> list:
        """One representative dart per undirected edge, in dart order."""
        seen = set()
        reps = []
        for d in self.darts:
            if d.id in seen:
                continue
            seen.add(d.id)
            seen.add(d.partner)
            reps.append(d)
        return reps

    @property
    def num_edges(self) -> int:
        return len(self.darts) // 2

    def __repr__(self):
        return f"Graph(|V|={len(self.vertices)}, |E|={self.num_edges})"


def reverse_id(eid):
    if isinstance(eid, str):
        return eid + REVERSE_SUFFIX
    raise GraphError(f"cannot derive a reversal id for {eid!r}")


def validate(g: Graph) -> str | None:
    """Return ``None`` for a legal graph, else a message naming the first broken axiom."""
    vset = set(g.vertices)
    if len(vset) != len(g.vertices):
        return "duplicate vertex id"
    ids = [d.id for d in g.darts]
    if len(set(ids)) != len(ids):
        return "duplicate dart id"
    index = g.dart
    for d in g.darts:
        if d.origin not in vset or d.terminus not in vset:
            return f"undeclared endpoint: dart {d.id!r}"
        if d.partner not in index:
            return f"missing partner: dart {d.id!r}"
        if d.partner == d.id:
            return f"involution fixed point: dart {d.id!r}"
        q = index[d.partner]
        if q.partner != d.id:
            return f"involution not an involution: dart {d.id!r}"
        if q.origin != d.terminus or q.terminus != d.origin:
            return f"incidence mismatch: dart {d.id!r}"
    return None


def check(g: Graph) -> Graph:
    problem = validate(g)
    if problem is not None:
        raise GraphError(problem)
    return g


def components(g: Graph) -> list[list]:
    """Connected components as vertex lists, in vertex order."""
    adj = {v: [] for v in g.vertices}
    for d in g.darts:
        adj[d.origin].append(d.terminus)
    seen = set()
    comps = []
    for v in g.vertices:
        if v in seen:
            continue
        comp = []
        seen.add(v)
        queue = deque([v])
        while queue:
            x = queue.popleft()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        comps.append(comp)
    return comps


def is_connected(g: Graph) -> bool:
    if not g.vertices:
        return False
    return len(components(g)) == 1


def degree(g: Graph, v) -> int:
    if v not in g.outgoing:
        raise GraphError(f"unknown vertex {v!r}")
    return len(g.outgoing[v])


def loops_at(g: Graph, v) -> int:
    """Number of undirected loops at ``v``."""
    return sum(1 for e in g.outgoing[v] if g.terminus(e) == v) // 2


@dataclass(frozen=True)
class GraphMorphism:
    source: Graph
    target: Graph
    vertex_map: Mapping = field(repr=False)
    dart_map: Mapping = field(repr=False)

    def __call__(self, x):
        if x in self.dart_map:
            return self.dart_map[x]
        return self.vertex_map[x]

    def violation(self) -> str | None:
        src, tgt = self.source, self.target
        for v in src.vertices:
            if v not in self.vertex_map or self.vertex_map[v] not in tgt.vertex_index:
                return f"vertex {v!r} not mapped into target"
        for d in src.darts:
            img = self.dart_map.get(d.id)
            if img is None or img not in tgt.dart:
                return f"dart {d.id!r} not mapped into target"
            t = tgt.dart[img]
            if self.vertex_map[d.origin] != t.origin:
                return f"origin not preserved at dart {d.id!r}"
            if self.vertex_map[d.terminus] != t.terminus:
                return f"terminus not preserved at dart {d.id!r}"
            if self.dart_map[d.partner] != t.partner:
                return f"reversal not preserved at dart {d.id!r}"
        return None

    def is_valid(self) -> bool:
        return self.violation() is None

    def is_surjective(self) -> bool:
        return (set(self.vertex_map[v] for v in self.source.vertices) == set(self.target.vertices)
                and set(self.dart_map[d.id] for d in self.source.darts) == set(self.target.dart))

    def compose(self, other: "GraphMorphism") -> "GraphMorphism":
        """``self ∘ other``: first apply ``other``, then ``self``."""
        return GraphMorphism(
            other.source,
            self.target,
            {v: self.vertex_map[w] for v, w in other.vertex_map.items()},
            {e: self.dart_map[f] for e, f in other.dart_map.items()},
        )


def identity_morphism(g: Graph) -> GraphMorphism:
    return GraphMorphism(g, g, {v: v for v in g.vertices}, {d.id: d.id for d in g.darts})


def quotient_vertices(g: Graph, partition: Mapping) -> tuple[Graph, GraphMorphism]:
    """Identify vertices with equal class ids; darts keep their ids.

    Classes are ordered by first appearance in ``g.vertices``.
    """
    classes = []
    seen = set()
    for v in g.vertices:
        c = partition[v]
        if c not in seen:
            seen.add(c)
            classes.append(c)
    darts = tuple(
        Dart(d.id, partition[d.origin], partition[d.terminus], d.partner) for d in g.darts
    )
    q = Graph(tuple(classes), darts)
    f = GraphMorphism(g, q, {v: partition[v] for v in g.vertices}, {d.id: d.id for d in g.darts})
    return q, f


def relabel(g: Graph, vertex_names: Mapping, dart_names: Mapping) -> Graph:
    return Graph(
        tuple(vertex_names[v] for v in g.vertices),
        tuple(
            Dart(dart_names[d.id], vertex_names[d.origin], vertex_names[d.terminus], dart_names[d.partner])
            for d in g.darts
        ),
    )


def graph_from_dict(data: Mapping) -> Graph:
    """Read ``{"vertices": [...], "edges": [{"id", "from", "to"}, ...]}``."""
    return Graph.from_edges(
        [str(v) for v in data["vertices"]],
        [(str(e["id"]), str(e["from"]), str(e["to"])) for e in data["edges"]],
    )


def graph_to_dict(g: Graph, name=str) -> dict:
    return {
        "vertices": [name(v) for v in g.vertices],
        "edges": [{"id": name(d.id), "from": name(d.origin), "to": name(d.terminus)} for d in g.edges()],
    }


def edge_multiset(g: Graph, vertex_names: Mapping | None = None) -> list[tuple]:
    """Sorted undirected endpoint pairs; handy for isomorphism-respecting-labels checks."""
    name = (lambda v: v) if vertex_names is None else (lambda v: vertex_names[v])
    pairs = []
    for d in g.edges():
        a, b = name(d.origin), name(d.terminus)
        pairs.append(tuple(sorted((repr(a), repr(b)))))
    return sorted(pairs)


def simple_graph(n_vertices: int, pairs: Sequence[tuple[int, int]], prefix: str = "v") -> Graph:
    """Convenience constructor: vertices ``v0..``, edges ``e0..`` between index pairs."""
    verts = [f"{prefix}{i}" for i in range(n_vertices)]
    return Graph.from_edges(verts, [(f"e{k}", verts[a], verts[b]) for k, (a, b) in enumerate(pairs)])
