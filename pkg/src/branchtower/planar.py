"""Rotation systems, faces, duals, and planar embeddings of tower layers.

An embedding is a graph plus, at every vertex, a cyclic order of its
outgoing darts.  Faces are the orbits of ``next(e) = rot_next(partner(e))``.

The dual of an embedding reuses the primal dart ids: dual dart ``e`` runs from
the face of ``e`` to the face of its partner, and the dual rotation at a face is
the face boundary itself.  With this convention the dual of the dual is the
primal embedding exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from . import intlinalg
from .graph import Dart, Graph, GraphError, GraphMorphism, is_connected
from .jacobian import Divisor, jacobian_invariants, kappa, laplacian
from .tower import LayerGraph, TowerSpec, build_layer, galois_act, reduce


class EmbeddingError(ValueError):
    pass


class CoverError(ValueError):
    """A morphism that is not a branched cover; ``witness`` names the offending data."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# -------------------------------------------------------------- embeddings


@dataclass(frozen=True)
class RotationSystem:
    cycles: Mapping  # vertex -> tuple of outgoing dart ids in cyclic order

    def __post_init__(self):
        object.__setattr__(self, "cycles", {v: tuple(c) for v, c in self.cycles.items()})

    @cached_property
    def successor(self) -> dict:
        out = {}
        for cyc in self.cycles.values():
            k = len(cyc)
            for i, e in enumerate(cyc):
                out[e] = cyc[(i + 1) % k]
        return out

    @cached_property
    def predecessor(self) -> dict:
        return {b: a for a, b in self.successor.items()}


@dataclass(frozen=True)
class Embedding:
    graph: Graph
    rotation: RotationSystem

    def __post_init__(self):
        problem = rotation_violation(self.graph, self.rotation)
        if problem:
            raise EmbeddingError(problem)

    def rot_next(self, e):
        return self.rotation.successor[e]

    def face_next(self, e):
        return self.rotation.successor[self.graph.partner(e)]

    @cached_property
    def faces(self) -> list[tuple]:
        return trace_faces(self)

    @cached_property
    def face_of(self) -> dict:
        return {e: i for i, f in enumerate(self.faces) for e in f}


def rotation_violation(g: Graph, rot: RotationSystem) -> str | None:
    seen = set()
    for v in g.vertices:
        cyc = rot.cycles.get(v)
        if cyc is None:
            return f"no rotation at vertex {v!r}"
        if sorted(map(repr, cyc)) != sorted(map(repr, g.outgoing[v])) or len(set(cyc)) != len(cyc):
            return f"rotation at {v!r} is not a cyclic order of its outgoing darts"
        seen.update(cyc)
    extra = set(rot.cycles) - set(g.vertices)
    if extra:
        return f"rotation given for unknown vertices {sorted(map(repr, extra))}"
    if len(seen) != len(g.darts):
        return "rotation does not cover every dart"
    return None


def trace_faces(emb: Embedding) -> list[tuple]:
    """Face boundaries, each starting at its first dart in graph dart order."""
    seen = set()
    faces = []
    for d in emb.graph.darts:
        if d.id in seen:
            continue
        face = []
        e = d.id
        while e not in seen:
            seen.add(e)
            face.append(e)
            e = emb.face_next(e)
        faces.append(tuple(face))
    return faces


def euler_characteristic(emb: Embedding) -> int:
    if not is_connected(emb.graph):
        raise GraphError("Euler characteristic needs a connected graph")
    g = emb.graph
    return len(g.vertices) - g.num_edges + len(emb.faces)


def is_planar_embedding(emb: Embedding) -> bool:
    return euler_characteristic(emb) == 2


def face_name(i: int) -> str:
    return f"F{i}"


@dataclass(frozen=True)
class Dual:
    graph: Graph
    embedding: Embedding
    face_of: dict  # primal dart -> dual vertex
    edge_map: dict  # primal dart -> dual dart (identity on ids)


def dual(emb: Embedding, names: Sequence | None = None) -> Dual:
    """Dual embedding; dual vertex i is face i (optionally renamed by ``names``)."""
    if not is_planar_embedding(emb):
        raise EmbeddingError("dual requires a planar embedding")
    faces = emb.faces
    names = list(names) if names is not None else [face_name(i) for i in range(len(faces))]
    fo = {e: names[i] for e, i in emb.face_of.items()}
    darts = tuple(Dart(d.id, fo[d.id], fo[d.partner], d.partner) for d in emb.graph.darts)
    dg = Graph(tuple(names), darts)
    rot = RotationSystem({names[i]: f for i, f in enumerate(faces)})
    return Dual(dg, Embedding(dg, rot), fo, {d.id: d.id for d in emb.graph.darts})


def same_embedding(a: Embedding, b: Embedding, vertex_map: Mapping | None = None) -> bool:
    """Equality of embeddings on identical dart ids, vertices matched by ``vertex_map``."""
    vm = vertex_map or {v: v for v in a.graph.vertices}
    if set(a.graph.dart) != set(b.graph.dart):
        return False
    for d in a.graph.darts:
        o = b.graph.dart[d.id]
        if vm[d.origin] != o.origin or vm[d.terminus] != o.terminus or d.partner != o.partner:
            return False
    return a.rotation.successor == b.rotation.successor


def double_dual_vertex_map(emb: Embedding) -> dict:
    """Primal vertex ↦ vertex of the double dual, via the rotation orbits."""
    dd = dual(dual(emb).embedding)
    out = {}
    for v in emb.graph.vertices:
        cyc = emb.rotation.cycles[v]
        if not cyc:
            continue
        out[v] = dd.face_of[cyc[0]]
    return out


def double_dual_check(emb: Embedding) -> bool:
    first = dual(emb)
    second = dual(first.embedding)
    vm = {}
    for v in emb.graph.vertices:
        cyc = emb.rotation.cycles[v]
        if not cyc:
            return False
        vm[v] = second.face_of[cyc[0]]
    if len(set(vm.values())) != len(vm):
        return False
    return same_embedding(emb, second.embedding, vm)


# --------------------------------------------------------- derived embeddings


def designated_face(emb: Embedding, outer) -> int:
    """Resolve an outer-face hint: a face index or a dart on that face."""
    if isinstance(outer, int) and not isinstance(outer, bool) and outer not in emb.face_of:
        if not 0 <= outer < len(emb.faces):
            raise EmbeddingError(f"face index {outer} out of range")
        return outer
    if outer in emb.face_of:
        return emb.face_of[outer]
    raise EmbeddingError(f"cannot resolve outer face {outer!r}")


def _lift_rotation(spec: TowerSpec, base: Embedding, n: int) -> tuple[LayerGraph, RotationSystem]:
    free = build_layer(spec.unramified(), n)
    rot = {}
    for v, g in free.graph.vertices:
        rot[(v, g)] = tuple((e, g) for e in base.rotation.cycles[v])
    return free, RotationSystem(rot)


def _nested_rotation(spec: TowerSpec, base: Embedding, layer: LayerGraph) -> RotationSystem:
    """Group the lifts of each base dart at a merged vertex, nesting the sheets.

    Lifts of the k-th base dart in the base rotation are sorted by a sheet key;
    groups alternate between descending and ascending order.  The key of a lift
    is the coset label of its terminus when the terminus is unramified, and
    otherwise the sheet of the edge's forward dart.
    """
    n = layer.level
    g = layer.graph
    rot = {}
    for vert in g.vertices:
        v, _ = vert
        out = set(g.outgoing[vert])
        cyc = []
        for k, b in enumerate(base.rotation.cycles[v]):
            lifts = [x for x in g.outgoing[vert] if x[0] == b]
            tv = spec.base.terminus(b)

            def key(x, b=b, tv=tv):
                if not spec.is_ramified(tv):
                    return g.terminus(x)[1]
                if _is_forward_name(b):
                    return x[1]
                return g.partner(x)[1]

            lifts.sort(key=key, reverse=(k % 2 == 0))
            cyc.extend(lifts)
        assert set(cyc) == out
        rot[vert] = tuple(cyc)
    return RotationSystem(rot)


def _is_forward_name(dart_id) -> bool:
    return not (isinstance(dart_id, str) and dart_id.endswith("~"))


def _pinch_rotation(free_emb: Embedding, groups: Sequence[Sequence], names: Sequence) -> RotationSystem:
    """Identify each vertex group one vertex at a time along a shared face."""
    cycles = {v: list(c) for v, c in free_emb.rotation.cycles.items()}
    graph = free_emb.graph
    darts = list(graph.darts)
    for group, name in zip(groups, names):
        current = group[0]
        for other in group[1:]:
            emb = _temp_embedding(darts, cycles)
            fo = emb.face_of
            corner = _shared_corner(emb, cycles[current], cycles[other], fo)
            if corner is None:
                raise EmbeddingError(f"no common face for {current!r} and {other!r}")
            (au, bu), (aw, bw) = corner
            cu, cw = cycles.pop(current), cycles.pop(other)
            merged = _cycle_from(cu, bu) + _cycle_from(cw, bw)
            cycles[current] = merged
            darts = [Dart(d.id, current if d.origin == other else d.origin,
                          current if d.terminus == other else d.terminus, d.partner) for d in darts]
        if current != name:
            cycles[name] = cycles.pop(current)
            darts = [Dart(d.id, name if d.origin == current else d.origin,
                          name if d.terminus == current else d.terminus, d.partner) for d in darts]
    return RotationSystem(cycles)


def _temp_embedding(darts, cycles) -> Embedding:
    verts = tuple(cycles)
    return Embedding(Graph(verts, tuple(darts)), RotationSystem(cycles))


def _cycle_from(cyc: list, start) -> list:
    i = cyc.index(start)
    return cyc[i:] + cyc[:i]


def _shared_corner(emb: Embedding, cu: list, cw: list, fo: dict):
    if not cu or not cw:
        return None
    corners_w = {}
    for i, a in enumerate(cw):
        b = cw[(i + 1) % len(cw)]
        corners_w.setdefault(fo[emb.graph.partner(a)], (a, b))
    for i, a in enumerate(cu):
        b = cu[(i + 1) % len(cu)]
        f = fo[emb.graph.partner(a)]
        if f in corners_w:
            return (a, b), corners_w[f]
    return None


def derived_embedding(spec: TowerSpec, base: Embedding, n: int, outer=None, strategy: str = "auto") -> Embedding:
    """Planar embedding of layer n for a tower with a single voltage-carrying edge.

    Unramified layers carry the lifted rotation: every lift of a vertex uses the
    base cyclic order.  Ramified layers merge the lifts of a ramified vertex,
    nesting the sheets (``strategy="nested"``) or pinching lifts together
    along a shared face (``strategy="pinch"``); ``"auto"`` tries them in that
    order.  The result is checked to have Euler characteristic 2.
    """
    if base.graph != spec.base:
        raise EmbeddingError("base embedding does not belong to the tower's base graph")
    vedges = spec.voltage_edges()
    if len(vedges) != 1:
        raise EmbeddingError(f"expected exactly one voltage-carrying edge, found {len(vedges)}")
    e0 = vedges[0]
    if not is_planar_embedding(base):
        raise EmbeddingError("base embedding is not planar")
    if outer is not None:
        f = designated_face(base, outer)
        if base.face_of[e0.id] != f and base.face_of[e0.partner] != f:
            raise EmbeddingError(f"voltage edge {e0.id!r} is not on the designated outer face")
    layer = build_layer(spec, n)
    if n == 0:
        rot = RotationSystem({(v, g): tuple((e, g) for e in base.rotation.cycles[v]) for v, g in layer.graph.vertices})
        return _checked(Embedding(layer.graph, rot))
    if not any(spec.is_ramified(v) for v in spec.base.vertices):
        _, rot = _lift_rotation(spec, base, n)
        return _checked(Embedding(layer.graph, rot))
    tried = []
    for strat in (["nested", "pinch"] if strategy == "auto" else [strategy]):
        try:
            if strat == "nested":
                emb = Embedding(layer.graph, _nested_rotation(spec, base, layer))
            elif strat == "pinch":
                emb = _pinch_layer(spec, base, layer)
            else:
                raise ValueError(f"unknown strategy {strat!r}")
        except EmbeddingError as exc:
            tried.append(f"{strat}: {exc}")
            continue
        if is_connected(emb.graph) and is_planar_embedding(emb):
            return emb
        tried.append(f"{strat}: Euler characteristic {euler_characteristic(emb) if is_connected(emb.graph) else 'n/a'}")
    raise EmbeddingError("no planar embedding found for the ramified layer (" + "; ".join(tried) + ")")


def _pinch_layer(spec: TowerSpec, base: Embedding, layer: LayerGraph) -> Embedding:
    free, rot = _lift_rotation(spec, base, layer.level)
    free_emb = Embedding(free.graph, rot)
    n = layer.level
    images = {v: spec.image(v, n) for v in spec.base.vertices}
    groups: dict = {}
    for v, g in free.graph.vertices:
        groups.setdefault((v, images[v].canonical(g)), []).append((v, g))
    names = list(groups)
    pinched = _pinch_rotation(free_emb, [groups[k] for k in names], names)
    return Embedding(layer.graph, pinched)


def _checked(emb: Embedding) -> Embedding:
    if not is_connected(emb.graph):
        raise EmbeddingError("layer is not connected")
    if not is_planar_embedding(emb):
        raise EmbeddingError(f"derived rotation has Euler characteristic {euler_characteristic(emb)}")
    return emb


# --------------------------------------------------------- branched covers


@dataclass(frozen=True)
class CoverReport:
    ramification: dict  # vertex of Y -> m_v
    degree: int

    def ramified_vertices(self) -> list:
        return [v for v, m in self.ramification.items() if m > 1]


def check_branched_cover(Y: Graph, X: Graph, f: GraphMorphism) -> CoverReport:
    problem = f.violation()
    if problem:
        raise CoverError(f"not a graph morphism: {problem}", problem)
    if not f.is_surjective():
        raise CoverError("morphism is not surjective")
    ram = {}
    for v in Y.vertices:
        w = f.vertex_map[v]
        counts = {e: 0 for e in X.outgoing[w]}
        for e in Y.outgoing[v]:
            counts[f.dart_map[e]] += 1
        values = set(counts.values())
        if len(values) > 1:
            witness = {"vertex": v, "fibers": {e: c for e, c in counts.items()}}
            raise CoverError(f"fiber sizes at vertex {v!r} vary over the darts at {w!r}: {sorted(values)}", witness)
        ram[v] = values.pop() if values else 1
    sheets = {}
    for v, m in ram.items():
        w = f.vertex_map[v]
        sheets[w] = sheets.get(w, 0) + m
    degs = set(sheets.values())
    if len(degs) > 1:
        raise CoverError(f"sheet count varies over base vertices: {sheets}", sheets)
    return CoverReport(ram, degs.pop() if degs else 0)


# ------------------------------------------------------------- dual towers


@dataclass
class DualLayer:
    level: int
    primal: Embedding
    dual: Dual
    to_base: GraphMorphism | None = None


def _dual_vertex_names(emb: Embedding) -> list:
    """Name each face by its first dart, so names are stable across layers."""
    return [("face", f[0]) for f in emb.faces]


def dual_layer(spec: TowerSpec, base: Embedding, n: int, outer=None) -> DualLayer:
    emb = derived_embedding(spec, base, n, outer)
    dl = dual(emb, _dual_vertex_names(emb))
    return DualLayer(n, emb, dl)


def dual_face_map(hi: DualLayer, lo: DualLayer, p: int) -> GraphMorphism:
    """Dual covering map induced by reducing dart labels; faces follow their darts.

    A face whose darts land on different faces below gets the image of its first
    dart, so the resulting morphism is then invalid and the cover check names it.
    """
    n = lo.level
    dmap = {(e, g): (e, reduce(g, n, p)) for e, g in (d.id for d in hi.dual.graph.darts)}
    vmap = {}
    for name in hi.dual.graph.vertices:
        first = hi.dual.embedding.rotation.cycles[name][0]
        vmap[name] = lo.dual.face_of[dmap[first]]
    return GraphMorphism(hi.dual.graph, lo.dual.graph, vmap, dmap)


@dataclass
class DualTowerReport:
    passed: bool
    failures: list = field(default_factory=list)
    ramified_primal: int | None = None
    ramified_dual: int | None = None
    dual_sizes: dict = field(default_factory=dict)
    witness: object = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failures": list(self.failures),
            "ramified_primal": self.ramified_primal,
            "ramified_dual": self.ramified_dual,
            "dual_vertices": {str(k): v for k, v in sorted(self.dual_sizes.items())},
        }


def _shift_dual(dl: DualLayer, g: tuple, p: int):
    q = p ** dl.level
    dmap = {}
    for d in dl.dual.graph.darts:
        e, h = d.id
        dmap[d.id] = (e, tuple((a + b) % q for a, b in zip(h, g)))
    vmap = {}
    for name in dl.dual.graph.vertices:
        faces = {dl.dual.face_of[dmap[x]] for x in dl.dual.embedding.rotation.cycles[name]}
        if len(faces) != 1:
            return None, name
        vmap[name] = faces.pop()
    return GraphMorphism(dl.dual.graph, dl.dual.graph, vmap, dmap), None


def dual_tower_check(spec: TowerSpec, base: Embedding, n_max: int, outer=None, all_elements_limit: int = 64) -> DualTowerReport:
    """Check that the duals of layers 0..n_max form a branched tower with a free Galois action."""
    report = DualTowerReport(True)
    p = spec.p
    layers = []
    for n in range(n_max + 1):
        try:
            layers.append(dual_layer(spec, base, n, outer))
        except EmbeddingError as exc:
            report.passed = False
            report.failures.append(f"n={n}: embedding: {exc}")
            return report
        report.dual_sizes[n] = len(layers[-1].dual.graph.vertices)
    base_dual = layers[0]
    covers = {}
    for dl in layers[1:]:
        n = dl.level
        f = dual_face_map(dl, base_dual, p)
        dl.to_base = f
        try:
            covers[n] = check_branched_cover(dl.dual.graph, base_dual.dual.graph, f)
        except CoverError as exc:
            report.passed = False
            report.failures.append(f"n={n}: (a) dual layer is not a branched cover of the dual base: {exc}")
            report.witness = exc.witness
            return report
        # (b) Galois action on dual darts
        elements = list(spec.group.elements(n))
        if len(elements) > all_elements_limit:
            elements = [tuple(1 if i == j else 0 for j in range(spec.d)) for i in range(spec.d)]
        lower = layers[n - 1]
        down = dual_face_map(dl, lower, p)
        for g in elements:
            if not any(g):
                continue
            act, bad = _shift_dual(dl, g, p)
            if act is None:
                report.passed = False
                report.failures.append(f"n={n}: (b) shift by {list(g)} does not map face {bad!r} onto a face")
                return report
            if act.violation():
                report.passed = False
                report.failures.append(f"n={n}: (b) shift by {list(g)} is not a graph morphism: {act.violation()}")
                return report
            for d in dl.dual.graph.darts:
                img = act.dart_map[d.id]
                if img == d.id or img == d.partner:
                    report.passed = False
                    report.failures.append(f"n={n}: (b) shift by {list(g)} fixes or inverts dart {d.id!r}")
                    return report
            act_lo, _ = _shift_dual(lower, reduce(g, n - 1, p), p)
            for x in dl.dual.graph.vertices:
                if down.vertex_map[act.vertex_map[x]] != act_lo.vertex_map[down.vertex_map[x]]:
                    report.passed = False
                    report.failures.append(f"n={n}: (b) shift by {list(g)} does not commute with the projection at {x!r}")
                    return report
            for d in dl.dual.graph.darts:
                if down.dart_map[act.dart_map[d.id]] != act_lo.dart_map[down.dart_map[d.id]]:
                    report.passed = False
                    report.failures.append(f"n={n}: (b) shift by {list(g)} does not commute with the projection at {d.id!r}")
                    return report
    if n_max >= 1:
        top = layers[-1]
        primal_cover = check_branched_cover(top.primal.graph, spec.base, _base_projection(spec, top.primal.graph, n_max))
        vr = len(primal_cover.ramified_vertices())
        vbar = len(covers[n_max].ramified_vertices())
        report.ramified_primal, report.ramified_dual = vr, vbar
        if vbar != 2 - vr:
            report.passed = False
            report.failures.append(f"n={n_max}: (c) ramified dual vertices {vbar} != 2 - {vr}")
    return report


def _base_projection(spec: TowerSpec, g: Graph, n: int) -> GraphMorphism:
    return GraphMorphism(g, spec.base, {x: x[0] for x in g.vertices}, {d.id: d.id[0] for d in g.darts})


# ------------------------------------------------------ dart assignments


@dataclass(frozen=True)
class DartAssignment:
    values: Mapping

    def __post_init__(self):
        object.__setattr__(self, "values", {e: int(c) for e, c in self.values.items()})

    def __getitem__(self, e) -> int:
        return self.values.get(e, 0)

    def check(self, g: Graph) -> None:
        for d in g.darts:
            if self[d.id] + self[d.partner] != 0:
                raise ValueError(f"assignment is not antisymmetric at {d.id!r}")

    @classmethod
    def from_edge_values(cls, g: Graph, edge_values: Sequence[int]) -> "DartAssignment":
        vals = {}
        for d, x in zip(g.edges(), edge_values):
            vals[d.id] = x
            vals[d.partner] = -x
        return cls(vals)


def boundary(phi: DartAssignment, g: Graph) -> Divisor:
    """Σ_e φ(e)·o(e)."""
    out: dict = {}
    for d in g.darts:
        x = phi[d.id]
        if x:
            out[d.origin] = out.get(d.origin, 0) + x
    return Divisor(out)


def coboundary(phi: DartAssignment, emb: Embedding, names: Sequence | None = None) -> Divisor:
    """Σ_e φ(e)·face(e), as a divisor on the dual."""
    names = list(names) if names is not None else [face_name(i) for i in range(len(emb.faces))]
    out: dict = {}
    for e, i in emb.face_of.items():
        x = phi[e]
        if x:
            out[names[i]] = out.get(names[i], 0) + x
    return Divisor(out)


def incidence_matrix(g: Graph) -> list[list[int]]:
    """Vertices × undirected edges; column of edge e is o(e) − t(e) (zero for loops)."""
    idx = g.vertex_index
    edges = g.edges()
    m = [[0] * len(edges) for _ in g.vertices]
    for j, d in enumerate(edges):
        m[idx[d.origin]][j] += 1
        m[idx[d.terminus]][j] -= 1
    return m


def solve_boundary(g: Graph, u: Divisor) -> DartAssignment:
    if u.degree != 0:
        raise ValueError("divisor must have degree 0")
    x = intlinalg.solve_integer(incidence_matrix(g), u.vector(g.vertices))
    if x is None:
        raise ArithmeticError("no dart assignment with the requested boundary")
    phi = DartAssignment.from_edge_values(g, x)
    if boundary(phi, g) != u:
        raise ArithmeticError("boundary check failed")
    return phi


def theta(emb: Embedding, u: Divisor, names: Sequence | None = None) -> Divisor:
    """Dual divisor ∂*φ for a dart assignment φ with ∂φ = u."""
    if not is_connected(emb.graph):
        raise GraphError("theta needs a connected graph")
    phi = solve_boundary(emb.graph, u)
    return coboundary(phi, emb, names)


def class_equal(g: Graph, a: Divisor, b: Divisor) -> bool:
    """Whether a − b is principal on ``g``."""
    diff = a - b
    return intlinalg.in_column_span(laplacian(g), diff.vector(g.vertices))


def class_order(g: Graph, u: Divisor, limit: int | None = None) -> int:
    """Order of the class of ``u`` in Pic(g) (for degree-0 divisors on connected graphs)."""
    lap = laplacian(g)
    vec = u.vector(g.vertices)
    k = 1
    limit = limit if limit is not None else kappa(g)
    while k <= limit:
        if intlinalg.in_column_span(lap, [k * x for x in vec]):
            return k
        k += 1
    raise ArithmeticError("class order exceeds the bound")


@dataclass(frozen=True)
class DualityVerdict:
    passed: bool
    jac: tuple
    jac_dual: tuple
    kappa: int
    kappa_dual: int

    def to_dict(self) -> dict:
        return {"passed": self.passed, "jacobian": list(self.jac), "jacobian_dual": list(self.jac_dual),
                "kappa": self.kappa, "kappa_dual": self.kappa_dual}


def jac_duality_check(emb: Embedding) -> DualityVerdict:
    dl = dual(emb)
    j1 = jacobian_invariants(emb.graph)
    j2 = jacobian_invariants(dl.graph)
    k1, k2 = kappa(emb.graph), kappa(dl.graph)
    return DualityVerdict(j1 == j2 and k1 == k2, j1.invariant_factors, j2.invariant_factors, k1, k2)


def jacobian_generators(g: Graph) -> list[Divisor]:
    """Degree-0 divisors v_i − v_0 generating Jac(g)."""
    v0 = g.vertices[0]
    return [Divisor({v: 1, v0: -1}) for v in g.vertices[1:]]


def act_on_divisor(f: GraphMorphism, u: Divisor) -> Divisor:
    out: dict = {}
    for v, c in u.coeffs.items():
        w = f.vertex_map[v]
        out[w] = out.get(w, 0) + c
    return Divisor(out)


def theta_equivariance(spec: TowerSpec, base: Embedding, n: int, outer=None) -> list:
    """Generators u and group elements g where θ(g·u) and g·θ(u) differ in Jac of the dual.

    Uses the dual-layer face action; an empty list means θ is equivariant on
    the generating set.
    """
    dl = dual_layer(spec, base, n, outer)
    emb = dl.primal
    names = list(dl.dual.graph.vertices)
    layer = LayerGraph(emb.graph, n, spec)
    bad = []
    gens = [tuple(1 if i == j else 0 for j in range(spec.d)) for i in range(spec.d)]
    for g in gens:
        act = galois_act(layer, g)
        act_dual, failed = _shift_dual(dl, g, spec.p)
        if act_dual is None:
            raise CoverError(f"shift does not act on the faces of layer {n}", failed)
        for u in jacobian_generators(emb.graph):
            lhs = theta(emb, act_on_divisor(act, u), names)
            rhs = act_on_divisor(act_dual, theta(emb, u, names))
            if not class_equal(dl.dual.graph, lhs, rhs):
                bad.append((g, u))
    return bad
