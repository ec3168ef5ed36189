"""Derived graphs of ℤ_p^d voltage assignments with prescribed inertia.

Group elements are integer exponent vectors (tuples of length d).  The level-n
quotient is (ℤ/p^n)^d and every coset of an inertia image is named by its
lexicographically smallest representative in ``[0, p^n)^d``.

Layer vertices are ``(v, rep)`` pairs and layer darts are ``(e, g)`` pairs,
where ``v``/``e`` are base ids and ``rep``/``g`` are tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import intlinalg
from .graph import Dart, Graph, GraphError, GraphMorphism, check, is_connected, quotient_vertices

MAX_LAYER_VERTICES = 10 ** 5


class TowerError(ValueError):
    pass


class LevelError(TowerError):
    """A level below the stabilization level of some inertia group."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, int(p ** 0.5) + 1))


@dataclass(frozen=True)
class GroupSpec:
    p: int
    d: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise TowerError(f"p = {self.p} is not prime")
        if self.d < 1:
            raise TowerError(f"rank d = {self.d} must be at least 1")

    def order(self, n: int) -> int:
        return self.p ** (n * self.d)

    def elements(self, n: int):
        """All of (ℤ/p^n)^d in lexicographic order."""
        return itertools.product(range(self.p ** n), repeat=self.d)


def ord_p(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("ord_p(0) is undefined")
    x = abs(x)
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


def reduce(g: Sequence[int], n: int, p: int) -> tuple:
    q = p ** n
    return tuple(int(a) % q for a in g)


def element_order_in_layer(sigma: Sequence[int], n: int, p: int) -> int:
    """Order of ``sigma`` in (ℤ/p^n)^d."""
    nonzero = [a for a in sigma if a]
    if not nonzero:
        return 1
    b = min(ord_p(a, p) for a in nonzero)
    return p ** (n - min(b, n))


def element_order_brute(sigma: Sequence[int], n: int, p: int) -> int:
    q = p ** n
    x = reduce(sigma, n, p)
    k = 1
    cur = x
    while any(cur):
        cur = tuple((a + b) % q for a, b in zip(cur, x))
        k += 1
    return k


def _check_gens(gens: Iterable[Sequence[int]], d: int) -> list[tuple]:
    out = []
    for g in gens:
        g = tuple(int(a) for a in g)
        if len(g) != d:
            raise TowerError(f"generator {list(g)} has length {len(g)}, expected {d}")
        out.append(g)
    return out


def generator_rank(gens: Sequence[Sequence[int]]) -> int:
    """Rank over ℚ of the generator matrix."""
    if not gens:
        return 0
    return sum(1 for s in intlinalg.smith_normal_form([list(g) for g in gens]) if s)


@dataclass(frozen=True)
class InertiaImage:
    """The subgroup of (ℤ/p^n)^d generated by reduced inertia generators."""

    p: int
    d: int
    n: int
    hnf: tuple  # d×d upper triangular basis of span(gens) + p^n ℤ^d

    @property
    def diagonal(self) -> tuple:
        return tuple(self.hnf[i][i] for i in range(self.d))

    @property
    def coset_count(self) -> int:
        out = 1
        for h in self.diagonal:
            out *= h
        return out

    @property
    def order(self) -> int:
        return self.p ** (self.n * self.d) // self.coset_count

    def canonical(self, g: Sequence[int]) -> tuple:
        """Lexicographically smallest representative of ``g`` + subgroup in [0, p^n)^d."""
        x = [int(a) for a in g]
        for i in range(self.d):
            row = self.hnf[i]
            q = x[i] // row[i]
            if q:
                for j in range(i, self.d):
                    x[j] -= q * row[j]
        return tuple(x)

    def coset_representatives(self) -> list[tuple]:
        """All canonical representatives, in lexicographic order."""
        return list(itertools.product(*(range(h) for h in self.diagonal)))

    def elements(self) -> list[tuple]:
        """Subgroup elements lifted to [0, p^n)^d, sorted."""
        q = self.p ** self.n
        ranges = [range(q // h) for h in self.diagonal]
        out = []
        for cs in itertools.product(*ranges):
            v = [0] * self.d
            for i, c in enumerate(cs):
                if c:
                    row = self.hnf[i]
                    for j in range(i, self.d):
                        v[j] += c * row[j]
            out.append(tuple(a % q for a in v))
        return sorted(out)


@lru_cache(maxsize=4096)
def _inertia_image(gens: tuple, n: int, p: int, d: int) -> InertiaImage:
    q = p ** n
    rows = [list(g) for g in gens] + [[q if i == j else 0 for j in range(d)] for i in range(d)]
    h = intlinalg.hermite_normal_form(rows)
    return InertiaImage(p, d, n, tuple(tuple(r) for r in h[:d]))


def inertia_image(gens: Iterable[Sequence[int]], n: int, p: int, d: int) -> InertiaImage:
    if n < 0:
        raise TowerError("level must be non-negative")
    return _inertia_image(tuple(_check_gens(gens, d)), n, p, d)


def inertia_p_rank(gens: Sequence[Sequence[int]], n: int, p: int) -> int:
    """Number of cyclic factors of the image of ⟨gens⟩ in (ℤ/p^n)^d."""
    if not gens:
        return 0
    s = intlinalg.smith_normal_form([list(g) for g in gens])
    return sum(1 for x in s if x and ord_p(x, p) < n)


def stabilization_level(gens: Sequence[Sequence[int]], p: int) -> int:
    """Smallest n at which the p-rank of the level-n image reaches the rank of ⟨gens⟩."""
    gens = [tuple(g) for g in gens]
    if not gens:
        return 0
    s = [x for x in intlinalg.smith_normal_form([list(g) for g in gens]) if x]
    if not s:
        return 0
    closed = 1 + max(ord_p(x, p) for x in s)
    k = len(s)
    n = 0
    while inertia_p_rank(gens, n, p) < k:
        n += 1
    if n != closed:
        raise ArithmeticError(f"stabilization level mismatch: {n} vs {closed}")
    return n


def canonical_generator(gens: Sequence[Sequence[int]], p: int) -> tuple | None:
    """A generator of ⟨gens⟩ ⊗ ℤ_p when the rank is one, else ``None``.

    The ℤ-span of rank-one generators is cyclic; its generator is divided by its
    prime-to-p content (a p-adic unit) and sign-normalized.
    """
    gens = [tuple(g) for g in gens if any(g)]
    if not gens or generator_rank(gens) != 1:
        return None
    h = intlinalg.hermite_normal_form([list(g) for g in gens])
    v = list(h[0])
    c = 0
    for a in v:
        c = _gcd(c, a)
    unit = c
    while unit % p == 0:
        unit //= p
    v = [a // unit for a in v]
    first = next(a for a in v if a)
    if first < 0:
        v = [-a for a in v]
    return tuple(v)


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


# ------------------------------------------------------------------- specs


@dataclass(frozen=True)
class TowerSpec:
    base: Graph
    group: GroupSpec
    voltage: Mapping  # dart id -> tuple
    inertia: Mapping = field(default_factory=dict)  # vertex id -> list of tuples
    name: str = ""

    def __post_init__(self):
        d = self.group.d
        check(self.base)
        if not is_connected(self.base):
            raise GraphError("base graph is not connected")
        volt = {}
        for dart in self.base.darts:
            if dart.id not in self.voltage:
                raise TowerError(f"voltage missing on dart {dart.id!r}")
            v = tuple(int(a) for a in self.voltage[dart.id])
            if len(v) != d:
                raise TowerError(f"voltage on dart {dart.id!r} has length {len(v)}, expected {d}")
            volt[dart.id] = v
        for dart in self.base.darts:
            if volt[dart.partner] != tuple(-a for a in volt[dart.id]):
                raise TowerError(f"voltage on {dart.partner!r} is not the inverse of {dart.id!r}")
        inert = {}
        for v, gens in self.inertia.items():
            if v not in self.base.vertex_index:
                raise TowerError(f"inertia given for unknown vertex {v!r}")
            gens = _check_gens(gens, d)
            if gens:
                inert[v] = tuple(gens)
        object.__setattr__(self, "voltage", volt)
        object.__setattr__(self, "inertia", inert)

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def d(self) -> int:
        return self.group.d

    def gens(self, v) -> tuple:
        return self.inertia.get(v, ())

    def inertia_rank(self, v) -> int:
        return generator_rank(self.gens(v))

    def is_ramified(self, v) -> bool:
        return self.inertia_rank(v) > 0

    def unramified(self) -> "TowerSpec":
        return TowerSpec(self.base, self.group, self.voltage, {}, self.name)

    def with_voltage(self, voltage: Mapping) -> "TowerSpec":
        return TowerSpec(self.base, self.group, voltage, self.inertia, self.name)

    def image(self, v, n: int) -> InertiaImage:
        return inertia_image(self.gens(v), n, self.p, self.d)

    def stabilization_level(self) -> int:
        return max([stabilization_level(self.gens(v), self.p) for v in self.base.vertices] or [0])

    def voltage_edges(self) -> list:
        """Representative darts (one per undirected edge) with nonzero voltage."""
        return [e for e in self.base.edges() if any(self.voltage[e.id])]


# ------------------------------------------------------------------ layers


@dataclass(frozen=True)
class LayerGraph:
    graph: Graph
    level: int
    spec: TowerSpec = field(repr=False)

    @property
    def vertex_labels(self) -> dict:
        return {v: label(v) for v in self.graph.vertices}

    @property
    def dart_labels(self) -> dict:
        return {d.id: label(d.id) for d in self.graph.darts}


def label(x) -> str:
    """Printable name of a layer vertex or dart, e.g. ``A[1]`` or ``e~[0,2]``."""
    base, g = x
    return f"{base}[{','.join(str(a) for a in g)}]"


def projected_vertex_count(spec: TowerSpec, n: int) -> int:
    return sum(spec.image(v, n).coset_count for v in spec.base.vertices)


def build_layer(spec: TowerSpec, n: int, guard: int | None = MAX_LAYER_VERTICES) -> LayerGraph:
    if n < 0:
        raise TowerError("level must be non-negative")
    p, d = spec.p, spec.d
    q = p ** n
    if guard is not None:
        nv = projected_vertex_count(spec, n)
        if nv > guard:
            raise TowerError(f"layer {n} would have {nv} vertices, above the guardrail {guard}")
    images = {v: spec.image(v, n) for v in spec.base.vertices}
    vertices = []
    for v in spec.base.vertices:
        for rep in images[v].coset_representatives():
            vertices.append((v, rep))
    elements = list(spec.group.elements(n))
    darts = []
    for e in spec.base.darts:
        a = spec.voltage[e.id]
        img_o, img_t = images[e.origin], images[e.terminus]
        for g in elements:
            h = tuple((x + y) % q for x, y in zip(g, a))
            darts.append(Dart((e.id, g), (e.origin, img_o.canonical(g)), (e.terminus, img_t.canonical(h)), (e.partner, h)))
    return LayerGraph(Graph(tuple(vertices), tuple(darts)), n, spec)


def projection(spec: TowerSpec, hi: LayerGraph | int, lo: LayerGraph | int) -> GraphMorphism:
    """Covering map from layer ``hi`` down to layer ``lo``."""
    hi = hi if isinstance(hi, LayerGraph) else build_layer(spec, hi)
    lo = lo if isinstance(lo, LayerGraph) else build_layer(spec, lo)
    if hi.level < lo.level:
        raise TowerError("projection must go from a higher level to a lower one")
    p, n = spec.p, lo.level
    images = {v: spec.image(v, n) for v in spec.base.vertices}
    vmap = {(v, g): (v, images[v].canonical(reduce(g, n, p))) for v, g in hi.graph.vertices}
    dmap = {(e, g): (e, reduce(g, n, p)) for e, g in (x.id for x in hi.graph.darts)}
    return GraphMorphism(hi.graph, lo.graph, vmap, dmap)


def galois_act(layer: LayerGraph, g: Sequence[int]) -> GraphMorphism:
    spec = layer.spec
    if len(g) != spec.d:
        raise TowerError(f"group element has length {len(g)}, expected {spec.d}")
    n, p = layer.level, spec.p
    g = reduce(g, n, p)
    q = p ** n
    images = {v: spec.image(v, n) for v in spec.base.vertices}

    def shift(h):
        return tuple((a + b) % q for a, b in zip(g, h))

    vmap = {(v, h): (v, images[v].canonical(shift(h))) for v, h in layer.graph.vertices}
    dmap = {(e, h): (e, shift(h)) for e, h in (x.id for x in layer.graph.darts)}
    return GraphMorphism(layer.graph, layer.graph, vmap, dmap)


def vertex_count(spec: TowerSpec, n: int) -> int:
    """Vertex count of layer n from the counts at the stabilization level n0.

    Each vertex of X_{n0} over v has p^{(n-n0)(d-rank I_v)} preimages in X_n;
    with every inertia group trivial or of full rank this is v_r + p^{(n-n0)d} v_u.
    """
    n0 = spec.stabilization_level()
    if n < n0:
        raise LevelError(f"level {n} is below the stabilization level {n0}")
    p, d = spec.p, spec.d
    total = 0
    for v in spec.base.vertices:
        k = spec.inertia_rank(v)
        total += spec.image(v, n0).coset_count * p ** ((n - n0) * (d - k))
    return total


def ramified_unramified_counts(spec: TowerSpec, n0: int) -> tuple[int, int]:
    """(v_r, v_u): vertices of X_{n0} over ramified and unramified base vertices."""
    vr = vu = 0
    for v in spec.base.vertices:
        c = spec.image(v, n0).coset_count
        if spec.is_ramified(v):
            vr += c
        else:
            vu += c
    return vr, vu


def is_connected_layer(spec: TowerSpec, n: int) -> bool:
    return is_connected(build_layer(spec, n).graph)


def omega_norm(gens: Sequence[Sequence[int]], n: int, p: int, d: int) -> dict:
    """Sum of the elements of the level-n inertia image, as {exponent: 1}."""
    gens = _check_gens(gens, d)
    n_i = stabilization_level(gens, p)
    if n < n_i:
        raise LevelError(f"level {n} is below the stabilization level {n_i}")
    img = inertia_image(gens, n, p, d)
    return {e: 1 for e in img.elements()}


def immersion_push(spec: TowerSpec, n: int) -> tuple[LayerGraph, GraphMorphism]:
    """Contract the unramified layer onto the ramified one.

    Returns the unramified layer and the quotient morphism; the quotient graph
    has exactly the vertex and dart labels of ``build_layer(spec, n)``.
    """
    free = build_layer(spec.unramified(), n)
    images = {v: spec.image(v, n) for v in spec.base.vertices}
    partition = {(v, g): (v, images[v].canonical(g)) for v, g in free.graph.vertices}
    q, f = quotient_vertices(free.graph, partition)
    # order quotient vertices like build_layer does
    ordered = Graph(tuple(sorted(q.vertices, key=lambda x: (spec.base.vertex_index[x[0]], x[1]))), q.darts)
    f = GraphMorphism(free.graph, ordered, f.vertex_map, f.dart_map)
    return free, f
