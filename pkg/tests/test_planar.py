import itertools
import random

import pytest

from branchtower.graph import Graph, GraphError, identity_morphism, simple_graph
from branchtower.jacobian import Divisor, is_principal, jacobian_invariants, kappa
from branchtower.planar import (
    CoverError,
    DartAssignment,
    Embedding,
    EmbeddingError,
    RotationSystem,
    boundary,
    check_branched_cover,
    class_order,
    coboundary,
    derived_embedding,
    double_dual_check,
    dual,
    dual_face_map,
    dual_layer,
    dual_tower_check,
    euler_characteristic,
    face_name,
    is_planar_embedding,
    jac_duality_check,
    theta,
    theta_equivariance,
    trace_faces,
)
from branchtower.tower import GroupSpec, TowerSpec, build_layer, projection
from conftest import complete_graph, corpus, cycle_graph, networkx_rotation


def loop_embedding():
    g = Graph.from_edges(["v"], [("e", "v", "v")])
    return Embedding(g, RotationSystem({"v": ["e", "e~"]}))


def cycle_embedding(m):
    g = cycle_graph(m)
    # simple_graph names edge k from v_k to v_{k+1}
    rot = {}
    for k, v in enumerate(g.vertices):
        rot[v] = [f"e{k}", f"e{(k - 1) % m}~"]
    return Embedding(g, RotationSystem(rot))


def path_embedding(m):
    g = simple_graph(m, [(i, i + 1) for i in range(m - 1)])
    return networkx_rotation(g)


def test_rotation_validation():
    g = Graph.from_edges(["v"], [("e", "v", "v")])
    with pytest.raises(EmbeddingError):
        Embedding(g, RotationSystem({"v": ["e"]}))
    with pytest.raises(EmbeddingError):
        Embedding(g, RotationSystem({"v": ["e", "e~"], "w": []}))
    with pytest.raises(EmbeddingError):
        Embedding(g, RotationSystem({}))


def test_face_examples():
    assert len(trace_faces(loop_embedding())) == 2
    assert len(trace_faces(corpus("ramified_triangle").embedding)) == 2
    assert len(trace_faces(corpus("square_diagonal").embedding)) == 3


def test_faces_partition_darts(all_specs):
    for sf in all_specs:
        if sf.embedding is None:
            continue
        faces = sf.embedding.faces
        assert sum(len(f) for f in faces) == len(sf.spec.base.darts)
        assert len({e for f in faces for e in f}) == len(sf.spec.base.darts)


def test_euler_examples():
    tet = networkx_rotation(complete_graph(4))
    assert euler_characteristic(tet) == 2 and len(tet.faces) == 4
    hexagon = derived_embedding(corpus("unramified_triangle").spec, corpus("unramified_triangle").embedding, 1)
    assert euler_characteristic(hexagon) == 2
    k5 = complete_graph(5)
    assert networkx_rotation(k5) is None
    rnd = random.Random(5)
    for _ in range(3):
        rot = {}
        for v in k5.vertices:
            out = list(k5.outgoing[v])
            rnd.shuffle(out)
            rot[v] = out
        chi = euler_characteristic(Embedding(k5, RotationSystem(rot)))
        assert chi <= 0 and chi % 2 == 0
    with pytest.raises(GraphError):
        euler_characteristic(Embedding(Graph(("a", "b"), ()), RotationSystem({"a": [], "b": []})))


def test_dual_examples():
    d = dual(cycle_embedding(3))
    assert len(d.graph.vertices) == 2 and d.graph.num_edges == 3
    assert all(x.origin != x.terminus for x in d.graph.darts)
    sq = dual(corpus("square_diagonal").embedding)
    assert len(sq.graph.vertices) == 3 and sq.graph.num_edges == 5
    lp = dual(loop_embedding())
    assert len(lp.graph.vertices) == 2 and lp.graph.num_edges == 1
    with pytest.raises(EmbeddingError):
        k5 = complete_graph(5)
        dual(Embedding(k5, RotationSystem({v: k5.outgoing[v] for v in k5.vertices})))


def test_square_dual_matches_figure():
    # each inner triangle shares two sides with the outer face; the triangles share the diagonal
    sq = dual(corpus("square_diagonal").embedding)
    pairs = {}
    for x in sq.graph.edges():
        key = tuple(sorted((x.origin, x.terminus)))
        pairs[key] = pairs.get(key, 0) + 1
    assert sorted(pairs.values()) == [1, 2, 2]
    assert all(a != b for a, b in pairs)


def test_double_dual(all_specs):
    for sf in all_specs:
        if sf.embedding is not None:
            assert double_dual_check(sf.embedding)
    assert double_dual_check(networkx_rotation(complete_graph(4)))
    assert double_dual_check(loop_embedding())


def test_derived_embedding_examples():
    sf = corpus("unramified_triangle")
    hexagon = derived_embedding(sf.spec, sf.embedding, 1, sf.outer_face)
    assert len(hexagon.graph.vertices) == 6 and len(hexagon.faces) == 2
    other = corpus("another_example")
    emb = derived_embedding(other.spec, other.embedding, 1, other.outer_face)
    assert len(emb.graph.vertices) == 4 and emb.graph.num_edges == 6 and is_planar_embedding(emb)
    base = derived_embedding(other.spec, other.embedding, 0)
    assert len(base.faces) == len(other.embedding.faces)
    assert sorted(len(f) for f in base.faces) == sorted(len(f) for f in other.embedding.faces)


def test_ramified_derived_face_degrees():
    sf = corpus("ramified_triangle")
    emb = derived_embedding(sf.spec, sf.embedding, 1, sf.outer_face)
    assert sorted(len(f) for f in emb.faces) == [2, 3, 3, 4]
    emb = derived_embedding(sf.spec, sf.embedding, 2, sf.outer_face)
    assert sorted(len(f) for f in emb.faces) == [2, 2, 2, 3, 3, 4, 4, 4]


def test_derived_embedding_errors():
    sf = corpus("unramified_triangle")
    two = dict(sf.spec.voltage)
    two["e2"], two["e2~"] = (1,), (-1,)
    with pytest.raises(EmbeddingError):
        derived_embedding(sf.spec.with_voltage(two), sf.embedding, 1)
    sq = corpus("square_diagonal")
    outer = next(f for f in sq.embedding.faces if "x" not in f and "x~" not in f)
    with pytest.raises(EmbeddingError):
        derived_embedding(sq.spec, sq.embedding, 1, outer[0])


def test_derived_embeddings_are_planar(all_specs):
    for sf in all_specs:
        if sf.embedding is None or len(sf.spec.voltage_edges()) != 1:
            continue
        top = 3 if sf.spec.d == 1 else 1
        for n in range(top + 1):
            emb = derived_embedding(sf.spec, sf.embedding, n, sf.outer_face)
            assert euler_characteristic(emb) == 2, (sf.spec.name, n)
            assert emb.graph == build_layer(sf.spec, n).graph


def test_unramified_face_count_law(all_specs):
    for sf in all_specs:
        spec = sf.spec
        if sf.embedding is None or spec.d != 1 or any(spec.is_ramified(v) for v in spec.base.vertices):
            continue
        if len(spec.voltage_edges()) != 1:
            continue
        f0 = len(sf.embedding.faces)
        for n in range(1, 4):
            faces = len(derived_embedding(spec, sf.embedding, n, sf.outer_face).faces)
            assert faces == 2 + spec.p ** n * (f0 - 2)


def test_cover_examples(all_specs):
    for sf in all_specs:
        spec = sf.spec
        rep = check_branched_cover(build_layer(spec, 1).graph, build_layer(spec, 0).graph, projection(spec, 1, 0))
        assert rep.degree == spec.p ** spec.d
        for (v, _), m in rep.ramification.items():
            assert m == spec.image(v, 1).order
            if spec.d == 1:
                assert m == (spec.p if spec.is_ramified(v) else 1)
    g = cycle_graph(5)
    rep = check_branched_cover(g, g, identity_morphism(g))
    assert set(rep.ramification.values()) == {1} and rep.degree == 1


def test_cover_failure_names_witness():
    sf = corpus("ramified_triangle")
    hi = dual_layer(sf.spec, sf.embedding, 1, sf.outer_face)
    lo = dual_layer(sf.spec, sf.embedding, 0, sf.outer_face)
    f = dual_face_map(hi, lo, sf.spec.p)
    with pytest.raises(CoverError) as info:
        check_branched_cover(hi.dual.graph, lo.dual.graph, f)
    assert info.value.witness is not None


def test_dual_tower_examples():
    sq = corpus("square_diagonal")
    rep = dual_tower_check(sq.spec, sq.embedding, 2, sq.outer_face)
    assert rep.passed, rep.failures
    assert (rep.ramified_primal, rep.ramified_dual) == (0, 2)
    assert rep.dual_sizes == {0: 3, 1: 4, 2: 6}
    bad = corpus("ramified_triangle")
    rep = dual_tower_check(bad.spec, bad.embedding, 2, bad.outer_face)
    assert not rep.passed and rep.failures[0].startswith("n=1: (a)")
    tri = corpus("unramified_triangle")
    rep = dual_tower_check(tri.spec, tri.embedding, 3, tri.outer_face)
    assert rep.passed and rep.ramified_dual == 2


def test_boundary_examples():
    c3 = cycle_embedding(3)
    g = c3.graph
    zero = DartAssignment({})
    assert boundary(zero, g) == Divisor({}) and coboundary(zero, c3) == Divisor({})
    phi = DartAssignment.from_edge_values(g, [1, 1, 1])
    phi.check(g)
    assert boundary(phi, g) == Divisor({})
    cob = coboundary(phi, c3)
    inner, outer = c3.face_of["e0"], c3.face_of["e0~"]
    assert cob == Divisor({face_name(inner): 3, face_name(outer): -3})
    path = simple_graph(2, [(0, 1)])
    assert boundary(DartAssignment.from_edge_values(path, [1]), path) == Divisor({"v0": 1, "v1": -1})
    with pytest.raises(ValueError):
        DartAssignment({"e0": 1, "e0~": 1}).check(g)


def test_theta_examples():
    c3 = cycle_embedding(3)
    d3 = dual(c3)
    assert is_principal(d3.graph, theta(c3, Divisor({})))
    u = Divisor({"v1": 1, "v2": -1})
    img = theta(c3, u)
    assert img.degree == 0
    assert class_order(d3.graph, img) == 3 == class_order(c3.graph, u)
    sq = corpus("square_diagonal").embedding
    dsq = dual(sq)
    for v in sq.graph.vertices[1:]:
        u = Divisor({v: 1, sq.graph.vertices[0]: -1})
        assert class_order(dsq.graph, theta(sq, u)) == class_order(sq.graph, u)
    with pytest.raises(ValueError):
        theta(c3, Divisor({"v1": 1}))


def test_jac_duality_examples():
    v = jac_duality_check(cycle_embedding(6))
    assert v.passed and v.jac == (6,) and v.kappa == 6
    v = jac_duality_check(path_embedding(4))
    assert v.passed and v.jac == () and v.kappa_dual == 1
    sq = corpus("square_diagonal")
    for n in range(3):
        emb = derived_embedding(sq.spec, sq.embedding, n, sq.outer_face)
        assert jac_duality_check(emb).passed


def test_jac_duality_random_planar():
    rnd = random.Random(17)
    done = 0
    while done < 10:
        n = rnd.randint(3, 7)
        pairs = [(i, rnd.randrange(i)) for i in range(1, n)]
        pairs += [pr for pr in itertools.combinations(range(n), 2) if rnd.random() < 0.3 and pr not in pairs]
        g = simple_graph(n, list(dict.fromkeys(tuple(sorted(p)) for p in pairs)))
        emb = networkx_rotation(g)
        if emb is None:
            continue
        v = jac_duality_check(emb)
        assert v.passed and v.kappa == kappa(g)
        assert jacobian_invariants(dual(emb).graph) == jacobian_invariants(g)
        done += 1


def test_theta_equivariance():
    sq = corpus("square_diagonal")
    assert theta_equivariance(sq.spec, sq.embedding, 1, sq.outer_face) == []
    tri = corpus("unramified_triangle")
    assert theta_equivariance(tri.spec, tri.embedding, 2, tri.outer_face) == []


def test_single_voltage_square_tower():
    # 4-cycle with voltage on one side, p = 3
    g = Graph.from_edges("ABCD", [("a", "A", "B"), ("b", "B", "C"), ("c", "C", "D"), ("d", "D", "A")])
    volt = {x.id: (0,) for x in g.darts}
    volt["a"], volt["a~"] = (1,), (-1,)
    spec = TowerSpec(g, GroupSpec(3, 1), volt)
    emb = Embedding(g, RotationSystem({"A": ["a", "d~"], "B": ["b", "a~"], "C": ["c", "b~"], "D": ["d", "c~"]}))
    for n in range(3):
        assert is_planar_embedding(derived_embedding(spec, emb, n, "a"))
    assert dual_tower_check(spec, emb, 2, "a").passed
