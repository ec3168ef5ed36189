import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from branchtower.graph import Graph, identity_morphism, is_connected, validate
from branchtower.tower import (
    GroupSpec,
    LevelError,
    TowerError,
    TowerSpec,
    build_layer,
    canonical_generator,
    element_order_brute,
    element_order_in_layer,
    galois_act,
    immersion_push,
    inertia_image,
    inertia_p_rank,
    is_connected_layer,
    label,
    omega_norm,
    projection,
    reduce,
    stabilization_level,
    vertex_count,
)
from conftest import corpus


def span_oracle(gens, n, p, d):
    """Closure of the reduced generators under addition in (ℤ/p^n)^d."""
    q = p ** n
    seen = {tuple([0] * d)}
    frontier = list(seen)
    gens = [reduce(g, n, p) for g in gens]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = tuple((a + b) % q for a, b in zip(x, g))
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def zero_voltage_triangle():
    base = Graph.from_edges("ABC", [("e1", "A", "B"), ("e2", "B", "C"), ("e3", "C", "A")])
    volt = {}
    for d in base.darts:
        volt[d.id] = (0,)
    return TowerSpec(base, GroupSpec(2, 1), volt)


# ---------------------------------------------------------------- reduce / order


def test_reduce_examples():
    assert reduce((5,), 1, 3) == (2,)
    assert reduce((-1,), 2, 2) == (3,)
    assert reduce((4, 6), 2, 2) == (0, 2)
    assert reduce((7, -3), 0, 5) == (0, 0)


def test_element_order_examples():
    assert element_order_in_layer((1,), 2, 3) == 9
    assert element_order_in_layer((3,), 2, 3) == 3
    assert element_order_brute((3,), 2, 3) == 3
    assert element_order_in_layer((0, 0, 0), 4, 2) == 1


@settings(max_examples=300, deadline=None)
@given(
    st.sampled_from([2, 3, 5]),
    st.integers(1, 3).flatmap(lambda d: st.lists(st.integers(-60, 60), min_size=d, max_size=d)),
    st.integers(0, 4),
)
def test_element_order_matches_brute_force(p, sigma, n):
    assert element_order_in_layer(sigma, n, p) == element_order_brute(sigma, n, p)


@settings(max_examples=300, deadline=None)
@given(
    st.sampled_from([2, 3, 5]),
    st.integers(1, 3).flatmap(lambda d: st.lists(st.integers(-200, 200), min_size=d, max_size=d)),
    st.integers(0, 5),
)
def test_order_multiplies_by_p(p, sigma, n):
    s_n = element_order_in_layer(sigma, n, p)
    if s_n != 1:
        assert element_order_in_layer(sigma, n + 1, p) == p * s_n


# ---------------------------------------------------------------- inertia images


def test_inertia_image_examples():
    for n in range(4):
        assert inertia_image([(1,)], n, 2, 1).coset_count == 1
    assert inertia_image([], 2, 3, 1).coset_count == 9
    assert inertia_image([], 2, 2, 2).coset_count == 16
    img = inertia_image([(2, 0)], 2, 2, 2)
    assert img.order == 2 and img.coset_count == 8
    with pytest.raises(TowerError):
        inertia_image([(1,)], 1, 2, 2)


gens_strategy = st.integers(1, 2).flatmap(
    lambda d: st.tuples(
        st.just(d),
        st.lists(st.lists(st.integers(-12, 12), min_size=d, max_size=d), max_size=3),
    )
)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3]), gens_strategy, st.integers(0, 3))
def test_inertia_image_against_enumeration(p, data, n):
    d, gens = data
    img = inertia_image(gens, n, p, d)
    span = span_oracle(gens, n, p, d)
    assert set(img.elements()) == span
    assert img.order == len(span)
    assert img.order * img.coset_count == p ** (n * d)
    q = p ** n
    reps = img.coset_representatives()
    assert len(reps) == img.coset_count
    # each representative is the lexicographically smallest member of its coset
    for r in reps[:20]:
        coset = {tuple((a + b) % q for a, b in zip(r, s)) for s in span}
        assert r == min(coset)
    for g in itertools.islice(itertools.product(range(q), repeat=d), 30):
        c = img.canonical(g)
        assert c in reps
        diff = tuple((a - b) % q for a, b in zip(g, c))
        assert diff in span


def test_stabilization_examples():
    assert stabilization_level([(1,)], 3) == 1
    assert stabilization_level([(3,)], 3) == 2
    assert stabilization_level([], 3) == 0
    assert inertia_p_rank([(3,)], 1, 3) == 0
    assert inertia_p_rank([(3,)], 2, 3) == 1


def test_canonical_generator_drops_units():
    assert canonical_generator([(5,)], 3) == (1,)
    assert canonical_generator([(6,)], 3) == (3,)
    assert canonical_generator([(2, 4), (1, 2)], 3) == (1, 2)
    assert canonical_generator([(1, 0), (0, 1)], 3) is None


def test_omega_norm_examples():
    assert omega_norm([(1,)], 1, 2, 1) == {(0,): 1, (1,): 1}
    assert omega_norm([], 3, 2, 1) == {(0,): 1}
    assert omega_norm([(2,)], 2, 2, 1) == {(0,): 1, (2,): 1}
    with pytest.raises(LevelError):
        omega_norm([(2,)], 1, 2, 1)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3]), gens_strategy, st.integers(0, 3))
def test_omega_term_count(p, data, extra):
    d, gens = data
    n = stabilization_level(gens, p) + extra
    if p ** (n * d) > 5000:
        return
    terms = omega_norm(gens, n, p, d)
    assert len(terms) * inertia_image(gens, n, p, d).coset_count == p ** (n * d)


# ---------------------------------------------------------------- layers


def test_hexagon_layer():
    layer = build_layer(corpus("unramified_triangle").spec, 1)
    g = layer.graph
    assert len(g.vertices) == 6 and g.num_edges == 6
    assert all(sum(1 for d in g.darts if d.origin == v) == 2 for v in g.vertices)
    assert is_connected(g)


def test_ramified_triangle_layer():
    g = build_layer(corpus("ramified_triangle").spec, 1).graph
    assert sorted(label(v) for v in g.vertices) == ["A[0]", "A[1]", "B[0]", "C[0]"]
    assert g.num_edges == 6


def test_layer_zero_is_base(all_specs):
    for sf in all_specs:
        g = build_layer(sf.spec, 0).graph
        base = sf.spec.base
        assert [v for v, _ in g.vertices] == list(base.vertices)
        assert sorted((e, d.origin[0], d.terminus[0]) for d in g.darts for e in [d.id[0]]) == sorted(
            (d.id, d.origin, d.terminus) for d in base.darts
        )


def test_layer_dart_counts(all_specs):
    for sf in all_specs:
        spec = sf.spec
        top = 3 if spec.d == 1 else 2
        for n in range(top + 1):
            g = build_layer(spec, n).graph
            assert validate(g) is None
            assert len(g.darts) == len(spec.base.darts) * spec.p ** (n * spec.d)


def test_guardrail():
    spec = corpus("z3sq_flower_tau").spec
    with pytest.raises(TowerError):
        build_layer(spec, 2, guard=10)


def test_flower_projection_labels():
    spec = corpus("flower_p3").spec
    f = projection(spec, 2, 1)
    assert f.is_valid() and f.is_surjective()
    assert f(("R", (0,))) == ("R", (0,))
    for k in range(3):
        for j in range(3):
            assert f(("U", (3 * k + j,))) == ("U", (j,))


def test_projection_same_level_is_identity():
    spec = corpus("ramified_triangle").spec
    layer = build_layer(spec, 2)
    f = projection(spec, layer, layer)
    ident = identity_morphism(layer.graph)
    assert f.vertex_map == ident.vertex_map and f.dart_map == ident.dart_map


def test_hexagon_projection_two_to_one():
    spec = corpus("unramified_triangle").spec
    f = projection(spec, 1, 0)
    assert f.is_valid()
    counts = {}
    for x in f.dart_map.values():
        counts[x] = counts.get(x, 0) + 1
    assert set(counts.values()) == {2}


def test_galois_examples():
    spec = corpus("unramified_triangle").spec
    hexagon = build_layer(spec, 1)
    swap = galois_act(hexagon, (1,))
    for v in "ABC":
        assert swap((v, (0,))) == (v, (1,)) and swap((v, (1,))) == (v, (0,))
    ident = galois_act(hexagon, (0,))
    assert all(ident(v) == v for v in hexagon.graph.vertices)
    ram = build_layer(corpus("ramified_triangle").spec, 1)
    act = galois_act(ram, (1,))
    assert act(("B", (0,))) == ("B", (0,)) and act(("C", (0,))) == ("C", (0,))
    assert act(("A", (0,))) == ("A", (1,))
    with pytest.raises(TowerError):
        galois_act(ram, (1, 0))


def test_galois_action_properties(all_specs):
    for sf in all_specs:
        spec = sf.spec
        n = 2 if spec.d == 1 else 1
        layer = build_layer(spec, n)
        lower = build_layer(spec, n - 1)
        down = projection(spec, layer, lower)
        to_base = projection(spec, layer, 0)
        elements = list(spec.group.elements(n))
        for g in elements:
            act = galois_act(layer, g)
            assert act.is_valid()
            assert to_base.compose(act).dart_map == to_base.dart_map
            assert to_base.compose(act).vertex_map == to_base.vertex_map
            if any(g):
                for d in layer.graph.darts:
                    assert act(d.id) != d.id and act(d.id) != d.partner
            lhs = down.compose(act)
            rhs = galois_act(lower, reduce(g, n - 1, spec.p)).compose(down)
            assert lhs.dart_map == rhs.dart_map and lhs.vertex_map == rhs.vertex_map
        rnd = random.Random(sf.spec.name)
        for _ in range(5):
            g, h = rnd.choice(elements), rnd.choice(elements)
            gh = tuple(a + b for a, b in zip(g, h))
            both = galois_act(layer, g).compose(galois_act(layer, h))
            assert both.dart_map == galois_act(layer, gh).dart_map


def test_vertex_count_examples():
    spec = corpus("flower_p3").spec
    assert vertex_count(spec, 1) == 4
    assert vertex_count(spec, 2) == 10
    free = corpus("unramified_triangle").spec
    assert vertex_count(free, 3) == 8 * 3
    with pytest.raises(LevelError):
        vertex_count(spec, 0)


def test_vertex_count_matches_layers(all_specs):
    for sf in all_specs:
        spec = sf.spec
        top = 3 if spec.d == 1 else 2
        for n in range(spec.stabilization_level(), top + 1):
            assert vertex_count(spec, n) == len(build_layer(spec, n).graph.vertices)


def test_connectivity_examples():
    spec = corpus("flower_p3").spec
    assert all(is_connected_layer(spec, n) for n in range(4))
    assert not is_connected_layer(zero_voltage_triangle(), 1)


def test_bouquet_layer_is_k5():
    g = build_layer(corpus("bouquet_k5").spec, 1).graph
    assert len(g.vertices) == 5
    pairs = sorted(tuple(sorted((d.origin, d.terminus))) for d in g.edges())
    assert all(a != b for a, b in pairs)
    assert len(pairs) == 10 and len(set(pairs)) == 10


def _assert_push_matches(spec, n):
    free, f = immersion_push(spec, n)
    target = build_layer(spec, n).graph
    assert f.is_valid() and f.is_surjective()
    assert f.target.vertices == target.vertices
    assert {d.id: (d.origin, d.terminus, d.partner) for d in f.target.darts} == {
        d.id: (d.origin, d.terminus, d.partner) for d in target.darts
    }
    return free, target


def test_immersion_push_examples():
    free, target = _assert_push_matches(corpus("ramified_triangle").spec, 1)
    assert len(free.graph.vertices) == 6 and len(target.vertices) == 4
    free, target = _assert_push_matches(corpus("ramified_triangle").spec, 2)
    assert len(free.graph.vertices) == 12 and len(target.vertices) == 6
    free, target = _assert_push_matches(corpus("unramified_triangle").spec, 2)
    assert free.graph.vertices == target.vertices


def test_immersion_push_corpus(all_specs):
    for sf in all_specs:
        _assert_push_matches(sf.spec, 1)
