import itertools
from pathlib import Path

import pytest

from branchtower.graph import Graph, simple_graph
from branchtower.specio import corpus_files, load_spec

CORPUS = Path(__file__).resolve().parents[1] / "src" / "branchtower" / "corpus"


def corpus(name):
    return load_spec(CORPUS / f"{name}.json")


@pytest.fixture(scope="session")
def all_specs():
    return [load_spec(f) for f in corpus_files(CORPUS)]


def count_spanning_trees(g: Graph) -> int:
    """Brute force: every (|V|-1)-subset of edges that forms no cycle."""
    verts = list(g.vertices)
    edges = [(d.origin, d.terminus) for d in g.edges()]
    need = len(verts) - 1
    total = 0
    for combo in itertools.combinations(range(len(edges)), need):
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for k in combo:
            a, b = find(edges[k][0]), find(edges[k][1])
            if a == b:
                ok = False
                break
            parent[a] = b
        total += ok
    return total


def cycle_graph(m: int) -> Graph:
    return simple_graph(m, [(i, (i + 1) % m) for i in range(m)])


def complete_graph(m: int) -> Graph:
    return simple_graph(m, list(itertools.combinations(range(m), 2)))


def networkx_rotation(g: Graph):
    """Planar rotation system of a simple graph, from networkx's planarity test (None if non-planar)."""
    import networkx as nx

    from branchtower.planar import Embedding, RotationSystem

    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    dart_between = {}
    for d in g.darts:
        h.add_edge(d.origin, d.terminus)
        dart_between[(d.origin, d.terminus)] = d.id
    ok, emb = nx.check_planarity(h)
    if not ok:
        return None
    cycles = {v: [dart_between[(v, w)] for w in emb.neighbors_cw_order(v)] for v in g.vertices}
    return Embedding(g, RotationSystem(cycles))
