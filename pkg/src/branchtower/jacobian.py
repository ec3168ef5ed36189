"""Laplacians, Picard and Jacobian groups, and spanning-tree counts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import intlinalg
from .graph import Graph, GraphError, is_connected
from .intlinalg import AbelianGroupPresentation
from .tower import ord_p  # noqa: F401  (re-exported)


class DisconnectedGraphError(GraphError):
    pass


@dataclass(frozen=True)
class Divisor:
    """Finitely supported integer combination of vertices."""

    coeffs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", {v: int(c) for v, c in self.coeffs.items() if c})

    @property
    def degree(self) -> int:
        return sum(self.coeffs.values())

    def __getitem__(self, v) -> int:
        return self.coeffs.get(v, 0)

    def __add__(self, other: "Divisor") -> "Divisor":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, 0) + c
        return Divisor(out)

    def __neg__(self) -> "Divisor":
        return Divisor({v: -c for v, c in self.coeffs.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def vector(self, vertices) -> list[int]:
        index = set(vertices)
        for v in self.coeffs:
            if v not in index:
                raise GraphError(f"divisor supported on unknown vertex {v!r}")
        return [self.coeffs.get(v, 0) for v in vertices]

    @classmethod
    def from_vector(cls, vertices, vec) -> "Divisor":
        return cls({v: c for v, c in zip(vertices, vec)})


def laplacian(g: Graph) -> list[list[int]]:
    """D − A in the vertex order of ``g``; column v is the principal divisor of v."""
    idx = g.vertex_index
    n = len(g.vertices)
    lap = [[0] * n for _ in range(n)]
    for d in g.darts:
        u, w = idx[d.origin], idx[d.terminus]
        if u == w:
            continue
        lap[u][u] += 1
        lap[w][u] -= 1
    return lap


def reduced_laplacian(g: Graph, drop: int = 0) -> list[list[int]]:
    lap = laplacian(g)
    return [row[:drop] + row[drop + 1:] for i, row in enumerate(lap) if i != drop]


def _require_connected(g: Graph) -> None:
    if not is_connected(g):
        raise DisconnectedGraphError("graph is not connected")


def kappa(g: Graph, method: str = "bareiss") -> int:
    """Number of spanning trees, via two different principal minors."""
    _require_connected(g)
    n = len(g.vertices)
    if n == 1:
        return 1
    a = intlinalg.determinant(reduced_laplacian(g, 0), method)
    b = intlinalg.determinant(reduced_laplacian(g, n - 1), method)
    if a != b:
        raise ArithmeticError(f"principal minors disagree: {a} vs {b}")
    return a


def picard_invariants(g: Graph) -> AbelianGroupPresentation:
    """Cokernel of the full Laplacian."""
    if not g.vertices:
        return AbelianGroupPresentation((), 0)
    return intlinalg.cokernel(laplacian(g))


FULL_COKERNEL_LIMIT = 150


def jacobian_invariants(g: Graph, fast: bool | None = None) -> AbelianGroupPresentation:
    """Torsion of the Laplacian cokernel.

    By default the full Laplacian is used (its free rank of 1 doubles as a
    connectivity check) up to ``FULL_COKERNEL_LIMIT`` vertices.  With ``fast``
    the Smith form is taken modulo κ on the reduced Laplacian, which has the
    same torsion.
    """
    _require_connected(g)
    if fast is None:
        fast = len(g.vertices) > FULL_COKERNEL_LIMIT
    if fast and len(g.vertices) > 1:
        red = reduced_laplacian(g)
        k = kappa(g)
        diag = intlinalg.elementary_divisors_nonsingular(red, k)
        jac = AbelianGroupPresentation(tuple(x for x in diag if x > 1), 0)
    else:
        pic = picard_invariants(g)
        if pic.free_rank != 1:
            raise DisconnectedGraphError(f"Picard free rank {pic.free_rank} != 1")
        jac = pic.torsion()
        k = kappa(g)
    if jac.torsion_order != k:
        raise ArithmeticError(f"|Jac| = {jac.torsion_order} but kappa = {k}")
    return jac


def principal_divisor(g: Graph, v) -> Divisor:
    lap = laplacian(g)
    j = g.vertex_index[v]
    return Divisor.from_vector(g.vertices, [row[j] for row in lap])


def is_principal(g: Graph, div: Divisor) -> bool:
    """Whether ``div`` lies in the span of principal divisors."""
    return intlinalg.in_column_span(laplacian(g), div.vector(g.vertices))
