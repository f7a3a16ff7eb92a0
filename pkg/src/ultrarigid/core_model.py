"""Colored quotient graphs, periodic frameworks and their edge vectors.

A periodic framework is encoded by a finite multigraph whose edges carry
integer colors in Z^d, rational positions for the vertices and a rational
lattice matrix ``L`` whose columns are the images of the standard basis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .numtheory import hermite_basis, subgroup_index

__all__ = [
    "Edge",
    "ColoredGraph",
    "Framework",
    "SubgroupDescription",
    "CyclicColoredGraph",
    "GraphError",
    "validate",
    "rho_image",
    "cycle_values",
    "subgraph_structure",
    "elementary_color_change",
    "color_change_framework",
    "reverse_edge",
    "normalize_orientation",
    "push_colors",
    "edge_vectors",
    "transform_framework",
    "random_realization",
    "total_weight",
]

Vector = tuple[int, ...]
RationalVector = tuple[Fraction, ...]


class GraphError(ValueError):
    """Malformed colored graph or framework data."""


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    color: Vector

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    def reversed(self) -> "Edge":
        return Edge(self.head, self.tail, tuple(-c for c in self.color))


@dataclass(frozen=True)
class ColoredGraph:
    """A Z^d-colored multigraph on vertices ``0..n_vertices-1``.

    Loops and parallel edges are allowed.  Vertex labels from input files
    are kept in ``labels`` for reporting only.
    """

    dim: int
    n_vertices: int
    edges: tuple[Edge, ...]
    labels: tuple[str, ...] | None = None

    @classmethod
    def build(cls, dim: int, n_vertices: int, edges: Iterable[Sequence],
              labels: Sequence[str] | None = None) -> "ColoredGraph":
        """Construct from ``(tail, head, color)`` triples and validate."""
        parsed = tuple(Edge(int(t), int(h), tuple(int(c) for c in col)) for t, h, col in edges)
        graph = cls(dim, n_vertices, parsed, tuple(labels) if labels is not None else None)
        problems = validate(graph)
        if problems:
            raise GraphError(problems[0])
        return graph

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    def with_edges(self, edges: Iterable[Edge]) -> "ColoredGraph":
        return ColoredGraph(self.dim, self.n_vertices, tuple(edges), self.labels)

    def subgraph(self, edge_indices: Iterable[int]) -> "ColoredGraph":
        return self.with_edges(self.edges[i] for i in edge_indices)

    def vertices_touched(self, edge_indices: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for i in edge_indices:
            e = self.edges[i]
            out.add(e.tail)
            out.add(e.head)
        return out


def total_weight(graph: ColoredGraph) -> int:
    """Sum of the l1-norms of all edge colors."""
    return sum(sum(abs(c) for c in e.color) for e in graph.edges)


def validate(graph: ColoredGraph) -> list[str]:
    """Problems with ``graph``, first malformed edge first; empty when valid."""
    problems = []
    if graph.dim < 1:
        problems.append(f"dimension must be positive, got {graph.dim}")
    if graph.n_vertices < 1:
        problems.append("a colored graph needs at least one vertex")
    if graph.labels is not None and len(graph.labels) != graph.n_vertices:
        problems.append("number of vertex labels does not match vertex count")
    for idx, e in enumerate(graph.edges):
        for end in (e.tail, e.head):
            if not 0 <= end < graph.n_vertices:
                problems.append(f"edge {idx}: endpoint {end} is not a vertex")
        if len(e.color) != graph.dim:
            problems.append(f"edge {idx}: color {e.color} does not have dimension {graph.dim}")
    return problems


@dataclass(frozen=True)
class SubgroupDescription:
    """A subgroup of Z^d: its rank, canonical Hermite basis, and index.

    ``index`` is ``None`` when the subgroup has infinite index.
    """

    dim: int
    rank: int
    basis: tuple[Vector, ...]
    index: int | None

    @property
    def is_full(self) -> bool:
        return self.index == 1

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0

    def contains(self, v: Sequence[int]) -> bool:
        return hermite_basis(list(self.basis) + [tuple(v)], self.dim) == list(self.basis)

    @classmethod
    def generated_by(cls, vectors: Iterable[Sequence[int]], dim: int) -> "SubgroupDescription":
        vecs = [tuple(v) for v in vectors if any(v)]
        basis = tuple(hermite_basis(vecs, dim))
        index = subgroup_index(vecs, dim) if len(basis) == dim else None
        return cls(dim=dim, rank=len(basis), basis=basis, index=index)


def _spanning_potentials(graph: ColoredGraph, edge_indices: Sequence[int]):
    """Potentials on a spanning forest and the non-forest edges.

    Along a forest edge ``tail -> head`` with color ``g`` the potential
    grows by ``g``; a non-forest edge then closes a cycle whose net color is
    ``pot[tail] + g - pot[head]``.
    """
    adjacency: dict[int, list[tuple[int, int, int]]] = {}
    for i in edge_indices:
        e = graph.edges[i]
        adjacency.setdefault(e.tail, []).append((i, e.head, 1))
        adjacency.setdefault(e.head, []).append((i, e.tail, -1))
    pot: dict[int, Vector] = {}
    tree: set[int] = set()
    zero = (0,) * graph.dim
    for root in sorted(adjacency):
        if root in pot:
            continue
        pot[root] = zero
        stack = [root]
        while stack:
            v = stack.pop()
            for i, w, sign in adjacency[v]:
                if w in pot:
                    continue
                col = graph.edges[i].color
                pot[w] = tuple(a + sign * c for a, c in zip(pot[v], col))
                tree.add(i)
                stack.append(w)
    others = [i for i in edge_indices if i not in tree]
    return pot, others


def cycle_values(graph: ColoredGraph, edge_indices: Sequence[int] | None = None) -> list[Vector]:
    """Net colors of the fundamental cycles of the chosen edges."""
    if edge_indices is None:
        edge_indices = range(graph.n_edges)
    edge_indices = list(edge_indices)
    pot, others = _spanning_potentials(graph, edge_indices)
    out = []
    for i in others:
        e = graph.edges[i]
        out.append(tuple(a + g - b for a, g, b in zip(pot[e.tail], e.color, pot[e.head])))
    return out


def subgraph_structure(graph: ColoredGraph, edge_indices: Sequence[int]) -> tuple[int, int, list[Vector]]:
    """``(vertices touched, connected components, fundamental cycle values)``."""
    edge_indices = list(edge_indices)
    pot, others = _spanning_potentials(graph, edge_indices)
    n_tree = len(edge_indices) - len(others)
    cycles = []
    for i in others:
        e = graph.edges[i]
        cycles.append(tuple(a + g - b for a, g, b in zip(pot[e.tail], e.color, pot[e.head])))
    return len(pot), len(pot) - n_tree, cycles


def rho_image(graph: ColoredGraph, edge_indices: Sequence[int] | None = None) -> SubgroupDescription:
    """Subgroup of Z^d generated by the net colors of all cycles."""
    vals = cycle_values(graph, edge_indices)
    return SubgroupDescription.generated_by(vals, graph.dim)


def elementary_color_change(graph: ColoredGraph, vertex: int, shift: Sequence[int]) -> ColoredGraph:
    """Shift the colors around ``vertex``: edges into it lose ``shift``,
    edges out of it gain ``shift``, loops stay as they are."""
    shift = tuple(int(s) for s in shift)
    if len(shift) != graph.dim:
        raise GraphError("shift has the wrong dimension")
    if not 0 <= vertex < graph.n_vertices:
        raise GraphError(f"{vertex} is not a vertex")
    new = []
    for e in graph.edges:
        if e.is_loop:
            new.append(e)
        elif e.head == vertex:
            new.append(Edge(e.tail, e.head, tuple(c - s for c, s in zip(e.color, shift))))
        elif e.tail == vertex:
            new.append(Edge(e.tail, e.head, tuple(c + s for c, s in zip(e.color, shift))))
        else:
            new.append(e)
    return graph.with_edges(new)


def reverse_edge(graph: ColoredGraph, index: int) -> ColoredGraph:
    edges = list(graph.edges)
    edges[index] = edges[index].reversed()
    return graph.with_edges(edges)


def normalize_orientation(graph: ColoredGraph) -> ColoredGraph:
    """Equivalent graph with ``tail <= head`` on every edge and loop colors
    lexicographically non-negative."""
    out = []
    for e in graph.edges:
        if e.tail > e.head or (e.is_loop and e.color < tuple(0 for _ in e.color)):
            e = e.reversed()
        out.append(e)
    return graph.with_edges(out)


@dataclass(frozen=True)
class CyclicColoredGraph:
    """A multigraph colored by the cyclic group Z/N."""

    modulus: int
    n_vertices: int
    edges: tuple[tuple[int, int, int], ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)


def push_colors(graph: ColoredGraph, psi: Sequence[int], modulus: int) -> CyclicColoredGraph:
    """Apply the homomorphism ``g -> <psi, g> mod N``; it must be onto Z/N."""
    from math import gcd

    if len(psi) != graph.dim:
        raise GraphError("epimorphism has the wrong dimension")
    g = modulus
    for a in psi:
        g = gcd(g, a)
    if g != 1:
        raise GraphError(f"{tuple(psi)} does not map onto Z/{modulus}")
    edges = tuple(
        (e.tail, e.head, sum(a * c for a, c in zip(psi, e.color)) % modulus) for e in graph.edges
    )
    return CyclicColoredGraph(modulus, graph.n_vertices, edges)


# --- frameworks ------------------------------------------------------------

def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise GraphError("floating point coordinates are not accepted")
    return Fraction(x)


@dataclass(frozen=True)
class Framework:
    """Colored graph plus rational positions and a rational lattice matrix.

    ``lattice[r][c]`` is row ``r``, column ``c`` of ``L``; the edge vector of
    ``i -> j`` with color ``g`` is ``p_j - p_i + L g``.
    """

    graph: ColoredGraph
    positions: tuple[RationalVector, ...]
    lattice: tuple[RationalVector, ...]
    model: str | None = field(default=None, compare=False)

    def __post_init__(self):
        d = self.graph.dim
        object.__setattr__(self, "positions",
                           tuple(tuple(_as_fraction(x) for x in p) for p in self.positions))
        object.__setattr__(self, "lattice",
                           tuple(tuple(_as_fraction(x) for x in row) for row in self.lattice))
        problems = validate(self.graph)
        if problems:
            raise GraphError(problems[0])
        if len(self.positions) != self.graph.n_vertices:
            raise GraphError("one position per vertex is required")
        if any(len(p) != d for p in self.positions):
            raise GraphError("positions must have the graph's dimension")
        if len(self.lattice) != d or any(len(row) != d for row in self.lattice):
            raise GraphError(f"lattice must be a {d}x{d} matrix")

    @property
    def dim(self) -> int:
        return self.graph.dim

    def lattice_times(self, color: Sequence[int]) -> RationalVector:
        return tuple(sum(row[c] * color[c] for c in range(self.dim)) for row in self.lattice)

    def with_graph(self, graph: ColoredGraph) -> "Framework":
        return Framework(graph, self.positions, self.lattice, self.model)


def edge_vectors(fw: Framework) -> list[RationalVector]:
    out = []
    for e in fw.graph.edges:
        shift = fw.lattice_times(e.color)
        out.append(tuple(fw.positions[e.head][r] - fw.positions[e.tail][r] + shift[r]
                         for r in range(fw.dim)))
    return out


def color_change_framework(fw: Framework, vertex: int, shift: Sequence[int]) -> Framework:
    """Elementary color change that also moves ``vertex`` by ``L shift``,
    so that every edge vector stays the same."""
    graph = elementary_color_change(fw.graph, vertex, shift)
    moved = fw.lattice_times(shift)
    positions = list(fw.positions)
    positions[vertex] = tuple(a + b for a, b in zip(positions[vertex], moved))
    return Framework(graph, tuple(positions), fw.lattice, fw.model)


def transform_framework(fw: Framework, matrix: Sequence[Sequence]) -> Framework:
    """Image of ``fw`` under the linear map ``matrix``; every edge vector
    is mapped by the same matrix."""
    d = fw.dim
    a = [[_as_fraction(x) for x in row] for row in matrix]

    def apply(v):
        return tuple(sum(a[r][c] * v[c] for c in range(d)) for r in range(d))

    positions = tuple(apply(p) for p in fw.positions)
    lattice_cols = [apply(tuple(fw.lattice[r][c] for r in range(d))) for c in range(d)]
    lattice = tuple(tuple(lattice_cols[c][r] for c in range(d)) for r in range(d))
    return Framework(fw.graph, positions, lattice, fw.model)


def random_realization(graph: ColoredGraph, rng: random.Random | None = None,
                       bits: int = 64, integral_lattice: bool = False) -> Framework:
    """Framework with random rational positions and a random lattice.

    Coordinates are fractions with ``bits``-bit numerators over a shared
    random denominator, so degenerate coincidences are negligible.
    """
    rng = rng or random.Random()
    d = graph.dim

    def rnd() -> Fraction:
        return Fraction(rng.randrange(-(1 << bits), 1 << bits), rng.randrange(1, 1 << 16))

    positions = tuple(tuple(rnd() for _ in range(d)) for _ in range(graph.n_vertices))
    while True:
        if integral_lattice:
            lattice = tuple(tuple(Fraction(rng.randrange(-(1 << bits), 1 << bits)) for _ in range(d))
                            for _ in range(d))
        else:
            lattice = tuple(tuple(rnd() for _ in range(d)) for _ in range(d))
        if _determinant([list(r) for r in lattice]) != 0:
            break
    return Framework(graph, positions, lattice)


def _determinant(m: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det
