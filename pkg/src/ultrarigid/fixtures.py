"""Small reference frameworks with known behaviour."""

from __future__ import annotations

from fractions import Fraction

from .core_model import ColoredGraph, Framework

__all__ = [
    "square_lattice",
    "three_loop",
    "two_vertex_fixed",
    "one_vertex_rank_one_loops",
    "pulled_tight",
]

_IDENTITY = ((1, 0), (0, 1))


def square_lattice(lattice=_IDENTITY) -> Framework:
    """One vertex with loops along the two lattice directions."""
    g = ColoredGraph.build(2, 1, [(0, 0, (1, 0)), (0, 0, (0, 1))], labels=["a"])
    return Framework(g, ((0, 0),), lattice)


def three_loop(lattice=_IDENTITY) -> Framework:
    """One vertex with loops (1,0), (0,1) and (1,1)."""
    g = ColoredGraph.build(2, 1, [(0, 0, (1, 0)), (0, 0, (0, 1)), (0, 0, (1, 1))], labels=["a"])
    return Framework(g, ((0, 0),), lattice)


def two_vertex_fixed() -> Framework:
    """Two vertices joined by four edges colored (0,0), (1,0), (0,1), (1,1)."""
    g = ColoredGraph.build(2, 2, [(0, 1, (0, 0)), (0, 1, (1, 0)), (0, 1, (0, 1)), (0, 1, (1, 1))],
                           labels=["a", "b"])
    return Framework(g, ((0, 0), (Fraction(1, 3), Fraction(1, 7))), ((1, 0), (Fraction(1, 5), 1)))


def one_vertex_rank_one_loops() -> Framework:
    """One vertex, loops (1,0), (2,0), (0,1): not colored-Laman."""
    g = ColoredGraph.build(2, 1, [(0, 0, (1, 0)), (0, 0, (2, 0)), (0, 0, (0, 1))], labels=["a"])
    return Framework(g, ((0, 0),), _IDENTITY)


def pulled_tight() -> Framework:
    """One vertex with loops (1,0) and (0,1) in a generic lattice.

    With the lattice fixed it flexes at the order-2 point ``(1, -1)``, and
    the combinatorial check names the epimorphism "second coordinate mod 2"
    as the obstruction.
    """
    lattice = ((Fraction(7, 5), Fraction(-2, 9)), (Fraction(3, 11), Fraction(13, 8)))
    g = ColoredGraph.build(2, 1, [(0, 0, (1, 0)), (0, 0, (0, 1))], labels=["a"])
    return Framework(g, ((Fraction(1, 2), Fraction(1, 3)),), lattice)
