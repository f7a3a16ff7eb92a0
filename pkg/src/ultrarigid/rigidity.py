"""Rigidity matrices of periodic frameworks and their ranks.

``build_S`` gives the rational matrix acting on vertex velocities and the
lattice deformation.  ``build_Shat`` gives the Laurent-monomial matrix whose
specialisations at torsion points govern the quasi-periodic motions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .core_model import Framework, GraphError, edge_vectors
from .cyclotomic import BadPrime, CycloContext, ModPContext, cyclo_context
from .numtheory import divisors

__all__ = [
    "RationalMatrix",
    "LaurentMatrix",
    "TorsionPoint",
    "build_S",
    "build_Shat",
    "evaluate_at",
    "evaluate_modp",
    "augment_fixed_volume",
    "rank_exact",
    "rank_modp",
    "rank_mod_matrix",
    "apply_affine",
    "enumerate_torsion",
]

Monomial = tuple[Fraction, tuple[int, ...]]


@dataclass(frozen=True)
class RationalMatrix:
    rows: tuple[tuple[Fraction, ...], ...]
    n_cols: int

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.n_cols

    def as_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class LaurentMatrix:
    """Sparse matrix of Laurent polynomials in ``x_1..x_d``.

    ``rows[i]`` maps a column index to a tuple of ``(coefficient, exponent)``
    terms.  Columns are vertex blocks of width ``dim``.
    """

    rows: tuple[dict[int, tuple[Monomial, ...]], ...]
    n_cols: int
    dim: int

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.n_cols

    def weight(self) -> int:
        """Largest l1-norm of an exponent in any entry, summed over rows."""
        total = 0
        for row in self.rows:
            total += max((sum(abs(e) for e in exp) for terms in row.values() for _, exp in terms),
                         default=0)
        return total


@dataclass(frozen=True, order=True)
class TorsionPoint:
    """The point ``(zeta_N^k_1, ..., zeta_N^k_d)`` with ``0 <= k_i < N``."""

    N: int
    k: tuple[int, ...]

    @property
    def order(self) -> int:
        g = self.N
        for a in self.k:
            g = math.gcd(g, a)
        return self.N // g

    @property
    def is_identity(self) -> bool:
        return not any(self.k)

    def reduced(self) -> "TorsionPoint":
        """Same point written with its exact order as denominator."""
        step = self.N // self.order
        return TorsionPoint(self.order, tuple(a // step for a in self.k))

    def as_fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.N) for a in self.k)

    def exponent(self, gamma: Sequence[int]) -> int:
        """``j`` with ``omega^gamma = zeta_N^j``."""
        return sum(a * g for a, g in zip(self.k, gamma)) % self.N


def enumerate_torsion(N: int, d: int, galois_reduced: bool = True) -> Iterator[TorsionPoint]:
    """Torsion points of order dividing ``N``, excluding the identity.

    The reduced enumeration only lets the first exponent run through the
    divisors of ``N`` (``N`` itself standing for exponent 0); every point is
    a Galois conjugate of one of these, and conjugate points give matrices
    of equal rank.  Points are produced in increasing lexicographic order
    of ``(first exponent as listed, remaining exponents)``.
    """
    if N < 1 or d < 1:
        raise ValueError("order and dimension must be positive")
    firsts = divisors(N) if galois_reduced else range(N)
    for k1 in firsts:
        k1 %= N
        for rest in itertools.product(range(N), repeat=d - 1):
            k = (k1,) + rest
            if any(k):
                yield TorsionPoint(N, k)


# --- construction -------------------------------------------------------------

def build_S(fw: Framework) -> RationalMatrix:
    """Rows ``-d`` at the tail block, ``+d`` at the head block, and
    ``gamma_k * d`` in the k-th lattice column group (``M`` flattened by
    columns).  Loops leave only the lattice part."""
    d, n = fw.dim, fw.graph.n_vertices
    n_cols = d * n + d * d
    rows = []
    for e, vec in zip(fw.graph.edges, edge_vectors(fw)):
        row = [Fraction(0)] * n_cols
        for r in range(d):
            row[e.tail * d + r] -= vec[r]
            row[e.head * d + r] += vec[r]
        for k in range(d):
            if e.color[k]:
                for r in range(d):
                    row[d * n + k * d + r] += e.color[k] * vec[r]
        rows.append(tuple(row))
    return RationalMatrix(tuple(rows), n_cols)


def build_Shat(fw: Framework) -> LaurentMatrix:
    """Rows ``-d`` at the tail block and ``d x^(-gamma)`` at the head block;
    a loop at ``i`` contributes ``d (x^(-gamma) - 1)`` to block ``i``."""
    d, n = fw.dim, fw.graph.n_vertices
    zero = (0,) * d
    rows = []
    for e, vec in zip(fw.graph.edges, edge_vectors(fw)):
        neg = tuple(-c for c in e.color)
        row: dict[int, tuple[Monomial, ...]] = {}
        for r in range(d):
            if vec[r] == 0:
                continue
            if e.is_loop:
                if neg != zero:
                    row[e.tail * d + r] = ((vec[r], neg), (-vec[r], zero))
            else:
                row[e.tail * d + r] = ((-vec[r], zero),)
                row[e.head * d + r] = ((vec[r], neg),)
        rows.append(row)
    return LaurentMatrix(tuple(rows), d * n, d)


def augment_fixed_volume(S: RationalMatrix, fw: Framework) -> RationalMatrix:
    """Append the row of ``M -> trace(L^-1 M)`` on the lattice columns."""
    d, n = fw.dim, fw.graph.n_vertices
    inv = _inverse([list(r) for r in fw.lattice])
    row = [Fraction(0)] * S.n_cols
    for k in range(d):
        for r in range(d):
            row[d * n + k * d + r] = inv[k][r]
    return RationalMatrix(S.rows + (tuple(row),), S.n_cols)


def _inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise GraphError("lattice matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


# --- specialisation -----------------------------------------------------------

def evaluate_at(Shat: LaurentMatrix, point: TorsionPoint, ctx: CycloContext | None = None):
    """Entries of ``Shat`` at ``point`` as elements of Q(zeta_N)."""
    ctx = ctx or cyclo_context(point.N)
    zero = ctx.zero()
    out = []
    for row in Shat.rows:
        vals = [zero] * Shat.n_cols
        for col, terms in row.items():
            acc = zero
            for coeff, exp in terms:
                acc = acc + ctx.monomial(coeff, point.exponent(exp))
            vals[col] = acc
        out.append(vals)
    return out


def evaluate_modp(Shat: LaurentMatrix, point: TorsionPoint, mp: ModPContext) -> list[list[int]]:
    p = mp.p
    step = mp.n // point.N if mp.n % point.N == 0 else None
    if step is None:
        raise ValueError("the prime context does not contain the point's roots of unity")
    out = []
    for row in Shat.rows:
        vals = [0] * Shat.n_cols
        for col, terms in row.items():
            acc = 0
            for coeff, exp in terms:
                acc += mp.reduce(coeff) * mp.zeta_pow(point.exponent(exp) * step)
            vals[col] = acc % p
        out.append(vals)
    return out


# --- ranks --------------------------------------------------------------------

def _pivot_cost(x) -> int:
    if isinstance(x, Fraction):
        return x.numerator.bit_length() + x.denominator.bit_length()
    support = getattr(x, "support", None)
    return support if support is not None else 0


def rank_exact(rows: Sequence[Sequence], cost: Callable | None = None) -> int:
    """Rank over the field of the entries (``Fraction`` or ``CycloNumber``).

    Gaussian elimination choosing, in each column, the simplest available
    pivot to keep coefficient growth down.
    """
    if isinstance(rows, RationalMatrix):
        rows = rows.rows
    cost = cost or _pivot_cost
    work = [list(r) for r in rows]
    if not work:
        return 0
    n_cols = len(work[0])
    rank = 0
    for c in range(n_cols):
        live = [i for i in range(rank, len(work)) if work[i][c]]
        if not live:
            continue
        best = min(live, key=lambda i: cost(work[i][c]))
        work[rank], work[best] = work[best], work[rank]
        pivot_row = work[rank]
        inv = 1 / pivot_row[c]
        for i in range(rank + 1, len(work)):
            x = work[i][c]
            if x:
                f = x * inv
                row = work[i]
                for j in range(c, n_cols):
                    if pivot_row[j]:
                        row[j] = row[j] - f * pivot_row[j]
        rank += 1
        if rank == len(work):
            break
    return rank


def rank_mod_matrix(rows: Sequence[Sequence[int]], p: int) -> int:
    work = [[x % p for x in r] for r in rows]
    if not work:
        return 0
    n_cols = len(work[0])
    rank = 0
    for c in range(n_cols):
        piv = next((i for i in range(rank, len(work)) if work[i][c]), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        prow = work[rank]
        inv = pow(prow[c], -1, p)
        for i in range(rank + 1, len(work)):
            x = work[i][c]
            if x:
                f = x * inv % p
                row = work[i]
                for j in range(c, n_cols):
                    if prow[j]:
                        row[j] = (row[j] - f * prow[j]) % p
        rank += 1
        if rank == len(work):
            break
    return rank


def rank_modp(Shat: LaurentMatrix, point: TorsionPoint, mp: ModPContext) -> int:
    """Rank of ``Shat`` at ``point`` after reduction mod ``mp.p``.

    Never exceeds the exact rank over Q(zeta_N).  Raises ``BadPrime`` when
    a coefficient denominator vanishes mod p.
    """
    return rank_mod_matrix(evaluate_modp(Shat, point, mp), mp.p)


def apply_affine(dvecs: Sequence[Sequence], matrix: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Apply the linear part of an affine map to every edge vector."""
    return [tuple(sum(Fraction(matrix[r][c]) * v[c] for c in range(len(v))) for r in range(len(matrix)))
            for v in dvecs]


__all__ += ["BadPrime"]
