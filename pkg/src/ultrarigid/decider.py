"""Deciding infinitesimal ultrarigidity of a rational periodic framework.

The decision has two stages.  A base rank test on the rational rigidity
matrix settles periodic rigidity.  Then the Laurent matrix is checked for
full rank at every torsion point whose order is at most the bound ``N0``;
orders whose totient is too large for a deficiency are skipped.

Two scan engines are available and report identical verdicts:

``pointwise``
    reduce the matrix at each point modulo a 62-bit prime, and confirm
    any rank drop exactly over Q(zeta_N).
``batched``
    expand a random integer combination of the maximal minors once, then
    evaluate it at all points of order ``N`` together with numpy over a
    small prime.  Only its zeros are examined further, with the pointwise
    procedure.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .core_model import ColoredGraph, Edge, Framework, edge_vectors, total_weight, _spanning_potentials
from .cyclotomic import BadPrime, cyclo_context, find_modp_context
from .numtheory import Bound, bound_N0, divisors, phi_filter
from .rigidity import (
    LaurentMatrix,
    TorsionPoint,
    augment_fixed_volume,
    build_S,
    enumerate_torsion,
    evaluate_at,
    evaluate_modp,
    rank_exact,
    rank_mod_matrix,
)

__all__ = [
    "Model",
    "VerdictKind",
    "Witness",
    "Verdict",
    "BoundTooLarge",
    "decide",
    "base_rank",
    "laurent_matrix",
    "exact_rank_at",
    "rum_rational_spectrum",
    "reduce_weight",
    "DEFAULT_MAX_BOUND",
]

DEFAULT_MAX_BOUND = 10**6
THREADS_ENV = "ULTRARIGID_THREADS"

# batched engine parameters
_SMALL_PRIME_BITS = 28
_MAX_MINORS = 4096
_CHUNK = 48


class Model(str, Enum):
    FLEXIBLE = "flexible"
    FIXED_LATTICE = "fixed-lattice"
    FIXED_VOLUME = "fixed-volume"


class VerdictKind(str, Enum):
    ULTRARIGID = "Ultrarigid"
    NOT_PERIODICALLY_RIGID = "NotPeriodicallyRigid"
    TORSION_FLEXIBLE = "TorsionFlexible"


class BoundTooLarge(RuntimeError):
    """The torsion-order bound exceeds the configured ceiling."""


@dataclass(frozen=True)
class Witness:
    point: TorsionPoint
    rank: int
    full_rank: int

    @property
    def nullity(self) -> int:
        return self.full_rank - self.rank

    def as_dict(self) -> dict:
        return {
            "N": self.point.N,
            "k": list(self.point.k),
            "order": self.point.order,
            "omega": [str(f) for f in self.point.as_fractions()],
            "rank": self.rank,
            "nullity": self.nullity,
        }


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    model: Model
    base_rank: int
    base_required: int
    bound: Bound | None = None
    witness: Witness | None = None
    orders_checked: int = 0
    orders_skipped: int = 0
    points_checked: int = 0
    order_limit: int | None = None
    engine: str = ""
    weight: int = 0

    @property
    def is_ultrarigid(self) -> bool:
        return self.kind is VerdictKind.ULTRARIGID

    @property
    def skip_fraction(self) -> float:
        total = self.orders_checked + self.orders_skipped
        return self.orders_skipped / total if total else 0.0

    def as_dict(self) -> dict:
        return {
            "verdict": self.kind.value,
            "model": self.model.value,
            "base_rank": self.base_rank,
            "base_rank_required": self.base_required,
            "D": self.weight,
            "bound": self.bound.as_dict() if self.bound else None,
            "order_limit": self.order_limit,
            "witness": self.witness.as_dict() if self.witness else None,
            "orders_checked": self.orders_checked,
            "orders_skipped": self.orders_skipped,
            "points_checked": self.points_checked,
            "engine": self.engine,
        }


# --- matrices ---------------------------------------------------------------

def laurent_matrix(graph: ColoredGraph, dvecs: Sequence[Sequence[Fraction]]) -> LaurentMatrix:
    """Laurent rigidity matrix for given colors and edge vectors.

    The edge vectors need not come from the colors of ``graph``; this is
    what lets a color change keep the original vectors.
    """
    d = graph.dim
    zero = (0,) * d
    rows = []
    for e, vec in zip(graph.edges, dvecs):
        neg = tuple(-c for c in e.color)
        row = {}
        for r in range(d):
            if vec[r] == 0:
                continue
            if e.is_loop:
                if neg != zero:
                    row[e.tail * d + r] = ((Fraction(vec[r]), neg), (-Fraction(vec[r]), zero))
            else:
                row[e.tail * d + r] = ((-Fraction(vec[r]), zero),)
                row[e.head * d + r] = ((Fraction(vec[r]), neg),)
        rows.append(row)
    return LaurentMatrix(tuple(rows), d * graph.n_vertices, d)


def base_rank(fw: Framework, model: Model) -> tuple[int, int]:
    """``(rank, required rank)`` of the base test for ``model``."""
    d, n = fw.dim, fw.graph.n_vertices
    if model is Model.FIXED_LATTICE:
        identity = TorsionPoint(1, (0,) * d)
        rows = [[c.coeffs[0] for c in row] for row in evaluate_at(laurent_matrix(fw.graph, edge_vectors(fw)), identity)]
        return rank_exact(rows), d * n - d
    S = build_S(fw)
    if model is Model.FIXED_VOLUME:
        S = augment_fixed_volume(S, fw)
    return rank_exact(S), d * n + d * (d - 1) // 2


def exact_rank_at(Shat: LaurentMatrix, point: TorsionPoint) -> int:
    return rank_exact(evaluate_at(Shat, point))


# --- gauge reduction -----------------------------------------------------------

def _regauge(graph: ColoredGraph, pot: dict[int, tuple[int, ...]]) -> ColoredGraph:
    zero = (0,) * graph.dim
    out = []
    for e in graph.edges:
        a, b = pot.get(e.tail, zero), pot.get(e.head, zero)
        out.append(Edge(e.tail, e.head, tuple(g + x - y for g, x, y in zip(e.color, a, b))))
    return graph.with_edges(out)


def reduce_weight(graph: ColoredGraph) -> ColoredGraph:
    """A color-equivalent graph of small total weight.

    Tries the gauges that zero out a spanning forest grown from each
    vertex, then improves by unit shifts at single vertices while the
    total weight decreases.  Per-point ranks of the Laurent matrix are
    unchanged by any such recoloring.
    """
    best = graph
    best_w = total_weight(graph)
    order = list(range(graph.n_edges))
    for root in range(graph.n_vertices):
        rotated = sorted(order, key=lambda i: (graph.edges[i].tail != root and graph.edges[i].head != root, i))
        pot, _ = _spanning_potentials(graph, rotated)
        cand = _regauge(graph, pot)
        w = total_weight(cand)
        if w < best_w:
            best, best_w = cand, w
    units = []
    for i in range(graph.dim):
        for s in (1, -1):
            units.append(tuple(s if j == i else 0 for j in range(graph.dim)))
    improved = True
    while improved:
        improved = False
        for v in range(graph.n_vertices):
            for u in units:
                cand = _regauge(best, {v: u})
                w = total_weight(cand)
                if w < best_w:
                    best, best_w, improved = cand, w, True
    return best


# --- integer minors -----------------------------------------------------------

def _integer_rows(Shat: LaurentMatrix) -> list[dict[int, dict[tuple[int, ...], int]]]:
    """Rows scaled by the lcm of their denominators (rank is unchanged)."""
    out = []
    for row in Shat.rows:
        den = 1
        for terms in row.values():
            for c, _ in terms:
                den = den * c.denominator // math.gcd(den, c.denominator)
        scaled = {}
        for col, terms in row.items():
            poly: dict[tuple[int, ...], int] = {}
            for c, exp in terms:
                poly[exp] = poly.get(exp, 0) + int(c * den)
            poly = {e: v for e, v in poly.items() if v}
            if poly:
                scaled[col] = poly
        out.append(scaled)
    return out


def _poly_mul_add(acc: dict, a: dict, b: dict, sign: int) -> None:
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = acc.get(e, 0) + sign * ca * cb
            if v:
                acc[e] = v
            else:
                acc.pop(e, None)


def _maximal_minors(rows: list[dict], n_cols: int, dim: int) -> dict[int, dict]:
    """All nonzero ``n_cols x n_cols`` minors, keyed by the row bitmask.

    Dynamic programming over columns: a state is the set of rows already
    assigned, holding the signed sum of all partial products.  Placing row
    ``r`` in the next column flips the sign once per used row above ``r``.
    """
    states: dict[int, dict] = {0: {(0,) * dim: 1}}
    m = len(rows)
    for c in range(n_cols):
        nxt: dict[int, dict] = {}
        for mask, poly in states.items():
            for r in range(m):
                if mask >> r & 1:
                    continue
                entry = rows[r].get(c)
                if entry is None:
                    continue
                sign = -1 if bin(mask >> (r + 1)).count("1") % 2 else 1
                acc = nxt.setdefault(mask | 1 << r, {})
                _poly_mul_add(acc, poly, entry, sign)
        states = {k: v for k, v in nxt.items() if v}
        if not states:
            return {}
    return states


@dataclass(frozen=True)
class _Combination:
    """A random integer combination of maximal minors, as exponent/coeff arrays."""

    exps: np.ndarray  # (T, d) int64
    coeffs: tuple[int, ...]


def _minor_combination(Shat: LaurentMatrix, seed: int) -> _Combination | None:
    m, n_cols = Shat.shape
    if m < n_cols or math.comb(m, n_cols) > _MAX_MINORS:
        return None
    rows = _integer_rows(Shat)
    minors = _maximal_minors(rows, n_cols, Shat.dim)
    rng = random.Random(f"minors:{seed}")
    total: dict[tuple[int, ...], int] = {}
    for mask in sorted(minors):
        w = rng.randrange(1, 1 << 40)
        for e, c in minors[mask].items():
            v = total.get(e, 0) + w * c
            if v:
                total[e] = v
            else:
                total.pop(e, None)
    exps = sorted(total)
    return _Combination(np.array(exps, dtype=np.int64).reshape(len(exps), Shat.dim),
                        tuple(total[e] for e in exps))


# --- the scan ----------------------------------------------------------------

@dataclass
class _ScanResult:
    orders_checked: int = 0
    orders_skipped: int = 0
    points: int = 0
    witness: Witness | None = None


@dataclass(frozen=True)
class _ScanJob:
    Shat: LaurentMatrix
    combo: _Combination | None
    bound: Bound
    orders: tuple[int, ...]
    galois_reduced: bool
    seed: int


def _confirm(Shat: LaurentMatrix, point: TorsionPoint, seed: int) -> int | None:
    """Exact rank at ``point`` if it is deficient, else ``None``."""
    full = Shat.n_cols
    try:
        mp = find_modp_context(point.N, 62, seed)
        if rank_mod_matrix(evaluate_modp(Shat, point, mp), mp.p) == full:
            return None
    except BadPrime:
        pass
    r = exact_rank_at(Shat, point)
    return r if r < full else None


def _pointwise_order(job: _ScanJob, N: int) -> tuple[int, Witness | None]:
    Shat = job.Shat
    full = Shat.n_cols
    mp = None
    count = 0
    for point in enumerate_torsion(N, Shat.dim, job.galois_reduced):
        count += 1
        if mp is None:
            mp = find_modp_context(N, 62, job.seed)
        try:
            if rank_mod_matrix(evaluate_modp(Shat, point, mp), mp.p) == full:
                continue
        except BadPrime:
            pass
        r = exact_rank_at(Shat, point)
        if r < full:
            return count, Witness(point, r, full)
    return count, None


def _batched_values(combo: _Combination, N: int, prefixes: np.ndarray, p: int,
                    zpow: np.ndarray) -> np.ndarray:
    """Values of the combined minor at every point, shape ``(prefixes, N)``.

    Rows are the leading exponents ``(k_1, ..., k_{d-1})`` given in
    ``prefixes``; columns are the last exponent.
    """
    d = combo.exps.shape[1]
    coeffs = np.array([c % p for c in combo.coeffs], dtype=np.int64)
    lead = combo.exps[:, : d - 1] % N
    last = combo.exps[:, d - 1]
    last_vals, last_idx = np.unique(last, return_inverse=True)
    # coefficient of x_d^beta after substituting the leading coordinates
    phase = (prefixes @ lead.T) % N
    terms = zpow[phase] * coeffs[None, :] % p
    onehot = np.zeros((len(last), len(last_vals)), dtype=np.int64)
    onehot[np.arange(len(last)), last_idx] = 1
    lead_coeffs = (terms @ onehot) % p
    powers = zpow[(last_vals[:, None] % N) * np.arange(N, dtype=np.int64)[None, :] % N]
    out = np.zeros((len(prefixes), N), dtype=np.int64)
    block = 64  # keeps every partial sum below 2^63
    for s in range(0, len(last_vals), block):
        out = (out + lead_coeffs[:, s:s + block] @ powers[s:s + block]) % p
    return out


def _prefix_blocks(firsts: list[int], N: int, d: int, size: int = 2048) -> Iterator[np.ndarray]:
    block: list[tuple[int, ...]] = []
    for k1 in firsts:
        for rest in itertools.product(range(N), repeat=d - 2):
            block.append((k1,) + rest)
            if len(block) == size:
                yield np.array(block, dtype=np.int64).reshape(-1, d - 1)
                block = []
    if block:
        yield np.array(block, dtype=np.int64).reshape(-1, d - 1)


def _batched_order(job: _ScanJob, N: int) -> tuple[int, Witness | None]:
    Shat, d = job.Shat, job.Shat.dim
    firsts = [k % N for k in divisors(N)] if job.galois_reduced else list(range(N))
    mp = find_modp_context(N, _SMALL_PRIME_BITS, job.seed, tabulate=False)
    zpow = np.empty(N, dtype=np.int64)
    acc = 1
    for j in range(N):
        zpow[j] = acc
        acc = acc * mp.zeta % mp.p
    total = len(firsts) * N ** (d - 1) - 1
    seen = 0  # points before the current block, identity included
    for prefixes in _prefix_blocks(firsts, N, d):
        values = _batched_values(job.combo, N, prefixes, mp.p, zpow)
        rows, cols = np.nonzero(values == 0)
        for r, c in zip(rows.tolist(), cols.tolist()):
            k = tuple(int(x) for x in prefixes[r]) + (c,)
            if not any(k):
                continue
            point = TorsionPoint(N, k)
            rank = _confirm(Shat, point, job.seed)
            if rank is not None:
                position = seen + r * N + c
                # the identity, when enumerated before this point, is not counted
                ident = firsts.index(0) * N ** (d - 1) if 0 in firsts else None
                if ident is not None and ident < position:
                    position -= 1
                return position + 1, Witness(point, rank, Shat.n_cols)
        seen += len(prefixes) * N
    return total, None


def _scan(job: _ScanJob) -> _ScanResult:
    res = _ScanResult()
    for N in job.orders:
        if not phi_filter(N, job.bound):
            res.orders_skipped += 1
            continue
        res.orders_checked += 1
        if job.combo is not None:
            count, witness = _batched_order(job, N)
        else:
            count, witness = _pointwise_order(job, N)
        res.points += count
        if witness is not None:
            res.witness = witness
            break
    return res


def _chunks(orders: Sequence[int], size: int) -> Iterator[tuple[int, ...]]:
    for s in range(0, len(orders), size):
        yield tuple(orders[s:s + size])


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    return max(1, int(raw)) if raw else 1


def decide(fw: Framework, model: Model | str = Model.FLEXIBLE, *, max_bound: int = DEFAULT_MAX_BOUND,
           threads: int | None = None, seed: int = 0, engine: str = "auto",
           galois_reduced: bool = True, order_limit: int | None = None,
           regauge: bool = False) -> Verdict:
    """Decide infinitesimal ultrarigidity of ``fw`` in the given model.

    ``order_limit`` truncates the torsion scan (the verdict then records the
    limit and is only a certificate up to that order).  ``regauge`` replaces
    the colors by an equivalent coloring of smaller weight before the bound
    is computed.  ``engine`` is ``"pointwise"``, ``"batched"`` or ``"auto"``.
    Raises ``BoundTooLarge`` when the bound exceeds ``max_bound``.
    """
    model = Model(model)
    if engine not in ("auto", "pointwise", "batched"):
        raise ValueError(f"unknown engine {engine!r}")
    rank, required = base_rank(fw, model)
    if rank < required:
        return Verdict(VerdictKind.NOT_PERIODICALLY_RIGID, model, rank, required, engine=engine)

    graph = reduce_weight(fw.graph) if regauge else fw.graph
    weight = total_weight(graph)
    bound = bound_N0(fw.dim, weight)
    if bound.N0 > max_bound:
        raise BoundTooLarge(f"bound too large: N0 = {bound.N0} exceeds the ceiling {max_bound}")
    Shat = laurent_matrix(graph, edge_vectors(fw))

    combo = None
    if engine in ("auto", "batched"):
        combo = _minor_combination(Shat, seed)
        if combo is not None and not combo.coeffs:
            combo = None  # every point is deficient; the pointwise path finds it at once
    if engine == "batched" and combo is None and Shat.shape[0] >= Shat.n_cols:
        engine_used = "pointwise"
    else:
        engine_used = "batched" if combo is not None else "pointwise"

    last = bound.N0 if order_limit is None else min(bound.N0, order_limit)
    orders = list(range(2, last + 1))
    threads = _default_threads() if threads is None else max(1, threads)
    jobs = [_ScanJob(Shat, combo, bound, chunk, galois_reduced, seed) for chunk in _chunks(orders, _CHUNK)]

    total = _ScanResult()
    if threads == 1 or len(jobs) <= 1:
        results: Iterator[_ScanResult] = (_scan(job) for job in jobs)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=threads)
        results = pool.map(_scan, jobs)
    try:
        for res in results:
            total.orders_checked += res.orders_checked
            total.orders_skipped += res.orders_skipped
            total.points += res.points
            if res.witness is not None:
                total.witness = res.witness
                break
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)

    kind = VerdictKind.TORSION_FLEXIBLE if total.witness else VerdictKind.ULTRARIGID
    return Verdict(kind, model, rank, required, bound, total.witness, total.orders_checked,
                   total.orders_skipped, total.points,
                   order_limit if order_limit is not None and order_limit < bound.N0 else None,
                   engine_used, weight)


# --- rigid unit modes ---------------------------------------------------------

def rum_rational_spectrum(fw: Framework, max_order: int, seed: int = 0) -> list[tuple[TorsionPoint, int]]:
    """All torsion points of exact order ``<= max_order`` where the Laurent
    matrix loses rank, with the nullity, identity included."""
    Shat = laurent_matrix(fw.graph, edge_vectors(fw))
    full = Shat.n_cols
    out = []
    for N in range(1, max_order + 1):
        mp = None
        for k in itertools.product(range(N), repeat=fw.dim):
            point = TorsionPoint(N, k)
            if point.order != N:
                continue
            if N > 1:
                mp = mp or find_modp_context(N, 62, seed)
                try:
                    if rank_mod_matrix(evaluate_modp(Shat, point, mp), mp.p) == full:
                        continue
                except BadPrime:
                    pass
            r = exact_rank_at(Shat, point)
            if r < full:
                out.append((point, full - r))
    return out
