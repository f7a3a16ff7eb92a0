"""Integer arithmetic used throughout: factorization, totients, cyclotomic
polynomials, subgroup indices in Z^d, and the torsion-order bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, Context, Decimal
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from sympy import isprime

__all__ = [
    "Bound",
    "factorize",
    "euler_phi",
    "divisors",
    "cyclotomic_poly",
    "subgroup_index",
    "hermite_basis",
    "constant_Cd",
    "bound_N0",
    "phi_filter",
    "is_prime",
]

# Dyadic precision for the constants; 2^-256 is far below 50 decimal digits.
_DYADIC_BITS = 256


def is_prime(n: int) -> bool:
    return bool(isprime(n))


@lru_cache(maxsize=4096)
def _factor_items(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    for q in (2, 3, 5):
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out.append((q, e))
    # wheel mod 30 over the remaining candidate divisors
    steps = (4, 2, 4, 2, 4, 6, 2, 6)
    q, i = 7, 0
    while q * q <= n:
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out.append((q, e))
        q += steps[i]
        i = (i + 1) % 8
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization ``{prime: exponent}``; ``factorize(1) == {}``."""
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    return dict(_factor_items(n))


def euler_phi(n: int) -> int:
    result = n
    for q in factorize(n):
        result = result // q * (q - 1)
    return result


@lru_cache(maxsize=4096)
def _divisors(n: int) -> tuple[int, ...]:
    divs = [1]
    for q, e in _factor_items(n):
        divs = [d * q**j for d in divs for j in range(e + 1)]
    return tuple(sorted(divs))


def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError(f"divisors expects a positive integer, got {n}")
    return list(_divisors(n))


# --- polynomials with integer coefficients, lowest degree first -----------

def _substitute_power(poly: Sequence[int], q: int) -> list[int]:
    out = [0] * ((len(poly) - 1) * q + 1)
    for i, c in enumerate(poly):
        out[i * q] = c
    return out


def _exact_divide(num: Sequence[int], den: Sequence[int]) -> list[int]:
    """Quotient of ``num`` by the monic ``den``; the remainder must vanish."""
    num = list(num)
    dn = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    quot = [0] * (len(num) - dn)
    for i in range(len(quot) - 1, -1, -1):
        c = num[i + dn]
        quot[i] = c
        if c:
            for j, dc in enumerate(den):
                num[i + j] -= c * dc
    if any(num[:dn]):
        raise ArithmeticError("polynomial division left a remainder")
    return quot


@lru_cache(maxsize=1024)
def _cyclotomic(n: int) -> tuple[int, ...]:
    if n == 1:
        return (-1, 1)
    primes = [q for q, e in _factor_items(n) for _ in range(e)]
    k = primes[0]
    poly = [1] * k
    for q in primes[1:]:
        lifted = _substitute_power(poly, q)
        poly = lifted if k % q == 0 else _exact_divide(lifted, poly)
        k *= q
    return tuple(poly)


def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Minimal polynomial of a primitive n-th root of unity.

    Coefficients are listed from the constant term upwards.  Built from
    the prime factors of ``n`` one at a time: the prime case is the
    geometric sum, and each further prime ``q`` either substitutes
    ``x -> x^q`` (when ``q`` already divides the running index) or also
    divides out the previous polynomial.
    """
    if n < 1:
        raise ValueError(f"cyclotomic_poly expects a positive integer, got {n}")
    return _cyclotomic(n)


# --- subgroups of Z^d -----------------------------------------------------

def _reduce_first_coordinates(first: list[int], other: list[int]) -> tuple[list[int], list[int]]:
    """Unimodular moves on a pair of planar vectors until ``other`` has a
    zero first coordinate."""
    while other[0] != 0:
        q = first[0] // other[0]
        first = [first[0] - q * other[0], first[1] - q * other[1]]
        first, other = other, first
    return first, other


def _planar_index(vectors: Sequence[Sequence[int]]) -> int | None:
    if len(vectors) < 2:
        return None
    lead = [int(vectors[0][0]), int(vectors[0][1])]
    rest = []
    for v in vectors[1:]:
        lead, reduced = _reduce_first_coordinates(lead, [int(v[0]), int(v[1])])
        rest.append(reduced[1])
    height = 0
    for t in rest:
        height = math.gcd(height, t)
    index = abs(lead[0] * height)
    return index or None


def hermite_basis(vectors: Iterable[Sequence[int]], dim: int | None = None) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form of the lattice spanned by ``vectors``.

    Rows are in echelon form with positive pivots, and entries above each
    pivot are reduced into ``[0, pivot)``.  The result is canonical: two
    generating sets give the same rows iff they span the same subgroup.
    """
    rows = [list(map(int, v)) for v in vectors]
    if dim is None:
        if not rows:
            return []
        dim = len(rows[0])
    basis: list[list[int]] = []
    col = 0
    while rows and col < dim:
        active = [r for r in rows if r[col] != 0]
        idle = [r for r in rows if r[col] == 0]
        if not active:
            col += 1
            continue
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            pivot = active[0]
            nxt = [pivot]
            for r in active[1:]:
                q = r[col] // pivot[col]
                r = [a - q * b for a, b in zip(r, pivot)]
                (nxt if r[col] != 0 else idle).append(r)
            active = nxt
        pivot = active[0]
        if pivot[col] < 0:
            pivot = [-a for a in pivot]
        basis.append(pivot)
        rows = [r for r in idle if any(r)]
        col += 1
    for i, row in enumerate(basis):
        pc = next(c for c, a in enumerate(row) if a != 0)
        for j in range(i):
            q = basis[j][pc] // row[pc]
            if q:
                basis[j] = [a - q * b for a, b in zip(basis[j], row)]
    return [tuple(r) for r in basis]


def subgroup_index(vectors: Sequence[Sequence[int]], dim: int = 2) -> int | None:
    """Index of the subgroup of Z^dim generated by ``vectors``.

    Returns ``None`` when the index is infinite.  In the plane the index
    is found by Euclidean reduction of first coordinates against the
    leading vector, a gcd of the leftover second coordinates, and a final
    2x2 determinant.  Higher dimensions go through the Hermite form.
    """
    vectors = [tuple(v) for v in vectors]
    for v in vectors:
        if len(v) != dim:
            raise ValueError(f"vector {v} does not have dimension {dim}")
    if dim == 2:
        return _planar_index(vectors)
    basis = hermite_basis(vectors, dim)
    if len(basis) < dim:
        return None
    index = 1
    for row in basis:
        index *= next(a for a in row if a != 0)
    return index


# --- the torsion-order bound ----------------------------------------------

def _iroot_ceil(n: int, k: int) -> int:
    """ceil(n ** (1/k)) for a non-negative integer n."""
    if n == 0:
        return 0
    r = 1 << ((n.bit_length() + k - 1) // k)
    # Newton iteration from above converges to floor(root)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    return r if r**k >= n else r + 1


@lru_cache(maxsize=64)
def constant_Cd(d: int) -> Fraction:
    """Upper bound for the lattice constant in dimension ``d``.

    The constant is ``(4/3)^((d-1)(2d-3)/4) * d^((d-1)/2)``.  Its fourth
    power is rational, so the value is rounded up to a dyadic rational
    with an exact integer root: the result exceeds the true constant by
    less than ``2^-256``.
    """
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    fourth = Fraction(4, 3) ** ((d - 1) * (2 * d - 3)) * Fraction(d) ** (2 * (d - 1))
    scaled = fourth * (1 << (4 * _DYADIC_BITS))
    top = -((-scaled.numerator) // scaled.denominator)
    return Fraction(_iroot_ceil(top, 4), 1 << _DYADIC_BITS)


def fraction_to_decimal(value: Fraction, digits: int = 50) -> str:
    """Decimal string of ``value`` with ``digits`` significant digits, rounded up."""
    ctx = Context(prec=digits, rounding=ROUND_CEILING)
    return str(ctx.divide(Decimal(value.numerator), Decimal(value.denominator)))


@dataclass(frozen=True)
class Bound:
    """Torsion orders that must be examined: all ``N`` with ``N <= N0``."""

    d: int
    weight: int
    field_degree: int
    C_d: Fraction
    C_hat: Fraction
    N0: int

    @property
    def C_hat_power(self) -> Fraction:
        return self.C_hat**self.d

    def as_dict(self) -> dict:
        return {
            "dim": self.d,
            "D": self.weight,
            "field_degree": self.field_degree,
            "C_d": fraction_to_decimal(self.C_d),
            "C_hat": fraction_to_decimal(self.C_hat),
            "N0": self.N0,
        }


def _log_upper(x: Fraction, prec: int = 80) -> Decimal:
    """An upper bound for ln(x), x > 0."""
    ctx = Context(prec=prec, rounding=ROUND_CEILING)
    val = ctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    ln = val.ln(ctx)
    # Decimal.ln is correctly rounded; pad by a few units in the last place.
    return ctx.add(ln, ctx.multiply(abs(ln), Decimal(10) ** (-prec + 5)) + Decimal(10) ** (-prec + 5))


def bound_N0(d: int, weight: int, field_degree: int = 1) -> Bound:
    """Bound on the orders of torsion points that can witness flexibility.

    ``weight`` is the total l1-norm of the colors.  The floor is 8500 in
    dimensions 2 and 3 and ``256 d^4`` from dimension 4 on; above the floor
    the bound is ``(C ln C)^d`` rounded up, where ``C`` is the lattice
    constant times ``field_degree`` times ``weight``.
    """
    if d < 2:
        raise ValueError("the torsion bound needs dimension at least 2")
    if weight < 0 or field_degree < 1:
        raise ValueError("weight must be non-negative and field_degree positive")
    cd = constant_Cd(d)
    c_hat = cd * field_degree * weight
    floor = 8500 if d <= 3 else 256 * d**4
    n0 = floor
    if c_hat > 1:
        ctx = Context(prec=80, rounding=ROUND_CEILING)
        c_dec = ctx.divide(Decimal(c_hat.numerator), Decimal(c_hat.denominator))
        growth = ctx.power(ctx.multiply(c_dec, _log_upper(c_hat)), d)
        n0 = max(floor, int(growth.to_integral_value(rounding=ROUND_CEILING)))
    return Bound(d=d, weight=weight, field_degree=field_degree, C_d=cd, C_hat=c_hat, N0=n0)


def phi_filter(n: int, bound: Bound) -> bool:
    """True when order ``n`` must be checked, False when it is safely skipped.

    An order is skipped when ``phi(n) > C_hat * n^((d-1)/d)``; the test is
    done exactly as ``phi(n)^d > C_hat^d * n^(d-1)``.  Order 1 is always
    checked.
    """
    if n == 1:
        return True
    phi = euler_phi(n)
    return not (Fraction(phi) ** bound.d > bound.C_hat_power * n ** (bound.d - 1))
