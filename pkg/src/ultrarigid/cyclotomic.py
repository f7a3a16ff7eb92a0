"""Exact arithmetic in Q(zeta_N) and its reductions modulo primes p = 1 mod N.

Elements of Q(zeta_N) are stored in the power basis ``1, z, ..., z^(phi-1)``
with rational coefficients.  Products are reduced with a precomputed table
holding ``z^k`` for ``phi <= k < 2 phi``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .numtheory import cyclotomic_poly, euler_phi, factorize, is_prime

__all__ = [
    "CycloContext",
    "CycloNumber",
    "ModPContext",
    "BadPrime",
    "cyclo_context",
    "zeta_power",
    "invert",
    "find_modp_context",
    "project_modp",
]


class BadPrime(ArithmeticError):
    """A denominator vanished modulo the chosen prime."""


class CycloContext:
    """The field Q(zeta_N) with its reduction table."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"order must be positive, got {n}")
        self.n = n
        self.phi = euler_phi(n)
        self.min_poly = cyclotomic_poly(n)
        phi = self.phi
        # z^phi = -(m_0 + m_1 z + ... + m_{phi-1} z^{phi-1})
        table = [[-c for c in self.min_poly[:phi]]]
        for _ in range(phi + 1, 2 * phi):
            prev = table[-1]
            top = prev[-1]
            shifted = [0] + prev[:-1]
            table.append([a + top * b for a, b in zip(shifted, table[0])])
        self.reduction = table  # reduction[j] is z^(phi + j)
        self._powers = self._power_table()

    def __repr__(self) -> str:
        return f"CycloContext(N={self.n})"

    def _power_table(self) -> list[tuple[Fraction, ...]]:
        """``z^k`` for ``0 <= k < N``, each obtained from the previous by one shift."""
        phi = self.phi
        top_rule = self.reduction[0]
        current = [0] * phi
        current[0] = 1
        table = []
        for _ in range(self.n):
            table.append(tuple(Fraction(c) for c in current))
            carry = current[-1]
            current = [0] + current[:-1]
            if carry:
                current = [a + carry * b for a, b in zip(current, top_rule)]
        return table

    def element_from_ints(self, coeffs: Sequence) -> "CycloNumber":
        vals = [Fraction(c) for c in coeffs]
        return CycloNumber(self, self._fold(vals))

    def _fold(self, vals: list) -> tuple[Fraction, ...]:
        """Reduce a coefficient list of any length modulo the minimal polynomial."""
        phi = self.phi
        vals = list(vals) + [Fraction(0)] * max(0, phi - len(vals))
        # long products are folded from the top using z^phi, which is linear
        for k in range(len(vals) - 1, phi - 1, -1):
            c = vals[k]
            if c:
                base = self.reduction[0]
                for i, b in enumerate(base):
                    if b:
                        vals[k - phi + i] += c * b
        return tuple(vals[:phi])

    def zero(self) -> "CycloNumber":
        return CycloNumber(self, (Fraction(0),) * self.phi)

    def one(self) -> "CycloNumber":
        return self.scalar(1)

    def scalar(self, value) -> "CycloNumber":
        return CycloNumber(self, (Fraction(value),) + (Fraction(0),) * (self.phi - 1))

    def zeta_power(self, k: int) -> "CycloNumber":
        return CycloNumber(self, self._powers[k % self.n])

    def monomial(self, coeff, k: int) -> "CycloNumber":
        coeff = Fraction(coeff)
        return CycloNumber(self, tuple(coeff * c for c in self._powers[k % self.n]))


@lru_cache(maxsize=256)
def cyclo_context(n: int) -> CycloContext:
    return CycloContext(n)


@dataclass(frozen=True, eq=False)
class CycloNumber:
    """An element of Q(zeta_N) in the power basis."""

    ctx: CycloContext
    coeffs: tuple[Fraction, ...]

    def _lift(self, other) -> "CycloNumber":
        if isinstance(other, CycloNumber):
            if other.ctx.n != self.ctx.n:
                raise ValueError("mixing elements of different cyclotomic fields")
            return other
        return self.ctx.scalar(other)

    def __add__(self, other):
        other = self._lift(other)
        return CycloNumber(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.ctx, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, CycloNumber):
            c = Fraction(other)
            return CycloNumber(self.ctx, tuple(a * c for a in self.coeffs))
        other = self._lift(other)
        phi = self.ctx.phi
        prod = [Fraction(0)] * (2 * phi - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        low = prod[:phi]
        for j, c in enumerate(prod[phi:]):
            if c:
                for i, r in enumerate(self.ctx.reduction[j]):
                    if r:
                        low[i] += c * r
        return CycloNumber(self.ctx, tuple(low))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * invert(self._lift(other))

    def __rtruediv__(self, other):
        return self._lift(other) * invert(self)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other) -> bool:
        try:
            other = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ctx.n, self.coeffs))

    def __repr__(self) -> str:
        return f"CycloNumber(N={self.ctx.n}, {[str(c) for c in self.coeffs]})"

    @property
    def support(self) -> int:
        return sum(1 for c in self.coeffs if c)

    def inverse(self) -> "CycloNumber":
        return invert(self)


def zeta_power(k: int, n: int) -> CycloNumber:
    """The element zeta_n^k written in the power basis."""
    return cyclo_context(n).zeta_power(k)


# --- inversion through the extended Euclidean algorithm on Q[x] -------------

def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    num = list(num)
    quot = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    lead = den[-1]
    while len(num) >= len(den) and num:
        shift = len(num) - len(den)
        c = num[-1] / lead
        quot[shift] = c
        for i, b in enumerate(den):
            num[shift + i] -= c * b
        _trim(num)
    return quot, num


def _poly_sub_mul(a: list[Fraction], q: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = list(a) + [Fraction(0)] * max(0, len(q) + len(b) - 1 - len(a))
    for i, x in enumerate(q):
        if x:
            for j, y in enumerate(b):
                out[i + j] -= x * y
    return _trim(out)


def invert(a: CycloNumber) -> CycloNumber:
    """Multiplicative inverse in Q(zeta_N); raises ZeroDivisionError on 0."""
    if not a:
        raise ZeroDivisionError("zero has no inverse in Q(zeta_N)")
    ctx = a.ctx
    r0 = [Fraction(c) for c in ctx.min_poly]
    r1 = _trim(list(a.coeffs))
    s0: list[Fraction] = []
    s1 = [Fraction(1)]
    # invariant: r_i = s_i * a (mod the minimal polynomial)
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub_mul(s0, q, s1)
    unit = r1[0]
    result = [c / unit for c in s1]
    return CycloNumber(ctx, ctx._fold(result))


# --- reduction modulo primes ---------------------------------------------

@dataclass(frozen=True)
class ModPContext:
    """A prime ``p = 1 mod N`` and an element ``zeta`` of exact order ``N`` in F_p."""

    n: int
    p: int
    zeta: int
    powers: tuple[int, ...] = field(repr=False, default=())

    def zeta_pow(self, k: int) -> int:
        if self.powers:
            return self.powers[k % self.n]
        return pow(self.zeta, k % self.n, self.p)

    def reduce(self, value: Fraction) -> int:
        value = Fraction(value)
        den = value.denominator % self.p
        if den == 0:
            raise BadPrime(f"denominator {value.denominator} vanishes mod {self.p}")
        return value.numerator * pow(den, -1, self.p) % self.p


def _has_exact_order(g: int, n: int, p: int) -> bool:
    if pow(g, n, p) != 1:
        return False
    return all(pow(g, n // q, p) != 1 for q in factorize(n))


def _element_of_order(n: int, p: int, rng: random.Random) -> int:
    if n == 1:
        return 1
    cofactor = (p - 1) // n
    while True:
        g = pow(rng.randrange(2, p - 1) if p > 3 else 2, cofactor, p)
        if _has_exact_order(g, n, p):
            return g


def find_modp_context(n: int, bits: int = 62, seed: int = 0, prime: int | None = None,
                      tabulate: bool = True) -> ModPContext:
    """Choose a prime ``p = 1 mod n`` of the requested size and a primitive
    n-th root of unity in F_p.

    ``prime`` pins the modulus (it must be 1 mod n), which is handy for
    small worked examples.  Otherwise the search starts at a seeded random
    point of ``[2^(bits-1), 2^bits)`` and walks up through ``1 mod n``.
    """
    rng = random.Random(f"modp:{n}:{bits}:{seed}")
    if prime is not None:
        if not is_prime(prime) or (prime - 1) % n:
            raise ValueError(f"{prime} is not a prime congruent to 1 mod {n}")
        p = prime
    else:
        if bits < 3 or (1 << bits) <= 2 * n:
            raise ValueError("prime size too small for this order")
        lo = 1 << (bits - 1)
        start = rng.randrange(lo, 1 << bits)
        p = start - (start - 1) % n
        if p < lo:
            p += n
        while not is_prime(p):
            p += n
            if p >= 1 << bits:
                p = lo - (lo - 1) % n + n
    zeta = _element_of_order(n, p, rng)
    powers: tuple[int, ...] = ()
    if tabulate and n <= 1 << 16:
        acc, pw = 1, []
        for _ in range(n):
            pw.append(acc)
            acc = acc * zeta % p
        powers = tuple(pw)
    return ModPContext(n=n, p=p, zeta=zeta, powers=powers)


def project_modp(a: CycloNumber | Iterable[Fraction], ctx: ModPContext) -> int:
    """Image of an element of Q(zeta_N) under ``zeta -> ctx.zeta`` in F_p."""
    coeffs = a.coeffs if isinstance(a, CycloNumber) else tuple(a)
    total = 0
    for i, c in enumerate(coeffs):
        if c:
            total += ctx.reduce(c) * ctx.zeta_pow(i)
    return total % ctx.p
