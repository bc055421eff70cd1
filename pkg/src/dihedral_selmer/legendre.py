"""Legendre curves y^2 = x(x - 1)(x - lambda) over Q.

Reduction is classified two ways: closed-form congruence rules, and an
oracle that moves the node to the origin and checks whether its tangent
directions are rational over F_q.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd

from sympy import factorint, isprime, primerange


class CurveError(ValueError):
    pass


class TorsionError(RuntimeError):
    pass


class Reduction(enum.Enum):
    GOOD = "good"
    SPLIT_MULT = "split_mult"
    NONSPLIT_MULT = "nonsplit_mult"
    ADDITIVE2 = "additive2"


def _check_lambda(lam):
    if lam in (0, 1):
        raise CurveError(f"lambda = {lam} gives a singular curve")
    if lam % 2 == 0:
        raise CurveError(f"lambda = {lam} must be odd")


@dataclass(frozen=True)
class LegendreCurve:
    lam: int

    def __post_init__(self):
        _check_lambda(self.lam)

    def rhs(self, x):
        return x * (x - 1) * (x - self.lam)


@dataclass(frozen=True)
class CurveInvariants:
    c4: int
    delta: int
    j_num: int
    j_den: int


def invariants(lam: int) -> CurveInvariants:
    if lam in (0, 1):
        raise CurveError(f"lambda = {lam} gives a singular curve")
    c4 = 16 * (lam * lam - lam + 1)
    delta = 16 * lam * lam * (lam - 1) ** 2
    num, den = c4 ** 3, delta
    g = gcd(num, den)
    num, den = num // g, den // g
    if den < 0:
        num, den = -num, -den
    return CurveInvariants(c4, delta, num, den)


def ord_q(n: int, q: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    k = 0
    while n % q == 0:
        n //= q
        k += 1
    return k


@dataclass(frozen=True)
class LocalCurveData:
    """``c_exponent`` is -ord_q(j) for multiplicative reduction, else 0.

    ``potentially_good`` is only meaningful at q = 2 with Additive2.
    """

    q: int
    type: Reduction
    c_exponent: int = 0
    potentially_good: bool | None = None


def reduction_type(lam: int, q: int) -> LocalCurveData:
    _check_lambda(lam)
    if q == 2:
        if lam % 32 == 17:
            return LocalCurveData(2, Reduction.GOOD)
        return LocalCurveData(2, Reduction.ADDITIVE2, 0, lam % 32 != 1)
    if (lam - 1) % q == 0:
        kind = Reduction.SPLIT_MULT
    elif lam % q == 0:
        kind = Reduction.SPLIT_MULT if q % 4 == 1 else Reduction.NONSPLIT_MULT
    else:
        return LocalCurveData(q, Reduction.GOOD)
    inv = invariants(lam)
    c = ord_q(inv.j_den, q)
    if c != 2 * ord_q(lam * (lam - 1), q):
        raise AssertionError(f"-ord_{q}(j) disagrees with 2 ord_{q}(lambda(lambda-1))")
    return LocalCurveData(q, kind, c)


def _is_square_mod(a, q):
    a %= q
    return a != 0 and pow(a, (q - 1) // 2, q) == 1


def split_oracle(lam: int, q: int) -> Reduction:
    """Move the singular point to (0, 0); the node is split iff
    T^2 + a1 T - a2 has roots in F_q."""
    if q == 2 or not isprime(q):
        raise CurveError(f"q = {q} must be an odd prime")
    if (lam * (lam - 1)) % q:
        raise CurveError(f"q = {q} is a prime of good reduction for lambda = {lam}")
    # double root of x(x-1)(x-lam) mod q
    r = next(r for r in (0, 1, lam % q) if sum(1 for s in (0, 1, lam) if (s - r) % q == 0) >= 2)
    # x -> x + r: coefficients of (x + r)(x + r - 1)(x + r - lam)
    a1 = 0
    a2 = 3 * r - (1 + lam)
    a4 = 3 * r * r - 2 * (1 + lam) * r + lam
    a6 = r * (r - 1) * (r - lam)
    if a4 % q or a6 % q:
        raise AssertionError("shifted point is not singular")
    disc = a1 * a1 + 4 * a2
    if disc % q == 0:
        raise CurveError(f"reduction at {q} is additive")
    return Reduction.SPLIT_MULT if _is_square_mod(disc, q) else Reduction.NONSPLIT_MULT


def bad_primes(lam: int) -> list[LocalCurveData]:
    """Local data at every prime dividing the discriminant, 2 included."""
    _check_lambda(lam)
    primes = set(factorint(abs(lam))) | set(factorint(abs(lam - 1))) | {2}
    return [reduction_type(lam, q) for q in sorted(primes)]


def construct_lambda(primes) -> int:
    """16 * prod(primes) + 1, with good reduction at 2 and split
    multiplicative reduction (c = 2) at every listed prime."""
    primes = list(primes)
    if len(set(primes)) != len(primes):
        raise CurveError("primes must be distinct")
    for q in primes:
        if q % 2 == 0 or not isprime(q):
            raise CurveError(f"{q} is not an odd prime")
    lam = 16
    for q in primes:
        lam *= q
    lam += 1
    if lam % 32 != 17:
        raise AssertionError("lambda is not 17 mod 32")
    good_model_at_2(lam)
    for q in primes:
        loc = reduction_type(lam, q)
        if loc.type is not Reduction.SPLIT_MULT or loc.c_exponent != 2 * ord_q(lam - 1, q):
            raise AssertionError(f"unexpected reduction at {q}")
        if loc.c_exponent != 2:
            raise AssertionError(f"{q} divides lambda - 1 more than once")
    return lam


@dataclass(frozen=True)
class WeierstrassModel:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def discriminant(self):
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def good_model_at_2(lam: int) -> WeierstrassModel:
    """Model after x = 4x' + 1, y = 8y' + 4x'; its discriminant is odd."""
    _check_lambda(lam)
    if lam % 32 != 17:
        raise CurveError(f"lambda = {lam} is not 17 mod 32")
    # u = 2, r = 1, s = 1, t = 0 applied to [0, -(1+lam), 0, lam, 0]
    u, r, s, t = 2, 1, 1, 0
    a1, a2, a3, a4, a6 = 0, -(1 + lam), 0, lam, 0
    num = [
        (a1 + 2 * s, u),
        (a2 - s * a1 + 3 * r - s * s, u ** 2),
        (a3 + r * a1 + 2 * t, u ** 3),
        (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t, u ** 4),
        (a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1, u ** 6),
    ]
    if any(n % d for n, d in num):
        raise AssertionError("transformed model is not integral")
    model = WeierstrassModel(*(n // d for n, d in num))
    disc = model.discriminant()
    if disc * 4096 != invariants(lam).delta:
        raise AssertionError("discriminant did not scale by u^12")
    if disc % 2 == 0:
        raise AssertionError("transformed discriminant is even")
    return model


def count_points(lam: int, ell: int) -> int:
    """#E(F_ell) by enumeration, the point at infinity included."""
    squares = [0] * ell
    for y in range(ell):
        squares[y * y % ell] += 1
    return 1 + sum(squares[(x * (x - 1) * (x - lam)) % ell] for x in range(ell))


@dataclass(frozen=True)
class TorsionProbe:
    bound: int
    primes: tuple[int, ...]
    counts: tuple[int, ...]


def torsion_probe(lam: int, p: int, count: int = 20, max_prime: int = 1000) -> TorsionProbe:
    """gcd of #E(F_ell) over the first ``count`` good odd primes ell <= max_prime.

    The gcd bounds #E(Q)_tors.  It is divisible by 4 (rational 2-torsion);
    for p > 7 a factor of p means something is wrong.
    """
    _check_lambda(lam)
    delta = invariants(lam).delta
    primes, counts = [], []
    for ell in primerange(3, max_prime + 1):
        if len(primes) >= count:
            break
        if delta % ell == 0:
            continue
        n = count_points(lam, ell)
        if (n - ell - 1) ** 2 > 4 * ell:
            raise AssertionError(f"Hasse bound violated at {ell}")
        primes.append(ell)
        counts.append(n)
    if not primes:
        raise CurveError("no good primes available for the probe")
    B = 0
    for n in counts:
        B = gcd(B, n)
    if B % 4:
        raise AssertionError("point counts are not divisible by 4")
    if p > 7 and B % p == 0:
        raise TorsionError(f"{p} divides the torsion bound {B}")
    return TorsionProbe(B, tuple(primes), tuple(counts))
