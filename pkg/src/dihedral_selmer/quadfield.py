"""Arithmetic of a quadratic field Q(sqrt d) at desk scale.

Elements of the ring of integers are pairs ``(x, y)`` meaning ``x + y*w``
where ``w = sqrt(d)`` or ``(1 + sqrt(d))/2`` according to d mod 4.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd, isqrt

from sympy import factorint, isprime


class FieldError(ValueError):
    pass


class ScanExhausted(RuntimeError):
    def __init__(self, message, found=()):
        super().__init__(message)
        self.found = tuple(found)


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    return all(e == 1 for e in factorint(n).values())


@dataclass(frozen=True)
class QuadraticField:
    d: int

    def __post_init__(self):
        if self.d in (0, 1) or not is_squarefree(self.d):
            raise FieldError(f"d = {self.d} is not a squarefree integer other than 0, 1")

    @property
    def disc(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def w_trace(self) -> int:
        return 1 if self.d % 4 == 1 else 0

    @property
    def w_norm(self) -> int:
        return (1 - self.d) // 4 if self.d % 4 == 1 else -self.d

    @property
    def imaginary(self) -> bool:
        return self.d < 0

    def mul(self, u, v):
        x1, y1 = u
        x2, y2 = v
        # w^2 = t w - n
        t, n = self.w_trace, self.w_norm
        return (x1 * x2 - n * y1 * y2, x1 * y2 + x2 * y1 + t * y1 * y2)

    def norm(self, u):
        x, y = u
        return x * x + self.w_trace * x * y + self.w_norm * y * y

    def conj(self, u):
        x, y = u
        return (x + self.w_trace * y, -y)

    def power(self, u, k):
        out = (1, 0)
        for _ in range(k):
            out = self.mul(out, u)
        return out

    def __str__(self):
        return f"Q(sqrt({self.d}))"


class SplittingType(enum.Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def kronecker(a: int, q: int) -> int:
    """Kronecker symbol (a | q) for a prime q."""
    if a % q == 0:
        return 0
    if q == 2:
        return 1 if a % 8 in (1, 7) else -1
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def splitting_type(K: QuadraticField, q: int) -> SplittingType:
    s = kronecker(K.disc, q)
    return {1: SplittingType.SPLIT, -1: SplittingType.INERT, 0: SplittingType.RAMIFIED}[s]


def _scan(K, p, count, bound, residue, want):
    if count < 1:
        raise ValueError("count must be at least 1")
    bad = 2 * K.disc * p
    out = []
    q = 3
    while q <= bound and len(out) < count:
        if q % p == residue % p and bad % q and isprime(q) and splitting_type(K, q) is want:
            out.append(q)
        q += 2
    if len(out) < count:
        raise ScanExhausted(
            f"found {len(out)} of {count} primes q <= {bound} with q = {residue % p} mod {p} "
            f"{want.value} in {K}", out)
    return out


def scan_s1(K: QuadraticField, p: int, count: int, bound: int = 10**6) -> list[int]:
    """First primes q = 1 mod p split in K, excluding divisors of 2*disc*p."""
    return _scan(K, p, count, bound, 1, SplittingType.SPLIT)


def scan_s2(K: QuadraticField, p: int, count: int, bound: int = 10**6) -> list[int]:
    """First primes q = -1 mod p inert in K, excluding divisors of 2*disc*p."""
    if K.d == p and p % 4 == 1:
        raise FieldError(f"no inert primes q = -1 mod {p} exist in Q(sqrt({p}))")
    return _scan(K, p, count, bound, -1, SplittingType.INERT)


# --- residue unit groups ------------------------------------------------------

def bsgs(mul, one, g, h, n):
    """x in [0, n) with g^x = h in a group where g has order dividing n."""
    m = isqrt(n - 1) + 1 if n > 1 else 1
    table = {}
    e = one
    for j in range(m):
        table.setdefault(e, j)
        e = mul(e, g)
    # giant step g^-m = g^(n - m)
    gm = one
    base, k = g, (n - m) % n
    while k:
        if k & 1:
            gm = mul(gm, base)
        base = mul(base, base)
        k >>= 1
    y = h
    for i in range(m + 1):
        if y in table:
            return (i * m + table[y]) % n
        y = mul(y, gm)
    raise ValueError("discrete logarithm does not exist")


def _prime_factors(n):
    return sorted(factorint(n))


@dataclass(frozen=True)
class ResidueUnitGroup:
    """(O/q)^* for an odd prime q unramified in K.

    ``model`` is ``"inert"`` (F_q[t]/(t^2 - d), elements ``(a, b)`` = a + b t,
    tau: t -> -t) or ``"split"`` (F_q x F_q via sqrt(d) -> (s, -s), tau swaps).
    ``tau_matrix`` gives the action of tau on exponent vectors.
    """

    field: QuadraticField
    q: int
    model: str
    generators: tuple[tuple[int, int], ...]
    orders: tuple[int, ...]
    tau_matrix: tuple[tuple[int, ...], ...]
    sqrt_d: int = 0

    @property
    def order(self):
        out = 1
        for n in self.orders:
            out *= n
        return out

    @property
    def one(self):
        return (1, 0) if self.model == "inert" else (1, 1)

    def mul(self, u, v):
        q = self.q
        if self.model == "inert":
            return ((u[0] * v[0] + self.field.d * u[1] * v[1]) % q, (u[0] * v[1] + u[1] * v[0]) % q)
        return (u[0] * v[0] % q, u[1] * v[1] % q)

    def pow(self, u, k):
        out, base = self.one, u
        k %= self.order if self.model == "inert" else self.q - 1
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def tau(self, u):
        if self.model == "inert":
            return (u[0], (-u[1]) % self.q)
        return (u[1], u[0])

    def reduce(self, elt):
        """Image of an integral element (x, y) = x + y w, coprime to q."""
        x, y = elt
        q = self.q
        if self.field.w_trace:
            inv2 = (q + 1) // 2
            a, b = (x + y * inv2) % q, (y * inv2) % q
        else:
            a, b = x % q, y % q
        if self.model == "inert":
            u = (a, b)
        else:
            u = ((a + b * self.sqrt_d) % q, (a - b * self.sqrt_d) % q)
        if u == (0, 0) or (self.model == "split" and 0 in u):
            raise FieldError(f"element {elt} is not a unit mod {q}")
        return u

    def element(self, exps):
        out = self.one
        for g, e in zip(self.generators, exps):
            out = self.mul(out, self.pow(g, e))
        return out

    def dlog(self, u):
        """Exponent vector of u on the generators."""
        if self.model == "inert":
            return (bsgs(self.mul, self.one, self.generators[0], u, self.orders[0]),)
        q = self.q
        g = self.generators[0][0]
        m = lambda a, b: a * b % q
        return (bsgs(m, 1, g, u[0], q - 1), bsgs(m, 1, g, u[1], q - 1))

    def apply_tau(self, exps):
        """tau on exponent vectors, reduced mod the generator orders."""
        return tuple(sum(t * e for t, e in zip(row, exps)) % n
                     for row, n in zip(self.tau_matrix, self.orders))


def _has_order(mul, one, pw, x, n, factors):
    return pw(x, n) == one and all(pw(x, n // ell) != one for ell in factors)


def residue_units(K: QuadraticField, q: int, seed: int = 0) -> ResidueUnitGroup:
    """Generators and tau-action for (O/q)^*, q an odd prime unramified in K.

    Generator search is a deterministic scan starting at offset ``seed``.
    """
    if q == 2 or not isprime(q):
        raise FieldError(f"q = {q} must be an odd prime")
    kind = splitting_type(K, q)
    if kind is SplittingType.RAMIFIED:
        raise FieldError(f"q = {q} ramifies in {K}")
    if kind is SplittingType.INERT:
        n = q * q - 1
        factors = _prime_factors(n)
        probe = ResidueUnitGroup(K, q, "inert", ((1, 0),), (n,), ((q % n,),))
        for k in range(q * q):
            idx = (seed + k) % (q * q)
            x = (idx % q, idx // q)
            if x[1] == 0:
                continue
            if _has_order(probe.mul, (1, 0), probe.pow, x, n, factors):
                grp = ResidueUnitGroup(K, q, "inert", (x,), (n,), ((q % n,),))
                if grp.tau(x) != grp.pow(x, q):
                    raise FieldError("Frobenius identity tau(x) = x^q failed")
                return grp
        raise FieldError(f"no generator of F_{q}^2* found")  # unreachable for prime q
    s = next(r for r in range(1, q) if (r * r - K.d) % q == 0)
    factors = _prime_factors(q - 1)
    pw = lambda a, k: pow(a, k, q)
    for k in range(q - 1):
        g = 2 + (seed + k) % (q - 2) if q > 3 else 2
        if _has_order(lambda a, b: a * b % q, 1, pw, g, q - 1, factors):
            break
    x, y = (g, 1), (1, g)
    grp = ResidueUnitGroup(K, q, "split", (x, y), (q - 1, q - 1), ((0, 1), (1, 0)), s)
    if grp.tau(x) != y:
        raise FieldError("tau does not swap the split generators")
    return grp


# --- units --------------------------------------------------------------------

@dataclass(frozen=True)
class UnitGroupData:
    """Torsion part and (for real fields) fundamental unit.

    ``fundamental_unit`` is ``(a, b, denom)`` for (a + b sqrt d)/denom;
    ``torsion_generator`` and ``fundamental_element`` are in (x, y) = x + y w form.
    """

    torsion_order: int
    torsion_generator: tuple[int, int]
    fundamental_unit: tuple[int, int, int] | None = None
    fundamental_element: tuple[int, int] | None = None

    def generators(self):
        out = [self.torsion_generator]
        if self.fundamental_element is not None:
            out.append(self.fundamental_element)
        return out


def _w_continued_fraction(K):
    """Partial quotients of w = (P + sqrt d)/Q, generated lazily."""
    d = K.d
    P, Q = (1, 2) if K.w_trace else (0, 1)
    r = isqrt(d)
    while True:
        a = (P + r) // Q
        yield a
        P = a * Q - P
        Q = (d - P * P) // Q


def fundamental_unit(K: QuadraticField, max_steps: int = 100000) -> UnitGroupData:
    """Smallest unit > 1, read off the first continued-fraction convergent
    h/k of w with N(h - k w) = +-1; the unit is h - k w' (w' the conjugate)."""
    if K.d < 0:
        raise FieldError("fundamental unit requested for an imaginary field")
    h0, h1 = 1, 0
    k0, k1 = 0, 1
    for step, a in enumerate(_w_continued_fraction(K)):
        h0, h1 = a * h0 + h1, h0
        k0, k1 = a * k0 + k1, k0
        # h - k w has the same norm as its conjugate h - k w'
        if abs(K.norm((h0, -k0))) == 1:
            x, y = K.conj((h0, -k0))
            break
        if step > max_steps:
            raise FieldError("continued fraction period exceeds max_steps")
    if K.w_trace:
        fu = (2 * x + y, y, 2)
    else:
        fu = (x, y, 1)
    return UnitGroupData(2, (-1, 0), fu, (x, y))


def unit_group(K: QuadraticField) -> UnitGroupData:
    if K.d > 0:
        return fundamental_unit(K)
    if K.d == -1:
        return UnitGroupData(4, (0, 1))
    if K.d == -3:
        # w = (1 + sqrt(-3))/2 is a primitive sixth root of unity
        return UnitGroupData(6, (0, 1))
    return UnitGroupData(2, (-1, 0))


def element_order_in(grp: ResidueUnitGroup, u) -> int:
    exps = grp.dlog(u)
    out = 1
    for e, n in zip(exps, grp.orders):
        k = n // gcd(e, n)
        out = out * k // gcd(out, k)
    return out
