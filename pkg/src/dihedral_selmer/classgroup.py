"""Class groups of quadratic fields.

Two independent routes:

* binary quadratic forms: reduced forms of discriminant D < 0 are counted
  directly, and the group structure comes from Gaussian composition;
* ideals: prime ideals of norm up to the Minkowski bound, multiplied as
  Z-lattices in Hermite form, with a principality test that also returns a
  generator.  This route handles real fields too.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt, pi

from sympy import primerange

from . import intmat
from .quadfield import QuadraticField, SplittingType, splitting_type


class BoundExceeded(RuntimeError):
    pass


IMAGINARY_DISC_BOUND = 10**6
REAL_DISC_BOUND = 10**4


# --- binary quadratic forms -------------------------------------------------

def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """Primitive reduced positive definite forms (a, b, c) of discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"bad negative discriminant {D}")
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return out


def reduce_definite(f):
    a, b, c = f
    D = b * b - 4 * a * c
    while True:
        # normalise b into (-a, a]
        r = (a - b) // (2 * a)
        b += 2 * r * a
        c = (b * b - D) // (4 * a)
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return (a, b, c)


def compose(f1, f2):
    """Gaussian composition of primitive positive definite forms, reduced."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    D = b1 * b1 - 4 * a1 * c1
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = intmat._xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = intmat._xgcd(s, d)
        x2, y2 = u, -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return reduce_definite((a3, b3, c3))


def form_inverse(f):
    return reduce_definite((f[0], -f[1], f[2]))


def principal_form(D):
    b = D % 2
    return (1, b, (b * b - D) // 4)


@dataclass(frozen=True)
class ClassGroupData:
    """h, invariant factors (each > 1), and a generating set.

    Generators are recorded as ``(norm, b)``: the ideal of that norm attached
    to the form (norm, b, c).
    """

    h: int
    structure: tuple[int, ...]
    generators: tuple[tuple[int, int], ...]


def _abelian_structure(elements, identity, mul, equal):
    """Enumerate the group generated by ``elements``.

    Returns (gens, relations, members) where members maps exponent vectors to
    group elements and relations generate the relation lattice.
    """
    gens = []
    members = [((), identity)]
    relations = []
    for x in elements:
        if any(equal(x, m) for _, m in members):
            continue
        k = len(gens)
        gens.append(x)
        members = [(v + (0,), m) for v, m in members]
        relations = [r + [0] for r in relations]
        power, n = x, 1
        layers = [members]
        while True:
            hit = next((v for v, m in members if equal(power, m)), None)
            if hit is not None:
                break
            layers.append([(v[:k] + (n,), mul(m, power)) for v, m in members])
            power = mul(power, x)
            n += 1
        rel = [-e for e in hit]
        rel[k] += n
        relations.append(rel)
        members = [item for layer in layers for item in layer]
    return gens, relations, members


def class_group(K: QuadraticField, bound: int | None = None) -> ClassGroupData:
    """Class group via reduced forms (d < 0) or ideals (d > 0)."""
    D = K.disc
    if K.d > 0:
        bound = REAL_DISC_BOUND if bound is None else bound
        if D > bound:
            raise BoundExceeded(f"|disc| = {D} exceeds the real-field bound {bound}")
        data = ideal_class_group(K)
        return ClassGroupData(data.h, data.structure,
                              tuple((I.norm, I.b) for I in data.generators))
    bound = IMAGINARY_DISC_BOUND if bound is None else bound
    if -D > bound:
        raise BoundExceeded(f"|disc| = {-D} exceeds the imaginary-field bound {bound}")
    forms = reduced_forms(D)
    ident = principal_form(D)
    gens, rels, members = _abelian_structure(forms, ident, compose, lambda x, y: x == y)
    if len(members) != len(forms):
        raise AssertionError("composition did not reach every reduced form")
    structure = tuple(e for e in intmat.smith_invariants(rels, len(gens)) if e > 1) if gens else ()
    h = len(forms)
    for g in gens:
        x = ident
        for _ in range(h):
            x = compose(x, g)
        if x != ident:
            raise AssertionError(f"h-th power of {g} is not principal")
    return ClassGroupData(h, structure, tuple((g[0], g[1]) for g in gens))


# --- ideals -----------------------------------------------------------------

@dataclass(frozen=True)
class Ideal:
    """Z-basis {a, b + c w} in Hermite form (c | a, c | b, 0 <= b < a)."""

    field: QuadraticField
    a: int
    b: int
    c: int

    @property
    def norm(self):
        return self.a * self.c

    def basis(self):
        return [(self.a, 0), (self.b, self.c)]


def ideal_from_elements(K: QuadraticField, elements) -> Ideal:
    """The Z-module generated by elements (x, y) = x + y w, closed under w."""
    rows = []
    for x, y in elements:
        rows.append([y, x])
        wx, wy = K.mul((x, y), (0, 1))
        rows.append([wy, wx])
    h = intmat.hnf(rows, ncols=2)
    if len(h) != 2:
        raise ValueError("elements do not span a full-rank ideal")
    (c, b), (_, a) = h
    return Ideal(K, a, b % a, c)


def ideal_mul(I: Ideal, J: Ideal) -> Ideal:
    K = I.field
    prods = [K.mul(u, v) for u in I.basis() for v in J.basis()]
    return ideal_from_elements(K, prods)


def ideal_conj(I: Ideal) -> Ideal:
    K = I.field
    return ideal_from_elements(K, [K.conj(u) for u in I.basis()])


def principal_ideal(K: QuadraticField, elt) -> Ideal:
    return ideal_from_elements(K, [elt])


def prime_ideals_above(K: QuadraticField, q: int) -> list[Ideal]:
    """Prime ideals over a rational prime q (one for inert or ramified q)."""
    kind = splitting_type(K, q)
    if kind is SplittingType.INERT:
        return [ideal_from_elements(K, [(q, 0)])]
    t, n = K.w_trace, K.w_norm
    roots = [r for r in range(q) if (r * r - t * r + n) % q == 0]
    return [ideal_from_elements(K, [(q, 0), (-r, 1)]) for r in roots]


def _primitive_basis(I: Ideal):
    """(content, alpha, beta, N) with I = content * [alpha, beta], N its norm."""
    g = gcd(gcd(I.a, I.b), I.c)
    A, B, C = I.a // g, I.b // g, I.c // g
    if C != 1:
        # I/g is primitive only when the w-coefficient is 1
        raise AssertionError("unexpected ideal shape")
    return g, (A, 0), (B, 1), A


def _form_of(K, alpha, beta, N):
    a = K.norm(alpha)
    c = K.norm(beta)
    b = K.norm((alpha[0] + beta[0], alpha[1] + beta[1])) - a - c
    return a // N, b // N, c // N


def _scale(K, u, k):
    return (u[0] * k, u[1] * k)


def _sub(u, v, k=1):
    return (u[0] - k * v[0], u[1] - k * v[1])


def principal_generator(I: Ideal, max_steps: int = 10**6):
    """A generator of I if I is principal, else None."""
    K = I.field
    g, alpha, beta, N = _primitive_basis(I)
    if K.d < 0:
        # Lagrange-Gauss reduction of the lattice under the norm form
        u, v = alpha, beta
        while True:
            if K.norm(v) < K.norm(u):
                u, v = v, u
            nu = K.norm(u)
            two_b = K.norm((u[0] + v[0], u[1] + v[1])) - nu - K.norm(v)
            m = (two_b + nu) // (2 * nu)
            if m == 0:
                break
            v = _sub(v, u, m)
        if K.norm(u) == N:
            return _scale(K, u, g)
        return None
    D = K.disc
    s = isqrt(D)
    a, b, c = _form_of(K, alpha, beta, N)
    seen = None
    for step in range(max_steps):
        if abs(a) == 1:
            return _scale(K, alpha, g)
        reduced = 0 < b <= s and s < b + 2 * abs(a) and 2 * abs(a) <= s + b
        if reduced:
            if seen is None:
                seen = (a, b, c)
            elif (a, b, c) == seen:
                return None
        # rho: (a, b, c) -> (c, b', .), basis (alpha, beta) -> (beta, -alpha + t beta)
        m = 2 * abs(c)
        if abs(c) <= s:
            bp = s - ((s + b) % m)
        else:
            bp = (-b) % m
            if bp > abs(c):
                bp -= m
        t = (bp + b) // (2 * c)
        alpha, beta = beta, _sub(_scale(K, beta, t), alpha)
        a, b, c = c, bp, (bp * bp - D) // (4 * c)
    raise BoundExceeded("reduction cycle longer than max_steps")


def is_principal(I: Ideal) -> bool:
    return principal_generator(I) is not None


def minkowski_bound(K: QuadraticField) -> int:
    D = abs(K.disc)
    if K.d < 0:
        return isqrt(4 * D // int(pi * pi) + 1) + 1  # >= (2/pi) sqrt|D|
    return isqrt(D // 4) + 1


@dataclass(frozen=True)
class IdealClassData:
    h: int
    structure: tuple[int, ...]
    generators: tuple[Ideal, ...]
    relations: tuple[tuple[int, ...], ...]
    primes: tuple[int, ...]
    prime_ideals: tuple[Ideal, ...] = ()

    def generator_relations(self):
        """Relations restricted to the generator columns."""
        cols = [self.prime_ideals.index(I) for I in self.generators]
        return [[rel[c] for c in cols] for rel in self.relations]


class IdealArithmetic:
    """Products of a fixed list of prime ideals, with cached powers."""

    def __init__(self, primes: list[Ideal]):
        self.primes = list(primes)
        self.K = primes[0].field if primes else None
        self._cache = {}

    def power(self, i, e):
        key = (i, e)
        if key not in self._cache:
            P = self.primes[i] if e > 0 else ideal_conj(self.primes[i])
            out = principal_ideal(P.field, (1, 0))
            for _ in range(abs(e)):
                out = ideal_mul(out, P)
            self._cache[key] = out
        return self._cache[key]

    def ideal(self, exps) -> Ideal:
        out = principal_ideal(self.K, (1, 0))
        for i, e in enumerate(exps):
            if e:
                out = ideal_mul(out, self.power(i, e))
        return out


def ideal_class_group(K: QuadraticField, exclude: tuple[int, ...] = (), extra: int = 0) -> IdealClassData:
    """Class group from prime ideals of norm <= Minkowski bound (+ ``extra``).

    Primes dividing any entry of ``exclude`` are skipped, and the bound is
    raised until the excluded ones are no longer needed.
    """
    limit = minkowski_bound(K) + extra
    while True:
        primes, qs = [], []
        for q in primerange(2, limit + 1):
            if any(x % q == 0 for x in exclude):
                continue
            ps = prime_ideals_above(K, q)
            if len(ps) == 1 and splitting_type(K, q) is SplittingType.INERT:
                continue
            primes.append(ps[0])
            qs.append(q)
        arith = IdealArithmetic(primes)
        unit = [0] * len(primes)

        def equal(u, v):
            diff = [x - y for x, y in zip(u, v)]
            return is_principal(arith.ideal(diff))

        def mul(u, v):
            return tuple(x + y for x, y in zip(u, v))

        elements = [tuple(int(i == j) for j in range(len(primes))) for i in range(len(primes))]
        gens, rels, members = _abelian_structure(elements, tuple(unit), mul, equal)
        # express relations in terms of the chosen generator indices
        gen_idx = [elements.index(g) for g in gens]
        h = len(members)
        if not exclude or h == _class_number_unrestricted(K):
            break
        limit *= 2
    full_rels = []
    for rel, g in zip(rels, gens):
        full = [0] * len(primes)
        for coeff, gi in zip(rel, gen_idx):
            full[gi] += coeff
        full_rels.append(tuple(full))
    structure = tuple(e for e in intmat.smith_invariants(rels, len(gens)) if e > 1) if gens else ()
    return IdealClassData(h, structure, tuple(primes[i] for i in gen_idx),
                          tuple(full_rels), tuple(qs), tuple(primes))


def _class_number_unrestricted(K):
    return ideal_class_group(K).h


def class_number_by_ideals(K: QuadraticField) -> int:
    return ideal_class_group(K).h
