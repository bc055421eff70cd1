"""Tamagawa quotients attached to a G-relation.

For a place v of Q with decomposition group D and inertia group I in
G = Gal(F/Q), the places of F^H above v correspond to double cosets H g D.
Split multiplicative reduction stays split in every extension, and the
Tamagawa number scales with the ramification index, so each place
contributes e * c.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cft import CYCLIC, CyclicFlag
from .groups import GRelation, GroupTable, SubgroupClass, double_cosets
from .legendre import LocalCurveData, Reduction


class UnsupportedContext(ValueError):
    pass


def _subgroup(x):
    if isinstance(x, SubgroupClass):
        return x.representative
    return frozenset(x)


def _is_cyclic(G: GroupTable, sub) -> bool:
    return any(G.element_order(x) == len(sub) for x in sub)


@dataclass(frozen=True)
class LocalContext:
    v: int
    curve_local: LocalCurveData
    D: object
    I: object = None

    @property
    def cyclic_flag(self):
        return isinstance(self.D, CyclicFlag)


@dataclass(frozen=True)
class Place:
    representative: int
    e: int
    f: int


def _check_inertia(G, D, I):
    if not I <= D:
        raise UnsupportedContext("inertia group is not contained in the decomposition group")
    for g in D:
        if frozenset(G.conj(g, x) for x in I) != I:
            raise UnsupportedContext("inertia group is not normal in the decomposition group")


def places_above(G: GroupTable, H, D, I) -> list[Place]:
    """Places of F^H over v: e = [I : I n g^-1 H g], e f = [D : D n g^-1 H g]."""
    H, D, I = _subgroup(H), _subgroup(D), _subgroup(I)
    _check_inertia(G, D, I)
    out = []
    for dc in double_cosets(G, H, D):
        g = min(dc)
        conj = frozenset(G.conj(G.inverse[g], h) for h in H)
        e = len(I) // len(I & conj)
        ef = len(D) // len(D & conj)
        out.append(Place(g, e, ef // e))
    if sum(p.e * p.f for p in out) * len(H) != G.order:
        raise AssertionError("sum of e f over places is not [G : H]")
    return out


def _split_mult_quotient(theta, D, I, c):
    G = theta.group
    out = Fraction(1)
    for cls, coeff in theta.items():
        local = 1
        for place in places_above(G, cls.representative, D, I):
            local *= place.e * c
        out *= Fraction(local) ** coeff
    return out


def local_quotient(theta: GRelation, ctx: LocalContext) -> Fraction:
    """C_v(E / theta) for one prime v."""
    if ctx.cyclic_flag:
        return Fraction(1)
    G = theta.group
    D = _subgroup(ctx.D)
    I = _subgroup(ctx.I) if ctx.I is not None else frozenset({0})
    kind = ctx.curve_local.type
    cyclic = _is_cyclic(G, D)
    if kind is not Reduction.SPLIT_MULT:
        if cyclic:
            return Fraction(1)
        raise UnsupportedContext(
            f"{kind.value} reduction at {ctx.v} with non-cyclic decomposition group")
    value = _split_mult_quotient(theta, D, I, ctx.curve_local.c_exponent)
    if cyclic and value != 1:
        raise AssertionError("cyclic decomposition group gave a nontrivial quotient")
    return value


def ord_p(x: Fraction, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    k = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        k += 1
    while d % p == 0:
        d //= p
        k -= 1
    return k


@dataclass(frozen=True)
class GlobalQuotient:
    value: Fraction
    ordp: int
    per_prime: tuple[tuple[int, Fraction], ...]


def global_quotient(theta: GRelation, contexts, p: int) -> GlobalQuotient:
    per_prime = []
    value = Fraction(1)
    for ctx in sorted(contexts, key=lambda c: c.v):
        x = local_quotient(theta, ctx)
        per_prime.append((ctx.v, x))
        value *= x
    return GlobalQuotient(value, ord_p(value, p), tuple(per_prime))


def pipeline_context(v: int, curve_local: LocalCurveData, local) -> LocalContext:
    """Context from ``cft.local_data`` output: a (D, I) pair or CYCLIC."""
    if local is CYCLIC:
        return LocalContext(v, curve_local, CYCLIC)
    D, I = local
    return LocalContext(v, curve_local, D, I)
