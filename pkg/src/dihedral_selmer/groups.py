"""Finite groups given by multiplication tables.

Enough group theory for the dihedral group of order 2p: subgroup classes,
permutation characters of Z[G/H], relations between permutation
representations, double cosets, and an explicit G-map between permutation
lattices realising a relation.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping

from sympy import isprime

from . import intmat


class GroupError(ValueError):
    pass


class SearchExhausted(RuntimeError):
    """No injective G-map was found within the coefficient bound."""


@dataclass(frozen=True)
class GroupTable:
    """Group on the elements ``0 .. order-1`` with identity 0.

    ``generators`` maps a label to an element index; ``name`` is informative.
    """

    order: int
    mul: tuple[tuple[int, ...], ...]
    inverse: tuple[int, ...]
    generators: tuple[tuple[str, int], ...] = ()
    name: str = ""
    dihedral_p: int | None = None

    def __post_init__(self):
        n = self.order
        if n < 1 or len(self.mul) != n or any(len(r) != n for r in self.mul):
            raise GroupError("multiplication table has the wrong shape")
        if len(self.inverse) != n:
            raise GroupError("inverse table has the wrong length")

    def __repr__(self):
        return f"GroupTable({self.name or self.order})"

    @property
    def elements(self):
        return range(self.order)

    def m(self, x, y):
        return self.mul[x][y]

    def power(self, x, k):
        out = 0
        for _ in range(k):
            out = self.mul[out][x]
        return out

    def element_order(self, x):
        k, y = 1, x
        while y != 0:
            y = self.mul[y][x]
            k += 1
        return k

    def conj(self, g, x):
        """g x g^-1."""
        return self.mul[self.mul[g][x]][self.inverse[g]]

    def gen(self, label):
        return dict(self.generators)[label]

    def check(self):
        """Verify associativity, identity and two-sided inverses."""
        n, mul = self.order, self.mul
        for x in range(n):
            if mul[0][x] != x or mul[x][0] != x:
                raise GroupError("element 0 is not an identity")
            if mul[x][self.inverse[x]] != 0 or mul[self.inverse[x]][x] != 0:
                raise GroupError(f"inverse of {x} is wrong")
        for x, y, z in itertools.product(range(n), repeat=3):
            if mul[mul[x][y]][z] != mul[x][mul[y][z]]:
                raise GroupError(f"not associative at {(x, y, z)}")
        return True


def dihedral_group(p: int) -> GroupTable:
    """<a, b | a^p = b^2 = (ab)^2 = 1>; element a^i b^s has index i + p*s."""
    if p < 3 or p % 2 == 0 or not isprime(p):
        raise GroupError(f"p must be an odd prime, got {p}")
    n = 2 * p

    def split(k):
        return k % p, k // p

    mul = []
    for x in range(n):
        i, s = split(x)
        row = []
        for y in range(n):
            j, t = split(y)
            k = (i + (j if s == 0 else -j)) % p
            row.append(k + p * ((s + t) % 2))
        mul.append(tuple(row))
    inv = tuple(next(y for y in range(n) if mul[x][y] == 0) for x in range(n))
    return GroupTable(n, tuple(mul), inv, (("a", 1), ("b", p)), f"D{n}", p)


def cyclic_group(n: int) -> GroupTable:
    if n < 1:
        raise GroupError("order must be positive")
    mul = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    inv = tuple((-i) % n for i in range(n))
    gens = (("a", 1 % n),) if n > 1 else ()
    return GroupTable(n, mul, inv, gens, f"C{n}")


def trivial_group() -> GroupTable:
    return cyclic_group(1)


def closure(G: GroupTable, gens) -> frozenset:
    sub = {0}
    frontier = [0]
    gens = list(gens)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = G.mul[x][g]
            if y not in sub:
                sub.add(y)
                frontier.append(y)
    return frozenset(sub)


@functools.lru_cache(maxsize=64)
def conjugacy_classes(G: GroupTable) -> tuple[frozenset, ...]:
    seen, out = set(), []
    for x in G.elements:
        if x in seen:
            continue
        cls = frozenset(G.conj(g, x) for g in G.elements)
        seen |= cls
        out.append(cls)
    return tuple(out)


def all_subgroups(G: GroupTable) -> list[frozenset]:
    """Every subgroup generated by at most two elements.

    This is all subgroups for dihedral and cyclic groups; for general groups
    of larger order it may miss subgroups needing three generators.
    """
    subs = {closure(G, [x, y]) for x in G.elements for y in G.elements if x <= y}
    subs.add(frozenset({0}))
    return sorted(subs, key=lambda s: (len(s), sorted(s)))


def _is_cyclic(G, sub):
    return any(G.element_order(x) == len(sub) for x in sub)


@dataclass(frozen=True)
class SubgroupClass:
    """A conjugacy class of subgroups, stored with one representative."""

    representative: frozenset
    class_size: int
    label: str
    conjugates: tuple[frozenset, ...] = field(repr=False, compare=False, default=())

    @property
    def order(self):
        return len(self.representative)


def _label(G, sub):
    if len(sub) == 1:
        return "1"
    if len(sub) == G.order:
        return "G"
    if G.dihedral_p is not None:
        return "C2" if len(sub) == 2 else "Cp"
    return f"C{len(sub)}" if _is_cyclic(G, sub) else f"H{len(sub)}"


def subgroup_classes(G: GroupTable) -> list[SubgroupClass]:
    """Conjugacy classes of subgroups, ordered by subgroup order.

    For a dihedral group of order 2p this is ``[1, C2, Cp, G]``.
    """
    return list(_subgroup_classes(G))


@functools.lru_cache(maxsize=64)
def _subgroup_classes(G):
    seen, out = set(), []
    for sub in all_subgroups(G):
        if sub in seen:
            continue
        conj = {frozenset(G.conj(g, x) for x in sub) for g in G.elements}
        seen |= conj
        rep = min(conj, key=lambda s: sorted(s))
        ordered = tuple(sorted(conj, key=lambda s: sorted(s)))
        out.append(SubgroupClass(rep, len(conj), _label(G, rep), ordered))
    return tuple(out)


def find_class(G: GroupTable, key) -> SubgroupClass:
    """Look up a subgroup class by label, SubgroupClass, or subgroup set."""
    classes = subgroup_classes(G)
    if isinstance(key, SubgroupClass):
        key = key.representative
    if isinstance(key, str):
        for c in classes:
            if c.label == key:
                return c
        raise GroupError(f"no subgroup class labelled {key!r} in {G!r}")
    key = frozenset(key)
    for c in classes:
        if key in c.conjugates:
            return c
    raise GroupError(f"{sorted(key)} is not a subgroup of {G!r}")


def is_subgroup(G: GroupTable, sub) -> bool:
    sub = frozenset(sub)
    if 0 not in sub:
        return False
    return all(G.mul[x][G.inverse[y]] in sub for x in sub for y in sub)


@dataclass(frozen=True)
class ClassFunction:
    """Integer-valued function constant on conjugacy classes."""

    group: GroupTable
    values: tuple[tuple[frozenset, int], ...]

    def __call__(self, g):
        for cls, v in self.values:
            if g in cls:
                return v
        raise KeyError(g)

    def as_dict(self):
        return dict(self.values)


def left_cosets(G: GroupTable, H) -> list[frozenset]:
    H = frozenset(H)
    seen, out = set(), []
    for x in G.elements:
        if x in seen:
            continue
        c = frozenset(G.mul[x][h] for h in H)
        seen |= c
        out.append(c)
    return out


def permutation_character(G: GroupTable, H) -> ClassFunction:
    """Character of C[G/H]: the number of cosets xH fixed by g."""
    H = H.representative if isinstance(H, SubgroupClass) else frozenset(H)
    if not is_subgroup(G, H):
        raise GroupError("H is not a subgroup")
    cosets = left_cosets(G, H)
    vals = []
    for cls in conjugacy_classes(G):
        g = min(cls)
        fixed = sum(1 for c in cosets if G.mul[g][min(c)] in c)
        vals.append((cls, fixed))
    return ClassFunction(G, tuple(vals))


def character_matrix(G: GroupTable, classes=None):
    """Rows: conjugacy classes of elements; columns: permutation characters."""
    classes = subgroup_classes(G) if classes is None else classes
    chars = [permutation_character(G, c) for c in classes]
    return [[ch(min(cc)) for ch in chars] for cc in conjugacy_classes(G)]


def _coefficient_vector(G, theta, classes):
    vec = [0] * len(classes)
    for key, coeff in theta.items():
        idx = classes.index(find_class(G, key))
        vec[idx] += int(coeff)
    return vec


def is_relation(G: GroupTable, theta: Mapping) -> bool:
    """True iff sum(coeff * character of C[G/H]) vanishes identically."""
    classes = subgroup_classes(G)
    vec = _coefficient_vector(G, theta, classes)
    return all(sum(a * c for a, c in zip(row, vec)) == 0
               for row in character_matrix(G, classes))


@dataclass(frozen=True)
class GRelation:
    """Integer combination of subgroup classes in the kernel of the map from
    the Burnside ring to the representation ring.

    Build through :meth:`from_coefficients`, which checks membership.
    """

    group: GroupTable
    classes: tuple[SubgroupClass, ...]
    coefficients: tuple[int, ...]

    @classmethod
    def from_coefficients(cls, G: GroupTable, theta: Mapping) -> "GRelation":
        classes = subgroup_classes(G)
        vec = _coefficient_vector(G, theta, classes)
        if not is_relation(G, dict(zip(classes, vec))):
            raise GroupError(f"{theta} is not a relation of {G!r}")
        return cls(G, tuple(classes), tuple(vec))

    def items(self):
        return [(c, a) for c, a in zip(self.classes, self.coefficients) if a]

    def as_dict(self):
        return {c.label: a for c, a in zip(self.classes, self.coefficients)}

    def positive(self):
        """Subgroups H_i with multiplicity (terms with positive coefficient)."""
        return [c for c, a in self.items() if a > 0 for _ in range(a)]

    def negative(self):
        return [c for c, a in self.items() if a < 0 for _ in range(-a)]

    def __add__(self, other):
        if other.classes != self.classes:
            raise GroupError("relations live on different groups")
        return GRelation(self.group, self.classes,
                         tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __str__(self):
        terms = []
        for c, a in self.items():
            mag = "" if abs(a) == 1 else str(abs(a))
            sign = "-" if a < 0 else "+"
            terms.append(f"{sign} {mag}{c.label}")
        s = " ".join(terms).lstrip("+ ")
        return s or "0"


def dihedral_relation(p: int) -> GRelation:
    """1 - 2 C2 - Cp + 2 G in the dihedral group of order 2p."""
    G = dihedral_group(p)
    return GRelation.from_coefficients(G, {"1": 1, "C2": -2, "Cp": -1, "G": 2})


def all_relations(G: GroupTable) -> list[GRelation]:
    """Z-basis of the relation lattice, each vector with leading entry > 0."""
    classes = subgroup_classes(G)
    basis = intmat.integer_kernel(character_matrix(G, classes), ncols=len(classes))
    out = []
    for v in basis:
        lead = next(e for e in v if e)
        if lead < 0:
            v = [-e for e in v]
        out.append(GRelation(G, tuple(classes), tuple(v)))
    return out


def double_cosets(G: GroupTable, D, H) -> list[frozenset]:
    """The double cosets D g H as element sets."""
    D, H = frozenset(D), frozenset(H)
    seen, out = set(), []
    for g in G.elements:
        if g in seen:
            continue
        dc = frozenset(G.mul[G.mul[d][g]][h] for d in D for h in H)
        seen |= dc
        out.append(dc)
    return out


def double_coset_count(G: GroupTable, D, H) -> int:
    """#(D\\G/H), counted as orbits of D on the left cosets G/H."""
    D = D.representative if isinstance(D, SubgroupClass) else frozenset(D)
    H = H.representative if isinstance(H, SubgroupClass) else frozenset(H)
    cosets = left_cosets(G, H)
    index = {x: i for i, c in enumerate(cosets) for x in c}
    seen, orbits = set(), 0
    for i, c in enumerate(cosets):
        if i in seen:
            continue
        orbits += 1
        x = min(c)
        seen |= {index[G.mul[d][x]] for d in D}
    return orbits


# --- G-maps between permutation lattices ---------------------------------

def coset_action(G: GroupTable, H):
    """Left cosets of H and, for each g, the permutation it induces on them."""
    cosets = left_cosets(G, H)
    index = {x: i for i, c in enumerate(cosets) for x in c}
    perms = [tuple(index[G.mul[g][min(c)]] for c in cosets) for g in G.elements]
    return cosets, perms


def hom_basis(G: GroupTable, H, K) -> list[list[list[int]]]:
    """Z-basis of Hom_G(Z[G/H], Z[G/K]) as matrices (rows: G/K, cols: G/H).

    One basis map per H-orbit on G/K, i.e. per double coset H\\G/K: the coset
    xH goes to x times the orbit sum.
    """
    H, K = frozenset(H), frozenset(K)
    src, _ = coset_action(G, H)
    tgt, perms = coset_action(G, K)
    tindex = {x: i for i, c in enumerate(tgt) for x in c}
    orbits, seen = [], set()
    for i, c in enumerate(tgt):
        if i in seen:
            continue
        orb = {tindex[G.mul[h][min(c)]] for h in H}
        seen |= orb
        orbits.append(sorted(orb))
    basis = []
    for orb in orbits:
        mat = [[0] * len(src) for _ in tgt]
        for j, c in enumerate(src):
            x = min(c)
            for t in orb:
                mat[perms[x][t]][j] += 1
        basis.append(mat)
    return basis


@dataclass(frozen=True)
class RelationIsogeny:
    """A G-injection between the two sides of a relation and its cokernel."""

    matrix: tuple[tuple[int, ...], ...]
    coefficients: tuple[int, ...]
    degree: int
    attempts: int


def relation_isogeny(G: GroupTable, theta: GRelation, seed: int = 0,
                     bound: int = 3, max_attempts: int = 200) -> RelationIsogeny:
    """Search for an injective G-map f: sum Z[G/H_i] -> sum Z[G/H'_j].

    Coefficients on the double-coset basis of each block are drawn from
    ``[-bound, bound]`` by a generator seeded with ``seed``; the bound grows by
    one after each ``max_attempts`` failures, up to 4 rounds. ``degree`` is
    the order of coker(f), computed from the Smith normal form.
    """
    pos, neg = theta.positive(), theta.negative()
    if not pos or not neg:
        raise GroupError("relation needs both positive and negative terms")
    src = [left_cosets(G, H.representative) for H in pos]
    tgt = [left_cosets(G, H.representative) for H in neg]
    nsrc, ntgt = sum(map(len, src)), sum(map(len, tgt))
    if nsrc != ntgt:
        raise GroupError("sides have different rank; not a relation")
    blocks = []
    for j, Hj in enumerate(neg):
        for i, Hi in enumerate(pos):
            blocks.append((j, i, hom_basis(G, Hi.representative, Hj.representative)))
    roff = list(itertools.accumulate([0] + [len(t) for t in tgt]))
    coff = list(itertools.accumulate([0] + [len(s) for s in src]))
    rng = random.Random(seed)
    attempts = 0
    for rnd in range(4):
        b = bound + rnd
        for _ in range(max_attempts):
            attempts += 1
            coeffs = []
            mat = [[0] * nsrc for _ in range(ntgt)]
            for j, i, basis in blocks:
                for bm in basis:
                    c = rng.randint(-b, b)
                    coeffs.append(c)
                    if not c:
                        continue
                    for r, row in enumerate(bm):
                        for s, e in enumerate(row):
                            if e:
                                mat[roff[j] + r][coff[i] + s] += c * e
            d = intmat.cokernel_order(mat)
            if d:
                return RelationIsogeny(tuple(map(tuple, mat)), tuple(coeffs), d, attempts)
    raise SearchExhausted(f"no injective G-map after {attempts} attempts")


def relation_isogeny_degree(G: GroupTable, theta: GRelation, seed: int = 0) -> int:
    return relation_isogeny(G, theta, seed).degree


def is_equivariant(G: GroupTable, mat, src_subgroups, tgt_subgroups) -> bool:
    """Check f(g.x) = g.f(x) for a matrix between permutation lattices."""
    def block_perm(subs):
        perms_by_g = [[] for _ in G.elements]
        off = 0
        for H in subs:
            _, perms = coset_action(G, H)
            for g in G.elements:
                perms_by_g[g].extend(off + t for t in perms[g])
            off += len(perms[0])
        return perms_by_g

    ps, pt = block_perm(src_subgroups), block_perm(tgt_subgroups)
    for g in G.elements:
        for col in range(len(mat[0])):
            for row in range(len(mat)):
                if mat[pt[g][row]][ps[g][col]] != mat[row][col]:
                    return False
    return True
