"""Regulator constants of integral G-lattices.

A lattice is Z^r with G acting on column vectors through integer matrices.
All arithmetic is exact (ints and Fractions).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import intmat
from .groups import GRelation, GroupTable, coset_action


class LatticeError(ValueError):
    pass


def _mat(rows):
    return tuple(tuple(int(e) for e in r) for r in rows)


def _element_words(G: GroupTable):
    """For each element, a word in the generator labels reaching it."""
    words = {0: ()}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for label, g in G.generators:
                y = G.mul[x][g]
                if y not in words:
                    words[y] = words[x] + (label,)
                    nxt.append(y)
        frontier = nxt
    if len(words) != G.order:
        raise LatticeError("group generators do not generate the group")
    return words


@dataclass(frozen=True)
class IntegralLattice:
    """Z-free G-module of rank ``rank``; ``action`` maps generator labels to
    integer matrices acting on column vectors."""

    group: GroupTable
    rank: int
    action: tuple[tuple[str, tuple[tuple[int, ...], ...]], ...]

    def __post_init__(self):
        gens = dict(self.group.generators)
        acts = dict(self.action)
        if set(acts) != set(gens):
            raise LatticeError("need one matrix per group generator")
        for m in acts.values():
            if len(m) != self.rank or any(len(r) != self.rank for r in m):
                raise LatticeError("action matrix has the wrong size")
            if abs(intmat.det(m)) != 1:
                raise LatticeError("action matrix is not invertible over Z")
        mats = self._all_matrices()
        # homomorphism: A_{xg} = A_x A_g for every generator g
        for x in self.group.elements:
            for label, g in self.group.generators:
                if mats[self.group.mul[x][g]] != _mat(intmat.matmul(mats[x], acts[label])):
                    raise LatticeError("action matrices violate the group relations")
        object.__setattr__(self, "_matrices", mats)

    def _all_matrices(self):
        acts = dict(self.action)
        ident = _mat(intmat.identity(self.rank))
        mats = {}
        for x, word in _element_words(self.group).items():
            m = ident
            for label in word:
                m = _mat(intmat.matmul(m, acts[label]))
            mats[x] = m
        return mats

    def matrix(self, g):
        return self._matrices[g]

    @classmethod
    def from_generators(cls, G: GroupTable, action: dict) -> "IntegralLattice":
        rank = len(next(iter(action.values()))) if action else 0
        return cls(G, rank, tuple((k, _mat(v)) for k, v in sorted(action.items())))


def trivial_lattice(G: GroupTable, rank: int = 1) -> IntegralLattice:
    ident = _mat(intmat.identity(rank))
    return IntegralLattice(G, rank, tuple((label, ident) for label, _ in G.generators))


def permutation_lattice(G: GroupTable, H) -> IntegralLattice:
    """Z[G/H] with G permuting the left cosets."""
    cosets, perms = coset_action(G, H)
    n = len(cosets)
    action = []
    for label, g in G.generators:
        m = [[0] * n for _ in range(n)]
        for j in range(n):
            m[perms[g][j]][j] = 1
        action.append((label, _mat(m)))
    return IntegralLattice(G, n, tuple(action))


def regular_lattice(G: GroupTable) -> IntegralLattice:
    return permutation_lattice(G, {0})


def direct_sum(a: IntegralLattice, b: IntegralLattice) -> IntegralLattice:
    if a.group != b.group:
        raise LatticeError("lattices over different groups")
    acts_b = dict(b.action)
    action = []
    n = a.rank + b.rank
    for label, ma in a.action:
        mb = acts_b[label]
        m = [[0] * n for _ in range(n)]
        for i in range(a.rank):
            m[i][:a.rank] = ma[i]
        for i in range(b.rank):
            m[a.rank + i][a.rank:] = mb[i]
        action.append((label, _mat(m)))
    return IntegralLattice(a.group, n, tuple(action))


def character_lattice(G: GroupTable, signs: dict) -> IntegralLattice:
    """Rank-1 lattice where generator ``label`` acts by ``signs[label]`` (+1/-1)."""
    return IntegralLattice(G, 1, tuple((label, ((int(signs[label]),),)) for label, _ in G.generators))


def sublattice(lattice: IntegralLattice, basis) -> IntegralLattice:
    """The G-stable sublattice spanned by ``basis`` rows, in that basis."""
    basis = [list(b) for b in basis]
    k = len(basis)
    bt = intmat.transpose(basis, k)
    action = []
    for label, a in lattice.action:
        cols = []
        for b in basis:
            image = [sum(x * y for x, y in zip(row, b)) for row in a]
            coords = _solve(bt, image)
            if coords is None or any(c.denominator != 1 for c in coords):
                raise LatticeError("basis does not span a G-stable saturated sublattice")
            cols.append([int(c) for c in coords])
        action.append((label, _mat(intmat.transpose(cols, k))))
    return IntegralLattice(lattice.group, k, tuple(action))


def _solve(a, b):
    """Unique rational x with a x = b (a of full column rank), else None."""
    rows = [[Fraction(e) for e in r] + [Fraction(v)] for r, v in zip(a, b)]
    ncols = len(a[0]) if a else 0
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            return None
        rows[r], rows[pr] = rows[pr], rows[r]
        rows[r] = [e / rows[r][c] for e in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [e - f * g for e, g in zip(rows[i], rows[r])]
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    return [rows[i][-1] for i in range(ncols)]


def augmentation_kernel(lattice: IntegralLattice) -> IntegralLattice:
    """Vectors with coordinate sum zero (for a permutation lattice)."""
    n = lattice.rank
    basis = intmat.integer_kernel([[1] * n], ncols=n)
    return sublattice(lattice, basis)


@dataclass(frozen=True)
class PairingMatrix:
    gram: tuple[tuple[Fraction, ...], ...]

    @property
    def rank(self):
        return len(self.gram)


def check_pairing(lattice: IntegralLattice, pairing: PairingMatrix):
    """Raise unless the pairing is symmetric, non-degenerate and G-invariant."""
    g = [list(r) for r in pairing.gram]
    n = lattice.rank
    if len(g) != n or any(len(r) != n for r in g):
        raise LatticeError("pairing has the wrong size")
    if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
        raise LatticeError("pairing is not symmetric")
    if n and intmat.det(g) == 0:
        raise LatticeError("pairing is degenerate")
    # invariance under the generators implies it for the whole group;
    # clear denominators so the products stay in the integers
    den = lcm(*(Fraction(e).denominator for r in g for e in r)) if n else 1
    gi = [[int(e * den) for e in r] for r in g]
    for _, x in lattice.group.generators:
        a = lattice.matrix(x)
        if intmat.matmul(intmat.matmul(intmat.transpose(a, n), gi), a) != gi:
            raise LatticeError("pairing is not G-invariant")


def _average(lattice, s):
    n = lattice.rank
    total = [[0] * n for _ in range(n)]
    for x in lattice.group.elements:
        a = lattice.matrix(x)
        t = intmat.matmul(intmat.matmul(intmat.transpose(a, n), s), a)
        total = [[u + v for u, v in zip(r1, r2)] for r1, r2 in zip(total, t)]
    return total


def invariant_pairing(lattice: IntegralLattice) -> PairingMatrix:
    """sum over g of A_g^T A_g: symmetric, positive definite, G-invariant."""
    n = lattice.rank
    gram = _average(lattice, intmat.identity(n))
    return PairingMatrix(tuple(tuple(Fraction(e) for e in r) for r in gram))


def perturbed_pairing(lattice: IntegralLattice, rng: random.Random, size: int = 2) -> PairingMatrix:
    """The averaged pairing plus the G-average of B^T B for a random integer B.

    B^T B is positive semidefinite, so the result stays positive definite.
    """
    n = lattice.rank
    b = [[rng.randint(-size, size) for _ in range(n)] for _ in range(n)]
    s = intmat.matmul(intmat.transpose(b, n), b)
    base = invariant_pairing(lattice).gram
    extra = _average(lattice, s)
    scale = Fraction(rng.randint(1, 5), rng.randint(1, 5))
    gram = [[Fraction(u) + scale * v for u, v in zip(r1, r2)] for r1, r2 in zip(base, extra)]
    return PairingMatrix(tuple(map(tuple, gram)))


@dataclass(frozen=True)
class FixedSublattice:
    """Saturated Z-basis (as rows) of the H-fixed vectors."""

    basis: tuple[tuple[int, ...], ...]

    @property
    def rank(self):
        return len(self.basis)


def fixed_lattice(lattice: IntegralLattice, H) -> FixedSublattice:
    """Kernel of the stacked matrices (A_h - I), h in H, as a saturated basis."""
    H = getattr(H, "representative", H)
    n = lattice.rank
    if n == 0:
        return FixedSublattice(())
    rows = []
    for h in sorted(H):
        a = lattice.matrix(h)
        rows.extend([a[i][j] - (i == j) for j in range(n)] for i in range(n))
    return FixedSublattice(tuple(map(tuple, intmat.integer_kernel(rows, ncols=n))))


def restricted_determinant(pairing: PairingMatrix, basis, scale=Fraction(1)) -> Fraction:
    """det of (scale * pairing) on the span of the given basis rows."""
    g = pairing.gram
    k = len(basis)
    m = [[scale * sum(bi[s] * g[s][t] * bj[t] for s in range(len(g)) for t in range(len(g)) if bi[s] and bj[t])
          for bj in basis] for bi in basis]
    return intmat.det(m) if k else Fraction(1)


def regulator_constant(theta: GRelation, lattice: IntegralLattice,
                       pairing: PairingMatrix | None = None) -> Fraction:
    """Product over theta of det((1/|H|) <,> on the H-fixed sublattice)^coeff."""
    if pairing is None:
        pairing = invariant_pairing(lattice)
    check_pairing(lattice, pairing)
    out = Fraction(1)
    for cls, coeff in theta.items():
        fixed = fixed_lattice(lattice, cls.representative)
        d = restricted_determinant(pairing, fixed.basis, Fraction(1, cls.order))
        if d == 0:
            raise LatticeError(f"pairing is degenerate on the {cls.label}-fixed sublattice")
        out *= d ** coeff
    return out
