import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dihedral_selmer import intmat
from dihedral_selmer.groups import double_cosets, dihedral_group, dihedral_relation, find_class, subgroup_classes
from dihedral_selmer.regconst import (LatticeError, PairingMatrix, augmentation_kernel,
                                      character_lattice, check_pairing, direct_sum, fixed_lattice,
                                      invariant_pairing, perturbed_pairing, permutation_lattice,
                                      regular_lattice, regulator_constant, restricted_determinant,
                                      trivial_lattice, IntegralLattice)


def library(G):
    out = [trivial_lattice(G), regular_lattice(G)]
    out += [permutation_lattice(G, c.representative) for c in subgroup_classes(G)]
    return out


def by_hand(p):
    # rank 1: det((1/|H|) * 2p) on each fixed part
    theta = {1: 1, 2: -2, p: -1, 2 * p: 2}
    out = Fraction(1)
    for order, coeff in theta.items():
        out *= Fraction(2 * p, order) ** coeff
    return out


def permutation_oracle(G, theta, H):
    """On Z[G/H] with the averaged pairing |G| * (dot product), the K-fixed
    vectors have the K-orbit sums as a basis, orthogonal with squared length
    |G| * |orbit|.  Orbits of K on G/H are the double cosets K g H."""
    out = Fraction(1)
    for cls, coeff in theta.items():
        K = cls.representative
        det = Fraction(1)
        for dc in double_cosets(G, K, H):
            det *= Fraction(G.order * (len(dc) // len(H)), len(K))
        out *= det ** coeff
    return out


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_trivial_lattice(p):
    G = dihedral_group(p)
    assert regulator_constant(dihedral_relation(p), trivial_lattice(G)) == Fraction(1, p) == by_hand(p)


def test_trivial_rank_two():
    G = dihedral_group(3)
    assert regulator_constant(dihedral_relation(3), trivial_lattice(G, 2)) == Fraction(1, 9)


def test_invariant_pairing_examples():
    G = dihedral_group(3)
    assert invariant_pairing(trivial_lattice(G)).gram == ((6,),)
    reg = invariant_pairing(regular_lattice(G)).gram
    assert all(reg[i][i] == 6 for i in range(6))
    assert all(reg[i][j] == 0 for i in range(6) for j in range(6) if i != j)


def test_fixed_lattice_examples():
    G = dihedral_group(3)
    perm = permutation_lattice(G, find_class(G, "C2").representative)
    assert fixed_lattice(perm, set(G.elements)).basis == ((1, 1, 1),)
    assert fixed_lattice(regular_lattice(G), find_class(G, "Cp").representative).rank == 2
    assert fixed_lattice(regular_lattice(G), {0}).rank == 6


@pytest.mark.parametrize("p", [3, 5])
def test_fixed_lattice_saturated(p):
    G = dihedral_group(p)
    for lat in library(G):
        for c in subgroup_classes(G):
            basis = fixed_lattice(lat, c.representative).basis
            for h in c.representative:
                a = lat.matrix(h)
                for v in basis:
                    assert [sum(r[j] * v[j] for j in range(lat.rank)) for r in a] == list(v)
            if basis:
                assert intmat.smith_invariants(basis, lat.rank) == [1] * len(basis)


@pytest.mark.parametrize("p", [3, 5])
def test_known_values(p):
    G = dihedral_group(p)
    theta = dihedral_relation(p)
    # sign lattice: only 1 and Cp fix it, giving (2p)/(2p/p) = p
    sign = character_lattice(G, {"a": 1, "b": -1})
    assert regulator_constant(theta, sign) == p
    for c in subgroup_classes(G):
        lat = permutation_lattice(G, c.representative)
        assert regulator_constant(theta, lat) == permutation_oracle(G, theta, c.representative)
    # p = 3 by hand: basis e1-e2, e2-e3 gives det 108 on the whole lattice; the
    # C2-fixed part is spanned by (-2, 1, 1) with (1/2)*36 = 18; 108/18^2 = 1/3
    aug = augmentation_kernel(permutation_lattice(G, find_class(G, "C2").representative))
    assert regulator_constant(theta, aug) == Fraction(1, p)


@pytest.mark.parametrize("p", [3, 5])
def test_pairing_independence(p):
    G = dihedral_group(p)
    theta = dihedral_relation(p)
    rng = random.Random(p)
    for lat in library(G):
        base = regulator_constant(theta, lat)
        for _ in range(3):
            assert regulator_constant(theta, lat, perturbed_pairing(lat, rng)) == base


@given(st.integers(0, 10**6))
def test_multiplicativity_in_lattice(seed):
    G = dihedral_group(3)
    theta = dihedral_relation(3)
    lib = library(G) + [character_lattice(G, {"a": 1, "b": -1})]
    rng = random.Random(seed)
    a, b = rng.choice(lib), rng.choice(lib)
    assert regulator_constant(theta, direct_sum(a, b)) == \
        regulator_constant(theta, a) * regulator_constant(theta, b)


def test_multiplicativity_in_relation():
    G = dihedral_group(3)
    theta = dihedral_relation(3)
    for lat in library(G):
        assert regulator_constant(theta + theta, lat) == regulator_constant(theta, lat) ** 2


@given(st.integers(0, 10**6))
def test_basis_change_invariance(seed):
    G = dihedral_group(3)
    lat = regular_lattice(G)
    pairing = invariant_pairing(lat)
    rng = random.Random(seed)
    for c in subgroup_classes(G):
        basis = [list(v) for v in fixed_lattice(lat, c.representative).basis]
        k = len(basis)
        # random unimodular change of basis by elementary row operations
        changed = [row[:] for row in basis]
        for _ in range(5):
            i, j = rng.randrange(k), rng.randrange(k)
            if i != j:
                t = rng.randint(-3, 3)
                changed[i] = [x + t * y for x, y in zip(changed[i], changed[j])]
        scale = Fraction(1, c.order)
        assert restricted_determinant(pairing, changed, scale) == \
            restricted_determinant(pairing, basis, scale)


def test_check_pairing_rejects():
    G = dihedral_group(3)
    lat = permutation_lattice(G, find_class(G, "C2").representative)
    with pytest.raises(LatticeError):
        check_pairing(lat, PairingMatrix(((1, 0, 0), (0, 2, 0), (0, 0, 3))))
    with pytest.raises(LatticeError):
        check_pairing(lat, PairingMatrix(((1, 1, 1), (1, 1, 1), (1, 1, 1))))
    with pytest.raises(LatticeError):
        regulator_constant(dihedral_relation(3), lat, PairingMatrix(((0,) * 3,) * 3))


def test_lattice_rejects_bad_action():
    G = dihedral_group(3)
    with pytest.raises(LatticeError):
        IntegralLattice.from_generators(G, {"a": [[2]], "b": [[1]]})
    with pytest.raises(LatticeError):
        # a of order 2 violates a^3 = 1 together with b
        IntegralLattice.from_generators(G, {"a": [[-1]], "b": [[1]]})


def test_rank_zero():
    G = dihedral_group(3)
    lat = IntegralLattice(G, 0, (("a", ()), ("b", ())))
    assert invariant_pairing(lat).gram == ()
    assert regulator_constant(dihedral_relation(3), lat) == 1


def invariant_under_all(lattice, gram):
    n = lattice.rank
    for x in lattice.group.elements:
        a = lattice.matrix(x)
        moved = [[sum(a[k][i] * gram[k][l] * a[l][j] for k in range(n) for l in range(n))
                  for j in range(n)] for i in range(n)]
        if moved != [list(r) for r in gram]:
            return False
    return True


@given(st.integers(0, 10**6), st.booleans())
def test_generator_check_matches_full_check(seed, bump):
    G = dihedral_group(3)
    rng = random.Random(seed)
    lat = rng.choice(library(G))
    n = lat.rank
    gram = [list(r) for r in perturbed_pairing(lat, rng).gram]
    if bump:
        i, j = rng.randrange(n), rng.randrange(n)
        gram[i][j] += 1
        if i != j:
            gram[j][i] += 1
    pairing = PairingMatrix(tuple(map(tuple, gram)))
    try:
        check_pairing(lat, pairing)
        accepted = True
    except LatticeError:
        accepted = False
    assert accepted == (invariant_under_all(lat, gram) and intmat.det(gram) != 0)
