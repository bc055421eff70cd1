"""The nine acceptance criteria, each timed against its limit.

Run ``pytest tests/test_acceptance.py`` (or this file as a script); the
terminal summary has one PASS/FAIL line per criterion.
"""

import copy
import json
import random
import time
from fractions import Fraction

import pytest
from sympy import factorint

from dihedral_selmer import certify
from dihedral_selmer.cft import build_inert_datum, conductor_support, ray_class_quotient, unit_images
from dihedral_selmer.classgroup import class_group, class_number_by_ideals
from dihedral_selmer.groups import (all_relations, all_subgroups, cyclic_group, dihedral_group,
                                    dihedral_relation, double_cosets, find_class, is_relation)
from dihedral_selmer.legendre import LocalCurveData, Reduction, reduction_type, split_oracle
from dihedral_selmer import intmat
from dihedral_selmer.quadfield import QuadraticField
from dihedral_selmer.regconst import (character_lattice, direct_sum, perturbed_pairing,
                                      permutation_lattice, regular_lattice, regulator_constant,
                                      trivial_lattice)
from dihedral_selmer.tamagawa import LocalContext, local_quotient


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f} s, limit {self.limit} s"


@pytest.mark.criterion(1, "relation identity and rank-1 kernel", 1)
def test_criterion_1():
    with Clock(1):
        for p in (3, 5, 7, 11, 13, 31):
            G = dihedral_group(p)
            theta = dihedral_relation(p)
            labels = {c.label: a for c, a in theta.items()}
            assert labels == {"1": 1, "C2": -2, "Cp": -1, "G": 2}
            assert is_relation(G, theta.as_dict())
            kernel = all_relations(G)
            assert len(kernel) == 1
            assert kernel[0].coefficients in (theta.coefficients,
                                              tuple(-a for a in theta.coefficients))


@pytest.mark.criterion(2, "double-coset zero-sum over every subgroup D", 5)
def test_criterion_2():
    with Clock(5):
        for p in (3, 5, 7, 11):
            G = dihedral_group(p)
            theta = dihedral_relation(p)
            subs = all_subgroups(G)
            assert len(subs) == p + 3
            for D in subs:
                total = sum(a * len(double_cosets(G, D, c.representative)) for c, a in theta.items())
                assert total == 0


def _library(G):
    from dihedral_selmer.groups import subgroup_classes
    out = [trivial_lattice(G), regular_lattice(G)]
    out += [permutation_lattice(G, c.representative) for c in subgroup_classes(G)]
    return out


@pytest.mark.criterion(3, "regulator constants: 1/p, pairing independence, multiplicativity", 30)
def test_criterion_3():
    rng = random.Random(2024)
    with Clock(30):
        for p in (3, 5, 7, 11):
            G = dihedral_group(p)
            theta = dihedral_relation(p)
            assert regulator_constant(theta, trivial_lattice(G)) == Fraction(1, p)
            for lat in _library(G):
                base = regulator_constant(theta, lat)
                for _ in range(5):
                    assert regulator_constant(theta, lat, perturbed_pairing(lat, rng)) == base
        libs = {}
        for p in (3, 5, 7):
            G = dihedral_group(p)
            libs[p] = (dihedral_relation(p), _library(G) + [character_lattice(G, {"a": 1, "b": -1})])
        for _ in range(20):
            p = rng.choice(sorted(libs))
            theta, lib = libs[p]
            a, b = rng.choice(lib), rng.choice(lib)
            assert regulator_constant(theta, direct_sum(a, b)) == \
                regulator_constant(theta, a) * regulator_constant(theta, b)


def _cyclic_subgroups(G):
    return [S for S in all_subgroups(G) if any(G.element_order(x) == len(S) for x in S)]


@pytest.mark.criterion(4, "Tamagawa quotient 1/p at D = G, I = Cp; 1 for cyclic D", 5)
def test_criterion_4():
    with Clock(5):
        for p in (3, 11):
            G = dihedral_group(p)
            theta = dihedral_relation(p)
            for c in (1, 2, 3):
                ctx = LocalContext(7, LocalCurveData(7, Reduction.SPLIT_MULT, c),
                                   find_class(G, "G"), find_class(G, "Cp"))
                assert local_quotient(theta, ctx) == Fraction(1, p)
        G = dihedral_group(11)
        theta = dihedral_relation(11)
        cyclic = _cyclic_subgroups(G)
        assert len(cyclic) == 1 + 11 + 1
        for D in cyclic:
            for I in all_subgroups(G):
                if not I <= D:
                    continue
                for c in range(1, 7):
                    ctx = LocalContext(5, LocalCurveData(5, Reduction.SPLIT_MULT, c), D, I)
                    assert local_quotient(theta, ctx) == 1


@pytest.mark.criterion(5, "Legendre reduction rules agree with the node oracle", 60)
def test_criterion_5():
    checked = 0
    with Clock(60):
        for a in range(3, 2002, 2):
            for lam in (a, -a):
                for q in set(factorint(abs(lam))) | set(factorint(abs(lam - 1))):
                    if 2 < q < 10**4:
                        assert reduction_type(lam, q).type is split_oracle(lam, q), (lam, q)
                        checked += 1
    assert checked > 5000


@pytest.mark.criterion(6, "CFT datum for p = 3, d = -1, modulus 11*23", 10)
def test_criterion_6():
    with Clock(10):
        K = QuadraticField(-1)
        datum = build_inert_datum(K, 3, 11, 23)
        assert datum.residue.order == 120 * 528
        assert intmat.lattice_index([list(r) for r in datum.R_basis], datum.residue.rank) == 3
        assert datum.quotient_order == 3
        for i in range(datum.residue.rank):
            e = [int(j == i) for j in range(datum.residue.rank)]
            assert datum.chi(datum.residue.tau(e)) == (-datum.chi(e)) % 3
        assert conductor_support(datum) == {11, 23}
        (u,) = unit_images(K, datum.residue)
        orders = datum.residue.orders
        # order of the image of i: lcm over components of order / gcd(order, exponent)
        from math import gcd, lcm
        assert lcm(*(o // gcd(o, x) for o, x in zip(orders, u))) == 4
        assert datum.chi(u) == 0
        assert ray_class_quotient(K, datum, "full").order == 120 * 528 // 4


def _squarefree(n):
    return all(e == 1 for e in factorint(n).values())


@pytest.mark.criterion(7, "class numbers by forms and by ideals agree", 60)
def test_criterion_7():
    with Clock(60):
        for d in range(-200, 0):
            if d != -1 and not _squarefree(-d):
                continue
            K = QuadraticField(d)
            assert class_group(K).h == class_number_by_ideals(K), d
        assert [class_group(QuadraticField(d)).h for d in (-1, -5, -23)] == [1, 2, 3]


def _leaves(obj, path=()):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _leaves(v, path + (k,))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _leaves(v, path + (i,))
    else:
        yield path, obj


def _mutate(value, rng):
    if isinstance(value, bool):
        return not value
    try:
        return str(int(value) + rng.choice([-2, -1, 1, 2, 7]))
    except ValueError:
        pass
    try:
        return str(Fraction(value) * 3)
    except ValueError:
        return value + " "


def _certificate():
    return certify.run_construction(certify.ConstructionRequest(11, -1, 2, seed=0))


@pytest.mark.criterion(8, "end-to-end certificate for p = 11, d = -1, n = 2", 120)
def test_criterion_8():
    rng = random.Random(8)
    with Clock(120):
        cert = _certificate()
        assert int(cert["curve"]["lambda"]) % 32 == 17
        used = cert["primes_used"]
        assert len(used) == 2 and cert["extension"]["ramified_primes"] == used
        assert Fraction(cert["tamagawa"]["value"]) == Fraction(1, 121)
        B = int(cert["torsion"]["bound"])
        assert B % 4 == 0 and B % 11 != 0
        assert certify.verify_certificate(json.loads(certify.dumps(cert))).passed
        leaves = list(_leaves(cert))
        for path, value in leaves + rng.sample(leaves, 40):
            bad = copy.deepcopy(cert)
            node = bad
            for k in path[:-1]:
                node = node[k]
            node[path[-1]] = _mutate(value, rng)
            assert not certify.verify_certificate(bad).passed, path
        assert len(leaves) + 40 >= 50


@pytest.mark.criterion(9, "determinism: byte-identical certificates", 120)
def test_criterion_9():
    with Clock(120):
        assert certify.dumps(_certificate()) == certify.dumps(_certificate())


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
