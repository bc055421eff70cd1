import pytest
from hypothesis import given, strategies as st
from sympy import factorint

from dihedral_selmer.legendre import (CurveError, Reduction, TorsionError, bad_primes,
                                      construct_lambda, count_points, good_model_at_2,
                                      invariants, ord_q, reduction_type, split_oracle,
                                      torsion_probe)

odd_lambda = st.integers(-5000, 5000).map(lambda x: 2 * x + 1).filter(lambda x: x != 1)


def test_invariant_examples():
    inv = invariants(3)
    assert (inv.c4, inv.delta) == (112, 576)
    inv = invariants(-1)
    assert (inv.c4, inv.delta) == (48, 64)
    assert inv.j_num == 1728 and inv.j_den == 1
    assert invariants(17).delta == 16 * 289 * 256


@given(odd_lambda)
def test_j_relation(lam):
    inv = invariants(lam)
    assert inv.j_num * inv.delta == inv.c4 ** 3 * inv.j_den
    from math import gcd
    assert gcd(inv.j_num, inv.j_den) == 1


def test_reduction_examples():
    loc = reduction_type(4049, 11)
    assert loc.type is Reduction.SPLIT_MULT and loc.c_exponent == 2
    assert reduction_type(3, 3).type is Reduction.NONSPLIT_MULT
    assert reduction_type(17, 2).type is Reduction.GOOD
    assert reduction_type(33, 2).potentially_good is False
    assert reduction_type(35, 2).potentially_good is True
    assert reduction_type(4049, 7).type is Reduction.GOOD


def test_split_oracle_examples():
    assert split_oracle(5, 5) is Reduction.SPLIT_MULT
    assert split_oracle(3, 3) is Reduction.NONSPLIT_MULT
    for lam in (23, 45, 67):
        for q in factorint(lam - 1):
            if q > 2:
                assert split_oracle(lam, q) is Reduction.SPLIT_MULT
    with pytest.raises(CurveError):
        split_oracle(5, 7)


@given(odd_lambda)
def test_rules_agree_with_oracle(lam):
    for q in set(factorint(abs(lam))) | set(factorint(abs(lam - 1))):
        if q > 2:
            assert reduction_type(lam, q).type is split_oracle(lam, q)


@given(odd_lambda)
def test_c_exponent(lam):
    for q in factorint(abs(lam - 1)):
        if q > 2:
            assert reduction_type(lam, q).c_exponent == 2 * ord_q(lam - 1, q)


def test_construct_lambda():
    assert construct_lambda([11, 23]) == 4049 and 4049 % 32 == 17
    assert construct_lambda([11]) == 177
    assert reduction_type(177, 11).type is Reduction.SPLIT_MULT
    assert construct_lambda([]) == 17
    assert [(b.q, b.type) for b in bad_primes(17)] == [(2, Reduction.GOOD), (17, Reduction.SPLIT_MULT)]
    for bad in ([11, 11], [2, 3], [9]):
        with pytest.raises(CurveError):
            construct_lambda(bad)


@given(st.lists(st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23, 29, 31]), unique=True, max_size=5))
def test_construct_lambda_properties(primes):
    lam = construct_lambda(primes)
    assert lam % 32 == 17
    good_model_at_2(lam)
    for q in primes:
        assert reduction_type(lam, q).c_exponent == 2


@pytest.mark.parametrize("lam", [17, 49, 4049, -15])
def test_good_model(lam):
    m = good_model_at_2(lam)
    assert m.a1 == 1 and m.discriminant() % 2 == 1


def test_good_model_rejects():
    with pytest.raises(CurveError):
        good_model_at_2(33)


def brute_points(lam, ell):
    pts = 1
    for x in range(ell):
        for y in range(ell):
            if (y * y - x * (x - 1) * (x - lam)) % ell == 0:
                pts += 1
    return pts


@pytest.mark.parametrize("lam,ell", [(4049, 3), (4049, 13), (17, 5), (-15, 7), (90129, 29)])
def test_count_points(lam, ell):
    assert count_points(lam, ell) == brute_points(lam, ell)


def test_torsion_probe():
    probe = torsion_probe(4049, 11)
    assert probe.bound % 4 == 0 and probe.bound % 11
    for ell, n in zip(probe.primes, probe.counts):
        assert (n - ell - 1) ** 2 <= 4 * ell
        assert n == brute_points(4049, ell)


def test_torsion_probe_flags_p():
    # with one probe prime the bound is a single point count.  Make every odd
    # prime below 37 bad (lambda = 0 or 1 mod each), so the probe uses 37, and
    # pick lambda so that the brute-force count there is 44.
    from itertools import product
    from sympy.ntheory.modular import crt
    small = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
    for bits in product((0, 1), repeat=len(small)):
        for r in range(37):
            lam = int(crt(small + [2, 37], list(bits) + [1, r])[0])
            if lam > 1 and brute_points(lam, 37) == 44 and invariants(lam).delta % 37:
                break
        else:
            continue
        break
    probe = torsion_probe(lam, 7, count=1)
    assert probe.primes == (37,) and probe.bound == 44
    with pytest.raises(TorsionError):
        torsion_probe(lam, 11, count=1)


def test_rejects_bad_lambda():
    for lam in (0, 1, 4):
        with pytest.raises(CurveError):
            reduction_type(lam, 3)
