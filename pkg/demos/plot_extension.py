"""
A dihedral extension from two inert primes
==========================================

"""

from dihedral_selmer.cft import build_inert_datum, extension_datum, ray_class_quotient
from dihedral_selmer.legendre import bad_primes, construct_lambda
from dihedral_selmer.quadfield import QuadraticField, scan_s2

K = QuadraticField(-1)
p = 3

# primes q = -1 mod 3 that stay inert in Q(i)
q1, q2 = scan_s2(K, p, 2)
print(q1, q2)

datum = build_inert_datum(K, p, q1, q2)
print("residue orders", datum.residue.orders, "character", datum.character)

quot = ray_class_quotient(K, datum, "full")
print("ray class order", quot.order, quot.level.value)

ext = extension_datum(K, datum)
for v, D, I in ext.local:
    print(f"v = {v}: D = {D}, I = {I}")

# the curve: split multiplicative at both primes, good at 2
lam = construct_lambda([q1, q2])
for loc in bad_primes(lam):
    print(loc.q, loc.type.value, loc.c_exponent)
