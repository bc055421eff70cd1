"""
The dihedral relation and its regulator constants
=================================================

"""

from dihedral_selmer.groups import all_relations, dihedral_group, dihedral_relation, double_cosets
from dihedral_selmer.regconst import (permutation_lattice, regular_lattice, regulator_constant,
                                      trivial_lattice)

p = 7
G = dihedral_group(p)
theta = dihedral_relation(p)
print(theta)

# the permutation characters cancel, and nothing else does
print(len(all_relations(G)), "relation up to sign")

# counting double cosets D\G/H against theta gives zero for every D
for D in (frozenset({0}), frozenset({0, p}), frozenset(range(p))):
    print(sorted(D), sum(a * len(double_cosets(G, D, c.representative)) for c, a in theta.items()))

# regulator constants of a few small lattices
print("Z      ", regulator_constant(theta, trivial_lattice(G)))
for c, _ in theta.items():
    print(f"Z[G/{c.label}]".ljust(7), regulator_constant(theta, permutation_lattice(G, c.representative)))
print("Z[G]   ", regulator_constant(theta, regular_lattice(G)))
