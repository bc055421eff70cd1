"""Dihedral extensions of Q through ray class characters of a quadratic field.

A residue group (O/m)^* for m = q q' is presented by exponent vectors on the
generators of each ``ResidueUnitGroup``.  A character of order p is a vector
of coefficients mod p; its kernel R is the congruence subgroup.  tau acts on
exponent vectors through the per-prime tau matrices, and the dihedral shape
of the extension is the condition chi(tau x) = -chi(x).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import intmat
from .classgroup import ideal_class_group, principal_generator, IdealArithmetic
from .groups import SubgroupClass, dihedral_group, find_class
from .quadfield import (QuadraticField, ResidueUnitGroup, SplittingType, residue_units,
                        splitting_type, unit_group)


class CFTError(ValueError):
    pass


class Level(enum.Enum):
    FULL = "full"
    STRUCTURAL = "structural"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Modulus:
    field: QuadraticField
    primes: tuple[int, int]
    kind: SplittingType

    def __post_init__(self):
        q, r = self.primes
        if q == r:
            raise CFTError(f"modulus primes must be distinct, got {q} twice")


class ResidueProduct:
    """(O/q)^* x (O/q')^* with exponent vectors concatenated."""

    def __init__(self, groups: list[ResidueUnitGroup]):
        self.groups = list(groups)
        self.slices = []
        start = 0
        for g in self.groups:
            self.slices.append(range(start, start + len(g.orders)))
            start += len(g.orders)
        self.rank = start

    @property
    def orders(self):
        return tuple(n for g in self.groups for n in g.orders)

    @property
    def order(self):
        out = 1
        for g in self.groups:
            out *= g.order
        return out

    def dlog(self, elt):
        """Exponent vector of an integral element (x, y) coprime to m."""
        return tuple(e for g in self.groups for e in g.dlog(g.reduce(elt)))

    def tau(self, exps):
        out = []
        for g, sl in zip(self.groups, self.slices):
            out.extend(g.apply_tau([exps[i] for i in sl]))
        return tuple(out)

    def tau_matrix(self):
        """Rows are tau(e_i)."""
        return [list(self.tau(tuple(int(i == j) for j in range(self.rank)))) for i in range(self.rank)]


def _eval(coeffs, exps, p):
    return sum(c * e for c, e in zip(coeffs, exps)) % p


@dataclass(frozen=True)
class CongruenceSubgroupDatum:
    """Index-p subgroup R of (O/m)^*, the kernel of ``character``.

    ``R_basis`` is an HNF basis of the preimage of R in Z^rank.
    """

    modulus: Modulus
    p: int
    residue: ResidueProduct = field(compare=False, repr=False)
    character: tuple[int, ...]
    R_basis: tuple[tuple[int, ...], ...]
    quotient_order: int

    @property
    def generators(self):
        return tuple(g for grp in self.residue.groups for g in grp.generators)

    def chi(self, exps):
        return _eval(self.character, exps, self.p)


def _kernel_basis(coeffs, p):
    n = len(coeffs)
    j = next((i for i, c in enumerate(coeffs) if c % p), None)
    if j is None:
        raise CFTError("character is trivial")
    inv = pow(coeffs[j], -1, p)
    rows = [[p * int(i == k) for k in range(n)] for i in range(n)]
    for i in range(n):
        if i != j:
            row = [0] * n
            row[i] = 1
            row[j] = (-coeffs[i] * inv) % p
            rows.append(row)
    return intmat.hnf(rows, ncols=n)


def verify_congruence_datum(datum: CongruenceSubgroupDatum):
    """Index p, tau-stability of R, and tau(x) + x in R on every generator."""
    res, p, basis = datum.residue, datum.p, [list(r) for r in datum.R_basis]
    n = res.rank
    if intmat.lattice_index(basis, n) != p:
        raise CFTError("R does not have index p")
    for i, order in enumerate(res.orders):
        if not intmat.lattice_contains(basis, [order * int(k == i) for k in range(n)]):
            raise CFTError("R does not contain the order relations")
    for row in basis:
        if not intmat.lattice_contains(basis, res.tau(row)):
            raise CFTError("tau(R) is not contained in R")
    for i in range(n):
        e = [int(k == i) for k in range(n)]
        t = res.tau(e)
        if not intmat.lattice_contains(basis, [a + b for a, b in zip(e, t)]):
            raise CFTError("tau does not act by inversion on the quotient")
        if datum.chi(t) != (-datum.chi(e)) % p:
            raise CFTError("chi(tau x) != -chi(x)")
    return True


def _make_datum(K, p, q, r, kind, per_prime, seed):
    for s in (q, r):
        if splitting_type(K, s) is not kind:
            raise CFTError(f"q = {s} is not {kind.value} in {K}")
        want = -1 if kind is SplittingType.INERT else 1
        if (s - want) % p:
            raise CFTError(f"q = {s} is not {want} mod {p}")
    if q == r:
        raise CFTError(f"modulus primes must be distinct, got {q} twice")
    res = ResidueProduct([residue_units(K, q, seed), residue_units(K, r, seed)])
    coeffs = tuple(c for _ in (q, r) for c in per_prime)
    datum = CongruenceSubgroupDatum(Modulus(K, (q, r), kind), p, res, coeffs,
                                    tuple(map(tuple, _kernel_basis(coeffs, p))), p)
    verify_congruence_datum(datum)
    return datum


def build_inert_datum(K: QuadraticField, p: int, q: int, q2: int, seed: int = 0) -> CongruenceSubgroupDatum:
    """Kernel of (x, x') -> dlog x + dlog x' mod p on (F_q^2)^* x (F_q'^2)^*."""
    return _make_datum(K, p, q, q2, SplittingType.INERT, (1,), seed)


def build_split_datum(K: QuadraticField, p: int, q: int, q2: int, seed: int = 0) -> CongruenceSubgroupDatum:
    """Per split prime the character (a, b) -> a - b, whose kernel is
    <(x^p, 1), (1, y^p), (x, y)>; summed over q and q'."""
    return _make_datum(K, p, q, q2, SplittingType.SPLIT, (1, -1 % p), seed)


def with_character(datum: CongruenceSubgroupDatum, coeffs) -> CongruenceSubgroupDatum:
    """Same modulus, different character (coefficients reduced mod p)."""
    coeffs = tuple(c % datum.p for c in coeffs)
    out = CongruenceSubgroupDatum(datum.modulus, datum.p, datum.residue, coeffs,
                                  tuple(map(tuple, _kernel_basis(coeffs, datum.p))), datum.p)
    verify_congruence_datum(out)
    return out


def conductor_support(datum: CongruenceSubgroupDatum) -> frozenset:
    """Modulus primes whose residue factor the character does not kill."""
    out = set()
    for q, sl in zip(datum.modulus.primes, datum.residue.slices):
        if any(datum.character[i] % datum.p for i in sl):
            out.add(q)
    if not out:
        raise CFTError("character is trivial on every factor: the extension is unramified")
    return frozenset(out)


# --- ray class group -----------------------------------------------------------

@dataclass(frozen=True)
class RayClassQuotient:
    """Presentation of I_m / P_m and a character of order p on it.

    Generators are the class-group prime ideals (``prime_norms``) followed by
    the residue generators; ``relations`` are rows over that ordering.
    """

    level: Level
    order: int
    invariants: tuple[int, ...]
    prime_norms: tuple[int, ...]
    relations: tuple[tuple[int, ...], ...]
    character: tuple[int, ...]
    tau_rows: tuple[tuple[int, ...], ...]
    unit_images: tuple[tuple[int, ...], ...]
    note: str = ""


def unit_images(K: QuadraticField, res: ResidueProduct):
    return [res.dlog(u) for u in unit_group(K).generators()]


def _solve_mod_p(rows, rhs, p):
    """One solution x of rows . x = rhs over F_p, or None."""
    n = len(rows[0]) if rows else 0
    a = [[c % p for c in r] + [b % p] for r, b in zip(rows, rhs)]
    piv_cols, r = [], 0
    for c in range(n):
        pr = next((i for i in range(r, len(a)) if a[i][c]), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [e * inv % p for e in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(e - f * g) % p for e, g in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
    if any(row[-1] for row in a[r:]):
        return None
    x = [0] * n
    for i, c in enumerate(piv_cols):
        x[c] = a[i][-1]
    return x


def _unit_check(datum, units):
    p = datum.p
    vals = [datum.chi(u) for u in units]
    return all(v == 0 for v in vals)


def _per_prime_values(datum, u):
    p = datum.p
    return tuple(sum(datum.character[i] * u[i] for i in sl) % p for sl in datum.residue.slices)


def unit_p_rank(datum: CongruenceSubgroupDatum, units) -> int:
    """Rank over F_p of the per-prime character values on the unit images."""
    rows = [list(_per_prime_values(datum, u)) for u in units]
    rows = [r for r in rows if any(r)]
    if not rows:
        return 0
    if len(rows) == 1:
        return 1
    a, b = rows[0], rows[1:]
    return 1 if all((a[0] * r[1] - a[1] * r[0]) % datum.p == 0 for r in b) else 2


def unit_adjusted(datum: CongruenceSubgroupDatum, units) -> CongruenceSubgroupDatum | None:
    """Rescale the q'-part of the character so that it kills every unit image.

    Returns None when the only such character is supported on one prime.
    """
    if _unit_check(datum, units):
        return datum
    p = datum.p
    vals = [_per_prime_values(datum, u) for u in units]
    for b in range(1, p):
        if all((v[0] + b * v[1]) % p == 0 for v in vals):
            sl = datum.residue.slices[1]
            coeffs = [c * b if i in sl else c for i, c in enumerate(datum.character)]
            return with_character(datum, coeffs)
    return None


def structural_check(K: QuadraticField, datum: CongruenceSubgroupDatum) -> RayClassQuotient:
    """Unit images cut at most one Z/p from the tau-inverted part; the
    character kills them, so it survives to the ray class group."""
    units = unit_images(K, datum.residue)
    if unit_p_rank(datum, units) > 1:
        raise CFTError("unit images have p-rank above 1")
    if not _unit_check(datum, units):
        raise CFTError("character does not kill the unit images")
    res = datum.residue
    rels = [[o * int(i == j) for j in range(res.rank)] for i, o in enumerate(res.orders)]
    rels += [list(u) for u in units]
    inv = tuple(e for e in intmat.smith_invariants(rels, res.rank) if e > 1)
    order = 1
    for e in inv:
        order *= e
    return RayClassQuotient(Level.STRUCTURAL, order, inv, (), tuple(map(tuple, rels)),
                            datum.character, tuple(map(tuple, res.tau_matrix())),
                            tuple(units), "residue quotient by unit images")


def ray_class_quotient(K: QuadraticField, datum: CongruenceSubgroupDatum,
                       mode=Level.FULL) -> RayClassQuotient:
    """Present I_m/P_m and extend the character to it.

    Full mode falls back to Structural (recorded in ``note``) when the class
    group data cannot be computed or the character fails to extend.
    """
    mode = Level.parse(mode)
    if mode is Level.STRUCTURAL:
        return structural_check(K, datum)
    try:
        return _full_quotient(K, datum)
    except (CFTError, RuntimeError, ZeroDivisionError) as exc:
        out = structural_check(K, datum)
        return RayClassQuotient(out.level, out.order, out.invariants, out.prime_norms,
                                out.relations, out.character, out.tau_rows, out.unit_images,
                                f"downgraded from full: {exc}")


def _full_quotient(K, datum):
    p, res = datum.p, datum.residue
    units = unit_images(K, res)
    if not _unit_check(datum, units):
        raise CFTError("character does not kill the unit images")
    cg = ideal_class_group(K, exclude=datum.modulus.primes)
    gens = list(cg.generators)
    g = len(gens)
    arith = IdealArithmetic(gens)
    n = g + res.rank
    rows = []
    rel_vectors = cg.generator_relations()
    for vec in rel_vectors:
        ideal = arith.ideal(vec)
        beta = principal_generator(ideal)
        if beta is None:
            raise CFTError("class-group relation is not principal")
        # negative exponents were built from conjugates, so divide by norms
        scale = 1
        for e, I in zip(vec, gens):
            if e < 0:
                scale *= I.norm ** (-e)
        b = res.dlog(beta)
        s = res.dlog((scale, 0))
        resid = [x - y for x, y in zip(b, s)]
        rows.append(list(vec) + [-x for x in resid])
    for i, o in enumerate(res.orders):
        rows.append([0] * g + [o * int(i == j) for j in range(res.rank)])
    for u in units:
        rows.append([0] * g + list(u))
    inv = [e for e in intmat.smith_invariants(rows, n)]
    if len(inv) < n:
        raise CFTError("presented group is infinite")
    order = 1
    for e in inv:
        order *= e
    unit_lattice = [[o * int(i == j) for j in range(res.rank)] for i, o in enumerate(res.orders)]
    unit_lattice += [list(u) for u in units]
    unit_image_order = res.order // intmat.lattice_index(unit_lattice, res.rank)
    if order * unit_image_order != cg.h * res.order:
        raise CFTError("ray class group order does not match h |(O/m)^*| / |unit image|")
    # extend chi: psi on prime generators solves rel . psi = chi(residue part)
    lhs = [r[:g] for r in rows[:len(rel_vectors)]]
    rhs = [(-datum.chi(r[g:])) % p for r in rows[:len(rel_vectors)]]
    psi_primes = _solve_mod_p(lhs, rhs, p) if g else []
    if psi_primes is None:
        raise CFTError("character does not extend to an order-p character of I_m/P_m")
    psi = tuple(psi_primes) + datum.character
    for r in rows:
        if _eval(psi, r, p):
            raise CFTError("extended character does not kill a relation")
    # tau on generators: conj(P) = (N P) P^{-1}; residues via the tau matrices
    tau_rows = []
    for I in gens:
        v = [0] * g
        v[gens.index(I)] = -1
        tau_rows.append(v + list(res.dlog((I.norm, 0))))
    for row in res.tau_matrix():
        tau_rows.append([0] * g + row)
    for i in range(n):
        if (_eval(psi, tau_rows[i], p) + psi[i]) % p:
            raise CFTError("extended character is not inverted by tau")
    return RayClassQuotient(Level.FULL, order, tuple(e for e in inv if e > 1),
                            tuple(I.norm for I in gens), tuple(map(tuple, rows)), psi,
                            tuple(map(tuple, tau_rows)), tuple(units), "")


# --- extension data ----------------------------------------------------------

class CyclicFlag:
    """Marker for a prime whose decomposition group is cyclic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "CYCLIC"


CYCLIC = CyclicFlag()


@dataclass(frozen=True)
class DihedralExtensionDatum:
    field: QuadraticField
    p: int
    ramified_primes: tuple[int, ...]
    local: tuple[tuple[int, str, str], ...]
    moduli: tuple[CongruenceSubgroupDatum, ...] = field(repr=False)
    quotients: tuple[RayClassQuotient, ...] = field(repr=False)
    level: Level
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.ramified_primes:
            raise CFTError("no ramified primes")
        if len(set(self.ramified_primes)) != len(self.ramified_primes):
            raise CFTError("ramified primes are not distinct")


def _candidates(datum):
    """The character rescaled on the q'-factor by each b in 1..p-1."""
    sl = datum.residue.slices[1]
    for b in range(1, datum.p):
        if b == 1:
            yield datum
        else:
            yield with_character(datum, [c * b if i in sl else c for i, c in enumerate(datum.character)])


def extension_datum(K: QuadraticField, datum: CongruenceSubgroupDatum,
                    mode=Level.FULL) -> DihedralExtensionDatum:
    """Verify a congruence datum and record the local groups at its primes.

    Among the rescalings of the character, the first that reaches ``mode``
    is used; otherwise the first that passes the structural check.
    """
    mode = Level.parse(mode)
    units = unit_images(K, datum.residue)
    chosen = None
    for cand in _candidates(datum):
        if not _unit_check(cand, units):
            continue
        quot = ray_class_quotient(K, cand, mode)
        if chosen is None:
            chosen = (cand, quot)
        if quot.level is mode:
            chosen = (cand, quot)
            break
    if chosen is None:
        raise CFTError(f"no character on modulus {datum.modulus.primes} kills the unit images "
                       "while ramifying at both primes")
    datum, quot = chosen
    support = conductor_support(datum)
    if support != frozenset(datum.modulus.primes):
        raise CFTError(f"conductor support {sorted(support)} is not the full modulus")
    d_label = "G" if datum.modulus.kind is SplittingType.INERT else "Cp"
    local = tuple((q, d_label, "Cp") for q in sorted(support))
    return DihedralExtensionDatum(K, datum.p, tuple(sorted(support)), local, (datum,), (quot,),
                                  quot.level, (f"modulus {datum.modulus.primes[0]}*{datum.modulus.primes[1]}",))


def combine_data(a: DihedralExtensionDatum, b: DihedralExtensionDatum) -> DihedralExtensionDatum:
    """Diagonal subfield of the compositum: ramified sets are unioned."""
    if a.field != b.field or a.p != b.p:
        raise CFTError("data over different fields or primes")
    if set(a.ramified_primes) & set(b.ramified_primes):
        raise CFTError("ramified primes overlap")
    level = Level.FULL if a.level is b.level is Level.FULL else Level.STRUCTURAL
    local = tuple(sorted(a.local + b.local))
    return DihedralExtensionDatum(a.field, a.p, tuple(sorted(a.ramified_primes + b.ramified_primes)),
                                  local, a.moduli + b.moduli, a.quotients + b.quotients, level,
                                  a.provenance + b.provenance + ("diagonal of compositum",))


def local_data(datum: DihedralExtensionDatum, v: int):
    """(D, I) as subgroup classes of D_2p for a ramified prime, else CYCLIC."""
    G = dihedral_group(datum.p)
    for q, d_label, i_label in datum.local:
        if q == v:
            return find_class(G, d_label), find_class(G, i_label)
    return CYCLIC
