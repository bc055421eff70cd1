"""End-to-end construction, certificate JSON, and independent verification.

A certificate records the primes q_1, ..., q_m used as ramification, the
class field data of the dihedral extension, the Legendre curve with
lambda = 16 q_1 ... q_m + 1, and the Tamagawa, torsion and regulator
quantities.  Every field except the request echo can be recomputed from
(p, d, seed, mode, primes); the request echo is protected by a digest.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from . import cft, legendre, tamagawa
from .classgroup import BoundExceeded
from .groups import (SearchExhausted, all_relations, character_matrix, dihedral_group,
                     dihedral_relation, is_relation, relation_isogeny_degree)
from .quadfield import (FieldError, QuadraticField, ScanExhausted, SplittingType, scan_s2,
                        splitting_type)
from .regconst import regulator_constant, trivial_lattice

log = logging.getLogger(__name__)

FORMAT_VERSION = "1"
DEFAULT_SCAN_BOUND = 10**6


class InputRejected(ValueError):
    pass


class ResourceExhausted(RuntimeError):
    pass


class ConstructionError(RuntimeError):
    pass


def _s(x) -> str:
    """Integers and fractions as decimal strings."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool) or not isinstance(x, int):
        raise TypeError(f"cannot serialise {x!r} as an integer")
    return str(x)


def _ints(xs):
    return [_s(int(x)) for x in xs]


def _matrix(rows):
    return [_ints(r) for r in rows]


@dataclass(frozen=True)
class ConstructionRequest:
    p: int
    d: int
    n: int
    scan_bound: int = DEFAULT_SCAN_BOUND
    seed: int = 0
    mode: cft.Level = cft.Level.FULL
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mode", cft.Level.parse(self.mode))
        try:
            dihedral_group(self.p)
        except ValueError as exc:
            raise InputRejected(str(exc)) from None
        try:
            QuadraticField(self.d)
        except FieldError as exc:
            raise InputRejected(str(exc)) from None
        if self.n < 1:
            raise InputRejected("n must be at least 1")
        if self.scan_bound < 3:
            raise InputRejected("scan bound too small")
        if self.d == self.p and self.p % 4 == 1:
            raise InputRejected(f"M = Q(sqrt({self.p})) with p = 1 mod 4 is excluded")
        if self.p <= 7:
            object.__setattr__(self, "warnings",
                               (f"p = {self.p} <= 7: torsion and Tamagawa arguments assume p > 7",))

    @property
    def m(self):
        return 2 * ((self.n + 1) // 2)


# --- construction ------------------------------------------------------------------

def _scan_pairs(req: ConstructionRequest, K: QuadraticField):
    """Consecutive S_2 primes paired up; a pair with no character ramified
    at both primes and killing the units drops its first prime."""
    need = req.m
    count = need + 4
    while True:
        try:
            primes = scan_s2(K, req.p, count, req.scan_bound)
            exhausted = False
        except ScanExhausted as exc:
            primes, exhausted = list(exc.found), True
        data, used, skipped = [], [], []
        i = 0
        while len(used) < need and i + 1 < len(primes):
            a, b = primes[i], primes[i + 1]
            datum = cft.build_inert_datum(K, req.p, a, b, req.seed)
            try:
                ext = cft.extension_datum(K, datum, req.mode)
            except cft.CFTError as exc:
                log.info("skipping %d: %s", a, exc)
                skipped.append(a)
                i += 1
                continue
            data.append(ext)
            used += [a, b]
            i += 2
        if len(used) >= need:
            return used, skipped, data
        if exhausted:
            raise ResourceExhausted(
                f"only {len(used)} of {need} usable primes q = -1 mod {req.p} inert in {K} "
                f"below {req.scan_bound}")
        count *= 2


def _extension_section(ext: cft.DihedralExtensionDatum):
    moduli = []
    for datum, quot in zip(ext.moduli, ext.quotients):
        residue = []
        for q, grp in zip(datum.modulus.primes, datum.residue.groups):
            residue.append({
                "q": _s(q),
                "model": grp.model,
                "generators": _matrix(grp.generators),
                "orders": _ints(grp.orders),
                "tau": _matrix(grp.tau_matrix),
            })
        moduli.append({
            "primes": _ints(datum.modulus.primes),
            "residue": residue,
            "residue_order": _s(datum.residue.order),
            "character": _ints(datum.character),
            "R_basis": _matrix(datum.R_basis),
            "conductor_support": _ints(sorted(cft.conductor_support(datum))),
            "ray_class": {
                "level": quot.level.value,
                "order": _s(quot.order),
                "invariants": _ints(quot.invariants),
                "prime_norms": _ints(quot.prime_norms),
                "character": _ints(quot.character),
                "unit_images": _matrix(quot.unit_images),
                "note": quot.note,
            },
        })
    return {
        "ramified_primes": _ints(ext.ramified_primes),
        "local": [{"v": _s(v), "D": D, "I": I} for v, D, I in ext.local],
        "verification_level": ext.level.value,
        "moduli": moduli,
        "provenance": list(ext.provenance),
    }


def _curve_section(lam, table):
    inv = legendre.invariants(lam)
    model = legendre.good_model_at_2(lam)
    return {
        "lambda": _s(lam),
        "c4": _s(inv.c4),
        "delta": _s(inv.delta),
        "j_num": _s(inv.j_num),
        "j_den": _s(inv.j_den),
        "model_at_2": _ints([model.a1, model.a2, model.a3, model.a4, model.a6]),
        "model_at_2_disc": _s(model.discriminant()),
        "bad_primes": [{"q": _s(loc.q), "type": loc.type.value, "c_exponent": _s(loc.c_exponent)}
                       for loc in table],
    }


def _relation_section(p):
    G = dihedral_group(p)
    theta = dihedral_relation(p)
    chars = character_matrix(G)
    kernel = all_relations(G)
    return {
        "classes": [c.label for c in theta.classes],
        "coefficients": _ints(theta.coefficients),
        "permutation_characters": _matrix(chars),
        "is_relation": is_relation(G, theta.as_dict()),
        "kernel_rank": _s(len(kernel)),
    }


def _tamagawa_section(gq: tamagawa.GlobalQuotient):
    return {
        "per_prime": [{"v": _s(v), "value": _s(x)} for v, x in gq.per_prime],
        "value": _s(gq.value),
        "ordp": _s(gq.ordp),
    }


def _torsion_section(probe: legendre.TorsionProbe, p):
    return {
        "bound": _s(probe.bound),
        "ordp": _s(legendre.ord_q(probe.bound, p)),
        "primes": _ints(probe.primes),
        "counts": _ints(probe.counts),
    }


def _regulator_section(p, seed):
    G = dihedral_group(p)
    theta = dihedral_relation(p)
    return {
        "trivial_lattice": _s(regulator_constant(theta, trivial_lattice(G))),
        "isogeny_degree": _s(relation_isogeny_degree(G, theta, seed)),
    }


def _conclusion(req, m, ordp):
    return {
        "m": _s(m),
        "n": _s(req.n),
        "ordp_tamagawa": _s(ordp),
        "ordp_torsion": "0",
        "ordp_sha_reg": _s(-ordp),
        "claim": f"ord_{req.p} C(E/Theta) = -{m} with {m} >= {req.n}, "
                 f"hence #S_{req.p}(E/F) >= {req.p}^{req.n}",
        "anchors": ["tamagawa-quotient valuation", "torsion quotient trivial at p",
                    "isogeny kernel bound on the Selmer group"],
    }


def _contexts(ext, table, lam):
    ctxs = []
    seen = set()
    for loc in table:
        seen.add(loc.q)
        ctxs.append(tamagawa.pipeline_context(loc.q, loc, cft.local_data(ext, loc.q)))
    for v in ext.ramified_primes:
        if v not in seen:
            ctxs.append(tamagawa.pipeline_context(v, legendre.reduction_type(lam, v),
                                                  cft.local_data(ext, v)))
    return ctxs


def _digest(body) -> str:
    text = json.dumps(body, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(text.encode()).hexdigest()


def run_construction(req: ConstructionRequest) -> dict:
    """Build the certificate; raises on any failed invariant."""
    for w in req.warnings:
        log.warning(w)
    K = QuadraticField(req.d)
    p = req.p
    try:
        used, skipped, data = _scan_pairs(req, K)
    except (BoundExceeded, SearchExhausted) as exc:
        raise ResourceExhausted(str(exc)) from None
    ext = data[0]
    for other in data[1:]:
        ext = cft.combine_data(ext, other)
    lam = legendre.construct_lambda(used)
    table = legendre.bad_primes(lam)
    theta = dihedral_relation(p)
    gq = tamagawa.global_quotient(theta, _contexts(ext, table, lam), p)
    m = len(used)
    if gq.value != Fraction(1, p ** m):
        raise ConstructionError(f"global Tamagawa quotient {gq.value} is not {p}^-{m}")
    probe = legendre.torsion_probe(lam, p)
    if probe.bound % p == 0:
        raise ConstructionError(f"torsion probe bound {probe.bound} is divisible by {p}")
    body = {
        "format_version": FORMAT_VERSION,
        "request": {
            "p": _s(p), "d": _s(req.d), "n": _s(req.n), "scan_bound": _s(req.scan_bound),
            "seed": _s(req.seed), "mode": req.mode.value,
        },
        "warnings": list(req.warnings),
        "primes_used": _ints(used),
        "skipped_primes": _ints(skipped),
        "extension": _extension_section(ext),
        "curve": _curve_section(lam, table),
        "relation": _relation_section(p),
        "tamagawa": _tamagawa_section(gq),
        "torsion": _torsion_section(probe, p),
        "regulator_exhibit": _regulator_section(p, req.seed),
        "conclusion": _conclusion(req, m, gq.ordp),
    }
    body["digest"] = _digest(body)
    return body


def dumps(cert: dict) -> str:
    return json.dumps(cert, indent=2, ensure_ascii=True) + "\n"


# --- verification -----------------------------------------------------------------

@dataclass
class Report:
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    @property
    def first_failure(self):
        return next(((name, detail) for name, ok, detail in self.checks if not ok), None)

    def add(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))
        return ok

    def text(self):
        lines = [f"PASS {name}" if ok else f"FAIL {name}" + (f": {detail}" if detail else "")
                 for name, ok, detail in self.checks]
        lines.append("verdict: " + ("pass" if self.passed else "fail"))
        return "\n".join(lines)


def _diff(path, got, want):
    """Path of the first difference between two JSON values, or None."""
    if type(got) is not type(want):
        return path
    if isinstance(want, dict):
        if list(got) != list(want):
            return path + " (keys)"
        for k in want:
            r = _diff(f"{path}.{k}", got[k], want[k])
            if r:
                return r
        return None
    if isinstance(want, list):
        if len(got) != len(want):
            return path + " (length)"
        for i, (a, b) in enumerate(zip(got, want)):
            r = _diff(f"{path}[{i}]", a, b)
            if r:
                return r
        return None
    return None if got == want else path


def _int(x):
    if not isinstance(x, str) or not x.lstrip("-").isdigit():
        raise ValueError(f"not a decimal integer string: {x!r}")
    return int(x)


def _independent_curve_table(lam):
    """Reduction types with the node oracle at odd primes."""
    from sympy import factorint
    out = []
    inv = legendre.invariants(lam)
    for q in sorted(set(factorint(abs(lam))) | set(factorint(abs(lam - 1))) | {2}):
        if q == 2:
            if lam % 32 == 17:
                legendre.good_model_at_2(lam)
                out.append({"q": "2", "type": "good", "c_exponent": "0"})
            else:
                out.append({"q": "2", "type": "additive2", "c_exponent": "0"})
            continue
        kind = legendre.split_oracle(lam, q)
        c = legendre.ord_q(inv.j_den, q) - (legendre.ord_q(inv.j_num, q) if inv.j_num % q == 0 else 0)
        out.append({"q": _s(q), "type": kind.value, "c_exponent": _s(c)})
    return out


def _check_character(report, p, section):
    """chi(tau x) = -chi(x) on every residue generator, from recorded data alone."""
    for mod in section["moduli"]:
        chi = [_int(c) for c in mod["character"]]
        taus, orders = [], []
        for block in mod["residue"]:
            k = len(orders)
            rows = [[_int(x) for x in r] for r in block["tau"]]
            for r in rows:
                taus.append([0] * k + r)
            orders += [_int(o) for o in block["orders"]]
        n = len(orders)
        taus = [t + [0] * (n - len(t)) for t in taus]
        if len(chi) != n or any(o % p for o, c in zip(orders, chi) if c % p):
            return report.add("extension.character", False, "character is not defined on the residue group")
        for i in range(n):
            if (sum(c * t for c, t in zip(chi, taus[i])) + chi[i]) % p:
                return report.add("extension.character", False, f"tau does not invert generator {i}")
    return report.add("extension.character", True)


def verify_certificate(cert) -> Report:
    """Recompute every field from (p, d, seed, mode, primes_used) and compare."""
    report = Report()
    try:
        _verify(cert, report)
    except (KeyError, TypeError, ValueError, IndexError, AttributeError, ArithmeticError,
            RuntimeError, cft.CFTError) as exc:
        report.add("well_formed", False, f"{type(exc).__name__}: {exc}")
    return report


def _verify(cert, report):
    if not report.add("format_version", cert.get("format_version") == FORMAT_VERSION,
                      f"expected {FORMAT_VERSION}"):
        return
    r = cert["request"]
    req = ConstructionRequest(_int(r["p"]), _int(r["d"]), _int(r["n"]), _int(r["scan_bound"]),
                              _int(r["seed"]), r["mode"])
    if not report.add("request.mode", r["mode"] == req.mode.value):
        return
    p, K = req.p, QuadraticField(req.d)
    if not report.add("warnings", cert["warnings"] == list(req.warnings)):
        return

    # primes: membership in S_2, the count, and agreement with the scan
    used = [_int(q) for q in cert["primes_used"]]
    skipped = [_int(q) for q in cert["skipped_primes"]]
    bad = 2 * K.disc * p
    ok = len(set(used)) == len(used) and all(
        bad % q and (q + 1) % p == 0 and splitting_type(K, q) is SplittingType.INERT for q in used)
    if not report.add("primes_used.membership", ok, "primes must be distinct S_2 primes"):
        return
    if not report.add("primes_used.count", len(used) == req.m, f"expected {req.m}"):
        return
    scan = scan_s2(K, p, len(used) + len(skipped), req.scan_bound)
    if not report.add("primes_used.scan", sorted(used + skipped) == scan, "not an initial segment of the scan"):
        return

    # extension: recorded character checked directly, then full recomputation
    ext_cert = cert["extension"]
    if not _check_character(report, p, ext_cert):
        return
    data = []
    for a, b in zip(used[::2], used[1::2]):
        datum = cft.build_inert_datum(K, p, a, b, req.seed)
        data.append(cft.extension_datum(K, datum, req.mode))
    ext = data[0]
    for other in data[1:]:
        ext = cft.combine_data(ext, other)
    for mod in ext.moduli:
        support = cft.conductor_support(mod)
        if not report.add(f"extension.conductor_support[{mod.modulus.primes}]",
                          support == frozenset(mod.modulus.primes)):
            return
    d = _diff("extension", ext_cert, _extension_section(ext))
    if not report.add("extension", d is None, d or ""):
        return

    # curve: reduction types first (node oracle), then invariants and lambda
    curve = cert["curve"]
    lam = _int(curve["lambda"])
    legendre.LegendreCurve(lam)
    d = _diff("curve.bad_primes", curve["bad_primes"], _independent_curve_table(lam))
    if not report.add("curve.reduction_types", d is None, d or ""):
        return
    if not report.add("curve.lambda", lam == legendre.construct_lambda(used), "lambda != 16 prod q + 1"):
        return
    table = legendre.bad_primes(lam)
    d = _diff("curve", curve, _curve_section(lam, table))
    if not report.add("curve.invariants", d is None, d or ""):
        return

    d = _diff("relation", cert["relation"], _relation_section(p))
    rel_ok = d is None and cert["relation"]["is_relation"] is True and cert["relation"]["kernel_rank"] == "1"
    if not report.add("relation", rel_ok, d or ""):
        return

    theta = dihedral_relation(p)
    gq = tamagawa.global_quotient(theta, _contexts(ext, table, lam), p)
    d = _diff("tamagawa", cert["tamagawa"], _tamagawa_section(gq))
    if not report.add("tamagawa", d is None and gq.value == Fraction(1, p ** len(used)), d or ""):
        return

    probe = legendre.torsion_probe(lam, p)
    d = _diff("torsion", cert["torsion"], _torsion_section(probe, p))
    if not report.add("torsion", d is None and probe.bound % 4 == 0 and probe.bound % p, d or ""):
        return

    d = _diff("regulator_exhibit", cert["regulator_exhibit"], _regulator_section(p, req.seed))
    reg_ok = d is None and cert["regulator_exhibit"]["trivial_lattice"] == f"1/{p}"
    if not report.add("regulator_exhibit", reg_ok, d or ""):
        return

    m = len(used)
    d = _diff("conclusion", cert["conclusion"], _conclusion(req, m, gq.ordp))
    if not report.add("conclusion", d is None and m >= req.n and gq.ordp == -m, d or ""):
        return

    body = {k: v for k, v in cert.items() if k != "digest"}
    report.add("keys", list(cert) == list(body) + ["digest"] and list(body) == _KEYS, "field order")
    report.add("digest", cert.get("digest") == _digest(body))


_KEYS = ["format_version", "request", "warnings", "primes_used", "skipped_primes", "extension",
         "curve", "relation", "tamagawa", "torsion", "regulator_exhibit", "conclusion"]


# --- valuation ledger ------------------------------------------------------------

def report_bsd_ledger(cert: dict) -> dict:
    """p-adic valuations of the quotient Sha * Reg = |tors|^2 / C."""
    p = _int(cert["request"]["p"])
    n = _int(cert["request"]["n"])
    ordp_c = _int(cert["tamagawa"]["ordp"])
    ordp_tors = 2 * _int(cert["torsion"]["ordp"])
    m = -ordp_c
    rows = [
        ("ord_p |E(Theta)_tors|^2", ordp_tors),
        ("ord_p C(E/Theta)", ordp_c),
        ("ord_p (Sha * Reg)(E/Theta)", ordp_tors - ordp_c),
    ]
    claim = (f"#S_{p}(E/F) >= {p}^{n}" if m >= n and m > 0 else "no Selmer bound claimed")
    return {"p": p, "m": m, "n": n, "rows": rows, "claim": claim}


def render_ledger(ledger: dict) -> str:
    width = max(len(name) for name, _ in ledger["rows"])
    lines = [f"{name.ljust(width)}  {value:+d}" if value else f"{name.ljust(width)}   0"
             for name, value in ledger["rows"]]
    lines.append(f"ramified primes m = {ledger['m']}, requested n = {ledger['n']}")
    lines.append(ledger["claim"])
    return "\n".join(lines)
