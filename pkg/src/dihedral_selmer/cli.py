"""Command line interface.

Exit codes: 0 success, 1 verification failure, 2 rejected input,
3 a search or size bound was exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from . import certify, legendre
from .cft import Level
from .classgroup import BoundExceeded
from .groups import (GroupError, SearchExhausted, all_relations, dihedral_group, dihedral_relation,
                     is_relation, relation_isogeny, subgroup_classes)
from .quadfield import FieldError, QuadraticField, ScanExhausted, scan_s1, scan_s2
from .regconst import (permutation_lattice, regular_lattice, regulator_constant, trivial_lattice)

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

DEFAULTS = {"bound": certify.DEFAULT_SCAN_BOUND, "seed": 0, "mode": "full", "format": "text"}


def _load_config(path):
    if not path:
        return {}
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return {k: v for k, v in data.items() if k in DEFAULTS}


def _emit(args, payload, text):
    out = json.dumps(payload, indent=2) + "\n" if args.format == "json" else text + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def cmd_scan(args):
    K = QuadraticField(args.d)
    which = scan_s1 if args.set == "s1" else scan_s2
    primes = which(K, args.p, args.n, args.bound)
    _emit(args, {"set": args.set, "p": args.p, "d": args.d, "primes": primes},
          " ".join(map(str, primes)))
    return EXIT_OK


def cmd_relation(args):
    G = dihedral_group(args.p)
    theta = dihedral_relation(args.p)
    kernel = all_relations(G)
    ok = is_relation(G, theta.as_dict()) and len(kernel) == 1 and kernel[0] == theta
    payload = {"relation": str(theta), "is_relation": ok, "kernel_rank": len(kernel)}
    _emit(args, payload, f"{theta}\nrelation: {ok}\nkernel rank: {len(kernel)}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_regconst(args):
    G = dihedral_group(args.p)
    theta = dihedral_relation(args.p)
    rows = [("Z", regulator_constant(theta, trivial_lattice(G)))]
    for cls in subgroup_classes(G):
        rows.append((f"Z[G/{cls.label}]", regulator_constant(theta, permutation_lattice(G, cls.representative))))
    rows.append(("Z[G]", regulator_constant(theta, regular_lattice(G))))
    iso = relation_isogeny(G, theta, seed=args.seed)
    payload = {"lattices": {name: str(v) for name, v in rows}, "isogeny_degree": iso.degree}
    text = "\n".join(f"{name:10s} {v}" for name, v in rows) + f"\nisogeny degree {iso.degree}"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_curve(args):
    lam = args.lam
    if lam is None:
        if not args.primes:
            raise ValueError("give --lambda or --primes")
        lam = legendre.construct_lambda(args.primes)
    inv = legendre.invariants(lam)
    table = legendre.bad_primes(lam)
    payload = {"lambda": str(lam), "c4": str(inv.c4), "delta": str(inv.delta),
               "j": str(Fraction(inv.j_num, inv.j_den)),
               "bad_primes": [{"q": t.q, "type": t.type.value, "c_exponent": t.c_exponent} for t in table]}
    text = [f"lambda = {lam}", f"c4 = {inv.c4}", f"delta = {inv.delta}", f"j = {payload['j']}"]
    text += [f"  q = {t.q}: {t.type.value}" + (f", c = {t.c_exponent}" if t.c_exponent else "") for t in table]
    _emit(args, payload, "\n".join(text))
    return EXIT_OK


def cmd_build(args):
    req = certify.ConstructionRequest(args.p, args.d, args.n, args.bound, args.seed, args.mode)
    cert = certify.run_construction(req)
    text = certify.dumps(cert)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read_cert(path):
    with open(path) as fh:
        return json.load(fh)


def cmd_verify(args):
    report = certify.verify_certificate(_read_cert(args.certificate))
    payload = {"passed": report.passed,
               "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in report.checks]}
    _emit(args, payload, report.text())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_ledger(args):
    ledger = certify.report_bsd_ledger(_read_cert(args.certificate))
    _emit(args, ledger, certify.render_ledger(ledger))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="dihedral-selmer",
                                     description="Dihedral extensions and Legendre curves with large p-Selmer groups.")
    parser.add_argument("--config", help="TOML file with defaults for bound, seed, mode, format")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, *flags):
        if "p" in flags:
            sp.add_argument("--p", type=int, required=True)
        if "d" in flags:
            sp.add_argument("--d", type=int, required=True)
        if "n" in flags:
            sp.add_argument("--n", type=int, default=2)
        if "bound" in flags:
            sp.add_argument("--bound", type=int)
        if "seed" in flags:
            sp.add_argument("--seed", type=int)
        if "mode" in flags:
            sp.add_argument("--mode", choices=["full", "structural"])
        sp.add_argument("--out")
        sp.add_argument("--format", choices=["json", "text"])

    sp = sub.add_parser("scan", help="list primes of S_1 or S_2")
    common(sp, "p", "d", "n", "bound")
    sp.add_argument("--set", choices=["s1", "s2"], default="s2")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("relation", help="print and check the dihedral relation")
    common(sp, "p")
    sp.set_defaults(func=cmd_relation)

    sp = sub.add_parser("regconst", help="regulator constants of small lattices")
    common(sp, "p", "seed")
    sp.set_defaults(func=cmd_regconst)

    sp = sub.add_parser("curve", help="classify the reduction of a Legendre curve")
    sp.add_argument("--lambda", dest="lam", type=int)
    sp.add_argument("--primes", type=int, nargs="*")
    common(sp)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("build", help="run the construction and write a certificate")
    common(sp, "p", "d", "n", "bound", "seed", "mode")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("verify", help="re-verify a certificate")
    sp.add_argument("certificate")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("ledger", help="valuation ledger of a certificate")
    sp.add_argument("certificate")
    common(sp)
    sp.set_defaults(func=cmd_ledger)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        config = {**DEFAULTS, **_load_config(args.config)}
    except (OSError, tomllib.TOMLDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for key, value in config.items():
        if getattr(args, key, "missing") is None:
            setattr(args, key, value)
    try:
        return args.func(args)
    except (certify.InputRejected, FieldError, GroupError, legendre.CurveError, ValueError,
            OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ScanExhausted, BoundExceeded, SearchExhausted, certify.ResourceExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except certify.ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
