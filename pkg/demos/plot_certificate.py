"""
Build and check a certificate
=============================

"""

import json

from dihedral_selmer import ConstructionRequest, run_construction, verify_certificate
from dihedral_selmer.certify import render_ledger, report_bsd_ledger

cert = run_construction(ConstructionRequest(p=11, d=-1, n=2))
print(cert["primes_used"], cert["curve"]["lambda"], cert["tamagawa"]["value"])
print(verify_certificate(cert).text())

print(render_ledger(report_bsd_ledger(cert)))

# a single changed digit is enough to fail
cert["curve"]["c4"] = str(int(cert["curve"]["c4"]) + 1)
print(verify_certificate(json.loads(json.dumps(cert))).first_failure)
