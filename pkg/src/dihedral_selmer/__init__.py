"""Dihedral D_2p extensions of Q and Legendre curves with Tamagawa
quotients of p-adic valuation -m, assembled into verifiable certificates."""

from .certify import ConstructionRequest, run_construction, verify_certificate
from .groups import dihedral_group, dihedral_relation
from .quadfield import QuadraticField

__all__ = ["ConstructionRequest", "QuadraticField", "dihedral_group", "dihedral_relation",
           "run_construction", "verify_certificate"]
__version__ = "0.1.0"
