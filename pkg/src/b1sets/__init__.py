"""B1[lambda](q) sets: constructions, exact search, and the single-check codes they define."""

from .bset import BSet, Verdict, verify
from .codec import build_code, decode, encode, syndrome
from .construct import BaseProvider, ConstructionReport, dispatch, m4_prime_formula
from .numtheory import euler_phi, factor_shape, ord
from .oracle import max_bset_exact, max_bset_restricted

__all__ = [
    "BSet",
    "Verdict",
    "verify",
    "build_code",
    "decode",
    "encode",
    "syndrome",
    "BaseProvider",
    "ConstructionReport",
    "dispatch",
    "m4_prime_formula",
    "euler_phi",
    "factor_shape",
    "ord",
    "max_bset_exact",
    "max_bset_restricted",
]
