"""B1[lambda](q) sets: the value type, the verifier, and the residue partitions.

A set B of nonzero residues mod q is a B1[lambda](q) set when the
lambda*|B| products i*b (1 <= i <= lambda, b in B) are pairwise distinct
mod q.  Those products are exactly the syndromes of single errors of
magnitude at most lambda under the check row B.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from os import PathLike
from typing import Iterable

from .numtheory import ModulusShape, factor_shape, valuation

__all__ = [
    "BSet",
    "Verdict",
    "verify",
    "scale",
    "classify_V",
    "classify_U",
    "classify_L",
    "classify_N",
    "partition",
    "load_set",
    "dump_set",
]


@dataclass(frozen=True)
class BSet:
    """Sorted, distinct, nonzero residues modulo q (not necessarily verified)."""

    q: int
    elements: tuple[int, ...]
    lam: int = 4

    def __post_init__(self):
        els = tuple(self.elements)
        object.__setattr__(self, "elements", els)
        if self.q < 1:
            raise ValueError(f"modulus must be positive, got {self.q}")
        if any(not 0 < x < self.q for x in els):
            raise ValueError(f"elements must lie in [1, {self.q - 1}]: {els}")
        if any(x >= y for x, y in zip(els, els[1:])):
            raise ValueError("elements must be strictly ascending")

    @classmethod
    def of(cls, q: int, elements: Iterable[int], lam: int = 4) -> BSet:
        """Reduce mod q and sort.  Duplicates or a zero residue raise ValueError."""
        residues = [x % q for x in elements]
        if len(set(residues)) != len(residues):
            raise ValueError(f"duplicate residues mod {q}")
        if 0 in residues:
            raise ValueError("0 cannot belong to a B1 set")
        return cls(q, tuple(sorted(residues)), lam)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def verify(self) -> Verdict:
        return verify(self.q, self.lam, self.elements)

    def to_json(self) -> dict:
        return {"q": self.q, "lambda": self.lam, "elements": list(self.elements)}

    @classmethod
    def from_json(cls, obj: dict) -> BSet:
        return cls.of(int(obj["q"]), obj["elements"], int(obj.get("lambda", 4)))


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`verify`; truthy when valid.

    ``collision`` is ((i, x), (j, y)) with i*x == j*y (mod q), the first clash
    met scanning x ascending, then i ascending.
    """

    valid: bool
    collision: tuple[tuple[int, int], tuple[int, int]] | None = None
    q: int | None = None

    def __bool__(self) -> bool:
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return "valid"
        (i, x), (j, y) = self.collision
        return f"{i}*{x} == {j}*{y} == {i * x % self.q} (mod {self.q})"


def verify(q: int, lam: int, elements: Iterable[int]) -> Verdict:
    seen: dict[int, tuple[int, int]] = {}
    for x in sorted(elements):
        for i in range(1, lam + 1):
            s = i * x % q
            if s in seen:
                return Verdict(False, (seen[s], (i, x)), q)
            seen[s] = (i, x)
    return Verdict(True, None, q)


def scale(bset: BSet, factor: int) -> list[int]:
    """factor * B mod q, keeping multiplicity (so a shrinking image is visible)."""
    return [factor * x % bset.q for x in bset.elements]


def _shape(shape_or_q) -> ModulusShape:
    return shape_or_q if isinstance(shape_or_q, ModulusShape) else factor_shape(shape_or_q)


def classify_V(shape: ModulusShape | int, x: int) -> int:
    """The divisor d of r with x in V_d, i.e. r / gcd(x, r)."""
    shape = _shape(shape)
    return shape.r // gcd(x % shape.q, shape.r)


def classify_U(shape: ModulusShape | int, x: int) -> tuple[int, int]:
    """(i, j) with gcd(x, 2^a 3^b) = 2^i 3^j."""
    shape = _shape(shape)
    x %= shape.q
    if x == 0:
        raise ValueError("0 lies in no U class")
    return min(valuation(x, 2), shape.a), min(valuation(x, 3), shape.b)


def classify_L(shape: ModulusShape | int, x: int) -> int:
    """2-adic class of x capped at 3; needs a >= 3."""
    shape = _shape(shape)
    if shape.a < 3:
        raise ValueError(f"L classes need a >= 3, q={shape.q} has a={shape.a}")
    x %= shape.q
    if x == 0:
        raise ValueError("0 lies in no L class")
    return min(valuation(x, 2), 3)


def classify_N(q: int, x: int) -> int:
    """0 for residues prime to 3, 1 for nonzero multiples of 3 (q divisible by 3)."""
    x %= q
    if x == 0:
        raise ValueError("0 lies in no N class")
    return 0 if x % 3 else 1


def partition(shape: ModulusShape | int, kind: str) -> dict:
    """Map class index -> sorted list of members, for kind in V, U, L, N."""
    shape = _shape(shape)
    q = shape.q
    if kind == "V":
        key, xs = (lambda x: classify_V(shape, x)), range(q)
    elif kind == "U":
        key, xs = (lambda x: classify_U(shape, x)), range(1, q)
    elif kind == "L":
        key, xs = (lambda x: classify_L(shape, x)), range(1, q)
    elif kind == "N":
        key, xs = (lambda x: classify_N(q, x)), range(1, q)
    else:
        raise ValueError(f"unknown partition kind {kind!r}")
    out: dict = {}
    for x in xs:
        out.setdefault(key(x), []).append(x)
    return out


def load_set(path: str | PathLike) -> BSet:
    with open(path) as fh:
        return BSet.from_json(json.load(fh))


def dump_set(bset: BSet, path: str | PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(bset.to_json(), fh)
        fh.write("\n")
