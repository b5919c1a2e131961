"""Single-check codes from B1[lambda](q) sets.

A word x over Z_q^m is a codeword when sum(x_i * b_i) == 0 (mod q).  A
single error adds e in [1, lambda] to one coordinate (wrapping mod q);
since B is a B1 set, the syndrome e * b_i pins down both the position and
the magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from types import MappingProxyType
from typing import Mapping, Sequence

from .bset import BSet, verify

__all__ = [
    "Code",
    "SyndromeTable",
    "Decoded",
    "EncodingUnsupported",
    "build_code",
    "syndrome",
    "decode",
    "encode",
]


class EncodingUnsupported(ValueError):
    """The check row has no element invertible mod q."""


@dataclass(frozen=True)
class Code:
    q: int
    lam: int
    check_row: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.check_row)

    def check_position(self) -> int | None:
        """Position of the smallest check element that is a unit mod q."""
        units = [(b, i) for i, b in enumerate(self.check_row) if gcd(b, self.q) == 1]
        return min(units)[1] if units else None


@dataclass(frozen=True)
class SyndromeTable:
    lookup: Mapping[int, tuple[int, int]]

    def __len__(self) -> int:
        return len(self.lookup)

    def get(self, s: int) -> tuple[int, int] | None:
        return self.lookup.get(s)


@dataclass(frozen=True)
class Decoded:
    word: tuple[int, ...]
    status: str  # "no-error", "corrected" or "uncorrectable"
    syndrome: int
    position: int | None = None
    magnitude: int | None = None

    @property
    def error(self) -> tuple[int, int] | None:
        return None if self.position is None else (self.position, self.magnitude)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "syndrome": self.syndrome,
            "word": list(self.word),
            "error": None
            if self.position is None
            else {"position": self.position, "magnitude": self.magnitude},
        }


def build_code(bset: BSet) -> tuple[Code, SyndromeTable]:
    """Code with check row B and its syndrome lookup.

    A B1 set may contain an x with lam*x == 0 (mod q); such an error would
    look like no error at all, so those sets are rejected here too.
    """
    verdict = bset.verify()
    if not verdict:
        raise ValueError(f"not a B1[{bset.lam}]({bset.q}) set: {verdict.describe()}")
    q, lam = bset.q, bset.lam
    lookup: dict[int, tuple[int, int]] = {}
    for i, b in enumerate(bset.elements):
        for e in range(1, lam + 1):
            s = e * b % q
            if s == 0:
                raise ValueError(f"error {e} on element {b} has syndrome 0 mod {q}")
            if s in lookup:
                raise AssertionError(f"syndrome {s} is ambiguous")
            lookup[s] = (i, e)
    return Code(q, lam, bset.elements), SyndromeTable(MappingProxyType(lookup))


def _word(code: Code, word: Sequence[int]) -> tuple[int, ...]:
    if len(word) != code.m:
        raise ValueError(f"word has length {len(word)}, code length is {code.m}")
    return tuple(int(x) % code.q for x in word)


def syndrome(code: Code, word: Sequence[int]) -> int:
    word = _word(code, word)
    return sum(x * b for x, b in zip(word, code.check_row)) % code.q


def decode(code: Code, table: SyndromeTable, received: Sequence[int]) -> Decoded:
    word = _word(code, received)
    s = syndrome(code, word)
    if s == 0:
        return Decoded(word, "no-error", 0)
    hit = table.get(s)
    if hit is None:
        return Decoded(word, "uncorrectable", s)
    i, e = hit
    fixed = list(word)
    fixed[i] = (fixed[i] - e) % code.q
    return Decoded(tuple(fixed), "corrected", s, i, e)


def encode(code: Code, message: Sequence[int]) -> tuple[int, ...]:
    """Systematic codeword: message in order around the check position."""
    j = code.check_position()
    if j is None:
        raise EncodingUnsupported(f"no check element is a unit mod {code.q}")
    if len(message) != code.m - 1:
        raise ValueError(f"message has length {len(message)}, need {code.m - 1}")
    q = code.q
    word = [int(x) % q for x in message]
    word.insert(j, 0)
    rest = sum(x * b for x, b in zip(word, code.check_row)) % q
    word[j] = -rest * pow(code.check_row[j], -1, q) % q
    return tuple(word)
