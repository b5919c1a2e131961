"""Explicit B1[4] constructions for moduli 2^a 3^b r, gcd(r, 6) = 1.

Five builders, each taking a B1[4] set for a smaller modulus (where one
is needed) and returning a B1[4] set for q:

* ``thm1_build``  a >= 4:        |B| = |base| + q/8, base over q/8 (exact)
* ``thm2_build``  a = 3, b >= 1: |B| = |base| + 3^b r, base over 3^b r (exact)
* ``thm3_build``  a = 0, b = 1:  |B| = sum over d | r of m4_prime_formula(d) (exact)
* ``thm4_build``  a = 2, b = 1:  |B| = |base| + 2r, base over 2r (lower bound)
* ``thm5_build``  a = 1, b >= 3: base over 2 * 3^(b-3) r (lower bound)

:func:`dispatch` chains them, asking a :class:`BaseProvider` for whatever
modulus no builder covers.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from math import gcd, lcm
from pathlib import Path

from .bset import BSet, load_set, verify
from .numtheory import (
    ModulusShape,
    coset_reps,
    divisors,
    euler_phi,
    factor_shape,
    gamma_3d,
    ord,
)
from .oracle import DEFAULT_MAX_NODES, DEFAULT_MAX_SECONDS, max_bset_exact, max_bset_restricted

__all__ = [
    "SizeFormula",
    "Step",
    "ConstructionReport",
    "BaseProvider",
    "BaseUnavailable",
    "BUILTIN_BASES",
    "thm1_build",
    "thm2_part",
    "thm2_build",
    "thm3_part",
    "thm3_build",
    "m4_prime_formula",
    "thm4_part",
    "thm4_build",
    "thm5_a_part",
    "thm5_t_part",
    "thm5_build",
    "thm5_deficit",
    "thm5_formula_size",
    "dispatch",
]

log = logging.getLogger(__name__)

LAMBDA = 4

# sets quoted in the worked examples, with whether they are maximal.
# {1, 7} mod 30 is the base behind the 32-element set for 240; it is valid
# but M4(30) = 6, so it only yields a lower bound there.
BUILTIN_BASES = {
    6: ((1,), True),
    10: ((1, 9), True),
    14: ((1, 13), True),
    15: ((1, 7), True),
    30: ((1, 7), False),
}


def _shape(q_or_shape) -> ModulusShape:
    if isinstance(q_or_shape, ModulusShape):
        return q_or_shape
    return factor_shape(q_or_shape)


def _assemble(q: int, parts) -> BSet:
    """Union of residue lists that must not overlap."""
    seen: set[int] = set()
    for part in parts:
        for x in part:
            x %= q
            if x in seen:
                raise RuntimeError(f"construction blocks overlap at {x} mod {q}")
            seen.add(x)
    return BSet.of(q, seen, LAMBDA)


def _checked(bset: BSet, what: str) -> BSet:
    verdict = bset.verify()
    if not verdict:
        raise RuntimeError(f"{what} produced an invalid set: {verdict.describe()}")
    return bset


def _check_base(base: BSet, q: int, what: str) -> None:
    if base.q != q:
        raise ValueError(f"{what} needs a base set modulo {q}, got modulo {base.q}")
    if base.lam != LAMBDA:
        raise ValueError(f"{what} only handles lambda = {LAMBDA}")
    verdict = base.verify()
    if not verdict:
        raise ValueError(f"{what}: base set is not B1[4]({q}): {verdict.describe()}")


# -- a >= 4 ---------------------------------------------------------------


def thm1_build(shape, base: BSet) -> BSet:
    """Two arithmetic progressions of odd residues plus 8 * base."""
    s = _shape(shape)
    if s.a < 4:
        raise ValueError(f"needs a >= 4, q={s.q} has a={s.a}")
    _check_base(base, s.q // 8, "thm1_build")
    count = 2 ** (s.a - 4) * 3**s.b * s.r
    shift = 2 ** (s.a - 2) * 3 ** (s.b + 1) * s.r
    s1 = [4 * i + 1 for i in range(count)]
    s2 = [4 * i + 3 + shift for i in range(count)]
    return _checked(_assemble(s.q, [s1, s2, [8 * c for c in base]]), "thm1_build")


# -- a = 3 ----------------------------------------------------------------


def thm2_part(shape, j: int, d: int) -> list[int]:
    """The block S_{j,d} of residues divisible by exactly 3^(b-j), inside V_d."""
    s = _shape(shape)
    alpha = s.r // d
    step = 3 ** (s.b - j) * alpha
    m = 3**j * d
    lift = 2 * 3**s.b * s.r
    low = [i * step + lift for i in range(1, m + 2) if gcd(i, 2 * m) == 1]
    high = [i * step for i in range(m + 2, 2 * m) if gcd(i, 2 * m) == 1]
    return [x % s.q for x in low + high]


def thm2_build(shape, base: BSet) -> BSet:
    s = _shape(shape)
    if s.a != 3 or s.b < 1:
        raise ValueError(f"needs a = 3 and b >= 1, got q={s.q} (a={s.a}, b={s.b})")
    _check_base(base, s.q // 8, "thm2_build")
    parts = [thm2_part(s, j, d) for d in divisors(s.r) for j in range(s.b + 1)]
    parts.append([8 * c for c in base])
    return _checked(_assemble(s.q, parts), "thm2_build")


# -- a = 0, b = 1 ---------------------------------------------------------


@dataclass(frozen=True)
class SizeFormula:
    d: int
    n: int
    value: int


def m4_prime_formula(d: int, n: int | None = None) -> SizeFormula:
    """Largest number of elements of a B1[4](3r) set inside V_d."""
    if gcd(d, 6) != 1:
        raise ValueError(f"d must be coprime to 6, got {d}")
    if n is None:
        n = ord(d, 2)
    if d == 1:
        return SizeFormula(1, n, 0)
    phi = euler_phi(d)
    if n % 2:
        num, den = (-(-2 * n // 3) - 1) * phi, n
    else:
        num, den = (n // 3) * 2 * phi, n
    if num % den:
        raise ArithmeticError(f"non-integral size for d={d}, n={n}")
    return SizeFormula(d, n, num // den)


def thm3_part(r: int, d: int) -> list[int]:
    """Orbit pieces 8^i * x * r/d (mod 3r) over the adjusted coset system for 3d."""
    if d == 1:
        return []
    q = 3 * r
    n = ord(d, 2)
    out = []
    for x in gamma_3d(d).reps:
        eta = x * (r // d)
        if n % 2 == 0:
            out += [pow(2, 3 * i, q) * eta % q for i in range(n // 3)]
        elif n % 3:
            out += [pow(2, 3 * i, q) * eta % q for i in range((2 * n) // 3)]
        else:
            out += [pow(2, 3 * i, q) * eta % q for i in range(n // 3)]
            out += [pow(2, 3 * i + 1, q) * eta % q for i in range(n // 3, (2 * n - 3) // 3)]
    return out


def _v_class(r: int, d: int) -> list[int]:
    q, alpha = 3 * r, r // d
    return [x * alpha % q for x in range(3 * d) if gcd(x, d) == 1]


def thm3_build(shape, *, notes: list[str] | None = None) -> BSet:
    s = _shape(shape)
    if s.a != 0 or s.b != 1:
        raise ValueError(f"needs q = 3r, got q={s.q}")
    parts = []
    for d in divisors(s.r):
        want = m4_prime_formula(d).value
        part = thm3_part(s.r, d)
        if len(set(part)) != want or not verify(s.q, LAMBDA, part):
            # searched instead; the per-class optimum is what the formula promises
            found = max_bset_restricted(s.q, LAMBDA, _v_class(s.r, d))
            if not found.exact or found.max_size != want:
                raise RuntimeError(f"no set of size {want} inside V_{d} mod {s.q}")
            part = list(found.witness.elements)
            if notes is not None:
                notes.append(f"V_{d} mod {s.q}: orbit pieces failed, used search")
        parts.append(part)
    return _checked(_assemble(s.q, parts), "thm3_build")


# -- a = 2, b = 1 ---------------------------------------------------------


def thm4_part(shape, d: int) -> list[int]:
    """A_d: units of Z_12r inside V_d whose triples exhaust V_d cap U_01."""
    s = _shape(shape)
    r, alpha = s.r, s.r // d
    mid, top = (2 * d) // 3, (4 * d) // 3
    s1 = [i * alpha for i in range(1, 4 * d) if gcd(i, 6 * d) == 1]
    s2 = [4 * r + 3 * i * alpha for i in range(1, mid + 1) if gcd(i, 2 * d) == 1]
    s3 = [8 * r + 3 * i * alpha for i in range(mid + 1, top + 1) if gcd(i, 2 * d) == 1]
    return [x % s.q for x in s1 + s2 + s3]


def thm4_build(shape, base: BSet) -> BSet:
    s = _shape(shape)
    if s.a != 2 or s.b != 1:
        raise ValueError(f"needs q = 12r, got q={s.q}")
    _check_base(base, 2 * s.r, "thm4_build")
    parts = [thm4_part(s, d) for d in divisors(s.r)]
    parts.append([6 * c for c in base])
    return _checked(_assemble(s.q, parts), "thm4_build")


# -- a = 1, b >= 3 --------------------------------------------------------


def _need_thm5(s: ModulusShape) -> None:
    if s.a != 1 or s.b < 3:
        raise ValueError(f"needs q = 2 * 3^b r with b >= 3, got q={s.q}")


def thm5_a_part(shape, d: int) -> list[int]:
    s = _shape(shape)
    _need_thm5(s)
    alpha = s.r // d
    m = 3 ** (s.b - 1) * d
    lift = 4 * 3 ** (s.b - 1) * s.r
    low = [i * alpha for i in range(1, m + 2) if gcd(i, 2 * m) == 1]
    high = [i * alpha + lift for i in range(m + 2, 2 * m) if gcd(i, 2 * m) == 1]
    return [x % s.q for x in low + high]


def thm5_t_part(shape, d: int) -> tuple[int, list[int]]:
    """(case, T_d) with T_d a list of residues mod 3^(b-1) r.

    case 1: m_{b-1} = 3 m_{b-2}, 3 does not divide m_{b-2}
    case 2: m_{b-1} = 3 m_{b-2}, 3 divides m_{b-2}
    case 3: m_{b-1} = m_{b-2}
    where m_i = ord_{3^i d}(2).  Coset representatives are taken modulo
    3^(b-2) d; in cases 1 and 2 that is the same number of cosets as
    modulo 3^(b-1) d, and in case 3 the three shifted blocks supply the
    three lifts of each representative.
    """
    s = _shape(shape)
    _need_thm5(s)
    mod = 3 ** (s.b - 1) * s.r
    hi = ord(3 ** (s.b - 1) * d, 2)
    lo = ord(3 ** (s.b - 2) * d, 2)
    reps = coset_reps(3 ** (s.b - 2) * d, 2).reps
    out = []
    if hi == 3 * lo:
        case = 1 if lo % 3 else 2
    elif hi == lo:
        case = 3
    else:
        raise ArithmeticError(f"unexpected order ratio {hi}/{lo} for d={d}")
    for x in reps:
        eta = x * (s.r // d)
        if case == 1:
            out += [pow(2, 3 * i, mod) * eta % mod for i in range(lo)]
        elif case == 2:
            out += [pow(2, 3 * i, mod) * eta % mod for i in range(lo // 3)]
            out += [pow(2, 3 * i + 1, mod) * eta % mod for i in range(lo // 3, 2 * lo // 3)]
            out += [pow(2, 3 * i + 2, mod) * eta % mod for i in range(2 * lo // 3, lo - 1)]
        else:
            for delta in range(3):
                shifted = eta + 3 ** (s.b - 2) * s.r * delta
                out += [pow(2, 3 * i + delta, mod) * shifted % mod for i in range(hi // 3)]
    return case, out


def thm5_build(shape, base: BSet) -> BSet:
    s = _shape(shape)
    _need_thm5(s)
    _check_base(base, 2 * 3 ** (s.b - 3) * s.r, "thm5_build")
    parts = []
    for d in divisors(s.r):
        parts.append(thm5_a_part(s, d))
        parts.append([6 * t for t in thm5_t_part(s, d)[1]])
    parts.append([27 * c for c in base])
    return _checked(_assemble(s.q, parts), "thm5_build")


def thm5_deficit(shape) -> int:
    """Sum over d | r with 3^(b-2) not dividing ord_d(2) of 2*3^(b-3)*phi(d)/lcm(2*3^(b-3), ord_d(2))."""
    s = _shape(shape)
    _need_thm5(s)
    unit = 2 * 3 ** (s.b - 3)
    total = 0
    for d in divisors(s.r):
        n = ord(d, 2)
        if n % 3 ** (s.b - 2):
            total += unit * euler_phi(d) // lcm(unit, n)
    return total


def thm5_formula_size(shape, base_size: int) -> int:
    s = _shape(shape)
    return base_size + 8 * 3 ** (s.b - 3) * s.r - thm5_deficit(s)


# -- dispatch -------------------------------------------------------------


class BaseUnavailable(RuntimeError):
    def __init__(self, q: int, reason: str, budget: bool = False):
        super().__init__(f"no base set for q={q}: {reason}")
        self.q = q
        self.budget = budget


@dataclass
class BaseProvider:
    """Where base sets come from: builtin examples, then files, then search.

    ``base_file`` is one set file; ``base_dir`` (default: $B1SET_BASE_DIR)
    is scanned for ``*.json`` set files.  File sets are trusted as valid
    (they are verified) but not as maximal.
    """

    base_file: str | os.PathLike | None = None
    base_dir: str | os.PathLike | None = None
    use_builtin: bool = True
    use_oracle: bool = True
    max_nodes: int = DEFAULT_MAX_NODES
    max_seconds: float = DEFAULT_MAX_SECONDS

    def __post_init__(self):
        if self.base_dir is None:
            self.base_dir = os.environ.get("B1SET_BASE_DIR") or None

    def _file_sets(self):
        paths = []
        if self.base_file is not None:
            paths.append(Path(self.base_file))
        if self.base_dir is not None:
            paths += sorted(Path(self.base_dir).glob("*.json"))
        for path in paths:
            try:
                yield path, load_set(path)
            except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
                log.warning("skipping set file %s: %s", path, exc)

    def get(self, q: int) -> tuple[BSet, str, bool]:
        """Return (set, source, exact) for modulus q."""
        if self.use_builtin and q in BUILTIN_BASES:
            elements, maximal = BUILTIN_BASES[q]
            return BSet.of(q, elements), "builtin-example", maximal
        for path, bset in self._file_sets():
            if bset.q == q and bset.lam == LAMBDA:
                verdict = bset.verify()
                if not verdict:
                    raise BaseUnavailable(q, f"{path} is not B1[4]: {verdict.describe()}")
                return bset, "user-file", False
        if not self.use_oracle:
            raise BaseUnavailable(q, "not builtin, no matching set file, search disabled")
        res = max_bset_exact(q, LAMBDA, self.max_nodes, self.max_seconds)
        if not res.exact:
            raise BaseUnavailable(
                q, f"search budget exhausted (best so far {res.max_size})", budget=True
            )
        return res.witness, "oracle", True


@dataclass(frozen=True)
class Step:
    theorem: str  # "thm1".."thm5" or "base"
    q: int
    sub_q: int | None
    contributed: int
    source: str | None = None
    formula_size: int | None = None
    deficit: int | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass
class ConstructionReport:
    q: int
    steps: list[Step] = field(default_factory=list)
    base_source: str = "none"
    exactness: str = "exact"
    predicted_size: int = 0
    deficit: int | None = None
    formula_size: int | None = None
    discrepancy: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.exactness == "exact"

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "size": self.predicted_size,
            "exactness": self.exactness,
            "base_source": self.base_source,
            "steps": [s.to_json() for s in self.steps],
            "deficit": self.deficit,
            "formula_size": self.formula_size,
            "discrepancy": self.discrepancy,
            "notes": self.notes,
        }


def dispatch(q: int, provider: BaseProvider | None = None) -> tuple[BSet, ConstructionReport]:
    """Build a B1[4](q) set by recursing through the builder that fits q's shape.

    The maximality-preserving builders (thm1-thm3) are applied wherever they
    fit.  thm4 and thm5 only give lower bounds, so they are applied to q
    itself but not to sub-moduli: those go to the provider first and fall
    back to thm4/thm5 only if it fails.
    The report lists the steps outermost first and whether the result is
    provably maximal.
    """
    if q < 2:
        raise ValueError(f"modulus must be at least 2, got {q}")
    provider = provider or BaseProvider()
    report = ConstructionReport(q)
    bset, exact = _dispatch(q, provider, report, top=True)
    report.exactness = "exact" if exact else "lower-bound"
    report.predicted_size = len(bset)
    if report.deficit is not None:
        report.discrepancy = report.formula_size != len(bset)
    return bset, report


def _dispatch(
    q: int, provider: BaseProvider, report: ConstructionReport, top: bool
) -> tuple[BSet, bool]:
    s = factor_shape(q)
    if s.a >= 4:
        base, exact = _dispatch(q // 8, provider, report, False)
        out = thm1_build(s, base)
        _expect(out, len(base) + q // 8, "thm1")
        report.steps.insert(0, Step("thm1", q, q // 8, q // 8))
        return out, exact
    if s.a == 3 and s.b >= 1:
        sub = q // 8
        base, exact = _dispatch(sub, provider, report, False)
        out = thm2_build(s, base)
        _expect(out, len(base) + sub, "thm2")
        report.steps.insert(0, Step("thm2", q, sub, sub))
        return out, exact
    if s.a == 0 and s.b == 1:
        out = thm3_build(s, notes=report.notes)
        want = sum(m4_prime_formula(d).value for d in divisors(s.r))
        _expect(out, want, "thm3")
        report.steps.insert(0, Step("thm3", q, None, len(out)))
        return out, True
    lower = (s.a == 2 and s.b == 1) or (s.a == 1 and s.b >= 3)
    if lower and not top:
        try:
            return _from_provider(q, provider, report)
        except BaseUnavailable as exc:
            report.notes.append(f"{exc}; using the lower-bound construction")
    if s.a == 2 and s.b == 1:
        sub = 2 * s.r
        base, _ = _dispatch(sub, provider, report, False)
        out = thm4_build(s, base)
        _expect(out, len(base) + 2 * s.r, "thm4")
        report.steps.insert(0, Step("thm4", q, sub, 2 * s.r))
        return out, False
    if s.a == 1 and s.b >= 3:
        sub = 2 * 3 ** (s.b - 3) * s.r
        base, _ = _dispatch(sub, provider, report, False)
        out = thm5_build(s, base)
        deficit = thm5_deficit(s)
        formula = thm5_formula_size(s, len(base))
        report.steps.insert(
            0, Step("thm5", q, sub, len(out) - len(base), formula_size=formula, deficit=deficit)
        )
        if top:
            report.deficit, report.formula_size = deficit, formula
        if formula != len(out):
            report.notes.append(
                f"q={q}: constructed {len(out)} elements, deficit formula gives {formula}"
            )
        return out, False
    return _from_provider(q, provider, report)


def _from_provider(q: int, provider: BaseProvider, report: ConstructionReport) -> tuple[BSet, bool]:
    base, source, exact = provider.get(q)
    report.base_source = source
    report.steps.insert(0, Step("base", q, None, len(base), source=source))
    return base, exact


def _expect(bset: BSet, size: int, what: str) -> None:
    if len(bset) != size:
        raise RuntimeError(f"{what} built {len(bset)} elements, size identity says {size}")
