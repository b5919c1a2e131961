"""Elementary number theory used by the constructions.

Totients, multiplicative orders (computed prime-power by prime-power and
lcm-combined), coset systems of the subgroup generated by 2, and
cyclotomic orbits.  Everything here works on plain Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, lcm

__all__ = [
    "ModulusShape",
    "OrderProfile",
    "CosetSystem",
    "factorize",
    "divisors",
    "valuation",
    "euler_phi",
    "ord",
    "ord_naive",
    "order_profile",
    "coset_reps",
    "gamma_3d",
    "cube_orbit_clash",
    "cyclotomic_set",
    "factor_shape",
]


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization, ascending primes."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def valuation(x: int, p: int) -> int:
    """Exponent of p in x; x must be nonzero."""
    if x == 0:
        raise ValueError("valuation of 0 is unbounded")
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError(f"euler_phi needs n >= 1, got {n}")
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def ord_naive(d: int, l: int) -> int:
    """Multiplicative order by repeated multiplication (test oracle)."""
    if gcd(l, d) != 1:
        raise ValueError(f"{l} is not a unit modulo {d}")
    if d == 1:
        return 1
    x, n = l % d, 1
    while x != 1:
        x = x * l % d
        n += 1
    return n


def _ord_prime(p: int, l: int) -> int:
    # order divides p - 1; strip prime factors while it still works
    n = p - 1
    for f, _ in factorize(n) if n > 1 else []:
        while n % f == 0 and pow(l, n // f, p) == 1:
            n //= f
    return n


def _ord_prime_power(p: int, k: int, l: int) -> tuple[int, int]:
    """Return (ord_{p^k}(l), mu_p)."""
    if l == 1:
        return 1, k
    if p == 2:
        if l % 4 == 1:
            mu = valuation(l - 1, 2)
            return (1 if k <= mu else 2 ** (k - mu)), mu
        # l = 3 (mod 4): 1 mod 2, order 2 up to the 2-adic depth of l^2 - 1
        mu = valuation(l - 1, 2)
        if k == 1:
            return 1, mu
        depth = valuation(l * l - 1, 2)
        return (2 if k <= depth else 2 ** (k - depth + 1)), mu
    base = _ord_prime(p, l % p)
    mu = valuation(pow(l, base) - 1, p)
    return (base if k <= mu else p ** (k - mu) * base), mu


def ord(d: int, l: int) -> int:
    """Smallest n > 0 with l**n == 1 (mod d).

    Computed per prime power of d and combined with lcm.
    """
    if d < 1:
        raise ValueError(f"modulus must be positive, got {d}")
    if gcd(l, d) != 1:
        raise ValueError(f"{l} is not a unit modulo {d}")
    n = 1
    l = l % d or d  # keep l positive; representative does not matter
    if d == 1:
        return 1
    for p, k in factorize(d):
        n = lcm(n, _ord_prime_power(p, k, l)[0])
    return n


@dataclass(frozen=True)
class OrderProfile:
    d: int
    l: int
    n: int
    n1: int
    m: dict[int, int] = field(default_factory=dict)
    mu: dict[int, int] = field(default_factory=dict)


def order_profile(d: int, l: int = 2, powers_of_three: tuple[int, ...] = ()) -> OrderProfile:
    """Orders of l modulo d, 3d and 3^i d, plus the valuation exponents mu_p."""
    lp = l % d or d
    mu = {p: _ord_prime_power(p, k, lp)[1] for p, k in factorize(d)} if d > 1 else {}
    return OrderProfile(
        d=d,
        l=l,
        n=ord(d, l),
        n1=ord(3 * d, l),
        m={i: ord(3**i * d, l) for i in powers_of_three},
        mu=mu,
    )


@dataclass(frozen=True)
class CosetSystem:
    modulus: int
    generator: int
    reps: tuple[int, ...]
    kind: str = "raw"

    def coset(self, x: int) -> list[int]:
        return _orbit(x % self.modulus, self.generator, self.modulus)


def _orbit(x: int, g: int, m: int) -> list[int]:
    out = [x]
    y = x * g % m
    while y != x:
        out.append(y)
        y = y * g % m
    return out


def coset_reps(modulus: int, generator: int = 2) -> CosetSystem:
    """Smallest element of each coset of <generator> in the unit group, ascending."""
    if modulus == 1:
        return CosetSystem(1, generator, (1,))
    if gcd(generator, modulus) != 1:
        raise ValueError(f"{generator} is not a unit modulo {modulus}")
    seen = set()
    reps = []
    for x in range(1, modulus):
        if x in seen or gcd(x, modulus) != 1:
            continue
        reps.append(x)
        seen.update(_orbit(x, generator, modulus))
    return CosetSystem(modulus, generator, tuple(reps))


def cube_orbit_clash(d: int, reps) -> tuple[int, int] | None:
    """First pair (x, y) of distinct reps with 8^i x == 8^j y (mod d).

    i and j range over [0, ord_d(2) // 3), the exponents used by the
    order-3d set construction.
    """
    top = ord(d, 2) // 3
    cubes = [pow(8, i, d) for i in range(top)]
    seen: dict[int, int] = {}
    for x in reps:
        mine = {c * x % d for c in cubes}
        for v in mine:
            if v in seen:
                return seen[v], x
        for v in mine:
            seen[v] = x
    return None


def gamma_3d(d: int) -> CosetSystem:
    """Coset representatives of <2> in the units mod 3d whose 8-power orbits stay apart mod d.

    Odd ord_d(2): the raw system already works.  Even ord_d(2): a rep y
    clashing with an earlier rep x is replaced by 2(x + l*d) for the l in
    {1, 2} with 3 not dividing x + l*d; if that still clashes, the first
    element of y's coset that does not is used.
    """
    if d < 5 or gcd(d, 6) != 1:
        raise ValueError(f"gamma_3d needs d >= 5 coprime to 6, got {d}")
    m = 3 * d
    raw = coset_reps(m, 2)
    if ord(d, 2) % 2 == 1:
        return CosetSystem(m, 2, raw.reps, "cube-adjusted")

    chosen: list[int] = []
    for y in raw.reps:
        if cube_orbit_clash(d, chosen + [y]) is None:
            chosen.append(y)
            continue
        coset = set(_orbit(y, 2, m))
        candidates = []
        for x in chosen:
            for l in (1, 2):
                if (x + l * d) % 3 and (x + l * d) % m in coset:
                    candidates.append(2 * (x + l * d) % m)
        candidates += sorted(coset)
        for c in candidates:
            if cube_orbit_clash(d, chosen + [c]) is None:
                chosen.append(c)
                break
        else:
            raise RuntimeError(f"no admissible representative for the coset of {y} mod {m}")
    return CosetSystem(m, 2, tuple(chosen), "cube-adjusted")


def cyclotomic_set(q: int, beta: int, l: int = 2) -> tuple[int, ...]:
    """Orbit of beta under multiplication by l modulo q, in generation order."""
    return tuple(_orbit(beta % q, l, q))


@dataclass(frozen=True)
class ModulusShape:
    """q = 2**a * 3**b * r with gcd(r, 6) = 1."""

    q: int
    a: int
    b: int
    r: int
    r_factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        for p, e in self.r_factors:
            prod *= p**e
        if self.q != 2**self.a * 3**self.b * self.r or gcd(self.r, 6) != 1 or prod != self.r:
            raise ValueError(f"inconsistent shape {self}")

    def r_divisors(self) -> list[int]:
        return divisors(self.r)


def factor_shape(q: int) -> ModulusShape:
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    r, a, b = q, 0, 0
    while r % 2 == 0:
        r //= 2
        a += 1
    while r % 3 == 0:
        r //= 3
        b += 1
    return ModulusShape(q, a, b, r, tuple(factorize(r)))
