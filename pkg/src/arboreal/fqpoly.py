"""Polynomials over F_q and Frobenius signatures of iterated quadratics.

Coefficient lists are constant-term first and always reduced mod q with no
trailing zeros.  Factorization is squarefree decomposition, distinct-degree
factorization and Cantor-Zassenhaus equal-degree splitting; every factor
reported is re-checked with Rabin's irreducibility test.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from .intfactor import is_certified_prime
from .tree_core import FrobeniusSignature

MAX_DEGREE = 1 << 12
MAX_MODULUS = 1 << 62
SPLIT_RETRIES = 64


class RamifiedPrime(ValueError):
    """q is even or divides the discriminant of the polynomial in question."""


class SplittingFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class FpPoly:
    q: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [x % self.q for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def check_modulus(q: int) -> None:
    if q < 3 or q % 2 == 0:
        raise ValueError(f"modulus {q} must be an odd prime")
    if q >= MAX_MODULUS:
        raise ValueError(f"modulus {q} exceeds 2^62")
    if not is_certified_prime(q):
        raise ValueError(f"modulus {q} is composite")


def trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def add(f, g, q):
    n = max(len(f), len(g))
    return trim([((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % q for i in range(n)])


def sub(f, g, q):
    n = max(len(f), len(g))
    return trim([((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % q for i in range(n)])


def mul(f, g, q):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim([x % q for x in out])


def divmod_poly(f, g, q):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, q)
    if len(f) <= dg:
        return [], trim(f)
    quot = [0] * (len(f) - dg)
    for i in range(len(f) - 1, dg - 1, -1):
        coef = f[i] * inv % q
        if coef:
            quot[i - dg] = coef
            base = i - dg
            for j in range(dg + 1):
                f[base + j] = (f[base + j] - coef * g[j]) % q
    return trim(quot), trim(f[:dg])


def rem(f, g, q):
    return divmod_poly(f, g, q)[1]


def monic(f, q):
    if not f:
        return f
    inv = pow(f[-1], -1, q)
    return [x * inv % q for x in f]


def gcd(f, g, q):
    f, g = trim(list(f)), trim(list(g))
    while g:
        f, g = g, rem(f, g, q)
    return monic(f, q)


def derivative(f, q):
    return trim([i * a % q for i, a in enumerate(f)][1:])


def mulmod(f, g, m, q):
    return rem(mul(f, g, q), m, q)


def powmod(f, e, m, q):
    result = [1]
    base = rem(f, m, q)
    while e:
        if e & 1:
            result = mulmod(result, base, m, q)
        base = mulmod(base, base, m, q)
        e >>= 1
    return result


def compose_mod(f, g, m, q):
    """f(g) mod m, by Horner."""
    out: list[int] = []
    for a in reversed(f):
        out = add(mulmod(out, g, m, q), [a], q)
    return out


def iterate_mod(c: int, n: int, q: int) -> list[int]:
    """f^n mod q for f = x^2 + c, reducing before each squaring."""
    if n < 1:
        raise ValueError("level must be >= 1")
    if 1 << n > MAX_DEGREE:
        raise ValueError(f"degree 2^{n} exceeds the cap {MAX_DEGREE}")
    g = trim([c % q, 0, 1])
    for _ in range(n - 1):
        g = add(mul(g, g, q), [c % q], q)
    return g


def is_squarefree(f, q) -> bool:
    return len(gcd(f, derivative(f, q), q)) == 1


def _pth_root(f, q):
    """f(x) = g(x^q) with coefficient-wise q-th roots (identity on F_q)."""
    return [f[i] for i in range(0, len(f), q)]


def squarefree_decomposition(f, q) -> list[tuple[list[int], int]]:
    """Monic squarefree factors with multiplicities (Yun-style, char q)."""
    f = monic(trim(list(f)), q)
    out: list[tuple[list[int], int]] = []

    def rec(f, mult):
        if len(f) <= 1:
            return
        d = derivative(f, q)
        if not d:
            rec(_pth_root(f, q), mult * q)
            return
        c = gcd(f, d, q)
        w = divmod_poly(f, c, q)[0]
        i = 1
        while len(w) > 1:
            y = gcd(w, c, q)
            z = divmod_poly(w, y, q)[0]
            if len(z) > 1:
                out.append((monic(z, q), i * mult))
            i += 1
            w = y
            c = divmod_poly(c, y, q)[0]
        if len(c) > 1:
            rec(_pth_root(c, q), mult * q)

    rec(f, 1)
    return out


class _QPower:
    """The F_q-linear map g -> g^q mod m, as a matrix of rows x^(iq) mod m.

    Every polynomial handled during one factorization divides ``m``, so
    powers computed mod ``m`` reduce correctly mod any factor.
    """

    def __init__(self, m, q):
        self.m, self.q = m, q
        d = len(m) - 1
        xq = powmod([0, 1], q, m, q)
        rows = [[1]]
        for _ in range(1, d):
            rows.append(mulmod(rows[-1], xq, m, q))
        self.rows = rows
        self._xpowers = [[0, 1] if d > 1 else rem([0, 1], m, q)]

    def __call__(self, g):
        q = self.q
        out = [0] * (len(self.m) - 1)
        for gi, row in zip(g, self.rows):
            if gi:
                for j, r in enumerate(row):
                    out[j] += gi * r
        return trim([x % q for x in out])

    def x_power(self, e: int):
        """x^(q^e) mod m."""
        xs = self._xpowers
        while len(xs) <= e:
            xs.append(self(xs[-1]))
        return xs[e]


def distinct_degree(f, q, frob: _QPower | None = None) -> list[tuple[list[int], int]]:
    """Split squarefree monic f into products of all irreducible factors of each degree."""
    frob = frob or _QPower(f, q)
    out = []
    x = [0, 1]
    d = 0
    f = list(f)
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = rem(frob.x_power(d), f, q)
        g = gcd(f, sub(h, x, q), q)
        if len(g) > 1:
            out.append((g, d))
            f = divmod_poly(f, g, q)[0]
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def equal_degree(f, d, q, rng: random.Random, frob: _QPower | None = None) -> list[list[int]]:
    """Cantor-Zassenhaus split of a product of degree-d irreducibles.

    a^((q^d - 1)/2) is evaluated as N(a)^((q-1)/2) with N(a) = prod a^(q^i), i < d.
    """
    n = len(f) - 1
    if n == d:
        return [f]
    frob = frob or _QPower(f, q)
    for _ in range(SPLIT_RETRIES):
        a = trim([rng.randrange(q) for _ in range(n)])
        if len(a) <= 1:
            continue
        g = gcd(f, a, q)
        if len(g) == 1:
            norm, conj = a, a
            for _ in range(d - 1):
                conj = frob(conj)
                norm = mulmod(norm, conj, f, q)
            b = powmod(norm, (q - 1) // 2, f, q)
            g = gcd(f, sub(b, [1], q), q)
        if 1 < len(g) < len(f):
            h = divmod_poly(f, g, q)[0]
            return equal_degree(monic(g, q), d, q, rng, frob) + equal_degree(monic(h, q), d, q, rng, frob)
    raise SplittingFailure(f"equal-degree splitting of degree {n} (d={d}) mod {q} failed after {SPLIT_RETRIES} tries")


def _prime_divisors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f, q, frob: _QPower | None = None) -> bool:
    """Rabin: x^(q^d) = x mod f and gcd(x^(q^(d/r)) - x, f) = 1 for prime r | d.

    ``frob`` may be built on any multiple of f.
    """
    f = monic(trim(list(f)), q)
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    frob = frob or _QPower(f, q)
    x = [0, 1]
    if rem(sub(rem(frob.x_power(d), f, q), x, q), f, q):
        return False
    for r in _prime_divisors(d):
        if len(gcd(f, sub(rem(frob.x_power(d // r), f, q), x, q), q)) > 1:
            return False
    return True


def factor(f, q, rng: random.Random | None = None) -> list[tuple[list[int], int]]:
    """Monic irreducible factors with multiplicities, each verified irreducible."""
    check_modulus(q)
    f = trim([x % q for x in f])
    if len(f) < 2:
        raise ValueError("need a nonconstant polynomial")
    if len(f) - 1 > MAX_DEGREE:
        raise ValueError(f"degree {len(f) - 1} exceeds cap {MAX_DEGREE}")
    rng = rng or random.Random(0)
    out = []
    for part, mult in squarefree_decomposition(f, q):
        frob = _QPower(part, q)
        for prod, d in distinct_degree(part, q, frob):
            for g in equal_degree(prod, d, q, rng, frob):
                if len(g) - 1 != d or not is_irreducible(g, q, frob):
                    raise SplittingFailure(f"factor of degree {len(g) - 1} failed the irreducibility test")
                out.append((g, mult))
    out.sort(key=lambda t: (len(t[0]), t[0], t[1]))
    return out


def factor_degrees(f, q: int | None = None, rng: random.Random | None = None) -> dict[int, int]:
    """{degree: count} over irreducible factors counted with multiplicity.

    For squarefree input the counts are the multiplicities of each degree.
    """
    if isinstance(f, FpPoly):
        f, q = list(f.coeffs), f.q
    counts: Counter = Counter()
    for g, mult in factor(f, q, rng):
        counts[len(g) - 1] += mult
    return dict(sorted(counts.items()))


def _degree_partition(f, q, rng) -> tuple[int, ...]:
    return tuple(sorted((len(g) - 1 for g, _ in factor(f, q, rng)), reverse=True))


def _check_unramified(c: int, n: int, q: int) -> list[int]:
    if q % 2 == 0:
        raise RamifiedPrime(f"q = {q} is even (2 always divides the discriminant)")
    check_modulus(q)
    top = iterate_mod(c, n, q)
    if not is_squarefree(top, q):
        raise RamifiedPrime(f"q = {q} divides disc(f^{n}) for c = {c}")
    return top


def frobenius_signature(c: int, n: int, q: int, seed: int = 0) -> FrobeniusSignature:
    """Factor-degree partitions of f^k mod q, k = 1..n (q unramified)."""
    _check_unramified(c, n, q)
    rng = random.Random(seed ^ q)
    levels = tuple(_degree_partition(iterate_mod(c, k, q), q, rng) for k in range(1, n + 1))
    sig = FrobeniusSignature(levels)
    assert sig.is_projection_consistent(), f"inconsistent signature {sig} at q={q}"
    return sig


def quadratic_character(a: int, q: int) -> int:
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def stickelberger_check(c: int, k: int, q: int, disc: int | None = None, seed: int = 0) -> bool:
    """(-1)^(2^k - r) equals the quadratic character of disc(f^k) mod q.

    ``disc`` may be passed to avoid recomputing disc(f^k) over many primes.
    """
    top = _check_unramified(c, k, q)
    if disc is None:
        from .zzpoly import discriminant, iterate

        disc = discriminant(iterate(c, k))
    r = len(factor(top, q, random.Random(seed ^ q)))
    parity = -1 if ((1 << k) - r) % 2 else 1
    return parity == quadratic_character(disc, q)
