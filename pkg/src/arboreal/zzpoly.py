"""Integer polynomials for the iterates of f(x) = x^2 + c.

Polynomials are plain lists of Python ints, constant term first, with no
trailing zeros (the zero polynomial is ``[]``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .intfactor import DEFAULT_EFFORT, FactorizationIncomplete, factor_integer

IntPoly = list[int]

MAX_ITERATE_LEVEL = 16


def trim(f: Sequence[int]) -> IntPoly:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f: Sequence[int]) -> int:
    f = trim(f)
    return len(f) - 1 if f else -1


def add(f, g) -> IntPoly:
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def mul(f, g) -> IntPoly:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim(out)


def derivative(f) -> IntPoly:
    return trim([i * a for i, a in enumerate(f)][1:])


def evaluate(f, x):
    acc = 0
    for a in reversed(f):
        acc = acc * x + a
    return acc


def compose_poly(f, g) -> IntPoly:
    """f(g(x)) by Horner's rule."""
    out: IntPoly = []
    for a in reversed(f):
        out = add(mul(out, g), [a])
    return out


def to_string(f, var: str = "x") -> str:
    f = trim(f)
    if not f:
        return "0"
    terms = []
    for i in range(len(f) - 1, -1, -1):
        a = f[i]
        if not a:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(a) == 1:
            body = mono
        else:
            body = str(abs(a)) + ("*" + mono if mono else "")
        sign = "-" if a < 0 else "+"
        terms.append((sign, body))
    first_sign, first = terms[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text


def iterate(c: int, n: int) -> IntPoly:
    """f^n for f = x^2 + c, by repeated squaring-and-shift f^k = (f^(k-1))^2 + c."""
    if n < 1:
        raise ValueError("level must be >= 1")
    if n > MAX_ITERATE_LEVEL:
        raise ValueError(f"level {n} exceeds coefficient-size guard {MAX_ITERATE_LEVEL}")
    g = [c, 0, 1]
    for _ in range(n - 1):
        g = add(mul(g, g), [c])
    return g


def critical_orbit(c: int, n: int) -> list[int]:
    """[f(0), f^2(0), ..., f^n(0)]."""
    if n < 1:
        raise ValueError("need n >= 1")
    out, t = [], 0
    for _ in range(n):
        t = t * t + c
        out.append(t)
    return out


def adjusted_orbit(c: int, n: int) -> list[int]:
    """b_1 = -f(0), b_k = f^k(0) for k >= 2; kernel(b_1) = kernel(disc f)."""
    orbit = critical_orbit(c, n)
    orbit[0] = -orbit[0]
    return orbit


def _bareiss_det(matrix: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination."""
    a = [row[:] for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
            rowi[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def sylvester_matrix(f, g) -> list[list[int]]:
    f, g = trim(f), trim(g)
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    fr, gr = f[::-1], g[::-1]
    for i in range(n):
        rows.append([0] * i + fr + [0] * (size - i - m - 1))
    for i in range(m):
        rows.append([0] * i + gr + [0] * (size - i - n - 1))
    return rows


def resultant(f, g) -> int:
    f, g = trim(f), trim(g)
    if not f or not g:
        raise ValueError("resultant of the zero polynomial")
    m, n = len(f) - 1, len(g) - 1
    if m == 0:
        return f[0] ** n
    if n == 0:
        return g[0] ** m
    return _bareiss_det(sylvester_matrix(f, g))


def discriminant(f) -> int:
    f = trim(f)
    d = len(f) - 1
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return 1
    num = (-1) ** (d * (d - 1) // 2) * resultant(f, derivative(f))
    q, r = divmod(num, f[-1])
    assert r == 0
    return q


@dataclass(frozen=True)
class SquareClassVector:
    """Class of a nonzero rational in Q*/(Q*)^2: a sign and a set of primes."""

    sign: int
    primes: frozenset[int] = frozenset()

    @property
    def value(self) -> int:
        return self.sign * math.prod(self.primes)

    def __str__(self) -> str:
        return str(self.value)

    def coordinates(self) -> set:
        """Support over F_2 with -1 as an extra basis element."""
        out: set = set(self.primes)
        if self.sign < 0:
            out.add(-1)
        return out


def squarefree_kernel(m: int | Fraction, effort: int = DEFAULT_EFFORT, seed: int = 0) -> SquareClassVector:
    if isinstance(m, Fraction):
        # a/b and a*b share a square class
        m = m.numerator * m.denominator
    sign, fac = factor_integer(m, effort, seed)
    return SquareClassVector(sign, frozenset(p for p, e in fac.items() if e % 2))


def square_class_rank(vectors: Sequence[SquareClassVector]) -> int:
    """Rank over F_2 by elimination on bitmask rows."""
    index: dict = {}
    rows = []
    for v in vectors:
        mask = 0
        for coord in v.coordinates():
            mask |= 1 << index.setdefault(coord, len(index))
        rows.append(mask)
    basis: dict[int, int] = {}  # pivot bit -> row
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top not in basis:
                basis[top] = row
                break
            row ^= basis[top]
    return len(basis)


ODD_PRIMES_BELOW_100 = [p for p in range(3, 100, 2) if all(p % d for d in range(3, math.isqrt(p) + 1, 2))]


def irreducible_witness(c: int, n: int, primes: Sequence[int] = ODD_PRIMES_BELOW_100) -> int | None:
    """Least listed odd prime q (not dividing the discriminant) with f^n irreducible mod q."""
    from .fqpoly import factor_degrees, is_squarefree, iterate_mod

    for q in sorted(primes):
        if q % 2 == 0:
            continue
        f = iterate_mod(c, n, q)
        if not is_squarefree(f, q):
            continue
        degs = factor_degrees(f, q)
        if degs == {1 << n: 1}:
            return q
    return None


@dataclass
class CertificateLevel:
    k: int
    b: int
    kernel: SquareClassVector | None
    independent_so_far: bool
    witness: int | None
    verdict: str
    reason: str = ""

    def to_json(self) -> dict:
        out = {
            "k": self.k,
            "b": self.b,
            "kernel": str(self.kernel) if self.kernel is not None else None,
            "verdict": self.verdict,
        }
        out["witness"] = self.witness
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class Certificate:
    c: int
    n: int
    levels: list[CertificateLevel] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(lv.verdict == "holds" for lv in self.levels)

    def to_json(self) -> str:
        return json.dumps({"c": self.c, "n": self.n, "levels": [lv.to_json() for lv in self.levels]})


def surjectivity_certificate(
    c: int,
    n: int,
    effort: int = DEFAULT_EFFORT,
    primes: Sequence[int] = ODD_PRIMES_BELOW_100,
    seed: int = 0,
) -> Certificate:
    """Sufficient evidence that Gal(f^k) = W_k for k = 1..n.

    Level k holds when the square classes of b_1..b_k are independent over
    F_2 and f^k has an irreducibility witness mod some listed prime.  Anything
    else is reported as inconclusive, never as a failure of surjectivity.

    The criterion (a form of the Odoni and Stoll square-class test) comes
    from the literature on iterated quadratics, and its exact hypotheses are
    taken from there rather than derived here.  Treat a "holds" verdict as
    evidence under that criterion, not as an independent proof.
    """
    if c == 0:
        raise ValueError("c = 0 gives x^(2^n), which is not separable")
    if n < 1:
        raise ValueError("need n >= 1")
    cert = Certificate(c, n)
    kernels: list[SquareClassVector] = []
    broken = ""
    for k, b in enumerate(adjusted_orbit(c, n), start=1):
        kernel = None
        if not broken:
            try:
                kernel = squarefree_kernel(b, effort, seed)
            except FactorizationIncomplete as exc:
                broken = f"factorization incomplete at level {k}: {exc.reason}"
            except ValueError:
                broken = f"b_{k} = 0 has no square class"
        if kernel is not None:
            kernels.append(kernel)
            independent = square_class_rank(kernels) == k
            if not independent and not broken:
                broken = f"kernel of b_{k} is dependent on earlier levels"
        else:
            independent = False
        witness = irreducible_witness(c, k, primes)
        reason = broken
        if not reason and witness is None:
            reason = f"no irreducibility witness for level {k} among listed primes"
        verdict = "inconclusive" if reason else "holds"
        cert.levels.append(CertificateLevel(k, b, kernel, independent, witness, verdict, reason))
    return cert


@dataclass(frozen=True)
class GaloisTag:
    name: str
    order: int


_ORDERS = {"C4": 4, "V4": 4, "D4": 8, "A4": 12, "S4": 24}


def _is_square(n: int | Fraction) -> bool:
    n = Fraction(n)
    if n < 0:
        return False
    a, b = n.numerator, n.denominator
    return math.isqrt(a) ** 2 == a and math.isqrt(b) ** 2 == b


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    pos = sorted(set(small + [n // d for d in small]))
    return pos + [-d for d in pos]


def _integer_roots(f) -> list[int]:
    f = trim(f)
    if f[0] == 0:
        return [0] + _integer_roots(f[1:])
    return [r for r in _divisors(f[0]) if evaluate(f, r) == 0]


def quartic_is_irreducible(f) -> bool:
    """Monic integer quartic: no integer root and no split into integer quadratics."""
    f = trim(f)
    if len(f) != 5 or f[-1] != 1:
        raise ValueError("expected a monic quartic")
    d, c1, b, a = f[0], f[1], f[2], f[3]
    if _integer_roots(f):
        return False
    # (x^2 + p x + q)(x^2 + r x + s): q s = d, p + r = a, pr + q + s = b, ps + qr = c1
    for q in _divisors(d):
        s = d // q
        prod = b - q - s
        disc = a * a - 4 * prod
        if disc < 0 or math.isqrt(disc) ** 2 != disc:
            continue
        root = math.isqrt(disc)
        for p in {(a + root) // 2, (a - root) // 2}:
            r = a - p
            if (a + root) % 2 == 0 and p * r == prod and p * s + q * r == c1:
                return False
    return True


def resolvent_cubic(f) -> IntPoly:
    """Cubic whose roots are x1 x2 + x3 x4 and its conjugates."""
    d, c1, b, a = trim(f)[:4]
    return trim([-(a * a * d - 4 * b * d + c1 * c1), a * c1 - 4 * d, -b, 1])


def _quadratic_splits_over(u: int, v: int, delta: int) -> bool:
    """x^2 + u x + v splits over Q(sqrt(delta))."""
    disc = u * u - 4 * v
    return disc == 0 or _is_square(disc) or _is_square(disc * delta)


def quartic_galois(f) -> GaloisTag:
    """Galois group of an irreducible monic integer quartic (resolvent cubic method)."""
    f = trim(f)
    if not quartic_is_irreducible(f):
        raise ValueError(f"{to_string(f)} is reducible over Q")
    delta = discriminant(f)
    square = _is_square(delta)
    roots = _integer_roots(resolvent_cubic(f))
    distinct = sorted(set(roots))
    if not distinct:
        name = "A4" if square else "S4"
    elif len(distinct) == 3 or square:
        # full splitting of the resolvent: either three roots, or one root plus square disc
        name = "V4"
    else:
        r = distinct[0]
        d, _, b, a = f[:4]
        if _quadratic_splits_over(-r, d, delta) and _quadratic_splits_over(a, b - r, delta):
            name = "C4"
        else:
            name = "D4"
    return GaloisTag(name, _ORDERS[name])
