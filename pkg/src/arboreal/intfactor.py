"""Integer factorization: trial division, Brent's rho, deterministic Miller-Rabin."""

from __future__ import annotations

import math
import random

# Deterministic for n < 3.317e24 (Sorenson & Webster).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_CERTIFIED_LIMIT = 3_317_044_064_679_887_385_961_981
_TRIAL_LIMIT = 1000
_SMALL_PRIMES = [p for p in range(2, _TRIAL_LIMIT) if all(p % d for d in range(2, math.isqrt(p) + 1))]

DEFAULT_EFFORT = 1 << 20


class FactorizationIncomplete(ArithmeticError):
    """The cofactor could not be split or certified within the effort bound."""

    def __init__(self, n: int, partial: dict[int, int], unfactored: int, reason: str):
        super().__init__(f"factorization of {n} incomplete: {reason} (cofactor {unfactored})")
        self.n = n
        self.partial = partial
        self.unfactored = unfactored
        self.reason = reason


def is_certified_prime(n: int) -> bool:
    """Exact primality for n below MR_CERTIFIED_LIMIT; raise above it."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n >= MR_CERTIFIED_LIMIT:
        raise ValueError(f"{n} is beyond the certified primality range")
    return _strong_probable_prime(n)


def _strong_probable_prime(n: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int, rng: random.Random, budget: int) -> tuple[int | None, int]:
    """One Brent-rho run; returns (factor or None, iterations used)."""
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    used = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        used += r
        r *= 2
        if used > budget:
            return None, used
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return (g if g != n else None), used


def factor_integer(m: int, effort: int = DEFAULT_EFFORT, seed: int = 0) -> tuple[int, dict[int, int]]:
    """Return (sign, {prime: exponent}) with every prime certified.

    ``effort`` bounds the total number of rho iterations.
    """
    if m == 0:
        raise ValueError("cannot factor 0")
    sign = -1 if m < 0 else 1
    n = abs(m)
    factors: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    rng = random.Random(seed)
    stack = [n] if n > 1 else []
    spent = 0
    while stack:
        x = stack.pop()
        if x < _TRIAL_LIMIT ** 2 or (x < MR_CERTIFIED_LIMIT and is_certified_prime(x)):
            # below 10^6 with no factor <= 1000 means prime
            factors[x] = factors.get(x, 0) + 1
            continue
        if x >= MR_CERTIFIED_LIMIT and _strong_probable_prime(x):
            raise FactorizationIncomplete(
                sign * abs(m), dict(factors), x, "probable prime beyond certified primality range"
            )
        r = math.isqrt(x)
        if r * r == x:
            stack += [r, r]
            continue
        found = None
        while found is None:
            if spent > effort:
                raise FactorizationIncomplete(sign * abs(m), dict(factors), x, "rho effort exhausted")
            found, used = _brent(x, rng, effort - spent)
            spent += used
        stack += [found, x // found]
    return sign, dict(sorted(factors.items()))
