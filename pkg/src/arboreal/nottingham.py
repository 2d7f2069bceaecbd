"""Truncated Nottingham group over F_p: substitutions T -> T + a_2 T^2 + ... mod T^(N+1)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .intfactor import is_certified_prime

MAX_PRECISION = 512
IDENTITY_DEPTH = math.inf


@dataclass(frozen=True)
class NottinghamElement:
    """T + sum a_i T^i for i = 2..N; ``coeffs[0]`` is a_2."""

    p: int
    N: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not 2 <= self.N <= MAX_PRECISION:
            raise ValueError(f"precision N = {self.N} outside 2..{MAX_PRECISION}")
        if not is_certified_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        coeffs = tuple(int(a) % self.p for a in self.coeffs)
        if len(coeffs) != self.N - 1:
            raise ValueError(f"need {self.N - 1} coefficients a_2..a_{self.N}, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def identity(cls, p: int, N: int) -> "NottinghamElement":
        return cls(p, N, (0,) * (N - 1))

    @classmethod
    def parse(cls, text: str) -> "NottinghamElement":
        """``"p=2;N=3;a=1,0"`` is T + T^2 (+ 0 T^3)."""
        fields = {}
        for part in text.strip().split(";"):
            key, eq, value = part.partition("=")
            if not eq:
                raise ValueError(f"bad field {part!r} in {text!r}")
            fields[key.strip()] = value.strip()
        try:
            p, N = int(fields["p"]), int(fields["N"])
            coeffs = tuple(int(x) for x in fields["a"].split(",")) if fields["a"] else ()
        except (KeyError, ValueError) as exc:
            raise ValueError(f"cannot parse Nottingham element {text!r}: {exc}") from None
        return cls(p, N, coeffs)

    def __str__(self) -> str:
        return f"p={self.p};N={self.N};a={','.join(map(str, self.coeffs))}"

    def series(self) -> list[int]:
        """Coefficients of T^0..T^N."""
        return [0, 1, *self.coeffs]

    def __matmul__(self, other: "NottinghamElement") -> "NottinghamElement":
        return n_compose(self, other)


def _mul_trunc(f: list[int], g: list[int], N: int, p: int) -> list[int]:
    out = [0] * (N + 1)
    for i, a in enumerate(f):
        if a:
            for j in range(min(len(g), N + 1 - i)):
                out[i + j] += a * g[j]
    return [x % p for x in out]


def _check_pair(u: NottinghamElement, v: NottinghamElement) -> None:
    if (u.p, u.N) != (v.p, v.N):
        raise ValueError(f"mismatched groups (p={u.p}, N={u.N}) vs (p={v.p}, N={v.N})")


def n_compose(u: NottinghamElement, v: NottinghamElement) -> NottinghamElement:
    """u(v(T)) mod T^(N+1): schoolbook, accumulating powers of v."""
    _check_pair(u, v)
    p, N = u.p, u.N
    vs = v.series()
    out = vs[:]
    pw = vs
    for i, a in enumerate(u.coeffs, start=2):
        pw = _mul_trunc(pw, vs, N, p)  # v^i
        if a:
            for k in range(i, N + 1):
                out[k] += a * pw[k]
    return NottinghamElement(p, N, tuple(x % p for x in out[2:]))


def n_invert(u: NottinghamElement) -> NottinghamElement:
    """Compositional inverse w with u(w(T)) = T, solved degree by degree.

    pw[i][k] holds the T^k coefficient of w^i.  At step k every term of
    w^i (i >= 2) in degree k only involves w_2..w_(k-1), so w_k is forced.
    """
    p, N = u.p, u.N
    a = [0, 1, *u.coeffs]
    w = [0, 1] + [0] * (N - 1)
    pw = [None, w] + [[0] * (N + 1) for _ in range(N - 1)]
    for i in range(2, N + 1):
        pw[i][i] = 1
    for k in range(2, N + 1):
        total = 0
        for i in range(2, k + 1):
            if i < k:
                acc = 0
                prev = pw[i - 1]
                for j in range(1, k - i + 2):
                    if w[j]:
                        acc += w[j] * prev[k - j]
                pw[i][k] = acc % p
            total += a[i] * pw[i][k]
        w[k] = -total % p
    return NottinghamElement(p, N, tuple(w[2:]))


def n_depth(u: NottinghamElement) -> int | float:
    """Largest m with u = T mod T^(m+1); ``math.inf`` for the identity."""
    for i, a in enumerate(u.coeffs, start=2):
        if a:
            return i - 1
    return IDENTITY_DEPTH


def n_commutator(u: NottinghamElement, v: NottinghamElement) -> NottinghamElement:
    """u^-1 v^-1 u v (as substitutions composed right to left)."""
    return n_compose(n_compose(n_invert(u), n_invert(v)), n_compose(u, v))


def n_power(u: NottinghamElement, k: int) -> NottinghamElement:
    result = NottinghamElement.identity(u.p, u.N)
    base = u
    while k:
        if k & 1:
            result = n_compose(result, base)
        base = n_compose(base, base)
        k >>= 1
    return result


def n_order(u: NottinghamElement) -> int:
    """Order of u; the truncated group has order p^(N-1) so the order is a p-power."""
    ident = NottinghamElement.identity(u.p, u.N)
    order, x = 1, u
    while x != ident:
        if order > u.p ** (u.N - 1):
            raise RuntimeError(f"order of {u} exceeds |group| = p^(N-1); arithmetic is broken")
        x = n_power(x, u.p)
        order *= u.p
    return order


def truncate(u: NottinghamElement, N: int) -> NottinghamElement:
    if not 2 <= N <= u.N:
        raise ValueError(f"cannot truncate precision {u.N} to {N}")
    return NottinghamElement(u.p, N, u.coeffs[: N - 1])


def random_element(p: int, N: int, rng) -> NottinghamElement:
    return NottinghamElement(p, N, tuple(rng.randrange(p) for _ in range(N - 1)))
