"""Automorphisms of the depth-n rooted binary tree, stored as portraits.

A portrait is the level-order (heap layout) array of swap flags, one per
internal vertex: index 0 is the root and the children of vertex ``i`` are
``2i+1`` (letter 0) and ``2i+2`` (letter 1).  The action on words is

    a(x w) = (x XOR eps_a) . a_x(w)

with sections indexed by the *input* letter.  Under this convention the
flag of ``a∘b`` at vertex ``v`` is ``a[b(v)] XOR b[v]``, which is what
``compose`` evaluates (vectorised over all vertices at once).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_DEPTH = 24


class DepthError(ValueError):
    """Raised for invalid or mismatched tree depths."""


def _check_depth(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DepthError(f"depth must be a positive integer, got {n!r}")
    if n > MAX_DEPTH:
        raise DepthError(f"depth {n} exceeds cap {MAX_DEPTH}")


@dataclass(frozen=True, eq=False)
class TreeAutomorphism:
    """Element of W_n given by its portrait flags (bytes of 0/1)."""

    depth: int
    bits: bytes

    def __post_init__(self):
        _check_depth(self.depth)
        bits = self.bits
        if isinstance(bits, str):
            bits = bits.encode()
        if not isinstance(bits, bytes):
            bits = bytes(np.asarray(bits, dtype=np.uint8))
        if set(bits) <= {48, 49}:  # '0'/'1' characters
            bits = bytes(b - 48 for b in bits)
        if len(bits) != (1 << self.depth) - 1:
            raise ValueError(
                f"portrait of depth {self.depth} needs {(1 << self.depth) - 1} flags, got {len(bits)}"
            )
        if not set(bits) <= {0, 1}:
            raise ValueError("portrait flags must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "TreeAutomorphism":
        """Parse ``"101"`` or the file form ``"n=2:101"``."""
        text = text.strip()
        if text.startswith("n="):
            head, _, flags = text.partition(":")
            depth = int(head[2:])
        else:
            flags = text
            depth = (len(flags) + 1).bit_length() - 1
        if any(ch not in "01" for ch in flags):
            raise ValueError(f"bad portrait string {text!r}")
        return cls(depth, flags.encode())

    @classmethod
    def from_int(cls, depth: int, value: int) -> "TreeAutomorphism":
        """Inverse of :meth:`to_int` (bit ``i`` = flag at heap index ``i``)."""
        size = (1 << depth) - 1
        return cls(depth, bytes((value >> i) & 1 for i in range(size)))

    def to_int(self) -> int:
        return int.from_bytes(np.packbits(self.array, bitorder="little").tobytes(), "little")

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def to_text(self) -> str:
        return f"n={self.depth}:{self}"

    def __repr__(self) -> str:
        return f"TreeAutomorphism({self.to_text()!r})"

    def __eq__(self, other):
        if not isinstance(other, TreeAutomorphism):
            return NotImplemented
        return self.depth == other.depth and self.bits == other.bits

    def __hash__(self):
        return hash((self.depth, self.bits))

    def __mul__(self, other: "TreeAutomorphism") -> "TreeAutomorphism":
        return compose(self, other)

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.frombuffer(self.bits, dtype=np.uint8)
        arr.flags.writeable = False
        return arr

    @cached_property
    def vertex_images(self) -> np.ndarray:
        """Heap index of the image of every vertex at levels 0..depth.

        Entries ``2^depth - 1`` onward are the leaves (level ``depth``).
        """
        n = self.depth
        img = np.zeros((1 << (n + 1)) - 1, dtype=np.int64)
        flags = self.array.astype(np.int64)
        for level in range(n):
            lo, hi = (1 << level) - 1, (1 << (level + 1)) - 1
            im = img[lo:hi]
            eps = flags[lo:hi]
            img[2 * lo + 1 : 2 * hi + 1 : 2] = 2 * im + 1 + eps
            img[2 * lo + 2 : 2 * hi + 2 : 2] = 2 * im + 2 - eps
        img.flags.writeable = False
        return img

    def level_permutation(self, k: int) -> np.ndarray:
        """Permutation induced on the 2^k vertices of level k (0-based positions)."""
        if not 0 <= k <= self.depth:
            raise DepthError(f"level {k} outside 0..{self.depth}")
        lo, hi = (1 << k) - 1, (1 << (k + 1)) - 1
        return self.vertex_images[lo:hi] - lo


def identity(n: int) -> TreeAutomorphism:
    _check_depth(n)
    return TreeAutomorphism(n, bytes((1 << n) - 1))


def _same_depth(a: TreeAutomorphism, b: TreeAutomorphism) -> None:
    if a.depth != b.depth:
        raise DepthError(f"depth mismatch: {a.depth} vs {b.depth}")


def compose(a: TreeAutomorphism, b: TreeAutomorphism) -> TreeAutomorphism:
    """Return ``a∘b`` (apply ``b`` first)."""
    _same_depth(a, b)
    size = len(b.bits)
    bits = a.array[b.vertex_images[:size]] ^ b.array
    return TreeAutomorphism(a.depth, bits.tobytes())


def inverse(a: TreeAutomorphism) -> TreeAutomorphism:
    size = len(a.bits)
    out = np.empty(size, dtype=np.uint8)
    out[a.vertex_images[:size]] = a.array
    return TreeAutomorphism(a.depth, out.tobytes())


def power(a: TreeAutomorphism, k: int) -> TreeAutomorphism:
    if k < 0:
        a, k = inverse(a), -k
    result = identity(a.depth)
    base = a
    while k:
        if k & 1:
            result = compose(result, base)
        base = compose(base, base)
        k >>= 1
    return result


def apply(a: TreeAutomorphism, word: str | tuple | list) -> str:
    """Image of a leaf word (string or sequence of 0/1)."""
    letters = [int(ch) for ch in word]
    if len(letters) != a.depth:
        raise DepthError(f"word of length {len(letters)} applied to depth-{a.depth} element")
    out = []
    v = 0
    bits = a.bits
    for x in letters:
        if x not in (0, 1):
            raise ValueError(f"bad letter {x!r}")
        out.append(x ^ bits[v])
        v = 2 * v + 1 + x
    return "".join(map(str, out))


def restrict(a: TreeAutomorphism, m: int) -> TreeAutomorphism:
    """Image of ``a`` under the quotient W_n -> W_m."""
    if not 1 <= m <= a.depth:
        raise DepthError(f"cannot restrict depth {a.depth} to {m}")
    return TreeAutomorphism(m, a.bits[: (1 << m) - 1])


def cycle_type(perm) -> tuple[int, ...]:
    """Cycle lengths of a permutation given as an image array, sorted descending."""
    perm = list(perm)
    seen = bytearray(len(perm))
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = 1
            x = perm[x]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def permutation_sign(perm) -> int:
    ct = cycle_type(perm)
    return -1 if sum(c - 1 for c in ct) % 2 else 1


@dataclass(frozen=True)
class FrobeniusSignature:
    """Per-level cycle types; ``levels[k-1]`` is a partition of 2^k."""

    levels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        levels = tuple(tuple(sorted((int(x) for x in part), reverse=True)) for part in self.levels)
        object.__setattr__(self, "levels", levels)
        for k, part in enumerate(levels, start=1):
            if sum(part) != 1 << k or any(x < 1 for x in part):
                raise ValueError(f"level {k} entry {part} is not a partition of {1 << k}")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def __str__(self) -> str:
        return "|".join(",".join(map(str, part)) for part in self.levels)

    @classmethod
    def parse(cls, text: str) -> "FrobeniusSignature":
        text = text.strip()
        if not text:
            raise ValueError("empty signature")
        return cls(tuple(tuple(int(x) for x in lvl.split(",")) for lvl in text.split("|")))

    def is_projection_consistent(self) -> bool:
        return all(
            covers(self.levels[k], self.levels[k + 1]) for k in range(len(self.levels) - 1)
        )


def covers(lower: tuple[int, ...], upper: tuple[int, ...]) -> bool:
    """True if ``upper`` arises from ``lower`` by replacing each part e by {2e} or {e,e}."""
    remaining: dict[int, int] = {}
    for x in upper:
        remaining[x] = remaining.get(x, 0) + 1
    # Largest parts first: a part 2e in ``upper`` can only come from a lower part e.
    for e in sorted(lower, reverse=True):
        if remaining.get(2 * e, 0):
            remaining[2 * e] -= 1
        elif remaining.get(e, 0) >= 2:
            remaining[e] -= 2
        else:
            return False
    return not any(remaining.values())


def signature(a: TreeAutomorphism) -> FrobeniusSignature:
    return FrobeniusSignature(
        tuple(cycle_type(a.level_permutation(k)) for k in range(1, a.depth + 1))
    )


def level_signs(a: TreeAutomorphism) -> list[int]:
    """Sign of the level-k permutation for k = 1..depth.

    The level-k permutation is the level-(k-1) permutation doubled (an even
    permutation) followed by one transposition per set flag on level k-1.
    """
    out = []
    for level in range(a.depth):
        lo, hi = (1 << level) - 1, (1 << (level + 1)) - 1
        out.append(-1 if int(a.array[lo:hi].sum()) % 2 else 1)
    return out


def element_order(a: TreeAutomorphism) -> int:
    """Multiplicative order, the lcm of the leaf cycle lengths."""
    order = 1
    for length in set(cycle_type(a.level_permutation(a.depth))):
        order = math.lcm(order, length)
    assert order & (order - 1) == 0, f"order {order} of a 2-group element is not a power of 2"
    return order


def standard_wn_generators(n: int) -> list[TreeAutomorphism]:
    """Generator k has its only flag at the leftmost vertex of level k-1."""
    _check_depth(n)
    gens = []
    for k in range(1, n + 1):
        bits = bytearray((1 << n) - 1)
        bits[(1 << (k - 1)) - 1] = 1
        gens.append(TreeAutomorphism(n, bytes(bits)))
    return gens


def wn_log2_order(n: int) -> int:
    return (1 << n) - 1


def wn_order(n: int) -> int:
    """|W_n| = 2^(2^n - 1), exact."""
    if n < 1:
        raise DepthError(f"depth must be positive, got {n}")
    return 1 << ((1 << n) - 1)


def odometer(n: int) -> TreeAutomorphism:
    """The adding machine (binary +1, first letter least significant) at depth n."""
    _check_depth(n)
    bits = bytearray((1 << n) - 1)
    for level in range(n):
        bits[(1 << (level + 1)) - 2] = 1  # rightmost vertex of each level
    return TreeAutomorphism(n, bytes(bits))


def random_automorphism(n: int, rng) -> TreeAutomorphism:
    """Uniform element of W_n from a ``random.Random`` or numpy Generator."""
    size = (1 << n) - 1
    if isinstance(rng, np.random.Generator):
        return TreeAutomorphism(n, rng.integers(0, 2, size, dtype=np.uint8).tobytes())
    return TreeAutomorphism(n, bytes(rng.getrandbits(1) for _ in range(size)))
