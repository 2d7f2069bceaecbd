"""Finite-level images G_n of tree groups: orders, censuses, dimension sequences.

Elements are enumerated breadth-first from the identity under right
multiplication by the generators and their inverses.  For depth <= 6 the
portrait fits a uint64 and right multiplication by a fixed ``g`` is a bit
permutation followed by an XOR, so whole frontiers are processed with numpy.
Deeper levels fall back to hashing :class:`TreeAutomorphism` values.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .tree_core import (
    TreeAutomorphism,
    compose,
    element_order,
    identity,
    inverse,
    power,
    signature,
    standard_wn_generators,
    wn_log2_order,
)

log = logging.getLogger(__name__)

DEFAULT_CAP = 1 << 23
_VECTOR_MAX_DEPTH = 6


@dataclass
class ClosureResult:
    depth: int
    order: int
    census: dict[str, int] | None = None
    truncated: bool = False

    @property
    def log2_order(self) -> int:
        if self.truncated:
            raise ValueError("truncated closure: order is only a lower bound")
        k = self.order.bit_length() - 1
        if self.order != 1 << k:
            raise ValueError(f"order {self.order} is not a power of 2")
        return k


@dataclass(frozen=True)
class DimensionEntry:
    n: int
    log2_order: int
    log2_wn: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.log2_order, self.log2_wn)


@dataclass
class DimensionSequence:
    entries: list[DimensionEntry]
    complete: bool = True

    def ratios(self) -> list[Fraction]:
        return [e.ratio for e in self.entries]

    def to_csv(self) -> str:
        lines = ["n,log2_order,log2_wn,ratio"]
        lines += [f"{e.n},{e.log2_order},{e.log2_wn},{e.ratio}" for e in self.entries]
        return "\n".join(lines) + "\n"


def _depth_of(gens: Sequence[TreeAutomorphism]) -> int:
    if not gens:
        raise ValueError("need at least one generator")
    depths = {g.depth for g in gens}
    if len(depths) != 1:
        raise ValueError(f"generators have mixed depths {sorted(depths)}")
    return depths.pop()


def _symmetric(gens: Sequence[TreeAutomorphism]) -> list[TreeAutomorphism]:
    out: list[TreeAutomorphism] = []
    seen = set()
    for g in gens:
        for h in (g, inverse(g)):
            if h not in seen:
                seen.add(h)
                out.append(h)
    return out


class _RightMultiplier:
    """Vectorised ``h -> h∘g`` on uint64-packed portraits."""

    def __init__(self, g: TreeAutomorphism):
        size = len(g.bits)
        src = g.vertex_images[:size]
        self.mask = np.uint64(g.to_int())
        groups: dict[int, int] = {}
        for p, s in enumerate(src.tolist()):
            groups[s - p] = groups.get(s - p, 0) | (1 << p)
        self.moves = [(shift, np.uint64(m)) for shift, m in sorted(groups.items())]

    def __call__(self, h: np.ndarray) -> np.ndarray:
        out = np.zeros_like(h)
        for shift, m in self.moves:
            if shift >= 0:
                out |= (h >> np.uint64(shift)) & m
            else:
                out |= (h << np.uint64(-shift)) & m
        out ^= self.mask
        return out


def _close_vectorised(gens: list[TreeAutomorphism], cap: int) -> tuple[np.ndarray, bool]:
    movers = [_RightMultiplier(g) for g in gens]
    visited = np.zeros(1, dtype=np.uint64)
    frontier = visited
    while frontier.size:
        cand = np.unique(np.concatenate([m(frontier) for m in movers]))
        pos = np.searchsorted(visited, cand)
        pos[pos == visited.size] = 0
        fresh = cand[visited[pos] != cand]
        if not fresh.size:
            break
        if visited.size + fresh.size > cap:
            fresh = fresh[: cap - visited.size]
            visited = np.union1d(visited, fresh)
            return visited, True
        visited = np.union1d(visited, fresh)
        frontier = fresh
    return visited, False


def _close_generic(gens: list[TreeAutomorphism], cap: int) -> tuple[list[TreeAutomorphism], bool]:
    start = identity(gens[0].depth)
    seen = {start}
    order = [start]
    frontier = [start]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                x = compose(h, g)
                if x not in seen:
                    if len(seen) >= cap:
                        return order, True
                    seen.add(x)
                    order.append(x)
                    nxt.append(x)
        frontier = nxt
    return order, False


def enumerate_group(gens: Sequence[TreeAutomorphism], cap: int = DEFAULT_CAP, *, vectorised: bool | None = None):
    """All elements of <gens> in W_n (as portraits), plus a truncation flag."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    n = _depth_of(gens)
    sym = _symmetric(gens)
    if vectorised is None:
        vectorised = n <= _VECTOR_MAX_DEPTH
    if vectorised:
        if n > _VECTOR_MAX_DEPTH:
            raise ValueError(f"vectorised closure supports depth <= {_VECTOR_MAX_DEPTH}")
        packed, truncated = _close_vectorised(sym, cap)
        return [TreeAutomorphism.from_int(n, int(v)) for v in packed], truncated
    return _close_generic(sym, cap)


def _census_of(elements: Iterable[TreeAutomorphism]) -> dict[str, int]:
    counts = Counter(str(signature(x)) for x in elements)
    return dict(sorted(counts.items()))


def close(
    gens: Sequence[TreeAutomorphism],
    cap: int = DEFAULT_CAP,
    *,
    with_census: bool = False,
    vectorised: bool | None = None,
) -> ClosureResult:
    """Order (and optionally signature census) of the subgroup generated by ``gens``.

    When the cap is hit the result is flagged ``truncated`` and ``order`` is a
    lower bound.  A single generator generates a cyclic group, whose order is
    read off the leaf cycle structure without enumeration.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    n = _depth_of(gens)
    distinct = {g for g in gens if g != identity(n)}
    if len(distinct) <= 1 and not with_census:
        order = element_order(next(iter(distinct))) if distinct else 1
        if order > cap:
            return ClosureResult(n, cap, None, True)
        return ClosureResult(n, order)
    if n <= _VECTOR_MAX_DEPTH and (vectorised is None or vectorised):
        packed, truncated = _close_vectorised(_symmetric(gens), cap)
        order = int(packed.size)
        census = None
        if with_census:
            census = _census_of(TreeAutomorphism.from_int(n, int(v)) for v in packed)
        log.debug("closure depth %d: %d elements%s", n, order, " (truncated)" if truncated else "")
        return ClosureResult(n, order, census, truncated)
    elements, truncated = _close_generic(_symmetric(gens), cap)
    census = _census_of(elements) if with_census else None
    return ClosureResult(n, len(elements), census, truncated)


def census(gens: Sequence[TreeAutomorphism], cap: int = DEFAULT_CAP) -> dict[str, int]:
    result = close(gens, cap, with_census=True)
    if result.truncated:
        raise CapExceeded(result)
    return result.census


class CapExceeded(RuntimeError):
    def __init__(self, result: ClosureResult):
        super().__init__(
            f"closure at depth {result.depth} hit the cap; order >= {result.order} (lower bound)"
        )
        self.result = result


def orbit_stabilizer_order(gens: Sequence[TreeAutomorphism], cap: int = DEFAULT_CAP) -> int:
    """|G_n| as |orbit of leaf 0...0| times |stabiliser|, the latter via Schreier generators.

    Independent of :func:`close` except for reusing it on the stabiliser.
    """
    n = _depth_of(gens)
    sym = _symmetric(gens)
    leaves = [g.level_permutation(n) for g in sym]
    transversal: dict[int, TreeAutomorphism] = {0: identity(n)}
    queue = [0]
    for x in queue:
        for g, perm in zip(sym, leaves):
            y = int(perm[x])
            if y not in transversal:
                transversal[y] = compose(g, transversal[x])
                queue.append(y)
    schreier = set()
    for x, t in transversal.items():
        for g, perm in zip(sym, leaves):
            y = int(perm[x])
            s = compose(inverse(transversal[y]), compose(g, t))
            assert s.level_permutation(n)[0] == 0
            schreier.add(s)
    schreier.discard(identity(n))
    if not schreier:
        return len(transversal)
    stab = close(sorted(schreier, key=lambda s: s.bits), cap)
    if stab.truncated:
        raise CapExceeded(stab)
    return len(transversal) * stab.order


def wn_sequence_generators(n: int) -> list[TreeAutomorphism]:
    return standard_wn_generators(n)


def hausdorff_sequence(source, n_max: int, cap: int = DEFAULT_CAP) -> DimensionSequence:
    """(n, log2|G_n|, 2^n - 1) for n = 1..n_max, stopping early if the cap is hit.

    ``source`` is an :class:`~arboreal.selfsim.Automaton` (all states are
    generators), or a callable mapping a depth to a generator list.
    Only this finite prefix is computed; nothing is claimed about the limit.
    """
    if callable(source) and not hasattr(source, "generators"):
        gens_at = source
    else:
        gens_at = source.generators
    entries = []
    for n in range(1, n_max + 1):
        result = close(gens_at(n), cap)
        if result.truncated:
            log.warning("cap %d exceeded at depth %d; sequence ends at depth %d", cap, n, n - 1)
            return DimensionSequence(entries, complete=False)
        entries.append(DimensionEntry(n, result.log2_order, wn_log2_order(n)))
    return DimensionSequence(entries)


def census_to_csv(counts: dict[str, int]) -> str:
    return "signature,count\n" + "".join(f"{k},{v}\n" for k, v in sorted(counts.items()))


def cyclic_elements(g: TreeAutomorphism) -> list[TreeAutomorphism]:
    return [power(g, k) for k in range(element_order(g))]
