"""Self-similar groups given by wreath recursion, truncated to finite depth.

Text format, one state per line::

    a: 1; 0 -> ; 1 -> a
    b: 0; 0 -> a; 1 -> c

Section words are space separated state names, ``'`` marks an inverse.
Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .tree_core import (
    TreeAutomorphism,
    compose,
    identity,
    inverse,
    _check_depth,
)

Word = tuple[tuple[str, int], ...]


class AutomatonError(ValueError):
    pass


def parse_word(text: str) -> Word:
    out = []
    for tok in text.split():
        if tok.endswith("'"):
            out.append((tok[:-1], -1))
        else:
            out.append((tok, 1))
    return tuple(out)


def format_word(word: Word) -> str:
    return " ".join(name + ("'" if exp < 0 else "") for name, exp in word)


@dataclass(frozen=True)
class State:
    name: str
    flag: int
    sections: tuple[Word, Word]


@dataclass(eq=False)
class Automaton:
    states: dict[str, State]
    _memo: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        for st in self.states.values():
            if st.flag not in (0, 1):
                raise AutomatonError(f"state {st.name}: root flag must be 0 or 1")
            for word in st.sections:
                for name, exp in word:
                    if name not in self.states:
                        raise AutomatonError(f"state {st.name} references undeclared state {name!r}")
                    if exp not in (1, -1):
                        raise AutomatonError(f"bad exponent {exp} in section of {st.name}")

    @property
    def names(self) -> list[str]:
        return list(self.states)

    @classmethod
    def parse(cls, text: str) -> "Automaton":
        states: dict[str, State] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                name, rest = line.split(":", 1)
                flag_part, *section_parts = rest.split(";")
                sections = {}
                for part in section_parts:
                    letter, arrow, word = part.partition("->")
                    if not arrow:
                        raise ValueError("missing '->'")
                    sections[int(letter)] = parse_word(word)
                if set(sections) != {0, 1}:
                    raise ValueError("need sections for letters 0 and 1")
                name = name.strip()
                if not name or " " in name or name.endswith("'"):
                    raise ValueError(f"bad state name {name!r}")
                if name in states:
                    raise ValueError(f"duplicate state {name!r}")
                states[name] = State(name, int(flag_part), (sections[0], sections[1]))
            except ValueError as exc:
                raise AutomatonError(f"line {lineno}: {exc}") from None
        if not states:
            raise AutomatonError("automaton has no states")
        return cls(states)

    def to_text(self) -> str:
        return "".join(
            f"{st.name}: {st.flag}; 0 -> {format_word(st.sections[0])}; 1 -> {format_word(st.sections[1])}\n"
            for st in self.states.values()
        )

    def expand(self, name: str, n: int) -> TreeAutomorphism:
        """Portrait of state ``name`` in W_n, memoised on (state, depth)."""
        if name not in self.states:
            raise AutomatonError(f"undeclared state {name!r}")
        _check_depth(n)
        key = (name, n)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        st = self.states[name]
        if n == 1:
            result = TreeAutomorphism(1, bytes([st.flag]))
        else:
            left = self.evaluate_word(st.sections[0], n - 1)
            right = self.evaluate_word(st.sections[1], n - 1)
            result = graft(st.flag, left, right)
        with self._lock:
            self._memo.setdefault(key, result)
        return result

    def evaluate_word(self, word: Word | str, n: int) -> TreeAutomorphism:
        """Left-to-right product under compose; the empty word is the identity."""
        if isinstance(word, str):
            word = parse_word(word)
        result = identity(n)
        for name, exp in word:
            g = self.expand(name, n)
            result = compose(result, g if exp > 0 else inverse(g))
        return result

    def generators(self, n: int) -> list[TreeAutomorphism]:
        return [self.expand(name, n) for name in self.states]


def graft(flag: int, left: TreeAutomorphism, right: TreeAutomorphism) -> TreeAutomorphism:
    """Element with root flag ``flag`` and sections ``left`` (letter 0), ``right`` (letter 1)."""
    if left.depth != right.depth:
        raise ValueError("sections must share a depth")
    m = left.depth
    out = np.empty((1 << (m + 1)) - 1, dtype=np.uint8)
    out[0] = flag
    la, ra = left.array, right.array
    for level in range(m):
        lo, hi = (1 << level) - 1, (1 << (level + 1)) - 1
        width = hi - lo
        dst = 2 * lo + 1
        out[dst : dst + width] = la[lo:hi]
        out[dst + width : dst + 2 * width] = ra[lo:hi]
    return TreeAutomorphism(m + 1, out.tobytes())


def sections(a: TreeAutomorphism) -> tuple[TreeAutomorphism, TreeAutomorphism]:
    """Split an element of depth >= 2 into its two depth-(n-1) sections."""
    if a.depth < 2:
        raise ValueError("depth-1 elements have no nontrivial sections")
    left, right = bytearray(), bytearray()
    for level in range(1, a.depth):
        lo, hi = (1 << level) - 1, (1 << (level + 1)) - 1
        mid = (lo + hi) // 2
        left += a.bits[lo:mid]
        right += a.bits[mid:hi]
    return TreeAutomorphism(a.depth - 1, bytes(left)), TreeAutomorphism(a.depth - 1, bytes(right))


BUILTINS = {
    "odometer": "a: 1; 0 -> ; 1 -> a\n",
    "grigorchuk": (
        "a: 1; 0 -> ; 1 -> \n"
        "b: 0; 0 -> a; 1 -> c\n"
        "c: 0; 0 -> a; 1 -> d\n"
        "d: 0; 0 -> ; 1 -> b\n"
    ),
}


def builtin(name: str) -> Automaton:
    try:
        return Automaton.parse(BUILTINS[name])
    except KeyError:
        raise AutomatonError(f"unknown builtin automaton {name!r}; choose from {sorted(BUILTINS)}") from None
