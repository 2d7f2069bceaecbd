"""Prime sweeps of Frobenius signatures and comparison with group censuses."""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fqpoly import MAX_DEGREE, RamifiedPrime, SplittingFailure, frobenius_signature
from .tree_core import FrobeniusSignature

_SEGMENT = 1 << 18


class ReportFormatError(ValueError):
    pass


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi by a segmented sieve of Eratosthenes."""
    if hi < 2 or hi < lo:
        return []
    lo = max(lo, 2)
    root = math.isqrt(hi)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if base[p]:
            base[p * p :: p] = False
    small = np.nonzero(base)[0]
    out: list[int] = []
    for start in range(lo, hi + 1, _SEGMENT):
        stop = min(start + _SEGMENT, hi + 1)
        seg = np.ones(stop - start, dtype=bool)
        for p in small.tolist():
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            seg[first - start :: p] = False
        out.extend((np.nonzero(seg)[0] + start).tolist())
    return out


@dataclass
class SweepConfig:
    c: int
    n: int
    pmin: int
    pmax: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.pmin < 3:
            raise ValueError("pmin must be >= 3")
        if self.n < 1 or (1 << self.n) > MAX_DEGREE:
            raise ValueError(f"level n = {self.n} outside 1..{MAX_DEGREE.bit_length() - 1}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class ChebotarevReport:
    c: int
    n: int
    pmin: int
    pmax: int
    seed: int
    counts: dict[str, int] = field(default_factory=dict)
    skipped: list[tuple[int, str]] = field(default_factory=list)
    total_primes: int = 0

    @property
    def sampled(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "n": self.n,
            "pmin": self.pmin,
            "pmax": self.pmax,
            "seed": self.seed,
            "counts": dict(sorted(self.counts.items())),
            "skipped": [[p, r] for p, r in self.skipped],
            "total_primes": self.total_primes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ChebotarevReport":
        expected = {"c", "n", "pmin", "pmax", "seed", "counts", "skipped", "total_primes"}
        if not isinstance(data, dict) or set(data) != expected:
            got = sorted(data) if isinstance(data, dict) else type(data).__name__
            raise ReportFormatError(f"report keys must be {sorted(expected)}, got {got}")
        for key in ("c", "n", "pmin", "pmax", "seed", "total_primes"):
            if not isinstance(data[key], int) or isinstance(data[key], bool):
                raise ReportFormatError(f"field {key!r} must be an integer")
        counts = data["counts"]
        if not isinstance(counts, dict) or not all(isinstance(v, int) for v in counts.values()):
            raise ReportFormatError("counts must map signature strings to integers")
        for key in counts:
            try:
                sig = FrobeniusSignature.parse(key)
            except ValueError as exc:
                raise ReportFormatError(f"bad signature key {key!r}: {exc}") from None
            if sig.depth != data["n"]:
                raise ReportFormatError(f"signature {key!r} does not have depth {data['n']}")
        skipped = data["skipped"]
        if not isinstance(skipped, list) or not all(
            isinstance(s, list) and len(s) == 2 and isinstance(s[0], int) and isinstance(s[1], str)
            for s in skipped
        ):
            raise ReportFormatError("skipped must be a list of [prime, reason] pairs")
        return cls(
            data["c"], data["n"], data["pmin"], data["pmax"], data["seed"],
            dict(counts), [(p, r) for p, r in skipped], data["total_primes"],
        )


def _sweep_chunk(args) -> tuple[Counter, list[tuple[int, str]]]:
    c, n, seed, primes = args
    counts: Counter = Counter()
    skipped = []
    for q in primes:
        try:
            counts[str(frobenius_signature(c, n, q, seed))] += 1
        except RamifiedPrime:
            skipped.append((q, "ramified"))
        except SplittingFailure as exc:
            skipped.append((q, f"splitting failure: {exc}"))
    return counts, skipped


def sweep(cfg: SweepConfig) -> ChebotarevReport:
    """Frobenius signature counts over odd primes in [pmin, pmax].

    The result does not depend on ``cfg.workers``: chunks are merged and
    sorted canonically and each prime's randomness is seeded by seed ^ q.
    """
    primes = [p for p in primes_between(cfg.pmin, cfg.pmax) if p % 2]
    report = ChebotarevReport(cfg.c, cfg.n, cfg.pmin, cfg.pmax, cfg.seed, total_primes=len(primes))
    if not primes:
        return report
    if cfg.workers == 1:
        parts = [_sweep_chunk((cfg.c, cfg.n, cfg.seed, primes))]
    else:
        k = cfg.workers * 4
        chunks = [primes[i::k] for i in range(k)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(_sweep_chunk, [(cfg.c, cfg.n, cfg.seed, ch) for ch in chunks if ch]))
    counts: Counter = Counter()
    skipped = []
    for part_counts, part_skipped in parts:
        counts.update(part_counts)
        skipped += part_skipped
    report.counts = dict(sorted(counts.items()))
    report.skipped = sorted(skipped)
    assert report.sampled + len(report.skipped) == report.total_primes
    return report


def save_report(report: ChebotarevReport, path) -> None:
    with open(path, "w") as fh:
        fh.write(report.to_json())


def load_report(path) -> ChebotarevReport:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return ChebotarevReport.from_dict(data)


@dataclass
class ComparisonRow:
    signature: str
    observed: Fraction
    census: Fraction

    @property
    def diff(self) -> Fraction:
        return abs(self.observed - self.census)


@dataclass
class CensusComparison:
    rows: list[ComparisonRow]
    sampled: int
    foreign: list[str]

    @property
    def max_abs_difference(self) -> Fraction:
        return max((r.diff for r in self.rows), default=Fraction(0))

    def tolerance(self, row: ComparisonRow, sigmas: float = 4.0) -> float:
        """sigmas * sqrt(p(1-p)/N) with p the census proportion (a heuristic band)."""
        if not self.sampled:
            return math.inf
        p = float(row.census)
        return sigmas * math.sqrt(p * (1 - p) / self.sampled)

    def failures(self, sigmas: float = 4.0) -> list[ComparisonRow]:
        return [r for r in self.rows if float(r.diff) > self.tolerance(r, sigmas)]

    def to_csv(self) -> str:
        lines = ["signature,observed,census,diff"]
        for r in self.rows:
            lines.append(f"{r.signature},{float(r.observed):.10g},{float(r.census):.10g},{float(r.diff):.10g}")
        return "\n".join(lines) + "\n"


def compare(report: ChebotarevReport, census: dict[str, int]) -> CensusComparison:
    depths = {FrobeniusSignature.parse(k).depth for k in census}
    if depths != {report.n}:
        raise ValueError(f"census depth {sorted(depths)} does not match report depth {report.n}")
    total = sum(census.values())
    sampled = report.sampled
    keys = sorted(set(census) | set(report.counts))
    rows = [
        ComparisonRow(
            k,
            Fraction(report.counts.get(k, 0), sampled) if sampled else Fraction(0),
            Fraction(census.get(k, 0), total),
        )
        for k in keys
    ]
    foreign = sorted(k for k in report.counts if k not in census)
    return CensusComparison(rows, sampled, foreign)
