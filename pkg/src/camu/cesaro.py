"""Cesaro-mean image measures ``mu_n = (1/n) sum_{t<n} mu o F^-t`` on cylinders.

All estimates look at one fixed central position: both the source
measure and the automaton commute with the shift, so the position does
not matter in law. Counts are kept as exact integers throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .core import LocalRule, WindowConfig
from .measures import StochasticMeasure
from .parallel import map_chunks
from .rng import RandomStream

SYMBOLS = "0123456789abcdefghijklmnopqrstuvwxyz"
MAX_WORD_LENGTH = 8


def word_to_str(word: Sequence[int]) -> str:
    return "".join(SYMBOLS[a] for a in word)


def str_to_word(text: str) -> tuple[int, ...]:
    try:
        return tuple(SYMBOLS.index(ch) for ch in text)
    except ValueError:
        raise ValueError(f"bad symbol in word {text!r}") from None


def _word_start(L: int) -> int:
    # the tracked word occupies [start, start + L - 1] around the origin
    return -((L - 1) // 2)


@dataclass(frozen=True)
class CesaroTrace:
    word: tuple[int, ...]
    hits: np.ndarray  # hits[t] = samples whose F^t image shows the word
    samples: int
    stderr: float  # Monte Carlo standard error of the final Cesaro value

    @property
    def values(self) -> np.ndarray:
        return self.hits / self.samples

    @property
    def cesaro(self) -> np.ndarray:
        return np.cumsum(self.hits) / (self.samples * np.arange(1, self.hits.size + 1))


def _sampling_half_width(L: int, r: int, n: int) -> int:
    return math.ceil(L / 2) + r * n


def _central_codes_batch(rule: LocalRule, cells: np.ndarray, L: int, n: int, half: int) -> np.ndarray:
    pos = _word_start(L) + half
    return kernels.central_codes(rule.lut, rule.k, rule.r, cells, n - 1, pos, L)


def _word_code(word: Sequence[int], k: int) -> int:
    code = 0
    for a in word:
        code = code * k + a
    return code


def _validate(rule: LocalRule, measure: StochasticMeasure, n: int, samples: int) -> None:
    if n < 1:
        raise ValueError("horizon n must be at least 1")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if measure.k != rule.k:
        raise ValueError(f"measure alphabet {measure.k} does not match rule alphabet {rule.k}")


def cesaro_cylinder_estimate(
    rule: LocalRule,
    measure: StochasticMeasure,
    word: Sequence[int],
    n: int,
    samples: int,
    stream: RandomStream,
    threads: int = 1,
) -> CesaroTrace:
    _validate(rule, measure, n, samples)
    word = tuple(int(a) for a in word)
    L = len(word)
    if L == 0 or any(not 0 <= a < rule.k for a in word):
        raise ValueError("word must be nonempty with symbols below k")
    if rule.k ** L >= 2 ** 62:
        raise ValueError("word too long to encode")
    half = _sampling_half_width(L, rule.r, n)
    target = _word_code(word, rule.k)

    def chunk(count, rng):
        x = measure.sample_batch(-half, half, count, rng)
        hit = _central_codes_batch(rule, x, L, n, half) == target
        per_sample = hit.mean(axis=1)
        return hit.sum(axis=0), float(per_sample.sum()), float((per_sample ** 2).sum())

    parts = map_chunks(chunk, samples, stream, threads)
    hits = np.sum([p[0] for p in parts], axis=0).astype(np.int64)
    s1 = sum(p[1] for p in parts)
    s2 = sum(p[2] for p in parts)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    stderr = math.sqrt(var / max(samples - 1, 1)) if samples > 1 else 0.0
    return CesaroTrace(word, hits, samples, stderr)


@dataclass(frozen=True)
class EmpiricalCylinderMeasure:
    """Exact word counts on length-``L`` cylinders; frequency = count / total."""

    L: int
    k: int
    counts: dict[tuple[int, ...], int]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for w, c in self.counts.items():
            if len(w) != self.L:
                raise ValueError(f"word {w} does not have length {self.L}")
            if c < 0:
                raise ValueError("counts must be nonnegative")
        if self.total <= 0:
            raise ValueError("empirical measure needs a positive total count")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def frequency(self, word: Sequence[int]) -> Fraction:
        return Fraction(self.counts.get(tuple(word), 0), self.total)

    def support(self, threshold: float = 0.0) -> list[tuple[int, ...]]:
        total = self.total
        return sorted(w for w, c in self.counts.items() if c > 0 and c / total > threshold)

    @classmethod
    def uniform_on(cls, words, k: int, **meta) -> EmpiricalCylinderMeasure:
        words = [tuple(w) for w in words]
        return cls(len(words[0]), k, {w: 1 for w in words}, dict(meta))

    def to_text(self) -> str:
        m = self.meta
        lines = ["# rule=%s measure=%s L=%d n=%d samples=%d seed=%d" % (
            m.get("rule", "unknown"), m.get("measure", "unknown"), self.L,
            m.get("n", 0), m.get("samples", 0), m.get("seed", 0))]
        rows = sorted((word_to_str(w), c) for w, c in self.counts.items() if c > 0)
        lines += [f"{w},{c}" for w, c in rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, k: int | None = None) -> EmpiricalCylinderMeasure:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise ValueError("empirical measure file must start with a '#' header")
        meta = {}
        for item in lines[0][1:].split():
            key, _, value = item.partition("=")
            meta[key] = int(value) if key in ("L", "n", "samples", "seed") else value
        counts = {}
        for ln in lines[1:]:
            w, _, c = ln.partition(",")
            counts[str_to_word(w)] = int(c)
        L = int(meta.pop("L"))
        if k is None:
            parts = str(meta.get("measure", "")).split(":")
            if len(parts) > 1 and parts[1].isdigit():
                k = int(parts[1])
            else:
                k = max((max(w) for w in counts), default=1) + 1
        return cls(L, max(k, 2), counts, meta)


def empirical_measure(
    rule: LocalRule,
    measure: StochasticMeasure,
    L: int,
    n: int,
    samples: int,
    stream: RandomStream,
    threads: int = 1,
    rule_id: str = "rule",
) -> EmpiricalCylinderMeasure:
    """Tally the central length-``L`` word of ``F^t(x)`` for every sample and every ``t < n``."""
    _validate(rule, measure, n, samples)
    if not 1 <= L <= MAX_WORD_LENGTH:
        raise ValueError(f"word length must be in [1, {MAX_WORD_LENGTH}]")
    half = _sampling_half_width(L, rule.r, n)
    size = rule.k ** L

    def chunk(count, rng):
        x = measure.sample_batch(-half, half, count, rng)
        codes = _central_codes_batch(rule, x, L, n, half)
        return np.bincount(codes.ravel(), minlength=size)

    tally = np.sum(map_chunks(chunk, samples, stream, threads), axis=0)
    counts = {}
    for code in np.nonzero(tally)[0]:
        word = tuple(int(d) for d in np.unravel_index(int(code), (rule.k,) * L))
        counts[word] = int(tally[code])
    meta = {"rule": rule_id, "measure": measure.id, "n": n, "samples": samples,
            "seed": stream.seed}
    return EmpiricalCylinderMeasure(L, rule.k, counts, meta)


@dataclass(frozen=True)
class ConvergenceDiag:
    checkpoints: tuple[int, ...]
    gaps: tuple[float, ...]
    max_gap: float
    final_gap: float
    last_value: float
    trend: str  # "converged", "converging" or "unsettled"

    @property
    def converging(self) -> bool:
        return self.trend != "unsettled"


def convergence_diag(seq: Sequence[float], stderr: float | None = None) -> ConvergenceDiag:
    """Empirical Cauchy check ``|A_n - A_(n//2)|`` at n = 4, 8, 16, ... and the final n.

    ``converged`` means the final gap is within twice the Monte Carlo
    ``stderr`` (exactly zero when no error is given). ``converging`` means
    the gaps at the last three checkpoints strictly shrink, which is what
    an ``O(1/n)`` approach to the limit looks like at any sample size.
    """
    a = np.asarray(seq, dtype=float)
    N = a.size
    if N < 4:
        raise ValueError("need at least 4 Cesaro values")
    points = []
    p = 4
    while p <= N:
        points.append(p)
        p *= 2
    if points[-1] != N:
        points.append(N)
    gaps = tuple(float(abs(a[q - 1] - a[q // 2 - 1])) for q in points)
    tail = gaps[-3:]
    if gaps[-1] <= 2.0 * (stderr or 0.0):
        trend = "converged"
    elif len(tail) >= 2 and all(b < a_ for a_, b in zip(tail, tail[1:])):
        trend = "converging"
    else:
        trend = "unsettled"
    return ConvergenceDiag(tuple(points), gaps, max(gaps), gaps[-1], float(a[-1]), trend)


def mu_c_batch(
    rule: LocalRule,
    measure: StochasticMeasure,
    n: int,
    width: int,
    count: int,
    stream: RandomStream,
    threads: int = 1,
) -> np.ndarray:
    """Cells of ``F^t(x)`` on the central width-window, ``x ~ mu``, ``t`` uniform in ``[0, n)``."""
    _validate(rule, measure, n, count)
    if width < 1:
        raise ValueError("width must be at least 1")
    start = _word_start(width)
    a, b = start - rule.r * (n - 1), start + width - 1 + rule.r * (n - 1)
    lut, k, r = rule.lut, rule.k, rule.r

    def chunk(size, rng):
        x = measure.sample_batch(a, b, size, rng)
        ts = rng.integers(0, n, size=size)
        out = np.empty((size, width), dtype=np.uint8)
        cur = x
        for t in range(int(ts.max()) + 1):
            sel = ts == t
            if sel.any():
                lo = rule.r * (n - 1 - t)
                out[sel] = cur[sel, lo:lo + width]
            if t < ts.max():
                cur = kernels.step_batch(lut, k, r, cur)
        return out

    return np.concatenate(map_chunks(chunk, count, stream, threads), axis=0)


def sample_mu_c_approx(
    rule: LocalRule,
    measure: StochasticMeasure,
    n: int,
    width: int,
    count: int,
    stream: RandomStream,
    threads: int = 1,
) -> list[WindowConfig]:
    cells = mu_c_batch(rule, measure, n, width, count, stream, threads)
    start = _word_start(width)
    return [WindowConfig(start, tuple(row.tolist())) for row in cells]
