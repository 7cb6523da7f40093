"""Orbits of spatially periodic configurations and the F-periodic points among them.

A word ``w`` of length ``L`` stands for the configuration ``...www...``;
evolving it is the same as evolving ``w`` on the circle of size ``L``, so
every orbit is eventually periodic. Exhaustive searches build the whole
successor map on the ``k^L`` circle states at once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .cesaro import EmpiricalCylinderMeasure, word_to_str
from .core import LocalRule, TorusConfig, iterate_torus
from .rng import RandomStream

log = logging.getLogger(__name__)

STATE_CAP = 10**7
CYCLE_WORDS_CAP = 1024


@dataclass(frozen=True)
class OrbitCycleInfo:
    preperiod: int
    period: int
    cycle: tuple[tuple[int, ...], ...] | None = None


def torus_cycle(rule: LocalRule, t0: TorusConfig, max_steps: int | None = None) -> OrbitCycleInfo | None:
    """First repeat of the orbit of ``t0``; ``None`` when ``max_steps`` runs out."""
    if max_steps is None:
        max_steps = min(rule.k ** t0.size, STATE_CAP)
    state = np.asarray([t0.cells], dtype=np.uint8)
    seen = {state.tobytes(): 0}
    history = [state[0]]
    for step in range(1, max_steps + 1):
        state = kernels.torus_step_batch(rule.lut, rule.k, rule.r, state)
        key = state.tobytes()
        first = seen.get(key)
        if first is not None:
            period = step - first
            cycle = None
            if period <= CYCLE_WORDS_CAP:
                cycle = tuple(tuple(h.tolist()) for h in history[first:])
            return OrbitCycleInfo(first, period, cycle)
        seen[key] = step
        history.append(state[0])
    log.warning("no repeat within %d steps for a torus of size %d", max_steps, t0.size)
    return None


def all_words(k: int, L: int) -> np.ndarray:
    """Every word of length ``L`` as rows, row ``c`` being the base-k digits of ``c``."""
    codes = np.arange(k ** L, dtype=np.int64)
    weights = k ** np.arange(L - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] // weights[None, :]) % k).astype(np.uint8)


def successor_map(rule: LocalRule, L: int) -> np.ndarray:
    states = all_words(rule.k, L)
    nxt = kernels.torus_step_batch(rule.lut, rule.k, rule.r, states)
    weights = rule.k ** np.arange(L - 1, -1, -1, dtype=np.int64)
    return nxt.astype(np.int64) @ weights


@dataclass(frozen=True)
class OrbitTable:
    """Preperiod and period of every circle state of size ``L``, indexed by base-k code."""

    L: int
    succ: np.ndarray
    preperiod: np.ndarray
    period: np.ndarray


def orbit_table(rule: LocalRule, L: int) -> OrbitTable:
    if rule.k ** L > STATE_CAP:
        raise ValueError(f"k^L = {rule.k ** L} states exceeds the exhaustive cap {STATE_CAP}")
    succ = successor_map(rule, L)
    N = succ.size
    indeg = np.bincount(succ, minlength=N)
    succ_l = succ.tolist()
    indeg_l = indeg.tolist()
    order = [v for v in range(N) if indeg_l[v] == 0]
    i = 0
    while i < len(order):
        w = succ_l[order[i]]
        indeg_l[w] -= 1
        if indeg_l[w] == 0:
            order.append(w)
        i += 1
    pre = [0] * N
    per = [0] * N
    removed = set(order)
    for v in range(N):
        if v in removed or per[v]:
            continue
        cyc = [v]
        w = succ_l[v]
        while w != v:
            cyc.append(w)
            w = succ_l[w]
        for u in cyc:
            per[u] = len(cyc)
    for v in reversed(order):
        w = succ_l[v]
        pre[v] = pre[w] + 1
        per[v] = per[w]
    return OrbitTable(L, succ, np.array(pre, dtype=np.int64), np.array(per, dtype=np.int64))


def primitive_root(word: Sequence[int]) -> tuple[int, ...]:
    word = tuple(word)
    L = len(word)
    for d in range(1, L + 1):
        if L % d == 0 and word == word[:d] * (L // d):
            return word[:d]
    return word


def canonical(word: Sequence[int]) -> tuple[int, ...]:
    """Least rotation of the primitive root: one name per spatially periodic configuration."""
    root = primitive_root(word)
    return min(root[i:] + root[:i] for i in range(len(root)))


@dataclass(frozen=True)
class PeriodicPoint:
    word: tuple[int, ...]
    period: int

    def verify(self, rule: LocalRule) -> bool:
        start = TorusConfig(self.word)
        return iterate_torus(rule, start, self.period) == start


@dataclass
class PeriodicSearch:
    points: list[PeriodicPoint]
    partial: bool = False
    states_examined: int = 0
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {p.word: p for p in self.points}

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def lookup(self, word: Sequence[int]) -> PeriodicPoint | None:
        """The listed point whose repetition equals ``...www...``, if any."""
        return self._index.get(canonical(word))

    def to_csv(self) -> str:
        lines = ["L,word,preperiod,period"]
        for p in sorted(self.points, key=lambda q: (len(q.word), q.word)):
            lines.append(f"{len(p.word)},{word_to_str(p.word)},0,{p.period}")
        return "\n".join(lines) + "\n"


def _add(found: dict, word: Sequence[int], period: int) -> None:
    c = canonical(word)
    if c not in found:
        found[c] = PeriodicPoint(c, period)


def find_periodic_points(
    rule: LocalRule,
    L_max: int,
    time_bound: int | None = None,
    budget: int = 100_000,
    stream: RandomStream | None = None,
) -> PeriodicSearch:
    """F-periodic spatially periodic points of spatial period at most ``L_max``.

    Sizes with ``k^L`` above the cap are sampled (``budget`` random words,
    cycle representatives kept) and the result is flagged partial.
    ``time_bound`` defaults to ``k^L``; longer periods are not reported.
    """
    if L_max < 1:
        raise ValueError("L_max must be at least 1")
    found: dict[tuple[int, ...], PeriodicPoint] = {}
    partial = False
    examined = 0
    for L in range(1, L_max + 1):
        bound = time_bound if time_bound is not None else rule.k ** L
        if rule.k ** L <= STATE_CAP:
            table = orbit_table(rule, L)
            examined += table.succ.size
            cyclic = np.nonzero((table.preperiod == 0) & (table.period <= bound))[0]
            if cyclic.size:
                words = all_words(rule.k, L)[cyclic]
                for w, m in zip(words.tolist(), table.period[cyclic].tolist()):
                    if len(primitive_root(w)) == L:
                        _add(found, w, m)
            continue
        partial = True
        rng = (stream or RandomStream(0)).child(L).generator()
        for _ in range(budget):
            w = tuple(rng.integers(0, rule.k, size=L).tolist())
            info = torus_cycle(rule, TorusConfig(w), max_steps=min(bound + L, STATE_CAP))
            examined += 1
            if info is None or info.period > bound or info.cycle is None:
                continue
            for c in info.cycle:
                if len(primitive_root(c)) == L:
                    _add(found, c, info.period)
    return PeriodicSearch(list(found.values()), partial, examined)


def _cyclic_subwords(word: Sequence[int], L: int) -> Iterable[tuple[int, ...]]:
    reps = -(-L // len(word)) + 1
    long = tuple(word) * reps
    for i in range(len(word)):
        yield long[i:i + L]


@dataclass(frozen=True)
class CoverageReport:
    words: tuple[tuple[int, ...], ...]
    frequencies: tuple[float, ...]
    covered: tuple[bool, ...]
    unverified_points: int = 0

    @property
    def total(self) -> int:
        return len(self.words)

    @property
    def n_covered(self) -> int:
        return sum(self.covered)

    @property
    def coverage(self) -> float:
        return self.n_covered / self.total if self.total else 1.0

    def to_csv(self) -> str:
        lines = [f"# coverage={self.coverage!r} covered={self.n_covered} total={self.total}",
                 "word,frequency,covered"]
        for w, f, c in zip(self.words, self.frequencies, self.covered):
            lines.append(f"{word_to_str(w)},{f!r},{int(c)}")
        return "\n".join(lines) + "\n"


def density_check(
    rule: LocalRule,
    points: Iterable[PeriodicPoint],
    support: EmpiricalCylinderMeasure,
    threshold: float = 0.0,
) -> CoverageReport:
    """Which support words occur inside the repetition of some verified periodic point."""
    L = support.L
    realized = set()
    bad = 0
    for p in points:
        if not p.verify(rule):
            bad += 1
            continue
        realized.update(_cyclic_subwords(p.word, L))
    words = support.support(threshold)
    freqs = tuple(float(support.frequency(w)) for w in words)
    return CoverageReport(tuple(words), freqs, tuple(w in realized for w in words), bad)
