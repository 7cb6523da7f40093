"""Horizon-truncated B-sets and Monte Carlo estimates of the conditional ratio.

``B_m^T(x)`` is the set of configurations whose central ``(2m+1)``-column
agrees with that of ``x`` at every time ``0..T``. The estimated quantity
is ``mu(C_n(x) & B_m^T(x)) / mu(C_n(x))``, which upper-bounds the
untruncated ratio. Only the light cone ``[-m-rT, m+rT]`` and the core
``[-n, n]`` are ever materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import CoverageError, LocalRule, WindowConfig, evolve_column
from .measures import StochasticMeasure
from .parallel import map_chunks
from .rng import RandomStream

Z95 = 1.959963984540054

# classifier thresholds; heuristics, not derived quantities
MU_EQUI_THRESHOLD = 0.9
EXPANSIVE_THRESHOLD = 0.1

EXHAUSTIVE_CANDIDATES = 1 << 20

LABELS = ("equicontinuous-like", "mu-equicontinuous-like", "expansive-like", "inconclusive")


def wilson_interval(successes: int, total: int, z: float = Z95) -> tuple[float, float]:
    if total <= 0:
        raise ValueError("Wilson interval needs at least one trial")
    phat = successes / total
    denom = 1.0 + z * z / total
    centre = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    lo, hi = max(0.0, centre - half), min(1.0, centre + half)
    # guard rounding at the boundaries so lo <= phat <= hi always holds
    return min(lo, phat), max(hi, phat)


@dataclass(frozen=True)
class RatioEstimate:
    estimate: float
    lo: float
    hi: float
    samples: int
    successes: int
    m: int
    n: int
    T: int

    @classmethod
    def from_counts(cls, successes: int, samples: int, m: int, n: int, T: int) -> RatioEstimate:
        lo, hi = wilson_interval(successes, samples)
        return cls(successes / samples, lo, hi, samples, successes, m, n, T)


def _reference_column(rule: LocalRule, x: WindowConfig, m: int, T: int) -> np.ndarray:
    return np.asarray(evolve_column(rule, x, m, T), dtype=np.uint8)


def b_set_member(rule: LocalRule, x: WindowConfig, y: WindowConfig, m: int, T: int) -> bool:
    """True iff ``F^i(x)(-m, m) == F^i(y)(-m, m)`` for every ``i`` in ``0..T``."""
    return evolve_column(rule, x, m, T) == evolve_column(rule, y, m, T)


def _check_params(m: int, n: int, T: int) -> None:
    if m < 0 or n < 0 or T < 0:
        raise ValueError("m, n and T must be nonnegative")
    if m > n:
        raise ValueError(f"column radius m={m} exceeds conditioning radius n={n}")


def estimate_ratio(
    rule: LocalRule,
    measure: StochasticMeasure,
    x: WindowConfig,
    m: int,
    n: int,
    T: int,
    samples: int,
    stream: RandomStream,
    threads: int = 1,
) -> RatioEstimate:
    _check_params(m, n, T)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if measure.k != rule.k:
        raise ValueError(f"measure alphabet {measure.k} does not match rule alphabet {rule.k}")
    reach = m + rule.r * T
    half = max(n, reach)
    if not x.covers(-half, half):
        raise CoverageError(f"reference window must cover [{-half}, {half}]")
    ref = _reference_column(rule, x, m, T)
    core = x.word(-n, n)
    lut, k, r = rule.lut, rule.k, rule.r

    def chunk(count: int, rng: np.random.Generator) -> int:
        y = measure.conditional_batch(core, -n, -half, half, count, rng)
        cone = np.ascontiguousarray(y[:, half - reach : half + reach + 1])
        return int(kernels.column_match(lut, k, r, cone, ref, r * T).sum())

    successes = sum(map_chunks(chunk, samples, stream, threads))
    return RatioEstimate.from_counts(successes, samples, m, n, T)


@dataclass(frozen=True)
class WitnessResult:
    witness: WindowConfig | None
    exhaustive: bool
    tried: int


def _witness_batches(x_cone: np.ndarray, free: np.ndarray, k: int, budget: int,
                     rng: np.random.Generator):
    """Yield batches of perturbations of ``x_cone`` on the ``free`` cells."""
    nfree = free.size
    if nfree == 0:
        return
    if k ** nfree <= EXHAUSTIVE_CANDIDATES:
        total = k ** nfree
        weights = k ** np.arange(nfree - 1, -1, -1, dtype=np.int64)
        for start in range(0, total, 1 << 14):
            idx = np.arange(start, min(total, start + (1 << 14)), dtype=np.int64)
            digits = (idx[:, None] // weights[None, :]) % k
            cand = np.repeat(x_cone[None, :], idx.size, axis=0)
            cand[:, free] = digits
            yield cand
        return
    # structured guesses first: constant fills of each side, then single-cell changes
    centre = (x_cone.size - 1) // 2
    sides = [free, free[free < centre], free[free > centre]]
    fills = []
    for cells in sides:
        for s in range(k):
            if cells.size:
                c = x_cone.copy()
                c[cells] = s
                fills.append(c)
    singles = []
    for pos in free:
        for s in range(k):
            if s != x_cone[pos]:
                c = x_cone.copy()
                c[pos] = s
                singles.append(c)
    structured = np.array(fills + singles, dtype=np.uint8)
    yield structured
    left = budget
    while left > 0:
        count = min(left, 4096)
        cand = np.repeat(x_cone[None, :], count, axis=0)
        cand[:, free] = rng.integers(0, k, size=(count, nfree), dtype=np.uint8)
        yield cand
        left -= count


def witness_search(
    rule: LocalRule,
    x: WindowConfig,
    n: int,
    m: int,
    T: int,
    budget: int,
    stream: RandomStream,
) -> WitnessResult:
    """Look for ``y`` agreeing with ``x`` on ``[-m, m]`` but not in ``B_n^T(x)``."""
    if n < 0 or m < 0 or T < 0 or budget < 0:
        raise ValueError("n, m, T and budget must be nonnegative")
    reach = n + rule.r * T
    if not x.covers(-reach, reach):
        raise CoverageError(f"reference window must cover [{-reach}, {reach}]")
    ref = _reference_column(rule, x, n, T)
    x_cone = np.asarray(x.word(-reach, reach), dtype=np.uint8)
    pos = np.arange(-reach, reach + 1)
    free = np.nonzero(np.abs(pos) > m)[0]
    exhaustive = rule.k ** free.size <= EXHAUSTIVE_CANDIDATES
    tried = 0
    for cand in _witness_batches(x_cone, free, rule.k, budget, stream.generator()):
        cand = np.ascontiguousarray(cand)
        tried += cand.shape[0]
        miss = ~kernels.column_match(rule.lut, rule.k, rule.r, cand, ref, rule.r * T)
        hits = np.nonzero(miss)[0]
        if hits.size:
            return WitnessResult(WindowConfig(-reach, tuple(cand[hits[0]].tolist())),
                                 exhaustive, tried)
    return WitnessResult(None, exhaustive, tried)


def equicontinuity_witness_search(
    rule: LocalRule,
    x: WindowConfig,
    n: int,
    m: int,
    T: int,
    budget: int,
    stream: RandomStream,
) -> WindowConfig | None:
    return witness_search(rule, x, n, m, T, budget, stream).witness


@dataclass(frozen=True)
class Classification:
    label: str
    n_grid: tuple[int, ...]
    m: int
    T: int
    estimates: tuple[tuple[RatioEstimate, ...], ...]  # [n index][x index]
    pooled: tuple[RatioEstimate, ...]
    mean_ratio: tuple[float, ...]
    witness_found: tuple[bool, ...]
    witness_exhaustive: tuple[bool, ...]
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n_grid": list(self.n_grid),
            "m": self.m,
            "T": self.T,
            "mean_ratio": list(self.mean_ratio),
            "pooled": [
                {"n": e.n, "estimate": e.estimate, "wilson_lo": e.lo, "wilson_hi": e.hi,
                 "samples": e.samples}
                for e in self.pooled
            ],
            "estimates": [[e.estimate for e in row] for row in self.estimates],
            "witness_found": list(self.witness_found),
            "witness_exhaustive": list(self.witness_exhaustive),
            "thresholds": {"mu_equicontinuous": MU_EQUI_THRESHOLD,
                           "expansive": EXPANSIVE_THRESHOLD},
        }


def label_from_evidence(pooled, mean_ratio, witness_found, witness_exhaustive) -> str:
    if not any(witness_found) and all(witness_exhaustive):
        return "equicontinuous-like"
    no_drop = all(b.hi >= a.lo for a, b in zip(pooled, pooled[1:]))
    if mean_ratio[-1] > MU_EQUI_THRESHOLD and no_drop:
        return "mu-equicontinuous-like"
    if mean_ratio[-1] < EXPANSIVE_THRESHOLD and max(mean_ratio) < EXPANSIVE_THRESHOLD:
        return "expansive-like"
    return "inconclusive"


def classify(
    rule: LocalRule,
    measure: StochasticMeasure,
    n_grid,
    m: int,
    T: int,
    samples: int,
    x_count: int,
    stream: RandomStream,
    budget: int = 10_000,
    threads: int = 1,
) -> Classification:
    n_grid = tuple(int(v) for v in n_grid)
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be nonempty and strictly increasing")
    if m > n_grid[0]:
        raise ValueError("m must not exceed the smallest n in the grid")
    if x_count < 1:
        raise ValueError("x_count must be at least 1")
    half = max(n_grid[-1], m) + rule.r * T
    xs = [measure.sample_window(-half, half, stream.child(0).child(j)) for j in range(x_count)]
    rows = []
    for i, n in enumerate(n_grid):
        rows.append(tuple(
            estimate_ratio(rule, measure, x, m, n, T, samples,
                           stream.child(1).child(i).child(j), threads)
            for j, x in enumerate(xs)
        ))
    pooled = tuple(
        RatioEstimate.from_counts(sum(e.successes for e in row), sum(e.samples for e in row),
                                  m, n, T)
        for n, row in zip(n_grid, rows)
    )
    mean_ratio = tuple(float(np.mean([e.estimate for e in row])) for row in rows)
    # equicontinuity probe: can anything outside [-n_max, n_max] move the m-column?
    found, exhaustive = [], []
    for j, x in enumerate(xs):
        res = witness_search(rule, x, m, n_grid[-1], T, budget, stream.child(2).child(j))
        found.append(res.witness is not None)
        exhaustive.append(res.exhaustive)
    label = label_from_evidence(pooled, mean_ratio, found, exhaustive)
    return Classification(label, n_grid, m, T, tuple(rows), pooled, mean_ratio,
                          tuple(found), tuple(exhaustive))


def pooled_estimate(estimates) -> RatioEstimate:
    """Wilson estimate on the summed counts of several estimates sharing (m, n, T)."""
    first = estimates[0]
    return RatioEstimate.from_counts(sum(e.successes for e in estimates),
                                     sum(e.samples for e in estimates), first.m, first.n, first.T)


__all__ = [
    "LABELS", "RatioEstimate", "WitnessResult", "Classification", "wilson_interval",
    "b_set_member", "estimate_ratio", "witness_search", "equicontinuity_witness_search",
    "classify", "label_from_evidence", "pooled_estimate",
]
