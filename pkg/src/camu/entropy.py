"""Block entropies of central columns.

For a partition half-width ``p`` the column of height ``t`` of a sample
``x`` is the sequence of words ``F^i(x)(-p, p)`` for ``i < t``. ``H_t`` is
the Shannon entropy (nats) of the empirical distribution of these
columns over the samples; ``H_t - H_(t-1)`` and ``H_t / t`` estimate the
entropy of the automaton relative to that partition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import LocalRule
from .measures import StochasticMeasure
from .parallel import map_chunks
from .rng import RandomStream

UNDERSAMPLED_FRACTION = 0.1


def plugin_entropy(counts: np.ndarray) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    counts = counts[counts > 0]
    total = counts.sum()
    q = counts / total
    return float(-(q * np.log(q)).sum())


def miller_madow(counts: np.ndarray) -> float:
    counts = np.asarray(counts)
    observed = int(np.count_nonzero(counts))
    return plugin_entropy(counts) + (observed - 1) / (2.0 * counts.sum())


@dataclass(frozen=True)
class EntropyTrace:
    p: int
    samples: int
    H_plugin: np.ndarray  # index t-1 holds H_t
    H_mm: np.ndarray
    distinct: np.ndarray

    @property
    def T(self) -> int:
        return self.H_plugin.size

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.T + 1)

    @staticmethod
    def _diff(H):
        return np.diff(np.concatenate(([0.0], H)))

    @property
    def rate_ratio(self) -> np.ndarray:
        return self.H_mm / self.t

    @property
    def rate_diff(self) -> np.ndarray:
        return self._diff(self.H_mm)

    @property
    def rate_ratio_plugin(self) -> np.ndarray:
        return self.H_plugin / self.t

    @property
    def rate_diff_plugin(self) -> np.ndarray:
        return self._diff(self.H_plugin)

    @property
    def undersampled(self) -> bool:
        return bool(self.distinct[-1] > self.samples * UNDERSAMPLED_FRACTION)

    def to_csv(self) -> str:
        lines = ["t,H_plugin,H_mm,rate_ratio,rate_diff,distinct_words"]
        for i in range(self.T):
            lines.append("%d,%r,%r,%r,%r,%d" % (
                i + 1, float(self.H_plugin[i]), float(self.H_mm[i]), float(self.rate_ratio[i]),
                float(self.rate_diff[i]), int(self.distinct[i])))
        return "\n".join(lines) + "\n"


def _column_trace(word_codes: np.ndarray, p: int) -> EntropyTrace:
    """Entropies of column prefixes given per-time word codes of shape (samples, T)."""
    samples, T = word_codes.shape
    labels = np.zeros(samples, dtype=np.int64)
    H_plugin, H_mm, distinct = [], [], []
    for t in range(T):
        # relabel (prefix class, next word) pairs densely so codes never overflow
        _, labels, counts = np.unique(
            np.stack([labels, word_codes[:, t]], axis=1), axis=0,
            return_inverse=True, return_counts=True)
        labels = labels.ravel()
        H_plugin.append(plugin_entropy(counts))
        H_mm.append(miller_madow(counts))
        distinct.append(counts.size)
    return EntropyTrace(p, samples, np.array(H_plugin), np.array(H_mm), np.array(distinct))


def column_entropy_from_cells(rule: LocalRule, cells: np.ndarray, p: int, T: int,
                              offset: int) -> EntropyTrace:
    """Entropy trace for given initial windows whose first cell sits at ``offset``."""
    if p < 0 or T < 1:
        raise ValueError("need p >= 0 and T >= 1")
    cells = np.ascontiguousarray(cells, dtype=np.uint8)
    if rule.k ** (2 * p + 1) >= 2 ** 62:
        raise ValueError("partition too fine to encode")
    reach = p + rule.r * (T - 1)
    lo = -reach - offset
    if lo < 0 or offset + cells.shape[1] - 1 < reach:
        raise ValueError(f"windows must cover [{-reach}, {reach}]")
    cone = np.ascontiguousarray(cells[:, lo:lo + 2 * reach + 1])
    codes = kernels.central_codes(rule.lut, rule.k, rule.r, cone, T - 1, rule.r * (T - 1),
                                  2 * p + 1)
    return _column_trace(codes, p)


def column_entropy(
    rule: LocalRule,
    measure: StochasticMeasure,
    p: int,
    T: int,
    samples: int,
    stream: RandomStream,
    threads: int = 1,
) -> EntropyTrace:
    if p < 0 or T < 1 or samples < 1:
        raise ValueError("need p >= 0, T >= 1 and samples >= 1")
    if measure.k != rule.k:
        raise ValueError(f"measure alphabet {measure.k} does not match rule alphabet {rule.k}")
    reach = p + rule.r * T

    def chunk(count, rng):
        x = measure.sample_batch(-reach, reach, count, rng)
        return kernels.central_codes(rule.lut, rule.k, rule.r, x, T - 1, rule.r * T, 2 * p + 1)

    codes = np.concatenate(map_chunks(chunk, samples, stream, threads), axis=0)
    return _column_trace(codes, p)


@dataclass(frozen=True)
class RateEstimate:
    rate_diff: float
    rate_ratio: float
    recommended: str = "rate_diff"

    @property
    def value(self) -> float:
        return getattr(self, self.recommended)

    @property
    def bits(self) -> float:
        return self.value / math.log(2)


def entropy_rate_estimate(trace: EntropyTrace, corrected: bool = True) -> RateEstimate:
    """Both extrapolations at the final height; the difference is preferred because
    a preperiod inflates ``H_t / t`` but not ``H_t - H_(t-1)`` once the column is periodic."""
    if trace.T < 3:
        raise ValueError("need a trace with T >= 3")
    if corrected:
        return RateEstimate(float(trace.rate_diff[-1]), float(trace.rate_ratio[-1]))
    return RateEstimate(float(trace.rate_diff_plugin[-1]), float(trace.rate_ratio_plugin[-1]))
