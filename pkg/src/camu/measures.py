"""Shift-ergodic source measures: Bernoulli and stationary Markov chains.

Each measure can sample finite windows, evaluate cylinder probabilities
exactly, and sample a window conditioned on a fixed central word. For a
Markov measure the cells left of the fixed word follow the time-reversed
chain ``P*(i, j) = pi(j) P(j, i) / pi(i)``, which is the unique law
consistent with stationarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .core import SymbolRangeError, WindowConfig
from .rng import RandomStream

PROB_TOL = 1e-12
STATIONARY_TOL = 1e-10


class MeasureError(ValueError):
    pass


def _parse_number(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise MeasureError(f"not a probability: {text!r}") from exc


def _check_prob_vector(p: np.ndarray, what: str) -> None:
    if np.any(p < 0):
        raise MeasureError(f"{what} has negative entries")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise MeasureError(f"{what} sums to {p.sum()!r}, not 1")


def is_primitive(P: np.ndarray) -> bool:
    """Irreducible and aperiodic: some power up to k^2 is entrywise positive."""
    k = P.shape[0]
    support = (P > 0).astype(np.int64)
    acc = support.copy()
    for _ in range(k * k):
        if np.all(acc > 0):
            return True
        acc = ((acc @ support) > 0).astype(np.int64)
    return bool(np.all(acc > 0))


def stationary_vector(P: np.ndarray, tol: float = 1e-12, max_iter: int = 1_000_000) -> np.ndarray:
    k = P.shape[0]
    pi = np.full(k, 1.0 / k)
    for _ in range(max_iter):
        nxt = pi @ P
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt
        pi = nxt
    raise MeasureError("power iteration for the stationary vector did not converge")


def _draw(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    # cum rows are cumulative distributions with the last entry forced to 1
    return np.minimum((cum <= u[..., None]).sum(axis=-1), cum.shape[-1] - 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class StochasticMeasure:
    kind: str
    k: int
    p: np.ndarray | None = None
    P: np.ndarray | None = None
    pi: np.ndarray | None = None

    @classmethod
    def bernoulli(cls, p: Sequence[float]) -> StochasticMeasure:
        arr = np.asarray(p, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise MeasureError("Bernoulli vector needs at least two entries")
        _check_prob_vector(arr, "Bernoulli vector")
        arr.setflags(write=False)
        return cls("bernoulli", arr.size, p=arr)

    @classmethod
    def markov(cls, P: Sequence[Sequence[float]]) -> StochasticMeasure:
        mat = np.asarray(P, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 2:
            raise MeasureError("transition matrix must be square with k >= 2")
        for i, row in enumerate(mat):
            _check_prob_vector(row, f"row {i} of the transition matrix")
        if not is_primitive(mat):
            raise MeasureError("transition matrix is not irreducible and aperiodic")
        pi = stationary_vector(mat)
        if np.max(np.abs(pi @ mat - pi)) > STATIONARY_TOL:
            raise MeasureError("stationary vector check failed")
        mat.setflags(write=False)
        pi.setflags(write=False)
        return cls("markov", mat.shape[0], P=mat, pi=pi)

    # identity is by parameters, so measures can key caches and compare in tests
    def _key(self):
        if self.kind == "bernoulli":
            return (self.kind, tuple(self.p.tolist()))
        return (self.kind, tuple(self.P.ravel().tolist()))

    def __eq__(self, other):
        return isinstance(other, StochasticMeasure) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def id(self) -> str:
        if self.kind == "bernoulli":
            return "bernoulli:%d:%s" % (self.k, ",".join(repr(float(v)) for v in self.p))
        return "markov:%d:%s" % (self.k, ",".join(repr(float(v)) for v in self.P.ravel()))

    @cached_property
    def marginal(self) -> np.ndarray:
        return self.p if self.kind == "bernoulli" else self.pi

    @cached_property
    def reversed_P(self) -> np.ndarray:
        if self.kind != "markov":
            raise MeasureError("reversed chain only exists for Markov measures")
        return (self.P.T * self.pi[None, :]) / self.pi[:, None]

    @cached_property
    def _cum_marginal(self) -> np.ndarray:
        c = np.cumsum(self.marginal)
        c[-1] = 1.0
        return c

    @cached_property
    def _cum_P(self) -> np.ndarray:
        c = np.cumsum(self.P, axis=1)
        c[:, -1] = 1.0
        return c

    @cached_property
    def _cum_Pstar(self) -> np.ndarray:
        c = np.cumsum(self.reversed_P, axis=1)
        c[:, -1] = 1.0
        return c

    def _check_word(self, word: Sequence[int]) -> None:
        for a in word:
            if not 0 <= a < self.k:
                raise SymbolRangeError(f"symbol {a} out of range for k={self.k}")

    def cylinder_prob(self, word: Sequence[int], position: int = 0) -> float:
        """Exact measure of the cylinder fixing ``word`` at ``position``.

        Both measures are shift invariant, so ``position`` never changes the result.
        """
        if len(word) == 0:
            raise MeasureError("cylinder word must be nonempty")
        self._check_word(word)
        if self.kind == "bernoulli":
            return float(np.prod([self.p[a] for a in word]))
        prob = float(self.pi[word[0]])
        for a, b in zip(word, word[1:]):
            prob *= float(self.P[a, b])
        return prob

    def _chain(self, out: np.ndarray, start_col: int, stop_col: int, step: int, cum: np.ndarray,
               u: np.ndarray) -> None:
        # fill columns start_col, start_col+step, ... from the column before each
        for j, col in enumerate(range(start_col, stop_col, step)):
            out[:, col] = _draw(cum[out[:, col - step]], u[:, j])

    def sample_batch(self, a: int, b: int, count: int, rng: np.random.Generator) -> np.ndarray:
        """``count`` independent draws of the cells on ``[a, b]`` as a uint8 array."""
        if a > b:
            raise ValueError("empty interval")
        width = b - a + 1
        u = rng.random((count, width))
        if self.kind == "bernoulli":
            return _draw(self._cum_marginal, u)
        out = np.empty((count, width), dtype=np.uint8)
        out[:, 0] = _draw(self._cum_marginal, u[:, 0])
        self._chain(out, 1, width, 1, self._cum_P, u[:, 1:])
        return out

    def sample_window(self, a: int, b: int, stream: RandomStream) -> WindowConfig:
        cells = self.sample_batch(a, b, 1, stream.generator())
        return WindowConfig(a, tuple(cells[0].tolist()))

    def conditional_batch(self, core: Sequence[int], core_start: int, a: int, b: int, count: int,
                          rng: np.random.Generator) -> np.ndarray:
        """Draws on ``[a, b]`` from the measure conditioned on ``core`` at ``core_start``."""
        core = np.asarray(core, dtype=np.uint8)
        core_stop = core_start + core.size - 1
        if core.size == 0 or a > core_start or b < core_stop:
            raise ValueError(
                f"target [{a}, {b}] does not contain the core [{core_start}, {core_stop}]"
            )
        self._check_word(core.tolist())
        width = b - a + 1
        lo, hi = core_start - a, core_stop - a
        out = np.empty((count, width), dtype=np.uint8)
        out[:, lo:hi + 1] = core
        n_left, n_right = lo, width - 1 - hi
        u = rng.random((count, n_left + n_right))
        if self.kind == "bernoulli":
            if n_left:
                out[:, :lo] = _draw(self._cum_marginal, u[:, :n_left])
            if n_right:
                out[:, hi + 1:] = _draw(self._cum_marginal, u[:, n_left:])
            return out
        # right side runs forward from the core; left side runs the reversed chain
        self._chain(out, hi + 1, width, 1, self._cum_P, u[:, n_left:])
        self._chain(out, lo - 1, -1, -1, self._cum_Pstar, u[:, :n_left])
        return out

    def sample_conditional_extension(self, core: Sequence[int], n: int, a: int, b: int,
                                     stream: RandomStream) -> WindowConfig:
        if len(core) != 2 * n + 1:
            raise ValueError(f"core must have length 2n+1 = {2 * n + 1}")
        cells = self.conditional_batch(core, -n, a, b, 1, stream.generator())
        return WindowConfig(a, tuple(cells[0].tolist()))

    def to_text(self) -> str:
        if self.kind == "bernoulli":
            return "bernoulli %d %s" % (self.k, " ".join(repr(float(v)) for v in self.p))
        return "markov %d %s" % (self.k, " ".join(repr(float(v)) for v in self.P.ravel()))


def bernoulli(p: Sequence[float]) -> StochasticMeasure:
    return StochasticMeasure.bernoulli(p)


def markov(P: Sequence[Sequence[float]]) -> StochasticMeasure:
    return StochasticMeasure.markov(P)


def sample_window(m: StochasticMeasure, a: int, b: int, stream: RandomStream) -> WindowConfig:
    return m.sample_window(a, b, stream)


def cylinder_prob(m: StochasticMeasure, word: Sequence[int], position: int = 0) -> float:
    return m.cylinder_prob(word, position)


def sample_conditional_extension(m: StochasticMeasure, core: Sequence[int], n: int, a: int, b: int,
                                 stream: RandomStream) -> WindowConfig:
    return m.sample_conditional_extension(core, n, a, b, stream)


def parse_measure_text(text: str) -> StochasticMeasure:
    """Parse ``bernoulli <k> <p_0> ... <p_k-1>`` or ``markov <k> <row-major P>``."""
    tokens = text.split()
    if len(tokens) < 2:
        raise MeasureError("measure text needs a kind and an alphabet size")
    kind = tokens[0].lower()
    try:
        k = int(tokens[1])
    except ValueError as exc:
        raise MeasureError(f"alphabet size {tokens[1]!r} is not an integer") from exc
    if k < 2:
        raise MeasureError("alphabet size must be at least 2")
    values = [_parse_number(t) for t in tokens[2:]]
    if kind == "bernoulli":
        if len(values) != k:
            raise MeasureError(f"expected {k} probabilities, got {len(values)}")
        return StochasticMeasure.bernoulli(values)
    if kind == "markov":
        if len(values) != k * k:
            raise MeasureError(f"expected {k * k} transition entries, got {len(values)}")
        return StochasticMeasure.markov(np.asarray(values).reshape(k, k))
    raise MeasureError(f"unknown measure kind {tokens[0]!r}")
