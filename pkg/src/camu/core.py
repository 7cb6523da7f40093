"""Local rules and exact finite configurations of one-dimensional CA.

Two boundary-free representations are supported. A :class:`WindowConfig`
is a finite word placed at an absolute offset; stepping it returns the
cells that are fully determined by the window, so the result shrinks by
``r`` on each side. A :class:`TorusConfig` is a word on the circle
``Z/LZ``, equivalent to the spatially periodic configuration ``...www...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels


class RuleError(ValueError):
    """Invalid local rule or neighborhood."""


class TableLengthError(RuleError):
    pass


class SymbolRangeError(RuleError):
    pass


class NeighborhoodLengthError(RuleError):
    pass


class WindowTooShortError(ValueError):
    pass


class CoverageError(ValueError):
    """A window does not cover the light cone an operation needs."""


@dataclass(frozen=True)
class LocalRule:
    """Block map ``f: A^(2r+1) -> A`` stored as a full lookup table.

    Neighborhood ``(a_-r, ..., a_r)`` sits at index
    ``sum(a_j * k**(r - j))``: leftmost symbol most significant, base k.
    """

    k: int
    r: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.k < 2 or self.k > 256:
            raise RuleError(f"alphabet size must be in [2, 256], got {self.k}")
        if self.r < 0:
            raise RuleError(f"radius must be nonnegative, got {self.r}")
        expected = self.k ** (2 * self.r + 1)
        if len(self.table) != expected:
            raise TableLengthError(
                f"table has {len(self.table)} entries, expected k^(2r+1) = {expected}"
            )
        for i, v in enumerate(self.table):
            if not 0 <= v < self.k:
                raise SymbolRangeError(f"table entry {i} is {v}, not a symbol below {self.k}")

    @cached_property
    def lut(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.uint8)

    @property
    def span(self) -> int:
        return 2 * self.r + 1

    def index(self, neighborhood: Sequence[int]) -> int:
        if len(neighborhood) != self.span:
            raise NeighborhoodLengthError(
                f"neighborhood has length {len(neighborhood)}, expected {self.span}"
            )
        idx = 0
        for a in neighborhood:
            if not 0 <= a < self.k:
                raise SymbolRangeError(f"symbol {a} out of range for k={self.k}")
            idx = idx * self.k + a
        return idx

    def __call__(self, *neighborhood: int) -> int:
        return self.table[self.index(neighborhood)]


@dataclass(frozen=True)
class WindowConfig:
    """Cells of a configuration on the absolute interval ``[offset, offset + len - 1]``."""

    offset: int
    cells: tuple[int, ...]

    def __post_init__(self):
        if len(self.cells) == 0:
            raise ValueError("window must hold at least one cell")
        object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))

    @property
    def start(self) -> int:
        return self.offset

    @property
    def stop(self) -> int:
        """Last covered absolute position (inclusive)."""
        return self.offset + len(self.cells) - 1

    def __len__(self):
        return len(self.cells)

    def covers(self, a: int, b: int) -> bool:
        return self.start <= a and b <= self.stop

    def word(self, a: int, b: int) -> tuple[int, ...]:
        """The word ``x(a, b)``, both ends inclusive."""
        if not self.covers(a, b):
            raise CoverageError(f"window [{self.start}, {self.stop}] does not cover [{a}, {b}]")
        return self.cells[a - self.offset : b - self.offset + 1]

    def shifted(self, s: int) -> WindowConfig:
        return WindowConfig(self.offset + s, self.cells)

    def array(self) -> np.ndarray:
        return np.asarray(self.cells, dtype=np.uint8)


@dataclass(frozen=True)
class TorusConfig:
    cells: tuple[int, ...]

    def __post_init__(self):
        if len(self.cells) == 0:
            raise ValueError("torus size must be at least 1")
        object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))

    @property
    def size(self) -> int:
        return len(self.cells)

    def unroll(self, a: int, b: int) -> WindowConfig:
        """Periodic extension restricted to ``[a, b]``."""
        L = self.size
        return WindowConfig(a, tuple(self.cells[i % L] for i in range(a, b + 1)))


def rule_from_table(k: int, r: int, table: Sequence[int]) -> LocalRule:
    return LocalRule(int(k), int(r), tuple(int(v) for v in table))


def apply_local(rule: LocalRule, neighborhood: Sequence[int]) -> int:
    return rule.table[rule.index(neighborhood)]


def _check_symbols(rule: LocalRule, cells: Sequence[int]) -> None:
    bad = [c for c in cells if not 0 <= c < rule.k]
    if bad:
        raise SymbolRangeError(f"symbol {bad[0]} out of range for k={rule.k}")


def step_lightcone(rule: LocalRule, w: WindowConfig) -> WindowConfig:
    if len(w) < rule.span:
        raise WindowTooShortError(
            f"window of length {len(w)} cannot determine any cell at radius {rule.r}"
        )
    _check_symbols(rule, w.cells)
    out = kernels.step_batch(rule.lut, rule.k, rule.r, w.array()[None, :])
    return WindowConfig(w.offset + rule.r, tuple(out[0].tolist()))


def evolve_column(rule: LocalRule, w: WindowConfig, n: int, T: int) -> list[tuple[int, ...]]:
    """Exact words ``F^i(x)(-n, n)`` for ``i = 0..T``."""
    if n < 0 or T < 0:
        raise ValueError("half-width and horizon must be nonnegative")
    reach = n + rule.r * T
    if not w.covers(-reach, reach):
        raise CoverageError(
            f"window [{w.start}, {w.stop}] does not cover the light cone [{-reach}, {reach}]"
        )
    cur = WindowConfig(-reach, w.word(-reach, reach))
    words = [cur.word(-n, n)]
    for _ in range(T):
        cur = step_lightcone(rule, cur)
        words.append(cur.word(-n, n))
    return words


def step_torus(rule: LocalRule, t: TorusConfig) -> TorusConfig:
    _check_symbols(rule, t.cells)
    out = kernels.torus_step_batch(rule.lut, rule.k, rule.r, np.asarray([t.cells], dtype=np.uint8))
    return TorusConfig(tuple(out[0].tolist()))


def iterate_torus(rule: LocalRule, t: TorusConfig, steps: int) -> TorusConfig:
    cells = np.asarray([t.cells], dtype=np.uint8)
    for _ in range(steps):
        cells = kernels.torus_step_batch(rule.lut, rule.k, rule.r, cells)
    return TorusConfig(tuple(cells[0].tolist()))
