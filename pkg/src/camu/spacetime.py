"""Space-time diagrams written as binary PGM (P5) images, one row per time step."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import kernels
from .core import LocalRule, TorusConfig, WindowConfig

SENTINEL = 255


def lightcone_diagram(rule: LocalRule, w: WindowConfig, steps: int) -> np.ndarray:
    """Gray image of a shrinking window; cells no longer determined get ``SENTINEL``.

    Symbols use the scale ``floor(254 / (k-1))`` so that 255 stays free for the sentinel.
    """
    if rule.k > 255:
        raise ValueError("light-cone diagrams need k <= 255 to keep a sentinel gray")
    if len(w) < 2 * rule.r * steps + 1:
        raise ValueError(f"a window of {len(w)} cells cannot be stepped {steps} times")
    scale = 254 // (rule.k - 1)
    W = len(w)
    img = np.full((steps + 1, W), SENTINEL, dtype=np.uint8)
    cur = w.array()[None, :]
    for t in range(steps + 1):
        img[t, rule.r * t : W - rule.r * t] = cur[0] * scale
        if t < steps:
            cur = kernels.step_batch(rule.lut, rule.k, rule.r, cur)
    return img


def torus_diagram(rule: LocalRule, t0: TorusConfig, steps: int) -> np.ndarray:
    scale = 255 // (rule.k - 1)
    cur = np.asarray([t0.cells], dtype=np.uint8)
    rows = [cur[0]]
    for _ in range(steps):
        cur = kernels.torus_step_batch(rule.lut, rule.k, rule.r, cur)
        rows.append(cur[0])
    return (np.stack(rows).astype(np.int64) * scale).astype(np.uint8)


def pgm_bytes(img: np.ndarray) -> bytes:
    h, w = img.shape
    return b"P5\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def write_pgm(path: str | Path, img: np.ndarray) -> None:
    Path(path).write_bytes(pgm_bytes(img))


def read_pgm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5" or len(parts) < 4:
        raise ValueError("not a binary PGM")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8, count=w * h).reshape(h, w)
