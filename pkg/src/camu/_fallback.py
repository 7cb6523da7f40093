"""Pure numpy versions of the batched kernels in ``_kernels.pyx``."""

import numpy as np


def _neighborhood_index(cells, k, r, out_width):
    idx = np.zeros((cells.shape[0], out_width), dtype=np.int64)
    for j in range(2 * r + 1):
        idx *= k
        idx += cells[:, j:j + out_width]
    return idx


def step_batch(table, k, r, cells):
    cells = np.asarray(cells, dtype=np.uint8)
    w = cells.shape[1]
    if w < 2 * r + 1:
        raise ValueError("window shorter than the neighborhood")
    return np.asarray(table, dtype=np.uint8)[_neighborhood_index(cells, k, r, w - 2 * r)]


def torus_step_batch(table, k, r, cells):
    cells = np.asarray(cells, dtype=np.uint8)
    L = cells.shape[1]
    if L == 0 or cells.shape[0] == 0:
        return np.empty_like(cells)
    cols = (np.arange(-r, L + r) % L)
    return step_batch(table, k, r, cells[:, cols])


def central_codes(table, k, r, cells, steps, pos, width):
    cells = np.asarray(cells, dtype=np.uint8)
    w = cells.shape[1]
    if steps < 0 or width < 1 or pos - r * steps < 0 or pos + width + r * steps > w:
        raise ValueError("word leaves the light cone of the window")
    weights = k ** np.arange(width - 1, -1, -1, dtype=np.int64)
    out = np.empty((cells.shape[0], steps + 1), dtype=np.int64)
    a = cells
    for t in range(steps + 1):
        p = pos - r * t
        out[:, t] = a[:, p:p + width].astype(np.int64) @ weights
        if t < steps:
            a = step_batch(table, k, r, a)
    return out


def column_match(table, k, r, cells, ref, pos):
    cells = np.asarray(cells, dtype=np.uint8)
    ref = np.asarray(ref, dtype=np.uint8)
    w = cells.shape[1]
    steps, width = ref.shape[0] - 1, ref.shape[1]
    if steps < 0 or width < 1 or pos - r * steps < 0 or pos + width + r * steps > w:
        raise ValueError("reference column leaves the light cone of the window")
    lo = pos - r * steps
    a = cells[:, lo:pos + width + r * steps]
    alive = np.arange(cells.shape[0])
    ok = np.zeros(cells.shape[0], dtype=bool)
    for t in range(steps + 1):
        p = pos - r * t - lo
        keep = np.all(a[:, p:p + width] == ref[t], axis=1)
        a, alive = a[keep], alive[keep]
        if t == steps or alive.size == 0:
            break
        a = step_batch(table, k, r, a)
    ok[alive] = True
    return ok
