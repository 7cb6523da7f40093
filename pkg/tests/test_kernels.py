"""The compiled kernels and the numpy fallback must agree bit for bit."""

import os

import numpy as np
import pytest

from camu import _fallback, kernels

compiled = pytest.importorskip("camu._kernels")


def _case(rng):
    k = int(rng.integers(2, 5))
    r = int(rng.integers(0, 3))
    table = rng.integers(0, k, k ** (2 * r + 1)).astype(np.uint8)
    steps = int(rng.integers(0, 8))
    width = int(rng.integers(1, 5))
    W = width + 2 * r * steps + int(rng.integers(0, 5))
    pos = r * steps + int(rng.integers(0, W - width - 2 * r * steps + 1))
    cells = rng.integers(0, k, (9, W)).astype(np.uint8)
    return k, r, table, steps, width, pos, cells


@pytest.mark.parametrize("seed", range(40))
def test_backends_agree(seed):
    rng = np.random.default_rng(seed)
    k, r, table, steps, width, pos, cells = _case(rng)
    if cells.shape[1] >= 2 * r + 1:
        np.testing.assert_array_equal(compiled.step_batch(table, k, r, cells),
                                      _fallback.step_batch(table, k, r, cells))
    np.testing.assert_array_equal(compiled.torus_step_batch(table, k, r, cells),
                                  _fallback.torus_step_batch(table, k, r, cells))
    codes = compiled.central_codes(table, k, r, cells, steps, pos, width)
    np.testing.assert_array_equal(codes, _fallback.central_codes(table, k, r, cells, steps, pos, width))
    # reference column of row 0, planted again in row 4
    cells[4] = cells[0]
    ref = []
    a = cells[:1]
    for t in range(steps + 1):
        p = pos - r * t
        ref.append(a[0, p:p + width])
        if t < steps:
            a = _fallback.step_batch(table, k, r, a)
    ref = np.ascontiguousarray(ref, dtype=np.uint8)
    got = compiled.column_match(table, k, r, cells, ref, pos)
    np.testing.assert_array_equal(got, _fallback.column_match(table, k, r, cells, ref, pos))
    assert got[0] and got[4]


def test_light_cone_bounds_rejected():
    table = np.zeros(8, dtype=np.uint8)
    cells = np.zeros((2, 5), dtype=np.uint8)
    for impl in (compiled, _fallback):
        with pytest.raises(ValueError):
            impl.central_codes(table, 2, 1, cells, 3, 2, 1)
        with pytest.raises(ValueError):
            impl.step_batch(table, 2, 1, cells[:, :2])


def test_backend_selected():
    forced = os.environ.get("CAMU_PURE_PYTHON", "") in ("1", "true", "yes")
    assert kernels.BACKEND == ("python" if forced else "cython")
