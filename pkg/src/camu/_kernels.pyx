# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for batched cellular automaton evolution.

Every function takes the rule as a flat ``uint8`` lookup table plus
``(k, r)`` and operates on C-contiguous ``uint8`` cell arrays with one
sample per row. Signatures and results match :mod:`camu._fallback`
exactly; the two are checked against each other in the test suite.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

cnp.import_array()

ctypedef cnp.uint8_t u8
ctypedef cnp.int64_t i64


cdef inline void _step_row(const u8[::1] table, Py_ssize_t k, Py_ssize_t r,
                           const u8* src, u8* dst, Py_ssize_t w) noexcept nogil:
    # dst has w - 2r cells; rolling base-k index over the 2r+1 neighborhood
    cdef Py_ssize_t span = 2 * r + 1
    cdef Py_ssize_t top = 1
    cdef Py_ssize_t j, idx = 0
    for j in range(span - 1):
        top *= k
    for j in range(span):
        idx = idx * k + src[j]
    dst[0] = table[idx]
    for j in range(1, w - 2 * r):
        idx = (idx - src[j - 1] * top) * k + src[j + span - 1]
        dst[j] = table[idx]


def step_batch(const u8[::1] table, int k, int r, const u8[:, ::1] cells):
    cdef Py_ssize_t n = cells.shape[0], w = cells.shape[1]
    if w < 2 * r + 1:
        raise ValueError("window shorter than the neighborhood")
    out = np.empty((n, w - 2 * r), dtype=np.uint8)
    cdef u8[:, ::1] o = out
    cdef Py_ssize_t i
    if w - 2 * r == 0 or n == 0:
        return out
    with nogil:
        for i in range(n):
            _step_row(table, k, r, &cells[i, 0], &o[i, 0], w)
    return out


def torus_step_batch(const u8[::1] table, int k, int r, const u8[:, ::1] cells):
    cdef Py_ssize_t n = cells.shape[0], L = cells.shape[1]
    out = np.empty((n, L), dtype=np.uint8)
    if n == 0 or L == 0:
        return out
    cdef u8[:, ::1] o = out
    cdef Py_ssize_t i, j, w = L + 2 * r
    cdef u8* buf = <u8*> malloc(w * sizeof(u8))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                for j in range(w):
                    buf[j] = cells[i, ((j - r) % L + L) % L]
                _step_row(table, k, r, buf, &o[i, 0], w)
    finally:
        free(buf)
    return out


def central_codes(const u8[::1] table, int k, int r, const u8[:, ::1] cells,
                  int steps, int pos, int width):
    """Base-k codes of the word ``[pos - r*t, pos - r*t + width)`` at t = 0..steps."""
    cdef Py_ssize_t n = cells.shape[0], w = cells.shape[1]
    if steps < 0 or width < 1 or pos - r * steps < 0 or pos + width + r * steps > w:
        raise ValueError("word leaves the light cone of the window")
    out = np.empty((n, steps + 1), dtype=np.int64)
    cdef i64[:, ::1] o = out
    cdef u8* a = <u8*> malloc(w * sizeof(u8))
    cdef u8* b = <u8*> malloc(w * sizeof(u8))
    cdef u8* tmp
    cdef Py_ssize_t i, t, j, cw, p
    cdef i64 code
    if a == NULL or b == NULL:
        free(a)
        free(b)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                memcpy(a, &cells[i, 0], w)
                cw = w
                for t in range(steps + 1):
                    p = pos - r * t
                    code = 0
                    for j in range(width):
                        code = code * k + a[p + j]
                    o[i, t] = code
                    if t < steps:
                        _step_row(table, k, r, a, b, cw)
                        cw -= 2 * r
                        tmp = a
                        a = b
                        b = tmp
    finally:
        free(a)
        free(b)
    return out


def column_match(const u8[::1] table, int k, int r, const u8[:, ::1] cells,
                 const u8[:, ::1] ref, int pos):
    """Rows whose word at ``pos - r*t`` equals ``ref[t]`` for every t; exits early per row."""
    cdef Py_ssize_t n = cells.shape[0], w = cells.shape[1]
    cdef Py_ssize_t steps = ref.shape[0] - 1, width = ref.shape[1]
    if steps < 0 or width < 1 or pos - r * steps < 0 or pos + width + r * steps > w:
        raise ValueError("reference column leaves the light cone of the window")
    out = np.zeros(n, dtype=np.uint8)
    cdef u8[::1] o = out
    cdef u8* a = <u8*> malloc(w * sizeof(u8))
    cdef u8* b = <u8*> malloc(w * sizeof(u8))
    cdef u8* tmp
    cdef Py_ssize_t i, t, j, p, lo, hi
    cdef bint ok
    if a == NULL or b == NULL:
        free(a)
        free(b)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                memcpy(a, &cells[i, 0], w)
                ok = True
                for t in range(steps + 1):
                    p = pos - r * t
                    for j in range(width):
                        if a[p + j] != ref[t, j]:
                            ok = False
                            break
                    if not ok or t == steps:
                        break
                    # only the cone still feeding later reference words is stepped;
                    # its left edge stays at pos - r*steps for every t
                    lo = p - r * (steps - t)
                    hi = p + width + r * (steps - t)
                    _step_row(table, k, r, a + lo, b + lo, hi - lo)
                    tmp = a
                    a = b
                    b = tmp
                o[i] = ok
    finally:
        free(a)
        free(b)
    return out.view(np.bool_)
