"""Compiled per-row kernels for the hot paths.

Every kernel is sequential and releases the GIL, so the codec can fan chunks
out across a thread pool while keeping results identical to sequential
evaluation (rows never interact). All intermediate arithmetic is binary64;
only the stored angles and reconstructed coordinates are float32.
"""

import math

import numba as nb
import numpy as np

_TILE = 64  # rows per tile in the byte shuffle, keeps column walks cache-resident


@nb.njit(nogil=True, cache=True)
def row_norms(x):
    """Euclidean norm of every row, accumulated left to right in binary64."""
    n, d = x.shape
    out = np.empty(n, np.float64)
    for r in range(n):
        acc = 0.0
        for j in range(d):
            v = np.float64(x[r, j])
            acc += v * v
        out[r] = math.sqrt(acc)
    return out


@nb.njit(nogil=True, cache=True)
def renormalize_rows(x, norms, out):
    n, d = x.shape
    for r in range(n):
        nr = norms[r]
        for j in range(d):
            out[r, j] = np.float32(np.float64(x[r, j]) / nr)


@nb.njit(nogil=True, cache=True)
def spherical_forward(x, out):
    """Angles from coordinates.

    Partial squared norms follow the backward recurrence r2_i = r2_{i+1} + x_i^2.
    The arccos argument is clamped to [-1, 1] to absorb binary64 rounding; an
    exhausted tail (r2 == 0) maps to pi/2 so the value stays in the concentrated
    exponent bucket, and the last angle keeps quadrant information via atan2
    (atan2(0, 0) == 0 by convention).
    """
    n, d = x.shape
    half_pi = np.float32(np.pi / 2)
    for r in range(n):
        xe = np.float64(x[r, d - 1])
        xs = np.float64(x[r, d - 2])
        out[r, d - 2] = np.float32(math.atan2(xe, xs))
        r2 = xe * xe + xs * xs
        for i in range(d - 3, -1, -1):
            xi = np.float64(x[r, i])
            r2 += xi * xi
            if r2 > 0.0:
                q = xi / math.sqrt(r2)
                if q > 1.0:
                    q = 1.0
                elif q < -1.0:
                    q = -1.0
                out[r, i] = np.float32(math.acos(q))
            else:
                out[r, i] = half_pi
    return out


@nb.njit(nogil=True, cache=True)
def spherical_inverse(theta, out):
    """Coordinates from angles via the running sine product."""
    n, dm1 = theta.shape
    d = dm1 + 1
    for r in range(n):
        s = 1.0
        for i in range(d - 2):
            t = np.float64(theta[r, i])
            out[r, i] = np.float32(s * math.cos(t))
            s *= math.sin(t)
        t = np.float64(theta[r, d - 2])
        out[r, d - 2] = np.float32(s * math.cos(t))
        out[r, d - 1] = np.float32(s * math.sin(t))
    return out


@nb.njit(nogil=True, cache=True)
def shuffle_bytes(v, out):
    """(m, w) uint32 values -> byte planes over column-major value order.

    out[p*w*m + i*m + j] = byte p (little-endian) of v[j, i].
    """
    m, w = v.shape
    wm = w * m
    for j0 in range(0, m, _TILE):
        j1 = min(j0 + _TILE, m)
        for i in range(w):
            base = i * m
            for j in range(j0, j1):
                u = v[j, i]
                out[base + j] = np.uint8(u & np.uint32(0xFF))
                out[wm + base + j] = np.uint8((u >> np.uint32(8)) & np.uint32(0xFF))
                out[2 * wm + base + j] = np.uint8((u >> np.uint32(16)) & np.uint32(0xFF))
                out[3 * wm + base + j] = np.uint8(u >> np.uint32(24))


@nb.njit(nogil=True, cache=True)
def unshuffle_bytes(b, m, w, out):
    """Exact inverse of shuffle_bytes."""
    wm = w * m
    for j0 in range(0, m, _TILE):
        j1 = min(j0 + _TILE, m)
        for i in range(w):
            base = i * m
            for j in range(j0, j1):
                out[j, i] = (
                    np.uint32(b[base + j])
                    | (np.uint32(b[wm + base + j]) << np.uint32(8))
                    | (np.uint32(b[2 * wm + base + j]) << np.uint32(16))
                    | (np.uint32(b[3 * wm + base + j]) << np.uint32(24))
                )
