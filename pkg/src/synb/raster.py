"""Scanline polygon rasterization with supersampled anti-aliasing.

Coverage is computed on a grid supersampled by a fixed factor in both
axes: each supersample row collects its edge crossings, the nonzero
winding rule turns crossings into inside runs, and runs are accumulated
with a difference array + cumulative sum. Box-averaging the supersample
grid yields the anti-aliased coverage. Everything is plain array math:
no GPU, no external rasterizer, bit-identical across runs.

Pixel coordinates: (0, 0) is the top-left corner of pixel (0, 0); pixel
(row, col) covers [col, col+1) x [row, row+1); y grows downward.
"""

from __future__ import annotations

import numpy as np

SUPERSAMPLE = 4


def polygon_edges(contours) -> np.ndarray:
    """Stack closed contours into an (E, 4) array of x0, y0, x1, y1 edges."""
    polys = [np.asarray(p, dtype=np.float64) for p in contours if len(p) >= 2]
    if not polys:
        return np.zeros((0, 4))
    pts = np.concatenate(polys, axis=0)
    lens = np.array([len(p) for p in polys])
    ends = np.cumsum(lens)
    succ = np.arange(len(pts)) + 1
    succ[ends - 1] = ends - lens
    return np.concatenate([pts, pts[succ]], axis=1)


def fill_coverage(contours, shape: tuple[int, int], supersample: int = SUPERSAMPLE) -> np.ndarray:
    """Anti-aliased coverage in [0, 1] of the nonzero-winding fill.

    contours: closed polygons in pixel coordinates (y down).
    shape: (height, width) of the target frame.
    """
    return fill_edges(polygon_edges(contours), shape, supersample)


def fill_edges(edges: np.ndarray, shape: tuple[int, int], supersample: int = SUPERSAMPLE) -> np.ndarray:
    """fill_coverage over a precomputed (E, 4) edge array."""
    h, w = shape
    ss = supersample
    if len(edges) == 0:
        return np.zeros((h, w), dtype=np.float32)
    cover = np.zeros((h * ss, w * ss), dtype=np.float32)

    x0, y0, x1, y1 = (edges[:, i] * ss for i in range(4))
    keep = y0 != y1  # horizontal edges never cross a scanline
    x0, y0, x1, y1 = x0[keep], y0[keep], x1[keep], y1[keep]
    if len(x0) == 0:
        return np.zeros((h, w), dtype=np.float32)
    empty = np.zeros((h, w), dtype=np.float32)

    # restrict to supersample rows the glyph can touch
    r_lo = max(int(np.floor(min(y0.min(), y1.min()) - 0.5)), 0)
    r_hi = min(int(np.ceil(max(y0.max(), y1.max()) + 0.5)), h * ss - 1)
    if r_hi < r_lo:
        return empty
    yc = np.arange(r_lo, r_hi + 1, dtype=np.float64) + 0.5  # row sample centers

    below0 = y0[None, :] <= yc[:, None]
    below1 = y1[None, :] <= yc[:, None]
    crosses = below0 != below1  # (R, E)
    if not crosses.any():
        return empty

    rows_i, edges_i = np.nonzero(crosses)
    t = (yc[rows_i] - y0[edges_i]) / (y1[edges_i] - y0[edges_i])
    xs = x0[edges_i] + t * (x1[edges_i] - x0[edges_i])
    winding = np.where(y1[edges_i] > y0[edges_i], 1, -1)

    order = np.lexsort((xs, rows_i))
    rows_i, xs, winding = rows_i[order], xs[order], winding[order]

    # Signed crossings of a closed contour set along any scanline sum to
    # zero (the half-open crossing rule keeps this exact), so the global
    # cumulative sum restarts from 0 at every row boundary by itself.
    cum = np.cumsum(winding)
    prev = cum - winding

    entering = (prev == 0) & (cum != 0)
    exiting = (prev != 0) & (cum == 0)
    xs_in, rows_in = xs[entering], rows_i[entering]
    xs_out = xs[exiting]

    wss = w * ss
    k0 = np.clip(np.ceil(xs_in - 0.5).astype(np.int64), 0, wss)
    k1 = np.clip(np.ceil(xs_out - 0.5).astype(np.int64), 0, wss)
    valid = k1 > k0
    k0, k1, rows_v = k0[valid], k1[valid], rows_in[valid]

    diff = np.zeros((r_hi - r_lo + 1, wss + 1), dtype=np.int32)
    np.add.at(diff, (rows_v, k0), 1)
    np.add.at(diff, (rows_v, k1), -1)
    inside = np.cumsum(diff[:, :-1], axis=1) > 0
    cover[r_lo : r_hi + 1, :] = inside

    # box-average the supersample grid down to frame resolution
    return cover.reshape(h, ss, w, ss).mean(axis=(1, 3))


def coverage_to_mask(coverage: np.ndarray) -> np.ndarray:
    """Quantize float coverage to the 8-bit mask convention (255 = full)."""
    return np.clip(np.rint(coverage * 255.0), 0, 255).astype(np.uint8)
