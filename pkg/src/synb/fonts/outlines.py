"""Glyph outline extraction and style synthesis.

Outlines come out of TrueType/OpenType files as closed polygonal
contours in font units (y up), with curves flattened at a fixed
subdivision count so the same font file always yields the same
polygons. Fonts that lack a real bold or italic face get those styles
synthesized here: bold by stroking every edge with quads (which only
ever adds ink under the nonzero winding rule), italic by a fixed shear.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from fontTools.pens.basePen import BasePen

# Fixed subdivision counts keep flattening deterministic.
_QUAD_STEPS = 8
_CUBIC_STEPS = 12

# Synthesized styles: stroke width as a fraction of the glyph's larger
# bbox side, and the horizontal shear applied for italic.
SYNTH_BOLD_WIDTH = 0.08
SYNTH_ITALIC_SHEAR = 0.2


class MissingGlyphError(KeyError):
    """The font has no usable outline for the requested codepoint."""


@dataclass(frozen=True)
class GlyphOutline:
    """Closed contours (each an (N, 2) float array, y up) plus tight bbox."""

    contours: tuple[np.ndarray, ...]
    bbox: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax

    @property
    def width(self) -> float:
        return self.bbox[2] - self.bbox[0]

    @property
    def height(self) -> float:
        return self.bbox[3] - self.bbox[1]

    @cached_property
    def packed(self) -> tuple[np.ndarray, np.ndarray]:
        """All contour points stacked (N, 2) plus per-point successor index.

        edge i runs pts[i] -> pts[succ[i]]; contours stay closed via the
        wrap-around successors. Lets the rasterizer transform a glyph
        with a single matrix op regardless of contour count.
        """
        pts = np.concatenate(self.contours, axis=0)
        lens = np.array([len(c) for c in self.contours])
        ends = np.cumsum(lens)
        succ = np.arange(len(pts)) + 1
        succ[ends - 1] = ends - lens  # wrap each contour's last point to its first
        return pts, succ


def _bezier_points(pts: np.ndarray, steps: int) -> np.ndarray:
    """Evaluate a Bezier curve of any order at steps+1 parameters, drop t=0."""
    t = np.linspace(0.0, 1.0, steps + 1)
    work = np.repeat(pts[None, :, :], len(t), axis=0)  # (T, n, 2)
    tt = t[:, None, None]
    while work.shape[1] > 1:
        work = work[:, :-1] * (1 - tt) + work[:, 1:] * tt
    return work[1:, 0, :]


class FlattenPen(BasePen):
    """Records closed contours as polylines with fixed curve subdivision."""

    def __init__(self, glyph_set=None):
        super().__init__(glyph_set)
        self.contours: list[np.ndarray] = []
        self._current: list = []

    def _moveTo(self, pt):
        self._current = [np.asarray(pt, dtype=np.float64)]

    def _lineTo(self, pt):
        self._current.append(np.asarray(pt, dtype=np.float64))

    def _qCurveToOne(self, p1, p2):
        pts = np.asarray([self._getCurrentPoint(), p1, p2], dtype=np.float64)
        self._current.extend(_bezier_points(pts, _QUAD_STEPS))

    def _curveToOne(self, p1, p2, p3):
        pts = np.asarray([self._getCurrentPoint(), p1, p2, p3], dtype=np.float64)
        self._current.extend(_bezier_points(pts, _CUBIC_STEPS))

    def _closePath(self):
        if len(self._current) >= 3:
            poly = np.asarray(self._current, dtype=np.float64)
            # drop a duplicated closing point; closure is implicit
            if np.allclose(poly[0], poly[-1]):
                poly = poly[:-1]
            if len(poly) >= 3:
                self.contours.append(poly)
        self._current = []

    def _endPath(self):
        self._closePath()


def outline_from_contours(contours) -> GlyphOutline:
    contours = tuple(np.asarray(c, dtype=np.float64) for c in contours)
    if not contours:
        raise MissingGlyphError("empty outline")
    allpts = np.concatenate(contours, axis=0)
    bbox = (
        float(allpts[:, 0].min()),
        float(allpts[:, 1].min()),
        float(allpts[:, 0].max()),
        float(allpts[:, 1].max()),
    )
    return GlyphOutline(contours=contours, bbox=bbox)


def extract_outline(glyph_set, glyph_name: str) -> GlyphOutline:
    """Flatten one glyph from a fontTools glyph set.

    Raises MissingGlyphError when the glyph draws nothing (blank or
    degenerate outlines).
    """
    pen = FlattenPen(glyph_set)
    glyph_set[glyph_name].draw(pen)
    if not pen.contours:
        raise MissingGlyphError(f"glyph {glyph_name!r} has no contours")
    return outline_from_contours(pen.contours)


def _signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def synth_bold(outline: GlyphOutline, width_frac: float = SYNTH_BOLD_WIDTH) -> GlyphOutline:
    """Thicken a glyph by stroking every contour edge with quads.

    Every added quad is wound in the glyph's dominant outer direction so
    it adds to the winding count instead of cancelling it; holes shrink
    and strokes grow, as a real bold face would.
    """
    w = width_frac * max(outline.width, outline.height)
    if w <= 0:
        return outline
    dominant = -1.0 if sum(_signed_area(c) for c in outline.contours) < 0 else 1.0
    half = w / 2.0
    contours = list(outline.contours)
    for poly in outline.contours:
        p = poly
        q = np.roll(poly, -1, axis=0)
        d = q - p
        norm = np.hypot(d[:, 0], d[:, 1])
        keep = norm > 1e-9
        p, q, d, norm = p[keep], q[keep], d[keep], norm[keep]
        if len(p) == 0:
            continue
        n = np.stack([-d[:, 1], d[:, 0]], axis=1) / norm[:, None] * half
        for i in range(len(p)):
            quad = np.array([p[i] + n[i], q[i] + n[i], q[i] - n[i], p[i] - n[i]])
            if _signed_area(quad) * dominant < 0:
                quad = quad[::-1]
            contours.append(quad)
        # square caps at vertices fill the joins between edge quads
        for v in poly:
            sq = np.array(
                [
                    [v[0] - half, v[1] - half],
                    [v[0] + half, v[1] - half],
                    [v[0] + half, v[1] + half],
                    [v[0] - half, v[1] + half],
                ]
            )
            if _signed_area(sq) * dominant < 0:
                sq = sq[::-1]
            contours.append(sq)
    return outline_from_contours(contours)


def synth_italic(outline: GlyphOutline, shear: float = SYNTH_ITALIC_SHEAR) -> GlyphOutline:
    """Slant a glyph by shearing x with y (about the bbox bottom)."""
    y0 = outline.bbox[1]
    sheared = []
    for poly in outline.contours:
        out = poly.copy()
        out[:, 0] = poly[:, 0] + shear * (poly[:, 1] - y0)
        sheared.append(out)
    return outline_from_contours(sheared)
