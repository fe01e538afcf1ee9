"""Rasterize one attribute record into an image and a symbol mask.

Placement semantics: the glyph outline is scaled so its larger bbox side
equals scale * min(H, W), rotated about its bbox center, then positioned
by the slack mapping: t = (0, 0) centers the glyph, |t| <= 1 spans the
margin that keeps it fully in frame, |t| > 1 pushes it past the border
proportionally, cropping it. The mask stores pre-occlusion glyph
coverage; occluders are distractors, not label changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attributes import Bernoulli, Choice, Constant, Dist, SymbolAttributes, Uniform
from .fonts import FontCatalog
from .patterns import Camouflage, PatternSpec, Solid, fill_camouflage, paint, palette_colors
from .raster import coverage_to_mask, fill_coverage, fill_edges
from .rng import substream

# mask >= this value counts as a symbol pixel everywhere in the pipeline
MASK_THRESHOLD = 128

# built-in occluder shapes; any other codepoint resolves through the font
_CIRCLE, _SQUARE, _TRIANGLE = "●", "■", "▲"
DEFAULT_OCCLUDER_SHAPES = (_CIRCLE, _SQUARE, _TRIANGLE)


@dataclass(frozen=True)
class OccluderSpec:
    """Distractor shapes drawn over the finished symbol."""

    shapes: tuple[str, ...] = DEFAULT_OCCLUDER_SHAPES
    count: Dist = field(default_factory=lambda: Constant(0))
    scale: Dist = field(default_factory=lambda: Uniform(0.3, 0.6))
    translation: Dist = field(default_factory=lambda: Uniform(-1.0, 1.0, size=2))
    color_palette: str = "uniform-hsv"


@dataclass(frozen=True)
class OccluderInstance:
    shape: str
    scale: float
    translation: tuple[float, float]
    color: tuple[float, float, float]
    overlap_fraction: float  # of the symbol mask this occluder covers

    def to_record(self) -> dict:
        return {
            "shape": self.shape,
            "scale": self.scale,
            "translation": list(self.translation),
            "color": list(self.color),
            "overlap_fraction": self.overlap_fraction,
        }


@dataclass(frozen=True)
class RenderedSample:
    image: np.ndarray  # H x W x 3 uint8
    mask: np.ndarray  # H x W uint8, pre-occlusion coverage
    attributes: SymbolAttributes
    occluders: tuple[OccluderInstance, ...] = ()


def translation_to_pixels(t: tuple[float, float], bbox_wh: tuple[float, float],
                          frame_wh: tuple[float, float]) -> tuple[float, float]:
    """Slack mapping from unitless translation to a top-left placement.

    Per axis: position = slack * (1 + t) where slack = (frame - bbox) / 2,
    so t in [-1, 1] linearly spans the fully-visible range.
    """
    slack_x = (frame_wh[0] - bbox_wh[0]) / 2.0
    slack_y = (frame_wh[1] - bbox_wh[1]) / 2.0
    return (slack_x * (1.0 + t[0]), slack_y * (1.0 + t[1]))


def _builtin_shape_contours(shape: str) -> list[np.ndarray]:
    """Unit-box outlines (y down) for the built-in occluder shapes."""
    if shape == _SQUARE:
        return [np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=np.float64)]
    if shape == _TRIANGLE:
        return [np.array([[0.5, 0.0], [1.0, 1.0], [0.0, 1.0]], dtype=np.float64)]
    if shape == _CIRCLE:
        a = np.linspace(0.0, 2.0 * math.pi, 33)[:-1]
        return [np.stack([0.5 + 0.5 * np.cos(a), 0.5 + 0.5 * np.sin(a)], axis=1)]
    raise KeyError(shape)


def _glyph_edges_px(catalog: FontCatalog, attrs: SymbolAttributes) -> np.ndarray:
    """Transform the glyph outline into frame pixel edge segments."""
    h, w = attrs.resolution
    outline = catalog.glyph_outline(attrs.font, attrs.char, attrs.bold, attrs.italic)
    xmin, ymin, xmax, ymax = outline.bbox
    gw, gh = xmax - xmin, ymax - ymin
    target = attrs.scale * min(h, w)
    s = target / max(gw, gh)

    # font units (y up) -> pixel units (y down), glyph bbox center at origin
    cx, cy = (xmin + xmax) / 2.0, (ymin + ymax) / 2.0
    cos_r, sin_r = math.cos(attrs.rotation), math.sin(attrs.rotation)
    pts, succ = outline.packed
    x = (pts[:, 0] - cx) * s
    y = -(pts[:, 1] - cy) * s
    xr = x * cos_r - y * sin_r
    yr = x * sin_r + y * cos_r

    lo = (xr.min(), yr.min())
    bbox_wh = (xr.max() - lo[0], yr.max() - lo[1])
    left, top = translation_to_pixels(attrs.translation, bbox_wh, (w, h))
    xr += left - lo[0]
    yr += top - lo[1]
    placed = np.stack([xr, yr], axis=1)
    return np.concatenate([placed, placed[succ]], axis=1)


def render_coverage(catalog: FontCatalog, attrs: SymbolAttributes) -> np.ndarray:
    """Anti-aliased glyph coverage in [0, 1] at the record's resolution."""
    attrs.validate()
    if attrs.omitted:
        return np.zeros(attrs.resolution, dtype=np.float32)
    edges = _glyph_edges_px(catalog, attrs)
    return fill_edges(edges, attrs.resolution)


def _paint_pattern(spec: PatternSpec, shape, master_seed, index, slot: str) -> np.ndarray:
    rng = substream(master_seed, index, slot) if isinstance(spec, Camouflage) else None
    return paint(spec, shape, rng)


def draw_occluders(image: np.ndarray, spec: OccluderSpec, mask: np.ndarray,
                   rng: np.random.Generator,
                   catalog: FontCatalog | None = None,
                   font_id: str | None = None) -> tuple[np.ndarray, tuple[OccluderInstance, ...]]:
    """Draw sampled occluders over a float image.

    Returns the painted image and the occluder list with, per occluder,
    the fraction of the symbol mask it covers.
    """
    h, w = image.shape[:2]
    n = int(spec.count.sample(rng))
    if n <= 0:
        return image, ()
    sym = mask >= MASK_THRESHOLD
    sym_area = int(sym.sum())
    out = image
    instances = []
    for _ in range(n):
        shape = spec.shapes[int(rng.integers(0, len(spec.shapes)))]
        scale = float(spec.scale.sample(rng))
        t = tuple(float(v) for v in np.atleast_1d(spec.translation.sample(rng)))
        color = tuple(float(c) for c in palette_colors(spec.color_palette, 1, rng)[0])

        if shape in DEFAULT_OCCLUDER_SHAPES:
            unit = _builtin_shape_contours(shape)
        else:
            if catalog is None or font_id is None:
                raise ValueError("non-builtin occluder shapes need a catalog and font")
            outline = catalog.glyph_outline(font_id, shape)
            xmin, ymin, xmax, ymax = outline.bbox
            span = max(xmax - xmin, ymax - ymin)
            unit = [
                np.stack(
                    [(p[:, 0] - xmin) / span, (ymax - p[:, 1]) / span], axis=1
                )
                for p in outline.contours
            ]
        upts = np.concatenate(unit, axis=0)
        uw, uh = upts[:, 0].max() - upts[:, 0].min(), upts[:, 1].max() - upts[:, 1].min()
        size = scale * min(h, w)
        sx = size / max(uw, uh)
        bw, bh = uw * sx, uh * sx
        left, top = translation_to_pixels(t, (bw, bh), (w, h))
        polys = [np.stack([p[:, 0] * sx + left, p[:, 1] * sx + top], axis=1) for p in unit]
        cov = fill_coverage(polys, (h, w))
        out = out * (1.0 - cov[..., None]) + np.asarray(color) * cov[..., None]
        overlap = float((sym & (cov >= 0.5)).sum() / sym_area) if sym_area else 0.0
        instances.append(
            OccluderInstance(shape=shape, scale=scale, translation=t, color=color,
                             overlap_fraction=overlap)
        )
    return out, tuple(instances)


def render_float(catalog: FontCatalog, attrs: SymbolAttributes,
                 occluders: OccluderSpec | None = None,
                 master_seed: int = 0, index: int = 0,
                 ) -> tuple[np.ndarray, np.ndarray, tuple[OccluderInstance, ...]]:
    """Float-image render stage: background, glyph, occluders.

    Returns (image float HxWx3 in [0,1], mask uint8, occluder instances).
    Texture and occluder randomness comes from substreams of
    (master_seed, index), one slot per consumer.
    """
    h, w = attrs.resolution
    image = _paint_pattern(attrs.background, (h, w), master_seed, index, "tex:background")
    coverage = render_coverage(catalog, attrs)
    mask = coverage_to_mask(coverage)

    if not attrs.omitted:
        fg = attrs.foreground
        if isinstance(fg, Camouflage):
            image = fill_camouflage(image, coverage, fg, substream(master_seed, index, "tex:foreground"))
        else:
            layer = paint(fg, (h, w))
            alpha = coverage[..., None]
            image = image * (1.0 - alpha) + layer * alpha

    instances: tuple[OccluderInstance, ...] = ()
    if occluders is not None:
        rng = substream(master_seed, index, "occluders")
        image, instances = draw_occluders(image, occluders, mask, rng, catalog, attrs.font)
    return image, mask, instances


def quantize(image: np.ndarray) -> np.ndarray:
    """Final 8-bit quantization of a float image."""
    return np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)


def render(catalog: FontCatalog, attrs: SymbolAttributes,
           occluders: OccluderSpec | None = None,
           master_seed: int = 0, index: int = 0) -> RenderedSample:
    """Render one record to an 8-bit sample."""
    image, mask, instances = render_float(catalog, attrs, occluders, master_seed, index)
    return RenderedSample(image=quantize(image), mask=mask, attributes=attrs, occluders=instances)
