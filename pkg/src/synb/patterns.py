"""Texture specs and painting: solid fills, gradient shades, camouflage.

All painting happens in float RGB [0, 1]; 8-bit quantization is the
caller's last step. Camouflage paints parallel strokes whose colors are
drawn i.i.d. from a palette; foreground and background of one image
share the palette and differ only in stroke orientation, which makes
texture orientation the only cue separating symbol from backdrop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

# reference frame dimension the camouflage stroke defaults are stated at
CAMO_REF_DIM = 32
CAMO_DEFAULT_WIDTH = 2.0
CAMO_DEFAULT_COUNT = 40
# minimum fg/bg orientation separation for a camouflage pair
CAMO_MIN_SEPARATION = math.pi / 6


@dataclass(frozen=True)
class Solid:
    color: tuple[float, float, float]
    kind = "solid"


@dataclass(frozen=True)
class Gradient:
    mode: str  # "linear" | "radial"
    stops: tuple[tuple[float, float, float], ...]
    angle: float = 0.0  # linear direction in radians
    center: tuple[float, float] = (0.5, 0.5)  # radial center, unit frame coords

    kind = "gradient"

    def __post_init__(self):
        if self.mode not in ("linear", "radial"):
            raise ValueError(f"bad gradient mode: {self.mode!r}")
        if len(self.stops) < 2:
            raise ValueError("gradient needs at least 2 stops")


@dataclass(frozen=True)
class Camouflage:
    orientation: float  # [0, pi)
    palette: str = "uniform-hsv"
    line_width: float = CAMO_DEFAULT_WIDTH  # px at the reference dimension
    line_count: int = CAMO_DEFAULT_COUNT  # at the reference dimension

    kind = "camouflage"

    def __post_init__(self):
        if not 0.0 <= self.orientation < math.pi:
            raise ValueError("camouflage orientation must be in [0, pi)")


PatternSpec = Solid | Gradient | Camouflage


def pattern_to_jsonable(spec: PatternSpec) -> dict:
    if isinstance(spec, Solid):
        return {"kind": "solid", "color": list(spec.color)}
    if isinstance(spec, Gradient):
        return {
            "kind": "gradient",
            "mode": spec.mode,
            "stops": [list(s) for s in spec.stops],
            "angle": spec.angle,
            "center": list(spec.center),
        }
    if isinstance(spec, Camouflage):
        return {
            "kind": "camouflage",
            "orientation": spec.orientation,
            "palette": spec.palette,
            "line_width": spec.line_width,
            "line_count": spec.line_count,
        }
    raise TypeError(f"not a pattern spec: {spec!r}")


def pattern_from_jsonable(obj: dict) -> PatternSpec:
    kind = obj["kind"]
    if kind == "solid":
        return Solid(color=tuple(obj["color"]))
    if kind == "gradient":
        return Gradient(
            mode=obj["mode"],
            stops=tuple(tuple(s) for s in obj["stops"]),
            angle=obj["angle"],
            center=tuple(obj["center"]),
        )
    if kind == "camouflage":
        return Camouflage(
            orientation=obj["orientation"],
            palette=obj["palette"],
            line_width=obj["line_width"],
            line_count=obj["line_count"],
        )
    raise ValueError(f"unknown pattern kind: {kind!r}")


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    """Vectorized HSV -> RGB on the last axis, all components in [0, 1]."""
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0).astype(int) % 6
    f = h * 6.0 - np.floor(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - f * s)
    t = v * (1.0 - (1.0 - f) * s)
    table = np.stack(
        [
            np.stack([v, t, p], axis=-1),
            np.stack([q, v, p], axis=-1),
            np.stack([p, v, t], axis=-1),
            np.stack([p, q, v], axis=-1),
            np.stack([t, p, v], axis=-1),
            np.stack([v, p, q], axis=-1),
        ],
        axis=0,
    )
    return np.take_along_axis(table, i[None, ..., None], axis=0)[0]


def palette_colors(palette: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. colors from a named palette; shape (n, 3)."""
    if palette == "uniform-hsv":
        hsv = rng.random((n, 3))
        return hsv_to_rgb(hsv)
    if palette.startswith("single:"):
        hexval = palette.split(":", 1)[1]
        rgb = tuple(int(hexval[i : i + 2], 16) / 255.0 for i in (0, 2, 4))
        return np.tile(np.asarray(rgb), (n, 1))
    raise ValueError(f"unknown palette: {palette!r}")


def sample_shades(rng: np.random.Generator, value_lo: float = 0.3, value_hi: float = 1.0) -> Gradient:
    """Default texture: a 2-stop linear gradient with a random angle."""
    angle = float(rng.uniform(0.0, 2.0 * math.pi))
    hsv = rng.random((2, 3))
    hsv[:, 2] = value_lo + hsv[:, 2] * (value_hi - value_lo)
    stops = tuple(tuple(float(c) for c in row) for row in hsv_to_rgb(hsv))
    return Gradient(mode="linear", stops=stops, angle=angle)


def _pixel_grid(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    h, w = shape
    ys = np.arange(h, dtype=np.float64) + 0.5
    xs = np.arange(w, dtype=np.float64) + 0.5
    return np.meshgrid(xs, ys)  # X, Y


def paint(spec: PatternSpec, shape: tuple[int, int], rng: np.random.Generator | None = None) -> np.ndarray:
    """Paint a full frame with a pattern; returns float (H, W, 3).

    Camouflage consumes the rng for stroke placement and colors; solid
    and gradient ignore it.
    """
    h, w = shape
    if isinstance(spec, Solid):
        return np.broadcast_to(np.asarray(spec.color, dtype=np.float64), (h, w, 3)).copy()
    if isinstance(spec, Gradient):
        X, Y = _pixel_grid(shape)
        if spec.mode == "linear":
            d = (math.cos(spec.angle), math.sin(spec.angle))
            t = X * d[0] + Y * d[1]
        else:
            cx, cy = spec.center[0] * w, spec.center[1] * h
            t = np.hypot(X - cx, Y - cy)
        lo, hi = float(t.min()), float(t.max())
        t = (t - lo) / (hi - lo) if hi > lo else np.zeros_like(t)
        pos = np.linspace(0.0, 1.0, len(spec.stops))
        stops = np.asarray(spec.stops, dtype=np.float64)
        out = np.empty((h, w, 3))
        for c in range(3):
            out[..., c] = np.interp(t, pos, stops[:, c])
        return out
    if isinstance(spec, Camouflage):
        if rng is None:
            raise ValueError("camouflage painting needs an rng substream")
        return _camouflage_layer(spec, shape, rng)
    raise TypeError(f"not a pattern spec: {spec!r}")


def _camouflage_layer(spec: Camouflage, shape: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    h, w = shape
    ref = min(h, w) / CAMO_REF_DIM
    width = spec.line_width * ref
    count = max(int(math.ceil(spec.line_count * ref)), 1)

    # strokes run along (cos o, sin o); offsets measured along the normal
    nx, ny = -math.sin(spec.orientation), math.cos(spec.orientation)
    corners = np.array([[0, 0], [w, 0], [0, h], [w, h]], dtype=np.float64)
    proj = corners[:, 0] * nx + corners[:, 1] * ny
    lo, hi = proj.min() - width, proj.max() + width

    # stratified offsets guarantee coverage; jitter keeps them random
    spacing = (hi - lo) / count
    offsets = lo + (np.arange(count) + 0.5) * spacing + rng.uniform(-0.5, 0.5, count) * spacing
    colors = palette_colors(spec.palette, count, rng)
    base = palette_colors(spec.palette, 1, rng)[0]

    X, Y = _pixel_grid(shape)
    pix = X * nx + Y * ny
    out = np.broadcast_to(base, (h, w, 3)).copy()
    half = width / 2.0
    for off, color in zip(offsets, colors):
        # 1-px linear ramp at stroke borders for anti-aliasing
        alpha = np.clip(half + 0.5 - np.abs(pix - off), 0.0, 1.0)
        out = out * (1.0 - alpha[..., None]) + color * alpha[..., None]
    return out


def fill_camouflage(image: np.ndarray, region: np.ndarray, spec: Camouflage,
                    rng: np.random.Generator) -> np.ndarray:
    """Composite camouflage strokes into a region of a float image.

    region is a coverage map in [0, 1]; a zero-area region is a no-op.
    Returns a new image.
    """
    if not (region > 0).any():
        return image.copy()
    layer = _camouflage_layer(spec, image.shape[:2], rng)
    alpha = np.clip(region, 0.0, 1.0)[..., None]
    return image * (1.0 - alpha) + layer * alpha


def camouflage_pair(base: Camouflage, fg_orientation_offset: float = math.pi / 2) -> Camouflage:
    """Foreground spec paired to a background spec: same palette, rotated."""
    return replace(base, orientation=(base.orientation + fg_orientation_offset) % math.pi)
