"""Multi-symbol counting scenes with per-instance masks and overlap flags.

A scene samples a symbol count, then per-instance (char, font, scale,
rotation, position) tuples, and renders every instance onto a shared
background in index z-order. Instance masks are computed pre-composite
and unclipped, so overlap detection and point annotations see each
symbol in full. Two symbols overlap when their masks share at least one
symbol pixel (mask >= 128).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attributes import Choice, Constant, Dist, Shades, TruncNormal
from .fonts import Alphabet, FontCatalog
from .patterns import paint
from .raster import coverage_to_mask, fill_edges
from .render import MASK_THRESHOLD, quantize
from .rng import substream

MAX_PLACEMENT_RETRIES = 1000


class SceneCompositionError(RuntimeError):
    """The overlap policy could not be satisfied within the retry budget."""


@dataclass(frozen=True)
class LogNormalScale:
    """scale = base * exp(factor * eps), eps ~ N(0, 1)."""

    base: float = 0.1
    factor: float = 0.5

    def sample(self, rng):
        return float(self.base * math.exp(self.factor * rng.standard_normal()))


@dataclass(frozen=True)
class SceneSpec:
    alphabet: Alphabet
    resolution: tuple[int, int] = (128, 128)
    count_range: tuple[int, int] = (3, 10)  # integer uniform, inclusive
    target_char: str = "a"
    p_target: float = 0.7
    scale: Dist = field(default_factory=lambda: LogNormalScale())
    rotation: Dist = field(default_factory=lambda: TruncNormal(0.0, 0.3, -math.pi / 3, math.pi / 3))
    overlap_policy: str = "allow"  # allow | reject-overlapping | require-overlapping
    background: Dist = field(default_factory=Shades)
    foreground: Dist = field(default_factory=Shades)

    def __post_init__(self):
        if self.count_range[0] < 1 or self.count_range[1] < self.count_range[0]:
            raise ValueError("count range needs 1 <= lo <= hi")
        if not 0.0 <= self.p_target <= 1.0:
            raise ValueError("p_target must be a probability")
        if self.overlap_policy not in ("allow", "reject-overlapping", "require-overlapping"):
            raise ValueError(f"unknown overlap policy: {self.overlap_policy!r}")


@dataclass(frozen=True)
class ScenePlan:
    n: int
    chars: tuple[str, ...]
    fonts: tuple[str, ...]
    scales: tuple[float, ...]
    rotations: tuple[float, ...]
    positions: tuple[tuple[float, float], ...]  # instance centers, px
    attempts: int

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "chars": list(self.chars),
            "fonts": list(self.fonts),
            "scales": list(self.scales),
            "rotations": list(self.rotations),
            "positions": [list(p) for p in self.positions],
            "placement_attempts": self.attempts,
        }


@dataclass(frozen=True)
class SceneSample:
    image: np.ndarray  # H x W x 3 uint8
    instance_masks: np.ndarray  # n x H x W uint8, pre-composite, unclipped
    labels: tuple[str, ...]  # per-instance codepoint
    points: np.ndarray  # n x 2 (row, col) point annotations
    target_count: int
    overlap_flag: bool
    plan: ScenePlan


def _sample_char(spec: SceneSpec, rng) -> str:
    if rng.random() < spec.p_target:
        return spec.target_char
    others = [c for c in spec.alphabet.codepoints if c != spec.target_char]
    return others[int(rng.integers(0, len(others)))]


def _instance_geometry(catalog: FontCatalog, char: str, font: str, scale: float,
                       rotation: float, frame: tuple[int, int]):
    """Rotated, scaled glyph points centered at the origin, plus bbox."""
    h, w = frame
    outline = catalog.glyph_outline(font, char)
    xmin, ymin, xmax, ymax = outline.bbox
    s = scale * min(h, w) / max(xmax - xmin, ymax - ymin)
    cx, cy = (xmin + xmax) / 2.0, (ymin + ymax) / 2.0
    cos_r, sin_r = math.cos(rotation), math.sin(rotation)
    pts, succ = outline.packed
    x = (pts[:, 0] - cx) * s
    y = -(pts[:, 1] - cy) * s
    xr = x * cos_r - y * sin_r
    yr = x * sin_r + y * cos_r
    placed = np.stack([xr, yr], axis=1)
    lo = placed.min(axis=0)
    hi = placed.max(axis=0)
    center_offset = (lo + hi) / 2.0  # bbox center relative to origin
    return placed - center_offset, succ, (hi - lo)


def _mask_for(points: np.ndarray, succ: np.ndarray, center: tuple[float, float],
              frame: tuple[int, int]) -> np.ndarray:
    placed = points + np.asarray(center)
    edges = np.concatenate([placed, placed[succ]], axis=1)
    return fill_edges(edges, frame)


def plan_scene(catalog: FontCatalog, spec: SceneSpec, master_seed: int, index: int,
               _geometry_cache: dict | None = None) -> ScenePlan:
    """Sample one scene's instances and placements (no pixels painted).

    Placement draws centers uniformly over the frame inset by half the
    instance bbox, so symbols float fully inside; the overlap policy is
    enforced by rejection resampling of the whole position set.
    """
    h, w = spec.resolution
    lo, hi = spec.count_range
    n = int(substream(master_seed, index, "scene:count").integers(lo, hi + 1))

    chars, fonts, scales, rotations = [], [], [], []
    for i in range(n):
        chars.append(_sample_char(spec, substream(master_seed, index, "scene:char", i)))
        fonts.append(
            spec.alphabet.fonts[
                int(substream(master_seed, index, "scene:font", i).integers(0, len(spec.alphabet.fonts)))
            ]
        )
        scales.append(float(spec.scale.sample(substream(master_seed, index, "scene:scale", i))))
        rotations.append(float(spec.rotation.sample(substream(master_seed, index, "scene:rotation", i))))

    cache = _geometry_cache if _geometry_cache is not None else {}
    geoms = []
    for i in range(n):
        key = (chars[i], fonts[i], round(scales[i], 12), round(rotations[i], 12))
        if key not in cache:
            cache[key] = _instance_geometry(catalog, chars[i], fonts[i], scales[i], rotations[i], (h, w))
        geoms.append(cache[key])

    pos_rng = substream(master_seed, index, "scene:positions")
    positions = None
    attempts = 0
    for attempts in range(1, MAX_PLACEMENT_RETRIES + 1):
        cand = []
        for _, _, bbox_wh in geoms:
            half_w, half_h = bbox_wh[0] / 2.0, bbox_wh[1] / 2.0
            # oversized instances (lognormal tail) pin to the frame center
            cx = pos_rng.uniform(half_w, w - half_w) if half_w * 2 < w else w / 2.0
            cy = pos_rng.uniform(half_h, h - half_h) if half_h * 2 < h else h / 2.0
            cand.append((float(cx), float(cy)))
        if spec.overlap_policy == "allow":
            positions = cand
            break
        overlapping = _any_overlap(geoms, cand, (h, w))
        if spec.overlap_policy == "reject-overlapping" and not overlapping:
            positions = cand
            break
        if spec.overlap_policy == "require-overlapping" and (overlapping or n == 1):
            positions = cand
            break
    if positions is None:
        raise SceneCompositionError(
            f"overlap policy {spec.overlap_policy!r} unsatisfied after "
            f"{MAX_PLACEMENT_RETRIES} retries (scene index {index}, n={n})"
        )
    return ScenePlan(
        n=n,
        chars=tuple(chars),
        fonts=tuple(fonts),
        scales=tuple(scales),
        rotations=tuple(rotations),
        positions=tuple(positions),
        attempts=attempts,
    )


def _any_overlap(geoms, centers, frame) -> bool:
    masks = [
        _mask_for(pts, succ, c, frame) >= MASK_THRESHOLD / 255.0
        for (pts, succ, _), c in zip(geoms, centers)
    ]
    count = np.zeros(frame, dtype=np.int16)
    for m in masks:
        count += m
    return bool((count >= 2).any())


def _point_annotation(mask: np.ndarray) -> tuple[int, int]:
    """Mask centroid snapped to the nearest symbol pixel."""
    rows, cols = np.nonzero(mask >= MASK_THRESHOLD)
    if len(rows) == 0:
        return (0, 0)
    cr, cc = rows.mean(), cols.mean()
    k = int(np.argmin((rows - cr) ** 2 + (cols - cc) ** 2))
    return (int(rows[k]), int(cols[k]))


def compose_scene(catalog: FontCatalog, spec: SceneSpec, master_seed: int, index: int,
                  _geometry_cache: dict | None = None) -> SceneSample:
    """Render one scene deterministically from (spec, master_seed, index)."""
    h, w = spec.resolution
    plan = plan_scene(catalog, spec, master_seed, index, _geometry_cache)

    cache = _geometry_cache if _geometry_cache is not None else {}
    coverages = []
    for i in range(plan.n):
        key = (plan.chars[i], plan.fonts[i], round(plan.scales[i], 12), round(plan.rotations[i], 12))
        if key not in cache:
            cache[key] = _instance_geometry(
                catalog, plan.chars[i], plan.fonts[i], plan.scales[i], plan.rotations[i], (h, w)
            )
        pts, succ, _ = cache[key]
        coverages.append(_mask_for(pts, succ, plan.positions[i], (h, w)))

    bg = spec.background.sample(substream(master_seed, index, "scene:bg"))
    image = paint(bg, (h, w), substream(master_seed, index, "scene:bg:paint"))
    for i, cov in enumerate(coverages):
        fg = spec.foreground.sample(substream(master_seed, index, "scene:fg", i))
        layer = paint(fg, (h, w), substream(master_seed, index, "scene:fg:paint", i))
        alpha = cov[..., None]
        image = image * (1.0 - alpha) + layer * alpha

    masks = np.stack([coverage_to_mask(c) for c in coverages], axis=0)
    binary = masks >= MASK_THRESHOLD
    overlap = bool((binary.sum(axis=0) >= 2).any())
    points = np.array([_point_annotation(m) for m in masks], dtype=np.int32)
    target_count = sum(1 for c in plan.chars if c == spec.target_char)

    return SceneSample(
        image=quantize(image),
        instance_masks=masks,
        labels=plan.chars,
        points=points,
        target_count=target_count,
        overlap_flag=overlap,
        plan=plan,
    )


def instance_id_map(masks: np.ndarray) -> np.ndarray:
    """Flattened instance map: 0 = background, i = z-order index of
    instance i (1-based); overlapping pixels go to the topmost instance."""
    h, w = masks.shape[1:]
    ids = np.zeros((h, w), dtype=np.uint16)
    for i in range(masks.shape[0]):
        ids[masks[i] >= MASK_THRESHOLD] = i + 1
    return ids


def split_by_overlap(scenes) -> tuple[list, list]:
    """Partition scenes by their overlap flag; union is the input."""
    non_overlapping = [s for s in scenes if not s.overlap_flag]
    overlapping = [s for s in scenes if s.overlap_flag]
    return non_overlapping, overlapping


def scene_record(sample: SceneSample, spec: SceneSpec, recipe: str | None = None) -> dict:
    from . import __version__

    rec = {
        **sample.plan.to_record(),
        "target_char": spec.target_char,
        "target_count": sample.target_count,
        "overlap": sample.overlap_flag,
        "points": sample.points.tolist(),
        "resolution": list(spec.resolution),
        "version": __version__,
    }
    if recipe is not None:
        rec["recipe"] = recipe
    return rec
