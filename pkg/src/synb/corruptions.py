"""Per-sample noise transforms for the active-learning dataset variants.

Each corruption draws from its own substream, so toggling one on or off
leaves every untouched field of every sample byte-identical. The clean
label always survives alongside the noisy one.

The "cropped" variant is not a transform here: it is the attribute
override translation ~ U(-2, 2)^2, composed through the sampler.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .attributes import SymbolAttributes
from .rng import substream

SLOT_LABEL = "corrupt:label"
SLOT_PIXEL = "corrupt:pixel"
SLOT_OMIT = "corrupt:omit"
SLOT_OCCLUDE = "corrupt:occlude"


@dataclass(frozen=True)
class CorruptionSpec:
    label_noise_p: float = 0.0
    pixel_noise_p: float = 0.0  # probability a given image gets noised
    pixel_noise_sigma: float = 0.0  # std in normalized intensity
    missing_p: float = 0.0
    occlusion_p: float = 0.0  # chance of one large occluding shape

    def __post_init__(self):
        for name in ("label_noise_p", "pixel_noise_p", "missing_p", "occlusion_p"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a probability, got {v}")
        if self.pixel_noise_sigma < 0:
            raise ValueError("pixel_noise_sigma must be >= 0")

    @property
    def active(self) -> bool:
        return any(
            (self.label_noise_p, self.pixel_noise_p, self.missing_p, self.occlusion_p)
        )


def corrupt_label(true_label: int, n_classes: int, p: float, rng: np.random.Generator) -> int:
    """With probability p, a label uniform over all classes (true one included).

    The effective flip rate is p * (n_classes - 1) / n_classes.
    """
    if n_classes < 2:
        raise ValueError("need at least 2 classes")
    if p > 0 and rng.random() < p:
        return int(rng.integers(0, n_classes))
    return int(true_label)


def corrupt_pixels(image: np.ndarray, p_image: float, sigma: float,
                   rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    """Add N(0, sigma) per pixel per channel to a [0, 1] float image.

    Applied with probability p_image; the returned flag records whether
    noise was applied. Output stays clamped to [0, 1].
    """
    if p_image <= 0 or sigma < 0:
        return image, False
    if rng.random() >= p_image:
        return image, False
    if sigma == 0:
        return image, True
    noisy = image + rng.normal(0.0, sigma, size=image.shape)
    return np.clip(noisy, 0.0, 1.0), True


def omit_symbol(attrs: SymbolAttributes, p: float, rng: np.random.Generator) -> SymbolAttributes:
    """With probability p, mark the record to render background only.

    The label and every other attribute stay unchanged; the mask of an
    omitted sample is empty.
    """
    if p > 0 and rng.random() < p:
        return replace(attrs, omitted=True)
    return attrs


def label_rng(master_seed: int, index: int) -> np.random.Generator:
    return substream(master_seed, index, SLOT_LABEL)


def pixel_rng(master_seed: int, index: int) -> np.random.Generator:
    return substream(master_seed, index, SLOT_PIXEL)


def omit_rng(master_seed: int, index: int) -> np.random.Generator:
    return substream(master_seed, index, SLOT_OMIT)


def occlude_rng(master_seed: int, index: int) -> np.random.Generator:
    return substream(master_seed, index, SLOT_OCCLUDE)
