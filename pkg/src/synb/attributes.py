"""Latent attribute space: distributions, samplers, and records.

A sampler owns one distribution per attribute. Sampling a record is a
pure function of (sampler, master seed, index): each attribute draws
from its own substream, so overriding one attribute never shifts the
values of another, and records can be generated for any subset of
indices in any order with bit-identical results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping

import numpy as np

from . import __version__ as GENERATOR_VERSION
from .fonts import Alphabet
from .patterns import (
    Camouflage,
    Gradient,
    PatternSpec,
    Solid,
    camouflage_pair,
    pattern_from_jsonable,
    pattern_to_jsonable,
    sample_shades,
)
from .rng import substream

ATTRIBUTE_NAMES = (
    "char",
    "font",
    "translation",
    "scale",
    "rotation",
    "bold",
    "italic",
    "foreground",
    "background",
    "resolution",
)


class DistributionError(ValueError):
    """A distribution parameter is outside its attribute's domain."""


class SampleError(RuntimeError):
    """A caller-supplied generator function failed for one index."""


# -- distributions ---------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: Any

    def sample(self, rng):
        return self.value


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float
    size: int | None = None

    def __post_init__(self):
        if not self.hi >= self.lo:
            raise DistributionError(f"uniform needs hi >= lo, got [{self.lo}, {self.hi}]")

    def sample(self, rng):
        if self.size is None:
            return float(rng.uniform(self.lo, self.hi))
        return tuple(float(v) for v in rng.uniform(self.lo, self.hi, self.size))


@dataclass(frozen=True)
class LogUniform:
    """exp(U(ln lo, ln hi)); bounds are values of the variable itself."""

    lo: float
    hi: float

    def __post_init__(self):
        if not 0 < self.lo <= self.hi:
            raise DistributionError(f"loguniform needs 0 < lo <= hi, got [{self.lo}, {self.hi}]")

    def sample(self, rng):
        return float(math.exp(rng.uniform(math.log(self.lo), math.log(self.hi))))


@dataclass(frozen=True)
class TruncNormal:
    mean: float
    std: float
    lo: float
    hi: float

    def __post_init__(self):
        if self.std < 0 or self.hi < self.lo:
            raise DistributionError("bad truncated normal parameters")

    def sample(self, rng):
        if self.std == 0:
            return float(min(max(self.mean, self.lo), self.hi))
        while True:  # rejection; acceptance is ~2/3 at the default width
            v = rng.normal(self.mean, self.std)
            if self.lo <= v <= self.hi:
                return float(v)


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DistributionError(f"bernoulli p must be in [0, 1], got {self.p}")

    def sample(self, rng):
        return bool(rng.random() < self.p)


@dataclass(frozen=True)
class Choice:
    values: tuple

    def __post_init__(self):
        if not self.values:
            raise DistributionError("choice needs at least one value")

    def sample(self, rng):
        return self.values[int(rng.integers(0, len(self.values)))]


@dataclass(frozen=True)
class Shades:
    """Random 2-stop linear gradient, HSV colors with bounded value."""

    value_lo: float = 0.3
    value_hi: float = 1.0

    def sample(self, rng) -> Gradient:
        return sample_shades(rng, self.value_lo, self.value_hi)


@dataclass(frozen=True)
class CamouflageDist:
    """Camouflage spec with a uniform random stroke orientation."""

    palette: str = "uniform-hsv"
    line_width: float = 2.0
    line_count: int = 40

    def sample(self, rng) -> Camouflage:
        return Camouflage(
            orientation=float(rng.uniform(0.0, math.pi)),
            palette=self.palette,
            line_width=self.line_width,
            line_count=self.line_count,
        )


@dataclass(frozen=True)
class FuncDist:
    """Caller-supplied generator function of the rng. Not serializable."""

    fn: Callable[[np.random.Generator], Any]

    def sample(self, rng):
        return self.fn(rng)


Dist = (
    Constant | Uniform | LogUniform | TruncNormal | Bernoulli | Choice | Shades | CamouflageDist | FuncDist
)

_DIST_KINDS = {
    "constant": Constant,
    "uniform": Uniform,
    "loguniform": LogUniform,
    "truncnormal": TruncNormal,
    "bernoulli": Bernoulli,
    "choice": Choice,
    "shades": Shades,
    "camouflage": CamouflageDist,
}


def dist_to_jsonable(dist: Dist) -> dict:
    if isinstance(dist, FuncDist):
        return {"dist": "callable", "portable": False}
    for kind, cls in _DIST_KINDS.items():
        if type(dist) is cls:
            params = {k: v for k, v in dist.__dict__.items()}
            if kind == "constant" and isinstance(params["value"], (Solid, Gradient, Camouflage)):
                params["value"] = pattern_to_jsonable(params["value"])
            if kind == "choice":
                params["values"] = list(params["values"])
            return {"dist": kind, **params}
    raise TypeError(f"not a distribution: {dist!r}")


def dist_from_jsonable(obj: Any) -> Dist:
    if not isinstance(obj, dict) or "dist" not in obj:
        # bare JSON value means a constant
        return Constant(_maybe_tuple(obj))
    params = {k: v for k, v in obj.items() if k not in ("dist", "portable")}
    kind = obj["dist"]
    if kind == "callable":
        raise DistributionError("callable overrides cannot be loaded from config files")
    cls = _DIST_KINDS.get(kind)
    if cls is None:
        raise DistributionError(f"unknown distribution kind: {kind!r}")
    if kind == "constant":
        value = params["value"]
        if isinstance(value, dict) and "kind" in value:
            value = pattern_from_jsonable(value)
        else:
            value = _maybe_tuple(value)
        return Constant(value)
    if kind == "choice":
        params["values"] = tuple(params["values"])
    return cls(**params)


def _maybe_tuple(value):
    return tuple(value) if isinstance(value, list) else value


# -- attribute records ------------------------------------------------------


@dataclass(frozen=True)
class SymbolAttributes:
    """Full latent vector of one symbol."""

    char: str
    font: str
    language: str
    translation: tuple[float, float]
    scale: float
    rotation: float
    bold: bool
    italic: bool
    foreground: PatternSpec
    background: PatternSpec
    resolution: tuple[int, int]
    omitted: bool = False  # render background only, keep the label

    def validate(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if min(self.resolution) < 8:
            raise ValueError("resolution must be at least 8x8")
        if len(self.translation) != 2:
            raise ValueError("translation must be a pair")

    def to_record(self, recipe: str | None = None, extra: Mapping[str, Any] | None = None) -> dict:
        rec = {
            "char": self.char,
            "font": self.font,
            "language": self.language,
            "translation": list(self.translation),
            "scale": self.scale,
            "rotation": self.rotation,
            "bold": self.bold,
            "italic": self.italic,
            "foreground": pattern_to_jsonable(self.foreground),
            "background": pattern_to_jsonable(self.background),
            "resolution": list(self.resolution),
            "omitted": self.omitted,
            "version": GENERATOR_VERSION,
        }
        if recipe is not None:
            rec["recipe"] = recipe
        if extra:
            rec.update(extra)
        return rec

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_record(**kw), sort_keys=True)

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "SymbolAttributes":
        return cls(
            char=rec["char"],
            font=rec["font"],
            language=rec["language"],
            translation=tuple(rec["translation"]),
            scale=rec["scale"],
            rotation=rec["rotation"],
            bold=rec["bold"],
            italic=rec["italic"],
            foreground=pattern_from_jsonable(rec["foreground"]),
            background=pattern_from_jsonable(rec["background"]),
            resolution=tuple(rec["resolution"]),
            omitted=rec.get("omitted", False),
        )


# -- samplers ---------------------------------------------------------------

# the qualitative "high variance, still readable" defaults, kept in one
# block so recipes can pin or shift them
DEFAULT_DISTS: dict[str, Dist] = {
    "translation": Uniform(-1.0, 1.0, size=2),
    "scale": LogUniform(0.35, 0.9),
    "rotation": TruncNormal(0.0, 0.3, -math.pi / 3, math.pi / 3),
    "bold": Bernoulli(0.5),
    "italic": Bernoulli(0.5),
    "foreground": Shades(),
    "background": Shades(),
}

LESS_VARIATION_DISTS: dict[str, Dist] = {
    "bold": Constant(False),
    "italic": Constant(False),
    "scale": LogUniform(0.55, 0.75),
    "rotation": TruncNormal(0.0, 0.1, -math.pi / 3, math.pi / 3),
}


def camouflage_hook(attrs: SymbolAttributes, rng) -> SymbolAttributes:
    """Pair fg camouflage to bg: shared palette, orientation + pi/2."""
    if isinstance(attrs.background, Camouflage) and isinstance(attrs.foreground, Camouflage):
        return replace(attrs, foreground=camouflage_pair(attrs.background))
    return attrs


@dataclass(frozen=True)
class AttributeSampler:
    """Immutable; `sample` may be called concurrently for any indices."""

    alphabet: Alphabet
    dists: Mapping[str, Dist]
    joint_hook: Callable[[SymbolAttributes, np.random.Generator], SymbolAttributes] | None = None
    recipe: str = "default"

    def with_override(self, attr: str, dist) -> "AttributeSampler":
        return override(self, attr, dist)

    def sample(self, master_seed: int, index: int) -> SymbolAttributes:
        return sample(self, master_seed, index)


def default_sampler(alphabet: Alphabet, resolution: tuple[int, int] = (32, 32)) -> AttributeSampler:
    """The default recipe over an alphabet."""
    dists = dict(DEFAULT_DISTS)
    dists["char"] = Choice(alphabet.codepoints)
    dists["font"] = Choice(alphabet.fonts)
    dists["resolution"] = Constant(tuple(resolution))
    return AttributeSampler(alphabet=alphabet, dists=dists)


_DIST_TYPES = (Constant, Uniform, LogUniform, TruncNormal, Bernoulli, Choice, Shades, CamouflageDist, FuncDist)


def _coerce_dist(attr: str, dist) -> Dist:
    if isinstance(dist, _DIST_TYPES):
        return dist
    if callable(dist):
        return FuncDist(dist)
    return Constant(dist)


def _validate_override(attr: str, dist: Dist):
    if attr == "scale":
        for bound in ("value", "lo"):
            v = getattr(dist, bound, None)
            if isinstance(v, (int, float)) and v <= 0:
                raise DistributionError("scale must stay positive")
    if attr == "resolution" and isinstance(dist, Constant):
        if min(dist.value) < 8:
            raise DistributionError("resolution must be at least 8x8")


def override(sampler: AttributeSampler, attr: str, dist) -> AttributeSampler:
    """A new sampler with one attribute's distribution replaced."""
    if attr not in ATTRIBUTE_NAMES:
        raise KeyError(f"unknown attribute: {attr!r}")
    dist = _coerce_dist(attr, dist)
    _validate_override(attr, dist)
    dists = dict(sampler.dists)
    dists[attr] = dist
    return replace(sampler, dists=dists)


def sample(sampler: AttributeSampler, master_seed: int, index: int) -> SymbolAttributes:
    """Deterministic in (sampler, master_seed, index); order-independent."""
    if index < 0:
        raise ValueError("index must be >= 0")
    values: dict[str, Any] = {}
    for name in ATTRIBUTE_NAMES:
        dist = sampler.dists[name]
        rng = substream(master_seed, index, "attr:" + name)
        try:
            values[name] = dist.sample(rng)
        except Exception as exc:
            if isinstance(dist, FuncDist):
                raise SampleError(f"override for {name!r} failed at index {index}: {exc}") from exc
            raise
    if isinstance(values["translation"], np.ndarray):
        values["translation"] = tuple(float(v) for v in values["translation"])
    attrs = SymbolAttributes(
        char=values["char"],
        font=values["font"],
        language=sampler.alphabet.language,
        translation=tuple(values["translation"]),
        scale=float(values["scale"]),
        rotation=float(values["rotation"]),
        bold=bool(values["bold"]),
        italic=bool(values["italic"]),
        foreground=values["foreground"],
        background=values["background"],
        resolution=tuple(values["resolution"]),
    )
    if sampler.joint_hook is not None:
        attrs = sampler.joint_hook(attrs, substream(master_seed, index, "attr:joint"))
    attrs.validate()
    return attrs
