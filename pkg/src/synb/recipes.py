"""Named, fully resolved generator configurations.

A recipe is declarative (JSON-serializable) and resolves against a font
catalog into concrete sampler / corruption / occluder / scene objects.
The built-in names cover the single-symbol classification datasets, the
active-learning corruption variants, the texture trio, the counting
scenes, and the capped multilingual few-shot corpus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

from .attributes import (
    AttributeSampler,
    Bernoulli,
    CamouflageDist,
    Choice,
    Constant,
    SymbolAttributes,
    Uniform,
    camouflage_hook,
    default_sampler,
    dist_from_jsonable,
    override,
    LESS_VARIATION_DISTS,
)
from .corruptions import CorruptionSpec
from .fonts import FontCatalog
from .patterns import Solid
from .render import OccluderSpec
from .scenes import LogNormalScale, SceneSpec


class UnknownRecipeError(KeyError):
    pass


# attribute values pinned by the bold-texture dataset family: bold stays
# on and the scale varies slightly around 70%
TEXTURE_TRIO_OVERRIDES = {
    "bold": {"dist": "constant", "value": True},
    "scale": {"dist": "uniform", "lo": 0.63, "hi": 0.77},
}

# the "large shape" used by the occlusion corruption
OCCLUDER_LARGE = {
    "count": {"dist": "bernoulli", "p": 0.2},
    "scale": {"dist": "uniform", "lo": 0.7, "hi": 1.1},
}

FEWSHOT_MAX_SYMBOLS = 200
FEWSHOT_MAX_FONTS = 200


@dataclass(frozen=True)
class RecipeConfig:
    name: str
    kind: str = "single"  # single | scene
    language: str = "english"
    languages: tuple[str, ...] | None = None  # multilingual mode
    max_symbols: int | None = None
    max_fonts: int | None = None
    resolution: tuple[int, int] = (32, 32)
    texture: str = "shades"  # shades | solid | camouflage
    overrides: dict[str, Any] = field(default_factory=dict)  # attr -> dist JSON
    label_attr: str = "char"  # char | font
    corruption: dict[str, float] = field(default_factory=dict)
    occluders: dict[str, Any] | None = None
    scene: dict[str, Any] = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "language": self.language,
            "languages": list(self.languages) if self.languages else None,
            "max_symbols": self.max_symbols,
            "max_fonts": self.max_fonts,
            "resolution": list(self.resolution),
            "texture": self.texture,
            "overrides": self.overrides,
            "label_attr": self.label_attr,
            "corruption": self.corruption,
            "occluders": self.occluders,
            "scene": self.scene,
        }

    @classmethod
    def from_jsonable(cls, obj: dict) -> "RecipeConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown recipe config keys: {sorted(unknown)}")
        kw = dict(obj)
        if "resolution" in kw:
            kw["resolution"] = tuple(kw["resolution"])
        if kw.get("languages"):
            kw["languages"] = tuple(kw["languages"])
        return cls(**kw)


def _al(name: str, **corruption) -> RecipeConfig:
    occ = OCCLUDER_LARGE if "occlusion_p" in corruption else None
    return RecipeConfig(name=name, corruption=corruption, occluders=occ)


BUILTIN_RECIPES: dict[str, RecipeConfig] = {
    "default": RecipeConfig(name="default"),
    "camouflage": RecipeConfig(name="camouflage", texture="camouflage"),
    "korean-1k": RecipeConfig(name="korean-1k", language="korean", max_symbols=1000),
    "less-variations": RecipeConfig(
        name="less-variations",
        label_attr="font",
        overrides={
            "bold": {"dist": "constant", "value": False},
            "italic": {"dist": "constant", "value": False},
            "scale": {"dist": "loguniform", "lo": 0.55, "hi": 0.75},
            "rotation": {"dist": "truncnormal", "mean": 0.0, "std": 0.1,
                         "lo": -math.pi / 3, "hi": math.pi / 3},
        },
    ),
    "solid": RecipeConfig(name="solid", texture="solid", overrides=dict(TEXTURE_TRIO_OVERRIDES)),
    "shades": RecipeConfig(name="shades", overrides=dict(TEXTURE_TRIO_OVERRIDES)),
    "al-label-noise": _al("al-label-noise", label_noise_p=0.1),
    "al-pixel-noise": _al("al-pixel-noise", pixel_noise_p=0.5, pixel_noise_sigma=0.7),
    "al-missing": _al("al-missing", missing_p=0.1),
    "al-cropped": RecipeConfig(
        name="al-cropped",
        overrides={"translation": {"dist": "uniform", "lo": -2.0, "hi": 2.0, "size": 2}},
    ),
    "al-occluded": _al("al-occluded", occlusion_p=0.2),
    "counting-fixed": RecipeConfig(
        name="counting-fixed", kind="scene", resolution=(128, 128),
        scene={"count_range": [3, 10], "scale": {"dist": "constant", "value": 0.1}},
    ),
    "counting-variable": RecipeConfig(
        name="counting-variable", kind="scene", resolution=(128, 128),
        scene={"count_range": [3, 10], "scale": {"dist": "lognormal-scale", "base": 0.1, "factor": 0.5}},
    ),
    "counting-crowded": RecipeConfig(
        name="counting-crowded", kind="scene", resolution=(128, 128),
        scene={"count_range": [30, 50], "scale": {"dist": "constant", "value": 0.1}},
    ),
    "fewshot-multilingual": RecipeConfig(
        name="fewshot-multilingual",
        languages=(),  # resolved to every included language
        max_symbols=FEWSHOT_MAX_SYMBOLS,
        max_fonts=FEWSHOT_MAX_FONTS,
    ),
}


def builtin_recipe(name: str) -> RecipeConfig:
    try:
        return BUILTIN_RECIPES[name]
    except KeyError:
        raise UnknownRecipeError(
            f"unknown recipe {name!r}; built-ins: {', '.join(sorted(BUILTIN_RECIPES))}"
        ) from None


def _scene_scale_dist(obj):
    if isinstance(obj, dict) and obj.get("dist") == "lognormal-scale":
        return LogNormalScale(base=obj.get("base", 0.1), factor=obj.get("factor", 0.5))
    return dist_from_jsonable(obj)


@dataclass(frozen=True)
class ResolvedRecipe:
    config: RecipeConfig
    catalog: FontCatalog
    sampler: AttributeSampler | None
    scene_spec: SceneSpec | None
    corruption: CorruptionSpec
    occluders: OccluderSpec | None
    n_classes: int
    label_of: Callable[[SymbolAttributes], int]

    @property
    def kind(self) -> str:
        return self.config.kind

    @property
    def portable(self) -> bool:
        return True  # callable overrides only enter through the bindings


def _apply_texture(sampler: AttributeSampler, texture: str) -> AttributeSampler:
    if texture == "shades":
        return sampler
    if texture == "solid":
        sampler = override(sampler, "foreground", Constant(Solid((1.0, 1.0, 1.0))))
        return override(sampler, "background", Constant(Solid((0.0, 0.0, 0.0))))
    if texture == "camouflage":
        sampler = override(sampler, "foreground", CamouflageDist())
        sampler = override(sampler, "background", CamouflageDist())
        return replace(sampler, joint_hook=camouflage_hook)
    raise ValueError(f"unknown texture mode: {texture!r}")


def _multilingual_parts(catalog: FontCatalog, config: RecipeConfig):
    langs = list(config.languages) if config.languages else catalog.languages()
    if not langs:
        langs = catalog.languages()
    if len(langs) == 0:
        raise ValueError("no language meets the font-count threshold")
    alphabets = {
        lang: catalog.alphabet(lang, config.max_symbols, config.max_fonts) for lang in sorted(langs)
    }
    class_base = {}
    total = 0
    for lang in sorted(alphabets):
        class_base[lang] = total
        total += len(alphabets[lang].codepoints)
    return alphabets, class_base, total


def resolve_recipe(config: RecipeConfig | str, catalog: FontCatalog) -> ResolvedRecipe:
    """Bind a declarative recipe to a catalog; fails fast when fonts
    cannot satisfy it."""
    if isinstance(config, str):
        config = builtin_recipe(config)

    corruption = CorruptionSpec(**config.corruption)
    occluders = None
    if config.occluders is not None:
        occ = dict(config.occluders)
        kw = {}
        if "shapes" in occ:
            kw["shapes"] = tuple(occ["shapes"])
        for key in ("count", "scale", "translation"):
            if key in occ:
                kw[key] = dist_from_jsonable(occ[key])
        occluders = OccluderSpec(**kw)
    elif corruption.occlusion_p > 0:
        occluders = OccluderSpec(
            count=Bernoulli(corruption.occlusion_p),
            scale=dist_from_jsonable(OCCLUDER_LARGE["scale"]),
        )

    if config.kind == "scene":
        alphabet = catalog.alphabet(config.language)
        sc = dict(config.scene)
        kw: dict[str, Any] = {"alphabet": alphabet, "resolution": config.resolution}
        if "count_range" in sc:
            kw["count_range"] = tuple(sc["count_range"])
        for key in ("target_char", "p_target", "overlap_policy"):
            if key in sc:
                kw[key] = sc[key]
        if "scale" in sc:
            kw["scale"] = _scene_scale_dist(sc["scale"])
        spec = SceneSpec(**kw)
        return ResolvedRecipe(
            config=config, catalog=catalog, sampler=None, scene_spec=spec,
            corruption=corruption, occluders=None,
            n_classes=spec.count_range[1] + 1,
            label_of=lambda attrs: 0,
        )

    if config.languages is not None:
        alphabets, class_base, total = _multilingual_parts(catalog, config)
        first = alphabets[sorted(alphabets)[0]]
        sampler = default_sampler(first, config.resolution)

        def multilingual_hook(attrs: SymbolAttributes, rng) -> SymbolAttributes:
            langs = sorted(alphabets)
            lang = langs[int(rng.integers(0, len(langs)))]
            alpha = alphabets[lang]
            char = alpha.codepoints[int(rng.integers(0, len(alpha.codepoints)))]
            font = alpha.fonts[int(rng.integers(0, len(alpha.fonts)))]
            return replace(attrs, language=lang, char=char, font=font)

        sampler = replace(sampler, joint_hook=multilingual_hook, recipe=config.name)
        for attr, dist in config.overrides.items():
            sampler = override(sampler, attr, dist_from_jsonable(dist))
        sampler = _apply_texture(sampler, config.texture)

        def label_of(attrs: SymbolAttributes) -> int:
            alpha = alphabets[attrs.language]
            return class_base[attrs.language] + alpha.codepoints.index(attrs.char)

        return ResolvedRecipe(
            config=config, catalog=catalog, sampler=sampler, scene_spec=None,
            corruption=corruption, occluders=occluders,
            n_classes=total, label_of=label_of,
        )

    alphabet = catalog.alphabet(config.language, config.max_symbols, config.max_fonts)
    sampler = replace(default_sampler(alphabet, config.resolution), recipe=config.name)
    for attr, dist in config.overrides.items():
        sampler = override(sampler, attr, dist_from_jsonable(dist))
    sampler = _apply_texture(sampler, config.texture)

    if config.label_attr == "char":
        n_classes = len(alphabet.codepoints)
        label_of = lambda attrs: alphabet.codepoints.index(attrs.char)  # noqa: E731
    elif config.label_attr == "font":
        n_classes = len(alphabet.fonts)
        label_of = lambda attrs: alphabet.fonts.index(attrs.font)  # noqa: E731
    else:
        raise ValueError(f"unknown label attribute: {config.label_attr!r}")

    return ResolvedRecipe(
        config=config, catalog=catalog, sampler=sampler, scene_spec=None,
        corruption=corruption, occluders=occluders,
        n_classes=n_classes, label_of=label_of,
    )
