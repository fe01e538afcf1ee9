"""Command-line surface: generate, split, inspect, preview, validate.

Exit codes: 0 ok, 2 unknown recipe, 3 unresolvable fonts, 4 IO failure,
5 corrupt container. The font directory resolves from --font-dir or the
SYNB_FONT_DIR environment variable. Seeds are mandatory for generation;
reproducibility is the product, so there is no wall-clock default.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .container import ContainerError, DatasetContainer, payload_hashes, preview, read, write
from .fonts import CatalogError, ExcludedLanguageError, UnknownLanguageError, load_catalog
from .generate import FONT_DIR_ENV, GenerationError, generate_dataset, resolve_font_dir
from .partition import (
    PartitionError,
    ks_statistic,
    split_compositional,
    split_iid,
    split_stratified_continuous,
    split_stratified_discrete,
)
from .recipes import BUILTIN_RECIPES, RecipeConfig, UnknownRecipeError, builtin_recipe
from .render import MASK_THRESHOLD

EXIT_OK = 0
EXIT_UNKNOWN_RECIPE = 2
EXIT_FONTS = 3
EXIT_IO = 4
EXIT_CORRUPT = 5


def _fail(code: int, message: str):
    print(f"error: {message}", file=sys.stderr)
    raise SystemExit(code)


def _load_recipe(args) -> RecipeConfig:
    if args.config:
        try:
            obj = json.loads(Path(args.config).read_text())
        except OSError as exc:
            _fail(EXIT_IO, f"cannot read config: {exc}")
        except json.JSONDecodeError as exc:
            _fail(EXIT_IO, f"config is not valid JSON: {exc}")
        if args.recipe:  # flags override file values
            obj["name"] = args.recipe
        try:
            return RecipeConfig.from_jsonable(obj)
        except (ValueError, TypeError) as exc:
            _fail(EXIT_IO, f"bad recipe config: {exc}")
    if not args.recipe:
        _fail(EXIT_UNKNOWN_RECIPE, "pass --recipe NAME or --config FILE")
    try:
        return builtin_recipe(args.recipe)
    except UnknownRecipeError as exc:
        _fail(EXIT_UNKNOWN_RECIPE, str(exc))


def cmd_generate(args) -> int:
    config = _load_recipe(args)
    try:
        container = generate_dataset(
            config,
            n_samples=args.n,
            master_seed=args.seed,
            workers=args.workers,
            font_dir=args.font_dir,
            blacklist=args.blacklist,
        )
    except (CatalogError, ExcludedLanguageError, UnknownLanguageError, GenerationError) as exc:
        _fail(EXIT_FONTS, str(exc))
    try:
        write(container, args.out)
    except (OSError, ContainerError) as exc:
        _fail(EXIT_IO, f"cannot write {args.out}: {exc}")
    m = container.manifest
    print(f"wrote {args.out}: N={len(container)} recipe={m['recipe']['name']} "
          f"seed={m['master_seed']} version={m['generator_version']}")
    print(json.dumps({k: m[k] for k in ("master_seed", "n_samples", "generator_version")}))
    return EXIT_OK


NUMERIC_ATTRS = {
    "scale": lambda r: r["scale"],
    "rotation": lambda r: r["rotation"],
    "translation-x": lambda r: r["translation"][0],
    "translation-y": lambda r: r["translation"][1],
}
DISCRETE_ATTRS = {
    "char": lambda r: r["char"],
    "font": lambda r: r["font"],
    "language": lambda r: r["language"],
    "bold": lambda r: r["bold"],
    "italic": lambda r: r["italic"],
}


def _attr_values(container: DatasetContainer, attr: str):
    records = [json.loads(a) for a in container.attributes]
    if attr in NUMERIC_ATTRS:
        return np.array([NUMERIC_ATTRS[attr](r) for r in records], dtype=np.float64), True
    if attr in DISCRETE_ATTRS:
        return np.array([DISCRETE_ATTRS[attr](r) for r in records]), False
    _fail(EXIT_IO, f"unknown attribute {attr!r}; numeric: {sorted(NUMERIC_ATTRS)}, "
                   f"discrete: {sorted(DISCRETE_ATTRS)}")


def cmd_split(args) -> int:
    try:
        container = read(args.dataset)
    except ContainerError as exc:
        _fail(EXIT_CORRUPT, str(exc))
    n = len(container)
    try:
        if args.strategy == "iid":
            part = split_iid(n, seed=args.seed)
        elif args.strategy == "stratified":
            if not args.attr:
                _fail(EXIT_IO, "stratified split needs --attr")
            values, numeric = _attr_values(container, args.attr)
            if numeric:
                part = split_stratified_continuous(values, attribute=args.attr)
            else:
                part = split_stratified_discrete(values, seed=args.seed, attribute=args.attr)
        elif args.strategy == "compositional":
            if not args.attrs or "," not in args.attrs:
                _fail(EXIT_IO, "compositional split needs --attrs a,b")
            name_a, name_b = args.attrs.split(",", 1)
            va, num_a = _attr_values(container, name_a.strip())
            vb, num_b = _attr_values(container, name_b.strip())
            if not (num_a and num_b):
                _fail(EXIT_IO, "compositional split needs two continuous attributes")
            part = split_compositional(va, vb, attributes=(name_a.strip(), name_b.strip()))
        else:
            _fail(EXIT_IO, f"unknown strategy {args.strategy!r}")
    except PartitionError as exc:
        _fail(EXIT_IO, str(exc))

    prefix = args.name or args.strategy
    for split_name, idx in part.named().items():
        container.splits[f"{prefix}-{split_name}" if prefix != "iid" else split_name] = idx
    try:
        write(container, args.dataset)
    except (OSError, ContainerError) as exc:
        _fail(EXIT_IO, f"cannot rewrite {args.dataset}: {exc}")

    sizes = part.sizes()
    print(f"split {args.strategy}: train={sizes[0]} valid={sizes[1]} test={sizes[2]}")
    if args.strategy == "compositional":
        va, _ = _attr_values(container, part.attributes[0])
        vb, _ = _attr_values(container, part.attributes[1])
        for name, vals in zip(part.attributes, (va, vb)):
            ks = ks_statistic(vals[part.train], vals[part.test])
            print(f"  marginal KS train-vs-test on {name}: {ks:.4f}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    try:
        container = read(args.dataset)
        container.validate()
    except ContainerError as exc:
        _fail(EXIT_CORRUPT, str(exc))
    n = len(container)
    h, w = container.resolution
    print(f"N={n} resolution={h}x{w}")
    if container.labels_clean is not None:
        print(f"label classes: {len(np.unique(container.labels_clean))}")
    if container.labels_noisy is not None:
        flips = (container.labels_noisy != container.labels_clean).mean()
        print(f"noisy labels present; flip fraction: {flips:.4f}")
    for name in sorted(container.splits):
        print(f"split {name}: {len(container.splits[name])}")
    if container.masks is not None:
        empty = (container.masks >= MASK_THRESHOLD).sum(axis=(1, 2)) == 0
        print(f"empty-mask fraction: {empty.mean():.4f}")
    if container.instance_masks is not None:
        counts = np.diff(container.instance_offsets)
        print(f"instances per scene: min={counts.min()} mean={counts.mean():.2f} max={counts.max()}")

    records = [json.loads(a) for a in container.attributes]
    for attr, getter in NUMERIC_ATTRS.items():
        try:
            vals = np.array([getter(r) for r in records], dtype=np.float64)
        except (KeyError, TypeError):
            continue
        print(f"{attr}: mean={vals.mean():.4f} std={vals.std():.4f} "
              f"min={vals.min():.4f} max={vals.max():.4f}")
    for attr, getter in DISCRETE_ATTRS.items():
        try:
            vals = [getter(r) for r in records]
        except (KeyError, TypeError):
            continue
        uniq = sorted(set(map(str, vals)))
        if attr in ("bold", "italic"):
            frac = np.mean([bool(v) for v in vals])
            print(f"{attr}: true fraction {frac:.4f}")
        else:
            print(f"{attr}: {len(uniq)} distinct")
    print("manifest:", json.dumps(container.manifest, sort_keys=True))
    return EXIT_OK


def cmd_preview(args) -> int:
    try:
        container = read(args.dataset)
        img = preview(container, args.rows, args.cols)
    except ContainerError as exc:
        _fail(EXIT_CORRUPT, str(exc))
    try:
        img.save(args.out)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {args.out}: {exc}")
    print(f"wrote {args.out} ({img.height}x{img.width})")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        container = read(args.dataset)
        container.validate()
    except ContainerError as exc:
        _fail(EXIT_CORRUPT, str(exc))
    print(f"ok: N={len(container)}, payload hashes:")
    for name, digest in payload_hashes(args.dataset).items():
        print(f"  {name}: {digest[:16]}")
    return EXIT_OK


def cmd_fonts(args) -> int:
    try:
        catalog = load_catalog(resolve_font_dir(args.font_dir), args.blacklist)
    except (CatalogError, GenerationError) as exc:
        _fail(EXIT_FONTS, str(exc))
    print(catalog.summary_json())
    return EXIT_OK


def cmd_make_demo_fonts(args) -> int:
    from .fonts.demo import build_corpus

    path = build_corpus(args.out, force=args.force)
    print(f"demo corpus at {path} ({len(list(path.glob('*.ttf')))} files)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="synb", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a named recipe into a dataset file")
    g.add_argument("--recipe", help=f"built-in name ({', '.join(sorted(BUILTIN_RECIPES))})")
    g.add_argument("--config", help="JSON recipe file (flags override file values)")
    g.add_argument("--n", type=int, required=True, help="number of samples")
    g.add_argument("--seed", type=int, required=True, help="master seed (mandatory)")
    g.add_argument("--out", required=True, help="output path (.h5 or .npz)")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--font-dir", default=None, help=f"default: ${FONT_DIR_ENV}")
    g.add_argument("--blacklist", default=None)
    g.set_defaults(fn=cmd_generate)

    s = sub.add_parser("split", help="add a named split to a dataset")
    s.add_argument("dataset")
    s.add_argument("--strategy", required=True, choices=("iid", "stratified", "compositional"))
    s.add_argument("--attr", default=None)
    s.add_argument("--attrs", default=None, help="two attributes: a,b")
    s.add_argument("--name", default=None, help="split name prefix")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_split)

    i = sub.add_parser("inspect", help="text report on a dataset")
    i.add_argument("dataset")
    i.set_defaults(fn=cmd_inspect)

    v = sub.add_parser("validate", help="container invariants + payload hashes")
    v.add_argument("dataset")
    v.set_defaults(fn=cmd_validate)

    pv = sub.add_parser("preview", help="PNG grid of the first rows*cols samples")
    pv.add_argument("dataset")
    pv.add_argument("--rows", type=int, default=8)
    pv.add_argument("--cols", type=int, default=8)
    pv.add_argument("--out", required=True)
    pv.set_defaults(fn=cmd_preview)

    f = sub.add_parser("fonts", help="catalog summary as JSON")
    f.add_argument("--font-dir", default=None)
    f.add_argument("--blacklist", default=None)
    f.set_defaults(fn=cmd_fonts)

    d = sub.add_parser("make-demo-fonts", help="build the self-contained demo font corpus")
    d.add_argument("--out", required=True)
    d.add_argument("--force", action="store_true")
    d.set_defaults(fn=cmd_make_demo_fonts)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
