"""End-to-end dataset generation: sample, render, corrupt, package.

Every sample is a pure function of (recipe, master seed, index), so the
index range can be split across worker processes in any way without
changing a single byte of the output. Workers are forked after the
catalog is built; each child drops inherited font file handles and
reopens its own.
"""

from __future__ import annotations

import datetime
import json
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .attributes import sample as sample_attributes
from .container import DatasetContainer
from .corruptions import (
    corrupt_label,
    corrupt_pixels,
    label_rng,
    omit_rng,
    omit_symbol,
    pixel_rng,
)
from .fonts import FontCatalog, load_catalog
from .partition import split_iid
from .recipes import RecipeConfig, ResolvedRecipe, resolve_recipe
from .render import quantize, render_float
from .scenes import compose_scene, instance_id_map, scene_record

FONT_DIR_ENV = "SYNB_FONT_DIR"

# worker state installed before fork; children inherit it copy-on-write
_STATE: dict = {}


class GenerationError(RuntimeError):
    pass


def resolve_font_dir(font_dir=None):
    path = font_dir or os.environ.get(FONT_DIR_ENV)
    if not path:
        raise GenerationError(
            f"no font directory: pass font_dir or set ${FONT_DIR_ENV}"
        )
    return path


def _gen_single(resolved: ResolvedRecipe, master_seed: int, index: int):
    cfg = resolved.corruption
    attrs = sample_attributes(resolved.sampler, master_seed, index)
    if cfg.missing_p > 0:
        attrs = omit_symbol(attrs, cfg.missing_p, omit_rng(master_seed, index))

    image, mask, occluders = render_float(
        resolved.catalog, attrs, resolved.occluders, master_seed, index
    )
    noised = False
    if cfg.pixel_noise_p > 0:
        image, noised = corrupt_pixels(
            image, cfg.pixel_noise_p, cfg.pixel_noise_sigma, pixel_rng(master_seed, index)
        )

    label = resolved.label_of(attrs)
    noisy = label
    if cfg.label_noise_p > 0:
        noisy = corrupt_label(
            label, resolved.n_classes, cfg.label_noise_p, label_rng(master_seed, index)
        )

    extra = {"label": label, "index": index}
    if cfg.label_noise_p > 0:
        extra["label_noisy"] = noisy
    if cfg.pixel_noise_p > 0:
        extra["pixel_noise"] = noised
    if occluders:
        extra["occluders"] = [o.to_record() for o in occluders]
    record = attrs.to_record(recipe=resolved.config.name, extra=extra)
    return quantize(image), mask, json.dumps(record, sort_keys=True), label, noisy


def _gen_scene(resolved: ResolvedRecipe, master_seed: int, index: int, cache: dict):
    s = compose_scene(resolved.catalog, resolved.scene_spec, master_seed, index, cache)
    record = scene_record(s, resolved.scene_spec, recipe=resolved.config.name)
    record["index"] = index
    ids = instance_id_map(s.instance_masks)
    return s.image, ids, s.instance_masks, json.dumps(record, sort_keys=True), s.target_count


def _worker_init():
    # fork shares file descriptors; each child reopens its own fonts
    _STATE["resolved"].catalog._tt_cache.clear()


def _worker_chunk(args):
    lo, hi = args
    resolved = _STATE["resolved"]
    seed = _STATE["seed"]
    if resolved.kind == "scene":
        cache: dict = {}
        return [_gen_scene(resolved, seed, i, cache) for i in range(lo, hi)]
    return [_gen_single(resolved, seed, i) for i in range(lo, hi)]


def generate_dataset(
    recipe: RecipeConfig | str,
    n_samples: int,
    master_seed: int,
    workers: int = 1,
    catalog: FontCatalog | None = None,
    font_dir=None,
    blacklist=None,
) -> DatasetContainer:
    """Generate a container; output is independent of the worker count."""
    if n_samples < 1:
        raise GenerationError("n_samples must be >= 1")
    if catalog is None:
        catalog = load_catalog(resolve_font_dir(font_dir), blacklist)
    resolved = resolve_recipe(recipe, catalog)

    _STATE["resolved"] = resolved
    _STATE["seed"] = master_seed
    chunk = max(64, (n_samples + max(workers, 1) * 4 - 1) // (max(workers, 1) * 4))
    ranges = [(lo, min(lo + chunk, n_samples)) for lo in range(0, n_samples, chunk)]

    if workers <= 1:
        results = [_worker_chunk(r) for r in ranges]
    else:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx,
                                 initializer=_worker_init) as pool:
            results = list(pool.map(_worker_chunk, ranges))

    rows = [row for chunk_rows in results for row in chunk_rows]
    if len(rows) != n_samples:
        raise GenerationError("worker results incomplete")

    manifest = {
        "master_seed": master_seed,
        "n_samples": n_samples,
        "recipe": resolved.config.to_jsonable(),
        "generator_version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "portable": resolved.portable,
    }
    if font_dir or os.environ.get(FONT_DIR_ENV):
        manifest["font_dir"] = str(font_dir or os.environ.get(FONT_DIR_ENV))
        if blacklist:
            manifest["blacklist"] = str(blacklist)

    if resolved.kind == "scene":
        images = np.stack([r[0] for r in rows])
        ids = np.stack([r[1] for r in rows])
        counts = np.array([len(r[2]) for r in rows], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(counts)])
        stack = np.concatenate([r[2] for r in rows], axis=0)
        container = DatasetContainer(
            images=images,
            attributes=[r[3] for r in rows],
            manifest=manifest,
            labels_clean=np.array([r[4] for r in rows], dtype=np.int64),
            instance_ids=ids,
            instance_masks=stack,
            instance_offsets=offsets,
        )
    else:
        container = DatasetContainer(
            images=np.stack([r[0] for r in rows]),
            masks=np.stack([r[1] for r in rows]),
            attributes=[r[2] for r in rows],
            manifest=manifest,
            labels_clean=np.array([r[3] for r in rows], dtype=np.int64),
            labels_noisy=(
                np.array([r[4] for r in rows], dtype=np.int64)
                if resolved.corruption.label_noise_p > 0
                else None
            ),
        )

    part = split_iid(n_samples, seed=master_seed) if n_samples >= 3 else None
    if part is not None:
        container.splits.update(part.named())
    else:
        # tiny containers still carry the named splits, rounded down
        container.splits.update(
            {"train": np.arange(n_samples), "valid": np.arange(0), "test": np.arange(0)}
        )
    container.validate()
    return container


def regenerate(manifest: dict, catalog: FontCatalog | None = None,
               workers: int = 1) -> DatasetContainer:
    """Rebuild a container from its manifest (payload is byte-identical)."""
    if not manifest.get("portable", True):
        raise GenerationError("manifest is marked non-portable (callable overrides)")
    config = RecipeConfig.from_jsonable(manifest["recipe"])
    return generate_dataset(
        config,
        manifest["n_samples"],
        manifest["master_seed"],
        workers=workers,
        catalog=catalog,
        font_dir=manifest.get("font_dir"),
        blacklist=manifest.get("blacklist"),
    )
