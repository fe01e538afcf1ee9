"""On-disk dataset containers with reproducibility metadata.

Both formats use the same fixed dataset names (/images, /masks,
/attributes, /labels/clean, /labels/noisy, /splits/<name>, and the
instance-mask trio for scene datasets). Layout is deterministic: fixed
chunking, no timestamps in dataset metadata, fixed zip entries for NPZ,
so writing the same in-memory container twice produces byte-identical
payloads. The manifest (embedded as a root attribute and as a sidecar
.manifest.json) carries everything needed to regenerate the arrays.
"""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

import h5py
import numpy as np
from PIL import Image

MANIFEST_KEY = "manifest"
FORMAT_VERSION = 1


class ContainerError(ValueError):
    pass


@dataclass
class DatasetContainer:
    images: np.ndarray  # N x H x W x 3 uint8
    attributes: list[str]  # per-sample JSON records
    manifest: dict
    masks: np.ndarray | None = None  # N x H x W uint8 (single-symbol datasets)
    labels_clean: np.ndarray | None = None
    labels_noisy: np.ndarray | None = None
    splits: dict[str, np.ndarray] = field(default_factory=dict)
    instance_ids: np.ndarray | None = None  # N x H x W uint16 (scenes)
    instance_masks: np.ndarray | None = None  # M x H x W uint8 stacked (scenes)
    instance_offsets: np.ndarray | None = None  # N+1 int64 index into the stack

    def __len__(self) -> int:
        return len(self.images)

    @property
    def resolution(self) -> tuple[int, int]:
        return self.images.shape[1], self.images.shape[2]

    def validate(self):
        n = len(self.images)
        if self.images.ndim != 4 or self.images.shape[3] != 3 or self.images.dtype != np.uint8:
            raise ContainerError("images must be N x H x W x 3 uint8")
        if len(self.attributes) != n:
            raise ContainerError("attributes must align with images")
        for name, arr in (
            ("masks", self.masks),
            ("labels/clean", self.labels_clean),
            ("labels/noisy", self.labels_noisy),
            ("instance_ids", self.instance_ids),
        ):
            if arr is not None and len(arr) != n:
                raise ContainerError(f"{name} must share the leading dimension")
        if self.instance_masks is not None:
            if self.instance_offsets is None or len(self.instance_offsets) != n + 1:
                raise ContainerError("instance mask stack needs an N+1 offsets index")
            if self.instance_offsets[-1] != len(self.instance_masks):
                raise ContainerError("offsets must cover the instance mask stack")
        for name, idx in self.splits.items():
            if len(idx) and (idx.min() < 0 or idx.max() >= n):
                raise ContainerError(f"split {name!r} indexes out of range")

    def equals(self, other: "DatasetContainer", ignore_manifest_keys=("created",)) -> bool:
        def arr_eq(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.dtype == b.dtype and np.array_equal(a, b)

        if not (
            arr_eq(self.images, other.images)
            and arr_eq(self.masks, other.masks)
            and self.attributes == other.attributes
            and arr_eq(self.labels_clean, other.labels_clean)
            and arr_eq(self.labels_noisy, other.labels_noisy)
            and arr_eq(self.instance_ids, other.instance_ids)
            and arr_eq(self.instance_masks, other.instance_masks)
            and arr_eq(self.instance_offsets, other.instance_offsets)
        ):
            return False
        if set(self.splits) != set(other.splits):
            return False
        if not all(np.array_equal(self.splits[k], other.splits[k]) for k in self.splits):
            return False
        m1 = {k: v for k, v in self.manifest.items() if k not in ignore_manifest_keys}
        m2 = {k: v for k, v in other.manifest.items() if k not in ignore_manifest_keys}
        return m1 == m2

    # -- array table --------------------------------------------------------

    def _arrays(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {"images": self.images}
        if self.masks is not None:
            out["masks"] = self.masks
        if self.labels_clean is not None:
            out["labels/clean"] = self.labels_clean
        if self.labels_noisy is not None:
            out["labels/noisy"] = self.labels_noisy
        if self.instance_ids is not None:
            out["instance_ids"] = self.instance_ids
        if self.instance_masks is not None:
            out["instance_masks"] = self.instance_masks
            out["instance_offsets"] = self.instance_offsets
        for name in sorted(self.splits):
            out[f"splits/{name}"] = np.asarray(self.splits[name], dtype=np.int64)
        return out


def _chunks_for(arr: np.ndarray) -> tuple | None:
    if arr.ndim == 0 or len(arr) == 0:
        return None
    lead = min(len(arr), 256)
    return (lead,) + arr.shape[1:]


def write(container: DatasetContainer, path: str | Path, format: str | None = None) -> Path:
    """Persist a container; format resolves from the extension.

    HDF5 for .h5/.hdf5, NPZ for .npz. Round-trips losslessly; payload
    bytes are deterministic for a fixed in-memory container.
    """
    container.validate()
    path = Path(path)
    fmt = format or _format_from_suffix(path)
    if fmt == "hdf5":
        _write_hdf5(container, path)
    elif fmt == "npz":
        _write_npz(container, path)
    else:
        raise ContainerError(f"unknown format: {fmt!r}")
    sidecar = path.with_suffix(path.suffix + ".manifest.json")
    sidecar.write_text(json.dumps(container.manifest, indent=2, sort_keys=True))
    return path


def _format_from_suffix(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix in (".h5", ".hdf5"):
        return "hdf5"
    if suffix == ".npz":
        return "npz"
    raise ContainerError(f"cannot infer format from {path.name!r} (use .h5 or .npz)")


def _write_hdf5(container: DatasetContainer, path: Path):
    manifest_json = json.dumps(container.manifest, sort_keys=True)
    with h5py.File(path, "w", track_order=False) as f:
        for name, arr in container._arrays().items():
            f.create_dataset(name, data=arr, chunks=_chunks_for(arr), track_times=False)
        attr_dt = h5py.string_dtype(encoding="utf-8")
        f.create_dataset(
            "attributes",
            data=np.asarray(container.attributes, dtype=object),
            dtype=attr_dt,
            track_times=False,
        )
        f.attrs[MANIFEST_KEY] = manifest_json
        f.attrs["format_version"] = FORMAT_VERSION


def _write_npz(container: DatasetContainer, path: Path):
    payload = dict(container._arrays())
    attr_blob = "\n".join(container.attributes).encode("utf-8")
    payload["attributes"] = np.frombuffer(attr_blob, dtype=np.uint8)
    manifest_blob = json.dumps(container.manifest, sort_keys=True).encode("utf-8")
    payload[MANIFEST_KEY] = np.frombuffer(manifest_blob, dtype=np.uint8)

    # fixed zip timestamps keep the file byte-deterministic
    with zipfile.ZipFile(path, "w", zipfile.ZIP_STORED) as zf:
        for key in sorted(payload):
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.ascontiguousarray(payload[key]))
            info = zipfile.ZipInfo(key + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            zf.writestr(info, buf.getvalue())


def read(path: str | Path) -> DatasetContainer:
    path = Path(path)
    fmt = _format_from_suffix(path)
    try:
        if fmt == "hdf5":
            return _read_hdf5(path)
        return _read_npz(path)
    except (OSError, KeyError, ValueError, zipfile.BadZipFile) as exc:
        raise ContainerError(f"cannot read container {path}: {exc}") from exc


def _read_hdf5(path: Path) -> DatasetContainer:
    with h5py.File(path, "r") as f:
        manifest = json.loads(f.attrs[MANIFEST_KEY])
        attributes = [s.decode("utf-8") if isinstance(s, bytes) else s for s in f["attributes"][()]]
        splits = {}
        if "splits" in f:
            for name in f["splits"]:
                splits[name] = f["splits"][name][()]

        def get(name):
            return f[name][()] if name in f else None

        return DatasetContainer(
            images=f["images"][()],
            attributes=attributes,
            manifest=manifest,
            masks=get("masks"),
            labels_clean=get("labels/clean"),
            labels_noisy=get("labels/noisy"),
            splits=splits,
            instance_ids=get("instance_ids"),
            instance_masks=get("instance_masks"),
            instance_offsets=get("instance_offsets"),
        )


def _read_npz(path: Path) -> DatasetContainer:
    data = np.load(path)
    manifest = json.loads(bytes(data[MANIFEST_KEY]).decode("utf-8"))
    attr_blob = bytes(data["attributes"]).decode("utf-8")
    attributes = attr_blob.split("\n") if attr_blob else []
    splits = {}
    for key in data.files:
        if key.startswith("splits/"):
            splits[key.split("/", 1)[1]] = data[key]

    def get(name):
        return data[name] if name in data.files else None

    return DatasetContainer(
        images=data["images"],
        attributes=attributes,
        manifest=manifest,
        masks=get("masks"),
        labels_clean=get("labels/clean"),
        labels_noisy=get("labels/noisy"),
        splits=splits,
        instance_ids=get("instance_ids"),
        instance_masks=get("instance_masks"),
        instance_offsets=get("instance_offsets"),
    )


def payload_hashes(path: str | Path) -> dict[str, str]:
    """Content hash per payload section, manifest and timestamps excluded."""
    import hashlib

    c = read(path)
    out = {}
    for name, arr in c._arrays().items():
        out[name] = hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()
    out["attributes"] = hashlib.sha256("\n".join(c.attributes).encode()).hexdigest()
    return out


def preview(container: DatasetContainer, rows: int, cols: int) -> Image.Image:
    """Tile the first rows*cols images into a grid with 1-px separators."""
    n = len(container)
    if n == 0:
        raise ContainerError("empty container")
    if rows * cols > n:
        raise ContainerError(f"grid {rows}x{cols} needs {rows * cols} images, container has {n}")
    h, w = container.resolution
    grid = np.zeros((rows * (h + 1) + 1, cols * (w + 1) + 1, 3), dtype=np.uint8)
    for r in range(rows):
        for c in range(cols):
            img = container.images[r * cols + c]
            grid[r * (h + 1) + 1 : r * (h + 1) + 1 + h, c * (w + 1) + 1 : c * (w + 1) + 1 + w] = img
    return Image.fromarray(grid)
