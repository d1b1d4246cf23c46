"""Labelled synthetic datasets: generation, on-disk layout, stratified split.

Layout::

    <root>/manifest.json
    <root>/maps/<ClassName>/<index>.bin   float32 little-endian, row-major

The manifest is written last, via a temporary file and an atomic rename.
"""
from __future__ import annotations

import copy
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .capon import DEFAULT_LOADING, RangeAzimuthMap, default_angle_grid, range_azimuth_map
from .classes import N_CLASSES, OccupancyClass
from .config import RadarConfig
from .errors import DatasetError
from .frontend import range_fft, remove_clutter
from .scene import CabinGeometry, scene_for_class, synthesize

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"


def process_frame(cube, window: str = "hann", loading_factor: float = DEFAULT_LOADING,
                  angle_grid=None) -> RangeAzimuthMap:
    """Range FFT, clutter removal and Capon mapping of one frame."""
    return range_azimuth_map(remove_clutter(range_fft(cube, window)), angle_grid, loading_factor)


def item_seed(master_seed: int, class_code: int, index: int) -> int:
    digest = hashlib.sha256(f"{master_seed}:{class_code}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class DatasetManifest:
    root: Path
    items: list                 # dicts: label, code, index, seed, path, sha256
    config: RadarConfig
    geometry: CabinGeometry
    map_shape: tuple
    range_axis: np.ndarray
    angle_axis: np.ndarray
    seed: int = 0
    window: str = "hann"
    loading_factor: float = DEFAULT_LOADING

    @property
    def config_hash(self) -> str:
        return self.config.hash()

    @property
    def geometry_hash(self) -> str:
        return self.geometry.hash()

    @property
    def counts(self) -> dict:
        out = {c.name: 0 for c in OccupancyClass}
        for it in self.items:
            out[it["label"]] += 1
        return out

    @property
    def labels(self) -> np.ndarray:
        return np.array([it["code"] for it in self.items], dtype=int)

    def __len__(self):
        return len(self.items)

    def subset(self, items) -> "DatasetManifest":
        m = copy.copy(self)
        m.items = list(items)
        return m

    def to_dict(self) -> dict:
        return {
            "version": MANIFEST_VERSION,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "config_hash": self.config_hash,
            "geometry": self.geometry.to_dict(),
            "geometry_hash": self.geometry_hash,
            "processing": {"window": self.window, "loading_factor": self.loading_factor},
            "map_shape": list(self.map_shape),
            "map_dtype": "<f4",
            "range_axis": [float(v) for v in self.range_axis],
            "angle_axis": [float(v) for v in self.angle_axis],
            "counts": self.counts,
            "items": self.items,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def write(self) -> Path:
        path = Path(self.root) / MANIFEST_NAME
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(self.to_json())
        os.replace(tmp, path)
        return path

    def map_path(self, item) -> Path:
        return Path(self.root) / item["path"]

    def load_map(self, item) -> RangeAzimuthMap:
        raw = np.fromfile(self.map_path(item), dtype="<f4")
        if raw.size != int(np.prod(self.map_shape)):
            raise DatasetError(f"{item['path']}: expected {self.map_shape} values, got {raw.size}")
        return RangeAzimuthMap(raw.reshape(self.map_shape).astype(np.float64),
                               self.range_axis, self.angle_axis)

    def load_features(self):
        """Flattened maps (n_items, D) in float64 and their class codes."""
        X = np.empty((len(self.items), int(np.prod(self.map_shape))))
        for k, it in enumerate(self.items):
            X[k] = self.load_map(it).values.reshape(-1)
        return X, self.labels

    def verify(self) -> None:
        counts = set(self.counts.values())
        if len(counts) != 1:
            raise DatasetError(f"unbalanced class counts: {self.counts}")
        for it in self.items:
            p = self.map_path(it)
            if not p.exists():
                raise DatasetError(f"missing map file {it['path']}")
            if sha256_file(p) != it["sha256"]:
                raise DatasetError(f"hash mismatch for {it['path']}")


def load_manifest(root, verify: bool = True) -> DatasetManifest:
    root = Path(root)
    path = root / MANIFEST_NAME
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON ({exc})") from exc
    if data.get("version") != MANIFEST_VERSION:
        raise DatasetError(f"unsupported manifest version {data.get('version')!r}")
    config = RadarConfig.from_dict(data["config"])
    geometry = CabinGeometry.from_dict(data["geometry"])
    if config.hash() != data["config_hash"] or geometry.hash() != data["geometry_hash"]:
        raise DatasetError("manifest config/geometry hash mismatch")
    m = DatasetManifest(root, data["items"], config, geometry, tuple(data["map_shape"]),
                        np.asarray(data["range_axis"]), np.asarray(data["angle_axis"]),
                        data["seed"], data["processing"]["window"],
                        data["processing"]["loading_factor"])
    if verify:
        m.verify()
    return m


def generate(config: RadarConfig = None, geometry: CabinGeometry = None, per_class: int = 50,
             seed: int = 0, out_dir=None, window: str = "hann",
             loading_factor: float = DEFAULT_LOADING, progress=None) -> DatasetManifest:
    """Synthesize ``per_class`` frames of each class and persist their maps."""
    config = config or RadarConfig()
    geometry = geometry or CabinGeometry()
    if isinstance(per_class, bool) or not isinstance(per_class, int) or per_class < 1:
        raise ValueError("per_class must be a positive integer")
    if out_dir is None:
        raise ValueError("out_dir is required")
    root = Path(out_dir)
    angle_grid = default_angle_grid()
    items, written = [], []
    shape = range_axis = None
    try:
        root.mkdir(parents=True, exist_ok=True)
        for cls in OccupancyClass:
            (root / "maps" / cls.name).mkdir(parents=True, exist_ok=True)
            for index in range(per_class):
                s = item_seed(seed, int(cls), index)
                cube = synthesize(scene_for_class(cls, geometry, s), config)
                ra = process_frame(cube, window, loading_factor, angle_grid)
                rel = f"maps/{cls.name}/{index}.bin"
                data = ra.values.astype("<f4").tobytes(order="C")
                (root / rel).write_bytes(data)
                written.append(rel)
                items.append({"label": cls.name, "code": int(cls), "index": index, "seed": s,
                              "path": rel, "sha256": hashlib.sha256(data).hexdigest()})
                shape, range_axis = ra.values.shape, ra.range_axis
                if progress:
                    progress(len(items), per_class * N_CLASSES)
        manifest = DatasetManifest(root, items, config, geometry, shape, range_axis,
                                   angle_grid, seed, window, loading_factor)
        manifest.write()
    except OSError as exc:
        raise DatasetError(f"write failed after {len(written)} map files under {root}; "
                           f"partial files: {written[-3:]}...") from exc
    return manifest


def split(manifest: DatasetManifest, train_fraction: float = 0.8, seed: int = 0):
    """Stratified train/test split with exactly ``train_fraction`` of every class in train."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in OccupancyClass:
        members = [it for it in manifest.items if it["code"] == int(cls)]
        if not members:
            continue
        n_train = len(members) * train_fraction
        if abs(n_train - round(n_train)) > 1e-9:
            raise DatasetError(
                f"class {cls.name}: {len(members)} items x {train_fraction} is not a whole "
                f"number; choose a per-class count divisible accordingly (e.g. a multiple of 5)")
        order = rng.permutation(len(members))
        k = int(round(n_train))
        train += [members[i] for i in sorted(order[:k])]
        test += [members[i] for i in sorted(order[k:])]
    return manifest.subset(train), manifest.subset(test)
