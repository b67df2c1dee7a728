"""Corpus ingestion: image IO, grid tiling, and CSV manifests.

All images are decoded to 8-bit RGB (the benchmark datasets distribute as
8-bit RGB, so the maximum level is always 255). A manifest binds tile files
to integer class labels; labels must form a contiguous 0..C-1 set.
"""

import os
import warnings
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from ._util import atomic_write_bytes
from .validation import check_image

IMAGE_EXTENSIONS = (".png", ".ppm", ".pgm", ".bmp", ".tif", ".tiff", ".jpg", ".jpeg")


def load_image(path):
    """Decode an image file (PNG, PPM, ...) as an (H, W, 3) uint8 RGB array."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"))
    return np.ascontiguousarray(arr)


def save_png(image, path):
    """Write an (H, W, 3) or (H, W) uint8 array as PNG (atomic)."""
    arr = np.asarray(image, dtype=np.uint8)
    im = Image.fromarray(arr)
    import io

    buf = io.BytesIO()
    im.save(buf, format="PNG")
    atomic_write_bytes(path, buf.getvalue())


def split_grid(image, tile_w, tile_h):
    """Cut an image into non-overlapping tiles, row-major from the top left.

    Only full tiles are emitted: an H x W image yields
    floor(H / tile_h) * floor(W / tile_w) exact pixel copies. A tile larger
    than the image yields zero tiles (with a warning).
    """
    image = check_image(image)
    tile_w = int(tile_w)
    tile_h = int(tile_h)
    if tile_w < 1 or tile_h < 1:
        raise ValueError("tile dimensions must be >= 1")
    h, w = image.shape[:2]
    ny, nx = h // tile_h, w // tile_w
    if ny == 0 or nx == 0:
        warnings.warn(
            f"tile {tile_w}x{tile_h} larger than image {w}x{h}; no tiles emitted",
            stacklevel=2,
        )
        return []
    tiles = []
    for iy in range(ny):
        for ix in range(nx):
            tiles.append(
                image[
                    iy * tile_h : (iy + 1) * tile_h,
                    ix * tile_w : (ix + 1) * tile_w,
                ].copy()
            )
    return tiles


@dataclass
class ManifestEntry:
    path: str
    label: int
    source_id: str
    tile_index: int


@dataclass
class Manifest:
    """Tile files bound to class labels and their source images."""

    entries: list = field(default_factory=list)
    name: str = ""
    tile_size: tuple = None

    def __len__(self):
        return len(self.entries)

    def paths(self):
        return [e.path for e in self.entries]

    def labels(self):
        return np.asarray([e.label for e in self.entries], dtype=np.int64)

    def n_classes(self):
        return int(self.labels().max()) + 1 if self.entries else 0

    def load_images(self, root=None):
        """Decode every entry, resolving relative paths against ``root``."""
        out = []
        for e in self.entries:
            p = e.path if root is None else os.path.join(root, e.path)
            out.append(load_image(p))
        return out


def validate_manifest(manifest, root=None, check_files=True):
    """Raise a descriptive error for missing files, duplicates or label gaps."""
    seen_paths = set()
    seen_tiles = set()
    for e in manifest.entries:
        if e.path in seen_paths:
            raise ValueError(f"duplicate manifest path: {e.path}")
        seen_paths.add(e.path)
        key = (e.source_id, e.tile_index)
        if key in seen_tiles:
            raise ValueError(f"duplicate tile id {key} in manifest")
        seen_tiles.add(key)
    if manifest.entries:
        labels = sorted({e.label for e in manifest.entries})
        if labels[0] != 0 or labels != list(range(len(labels))):
            raise ValueError(
                f"labels must form a contiguous 0..C-1 set, got {labels}"
            )
    if check_files:
        for e in manifest.entries:
            p = e.path if root is None else os.path.join(root, e.path)
            if not os.path.isfile(p):
                raise FileNotFoundError(f"manifest references a missing file: {p}")
    return manifest


def write_manifest(manifest, path):
    """Write the manifest as ``path,label,source_id,tile_index`` CSV (atomic)."""
    lines = ["path,label,source_id,tile_index\n"]
    for e in manifest.entries:
        lines.append(f"{e.path},{e.label},{e.source_id},{e.tile_index}\n")
    atomic_write_bytes(path, "".join(lines).encode("utf-8"))


def load_manifest(path, check_files=True, root=None):
    """Read a manifest CSV back; round-trips with :func:`write_manifest`."""
    entries = []
    with open(path, newline="") as fh:
        header = fh.readline().rstrip("\r\n")
        if header != "path,label,source_id,tile_index":
            raise ValueError(
                f"unexpected manifest header {header!r} in {path}"
            )
        for ln, line in enumerate(fh, start=2):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ValueError(f"{path}:{ln}: expected 4 fields, got {len(parts)}")
            entries.append(
                ManifestEntry(
                    path=parts[0],
                    label=int(parts[1]),
                    source_id=parts[2],
                    tile_index=int(parts[3]),
                )
            )
    manifest = Manifest(entries=entries, name=os.path.basename(path))
    if root is None:
        root = os.path.dirname(os.path.abspath(path))
    return validate_manifest(manifest, root=root, check_files=check_files)


def scan_class_tree(root):
    """Manifest from a directory tree with one class per subdirectory.

    Classes are the sorted subdirectory names (labels 0..C-1); images are
    sorted within each class. Paths are stored relative to ``root``.
    """
    classes = sorted(
        d for d in os.listdir(root) if os.path.isdir(os.path.join(root, d))
    )
    if not classes:
        raise ValueError(f"no class subdirectories under {root}")
    entries = []
    for label, cname in enumerate(classes):
        cdir = os.path.join(root, cname)
        files = sorted(
            f
            for f in os.listdir(cdir)
            if f.lower().endswith(IMAGE_EXTENSIONS)
        )
        for f in files:
            stem = os.path.splitext(f)[0]
            entries.append(
                ManifestEntry(
                    path=os.path.join(cname, f),
                    label=label,
                    source_id=f"{cname}/{stem}",
                    tile_index=0,
                )
            )
    return Manifest(entries=entries, name=os.path.basename(os.path.abspath(root)))


def tile_tree(src_root, out_root, tile_w, tile_h):
    """Tile every image of a class tree into ``out_root``; returns the manifest.

    Tiles are written as ``<class>/<stem>_t<idx>.png`` in row-major order.
    """
    src = scan_class_tree(src_root)
    entries = []
    for e in src.entries:
        image = load_image(os.path.join(src_root, e.path))
        cname = os.path.dirname(e.path)
        stem = os.path.splitext(os.path.basename(e.path))[0]
        os.makedirs(os.path.join(out_root, cname), exist_ok=True)
        for idx, tile in enumerate(split_grid(image, tile_w, tile_h)):
            rel = os.path.join(cname, f"{stem}_t{idx:02d}.png")
            save_png(tile, os.path.join(out_root, rel))
            entries.append(
                ManifestEntry(
                    path=rel, label=e.label, source_id=e.source_id, tile_index=idx
                )
            )
    return Manifest(
        entries=entries,
        name=os.path.basename(os.path.abspath(out_root)),
        tile_size=(int(tile_w), int(tile_h)),
    )
