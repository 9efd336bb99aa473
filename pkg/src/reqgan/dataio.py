"""MNIST IDX ingestion, subset selection and image/matrix export."""
from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
SIDE = 28
PIXELS = SIDE * SIDE


class IDXFormatError(ValueError):
    pass


class IDXConsistencyError(ValueError):
    pass


class TruncatedFileError(OSError):
    pass


@dataclass(frozen=True)
class ImageSet:
    """``images`` is ``(N, 784)`` uint8, ``labels`` is ``(N,)`` uint8."""

    images: np.ndarray
    labels: np.ndarray
    source: str = ""

    def __post_init__(self):
        images = np.asarray(self.images, dtype=np.uint8).reshape(-1, PIXELS)
        labels = np.asarray(self.labels, dtype=np.uint8).ravel()
        if len(images) != len(labels):
            raise IDXConsistencyError(f"{len(images)} images but {len(labels)} labels")
        if labels.size and labels.max() > 9:
            raise ValueError("labels must be digits 0-9")
        images.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.labels)

    def as_float(self) -> np.ndarray:
        """Pixels scaled to ``[0, 1]``."""
        return self.images / 255.0


def _read_bytes(path) -> bytes:
    raw = Path(path).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        try:
            raw = gzip.decompress(raw)
        except EOFError as exc:
            raise TruncatedFileError(f"{path}: truncated gzip stream") from exc
    return raw


def read_idx(path) -> tuple[int, np.ndarray]:
    """Parse an unsigned-byte IDX file (optionally gzipped). Returns ``(magic, array)``."""
    raw = _read_bytes(path)
    if len(raw) < 4:
        raise TruncatedFileError(f"{path}: file too short for an IDX header")
    magic = struct.unpack(">I", raw[:4])[0]
    if magic >> 16 != 0 or (magic >> 8) & 0xFF != 0x08:
        raise IDXFormatError(f"{path}: bad IDX magic 0x{magic:08x}")
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise TruncatedFileError(f"{path}: truncated IDX header")
    dims = struct.unpack(f">{ndim}I", raw[4:header])
    size = int(np.prod(dims))
    if len(raw) < header + size:
        raise TruncatedFileError(f"{path}: expected {size} payload bytes, found {len(raw) - header}")
    data = np.frombuffer(raw, dtype=np.uint8, count=size, offset=header).reshape(dims)
    return magic, data


def write_idx(array, path, *, compress: bool | None = None) -> None:
    """Write a uint8 array as IDX; gzip when ``compress`` or the path ends in ``.gz``."""
    arr = np.asarray(array)
    if arr.dtype != np.uint8:
        raise ValueError("only unsigned-byte IDX is supported")
    payload = struct.pack(">I", 0x0800 | arr.ndim) + struct.pack(f">{arr.ndim}I", *arr.shape) + arr.tobytes()
    if compress is None:
        compress = str(path).endswith(".gz")
    if compress:
        payload = gzip.compress(payload, mtime=0)
    Path(path).write_bytes(payload)


def load_idx(images_path, labels_path) -> ImageSet:
    """Load an MNIST image/label file pair."""
    magic, images = read_idx(images_path)
    if magic != IMAGE_MAGIC or images.shape[1:] != (SIDE, SIDE):
        raise IDXFormatError(f"{images_path}: not a 28x28 image file (magic 0x{magic:08x})")
    magic, labels = read_idx(labels_path)
    if magic != LABEL_MAGIC:
        raise IDXFormatError(f"{labels_path}: not a label file (magic 0x{magic:08x})")
    if len(images) != len(labels):
        raise IDXConsistencyError(f"{len(images)} images but {len(labels)} labels")
    return ImageSet(images.reshape(-1, PIXELS), labels, source=f"{images_path}|{labels_path}")


def select_subset(images: ImageSet, digit: int, count: int, seed=None) -> ImageSet:
    """Seeded draw of ``count`` images labelled ``digit``, kept in file order."""
    if not 0 <= digit <= 9:
        raise ValueError("digit must be in 0..9")
    if count < 0:
        raise ValueError("count must be non-negative")
    candidates = np.flatnonzero(images.labels == digit)
    if count > len(candidates):
        raise ValueError(f"only {len(candidates)} images of digit {digit}, {count} requested")
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(candidates, size=count, replace=False))
    return ImageSet(images.images[chosen], images.labels[chosen],
                    source=f"{images.source}#digit={digit},count={count},seed={seed}")


def export_image(pixels, path) -> None:
    """Write a 784-pixel vector as a 28x28 binary PGM (clipped, rounded)."""
    pixels = np.asarray(pixels, dtype=float).ravel()
    if pixels.size != PIXELS:
        raise ValueError(f"expected {PIXELS} pixels, got {pixels.size}")
    if not np.all(np.isfinite(pixels)):
        raise ValueError("pixels must be finite")
    data = np.rint(np.clip(pixels, 0, 255)).astype(np.uint8)
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (SIDE, SIDE) + data.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5, maxval < 256) PGM into a ``(height, width)`` uint8 array."""
    raw = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            pos = raw.index(b"\n", pos)
            continue
        end = pos
        while end < len(raw) and not raw[end:end + 1].isspace():
            end += 1
        if end == pos:
            raise ValueError(f"{path}: truncated PGM header")
        fields.append(raw[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    width, height, maxval = map(int, fields[1:])
    if maxval > 255:
        raise ValueError(f"{path}: 16-bit PGM not supported")
    body = raw[pos + 1:]
    if len(body) != width * height:
        raise ValueError(f"{path}: expected {width * height} pixel bytes, found {len(body)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width)


def save_csv(matrix, path) -> None:
    """Comma-separated rows, no header, full float precision."""
    np.savetxt(path, np.atleast_2d(np.asarray(matrix, dtype=float)), delimiter=",", fmt="%.17g")


def load_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)
