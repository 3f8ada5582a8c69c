"""Decoders for video frames, ground-truth masks and activation tensors.

Three on-disk formats are understood:

* PGM/PPM (binary ``P5``/``P6``, maxval 255). ``P6`` color data is collapsed
  to grayscale with BT.601 luma weights. A "pgm-sequence" is a directory of
  such files, one per frame, ordered by file name.
* raw-y8: a single binary file of ``COUNT`` frames of ``W*H`` bytes each
  (frame-major, row-major), described by a sidecar text header
  ``<file>.hdr`` containing one line ``W H COUNT``.
* UMK1 activation tensors: magic ``b"UMK1"``, four little-endian uint32
  (count, channels, height, width), then ``count*channels*height*width``
  little-endian float32 values, frame-major, channel-major, row-major.
  This is the hand-off format for externally computed CNN activation maps;
  the exporter is expected to have done its own preprocessing (e.g. resize
  to the network's input size and mean-image subtraction) before running
  the network.

All loaders return plain in-memory containers with float pixel data in
``[0, 1]`` (frames) or float32 (activations). They are pure functions over
immutable inputs and are safe to call concurrently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    AlignmentError,
    DataError,
    FormatError,
    OrderingError,
    TruncationError,
)

_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])  # BT.601

_UMK1_MAGIC = b"UMK1"
_UMK1_HEADER_BYTES = 20  # magic + 4 * uint32


@dataclass
class Frame:
    """One grayscale frame. ``pixels`` is (height, width), values in [0, 1]."""

    index: int
    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} != "
                f"(height={self.height}, width={self.width})"
            )


@dataclass
class ActivationFrame:
    """One frame's activation tensor. ``values`` is (channels, height, width)."""

    index: int
    channels: int
    height: int
    width: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.values.shape != (self.channels, self.height, self.width):
            raise ValueError(
                f"activation shape {self.values.shape} != "
                f"({self.channels}, {self.height}, {self.width})"
            )


@dataclass
class GroundTruth:
    """Per-frame binary anomaly labels, optionally with per-pixel masks."""

    frame_labels: np.ndarray
    pixel_masks: list[np.ndarray] | None = field(default=None)

    def __post_init__(self):
        self.frame_labels = np.asarray(self.frame_labels, dtype=np.uint8)
        if self.pixel_masks is not None:
            derived = np.array(
                [1 if m.any() else 0 for m in self.pixel_masks], dtype=np.uint8
            )
            if len(self.pixel_masks) != len(self.frame_labels) or not np.array_equal(
                derived, self.frame_labels
            ):
                raise ValueError("frame labels inconsistent with pixel masks")


# ---------------------------------------------------------------------------
# PGM / PPM
# ---------------------------------------------------------------------------

def _pnm_tokens(data: bytes, count: int, path) -> tuple[list[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset of the first payload byte (one
    whitespace byte past the last token).
    """
    tokens = []
    i = 0
    while len(tokens) < count:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i] != 0x0A:
                i += 1
            continue
        start = i
        while i < len(data) and not data[i : i + 1].isspace():
            i += 1
        if i == start:
            raise FormatError(f"{path}: truncated PNM header at byte {i}")
        tokens.append(data[start:i])
    if i >= len(data):
        raise FormatError(f"{path}: missing payload after header (byte {i})")
    return tokens, i + 1  # consume the single whitespace after maxval


def read_pnm(path) -> np.ndarray:
    """Decode a binary P5/P6 file to a grayscale uint8 array (height, width)."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 2 or data[:2] not in (b"P5", b"P6"):
        raise FormatError(f"{path}: not a binary PGM/PPM file (bad magic at byte 0)")
    color = data[:2] == b"P6"
    tokens, offset = _pnm_tokens(data, 4, path)
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError:
        raise FormatError(f"{path}: non-numeric PNM header field") from None
    if maxval != 255:
        raise FormatError(f"{path}: unsupported maxval {maxval} (only 255)")
    per_px = 3 if color else 1
    need = width * height * per_px
    body = data[offset : offset + need]
    if len(body) < need:
        raise TruncationError(
            f"{path}: payload needs {need} bytes, file ends at byte "
            f"{offset + len(body)}"
        )
    raw = np.frombuffer(body, dtype=np.uint8)
    if color:
        rgb = raw.reshape(height, width, 3).astype(np.float64)
        gray = rgb @ _LUMA_WEIGHTS
        return np.clip(np.rint(gray), 0, 255).astype(np.uint8)
    return raw.reshape(height, width)


def write_pgm(path, gray: np.ndarray) -> None:
    """Write a uint8 (height, width) array as binary P5, maxval 255."""
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())


_TRAILING_INT = re.compile(r"(\d+)\D*$")


def _check_sequence_order(names: list[str], source) -> None:
    indices = []
    for name in names:
        match = _TRAILING_INT.search(Path(name).stem)
        if match is None:
            return  # unnumbered names: lexicographic order is all we have
        indices.append(int(match.group(1)))
    for prev, cur, name in zip(indices, indices[1:], names[1:]):
        if cur <= prev:
            raise OrderingError(
                f"{source}: frame numbering not strictly increasing in "
                f"lexicographic order (offender {name!r}); zero-pad the indices"
            )


def load_frames(source, format: str = "pgm-sequence") -> list[Frame]:
    """Load a frame sequence from disk.

    ``format`` is ``"pgm-sequence"`` (a directory of P5/P6 files) or
    ``"raw-y8"`` (a packed byte file with a ``.hdr`` sidecar). Intensities
    are mapped to [0, 1] by dividing by 255. Frames are returned with
    0-based positional indices in increasing order.
    """
    source = Path(source)
    if format == "pgm-sequence":
        return _load_pgm_sequence(source)
    if format == "raw-y8":
        return _load_raw_y8(source)
    raise ValueError(f"unknown frame format {format!r}")


def _load_pgm_sequence(source: Path) -> list[Frame]:
    if not source.is_dir():
        raise FormatError(f"{source}: not a directory of PGM files")
    names = sorted(
        p.name for p in source.iterdir() if p.suffix.lower() in (".pgm", ".ppm")
    )
    if not names:
        raise FormatError(f"{source}: no .pgm/.ppm files found")
    _check_sequence_order(names, source)
    frames = []
    for idx, name in enumerate(names):
        gray = read_pnm(source / name)
        h, w = gray.shape
        frames.append(Frame(idx, w, h, gray.astype(np.float64) / 255.0))
    return frames


def _read_y8_header(header_path: Path):
    if not header_path.exists():
        raise FormatError(f"{header_path}: raw-y8 sidecar header missing")
    parts = header_path.read_text().split()
    if len(parts) != 3:
        raise FormatError(f"{header_path}: header must be 'W H COUNT'")
    try:
        w, h, count = (int(p) for p in parts)
    except ValueError:
        raise FormatError(f"{header_path}: non-numeric header field") from None
    if w < 1 or h < 1 or count < 0:
        raise FormatError(f"{header_path}: non-positive dimensions in header")
    return w, h, count


def _load_raw_y8(source: Path) -> list[Frame]:
    w, h, count = _read_y8_header(source.with_name(source.name + ".hdr"))
    body = source.read_bytes()
    need = w * h * count
    if len(body) != need:
        raise TruncationError(
            f"{source}: header declares {need} bytes ({count} frames of "
            f"{w}x{h}), file has {len(body)} (mismatch at byte "
            f"{min(need, len(body))})"
        )
    data = np.frombuffer(body, dtype=np.uint8).reshape(count, h, w)
    return [
        Frame(i, w, h, data[i].astype(np.float64) / 255.0) for i in range(count)
    ]


def write_frames_y8(frames: list[Frame], dest) -> None:
    """Write frames as raw-y8 (body file plus ``.hdr`` sidecar).

    Intensities are quantized with round(v * 255), so a load/write/load
    round trip is bit-identical.
    """
    dest = Path(dest)
    if not frames:
        raise ValueError("cannot write an empty frame sequence")
    w, h = frames[0].width, frames[0].height
    with open(dest, "wb") as fh:
        for frame in frames:
            if (frame.width, frame.height) != (w, h):
                raise ValueError("all frames must share one size")
            byte = np.clip(np.rint(frame.pixels * 255.0), 0, 255).astype(np.uint8)
            fh.write(byte.tobytes())
    dest.with_name(dest.name + ".hdr").write_text(f"{w} {h} {len(frames)}\n")


# ---------------------------------------------------------------------------
# Resizing
# ---------------------------------------------------------------------------

def _axis_coords(n_src: int, n_out: int) -> np.ndarray:
    # Endpoint-aligned sampling: first/last output samples coincide with the
    # first/last input samples, interior samples interpolate linearly.
    if n_out == 1:
        return np.array([0.5 * (n_src - 1)])
    return np.arange(n_out) * ((n_src - 1) / (n_out - 1))


def resize_bilinear(frame: Frame, out_w: int, out_h: int) -> Frame:
    """Resize with separable bilinear interpolation (deterministic).

    The identity resize returns a bit-identical pixel buffer; outputs stay
    within the input's [min, max] range.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target size {out_w}x{out_h} must be at least 1x1")
    if (out_w, out_h) == (frame.width, frame.height):
        return Frame(frame.index, out_w, out_h, frame.pixels.copy())
    src = frame.pixels
    xs = _axis_coords(frame.width, out_w)
    ys = _axis_coords(frame.height, out_h)
    x0 = np.clip(np.floor(xs).astype(int), 0, frame.width - 1)
    y0 = np.clip(np.floor(ys).astype(int), 0, frame.height - 1)
    x1 = np.minimum(x0 + 1, frame.width - 1)
    y1 = np.minimum(y0 + 1, frame.height - 1)
    tx = xs - x0
    ty = (ys - y0)[:, None]
    top = src[np.ix_(y0, x0)] * (1.0 - tx) + src[np.ix_(y0, x1)] * tx
    bot = src[np.ix_(y1, x0)] * (1.0 - tx) + src[np.ix_(y1, x1)] * tx
    out = top * (1.0 - ty) + bot * ty
    return Frame(frame.index, out_w, out_h, out)


# ---------------------------------------------------------------------------
# Ground truth
# ---------------------------------------------------------------------------

def load_masks(source, frame_count: int | None = None) -> GroundTruth:
    """Load per-frame binary masks (a directory of PGMs, one per frame).

    Any nonzero pixel marks an anomalous location; a frame's label is 1
    iff its mask has at least one nonzero pixel. When ``frame_count`` is
    given, a differing mask count raises AlignmentError.
    """
    source = Path(source)
    if not source.is_dir():
        raise FormatError(f"{source}: not a directory of mask PGMs")
    names = sorted(
        p.name for p in source.iterdir() if p.suffix.lower() in (".pgm", ".ppm")
    )
    if not names:
        raise FormatError(f"{source}: no mask files found")
    _check_sequence_order(names, source)
    if frame_count is not None and len(names) != frame_count:
        raise AlignmentError(
            f"{source}: {len(names)} masks for {frame_count} video frames"
        )
    masks = [read_pnm(source / name) > 0 for name in names]
    labels = np.array([1 if m.any() else 0 for m in masks], dtype=np.uint8)
    return GroundTruth(labels, masks)


def load_labels(source, frame_count: int | None = None) -> GroundTruth:
    """Load frame-level labels from a text file, one 0/1 per line."""
    values = []
    for line_no, line in enumerate(Path(source).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line not in ("0", "1"):
            raise DataError(f"{source}:{line_no}: labels must be 0 or 1")
        values.append(int(line))
    if frame_count is not None and len(values) != frame_count:
        raise AlignmentError(
            f"{source}: {len(values)} labels for {frame_count} video frames"
        )
    return GroundTruth(np.array(values, dtype=np.uint8))


def load_ground_truth(source, frame_count: int | None = None) -> GroundTruth:
    """Dispatch on path type: directory -> pixel masks, file -> label list."""
    source = Path(source)
    if source.is_dir():
        return load_masks(source, frame_count)
    return load_labels(source, frame_count)


# ---------------------------------------------------------------------------
# UMK1 activation tensors
# ---------------------------------------------------------------------------

def load_activations(source) -> list[ActivationFrame]:
    """Load a UMK1 activation file (see module docstring for the layout)."""
    source = Path(source)
    data = source.read_bytes()
    if len(data) < _UMK1_HEADER_BYTES:
        raise FormatError(f"{source}: too short for a UMK1 header")
    if data[:4] != _UMK1_MAGIC:
        raise FormatError(f"{source}: bad magic {data[:4]!r} at byte 0")
    count, channels, height, width = np.frombuffer(data, "<u4", 4, offset=4)
    expected = _UMK1_HEADER_BYTES + int(count) * int(channels) * int(height) * int(width) * 4
    if len(data) != expected:
        raise TruncationError(
            f"{source}: header declares {expected} bytes total, file has "
            f"{len(data)} (mismatch at byte {min(expected, len(data))})"
        )
    values = np.frombuffer(data, "<f4", offset=_UMK1_HEADER_BYTES)
    if not np.isfinite(values).all():
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise DataError(f"{source}: non-finite value at element {bad}")
    tensor = values.reshape(int(count), int(channels), int(height), int(width))
    return [
        ActivationFrame(i, int(channels), int(height), int(width), tensor[i])
        for i in range(int(count))
    ]


def write_activations(frames: list[ActivationFrame], dest) -> None:
    """Write activation frames as a UMK1 file."""
    if not frames:
        raise ValueError("cannot write an empty activation sequence")
    c, h, w = frames[0].channels, frames[0].height, frames[0].width
    header = _UMK1_MAGIC + np.array([len(frames), c, h, w], "<u4").tobytes()
    with open(dest, "wb") as fh:
        fh.write(header)
        for frame in frames:
            if (frame.channels, frame.height, frame.width) != (c, h, w):
                raise ValueError("all activation frames must share one shape")
            fh.write(np.ascontiguousarray(frame.values, "<f4").tobytes())
