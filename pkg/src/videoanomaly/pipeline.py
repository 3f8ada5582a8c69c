"""End-to-end online anomaly detector.

The detector slides a 2w-frame window over the stream with stride s. Per
window it builds labeled example batches for every (bin, channel) pair
(first half labeled 0, second half 1), runs the unmasking loop on each,
and assigns the resulting scores to the frames of the window's second
half. Per-frame aggregation averages over all covering windows, takes the
max over spatial bins, averages the enabled channels (late fusion), and
smooths temporally with a truncated-renormalized Gaussian.

Scores are final as soon as every window covering a frame has closed, so
the detector emits them online with bounded lookahead: at the close of
window j, frames below (j+1)*s + w are finalized. The emitted smoothed
value uses the truncated kernel over the finalized prefix; finalize()
recomputes the whole series from the per-window records and is
bit-identical to a batch run over the same input.

Stage 1 (ingest + features) and stage 2 (unmasking + aggregation) are
separable: with workers > 1 they communicate through a bounded queue of
per-window bundles and stage 2 fans the (bin x channel) unmasking calls
out to a thread pool. Results are identical for any worker count.
"""

from __future__ import annotations

import math
import queue
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    AlignmentError,
    CapabilityError,
    FormatError,
    StreamTooShortError,
)
from .features import (
    GRID_H,
    GRID_W,
    STACK,
    WORK_H,
    WORK_W,
    BinLayout,
    _cube_grid,
    bin_activations,
)
from .ingest import ActivationFrame, Frame, resize_bilinear
from .unmasking import UnmaskingProfile, WindowBatch, score, unmask

CHANNELS = ("motion", "appearance", "fusion")
APPEARANCE_BINS = 4
CSV_HEADER = "frame,score_motion,score_appearance,score_fused,score_smoothed"


@dataclass
class DetectorConfig:
    """Detector parameters. Defaults: w=10, s=5, k=10, m=50, lambda=0.1,
    2x2 bins, smoothing sigma 10 frames, motion channel, one worker."""

    w: int = 10
    stride: int = 5
    k: int = 10
    m: int = 50
    lam: float = 0.1
    bins: BinLayout = field(default_factory=BinLayout)
    smooth_sigma: float = 10.0
    channel: str = "motion"
    workers: int = 1

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}, got {self.channel!r}")
        if self.w < 1:
            raise ValueError(f"w must be >= 1, got {self.w}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        # stride <= w keeps consecutive second halves overlapping, so every
        # frame from w onward is covered by some window
        if self.stride > self.w:
            raise ValueError(f"stride {self.stride} must not exceed w {self.w}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.m < 2 or self.m % 2:
            raise ValueError(f"m must be even and >= 2, got {self.m}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.smooth_sigma < 0:
            raise ValueError(f"smooth-sigma must be >= 0, got {self.smooth_sigma}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if "motion" in self.enabled_channels and self.w % STACK:
            raise ValueError(
                f"w must be a multiple of {STACK} for the motion channel "
                f"(cube stacks must tile each half-window), got {self.w}"
            )

    @property
    def enabled_channels(self) -> tuple[str, ...]:
        if self.channel == "fusion":
            return ("motion", "appearance")
        return (self.channel,)

    def n_bins(self, channel: str) -> int:
        # appearance binning is fixed by the 13x13 activation geometry
        return self.bins.n_bins if channel == "motion" else APPEARANCE_BINS

    def to_dict(self) -> dict:
        return {
            "w": self.w,
            "stride": self.stride,
            "k": self.k,
            "m": self.m,
            "lambda": self.lam,
            "bins": f"{self.bins.rows}x{self.bins.cols}",
            "smooth_sigma": self.smooth_sigma,
            "channel": self.channel,
            "workers": self.workers,
        }


def plan_windows(frame_count: int, w: int, stride: int) -> list[tuple[int, int]]:
    """Sliding windows of length 2w starting at 0, s, 2s, ...

    Count = floor((T - 2w)/s) + 1; each window's second half
    [start+w, start+2w) is the segment its score is assigned to.
    """
    if w < 1 or stride < 1:
        raise ValueError("w and stride must be >= 1")
    if frame_count < 2 * w:
        raise StreamTooShortError(
            f"stream has {frame_count} frames, needs at least {2 * w}"
        )
    count = (frame_count - 2 * w) // stride + 1
    return [(j * stride, j * stride + 2 * w) for j in range(count)]


class FeatureStore:
    """Per-frame feature caches shared by the batch and streaming paths.

    Holds resized frames, per-slot motion cube grids (keyed by the slot's
    first frame) and per-frame appearance vectors. evict_below() drops
    everything no window at or after the given frame can need, which
    bounds memory to roughly one window span.
    """

    def __init__(self, config: DetectorConfig):
        self.config = config
        self.frames_seen = 0
        self.extract_seconds = 0.0
        self._bin_grid = config.bins.patch_bin_grid()
        self._resized: dict[int, np.ndarray] = {}
        self._slots: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._app: dict[int, np.ndarray] = {}

    def add(self, frame: Frame | None, activation: ActivationFrame | None) -> int:
        """Ingest one stream position; returns its frame index."""
        idx = self.frames_seen
        channels = self.config.enabled_channels
        t0 = time.perf_counter()
        if "motion" in channels:
            if frame is None:
                raise CapabilityError("motion channel needs a video frame per push")
            if frame.index != idx:
                raise ValueError(f"expected frame index {idx}, got {frame.index}")
            if (frame.width, frame.height) != (WORK_W, WORK_H):
                frame = resize_bilinear(frame, WORK_W, WORK_H)
            self._resized[idx] = frame.pixels
        if "appearance" in channels:
            if activation is None:
                raise CapabilityError(
                    "appearance channel needs an activation tensor per push"
                )
            if activation.index != idx:
                raise ValueError(
                    f"expected activation index {idx}, got {activation.index}"
                )
            self._app[idx] = np.stack([f.values for f in bin_activations(activation)])
        self.extract_seconds += time.perf_counter() - t0
        self.frames_seen += 1
        return idx

    def slot(self, start: int) -> tuple[np.ndarray, np.ndarray]:
        """Cube grid of the 5-frame stack starting at ``start``.

        Returns (vectors (12,16,500) with survivors L2-normalized,
        keep (12,16) bool of non-static cells).
        """
        cached = self._slots.get(start)
        if cached is not None:
            return cached
        t0 = time.perf_counter()
        try:
            stack = np.stack([self._resized[start + i] for i in range(STACK)])
        except KeyError as exc:
            raise ValueError(f"frame {exc.args[0]} not available for slot {start}") from None
        result = _cube_grid(stack)
        self._slots[start] = result
        self.extract_seconds += time.perf_counter() - t0
        return result

    def appearance(self, frame: int) -> np.ndarray:
        """(4, 12544) per-bin appearance vectors of one frame."""
        try:
            return self._app[frame]
        except KeyError:
            raise ValueError(f"appearance features for frame {frame} not available") from None

    def bin_cell_mask(self, bin: int) -> np.ndarray:
        return self._bin_grid == bin

    def evict_below(self, frame: int) -> None:
        for store in (self._resized, self._app):
            for i in [i for i in store if i < frame]:
                del store[i]
        for s in [s for s in self._slots if s < frame]:
            del self._slots[s]


def window_batch(
    window: tuple[int, int], bin: int, channel: str, store: FeatureStore
) -> WindowBatch:
    """Labeled examples of one (window, bin, channel) triple.

    Motion examples are the surviving cubes of the non-overlapping 5-frame
    slots tiling the window (aligned to its start), labeled by the half
    the slot starts in. Appearance examples are the per-frame bin vectors,
    labeled by the frame's half.
    """
    start, end = window
    w = (end - start) // 2
    window_id = start // store.config.stride
    if channel == "motion":
        xs, ys = [], []
        mask = store.bin_cell_mask(bin)
        for slot_start in range(start, end, STACK):
            vectors, keep = store.slot(slot_start)
            cell = keep & mask
            if cell.any():
                xs.append(vectors[cell])
                ys.append(
                    np.full(int(cell.sum()), 0 if slot_start - start < w else 1, np.uint8)
                )
        if xs:
            x = np.concatenate(xs)
            y = np.concatenate(ys)
        else:
            x = np.empty((0, PATCH_DIM))
            y = np.empty(0, np.uint8)
        return WindowBatch(x, y, window_id, bin, channel)
    if channel == "appearance":
        x = np.stack([store.appearance(f)[bin] for f in range(start, end)])
        y = (np.arange(start, end) - start >= w).astype(np.uint8)
        return WindowBatch(x, y, window_id, bin, channel)
    raise ValueError(f"unknown channel {channel!r}")


PATCH_DIM = 500


@dataclass
class WindowBundle:
    """Stage-1 output for one window: its batches plus map provenance."""

    window_id: int
    start: int
    batches: list[WindowBatch]
    presence: np.ndarray | None  # (12,16) bool, any surviving cube (motion)


@dataclass
class WindowRecord:
    """Stage-2 output for one window."""

    window_id: int
    start: int
    bin_scores: dict[str, np.ndarray]
    profiles: dict[str, list[UnmaskingProfile]]
    presence: np.ndarray | None


def _build_bundle(window_id: int, config: DetectorConfig, store: FeatureStore) -> WindowBundle:
    start = window_id * config.stride
    window = (start, start + 2 * config.w)
    batches = []
    presence = None
    for channel in config.enabled_channels:
        for b in range(config.n_bins(channel)):
            batches.append(window_batch(window, b, channel, store))
    if "motion" in config.enabled_channels:
        presence = np.zeros((GRID_H, GRID_W), dtype=bool)
        for slot_start in range(*window, STACK):
            presence |= store.slot(slot_start)[1]
    store.evict_below(start + config.stride)
    return WindowBundle(window_id, start, batches, presence)


def _score_bundle(
    bundle: WindowBundle, config: DetectorConfig, pool: ThreadPoolExecutor | None = None
) -> WindowRecord:
    if pool is not None:
        profiles = list(
            pool.map(lambda b: unmask(b, config.k, config.m, config.lam), bundle.batches)
        )
    else:
        profiles = [unmask(b, config.k, config.m, config.lam) for b in bundle.batches]
    bin_scores: dict[str, np.ndarray] = {}
    by_channel: dict[str, list[UnmaskingProfile]] = {}
    for batch, profile in zip(bundle.batches, profiles):
        by_channel.setdefault(batch.channel, []).append(profile)
        bin_scores.setdefault(
            batch.channel, np.zeros(config.n_bins(batch.channel))
        )[batch.bin] = score(profile)
    return WindowRecord(bundle.window_id, bundle.start, bin_scores, by_channel, bundle.presence)


# ---------------------------------------------------------------------------
# Aggregation and smoothing
# ---------------------------------------------------------------------------

@dataclass
class ScoreSeries:
    """Per-frame anomaly scores at every aggregation stage."""

    frame_count: int
    channels: tuple[str, ...]
    per_bin: dict[str, np.ndarray]  # channel -> (T, n_bins)
    per_channel: dict[str, np.ndarray]  # channel -> (T,)
    fused: np.ndarray
    smoothed: np.ndarray


def _fill_nearest(values: np.ndarray, covered: np.ndarray) -> np.ndarray:
    """Backfill rows of uncovered frames from the nearest covered frame.

    Equidistant neighbors resolve to the earlier frame.
    """
    idx = np.flatnonzero(covered)
    if idx.size == 0:
        raise ValueError("no frame is covered by any window")
    frames = np.arange(len(covered))
    pos = np.searchsorted(idx, frames)
    left = idx[np.clip(pos - 1, 0, idx.size - 1)]
    right = idx[np.clip(pos, 0, idx.size - 1)]
    pick = np.where(np.abs(frames - left) <= np.abs(right - frames), left, right)
    return values[pick]


def smooth(series, sigma: float) -> np.ndarray:
    """Temporal Gaussian smoothing, truncated and renormalized at borders.

    Kernel radius is ceil(3*sigma); sigma = 0 is the identity. Output is
    clamped to [0,1] (a no-op for in-range input, by kernel normalization).
    """
    x = np.asarray(series, dtype=np.float64)
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0 or x.size == 0:
        return x.copy()
    radius = math.ceil(3 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))
    num = np.convolve(x, taps)[radius : radius + x.size]
    den = np.convolve(np.ones(x.size), taps)[radius : radius + x.size]
    return np.clip(num / den, 0.0, 1.0)


def aggregate(
    records: Sequence[WindowRecord], frame_count: int, config: DetectorConfig
) -> ScoreSeries:
    """Reduce per-window bin scores to the per-frame series.

    Per (bin, channel): mean over the windows whose second half contains
    the frame, frames with no covering window backfilled from the nearest
    covered frame. Then max over bins, mean over channels, smoothing.
    """
    channels = config.enabled_channels
    w = config.w
    counts = np.zeros(frame_count)
    sums = {ch: np.zeros((frame_count, config.n_bins(ch))) for ch in channels}
    for rec in records:
        lo, hi = rec.start + w, min(rec.start + 2 * w, frame_count)
        counts[lo:hi] += 1
        for ch in channels:
            sums[ch][lo:hi] += rec.bin_scores[ch]
    covered = counts > 0
    per_bin = {}
    per_channel = {}
    for ch in channels:
        filled = np.where(covered[:, None], sums[ch] / np.maximum(counts, 1)[:, None], 0.0)
        filled = _fill_nearest(filled, covered)
        per_bin[ch] = filled
        per_channel[ch] = filled.max(axis=1)
    fused = np.mean([per_channel[ch] for ch in channels], axis=0)
    return ScoreSeries(
        frame_count, channels, per_bin, per_channel, fused, smooth(fused, config.smooth_sigma)
    )


# ---------------------------------------------------------------------------
# Streaming detector
# ---------------------------------------------------------------------------

@dataclass
class Emission:
    """One finalized frame score, emitted online.

    ``smoothed`` uses the truncated kernel over the finalized prefix and
    therefore firms up to the batch value once the stream moves on.
    """

    frame: int
    motion: float | None
    appearance: float | None
    fused: float
    smoothed: float


@dataclass
class DetectionResult:
    series: ScoreSeries
    config: DetectorConfig
    frame_count: int
    windows: list[WindowRecord]
    timing: dict[str, float]

    @property
    def extraction_fps(self) -> float:
        t = self.timing.get("extract_seconds", 0.0)
        return self.frame_count / t if t > 0 else float("inf")

    @property
    def prediction_fps(self) -> float:
        t = self.timing.get("predict_seconds", 0.0)
        return self.frame_count / t if t > 0 else float("inf")


class StreamingDetector:
    """Push frames one at a time; receive finalized scores as they firm up.

    A frame is emitted exactly once, in strictly increasing order, as soon
    as every window covering it has closed. finalize() ends the stream,
    emits the tail, and returns the full DetectionResult, bit-identical
    to running the same input as one batch.
    """

    def __init__(self, config: DetectorConfig | None = None):
        self.config = config or DetectorConfig()
        self.store = FeatureStore(self.config)
        self.records: list[WindowRecord] = []
        self.predict_seconds = 0.0
        self._next_window = 0
        self._emitted = 0
        self._counts = np.zeros(0)
        self._sums = {ch: np.zeros((0, self.config.n_bins(ch))) for ch in self.config.enabled_channels}
        self._finalized = False

    def push(
        self, frame: Frame | None = None, activation: ActivationFrame | None = None
    ) -> list[Emission]:
        """Ingest one stream position; returns newly finalized frames."""
        if self._finalized:
            raise ValueError("detector already finalized")
        self.store.add(frame, activation)
        cfg = self.config
        out: list[Emission] = []
        while self._next_window * cfg.stride + 2 * cfg.w <= self.store.frames_seen:
            j = self._next_window
            bundle = _build_bundle(j, cfg, self.store)
            t0 = time.perf_counter()
            record = _score_bundle(bundle, cfg)
            self._absorb(record)
            self.predict_seconds += time.perf_counter() - t0
            self._next_window += 1
            out.extend(self._emit_upto((j + 1) * cfg.stride + cfg.w))
        return out

    def _absorb(self, record: WindowRecord) -> None:
        self.records.append(record)
        lo, hi = record.start + self.config.w, record.start + 2 * self.config.w
        if hi > self._counts.size:
            grow = max(2 * self._counts.size, hi)
            self._counts = np.concatenate([self._counts, np.zeros(grow - self._counts.size)])
            for ch, arr in self._sums.items():
                pad = np.zeros((grow - arr.shape[0], arr.shape[1]))
                self._sums[ch] = np.concatenate([arr, pad])
        self._counts[lo:hi] += 1
        for ch in self.config.enabled_channels:
            self._sums[ch][lo:hi] += record.bin_scores[ch]

    def _emit_upto(self, horizon: int) -> list[Emission]:
        horizon = min(horizon, self.store.frames_seen)
        if horizon <= self._emitted:
            return []
        cfg = self.config
        counts = self._counts[:horizon]
        covered = counts > 0
        per_channel = {}
        for ch in cfg.enabled_channels:
            filled = np.where(
                covered[:, None], self._sums[ch][:horizon] / np.maximum(counts, 1)[:, None], 0.0
            )
            per_channel[ch] = _fill_nearest(filled, covered).max(axis=1)
        fused = np.mean([per_channel[ch] for ch in cfg.enabled_channels], axis=0)
        smoothed = smooth(fused, cfg.smooth_sigma)
        out = []
        for f in range(self._emitted, horizon):
            out.append(
                Emission(
                    f,
                    float(per_channel["motion"][f]) if "motion" in per_channel else None,
                    float(per_channel["appearance"][f]) if "appearance" in per_channel else None,
                    float(fused[f]),
                    float(smoothed[f]),
                )
            )
        self._emitted = horizon
        return out

    def finalize(self) -> tuple[list[Emission], DetectionResult]:
        """End the stream: emit the tail and return the batch-equal result."""
        if self._finalized:
            raise ValueError("detector already finalized")
        self._finalized = True
        frame_count = self.store.frames_seen
        if self._next_window == 0:
            raise StreamTooShortError(
                f"stream has {frame_count} frames, needs at least {2 * self.config.w}"
            )
        t0 = time.perf_counter()
        tail = self._emit_upto(frame_count)
        series = aggregate(self.records, frame_count, self.config)
        self.predict_seconds += time.perf_counter() - t0
        result = DetectionResult(
            series,
            self.config,
            frame_count,
            self.records,
            {
                "extract_seconds": self.store.extract_seconds,
                "predict_seconds": self.predict_seconds,
            },
        )
        return tail, result


# ---------------------------------------------------------------------------
# Batch entry point
# ---------------------------------------------------------------------------

def _check_inputs(frames, activations, config) -> int:
    channels = config.enabled_channels
    if "motion" in channels and frames is None:
        raise CapabilityError(f"channel {config.channel!r} needs --frames input")
    if "appearance" in channels and activations is None:
        raise CapabilityError(f"channel {config.channel!r} needs --activations input")
    if frames is not None and activations is not None and len(frames) != len(activations):
        raise AlignmentError(
            f"{len(frames)} video frames but {len(activations)} activation frames"
        )
    return len(frames) if frames is not None else len(activations)


def run_detector(
    frames: Sequence[Frame] | None = None,
    activations: Sequence[ActivationFrame] | None = None,
    config: DetectorConfig | None = None,
) -> DetectionResult:
    """Run the full detector over in-memory inputs.

    Uses the streaming engine inline for workers=1 and the two-stage
    bounded-queue pipeline for workers>1; both produce identical scores.
    """
    config = config or DetectorConfig()
    frame_count = _check_inputs(frames, activations, config)
    plan_windows(frame_count, config.w, config.stride)  # validates length early
    if config.workers == 1:
        det = StreamingDetector(config)
        for i in range(frame_count):
            det.push(
                frames[i] if frames is not None else None,
                activations[i] if activations is not None else None,
            )
        _, result = det.finalize()
        return result
    return _run_threaded(frames, activations, config, frame_count)


def _run_threaded(frames, activations, config, frame_count) -> DetectionResult:
    windows = plan_windows(frame_count, config.w, config.stride)
    store = FeatureStore(config)
    bundles: queue.Queue = queue.Queue(maxsize=4)

    def produce():
        try:
            next_window = 0
            for i in range(frame_count):
                store.add(
                    frames[i] if frames is not None else None,
                    activations[i] if activations is not None else None,
                )
                while (
                    next_window < len(windows)
                    and next_window * config.stride + 2 * config.w <= store.frames_seen
                ):
                    bundles.put(_build_bundle(next_window, config, store))
                    next_window += 1
            bundles.put(None)
        except BaseException as exc:  # surfaced on the consumer side
            bundles.put(exc)

    producer = threading.Thread(target=produce, name="feature-stage", daemon=True)
    producer.start()
    records: list[WindowRecord] = []
    predict_seconds = 0.0
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        while True:
            item = bundles.get()
            if item is None:
                break
            if isinstance(item, BaseException):
                raise item
            t0 = time.perf_counter()
            records.append(_score_bundle(item, config, pool))
            predict_seconds += time.perf_counter() - t0
    producer.join()
    t0 = time.perf_counter()
    series = aggregate(records, frame_count, config)
    predict_seconds += time.perf_counter() - t0
    return DetectionResult(
        series,
        config,
        frame_count,
        records,
        {"extract_seconds": store.extract_seconds, "predict_seconds": predict_seconds},
    )


# ---------------------------------------------------------------------------
# Score CSV and debug dumps
# ---------------------------------------------------------------------------

def write_scores_csv(series: ScoreSeries, path) -> None:
    """Write `frame,score_motion,score_appearance,score_fused,score_smoothed`;
    columns of disabled channels are left blank."""

    def fmt(v):
        return f"{v:.17g}"

    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for f in range(series.frame_count):
            motion = fmt(series.per_channel["motion"][f]) if "motion" in series.per_channel else ""
            app = (
                fmt(series.per_channel["appearance"][f])
                if "appearance" in series.per_channel
                else ""
            )
            fh.write(
                f"{f},{motion},{app},{fmt(series.fused[f])},{fmt(series.smoothed[f])}\n"
            )


def read_scores_csv(path) -> dict[str, np.ndarray | None]:
    """Read a score CSV back into column arrays (None for blank columns)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise FormatError(f"{path}: expected header {CSV_HEADER!r}")
    names = CSV_HEADER.split(",")
    cols: dict[str, list] = {n: [] for n in names}
    for line_no, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(names):
            raise FormatError(f"{path}:{line_no}: expected {len(names)} columns")
        for name, part in zip(names, parts):
            cols[name].append(part)
    out: dict[str, np.ndarray | None] = {}
    frames = np.array([int(v) for v in cols["frame"]])
    if frames.size and not np.array_equal(frames, np.arange(frames.size)):
        raise FormatError(f"{path}: frame column must be 0..N-1 in order")
    out["frame"] = frames
    for name in names[1:]:
        vals = cols[name]
        if all(v == "" for v in vals):
            out[name] = None
        else:
            try:
                out[name] = np.array([float(v) for v in vals])
            except ValueError:
                raise FormatError(f"{path}: non-numeric value in column {name}") from None
    return out


def dump_profiles_csv(result: DetectionResult, path) -> None:
    """One row per (window, bin, channel, loop): the accuracy profile dump."""
    with open(path, "w") as fh:
        fh.write("window_id,bin,channel,loop,accuracy\n")
        for rec in result.windows:
            for ch, profiles in rec.profiles.items():
                for b, profile in enumerate(profiles):
                    for loop, acc in enumerate(profile.accuracies):
                        fh.write(f"{rec.window_id},{b},{ch},{loop},{acc:.17g}\n")


def dump_bins_json(result: DetectionResult, path) -> None:
    """Per-window bin scores keyed by window id, for debugging."""
    import json

    payload = {
        str(rec.window_id): {
            "start": rec.start,
            **{ch: [float(v) for v in scores] for ch, scores in rec.bin_scores.items()},
        }
        for rec in result.windows
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
