"""ROC evaluation at frame and pixel level.

Frame level: a frame is positive if it contains any anomalous pixel; the
ROC is swept over every distinct score (equal scores form one vertex) and
the AUC is the trapezoidal area, which equals the Mann-Whitney statistic
with ties counted 1/2.

Pixel level: detection maps at the 16x12 cube-grid resolution are
upsampled (nearest-neighbor over patch extents) to mask resolution and
spatially smoothed. At a threshold t, a positive frame is a true positive
only if the detected pixels (map >= t) cover strictly more than 40% of
its ground-truth anomalous pixels; a negative frame is a false positive
as soon as any pixel is detected (configurable via negative_min_pixels).
Each frame's detection status flips at exactly one critical threshold, so
the sweep reduces to a ROC over per-frame critical scores.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve1d

from .errors import AlignmentError, CapabilityError, DataError
from .features import GRID_H, GRID_W, BinLayout
from .ingest import GroundTruth
from .pipeline import DetectionResult, _fill_nearest

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass
class RocReport:
    """ROC vertices (descending thresholds, +inf sentinel first) and AUC."""

    level: str
    auc: float
    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray

    def to_dict(self) -> dict:
        points = [
            {
                "threshold": None if math.isinf(t) else float(t),
                "fpr": float(f),
                "tpr": float(p),
            }
            for t, f, p in zip(self.thresholds, self.fpr, self.tpr)
        ]
        return {"level": self.level, "auc": self.auc, "points": points}

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def write_roc_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("fpr,tpr\n")
            for f, p in zip(self.fpr, self.tpr):
                fh.write(f"{f:.17g},{p:.17g}\n")


def _roc(scores: np.ndarray, labels: np.ndarray, level: str) -> RocReport:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise AlignmentError(
            f"scores {scores.shape} and labels {labels.shape} must be equal-length vectors"
        )
    pos = int((labels == 1).sum())
    neg = int((labels == 0).sum())
    if pos + neg != labels.size:
        raise DataError("labels must be 0 or 1")
    if pos == 0 or neg == 0:
        raise DataError(
            f"AUC undefined: need both classes, got {pos} positives / {neg} negatives"
        )
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order] == 1
    # one ROC vertex per distinct score: cumulative counts at group ends
    last_of_group = np.flatnonzero(np.diff(s) != 0)
    ends = np.concatenate([last_of_group, [s.size - 1]])
    cum_tp = np.cumsum(y)[ends]
    cum_fp = np.cumsum(~y)[ends]
    thresholds = np.concatenate([[np.inf], s[ends]])
    tpr = np.concatenate([[0.0], cum_tp / pos])
    fpr = np.concatenate([[0.0], cum_fp / neg])
    auc = float(_trapezoid(tpr, fpr))
    return RocReport(level, auc, thresholds, fpr, tpr)


def frame_auc(scores, labels) -> RocReport:
    """Frame-level ROC report over per-frame scores and binary labels."""
    return _roc(np.asarray(scores, dtype=np.float64), np.asarray(labels), "frame")


# ---------------------------------------------------------------------------
# Pixel level
# ---------------------------------------------------------------------------

@dataclass
class ScoreMap:
    """Spatial detection scores of one frame at cube-grid resolution."""

    frame: int
    grid: np.ndarray  # (12, 16)

    def to_pixels(self, height: int, width: int) -> np.ndarray:
        """Nearest-neighbor upsampling over patch extents.

        Grid cell (gy, gx) covers pixels [gx*W/16, (gx+1)*W/16) x
        [gy*H/12, (gy+1)*H/12): at the 160x120 working size that is the
        exact 10x10 patch box.
        """
        ys = (np.arange(height) * GRID_H) // height
        xs = (np.arange(width) * GRID_W) // width
        return self.grid[np.ix_(ys, xs)]


def _gaussian_taps(sigma: float) -> np.ndarray:
    radius = math.ceil(3 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    return np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))


_DEN_CACHE: dict = {}


def smooth_map(pixels: np.ndarray, sigma_px: float) -> np.ndarray:
    """2D Gaussian smoothing, truncated and renormalized at image borders."""
    if sigma_px < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma_px}")
    if sigma_px == 0:
        return pixels.astype(np.float64, copy=True)
    taps = _gaussian_taps(sigma_px)
    num = convolve1d(
        convolve1d(pixels.astype(np.float64), taps, axis=0, mode="constant"),
        taps,
        axis=1,
        mode="constant",
    )
    key = (pixels.shape, float(sigma_px))
    den = _DEN_CACHE.get(key)
    if den is None:
        ones = np.ones(pixels.shape)
        den = convolve1d(
            convolve1d(ones, taps, axis=0, mode="constant"), taps, axis=1, mode="constant"
        )
        _DEN_CACHE[key] = den
    return num / den


def cube_score_map(result: DetectionResult, channel: str = "fused") -> list[ScoreMap]:
    """Per-frame spatial score grids from a detection run.

    Window scores land on the grid cells of their bin: for the motion
    channel only on cells with at least one surviving (non-static) cube in
    that window, elsewhere 0; for the appearance channel uniformly on the
    whole bin (bins are its finest granularity). Cell values then follow
    the frame rule: mean over covering windows, nearest-neighbor backfill
    for uncovered frames. channel 'fused' averages the enabled channels.
    """
    if not result.windows:
        raise CapabilityError(
            "detection result carries no per-window records; rerun with maps enabled"
        )
    enabled = result.series.channels
    if channel == "fused":
        wanted = enabled
    elif channel in enabled:
        wanted = (channel,)
    else:
        raise CapabilityError(f"channel {channel!r} was not part of the run {enabled}")
    t = result.frame_count
    w = result.config.w
    bin_grids = {
        "motion": result.config.bins.patch_bin_grid(),
        "appearance": BinLayout(2, 2).patch_bin_grid(),
    }
    per_channel = []
    for ch in wanted:
        sums = np.zeros((t, GRID_H, GRID_W))
        counts = np.zeros(t)
        for rec in result.windows:
            cell_scores = rec.bin_scores[ch][bin_grids[ch]]
            if ch == "motion":
                if rec.presence is None:
                    raise CapabilityError(
                        "motion window records lack cube presence; rerun with maps enabled"
                    )
                cell_scores = cell_scores * rec.presence
            lo, hi = rec.start + w, min(rec.start + 2 * w, t)
            sums[lo:hi] += cell_scores
            counts[lo:hi] += 1
        covered = counts > 0
        grids = np.where(covered[:, None, None], sums / np.maximum(counts, 1)[:, None, None], 0.0)
        flat = _fill_nearest(grids.reshape(t, -1), covered)
        per_channel.append(flat.reshape(t, GRID_H, GRID_W))
    merged = np.mean(per_channel, axis=0)
    return [ScoreMap(f, merged[f]) for f in range(t)]


def _critical_score(pixels: np.ndarray, mask: np.ndarray | None, negative_min_pixels: int) -> float:
    """Largest threshold at which this frame counts as detected.

    Positive frame: detected iff strictly more than 40% of its ground-truth
    pixels have map >= t, so the flip happens at the (floor(0.4*n)+1)-th
    largest masked value. Negative frame: at the negative_min_pixels-th
    largest value overall (default 1 = any detected pixel).
    """
    if mask is not None and mask.any():
        vals = pixels[mask]
        # floor(0.4 * n) + 1 in exact integer arithmetic
        need = (2 * vals.size) // 5 + 1
        return float(np.partition(vals, vals.size - need)[vals.size - need])
    flat = pixels.ravel()
    j = min(negative_min_pixels, flat.size)
    return float(np.partition(flat, flat.size - j)[flat.size - j])


def pixel_auc(
    maps: list[ScoreMap],
    gt: GroundTruth,
    sigma_px: float = 10.0,
    negative_min_pixels: int = 1,
) -> RocReport:
    """Pixel-level ROC report under the 40%-overlap detection rule."""
    if gt.pixel_masks is None:
        raise CapabilityError("pixel-level evaluation needs per-pixel ground-truth masks")
    if negative_min_pixels < 1:
        raise ValueError("negative_min_pixels must be >= 1")
    if len(maps) != len(gt.pixel_masks):
        raise AlignmentError(
            f"{len(maps)} score maps but {len(gt.pixel_masks)} ground-truth masks"
        )
    criticals = np.empty(len(maps))
    for i, (smap, mask) in enumerate(zip(maps, gt.pixel_masks)):
        h, wd = mask.shape
        pixels = smooth_map(smap.to_pixels(h, wd), sigma_px)
        label = gt.frame_labels[i] == 1
        criticals[i] = _critical_score(pixels, mask if label else None, negative_min_pixels)
    return _roc(criticals, gt.frame_labels, "pixel")


# ---------------------------------------------------------------------------
# Map files
# ---------------------------------------------------------------------------

def write_maps_npz(result: DetectionResult, path) -> None:
    """Save per-frame score grids, one (T,12,16) array per channel + 'fused'."""
    arrays = {
        ch: np.stack([m.grid for m in cube_score_map(result, ch)])
        for ch in result.series.channels
    }
    arrays["fused"] = np.stack([m.grid for m in cube_score_map(result, "fused")])
    np.savez_compressed(path, **arrays)


def load_maps_npz(path, channel: str = "fused") -> list[ScoreMap]:
    """Load one channel's score grids back as ScoreMaps."""
    with np.load(path) as data:
        if channel not in data:
            raise CapabilityError(
                f"{path}: no {channel!r} maps present (has {sorted(data.keys())})"
            )
        grids = data[channel]
    if grids.ndim != 3 or grids.shape[1:] != (GRID_H, GRID_W):
        raise DataError(f"{path}: maps must be (frames, {GRID_H}, {GRID_W})")
    return [ScoreMap(f, grids[f]) for f in range(grids.shape[0])]
