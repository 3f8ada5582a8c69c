"""Seeded synthetic inputs for tests, demos and benchmarking.

Three kinds of video: i.i.d. noise (every cube survives the static gate),
a periodically repeating segment (every window's halves are identical, the
canonical chance-level control), and a moving block whose velocity jumps
for a known frame range (an injected anomaly with labels by construction).
"""

from __future__ import annotations

import numpy as np

from .features import ACT_CHANNELS, ACT_SIZE, WORK_H, WORK_W
from .ingest import ActivationFrame, Frame


def noise_video(
    frame_count: int, width: int = WORK_W, height: int = WORK_H, seed: int = 0
) -> list[Frame]:
    """Independent uniform-noise frames; full motion everywhere."""
    rng = np.random.default_rng(seed)
    data = rng.random((frame_count, height, width))
    return [Frame(i, width, height, data[i]) for i in range(frame_count)]


def repeating_video(
    frame_count: int,
    period: int = 10,
    width: int = WORK_W,
    height: int = WORK_H,
    seed: int = 0,
) -> list[Frame]:
    """One noise segment of ``period`` frames repeated forever.

    Any window whose half length is a multiple of the period has
    example-for-example identical halves, forcing chance-level scores.
    """
    rng = np.random.default_rng(seed)
    segment = rng.random((period, height, width))
    return [
        Frame(i, width, height, segment[i % period].copy()) for i in range(frame_count)
    ]


def _coverage(n: int, lo: float, hi: float) -> np.ndarray:
    """Per-pixel overlap of [i, i+1) with [lo, hi), for sub-pixel rendering."""
    i = np.arange(n, dtype=np.float64)
    return np.clip(np.minimum(i + 1.0, hi) - np.maximum(i, lo), 0.0, 1.0)


def moving_block_video(
    frame_count: int = 600,
    width: int = WORK_W,
    height: int = WORK_H,
    block: int = 30,
    speed: float = 0.15,
    fast_range: tuple[int, int] = (300, 360),
    fast_factor: float = 4.0,
    background: float = 0.5,
    foreground: float = 0.0,
    start_x: float = 5.0,
) -> tuple[list[Frame], np.ndarray]:
    """A block sliding at constant speed, ``fast_factor`` times faster inside
    ``fast_range`` (half-open). Returns (frames, per-frame 0/1 labels).

    Deterministic. The block is rendered with sub-pixel coverage so motion
    between frames is smooth; the static background contributes no cubes.
    """
    lo, hi = fast_range
    if not (0 <= lo <= hi <= frame_count):
        raise ValueError(f"fast range {fast_range} outside 0..{frame_count}")
    y0 = (height - block) / 2.0
    cover_y = _coverage(height, y0, y0 + block)
    frames = []
    labels = np.zeros(frame_count, dtype=np.uint8)
    x = start_x
    for t in range(frame_count):
        fast = lo <= t < hi
        labels[t] = 1 if fast else 0
        cover_x = _coverage(width, x, x + block)
        cover = np.outer(cover_y, cover_x)
        img = background * (1.0 - cover) + foreground * cover
        frames.append(Frame(t, width, height, img))
        x += speed * (fast_factor if fast else 1.0)
        if x + block >= width:
            raise ValueError("block left the frame; lower speed or frame_count")
    return frames, labels


def block_event_video(
    frame_count: int = 240,
    period: int = 10,
    block: int = 30,
    speed: float = 1.0,
    active_range: tuple[int, int] = (120, 180),
    start_x: float = 30.0,
    y0: float = 15.0,
    foreground: float = 0.0,
    width: int = WORK_W,
    height: int = WORK_H,
    seed: int = 0,
) -> tuple[list[Frame], np.ndarray, list[np.ndarray]]:
    """A block that exists only inside ``active_range``, sliding over a
    periodically repeating noise background.

    Outside the event every window's halves are exact twins (chance-level
    scores); during it the block breaks the symmetry at the cells it
    occupies, which makes this the canonical input for localization tests.
    Returns (frames, per-frame labels, per-frame boolean masks).
    """
    lo, hi = active_range
    if not (0 <= lo <= hi <= frame_count):
        raise ValueError(f"active range {active_range} outside 0..{frame_count}")
    rng = np.random.default_rng(seed)
    segment = rng.random((period, height, width))
    # textured sprite: a flat block would static-gate its own interior cells
    sprite = foreground + (1.0 - foreground) * rng.random((block, block))
    row = int(round(y0))
    frames = []
    labels = np.zeros(frame_count, dtype=np.uint8)
    masks = []
    for t in range(frame_count):
        img = segment[t % period].copy()
        mask = np.zeros((height, width), dtype=bool)
        if lo <= t < hi:
            labels[t] = 1
            x = int(round(start_x + speed * (t - lo)))
            if x + block >= width or row + block >= height:
                raise ValueError("block left the frame; lower speed or event length")
            img[row : row + block, x : x + block] = sprite
            mask[row : row + block, x : x + block] = True
        frames.append(Frame(t, width, height, img))
        masks.append(mask)
    return frames, labels, masks


def noise_activations(frame_count: int, seed: int = 0) -> list[ActivationFrame]:
    """Independent nonnegative noise tensors shaped like conv activations."""
    rng = np.random.default_rng(seed)
    data = rng.random((frame_count, ACT_CHANNELS, ACT_SIZE, ACT_SIZE), dtype=np.float32)
    return [
        ActivationFrame(i, ACT_CHANNELS, ACT_SIZE, ACT_SIZE, data[i])
        for i in range(frame_count)
    ]


def repeating_activations(
    frame_count: int, period: int = 10, seed: int = 0
) -> list[ActivationFrame]:
    """One activation segment repeated forever (twin-stream control)."""
    rng = np.random.default_rng(seed)
    segment = rng.random((period, ACT_CHANNELS, ACT_SIZE, ACT_SIZE), dtype=np.float32)
    return [
        ActivationFrame(i, ACT_CHANNELS, ACT_SIZE, ACT_SIZE, segment[i % period].copy())
        for i in range(frame_count)
    ]
