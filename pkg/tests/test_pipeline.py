from __future__ import annotations

import numpy as np
import pytest

from videoanomaly import (
    AlignmentError,
    BinLayout,
    CapabilityError,
    DetectorConfig,
    FeatureStore,
    FormatError,
    StreamingDetector,
    StreamTooShortError,
    WindowRecord,
    aggregate,
    plan_windows,
    read_scores_csv,
    run_detector,
    smooth,
    window_batch,
    write_scores_csv,
)
from videoanomaly import synth


def _record(window_id, start, value, n_bins=1, channel="motion"):
    scores = np.full(n_bins, value) if np.isscalar(value) else np.asarray(value, float)
    return WindowRecord(window_id, start, {channel: scores}, {}, None)


# ----------------------------------------------------------------- planning


def test_plan_windows_examples():
    assert plan_windows(20, 10, 5) == [(0, 20)]
    assert plan_windows(30, 10, 5) == [(0, 20), (5, 25), (10, 30)]
    assert plan_windows(27, 10, 7) == [(0, 20), (7, 27)]
    # a trailing remainder shorter than the stride adds no window
    assert plan_windows(24, 10, 5) == [(0, 20)]


def test_plan_windows_too_short():
    with pytest.raises(StreamTooShortError):
        plan_windows(19, 10, 5)


def test_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(stride=11)  # stride must not exceed w
    with pytest.raises(ValueError):
        DetectorConfig(w=12)  # motion half-window must tile into 5-frame stacks
    DetectorConfig(w=12, stride=5, channel="appearance")  # fine without motion
    with pytest.raises(ValueError):
        DetectorConfig(m=5)
    with pytest.raises(ValueError):
        DetectorConfig(k=0)
    with pytest.raises(ValueError):
        DetectorConfig(lam=-0.5)
    with pytest.raises(ValueError):
        DetectorConfig(smooth_sigma=-1)
    with pytest.raises(ValueError):
        DetectorConfig(workers=0)
    with pytest.raises(ValueError):
        DetectorConfig(channel="audio")


def test_config_channels_and_dict():
    assert DetectorConfig().enabled_channels == ("motion",)
    fusion = DetectorConfig(channel="fusion")
    assert fusion.enabled_channels == ("motion", "appearance")
    d = DetectorConfig(lam=0.25, bins=BinLayout(3, 4)).to_dict()
    assert d["lambda"] == 0.25
    assert d["bins"] == "3x4"
    # appearance binning is fixed by the activation geometry
    assert fusion.n_bins("appearance") == 4
    assert DetectorConfig(bins=BinLayout(1, 1)).n_bins("motion") == 1


# ------------------------------------------------------------ window batches


def test_window_batch_motion_counts_and_labels():
    config = DetectorConfig()
    store = FeatureStore(config)
    for f in synth.noise_video(20, seed=0):
        store.add(f, None)
    batch = window_batch((0, 20), 0, "motion", store)
    # dense noise: 4 stacks x 48 cells in the bin, half labeled 0, half 1
    assert batch.x.shape == (192, 500)
    assert batch.class_counts() == (96, 96)
    assert batch.y[:96].sum() == 0 and batch.y[96:].sum() == 96


def test_window_batch_appearance_counts():
    config = DetectorConfig(channel="appearance")
    store = FeatureStore(config)
    for a in synth.noise_activations(20, seed=0):
        store.add(None, a)
    batch = window_batch((0, 20), 2, "appearance", store)
    assert batch.x.shape == (20, 12544)
    assert batch.class_counts() == (10, 10)


def test_store_rejects_out_of_order_and_missing_inputs():
    store = FeatureStore(DetectorConfig())
    frames = synth.noise_video(3, seed=1)
    store.add(frames[0], None)
    with pytest.raises(ValueError):
        store.add(frames[2], None)
    with pytest.raises(CapabilityError):
        store.add(None, None)


def test_store_resizes_odd_input():
    store = FeatureStore(DetectorConfig())
    rng = np.random.default_rng(2)
    from videoanomaly import Frame

    for i in range(5):
        store.add(Frame(i, 320, 240, rng.random((240, 320))), None)
    vectors, keep = store.slot(0)
    assert vectors.shape == (12, 16, 500)
    assert keep.any()


# -------------------------------------------------------------- aggregation


def test_aggregate_means_covering_windows():
    config = DetectorConfig(bins=BinLayout(1, 1))
    records = [_record(0, 0, 0.4), _record(1, 5, 0.6)]
    series = aggregate(records, 25, config)
    motion = series.per_channel["motion"]
    assert np.allclose(motion[10:15], 0.4)  # window 0 only
    assert np.allclose(motion[15:20], 0.5)  # both windows cover these
    assert np.allclose(motion[20:25], 0.6)  # window 1 only
    assert np.allclose(motion[:10], 0.4)  # backfilled from frame 10


def test_aggregate_takes_max_over_bins():
    config = DetectorConfig(bins=BinLayout(1, 2))
    series = aggregate([_record(0, 0, [0.3, 0.9], n_bins=2)], 20, config)
    assert np.allclose(series.per_channel["motion"][10:], 0.9)
    assert np.allclose(series.per_bin["motion"][10:, 0], 0.3)


def test_aggregate_backfill_tie_prefers_earlier():
    config = DetectorConfig(bins=BinLayout(1, 1), smooth_sigma=0.0)
    # second halves cover [10,20) and [29,39); frame 24 ties and goes left
    records = [_record(0, 0, 0.2), _record(1, 19, 0.8)]
    series = aggregate(records, 39, config)
    motion = series.per_channel["motion"]
    assert motion[24] == 0.2
    assert motion[25] == 0.8


def test_aggregate_single_channel_fuses_to_itself():
    config = DetectorConfig(bins=BinLayout(1, 1))
    series = aggregate([_record(0, 0, 0.7)], 20, config)
    assert np.array_equal(series.fused, series.per_channel["motion"])


# ---------------------------------------------------------------- smoothing


def _smooth_reference(x, sigma):
    import math

    radius = math.ceil(3 * sigma)
    out = np.zeros_like(x, dtype=float)
    for i in range(len(x)):
        num = den = 0.0
        for j in range(max(0, i - radius), min(len(x), i + radius + 1)):
            g = math.exp(-((i - j) ** 2) / (2 * sigma * sigma))
            num += g * x[j]
            den += g
        out[i] = num / den
    return out


def test_smooth_matches_reference_convolution():
    rng = np.random.default_rng(3)
    x = rng.random(40)
    assert np.allclose(smooth(x, 3.0), _smooth_reference(x, 3.0), atol=1e-12)
    assert np.allclose(smooth(x, 10.0), _smooth_reference(x, 10.0), atol=1e-12)


def test_smooth_preserves_constants():
    x = np.full(50, 0.37)
    assert np.allclose(smooth(x, 10.0), x, atol=1e-12)


def test_smooth_sigma_zero_is_identity():
    x = np.random.default_rng(4).random(20)
    out = smooth(x, 0.0)
    assert np.array_equal(out, x)
    assert out is not x


def test_smooth_rejects_negative_sigma():
    with pytest.raises(ValueError):
        smooth(np.zeros(5), -1.0)


# ------------------------------------------------------------ batch running


def test_run_detector_requires_input():
    with pytest.raises(CapabilityError):
        run_detector(config=DetectorConfig())


def test_run_detector_short_stream():
    with pytest.raises(StreamTooShortError):
        run_detector(frames=synth.noise_video(19, seed=0))


def test_run_detector_channel_input_mismatch():
    acts = synth.noise_activations(30, seed=0)
    with pytest.raises(CapabilityError) as err:
        run_detector(activations=acts, config=DetectorConfig())
    assert "--frames" in str(err.value)
    frames = synth.noise_video(30, seed=0)
    with pytest.raises(CapabilityError) as err:
        run_detector(frames=frames, config=DetectorConfig(channel="fusion"))
    assert "--activations" in str(err.value)


def test_run_detector_input_length_mismatch():
    frames = synth.noise_video(30, seed=0)
    acts = synth.noise_activations(25, seed=0)
    with pytest.raises(AlignmentError):
        run_detector(frames=frames, activations=acts, config=DetectorConfig(channel="fusion"))


def test_run_detector_series_shapes():
    frames = synth.noise_video(40, seed=5)
    result = run_detector(frames=frames)
    assert result.frame_count == 40
    assert len(result.windows) == 5
    series = result.series
    assert series.fused.shape == (40,)
    assert series.per_bin["motion"].shape == (40, 4)
    assert np.all(series.smoothed >= 0) and np.all(series.smoothed <= 1)
    assert result.extraction_fps > 0 and result.prediction_fps > 0


def test_fusion_is_mean_of_channels():
    frames = synth.noise_video(40, seed=6)
    acts = synth.noise_activations(40, seed=6)
    result = run_detector(frames=frames, activations=acts, config=DetectorConfig(channel="fusion"))
    series = result.series
    assert series.channels == ("motion", "appearance")
    expected = (series.per_channel["motion"] + series.per_channel["appearance"]) / 2
    assert np.allclose(series.fused, expected, atol=1e-15)


def test_worker_count_does_not_change_scores():
    frames, _, _ = synth.block_event_video(frame_count=80, active_range=(40, 60))
    base = run_detector(frames=frames, config=DetectorConfig(workers=1))
    threaded = run_detector(frames=frames, config=DetectorConfig(workers=3))
    assert np.array_equal(base.series.fused, threaded.series.fused)
    assert np.array_equal(base.series.smoothed, threaded.series.smoothed)


# ------------------------------------------------------------------ streaming


def test_streaming_matches_batch_bit_for_bit():
    frames, _, _ = synth.block_event_video(frame_count=100, active_range=(50, 70))
    batch = run_detector(frames=frames)

    det = StreamingDetector()
    emissions = []
    for f in frames:
        batch_ems = det.push(f)
        if batch_ems:
            # every emission batch reflects the finalized prefix only
            horizon = batch_ems[-1].frame + 1
            prefix = smooth(batch.series.fused[:horizon], det.config.smooth_sigma)
            for em in batch_ems:
                assert em.smoothed == prefix[em.frame]
        emissions.extend(batch_ems)
    tail, result = det.finalize()
    emissions.extend(tail)

    assert [em.frame for em in emissions] == list(range(100))
    assert np.array_equal([em.fused for em in emissions], batch.series.fused)
    assert np.array_equal(result.series.fused, batch.series.fused)
    assert np.array_equal(result.series.smoothed, batch.series.smoothed)


def test_streaming_emission_is_prompt():
    """With w=10, s=5 the first emission lands right as window 1 closes."""
    det = StreamingDetector()
    frames = synth.noise_video(30, seed=7)
    seen = {}
    for f in frames:
        for em in det.push(f):
            seen[em.frame] = f.index
    # window 0 closes at frame 19 and finalizes frames 0..14
    assert seen[0] == 19
    assert seen[14] == 19
    # window 1 closes at frame 24 and finalizes 15..19
    assert seen[19] == 24


def test_streaming_finalize_guards():
    det = StreamingDetector()
    for f in synth.noise_video(10, seed=8):
        det.push(f)
    with pytest.raises(StreamTooShortError):
        det.finalize()
    det2 = StreamingDetector()
    for f in synth.noise_video(20, seed=8):
        det2.push(f)
    det2.finalize()
    with pytest.raises(ValueError):
        det2.push(synth.noise_video(21, seed=8)[-1])
    with pytest.raises(ValueError):
        det2.finalize()


# ------------------------------------------------------------------- score IO


def test_scores_csv_roundtrip(tmp_path):
    frames = synth.noise_video(30, seed=9)
    result = run_detector(frames=frames)
    path = tmp_path / "scores.csv"
    write_scores_csv(result.series, path)
    back = read_scores_csv(path)
    assert np.array_equal(back["frame"], np.arange(30))
    assert np.array_equal(back["score_motion"], result.series.per_channel["motion"])
    assert np.array_equal(back["score_smoothed"], result.series.smoothed)
    assert back["score_appearance"] is None


def test_scores_csv_header_check(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("frame,score\n0,0.5\n")
    with pytest.raises(FormatError):
        read_scores_csv(path)


def test_scores_csv_rewrite_is_byte_identical(tmp_path):
    frames = synth.noise_video(25, seed=10)
    result = run_detector(frames=frames)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_scores_csv(result.series, a)
    write_scores_csv(run_detector(frames=frames).series, b)
    assert a.read_bytes() == b.read_bytes()
