from __future__ import annotations

import numpy as np
import pytest

from videoanomaly import (
    ClassifierState,
    DegenerateBatchError,
    WindowBatch,
    eliminate_features,
    score,
    train_logistic,
    unmask,
)


def _separable_batch(n_per_class=10, dim=20, margin=2.0, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(0.0, 0.3, (2 * n_per_class, dim))
    x[:n_per_class, 0] -= margin
    x[n_per_class:, 0] += margin
    y = np.r_[np.zeros(n_per_class), np.ones(n_per_class)]
    return WindowBatch(x, y)


def _state(weights, active=None):
    w = np.asarray(weights, dtype=np.float64)
    if active is None:
        active = np.arange(w.size)
    return ClassifierState(w, 0.0, np.asarray(active, dtype=np.intp))


# ----------------------------------------------------------------- training


def test_twin_halves_sit_at_chance_exactly():
    """Identical halves cancel the gradient at the zero start, so training
    stops immediately and every loop scores exactly 0.5."""
    rng = np.random.default_rng(1)
    half = rng.normal(size=(10, 30))
    batch = WindowBatch(np.vstack([half, half]), np.r_[np.zeros(10), np.ones(10)])
    prof = unmask(batch, k=10, m=4)
    assert np.array_equal(prof.accuracies, np.full(10, 0.5))
    assert score(prof) == 0.5


def test_separable_batch_trains_to_perfect_accuracy():
    batch = _separable_batch()
    state, acc = train_logistic(batch, np.arange(batch.dim), lam=0.1)
    assert acc == 1.0
    assert state.weights[0] > 0  # the margin feature carries the signal
    assert state.weights.shape == (batch.dim,)


def test_weights_are_zero_outside_active_set():
    batch = _separable_batch(dim=8)
    active = np.array([0, 3, 5])
    state, _ = train_logistic(batch, active, lam=0.1)
    off = np.setdiff1d(np.arange(8), active)
    assert np.all(state.weights[off] == 0.0)


def test_training_is_deterministic():
    batch = _separable_batch(seed=5)
    a = unmask(batch, k=6, m=4)
    b = unmask(batch, k=6, m=4)
    assert np.array_equal(a.accuracies, b.accuracies)
    assert a.active_counts == b.active_counts


def test_label_swap_is_symmetric():
    batch = _separable_batch(seed=3)
    swapped = WindowBatch(batch.x.copy(), 1 - batch.y)
    a = unmask(batch, k=5, m=4)
    b = unmask(swapped, k=5, m=4)
    assert np.allclose(a.accuracies, b.accuracies, atol=1e-12)


def test_heavy_regularization_collapses_to_base_rate():
    # with lam huge the weights vanish; the unregularized bias then predicts
    # the majority class, so accuracy is the base rate
    rng = np.random.default_rng(4)
    x = rng.normal(size=(10, 6))
    y = np.r_[np.zeros(4), np.ones(6)]
    _, acc = train_logistic(WindowBatch(x, y), np.arange(6), lam=1e6)
    assert acc == 0.6


def test_single_class_batch_raises():
    x = np.random.default_rng(0).normal(size=(6, 4))
    with pytest.raises(DegenerateBatchError):
        train_logistic(WindowBatch(x, np.zeros(6)), np.arange(4), lam=0.1)


def test_empty_active_set_raises():
    batch = _separable_batch()
    with pytest.raises(ValueError):
        train_logistic(batch, np.empty(0, dtype=np.intp), lam=0.1)


def test_batch_shape_validation():
    with pytest.raises(ValueError):
        WindowBatch(np.zeros((4, 3)), np.zeros(5))
    with pytest.raises(ValueError):
        WindowBatch(np.zeros(4), np.zeros(4))


# -------------------------------------------------------------- elimination


def test_eliminate_takes_extremes_from_both_signs():
    remaining = eliminate_features(_state([3.0, -2.0, 1.0, -1.0, 0.0, 0.0]), m=2)
    assert list(remaining) == [2, 3, 4, 5]


def test_eliminate_all_zero_weights_falls_back_to_index_order():
    remaining = eliminate_features(_state([0.0, 0.0, 0.0, 0.0]), m=2)
    assert list(remaining) == [2, 3]


def test_eliminate_fills_deficit_by_magnitude():
    # only one strictly positive and no negative weight: the deficit is
    # filled by the largest remaining |weight|
    remaining = eliminate_features(_state([5.0, 0.0, 0.0, 0.25]), m=4)
    assert list(remaining) == []
    # picks: +5.0, +0.5; deficit of 2 filled by |0.25| then the first zero
    remaining = eliminate_features(_state([5.0, 0.0, 0.0, 0.25, 0.5, 0.0]), m=4)
    assert list(remaining) == [2, 5]


def test_eliminate_ties_break_to_lower_index():
    remaining = eliminate_features(_state([1.0, 1.0, 1.0, -1.0, -1.0, -1.0]), m=2)
    assert list(remaining) == [1, 2, 4, 5]


def test_eliminate_respects_active_subset():
    state = _state([9.0, 9.0, 1.0, -1.0, 0.0], active=[2, 3, 4])
    remaining = eliminate_features(state, m=2)
    assert list(remaining) == [4]


def test_eliminate_exhausted_set_returns_empty():
    remaining = eliminate_features(_state([1.0, -1.0]), m=2)
    assert remaining.size == 0 and remaining.dtype == np.intp


def test_eliminate_validates_m():
    for m in (0, 1, 3):
        with pytest.raises(ValueError):
            eliminate_features(_state([1.0, 2.0, 3.0, 4.0]), m=m)


# ------------------------------------------------------------ full unmasking


def test_profile_counts_shrink_by_m():
    batch = _separable_batch(n_per_class=8, dim=30, seed=6)
    prof = unmask(batch, k=5, m=6)
    assert prof.active_counts == [30, 24, 18, 12, 6]
    assert prof.accuracies.shape == (5,)
    assert prof.accuracies[0] == 1.0


def test_exhaustion_pads_with_chance():
    x = np.r_[np.full((5, 1), -1.0), np.full((5, 1), 1.0)]
    batch = WindowBatch(x, np.r_[np.zeros(5), np.ones(5)])
    prof = unmask(batch, k=3, m=2)
    assert prof.accuracies[0] == 1.0
    assert np.array_equal(prof.accuracies[1:], [0.5, 0.5])
    assert prof.active_counts == [1, 0, 0]


def test_degenerate_window_scores_chance():
    x = np.random.default_rng(2).normal(size=(3, 10))
    batch = WindowBatch(x, np.array([0, 0, 1]))  # one abnormal example only
    prof = unmask(batch, k=4, m=2)
    assert np.array_equal(prof.accuracies, np.full(4, 0.5))


def test_unmask_validates_arguments():
    batch = _separable_batch()
    with pytest.raises(ValueError):
        unmask(batch, k=0)
    with pytest.raises(ValueError):
        unmask(batch, m=3)


def test_score_is_mean_of_profile():
    batch = _separable_batch(seed=8)
    prof = unmask(batch, k=4, m=4)
    assert score(prof) == pytest.approx(float(prof.accuracies.mean()), abs=0)


def test_strong_signal_survives_many_eliminations():
    """Redundant high-margin features keep the profile near 1 as single
    features are knocked out; this is the separability that unmasking
    turns into a high anomaly score."""
    rng = np.random.default_rng(9)
    x = rng.normal(0.0, 0.2, (20, 12))
    x[:10] -= 1.5
    x[10:] += 1.5
    batch = WindowBatch(x, np.r_[np.zeros(10), np.ones(10)])
    prof = unmask(batch, k=5, m=2)
    assert np.all(prof.accuracies == 1.0)
    assert score(prof) == 1.0
