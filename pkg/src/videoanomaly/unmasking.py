"""Unmasking: iterative classifier training with feature elimination.

For one window's labeled examples (first half normal = 0, second half
abnormal = 1), train an L2-regularized logistic classifier, record its
training accuracy, remove the m most discriminative features (m/2 largest
positive weights, m/2 most negative), and repeat k times. Two easily
separable halves stay separable as features are knocked out, so the mean
of the k accuracies is the window's anomaly score; near-identical halves
sit at chance (0.5) throughout.

Training is deterministic by construction: zero initialization, full-batch
accelerated gradient descent with a fixed step rule, a fixed stopping
test (gradient infinity-norm < 1e-6 or 500 iterations), and total tie
ordering in both prediction (score exactly 0 predicts 0) and elimination
(ties broken by lower feature index). Identical batches produce
bit-identical profiles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import DegenerateBatchError

MAX_ITER = 500
GRAD_TOL = 1e-6
CHANCE = 0.5


@dataclass
class WindowBatch:
    """Labeled examples of one (window, bin, channel) triple.

    ``x`` is (n, D) float64, ``y`` is (n,) in {0, 1} following the
    window-half rule (first-half examples 0, second-half 1).
    """

    x: np.ndarray
    y: np.ndarray
    window_id: int = 0
    bin: int = 0
    channel: str = ""

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.uint8)
        if self.x.ndim != 2 or self.y.shape != (self.x.shape[0],):
            raise ValueError(
                f"batch shapes disagree: x {self.x.shape}, y {self.y.shape}"
            )

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def class_counts(self) -> tuple[int, int]:
        pos = int(self.y.sum())
        return len(self.y) - pos, pos


@dataclass
class ClassifierState:
    """Trained linear classifier restricted to an active feature set.

    ``weights`` spans all D features and is exactly 0 outside ``active``;
    ``bias`` is never regularized and never eliminated. ``active`` is a
    sorted int array.
    """

    weights: np.ndarray
    bias: float
    active: np.ndarray


@dataclass
class UnmaskingProfile:
    """The k training accuracies of one unmasking run.

    ``active_counts[i]`` is the active-set size when loop i trained
    (D, D-m, D-2m, ... for a non-degenerate run).
    """

    accuracies: np.ndarray
    loops: int
    eliminated_per_loop: int
    active_counts: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.accuracies = np.asarray(self.accuracies, dtype=np.float64)
        if self.accuracies.shape != (self.loops,):
            raise ValueError("profile length must equal loop count")


def _fit(xb: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    """Minimize mean logistic loss + (lam/2)*||w||^2 (bias unregularized).

    ``xb`` is the design matrix with a trailing all-ones bias column.
    Nesterov-accelerated full-batch descent from zero: step 1/L with
    L = lam + max_i ||x_i||^2 / 4 (a Lipschitz bound on the gradient),
    constant momentum for lam > 0, the t-sequence schedule for lam = 0.
    """
    n, d1 = xb.shape
    lip = lam + float((xb * xb).sum(axis=1).max()) / 4.0
    yf = y.astype(np.float64)
    w = np.zeros(d1)
    v = w
    if lam > 0.0:
        rk = np.sqrt(lip / lam)
        beta = (rk - 1.0) / (rk + 1.0)
        t_cur = None
    else:
        beta = None
        t_cur = 1.0
    for _ in range(MAX_ITER):
        resid = (expit(xb @ v) - yf) / n
        g = xb.T @ resid
        g[:-1] += lam * v[:-1]
        if np.abs(g).max() < GRAD_TOL:
            return v
        w_next = v - g / lip
        if beta is not None:
            v = w_next + beta * (w_next - w)
        else:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_cur * t_cur))
            v = w_next + ((t_cur - 1.0) / t_next) * (w_next - w)
            t_cur = t_next
        w = w_next
    return w


def train_logistic(
    batch: WindowBatch, active: np.ndarray, lam: float
) -> tuple[ClassifierState, float]:
    """Train on the active features; return the state and training accuracy.

    Accuracy counts hard predictions: label 1 iff linear score > 0, a
    score of exactly 0 predicts 0.
    """
    active = np.asarray(active, dtype=np.intp)
    if active.size == 0:
        raise ValueError("active feature set is empty")
    if lam < 0:
        raise ValueError("regularization strength must be >= 0")
    n0, n1 = batch.class_counts()
    if n0 == 0 or n1 == 0:
        raise DegenerateBatchError(
            f"batch needs both classes, got {n0} normal / {n1} abnormal"
        )
    n = batch.x.shape[0]
    xb = np.empty((n, active.size + 1))
    xb[:, :-1] = batch.x[:, active]
    xb[:, -1] = 1.0
    wb = _fit(xb, batch.y, lam)
    weights = np.zeros(batch.dim)
    weights[active] = wb[:-1]
    scores = xb @ wb
    accuracy = float(np.mean((scores > 0.0) == (batch.y == 1)))
    return ClassifierState(weights, float(wb[-1]), active), accuracy


def eliminate_features(state: ClassifierState, m: int) -> np.ndarray:
    """Drop the m most discriminative features from the active set.

    Takes the m/2 largest strictly-positive weights and the m/2 most
    negative; if a sign runs short, the combined deficit is filled by the
    next-largest |weight| among the remaining active features. All ties
    break toward the lower feature index. When |active| <= m the set is
    exhausted and the empty set is returned.
    """
    if m < 2 or m % 2:
        raise ValueError(f"m must be even and >= 2, got {m}")
    active = state.active
    if active.size <= m:
        return np.empty(0, dtype=np.intp)
    wa = state.weights[active]
    half = m // 2
    # stable argsort on the negated key keeps ties in ascending-index order
    pos = active[wa > 0]
    picks_pos = pos[np.argsort(-wa[wa > 0], kind="stable")][:half]
    neg = active[wa < 0]
    picks_neg = neg[np.argsort(wa[wa < 0], kind="stable")][:half]
    removed = np.concatenate([picks_pos, picks_neg])
    deficit = m - removed.size
    if deficit:
        rest_mask = ~np.isin(active, removed, assume_unique=True)
        rest = active[rest_mask]
        fill = rest[np.argsort(-np.abs(wa[rest_mask]), kind="stable")][:deficit]
        removed = np.concatenate([removed, fill])
    return np.setdiff1d(active, removed, assume_unique=True)


def unmask(batch: WindowBatch, k: int = 10, m: int = 50, lam: float = 0.1) -> UnmaskingProfile:
    """Run k train/eliminate loops and collect the accuracy profile.

    A degenerate batch (either class has fewer than 2 examples) and loops
    reached after the active set empties record chance accuracy 0.5.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if m < 2 or m % 2:
        raise ValueError(f"m must be even and >= 2, got {m}")
    n0, n1 = batch.class_counts()
    degenerate = n0 < 2 or n1 < 2
    active = np.arange(batch.dim, dtype=np.intp)
    accuracies = np.empty(k)
    counts = []
    for i in range(k):
        counts.append(int(active.size))
        if degenerate or active.size == 0:
            accuracies[i] = CHANCE
            continue
        state, acc = train_logistic(batch, active, lam)
        accuracies[i] = acc
        active = eliminate_features(state, m)
    return UnmaskingProfile(accuracies, k, m, counts)


def score(profile: UnmaskingProfile) -> float:
    """Anomaly score of a profile: the arithmetic mean of its accuracies."""
    return float(np.mean(profile.accuracies))
