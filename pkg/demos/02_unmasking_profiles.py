"""What unmasking profiles look like.

Train a regularized logistic classifier to tell a window's first half
from its second, record the training accuracy, knock out the 50 most
discriminative features, repeat. Identical halves are inseparable from
the start (0.5 everywhere); halves that differ in a deep, redundant way
stay separable as features are removed; a difference carried by a few
features collapses to chance the moment they are eliminated.
"""

import numpy as np

from videoanomaly import WindowBatch, score, unmask

rng = np.random.default_rng(1)


def show(name, batch):
    prof = unmask(batch, k=10, m=50, lam=0.1)
    accs = " ".join(f"{a:.2f}" for a in prof.accuracies)
    print(f"{name:<18} {accs}  -> score {score(prof):.3f}")


print(f"{'window halves':<18} accuracy per elimination loop")

half = rng.normal(size=(10, 500))
show("identical twins", WindowBatch(np.vstack([half, half]),
                                    np.r_[np.zeros(10), np.ones(10)]))

# one planted feature separates otherwise identical halves: perfect for a
# single loop, chance as soon as it is eliminated
noise = rng.normal(0.0, 0.1, (20, 499))
noise[10:] = noise[:10]
x = np.hstack([np.r_[np.full(10, -1.0), np.full(10, 1.0)][:, None], noise])
show("planted feature", WindowBatch(x, np.r_[np.zeros(10), np.ones(10)]))

# a broad mean shift survives every loop; this is what genuine anomalies
# look like through the unmasking lens
x = rng.normal(0.0, 0.4, (20, 500))
x[:10] -= 0.5
x[10:] += 0.5
show("broad shift", WindowBatch(x, np.r_[np.zeros(10), np.ones(10)]))

# a weak, noisy difference drifts back toward chance
x = rng.normal(0.0, 1.0, (20, 500))
x[10:] += 0.12
show("faint shift", WindowBatch(x, np.r_[np.zeros(10), np.ones(10)]))
