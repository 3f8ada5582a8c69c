"""Tour of the two feature extractors.

Motion: each 5-frame stack of the 160x120 working image is cut into a
16x12 grid of 10x10 patches; a patch's spatio-temporal cube is described
by its per-voxel 3D gradient magnitudes (500 values, L2-normalized).
Cells whose temporal gradient never leaves zero are static and dropped.

Appearance: a 256x13x13 activation tensor is read through four
overlapping 7x7 windows (they share the center row and column), each
flattened channel-first to a 12544-vector and L2-normalized.
"""

import numpy as np

from videoanomaly import Frame, bin_activations, extract_cubes, gradient_feature
from videoanomaly.ingest import ActivationFrame

rng = np.random.default_rng(0)

print("== motion cubes ==")
frames = [Frame(i, 160, 120, rng.random((120, 160))) for i in range(5)]
cubes = extract_cubes(frames)
print(f"dense noise: {len(cubes)} cubes (16x12 grid, all cells moving)")
per_bin = np.bincount([c.bin for c in cubes], minlength=4)
print(f"per 2x2 bin: {per_bin.tolist()} (each bin spans 8x6 cells)")
norms = [np.linalg.norm(c.values) for c in cubes]
print(f"descriptor norms: min {min(norms):.12f}, max {max(norms):.12f}")

# freeze one cell over time; spatial texture alone is not motion
for f in frames[1:]:
    f.pixels[30:40, 50:60] = frames[0].pixels[30:40, 50:60]
cubes = extract_cubes(frames)
gone = {(c.grid_x, c.grid_y) for c in cubes}
print(f"after freezing cell (5, 3): {len(cubes)} cubes, cell present: {(5, 3) in gone}")

# the descriptor of an affine ramp is constant: gradient (a, b, c) everywhere
y, x, t = np.meshgrid(np.arange(10.0), np.arange(10.0), np.arange(5.0), indexing="ij")
feat = gradient_feature(2.0 * y + 1.0 * x + 0.5 * t)
print(f"affine ramp descriptor: unique value {feat[0]:.6f} "
      f"(expected sqrt(4 + 1 + 0.25) = {np.sqrt(5.25):.6f})")

print()
print("== appearance windows ==")
values = np.zeros((256, 13, 13), dtype=np.float32)
values[0, 6, 6] = 1.0  # the shared center position
feats = bin_activations(ActivationFrame(0, 256, 13, 13, values))
for f in feats:
    pos = int(np.flatnonzero(f.values)[0])
    print(f"bin {f.bin}: center activation lands at flat position {pos:>2} "
          f"(= ch*49 + r*7 + c)")

values = rng.random((256, 13, 13)).astype(np.float32)
feats = bin_activations(ActivationFrame(1, 256, 13, 13, values))
print("random tensor norms:", [f"{np.linalg.norm(f.values):.9f}" for f in feats])
