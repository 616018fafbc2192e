"""Dimensionality reduction: comparing embeddings of different widths on
equal footing without disturbing FAD.

Run:  python3 demos/04_pca_reduction.py
"""

import numpy as np

from fadkit import apply_pca, fit_pca, frechet_distance, stats_from_matrix


def fad(a, b):
    return frechet_distance(stats_from_matrix(a), stats_from_matrix(b)).value


rng = np.random.default_rng(3)

# Wide embeddings whose information lives in a much smaller subspace: 512
# nominal dimensions, 40 carrying variance.
basis, _ = np.linalg.qr(rng.normal(size=(512, 40)))
offset = rng.normal(size=512)
reference = rng.normal(size=(400, 40)) @ basis.T + offset
generated = (rng.normal(size=(400, 40)) * 1.3 + 0.4) @ basis.T + offset

wide = fad(reference, generated)
print(f"FAD at 512 dims: {wide:.4f}")

# Fit the projection on the union of both sets, then apply it to each.
projection = fit_pca(np.concatenate([reference, generated]), 128)
narrow = fad(apply_pca(projection, reference), apply_pca(projection, generated))
print(f"FAD at 128 dims: {narrow:.4f} (difference {abs(narrow - wide):.2e})")

explained = projection.eigenvalues[:40].sum() / projection.eigenvalues.sum()
print(f"top 40 of 128 components carry {explained:.1%} of the retained variance")

print("components are orthonormal:",
      np.allclose(projection.components @ projection.components.T, np.eye(128)))
