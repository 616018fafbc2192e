"""Computing FAD between embedding sets, and why the closed forms hold.

Run:  python3 demos/02_fad_basics.py
"""

import numpy as np

from fadkit import (GaussianStats, frechet_distance, pairwise_fad, stats_from_matrix,
                    trace_sqrt_product)

rng = np.random.default_rng(1)

# Fit Gaussians to two frame sets and measure their distance.
reference = rng.normal(size=(500, 16))
generated = rng.normal(size=(500, 16)) * 1.2 + 0.3
r = stats_from_matrix(reference)
t = stats_from_matrix(generated)
result = frechet_distance(r, t, ref_id="reference", eval_id="generated")
print(f"FAD(reference, generated) = {result.value:.4f}")
print(f"FAD(reference, reference) = {frechet_distance(r, r).value:.2e}")

# In one dimension the distance collapses to (mu_r - mu_t)^2 + (sd_r - sd_t)^2.
one_d = frechet_distance(GaussianStats(mu=[0.0], sigma=[[1.0]], n=2),
                         GaussianStats(mu=[3.0], sigma=[[4.0]], n=2))
print(f"1D example: {one_d.value} (closed form gives 9 + (1 - 2)^2 = 10)")

# The trace term is the delicate part; for commuting covariances it is the
# sum of square roots of the eigenvalue products.
print("tr(sqrt(4I * I)) in 2D:", trace_sqrt_product(4 * np.eye(2), np.eye(2)))

# Distances scale with the square of the data scale and ignore rotations.
scale = 3.0
scaled = frechet_distance(stats_from_matrix(reference * scale),
                          stats_from_matrix(generated * scale))
print(f"scale law: FAD x {scale}^2 = {result.value * scale**2:.4f}, "
      f"measured {scaled.value:.4f}")

# Pairwise distances between several sets form the input for category maps.
sets = [stats_from_matrix(rng.normal(size=(300, 8)) * (1 + 0.3 * i))
        for i in range(4)]
matrix = pairwise_fad(sets, labels=[f"set{i}" for i in range(4)])
print("pairwise FAD matrix:")
print(np.array_str(matrix, precision=3))
