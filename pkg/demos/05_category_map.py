"""Mapping sound categories into the plane from their pairwise FAD.

Builds three synthetic meta-groups of categories, computes the
inter-category FAD matrix, embeds it with classical MDS, and shows the
nearest-point region sampling that plotting tools can turn into a Voronoi
diagram.

Run:  python3 demos/05_category_map.py
"""

import tempfile
from pathlib import Path

import numpy as np

from fadkit import (META_CATEGORIES, Manifest, ManifestEntry, ModelInfo,
                    build_category_map, classical_mds, write_embeddings)

rng = np.random.default_rng(5)
workdir = Path(tempfile.mkdtemp(prefix="fadkit-demo-"))

# Seven categories whose embeddings cluster by meta-group: categories in the
# same group share a center, so their mutual FAD is small.
group_centers = {"Impact": 0.0, "Living": 4.0, "Texture": 8.0}
entries = []
for category, group in META_CATEGORIES.items():
    center = group_centers[group] + rng.normal(scale=0.3)
    frames = rng.normal(loc=center, scale=1.0, size=(300, 6)).astype(np.float32)
    write_embeddings(frames, 6, 1.0, workdir / f"{category}.emb")
    entries.append(ManifestEntry(category, f"{category}.emb", category,
                                 "reference", "demo-model"))
manifest = Manifest(models={"demo-model": ModelInfo(dim=6, rate_hz=1.0)},
                    entries=entries, base_dir=workdir)

result = build_category_map(manifest, "demo-model", grid=(40, 24))
print("category coordinates (2D MDS of the FAD matrix):")
for label, (x, y) in zip(result.labels, result.coords):
    print(f"  {label:<22} ({x:+7.3f}, {y:+7.3f})  meta={result.meta[label]}")
print(f"stress = {result.stress:.4f}, "
      f"truncated negative mass = {result.truncated_negative_mass:.4f}")

# Region sampling: which category owns each grid cell (drawable as Voronoi).
grid = result.regions.assignment.reshape(result.regions.ny, result.regions.nx)
glyphs = "".join(chr(ord("A") + i) for i in range(len(result.labels)))
print("nearest-category regions:")
for row in grid[::-1]:  # print with y increasing upward
    print("  " + "".join(glyphs[i] for i in row))

# classical_mds also works directly on any dissimilarity matrix.
triangle = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
print("equilateral triangle stress:", classical_mds(triangle).stress)
