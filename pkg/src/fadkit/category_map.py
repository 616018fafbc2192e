"""Inter-category FAD matrix, its 2D classical-MDS projection, and
meta-category assignments.

FAD values between per-category embedding sets of one system are treated
directly as dissimilarities. Classical (Torgerson) MDS double-centers the
squared dissimilarities, B = -1/2 J D^2 J with J the centering matrix, and
places each point along the top eigenvectors scaled by the square roots of
their eigenvalues. Negative eigenvalues, which appear when the input is
not exactly Euclidean, contribute nothing; their summed magnitude is
reported next to the stress so the distortion is visible.

Voronoi-style region data (nearest point per grid cell over a bounding
box) is emitted as plain assignments; drawing is left to plotting tools.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import collect_set
from .errors import DataError
from .frechet import pairwise_fad
from .moments import stats_from_matrix

#: Grouping of the seven DCASE 2023 Task 7 categories into meta-categories.
META_CATEGORIES = {
    "footstep": "Impact",
    "gunshot": "Impact",
    "keyboard": "Impact",
    "dog_bark": "Living",
    "sneeze_cough": "Living",
    "moving_motor_vehicle": "Texture",
    "rain": "Texture",
}

_SYMMETRY_TOLERANCE = 1e-9
_DIAGONAL_TOLERANCE = 1e-9


@dataclass
class MdsResult:
    coords: np.ndarray  # (k, out_dims), columns centered
    stress: float
    truncated_negative_mass: float


@dataclass
class RegionGrid:
    """Nearest-point assignment sampled on a grid over a bounding box.

    ``assignment`` is row-major with x varying fastest: the cell (ix, iy)
    lands at index iy * nx + ix. Ties go to the lowest point index.
    """

    bbox: tuple  # (xmin, xmax, ymin, ymax)
    nx: int
    ny: int
    assignment: np.ndarray  # (ny * nx,) point indices


@dataclass
class CategoryMapResult:
    labels: list
    distances: np.ndarray  # (k, k) symmetric, zero diagonal
    coords: np.ndarray     # (k, 2)
    meta: dict             # category -> meta-category, where defined
    stress: float
    truncated_negative_mass: float
    regions: RegionGrid | None = None

    def to_dict(self) -> dict:
        doc = {
            "labels": list(self.labels),
            "distances": [[float(v) for v in row] for row in self.distances],
            "coords": [[float(v) for v in row] for row in self.coords],
            "meta": dict(self.meta),
            "stress": float(self.stress),
            "truncated_negative_mass": float(self.truncated_negative_mass),
        }
        if self.regions is not None:
            doc["regions"] = {
                "bbox": [float(v) for v in self.regions.bbox],
                "nx": self.regions.nx,
                "ny": self.regions.ny,
                "assignment": [int(v) for v in self.regions.assignment],
            }
        return doc


def classical_mds(distances, out_dims=2) -> MdsResult:
    """Embed a symmetric dissimilarity matrix into ``out_dims`` coordinates.

    The input must be square (k >= 2), symmetric, nonnegative, with a zero
    diagonal. Returns centered coordinates, the normalized residual stress
    sqrt(sum (dhat - D)^2 / sum D^2), and the summed magnitude of truncated
    negative eigenvalues. Component signs follow the same convention as the
    PCA module, so repeated runs give identical output.
    """
    distances = np.asarray(distances, dtype=np.float64)
    if distances.ndim != 2 or distances.shape[0] != distances.shape[1]:
        raise DataError(f"distance matrix must be square, got shape {distances.shape}")
    k = distances.shape[0]
    if k < 2:
        raise DataError(f"need at least 2 points, got {k}")
    if not np.isfinite(distances).all():
        raise DataError("distance matrix contains non-finite values")
    scale = max(1.0, np.abs(distances).max())
    if np.abs(distances - distances.T).max() > _SYMMETRY_TOLERANCE * scale:
        raise DataError("distance matrix is not symmetric")
    if (distances < 0).any():
        raise DataError("distance matrix has negative entries")
    if np.abs(np.diag(distances)).max() > _DIAGONAL_TOLERANCE * scale:
        raise DataError("distance matrix has a nonzero diagonal")

    centering = np.eye(k) - np.full((k, k), 1.0 / k)
    doubly_centered = -0.5 * centering @ (distances * distances) @ centering
    doubly_centered = (doubly_centered + doubly_centered.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(doubly_centered)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    truncated_negative_mass = float(-eigvals[eigvals < 0].sum())

    coords = np.zeros((k, out_dims), dtype=np.float64)
    for axis in range(min(out_dims, k)):
        if eigvals[axis] <= 0:
            continue  # truncated: contributes nothing
        vec = eigvecs[:, axis].copy()
        if vec[np.argmax(np.abs(vec))] < 0:
            vec *= -1.0
        coords[:, axis] = vec * np.sqrt(eigvals[axis])

    recovered = _pairwise_distances(coords)
    denominator = float((distances * distances).sum())
    if denominator == 0.0:
        stress = 0.0
    else:
        stress = float(np.sqrt(((recovered - distances) ** 2).sum() / denominator))
    return MdsResult(coords=coords, stress=stress,
                     truncated_negative_mass=truncated_negative_mass)


def _pairwise_distances(coords):
    deltas = coords[:, None, :] - coords[None, :, :]
    return np.sqrt((deltas * deltas).sum(axis=-1))


def category_distance_matrix(manifest, model, system="reference", threads=1):
    """Labeled FAD matrix between the per-category sets of one system.

    Returns (labels, matrix) with labels in the manifest's declared
    category order. Every category needs at least 2 frames once assembled.
    """
    labels = manifest.categories_present(system=system, model=model)
    if len(labels) < 2:
        raise DataError(
            f"system '{system}' with model '{model}' covers {len(labels)} categories; "
            f"need at least 2"
        )
    stats = []
    for category in labels:
        embedding_set = collect_set(manifest, system=system, model=model, category=category)
        stats.append(stats_from_matrix(embedding_set.frames))
    matrix = pairwise_fad(stats, labels=labels, threads=threads)
    return labels, matrix


def nearest_point_regions(coords, bbox=None, nx=32, ny=32) -> RegionGrid:
    """Assign every grid cell of a bounding box to its nearest point.

    Without an explicit bbox, the coordinate extent is padded by 10% of its
    larger span (or by 0.5 when all points coincide).
    """
    coords = np.asarray(coords, dtype=np.float64)
    if bbox is None:
        xmin, ymin = coords.min(axis=0)
        xmax, ymax = coords.max(axis=0)
        span = max(xmax - xmin, ymax - ymin)
        pad = 0.1 * span if span > 0 else 0.5
        bbox = (xmin - pad, xmax + pad, ymin - pad, ymax + pad)
    xmin, xmax, ymin, ymax = (float(v) for v in bbox)
    xs = xmin + (np.arange(nx) + 0.5) * (xmax - xmin) / nx
    ys = ymin + (np.arange(ny) + 0.5) * (ymax - ymin) / ny
    grid_x, grid_y = np.meshgrid(xs, ys)  # shape (ny, nx)
    cells = np.stack([grid_x.ravel(), grid_y.ravel()], axis=1)
    squared = ((cells[:, None, :] - coords[None, :, :]) ** 2).sum(axis=-1)
    assignment = np.argmin(squared, axis=1)  # argmin takes the lowest index on ties
    return RegionGrid(bbox=bbox, nx=nx, ny=ny, assignment=assignment)


def build_category_map(manifest, model, system="reference", meta=META_CATEGORIES,
                       grid=(32, 32), threads=1) -> CategoryMapResult:
    """Compose the distance matrix, its 2D MDS embedding, meta-category
    labels, and optional nearest-point region sampling (grid=None skips it)."""
    labels, distances = category_distance_matrix(manifest, model, system=system,
                                                 threads=threads)
    mds = classical_mds(distances, out_dims=2)
    assignments = {label: meta[label] for label in labels if label in meta}
    regions = None
    if grid is not None:
        nx, ny = grid
        regions = nearest_point_regions(mds.coords, nx=nx, ny=ny)
    return CategoryMapResult(labels=labels, distances=distances, coords=mds.coords,
                             meta=assignments, stress=mds.stress,
                             truncated_negative_mass=mds.truncated_negative_mass,
                             regions=regions)
