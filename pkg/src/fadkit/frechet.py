"""Frechet distance between Gaussian fits of two embedding sets.

For fits (mu_r, sigma_r) and (mu_t, sigma_t) the distance is

    ||mu_r - mu_t||^2 + tr(sigma_r) + tr(sigma_t) - 2 tr((sigma_r sigma_t)^(1/2))

The delicate part is the trace of the matrix square root of the
(nonsymmetric) product sigma_r sigma_t. It is evaluated through the
symmetric matrix R = sqrt(sigma_r) sigma_t sqrt(sigma_r), which shares its
eigenvalues with the product but is symmetric positive semidefinite, so a
real symmetric eigensolver applies and no inversion is needed. Singular,
rank-deficient covariances (fewer frames than dimensions) are handled
without special cases.

Eigenvalues in [-tol * lambda_max, 0) are treated as rounding dust and
clamped to zero; anything more negative raises IndefiniteMatrixError,
signaling a corrupted covariance rather than noise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._parallel import parallel_map
from .errors import DataError, IndefiniteMatrixError, NumericalError, UndefinedInverseError

#: Eigenvalues below -EIGENVALUE_TOLERANCE * lambda_max are a hard error.
EIGENVALUE_TOLERANCE = 1e-8

#: Distances in [-NEGATIVE_CLAMP, 0) clamp to zero with the clamped flag set.
NEGATIVE_CLAMP = 1e-6

_SYMMETRY_TOLERANCE = 1e-8

FAD_CSV_COLUMNS = ("ref_id", "eval_id", "model", "dim", "fad", "fad_inverse", "clamped")


@dataclass
class FadResult:
    """A FAD value plus the provenance needed to interpret it."""

    value: float
    ref_id: str = ""
    eval_id: str = ""
    model: str = ""
    dim: int = 0
    clamped: bool = False


def _check_symmetric(matrix, name):
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DataError(f"{name} must be square, got shape {matrix.shape}")
    if not np.isfinite(matrix).all():
        raise DataError(f"{name} contains non-finite values")
    asym = np.abs(matrix - matrix.T).max()
    if asym > _SYMMETRY_TOLERANCE * max(1.0, np.abs(matrix).max()):
        raise DataError(f"{name} is asymmetric beyond tolerance (max deviation {asym:g})")


def _clamped_psd_eigvals(eigvals, name):
    lam_max = max(float(eigvals[-1]), 0.0)  # eigh returns ascending order
    floor = -EIGENVALUE_TOLERANCE * lam_max
    lam_min = float(eigvals[0])
    if lam_min < floor:
        raise IndefiniteMatrixError(
            f"{name} has eigenvalue {lam_min:g} below the PSD tolerance "
            f"{floor:g} (lambda_max {lam_max:g})"
        )
    return np.maximum(eigvals, 0.0)


def psd_sqrt(sigma) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition."""
    sigma = np.asarray(sigma, dtype=np.float64)
    _check_symmetric(sigma, "sigma")
    eigvals, eigvecs = np.linalg.eigh(sigma)
    eigvals = _clamped_psd_eigvals(eigvals, "sigma")
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def trace_sqrt_product(sigma_r, sigma_t) -> float:
    """tr((sigma_r sigma_t)^(1/2)) by the symmetric route.

    Computes R = sqrt(sigma_r) sigma_t sqrt(sigma_r), symmetrizes against
    rounding, and returns the sum of square roots of its clamped
    eigenvalues. Asymmetric inputs raise DataError; significantly negative
    eigenvalues raise IndefiniteMatrixError.
    """
    sigma_r = np.asarray(sigma_r, dtype=np.float64)
    sigma_t = np.asarray(sigma_t, dtype=np.float64)
    _check_symmetric(sigma_r, "sigma_r")
    _check_symmetric(sigma_t, "sigma_t")
    if sigma_r.shape != sigma_t.shape:
        raise DataError(f"covariances have different shapes {sigma_r.shape} and {sigma_t.shape}")
    root_r = psd_sqrt(sigma_r)
    product = root_r @ sigma_t @ root_r
    product = (product + product.T) / 2.0
    eigvals = np.linalg.eigvalsh(product)
    eigvals = _clamped_psd_eigvals(eigvals, "sqrt(sigma_r) sigma_t sqrt(sigma_r)")
    return float(np.sqrt(eigvals).sum())


def frechet_distance(r, t, ref_id="", eval_id="", model="") -> FadResult:
    """FAD between two Gaussian fits.

    Tiny negative results in [-1e-6, 0), which exact arithmetic would never
    produce, clamp to 0 with the clamped flag set; more negative values
    raise NumericalError.
    """
    if r.dim != t.dim:
        raise DataError(f"dimension mismatch: reference is {r.dim}-d, evaluation is {t.dim}-d")
    diff = r.mu - t.mu
    value = float(diff @ diff + np.trace(r.sigma) + np.trace(t.sigma)
                  - 2.0 * trace_sqrt_product(r.sigma, t.sigma))
    clamped = False
    if -NEGATIVE_CLAMP <= value < 0.0:
        value = 0.0
        clamped = True
    elif value < -NEGATIVE_CLAMP:
        raise NumericalError(
            f"FAD between '{ref_id or 'r'}' and '{eval_id or 't'}' came out {value:g}, "
            f"below the clamp window; covariances are likely corrupted"
        )
    return FadResult(value=value, ref_id=ref_id, eval_id=eval_id, model=model,
                     dim=r.dim, clamped=clamped)


def fad_inverse(result) -> float:
    """1 / FAD, the orientation in which bigger means better.

    Accepts a FadResult or a bare float. A distance of exactly zero has no
    inverse; callers fall back to negated-FAD ranks, which order identically.
    """
    value = getattr(result, "value", result)
    if value == 0.0:
        raise UndefinedInverseError("FAD is exactly 0; use negated-FAD ranks instead")
    return 1.0 / value


def pairwise_fad(stats, labels=None, threads=1) -> np.ndarray:
    """Symmetric matrix of FAD values between every pair of fits.

    Only the upper triangle is evaluated (optionally in parallel) and then
    mirrored, so the result is exactly symmetric with a zero diagonal.
    """
    stats = list(stats)
    k = len(stats)
    if k < 2:
        raise DataError(f"pairwise FAD needs at least 2 sets, got {k}")
    if labels is None:
        labels = [str(i) for i in range(k)]
    dims = {s.dim for s in stats}
    if len(dims) != 1:
        raise DataError(f"sets have mixed dimensions {sorted(dims)}")
    cells = [(i, j) for i in range(k) for j in range(i + 1, k)]

    def compute(cell):
        i, j = cell
        return frechet_distance(stats[i], stats[j],
                                ref_id=labels[i], eval_id=labels[j]).value

    values = parallel_map(compute, cells, threads)
    matrix = np.zeros((k, k), dtype=np.float64)
    for (i, j), value in zip(cells, values):
        matrix[i, j] = value
        matrix[j, i] = value
    return matrix


def write_fad_csv(results, path):
    """Write FAD results as CSV; the inverse column is empty for a zero FAD."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FAD_CSV_COLUMNS)
        for r in results:
            inverse = "" if r.value == 0.0 else repr(fad_inverse(r))
            writer.writerow([r.ref_id, r.eval_id, r.model, r.dim, repr(r.value),
                             inverse, "true" if r.clamped else "false"])


def read_fad_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(FAD_CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise DataError(f"{path}: missing FAD CSV columns {sorted(missing)}")
        results = []
        for row in reader:
            results.append(FadResult(value=float(row["fad"]), ref_id=row["ref_id"],
                                     eval_id=row["eval_id"], model=row["model"],
                                     dim=int(row["dim"]), clamped=row["clamped"] == "true"))
    return results
