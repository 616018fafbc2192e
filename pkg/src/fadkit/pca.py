"""Principal component projection of embedding frames.

Fits the top-k eigenvectors of the sample covariance and projects frames
onto them, the standard route for comparing embeddings of different widths
on equal footing (k = 128 matches the narrowest common embedding). The
eigenvector sign is arbitrary, so a fixed convention makes fits
reproducible: each component is flipped so its largest-magnitude entry is
positive, ties broken by lowest index.

Projection export file layout:

    bytes 0-3    magic ``FPCA``
    bytes 4-7    version, u32 little-endian (currently 1)
    bytes 8-11   input dimension d, u32 LE
    bytes 12-15  component count k, u32 LE
    bytes 16-    mean (d f64 LE), eigenvalues (k f64 LE),
                 components (k*d f64 LE, row-major)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataError, FormatError, LengthError

PROJECTION_MAGIC = b"FPCA"
PROJECTION_VERSION = 1
_PROJECTION_HEADER = struct.Struct("<4sIII")


@dataclass
class PcaProjection:
    """Column mean, orthonormal component rows, and their eigenvalues."""

    mean: np.ndarray         # (d,)
    components: np.ndarray   # (k, d), rows orthonormal, descending eigenvalue
    eigenvalues: np.ndarray  # (k,), nonincreasing

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]

    @property
    def output_dim(self) -> int:
        return self.components.shape[0]


def _apply_sign_convention(components):
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return components


def fit_pca(frames, k) -> PcaProjection:
    """Fit the top-k principal components of an (n, d) frame matrix.

    Requires 1 <= k <= min(n - 1, d); the sample covariance has rank at
    most n - 1, so further components would be arbitrary. Degenerate input
    with zero variance is accepted: eigenvalues come out (numerically)
    zero and the components are still orthonormal.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise DataError(f"frame matrix must be 2-D, got shape {frames.shape}")
    n, d = frames.shape
    if n < 2:
        raise DataError(f"need at least 2 frames to fit a projection, got {n}")
    if not np.isfinite(frames).all():
        raise DataError("frame matrix contains non-finite values")
    if not 1 <= k <= min(n - 1, d):
        raise ValueError(f"k must be in [1, min(n-1, d)] = [1, {min(n - 1, d)}], got {k}")
    mean = frames.mean(axis=0)
    centered = frames - mean
    covariance = (centered.T @ centered) / (n - 1)
    covariance = (covariance + covariance.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(covariance)
    order = np.argsort(eigvals)[::-1][:k]
    components = _apply_sign_convention(np.ascontiguousarray(eigvecs[:, order].T))
    return PcaProjection(mean=mean, components=components,
                         eigenvalues=eigvals[order].copy())


def apply_pca(projection, frames) -> np.ndarray:
    """Project (n, d) frames onto the fitted components: (X - mean) @ C^T."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[1] != projection.input_dim:
        raise DataError(
            f"frame matrix shape {frames.shape} does not match projection input "
            f"dimension {projection.input_dim}"
        )
    return (frames - projection.mean) @ projection.components.T


def write_projection(projection, path):
    """Store a fitted projection as float64, bit-exact for the round trip."""
    d, k = projection.input_dim, projection.output_dim
    with open(path, "wb") as fh:
        fh.write(_PROJECTION_HEADER.pack(PROJECTION_MAGIC, PROJECTION_VERSION, d, k))
        fh.write(np.ascontiguousarray(projection.mean, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(projection.eigenvalues, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(projection.components, dtype="<f8").tobytes())


def read_projection(path) -> PcaProjection:
    with open(path, "rb") as fh:
        raw = fh.read(_PROJECTION_HEADER.size)
        if len(raw) < _PROJECTION_HEADER.size:
            raise LengthError(f"{path}: file too short for a projection header")
        magic, version, d, k = _PROJECTION_HEADER.unpack(raw)
        if magic != PROJECTION_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {PROJECTION_MAGIC!r}")
        if version != PROJECTION_VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        payload = fh.read()
    expected = (d + k + k * d) * 8
    if len(payload) != expected:
        raise LengthError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    mean = np.frombuffer(payload[: d * 8], dtype="<f8").copy()
    eigenvalues = np.frombuffer(payload[d * 8: (d + k) * 8], dtype="<f8").copy()
    components = np.frombuffer(payload[(d + k) * 8:], dtype="<f8").reshape(k, d).copy()
    return PcaProjection(mean=mean, components=components, eigenvalues=eigenvalues)
