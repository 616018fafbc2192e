"""Gaussian moment fitting for embedding sets.

Both the streaming accumulator and the batch path estimate the sample mean
and the unbiased sample covariance (denominator n - 1) of a set of
embedding frames. Accumulation always runs in float64, whatever the input
dtype, to bound cancellation error in the summed outer products, and
``finalize`` symmetrizes the covariance as (S + S^T) / 2 so the stored
matrix is exactly symmetric.

An optional binary cache stores fitted statistics:

    bytes 0-3    magic ``FSTA``
    bytes 4-7    version, u32 little-endian (currently 1)
    bytes 8-11   dimension d, u32 LE
    bytes 12-15  frame count n, u32 LE
    bytes 16-    mu (d f64 LE) then sigma (d*d f64 LE, row-major)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataError, FormatError, InsufficientDataError, LengthError

CACHE_MAGIC = b"FSTA"
CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sIII")


@dataclass
class GaussianStats:
    """Mean vector, covariance matrix, and the frame count they were fitted on."""

    mu: np.ndarray
    sigma: np.ndarray
    n: int

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=np.float64).reshape(-1)
        self.sigma = np.asarray(self.sigma, dtype=np.float64)
        d = self.mu.shape[0]
        if d < 1:
            raise DataError("mu must have at least one dimension")
        if self.sigma.shape != (d, d):
            raise DataError(f"sigma shape {self.sigma.shape} does not match mu dimension {d}")
        if self.n < 2:
            raise InsufficientDataError(f"stats require n >= 2 frames, got {self.n}")
        if not np.isfinite(self.mu).all() or not np.isfinite(self.sigma).all():
            raise DataError("stats contain non-finite values")
        asym = np.abs(self.sigma - self.sigma.T).max()
        if asym > 1e-12 * max(1.0, np.abs(self.sigma).max()):
            raise DataError(f"sigma is asymmetric beyond tolerance (max deviation {asym:g})")

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


class MomentAccumulator:
    """Streaming raw-moment sums: count, sum of frames, sum of outer products.

    Single-owner by design; for parallel work, accumulate per clip and merge
    the accumulators in a deterministic order.
    """

    def __init__(self, dim):
        if dim < 1:
            raise DataError(f"dim must be >= 1, got {dim}")
        self.dim = int(dim)
        self.count = 0
        self.sum = np.zeros(dim, dtype=np.float64)
        self.sum_outer = np.zeros((dim, dim), dtype=np.float64)

    def add(self, frame):
        frame = np.asarray(frame, dtype=np.float64).reshape(-1)
        if frame.shape[0] != self.dim:
            raise DataError(f"frame dimension {frame.shape[0]} does not match accumulator dim {self.dim}")
        if not np.isfinite(frame).all():
            index = int(np.argwhere(~np.isfinite(frame))[0][0])
            raise DataError(f"non-finite frame value at index {index}")
        self.count += 1
        self.sum += frame
        self.sum_outer += np.outer(frame, frame)
        return self

    def add_frames(self, frames):
        """Bulk add of an (n, d) block; equal to repeated add() up to rounding."""
        frames = np.asarray(frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[1] != self.dim:
            raise DataError(f"frame block shape {frames.shape} does not match accumulator dim {self.dim}")
        if not np.isfinite(frames).all():
            index = tuple(int(i) for i in np.argwhere(~np.isfinite(frames))[0])
            raise DataError(f"non-finite frame value at index {index}")
        self.count += frames.shape[0]
        self.sum += frames.sum(axis=0)
        self.sum_outer += frames.T @ frames
        return self

    def merge(self, other):
        if other.dim != self.dim:
            raise DataError(f"cannot merge accumulators of dims {self.dim} and {other.dim}")
        self.count += other.count
        self.sum += other.sum
        self.sum_outer += other.sum_outer
        return self

    def finalize(self) -> GaussianStats:
        """Convert the accumulated sums into GaussianStats.

        mu = sum / n and sigma = (sum_outer - n mu mu^T) / (n - 1),
        symmetrized as (S + S^T) / 2.
        """
        if self.count < 2:
            raise InsufficientDataError(f"need at least 2 frames to fit a covariance, got {self.count}")
        mu = self.sum / self.count
        sigma = (self.sum_outer - self.count * np.outer(mu, mu)) / (self.count - 1)
        sigma = (sigma + sigma.T) / 2.0
        return GaussianStats(mu=mu, sigma=sigma, n=self.count)


def stats_from_matrix(frames) -> GaussianStats:
    """Fit GaussianStats to an (n, d) frame matrix with a two-pass estimator.

    Agrees with the streaming accumulator to within 1e-10 relative; the two
    routes cross-check each other in the test suite.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise DataError(f"frame matrix must be 2-D, got shape {frames.shape}")
    n = frames.shape[0]
    if n < 2:
        raise InsufficientDataError(f"need at least 2 frames to fit a covariance, got {n}")
    if not np.isfinite(frames).all():
        index = tuple(int(i) for i in np.argwhere(~np.isfinite(frames))[0])
        raise DataError(f"non-finite frame value at index {index}")
    mu = frames.mean(axis=0)
    centered = frames - mu
    sigma = (centered.T @ centered) / (n - 1)
    sigma = (sigma + sigma.T) / 2.0
    return GaussianStats(mu=mu, sigma=sigma, n=n)


def write_stats_cache(stats, path):
    """Store fitted statistics as float64, bit-exact for the round trip."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, stats.dim, stats.n))
        fh.write(np.ascontiguousarray(stats.mu, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(stats.sigma, dtype="<f8").tobytes())


def read_stats_cache(path) -> GaussianStats:
    with open(path, "rb") as fh:
        raw = fh.read(_CACHE_HEADER.size)
        if len(raw) < _CACHE_HEADER.size:
            raise LengthError(f"{path}: file too short for a stats header")
        magic, version, dim, n = _CACHE_HEADER.unpack(raw)
        if magic != CACHE_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {CACHE_MAGIC!r}")
        if version != CACHE_VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        payload = fh.read()
    expected = (dim + dim * dim) * 8
    if len(payload) != expected:
        raise LengthError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    mu = np.frombuffer(payload[: dim * 8], dtype="<f8").copy()
    sigma = np.frombuffer(payload[dim * 8:], dtype="<f8").reshape(dim, dim).copy()
    return GaussianStats(mu=mu, sigma=sigma, n=n)
