import numpy as np
import pytest

from fadkit import (DataError, FormatError, GaussianStats, InsufficientDataError,
                    MomentAccumulator, read_stats_cache, stats_from_matrix,
                    write_stats_cache)


def relative_close(a, b, tol):
    scale = max(1.0, np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
    return np.abs(a - b).max() <= tol * scale


class TestAccumulator:
    def test_single_frame(self):
        acc = MomentAccumulator(2).add([1.0, 2.0])
        assert acc.count == 1
        assert np.array_equal(acc.sum, [1.0, 2.0])

    def test_two_frames_raw_moments(self):
        acc = MomentAccumulator(1).add([0.0]).add([2.0])
        assert acc.count == 2
        assert np.array_equal(acc.sum, [2.0])
        assert np.array_equal(acc.sum_outer, [[4.0]])
        stats = acc.finalize()
        assert stats.mu == pytest.approx(1.0)
        assert stats.sigma[0, 0] == pytest.approx(2.0)  # sample variance of {0, 2}

    def test_streaming_matches_batch(self, rng):
        frames = rng.normal(size=(100, 5))
        acc = MomentAccumulator(5)
        for frame in frames:
            acc.add(frame)
        stream = acc.finalize()
        batch = stats_from_matrix(frames)
        assert relative_close(stream.mu, batch.mu, 1e-10)
        assert relative_close(stream.sigma, batch.sigma, 1e-10)

    def test_bulk_add_matches_loop(self, rng):
        frames = rng.normal(size=(40, 3))
        loop = MomentAccumulator(3)
        for frame in frames:
            loop.add(frame)
        bulk = MomentAccumulator(3).add_frames(frames)
        assert relative_close(loop.finalize().sigma, bulk.finalize().sigma, 1e-12)

    def test_merge_equals_sequential(self, rng):
        frames = rng.normal(size=(60, 4))
        left = MomentAccumulator(4).add_frames(frames[:25])
        right = MomentAccumulator(4).add_frames(frames[25:])
        merged = left.merge(right).finalize()
        sequential = MomentAccumulator(4).add_frames(frames).finalize()
        assert relative_close(merged.mu, sequential.mu, 1e-10)
        assert relative_close(merged.sigma, sequential.sigma, 1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DataError):
            MomentAccumulator(2).add([1.0, 2.0, 3.0])
        with pytest.raises(DataError):
            MomentAccumulator(2).merge(MomentAccumulator(3))

    def test_non_finite_frame(self):
        with pytest.raises(DataError, match="index 1"):
            MomentAccumulator(2).add([1.0, np.nan])

    def test_insufficient_frames(self):
        with pytest.raises(InsufficientDataError):
            MomentAccumulator(2).add([1.0, 2.0]).finalize()


class TestStatsFromMatrix:
    def test_two_point_variance(self):
        stats = stats_from_matrix(np.array([[0.0], [2.0]]))
        assert stats.mu[0] == 1.0
        assert stats.sigma[0, 0] == 2.0
        assert stats.n == 2

    def test_constant_rows_zero_covariance(self):
        # 4 rows: power-of-two count keeps the mean exact, so sigma is exactly 0
        stats = stats_from_matrix(np.full((4, 3), 0.7))
        assert np.array_equal(stats.sigma, np.zeros((3, 3)))

    def test_matches_two_pass_oracle(self, rng):
        mean = np.array([1.0, -2.0, 0.5])
        chol = np.array([[1.0, 0.0, 0.0], [0.4, 0.8, 0.0], [-0.2, 0.3, 1.1]])
        frames = mean + rng.normal(size=(1000, 3)) @ chol.T
        stats = stats_from_matrix(frames)
        assert relative_close(stats.mu, frames.mean(axis=0), 1e-10)
        assert relative_close(stats.sigma, np.cov(frames, rowvar=False), 1e-10)

    def test_matches_streaming_path(self, rng):
        frames = rng.normal(size=(50, 8))
        batch = stats_from_matrix(frames)
        acc = MomentAccumulator(8)
        for frame in frames:
            acc.add(frame)
        stream = acc.finalize()
        assert relative_close(batch.mu, stream.mu, 1e-10)
        assert relative_close(batch.sigma, stream.sigma, 1e-10)

    def test_sigma_exactly_symmetric(self, rng):
        for _ in range(5):
            stats = stats_from_matrix(rng.normal(size=(30, 6)))
            assert np.array_equal(stats.sigma, stats.sigma.T)
        acc = MomentAccumulator(6).add_frames(rng.normal(size=(30, 6)))
        finalized = acc.finalize()
        assert np.array_equal(finalized.sigma, finalized.sigma.T)

    def test_affine_transform_law(self, rng):
        frames = rng.normal(size=(400, 4))
        matrix = rng.normal(size=(4, 4)) + 4 * np.eye(4)
        offset = rng.normal(size=4)
        base = stats_from_matrix(frames)
        moved = stats_from_matrix(frames @ matrix.T + offset)
        assert relative_close(moved.mu, matrix @ base.mu + offset, 1e-8)
        assert relative_close(moved.sigma, matrix @ base.sigma @ matrix.T, 1e-8)

    def test_too_few_rows(self):
        with pytest.raises(InsufficientDataError):
            stats_from_matrix(np.ones((1, 3)))

    def test_non_finite(self):
        frames = np.ones((3, 2))
        frames[1, 0] = np.inf
        with pytest.raises(DataError):
            stats_from_matrix(frames)


class TestGaussianStatsValidation:
    def test_asymmetric_sigma_rejected(self):
        with pytest.raises(DataError, match="asymmetric"):
            GaussianStats(mu=[0.0, 0.0], sigma=[[1.0, 0.5], [0.2, 1.0]], n=10)

    def test_non_finite_rejected(self):
        with pytest.raises(DataError):
            GaussianStats(mu=[np.nan], sigma=[[1.0]], n=10)

    def test_n_below_two_rejected(self):
        with pytest.raises(InsufficientDataError):
            GaussianStats(mu=[0.0], sigma=[[1.0]], n=1)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DataError):
            GaussianStats(mu=[0.0, 1.0], sigma=[[1.0]], n=5)


class TestStatsCache:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        stats = stats_from_matrix(rng.normal(size=(25, 6)))
        path = tmp_path / "stats.fsta"
        write_stats_cache(stats, path)
        back = read_stats_cache(path)
        assert back.n == stats.n
        assert back.mu.tobytes() == stats.mu.tobytes()
        assert back.sigma.tobytes() == stats.sigma.tobytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "stats.fsta"
        path.write_bytes(b"XSTA" + b"\x00" * 12)
        with pytest.raises(FormatError):
            read_stats_cache(path)
