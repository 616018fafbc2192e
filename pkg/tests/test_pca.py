import numpy as np
import pytest

from fadkit import (DataError, FormatError, apply_pca, fit_pca, frechet_distance,
                    read_projection, stats_from_matrix, write_projection)


def fad_between(frames_a, frames_b):
    return frechet_distance(stats_from_matrix(frames_a),
                            stats_from_matrix(frames_b)).value


class TestFitPca:
    def test_exact_low_rank_reconstruction(self, rng):
        # data confined to a 2D subspace of 10D reconstructs exactly with k=2
        basis, _ = np.linalg.qr(rng.normal(size=(10, 2)))
        frames = rng.normal(size=(50, 2)) @ basis.T + rng.normal(size=10)
        projection = fit_pca(frames, 2)
        reconstructed = projection.mean + apply_pca(projection, frames) @ projection.components
        assert np.abs(reconstructed - frames).max() < 1e-8

    def test_isotropic_covariance(self, rng):
        # whiten exactly, then scale: the sample covariance is sigma^2 I by construction
        raw = rng.normal(size=(200, 6))
        centered = raw - raw.mean(axis=0)
        covariance = np.cov(centered, rowvar=False)
        eigvals, eigvecs = np.linalg.eigh(covariance)
        whitened = centered @ eigvecs @ np.diag(1 / np.sqrt(eigvals)) @ eigvecs.T
        frames = 1.7 * whitened
        projection = fit_pca(frames, 6)
        assert np.allclose(projection.eigenvalues, 1.7 ** 2, rtol=1e-8)

    def test_eigenvalues_match_dense_oracle(self, rng):
        frames = rng.normal(size=(500, 20)) @ rng.normal(size=(20, 20))
        projection = fit_pca(frames, 20)
        oracle = np.sort(np.linalg.eigvalsh(np.cov(frames, rowvar=False)))[::-1]
        assert np.allclose(projection.eigenvalues, oracle, rtol=1e-8, atol=1e-10)

    def test_orthonormal_components(self, rng):
        projection = fit_pca(rng.normal(size=(100, 12)), 7)
        gram = projection.components @ projection.components.T
        assert np.abs(gram - np.eye(7)).max() < 1e-8

    def test_eigenvalues_nonincreasing(self, rng):
        projection = fit_pca(rng.normal(size=(80, 9)), 8)
        assert np.all(np.diff(projection.eigenvalues) <= 1e-12)

    def test_projected_variance_ordering(self, rng):
        frames = rng.normal(size=(300, 10)) * np.arange(1, 11)
        projection = fit_pca(frames, 10)
        projected = apply_pca(projection, frames)
        variances = projected.var(axis=0, ddof=1)
        assert np.all(np.diff(variances) <= 1e-9 * max(1.0, variances.max()))

    def test_deterministic_with_sign_convention(self, rng):
        frames = rng.normal(size=(60, 5))
        first = fit_pca(frames, 4)
        second = fit_pca(frames.copy(), 4)
        assert np.array_equal(first.components, second.components)
        assert np.array_equal(first.eigenvalues, second.eigenvalues)
        for row in first.components:
            assert row[np.argmax(np.abs(row))] > 0

    def test_degenerate_zero_variance(self):
        frames = np.tile([1.0, 2.0, 3.0], (10, 1))
        projection = fit_pca(frames, 2)
        assert np.abs(projection.eigenvalues).max() < 1e-12
        gram = projection.components @ projection.components.T
        assert np.abs(gram - np.eye(2)).max() < 1e-8

    def test_k_out_of_range(self, rng):
        frames = rng.normal(size=(10, 5))
        with pytest.raises(ValueError):
            fit_pca(frames, 0)
        with pytest.raises(ValueError):
            fit_pca(frames, 6)  # k > d
        with pytest.raises(ValueError):
            fit_pca(rng.normal(size=(4, 8)), 4)  # k > n - 1


class TestApplyPca:
    def test_full_rank_projection_preserves_fad(self, rng):
        pool = rng.normal(size=(120, 8)) @ rng.normal(size=(8, 8)) + rng.normal(size=8)
        subset_a, subset_b = pool[:60], pool[60:]
        projection = fit_pca(pool, 8)
        base = fad_between(subset_a, subset_b)
        after = fad_between(apply_pca(projection, subset_a), apply_pca(projection, subset_b))
        assert after == pytest.approx(base, rel=1e-6, abs=1e-9)

    def test_pairwise_frame_distances_preserved_at_full_rank(self, rng):
        frames = rng.normal(size=(40, 6))
        projection = fit_pca(frames, 6)
        projected = apply_pca(projection, frames)
        original = np.linalg.norm(frames[:, None] - frames[None, :], axis=-1)
        recovered = np.linalg.norm(projected[:, None] - projected[None, :], axis=-1)
        assert np.abs(original - recovered).max() <= 1e-8 * max(1.0, original.max())

    def test_mean_rows_project_to_zero(self, rng):
        frames = rng.normal(size=(30, 4))
        projection = fit_pca(frames, 3)
        repeated_mean = np.tile(projection.mean, (5, 1))
        assert np.abs(apply_pca(projection, repeated_mean)).max() < 1e-12

    def test_confined_variance_preserves_fad_after_reduction(self, rng):
        # variance lives in a 20-dim subspace of 200 dims; k=30 keeps FAD intact
        embed, _ = np.linalg.qr(rng.normal(size=(200, 20)))
        offset = rng.normal(size=200)
        latent_a = rng.normal(size=(150, 20))
        latent_b = rng.normal(size=(150, 20)) * 1.4 + 0.3
        frames_a = latent_a @ embed.T + offset
        frames_b = latent_b @ embed.T + offset
        projection = fit_pca(np.concatenate([frames_a, frames_b]), 30)
        base = fad_between(frames_a, frames_b)
        after = fad_between(apply_pca(projection, frames_a), apply_pca(projection, frames_b))
        assert after == pytest.approx(base, rel=1e-6)

    def test_dimension_mismatch(self, rng):
        projection = fit_pca(rng.normal(size=(20, 4)), 2)
        with pytest.raises(DataError):
            apply_pca(projection, rng.normal(size=(5, 3)))


class TestProjectionFile:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        projection = fit_pca(rng.normal(size=(50, 7)), 4)
        path = tmp_path / "projection.fpca"
        write_projection(projection, path)
        back = read_projection(path)
        assert back.mean.tobytes() == projection.mean.tobytes()
        assert back.eigenvalues.tobytes() == projection.eigenvalues.tobytes()
        assert back.components.tobytes() == projection.components.tobytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "p.fpca"
        path.write_bytes(b"XPCA" + b"\x00" * 12)
        with pytest.raises(FormatError):
            read_projection(path)
