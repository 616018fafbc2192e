"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s or -rA to see them on success).

Everything here is synthetic and seeded; no audio, model weights, or
external data are involved.
"""

import csv
import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from fadkit import (DCASE_CATEGORIES, META_CATEGORIES, GaussianStats, RatingRow,
                    RatingsTable, bootstrap_uncertainty, classical_mds, correlate,
                    fit_pca, apply_pca, frechet_distance, load_manifest,
                    save_ratings_csv, spearman, stats_from_matrix)
from fadkit.cli import main as cli_main
from conftest import build_dataset


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[acceptance] {name}: FAIL")
        raise
    print(f"[acceptance] {name}: PASS")


def brute_force_spearman(x, y):
    def ranks(values):
        out = []
        for v in values:
            smaller = sum(1 for u in values if u < v)
            equal = sum(1 for u in values if u == v)
            out.append(smaller + (equal + 1) / 2.0)
        return out

    rx, ry = ranks(list(x)), ranks(list(y))
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den


def stats_1d(mu, var):
    return GaussianStats(mu=[mu], sigma=[[var]], n=2)


def test_closed_form_fad():
    with criterion("closed-form FAD (1D and diagonal)"):
        start = time.monotonic()
        rng = np.random.default_rng(101)
        for _ in range(200):
            mu_r, mu_t = rng.normal(scale=3.0, size=2)
            var_r, var_t = rng.uniform(0.05, 9.0, size=2)
            expected = (mu_r - mu_t) ** 2 + (np.sqrt(var_r) - np.sqrt(var_t)) ** 2
            value = frechet_distance(stats_1d(mu_r, var_r), stats_1d(mu_t, var_t)).value
            assert abs(value - expected) <= 1e-10

        for _ in range(100):
            dim = int(rng.integers(1, 17))
            mu_r = rng.normal(size=dim)
            mu_t = rng.normal(size=dim)
            var_r = rng.uniform(0.05, 9.0, size=dim)
            var_t = rng.uniform(0.05, 9.0, size=dim)
            r = GaussianStats(mu=mu_r, sigma=np.diag(var_r), n=2)
            t = GaussianStats(mu=mu_t, sigma=np.diag(var_t), n=2)
            expected = ((mu_r - mu_t) ** 2).sum() + \
                ((np.sqrt(var_r) - np.sqrt(var_t)) ** 2).sum()
            assert abs(frechet_distance(r, t).value - expected) <= 1e-8
        assert time.monotonic() - start < 5.0


def test_identity_and_symmetry():
    with criterion("FAD identity and symmetry"):
        start = time.monotonic()
        rng = np.random.default_rng(202)
        for _ in range(50):
            frames_r = rng.normal(size=(200, 32)) * rng.uniform(0.5, 2.0)
            frames_t = rng.normal(size=(200, 32)) * rng.uniform(0.5, 2.0) + \
                rng.normal(scale=0.5, size=32)
            r = stats_from_matrix(frames_r)
            t = stats_from_matrix(frames_t)
            assert frechet_distance(r, r).value <= 1e-6
            forward = frechet_distance(r, t).value
            backward = frechet_distance(t, r).value
            assert abs(forward - backward) <= 1e-9
        assert time.monotonic() - start < 10.0


def test_invariance_laws():
    with criterion("orthogonal invariance and scale law"):
        rng = np.random.default_rng(303)
        for _ in range(20):
            frames_r = rng.normal(size=(150, 10))
            frames_t = rng.normal(size=(150, 10)) * 1.3 + 0.4
            base = frechet_distance(stats_from_matrix(frames_r),
                                    stats_from_matrix(frames_t)).value
            rotation, _ = np.linalg.qr(rng.normal(size=(10, 10)))
            rotated = frechet_distance(stats_from_matrix(frames_r @ rotation.T),
                                       stats_from_matrix(frames_t @ rotation.T)).value
            assert abs(rotated - base) <= 1e-6 * base

            scale = float(rng.uniform(0.3, 4.0))
            scaled = frechet_distance(stats_from_matrix(frames_r * scale),
                                      stats_from_matrix(frames_t * scale)).value
            assert abs(scaled - scale ** 2 * base) <= 1e-8 * scale ** 2 * base


def test_sampling_consistency():
    with criterion("sampling consistency against analytic FAD"):
        start = time.monotonic()
        rng = np.random.default_rng(404)
        mu_r = np.zeros(8)
        mu_t = np.array([0.4, -0.2, 0.3, 0.0, 0.5, -0.3, 0.2, 0.1])
        var_r = np.array([1.0, 2.0, 0.5, 1.5, 0.8, 1.2, 2.5, 0.6])
        var_t = np.array([1.5, 1.0, 1.0, 0.7, 1.3, 0.9, 1.8, 1.1])
        analytic = ((mu_r - mu_t) ** 2).sum() + \
            ((np.sqrt(var_r) - np.sqrt(var_t)) ** 2).sum()

        n = 50_000
        frames_r = mu_r + rng.normal(size=(n, 8)) * np.sqrt(var_r)
        frames_t = mu_t + rng.normal(size=(n, 8)) * np.sqrt(var_t)
        estimate = frechet_distance(stats_from_matrix(frames_r),
                                    stats_from_matrix(frames_t)).value
        assert abs(estimate - analytic) <= 0.05 * analytic
        assert time.monotonic() - start < 60.0


def test_spearman_oracle_and_monotone_invariance():
    with criterion("Spearman against rank-then-Pearson oracle"):
        rng = np.random.default_rng(505)
        checked = 0
        while checked < 1000:
            x = rng.integers(0, 15, size=63).astype(float)  # heavy ties
            y = np.round(rng.normal(size=63), 1)
            if len(set(x)) < 2 or len(set(y)) < 2:
                continue
            value = spearman(x, y)
            assert abs(value - brute_force_spearman(x, y)) <= 1e-12
            assert spearman(np.exp(x / 4.0), y) == value  # strictly increasing map
            assert spearman(2.0 * x + 7.0, y) == value
            checked += 1


def test_bootstrap_protocol():
    with criterion("bootstrap determinism and noise limit"):
        rng = np.random.default_rng(606)
        systems = [f"sys{i}" for i in range(9)]
        cells = [{"system": s, "category": c, "fad": float(rng.uniform(0.5, 6.0))}
                 for s in systems for c in DCASE_CATEGORIES]
        table = RatingsTable(rows=[RatingRow(system=s, category=c,
                                             audio_quality=float(rng.normal()),
                                             category_fit=float(rng.normal()))
                                   for s in systems for c in DCASE_CATEGORIES])

        def report_bytes():
            docs = []
            for criterion_name in ("audio_quality", "category_fit"):
                rep = correlate(cells, table, criterion_name)
                rep.uncertainty = bootstrap_uncertainty(
                    cells, table, criterion_name, noise_std=1.0, reps=100, seed=77)
                docs.append(rep.to_dict())
            return json.dumps(docs, sort_keys=True).encode()

        assert report_bytes() == report_bytes()  # byte-identical under fixed seed

        stds = [bootstrap_uncertainty(cells, table, "audio_quality",
                                      noise_std=sigma, reps=100, seed=77).std_rho
                for sigma in (1.0, 0.1, 0.01, 0.0)]
        assert stds[1] < stds[0]
        assert stds[2] < stds[1]
        assert stds[3] == 0.0


def test_pca_preserves_fad():
    with criterion("PCA reduction preserves FAD"):
        rng = np.random.default_rng(707)

        # full-rank projection: an isometry up to translation
        pool = rng.normal(size=(240, 24)) @ rng.normal(size=(24, 24))
        half = len(pool) // 2
        projection = fit_pca(pool, 24)
        before = frechet_distance(stats_from_matrix(pool[:half]),
                                  stats_from_matrix(pool[half:])).value
        after = frechet_distance(stats_from_matrix(apply_pca(projection, pool[:half])),
                                 stats_from_matrix(apply_pca(projection, pool[half:]))).value
        assert abs(after - before) <= 1e-6 * max(1.0, before)

        # 2048-dim embeddings whose variance lives in a 100-dim subspace:
        # reducing to 128 keeps every FAD-relevant direction
        basis, _ = np.linalg.qr(rng.normal(size=(2048, 100)))
        offset = rng.normal(size=2048)
        latent_r = rng.normal(size=(200, 100))
        latent_t = rng.normal(size=(200, 100)) * 1.3 + 0.25
        frames_r = latent_r @ basis.T + offset
        frames_t = latent_t @ basis.T + offset
        wide = frechet_distance(stats_from_matrix(frames_r),
                                stats_from_matrix(frames_t)).value
        reduction = fit_pca(np.concatenate([frames_r, frames_t]), 128)
        narrow = frechet_distance(stats_from_matrix(apply_pca(reduction, frames_r)),
                                  stats_from_matrix(apply_pca(reduction, frames_t))).value
        assert abs(narrow - wide) <= 1e-6 * max(1.0, wide)


def test_mds_recovery_and_meta_scheme():
    with criterion("MDS planar recovery and meta-category scheme"):
        rng = np.random.default_rng(808)
        for k in range(3, 8):
            points = rng.normal(size=(k, 2)) * 2.0
            deltas = points[:, None, :] - points[None, :, :]
            target = np.sqrt((deltas ** 2).sum(axis=-1))
            result = classical_mds(target)
            coords = result.coords
            recovered = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=-1))
            assert np.abs(recovered - target).max() <= 1e-8
            assert result.stress <= 1e-9

        assert set(META_CATEGORIES) == set(DCASE_CATEGORIES)
        groups = {}
        for label, meta in META_CATEGORIES.items():
            groups.setdefault(meta, set()).add(label)
        assert groups == {"Impact": {"footstep", "gunshot", "keyboard"},
                          "Living": {"dog_bark", "sneeze_cough"},
                          "Texture": {"moving_motor_vehicle", "rain"}}


def test_end_to_end_synthetic_pipeline(tmp_path):
    with criterion("end-to-end synthetic pipeline"):
        start = time.monotonic()
        noise_levels = {f"sys{i}": 0.25 * 1.6 ** i for i in range(9)}
        manifest_path = build_dataset(tmp_path / "data", dim=8,
                                      categories=DCASE_CATEGORIES,
                                      noise_levels=noise_levels,
                                      clips_per_cell=2, frames_per_clip=50,
                                      seed=909)
        ratings_path = tmp_path / "ratings.csv"
        save_ratings_csv(RatingsTable(rows=[
            RatingRow(system=system, category=category,
                      audio_quality=-level, category_fit=-level)
            for system, level in noise_levels.items()
            for category in DCASE_CATEGORIES]), ratings_path)

        out = tmp_path / "out"
        code = cli_main(["pipeline", "--manifest", str(manifest_path),
                         "--ratings", str(ratings_path), "--out", str(out),
                         "--seed", "1", "--reps", "100"])
        assert code == 0

        with open(out / "fad.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        overall = {r["eval_id"]: float(r["fad"]) for r in rows
                   if ":" not in r["eval_id"]}
        assert len(overall) == 9
        ordered = [overall[f"sys{i}"] for i in range(9)]
        assert all(a < b for a, b in zip(ordered, ordered[1:]))  # strictly increasing

        quality = [-noise_levels[f"sys{i}"] for i in range(9)]
        assert spearman([1.0 / fad for fad in ordered], quality) == 1.0

        # the full rating grid ties across categories, so check the reports
        # exist and every per-category coefficient is perfect
        doc = json.loads((out / "correlation.json").read_text())
        assert len(doc["reports"]) == 2 * (1 + 7)
        per_category = [r for r in doc["reports"] if r["scope"] != "overall"]
        assert all(r["rho"] == 1.0 for r in per_category)

        map_doc = json.loads((out / "category_map.json").read_text())
        assert len(map_doc["labels"]) == 7
        assert set(map_doc["meta"].values()) == {"Impact", "Living", "Texture"}
        assert time.monotonic() - start < 120.0
