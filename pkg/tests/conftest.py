import numpy as np
import pytest

from fadkit import Manifest, ManifestEntry, ModelInfo, save_manifest, write_embeddings


def write_clip(path, frames, rate_hz=1.0):
    frames = np.asarray(frames, dtype=np.float32)
    write_embeddings(frames, frames.shape[1], rate_hz, path)


def build_dataset(root, model="embmodel", dim=4, rate_hz=1.0,
                  categories=("alpha", "beta"), noise_levels=None,
                  clips_per_cell=2, frames_per_clip=8, seed=0, category_offset=2.0):
    """Synthetic manifest rooted at ``root``.

    Reference frames per (category, clip) are Gaussian around a
    category-specific offset; each evaluation system's frames are the
    reference frames plus system-specific Gaussian noise, so FAD grows
    with the configured noise level.
    """
    rng = np.random.default_rng(seed)
    noise_levels = {"sysA": 0.5} if noise_levels is None else noise_levels
    emb_dir = root / "emb"
    emb_dir.mkdir(parents=True, exist_ok=True)

    reference = {}
    for c_index, category in enumerate(categories):
        for clip in range(clips_per_cell):
            reference[(category, clip)] = rng.normal(
                loc=c_index * category_offset, scale=1.0, size=(frames_per_clip, dim))

    entries = []
    for system in ["reference", *noise_levels]:
        level = noise_levels.get(system, 0.0)
        for category in categories:
            for clip in range(clips_per_cell):
                frames = reference[(category, clip)]
                if system != "reference":
                    frames = frames + level * rng.normal(size=frames.shape)
                clip_id = f"{system}_{category}_{clip}"
                name = f"{clip_id}.emb"
                write_clip(emb_dir / name, frames, rate_hz)
                entries.append(ManifestEntry(clip_id=clip_id, path=f"emb/{name}",
                                             category=category, system=system,
                                             model=model))

    manifest = Manifest(models={model: ModelInfo(dim=dim, rate_hz=rate_hz)},
                        entries=entries, categories=tuple(categories), base_dir=root)
    manifest.validate()
    path = root / "manifest.json"
    save_manifest(manifest, path)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
