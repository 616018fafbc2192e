"""Embedding interchange basics: binary clip files, framing math, manifests.

Run:  python3 demos/01_embedding_files.py
"""

import tempfile
from pathlib import Path

import numpy as np

from fadkit import (Manifest, ManifestEntry, ModelInfo, collect_set,
                    expected_frame_count, read_embeddings, save_manifest,
                    write_embeddings)

workdir = Path(tempfile.mkdtemp(prefix="fadkit-demo-"))
print(f"scratch dir: {workdir}")

# A 4-second clip analyzed with 1-second windows at 50% overlap yields 7
# frames; a 10-second receptive field consumes a 10-second clip whole.
print("frames for 4 s clip, 1 s window, 0.5 s hop:",
      expected_frame_count(4.0, 1.0, 0.5))
print("frames for 10 s clip, 10 s window:", expected_frame_count(10.0, 10.0, 10.0))

# Write a clip of 7 frames x 128 dims and read it back bit-exactly.
rng = np.random.default_rng(0)
frames = rng.normal(size=(7, 128)).astype(np.float32)
clip_path = workdir / "clip.emb"
write_embeddings(frames, 128, 1.0, clip_path)
back = read_embeddings(clip_path)
print(f"round trip bit-exact: {np.array_equal(back.frames, frames)}")
print(f"header: dim={back.header.dim} frames={back.header.frame_count} "
      f"rate={back.header.frame_rate_hz} Hz")

# A manifest ties clips to (system, category, model) and declares what the
# model is expected to produce.
second = rng.normal(size=(7, 128)).astype(np.float32)
write_embeddings(second, 128, 1.0, workdir / "clip2.emb")
manifest = Manifest(
    models={"demo-model": ModelInfo(dim=128, rate_hz=1.0)},
    entries=[
        ManifestEntry("clip1", "clip.emb", "rain", "reference", "demo-model"),
        ManifestEntry("clip2", "clip2.emb", "rain", "reference", "demo-model"),
    ],
    base_dir=workdir,
)
manifest.validate_files()
save_manifest(manifest, workdir / "manifest.json")
print(f"manifest written: {workdir / 'manifest.json'}")

# Set assembly concatenates clip frames in manifest order.
assembled = collect_set(manifest, "reference", "demo-model", category="rain")
print(f"assembled set '{assembled.set_id}': {assembled.frames.shape[0]} frames "
      f"from {assembled.member_count} clips")
