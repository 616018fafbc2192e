"""Binary embedding-frame files, dataset manifests, and set assembly.

A ``.emb`` file stores the embedding frames of one audio clip (or any
fixed-dimension frame matrix) as a 24-byte header followed by the payload:

    bytes 0-3    magic ``FEMB``
    bytes 4-7    format version, u32 little-endian (currently 1)
    bytes 8-11   embedding dimension d, u32 LE
    bytes 12-15  frame count n, u32 LE
    bytes 16-23  nominal embedding rate in Hz, f64 LE
    bytes 24-    n * d float32 LE, row-major (one row per frame)

Frames are stored exactly as float32, so a write/read round trip is
bit-exact. A JSON manifest lists clips with their system, category, and
embedding model, plus a per-model registry of expected dimension and rate
used for validation. Set assembly concatenates clip frames in manifest
order, so covariance statistics downstream are over frames, never over
per-clip averages.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, FormatError, LengthError, UnframeableClipError

MAGIC = b"FEMB"
VERSION = 1
_HEADER = struct.Struct("<4sIIId")  # magic, version, dim, frame_count, rate

#: Sound categories of the DCASE 2023 Task 7 dataset, the default closed set.
DCASE_CATEGORIES = (
    "dog_bark",
    "footstep",
    "gunshot",
    "keyboard",
    "moving_motor_vehicle",
    "rain",
    "sneeze_cough",
)

#: System id reserved for the real-audio reference set.
REFERENCE_SYSTEM = "reference"

# ":" separates system and category inside set ids, so identifiers may not
# contain it.
_ID_SEPARATOR = ":"


@dataclass
class EmbeddingHeader:
    """Fixed-size header of a ``.emb`` file."""

    dim: int
    frame_count: int
    frame_rate_hz: float
    version: int = VERSION
    magic: bytes = MAGIC

    def validate(self):
        if self.magic != MAGIC:
            raise FormatError(f"bad magic {self.magic!r}, expected {MAGIC!r}")
        if self.version != VERSION:
            raise FormatError(f"unsupported version {self.version}, expected {VERSION}")
        if self.dim < 1:
            raise FormatError(f"dim must be >= 1, got {self.dim}")
        if self.frame_count < 1:
            raise FormatError(f"frame_count must be >= 1, got {self.frame_count}")
        if not (self.frame_rate_hz > 0) or not math.isfinite(self.frame_rate_hz):
            raise FormatError(f"frame_rate_hz must be positive, got {self.frame_rate_hz}")

    def pack(self) -> bytes:
        return _HEADER.pack(self.magic, self.version, self.dim, self.frame_count, self.frame_rate_hz)


@dataclass
class EmbeddingMatrix:
    """Frames of one clip together with the header they were stored under."""

    header: EmbeddingHeader
    frames: np.ndarray  # (frame_count, dim) float32

    def validate(self):
        self.header.validate()
        if self.frames.shape != (self.header.frame_count, self.header.dim):
            raise DataError(
                f"frame matrix shape {self.frames.shape} does not match header "
                f"({self.header.frame_count}, {self.header.dim})"
            )
        _check_finite(self.frames, "frames")


def _check_finite(array, name):
    bad = ~np.isfinite(array)
    if bad.any():
        index = tuple(int(i) for i in np.argwhere(bad)[0])
        raise DataError(f"non-finite value in {name} at index {index}")


def write_embeddings(frames, dim, frame_rate_hz, path):
    """Write a frame matrix to ``path`` in the ``.emb`` format.

    ``frames`` is cast to float32 for storage; pass float32 input for a
    bit-exact round trip. Values that are non-finite (before or after the
    cast) are rejected with the offending index. I/O errors propagate.
    """
    frames = np.asarray(frames)
    if frames.ndim != 2:
        raise ValueError(f"frames must be 2-D, got shape {frames.shape}")
    n, d = frames.shape
    if n < 1 or d < 1:
        raise ValueError(f"frames must be at least 1x1, got shape {frames.shape}")
    if d != dim:
        raise ValueError(f"declared dim {dim} does not match frames shape {frames.shape}")
    if not (frame_rate_hz > 0) or not math.isfinite(frame_rate_hz):
        raise ValueError(f"frame_rate_hz must be positive, got {frame_rate_hz}")
    _check_finite(frames, "frames")
    with np.errstate(over="ignore"):
        data = np.ascontiguousarray(frames, dtype="<f4")
    _check_finite(data, "frames (after float32 cast)")  # catches float32 overflow
    header = EmbeddingHeader(dim=d, frame_count=n, frame_rate_hz=float(frame_rate_hz))
    with open(path, "wb") as fh:
        fh.write(header.pack())
        fh.write(data.tobytes())


def read_header(path) -> EmbeddingHeader:
    """Read and validate only the 24-byte header of a ``.emb`` file."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise LengthError(f"{path}: file too short for a header ({len(raw)} bytes)")
    magic, version, dim, frame_count, rate = _HEADER.unpack(raw)
    header = EmbeddingHeader(dim=dim, frame_count=frame_count, frame_rate_hz=rate,
                             version=version, magic=magic)
    header.validate()
    return header


def read_embeddings(path) -> EmbeddingMatrix:
    """Read a ``.emb`` file, validating header, payload length, and finiteness."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise LengthError(f"{path}: file too short for a header ({len(raw)} bytes)")
        magic, version, dim, frame_count, rate = _HEADER.unpack(raw)
        header = EmbeddingHeader(dim=dim, frame_count=frame_count, frame_rate_hz=rate,
                                 version=version, magic=magic)
        header.validate()
        payload = fh.read()
    expected = header.frame_count * header.dim * 4
    if len(payload) != expected:
        raise LengthError(
            f"{path}: payload is {len(payload)} bytes, header declares "
            f"{header.frame_count} x {header.dim} frames ({expected} bytes)"
        )
    frames = np.frombuffer(payload, dtype="<f4").reshape(header.frame_count, header.dim).copy()
    if not np.isfinite(frames).all():
        index = tuple(int(i) for i in np.argwhere(~np.isfinite(frames))[0])
        raise DataError(f"{path}: non-finite value in payload at frame index {index}")
    return EmbeddingMatrix(header=header, frames=frames)


def expected_frame_count(clip_seconds, window_seconds, hop_seconds) -> int:
    """Number of analysis windows a clip yields under a fixed framing grid.

    Equals ``floor((clip_seconds - window_seconds) / hop_seconds) + 1``: the
    count of window start times 0, hop, 2*hop, ... whose window still fits
    inside the clip. A quotient within 1e-9 of the next integer is rounded
    up so grid-aligned durations are not lost to float rounding.
    """
    if not (window_seconds > 0):
        raise ValueError(f"window_seconds must be positive, got {window_seconds}")
    if not (0 < hop_seconds <= window_seconds):
        raise ValueError(
            f"hop_seconds must be in (0, window_seconds], got {hop_seconds} "
            f"with window {window_seconds}"
        )
    if clip_seconds < window_seconds:
        raise UnframeableClipError(
            f"clip of {clip_seconds} s is shorter than the {window_seconds} s analysis window"
        )
    return int(math.floor((clip_seconds - window_seconds) / hop_seconds + 1e-9)) + 1


@dataclass
class ModelInfo:
    """Registry entry: expected embedding dimension and nominal rate."""

    dim: int
    rate_hz: float


@dataclass
class ManifestEntry:
    clip_id: str
    path: str
    category: str
    system: str
    model: str


@dataclass
class Manifest:
    """Clip listing plus the model registry it is validated against.

    ``base_dir`` anchors relative entry paths; ``load_manifest`` sets it to
    the manifest file's directory. ``notes`` carries free-form provenance
    (extraction settings, padding policy) and is preserved verbatim.
    """

    models: dict
    entries: list
    categories: tuple = DCASE_CATEGORIES
    base_dir: Path = Path(".")
    notes: dict = field(default_factory=dict)

    def validate(self):
        category_set = set(self.categories)
        seen = set()
        for entry in self.entries:
            if entry.clip_id in seen:
                raise DataError(f"duplicate clip_id '{entry.clip_id}'")
            seen.add(entry.clip_id)
            for label, value in (("clip_id", entry.clip_id), ("system", entry.system),
                                 ("category", entry.category), ("model", entry.model)):
                if _ID_SEPARATOR in value:
                    raise DataError(f"{label} '{value}' must not contain '{_ID_SEPARATOR}'")
            if entry.category not in category_set:
                raise DataError(
                    f"clip '{entry.clip_id}': category '{entry.category}' is not in the "
                    f"declared set {sorted(category_set)}"
                )
            if entry.model not in self.models:
                raise DataError(f"clip '{entry.clip_id}': model '{entry.model}' is not in the registry")

    def validate_files(self):
        """Check every entry's file header against the model registry."""
        self.validate()
        for entry in self.entries:
            info = self.models[entry.model]
            header = read_header(self.resolve_path(entry))
            if header.dim != info.dim:
                raise DataError(
                    f"clip '{entry.clip_id}': header dim {header.dim} does not match "
                    f"model '{entry.model}' registry dim {info.dim}"
                )
            if header.frame_rate_hz != info.rate_hz:
                raise DataError(
                    f"clip '{entry.clip_id}': header rate {header.frame_rate_hz} Hz does not "
                    f"match model '{entry.model}' registry rate {info.rate_hz} Hz"
                )

    def resolve_path(self, entry) -> Path:
        path = Path(entry.path)
        return path if path.is_absolute() else self.base_dir / path

    def systems(self) -> list:
        """Unique system ids in first-appearance order."""
        out = []
        for entry in self.entries:
            if entry.system not in out:
                out.append(entry.system)
        return out

    def categories_present(self, system=None, model=None) -> list:
        """Categories with at least one matching entry, in declared order."""
        present = {e.category for e in self.entries
                   if (system is None or e.system == system)
                   and (model is None or e.model == model)}
        return [c for c in self.categories if c in present]


def load_manifest(path) -> Manifest:
    """Load and structurally validate a ``manifest.json``."""
    path = Path(path)
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise FormatError(f"{path}: not valid JSON ({err})") from err
    if not isinstance(doc, dict) or "models" not in doc or "entries" not in doc:
        raise FormatError(f"{path}: manifest must be an object with 'models' and 'entries'")
    try:
        models = {name: ModelInfo(dim=int(info["dim"]), rate_hz=float(info["rate_hz"]))
                  for name, info in doc["models"].items()}
        entries = [ManifestEntry(clip_id=str(e["clip_id"]), path=str(e["path"]),
                                 category=str(e["category"]), system=str(e["system"]),
                                 model=str(e["model"]))
                   for e in doc["entries"]]
    except (KeyError, TypeError, ValueError) as err:
        raise FormatError(f"{path}: malformed manifest field ({err})") from err
    categories = tuple(doc.get("categories", DCASE_CATEGORIES))
    manifest = Manifest(models=models, entries=entries, categories=categories,
                        base_dir=path.parent, notes=dict(doc.get("notes", {})))
    manifest.validate()
    return manifest


def save_manifest(manifest, path):
    """Write a manifest as deterministic JSON (sorted keys, 2-space indent)."""
    doc = {
        "models": {name: {"dim": info.dim, "rate_hz": info.rate_hz}
                   for name, info in manifest.models.items()},
        "entries": [{"clip_id": e.clip_id, "path": e.path, "category": e.category,
                     "system": e.system, "model": e.model} for e in manifest.entries],
        "categories": list(manifest.categories),
    }
    if manifest.notes:
        doc["notes"] = manifest.notes
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class EmbeddingSet:
    """Concatenated frames of every clip matched by a manifest filter."""

    set_id: str
    frames: np.ndarray  # (N, d)
    member_count: int


def make_set_id(system, category=None) -> str:
    return system if category is None else f"{system}{_ID_SEPARATOR}{category}"


def parse_set_id(set_id):
    """Split a set id back into (system, category-or-None)."""
    if _ID_SEPARATOR in set_id:
        system, category = set_id.split(_ID_SEPARATOR, 1)
        return system, category
    return set_id, None


def collect_set(manifest, system, model, category=None) -> EmbeddingSet:
    """Assemble the embedding set for one (system, model[, category]) filter.

    Frames of matching clips are concatenated in manifest order, which makes
    assembly deterministic. Raises DataError when the filter matches nothing
    or when matched clips disagree on dimension.
    """
    matched = [e for e in manifest.entries
               if e.system == system and e.model == model
               and (category is None or e.category == category)]
    if not matched:
        raise DataError(
            f"no manifest entries match system='{system}', model='{model}'"
            + (f", category='{category}'" if category is not None else "")
        )
    blocks = []
    dim = None
    for entry in matched:
        try:
            matrix = read_embeddings(manifest.resolve_path(entry))
        except DataError as err:
            raise type(err)(f"clip '{entry.clip_id}': {err}") from err
        if dim is None:
            dim = matrix.header.dim
        elif matrix.header.dim != dim:
            raise DataError(
                f"clip '{entry.clip_id}': dim {matrix.header.dim} differs from "
                f"earlier clips' dim {dim}"
            )
        expected_dim = manifest.models[entry.model].dim
        if matrix.header.dim != expected_dim:
            raise DataError(
                f"clip '{entry.clip_id}': header dim {matrix.header.dim} does not match "
                f"model '{entry.model}' registry dim {expected_dim}"
            )
        blocks.append(matrix.frames)
    frames = np.concatenate(blocks, axis=0) if len(blocks) > 1 else blocks[0]
    return EmbeddingSet(set_id=make_set_id(system, category), frames=frames,
                        member_count=len(matched))
