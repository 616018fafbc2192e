"""Command-line front end.

Subcommands: ``fad`` (per-system overall and per-category FAD CSV),
``correlate`` (Spearman reports with noise-injection uncertainty),
``reduce`` (PCA-projected copies of all embeddings for one model),
``map`` (inter-category FAD matrix with 2D MDS coordinates), and
``pipeline`` (fad, then correlate when ratings are given, then map,
optionally after a reduction step).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
error. Flag values take precedence over the JSON config file given with
``--config``, which takes precedence over built-in defaults. All outputs
are deterministic for fixed inputs and seed, so reruns are byte-identical.
The FADKIT_THREADS environment variable caps worker parallelism
(0 or unset = auto); it never affects results.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import parallel_map, worker_count
from .category_map import build_category_map
from .correlation import (CRITERIA, OVERALL_SCOPE, bootstrap_uncertainty, correlate,
                          load_ratings_csv)
from .embeddings import (REFERENCE_SYSTEM, Manifest, ManifestEntry, ModelInfo,
                         collect_set, load_manifest, make_set_id, read_embeddings,
                         save_manifest, write_embeddings)
from .errors import ConfigError, DataError, NumericalError
from .frechet import frechet_distance, write_fad_csv
from .moments import stats_from_matrix
from .pca import apply_pca, fit_pca, write_projection

DEFAULT_PCA_K = 128
DEFAULT_NOISE_STD = 1.0
DEFAULT_REPS = 100
DEFAULT_SEED = 0

#: Method choices baked into this toolkit, embedded in every report.
PROVENANCE = {
    "covariance_denominator": "n_minus_1",
    "frame_pooling": "concatenated_frames",
    "pca_fit_population": "union_of_reference_and_evaluation_sets",
    "mds_variant": "classical_torgerson",
    "mds_negative_eigenvalues": "truncated",
}

_CONFIG_KEYS = ("manifest", "ratings", "model", "reduce", "noise_std", "reps",
                "seed", "out", "system", "category")


@dataclass
class RunConfig:
    command: str
    manifest: Path
    out: Path
    ratings: Path | None
    model: str | None
    pca_k: int | None
    noise_std: float
    reps: int
    seed: int
    system: str | None
    category: str | None

    def hash(self) -> str:
        # output location is deliberately excluded: it affects no computed
        # value, so reports stay byte-identical wherever they are written
        doc = {"command": self.command, "manifest": str(self.manifest),
               "ratings": str(self.ratings) if self.ratings else None,
               "model": self.model, "pca_k": self.pca_k, "noise_std": self.noise_std,
               "reps": self.reps, "seed": self.seed, "system": self.system,
               "category": self.category, "toolkit_version": __version__}
        blob = json.dumps(doc, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fadkit",
        description="FAD scores, rating correlations, PCA reduction, and "
                    "category maps over embedding manifests.")
    parser.add_argument("--version", action="version", version=f"fadkit {__version__}")
    commands = parser.add_subparsers(dest="command")
    helps = {
        "fad": "write per-system overall and per-(system, category) FAD as CSV",
        "correlate": "write Spearman correlation reports with bootstrap uncertainty",
        "reduce": "write PCA-reduced copies of every embedding of one model",
        "map": "write the inter-category FAD matrix and its 2D MDS projection",
        "pipeline": "run fad, correlate (when ratings given), and map in sequence",
    }
    for name, help_text in helps.items():
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--manifest", help="path to manifest.json")
        sub.add_argument("--ratings", help="path to the perceptual ratings CSV")
        sub.add_argument("--model", help="embedding model name (optional when the "
                                         "manifest registry has exactly one)")
        sub.add_argument("--reduce", nargs="?", const=DEFAULT_PCA_K, type=int,
                         metavar="K", help=f"PCA target dimension (default {DEFAULT_PCA_K})")
        sub.add_argument("--noise-std", dest="noise_std", type=float,
                         help=f"bootstrap noise standard deviation (default {DEFAULT_NOISE_STD})")
        sub.add_argument("--reps", type=int,
                         help=f"bootstrap repetitions (default {DEFAULT_REPS})")
        sub.add_argument("--seed", type=int, help=f"bootstrap seed (default {DEFAULT_SEED})")
        sub.add_argument("--out", help="output directory")
        sub.add_argument("--system", help="restrict to one evaluation system")
        sub.add_argument("--category", help="restrict per-category rows to one category")
        sub.add_argument("--config", help="JSON config file; flags override its values")
    return parser


def _load_config_file(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file {path} is not valid JSON ({err})") from err
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = set(doc) - set(_CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"config file {path} has unknown keys {sorted(unknown)}")
    return doc


def resolve_config(args) -> RunConfig:
    """Merge flags over config-file values over defaults, then validate."""
    file_config = _load_config_file(args.config) if args.config else {}

    def pick(name, default=None):
        flag = getattr(args, name if name != "reduce" else "reduce")
        return flag if flag is not None else file_config.get(name, default)

    manifest = pick("manifest")
    if manifest is None:
        raise ConfigError("--manifest is required")
    manifest = Path(manifest)
    if not manifest.exists():
        raise ConfigError(f"manifest not found: {manifest}")

    out = pick("out")
    if out is None:
        raise ConfigError("--out is required")

    ratings = pick("ratings")
    if args.command == "correlate" and ratings is None:
        raise ConfigError("--ratings is required for 'correlate'")
    if ratings is not None:
        ratings = Path(ratings)
        if not ratings.exists():
            raise ConfigError(f"ratings file not found: {ratings}")

    pca_k = pick("reduce")
    if args.command == "reduce" and pca_k is None:
        pca_k = DEFAULT_PCA_K
    if pca_k is not None and pca_k < 1:
        raise ConfigError(f"--reduce must be >= 1, got {pca_k}")

    noise_std = float(pick("noise_std", DEFAULT_NOISE_STD))
    if noise_std < 0:
        raise ConfigError(f"--noise-std must be >= 0, got {noise_std}")
    reps = int(pick("reps", DEFAULT_REPS))
    if reps < 1:
        raise ConfigError(f"--reps must be >= 1, got {reps}")
    seed = int(pick("seed", DEFAULT_SEED))

    return RunConfig(command=args.command, manifest=manifest, out=Path(out),
                     ratings=ratings, model=pick("model"), pca_k=pca_k,
                     noise_std=noise_std, reps=reps, seed=seed,
                     system=pick("system"), category=pick("category"))


def _resolve_model(manifest, requested):
    if requested is not None:
        if requested not in manifest.models:
            raise ConfigError(f"model '{requested}' is not in the manifest registry "
                              f"(available: {sorted(manifest.models)})")
        return requested
    if len(manifest.models) == 1:
        return next(iter(manifest.models))
    raise ConfigError(f"manifest registers {len(manifest.models)} models "
                      f"{sorted(manifest.models)}; pick one with --model")


def _write_json(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def compute_fad_results(manifest, model, system=None, category=None, threads=1):
    """Overall and per-category FAD of every evaluation system vs the reference."""
    all_systems = manifest.systems()
    if REFERENCE_SYSTEM not in all_systems:
        raise DataError(f"manifest has no '{REFERENCE_SYSTEM}' system")
    systems = [s for s in all_systems if s != REFERENCE_SYSTEM]
    if system is not None:
        if system not in systems:
            raise DataError(f"evaluation system '{system}' is not in the manifest")
        systems = [system]
    if not systems:
        raise DataError("no evaluation systems in manifest")

    categories = manifest.categories_present(system=REFERENCE_SYSTEM, model=model)
    if category is not None:
        if category not in categories:
            raise DataError(f"category '{category}' has no reference entries for model '{model}'")
        categories = [category]

    reference_overall = stats_from_matrix(
        collect_set(manifest, REFERENCE_SYSTEM, model).frames)
    reference_by_category = {
        cat: stats_from_matrix(
            collect_set(manifest, REFERENCE_SYSTEM, model, category=cat).frames)
        for cat in categories}

    def evaluate(system_id):
        rows = []
        overall = stats_from_matrix(collect_set(manifest, system_id, model).frames)
        rows.append(frechet_distance(reference_overall, overall,
                                     ref_id=REFERENCE_SYSTEM, eval_id=system_id,
                                     model=model))
        for cat in categories:
            stats = stats_from_matrix(
                collect_set(manifest, system_id, model, category=cat).frames)
            rows.append(frechet_distance(reference_by_category[cat], stats,
                                         ref_id=make_set_id(REFERENCE_SYSTEM, cat),
                                         eval_id=make_set_id(system_id, cat),
                                         model=model))
        return rows

    results = []
    for rows in parallel_map(evaluate, systems, threads):
        results.extend(rows)
    return results


def _category_cells(results):
    """FAD rows keyed for correlation: only per-category entries qualify."""
    cells = []
    for result in results:
        if ":" in result.eval_id:
            system, category = result.eval_id.split(":", 1)
            cells.append({"system": system, "category": category, "fad": result.value})
    return cells


def _correlation_doc(cells, ratings, config):
    categories = []
    for cell in cells:
        if cell["category"] not in categories:
            categories.append(cell["category"])
    reports = []
    for criterion in CRITERIA:
        for scope in [OVERALL_SCOPE, *categories]:
            report = correlate(cells, ratings, criterion, scope)
            report.uncertainty = bootstrap_uncertainty(
                cells, ratings, criterion, scope,
                noise_std=config.noise_std, reps=config.reps, seed=config.seed)
            reports.append(report.to_dict())
    return {"toolkit_version": __version__, "config_hash": config.hash(),
            "provenance": PROVENANCE, "reports": reports}


def _write_fad_outputs(results, config):
    """The CSV columns are fixed by the export contract, so run metadata
    (version, config hash, provenance) goes into a sidecar JSON."""
    config.out.mkdir(parents=True, exist_ok=True)
    path = config.out / "fad.csv"
    write_fad_csv(results, path)
    _write_json({"toolkit_version": __version__, "config_hash": config.hash(),
                 "provenance": PROVENANCE, "rows": len(results)},
                config.out / "fad_run.json")
    print(f"wrote {path}")


def cmd_fad(config, threads):
    manifest = load_manifest(config.manifest)
    model = _resolve_model(manifest, config.model)
    results = compute_fad_results(manifest, model, system=config.system,
                                  category=config.category, threads=threads)
    _write_fad_outputs(results, config)


def cmd_correlate(config, threads):
    manifest = load_manifest(config.manifest)
    model = _resolve_model(manifest, config.model)
    ratings = load_ratings_csv(config.ratings)
    results = compute_fad_results(manifest, model, system=config.system,
                                  category=config.category, threads=threads)
    doc = _correlation_doc(_category_cells(results), ratings, config)
    config.out.mkdir(parents=True, exist_ok=True)
    path = config.out / "correlation.json"
    _write_json(doc, path)
    print(f"wrote {path}")


def _safe_filename(clip_id):
    return re.sub(r"[^A-Za-z0-9._-]", "_", clip_id)


def cmd_reduce(config, threads):
    manifest = load_manifest(config.manifest)
    model = _resolve_model(manifest, config.model)
    info = manifest.models[model]
    k = config.pca_k if config.pca_k is not None else DEFAULT_PCA_K
    if k > info.dim:
        raise ConfigError(f"--reduce {k} exceeds model '{model}' dimension {info.dim}")

    entries = [e for e in manifest.entries if e.model == model]
    if not entries:
        raise DataError(f"manifest has no entries for model '{model}'")
    clips = [read_embeddings(manifest.resolve_path(e)) for e in entries]
    union = np.concatenate([clip.frames for clip in clips], axis=0)
    if union.shape[0] - 1 < k:
        raise DataError(f"only {union.shape[0]} frames available for model '{model}'; "
                        f"fitting {k} components needs at least {k + 1}")
    projection = fit_pca(union, k)

    config.out.mkdir(parents=True, exist_ok=True)
    emb_dir = config.out / "emb"
    emb_dir.mkdir(exist_ok=True)
    reduced_model = f"{model}-pca{k}"
    new_entries = []
    for index, (entry, clip) in enumerate(zip(entries, clips)):
        reduced = apply_pca(projection, clip.frames)
        name = f"{index:04d}_{_safe_filename(entry.clip_id)}.emb"
        write_embeddings(reduced, k, clip.header.frame_rate_hz, emb_dir / name)
        new_entries.append(ManifestEntry(clip_id=entry.clip_id, path=f"emb/{name}",
                                         category=entry.category, system=entry.system,
                                         model=reduced_model))
    projection_path = config.out / "projection.fpca"
    write_projection(projection, projection_path)
    notes = dict(manifest.notes)
    notes["reduction"] = {"source_model": model, "pca_k": k,
                          "projection_file": "projection.fpca",
                          "fit_population": PROVENANCE["pca_fit_population"],
                          "toolkit_version": __version__,
                          "config_hash": config.hash()}
    reduced_manifest = Manifest(models={reduced_model: ModelInfo(dim=k, rate_hz=info.rate_hz)},
                                entries=new_entries, categories=manifest.categories,
                                base_dir=config.out, notes=notes)
    manifest_path = config.out / "manifest.json"
    save_manifest(reduced_manifest, manifest_path)
    print(f"wrote {manifest_path}")
    print(f"wrote {projection_path}")


def cmd_map(config, threads):
    manifest = load_manifest(config.manifest)
    model = _resolve_model(manifest, config.model)
    system = config.system if config.system is not None else REFERENCE_SYSTEM
    result = build_category_map(manifest, model, system=system, threads=threads)
    doc = result.to_dict()
    doc.update({"toolkit_version": __version__, "config_hash": config.hash(),
                "provenance": PROVENANCE})
    config.out.mkdir(parents=True, exist_ok=True)
    path = config.out / "category_map.json"
    _write_json(doc, path)
    print(f"wrote {path}")


def cmd_pipeline(config, threads):
    manifest = load_manifest(config.manifest)
    model = _resolve_model(manifest, config.model)

    if config.pca_k is not None:
        reduce_config = RunConfig(command="reduce", manifest=config.manifest,
                                  out=config.out / "reduced", ratings=None, model=model,
                                  pca_k=config.pca_k, noise_std=config.noise_std,
                                  reps=config.reps, seed=config.seed, system=None,
                                  category=None)
        cmd_reduce(reduce_config, threads)
        manifest = load_manifest(config.out / "reduced" / "manifest.json")
        model = _resolve_model(manifest, None)

    results = compute_fad_results(manifest, model, system=config.system,
                                  category=config.category, threads=threads)
    _write_fad_outputs(results, config)

    if config.ratings is not None:
        ratings = load_ratings_csv(config.ratings)
        doc = _correlation_doc(_category_cells(results), ratings, config)
        correlation_path = config.out / "correlation.json"
        _write_json(doc, correlation_path)
        print(f"wrote {correlation_path}")

    system = config.system if config.system is not None else REFERENCE_SYSTEM
    map_result = build_category_map(manifest, model, system=system, threads=threads)
    map_doc = map_result.to_dict()
    map_doc.update({"toolkit_version": __version__, "config_hash": config.hash(),
                    "provenance": PROVENANCE})
    map_path = config.out / "category_map.json"
    _write_json(map_doc, map_path)
    print(f"wrote {map_path}")


_COMMANDS = {"fad": cmd_fad, "correlate": cmd_correlate, "reduce": cmd_reduce,
             "map": cmd_map, "pipeline": cmd_pipeline}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage, 0 on --help
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        config = resolve_config(args)
        threads = worker_count()
        _COMMANDS[args.command](config, threads)
    except ConfigError as err:
        print(f"fadkit: configuration error: {err}", file=sys.stderr)
        return 2
    except DataError as err:
        print(f"fadkit: data error: {err}", file=sys.stderr)
        return 3
    except NumericalError as err:
        print(f"fadkit: numerical error: {err}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
