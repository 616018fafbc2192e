"""Embedding-agnostic Frechet Audio Distance toolkit.

Computes the Frechet distance between Gaussian fits of neural audio
embedding sets, correlates inverse FAD with perceptual ratings (Spearman,
with a noise-injection uncertainty estimate), reduces embedding
dimensionality by PCA, and maps inter-category FAD into 2D coordinates by
classical MDS. Embeddings travel in a bit-exact binary interchange format
described by a JSON manifest, so any extractor can feed the toolkit.
"""

__version__ = "0.1.0"

from .category_map import (META_CATEGORIES, CategoryMapResult, MdsResult, RegionGrid,
                           build_category_map, category_distance_matrix, classical_mds,
                           nearest_point_regions)
from .correlation import (CRITERIA, OVERALL_SCOPE, CorrelationReport, RatingRow,
                          RatingsTable, Uncertainty, average_ranks,
                          bootstrap_uncertainty, correlate, inverse_normal_cdf,
                          load_ratings_csv, save_ratings_csv, seeded_normals, spearman)
from .embeddings import (DCASE_CATEGORIES, REFERENCE_SYSTEM, EmbeddingHeader,
                         EmbeddingMatrix, EmbeddingSet, Manifest, ManifestEntry,
                         ModelInfo, collect_set, expected_frame_count, load_manifest,
                         make_set_id, parse_set_id, read_embeddings, read_header,
                         save_manifest, write_embeddings)
from .errors import (ConfigError, DataError, FadkitError, FormatError,
                     IndefiniteMatrixError, InsufficientDataError, LengthError,
                     NumericalError, UndefinedCorrelationError, UndefinedInverseError,
                     UnframeableClipError)
from .frechet import (FadResult, fad_inverse, frechet_distance, pairwise_fad, psd_sqrt,
                      read_fad_csv, trace_sqrt_product, write_fad_csv)
from .moments import (GaussianStats, MomentAccumulator, read_stats_cache,
                      stats_from_matrix, write_stats_cache)
from .pca import PcaProjection, apply_pca, fit_pca, read_projection, write_projection

__all__ = [name for name in dir() if not name.startswith("_")]
