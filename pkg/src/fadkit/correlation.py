"""Spearman rank correlation of FAD against perceptual ratings, with a
noise-injection uncertainty estimate.

Ratings arrive as one mean score per (system, category) cell for two
criteria, audio quality and category fit. Correlation uses inverse FAD so
that higher values align with better ratings; when any FAD in scope is
exactly zero the inverse is undefined and negated FAD is used instead,
which produces the same ranks.

Uncertainty follows a fixed protocol: add i.i.d. Gaussian noise (default
standard deviation 1) to every rating in scope, recompute the correlation,
repeat (default 100 times), and report the mean and population standard
deviation of the coefficients.

The noise stream is pinned down so reports reproduce bit-for-bit across
runs and, up to floating-point rounding of log/sqrt, across
implementations:

* Base generator: SplitMix64. With 64-bit wraparound arithmetic,
  GOLDEN = 0x9E3779B97F4A7C15, and mix64(z) the xor-shift-multiply
  finalizer (constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, shifts
  30/27/31), output k of a stream seeded with s is mix64(s + k * GOLDEN)
  for k = 1, 2, ...
* Stream isolation: repetition i draws from the stream seeded with
  mix64(seed + (i + 1) * GOLDEN), so repetitions are independent of
  scheduling order.
* Uniform to (0, 1): u = ((z >> 11) + 0.5) * 2^-53, never exactly 0 or 1.
* Normal transform: Wichura's AS241 (PPND16) rational approximation of
  the inverse normal CDF, accurate to about 1e-16.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError, InsufficientDataError, UndefinedCorrelationError

CRITERIA = ("audio_quality", "category_fit")
OVERALL_SCOPE = "overall"

RATINGS_CSV_COLUMNS = ("system", "category", "audio_quality", "category_fit")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


@dataclass
class RatingRow:
    system: str
    category: str
    audio_quality: float
    category_fit: float


@dataclass
class RatingsTable:
    """Perceptual scores keyed by (system, category); one row per cell."""

    rows: list

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            key = (row.system, row.category)
            if key in seen:
                raise DataError(f"duplicate ratings row for system='{row.system}', "
                                f"category='{row.category}'")
            seen.add(key)
            if not (np.isfinite(row.audio_quality) and np.isfinite(row.category_fit)):
                raise DataError(f"non-finite rating for system='{row.system}', "
                                f"category='{row.category}'")

    def cells(self, criterion, scope=OVERALL_SCOPE) -> dict:
        """{(system, category): score} for one criterion, optionally one category."""
        if criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
        out = {}
        for row in self.rows:
            if scope != OVERALL_SCOPE and row.category != scope:
                continue
            out[(row.system, row.category)] = getattr(row, criterion)
        return out


@dataclass
class Uncertainty:
    """Summary of the noise-injection repetitions."""

    mean_rho: float
    std_rho: float
    reps: int
    noise_std: float
    seed: int


@dataclass
class CorrelationReport:
    rho: float
    n: int
    criterion: str
    scope: str
    ranking: str  # "fad_inverse" or "negated_fad"
    uncertainty: Uncertainty | None = None

    def to_dict(self) -> dict:
        doc = {"rho": self.rho, "n": self.n, "criterion": self.criterion,
               "scope": self.scope, "ranking": self.ranking}
        if self.uncertainty is not None:
            u = self.uncertainty
            doc["uncertainty"] = {"mean_rho": u.mean_rho, "std_rho": u.std_rho,
                                  "reps": u.reps, "noise_std": u.noise_std, "seed": u.seed}
        return doc


def average_ranks(values) -> np.ndarray:
    """1-based ranks where tied values share the mean of their positions."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="mergesort")
    sorted_values = values[order]
    new_group = np.r_[True, sorted_values[1:] != sorted_values[:-1]]
    group_starts = np.flatnonzero(new_group)
    counts = np.diff(np.r_[group_starts, len(values)])
    group_rank = group_starts + (counts - 1) / 2.0 + 1.0
    ranks = np.empty(len(values), dtype=np.float64)
    ranks[order] = group_rank[np.cumsum(new_group) - 1]
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks.

    Raises UndefinedCorrelationError when either input is constant, since
    zero rank variance leaves the coefficient undefined.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"inputs must be 1-D and equal length, got {x.shape} and {y.shape}")
    if len(x) < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {len(x)}")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DataError("inputs contain non-finite values")
    rx = average_ranks(x)
    ry = average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    xx = rx @ rx
    yy = ry @ ry
    if xx == 0.0 or yy == 0.0:
        raise UndefinedCorrelationError("an input is constant; rank variance is zero")
    rho = (rx @ ry) / np.sqrt(xx * yy)
    return float(min(1.0, max(-1.0, rho)))


def _resolve_cells(fad_values, ratings, criterion, scope):
    """Pair FAD values with ratings cell-by-cell; keys must match exactly."""
    fad_cells = {}
    for item in fad_values:
        key = (item["system"], item["category"])
        if scope != OVERALL_SCOPE and item["category"] != scope:
            continue
        if key in fad_cells:
            raise DataError(f"duplicate FAD value for system='{key[0]}', category='{key[1]}'")
        fad_cells[key] = float(item["fad"])
    rating_cells = ratings.cells(criterion, scope)
    for key in fad_cells:
        if key not in rating_cells:
            raise DataError(f"no rating for system='{key[0]}', category='{key[1]}'")
    for key in rating_cells:
        if key not in fad_cells:
            raise DataError(f"no FAD value for system='{key[0]}', category='{key[1]}'")
    keys = sorted(fad_cells)
    if len(keys) < 2:
        raise InsufficientDataError(
            f"scope '{scope}' has only {len(keys)} (system, category) cells; need at least 2"
        )
    fad = np.array([fad_cells[k] for k in keys], dtype=np.float64)
    scores = np.array([rating_cells[k] for k in keys], dtype=np.float64)
    return fad, scores


def _ranking_values(fad):
    """Inverse FAD when possible, negated FAD otherwise (identical ranks)."""
    if np.any(fad == 0.0):
        return -fad, "negated_fad"
    return 1.0 / fad, "fad_inverse"


def correlate(fad_values, ratings, criterion, scope=OVERALL_SCOPE) -> CorrelationReport:
    """Correlate FAD (inverse-oriented) against one rating criterion.

    ``fad_values`` is an iterable of mappings with keys system, category,
    fad. Scope is either "overall" or a single category name; the (system,
    category) cells of both inputs must then match exactly.
    """
    fad, scores = _resolve_cells(fad_values, ratings, criterion, scope)
    values, ranking = _ranking_values(fad)
    rho = spearman(values, scores)
    return CorrelationReport(rho=rho, n=len(fad), criterion=criterion, scope=scope,
                             ranking=ranking)


def bootstrap_uncertainty(fad_values, ratings, criterion, scope=OVERALL_SCOPE,
                          noise_std=1.0, reps=100, seed=0) -> Uncertainty:
    """Noise-injection uncertainty for one correlation.

    Each repetition adds i.i.d. Gaussian noise to the ratings in scope and
    recomputes the coefficient; the report is the mean and population
    standard deviation over repetitions. Fully deterministic given the
    seed; repetition streams are derived independently from (seed, index).
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if not noise_std >= 0:
        raise ValueError(f"noise_std must be >= 0, got {noise_std}")
    fad, scores = _resolve_cells(fad_values, ratings, criterion, scope)
    values, _ = _ranking_values(fad)
    rhos = np.empty(reps, dtype=np.float64)
    for rep in range(reps):
        noise = noise_std * seeded_normals(seed, rep, len(scores))
        rhos[rep] = spearman(values, scores + noise)
    if np.all(rhos == rhos[0]):  # degenerate noise: report exact zeros
        return Uncertainty(mean_rho=float(rhos[0]), std_rho=0.0, reps=reps,
                           noise_std=float(noise_std), seed=int(seed))
    return Uncertainty(mean_rho=float(rhos.mean()), std_rho=float(rhos.std()),
                       reps=reps, noise_std=float(noise_std), seed=int(seed))


# --- pinned noise generator -------------------------------------------------

def _mix64_array(z):
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def _mix64_int(z):
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def splitmix64_stream(seed, count) -> np.ndarray:
    """First ``count`` SplitMix64 outputs for a stream seeded with ``seed``."""
    k = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        states = np.uint64(seed & _MASK64) + k * np.uint64(_GOLDEN)
    return _mix64_array(states)

def seeded_normals(seed, stream_index, count) -> np.ndarray:
    """Standard normal deviates for one isolated (seed, stream_index) stream."""
    stream_seed = _mix64_int((seed + (stream_index + 1) * _GOLDEN) & _MASK64)
    bits = splitmix64_stream(stream_seed, count)
    uniforms = ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    return inverse_normal_cdf(uniforms)


# AS241 (PPND16) coefficients, central region |p - 0.5| <= 0.425.
_AS241_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
            1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
            3.3430575583588128105e4, 2.5090809287301226727e3)
_AS241_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
            2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
            5.2264952788528545610e3)
# Intermediate tail, r = sqrt(-log(min(p, 1-p))) in (1.6, 5].
_AS241_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
            3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
            2.27238449892691845833e-2, 7.74545014278341407640e-4)
_AS241_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
            1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
            1.05075007164441684324e-9)
# Far tail, r > 5.
_AS241_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
            2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
            2.71155556874348757815e-5, 2.01033439929228813265e-7)
_AS241_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
            7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
            2.04426310338993978564e-15)


def _horner(coefficients, r):
    result = np.full_like(r, coefficients[-1])
    for c in reversed(coefficients[:-1]):
        result = result * r + c
    return result


def inverse_normal_cdf(p) -> np.ndarray:
    """Inverse of the standard normal CDF on (0, 1), Wichura's AS241 (PPND16)."""
    p = np.asarray(p, dtype=np.float64)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("p must lie strictly inside (0, 1)")
    q = p - 0.5
    out = np.empty_like(p)

    central = np.abs(q) <= 0.425
    if central.any():
        r = 0.180625 - q[central] * q[central]
        out[central] = q[central] * _horner(_AS241_A, r) / _horner(_AS241_B, r)

    tail = ~central
    if tail.any():
        q_tail = q[tail]
        r = np.where(q_tail < 0.0, p[tail], 1.0 - p[tail])
        r = np.sqrt(-np.log(r))
        near = r <= 5.0
        value = np.empty_like(r)
        value[near] = _horner(_AS241_C, r[near] - 1.6) / _horner(_AS241_D, r[near] - 1.6)
        value[~near] = _horner(_AS241_E, r[~near] - 5.0) / _horner(_AS241_F, r[~near] - 5.0)
        out[tail] = np.where(q_tail < 0.0, -value, value)
    return out


# --- ratings file I/O --------------------------------------------------------

def load_ratings_csv(path) -> RatingsTable:
    """Read a ratings table; extra columns are tolerated and ignored."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RATINGS_CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise DataError(f"{path}: missing ratings columns {sorted(missing)}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            try:
                rows.append(RatingRow(system=row["system"], category=row["category"],
                                      audio_quality=float(row["audio_quality"]),
                                      category_fit=float(row["category_fit"])))
            except (TypeError, ValueError) as err:
                raise DataError(f"{path}:{line_no}: bad rating value ({err})") from err
    return RatingsTable(rows=rows)


def save_ratings_csv(table, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RATINGS_CSV_COLUMNS)
        for row in table.rows:
            writer.writerow([row.system, row.category,
                             repr(row.audio_quality), repr(row.category_fit)])
