"""Post-training analysis of the embedding table.

Standardization, PCA, k-means with elbow diagnostics, nearest-neighbor
queries and Pearson correlations against per-minute box metrics. The
embedding table is tiny (n_players x 8), so PCA runs on the 8x8
covariance via cyclic Jacobi rotations and k-means is plain Lloyd with
k-means++ seeding and best-of-10 restarts; robustness over cleverness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import ArgumentError, DegenerateDimensionError, RegistryError
from .registry import PlayerRegistry
from .validation import seed_key


# --------------------------------------------------------------------------
# standardization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StandardizedEmbeddings:
    """Column-wise z-scored embeddings plus the statistics to invert."""

    X: np.ndarray
    means: np.ndarray
    stds: np.ndarray


def standardize(embeddings) -> StandardizedEmbeddings:
    """Z-score each embedding dimension (population standard deviation)."""
    E = np.asarray(embeddings, dtype=np.float64)
    if E.ndim != 2 or E.shape[0] < 2:
        raise ArgumentError(f"need a 2-D table with >= 2 rows, got shape {E.shape}")
    if not np.all(np.isfinite(E)):
        raise ArgumentError("embedding table contains non-finite entries")
    means = E.mean(axis=0)
    stds = E.std(axis=0)
    dead = np.nonzero(stds == 0.0)[0]
    if dead.size:
        raise DegenerateDimensionError(int(dead[0]))
    return StandardizedEmbeddings(X=(E - means) / stds, means=means, stds=stds)


# --------------------------------------------------------------------------
# PCA via cyclic Jacobi rotations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PcaResult:
    components: np.ndarray          # (d, d), rows are principal axes
    explained_variance: np.ndarray  # (d,), non-increasing eigenvalues
    projections: np.ndarray         # (n, d) scores
    means: np.ndarray               # (d,) column means used for centering


def _jacobi_eigh(matrix: np.ndarray, max_sweeps: int = 100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi
    rotations. Returns (eigenvalues, eigenvectors-as-columns)."""
    A = np.array(matrix, dtype=np.float64)
    d = A.shape[0]
    V = np.eye(d)
    if d == 1:
        return A.diagonal().copy(), V
    scale = max(float(np.abs(A).max()), 1e-300)
    for _ in range(max_sweeps):
        off = math.sqrt(float(((A - np.diag(A.diagonal())) ** 2).sum()))
        if off <= 1e-14 * scale * d:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- R^T A R with R the (p, q) plane rotation
                row_rot = np.array([[c, -s], [s, c]])
                col_rot = np.array([[c, s], [-s, c]])
                A[[p, q], :] = row_rot @ A[[p, q], :]
                A[:, [p, q]] = A[:, [p, q]] @ col_rot
                V[:, [p, q]] = V[:, [p, q]] @ col_rot
    return A.diagonal().copy(), V


def pca(X) -> PcaResult:
    """Principal axes of X, sorted by explained variance descending.

    Centers defensively; variances use the population convention so they
    sum to the total variance. Sign convention: each axis's
    largest-magnitude coordinate is positive.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ArgumentError(f"need a 2-D matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ArgumentError("matrix contains non-finite entries")
    means = X.mean(axis=0)
    centered = X - means
    cov = centered.T @ centered / X.shape[0]
    eigvals, eigvecs = _jacobi_eigh(cov)
    order = np.argsort(-eigvals, kind="stable")
    eigvals = np.maximum(eigvals[order], 0.0)
    axes = eigvecs[:, order].T
    for row in axes:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaResult(
        components=axes,
        explained_variance=eigvals,
        projections=centered @ axes.T,
        means=means,
    )


# --------------------------------------------------------------------------
# k-means
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KMeansResult:
    k: int
    centroids: np.ndarray
    assignment: np.ndarray
    wcss: float
    restarts: int


def _squared_distances(X, centroids):
    # (n, k) matrix of squared euclidean distances
    diff = X[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kmeans_plus_plus(X, k, rng):
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = X[first]
    d2 = ((X - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # All remaining points coincide with chosen centroids; fall
            # back to uniform choice so k centroids always come back.
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[j] = X[idx]
        d2 = np.minimum(d2, ((X - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _assign_with_repair(X, centroids):
    """Nearest-centroid assignment; empty clusters are repaired by moving
    the point currently farthest from its own centroid (its centroid then
    becomes that point, so the assignment stays nearest-consistent)."""
    d2 = _squared_distances(X, centroids)
    assignment = np.argmin(d2, axis=1)
    for cluster in range(centroids.shape[0]):
        if not np.any(assignment == cluster):
            per_point = d2[np.arange(X.shape[0]), assignment]
            far = int(np.argmax(per_point))
            centroids[cluster] = X[far]
            assignment[far] = cluster
            d2[:, cluster] = ((X - centroids[cluster]) ** 2).sum(axis=1)
    return d2, assignment


def _lloyd(X, centroids, max_iter):
    k = centroids.shape[0]
    assignment = None
    for _ in range(max_iter):
        d2, new_assignment = _assign_with_repair(X, centroids)
        if assignment is not None and np.array_equal(new_assignment, assignment):
            assignment = new_assignment
            break
        assignment = new_assignment
        for cluster in range(k):
            centroids[cluster] = X[assignment == cluster].mean(axis=0)
    else:
        d2, assignment = _assign_with_repair(X, centroids)
    wcss = float(d2[np.arange(X.shape[0]), assignment].sum())
    return centroids, assignment, wcss


def kmeans(X, k, seed=0, max_iter: int = 300, restarts: int = 10) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding.

    Runs `restarts` independent seeded starts and keeps the lowest
    within-cluster sum of squares; ties go to the earlier restart.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ArgumentError(f"need a 2-D matrix, got shape {X.shape}")
    if k < 1 or k > X.shape[0]:
        raise ArgumentError(f"k must be in [1, {X.shape[0]}], got {k}")
    best = None
    for restart in range(restarts):
        rng = np.random.default_rng(seed_key(seed) + (restart,))
        centroids = _kmeans_plus_plus(X, k, rng)
        centroids, assignment, wcss = _lloyd(X, centroids.copy(), max_iter)
        if best is None or wcss < best[2]:
            best = (centroids, assignment, wcss)
    centroids, assignment, wcss = best
    return KMeansResult(
        k=k, centroids=centroids, assignment=assignment, wcss=wcss, restarts=restarts
    )


def elbow_curve(X, k_range, seed=0, restarts: int = 10):
    """(k, wcss) for every k in the inclusive range, sharing one seed."""
    ks = list(k_range)
    if not ks:
        raise ArgumentError("empty k range")
    return [(k, kmeans(X, k, seed=seed, restarts=restarts).wcss) for k in ks]


# --------------------------------------------------------------------------
# nearest neighbors
# --------------------------------------------------------------------------

def nearest_neighbors(embeddings, player: int, count: int) -> np.ndarray:
    """The `count` player ids closest to `player` in embedding space,
    ascending by euclidean distance, ties broken by lower id. The query
    player is excluded."""
    E = np.asarray(embeddings, dtype=np.float64)
    n = E.shape[0]
    if not 0 <= player < n:
        raise RegistryError(f"unknown player id {player} (table size {n})")
    if count < 0 or count >= n:
        raise ArgumentError(f"count must be in [0, {n - 1}], got {count}")
    d2 = ((E - E[player]) ** 2).sum(axis=1)
    order = np.lexsort((np.arange(n), d2))
    order = order[order != player]
    return order[:count]


# --------------------------------------------------------------------------
# correlations with per-minute box metrics
# --------------------------------------------------------------------------

METRICS = ("fg_made", "threes_made", "assists", "rebounds", "plus_minus")


@dataclass(frozen=True)
class CorrelationRow:
    metric: str
    dimension: int        # 1 or 2 (PCA score column)
    r: float
    t: float
    p: float
    significant: bool


def pearson_r(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float((xc * xc).sum()) * float((yc * yc).sum()))
    if denom == 0.0:
        raise ArgumentError("zero-variance input to pearson_r")
    return float((xc * yc).sum() / denom)


def _log_beta(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _betacf(a, b, x, max_iter=300, eps=3e-14):
    # Continued fraction for the regularized incomplete beta (Lentz).
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) via the continued-fraction expansion."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(
        a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: int) -> float:
    """Two-sided p-value of a t statistic with df degrees of freedom."""
    if df < 1:
        raise ArgumentError(f"degrees of freedom must be >= 1, got {df}")
    if math.isinf(t):
        return 0.0
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


def metric_correlations(
    projections, registry: PlayerRegistry, alpha: float = 5e-4
) -> list[CorrelationRow]:
    """Pearson correlation of the first two PCA score columns against
    each per-minute box metric.

    `alpha` is the already-corrected significance threshold; the p-value
    comes from t = r * sqrt((n-2) / (1-r^2)) with n-2 degrees of freedom.
    """
    scores = np.asarray(projections, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[1] < 2:
        raise ArgumentError(f"need at least two score columns, got shape {scores.shape}")
    n = scores.shape[0]
    if n != len(registry):
        raise ArgumentError(f"{n} score rows vs registry of {len(registry)} players")
    if n < 3:
        raise ArgumentError(f"need at least 3 players for a p-value, got {n}")
    minutes = np.array([rec.minutes for rec in registry], dtype=np.float64)
    if np.any(minutes <= 0):
        bad = int(np.nonzero(minutes <= 0)[0][0])
        raise RegistryError(f"player {bad} has no minutes; cannot normalize per minute")

    rows = []
    for metric in METRICS:
        values = np.array([getattr(rec, metric) for rec in registry], dtype=np.float64)
        per_minute = values / minutes
        if per_minute.std() == 0.0:
            raise ArgumentError(f"metric {metric} has zero variance")
        for dim in (1, 2):
            r = pearson_r(scores[:, dim - 1], per_minute)
            if abs(r) >= 1.0:
                t = math.inf if r > 0 else -math.inf
            else:
                t = r * math.sqrt((n - 2) / (1.0 - r * r))
            p = t_two_sided_p(t, n - 2)
            rows.append(CorrelationRow(metric, dim, r, t, p, p < alpha))
    return rows


# --------------------------------------------------------------------------
# sklearn-style wrappers
# --------------------------------------------------------------------------

class EmbeddingScaler(TransformerMixin, BaseEstimator):
    """Transformer view of `standardize` (fit/transform/inverse)."""

    def fit(self, X, y=None):
        result = standardize(X)
        self.means_ = result.means
        self.stds_ = result.stds
        return self

    def transform(self, X):
        return (np.asarray(X, dtype=np.float64) - self.means_) / self.stds_

    def inverse_transform(self, X):
        return np.asarray(X, dtype=np.float64) * self.stds_ + self.means_


class PrincipalComponents(TransformerMixin, BaseEstimator):
    """Transformer view of `pca`; n_components limits the score columns."""

    def __init__(self, n_components=None):
        self.n_components = n_components

    def fit(self, X, y=None):
        result = pca(X)
        keep = self.n_components or result.components.shape[0]
        self.components_ = result.components[:keep]
        self.explained_variance_ = result.explained_variance[:keep]
        self.mean_ = result.means
        return self

    def transform(self, X):
        return (np.asarray(X, dtype=np.float64) - self.mean_) @ self.components_.T

    def inverse_transform(self, X):
        return np.asarray(X, dtype=np.float64) @ self.components_ + self.mean_


class EmbeddingKMeans(BaseEstimator):
    """Estimator view of `kmeans` (fit/predict, cluster_centers_)."""

    def __init__(self, n_clusters=3, max_iter=300, restarts=10, random_state=0):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.restarts = restarts
        self.random_state = random_state

    def fit(self, X, y=None):
        result = kmeans(
            X, self.n_clusters, seed=self.random_state,
            max_iter=self.max_iter, restarts=self.restarts,
        )
        self.cluster_centers_ = result.centroids
        self.labels_ = result.assignment
        self.inertia_ = result.wcss
        return self

    def predict(self, X):
        return np.argmin(_squared_distances(np.asarray(X, dtype=np.float64),
                                            self.cluster_centers_), axis=1)

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
