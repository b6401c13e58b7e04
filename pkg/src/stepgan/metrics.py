"""Distribution metrics over embedding sets: IS, FAD, KID, l1-MMD, PCA."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .embeddings import EmbeddingSet
from .errors import (
    DegenerateCovariance,
    DegenerateInput,
    ExtractorMismatch,
    InsufficientSamples,
    InvalidDistribution,
)


def _check_pair(a: EmbeddingSet, b: EmbeddingSet) -> None:
    if a.extractor_tag != b.extractor_tag:
        raise ExtractorMismatch(
            f"extractor tags differ: {a.extractor_tag!r} vs {b.extractor_tag!r}"
        )
    if a.dim != b.dim:
        raise ExtractorMismatch(f"embedding dims differ: {a.dim} vs {b.dim}")


@dataclass
class GaussianStats:
    """Mean and covariance of an embedding set."""

    mean: np.ndarray
    cov: np.ndarray

    @classmethod
    def fit(cls, emb: EmbeddingSet) -> "GaussianStats":
        if len(emb) < 2:
            raise DegenerateCovariance(f"need n >= 2 to fit a covariance, got {len(emb)}")
        v = emb.vectors
        mean = v.mean(axis=0)
        cov = np.cov(v, rowvar=False)
        cov = np.atleast_2d(cov)
        return cls(mean, 0.5 * (cov + cov.T))


def _sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root; negative eigenvalues clamp to 0."""
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    """||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2))."""
    diff = a.mean - b.mean
    root_a = _sqrt_psd(a.cov)
    cross = root_a @ b.cov @ root_a
    tr_cross = float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(cross), 0.0, None))))
    return float(diff @ diff + np.trace(a.cov) + np.trace(b.cov) - 2.0 * tr_cross)


def fad(a: EmbeddingSet, b: EmbeddingSet) -> float:
    """Frechet distance between Gaussians fit to the two embedding sets."""
    _check_pair(a, b)
    return frechet_distance(GaussianStats.fit(a), GaussianStats.fit(b))


def _poly_kernel(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    d = x.shape[1]
    return (x @ y.T / d + 1.0) ** 3


def kid(a: EmbeddingSet, b: EmbeddingSet) -> float:
    """Unbiased squared-MMD estimator with the cubic polynomial kernel."""
    _check_pair(a, b)
    n, m = len(a), len(b)
    if n < 2 or m < 2:
        raise InsufficientSamples(f"unbiased KID needs n >= 2 per set, got {n} and {m}")
    x, y = a.vectors, b.vectors
    kxx = _poly_kernel(x, x)
    kyy = _poly_kernel(y, y)
    kxy = _poly_kernel(x, y)
    term_x = (kxx.sum() - np.trace(kxx)) / (n * (n - 1))
    term_y = (kyy.sum() - np.trace(kyy)) / (m * (m - 1))
    return float(term_x + term_y - 2.0 * kxy.mean())


def _mean_offdiag(dists: np.ndarray) -> float:
    n = dists.shape[0]
    if n < 2:
        return 0.0  # singleton within-set term
    return float((dists.sum() - np.trace(dists)) / (n * (n - 1)))


def mmd_l1(a: EmbeddingSet, b: EmbeddingSet) -> float:
    """Energy-style MMD with l1 distances, diagonal excluded from within terms.

    2 mean_{i,j} d(a_i, b_j) - mean_{i!=j} d(a_i, a_j) - mean_{i!=j} d(b_i, b_j).
    Like any unbiased energy estimator this can go (slightly) negative; the
    self-distance of a set against itself is -2 S / (n^2 (n-1)) with S the sum
    of its pairwise distances, not 0.
    """
    _check_pair(a, b)
    if len(a) < 1 or len(b) < 1:
        raise InsufficientSamples("mmd_l1 needs at least one vector per set")
    cross = cdist(a.vectors, b.vectors, metric="cityblock")
    within_a = cdist(a.vectors, a.vectors, metric="cityblock")
    within_b = cdist(b.vectors, b.vectors, metric="cityblock")
    return float(2.0 * cross.mean() - _mean_offdiag(within_a) - _mean_offdiag(within_b))


def inception_score(probs: np.ndarray) -> float:
    """exp(mean_i KL(p(y|x_i) || mean_j p(y|x_j))); ranges from 1 to #classes."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] < 1:
        raise InvalidDistribution(f"need a (n, k) probability matrix, got shape {p.shape}")
    if np.any(p < 0) or np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-6):
        raise InvalidDistribution("rows must be probability vectors summing to 1")
    # exactly-rounded column sums keep the marginal bitwise equal to the rows
    # for constant inputs, so uniform matrices score exactly 1
    marginal = np.array([math.fsum(col) for col in p.T]) / p.shape[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.where(p > 0, np.log(p) - np.log(marginal), 0.0)
    kl = (p * log_ratio).sum(axis=1)
    return float(np.exp(kl.mean()))


@dataclass
class PCAProjection:
    coords: dict  # source_tag -> (n, k) array
    explained_variance_ratio: np.ndarray


def pca_project(sets: list, k: int = 2) -> PCAProjection:
    """Fit PCA on the union of the sets and project each one.

    Components are ordered by decreasing variance; ratios refer to the total
    variance of the union.
    """
    if not sets:
        raise DegenerateInput("no embedding sets given")
    first = sets[0]
    for s in sets[1:]:
        _check_pair(first, s)
    stacked = np.concatenate([s.vectors for s in sets], axis=0)
    if stacked.shape[0] <= k:
        raise DegenerateInput(f"need more than {k} total rows, got {stacked.shape[0]}")
    centered = stacked - stacked.mean(axis=0)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    total_var = float((svals ** 2).sum())
    if total_var <= 0.0:
        raise DegenerateInput("union of embeddings has zero variance")
    ratios = (svals[:k] ** 2) / total_var
    components = vt[:k]
    coords = {}
    offset = 0
    for s in sets:
        block = centered[offset:offset + len(s)]
        coords[s.source_tag] = block @ components.T
        offset += len(s)
    return PCAProjection(coords, ratios)
