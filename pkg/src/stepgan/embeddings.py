"""Audio embedding sets and pluggable extractors.

The three pretrained extractors (VGGish-style, the trained spectrogram
classifier, OpenL3-style) are adapters around externally supplied models;
requesting one that has not been registered is a hard error, never a silent
substitution. A lightweight log-mel statistics extractor is built in for
diagnostics at scales where no pretrained model applies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from . import features
from .errors import ExtractorUnavailable

VGGISH_LIKE = "vggish_like"
INCEPTION_VARIANT = "inception_variant"
OPENL3 = "openl3_env_mel128_512"
LOGMEL_STATS = "logmel_stats"

EXTERNAL_TAGS = (VGGISH_LIKE, INCEPTION_VARIANT, OPENL3)


@dataclass
class EmbeddingSet:
    """n x d matrix of clip embeddings tagged with its extractor."""

    vectors: np.ndarray
    extractor_tag: str
    source_tag: str = ""

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError(f"embeddings must be 2-D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("embeddings contain non-finite values")
        self.vectors = v

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


_registry: dict = {}


def register_extractor(tag: str, fn, dim: int) -> None:
    """Register a callable mapping (n, 8192) float waveforms -> (n, dim)."""
    _registry[tag] = (fn, dim)


def available_extractors() -> list:
    return sorted(_registry)


def _clips_to_matrix(clips) -> np.ndarray:
    if isinstance(clips, np.ndarray):
        return np.atleast_2d(np.asarray(clips, dtype=np.float64))
    return np.stack([np.asarray(c.samples, dtype=np.float64) for c in clips])


def extract_embeddings(clips, extractor_tag: str, source_tag: str = "") -> EmbeddingSet:
    """One embedding row per clip, in clip order."""
    if extractor_tag not in _registry:
        hint = (
            "register it via register_extractor() or load_torchscript_extractor()"
            if extractor_tag in EXTERNAL_TAGS
            else f"known extractors: {available_extractors()}"
        )
        raise ExtractorUnavailable(f"no extractor registered for {extractor_tag!r}; {hint}")
    fn, dim = _registry[extractor_tag]
    x = _clips_to_matrix(clips)
    vectors = np.asarray(fn(x), dtype=np.float64)
    if vectors.shape != (x.shape[0], dim):
        raise ExtractorUnavailable(
            f"extractor {extractor_tag!r} returned shape {vectors.shape}, "
            f"expected {(x.shape[0], dim)}"
        )
    return EmbeddingSet(vectors, extractor_tag, source_tag)


def load_torchscript_extractor(tag: str, path, dim: int, batch_size: int = 64) -> None:
    """Adapter for an externally supplied TorchScript embedding model.

    The module must map a (batch, samples) float32 tensor to (batch, dim).
    """
    try:
        module = torch.jit.load(str(path), map_location="cpu")
    except (OSError, RuntimeError, ValueError) as exc:
        raise ExtractorUnavailable(f"cannot load TorchScript model from {path}: {exc}") from exc
    module.eval()

    def fn(x: np.ndarray) -> np.ndarray:
        outs = []
        with torch.no_grad():
            for i in range(0, len(x), batch_size):
                batch = torch.as_tensor(x[i:i + batch_size], dtype=torch.float32)
                outs.append(module(batch).double().numpy())
        return np.concatenate(outs, axis=0)

    register_extractor(tag, fn, dim)


def register_classifier_extractor(classifier, tag: str = INCEPTION_VARIANT) -> None:
    """Embed through the trained spectrogram classifier's penultimate layer."""
    register_extractor(tag, classifier.embed, classifier.cfg.embed_dim)


def _logmel_stats_extractor(x: np.ndarray) -> np.ndarray:
    return features.logmel_stats(x)


register_extractor(LOGMEL_STATS, _logmel_stats_extractor, 2 * features.N_MELS)
