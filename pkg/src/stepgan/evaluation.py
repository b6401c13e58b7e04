"""End-to-end objective evaluation: IS per generated set, pairwise FAD/KID/MMD,
and PCA projection, persisted as JSON + edge-list CSV + figures."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics, plots
from .classifier import TrainedClassifier
from .embeddings import INCEPTION_VARIANT, extract_embeddings, register_classifier_extractor

DEFAULT_IS_SAMPLES = 3500

# Reference scores reported for the original four sample collections
# (misc 4.139, heels 3.221, hifi 3.411, wave 3.232); documentation only,
# not reproducible without those private datasets.


def pair_key(a: str, b: str) -> str:
    return "|".join(sorted((a, b)))


@dataclass
class MetricReport:
    is_scores: dict = field(default_factory=dict)   # generated set -> IS
    fad: dict = field(default_factory=dict)         # pair key -> value
    kid: dict = field(default_factory=dict)
    mmd: dict = field(default_factory=dict)
    pca_coords: dict = field(default_factory=dict)  # set -> (n, 2) list
    explained_variance: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def pair(self, metric: str, a: str, b: str) -> float:
        return getattr(self, metric)[pair_key(a, b)]

    def to_dict(self) -> dict:
        return {
            "inception_score": self.is_scores,
            "fad": self.fad,
            "kid": self.kid,
            "mmd_l1": self.mmd,
            "pca": {
                "explained_variance_ratio": self.explained_variance,
                "coords": {k: np.asarray(v).tolist() for k, v in self.pca_coords.items()},
            },
            "config": self.config,
        }


def _clips_matrix(clips) -> np.ndarray:
    return np.stack([np.asarray(c.samples, dtype=np.float64) for c in clips])


def evaluate(
    real_sets: dict,
    generated_sets: dict,
    classifier: TrainedClassifier,
    distance_extractor: str = INCEPTION_VARIANT,
    is_samples: int = DEFAULT_IS_SAMPLES,
    seed: int = 0,
) -> MetricReport:
    """Compute the metric suite over named clip collections.

    real_sets / generated_sets: {name: list of prepared AudioClips}. IS uses
    the classifier's class posteriors on up to `is_samples` clips per
    generated set; the pairwise distances and PCA run on `distance_extractor`
    embeddings of every set.
    """
    register_classifier_extractor(classifier.model)
    rng = np.random.default_rng(seed)

    report = MetricReport(
        config={
            "distance_extractor": distance_extractor,
            "is_samples": is_samples,
            "num_classes": classifier.cfg.num_classes,
            "kid_kernel": "(x.y/d + 1)^3",
            "mmd": "energy-style, l1 distance, diagonal excluded",
        }
    )

    for name, clips in generated_sets.items():
        x = _clips_matrix(clips)
        if len(x) > is_samples:
            x = x[rng.choice(len(x), is_samples, replace=False)]
        report.is_scores[name] = metrics.inception_score(classifier.model.predict_proba(x))

    all_sets = {**real_sets, **generated_sets}
    embeddings: dict = {}
    for name, clips in all_sets.items():
        embeddings[name] = extract_embeddings(
            _clips_matrix(clips), distance_extractor, source_tag=name
        )

    names = list(embeddings)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            key = pair_key(a, b)
            report.fad[key] = metrics.fad(embeddings[a], embeddings[b])
            report.kid[key] = metrics.kid(embeddings[a], embeddings[b])
            report.mmd[key] = metrics.mmd_l1(embeddings[a], embeddings[b])

    projection = metrics.pca_project(list(embeddings.values()), k=2)
    report.pca_coords = projection.coords
    report.explained_variance = [float(r) for r in projection.explained_variance_ratio]
    return report


def write_report(report: MetricReport, out_json, figures: bool = True) -> dict:
    """Persist report JSON, the edge-list CSV, and the figures next to it."""
    out_json = Path(out_json)
    out_json.parent.mkdir(parents=True, exist_ok=True)
    out_json.write_text(json.dumps(report.to_dict(), indent=2))
    base = out_json.with_suffix("")

    edges_path = base.parent / (base.name + "_edges.csv")
    lines = ["set_a,set_b,metric,value"]
    for metric_name in ("fad", "kid", "mmd"):
        for key, value in getattr(report, metric_name).items():
            a, b = key.split("|")
            lines.append(f"{a},{b},{metric_name},{value}")
    edges_path.write_text("\n".join(lines) + "\n")

    written = {"report": out_json, "edges": edges_path}
    if figures:
        pair_values = {
            m: {tuple(k.split("|")): v for k, v in getattr(report, m).items()}
            for m in ("fad", "kid", "mmd")
        }
        written["metric_graphs"] = plots.plot_metric_graphs(
            pair_values, base.parent / (base.name + "_distances.png")
        )
        if report.pca_coords:
            written["pca"] = plots.plot_pca(
                report.pca_coords,
                np.asarray(report.explained_variance),
                base.parent / (base.name + "_pca.png"),
            )
    return written
