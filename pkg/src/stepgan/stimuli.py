"""Sample generation from checkpoints and listening-test walk assembly."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from . import audio
from .audio import AudioClip
from .checkpoints import load_checkpoint
from .errors import EmptyClipPool, IncompatibleCheckpoint, MissingCondition
from .models.generator import GeneratorConfig, WaveGenerator

# 8 synthesis methods plus the real recordings
CONDITIONS = ("REAL", "PM1", "PM2", "PM3", "SPS", "STAT", "ADD", "WAVE", "HIFI")


def load_generator(ckpt_path) -> tuple:
    """Build a WaveGenerator from a generator or trainer checkpoint."""
    state, manifest = load_checkpoint(ckpt_path)
    kind = manifest.get("kind")
    if kind == "generator":
        raw_cfg = manifest["config"]
        weights = state["generator"]
    elif kind == "trainer":
        raw_cfg = manifest["config"]["generator"]
        weights = state["models"]["generator"]
    else:
        raise IncompatibleCheckpoint(f"checkpoint kind {kind!r} holds no generator")
    try:
        cfg = GeneratorConfig(**raw_cfg)
        model = WaveGenerator(cfg)
        model.load_state_dict(weights)
    except (TypeError, ValueError, RuntimeError) as exc:
        raise IncompatibleCheckpoint(f"generator config/weights mismatch: {exc}") from exc
    model.eval()
    return model, manifest


def generate_samples(ckpt_path, class_id: int, n: int, seed: int, batch_size: int = 64) -> list:
    """n deterministic clips of one class from a generator checkpoint."""
    model, manifest = load_generator(ckpt_path)
    num_classes = model.cfg.num_classes
    if not 0 <= class_id < num_classes:
        raise IncompatibleCheckpoint(
            f"class id {class_id} out of range for {num_classes} classes"
        )
    rng = torch.Generator().manual_seed(seed)
    clips = []
    with torch.no_grad():
        remaining = n
        while remaining > 0:
            b = min(batch_size, remaining)
            z = model.sample_latent(b, rng)
            labels = torch.full((b,), class_id, dtype=torch.long)
            out = model(z, labels).double().numpy()
            clips.extend(
                AudioClip(row, audio.TARGET_RATE, label=_label_for(class_id, manifest))
                for row in out
            )
            remaining -= b
    return clips


def _label_for(class_id: int, manifest: dict):
    classes = manifest.get("classes") or list(audio.SURFACE_NAMES)
    if list(classes) == list(audio.SURFACE_NAMES):
        return audio.SurfaceClass.from_id(class_id)
    return None


@dataclass
class WalkSpec:
    """Timing grid for one walk: clips placed every interval seconds."""

    duration_s: float = 10.0
    interval_s: float = 0.5
    seed: int = 0
    sample_rate: int = audio.TARGET_RATE

    def __post_init__(self):
        if self.duration_s <= 0 or self.interval_s <= 0:
            raise ValueError("duration and interval must be positive")

    @property
    def num_onsets(self) -> int:
        return int(np.floor(self.duration_s / self.interval_s + 1e-9))

    @property
    def onset_samples(self) -> list:
        step = self.interval_s * self.sample_rate
        return [int(round(k * step)) for k in range(self.num_onsets)]

    @property
    def total_samples(self) -> int:
        return int(round(self.duration_s * self.sample_rate))


@dataclass
class WalkResult:
    clip: AudioClip
    onsets: list
    clip_indices: list


def build_walk(clips: list, spec: WalkSpec) -> WalkResult:
    """Concatenate pool clips on the onset grid; overlaps sum.

    Clip choice per onset is uniform with replacement, seeded. If summation
    pushed the peak past -6 dBFS the walk is re-normalized back to it.
    """
    if not clips:
        raise EmptyClipPool("walk builder needs a non-empty clip pool")
    rng = np.random.default_rng(spec.seed)
    indices = rng.integers(0, len(clips), size=spec.num_onsets)
    out = np.zeros(spec.total_samples, dtype=np.float64)
    for onset, idx in zip(spec.onset_samples, indices):
        x = np.asarray(clips[idx].samples, dtype=np.float64)
        n = min(len(x), len(out) - onset)
        if n > 0:
            out[onset:onset + n] += x[:n]
    target_peak = 10.0 ** (audio.TARGET_DBFS / 20.0)
    peak = float(np.max(np.abs(out))) if len(out) else 0.0
    if peak > target_peak:
        out *= target_peak / peak
    walk = AudioClip(out, spec.sample_rate)
    return WalkResult(walk, list(spec.onset_samples), [int(i) for i in indices])


@dataclass
class SeriesManifest:
    series_id: str
    interval_s: float
    conditions: dict = field(default_factory=dict)  # condition -> wav path

    def to_dict(self) -> dict:
        return {
            "series_id": self.series_id,
            "interval_s": self.interval_s,
            "conditions": dict(self.conditions),
        }


def _condition_seed(base_seed: int, series_id: str, condition: str) -> int:
    digest = hashlib.sha256(f"{base_seed}:{series_id}:{condition}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def assemble_series(method_dirs: dict, spec: WalkSpec, out_dir, series_id: str = "series_00") -> SeriesManifest:
    """One walk per condition with the same pace; writes WAVs + manifest JSON."""
    missing = [c for c in CONDITIONS if c not in method_dirs]
    if missing:
        raise MissingCondition(f"missing condition folder(s): {', '.join(missing)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = SeriesManifest(series_id, spec.interval_s)
    for condition in CONDITIONS:
        pool_dir = Path(method_dirs[condition])
        wavs = sorted(pool_dir.rglob("*.wav"))
        if not wavs:
            raise MissingCondition(f"condition {condition}: no WAV files in {pool_dir}")
        pool = [audio.load_clip(p) for p in wavs]
        cond_spec = WalkSpec(
            spec.duration_s,
            spec.interval_s,
            seed=_condition_seed(spec.seed, series_id, condition),
            sample_rate=spec.sample_rate,
        )
        result = build_walk(pool, cond_spec)
        wav_path = out / f"{series_id}_{condition}.wav"
        audio.save_clip(result.clip, wav_path)
        manifest.conditions[condition] = wav_path.name
    (out / f"{series_id}.json").write_text(json.dumps(manifest.to_dict(), indent=2))
    return manifest
