"""Waveform ingest and preparation: load, resample, normalize, align.

All functions are pure; clips are immutable value objects holding float64
samples in [-1, 1].
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import scipy.io.wavfile
import scipy.signal

from .errors import (
    InvalidRate,
    NoOnset,
    UnreadableFile,
    UnsupportedEncoding,
    ZeroPeak,
)

SURFACE_NAMES = ("carpet", "deck", "metal", "pavement", "rug", "wood", "wood_internal")
NUM_SURFACES = len(SURFACE_NAMES)

EVAL_CLASS_NAMES = (
    "carpet/rug",
    "deck/boardwalk",
    "metal",
    "pavement/concrete",
    "wood/wood internal",
)
NUM_EVAL_CLASSES = len(EVAL_CLASS_NAMES)

TARGET_RATE = 16000
TARGET_LEN = 8192
TARGET_DBFS = -6.0
ONSET_THRESHOLD = 0.05
PRE_ONSET_OFFSET = 256


@dataclass(frozen=True)
class SurfaceClass:
    """One of the 7 recorded walking surfaces."""

    id: int
    name: str

    def __post_init__(self):
        if not 0 <= self.id < NUM_SURFACES or SURFACE_NAMES[self.id] != self.name:
            raise ValueError(f"not a surface class: id={self.id} name={self.name!r}")

    @classmethod
    def from_name(cls, name: str) -> "SurfaceClass":
        if name not in SURFACE_NAMES:
            raise ValueError(f"unknown surface name: {name!r}")
        return cls(SURFACE_NAMES.index(name), name)

    @classmethod
    def from_id(cls, class_id: int) -> "SurfaceClass":
        return cls(class_id, SURFACE_NAMES[class_id])


@dataclass(frozen=True)
class EvalClass:
    """One of the 5 merged evaluation classes."""

    id: int
    name: str

    def __post_init__(self):
        if not 0 <= self.id < NUM_EVAL_CLASSES or EVAL_CLASS_NAMES[self.id] != self.name:
            raise ValueError(f"not an eval class: id={self.id} name={self.name!r}")

    @classmethod
    def from_name(cls, name: str) -> "EvalClass":
        if name not in EVAL_CLASS_NAMES:
            raise ValueError(f"unknown eval class name: {name!r}")
        return cls(EVAL_CLASS_NAMES.index(name), name)


@dataclass(frozen=True)
class ClassMap:
    """Total mapping from the 7 surface classes onto the 5 eval classes."""

    mapping: dict

    def __post_init__(self):
        if set(self.mapping) != set(SURFACE_NAMES):
            raise ValueError("class map must cover every surface class exactly once")
        targets = {v.name for v in self.mapping.values()}
        if targets != set(EVAL_CLASS_NAMES):
            raise ValueError("class map must hit all 5 eval classes")
        if self.mapping["carpet"] != self.mapping["rug"]:
            raise ValueError("carpet and rug must map to the same eval class")
        if self.mapping["wood"] != self.mapping["wood_internal"]:
            raise ValueError("wood and wood_internal must map to the same eval class")

    def __getitem__(self, surface) -> EvalClass:
        name = surface.name if isinstance(surface, SurfaceClass) else surface
        return self.mapping[name]


def default_class_map() -> ClassMap:
    """carpet/rug and wood/wood_internal fold together; the rest map 1:1."""
    m = {
        "carpet": "carpet/rug",
        "rug": "carpet/rug",
        "deck": "deck/boardwalk",
        "metal": "metal",
        "pavement": "pavement/concrete",
        "wood": "wood/wood internal",
        "wood_internal": "wood/wood internal",
    }
    return ClassMap({k: EvalClass.from_name(v) for k, v in m.items()})


@dataclass(frozen=True)
class AudioClip:
    """Fixed-rate mono waveform, samples in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int
    label: object = None  # SurfaceClass | EvalClass | None

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.samples))) if len(self.samples) else 0.0

    @property
    def prepared(self) -> bool:
        return len(self.samples) == TARGET_LEN and self.sample_rate == TARGET_RATE

    def validate(self) -> "AudioClip":
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("clip contains non-finite samples")
        if self.peak > 1.0 + 1e-12:
            raise ValueError(f"clip exceeds full scale: peak={self.peak}")
        return self

    def with_label(self, label) -> "AudioClip":
        return replace(self, label=label)


def _scale_to_unit(data: np.ndarray) -> np.ndarray:
    """Map integer PCM onto [-1, 1]; float PCM is clamped."""
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32768.0
    if data.dtype == np.int32:
        # 24-bit WAV arrives left-justified in int32, so one scale covers both
        return data.astype(np.float64) / 2147483648.0
    if data.dtype in (np.float32, np.float64):
        return np.clip(data.astype(np.float64), -1.0, 1.0)
    raise UnsupportedEncoding(f"unsupported PCM sample type: {data.dtype}")


def load_clip(path) -> AudioClip:
    """Decode a PCM WAV to a mono clip; multichannel is averaged down."""
    path = Path(path)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rate, data = scipy.io.wavfile.read(path)
    except ValueError as exc:
        if "Unknown wave file format" in str(exc):
            raise UnsupportedEncoding(f"{path}: {exc}") from exc
        raise UnreadableFile(f"{path}: {exc}") from exc
    except (OSError, EOFError) as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    if data.size == 0:
        raise UnreadableFile(f"{path}: empty data chunk")
    samples = _scale_to_unit(data)
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    return AudioClip(samples, int(rate)).validate()


def save_clip(clip: AudioClip, path) -> None:
    """Write a clip as 16-bit PCM mono WAV."""
    pcm = np.clip(np.round(clip.samples * 32767.0), -32768, 32767).astype(np.int16)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    scipy.io.wavfile.write(path, clip.sample_rate, pcm)


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Band-limited (polyphase) resampling to target_rate."""
    if not isinstance(target_rate, (int, np.integer)) or target_rate <= 0:
        raise InvalidRate(f"target rate must be a positive integer, got {target_rate}")
    if clip.sample_rate <= 0:
        raise InvalidRate(f"source rate must be positive, got {clip.sample_rate}")
    if target_rate == clip.sample_rate:
        return replace(clip, samples=clip.samples.copy())
    g = math.gcd(target_rate, clip.sample_rate)
    out = scipy.signal.resample_poly(clip.samples, target_rate // g, clip.sample_rate // g)
    n_out = round(len(clip.samples) * target_rate / clip.sample_rate)
    if len(out) > n_out:
        out = out[:n_out]
    elif len(out) < n_out:
        out = np.pad(out, (0, n_out - len(out)))
    out = np.clip(out, -1.0, 1.0)
    return replace(clip, samples=out, sample_rate=int(target_rate))


def normalize_peak(clip: AudioClip, target_dbfs: float = TARGET_DBFS) -> AudioClip:
    """Scale so the absolute peak sits at 10^(target_dbfs/20)."""
    peak = clip.peak
    if peak == 0.0:
        raise ZeroPeak("all-silent clip cannot be normalized")
    target = 10.0 ** (target_dbfs / 20.0)
    return replace(clip, samples=clip.samples * (target / peak))


def align_and_fit(
    clip: AudioClip,
    onset_threshold: float = ONSET_THRESHOLD,
    target_len: int = TARGET_LEN,
    pre_onset_offset: int = PRE_ONSET_OFFSET,
) -> AudioClip:
    """Place the first threshold crossing at a fixed offset and fit to target_len.

    The window keeps up to `pre_onset_offset` samples of real attack before the
    crossing (zero-padded when the file starts later); the tail is zero-padded
    or truncated to `target_len`.
    """
    x = clip.samples
    peak = clip.peak
    if len(x) == 0 or peak == 0.0:
        raise NoOnset("clip is silent; no onset to align")
    above = np.abs(x) >= onset_threshold * peak
    if not above.any():
        raise NoOnset(f"threshold {onset_threshold} of peak never crossed")
    onset = int(np.argmax(above))

    out = np.zeros(target_len, dtype=np.float64)
    src_start = max(0, onset - pre_onset_offset)
    dst_start = pre_onset_offset - (onset - src_start)
    n = min(len(x) - src_start, target_len - dst_start)
    out[dst_start:dst_start + n] = x[src_start:src_start + n]
    return replace(clip, samples=out)


def prepare_clip(
    clip: AudioClip,
    target_rate: int = TARGET_RATE,
    target_dbfs: float = TARGET_DBFS,
    onset_threshold: float = ONSET_THRESHOLD,
    target_len: int = TARGET_LEN,
    pre_onset_offset: int = PRE_ONSET_OFFSET,
) -> AudioClip:
    """Full preparation chain: resample -> normalize -> align -> re-normalize.

    The trailing normalize restores the exact peak when tail truncation
    happened to clip past the loudest sample; it is a no-op otherwise.
    """
    out = resample(clip, target_rate)
    out = normalize_peak(out, target_dbfs)
    out = align_and_fit(out, onset_threshold, target_len, pre_onset_offset)
    return normalize_peak(out, target_dbfs)
