"""Labeled dataset construction, persistence, and class remapping."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import audio
from .audio import ClassMap, SurfaceClass, default_class_map
from .errors import EmptyDataset, UnknownClassDirectory

MANIFEST_NAME = "manifest.json"


@dataclass
class LabeledDataset:
    """Prepared clips plus per-class tallies."""

    clips: list
    sources: list = field(default_factory=list)  # per-clip {path, original_rate}

    def __len__(self) -> int:
        return len(self.clips)

    @property
    def class_counts(self) -> dict:
        counts: dict = {}
        for clip in self.clips:
            counts[clip.label.name] = counts.get(clip.label.name, 0) + 1
        return counts

    @property
    def num_classes(self) -> int:
        return len({clip.label.id for clip in self.clips})

    def validate(self) -> "LabeledDataset":
        for clip in self.clips:
            if clip.label is None:
                raise ValueError("every clip in a dataset must carry a label")
            if not clip.prepared:
                raise ValueError("every clip must be prepared (8192 samples @ 16 kHz)")
        return self


def build_dataset(
    root_dir,
    onset_threshold: float = audio.ONSET_THRESHOLD,
    target_dbfs: float = audio.TARGET_DBFS,
) -> LabeledDataset:
    """Walk one sub-directory per surface name and prepare every WAV inside."""
    root = Path(root_dir)
    if not root.is_dir():
        raise EmptyDataset(f"dataset root {root} is not a directory")
    subdirs = sorted(p for p in root.iterdir() if p.is_dir())
    for sub in subdirs:
        if sub.name not in audio.SURFACE_NAMES:
            raise UnknownClassDirectory(
                f"{sub.name!r} is not a surface class "
                f"(expected one of {', '.join(audio.SURFACE_NAMES)})"
            )
    clips, sources = [], []
    for sub in subdirs:
        label = SurfaceClass.from_name(sub.name)
        for wav in sorted(sub.glob("*.wav")):
            raw = audio.load_clip(wav)
            prepared = audio.prepare_clip(
                raw, target_dbfs=target_dbfs, onset_threshold=onset_threshold
            )
            clips.append(prepared.with_label(label))
            sources.append({"path": str(wav), "original_rate": raw.sample_rate})
    if not clips:
        raise EmptyDataset(f"no WAV files found under {root}")
    return LabeledDataset(clips, sources).validate()


def remap_to_eval_classes(dataset: LabeledDataset, class_map: ClassMap | None = None) -> LabeledDataset:
    """Relabel 7 surface classes onto the 5 merged eval classes; audio untouched."""
    class_map = class_map or default_class_map()
    clips = [clip.with_label(class_map[clip.label]) for clip in dataset.clips]
    return LabeledDataset(clips, list(dataset.sources))


def write_prepared_dataset(
    dataset: LabeledDataset,
    out_dir,
    onset_threshold: float = audio.ONSET_THRESHOLD,
    target_dbfs: float = audio.TARGET_DBFS,
) -> Path:
    """Persist 16-bit PCM WAVs per class plus a JSON manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    counters: dict = {}
    for i, clip in enumerate(dataset.clips):
        name = clip.label.name
        k = counters.get(name, 0)
        counters[name] = k + 1
        rel = Path(name) / f"{name}_{k:04d}.wav"
        audio.save_clip(clip, out / rel)
        src = dataset.sources[i] if i < len(dataset.sources) else {}
        entries.append(
            {
                "path": str(rel),
                "class_id": clip.label.id,
                "class_name": name,
                "peak": clip.peak,
                "original_rate": src.get("original_rate"),
                "source_path": src.get("path"),
            }
        )
    manifest = {
        "sample_rate": audio.TARGET_RATE,
        "length": audio.TARGET_LEN,
        "target_dbfs": target_dbfs,
        "class_names": list(audio.SURFACE_NAMES),
        "class_counts": dataset.class_counts,
        "alignment": {
            # automatic stand-in: the source material gives no alignment recipe
            "method": "onset_threshold",
            "threshold": onset_threshold,
            "pre_onset_offset": audio.PRE_ONSET_OFFSET,
        },
        "clips": entries,
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2))
    return out / MANIFEST_NAME


def load_prepared_dataset(prepared_dir) -> LabeledDataset:
    """Load a dataset previously written by write_prepared_dataset."""
    prepared = Path(prepared_dir)
    manifest_path = prepared / MANIFEST_NAME
    if not manifest_path.exists():
        raise EmptyDataset(f"no {MANIFEST_NAME} under {prepared}")
    manifest = json.loads(manifest_path.read_text())
    clips, sources = [], []
    for entry in manifest["clips"]:
        clip = audio.load_clip(prepared / entry["path"])
        clips.append(clip.with_label(SurfaceClass.from_id(entry["class_id"])))
        sources.append({"path": entry.get("source_path"), "original_rate": entry.get("original_rate")})
    if not clips:
        raise EmptyDataset(f"manifest under {prepared} lists no clips")
    return LabeledDataset(clips, sources).validate()


def as_arrays(dataset: LabeledDataset) -> tuple:
    """Dataset as (float32 waveform matrix, int64 label vector)."""
    x = np.stack([clip.samples for clip in dataset.clips]).astype(np.float32)
    y = np.array([clip.label.id for clip in dataset.clips], dtype=np.int64)
    return x, y
