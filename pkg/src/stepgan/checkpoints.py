"""Checkpoint persistence: a torch blob plus a sidecar JSON manifest.

The manifest carries everything needed to validate compatibility before
loading weights: model kind, full config, training step, and class list.
"""
from __future__ import annotations

import json
from pathlib import Path

import torch

from .audio import SURFACE_NAMES
from .errors import IncompatibleCheckpoint

FORMAT_VERSION = 1


def manifest_path(blob_path) -> Path:
    return Path(blob_path).with_suffix(".json")


def save_checkpoint(
    blob_path,
    kind: str,
    state: dict,
    config: dict,
    step: int,
    classes=SURFACE_NAMES,
    extra: dict | None = None,
) -> Path:
    blob_path = Path(blob_path)
    blob_path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(state, blob_path)
    manifest = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "config": config,
        "step": int(step),
        "classes": list(classes),
    }
    if extra:
        manifest.update(extra)
    manifest_path(blob_path).write_text(json.dumps(manifest, indent=2))
    return blob_path


def load_checkpoint(blob_path, expected_kind: str | None = None) -> tuple:
    """Return (state, manifest); validates kind and format before deserializing."""
    blob_path = Path(blob_path)
    mpath = manifest_path(blob_path)
    if not blob_path.exists() or not mpath.exists():
        raise IncompatibleCheckpoint(f"missing checkpoint blob or manifest at {blob_path}")
    manifest = json.loads(mpath.read_text())
    if manifest.get("format_version") != FORMAT_VERSION:
        raise IncompatibleCheckpoint(
            f"unsupported checkpoint format {manifest.get('format_version')}"
        )
    if expected_kind is not None and manifest.get("kind") != expected_kind:
        raise IncompatibleCheckpoint(
            f"checkpoint is a {manifest.get('kind')!r}, expected {expected_kind!r}"
        )
    state = torch.load(blob_path, map_location="cpu", weights_only=False)
    return state, manifest
