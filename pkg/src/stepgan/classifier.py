"""Surface classifier over log-mel spectrograms.

A compact inception-style 2-D conv net (parallel 1x1/3x3/5x5 branches) used
for Inception Score, KID embeddings, and the merged 5-class evaluation. The
whole layer plan lives in the config so reported numbers are self-describing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from . import features
from .audio import EVAL_CLASS_NAMES
from .checkpoints import load_checkpoint, save_checkpoint
from .errors import InsufficientData


@dataclass
class ClassifierConfig:
    num_classes: int = 5
    n_mels: int = 64
    win_length: int = 400  # 25 ms at 16 kHz
    hop_length: int = 160  # 10 ms
    stem_channels: int = 16
    block_channels: tuple = (32, 64)
    embed_dim: int = 128
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    val_fraction: float = 0.2
    seed: int = 0

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["block_channels"] = list(self.block_channels)
        return d


class InceptionBlock(nn.Module):
    """Parallel 1x1, 3x3, 5x5 and pooled 1x1 branches, concatenated."""

    def __init__(self, in_ch: int, out_ch: int):
        super().__init__()
        branch = out_ch // 4
        self.b1 = nn.Conv2d(in_ch, branch, 1)
        self.b3 = nn.Conv2d(in_ch, branch, 3, padding=1)
        self.b5 = nn.Conv2d(in_ch, branch, 5, padding=2)
        self.bp = nn.Conv2d(in_ch, out_ch - 3 * branch, 1)
        self.norm = nn.BatchNorm2d(out_ch)

    def forward(self, x):
        pooled = F.max_pool2d(x, 3, stride=1, padding=1)
        h = torch.cat([self.b1(x), self.b3(x), self.b5(x), self.bp(pooled)], dim=1)
        return F.relu(self.norm(h))


class SurfaceClassifier(nn.Module):
    def __init__(self, cfg: ClassifierConfig):
        super().__init__()
        self.cfg = cfg
        self.stem = nn.Sequential(
            nn.Conv2d(1, cfg.stem_channels, 3, padding=1),
            nn.BatchNorm2d(cfg.stem_channels),
            nn.ReLU(),
            nn.MaxPool2d(2),
        )
        blocks = []
        in_ch = cfg.stem_channels
        for out_ch in cfg.block_channels:
            blocks.append(InceptionBlock(in_ch, out_ch))
            blocks.append(nn.MaxPool2d(2))
            in_ch = out_ch
        self.blocks = nn.Sequential(*blocks)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.fc_embed = nn.Linear(in_ch, cfg.embed_dim)
        self.fc_out = nn.Linear(cfg.embed_dim, cfg.num_classes)

    def forward(self, spec: torch.Tensor) -> torch.Tensor:
        h = self.embed_tensor(spec)
        return self.fc_out(h)

    def embed_tensor(self, spec: torch.Tensor) -> torch.Tensor:
        h = self.stem(spec)
        h = self.blocks(h)
        h = self.pool(h).flatten(1)
        return F.relu(self.fc_embed(h))

    # --- numpy-facing API (waveforms in, arrays out) ---

    def spectrogram(self, waveforms: np.ndarray) -> torch.Tensor:
        """(n, samples) -> standardized (n, 1, frames, mels) input tensor."""
        mel = features.log_mel_spectrogram(
            waveforms,
            n_mels=self.cfg.n_mels,
            win_length=self.cfg.win_length,
            hop_length=self.cfg.hop_length,
        )
        if mel.ndim == 2:
            mel = mel[None]
        mean = mel.mean(axis=(1, 2), keepdims=True)
        std = mel.std(axis=(1, 2), keepdims=True) + 1e-6
        return torch.as_tensor((mel - mean) / std, dtype=torch.float32)[:, None]

    @torch.no_grad()
    def predict_proba(self, waveforms: np.ndarray, batch_size: int = 64) -> np.ndarray:
        self.eval()
        x = np.atleast_2d(np.asarray(waveforms, dtype=np.float64))
        outs = []
        for i in range(0, len(x), batch_size):
            logits = self(self.spectrogram(x[i:i + batch_size])).double()
            outs.append(torch.softmax(logits, dim=1).numpy())
        return np.concatenate(outs, axis=0)

    @torch.no_grad()
    def embed(self, waveforms: np.ndarray, batch_size: int = 64) -> np.ndarray:
        self.eval()
        x = np.atleast_2d(np.asarray(waveforms, dtype=np.float64))
        outs = []
        for i in range(0, len(x), batch_size):
            h = self.embed_tensor(self.spectrogram(x[i:i + batch_size]))
            outs.append(h.double().numpy())
        return np.concatenate(outs, axis=0)


@dataclass
class TrainedClassifier:
    model: SurfaceClassifier
    validation_accuracy: float
    class_names: list
    history: list = field(default_factory=list)  # (epoch, train_loss, val_acc)

    @property
    def cfg(self) -> ClassifierConfig:
        return self.model.cfg


def _stratified_split(y: np.ndarray, val_fraction: float, rng: np.random.Generator):
    train_idx, val_idx = [], []
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        members = members[rng.permutation(len(members))]
        n_val = max(1, int(round(len(members) * val_fraction)))
        val_idx.extend(members[:n_val])
        train_idx.extend(members[n_val:])
    return np.array(sorted(train_idx)), np.array(sorted(val_idx))


def train_eval_classifier(
    x: np.ndarray,
    y: np.ndarray,
    cfg: ClassifierConfig | None = None,
    class_names=EVAL_CLASS_NAMES,
) -> TrainedClassifier:
    """Train on (waveforms, int labels) with a held-out stratified split.

    Keeps the best-validation weights and records the training curve.
    """
    cfg = cfg or ClassifierConfig()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise InsufficientData(f"need >= 2 classes, got {len(np.unique(y))}")
    if np.any(np.bincount(y, minlength=cfg.num_classes) < 2):
        raise InsufficientData("need >= 2 clips per class for a held-out split")

    rng = np.random.default_rng(cfg.seed)
    torch.manual_seed(cfg.seed)
    train_idx, val_idx = _stratified_split(y, cfg.val_fraction, rng)

    model = SurfaceClassifier(cfg)
    spec_all = model.spectrogram(x)
    labels = torch.as_tensor(y)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)

    best_acc, best_state, history = 0.0, None, []
    for epoch in range(cfg.epochs):
        model.train()
        order = train_idx[rng.permutation(len(train_idx))]
        losses = []
        for i in range(0, len(order), cfg.batch_size):
            idx = order[i:i + cfg.batch_size]
            logits = model(spec_all[idx])
            loss = F.cross_entropy(logits, labels[idx])
            opt.zero_grad()
            loss.backward()
            opt.step()
            losses.append(float(loss.detach()))
        model.eval()
        with torch.no_grad():
            preds = model(spec_all[val_idx]).argmax(dim=1)
        acc = float((preds == labels[val_idx]).double().mean())
        history.append((epoch, float(np.mean(losses)), acc))
        if acc >= best_acc:
            best_acc = acc
            best_state = {k: v.clone() for k, v in model.state_dict().items()}
    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    return TrainedClassifier(model, best_acc, list(class_names), history)


def save_classifier(trained: TrainedClassifier, path) -> Path:
    return save_checkpoint(
        path,
        "classifier",
        {"model": trained.model.state_dict()},
        trained.cfg.to_dict(),
        step=len(trained.history),
        classes=trained.class_names,
        extra={
            "validation_accuracy": trained.validation_accuracy,
            "history": trained.history,
        },
    )


def load_classifier(path) -> TrainedClassifier:
    state, manifest = load_checkpoint(path, expected_kind="classifier")
    raw = dict(manifest["config"])
    raw["block_channels"] = tuple(raw["block_channels"])
    cfg = ClassifierConfig(**raw)
    model = SurfaceClassifier(cfg)
    model.load_state_dict(state["model"])
    model.eval()
    return TrainedClassifier(
        model,
        manifest.get("validation_accuracy", 0.0),
        manifest["classes"],
        [tuple(h) for h in manifest.get("history", [])],
    )
