"""Conditional multi-scale and multi-period critics.

The multi-scale bank scores raw, x2- and x4-average-pooled audio with 1-D
convolutions; the multi-period bank scores the waveform folded into
(time/period, period) maps with 2-D convolutions. Channel widths follow the
cited vocoder-critic layout scaled to 8192-sample inputs and live in the
config, not the code.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import ShapeMismatch
from .conditioning import as_one_hot, inject_label_channels


@dataclass
class CriticOutput:
    """Per-sub-discriminator score maps and layer-ordered feature stacks."""

    scores: list
    features: list

    def __add__(self, other: "CriticOutput") -> "CriticOutput":
        return CriticOutput(self.scores + other.scores, self.features + other.features)


@dataclass
class HiFiDiscConfig:
    msd_pool_factors: tuple = (1, 2, 4)
    msd_channels: tuple = (16, 32, 64, 128, 128)
    msd_strides: tuple = (1, 2, 2, 4, 4)
    msd_kernel_sizes: tuple = (15, 41, 41, 41, 41)
    mpd_periods: tuple = (2, 3, 5, 7, 11)
    mpd_channels: tuple = (16, 64, 128, 256, 256)
    mpd_strides: tuple = (3, 3, 3, 3, 1)
    mpd_kernel_size: int = 5
    leaky_slope: float = 0.1
    num_classes: int = 7
    input_len: int = 8192

    def __post_init__(self):
        if list(self.mpd_periods) != sorted(set(self.mpd_periods)):
            raise ValueError("periods must be strictly increasing")
        for i, p in enumerate(self.mpd_periods):
            for q in self.mpd_periods[i + 1:]:
                if math.gcd(p, q) != 1:
                    raise ValueError(f"periods must be pairwise coprime, got {p} and {q}")
        if not len(self.msd_channels) == len(self.msd_strides) == len(self.msd_kernel_sizes):
            raise ValueError("msd channel/stride/kernel plans must have equal length")
        if len(self.mpd_channels) != len(self.mpd_strides):
            raise ValueError("mpd channel/stride plans must have equal length")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def period_reshape(x: torch.Tensor, period: int) -> torch.Tensor:
    """Fold (batch, channels, T) into (batch, channels, ceil(T/p), p).

    When p does not divide T the tail is reflection-padded up to the next
    multiple, so folding then flattening (minus pad) reconstructs the input.
    """
    if period < 1:
        raise ValueError(f"period must be >= 1, got {period}")
    squeeze = x.dim() == 2
    if squeeze:
        x = x[:, None, :]
    b, c, t = x.shape
    if t % period:
        pad = period - t % period
        x = F.pad(x, (0, pad), mode="reflect")
        t += pad
    out = x.view(b, c, t // period, period)
    return out.squeeze(1) if squeeze else out


class ScaleDiscriminator(nn.Module):
    """1-D conv stack over one pooling scale; emits a score map + features."""

    def __init__(self, cfg: HiFiDiscConfig):
        super().__init__()
        self.cfg = cfg
        convs = []
        in_ch = 1 + cfg.num_classes
        for ch, stride, k in zip(cfg.msd_channels, cfg.msd_strides, cfg.msd_kernel_sizes):
            convs.append(nn.Conv1d(in_ch, ch, k, stride=stride, padding=k // 2))
            in_ch = ch
        convs.append(nn.Conv1d(in_ch, in_ch, 5, stride=1, padding=2))
        self.convs = nn.ModuleList(convs)
        self.conv_out = nn.Conv1d(in_ch, 1, 3, stride=1, padding=1)

    def forward(self, x_aug: torch.Tensor):
        feats = []
        h = x_aug
        for conv in self.convs:
            h = F.leaky_relu(conv(h), self.cfg.leaky_slope)
            feats.append(h)
        h = self.conv_out(h)
        feats.append(h)
        return h.flatten(1), feats


class PeriodDiscriminator(nn.Module):
    """2-D conv stack over the period-folded waveform."""

    def __init__(self, cfg: HiFiDiscConfig, period: int):
        super().__init__()
        self.cfg = cfg
        self.period = period
        k = cfg.mpd_kernel_size
        convs = []
        in_ch = 1 + cfg.num_classes
        for ch, stride in zip(cfg.mpd_channels, cfg.mpd_strides):
            convs.append(nn.Conv2d(in_ch, ch, (k, 1), stride=(stride, 1), padding=(k // 2, 0)))
            in_ch = ch
        self.convs = nn.ModuleList(convs)
        self.conv_out = nn.Conv2d(in_ch, 1, (3, 1), stride=1, padding=(1, 0))

    def forward(self, x_aug: torch.Tensor):
        feats = []
        h = period_reshape(x_aug, self.period)
        for conv in self.convs:
            h = F.leaky_relu(conv(h), self.cfg.leaky_slope)
            feats.append(h)
        h = self.conv_out(h)
        feats.append(h)
        return h.flatten(1), feats


class _ConditionalBank(nn.Module):
    """Shared label handling for the two critic banks."""

    def __init__(self, cfg: HiFiDiscConfig):
        super().__init__()
        self.cfg = cfg

    def _augment(self, x: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
        if x.dim() == 2:
            x = x[:, None, :]
        if x.dim() != 3 or x.shape[-1] != self.cfg.input_len:
            raise ShapeMismatch(
                f"expected (batch, {self.cfg.input_len}) waveforms, got {tuple(x.shape)}"
            )
        onehot = as_one_hot(labels, self.cfg.num_classes)
        if onehot.shape[0] != x.shape[0]:
            raise ShapeMismatch("waveform/label batch mismatch")
        return inject_label_channels(x, onehot.to(x.dtype))


class MultiScaleDiscriminator(_ConditionalBank):
    """Three scale critics on raw, x2- and x4-average-pooled audio."""

    def __init__(self, cfg: HiFiDiscConfig):
        super().__init__(cfg)
        self.subs = nn.ModuleList(ScaleDiscriminator(cfg) for _ in cfg.msd_pool_factors)

    def forward(self, x: torch.Tensor, labels: torch.Tensor) -> CriticOutput:
        x_aug = self._augment(x, labels)
        scores, features = [], []
        for factor, sub in zip(self.cfg.msd_pool_factors, self.subs):
            xin = x_aug if factor == 1 else F.avg_pool1d(x_aug, factor, stride=factor)
            s, f = sub(xin)
            scores.append(s)
            features.append(f)
        return CriticOutput(scores, features)

    def forward_augmented(self, x_aug: torch.Tensor) -> CriticOutput:
        scores, features = [], []
        for factor, sub in zip(self.cfg.msd_pool_factors, self.subs):
            xin = x_aug if factor == 1 else F.avg_pool1d(x_aug, factor, stride=factor)
            s, f = sub(xin)
            scores.append(s)
            features.append(f)
        return CriticOutput(scores, features)


class MultiPeriodDiscriminator(_ConditionalBank):
    """One period critic per configured period; label channels fold with the audio."""

    def __init__(self, cfg: HiFiDiscConfig):
        super().__init__(cfg)
        self.subs = nn.ModuleList(PeriodDiscriminator(cfg, p) for p in cfg.mpd_periods)

    def forward(self, x: torch.Tensor, labels: torch.Tensor) -> CriticOutput:
        return self.forward_augmented(self._augment(x, labels))

    def forward_augmented(self, x_aug: torch.Tensor) -> CriticOutput:
        scores, features = [], []
        for sub in self.subs:
            s, f = sub(x_aug)
            scores.append(s)
            features.append(f)
        return CriticOutput(scores, features)
