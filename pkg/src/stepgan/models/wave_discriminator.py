"""Conditional WaveGAN critic: 5 stride-4 1-D convolutions to a scalar score."""
from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

from ..errors import ShapeMismatch
from .conditioning import as_one_hot, inject_label_channels


@dataclass
class WaveDiscConfig:
    num_layers: int = 5
    stride: int = 4
    kernel_size: int = 25
    base_channels: int = 64
    phase_shuffle_n: int = 2
    input_len: int = 8192
    num_classes: int = 7
    leaky_slope: float = 0.2

    def __post_init__(self):
        if self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be odd")
        if self.input_len % self.stride ** self.num_layers != 0:
            raise ValueError("input_len must be divisible by stride^num_layers")

    @property
    def layer_lengths(self) -> list:
        """Feature lengths after each conv: 8192 -> 2048 -> 512 -> 128 -> 32 -> 8."""
        return [self.input_len // self.stride ** (k + 1) for k in range(self.num_layers)]

    @property
    def channel_plan(self) -> list:
        return [self.base_channels * 2 ** k for k in range(self.num_layers)]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def phase_shuffle(x: torch.Tensor, n: int, generator: torch.Generator | None = None) -> torch.Tensor:
    """Shift every channel by a uniform integer in [-n, n], reflecting at edges.

    Disabled (identity) for n = 0. Reflection mirrors about the edge sample
    without repeating it: index L maps back to L-2.
    """
    if n < 0:
        raise ValueError("phase shuffle range must be >= 0")
    if n == 0:
        return x
    b, c, length = x.shape
    shifts = torch.randint(-n, n + 1, (b, c, 1), generator=generator, device=x.device)
    idx = torch.arange(length, device=x.device).view(1, 1, -1) + shifts
    idx = torch.where(idx < 0, -idx, idx)
    idx = torch.where(idx >= length, 2 * (length - 1) - idx, idx)
    return torch.gather(x, -1, idx.expand(b, c, length))


class WaveDiscriminator(nn.Module):
    """Waveform + one-hot label -> one unbounded score per item (WGAN critic).

    LeakyReLU activations, no normalization (a per-sample gradient penalty is
    incompatible with batch statistics), phase shuffle after every hidden
    activation.
    """

    def __init__(self, cfg: WaveDiscConfig):
        super().__init__()
        self.cfg = cfg
        convs = []
        in_ch = 1 + cfg.num_classes
        for out_ch in cfg.channel_plan:
            convs.append(
                nn.Conv1d(in_ch, out_ch, cfg.kernel_size, stride=cfg.stride,
                          padding=cfg.kernel_size // 2)
            )
            in_ch = out_ch
        self.convs = nn.ModuleList(convs)
        final_len = cfg.layer_lengths[-1]
        self.score = nn.Linear(in_ch * final_len, 1)

    def forward(
        self,
        x: torch.Tensor,
        labels: torch.Tensor,
        generator: torch.Generator | None = None,
    ) -> torch.Tensor:
        cfg = self.cfg
        if x.dim() == 2:
            x = x[:, None, :]
        if x.dim() != 3 or x.shape[-1] != cfg.input_len:
            raise ShapeMismatch(f"expected (batch, {cfg.input_len}) waveforms, got {tuple(x.shape)}")
        onehot = as_one_hot(labels, cfg.num_classes)
        if onehot.shape[0] != x.shape[0]:
            raise ShapeMismatch("waveform/label batch mismatch")
        h = inject_label_channels(x, onehot.to(x.dtype))
        return self.forward_augmented(h, generator)

    def forward_augmented(
        self, x_aug: torch.Tensor, generator: torch.Generator | None = None
    ) -> torch.Tensor:
        """Score an already label-augmented input; the gradient-penalty path."""
        cfg = self.cfg
        h = x_aug
        for i, conv in enumerate(self.convs):
            h = torch.nn.functional.leaky_relu(conv(h), cfg.leaky_slope)
            if self.training and cfg.phase_shuffle_n > 0 and i < cfg.num_layers - 1:
                h = phase_shuffle(h, cfg.phase_shuffle_n, generator)
        return self.score(h.flatten(1)).squeeze(1)
