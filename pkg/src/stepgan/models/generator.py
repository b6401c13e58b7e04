"""Conditional waveform generator: latent + surface label -> 8192 samples.

Five upsampling 1-D convolution blocks expand an 8-sample seed by x4 each.
Upsampling mode is selectable; zero-stuffing plus the stride-1 convolution is
numerically equivalent to a stride-4 transposed convolution.
"""
from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

from ..errors import InvalidFactor, ShapeMismatch
from .conditioning import as_one_hot, inject_label_channels

UPSAMPLE_MODES = ("zero_stuff", "nearest", "linear", "cubic")


@dataclass
class GeneratorConfig:
    latent_dim: int = 100
    num_classes: int = 7
    base_channels: int = 512
    num_layers: int = 5
    kernel_size: int = 25
    upsample_factor: int = 4
    upsample_mode: str = "zero_stuff"
    batch_norm: bool = True
    bias: bool = True
    initial_len: int = 8
    output_len: int = 8192

    def __post_init__(self):
        if self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be odd")
        if self.upsample_mode not in UPSAMPLE_MODES:
            raise ValueError(f"upsample_mode must be one of {UPSAMPLE_MODES}")
        expected = self.initial_len * self.upsample_factor ** self.num_layers
        if self.output_len != expected:
            raise ValueError(
                f"output_len {self.output_len} != initial_len * factor^layers = {expected}"
            )
        if self.latent_dim < 0 or self.num_classes < 0 or self.base_channels < 1:
            raise ValueError("latent_dim/num_classes must be >= 0, base_channels >= 1")

    @property
    def channel_plan(self) -> list:
        """Output channels per conv layer: halved each layer, last maps to 1."""
        outs = [max(1, self.base_channels >> (k + 1)) for k in range(self.num_layers - 1)]
        return outs + [1]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def upsample(x: torch.Tensor, factor: int, mode: str) -> torch.Tensor:
    """Upsample (..., length) by an integer factor with the given mode.

    Anchor alignment for all modes puts original sample i at index i*factor.
    """
    if not isinstance(factor, int) or factor < 1:
        raise InvalidFactor(f"factor must be an integer >= 1, got {factor}")
    if mode not in UPSAMPLE_MODES:
        raise InvalidFactor(f"unknown upsample mode {mode!r}")
    if factor == 1:
        return x.clone()
    length = x.shape[-1]
    out_len = length * factor

    if mode == "zero_stuff":
        out = x.new_zeros(*x.shape[:-1], out_len)
        out[..., ::factor] = x
        return out
    if mode == "nearest":
        return torch.repeat_interleave(x, factor, dim=-1)

    pos = torch.arange(out_len, dtype=x.dtype, device=x.device) / factor
    i0 = pos.floor().long()
    t = (pos - i0.to(pos.dtype)).reshape((1,) * (x.dim() - 1) + (-1,))
    gather = lambda idx: x[..., idx.clamp(0, length - 1)]
    if mode == "linear":
        return gather(i0) * (1 - t) + gather(i0 + 1) * t
    # cubic: Catmull-Rom weights over the 4 neighbouring anchors
    t2, t3 = t * t, t * t * t
    w0 = 0.5 * (-t3 + 2 * t2 - t)
    w1 = 0.5 * (3 * t3 - 5 * t2 + 2)
    w2 = 0.5 * (-3 * t3 + 4 * t2 + t)
    w3 = 0.5 * (t3 - t2)
    return (
        gather(i0 - 1) * w0 + gather(i0) * w1 + gather(i0 + 1) * w2 + gather(i0 + 2) * w3
    )


class WaveGenerator(nn.Module):
    """Latent code + one-hot surface label -> bounded waveform.

    Pipeline: dense projection to an (base_channels, initial_len) map, label
    channels concatenated, then num_layers blocks of [upsample x factor,
    conv k=25 stride 1, batch norm, ReLU]; the final block swaps BN+ReLU for
    tanh so samples stay in [-1, 1].
    """

    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        self.cfg = cfg
        c0 = cfg.base_channels
        self.project = nn.Linear(cfg.latent_dim, c0 * cfg.initial_len, bias=cfg.bias)
        self.input_norm = nn.BatchNorm1d(c0) if cfg.batch_norm else None

        convs, norms = [], []
        in_ch = c0 + cfg.num_classes
        for i, out_ch in enumerate(cfg.channel_plan):
            convs.append(
                nn.Conv1d(in_ch, out_ch, cfg.kernel_size, stride=1,
                          padding=cfg.kernel_size // 2, bias=cfg.bias)
            )
            last = i == cfg.num_layers - 1
            norms.append(nn.BatchNorm1d(out_ch) if (cfg.batch_norm and not last) else None)
            in_ch = out_ch
        self.convs = nn.ModuleList(convs)
        self.norms = nn.ModuleList([n if n is not None else nn.Identity() for n in norms])

    def forward(self, z: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
        cfg = self.cfg
        z = torch.as_tensor(z, dtype=torch.float32) if not torch.is_tensor(z) else z
        if z.dim() != 2 or z.shape[1] != cfg.latent_dim:
            raise ShapeMismatch(f"expected z of shape (batch, {cfg.latent_dim}), got {tuple(z.shape)}")
        onehot = as_one_hot(labels, cfg.num_classes)
        if onehot.shape[0] != z.shape[0]:
            raise ShapeMismatch(
                f"batch mismatch: z has {z.shape[0]} rows, labels {onehot.shape[0]}"
            )
        h = self.project(z).view(z.shape[0], cfg.base_channels, cfg.initial_len)
        if self.input_norm is not None:
            h = self.input_norm(h)
        h = torch.relu(h)
        h = inject_label_channels(h, onehot.to(h.dtype))
        for i, (conv, norm) in enumerate(zip(self.convs, self.norms)):
            h = upsample(h, cfg.upsample_factor, cfg.upsample_mode)
            h = conv(h)
            if i == cfg.num_layers - 1:
                h = torch.tanh(h)
            else:
                h = torch.relu(norm(h))
        return h.squeeze(1)

    def sample_latent(self, n: int, generator: torch.Generator | None = None) -> torch.Tensor:
        """Latent prior: i.i.d. uniform on [-1, 1]."""
        u = torch.rand(n, self.cfg.latent_dim, generator=generator)
        return u * 2.0 - 1.0


def count_parameters(cfg: GeneratorConfig) -> int:
    """Exact trainable-parameter count for a config."""
    model = WaveGenerator(cfg)
    return sum(p.numel() for p in model.parameters() if p.requires_grad)
