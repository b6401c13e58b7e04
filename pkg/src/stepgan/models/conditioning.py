"""Class-label conditioning by one-hot channel concatenation."""
from __future__ import annotations

import torch

from ..errors import ShapeMismatch


def one_hot(class_ids: torch.Tensor, num_classes: int) -> torch.Tensor:
    """(batch,) int labels -> (batch, num_classes) float one-hot."""
    class_ids = torch.as_tensor(class_ids, dtype=torch.long)
    if class_ids.dim() != 1:
        raise ShapeMismatch(f"class ids must be 1-D, got shape {tuple(class_ids.shape)}")
    if class_ids.numel() and (class_ids.min() < 0 or class_ids.max() >= num_classes):
        raise ShapeMismatch(f"class id out of range [0, {num_classes})")
    return torch.nn.functional.one_hot(class_ids, num_classes).to(torch.float32)


def as_one_hot(labels: torch.Tensor, num_classes: int) -> torch.Tensor:
    """Accept either int class ids or ready one-hot rows; validate the latter."""
    labels = torch.as_tensor(labels)
    if labels.dim() == 1 and not labels.is_floating_point():
        return one_hot(labels, num_classes)
    if labels.dim() != 2 or labels.shape[1] != num_classes:
        raise ShapeMismatch(
            f"expected (batch, {num_classes}) one-hot labels, got {tuple(labels.shape)}"
        )
    labels = labels.to(torch.float32)
    row_sums = labels.sum(dim=1)
    if not torch.allclose(row_sums, torch.ones_like(row_sums)) or not torch.all(
        (labels == 0) | (labels == 1)
    ):
        raise ShapeMismatch("labels must be exact one-hot rows")
    return labels


def inject_label_channels(x: torch.Tensor, onehot: torch.Tensor) -> torch.Tensor:
    """Broadcast (batch, k) one-hot along time and concat as k extra channels.

    Works for (batch, channels, length) feature maps; the label rows become
    constant channels.
    """
    if x.dim() != 3:
        raise ShapeMismatch(f"expected (batch, channels, length), got {tuple(x.shape)}")
    if onehot.dim() != 2 or onehot.shape[0] != x.shape[0]:
        raise ShapeMismatch(
            f"label batch {tuple(onehot.shape)} does not match input batch {x.shape[0]}"
        )
    lab = onehot.to(x.dtype)[:, :, None].expand(-1, -1, x.shape[-1])
    return torch.cat([x, lab], dim=1)
