"""Adversarial loss terms: WGAN gradient penalty, least-squares GAN, feature matching."""
from __future__ import annotations

import torch

from .errors import NonFiniteGradient, StructureMismatch


def gradient_penalty(
    critic,
    real: torch.Tensor,
    fake: torch.Tensor,
    generator: torch.Generator | None = None,
) -> torch.Tensor:
    """E[(||grad_x D(x_hat)||_2 - 1)^2] on per-item interpolates of real and fake.

    `critic` maps the full critic input (label channels included, if any) to
    scores; interpolation therefore mixes label channels along with the audio.
    """
    if real.shape != fake.shape:
        raise StructureMismatch(f"real {tuple(real.shape)} vs fake {tuple(fake.shape)}")
    eps_shape = (real.shape[0],) + (1,) * (real.dim() - 1)
    eps = torch.rand(eps_shape, generator=generator, device=real.device, dtype=real.dtype)
    x_hat = (eps * real + (1.0 - eps) * fake).detach().requires_grad_(True)
    scores = critic(x_hat)
    if scores.requires_grad:
        grads = torch.autograd.grad(
            outputs=scores.sum(), inputs=x_hat, create_graph=True, retain_graph=True,
            allow_unused=True,
        )[0]
    else:
        grads = None
    if grads is None:  # constant critic: zero gradient everywhere
        grads = torch.zeros_like(x_hat)
    if not torch.all(torch.isfinite(grads)):
        raise NonFiniteGradient("gradient penalty produced non-finite gradients")
    norms = grads.flatten(1).norm(2, dim=1)
    return ((norms - 1.0) ** 2).mean()


def _score_list(scores) -> list:
    if hasattr(scores, "scores"):
        scores = scores.scores
    if torch.is_tensor(scores):
        scores = [scores]
    if not scores:
        raise ValueError("at least one sub-discriminator score is required")
    return list(scores)


def lsgan_d_loss(real_scores, fake_scores) -> torch.Tensor:
    """Sum over sub-discriminators of E[(D(x)-1)^2] + E[D(G(z))^2]."""
    real_scores, fake_scores = _score_list(real_scores), _score_list(fake_scores)
    if len(real_scores) != len(fake_scores):
        raise StructureMismatch("real/fake sub-discriminator counts differ")
    total = real_scores[0].new_zeros(())
    for r, f in zip(real_scores, fake_scores):
        total = total + ((r - 1.0) ** 2).mean() + (f ** 2).mean()
    return total


def lsgan_g_loss(fake_scores) -> torch.Tensor:
    """Sum over sub-discriminators of E[(D(G(z))-1)^2]."""
    total = None
    for f in _score_list(fake_scores):
        term = ((f - 1.0) ** 2).mean()
        total = term if total is None else total + term
    return total


def _feature_lists(features) -> list:
    if hasattr(features, "features"):
        features = features.features
    return list(features)


def feature_matching_loss(real_features, fake_features) -> torch.Tensor:
    """L1 distance of per-layer features: mean over layers, summed over subs."""
    real_features = _feature_lists(real_features)
    fake_features = _feature_lists(fake_features)
    if len(real_features) != len(fake_features):
        raise StructureMismatch("real/fake sub-discriminator counts differ")
    total = None
    for sub_real, sub_fake in zip(real_features, fake_features):
        if len(sub_real) != len(sub_fake):
            raise StructureMismatch("per-layer feature counts differ")
        layer_sum = None
        for r, f in zip(sub_real, sub_fake):
            if r.shape != f.shape:
                raise StructureMismatch(
                    f"feature shapes differ: {tuple(r.shape)} vs {tuple(f.shape)}"
                )
            term = (r - f).abs().mean()
            layer_sum = term if layer_sum is None else layer_sum + term
        sub_loss = layer_sum / len(sub_real)
        total = sub_loss if total is None else total + sub_loss
    if total is None:
        raise StructureMismatch("no features to match")
    return total
