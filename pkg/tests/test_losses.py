import numpy as np
import pytest
import torch

from stepgan.errors import StructureMismatch
from stepgan.losses import (
    feature_matching_loss,
    gradient_penalty,
    lsgan_d_loss,
    lsgan_g_loss,
)


class TestGradientPenalty:
    def test_unit_norm_linear_critic_gives_zero(self):
        # D(x) = w . x with ||w|| = 1  =>  penalty (1 - 1)^2 = 0
        w = torch.randn(64, dtype=torch.float64)
        w /= w.norm()
        critic = lambda x: x.flatten(1) @ w
        real = torch.randn(8, 1, 64, dtype=torch.float64)
        fake = torch.randn(8, 1, 64, dtype=torch.float64)
        gp = gradient_penalty(critic, real, fake, torch.Generator().manual_seed(0))
        assert abs(float(gp)) < 1e-10

    def test_constant_critic_gives_one(self):
        # zero gradient => (0 - 1)^2 = 1
        critic = lambda x: torch.full((x.shape[0],), 3.14, dtype=x.dtype)
        real = torch.randn(4, 1, 16, dtype=torch.float64)
        fake = torch.randn(4, 1, 16, dtype=torch.float64)
        gp = gradient_penalty(critic, real, fake)
        assert float(gp) == 1.0

    def test_slope_three_gives_four(self):
        # 1-D critic D(x) = 3x => (3 - 1)^2 = 4
        critic = lambda x: 3.0 * x.flatten(1).sum(dim=1)
        real = torch.randn(6, 1, 1, dtype=torch.float64)
        fake = torch.randn(6, 1, 1, dtype=torch.float64)
        gp = gradient_penalty(critic, real, fake)
        assert abs(float(gp) - 4.0) < 1e-10

    def test_matches_analytic_norm_for_random_linear_critic(self):
        # for D(x) = w . x the penalty is (||w|| - 1)^2 regardless of inputs
        torch.manual_seed(1)
        w = torch.randn(32, dtype=torch.float64)
        critic = lambda x: x.flatten(1) @ w
        real = torch.randn(16, 1, 32, dtype=torch.float64)
        fake = torch.randn(16, 1, 32, dtype=torch.float64)
        gp = gradient_penalty(critic, real, fake)
        expected = (float(w.norm()) - 1.0) ** 2
        assert abs(float(gp) - expected) < 1e-5

    def test_shape_mismatch(self):
        with pytest.raises(StructureMismatch):
            gradient_penalty(lambda x: x.sum(), torch.zeros(2, 4), torch.zeros(3, 4))


class TestLsganLosses:
    def test_perfect_critic_gives_zero_d_loss(self):
        real = [torch.ones(8)]
        fake = [torch.zeros(8)]
        assert float(lsgan_d_loss(real, fake)) == 0.0

    def test_half_half_gives_half_per_sub(self):
        real = [torch.full((4,), 0.5), torch.full((4,), 0.5)]
        fake = [torch.full((4,), 0.5), torch.full((4,), 0.5)]
        assert abs(float(lsgan_d_loss(real, fake)) - 1.0) < 1e-7  # 0.5 per sub x 2

    def test_d_loss_matches_direct_arithmetic(self, rng):
        real = [torch.tensor(rng.normal(size=(5, 3))) for _ in range(3)]
        fake = [torch.tensor(rng.normal(size=(5, 3))) for _ in range(3)]
        expected = sum(
            np.mean((r.numpy() - 1.0) ** 2) + np.mean(f.numpy() ** 2)
            for r, f in zip(real, fake)
        )
        assert abs(float(lsgan_d_loss(real, fake)) - expected) < 1e-6

    def test_g_loss_perfect_fool_gives_zero(self):
        assert float(lsgan_g_loss([torch.ones(8)])) == 0.0

    def test_g_loss_zero_scores_give_one_per_sub(self):
        assert abs(float(lsgan_g_loss([torch.zeros(4), torch.zeros(4)])) - 2.0) < 1e-7

    def test_g_loss_matches_direct_arithmetic(self, rng):
        fake = [torch.tensor(rng.normal(size=(7,))) for _ in range(4)]
        expected = sum(np.mean((f.numpy() - 1.0) ** 2) for f in fake)
        assert abs(float(lsgan_g_loss(fake)) - expected) < 1e-6

    def test_sub_count_mismatch(self):
        with pytest.raises(StructureMismatch):
            lsgan_d_loss([torch.zeros(2)], [torch.zeros(2), torch.zeros(2)])


class TestFeatureMatching:
    def test_identical_features_zero(self, rng):
        feats = [[torch.tensor(rng.normal(size=(2, 4, 8))) for _ in range(3)]]
        assert float(feature_matching_loss(feats, feats)) == 0.0

    def test_constant_offset_gives_c(self, rng):
        c = 0.37
        real = [[torch.tensor(rng.normal(size=(2, 3, 5))) for _ in range(4)]]
        fake = [[t + c for t in real[0]]]
        assert abs(float(feature_matching_loss(real, fake)) - c) < 1e-7

    def test_matches_brute_force(self, rng):
        real = [
            [torch.tensor(rng.normal(size=(2, 3, 7))) for _ in range(3)],
            [torch.tensor(rng.normal(size=(2, 2, 5))) for _ in range(2)],
        ]
        fake = [
            [torch.tensor(rng.normal(size=(2, 3, 7))) for _ in range(3)],
            [torch.tensor(rng.normal(size=(2, 2, 5))) for _ in range(2)],
        ]
        expected = 0.0
        for sub_r, sub_f in zip(real, fake):
            acc = 0.0
            for r, f in zip(sub_r, sub_f):
                acc += np.mean(np.abs(r.numpy() - f.numpy()))
            expected += acc / len(sub_r)
        assert abs(float(feature_matching_loss(real, fake)) - expected) < 1e-6

    def test_structure_mismatch_on_layer_count(self):
        a = [[torch.zeros(1, 2, 3), torch.zeros(1, 2, 3)]]
        b = [[torch.zeros(1, 2, 3)]]
        with pytest.raises(StructureMismatch):
            feature_matching_loss(a, b)

    def test_structure_mismatch_on_shapes(self):
        a = [[torch.zeros(1, 2, 3)]]
        b = [[torch.zeros(1, 2, 4)]]
        with pytest.raises(StructureMismatch):
            feature_matching_loss(a, b)
