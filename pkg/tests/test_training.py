import numpy as np
import pytest
import torch

from stepgan import training
from stepgan.errors import NonFiniteLoss
from stepgan.models import GeneratorConfig, HiFiDiscConfig, WaveDiscConfig
from stepgan.training import LOG_NAME, Trainer, TrainingConfig, read_loss_log

TINY_GEN = dict(base_channels=8, latent_dim=16)
TINY_WAVE = dict(base_channels=4)
TINY_HIFI = dict(msd_channels=(4, 8, 8, 8, 8), mpd_channels=(4, 8, 8, 8, 8))


def make_trainer(dataset, out_dir, regime, **overrides):
    overrides.setdefault("batch_size", 4)
    overrides.setdefault("checkpoint_every", 1000)
    cfg = TrainingConfig(regime=regime, **overrides)
    gen_cfg = GeneratorConfig(**TINY_GEN)
    disc_cfg = (
        WaveDiscConfig(**TINY_WAVE) if regime == "wgan_gp" else HiFiDiscConfig(**TINY_HIFI)
    )
    return Trainer(dataset, cfg, out_dir, gen_cfg, disc_cfg)


class TestConfig:
    def test_regime_defaults(self):
        wgan = TrainingConfig(regime="wgan_gp")
        assert (wgan.d_steps_per_g_step, wgan.optimizer, wgan.betas) == (5, "adam", (0.5, 0.9))
        ls = TrainingConfig(regime="lsgan_fm")
        assert (ls.d_steps_per_g_step, ls.optimizer, ls.betas) == (1, "adamw", (0.8, 0.99))

    def test_paper_scale_defaults(self):
        cfg = TrainingConfig(regime="wgan_gp")
        assert cfg.total_batches == 120_000
        assert cfg.batch_size == 16
        assert cfg.learning_rate == 1e-4
        assert cfg.gp_lambda == 10.0

    def test_regime_optimizer_pairing_enforced(self):
        with pytest.raises(ValueError):
            TrainingConfig(regime="wgan_gp", optimizer="adamw")
        with pytest.raises(ValueError):
            TrainingConfig(regime="lsgan_fm", optimizer="adam")
        with pytest.raises(ValueError):
            TrainingConfig(regime="vanilla")


class TestWganGpStep:
    def test_five_to_one_update_counters(self, tiny_dataset, tmp_path):
        trainer = make_trainer(tiny_dataset, tmp_path, "wgan_gp", total_batches=4)
        for _ in range(4):
            trainer.engine_step()
        assert trainer.d_updates == 20
        assert trainer.g_updates == 4
        assert trainer.d_updates == 5 * trainer.g_updates

    def test_gp_lambda_multiplicative_in_total(self, tiny_dataset, tmp_path):
        trainer = make_trainer(tiny_dataset, tmp_path, "wgan_gp", total_batches=1)
        report = trainer.engine_step()
        c = report.components
        assert set(c) == {"adv_g", "adv_d", "gp"}
        assert abs(report.l_d - (c["adv_d"] + 10.0 * c["gp"])) < 1e-6
        assert abs(report.l_g - c["adv_g"]) < 1e-6

    def test_zero_lr_freezes_losses(self, tiny_dataset, tmp_path):
        trainer = make_trainer(
            tiny_dataset, tmp_path, "wgan_gp", total_batches=3, learning_rate=0.0, seed=7
        )
        r1 = [trainer.engine_step() for _ in range(3)]
        trainer2 = make_trainer(
            tiny_dataset, tmp_path / "b", "wgan_gp", total_batches=3, learning_rate=0.0, seed=7
        )
        r2 = [trainer2.engine_step() for _ in range(3)]
        for a, b in zip(r1, r2):
            assert a.l_d == b.l_d
            assert a.l_g == b.l_g


class TestHifiStep:
    def test_components_exactly_adv_and_fm_no_mel(self, tiny_dataset, tmp_path):
        trainer = make_trainer(tiny_dataset, tmp_path, "lsgan_fm", total_batches=1)
        report = trainer.engine_step()
        assert set(report.components) == {"adv_g", "adv_d", "fm"}

    def test_g_loss_decomposition(self, tiny_dataset, tmp_path):
        trainer = make_trainer(tiny_dataset, tmp_path, "lsgan_fm", total_batches=2)
        for _ in range(2):
            report = trainer.engine_step()
            c = report.components
            assert abs(report.l_g - (c["adv_g"] + 2.0 * c["fm"])) < 1e-6
            assert report.l_d == c["adv_d"]

    def test_zero_lambda_fm_reduces_to_adv(self, tiny_dataset, tmp_path):
        trainer = make_trainer(
            tiny_dataset, tmp_path, "lsgan_fm", total_batches=1, lambda_fm=0.0
        )
        report = trainer.engine_step()
        assert report.l_g == report.components["adv_g"]

    def test_one_to_one_update_ratio(self, tiny_dataset, tmp_path):
        trainer = make_trainer(tiny_dataset, tmp_path, "lsgan_fm", total_batches=3)
        for _ in range(3):
            trainer.engine_step()
        assert trainer.d_updates == trainer.g_updates == 3


class TestRunLoop:
    def test_run_writes_log_and_checkpoints(self, tiny_dataset, tmp_path):
        trainer = make_trainer(
            tiny_dataset, tmp_path, "lsgan_fm", total_batches=4, checkpoint_every=2
        )
        final = trainer.run()
        assert final.exists()
        log = read_loss_log(tmp_path / LOG_NAME)
        assert len(log["step"]) == 4
        assert (tmp_path / "trainer_0000002.pt").exists()
        assert (tmp_path / "generator_0000002.json").exists()

    def test_fixed_seed_runs_match(self, tiny_dataset, tmp_path):
        a = make_trainer(tiny_dataset, tmp_path / "a", "wgan_gp", total_batches=5, seed=3)
        a.run()
        b = make_trainer(tiny_dataset, tmp_path / "b", "wgan_gp", total_batches=5, seed=3)
        b.run()
        la = read_loss_log(tmp_path / "a" / LOG_NAME)
        lb = read_loss_log(tmp_path / "b" / LOG_NAME)
        for col in training.LOG_COLUMNS:
            np.testing.assert_allclose(la[col], lb[col], atol=1e-6)

    def test_resume_continues_loss_log(self, tiny_dataset, tmp_path):
        full = make_trainer(
            tiny_dataset, tmp_path / "full", "lsgan_fm",
            total_batches=6, checkpoint_every=3, seed=5,
        )
        full.run()
        log_full = read_loss_log(tmp_path / "full" / LOG_NAME)

        resumed = make_trainer(
            tiny_dataset, tmp_path / "resumed", "lsgan_fm",
            total_batches=6, checkpoint_every=3, seed=5,
        )
        resumed.restore(tmp_path / "full" / "trainer_0000003.pt")
        assert resumed.step == 3
        resumed.run()
        log_resumed = read_loss_log(tmp_path / "resumed" / LOG_NAME)
        for col in ("L_G", "L_D", "adv_g", "adv_d", "fm"):
            np.testing.assert_allclose(
                log_resumed[col], log_full[col][3:], atol=1e-4
            )

    def test_resume_in_same_dir_truncates_log(self, tiny_dataset, tmp_path):
        first = make_trainer(
            tiny_dataset, tmp_path, "lsgan_fm", total_batches=6, checkpoint_every=3, seed=5
        )
        first.run()
        resumed = make_trainer(
            tiny_dataset, tmp_path, "lsgan_fm", total_batches=6, checkpoint_every=3, seed=5
        )
        resumed.restore(tmp_path / "trainer_0000003.pt")
        resumed.run()
        log = read_loss_log(tmp_path / LOG_NAME)
        assert log["step"].tolist() == [1, 2, 3, 4, 5, 6]

    def test_nan_aborts_without_new_checkpoint(self, tiny_dataset, tmp_path):
        trainer = make_trainer(
            tiny_dataset, tmp_path, "lsgan_fm", total_batches=10, checkpoint_every=100
        )
        with torch.no_grad():
            trainer.gen.project.weight[0, 0] = float("nan")
        with pytest.raises(NonFiniteLoss):
            trainer.run()
        assert not list(tmp_path.glob("trainer_*.pt"))  # nothing saved mid-poisoning
        log = read_loss_log(tmp_path / LOG_NAME)
        assert len(log["step"]) >= 1  # the poisoned step is still logged

    def test_train_entry_point(self, tiny_dataset, tmp_path):
        cfg = TrainingConfig(
            regime="wgan_gp", total_batches=2, batch_size=4, checkpoint_every=10
        )
        final = training.train(
            tiny_dataset, cfg, tmp_path, gen_cfg=GeneratorConfig(**TINY_GEN),
            disc_cfg=WaveDiscConfig(**TINY_WAVE),
        )
        assert final.name == "trainer_final.pt"
