"""Training engine for both adversarial regimes.

wgan_gp:   WaveGenerator vs WaveDiscriminator, Wasserstein loss with gradient
           penalty, 5 critic updates per generator update, Adam.
lsgan_fm:  WaveGenerator vs the multi-scale + multi-period critic banks,
           least-squares adversarial losses plus feature matching, AdamW.

Every source of randomness flows through explicit seeded generators, so runs
are reproducible and resumable.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .checkpoints import load_checkpoint, save_checkpoint
from .dataset import LabeledDataset, as_arrays
from .errors import NonFiniteLoss
from .losses import feature_matching_loss, gradient_penalty, lsgan_d_loss, lsgan_g_loss
from .models.conditioning import inject_label_channels, one_hot
from .models.generator import GeneratorConfig, WaveGenerator
from .models.hifi_discriminator import HiFiDiscConfig, MultiPeriodDiscriminator, MultiScaleDiscriminator
from .models.wave_discriminator import WaveDiscConfig, WaveDiscriminator

REGIMES = ("wgan_gp", "lsgan_fm")
LOG_COLUMNS = ("step", "L_G", "L_D", "adv_g", "adv_d", "gp", "fm")
LOG_NAME = "losses.csv"

_REGIME_DEFAULTS = {
    "wgan_gp": {"d_steps_per_g_step": 5, "optimizer": "adam", "betas": (0.5, 0.9)},
    "lsgan_fm": {"d_steps_per_g_step": 1, "optimizer": "adamw", "betas": (0.8, 0.99)},
}


@dataclass
class TrainingConfig:
    regime: str
    total_batches: int = 120_000
    batch_size: int = 16
    learning_rate: float = 1e-4
    d_steps_per_g_step: int | None = None
    gp_lambda: float = 10.0
    lambda_fm: float = 2.0
    optimizer: str | None = None
    betas: tuple | None = None
    seed: int = 0
    checkpoint_every: int = 10_000

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}")
        defaults = _REGIME_DEFAULTS[self.regime]
        if self.d_steps_per_g_step is None:
            self.d_steps_per_g_step = defaults["d_steps_per_g_step"]
        if self.optimizer is None:
            self.optimizer = defaults["optimizer"]
        if self.betas is None:
            self.betas = defaults["betas"]
        self.betas = tuple(self.betas)
        if self.optimizer != defaults["optimizer"]:
            raise ValueError(
                f"regime {self.regime} pairs with {defaults['optimizer']}, got {self.optimizer}"
            )
        if min(self.total_batches, self.batch_size, self.d_steps_per_g_step, self.checkpoint_every) < 1:
            raise ValueError("counts must be positive")
        if self.learning_rate < 0 or self.gp_lambda < 0 or self.lambda_fm < 0:
            raise ValueError("rates and loss weights must be non-negative")

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["betas"] = list(self.betas)
        return d


@dataclass
class LossReport:
    step: int
    l_g: float
    l_d: float
    components: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        vals = [self.l_g, self.l_d, *self.components.values()]
        return all(math.isfinite(v) for v in vals)

    def row(self) -> list:
        c = self.components
        return [self.step, self.l_g, self.l_d,
                c.get("adv_g", 0.0), c.get("adv_d", 0.0), c.get("gp", 0.0), c.get("fm", 0.0)]


class ClassUniformSampler:
    """Real batches drawn with replacement, uniform over the classes present."""

    def __init__(self, x: np.ndarray, y: np.ndarray, generator: torch.Generator):
        self.x = torch.as_tensor(x, dtype=torch.float32)
        self.y = torch.as_tensor(y, dtype=torch.long)
        self.generator = generator
        self.class_ids = sorted(set(int(c) for c in y))
        self.by_class = {
            c: torch.nonzero(self.y == c, as_tuple=True)[0] for c in self.class_ids
        }

    def sample(self, batch_size: int):
        picks = torch.randint(len(self.class_ids), (batch_size,), generator=self.generator)
        idx = []
        for p in picks.tolist():
            members = self.by_class[self.class_ids[p]]
            j = int(torch.randint(len(members), (1,), generator=self.generator))
            idx.append(int(members[j]))
        idx = torch.tensor(idx, dtype=torch.long)
        return self.x[idx], self.y[idx]


class Trainer:
    """Owns model state, optimizers, loss log, and checkpoints for one run."""

    def __init__(
        self,
        dataset: LabeledDataset,
        cfg: TrainingConfig,
        out_dir,
        gen_cfg: GeneratorConfig | None = None,
        disc_cfg=None,
    ):
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.gen_cfg = gen_cfg or GeneratorConfig()

        torch.manual_seed(cfg.seed)
        self.rng = torch.Generator().manual_seed(cfg.seed + 1)

        self.gen = WaveGenerator(self.gen_cfg)
        if cfg.regime == "wgan_gp":
            self.disc_cfg = disc_cfg or WaveDiscConfig(num_classes=self.gen_cfg.num_classes)
            self.critic = WaveDiscriminator(self.disc_cfg)
            d_params = self.critic.parameters()
        else:
            self.disc_cfg = disc_cfg or HiFiDiscConfig(num_classes=self.gen_cfg.num_classes)
            self.msd = MultiScaleDiscriminator(self.disc_cfg)
            self.mpd = MultiPeriodDiscriminator(self.disc_cfg)
            d_params = list(self.msd.parameters()) + list(self.mpd.parameters())

        opt_cls = torch.optim.Adam if cfg.optimizer == "adam" else torch.optim.AdamW
        self.opt_g = opt_cls(self.gen.parameters(), lr=cfg.learning_rate, betas=cfg.betas)
        self.opt_d = opt_cls(d_params, lr=cfg.learning_rate, betas=cfg.betas)

        x, y = as_arrays(dataset)
        self.sampler = ClassUniformSampler(x, y, self.rng)

        self.step = 0
        self.d_updates = 0
        self.g_updates = 0

    # --- sampling helpers ---

    def _fake_labels(self, n: int) -> torch.Tensor:
        return torch.randint(self.gen_cfg.num_classes, (n,), generator=self.rng)

    def _latent(self, n: int) -> torch.Tensor:
        return self.gen.sample_latent(n, self.rng)

    def _augment(self, x: torch.Tensor, y: torch.Tensor) -> torch.Tensor:
        return inject_label_channels(x[:, None, :], one_hot(y, self.gen_cfg.num_classes))

    # --- engine steps ---

    def wgan_gp_step(self) -> LossReport:
        cfg = self.cfg
        adv_vals, gp_vals = [], []
        for _ in range(cfg.d_steps_per_g_step):
            real_x, real_y = self.sampler.sample(cfg.batch_size)
            fake_y = self._fake_labels(cfg.batch_size)
            with torch.no_grad():
                fake_x = self.gen(self._latent(cfg.batch_size), fake_y)
            gp = gradient_penalty(
                lambda a: self.critic.forward_augmented(a, self.rng),
                self._augment(real_x, real_y),
                self._augment(fake_x, fake_y),
                self.rng,
            )
            adv = (
                self.critic(fake_x, fake_y, self.rng).mean()
                - self.critic(real_x, real_y, self.rng).mean()
            )
            d_loss = adv + cfg.gp_lambda * gp
            self.opt_d.zero_grad()
            d_loss.backward()
            self.opt_d.step()
            self.d_updates += 1
            adv_vals.append(float(adv.detach()))
            gp_vals.append(float(gp.detach()))

        fake_y = self._fake_labels(cfg.batch_size)
        fake_x = self.gen(self._latent(cfg.batch_size), fake_y)
        g_loss = -self.critic(fake_x, fake_y, self.rng).mean()
        self.opt_g.zero_grad()
        g_loss.backward()
        self.opt_g.step()
        self.g_updates += 1

        components = {
            "adv_g": float(g_loss.detach()),
            "adv_d": float(np.mean(adv_vals)),
            "gp": float(np.mean(gp_vals)),
        }
        l_g = components["adv_g"]
        l_d = components["adv_d"] + cfg.gp_lambda * components["gp"]
        return LossReport(self.step, l_g, l_d, components)

    def _critic_both(self, x, y):
        return self.msd(x, y) + self.mpd(x, y)

    def hifi_wavegan_step(self) -> LossReport:
        cfg = self.cfg
        real_x, real_y = self.sampler.sample(cfg.batch_size)
        fake_y = self._fake_labels(cfg.batch_size)
        with torch.no_grad():
            fake_x = self.gen(self._latent(cfg.batch_size), fake_y)

        d_loss = lsgan_d_loss(
            self._critic_both(real_x, real_y), self._critic_both(fake_x, fake_y)
        )
        self.opt_d.zero_grad()
        d_loss.backward()
        self.opt_d.step()
        self.d_updates += 1

        # generator step conditions on the real batch's labels (class-uniform,
        # so the marginal stays uniform over the classes); index-wise feature
        # matching then compares within class instead of across classes
        fake_y2 = real_y
        fake_x2 = self.gen(self._latent(cfg.batch_size), fake_y2)
        fake_out = self._critic_both(fake_x2, fake_y2)
        with torch.no_grad():
            real_out = self._critic_both(real_x, real_y)
        adv_g = lsgan_g_loss(fake_out)
        fm = feature_matching_loss(real_out, fake_out)
        g_loss = adv_g + cfg.lambda_fm * fm
        self.opt_g.zero_grad()
        g_loss.backward()
        self.opt_g.step()
        self.g_updates += 1

        components = {
            "adv_g": float(adv_g.detach()),
            "adv_d": float(d_loss.detach()),
            "fm": float(fm.detach()),
        }
        l_g = components["adv_g"] + cfg.lambda_fm * components["fm"]
        l_d = components["adv_d"]
        return LossReport(self.step, l_g, l_d, components)

    def engine_step(self) -> LossReport:
        self.step += 1
        if self.cfg.regime == "wgan_gp":
            return self.wgan_gp_step()
        return self.hifi_wavegan_step()

    # --- persistence ---

    def _rng_states(self) -> dict:
        return {"torch": torch.get_rng_state(), "sampler": self.rng.get_state()}

    def _model_states(self) -> dict:
        states = {"generator": self.gen.state_dict()}
        if self.cfg.regime == "wgan_gp":
            states["critic"] = self.critic.state_dict()
        else:
            states["msd"] = self.msd.state_dict()
            states["mpd"] = self.mpd.state_dict()
        return states

    def save(self, tag: str | None = None) -> Path:
        tag = tag or f"{self.step:07d}"
        state = {
            "models": self._model_states(),
            "opt_g": self.opt_g.state_dict(),
            "opt_d": self.opt_d.state_dict(),
            "rng": self._rng_states(),
            "step": self.step,
            "d_updates": self.d_updates,
            "g_updates": self.g_updates,
        }
        config = {
            "training": self.cfg.to_dict(),
            "generator": self.gen_cfg.to_dict(),
            "discriminator": self.disc_cfg.to_dict(),
        }
        path = save_checkpoint(
            self.out_dir / f"trainer_{tag}.pt", "trainer", state, config, self.step
        )
        save_checkpoint(
            self.out_dir / f"generator_{tag}.pt",
            "generator",
            {"generator": self.gen.state_dict()},
            self.gen_cfg.to_dict(),
            self.step,
        )
        critic_states = dict(self._model_states())
        critic_states.pop("generator")
        save_checkpoint(
            self.out_dir / f"critic_{tag}.pt",
            "critic",
            critic_states,
            {"regime": self.cfg.regime, "discriminator": self.disc_cfg.to_dict()},
            self.step,
        )
        return path

    def restore(self, ckpt_path) -> None:
        state, manifest = load_checkpoint(ckpt_path, expected_kind="trainer")
        self.gen.load_state_dict(state["models"]["generator"])
        if self.cfg.regime == "wgan_gp":
            self.critic.load_state_dict(state["models"]["critic"])
        else:
            self.msd.load_state_dict(state["models"]["msd"])
            self.mpd.load_state_dict(state["models"]["mpd"])
        self.opt_g.load_state_dict(state["opt_g"])
        self.opt_d.load_state_dict(state["opt_d"])
        torch.set_rng_state(state["rng"]["torch"])
        self.rng.set_state(state["rng"]["sampler"])
        self.step = state["step"]
        self.d_updates = state["d_updates"]
        self.g_updates = state["g_updates"]

    # --- run loop ---

    @property
    def log_path(self) -> Path:
        return self.out_dir / LOG_NAME

    def _truncate_log(self) -> list:
        """Keep only rows at or before the current step (for resume)."""
        rows = []
        if self.log_path.exists():
            with open(self.log_path) as fh:
                for row in csv.DictReader(fh):
                    if int(row["step"]) <= self.step:
                        rows.append([row[c] for c in LOG_COLUMNS])
        return rows

    def run(self, progress_every: int = 0) -> Path:
        kept = self._truncate_log()
        with open(self.log_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(LOG_COLUMNS)
            writer.writerows(kept)
            while self.step < self.cfg.total_batches:
                report = self.engine_step()
                writer.writerow([repr(v) if isinstance(v, float) else v for v in report.row()])
                if not report.finite:
                    fh.flush()
                    raise NonFiniteLoss(
                        f"non-finite loss at step {self.step}; "
                        "state preserved at the last checkpoint"
                    )
                if self.step % self.cfg.checkpoint_every == 0:
                    fh.flush()
                    self.save()
                if progress_every and self.step % progress_every == 0:
                    print(
                        f"step {self.step}/{self.cfg.total_batches} "
                        f"L_G={report.l_g:.4f} L_D={report.l_d:.4f}", flush=True
                    )
        if self.step % self.cfg.checkpoint_every != 0:
            self.save()
        return self.save("final")


def train(
    dataset: LabeledDataset,
    cfg: TrainingConfig,
    out_dir,
    gen_cfg: GeneratorConfig | None = None,
    disc_cfg=None,
    resume_from=None,
    progress_every: int = 0,
) -> Path:
    """Run the configured regime to completion; returns the final checkpoint path."""
    trainer = Trainer(dataset, cfg, out_dir, gen_cfg, disc_cfg)
    if resume_from is not None:
        trainer.restore(resume_from)
    return trainer.run(progress_every)


def read_loss_log(path) -> dict:
    """Loss CSV as {column: float array}."""
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return {c: np.array([float(r[c]) for r in rows]) for c in LOG_COLUMNS}
