from .generator import GeneratorConfig, WaveGenerator, count_parameters, upsample
from .wave_discriminator import WaveDiscConfig, WaveDiscriminator, phase_shuffle
from .hifi_discriminator import (
    CriticOutput,
    HiFiDiscConfig,
    MultiPeriodDiscriminator,
    MultiScaleDiscriminator,
    period_reshape,
)
from .conditioning import inject_label_channels, one_hot

__all__ = [
    "GeneratorConfig",
    "WaveGenerator",
    "count_parameters",
    "upsample",
    "WaveDiscConfig",
    "WaveDiscriminator",
    "phase_shuffle",
    "CriticOutput",
    "HiFiDiscConfig",
    "MultiPeriodDiscriminator",
    "MultiScaleDiscriminator",
    "period_reshape",
    "inject_label_channels",
    "one_hot",
]
