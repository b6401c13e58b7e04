"""stepgan: conditional GAN toolkit for footstep sound-effect synthesis."""

from .audio import (
    AudioClip,
    ClassMap,
    EvalClass,
    SurfaceClass,
    align_and_fit,
    default_class_map,
    load_clip,
    normalize_peak,
    resample,
    save_clip,
)
from .dataset import LabeledDataset, build_dataset, remap_to_eval_classes

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "ClassMap",
    "EvalClass",
    "SurfaceClass",
    "align_and_fit",
    "default_class_map",
    "load_clip",
    "normalize_peak",
    "resample",
    "save_clip",
    "LabeledDataset",
    "build_dataset",
    "remap_to_eval_classes",
    "__version__",
]
