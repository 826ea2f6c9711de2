"""Joint foreground segmentation and background inpainting GAN with neglect nodes."""

from ._core import (
    ArgumentError,
    ConfigError,
    DimensionError,
    IoError,
    NumericError,
    Trainer,
    adversarial_loss,
    discriminator_forward,
    discriminator_loss,
    generator_forward,
    l1_pct,
    load_dataset,
    make_dataset,
    mask_iou,
    psnr,
    ssim,
    synth,
)

__all__ = [
    "ArgumentError",
    "ConfigError",
    "DimensionError",
    "IoError",
    "NumericError",
    "Trainer",
    "adversarial_loss",
    "discriminator_forward",
    "discriminator_loss",
    "generator_forward",
    "l1_pct",
    "load_dataset",
    "make_dataset",
    "mask_iou",
    "psnr",
    "ssim",
    "synth",
]
