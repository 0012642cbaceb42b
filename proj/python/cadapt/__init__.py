"""Contrast-adaptive supervised segmentation."""

from ._cadapt import (
    CadaptError,
    adapt_segment,
    argmax_labels,
    blur,
    classification_error,
    classify,
    dice,
    estimate_centroids,
    fit_classifier,
    gaussian_kernel_1d,
    load_probmap,
    load_volume,
    make_phantom,
    refit_residual_variance,
    save_probmap,
    save_volume,
    segment_standard,
    simulate,
    soften_labels,
    volume_consistency,
)

__all__ = [
    "CadaptError",
    "adapt_segment",
    "argmax_labels",
    "blur",
    "classification_error",
    "classify",
    "dice",
    "estimate_centroids",
    "fit_classifier",
    "gaussian_kernel_1d",
    "load_probmap",
    "load_volume",
    "make_phantom",
    "refit_residual_variance",
    "save_probmap",
    "save_volume",
    "segment_standard",
    "simulate",
    "soften_labels",
    "volume_consistency",
]
