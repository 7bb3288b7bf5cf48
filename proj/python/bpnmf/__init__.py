"""Beta process Poisson NMF: inference engines, synthetic data, and the
audio separation pipeline."""

from ._core import (  # noqa: F401
    Hyperparams,
    bss_eval,
    fit_gibbs,
    fit_ssmf,
    generate,
    istft,
    match_components,
    quantize,
    step_size,
    stft,
    surrogate_loglik,
    wiener_separate,
)

__all__ = [
    "Hyperparams",
    "bss_eval",
    "fit_gibbs",
    "fit_ssmf",
    "generate",
    "istft",
    "match_components",
    "quantize",
    "step_size",
    "stft",
    "surrogate_loglik",
    "wiener_separate",
]
