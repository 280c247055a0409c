"""Gaussian noise with Mittag-Leffler autocorrelation.

Stationary noise with ``C(t) = C / tau**lam * E_lam(-(t/tau)**lam)`` is
synthesised exactly by circulant embedding and Davies-Harte spectral
sampling.  The convenience functions :func:`mln`, :func:`acf` and
:func:`acft` cover the common workflow; the submodules expose the full
pipeline (plans, batches, estimators, validation).
"""

from __future__ import annotations

import numpy as np

from ._kernels import BACKEND
from .errors import ConvergenceError, DomainError, InputFormatError, MLNoiseError, NoValidLength
from .estimators import (
    TrajectoryBatch,
    acf_empirical,
    integrate_trajectories,
    loglog_slope,
    msd_empirical,
)
from .generator import NoiseBatch, SeedPolicy, generate, synthesis_operator
from .model import AcfSeries, MLParams, MsdSeries, acf_theoretical, msd_theoretical
from .spectral import SpectralPlan, build_embedding, fft, ifft, plan
from .special import DEFAULT_CONFIG, MLEvalConfig, gamma_fn, lgamma_fn, mittag_leffler

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "mln",
    "acf",
    "acft",
    "MLParams",
    "MLEvalConfig",
    "DEFAULT_CONFIG",
    "SpectralPlan",
    "NoiseBatch",
    "SeedPolicy",
    "TrajectoryBatch",
    "AcfSeries",
    "MsdSeries",
    "gamma_fn",
    "lgamma_fn",
    "mittag_leffler",
    "acf_theoretical",
    "msd_theoretical",
    "fft",
    "ifft",
    "build_embedding",
    "plan",
    "generate",
    "synthesis_operator",
    "acf_empirical",
    "integrate_trajectories",
    "msd_empirical",
    "loglog_slope",
    "MLNoiseError",
    "DomainError",
    "ConvergenceError",
    "NoValidLength",
    "InputFormatError",
]


def mln(N: int, T: int, C: float, lamda: float, tau: float, seed: int | None = None, threads: int = 1) -> np.ndarray:
    """Generate ``N`` M-L noise sequences of length ``T`` as an ``N x T`` array.

    Examples
    --------
    >>> xi = mln(2, 100, 1.0, 0.6, 10.0, seed=1)
    >>> xi.shape
    (2, 100)
    """
    p = plan(MLParams(C, lamda, tau), T)
    return generate(p, N, T, seed=seed, threads=threads).data


def acf(xi, tmax: int, dt: int, nc: int = 1) -> np.ndarray:
    """Empirical ACF of the rows of ``xi`` at lags ``0, dt, ..., <= tmax``.

    ``nc`` is the number of worker threads; it does not change the result.
    """
    return acf_empirical(np.asarray(xi, dtype=float), tmax, dt, workers=nc).values


def acft(tmax: int, dt: int, C: float, lamda: float, tau: float) -> np.ndarray:
    """Theoretical ACF at lags ``0, dt, ..., <= tmax``."""
    return acf_theoretical(MLParams(C, lamda, tau), tmax, dt).values
