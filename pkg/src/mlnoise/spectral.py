"""FFT engine, circulant embedding of the ACF, and optimal-length selection.

The embedding of a length-``T`` covariance is the even sequence
``[c_0, c_1, ..., c_{T-1}, c_T, c_{T-1}, ..., c_1]``; the real part of its DFT
gives the eigenvalues ``A_k`` of the associated circulant matrix.  ``plan``
walks a ladder of power-of-two lengths and keeps the first whose spectrum is
non-negative up to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, NoValidLength
from .model import MLParams, acf_values
from .special import DEFAULT_CONFIG, MLEvalConfig

__all__ = ["SpectralPlan", "fft", "ifft", "build_embedding", "plan", "DEFAULT_LADDER_CAP"]

DEFAULT_LADDER_CAP = 2**24
CLAMP_REL = 1e-12


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _transform(x, inverse: bool, backend: str | None) -> np.ndarray:
    a = np.array(x, dtype=complex, ndmin=1, copy=True)
    if a.ndim > 2:
        raise DomainError("fft accepts 1-D sequences or 2-D batches of rows")
    n = a.shape[-1]
    if not _is_pow2(n):
        raise DomainError(f"FFT length must be a power of two, got {n}")
    rows = np.ascontiguousarray(a.reshape(-1, n))
    _kernels.get(backend).fft_rows(rows, _kernels.twiddles(n), inverse)
    return rows.reshape(a.shape)


def fft(x, backend: str | None = None) -> np.ndarray:
    """Forward DFT ``X_k = sum_t x_t exp(-2 pi i k t / M)`` (power-of-two ``M``).

    A 2-D input is transformed row by row.
    """
    return _transform(x, False, backend)


def ifft(x, backend: str | None = None) -> np.ndarray:
    """Inverse DFT with the ``1/M`` factor, so ``ifft(fft(x)) == x``."""
    return _transform(x, True, backend)


def _embed(c: np.ndarray, T: int) -> np.ndarray:
    return np.concatenate((c[: T + 1], c[T - 1 : 0 : -1]))


def build_embedding(params: MLParams, T: int, cfg: MLEvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Even extension ``[c_0, ..., c_T, c_{T-1}, ..., c_1]`` of length ``2T``."""
    if int(T) != T or T < 2:
        raise DomainError(f"embedding length T must be an integer >= 2, got {T!r}")
    T = int(T)
    return _embed(acf_values(params, np.arange(T + 1), cfg), T)


@dataclass(frozen=True)
class SpectralPlan:
    """Result of the optimal-length search; immutable and reusable.

    ``eigenvalues`` holds the ``2*T_opt`` clamped circulant eigenvalues.
    ``rejected`` lists ``(length, min eigenvalue)`` for every ladder rung that
    failed before ``T_opt``.
    """

    params: MLParams
    T_req: int
    T_opt: int
    eigenvalues: np.ndarray
    clamp_count: int
    acf: np.ndarray
    rejected: tuple = ()

    def __post_init__(self):
        if self.T_opt < self.T_req or not _is_pow2(self.T_opt):
            raise DomainError("T_opt must be a power of two >= T_req")
        if len(self.eigenvalues) != 2 * self.T_opt:
            raise DomainError("eigenvalues must have length 2*T_opt")
        if not np.all(np.isfinite(self.eigenvalues)):
            raise DomainError("eigenvalues must be finite")
        if np.any(self.eigenvalues < 0):
            raise DomainError("eigenvalues must be non-negative")
        for arr in (self.eigenvalues, self.acf):
            arr.flags.writeable = False

    @property
    def M(self) -> int:
        """Circulant size ``2*T_opt``."""
        return 2 * self.T_opt


def plan(
    params: MLParams,
    T: int,
    ladder_cap: int = DEFAULT_LADDER_CAP,
    cfg: MLEvalConfig = DEFAULT_CONFIG,
) -> SpectralPlan:
    """Pick the smallest power-of-two length ``>= T`` with a non-negative circulant spectrum.

    Eigenvalues in ``[-1e-12 * max A, 0)`` count as round-off and are set to
    zero; anything more negative rejects the candidate.

    Raises
    ------
    NoValidLength
        If no candidate up to ``ladder_cap`` is acceptable.
    """
    if int(T) != T or T < 2:
        raise DomainError(f"T must be an integer >= 2, got {T!r}")
    if not _is_pow2(int(ladder_cap)):
        raise DomainError(f"ladder_cap must be a power of two, got {ladder_cap!r}")
    T = int(T)
    if T > ladder_cap:
        raise DomainError(f"T={T} exceeds ladder_cap={ladder_cap}")
    cand = 1 << (T - 1).bit_length()
    c = acf_values(params, np.arange(cand + 1), cfg)
    rejected = []
    while cand <= ladder_cap:
        if len(c) < cand + 1:
            c = np.concatenate((c, acf_values(params, np.arange(len(c), cand + 1), cfg)))
        A = fft(_embed(c, cand)).real
        eps_clamp = CLAMP_REL * A.max()
        lo = A.min()
        if lo >= -eps_clamp:
            neg = A < 0
            A[neg] = 0.0
            return SpectralPlan(params, T, cand, A, int(neg.sum()), c[: cand + 1].copy(), tuple(rejected))
        rejected.append((cand, float(lo)))
        cand *= 2
    raise NoValidLength(
        f"no embedding length up to {ladder_cap} has a non-negative spectrum for {params.as_dict()}"
    )
