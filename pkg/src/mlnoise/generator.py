"""Davies-Harte synthesis of M-L noise batches.

Each sequence ``m`` draws ``2*T_opt`` standard normals from its own
substream, builds the Hermitian amplitude vector

    Y_0 = sqrt(2 T_opt A_0) Z_0
    Y_k = sqrt(T_opt A_k) (Z_{2k-1} + i Z_{2k})      0 < k < T_opt
    Y_T = sqrt(2 T_opt A_T) Z_{2T_opt - 1}           k = T_opt
    Y_k = conj(Y_{2T_opt - k})                       T_opt < k < 2 T_opt

and keeps the first ``T`` entries of ``ifft(Y)`` (``1/(2 T_opt)`` scaling).
The window has covariance exactly ``c_|i-j|`` for lags below ``T_opt``.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import DomainError
from .model import MLParams
from .spectral import SpectralPlan

__all__ = ["NoiseBatch", "SeedPolicy", "substream_seed", "generate", "iter_generate", "synthesis_operator"]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
WORKSPACE_DOUBLES = 2**26


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def substream_seed(master_seed: int, index: int) -> int:
    """64-bit seed of sequence ``index`` under ``master_seed``.

    Injective in ``index`` for a fixed master seed (splitmix64 is a bijection).
    """
    return _splitmix64((_splitmix64(master_seed & _MASK64) + index * _GOLDEN) & _MASK64)


@dataclass(frozen=True)
class SeedPolicy:
    """Master seed plus the pinned per-sequence substream derivation."""

    master_seed: int | None = None

    def resolve(self) -> int:
        """The master seed, drawn from system entropy when unset."""
        if self.master_seed is None:
            return secrets.randbits(64)
        seed = int(self.master_seed)
        if not 0 <= seed <= _MASK64:
            raise DomainError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        return seed

    @staticmethod
    def stream(master_seed: int, index: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(substream_seed(master_seed, index)))


@dataclass(frozen=True)
class NoiseBatch:
    """``N`` noise sequences of length ``T`` with their provenance."""

    data: np.ndarray
    params: MLParams
    seed: int | None
    plan_T_opt: int
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        d = self.data
        if d.ndim != 2 or d.shape[0] < 1 or d.shape[1] < 1:
            raise DomainError(f"noise data must be a non-empty N x T matrix, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise DomainError("noise data must be finite")
        if d.shape[1] > self.plan_T_opt:
            raise DomainError("T must not exceed plan_T_opt")

    @property
    def N(self) -> int:
        return self.data.shape[0]

    @property
    def T(self) -> int:
        return self.data.shape[1]


def _amplitudes(plan: SpectralPlan) -> np.ndarray:
    A = plan.eigenvalues
    if not np.all(np.isfinite(A)):
        raise DomainError("plan eigenvalues must be finite")
    h = plan.T_opt
    amp = np.sqrt(h * A)
    amp[0] = np.sqrt(2.0 * h * A[0])
    amp[h] = np.sqrt(2.0 * h * A[h])
    return amp


def _check_request(plan: SpectralPlan, N: int, T: int | None) -> int:
    if T is None:
        T = plan.T_req
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    if int(T) != T or T < 1:
        raise DomainError(f"T must be a positive integer, got {T!r}")
    if T > plan.T_opt:
        raise DomainError(f"T={T} exceeds the plan length T_opt={plan.T_opt}")
    return int(T)


def iter_generate(
    plan: SpectralPlan,
    N: int,
    T: int | None,
    master_seed: int,
    threads: int = 1,
    backend: str | None = None,
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(first_row, block)`` chunks of the batch.

    Chunks keep the synthesis workspace under ``WORKSPACE_DOUBLES`` doubles.
    Every row depends only on ``(plan, master_seed, row)``, so the output is
    independent of ``threads`` and of the chunking.
    """
    T = _check_request(plan, N, T)
    kern = _kernels.get(backend)
    M = plan.M
    amp = _amplitudes(plan)
    tw = _kernels.twiddles(M)
    # normals plus complex workspace: about 3*M doubles per row
    rows_per_chunk = max(1, WORKSPACE_DOUBLES // (3 * M))
    for start in range(0, N, rows_per_chunk):
        stop = min(N, start + rows_per_chunk)
        z = np.empty((stop - start, M))
        out = np.empty((stop - start, T))

        def work(lo, hi, z=z, out=out, start=start):
            for r in range(lo, hi):
                SeedPolicy.stream(master_seed, start + r).standard_normal(out=z[r])
            kern.synthesize_rows(z[lo:hi], amp, tw, out[lo:hi])

        _kernels.run_split(work, stop - start, threads)
        yield start, out


def generate(
    plan: SpectralPlan,
    N: int,
    T: int | None = None,
    seed: int | None = None,
    threads: int = 1,
    backend: str | None = None,
) -> NoiseBatch:
    """Generate ``N`` M-L noise sequences of length ``T`` (default ``plan.T_req``).

    ``seed=None`` draws a fresh master seed from system entropy; it is
    recorded in the returned batch.
    """
    T = _check_request(plan, N, T)
    master = SeedPolicy(seed).resolve()
    data = np.empty((int(N), T))
    for start, block in iter_generate(plan, N, T, master, threads, backend):
        data[start : start + len(block)] = block
    return NoiseBatch(data, plan.params, master, plan.T_opt, {"backend": backend or _kernels.BACKEND})


def synthesis_operator(plan: SpectralPlan, backend: str | None = None) -> np.ndarray:
    """Matrix ``L`` (``T_opt x 2 T_opt``) of the linear map from normals to noise.

    Column ``j`` is the pipeline output for the unit vector ``e_j``; the
    generated window then has covariance ``L @ L.T``.
    """
    M = plan.M
    eye = np.eye(M)
    out = np.empty((M, plan.T_opt))
    _kernels.get(backend).synthesize_rows(eye, _amplitudes(plan), _kernels.twiddles(M), out)
    return out.T.copy()
