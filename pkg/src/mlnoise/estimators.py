"""Empirical ACF, random-walker trajectories and MSD of generated noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .generator import NoiseBatch
from .model import AcfSeries, MLParams, MsdSeries, lag_grid

__all__ = [
    "TrajectoryBatch",
    "acf_empirical",
    "acf_per_sequence",
    "integrate_trajectories",
    "msd_empirical",
    "loglog_slope",
]

ACF_MODES = ("time", "ensemble")


@dataclass(frozen=True)
class TrajectoryBatch:
    """Random-walker positions, ``N x (T+1)``, starting at the origin."""

    positions: np.ndarray
    source_params: MLParams | None = None

    def __post_init__(self):
        p = self.positions
        if p.ndim != 2 or p.shape[1] < 2 or p.shape[0] < 1:
            raise DomainError(f"positions must be N x (T+1) with T >= 1, got {p.shape}")
        if np.any(p[:, 0] != 0.0):
            raise DomainError("trajectories must start at x = 0")

    @property
    def N(self) -> int:
        return self.positions.shape[0]

    @property
    def T_plus_1(self) -> int:
        return self.positions.shape[1]


def _noise_matrix(batch) -> np.ndarray:
    data = batch.data if isinstance(batch, NoiseBatch) else batch
    data = np.ascontiguousarray(np.asarray(data, dtype=float))
    if data.ndim == 1:
        data = data[None, :]
    if data.ndim != 2 or data.size == 0:
        raise DomainError("noise batch must be a non-empty N x T matrix")
    return data


def _lagged_sums(xi, lags, workers, backend):
    lags = np.ascontiguousarray(lags, dtype=np.int64)
    if np.any(lags < 0) or np.any(lags >= xi.shape[1]):
        raise DomainError("lags must lie in [0, T)")
    sums = np.empty((xi.shape[0], len(lags)))
    kern = _kernels.get(backend)
    _kernels.run_split(lambda lo, hi: kern.lagged_sums(xi[lo:hi], lags, sums[lo:hi]), xi.shape[0], workers)
    return sums


def acf_per_sequence(batch, lags, workers: int = 1, backend: str | None = None) -> np.ndarray:
    """Time-averaged lag products per sequence, ``N x len(lags)``.

    ``out[m, l] = sum_s xi_m(s) xi_m(s + t_l) / (T - t_l)``.
    """
    xi = _noise_matrix(batch)
    lags = np.asarray(lags, dtype=np.int64)
    return _lagged_sums(xi, lags, workers, backend) / (xi.shape[1] - lags)


def acf_empirical(
    batch,
    tmax: int,
    dt: int,
    workers: int = 1,
    mode: str = "time",
    backend: str | None = None,
) -> AcfSeries:
    """Empirical ACF on lags ``0, dt, ..., <= tmax``.

    ``mode="time"`` (default) averages over all time origins and sequences,
    ``C(t) = sum_m sum_s xi_m(s) xi_m(s+t) / (N (T - t))``.
    ``mode="ensemble"`` uses origin 0 only, ``C(t) = mean_m xi_m(0) xi_m(t)``.
    The result does not depend on ``workers``.
    """
    xi = _noise_matrix(batch)
    if mode not in ACF_MODES:
        raise DomainError(f"mode must be one of {ACF_MODES}, got {mode!r}")
    T = xi.shape[1]
    lags = lag_grid(tmax, dt, include_zero=True)
    if tmax >= T:
        raise DomainError(f"tmax must be less than the length of noise sequence (tmax={tmax}, T={T})")
    if mode == "ensemble":
        values = np.mean(xi[:, :1] * xi[:, lags], axis=0)
    else:
        # fixed-order reduction over sequences keeps results worker-independent
        values = np.sum(_lagged_sums(xi, lags, workers, backend), axis=0) / (xi.shape[0] * (T - lags))
    meta = {"estimator": "time+ensemble average" if mode == "time" else "ensemble average, origin 0",
            "N": xi.shape[0], "T": T}
    return AcfSeries(lags, values, "empirical", meta)


def integrate_trajectories(batch, backend: str | None = None) -> TrajectoryBatch:
    """Unit-step Euler integration ``x(0) = 0``, ``x(t+1) = x(t) + xi(t)``."""
    xi = _noise_matrix(batch)
    pos = np.empty((xi.shape[0], xi.shape[1] + 1))
    _kernels.get(backend).cumulative_rows(xi, pos)
    params = batch.params if isinstance(batch, NoiseBatch) else None
    return TrajectoryBatch(pos, params)


def msd_empirical(traj: TrajectoryBatch, tmax: int, dt: int) -> MsdSeries:
    """Ensemble MSD ``mean_m (x_m(t) - x_m(0))**2`` on times ``dt, ..., <= tmax``."""
    if tmax > traj.T_plus_1 - 1:
        raise DomainError(f"tmax={tmax} exceeds the trajectory length {traj.T_plus_1 - 1}")
    times = lag_grid(tmax, dt, include_zero=False)
    disp = traj.positions[:, times] - traj.positions[:, :1]
    return MsdSeries(times, np.mean(disp * disp, axis=0), "empirical", {"N": traj.N})


def loglog_slope(series: MsdSeries, t_lo: float, t_hi: float) -> float:
    """Least-squares slope of ``log(values)`` against ``log(times)`` on ``[t_lo, t_hi]``."""
    t = np.asarray(series.times, dtype=float)
    v = np.asarray(series.values, dtype=float)
    sel = (t >= t_lo) & (t <= t_hi)
    if sel.sum() < 3:
        raise DomainError(f"need at least 3 points in [{t_lo}, {t_hi}], have {int(sel.sum())}")
    if np.any(v[sel] <= 0):
        raise DomainError("log-log fit needs positive values")
    lx = np.log(t[sel])
    ly = np.log(v[sel])
    lx = lx - lx.mean()
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))
