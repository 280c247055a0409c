"""Theoretical autocorrelation and MSD of Mittag-Leffler correlated noise.

The noise law is ``C(t) = (C / tau**lam) * E_lam(-(t/tau)**lam)`` with time in
integer steps.  The MSD of the random walker ``dx/dt = xi`` follows from
``MSD(t) = 2 * int_0^t (t - s) C(s) ds``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError
from .special import DEFAULT_CONFIG, MLEvalConfig, mittag_leffler_array

__all__ = [
    "MLParams",
    "AcfSeries",
    "MsdSeries",
    "lag_grid",
    "acf_values",
    "acf_theoretical",
    "msd_theoretical",
]

TAU_MAX = 10000.0


@dataclass(frozen=True)
class MLParams:
    """Noise law ``(C, lambda, tau)``.

    ``C / tau**lam`` is the lag-0 variance; ``tau`` is measured in time steps.
    """

    C: float
    lam: float
    tau: float

    def __post_init__(self):
        for name in ("C", "lam", "tau"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
                raise DomainError(f"{name} must be a finite real number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not (0.0 < self.lam < 2.0):
            raise DomainError(f"lambda must be within the range (0,2), got {self.lam:g}")
        if not (0.0 < self.tau <= TAU_MAX):
            raise DomainError(f"tau must be within the range (0,10000], got {self.tau:g}")
        if not self.C > 0.0:
            raise DomainError(f"C must be > 0, got {self.C:g}")

    @property
    def c0(self) -> float:
        """Lag-0 variance ``C / tau**lam``."""
        return self.C / self.tau**self.lam

    def as_dict(self) -> dict:
        return {"C": self.C, "lambda": self.lam, "tau": self.tau}


@dataclass(frozen=True)
class AcfSeries:
    lags: np.ndarray
    values: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        _check_series(self.lags, self.values, self.kind, allow_zero=True)


@dataclass(frozen=True)
class MsdSeries:
    times: np.ndarray
    values: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        _check_series(self.times, self.values, self.kind, allow_zero=False)
        if not np.all(np.isfinite(self.values)):
            raise DomainError("MSD values must be finite")
        if self.kind == "theoretical" and np.any(self.values < 0):
            raise DomainError("theoretical MSD values must be non-negative")


def _check_series(grid, values, kind, allow_zero):
    if kind not in ("theoretical", "empirical"):
        raise DomainError(f"kind must be 'theoretical' or 'empirical', got {kind!r}")
    if len(grid) != len(values):
        raise DomainError("grid and values must have equal length")
    if len(grid) > 1 and np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    if len(grid) and (grid[0] < 0 or (not allow_zero and grid[0] == 0)):
        raise DomainError("grid starts at an invalid time")


def lag_grid(tmax: int, dt: int, include_zero: bool) -> np.ndarray:
    """Integer grid ``{0 or dt, ..., <= tmax}`` with step ``dt``; requires ``1 <= dt < tmax``."""
    tmax, dt = _as_int(tmax, "tmax"), _as_int(dt, "dt")
    if not (1 <= dt < tmax):
        raise DomainError(f"dt must be within the range [1, tmax), got dt={dt}, tmax={tmax}")
    start = 0 if include_zero else dt
    return np.arange(start, tmax + 1, dt, dtype=np.int64)


def _as_int(v, name):
    if isinstance(v, (bool, np.bool_)) or int(v) != v:
        raise DomainError(f"{name} must be an integer, got {v!r}")
    return int(v)


def acf_values(params: MLParams, t, cfg: MLEvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """``C(t)`` at arbitrary non-negative (possibly fractional) times ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("times must be non-negative")
    if params.lam == 1.0:
        return params.c0 * np.exp(-t / params.tau)
    z = -((t / params.tau) ** params.lam)
    return params.c0 * mittag_leffler_array(params.lam, z, cfg)


def acf_theoretical(params: MLParams, tmax: int, dt: int, cfg: MLEvalConfig = DEFAULT_CONFIG) -> AcfSeries:
    """Theoretical ACF on lags ``0, dt, 2dt, ..., <= tmax``."""
    lags = lag_grid(tmax, dt, include_zero=True)
    return AcfSeries(lags, acf_values(params, lags, cfg), "theoretical", {"params": params.as_dict()})


def _initial_step(tau: float) -> float:
    # largest 2**-j (j >= 1) not above min(1, tau/100): integer times then
    # always sit on an even node count, as composite Simpson needs
    target = min(1.0, tau / 100.0)
    j = max(1, math.ceil(-math.log2(target)))
    return 2.0**-j


def _origin_moments(params: MLParams, cfg: MLEvalConfig, nodes: int) -> tuple[float, float]:
    """``int_0^1 C(s) ds`` and ``int_0^1 s C(s) ds``.

    ``C`` has an ``s**lam`` cusp at the origin that caps Simpson at order
    ``h**(1+lam)``; the substitution ``s = v**4`` smooths it for Gauss-Legendre.
    """
    v, w = np.polynomial.legendre.leggauss(nodes)
    v = 0.5 * (v + 1.0)
    w = 0.5 * w
    s = v**4
    jac = 4.0 * v**3
    c = acf_values(params, s, cfg)
    return float(np.dot(w, c * jac)), float(np.dot(w, s * c * jac))


def _simpson_msd(times: np.ndarray, h: float, c: np.ndarray, j0: float, j1: float) -> np.ndarray:
    # c holds C(1 + i h); cumulative Simpson over panels of width 2h
    s = 1.0 + h * np.arange(len(c))
    f0 = c
    f1 = s * c
    panel0 = (h / 3.0) * (f0[0:-2:2] + 4.0 * f0[1:-1:2] + f0[2::2])
    panel1 = (h / 3.0) * (f1[0:-2:2] + 4.0 * f1[1:-1:2] + f1[2::2])
    cum0 = np.concatenate(([0.0], np.cumsum(panel0)))
    cum1 = np.concatenate(([0.0], np.cumsum(panel1)))
    idx = np.rint((times - 1.0) / (2.0 * h)).astype(np.int64)
    i0 = j0 + cum0[idx]
    i1 = j1 + cum1[idx]
    return 2.0 * (times * i0 - i1)


def msd_theoretical(
    params: MLParams,
    tmax: int,
    dt: int,
    rtol: float = 1e-6,
    max_halvings: int = 10,
    cfg: MLEvalConfig = DEFAULT_CONFIG,
) -> MsdSeries:
    """Theoretical MSD ``2 int_0^t (t-s) C(s) ds`` on times ``dt, 2dt, ..., <= tmax``.

    The integral is split at ``s = 1``.  The first step is integrated by
    Gauss-Legendre after a cusp-removing substitution; the rest by composite
    Simpson with step ``h <= min(1, tau/100)``, halved until two successive
    estimates agree to ``rtol`` relative at every time.
    """
    times = lag_grid(tmax, dt, include_zero=False).astype(float)
    tend = float(times[-1])
    j0, j1 = _origin_moments(params, cfg, 64)
    k0, k1 = _origin_moments(params, cfg, 48)
    if abs(j0 - k0) > 1e-3 * rtol * abs(j0) or abs(j1 - k1) > 1e-3 * rtol * abs(j1):
        raise ConvergenceError("near-origin quadrature did not converge")
    h = _initial_step(params.tau)
    c = acf_values(params, 1.0 + h * np.arange(int(round((tend - 1.0) / h)) + 1), cfg)
    prev = _simpson_msd(times, h, c, j0, j1)
    for _ in range(max_halvings):
        h /= 2.0
        mids = acf_values(params, 1.0 + h * np.arange(1, int(round((tend - 1.0) / h)) + 1, 2), cfg)
        fine = np.empty(2 * len(c) - 1)
        fine[0::2] = c
        fine[1::2] = mids
        c = fine
        cur = _simpson_msd(times, h, c, j0, j1)
        if np.all(np.abs(cur - prev) <= rtol * np.abs(cur)):
            meta = {"params": params.as_dict(), "step": h}
            return MsdSeries(times.astype(np.int64), cur, "theoretical", meta)
        prev = cur
    raise ConvergenceError(f"MSD quadrature did not reach rtol={rtol:g} after {max_halvings} halvings")
