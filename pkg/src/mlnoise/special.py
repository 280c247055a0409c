"""Gamma and one-parameter Mittag-Leffler functions on the negative real axis.

``mittag_leffler(lam, z)`` evaluates ``E_lam(z) = sum_k z**k / Gamma(lam*k + 1)``
for ``0 < lam < 2`` and ``z <= 0``.  Three branches are tried in an order
decided by ``y = |z|**(1/lam)``:

* the Taylor series, summed with ``math.fsum`` and abandoned as soon as the
  largest term dwarfs the running sum (alternating cancellation);
* the large-``|z|`` asymptotic expansion with optimal truncation, plus the
  exponentially damped pole contribution when ``lam > 1``;
* a trapezoidal inversion of the Laplace transform ``s**(lam-1)/(s**lam - z)``
  along a parabolic contour, with the contour parameters chosen to balance
  discretisation, truncation and round-off error.

Each branch reports failure instead of returning an inaccurate value; if none
succeeds a :class:`~mlnoise.errors.ConvergenceError` is raised.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "MLEvalConfig",
    "DEFAULT_CONFIG",
    "gamma_fn",
    "lgamma_fn",
    "mittag_leffler",
    "mittag_leffler_array",
]

_EPS = np.finfo(float).eps
_LOG_EPS = math.log(_EPS)

# Rational Lanczos approximation with g = 6.0246800407767296 (N = 13), as
# published in the Boost.Math / Cephes "lanczos13m53" tables (the sum is
# pre-scaled by exp(-g)); coefficients in order of decreasing degree.
_LANCZOS_G = 6.024680040776729583740234375
_LANCZOS_NUM = (
    0.006061842346248906525783753964555936883222,
    0.5098416655656676188125178644804694509993,
    19.51992788247617482847860966235652136208,
    449.9445569063168119446858607650988409623,
    6955.999602515376140356310115515198987526,
    75999.29304014542649875303443598909137092,
    601859.6171681098786670226533699352302507,
    3481712.15498064590882071018964774556468,
    14605578.08768506808414169982791359218571,
    43338889.32467613834773723740590533316085,
    86363131.28813859145546927288977868422342,
    103794043.1163445451906271053616070238554,
    56906521.91347156388090791033559122686859,
)
_LANCZOS_DEN = (
    1.0, 66.0, 1925.0, 32670.0, 357423.0, 2637558.0, 13339535.0,
    45995730.0, 105258076.0, 150917976.0, 120543840.0, 39916800.0, 0.0,
)


@dataclass(frozen=True)
class MLEvalConfig:
    """Accuracy policy for :func:`mittag_leffler`.

    Parameters
    ----------
    rel_tol
        Target relative accuracy of the returned value.
    max_series_terms
        Hard cap on the number of Taylor (and asymptotic) terms.
    series_asymptotic_switch
        Threshold on ``|z|**(1/lam)``: below it the Taylor series is tried
        first, above it the asymptotic expansion.  The contour inversion
        covers whatever neither branch can deliver.
    """

    rel_tol: float = 1e-10
    max_series_terms: int = 2000
    series_asymptotic_switch: float = 10.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.max_series_terms < 1:
            raise DomainError(f"max_series_terms must be >= 1, got {self.max_series_terms}")
        if not self.series_asymptotic_switch > 0:
            raise DomainError("series_asymptotic_switch must be > 0")

    @property
    def cancellation_limit(self) -> float:
        # largest tolerated max|term| / |sum| before the series loses rel_tol
        return min(1e8, 0.01 * self.rel_tol / _EPS)


DEFAULT_CONFIG = MLEvalConfig()


def _lanczos_sum(x: float) -> float:
    # rational sum, evaluated in 1/x for large x to avoid overflow
    if x <= 1.0:
        num = den = 0.0
        for a, b in zip(_LANCZOS_NUM, _LANCZOS_DEN):
            num = num * x + a
            den = den * x + b
        return num / den
    r = 1.0 / x
    num = den = 0.0
    for a, b in zip(reversed(_LANCZOS_NUM), reversed(_LANCZOS_DEN)):
        num = num * r + a
        den = den * r + b
    return num / den


def _shifted(x: float) -> tuple[float, float]:
    # t = x + g - 0.5 and its rounding error (two-sum)
    shift = _LANCZOS_G - 0.5
    t = x + shift
    bp = t - x
    return t, (x - (t - bp)) + (shift - bp)


def gamma_fn(x: float) -> float:
    """Gamma function for real ``x > 0`` (rational Lanczos approximation).

    Raises
    ------
    DomainError
        If ``x <= 0`` or ``x`` is not finite.
    OverflowError
        If ``Gamma(x)`` exceeds the double range (``x > 171.62``).
    """
    x = float(x)
    if not (x > 0.0) or math.isinf(x):
        raise DomainError(f"gamma_fn requires a finite x > 0, got {x!r}")
    if x == math.floor(x) and x <= 23.0:
        return float(math.factorial(int(x) - 1))
    if x < 1.0:
        # Gamma(x) = Gamma(x + 1) / x; the +1 is exact enough for x > eps
        if x < _EPS:
            return 1.0 / x - 0.5772156649015329
        return gamma_fn(x + 1.0) / x
    if x > 171.62437695630272:
        raise OverflowError(f"gamma_fn({x}) overflows")
    t, terr = _shifted(x)
    a = _lanczos_sum(x)
    # t**(x - 0.5) split in two halves to delay overflow
    p = t ** (0.5 * (x - 0.5))
    corr = math.exp((x - 0.5) * math.log1p(terr / t))
    return (p * math.exp(0.5 - x) * a * corr) * p


def lgamma_fn(x: float) -> float:
    """Natural log of ``Gamma(x)`` for ``x > 0``."""
    x = float(x)
    if not (x > 0.0) or math.isinf(x):
        raise DomainError(f"lgamma_fn requires a finite x > 0, got {x!r}")
    if x < 20.0:
        return math.log(gamma_fn(x))
    t, terr = _shifted(x)
    return (x - 0.5) * (math.log(t) + terr / t - 1.0) + math.log(_lanczos_sum(x))


def _sinpi(w: float) -> float:
    r = math.fmod(w, 2.0)
    if r == 0.0 or r == 1.0:
        return 0.0
    if r > 1.0:
        return -math.sin(math.pi * (r - 1.0))
    return math.sin(math.pi * r)


def _check_domain(lam: float, z: float) -> None:
    if not (0.0 < lam < 2.0):
        raise DomainError(f"lambda must lie in the open interval (0, 2), got {lam!r}")
    if not (z <= 0.0) or math.isinf(z):
        raise DomainError(f"mittag_leffler requires a finite z <= 0, got {z!r}")


# -- branch (a): Taylor series --------------------------------------------


def _series(lam: float, x: float, cfg: MLEvalConfig) -> float | None:
    limit = cfg.cancellation_limit
    terms = [1.0]
    maxterm = 1.0
    logx = math.log(x)
    prev = 1.0
    for k in range(1, cfg.max_series_terms):
        a = lam * k + 1.0
        if a < 170.0 and k * logx < 700.0:
            mag = math.exp(k * logx) / gamma_fn(a) if k * logx > 300.0 else x**k / gamma_fn(a)
        else:
            lm = k * logx - lgamma_fn(a)
            mag = math.exp(lm) if lm > -745.0 else 0.0
        if mag > maxterm:
            maxterm = mag
            if maxterm > limit:
                # |E_lam(-x)| <= 1 on this domain, so the ratio test can fire early
                return None
        terms.append(-mag if k & 1 else mag)
        if mag < prev and mag <= 0.01 * _EPS * abs(math.fsum(terms)):
            s = math.fsum(terms)
            if s == 0.0 or maxterm > limit * abs(s):
                return None
            return s
        prev = mag
    return None


# -- branch (b): asymptotic expansion -------------------------------------


def _pole_term(lam: float, y: float) -> float:
    # residues of s**(lam-1)/(s**lam + x) at s = y*exp(+-i*pi/lam), lam > 1
    ang = math.pi / lam
    return (2.0 / lam) * math.exp(y * math.cos(ang)) * math.cos(y * math.sin(ang))


def _asymptotic(lam: float, x: float, y: float, cfg: MLEvalConfig) -> float | None:
    # E(-x) ~ -sum_k (-x)**-k / Gamma(1 - lam k)
    #       = -sum_k (-1)**k x**-k Gamma(lam k) sin(pi lam k) / pi
    logx = math.log(x)
    terms = []
    prev_bound = math.inf
    pole = _pole_term(lam, y) if lam > 1.0 else 0.0
    for k in range(1, cfg.max_series_terms):
        w = lam * k
        logbound = lgamma_fn(w) - k * logx - math.log(math.pi)
        bound = math.exp(logbound) if logbound > -745.0 else 0.0
        if bound > prev_bound:
            # past the smallest term without reaching the tolerance
            return None
        s = _sinpi(w)
        sign = -1.0 if k & 1 else 1.0
        terms.append(-sign * bound * s)
        total = math.fsum(terms) + pole
        if total != 0.0 and bound <= 0.1 * cfg.rel_tol * abs(total):
            return total
        prev_bound = bound
    return None


# -- branch (c): Laplace transform inversion on a parabolic contour -------


def _param_bounded(phi_j, phi_j1, pj, qj, log_eps):
    """Contour parameters for a region bounded by two singularities."""
    fac = 1.01
    f_max = math.exp(log_eps - _LOG_EPS)
    sq_j = math.sqrt(phi_j)
    threshold = 2.0 * math.sqrt(log_eps - _LOG_EPS)
    sq_j1 = min(math.sqrt(phi_j1), threshold - sq_j)
    if pj < 1e-14 and qj < 1e-14:
        sqb_j, sqb_j1 = sq_j, sq_j1
        f_bar = 1.0
    elif pj < 1e-14:
        sqb_j = sq_j
        f_min = fac * (sq_j / (sq_j1 - sq_j)) ** qj if sq_j > 0 else fac
        if f_min >= f_max:
            return None
        f_bar = f_min + f_min / f_max * (f_max - f_min)
        fq = f_bar ** (-1.0 / qj)
        sqb_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq)
    elif qj < 1e-14:
        sqb_j1 = sq_j1
        f_min = fac * (sq_j1 / (sq_j1 - sq_j)) ** pj
        if f_min >= f_max:
            return None
        f_bar = f_min + f_min / f_max * (f_max - f_min)
        fp = f_bar ** (-1.0 / pj)
        sqb_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp)
    else:
        f_min = fac * (sq_j + sq_j1) / (sq_j1 - sq_j) ** max(pj, qj)
        if f_min >= f_max:
            return None
        f_min = max(f_min, 1.5)
        f_bar = f_min + f_min / f_max * (f_max - f_min)
        fp = f_bar ** (-1.0 / pj)
        fq = f_bar ** (-1.0 / qj)
        w = -phi_j1 / log_eps
        den = 2.0 + w - (1.0 + w) * fp + fq
        sqb_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den
        sqb_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den
    log_eps = log_eps - math.log(f_bar)
    w = -sqb_j1**2 / log_eps
    mu = (((1.0 + w) * sqb_j + sqb_j1) / (2.0 + w)) ** 2
    h = -2.0 * math.pi / log_eps * (sqb_j1 - sqb_j) / ((1.0 + w) * sqb_j + sqb_j1)
    if not (h > 0.0 and mu > 0.0):
        return None
    n = math.ceil(math.sqrt(1.0 - log_eps / mu) / h)
    return mu, h, n


def _param_unbounded(phi_j, pj, log_eps):
    """Contour parameters for the region right of the last singularity."""
    sq_phi = math.sqrt(phi_j)
    phib = phi_j * 1.01 if phi_j > 0 else 0.01
    sqb = math.sqrt(phib)
    f_min, f_max, f_tar = 1.0, 10.0, 5.0
    for _ in range(100):
        lep = log_eps / phib
        n = math.ceil(phib / math.pi * (1.0 - 1.5 * lep + math.sqrt(1.0 - 2.0 * lep)))
        a = math.pi * n / phib
        sq_mu = sqb * abs(4.0 - a) / abs(7.0 - math.sqrt(1.0 + 12.0 * a))
        fbar = ((sqb - sq_phi) / sq_mu) ** (-pj)
        if pj < 1e-14 or f_min < fbar < f_max:
            break
        sqb = f_tar ** (-1.0 / pj) * sq_mu + sq_phi
        phib = sqb * sqb
    mu = sq_mu * sq_mu
    h = (-3.0 * a - 2.0 + 2.0 * math.sqrt(1.0 + 12.0 * a)) / (4.0 - a) / n
    threshold = log_eps - _LOG_EPS
    if mu > threshold:
        q = 0.0 if abs(pj) < 1e-14 else f_tar ** (-1.0 / pj) * math.sqrt(mu)
        phib = (q + sq_phi) ** 2
        if phib >= threshold:
            return None
        w = math.sqrt(_LOG_EPS / (_LOG_EPS - log_eps))
        u = math.sqrt(-phib / _LOG_EPS)
        mu = threshold
        n = math.ceil(w * log_eps / 2.0 / math.pi / (u * w - 1.0))
        h = w / n
    return mu, h, n


def _contour(lam: float, x: float, y: float, max_nodes: int = 2000) -> float | None:
    """Invert the Laplace transform of ``E_lam(-x t**lam)`` at ``t = 1``."""
    log_eps = math.log(1e-15)
    poles = []
    # poles s**lam = -x on the principal sheet: angles (pi + 2 pi k)/lam in (-pi, pi]
    kmin = math.ceil(-lam / 2.0 - 0.5)
    kmax = math.floor(lam / 2.0 - 0.5)
    for k in range(kmin, kmax + 1):
        s = y * cmath.exp(1j * (math.pi + 2.0 * math.pi * k) / lam)
        phi = 0.5 * (s.real + abs(s))
        if phi > 1e-15:
            poles.append((phi, s))
    poles.sort(key=lambda item: item[0])
    sing = [0j] + [s for _, s in poles]
    phis = [0.0] + [phi for phi, _ in poles] + [math.inf]
    n_sing = len(sing)
    p = [0.0] + [1.0] * (n_sing - 1)
    q = [1.0] * (n_sing - 1) + [math.inf]

    best = None
    while best is None:
        admissible = [
            j for j in range(n_sing) if phis[j] < log_eps - _LOG_EPS and phis[j] < phis[j + 1]
        ]
        candidates = []
        for j in admissible:
            if j < n_sing - 1:
                par = _param_bounded(phis[j], phis[j + 1], p[j], q[j], log_eps)
            else:
                par = _param_unbounded(phis[j], p[j], log_eps)
            if par is not None:
                candidates.append((par[2], j, par))
        if candidates and min(candidates)[0] <= 200:
            best = min(candidates)
        elif log_eps > math.log(1e-11):
            return None
        else:
            log_eps += math.log(10.0)
    n, j, (mu, h, _) = best
    if n > max_nodes:
        return None

    u = h * np.arange(-n, n + 1)
    s = mu * (1j * u + 1.0) ** 2
    ds = 2.0 * mu * (1j - u)
    f = s ** (lam - 1.0) / (s**lam + x)
    integral = h * np.sum(np.exp(s) * f * ds) / (2j * math.pi)
    residues = sum(cmath.exp(sp) for sp in sing[j + 1 :]) / lam
    val = (integral + residues).real
    if not math.isfinite(val):
        return None
    return float(val)


def mittag_leffler(lam: float, z: float, cfg: MLEvalConfig = DEFAULT_CONFIG) -> float:
    """Evaluate ``E_lam(z)`` for ``0 < lam < 2`` and real ``z <= 0``.

    Parameters
    ----------
    lam
        Exponent of the Mittag-Leffler function.
    z
        Non-positive real argument.
    cfg
        Accuracy policy; see :class:`MLEvalConfig`.

    Returns
    -------
    float
        ``E_lam(z)`` to relative accuracy ``cfg.rel_tol``.

    Raises
    ------
    DomainError
        If ``lam`` is outside ``(0, 2)`` or ``z > 0``.
    ConvergenceError
        If no evaluation branch meets the tolerance.
    """
    lam = float(lam)
    z = float(z)
    _check_domain(lam, z)
    if z == 0.0:
        return 1.0
    if lam == 1.0:
        return math.exp(z)
    x = -z
    y = x ** (1.0 / lam)
    if y < cfg.series_asymptotic_switch:
        order = ("series", "contour", "asymptotic")
    else:
        order = ("asymptotic", "contour", "series")
    for branch in order:
        if branch == "series":
            val = _series(lam, x, cfg)
        elif branch == "asymptotic":
            val = _asymptotic(lam, x, y, cfg)
        else:
            val = _contour(lam, x, y)
        if val is not None:
            return val
    raise ConvergenceError(f"no branch reached rel_tol={cfg.rel_tol:g} for lambda={lam}, z={z}")


def mittag_leffler_array(lam: float, z, cfg: MLEvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Elementwise :func:`mittag_leffler` over an array of arguments."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape, dtype=float)
    flat = out.reshape(-1)
    if float(lam) == 1.0:
        _check_domain(1.0, float(z.max()) if z.size else 0.0)
        return np.exp(z)
    for i, zi in enumerate(z.reshape(-1)):
        flat[i] = mittag_leffler(lam, zi, cfg)
    return out
