"""Closed-form predictions and exponent estimation.

Covers the exact heads-count distribution of the purely subjective game,
the drift of the total bet, the predicted power-law exponents near a stable
fixed point, the inefficiency series and log-log power-law fits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, xlog1py, xlogy
from scipy.stats import linregress

from .core import PlayerPopulation
from .errors import DegenerateAllZero, DomainError, NonPositiveData, UnstableFixedPoint
from .maps import RealityMap

SAMPLES_PER_DECADE = 64
MIN_FIT_POINTS = 10


def _log_likelihoods(pop: PlayerPopulation, m, t):
    """log(s^m (1-s)^(t-m)) per player, broadcast over m."""
    s = pop.strategies[None, :]
    m = np.asarray(m, dtype=float)[:, None]
    return xlogy(m, s) + xlog1py(t - m, -s)


@dataclass(eq=False)
class SubjectiveDistribution:
    """Distribution of the heads count after ``t`` tosses of q(p) = p."""

    t: int
    probabilities: np.ndarray
    population: PlayerPopulation

    @property
    def m(self) -> np.ndarray:
        return np.arange(self.t + 1)

    def wealth_given_heads(self, m: int) -> np.ndarray:
        return subjective_wealth_given_heads(self.population, m, self.t)

    def local_maxima(self) -> np.ndarray:
        P = self.probabilities
        inner = (P[1:-1] > P[:-2]) & (P[1:-1] >= P[2:])
        return np.nonzero(inner)[0] + 1


def subjective_heads_distribution(pop: PlayerPopulation, t: int) -> SubjectiveDistribution:
    """P_m = sum_j w_j C(t, m) s_j^m (1 - s_j)^(t - m), m = 0..t, in log space."""
    if t < 0:
        raise ValueError("t must be >= 0")
    m = np.arange(t + 1)
    log_binom = gammaln(t + 1) - gammaln(m + 1) - gammaln(t - m + 1)
    with np.errstate(divide="ignore"):
        log_w = np.log(pop.wealths)[None, :]
    log_p = log_binom + logsumexp(_log_likelihoods(pop, m, t) + log_w, axis=1)
    probs = np.exp(log_p - logsumexp(log_p))
    return SubjectiveDistribution(t, probs, pop)


def subjective_wealth_given_heads(pop: PlayerPopulation, m: int, t: int) -> np.ndarray:
    """Wealths after ``m`` heads in ``t`` tosses of q(p) = p, in any order."""
    if not 0 <= m <= t:
        raise ValueError("need 0 <= m <= t")
    with np.errstate(divide="ignore"):
        log_num = _log_likelihoods(pop, [m], t)[0] + np.log(pop.wealths)
    top = log_num.max()
    if not np.isfinite(top):
        raise DegenerateAllZero(
            f"no player can produce {m} heads in {t} tosses "
            "(strategies at 0 or 1 contradict the count)"
        )
    w = np.exp(log_num - top)
    return w / w.sum()


def gaussian_drift(p, q, t):
    """Expected change of the total bet, (q - p) / t, when the wealth is Gaussian."""
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0.0) | ~(p < 1.0)):
        raise DomainError("p must lie strictly inside (0, 1)")
    if np.any(np.asarray(t) < 1):
        raise ValueError("t must be >= 1")
    out = (np.asarray(q, dtype=float) - p) / np.asarray(t, dtype=float)
    return float(out) if out.ndim == 0 else out


def exact_drift(p, q, variance):
    """Expected change of the total bet given the wealth variance D over strategies."""
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0.0) | ~(p < 1.0)):
        raise DomainError("p must lie strictly inside (0, 1)")
    out = (np.asarray(q, dtype=float) - p) * np.asarray(variance) / (p * (1.0 - p))
    return float(out) if out.ndim == 0 else out


def strategy_variance(pop: PlayerPopulation) -> float:
    """Wealth-weighted variance D of the strategies."""
    s, w = pop.strategies, pop.wealths
    p = float(np.dot(s, w))
    return float(np.dot(w, (s - p) ** 2))


INTERIOR_NEGATIVE = "interior-negative-slope"
INTERIOR_NONNEGATIVE = "interior-nonnegative"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class ConvergencePrediction:
    fixed_point: float
    slope: float
    mean_exponent: float
    fluctuation_exponent: float
    gamma: float
    case: str


def predict_convergence(reality_map: RealityMap, fixed_point: float) -> ConvergencePrediction:
    """Power-law exponents of the approach to a stable fixed point.

    The mean distance shrinks like t^(mu - 1) and typical fluctuations like
    t^((mu - 1) / 2) (t^(-1/2) when mu < 0). The inefficiency decays like
    t^(-gamma) with gamma = 1 for mu < 0, 1 - mu for 0 <= mu < 1 in the
    interior, and (1 - mu) / 2 at the boundary.
    """
    mu = float(reality_map.slope(fixed_point))
    if not mu < 1.0:
        raise UnstableFixedPoint(f"slope {mu} at p = {fixed_point} is not below 1")
    fluct = (mu - 1.0) / 2.0 if mu >= 0.0 else -0.5
    if fixed_point in (0.0, 1.0):
        gamma, case = (1.0 - mu) / 2.0, BOUNDARY
    elif mu < 0.0:
        gamma, case = 1.0, INTERIOR_NEGATIVE
    else:
        gamma, case = 1.0 - mu, INTERIOR_NONNEGATIVE
    return ConvergencePrediction(float(fixed_point), mu, mu - 1.0, fluct,
                                 min(max(gamma, 0.0), 1.0), case)


def inefficiency(p, q):
    """KL(q || p) for two coins: the best expected log-return of an epsilon player."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    bad = ((p <= 0.0) & (q > 0.0)) | ((p >= 1.0) & (q < 1.0))
    if np.any(bad):
        raise DomainError("p at 0 or 1 with a different q gives an infinite return")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = xlogy(q, q) - xlogy(q, p) + xlog1py(1.0 - q, -q) - xlog1py(1.0 - q, -p)
    r = np.where(q == p, 0.0, np.maximum(r, 0.0))
    return float(r) if r.ndim == 0 else r


def inefficiency_series(trajectory) -> np.ndarray:
    """Per-toss inefficiency of a trajectory (anything with ``p`` and ``q`` arrays)."""
    return inefficiency(trajectory.p, trajectory.q)


def interior_expansion(fixed_point: float, slope: float, y):
    """Leading-order inefficiency near an interior fixed point: (1-mu)^2 y^2 / (2 q(1-q))."""
    c = 1.0 / (fixed_point * (1.0 - fixed_point))
    return 0.5 * (1.0 - slope) ** 2 * c * np.asarray(y) ** 2


def boundary_expansion(slope: float, y):
    """Leading-order inefficiency near q = 0: (1 - mu + mu log mu) y."""
    return (1.0 - slope + slope * np.log(slope)) * np.asarray(y)


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    intercept: float
    stderr: float
    r2: float
    t_lo: int
    t_hi: int
    n_points: int


def log_spaced_times(t_lo: int, t_hi: int, per_decade: int = SAMPLES_PER_DECADE):
    n = int(np.ceil(per_decade * np.log10(t_hi / t_lo))) + 1
    return np.unique(np.round(np.logspace(np.log10(t_lo), np.log10(t_hi), n)).astype(int))


def fit_power_law(series, window=None, t=None) -> PowerLawFit:
    """Fit series ~ C t^(-gamma) by least squares on log-spaced samples.

    ``series[k]`` belongs to time ``t[k]`` (default ``k + 1``). The window
    defaults to [100, T/10].
    """
    y = np.asarray(series, dtype=float)
    times = np.arange(1, y.size + 1) if t is None else np.asarray(t)
    if window is None:
        window = (100, times[-1] // 10)
    t_lo, t_hi = int(window[0]), int(window[1])
    if not 0 < t_lo < t_hi:
        raise ValueError(f"bad fit window [{t_lo}, {t_hi}]")
    wanted = log_spaced_times(t_lo, t_hi)
    idx = np.searchsorted(times, wanted)
    idx = np.unique(idx[(idx < times.size)])
    idx = idx[(times[idx] >= t_lo) & (times[idx] <= t_hi)]
    if idx.size < MIN_FIT_POINTS:
        raise ValueError(f"only {idx.size} samples in [{t_lo}, {t_hi}]; need {MIN_FIT_POINTS}")
    ys = y[idx]
    if np.any(~(ys > 0.0)):
        raise NonPositiveData("series has zero or negative values inside the fit window")
    res = linregress(np.log(times[idx]), np.log(ys))
    return PowerLawFit(
        gamma=float(-res.slope),
        intercept=float(res.intercept),
        stderr=float(res.stderr),
        r2=float(res.rvalue**2),
        t_lo=t_lo,
        t_hi=t_hi,
        n_points=int(idx.size),
    )


def stable_fixed_points(reality_map: RealityMap):
    """Stable, differentiable fixed points of a map (empty for a continuum)."""
    from .maps import FixedPointInfo

    pts = reality_map.fixed_points()
    if not isinstance(pts, list):
        return []
    return [f for f in pts if isinstance(f, FixedPointInfo) and f.stable]


TABLE1_MAPS = ("alpha=2", "alpha=1.5", "alpha=0.75", "alpha=0.5",
               "q(p)=const", "q(p)=1-p")


def format_table(labels, observed, predicted, digits=2) -> str:
    """Observed vs predicted exponents laid out as a three-row table."""
    def row(name, values):
        cells = [name] + [("%.*f" % (digits, v)) if v is not None else "-" for v in values]
        return cells

    rows = [["reality map"] + list(labels), row("observed gamma", observed),
            row("predicted gamma", predicted)]
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = [" | ".join(c.ljust(wd) for c, wd in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"
