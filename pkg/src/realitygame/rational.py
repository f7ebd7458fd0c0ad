"""Myopic log-optimal ("rational") players.

A rational player holding wealth share ``w`` bets a fraction ``s`` on heads
against a fixed population holding the remaining ``1 - w``. Its bet moves
the total wager to ``p = p_fixed + w s`` and through the reality map moves
the bias ``q(p)`` as well, so its expected one-step log-return

    r(s) = q log(s / p) + (1 - q) log((1 - s) / (1 - p))

is not the Kelly objective of a price taker unless ``w = 0``. With ``w = 0``
(the epsilon player) the optimum is ``s = q`` and the optimal return is
KL(q || p), which is what the package uses to measure inefficiency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .core import PlayerPopulation, total_bet
from .errors import DomainError, NotDifferentiable
from .maps import RealityMap

GRID_POINTS = 10_000
GRAD_TOL = 1e-10
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RationalContext:
    """A rational player with share ``w`` facing ``opponents``.

    ``opponents.wealths`` sums to one and is scaled by ``1 - w`` inside the
    joint game.
    """

    opponents: PlayerPopulation
    w: float
    reality_map: RealityMap

    def __post_init__(self):
        if not 0.0 <= self.w < 1.0:
            raise ValueError(f"rational wealth must lie in [0, 1), got {self.w}")

    @property
    def p_fixed(self) -> float:
        return (1.0 - self.w) * total_bet(self.opponents)

    def total_bet(self, s):
        return self.p_fixed + self.w * np.asarray(s, dtype=float)


class Optimum(NamedTuple):
    strategies: tuple
    value: float


@dataclass(frozen=True, eq=False)
class LogReturnCurve:
    s: np.ndarray
    r: np.ndarray
    maxima: Optimum
    w: float


def _check_s(s):
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr > 0.0) | ~(arr < 1.0)):
        raise DomainError(f"strategy must lie strictly inside (0, 1), got {s!r}")
    return arr


def _scalar(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def expected_log_return(ctx: RationalContext, s):
    arr = _check_s(s)
    p = np.clip(ctx.total_bet(arr), 0.0, 1.0)
    q = ctx.reality_map.evaluate(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.log(arr / p)
        down = np.log((1.0 - arr) / (1.0 - p))
        r = q * up + (1.0 - q) * down
        # q = 0 or 1 kills one term even where its log diverges
        r = np.where(q == 0.0, down, np.where(q == 1.0, up, r))
    return _scalar(r, s)


def log_return_derivative(ctx: RationalContext, s):
    """dr/ds including the feedback of the player's own bet on p and q."""
    arr = _check_s(s)
    w = ctx.w
    p = np.clip(ctx.total_bet(arr), 0.0, 1.0)
    q = ctx.reality_map.evaluate(p)
    d = q / arr - (1.0 - q) / (1.0 - arr)
    if w > 0.0:
        dq = ctx.reality_map.slope(p)
        d = (d
             + dq * w * (np.log(arr) - np.log(p) - np.log1p(-arr) + np.log1p(-p))
             - q * w / p + (1.0 - q) * w / (1.0 - p))
    return _scalar(d, s)


def second_derivative_at_equilibrium(reality_map: RealityMap, w: float, s: float) -> float:
    """d2r/ds2 at a fixed point s = q = p of the map."""
    mu = reality_map.slope(s)
    return (1.0 - w) / (s * (1.0 - s)) * (2.0 * w * mu - (1.0 + w))


def _refine(ctx, lo, hi):
    """Locate the maximum of r on [lo, hi] by bisection on dr/ds."""
    try:
        dlo = log_return_derivative(ctx, lo)
        dhi = log_return_derivative(ctx, hi)
    except NotDifferentiable:
        dlo = dhi = np.nan
    if dlo > 0 and dhi < 0:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            try:
                dm = log_return_derivative(ctx, mid)
            except NotDifferentiable:
                break
            if abs(dm) < GRAD_TOL or hi - lo < 1e-15:
                return mid
            if dm > 0:
                lo = mid
            else:
                hi = mid
    res = minimize_scalar(lambda x: -expected_log_return(ctx, x),
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x)


def optimal_strategy(ctx: RationalContext, grid: int = GRID_POINTS) -> Optimum:
    """Global maximizer(s) of r(s) on (0, 1).

    Scans a uniform grid first, since r(s) can be bimodal, then refines each
    local grid maximum. All maxima within ``TIE_TOL`` of the best are
    returned, sorted ascending.
    """
    s = np.arange(1, grid + 1) / (grid + 1)
    r = expected_log_return(ctx, s)
    left = np.concatenate([[-np.inf], r[:-1]])
    right = np.concatenate([r[1:], [-np.inf]])
    peaks = np.nonzero((r >= left) & (r >= right) & ((r > left) | (r > right)))[0]
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(r))])

    edge = 1e-12
    candidates = []
    for i in peaks:
        lo = s[i - 1] if i > 0 else edge
        hi = s[i + 1] if i < grid - 1 else 1.0 - edge
        x = _refine(ctx, lo, hi)
        rx = expected_log_return(ctx, x)
        if rx < r[i]:
            x, rx = float(s[i]), float(r[i])
        candidates.append((x, rx))

    best = max(v for _, v in candidates)
    tied = sorted(x for x, v in candidates if v >= best - TIE_TOL)
    unique = [tied[0]]
    for x in tied[1:]:
        if x - unique[-1] > 1e-9:
            unique.append(x)
    return Optimum(tuple(float(x) for x in unique), float(best))


def log_return_curve(ctx: RationalContext, points: int = 999,
                     grid: int = GRID_POINTS) -> LogReturnCurve:
    s = np.arange(1, points + 1) / (points + 1)
    return LogReturnCurve(s, expected_log_return(ctx, s),
                          optimal_strategy(ctx, grid), ctx.w)


def equilibrium_stability(reality_map: RealityMap, w: float, fixed_point: float) -> bool:
    """Whether playing the fixed point stays optimal for a player of wealth ``w``.

    True iff 2 w q'(p) - (1 + w) < 0 at the fixed point.
    """
    if not 0.0 <= w < 1.0:
        raise ValueError("w must lie in [0, 1)")
    mu = reality_map.slope(fixed_point)
    return 2.0 * w * mu - (1.0 + w) < 0.0


def stability_threshold(reality_map: RealityMap, fixed_point: float):
    """Wealth above which the fixed point stops being optimal, or None if never."""
    mu = reality_map.slope(fixed_point)
    if mu <= 1.0:
        return None
    return 1.0 / (2.0 * mu - 1.0)


def centre_is_optimal(reality_map: RealityMap, w: float, opponent_strategy: float = 0.5,
                      grid: int = GRID_POINTS, tol: float = 1e-6) -> bool:
    """Whether the best reply to a single fixed opponent is to copy its bet."""
    opp = PlayerPopulation.from_strategies([opponent_strategy])
    best = optimal_strategy(RationalContext(opp, w, reality_map), grid)
    return len(best.strategies) == 1 and abs(best.strategies[0] - opponent_strategy) < tol


def stability_flip_wealth(reality_map: RealityMap, opponent_strategy: float = 0.5,
                          lo: float = 0.0, hi: float = 0.99, tol: float = 1e-3,
                          grid: int = GRID_POINTS) -> float:
    """Bisect on w for the wealth where the best reply leaves the opponent's bet.

    Uses the numerical optimizer only, so it is an independent check on
    :func:`stability_threshold`.
    """
    if not centre_is_optimal(reality_map, lo, opponent_strategy, grid):
        raise ValueError("the opponent's bet is not optimal at the lower bracket")
    if centre_is_optimal(reality_map, hi, opponent_strategy, grid):
        raise ValueError("the opponent's bet is still optimal at the upper bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if centre_is_optimal(reality_map, mid, opponent_strategy, grid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def epsilon_horizon_return(r_series) -> float:
    """Best expected log-return over a horizon for a player of negligible wealth.

    Such a player cannot move p, so the horizon optimum is the sum of the
    one-step optima, i.e. of the per-toss KL(q || p) values.
    """
    return float(np.sum(r_series))
