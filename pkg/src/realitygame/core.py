"""Game state and the pari-mutuel wealth update.

Every player bets all of its wealth each round, a fraction ``s_i`` on heads
and ``1 - s_i`` on tails. The winning side splits the whole pool in
proportion to the individual wagers (no house take), so total wealth stays
at one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ZeroPool

CONSERVATION_TOL = 1e-12
UNDERFLOW_FLOOR = 1e-300


class Outcome(enum.Enum):
    HEADS = "heads"
    TAILS = "tails"

    @property
    def index(self) -> int:
        """Column of this outcome in a two-outcome bet matrix (heads first)."""
        return 0 if self is Outcome.HEADS else 1

    @classmethod
    def from_bool(cls, heads: bool) -> "Outcome":
        return cls.HEADS if heads else cls.TAILS


def _frozen(values, name) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PlayerPopulation:
    """Fixed-strategy players and their wealth shares.

    ``strategies[i]`` is the fraction of player i's wealth bet on heads and
    ``wealths`` sums to one. Both arrays are read-only.
    """

    strategies: np.ndarray
    wealths: np.ndarray

    def __post_init__(self):
        s = _frozen(self.strategies, "strategies")
        w = _frozen(self.wealths, "wealths")
        if s.size == 0:
            raise ValueError("population needs at least one player")
        if s.shape != w.shape:
            raise ValueError(
                f"{s.size} strategies but {w.size} wealths"
            )
        if np.any(~np.isfinite(s)) or np.any((s < 0) | (s > 1)):
            raise ValueError("strategies must lie in [0, 1]")
        if np.any(~np.isfinite(w)) or np.any((w < 0) | (w > 1)):
            raise ValueError("wealths must lie in [0, 1]")
        total = w.sum()
        if abs(total - 1.0) > CONSERVATION_TOL:
            raise ValueError(f"wealths sum to {total!r}, not 1")
        object.__setattr__(self, "strategies", s)
        object.__setattr__(self, "wealths", w)

    @classmethod
    def from_strategies(cls, strategies, wealths=None) -> "PlayerPopulation":
        """Build a population, defaulting to equal wealth 1/N."""
        s = np.asarray(strategies, dtype=float)
        if wealths is None:
            w = np.full(s.shape, 1.0 / s.size)
        else:
            w = np.asarray(wealths, dtype=float)
            w = w / w.sum()
        return cls(s, w)

    @classmethod
    def uniform_grid(cls, n: int) -> "PlayerPopulation":
        """N players on the open grid k/(N+1), k = 1..N, with equal wealth."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls.from_strategies(np.arange(1, n + 1) / (n + 1))

    @property
    def size(self) -> int:
        return self.strategies.size

    def with_wealths(self, wealths) -> "PlayerPopulation":
        return PlayerPopulation(self.strategies, wealths)

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"PlayerPopulation(N={self.size}, p={total_bet(self):.6g})"


@dataclass(frozen=True, eq=False)
class GeneralBetMatrix:
    """Bets of N players over L outcomes; row i sums to one."""

    bets: np.ndarray
    wealths: np.ndarray

    def __post_init__(self):
        b = np.array(self.bets, dtype=float)
        w = np.array(self.wealths, dtype=float)
        if b.ndim != 2 or b.shape[0] != w.size:
            raise ValueError("bets must be an N x L matrix matching wealths")
        if np.any(b < 0) or np.any(w < 0):
            raise ValueError("bets and wealths must be non-negative")
        if not np.allclose(b.sum(axis=1), 1.0, rtol=0, atol=CONSERVATION_TOL):
            raise ValueError("each player's bets must sum to 1")
        if abs(w.sum() - 1.0) > CONSERVATION_TOL:
            raise ValueError("wealths must sum to 1")
        b.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "bets", b)
        object.__setattr__(self, "wealths", w)

    @classmethod
    def from_population(cls, pop: PlayerPopulation) -> "GeneralBetMatrix":
        s = pop.strategies
        return cls(np.column_stack([s, 1.0 - s]), pop.wealths)


def total_bet(pop: PlayerPopulation) -> float:
    """Fraction of all wealth wagered on heads, p = sum_i s_i w_i."""
    return float(np.dot(pop.strategies, pop.wealths))


def _renormalize(w: np.ndarray) -> np.ndarray:
    w[w < UNDERFLOW_FLOOR] = 0.0
    return w / w.sum()


def apply_outcome(pop: PlayerPopulation, outcome: Outcome) -> PlayerPopulation:
    """Pay out the pool for a realized toss and return the new population.

    Heads gives ``w_i' = s_i w_i / p``, tails ``w_i' = (1 - s_i) w_i / (1 - p)``.
    Raises ZeroPool if nobody bet on the realized side.
    """
    s = pop.strategies
    stake = s if outcome is Outcome.HEADS else 1.0 - s
    wagers = stake * pop.wealths
    pool = wagers.sum()
    if not pool > 0.0:
        raise ZeroPool(
            f"no wealth was wagered on {outcome.value} "
            f"(p = {total_bet(pop)!r})"
        )
    return pop.with_wealths(_renormalize(wagers / pool))


def payoff_general(bets: GeneralBetMatrix, winning_l: int) -> np.ndarray:
    """Pari-mutuel payoffs for L outcomes when outcome ``winning_l`` (0-based) wins."""
    wagers = bets.bets[:, winning_l] * bets.wealths
    pool = wagers.sum()
    if not pool > 0.0:
        raise ZeroPool(f"outcome {winning_l} received no wager")
    return wagers / pool
