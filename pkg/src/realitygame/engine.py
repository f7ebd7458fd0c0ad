"""Seeded single runs and ensembles of the reality game.

A run is a pure function of its :class:`RunConfig`: the toss variates come
from the Philox stream keyed by ``(seed, run_index)`` (see
:mod:`realitygame.rng`), one variate per toss, heads when ``u < q``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernel, rng
from .core import Outcome, PlayerPopulation, apply_outcome, total_bet
from .errors import ZeroPool
from .maps import RealityMap

DEFAULT_STRIDE = 100
WORKERS_ENV = "REALITYGAME_WORKERS"


@dataclass(frozen=True)
class StepRecord:
    p: float
    q: float
    outcome: Outcome


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run.

    ``start_toss`` positions the random stream, so a run restarted from a
    wealth snapshot taken at toss t reproduces the rest of the original run.
    With ``rational_wealth`` set, a myopic log-optimal player holding that
    initial share joins the game and re-optimizes before every toss.
    """

    reality_map: RealityMap
    population: PlayerPopulation
    horizon: int
    seed: int = 0
    run_index: int = 0
    snapshot_stride: int = DEFAULT_STRIDE
    record_wealth: bool = True
    epsilon_player: bool = True
    start_toss: int = 0
    rational_wealth: float | None = None
    rational_grid: int = 2000

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")
        if self.rational_wealth is not None and not 0.0 < self.rational_wealth < 1.0:
            raise ValueError("rational_wealth must lie in (0, 1)")


@dataclass(eq=False)
class Trajectory:
    """Per-toss record of a run.

    ``p[t]``, ``q[t]`` and ``r[t]`` describe the state just before toss
    ``t + 1`` and ``heads[t]`` is that toss's result. ``r`` is the expected
    log-return of an infinitesimal rational observer, KL(q || p); it is all
    zeros when the observer is switched off. ``snapshot_times[k]`` is the
    number of tosses played when ``snapshots[k]`` was taken.
    """

    config: RunConfig
    p: np.ndarray
    q: np.ndarray
    heads: np.ndarray
    r: np.ndarray
    snapshot_times: np.ndarray
    snapshots: np.ndarray
    final_population: PlayerPopulation
    rng_position: int
    rational_strategy: np.ndarray | None = None
    rational_wealth: np.ndarray | None = None

    @property
    def steps(self) -> int:
        return self.p.size

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.steps + 1)

    @property
    def heads_count(self) -> int:
        return int(self.heads.sum())

    @property
    def final_q(self) -> float:
        return float(self.config.reality_map.evaluate(total_bet(self.final_population)))


@dataclass(eq=False)
class EnsembleStats:
    """Per-toss means and (population) variances across an ensemble.

    Runs that hit an empty pool are dropped; their messages sit in ``failed``.
    The ``final_*`` arrays hold one entry per successful run, in seed order.
    """

    seeds: list
    mean_p: np.ndarray
    var_p: np.ndarray
    mean_q: np.ndarray
    var_q: np.ndarray
    mean_r: np.ndarray
    var_r: np.ndarray
    n_runs: int
    failed: dict = field(default_factory=dict)
    final_max_wealth: np.ndarray | None = None
    final_argmax: np.ndarray | None = None
    final_q: np.ndarray | None = None
    heads_count: np.ndarray | None = None

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.mean_r.size + 1)


def step(pop: PlayerPopulation, reality_map: RealityMap, generator=None,
         outcome: Outcome | None = None):
    """One toss. Draws a single uniform from ``generator`` unless ``outcome`` is forced."""
    p = total_bet(pop)
    q = reality_map.evaluate(min(max(p, 0.0), 1.0))
    if outcome is None:
        outcome = Outcome.from_bool(generator.random() < q)
    return apply_outcome(pop, outcome), StepRecord(p, q, outcome)


def run(config: RunConfig) -> Trajectory:
    if config.rational_wealth is not None:
        return _run_with_rational(config)
    pop = config.population
    code, a, xs, ys = config.reality_map.kernel_params()
    u = rng.uniforms(config.seed, config.run_index, config.horizon, config.start_toss)
    p, q, heads, r, snaps, w, failed_at = _kernel.simulate(
        pop.strategies, np.array(pop.wealths), code, a, xs, ys, u,
        config.snapshot_stride, config.record_wealth)
    if not config.epsilon_player:
        r = np.zeros_like(r)

    steps = config.horizon if failed_at < 0 else failed_at
    n_snap = snaps.shape[0] if failed_at < 0 else steps // config.snapshot_stride + 1
    snaps = snaps[:n_snap] if config.record_wealth else snaps
    traj = Trajectory(
        config=config,
        p=p[:steps], q=q[:steps], heads=heads[:steps], r=r[:steps],
        snapshot_times=np.arange(snaps.shape[0]) * config.snapshot_stride,
        snapshots=snaps,
        final_population=pop.with_wealths(w) if failed_at < 0 else (
            pop.with_wealths(snaps[-1]) if snaps.shape[0] else pop),
        rng_position=config.start_toss + steps,
    )
    if failed_at >= 0:
        side = "heads" if u[failed_at] < q[failed_at] else "tails"
        raise ZeroPool(
            f"run (seed={config.seed}, run_index={config.run_index}) stopped at "
            f"toss {config.start_toss + failed_at + 1}: no wager on {side}",
            trajectory=traj,
        )
    return traj


def _run_with_rational(config: RunConfig) -> Trajectory:
    from .rational import RationalContext, optimal_strategy

    fixed = config.population
    gen = rng.stream(config.seed, config.run_index, config.start_toss)
    w_rat = config.rational_wealth
    w_fixed = np.array(fixed.wealths)
    steps = config.horizon
    p_out, q_out, r_out = np.empty(steps), np.empty(steps), np.empty(steps)
    heads_out = np.zeros(steps, dtype=bool)
    s_out, w_out = np.empty(steps), np.empty(steps)
    snaps, times = [], []
    for t in range(steps):
        opponents = fixed.with_wealths(w_fixed)
        ctx = RationalContext(opponents, w_rat, config.reality_map)
        s_rat = optimal_strategy(ctx, grid=config.rational_grid).strategies[0]
        joint = PlayerPopulation(np.append(fixed.strategies, s_rat),
                                 np.append((1.0 - w_rat) * w_fixed, w_rat))
        if config.record_wealth and t % config.snapshot_stride == 0:
            snaps.append(np.array(joint.wealths))
            times.append(t)
        try:
            joint, rec = step(joint, config.reality_map, gen)
        except ZeroPool as exc:
            raise ZeroPool(f"toss {config.start_toss + t + 1}: {exc}") from exc
        p_out[t], q_out[t] = rec.p, rec.q
        heads_out[t] = rec.outcome is Outcome.HEADS
        r_out[t] = _kernel.kl_bernoulli(rec.q, rec.p) if config.epsilon_player else 0.0
        s_out[t], w_out[t] = s_rat, w_rat
        w_rat = float(joint.wealths[-1])
        rest = joint.wealths[:-1]
        w_fixed = rest / rest.sum() if rest.sum() > 0 else rest
        if w_rat >= 1.0:
            w_rat = 1.0 - 1e-15
    if config.record_wealth and steps % config.snapshot_stride == 0:
        snaps.append(np.append((1.0 - w_rat) * w_fixed, w_rat))
        times.append(steps)
    final = PlayerPopulation(np.append(fixed.strategies, s_out[-1]),
                             np.append((1.0 - w_rat) * w_fixed, w_rat))
    return Trajectory(
        config=config, p=p_out, q=q_out, heads=heads_out, r=r_out,
        snapshot_times=np.array(times, dtype=int),
        snapshots=np.array(snaps) if snaps else np.zeros((0, fixed.size + 1)),
        final_population=final,
        rng_position=config.start_toss + steps,
        rational_strategy=s_out, rational_wealth=w_out,
    )


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def _ensemble_member(config: RunConfig, seed: int):
    cfg = replace(config, run_index=int(seed), record_wealth=False)
    try:
        traj = run(cfg)
    except ZeroPool as exc:
        return seed, None, str(exc)
    return seed, traj, None


def ensemble(config: RunConfig, seeds, workers: int | None = None,
             chunk: int = 64) -> EnsembleStats:
    """Run one member per entry of ``seeds`` and aggregate per-toss statistics.

    Member k draws from the stream keyed ``(config.seed, seeds[k])``. Results
    are folded in seed order, so the output does not depend on ``workers``.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("seeds must be nonempty")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    workers = default_workers() if workers is None else max(1, int(workers))

    steps = config.horizon
    mean = np.zeros((3, steps))
    m2 = np.zeros((3, steps))
    n_ok = 0
    failed = {}
    finals = {"max": [], "argmax": [], "q": [], "heads": []}

    def fold(results):
        nonlocal n_ok
        for seed, traj, err in results:
            if traj is None:
                failed[seed] = err
                continue
            block = np.stack([traj.p, traj.q, traj.r])
            n_ok += 1
            delta = block - mean
            mean[...] += delta / n_ok
            m2[...] += delta * (block - mean)
            w = traj.final_population.wealths
            finals["max"].append(float(w.max()))
            finals["argmax"].append(int(np.argmax(w)))
            finals["q"].append(traj.final_q)
            finals["heads"].append(traj.heads_count)

    if workers == 1:
        for start in range(0, len(seeds), chunk):
            fold([_ensemble_member(config, s) for s in seeds[start:start + chunk]])
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for start in range(0, len(seeds), chunk):
                part = seeds[start:start + chunk]
                fold(list(pool.map(lambda s: _ensemble_member(config, s), part)))

    if n_ok == 0:
        raise ZeroPool(f"every ensemble member failed: {failed}")
    var = np.maximum(m2 / n_ok, 0.0)
    return EnsembleStats(
        seeds=seeds,
        mean_p=mean[0], var_p=var[0],
        mean_q=mean[1], var_q=var[1],
        mean_r=mean[2], var_r=var[2],
        n_runs=n_ok, failed=failed,
        final_max_wealth=np.array(finals["max"]),
        final_argmax=np.array(finals["argmax"], dtype=int),
        final_q=np.array(finals["q"]),
        heads_count=np.array(finals["heads"], dtype=int),
    )
