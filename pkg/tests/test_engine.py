import numpy as np
import pytest

from realitygame import analytics, engine, maps, rng
from realitygame.core import Outcome, PlayerPopulation
from realitygame.errors import ZeroPool


def _python_run(reality_map, pop, horizon, seed, run_index):
    gen = rng.stream(seed, run_index)
    ps, qs, heads = [], [], []
    for _ in range(horizon):
        pop, rec = engine.step(pop, reality_map, gen)
        ps.append(rec.p)
        qs.append(rec.q)
        heads.append(rec.outcome is Outcome.HEADS)
    return np.array(ps), np.array(qs), np.array(heads), pop


@pytest.mark.parametrize("reality_map", [
    maps.SelfDefeating(), maps.ArctanFamily(1.5), maps.Identity(), maps.Multimodal(),
    maps.TablePiecewiseLinear(np.array([0.0, 0.4, 1.0]), np.array([0.7, 0.2, 0.9])),
])
def test_kernel_matches_reference_loop(reality_map):
    pop = PlayerPopulation.uniform_grid(15)
    traj = engine.run(engine.RunConfig(reality_map, pop, 300, seed=4, run_index=2))
    p, q, heads, final = _python_run(reality_map, pop, 300, 4, 2)
    assert np.array_equal(traj.heads, heads)
    assert np.allclose(traj.p, p, rtol=0, atol=1e-12)
    assert np.allclose(traj.q, q, rtol=0, atol=1e-12)
    assert np.allclose(traj.final_population.wealths, final.wealths, atol=1e-12)
    assert np.allclose(traj.r, analytics.inefficiency(traj.p, traj.q), atol=1e-15)


def test_snapshots_and_restart():
    pop = PlayerPopulation.uniform_grid(29)
    q = maps.ArctanFamily(0.5)
    full = engine.run(engine.RunConfig(q, pop, 1000, seed=9, snapshot_stride=250))
    assert full.snapshot_times.tolist() == [0, 250, 500, 750, 1000]
    assert np.allclose(full.snapshots[0], pop.wealths)
    assert np.allclose(full.snapshots[-1], full.final_population.wealths)
    resumed = engine.run(engine.RunConfig(q, pop.with_wealths(full.snapshots[2]), 500,
                                          seed=9, start_toss=500))
    assert np.array_equal(resumed.heads, full.heads[500:])
    assert np.allclose(resumed.final_population.wealths, full.final_population.wealths,
                       atol=1e-12)
    assert resumed.rng_position == 1000


def test_runs_are_deterministic_and_streams_differ():
    pop = PlayerPopulation.uniform_grid(29)
    cfg = engine.RunConfig(maps.Identity(), pop, 500, seed=3)
    a, b = engine.run(cfg), engine.run(cfg)
    assert np.array_equal(a.p, b.p)
    c = engine.run(engine.RunConfig(maps.Identity(), pop, 500, seed=3, run_index=1))
    assert not np.array_equal(a.heads, c.heads)


def test_zero_pool_keeps_partial_trajectory():
    pop = PlayerPopulation.from_strategies([1.0, 1.0])
    with pytest.raises(ZeroPool) as info:
        engine.run(engine.RunConfig(maps.Constant(0.5), pop, 100, seed=0))
    traj = info.value.trajectory
    assert traj is not None and traj.steps < 100
    assert traj.heads.all()


def test_epsilon_player_switch():
    pop = PlayerPopulation.uniform_grid(29)
    off = engine.run(engine.RunConfig(maps.Constant(0.3), pop, 50, epsilon_player=False))
    assert not off.r.any()


def test_ensemble_matches_individual_runs_and_workers():
    pop = PlayerPopulation.uniform_grid(40)
    cfg = engine.RunConfig(maps.ArctanFamily(0.5), pop, 400, seed=11, record_wealth=False)
    seeds = range(20)
    one = engine.ensemble(cfg, seeds, workers=1, chunk=7)
    many = engine.ensemble(cfg, seeds, workers=4, chunk=5)
    for name in ("mean_p", "var_p", "mean_q", "mean_r", "var_r"):
        assert np.array_equal(getattr(one, name), getattr(many, name))
    r = np.stack([engine.run(engine.RunConfig(cfg.reality_map, pop, 400, seed=11,
                                              run_index=k)).r for k in seeds])
    assert np.allclose(one.mean_r, r.mean(axis=0), rtol=1e-12, atol=1e-18)
    assert np.allclose(one.var_r, r.var(axis=0), rtol=1e-9, atol=1e-18)
    assert one.n_runs == 20 and one.final_argmax.size == 20


def test_ensemble_rejects_bad_seeds():
    cfg = engine.RunConfig(maps.Identity(), PlayerPopulation.uniform_grid(3), 10)
    with pytest.raises(ValueError):
        engine.ensemble(cfg, [])
    with pytest.raises(ValueError):
        engine.ensemble(cfg, [1, 1])


def test_identity_wealth_is_a_martingale():
    # With q = p every wealth share is a martingale, so each player's
    # average final share equals the initial share.
    w0 = np.array([0.1, 0.2, 0.3, 0.4])
    pop = PlayerPopulation.from_strategies([0.2, 0.4, 0.6, 0.8], w0)
    finals = np.stack([engine.run(engine.RunConfig(maps.Identity(), pop, 200, seed=1,
                                                   run_index=k)).final_population.wealths
                       for k in range(4000)])
    se = finals.std(axis=0) / np.sqrt(finals.shape[0])
    assert np.all(np.abs(finals.mean(axis=0) - w0) < 4 * se)


def test_rational_player_run():
    pop = PlayerPopulation.from_strategies([0.5])
    traj = engine.run(engine.RunConfig(maps.ArctanFamily(2.0), pop, 20, seed=0,
                                       rational_wealth=0.6, snapshot_stride=10))
    assert traj.rational_strategy.shape == (20,)
    assert abs(traj.rational_strategy[0] - 0.5) > 0.2
    assert traj.rational_wealth[0] == 0.6
    assert traj.snapshots.shape == (3, 2)
    assert np.allclose(traj.snapshots.sum(axis=1), 1.0)
    low = engine.run(engine.RunConfig(maps.ArctanFamily(2.0), pop, 5, rational_wealth=0.2))
    assert np.allclose(low.rational_strategy, 0.5, atol=1e-6)


def test_rng_positions():
    whole = rng.uniforms(5, 7, 20)
    for start in (0, 1, 3, 4, 9):
        assert np.array_equal(rng.uniforms(5, 7, 20 - start, start), whole[start:])
    with pytest.raises(ValueError):
        rng.stream(-1)
    with pytest.raises(ValueError):
        rng.stream(0, 2**64)
    rng.stream(2**64 - 1, 2**64 - 1)
