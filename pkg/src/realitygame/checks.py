"""Acceptance checks shared by ``realitygame verify`` and the test suite.

Each check returns :class:`CheckResult` lines. ``full=True`` runs at the
sizes the criteria name; ``full=False`` shrinks ensembles and horizons so
the whole suite finishes in a few minutes, keeping every tolerance as is.
"""

from __future__ import annotations

import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats as sps

from . import analytics, engine, maps, rational
from .core import CONSERVATION_TOL, Outcome, PlayerPopulation, apply_outcome
from .errors import ZeroPool


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.criterion}. {self.name}: {self.detail}"


def _runs(reality_map, pop, horizon, n_runs, seed, workers=None, record_wealth=False):
    """Single runs with their trajectories, in run-index order."""
    def one(k):
        return engine.run(engine.RunConfig(reality_map, pop, horizon, seed=seed,
                                           run_index=k, record_wealth=record_wealth,
                                           snapshot_stride=horizon))

    workers = engine.default_workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(n_runs)))
    return [one(k) for k in range(n_runs)]


# 1. exponents

EXPONENT_BOUNDS = (
    ("q(p)=const", maps.Constant(0.5), (0.90, 1.10)),
    ("q(p)=1-p", maps.SelfDefeating(), (0.90, 1.15)),
    ("alpha=0.5", maps.ArctanFamily(0.5), (0.40, 0.60)),
    ("alpha=1.5", maps.ArctanFamily(1.5), (0.12, 0.32)),
    ("alpha=2", maps.ArctanFamily(2.0), (0.05, 0.60)),
    ("alpha=0.75", maps.ArctanFamily(0.75), (0.05, 0.60)),
)


def check_exponents(full=True, seed=0, workers=None):
    n_runs = 256 if full else 64
    pop = PlayerPopulation.uniform_grid(3000)
    out = []
    for label, reality_map, (lo, hi) in EXPONENT_BOUNDS:
        cfg = engine.RunConfig(reality_map, pop, 10_000, seed=seed, record_wealth=False)
        st = engine.ensemble(cfg, range(n_runs), workers=workers)
        fit = analytics.fit_power_law(st.mean_r)
        ok = lo <= fit.gamma <= hi
        out.append(CheckResult(1, f"exponent {label}", ok,
                               f"gamma_hat = {fit.gamma:.3f} (+/- {fit.stderr:.3f}), "
                               f"bounds [{lo}, {hi}], {st.n_runs} runs"))
    return out


# 2. fixed-point convergence

def check_convergence(full=True, seed=0, workers=None):
    out = []
    pop = PlayerPopulation.uniform_grid(29)

    trajs = _runs(maps.SelfDefeating(), pop, 2000, 100, seed, workers)
    frac = np.mean([abs(t.final_q - 0.5) <= 0.05 for t in trajs])
    out.append(CheckResult(2, "self-defeating settles at 1/2", frac >= 0.95,
                           f"{frac:.0%} of 100 runs within 0.05 at T = 2000"))

    trajs = _runs(maps.ArctanFamily(1.5), pop, 2000, 100, seed, workers)
    frac = np.mean([min(t.final_q, 1.0 - t.final_q) <= 0.1 for t in trajs])
    out.append(CheckResult(2, "alpha=1.5 locks in at 0 or 1", frac >= 0.95,
                           f"{frac:.0%} of 100 runs within 0.1 at T = 2000"))

    horizon = 100_000 if full else 20_000
    trajs = _runs(maps.Identity(), pop, horizon, 100, seed, workers)
    grid = pop.strategies
    near = [np.min(np.abs(grid - t.final_q)) <= 0.05 for t in trajs]
    frac = np.mean(near)
    out.append(CheckResult(2, "identity ends at a strategy", frac >= 0.95,
                           f"{frac:.0%} of 100 runs within 0.05 at T = {horizon}"))
    return out


# 3. closed form for q(p) = p

TV_BINS = 10


def check_closed_form(full=True, seed=0, workers=None):
    t, n_runs = 1000, 10_000
    pop = PlayerPopulation.uniform_grid(29)
    trajs = _runs(maps.Identity(), pop, t, n_runs, seed, workers)
    counts = np.array([tr.heads_count for tr in trajs])
    dist = analytics.subjective_heads_distribution(pop, t)
    edges = np.histogram_bin_edges(np.arange(t + 1), bins=TV_BINS)
    sim, _ = np.histogram(counts, bins=edges)
    exact, _ = np.histogram(dist.m, bins=edges, weights=dist.probabilities)
    tv = 0.5 * np.abs(sim / n_runs - exact).sum()
    out = [CheckResult(3, "heads-count histogram", tv < 0.02,
                       f"TV = {tv:.4f} over {TV_BINS} bins, {n_runs} runs, t = {t}")]

    worst = 0.0
    for tr in trajs[: (n_runs if full else 1000)]:
        w = analytics.subjective_wealth_given_heads(pop, tr.heads_count, t)
        worst = max(worst, float(np.max(np.abs(w - tr.final_population.wealths))))
    out.append(CheckResult(3, "terminal wealth closed form", worst <= 1e-10,
                           f"max |w - closed form| = {worst:.2e}"))
    return out


# 4. equal domination

def check_domination(full=True, seed=0, workers=None):
    n_players = 29
    n_runs, horizon = (2900, 100_000) if full else (580, 20_000)
    pop = PlayerPopulation.uniform_grid(n_players)
    cfg = engine.RunConfig(maps.Identity(), pop, horizon, seed=seed, record_wealth=False)
    st = engine.ensemble(cfg, range(n_runs), workers=workers)
    freq = np.bincount(st.final_argmax, minlength=n_players)
    chi2, pval = sps.chisquare(freq)
    return [CheckResult(4, "uniform domination", pval >= 0.01,
                        f"chi2 = {chi2:.1f}, p = {pval:.3f}, {st.n_runs} runs, T = {horizon}, "
                        f"median top share {np.median(st.final_max_wealth):.4f}")]


# 5. rational player

def check_rational(full=True, seed=0, workers=None):
    q = maps.ArctanFamily(2.0)
    opp = PlayerPopulation.from_strategies([0.5])
    out = []
    low = rational.optimal_strategy(rational.RationalContext(opp, 0.2, q))
    ok = len(low.strategies) == 1 and abs(low.strategies[0] - 0.5) < 1e-6
    out.append(CheckResult(5, "w = 0.2 copies the centre", ok, f"s* = {low.strategies}"))

    high = rational.optimal_strategy(rational.RationalContext(opp, 0.6, q))
    s = high.strategies
    ok = (len(s) == 2 and abs(s[0] + s[1] - 1.0) < 1e-6 and abs(s[0] - 0.5) > 1e-3
          and high.value > 0)
    out.append(CheckResult(5, "w = 0.6 splits symmetrically", ok,
                           f"s* = {tuple(round(x, 6) for x in s)}, r* = {high.value:.5f}"))

    flip = rational.stability_flip_wealth(q, 0.5)
    out.append(CheckResult(5, "stability flip", abs(flip - 1.0 / 3.0) <= 0.01,
                           f"w_flip = {flip:.4f} (threshold 1/3)"))
    return out


# 6. property suites

def conservation_worst(n_steps, seed=0):
    """Largest |sum w - 1| after single random steps on random populations."""
    rng = np.random.default_rng([seed, 6])
    worst = 0.0
    done = 0
    while done < n_steps:
        n = int(rng.integers(1, 50))
        pop = PlayerPopulation.from_strategies(rng.random(n), rng.dirichlet(np.ones(n)))
        for _ in range(100):
            heads = rng.random() < 0.5
            try:
                pop = apply_outcome(pop, Outcome.from_bool(heads))
            except ZeroPool:
                break
            worst = max(worst, abs(pop.wealths.sum() - 1.0))
            done += 1
    return worst


def gradient_worst(seed=0, n=2000):
    """Largest relative gap between dr/ds and a central difference."""
    rng = np.random.default_rng([seed, 7])
    h = 1e-6
    worst = 0.0
    for _ in range(n):
        alpha = float(rng.uniform(0.3, 3.0))
        w = float(rng.uniform(0.0, 0.9))
        ctx = rational.RationalContext(
            PlayerPopulation.from_strategies([rng.uniform(0.05, 0.95)]), w,
            maps.ArctanFamily(alpha))
        s = float(rng.uniform(0.01, 0.99))
        fd = (rational.expected_log_return(ctx, s + h)
              - rational.expected_log_return(ctx, s - h)) / (2 * h)
        d = rational.log_return_derivative(ctx, s)
        worst = max(worst, abs(d - fd) / max(abs(d), 1.0))
    return worst


def drift_slope(reality_map, n_runs, seed=0, n_players=3000, horizon=5000, t_lo=500):
    """Regression slope of observed one-step changes of p on (q - p) / t."""
    pop = PlayerPopulation.uniform_grid(n_players)
    x_all, y_all = [], []
    for k in range(n_runs):
        tr = engine.run(engine.RunConfig(reality_map, pop, horizon, seed=seed, run_index=k,
                                         record_wealth=False, epsilon_player=False))
        i = np.arange(t_lo, horizon - 1)
        x_all.append(analytics.gaussian_drift(tr.p[i], tr.q[i], i))
        y_all.append(tr.p[i + 1] - tr.p[i])
    x, y = np.concatenate(x_all), np.concatenate(y_all)
    b = float(x @ y / (x @ x))
    resid = y - b * x
    se = float(np.sqrt(resid @ resid / (x.size - 1) / (x @ x)))
    return b, se


def shuffle_worst(seed=0, trials=200):
    """Largest gap between simulated wealth under shuffled outcomes and the closed form."""
    rng = np.random.default_rng([seed, 8])
    pop0 = PlayerPopulation.uniform_grid(29)
    worst = 0.0
    for _ in range(trials):
        t = int(rng.integers(1, 400))
        seq = rng.random(t) < rng.random()
        m = int(seq.sum())
        ref = analytics.subjective_wealth_given_heads(pop0, m, t)
        for _ in range(2):
            pop = pop0
            for h in rng.permutation(seq):
                pop = apply_outcome(pop, Outcome.from_bool(bool(h)))
            worst = max(worst, float(np.max(np.abs(pop.wealths - ref))))
    return worst


def check_properties(full=True, seed=0, workers=None):
    out = []
    n_steps = 1_000_000 if full else 100_000
    worst = conservation_worst(n_steps, seed)
    out.append(CheckResult(6, "wealth conservation", worst <= CONSERVATION_TOL,
                           f"max |sum w - 1| = {worst:.1e} over {n_steps} steps"))

    pop = PlayerPopulation.uniform_grid(200)
    lowest, finite = np.inf, True
    for m in (maps.Constant(0.3), maps.SelfDefeating(), maps.ArctanFamily(0.5),
              maps.ArctanFamily(1.5), maps.Identity(), maps.Multimodal()):
        for tr in _runs(m, pop, 2000, 20, seed, workers):
            finite &= bool(np.isfinite(tr.r).all())
            lowest = min(lowest, float(tr.r.min()))
    out.append(CheckResult(6, "KL non-negativity", finite and lowest >= 0.0,
                           f"min r_t = {lowest:.3e}, all finite = {finite}, "
                           f"6 maps x 20 runs"))

    worst = gradient_worst(seed)
    out.append(CheckResult(6, "dr/ds vs finite difference", worst <= 1e-5,
                           f"max relative gap = {worst:.1e}"))

    n_runs = 400 if full else 100
    for m in (maps.Constant(0.5), maps.ArctanFamily(0.5)):
        b, se = drift_slope(m, n_runs, seed)
        out.append(CheckResult(6, f"drift law ({m.name})", abs(b - 1.0) <= 0.1,
                               f"slope = {b:.3f} +/- {se:.3f}, t in [500, 5000), {n_runs} runs"))

    worst = shuffle_worst(seed)
    out.append(CheckResult(6, "shuffle invariance", worst <= 1e-10,
                           f"max gap = {worst:.1e}"))
    return out


# 7. determinism

def check_determinism(full=True, seed=0, workers=None):
    from .experiments import run_experiment
    from .specfile import parse_spec

    specs = {
        "bias": "kind = bias-dynamics\nmap = arctan\nalpha = 1.5\nensemble = 16\n",
        "wealth": "kind = wealth-dynamics\nmap = multimodal\nensemble = 8\n",
        "inefficiency": ("kind = inefficiency\nmap = arctan\nalpha = 0.5\nn_players = 500\n"
                         "horizon = 4000\nensemble = 32\n"),
    }
    out = []
    with tempfile.TemporaryDirectory() as tmp:
        for name, text in specs.items():
            spec = parse_spec(text)
            spec.seed = seed
            a = run_experiment(spec, Path(tmp) / f"{name}-1", workers=1)
            b = run_experiment(spec, Path(tmp) / f"{name}-8", workers=8)
            files = sorted(p.name for p in a.glob("*.csv"))
            same = bool(files) and all(
                (a / f).read_bytes() == (b / f).read_bytes() for f in files)
            out.append(CheckResult(7, f"byte-identical CSVs ({name})", same,
                                   f"{len(files)} CSV file(s), 1 vs 8 workers"))
    return out


CHECKS = (check_exponents, check_convergence, check_closed_form, check_domination,
          check_rational, check_properties, check_determinism)


def run_all(full=False, seed=0, workers=None, echo=None):
    results = []
    for check in CHECKS:
        for res in check(full=full, seed=seed, workers=workers):
            results.append(res)
            if echo:
                echo(res.line())
    return results
