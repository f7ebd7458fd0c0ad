"""The purely subjective game, q(p) = p, has a closed form.

Because every toss just multiplies player i's wealth by s_i or 1 - s_i (up
to a common factor), the wealth after m heads in t tosses does not depend
on their order. The heads count is then a wealth-weighted mixture of
binomials. We compare it with simulation and check that every strategy is
equally likely to end up with all the money.
"""

import numpy as np
from scipy.stats import chisquare

from realitygame import analytics, engine, maps
from realitygame.core import PlayerPopulation

pop = PlayerPopulation.uniform_grid(29)
t = 1000

dist = analytics.subjective_heads_distribution(pop, t)
peaks = dist.local_maxima()
print(f"{peaks.size} peaks in P_m at t = {t}, first few m: {peaks[:5]}")

runs = [engine.run(engine.RunConfig(maps.Identity(), pop, t, seed=1, run_index=k,
                                    record_wealth=False)) for k in range(3000)]
counts = np.array([r.heads_count for r in runs])
edges = np.linspace(0, t, 11)
sim = np.histogram(counts, edges)[0] / counts.size
exact = np.histogram(dist.m, edges, weights=dist.probabilities)[0]
print("decile  simulated  exact")
for i in range(10):
    print(f"{i:6d}  {sim[i]:9.4f}  {exact[i]:.4f}")

# the wealth itself matches the closed form run by run
gap = max(np.abs(analytics.subjective_wealth_given_heads(pop, r.heads_count, t)
                 - r.final_population.wealths).max() for r in runs)
print(f"largest wealth gap vs closed form: {gap:.1e}")

# domination: who owns most of the wealth after a long game
cfg = engine.RunConfig(maps.Identity(), pop, 20_000, seed=2, record_wealth=False)
st = engine.ensemble(cfg, range(580))
freq = np.bincount(st.final_argmax, minlength=29)
print("winners per strategy:", freq.tolist())
print("chi-square vs uniform: p = %.3f" % chisquare(freq).pvalue)
