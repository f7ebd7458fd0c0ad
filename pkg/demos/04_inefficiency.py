"""How fast does the game become efficient?

An infinitesimal rational observer can earn KL(q || p) per toss. Averaged
over many games this decays like t^-gamma, and gamma depends only on the
slope of the map at the attracting fixed point. This demo runs a smaller
version of the exponent table (N = 1000, 64 games each) and prints fitted
against predicted exponents. Use `realitygame table1` with
demos/specs/table1.spec for the full-size run.
"""

from pathlib import Path

import numpy as np

from realitygame import analytics, engine
from realitygame.core import PlayerPopulation
from realitygame.experiments import TABLE1_SPECS, predicted_gamma
from realitygame.svg import Axes, Series, render_svg

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

pop = PlayerPopulation.uniform_grid(1000)
labels, observed, predicted, series = [], [], [], []
for label, q in TABLE1_SPECS:
    cfg = engine.RunConfig(q, pop, 10_000, seed=7, record_wealth=False)
    st = engine.ensemble(cfg, range(64))
    fit = analytics.fit_power_law(st.mean_r)
    labels.append(label)
    observed.append(fit.gamma)
    predicted.append(predicted_gamma(q))
    keep = st.mean_r > 0
    series.append(Series(label, st.t[keep], st.mean_r[keep]))

print(analytics.format_table(labels, observed, predicted))
(OUT / "inefficiency.svg").write_text(render_svg(
    series, Axes(title="mean inefficiency", xlabel="t", ylabel="KL(q || p)",
                 xlog=True, ylog=True)))

# near the fixed point the KL is quadratic (interior) or linear (boundary)
# in the distance y, which is where the two kinds of exponent come from
y = np.array([1e-2, 1e-3, 1e-4])
print("interior, mu = 0.5:", analytics.interior_expansion(0.5, 0.5, y))
print("boundary, mu = 0.54:", analytics.boundary_expansion(0.54, y))
