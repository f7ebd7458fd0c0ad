"""A log-optimal player who knows its bet moves the odds.

Against a single opponent betting 1/2 under the arctan map with alpha = 2,
a small rational player can do no better than copy the opponent. Once its
wealth passes 1/3 the centre stops being optimal and it can profit by
pushing the coin towards 0 or 1: returns increase with wealth.
"""

from pathlib import Path

from realitygame import maps, rational
from realitygame.core import PlayerPopulation
from realitygame.svg import Axes, Series, render_svg

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

q = maps.ArctanFamily(2.0)
opp = PlayerPopulation.from_strategies([0.5])

series = []
for w in (0.1, 0.2, 1 / 3, 0.45, 0.6, 0.8):
    curve = rational.log_return_curve(rational.RationalContext(opp, w, q))
    best = curve.maxima
    print(f"w = {w:.3f}: s* = {[round(s, 4) for s in best.strategies]}, r* = {best.value:.5f}")
    series.append(Series(f"w = {w:.2f}", curve.s, curve.r))

print("threshold from the second derivative:", rational.stability_threshold(q, 0.5))
print("threshold by bisection on w:         ", round(rational.stability_flip_wealth(q), 4))

(OUT / "rational_curves.svg").write_text(render_svg(
    series, Axes(title="r(s) against an s = 1/2 opponent, alpha = 2",
                 xlabel="s", ylabel="r(s)", ylim=(-0.3, 0.1))))
