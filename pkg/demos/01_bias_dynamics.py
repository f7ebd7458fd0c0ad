"""How the coin's bias moves under different reality maps.

Twenty-nine players bet fixed fractions 1/30 .. 29/30 on heads, all with
equal wealth. We toss the coin a few thousand times for several seeds and
watch q(t). A self-defeating map pulls q to 1/2 quickly, a weakly
self-reinforcing one does so slowly, the subjective map q = p freezes on a
random player's strategy, and a strongly self-reinforcing map runs off to
0 or 1.

Writes one SVG per map into demos/out/.
"""

from pathlib import Path

import numpy as np

from realitygame import engine, maps
from realitygame.core import PlayerPopulation
from realitygame.svg import Axes, Series, render_svg

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

pop = PlayerPopulation.uniform_grid(29)
cases = {
    "self-defeating": maps.SelfDefeating(),
    "arctan-0.5": maps.ArctanFamily(0.5),
    "identity": maps.Identity(),
    "arctan-1.5": maps.ArctanFamily(1.5),
    "multimodal": maps.Multimodal(),
}

for name, q in cases.items():
    series = []
    finals = []
    for k in range(5):
        traj = engine.run(engine.RunConfig(q, pop, 3000, seed=2024, run_index=k,
                                           record_wealth=False))
        series.append(Series(f"seed {k}", traj.t, traj.q))
        finals.append(traj.q[-1])
    (OUT / f"bias_{name}.svg").write_text(render_svg(
        series, Axes(title=f"q(t), {name}", xlabel="t", ylabel="q", ylim=(0, 1))))
    print(f"{name:15s} final q per seed: {np.round(finals, 3)}")

# The fixed points explain the picture: stable ones attract, the rest repel.
for name, q in cases.items():
    fps = maps.fixed_points(q)
    if fps is maps.CONTINUUM:
        print(f"{name:15s} every p is a fixed point")
        continue
    desc = []
    for f in fps:
        if isinstance(f, maps.FixedPointInfo):
            desc.append(f"{f.location:.3f} ({'stable' if f.stable else 'unstable'})")
        else:
            desc.append(f"{f.location:.3f} (jump)")
    print(f"{name:15s} fixed points: {', '.join(desc)}")
