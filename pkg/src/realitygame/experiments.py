"""Experiment runners behind the command line: CSV, manifest and SVG outputs.

Every CSV is written with fixed headers (see :data:`CSV_HEADERS`) and
``repr`` floats, so identical specs give byte-identical files. Timestamps
appear only in ``manifest.json``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, analytics, engine, maps, rational
from .core import PlayerPopulation
from .errors import RealityGameError, ZeroPool
from .specfile import ExperimentSpec
from .svg import Axes, Series, render_svg

CSV_SCHEMA_VERSION = 1
CSV_HEADERS = {
    "bias": ("t", "seed", "p", "q"),
    "wealth": ("t", "seed", "player", "strategy", "wealth"),
    "subjective": ("m", "probability"),
    "rational_curve": ("w", "s", "r"),
    "rational_optima": ("w", "s_star", "r_star", "centre_stable"),
    "inefficiency": ("t", "mean_r", "var_r", "n_runs"),
    "fits": ("map", "alpha", "gamma_hat", "stderr", "r2", "gamma_predicted"),
}

TABLE1_SPECS = (
    ("alpha=2", maps.ArctanFamily(2.0)),
    ("alpha=1.5", maps.ArctanFamily(1.5)),
    ("alpha=0.75", maps.ArctanFamily(0.75)),
    ("alpha=0.5", maps.ArctanFamily(0.5)),
    ("q(p)=const", maps.Constant(0.5)),
    ("q(p)=1-p", maps.SelfDefeating()),
)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def csv_text(schema: str, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADERS[schema])
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


class Outputs:
    """Collects files for one experiment and writes the manifest last."""

    def __init__(self, out_dir):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []

    def write(self, name, text):
        (self.dir / name).write_text(text)
        self.files.append(name)

    def write_csv(self, name, schema, rows):
        self.write(name, csv_text(schema, rows))


def run_seeds(spec: ExperimentSpec) -> dict:
    """Stream keys of every run: Philox key (seed, run_index)."""
    return {"seed": spec.seed, "run_indices": list(range(spec.ensemble))}


def predicted_gamma(reality_map):
    """Predicted inefficiency exponent at the map's stable fixed point(s), if any."""
    stable = analytics.stable_fixed_points(reality_map)
    if not stable:
        return None
    gammas = [analytics.predict_convergence(reality_map, f.location).gamma for f in stable]
    return gammas[0] if np.allclose(gammas, gammas[0], atol=1e-12) else None


def _map_label(spec_or_map):
    m = spec_or_map
    if isinstance(m, maps.ArctanFamily):
        return "arctan", m.alpha
    return m.name, None


def _runs(spec, workers, record_wealth):
    reality_map = spec.reality_map()
    base = engine.RunConfig(reality_map, spec.population(), spec.horizon, seed=spec.seed,
                            snapshot_stride=spec.snapshot_stride,
                            record_wealth=record_wealth,
                            epsilon_player=spec.epsilon_player)

    def one(k):
        try:
            return k, engine.run(replace(base, run_index=k)), None
        except ZeroPool as exc:
            return k, exc.trajectory, str(exc)

    ks = range(spec.ensemble)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, ks))
    return [one(k) for k in ks]


def _status(results):
    return [{"run_index": k, "status": "ok" if err is None else "zero-pool",
             **({"diagnostic": err} if err else {})} for k, _, err in results]


def bias_dynamics(spec, out: Outputs, workers):
    results = _runs(spec, workers, record_wealth=False)
    rows = []
    series = []
    for k, traj, _ in results:
        if traj is None:
            continue
        for i in range(traj.steps):
            rows.append((i + 1, k, traj.p[i], traj.q[i]))
        series.append(Series(f"run {k}", traj.t, traj.q))
    out.write_csv("bias.csv", "bias", rows)
    out.write("bias.svg", render_svg(series, Axes(
        title=f"bias dynamics, {spec.map}", xlabel="t", ylabel="q", ylim=(0.0, 1.0))))
    return _status(results)


def wealth_dynamics(spec, out: Outputs, workers):
    results = _runs(spec, workers, record_wealth=True)
    rows = []
    series = []
    for k, traj, _ in results:
        if traj is None:
            continue
        s = traj.config.population.strategies
        for t, snap in zip(traj.snapshot_times, traj.snapshots):
            for i in range(s.size):
                rows.append((int(t), k, i, s[i], snap[i]))
        series.append(Series(f"run {k}", traj.snapshot_times,
                             traj.snapshots.max(axis=1)))
    out.write_csv("wealth.csv", "wealth", rows)
    out.write("wealth.svg", render_svg(series, Axes(
        title=f"largest wealth share, {spec.map}", xlabel="t",
        ylabel="max_i w_i", ylim=(0.0, 1.0))))
    return _status(results)


def subjective_distribution(spec, out: Outputs, workers):
    dist = analytics.subjective_heads_distribution(spec.population(), spec.horizon)
    out.write_csv("subjective.csv", "subjective", zip(dist.m, dist.probabilities))
    out.write("subjective.svg", render_svg(
        [Series(f"t = {spec.horizon}", dist.m, dist.probabilities)],
        Axes(title=f"heads-count distribution, q(p) = p, N = {spec.n_players}",
             xlabel="m", ylabel="P_m")))
    return []


def rational_curve(spec, out: Outputs, workers):
    reality_map = spec.reality_map()
    opp = PlayerPopulation.from_strategies([spec.opponent_strategy])
    curve_rows, optima_rows, series = [], [], []
    for w in spec.rational_wealth:
        ctx = rational.RationalContext(opp, w, reality_map)
        curve = rational.log_return_curve(ctx)
        curve_rows.extend((w, s, r) for s, r in zip(curve.s, curve.r))
        try:
            centre = rational.equilibrium_stability(reality_map, w, spec.opponent_strategy)
        except RealityGameError:
            centre = None
        for s_star in curve.maxima.strategies:
            optima_rows.append((w, s_star, curve.maxima.value, centre))
        series.append(Series(f"w = {w:g}", curve.s, curve.r))
    out.write_csv("rational_curve.csv", "rational_curve", curve_rows)
    out.write_csv("rational_optima.csv", "rational_optima", optima_rows)
    out.write("rational_curve.svg", render_svg(series, Axes(
        title="expected log-return of a rational player", xlabel="s", ylabel="r(s)")))
    return []


def _inefficiency_for(label, reality_map, spec, workers):
    cfg = engine.RunConfig(reality_map, spec.population(), spec.horizon, seed=spec.seed,
                           record_wealth=False)
    stats = engine.ensemble(cfg, range(spec.ensemble), workers=workers)
    fit = analytics.fit_power_law(stats.mean_r, spec.fit_window())
    name, alpha = _map_label(reality_map)
    fit_row = (name, alpha, fit.gamma, fit.stderr, fit.r2, predicted_gamma(reality_map))
    return stats, fit, fit_row


def _stats_rows(stats):
    return [(t, m, v, stats.n_runs) for t, m, v in zip(stats.t, stats.mean_r, stats.var_r)]


def _stats_status(stats):
    return [{"run_index": k, "status": "zero-pool" if k in stats.failed else "ok",
             **({"diagnostic": stats.failed[k]} if k in stats.failed else {})}
            for k in stats.seeds]


def _positive(t, y):
    keep = y > 0
    return t[keep], y[keep]


def inefficiency(spec, out: Outputs, workers):
    reality_map = spec.reality_map()
    cfg = engine.RunConfig(reality_map, spec.population(), spec.horizon, seed=spec.seed,
                           record_wealth=False)
    stats = engine.ensemble(cfg, range(spec.ensemble), workers=workers)
    out.write_csv("inefficiency.csv", "inefficiency", _stats_rows(stats))
    t, y = _positive(stats.t, stats.mean_r)
    if t.size:
        out.write("inefficiency.svg", render_svg([Series(spec.map, t, y)], Axes(
            title=f"inefficiency, {spec.map}", xlabel="t", ylabel="mean r_t",
            xlog=True, ylog=True)))
    fit = analytics.fit_power_law(stats.mean_r, spec.fit_window())
    name, alpha = _map_label(reality_map)
    gp = predicted_gamma(reality_map)
    out.write_csv("fits.csv", "fits",
                  [(name, alpha, fit.gamma, fit.stderr, fit.r2, gp)])
    out.write("fit.txt", _fit_report(name, alpha, fit, gp))
    return _stats_status(stats)


def _fit_report(name, alpha, fit, gp):
    label = name if alpha is None else f"{name} (alpha = {alpha:g})"
    lines = [
        f"map: {label}",
        f"fit window: [{fit.t_lo}, {fit.t_hi}] ({fit.n_points} log-spaced points)",
        f"gamma_hat = {fit.gamma:.4f} +/- {fit.stderr:.4f}   R^2 = {fit.r2:.4f}",
        f"gamma_predicted = {'n/a' if gp is None else f'{gp:.4f}'}",
    ]
    return "\n".join(lines) + "\n"


def table1(spec, out: Outputs, workers):
    fit_rows, observed, predicted, series, status = [], [], [], [], []
    for label, reality_map in TABLE1_SPECS:
        stats, fit, row = _inefficiency_for(label, reality_map, spec, workers)
        slug = label.replace("=", "_").replace("(", "").replace(")", "").replace("-", "m")
        out.write_csv(f"inefficiency_{slug}.csv", "inefficiency", _stats_rows(stats))
        fit_rows.append(row)
        observed.append(fit.gamma)
        predicted.append(row[-1])
        t, y = _positive(stats.t, stats.mean_r)
        series.append(Series(label, t, y))
        status.extend({"map": label, **s} for s in _stats_status(stats))
    out.write_csv("fits.csv", "fits", fit_rows)
    out.write("table1.txt", analytics.format_table(
        [label for label, _ in TABLE1_SPECS], observed, predicted))
    out.write("table1.svg", render_svg(series, Axes(
        title="inefficiency vs time", xlabel="t", ylabel="mean r_t",
        xlog=True, ylog=True)))
    return status


RUNNERS = {
    "bias-dynamics": bias_dynamics,
    "wealth-dynamics": wealth_dynamics,
    "subjective-distribution": subjective_distribution,
    "rational-curve": rational_curve,
    "inefficiency": inefficiency,
    "table1": table1,
}


def run_experiment(spec: ExperimentSpec, out_dir=None, workers: int | None = None) -> Path:
    """Run ``spec``, write its outputs and manifest, and return the output directory."""
    out_dir = Path(out_dir or spec.out or f"out/{spec.kind}")
    workers = engine.default_workers() if workers is None else max(1, int(workers))
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    out = Outputs(out_dir)
    status = RUNNERS[spec.kind](spec, out, workers)
    manifest = {
        "tool": "realitygame",
        "version": __version__,
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "spec": spec.to_dict(),
        "seeds": run_seeds(spec),
        "rng": "numpy Philox keyed (seed, run_index); one double per toss",
        "workers": workers,
        "started_utc": started.isoformat(timespec="seconds"),
        "elapsed_seconds": round(time.perf_counter() - t0, 3),
        "runs": status,
        "outputs": sorted(out.files),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, default=_json) + "\n")
    return out_dir


def _json(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and math.isnan(v):
        return None
    raise TypeError(type(v))
