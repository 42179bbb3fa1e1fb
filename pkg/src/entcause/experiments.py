"""Experiment grid runner and plot emission.

A JSON config describes a grid (graph, model, noise sweep, sample sweep,
methods, replicates).  Every (cell, replicate) gets its own seed derived by
stable hashing, so the grid can run serially or in parallel and produce the
same sorted CSV.  Plotting renders mean curves with standard-error whiskers
as a self-contained SVG with fully deterministic layout.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from multiprocessing import Pool

from .discovery import (
    MEASURES,
    DiscoveryConfig,
    anm_baseline,
    enumerate_discover,
    peel,
)
from .errors import DataFormatError, InvalidParameterError
from .graphs import dag_from_json, named_graph, shd
from .probcore import make_rng, stable_seed
from .scm import NoiseSpec, anm_scm, random_scm, sample

__all__ = [
    "ExperimentConfig",
    "ResultRecord",
    "load_config",
    "run_experiment",
    "write_results",
    "plot",
]

CSV_FIELDS = (
    "experiment_id", "graph", "method", "measure", "n_states", "samples",
    "noise", "replicate", "seed", "shd", "runtime_ms", "error",
)

_METHODS = ("peel", "enumerate", "anm-baseline")


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment grid (see load_config for the JSON schema)."""

    experiment_id: str
    graph: str
    graph_json: str
    model: str
    n_states: int
    m_states: int
    noise: tuple
    noise_tol: float
    high_entropy_sources: bool
    samples: tuple
    methods: tuple          # (method, measure-or-"") pairs
    replicates: int
    seed: int
    alpha: float
    smoothing: float
    cap: int
    record_timing: bool

    def __post_init__(self):
        if self.model not in ("unconstrained", "anm"):
            raise InvalidParameterError(f"unknown model {self.model!r}")
        if self.replicates < 1:
            raise InvalidParameterError("replicates must be >= 1")
        if not self.noise or not self.samples:
            raise InvalidParameterError("noise and sample sweeps must be non-empty")
        if not self.methods:
            raise InvalidParameterError("methods must be non-empty")
        for method, measure in self.methods:
            if method not in _METHODS:
                raise InvalidParameterError(f"unknown method {method!r}")
            if method == "anm-baseline":
                if measure:
                    raise InvalidParameterError(
                        "anm-baseline does not take a measure")
            elif measure not in MEASURES:
                raise InvalidParameterError(f"unknown measure {measure!r}")
        if self.model == "anm":
            for k in self.noise:
                if int(k) != k or k < 0:
                    raise InvalidParameterError(
                        "anm noise sweep holds integer half-widths >= 0")


def _parse_method(spec):
    if ":" in spec:
        method, measure = spec.split(":", 1)
    else:
        method, measure = spec, ""
    if method in ("peel", "enumerate") and not measure:
        measure = "total"
    return method, measure


def load_config(obj):
    """Build an ExperimentConfig from a JSON dict (schema version 1)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("version") != 1:
        raise InvalidParameterError("config version must be 1")
    graph = obj.get("graph", "triangle")
    graph_json = ""
    if isinstance(graph, dict):
        path = graph.get("path")
        if not path:
            raise InvalidParameterError("graph object needs a 'path'")
        with open(path, "r", encoding="utf-8") as fh:
            graph_json = fh.read()
        dag_from_json(graph_json)  # validate early
        graph = path
    return ExperimentConfig(
        experiment_id=str(obj.get("id", "exp")),
        graph=str(graph),
        graph_json=graph_json,
        model=str(obj.get("model", "unconstrained")),
        n_states=int(obj.get("n_states", 10)),
        m_states=int(obj.get("m_states", 16)),
        noise=tuple(float(v) for v in obj["noise"]),
        noise_tol=float(obj.get("noise_tol", 0.05)),
        high_entropy_sources=bool(obj.get("high_entropy_sources", False)),
        samples=tuple(int(v) for v in obj["samples"]),
        methods=tuple(_parse_method(str(m)) for m in obj["methods"]),
        replicates=int(obj.get("replicates", 1)),
        seed=int(obj.get("seed", 0)),
        alpha=float(obj.get("alpha", 0.05)),
        smoothing=float(obj.get("smoothing", 0.0)),
        cap=int(obj.get("cap", 10**6)),
        record_timing=bool(obj.get("record_timing", False)),
    )


@dataclass(frozen=True)
class ResultRecord:
    experiment_id: str
    graph: str
    method: str
    measure: str
    n_states: int
    samples: int
    noise: float
    replicate: int
    seed: int
    shd: object        # int, or "" when the method errored
    runtime_ms: float
    error: str

    def __post_init__(self):
        if self.shd != "" and int(self.shd) < 0:
            raise InvalidParameterError("shd must be >= 0")

    def row(self):
        noise = int(self.noise) if self.noise == int(self.noise) else self.noise
        return [self.experiment_id, self.graph, self.method, self.measure,
                self.n_states, self.samples, noise, self.replicate,
                self.seed, self.shd, self.runtime_ms, self.error]


def _cell_id(config, noise, n_samples):
    noise_str = repr(int(noise) if noise == int(noise) else float(noise))
    return (f"{config.graph}|{config.model}|n={config.n_states}"
            f"|m={config.m_states}|noise={noise_str}|N={n_samples}")


def _resolve_graph(config, rng):
    if config.graph_json:
        return dag_from_json(config.graph_json)
    return named_graph(config.graph, rng)


def _replicate_rows(args):
    config, noise, n_samples, rep = args
    cell = _cell_id(config, noise, n_samples)
    rep_seed = stable_seed(config.seed, cell, rep)
    rng = make_rng(rep_seed)
    rows = []
    try:
        truth = _resolve_graph(config, rng)
        if config.model == "anm":
            scm = anm_scm(truth, config.n_states, int(noise), rng)
        else:
            spec = NoiseSpec.dirichlet(noise, config.noise_tol)
            scm = random_scm(truth, config.n_states, config.m_states, spec,
                             config.high_entropy_sources, rng)
        data = sample(scm, n_samples, rng)
        skeleton = truth.skeleton()
    except Exception as exc:  # noqa: BLE001 - data generation failed whole cell
        for method, measure in config.methods:
            rows.append(ResultRecord(
                config.experiment_id, config.graph, method, measure,
                config.n_states, n_samples, noise, rep, rep_seed, "", 0.0,
                f"{type(exc).__name__}: {exc}"))
        return rows
    for method, measure in config.methods:
        dcfg = DiscoveryConfig(
            measure=measure or "total", ci="g-test", alpha=config.alpha,
            smoothing=config.smoothing, cap=config.cap, seed=rep_seed)
        start = time.perf_counter()
        try:
            if method == "enumerate":
                est = enumerate_discover(data, skeleton, dcfg)[0]
            elif method == "peel":
                est = peel(data, dcfg)
            else:
                est = anm_baseline(data, skeleton, config.alpha)
            dist = shd(est, truth)
            err = ""
        except Exception as exc:  # noqa: BLE001 - record and continue the grid
            dist = ""
            err = f"{type(exc).__name__}: {exc}"
        elapsed = (time.perf_counter() - start) * 1000.0
        runtime = round(elapsed, 3) if config.record_timing else 0.0
        rows.append(ResultRecord(
            config.experiment_id, config.graph, method, measure,
            config.n_states, n_samples, noise, rep, rep_seed, dist, runtime,
            err))
    return rows


def run_experiment(config, jobs=1):
    """All grid records, sorted by (cell, method, measure, replicate)."""
    tasks = [
        (config, noise, n_samples, rep)
        for noise in config.noise
        for n_samples in config.samples
        for rep in range(config.replicates)
    ]
    if jobs > 1:
        with Pool(processes=jobs) as pool:
            chunks = pool.map(_replicate_rows, tasks)
    else:
        chunks = [_replicate_rows(t) for t in tasks]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (_cell_id(config, r.noise, r.samples),
                                r.method, r.measure, r.replicate))
    return records


def write_results(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for rec in records:
            writer.writerow(rec.row())


def results_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 150, 30, 50


def _fmt(v):
    return f"{v:.2f}"


def plot(results_path, x, y, group, out_path):
    """Mean-of-y per x, one polyline per group, SE whiskers, labeled axes."""
    with open(results_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (x, y, group):
            if col not in header:
                raise InvalidParameterError(f"missing column {col!r}")
        rows = [r for r in reader if r[y] != ""]
    if not rows:
        raise DataFormatError("no plottable rows in results CSV")
    points = {}  # (group, x) -> list of y
    for r in rows:
        try:
            xv = float(r[x])
            yv = float(r[y])
        except ValueError as exc:
            raise DataFormatError(f"non-numeric value in {x!r}/{y!r}: {exc}")
        points.setdefault((r[group], xv), []).append(yv)
    stats = {}
    for (g, xv), ys in points.items():
        k = len(ys)
        mean = sum(ys) / k
        if k > 1:
            var = sum((v - mean) ** 2 for v in ys) / (k - 1)
            se = (var / k) ** 0.5
        else:
            se = 0.0
        stats.setdefault(g, {})[xv] = (mean, se)
    groups = sorted(stats)
    xs = sorted({xv for per in stats.values() for xv in per})
    lo_y = min(m - s for per in stats.values() for m, s in per.values())
    hi_y = max(m + s for per in stats.values() for m, s in per.values())
    if hi_y == lo_y:
        hi_y += 1.0
        lo_y -= 1.0
    lo_x, hi_x = min(xs), max(xs)
    if hi_x == lo_x:
        hi_x += 1.0
        lo_x -= 1.0

    def sx(v):
        return _ML + (v - lo_x) / (hi_x - lo_x) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - lo_y) / (hi_y - lo_y) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
        f'height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" '
        'stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
        'stroke="black"/>',
    ]
    for t in range(5):
        xv = lo_x + t * (hi_x - lo_x) / 4
        yv = lo_y + t * (hi_y - lo_y) / 4
        parts.append(
            f'<line x1="{_fmt(sx(xv))}" y1="{_H - _MB}" '
            f'x2="{_fmt(sx(xv))}" y2="{_H - _MB + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{_fmt(sx(xv))}" y="{_H - _MB + 18}" font-size="11" '
            f'text-anchor="middle">{xv:.3g}</text>')
        parts.append(
            f'<line x1="{_ML - 5}" y1="{_fmt(sy(yv))}" x2="{_ML}" '
            f'y2="{_fmt(sy(yv))}" stroke="black"/>')
        parts.append(
            f'<text x="{_ML - 8}" y="{_fmt(sy(yv) + 4)}" font-size="11" '
            f'text-anchor="end">{yv:.3g}</text>')
    parts.append(
        f'<text x="{_fmt((_ML + _W - _MR) / 2)}" y="{_H - 12}" '
        f'font-size="13" text-anchor="middle">{x}</text>')
    parts.append(
        f'<text x="16" y="{_fmt((_MT + _H - _MB) / 2)}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 16 '
        f'{_fmt((_MT + _H - _MB) / 2)})">{y}</text>')
    for gi, g in enumerate(groups):
        color = _PALETTE[gi % len(_PALETTE)]
        per = stats[g]
        pts = " ".join(
            f"{_fmt(sx(xv))},{_fmt(sy(per[xv][0]))}" for xv in xs if xv in per
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>')
        for xv in xs:
            if xv not in per:
                continue
            mean, se = per[xv]
            if se > 0:
                parts.append(
                    f'<line x1="{_fmt(sx(xv))}" y1="{_fmt(sy(mean - se))}" '
                    f'x2="{_fmt(sx(xv))}" y2="{_fmt(sy(mean + se))}" '
                    f'stroke="{color}"/>')
                for end in (mean - se, mean + se):
                    parts.append(
                        f'<line x1="{_fmt(sx(xv) - 3)}" y1="{_fmt(sy(end))}" '
                        f'x2="{_fmt(sx(xv) + 3)}" y2="{_fmt(sy(end))}" '
                        f'stroke="{color}"/>')
            parts.append(
                f'<circle cx="{_fmt(sx(xv))}" cy="{_fmt(sy(mean))}" r="2.5" '
                f'fill="{color}"/>')
        parts.append(
            f'<text x="{_W - _MR + 10}" y="{_MT + 16 + 16 * gi}" '
            f'font-size="12" fill="{color}">{g}</text>')
    parts.append("</svg>")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
