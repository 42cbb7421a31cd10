"""Repeated solver runs, objective sweeps, oracle comparison and output files."""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from missionplan.nsga import EvolveResult, GaConfig, evolve
from missionplan.objectives import OBJECTIVE_NAMES, ObjectiveVector, batch_bounds, rating
from missionplan.oracle import DEFAULT_BUDGET, compare_fronts, exact_pof, nondominated
from missionplan.plan import Chromosome
from missionplan.scenario import MissionScenario

log = logging.getLogger(__name__)

MODES = ("solve", "sweep-objectives", "oracle-compare")
FORMATS = ("csv", "report", "plot")


def objective_combinations() -> list[tuple[str, ...]]:
    """Every singleton, every pair, then the full set."""
    singles = [(n,) for n in OBJECTIVE_NAMES]
    pairs = list(itertools.combinations(OBJECTIVE_NAMES, 2))
    return singles + pairs + [OBJECTIVE_NAMES]


def derive_seeds(master: int, *path: int, count: int) -> list[int]:
    ss = np.random.SeedSequence([master, *path])
    return [int(x) for x in ss.generate_state(count)]


def chromosome_to_dict(ch: Chromosome) -> dict:
    return {
        "assign": [list(a) for a in ch.assign],
        "order": list(ch.order),
        "gcs": list(ch.gcs),
        "path_profile": [list(p) for p in ch.path_profile],
        "sensor": [[None if s is None else s.value for s in row] for row in ch.sensor],
        "return_profile": list(ch.return_profile),
    }


@dataclass
class RunSummary:
    seed: int
    generations: int
    convergence_generation: int
    converged: bool
    archive_size: int
    score: float  # hypervolume gap, or mean normalised sum when no oracle front


@dataclass
class ScenarioResult:
    scenario: str
    selection: tuple[str, ...]
    best: int
    runs: list[RunSummary]
    archive: list[tuple[Chromosome, ObjectiveVector]]
    oracle: str = "skipped"  # skipped | ok | overflow
    optimal: list[ObjectiveVector] = field(default_factory=list)
    gap: float | None = None
    wall_time: float = 0.0
    history: list[dict] = field(default_factory=list)

    @property
    def best_run(self) -> RunSummary:
        return self.runs[self.best]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "objectives": list(self.selection),
            "best_seed": self.best_run.seed,
            "generations": self.best_run.generations,
            "convergence_generation": self.best_run.convergence_generation,
            "converged": self.best_run.converged,
            "hypervolume_gap": self.gap,
            "oracle": self.oracle,
            "optimal_front": [list(v.values(self.selection)) for v in self.optimal],
            "archive": [{"objectives": v.as_dict(), "chromosome": chromosome_to_dict(ch)}
                        for ch, v in self.archive],
            "runs": [dataclasses.asdict(r) for r in self.runs],
            "history": self.history,
        }


@dataclass
class RatingRow:
    scenario: str
    selection: tuple[str, ...]
    n_solutions: int
    generations: int
    means: dict[str, float]
    rating: float

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "objectives": list(self.selection),
                "n_solutions": self.n_solutions, "generations": self.generations,
                "means": self.means, "rating": self.rating}


@dataclass
class RunReport:
    mode: str
    config: dict
    results: list[ScenarioResult]
    ratings: list[RatingRow] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"mode": self.mode, "config": self.config,
               "results": [r.to_dict() for r in self.results]}
        if self.mode == "sweep-objectives":
            out["ratings"] = [r.to_dict() for r in self.ratings]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def timing(self) -> dict[str, float]:
        return {f"{r.scenario}:{','.join(r.selection)}": r.wall_time for r in self.results}


def mean_normalised_sums(results: Sequence[EvolveResult], selection: Sequence[str]) -> list[float]:
    """Per run, the archive mean of the summed min-max scaled objectives.

    Bounds are taken over all runs' archives together; empty archives score inf.
    """
    pooled = [v.values(selection) for r in results for v in r.archive.vectors()]
    if not pooled:
        return [math.inf] * len(results)
    lo = [min(c) for c in zip(*pooled)]
    hi = [max(c) for c in zip(*pooled)]
    out = []
    for r in results:
        vecs = r.archive.vectors()
        if not vecs:
            out.append(math.inf)
            continue
        total = 0.0
        for v in vecs:
            total += sum((x - a) / (b - a) for x, a, b in zip(v.values(selection), lo, hi) if b > a)
        out.append(total / len(vecs))
    return out


def _repeat(scenario: MissionScenario, config: GaConfig, seeds: Sequence[int]) -> list[EvolveResult]:
    return [evolve(scenario, dataclasses.replace(config, seed=s)) for s in seeds]


def _result(name: str, config: GaConfig, seeds, runs: list[EvolveResult], scores: list[float],
            t0: float, **extra) -> ScenarioResult:
    best = min(range(len(runs)), key=lambda i: (scores[i], i))
    summaries = [RunSummary(s, r.generations, r.convergence_generation, r.converged, len(r.archive), sc)
                 for s, r, sc in zip(seeds, runs, scores)]
    history = [{"generation": h.generation, "archive_size": h.archive_size, "feasible": h.feasible,
                "best": {k: (v if math.isfinite(v) else None) for k, v in h.best.items()}}
               for h in runs[best].history]
    return ScenarioResult(name, config.objectives, best, summaries, runs[best].archive.entries(),
                          wall_time=time.perf_counter() - t0, history=history, **extra)


def solve(scenario: MissionScenario, config: GaConfig, seeds: Sequence[int]) -> ScenarioResult:
    t0 = time.perf_counter()
    runs = _repeat(scenario, config, seeds)
    return _result(scenario.name, config, seeds, runs, mean_normalised_sums(runs, config.objectives), t0)


def oracle_compare(scenario: MissionScenario, config: GaConfig, seeds: Sequence[int],
                   budget: int = DEFAULT_BUDGET) -> ScenarioResult:
    t0 = time.perf_counter()
    front = exact_pof(scenario, config.objectives, budget=budget, grid_cells=config.grid_cells)
    runs = _repeat(scenario, config, seeds)
    if front.overflow:
        log.warning("exact front of %s exceeds the oracle budget (%d)", scenario.name, budget)
        scores = mean_normalised_sums(runs, config.objectives)
        return _result(scenario.name, config, seeds, runs, scores, t0, oracle="overflow")
    scores = []
    for r in runs:
        if not front.vectors:
            scores.append(0.0 if not len(r.archive) else math.inf)
        elif not len(r.archive):
            scores.append(math.inf)
        else:
            scores.append(compare_fronts(front.vectors, r.archive.vectors(), config.objectives).hypervolume)
    res = _result(scenario.name, config, seeds, runs, scores, t0, oracle="ok", optimal=front.vectors)
    res.gap = scores[res.best] if math.isfinite(scores[res.best]) else None
    return res


def run_experiment(scenarios: Sequence[MissionScenario], config: GaConfig, mode: str = "solve",
                   repetitions: int = 10, master_seed: int = 0,
                   oracle_budget: int = DEFAULT_BUDGET) -> RunReport:
    """Run ``repetitions`` seeded solver runs per scenario and keep the best one.

    ``sweep-objectives`` repeats this for each of the 22 objective selections
    and rates the mean archive vector of every selection against the pooled
    archives of that scenario.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    echo = {k: v for k, v in dataclasses.asdict(config).items() if k != "seed"}
    echo["objectives"] = list(config.objectives)
    echo.update(master_seed=master_seed, repetitions=repetitions)
    if mode == "oracle-compare":
        echo["oracle_budget"] = oracle_budget
    report = RunReport(mode, echo, [])
    for k, sc in enumerate(scenarios):
        if mode == "solve":
            report.results.append(solve(sc, config, derive_seeds(master_seed, k, count=repetitions)))
        elif mode == "oracle-compare":
            report.results.append(oracle_compare(sc, config, derive_seeds(master_seed, k, count=repetitions),
                                                 oracle_budget))
        else:
            results = []
            for j, sel in enumerate(objective_combinations()):
                cfg = dataclasses.replace(config, objectives=sel)
                results.append(solve(sc, cfg, derive_seeds(master_seed, k, j, count=repetitions)))
            report.results.extend(results)
            report.ratings.extend(rating_table(sc.name, results))
    return report


def rating_table(name: str, results: Sequence[ScenarioResult]) -> list[RatingRow]:
    pooled = [v for r in results for _, v in r.archive]
    rows = []
    if not pooled:
        log.warning("no feasible solution for %s, rating table left empty", name)
        return rows
    lo, hi = batch_bounds(pooled)
    for r in results:
        vecs = [v for _, v in r.archive]
        if not vecs:
            continue
        means = {n: float(np.mean([v.get(n) for v in vecs])) for n in OBJECTIVE_NAMES}
        mean_vec = ObjectiveVector(*(means[n] for n in OBJECTIVE_NAMES))
        rows.append(RatingRow(name, r.selection, len(vecs), r.best_run.generations, means,
                              rating([mean_vec], lo, hi)[0]))
    return rows


# ------------------------------------------------------------------- outputs


def _slug(r: ScenarioResult) -> str:
    return f"{r.scenario}_{'-'.join(r.selection)}"


def write_archive_csv(result: ScenarioResult, path: Path) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(result.selection)
        for _, v in result.archive:
            w.writerow([repr(x) for x in v.values(result.selection)])
    if not result.archive:
        log.warning("archive of %s is empty; wrote header only to %s", result.scenario, path)


def read_archive_csv(path: Path) -> tuple[tuple[str, ...], list[tuple[float, ...]]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return tuple(rows[0]), [tuple(float(x) for x in row) for row in rows[1:]]


def _staircase(points: np.ndarray, ref: Sequence[float]) -> list[tuple[float, float]]:
    pts = nondominated(points)
    pts = pts[np.argsort(pts[:, 0], kind="stable")]
    out = [(float(pts[0, 0]), float(ref[1]))]
    for k, (x, y) in enumerate(pts):
        out.append((float(x), float(y)))
        nx = pts[k + 1, 0] if k + 1 < len(pts) else ref[0]
        out.append((float(nx), float(y)))
    return out


def front_plot_data(result: ScenarioResult) -> list[tuple[str, float, float]]:
    """Point series for a 2-D front plot: raw fronts, their staircases and the reference point."""
    approx = np.array([v.values(result.selection) for _, v in result.archive], dtype=float).reshape(-1, 2)
    optimal = np.array([v.values(result.selection) for v in result.optimal], dtype=float).reshape(-1, 2)
    both = np.vstack([approx, optimal])
    lo, hi = both.min(axis=0), both.max(axis=0)
    ref = hi + 0.1 * np.where(hi > lo, hi - lo, np.maximum(np.abs(hi), 1.0))
    rows = [("reference", float(ref[0]), float(ref[1]))]
    for label, pts in (("optimal", optimal), ("approx", approx)):
        if len(pts):
            rows += [(label, float(x), float(y)) for x, y in pts]
            rows += [(f"{label}_step", x, y) for x, y in _staircase(pts, ref)]
    return rows


def render_front(result: ScenarioResult, rows, path: Path) -> None:
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    fig = Figure(figsize=(6, 4.5))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    series: dict[str, list[tuple[float, float]]] = {}
    for label, x, y in rows:
        series.setdefault(label, []).append((x, y))
    (rx, ry), = series["reference"]
    if "optimal_step" in series:
        xs, ys = zip(*series["optimal_step"])
        ax.fill_between(xs, ys, ry, color="tab:red", alpha=0.25, label="gap region")
    if "approx_step" in series:
        xs, ys = zip(*series["approx_step"])
        ax.fill_between(xs, ys, ry, color="white")
        ax.plot(xs, ys, color="tab:blue", lw=1)
    for label, colour, marker in (("optimal", "tab:red", "x"), ("approx", "tab:blue", "o")):
        if label in series:
            xs, ys = zip(*series[label])
            ax.scatter(xs, ys, c=colour, marker=marker, label=label, zorder=3)
    ax.set_xlabel(result.selection[0])
    ax.set_ylabel(result.selection[1])
    title = result.scenario if result.gap is None else f"{result.scenario} (gap {result.gap:.4f})"
    ax.set_title(title)
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})


def emit_outputs(report: RunReport, out_dir: str | Path, formats: Sequence[str] = ("csv", "report")) -> list[Path]:
    """Write the requested outputs into ``out_dir``; returns the files written."""
    bad = set(formats) - set(FORMATS)
    if bad:
        raise ValueError(f"unknown output format(s) {sorted(bad)}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written: list[Path] = []
    if "csv" in formats:
        for r in report.results:
            p = out / f"archive_{_slug(r)}.csv"
            write_archive_csv(r, p)
            written.append(p)
        if report.ratings:
            p = out / "ratings.csv"
            with p.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["scenario", "objectives", "n_solutions", "generations", *OBJECTIVE_NAMES, "rating"])
                for row in report.ratings:
                    w.writerow([row.scenario, "+".join(row.selection), row.n_solutions, row.generations,
                                *(repr(row.means[n]) for n in OBJECTIVE_NAMES), repr(row.rating)])
            written.append(p)
    if "report" in formats:
        p = out / "report.json"
        p.write_text(report.to_json())
        t = out / "timing.json"
        t.write_text(json.dumps(report.timing(), indent=2, sort_keys=True) + "\n")
        written += [p, t]
    if "plot" in formats:
        for r in report.results:
            if len(r.selection) != 2:
                log.warning("front plot needs exactly two objectives; skipping %s", _slug(r))
                continue
            if not r.archive and not r.optimal:
                log.warning("nothing to plot for %s", _slug(r))
                continue
            rows = front_plot_data(r)
            p = out / f"front_{_slug(r)}.csv"
            with p.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["series", r.selection[0], r.selection[1]])
                w.writerows([(s, repr(x), repr(y)) for s, x, y in rows])
            png = p.with_suffix(".png")
            render_front(r, rows, png)
            written += [p, png]
    return written
