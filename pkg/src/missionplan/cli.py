"""Command line entry point: ``missionplan solve|sweep|compare|generate``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from missionplan.datasets import RECIPES, DatasetError, generate_dataset, recipe
from missionplan.experiment import FORMATS, emit_outputs, run_experiment
from missionplan.nsga import GaConfig
from missionplan.oracle import DEFAULT_BUDGET
from missionplan.scenario import validate_scenario
from missionplan.scenario_io import ScenarioFormatError, load_scenario, save_scenario

MODE_OF = {"solve": "solve", "sweep": "sweep-objectives", "compare": "oracle-compare"}


def _formats(text: str) -> list[str]:
    out = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in out if f not in FORMATS]
    if bad or not out:
        raise argparse.ArgumentTypeError(f"formats are {', '.join(FORMATS)}")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="missionplan", description="Multi-UAV mission planning with NSGA-II.")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", action="append", default=[], metavar="FILE",
                        help="scenario JSON file (repeatable)")
    common.add_argument("--recipe", action="append", default=[], choices=sorted(RECIPES),
                        help="built-in synthetic dataset (repeatable)")
    common.add_argument("--seed", type=int, default=0, help="master seed (also seeds recipes)")
    common.add_argument("--out", default="out", metavar="DIR")
    common.add_argument("-v", "--verbose", action="store_true")

    for name in ("solve", "sweep", "compare"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--population", type=int, default=1000)
        sp.add_argument("--elite", type=int, default=100)
        sp.add_argument("--mutation-prob", type=float, default=0.1)
        sp.add_argument("--generations", type=int, default=300)
        sp.add_argument("--stop-generations", type=int, default=10)
        sp.add_argument("--objectives", default="distance,makespan")
        sp.add_argument("--grid-cells", type=int, default=64)
        sp.add_argument("--repetitions", type=int, default=10)
        sp.add_argument("--oracle-budget", type=int, default=DEFAULT_BUDGET)
        sp.add_argument("--format", type=_formats, default=["csv", "report"],
                        help="comma list of csv, report, plot")

    sub.add_parser("generate", parents=[common], help="write recipe scenarios as JSON")
    return p


def _scenarios(args) -> list:
    out = []
    for path in args.scenario:
        sc = load_scenario(path)
        problems = validate_scenario(sc)
        if problems:
            raise ScenarioFormatError(f"{path}: " + "; ".join(f"{v.code}: {v.message}" for v in problems))
        out.append(sc)
    for name in args.recipe:
        out.append(generate_dataset(recipe(name, args.seed)))
    if not out:
        raise ScenarioFormatError("give at least one --scenario or --recipe")
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        scenarios = _scenarios(args)
        out = Path(args.out)
        if args.command == "generate":
            out.mkdir(parents=True, exist_ok=True)
            for sc in scenarios:
                path = out / f"{sc.name}.json"
                save_scenario(sc, path)
                print(path)
            return 0
        config = GaConfig(population=args.population, elite=args.elite,
                          mutation_probability=args.mutation_prob, max_generations=args.generations,
                          stop_generations=args.stop_generations, objectives=args.objectives,
                          grid_cells=args.grid_cells)
        report = run_experiment(scenarios, config, MODE_OF[args.command], args.repetitions,
                                args.seed, args.oracle_budget)
        for path in emit_outputs(report, out, args.format):
            print(path)
        for r in report.results:
            gap = "" if r.gap is None else f" gap={r.gap:.6g}"
            print(f"{r.scenario} [{','.join(r.selection)}]: {len(r.archive)} solutions, "
                  f"converged at generation {r.best_run.convergence_generation}{gap}", file=sys.stderr)
        return 0
    except (ScenarioFormatError, DatasetError, ValueError, OSError) as exc:
        print(f"missionplan: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
