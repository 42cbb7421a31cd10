"""Mission objectives, Pareto dominance and the batch rating score."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from missionplan.plan import DecodedPlan

OBJECTIVE_NAMES = ("uavs", "flight-time", "fuel", "distance", "cost", "makespan")
_FIELDS = {
    "uavs": "n_uavs",
    "flight-time": "total_flight_time",
    "fuel": "total_fuel",
    "distance": "total_distance",
    "cost": "total_cost",
    "makespan": "makespan",
}


@dataclass(frozen=True)
class ObjectiveVector:
    n_uavs: float
    total_flight_time: float
    total_fuel: float
    total_distance: float
    total_cost: float
    makespan: float
    feasible: bool = True

    def get(self, name: str) -> float:
        return getattr(self, _FIELDS[name])

    def values(self, selection: Sequence[str] = OBJECTIVE_NAMES) -> tuple[float, ...]:
        return tuple(getattr(self, _FIELDS[n]) for n in selection)

    def as_dict(self) -> dict[str, float]:
        return {n: self.get(n) for n in OBJECTIVE_NAMES}


PENALTY = ObjectiveVector(*([math.inf] * 6), feasible=False)


def parse_selection(names: str | Iterable[str]) -> tuple[str, ...]:
    """Validate an objective selection (comma string or iterable of names)."""
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    sel = tuple(names)
    if not sel:
        raise ValueError("objective selection must not be empty")
    if len(set(sel)) != len(sel):
        raise ValueError(f"duplicate objective in {sel}")
    unknown = [n for n in sel if n not in _FIELDS]
    if unknown:
        raise ValueError(f"unknown objective(s) {unknown}; choose from {OBJECTIVE_NAMES}")
    return sel


def compute_objectives(plan: DecodedPlan | None, cost_per_hour: Sequence[float] | None = None,
                       scenario=None) -> ObjectiveVector:
    """Six mission objectives of a feasible plan; the penalty vector for ``None``.

    Per-UAV hourly costs come from ``cost_per_hour`` or, failing that, from
    ``scenario.uavs``.
    """
    if plan is None:
        return PENALTY
    if cost_per_hour is None:
        cost_per_hour = [u.cost_per_hour for u in scenario.uavs]
    used = [s for s in plan.schedules if s.used]
    return ObjectiveVector(
        n_uavs=float(len(used)),
        total_flight_time=sum(s.flight_time for s in used),
        total_fuel=sum(s.total_fuel for s in used),
        total_distance=sum(s.total_distance for s in used),
        total_cost=sum(cost_per_hour[s.uav] * s.flight_time for s in used),
        makespan=max((s.return_time for s in used), default=0.0),
    )


def dominates(a: ObjectiveVector, b: ObjectiveVector, selection: Sequence[str] = OBJECTIVE_NAMES) -> bool:
    """Pareto dominance (minimisation) on the selected components."""
    strictly = False
    for x, y in zip(a.values(selection), b.values(selection)):
        if x > y:
            return False
        if x < y:
            strictly = True
    return strictly


def rating(solutions: Sequence[ObjectiveVector], batch_min: Sequence[float],
           batch_max: Sequence[float]) -> list[float]:
    """Sum over all six objectives of the min-max normalised value.

    ``batch_min``/``batch_max`` are indexed like :data:`OBJECTIVE_NAMES`. An
    objective with ``min == max`` contributes nothing.
    """
    if not solutions:
        raise ValueError("rating needs a non-empty batch")
    if any(lo > hi for lo, hi in zip(batch_min, batch_max)):
        raise ValueError("batch_min must not exceed batch_max")
    out = []
    for sol in solutions:
        total = 0.0
        for v, lo, hi in zip(sol.values(), batch_min, batch_max):
            if hi > lo:
                total += (v - lo) / (hi - lo)
        out.append(total)
    return out


def batch_bounds(vectors: Iterable[ObjectiveVector]) -> tuple[list[float], list[float]]:
    rows = [v.values() for v in vectors]
    if not rows:
        raise ValueError("empty batch")
    return [min(c) for c in zip(*rows)], [max(c) for c in zip(*rows)]
