"""Chromosome decoding and constraint checking.

A :class:`Chromosome` carries the six alleles (task->UAVs, global task order,
UAV->GCS, per-assignment path profile, per-assignment sensor, per-UAV return
profile). :class:`PlanEvaluator` turns it into per-UAV schedules with every
time, fuel and distance quantity filled in, then runs the constraint families.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

from shapely.geometry import LineString, Polygon

from missionplan.geo import Grid, Path, PathPlanner, distance, path_length
from missionplan.scenario import (
    ALLEN_RELATIONS,
    DependencyKind,
    GeoPoint,
    MissionScenario,
    SensorKind,
    TaskKind,
    TaskSpec,
    WindowMode,
    valid_sensors,
)

EPS = 1e-9
FAMILIES = ("Sensor", "Order", "Gcs", "Temporal", "Dependency", "Autonomy", "Distance", "Fuel")
UNASSIGNED = -1


@dataclass(frozen=True)
class Chromosome:
    assign: tuple[tuple[int, ...], ...]
    order: tuple[int, ...]
    gcs: tuple[int, ...]
    path_profile: tuple[tuple[int, ...], ...]
    sensor: tuple[tuple[SensorKind | None, ...], ...]
    return_profile: tuple[int, ...]

    def uav_sequence(self, u: int) -> list[int]:
        """Tasks of UAV ``u`` in the order given by the global permutation."""
        return [t for t in self.order if u in self.assign[t]]


@dataclass(frozen=True)
class ConstraintViolation:
    family: str
    code: str
    detail: str


@dataclass(frozen=True)
class ConstraintReport:
    feasible: bool
    violations: tuple[ConstraintViolation, ...] = ()

    @classmethod
    def of(cls, violations) -> "ConstraintReport":
        v = tuple(violations)
        return cls(not v, v)


@dataclass(slots=True)
class AssignmentTimes:
    task: int
    order: int
    profile: int
    sensor: SensorKind | None
    departure: float
    dur_path: float
    start: float
    dur_task: float
    end: float
    dur_loiter: float
    fuel_path: float
    fuel_task: float
    fuel_loiter: float
    distance_path: float
    distance_task: float
    distance_loiter: float
    path: Path


@dataclass(slots=True)
class UavSchedule:
    uav: int
    gcs: int
    return_profile: int
    legs: list[AssignmentTimes]
    dur_return: float = 0.0
    return_time: float = 0.0
    fuel_return: float = 0.0
    distance_return: float = 0.0
    flight_time: float = 0.0
    total_distance: float = 0.0
    total_fuel: float = 0.0
    return_path: Path | None = None

    @property
    def used(self) -> bool:
        return bool(self.legs)


@dataclass
class DecodedPlan:
    chromosome: Chromosome
    schedules: list[UavSchedule]
    by_task: dict[int, dict[int, AssignmentTimes]] = field(default_factory=dict)


def check_structure(scenario: MissionScenario, ch: Chromosome) -> None:
    """Raise ``ValueError`` when ``ch`` breaks a structural invariant."""
    n, m, l = len(scenario.tasks), len(scenario.uavs), len(scenario.gcss)
    if sorted(ch.order) != list(range(n)):
        raise ValueError("order allele is not a permutation")
    if not (len(ch.assign) == len(ch.path_profile) == len(ch.sensor) == n):
        raise ValueError("per-task alleles have the wrong length")
    if len(ch.gcs) != m or len(ch.return_profile) != m:
        raise ValueError("per-UAV alleles have the wrong length")
    for t, task in enumerate(scenario.tasks):
        uavs = ch.assign[t]
        if len(uavs) != task.required_uavs or len(set(uavs)) != len(uavs):
            raise ValueError(f"task {task.id}: bad UAV vector {uavs}")
        if len(ch.path_profile[t]) != len(uavs) or len(ch.sensor[t]) != len(uavs):
            raise ValueError(f"task {task.id}: allele vectors differ in length")
        for k, u in enumerate(uavs):
            if not 0 <= u < m:
                raise ValueError(f"task {task.id}: UAV index {u} out of range")
            uav = scenario.uavs[u]
            if not 0 <= ch.path_profile[t][k] < len(uav.profiles):
                raise ValueError(f"task {task.id}: profile index out of range")
            usable = valid_sensors(task, uav)
            s = ch.sensor[t][k]
            if (s is None and usable) or (s is not None and s not in usable):
                raise ValueError(f"task {task.id}: sensor {s} invalid for UAV {uav.id}")
    for u, g in enumerate(ch.gcs):
        if not (g == UNASSIGNED or 0 <= g < l):
            raise ValueError(f"GCS index {g} out of range")
        if not 0 <= ch.return_profile[u] < len(scenario.uavs[u].profiles):
            raise ValueError("return profile index out of range")


def _local_xy(points, lon0: float, lat0: float) -> list[tuple[float, float]]:
    k = 60.0405  # NM per degree of arc
    c = math.cos(math.radians(lat0))
    return [((p.lon - lon0) * k * c, (p.lat - lat0) * k) for p in points]


def sweep_length(zone, swath: float) -> float:
    """Boustrophedon length (NM) covering a polygon with parallel passes."""
    lon0 = sum(p.lon for p in zone) / len(zone)
    lat0 = sum(p.lat for p in zone) / len(zone)
    poly = Polygon(_local_xy(zone, lon0, lat0))
    x0, y0, x1, y1 = poly.bounds
    total, passes = 0.0, 0
    y = y0 + swath / 2
    while y < y1:
        chord = poly.intersection(LineString([(x0 - 1, y), (x1 + 1, y)]))
        if not chord.is_empty:
            total += chord.length
            passes += 1
        y += swath
    if passes == 0:  # thinner than one swath: one pass along the long side
        return max(x1 - x0, y1 - y0)
    return total + (passes - 1) * swath


@dataclass(frozen=True)
class _TaskGeometry:
    entry: GeoPoint
    exit: GeoPoint
    internal: float  # NM travelled inside the zone (per executing UAV), -1 for MON
    vertices: tuple[GeoPoint, ...]


def _geometry(task: TaskSpec) -> _TaskGeometry:
    z = task.zone
    if task.kind is TaskKind.TP:
        return _TaskGeometry(z[0], z[0], 0.0, z)
    if task.kind is TaskKind.ES:
        return _TaskGeometry(z[0], z[-1], path_length(z), z)
    poly = Polygon([(p.lon, p.lat) for p in z])
    c = poly.centroid
    if not poly.contains(c):
        c = poly.representative_point()
    centre = GeoPoint(c.x, c.y, 0.0)
    if task.kind is TaskKind.MON:
        return _TaskGeometry(centre, centre, -1.0, z)
    return _TaskGeometry(centre, centre, sweep_length(z, task.swath) / task.required_uavs, z)


class PlanEvaluator:
    """Decodes chromosomes and checks them against one scenario.

    Args:
        scenario: The problem instance.
        grid_cells: Theta* grid resolution per axis.
    """

    def __init__(self, scenario: MissionScenario, grid_cells: int = 64):
        self.scenario = scenario
        self.grid = Grid.from_scenario(scenario, grid_cells)
        self.planner = PathPlanner(self.grid)
        self.geometry = [_geometry(t) for t in scenario.tasks]
        self._task_cost: dict[tuple[int, int, SensorKind | None], tuple[float, float]] = {}
        self._covered: dict[tuple[int, GeoPoint], bool] = {}
        self._task_idx = {t.id: i for i, t in enumerate(scenario.tasks)}

    # ------------------------------------------------------------------ decode

    def task_cost(self, t: int, u: int, sensor: SensorKind | None) -> tuple[float, float]:
        """(durTask, distanceTask) for UAV ``u`` performing task ``t``."""
        key = (t, u, sensor)
        hit = self._task_cost.get(key)
        if hit is not None:
            return hit
        task = self.scenario.tasks[t]
        uav = self.scenario.uavs[u]
        speed = uav.performance(sensor).speed if sensor is not None else 0.5 * uav.max_speed
        geo = self.geometry[t]
        if task.window.mode is WindowMode.FREE:
            dur = max(geo.internal, 0.0) / speed
        else:
            dur = task.window.duration
        dist = speed * dur if task.kind is TaskKind.MON else geo.internal
        self._task_cost[key] = (dur, dist)
        return dur, dist

    def leg(self, t: int, u: int, order: int, profile: int, sensor: SensorKind | None,
            here: GeoPoint, prev_end: float | None) -> AssignmentTimes | None:
        """Timing/fuel/distance of UAV ``u`` flying from ``here`` to task ``t``.

        ``prev_end`` is the end of the previous leg, ``None`` for the first.
        Returns ``None`` when no NFZ-free path exists.
        """
        task = self.scenario.tasks[t]
        uav = self.scenario.uavs[u]
        fp = uav.profiles[profile]
        path = self.planner.path(here, self.geometry[t].entry)
        if path is None:
            return None
        dur_path = path.length / fp.speed
        dur_task, dist_task = self.task_cost(t, u, sensor)
        if task.window.mode is WindowMode.FIXED:
            start = task.window.start
            departure = start - dur_path
            loiter = 0.0 if prev_end is None else departure - prev_end
        else:
            departure = 0.0 if prev_end is None else prev_end
            start = departure + dur_path
            loiter = 0.0
        return AssignmentTimes(
            task=t, order=order, profile=profile, sensor=sensor,
            departure=departure, dur_path=dur_path, start=start, dur_task=dur_task,
            end=start + dur_task, dur_loiter=loiter,
            fuel_path=dur_path * fp.fuel_ratio,
            fuel_task=dur_task * fp.fuel_ratio,
            fuel_loiter=max(loiter, 0.0) * uav.min_fuel_ratio,
            distance_path=path.length, distance_task=dist_task, distance_loiter=0.0,
            path=path,
        )

    def close(self, sched: UavSchedule) -> bool:
        """Fill in the return leg and totals; ``False`` when the return has no path."""
        if not sched.legs:
            return True
        uav = self.scenario.uavs[sched.uav]
        fp = uav.profiles[sched.return_profile]
        last = sched.legs[-1]
        back = self.planner.path(self.geometry[last.task].exit, uav.position)
        if back is None:
            return False
        sched.return_path = back
        sched.distance_return = back.length
        sched.dur_return = back.length / fp.speed
        sched.fuel_return = sched.dur_return * fp.fuel_ratio
        sched.return_time = last.end + sched.dur_return
        ft = dist = fuel = 0.0
        for a in sched.legs:
            ft += a.dur_path + a.dur_task + a.dur_loiter
            dist += a.distance_path + a.distance_task + a.distance_loiter
            fuel += a.fuel_path + a.fuel_task + a.fuel_loiter
        sched.flight_time = ft + sched.dur_return
        sched.total_distance = dist + sched.distance_return
        sched.total_fuel = fuel + sched.fuel_return
        return True

    def decode(self, ch: Chromosome, validate: bool = True) -> DecodedPlan | ConstraintReport:
        if validate:
            check_structure(self.scenario, ch)
        scenario = self.scenario
        m = len(scenario.uavs)
        slot: dict[tuple[int, int], int] = {}
        sequences: list[list[int]] = [[] for _ in range(m)]
        for t in ch.order:
            for k, u in enumerate(ch.assign[t]):
                slot[(t, u)] = k
                sequences[u].append(t)
        by_task: dict[int, dict[int, AssignmentTimes]] = {}
        schedules = []
        for u in range(m):
            sched = UavSchedule(u, ch.gcs[u], ch.return_profile[u], [])
            here = scenario.uavs[u].position
            prev_end = None
            for order, t in enumerate(sequences[u]):
                k = slot[(t, u)]
                leg = self.leg(t, u, order, ch.path_profile[t][k], ch.sensor[t][k], here, prev_end)
                if leg is None:
                    return ConstraintReport.of([ConstraintViolation(
                        "Distance", "NoPath",
                        f"UAV {scenario.uavs[u].id} cannot reach task {scenario.tasks[t].id}")])
                sched.legs.append(leg)
                by_task.setdefault(t, {})[u] = leg
                here = self.geometry[t].exit
                prev_end = leg.end
            if not self.close(sched):
                return ConstraintReport.of([ConstraintViolation(
                    "Distance", "NoPath", f"UAV {scenario.uavs[u].id} cannot return home")])
            schedules.append(sched)
        return DecodedPlan(ch, schedules, by_task)

    # ------------------------------------------------------------------ checks

    def covered(self, g: int, p: GeoPoint) -> bool:
        key = (g, p)
        hit = self._covered.get(key)
        if hit is None:
            gcs = self.scenario.gcss[g]
            hit = distance(p, gcs.position) <= gcs.coverage
            self._covered[key] = hit
        return hit

    def sample_points(self, sched: UavSchedule):
        for leg in sched.legs:
            yield from leg.path.waypoints
            yield from self.geometry[leg.task].vertices
        if sched.return_path is not None:
            yield from sched.return_path.waypoints

    def evaluate(self, ch: Chromosome, validate: bool = True) -> tuple[ConstraintReport, DecodedPlan | None]:
        plan = self.decode(ch, validate)
        if isinstance(plan, ConstraintReport):
            return plan, None
        s = self.scenario
        violations = (
            check_sensors(s, plan) + check_order(s, plan) + check_gcs(s, plan, self)
            + check_temporal(s, plan) + check_dependencies(s, plan) + check_resources(s, plan)
        )
        if violations:
            return ConstraintReport.of(violations), None
        return ConstraintReport(True), plan


@functools.lru_cache(maxsize=16)
def evaluator_for(scenario: MissionScenario, grid_cells: int = 64) -> PlanEvaluator:
    return PlanEvaluator(scenario, grid_cells)


def decode(scenario: MissionScenario, ch: Chromosome, grid_cells: int = 64) -> DecodedPlan | ConstraintReport:
    return evaluator_for(scenario, grid_cells).decode(ch)


def evaluate(scenario: MissionScenario, ch: Chromosome, grid_cells: int = 64) -> tuple[ConstraintReport, DecodedPlan | None]:
    """Decode and run every constraint family; the plan is returned only when feasible."""
    return evaluator_for(scenario, grid_cells).evaluate(ch)


# ---------------------------------------------------------------------- checks


def check_sensors(scenario: MissionScenario, plan: DecodedPlan) -> list[ConstraintViolation]:
    out = []
    for sched in plan.schedules:
        uav = scenario.uavs[sched.uav]
        for leg in sched.legs:
            task = scenario.tasks[leg.task]
            if not task.compatible_sensors & uav.effective_sensors:
                out.append(ConstraintViolation(
                    "Sensor", "NoSensor", f"UAV {uav.id} has no sensor for task {task.id}"))
            elif leg.sensor not in valid_sensors(task, uav):
                out.append(ConstraintViolation(
                    "Sensor", "BadSensor", f"UAV {uav.id} cannot use {leg.sensor} on task {task.id}"))
    return out


def check_order(scenario: MissionScenario, plan: DecodedPlan) -> list[ConstraintViolation]:
    out = []
    for sched in plan.schedules:
        k = len(sched.legs)
        orders = [leg.order for leg in sched.legs]
        uav = scenario.uavs[sched.uav].id
        if any(not 0 <= o < k for o in orders):
            out.append(ConstraintViolation("Order", "OrderRange", f"UAV {uav}: order outside 0..{k - 1}"))
        if len(set(orders)) != k:
            out.append(ConstraintViolation("Order", "OrderDuplicate", f"UAV {uav}: repeated order value"))
    return out


def check_gcs(scenario: MissionScenario, plan: DecodedPlan,
              evaluator: PlanEvaluator | None = None) -> list[ConstraintViolation]:
    ev = evaluator or evaluator_for(scenario)
    out = []
    load = [0] * len(scenario.gcss)
    for sched in plan.schedules:
        if not sched.used:
            continue
        uav = scenario.uavs[sched.uav]
        g = sched.gcs
        if g == UNASSIGNED:
            out.append(ConstraintViolation("Gcs", "GcsUnassigned", f"UAV {uav.id} has no GCS"))
            continue
        load[g] += 1
        gcs = scenario.gcss[g]
        if uav.uav_type not in gcs.permitted_types:
            out.append(ConstraintViolation(
                "Gcs", "GcsType", f"GCS {gcs.id} cannot control {uav.uav_type.value} {uav.id}"))
        if not all(ev.covered(g, p) for p in ev.sample_points(sched)):
            out.append(ConstraintViolation("Gcs", "GcsCoverage", f"UAV {uav.id} leaves coverage of {gcs.id}"))
    for g, n in enumerate(load):
        if n and not n < scenario.gcss[g].max_uavs:
            out.append(ConstraintViolation(
                "Gcs", "GcsCapacity", f"GCS {scenario.gcss[g].id} controls {n} UAVs"))
    return out


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= EPS * max(1.0, abs(a), abs(b))


def check_temporal(scenario: MissionScenario, plan: DecodedPlan) -> list[ConstraintViolation]:
    out = []
    for sched in plan.schedules:
        uav = scenario.uavs[sched.uav]
        prev = None
        for leg in sched.legs:
            task = scenario.tasks[leg.task]
            speed = uav.profiles[leg.profile].speed
            ok = (_close(leg.start, leg.departure + leg.dur_path)
                  and _close(leg.end, leg.start + leg.dur_task)
                  and _close(leg.dur_path, leg.distance_path / speed)
                  and (_close(leg.dur_loiter, 0.0) if prev is None
                       else _close(leg.dur_loiter, leg.departure - prev.end)))
            if not ok:
                out.append(ConstraintViolation("Temporal", "Identity", f"UAV {uav.id}: inconsistent times on {task.id}"))
            if prev is None:
                if leg.departure < -EPS:
                    out.append(ConstraintViolation(
                        "Temporal", "EarlyDeparture", f"UAV {uav.id} must depart before mission start for {task.id}"))
            elif not prev.end <= leg.departure + EPS:
                out.append(ConstraintViolation(
                    "Temporal", "Overlap",
                    f"UAV {uav.id}: {scenario.tasks[prev.task].id} ends after departure to {task.id}"))
            prev = leg
        if sched.legs:
            fp = uav.profiles[sched.return_profile]
            if not (_close(sched.dur_return, sched.distance_return / fp.speed)
                    and _close(sched.return_time, sched.legs[-1].end + sched.dur_return)):
                out.append(ConstraintViolation("Temporal", "Identity", f"UAV {uav.id}: inconsistent return"))
    return out


def allen_holds(relation: str, si: float, ei: float, sj: float, ej: float) -> bool:
    base, swapped = ALLEN_RELATIONS[relation]
    if swapped:
        si, ei, sj, ej = sj, ej, si, ei
    le = lambda a, b: a <= b + EPS  # noqa: E731
    eq = lambda a, b: abs(a - b) <= EPS  # noqa: E731
    if base == "before":
        return le(ei, sj)
    if base == "meets":
        return eq(ei, sj)
    if base == "overlaps":
        return le(si, sj) and le(sj, ei) and le(ei, ej)
    if base == "starts":
        return eq(si, sj) and le(ei, ej)
    if base == "during":
        return le(sj, si) and le(ei, ej)
    if base == "finishes":
        return le(sj, si) and eq(ei, ej)
    return eq(si, sj) and eq(ei, ej)


def check_dependencies(scenario: MissionScenario, plan: DecodedPlan) -> list[ConstraintViolation]:
    out = []
    assign = plan.chromosome.assign
    for d in scenario.dependencies:
        i, j = scenario.task_index(d.first), scenario.task_index(d.second)
        if d.kind is DependencyKind.SAME_UAV:
            if set(assign[i]) != set(assign[j]):
                out.append(ConstraintViolation("Dependency", "SameUav", f"{d.first} and {d.second} need the same UAVs"))
        elif d.kind is DependencyKind.DIFF_UAV:
            if set(assign[i]) & set(assign[j]):
                out.append(ConstraintViolation("Dependency", "DiffUav", f"{d.first} and {d.second} share a UAV"))
        else:
            legs_i = plan.by_task.get(i, {})
            legs_j = plan.by_task.get(j, {})
            if not all(allen_holds(d.relation, a.start, a.end, b.start, b.end)
                       for a in legs_i.values() for b in legs_j.values()):
                out.append(ConstraintViolation(
                    "Dependency", "Time", f"{d.first} {d.relation} {d.second} does not hold"))
    return out


def check_resources(scenario: MissionScenario, plan: DecodedPlan) -> list[ConstraintViolation]:
    out = []
    for sched in plan.schedules:
        if not sched.used:
            continue
        uav = scenario.uavs[sched.uav]
        if not sched.flight_time < uav.autonomy:
            out.append(ConstraintViolation("Autonomy", "Autonomy", f"UAV {uav.id} flies {sched.flight_time:.3f} h"))
        if not sched.total_distance < uav.range:
            out.append(ConstraintViolation("Distance", "Range", f"UAV {uav.id} flies {sched.total_distance:.3f} NM"))
        if not sched.total_fuel < uav.initial_fuel:
            out.append(ConstraintViolation("Fuel", "Fuel", f"UAV {uav.id} burns {sched.total_fuel:.3f} kg"))
    return out
