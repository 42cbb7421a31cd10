"""Seeded synthetic scenarios shaped like the benchmark mission families.

Coordinates are invented; each recipe fixes only the structural mix (task
kinds, fleet, stations, no-fly zones, fixed/unfixed windows, dependencies).
Fixed windows are cut from a feasible witness plan so every generated
scenario has at least one feasible chromosome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from shapely.geometry import LineString, Point, Polygon
from shapely.ops import unary_union

from missionplan.geo import distance
from missionplan.plan import Chromosome, PlanEvaluator
from missionplan.scenario import (
    Dependency,
    DependencyKind,
    GcsSpec,
    GeoPoint,
    MissionScenario,
    NoFlyZone,
    Region,
    TaskKind,
    TaskSpec,
    TimeWindow,
    UavType,
    catalog_uav,
    is_compatible,
    valid_sensors,
    validate_scenario,
)

MAX_ATTEMPTS = 100


class DatasetError(RuntimeError):
    """Raised when a recipe cannot be realised as a feasible scenario."""


@dataclass(frozen=True)
class DatasetRecipe:
    name: str
    task_mix: dict[str, int]
    uav_mix: dict[str, int]
    gcs_count: int = 1
    nfz_count: int = 0
    fixed_count: int = 0
    unfixed_count: int = 0
    dependency_count: int = 0
    seed: int = 0
    small_gcs: bool = False
    center: tuple[float, float] = (-3.7, 40.4)
    size: float = 2.0  # degrees per side
    grid_cells: int = 64

    @property
    def n_tasks(self) -> int:
        return sum(self.task_mix.values())

    def with_seed(self, seed: int) -> "DatasetRecipe":
        return DatasetRecipe(**{**self.__dict__, "seed": seed})

    def check(self) -> None:
        if any(v < 0 for v in (*self.task_mix.values(), *self.uav_mix.values(), self.gcs_count,
                               self.nfz_count, self.fixed_count, self.unfixed_count,
                               self.dependency_count)):
            raise ValueError("recipe counts must be non-negative")
        if self.fixed_count + self.unfixed_count != self.n_tasks:
            raise ValueError("fixed + unfixed must equal the number of tasks")
        for k in self.task_mix:
            TaskKind(k)
        for k in self.uav_mix:
            UavType(k)


_STD_TASKS = {"MON": 2, "ES": 2, "TP": 2}
_STD4 = {"HALE": 1, "MALE": 1, "UCAV": 1, "URAV": 1}
_STD5 = {"HALE": 1, "MALE": 1, "UCAV": 1, "URAV": 2}

RECIPES: dict[str, DatasetRecipe] = {
    "d1": DatasetRecipe("d1", _STD_TASKS, _STD4, 1, 0, 6, 0, 0),
    "d2": DatasetRecipe("d2", _STD_TASKS, _STD4, 1, 1, 6, 0, 0),
    "d3": DatasetRecipe("d3", {"MAP": 3}, {"HALE": 1, "MALE": 1}, 1, 0, 0, 3, 0),
    "d4a": DatasetRecipe("d4a", _STD_TASKS, _STD5, 2, 2, 6, 0, 0, small_gcs=True),
    "d4b": DatasetRecipe("d4b", _STD_TASKS, _STD5, 2, 2, 3, 3, 0, small_gcs=True),
    "d4c": DatasetRecipe("d4c", _STD_TASKS, _STD5, 2, 2, 3, 3, 1, small_gcs=True),
    "d4d": DatasetRecipe("d4d", _STD_TASKS, _STD5, 2, 2, 0, 6, 0, small_gcs=True),
    "d4e": DatasetRecipe("d4e", _STD_TASKS, _STD5, 2, 2, 0, 6, 3, small_gcs=True),
    "d5": DatasetRecipe("d5", {"MON": 2, "ES": 1, "TP": 2, "MAP": 2},
                        {"MALE": 2, "UCAV": 1, "URAV": 2}, 3, 3, 4, 3, 1, small_gcs=True),
}


def recipe(name: str, seed: int = 0) -> DatasetRecipe:
    try:
        return RECIPES[name].with_seed(seed)
    except KeyError:
        raise KeyError(f"unknown recipe {name!r}; choose from {sorted(RECIPES)}") from None


def random_small_recipe(seed: int, max_tasks: int = 4, max_uavs: int = 3) -> DatasetRecipe:
    """Small all-fixed single-GCS instance used for exhaustive comparisons."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n = int(rng.integers(2, max_tasks + 1))
    m = int(rng.integers(2, max_uavs + 1))
    kinds = ["MON", "ES", "TP"]
    task_mix: dict[str, int] = {}
    for _ in range(n):
        k = kinds[int(rng.integers(len(kinds)))]
        task_mix[k] = task_mix.get(k, 0) + 1
    types = [t.value for t in UavType]
    needed = [TaskKind(k).value for k in task_mix]
    while True:
        uav_mix: dict[str, int] = {}
        for _ in range(m):
            k = types[int(rng.integers(len(types)))]
            uav_mix[k] = uav_mix.get(k, 0) + 1
        # redraw fleets that leave some task kind without a usable sensor
        if all(any(_can_serve(u, k) for u in uav_mix) for k in needed):
            break
    return DatasetRecipe(f"small{seed}", task_mix, uav_mix, 1, 0, n, 0, 0, seed=seed)


def _can_serve(uav_type: str, kind: str) -> bool:
    probe = TaskSpec("probe", TaskKind(kind), (GeoPoint(0.0, 0.0),), TimeWindow.free())
    return is_compatible(probe, catalog_uav(uav_type, "probe", GeoPoint(0.0, 0.0)))


# --------------------------------------------------------------------- geometry


def _inside(region: Region, lon: float, lat: float, margin: float) -> bool:
    return (region.lon_min + margin <= lon <= region.lon_max - margin
            and region.lat_min + margin <= lat <= region.lat_max - margin)


def _rect(cx: float, cy: float, a: float, b: float, angle: float) -> list[tuple[float, float]]:
    c, s = math.cos(angle), math.sin(angle)
    pts = [(-a / 2, -b / 2), (a / 2, -b / 2), (a / 2, b / 2), (-a / 2, b / 2)]
    return [(cx + x * c - y * s, cy + x * s + y * c) for x, y in pts]


def _nfzs(rng, region: Region, count: int) -> list[NoFlyZone]:
    area = (region.lon_max - region.lon_min) * (region.lat_max - region.lat_min)
    for _ in range(MAX_ATTEMPTS):
        zones, polys = [], []
        for k in range(count):
            cx = rng.uniform(region.lon_min + 0.45, region.lon_max - 0.45)
            cy = rng.uniform(region.lat_min + 0.45, region.lat_max - 0.45)
            pts = _rect(cx, cy, rng.uniform(0.15, 0.35), rng.uniform(0.15, 0.35), rng.uniform(0, math.pi))
            polys.append(Polygon(pts))
            zones.append(NoFlyZone(f"NFZ{k + 1}", tuple(GeoPoint(x, y, 0.0) for x, y in pts)))
        if not polys or unary_union(polys).area <= 0.1 * area:
            return zones
    raise DatasetError("could not place no-fly zones within 10% of the region")


def _border_point(rng, region: Region, side: str, jitter: float) -> GeoPoint:
    mid_lat = 0.5 * (region.lat_min + region.lat_max)
    mid_lon = 0.5 * (region.lon_min + region.lon_max)
    if side == "W":
        return GeoPoint(region.lon_min, mid_lat + rng.uniform(-jitter, jitter), 0.0)
    if side == "E":
        return GeoPoint(region.lon_max, mid_lat + rng.uniform(-jitter, jitter), 0.0)
    if side == "S":
        return GeoPoint(mid_lon + rng.uniform(-jitter, jitter), region.lat_min, 0.0)
    return GeoPoint(mid_lon + rng.uniform(-jitter, jitter), region.lat_max, 0.0)


def _zone(rng, kind: TaskKind, region: Region, blocked) -> tuple[GeoPoint, ...]:
    for _ in range(1000):
        cx = rng.uniform(region.lon_min + 0.2, region.lon_max - 0.2)
        cy = rng.uniform(region.lat_min + 0.2, region.lat_max - 0.2)
        if kind is TaskKind.TP:
            pts = [(cx, cy)]
        elif kind is TaskKind.ES:
            pts = [(cx, cy)]
            heading = rng.uniform(0, 2 * math.pi)
            for _ in range(2):
                heading += rng.uniform(-0.6, 0.6)
                step = rng.uniform(0.08, 0.15)
                pts.append((pts[-1][0] + step * math.cos(heading), pts[-1][1] + step * math.sin(heading)))
        elif kind is TaskKind.MON:
            side = rng.uniform(0.05, 0.1)
            pts = _rect(cx, cy, side, side, rng.uniform(0, math.pi / 2))
        else:
            pts = _rect(cx, cy, rng.uniform(0.1, 0.15), rng.uniform(0.1, 0.15), rng.uniform(0, math.pi / 2))
        if not all(_inside(region, x, y, 0.05) for x, y in pts):
            continue
        if kind is TaskKind.TP:
            shape = Point(pts[0]).buffer(0.03)
        elif kind is TaskKind.ES:
            shape = LineString(pts).buffer(0.03)
        else:
            shape = Polygon(pts).buffer(0.03)
        if blocked is not None and shape.intersects(blocked):
            continue
        return tuple(GeoPoint(float(x), float(y), 0.0) for x, y in pts)
    raise DatasetError(f"could not place a {kind.value} zone clear of no-fly zones")


# --------------------------------------------------------------------- builder


def _attempt(r: DatasetRecipe, rng) -> MissionScenario | None:
    half = r.size / 2
    region = Region(r.center[0] - half, r.center[1] - half, r.center[0] + half, r.center[1] + half)
    diag = distance(GeoPoint(region.lon_min, region.lat_min), GeoPoint(region.lon_max, region.lat_max))
    nfzs = _nfzs(rng, region, r.nfz_count)
    blocked = unary_union([Polygon([(p.lon, p.lat) for p in z.polygon]) for z in nfzs]) if nfzs else None

    uavs = []
    sides = "WESN"
    for t_name in sorted(r.uav_mix, key=lambda k: [x.value for x in UavType].index(k)):
        for _ in range(r.uav_mix[t_name]):
            pos = _border_point(rng, region, sides[int(rng.integers(4))], half * 0.9)
            uavs.append(catalog_uav(t_name, f"U{len(uavs) + 1}", pos))

    gcss = []
    n_big = r.gcs_count - (1 if r.small_gcs and r.gcs_count > 1 else 0)
    for k in range(r.gcs_count):
        big = k < n_big
        side = "WE"[k % 2] if big else ("S", "N")[int(rng.integers(2))]
        pos = _border_point(rng, region, side, 0.2 if big else half * 0.5)
        gcss.append(GcsSpec(
            id=f"G{k + 1}", position=pos,
            max_uavs=len(uavs) + 1 if big else 2,
            permitted_types=frozenset(UavType),
            coverage=(0.8 if big else 0.3) * diag,
        ))

    kinds = [TaskKind(k) for k in ("MON", "ES", "TP", "MAP") for _ in range(r.task_mix.get(k, 0))]
    fixed = set(int(i) for i in rng.choice(len(kinds), size=r.fixed_count, replace=False)) if r.fixed_count else set()
    draft = []
    for i, kind in enumerate(kinds):
        zone = _zone(rng, kind, region, blocked)
        dur = float(round(rng.uniform(0.5, 1.5), 3))
        if kind is TaskKind.MAP:
            window = TimeWindow.fixed(0.0, dur) if i in fixed else TimeWindow.free()
            draft.append(TaskSpec(f"T{i + 1}", kind, zone, window, multi_uav=True, required_uavs=2))
        else:
            window = TimeWindow.fixed(0.0, dur) if i in fixed else TimeWindow.duration_only(dur)
            draft.append(TaskSpec(f"T{i + 1}", kind, zone, window))
    for t in draft:
        if sum(is_compatible(t, u) for u in uavs) < t.required_uavs:
            raise DatasetError(f"recipe {r.name}: no UAV mix can perform {t.kind.value}")

    base = MissionScenario(tuple(draft), tuple(uavs), tuple(gcss), region, tuple(nfzs), (), r.name)
    witness, tasks = _witness(rng, base, fixed)
    if witness is None:
        return None
    scen = MissionScenario(tuple(tasks), base.uavs, base.gcss, region, base.nfzs, (), r.name)
    ev = PlanEvaluator(scen, r.grid_cells)
    report, plan = ev.evaluate(witness)
    if not report.feasible:
        return None
    deps = _dependencies(rng, scen, witness, plan, r.dependency_count)
    if deps is None:
        return None
    scen = MissionScenario(scen.tasks, scen.uavs, scen.gcss, region, scen.nfzs, tuple(deps), r.name)
    if validate_scenario(scen):
        return None
    report, _ = PlanEvaluator(scen, r.grid_cells).evaluate(witness)
    return scen if report.feasible else None


def _witness(rng, scen: MissionScenario, fixed: set[int]):
    """Random feasible-looking plan; fixed windows are cut around it."""
    ev = PlanEvaluator(scen)
    n, m = len(scen.tasks), len(scen.uavs)
    assign = []
    for t, task in enumerate(scen.tasks):
        cands = [u for u in range(m) if is_compatible(task, scen.uavs[u])]
        pick = rng.choice(len(cands), size=task.required_uavs, replace=False)
        assign.append(tuple(sorted(cands[int(i)] for i in pick)))
    order = [int(x) for x in rng.permutation(n)]
    sensors = tuple(tuple(valid_sensors(scen.tasks[t], scen.uavs[u])[0] for u in assign[t]) for t in range(n))
    pos = [u.position for u in scen.uavs]
    clock = [0.0] * m
    tasks = list(scen.tasks)
    for t in order:
        task = scen.tasks[t]
        arrive, durs = [], []
        for k, u in enumerate(assign[t]):
            path = ev.planner.path(pos[u], ev.geometry[t].entry)
            if path is None:
                return None, tasks
            arrive.append(clock[u] + path.length / scen.uavs[u].profiles[0].speed)
            durs.append(ev.task_cost(t, u, sensors[t][k])[0])
        if t in fixed:
            start = math.ceil((max(arrive) + float(rng.uniform(0.0, 0.5))) * 1000) / 1000
            dur = task.window.duration
            tasks[t] = TaskSpec(task.id, task.kind, task.zone, TimeWindow.fixed(start, start + dur),
                                task.multi_uav, task.required_uavs, task.swath)
            ends = [start + dur] * len(assign[t])
        else:
            ends = [a + d for a, d in zip(arrive, durs)]
        for k, u in enumerate(assign[t]):
            clock[u] = ends[k]
            pos[u] = ev.geometry[t].exit
    gcs = [0] * m
    ch = Chromosome(
        assign=tuple(assign), order=tuple(order), gcs=tuple(gcs),
        path_profile=tuple(tuple(0 for _ in a) for a in assign),
        sensor=sensors, return_profile=tuple(0 for _ in range(m)),
    )
    # first station that covers and can host each used UAV
    scen2 = MissionScenario(tuple(tasks), scen.uavs, scen.gcss, scen.region, scen.nfzs, (), scen.name)
    ev2 = PlanEvaluator(scen2)
    plan = ev2.decode(ch)
    if not hasattr(plan, "schedules"):
        return None, tasks
    load = [0] * len(scen.gcss)
    for sched in plan.schedules:
        if not sched.used:
            continue
        for g, station in enumerate(scen.gcss):
            if (load[g] + 1 < station.max_uavs
                    and all(ev2.covered(g, p) for p in ev2.sample_points(sched))):
                gcs[sched.uav] = g
                load[g] += 1
                break
        else:
            return None, tasks
    return Chromosome(ch.assign, ch.order, tuple(gcs), ch.path_profile, ch.sensor, ch.return_profile), tasks


def _dependencies(rng, scen: MissionScenario, ch: Chromosome, plan, count: int):
    if count == 0:
        return []
    options = []
    n = len(scen.tasks)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            a, b = set(ch.assign[i]), set(ch.assign[j])
            if i < j and a == b:
                options.append(Dependency(DependencyKind.SAME_UAV, scen.tasks[i].id, scen.tasks[j].id))
            if i < j and not a & b:
                options.append(Dependency(DependencyKind.DIFF_UAV, scen.tasks[i].id, scen.tasks[j].id))
            legs_i = plan.by_task[i].values()
            legs_j = plan.by_task[j].values()
            if all(x.end <= y.start for x in legs_i for y in legs_j):
                options.append(Dependency(DependencyKind.TIME, scen.tasks[i].id, scen.tasks[j].id, "before"))
    if len(options) < count:
        return None
    picked, pairs = [], set()
    for k in rng.permutation(len(options)):
        d = options[int(k)]
        pair = frozenset((d.first, d.second))
        if pair in pairs:
            continue
        picked.append(d)
        pairs.add(pair)
        if len(picked) == count:
            return picked
    return None


def generate_dataset(r: DatasetRecipe) -> MissionScenario:
    """Deterministic scenario for ``r``; raises :class:`DatasetError` after 100 failed tries."""
    r.check()
    rng = np.random.Generator(np.random.PCG64(r.seed))
    for _ in range(MAX_ATTEMPTS):
        scen = _attempt(r, rng)
        if scen is not None:
            return scen
    raise DatasetError(f"recipe {r.name} (seed {r.seed}) failed feasibility after {MAX_ATTEMPTS} attempts")
