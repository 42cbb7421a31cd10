"""Problem-instance data model: tasks, UAVs, ground control stations, zones.

Every type here is a frozen dataclass so a :class:`MissionScenario` can be
shared freely between evaluators. Structural problems are reported by
:func:`validate_scenario` as data instead of being raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from shapely.geometry import Polygon


class SensorKind(str, Enum):
    EOIR_VIDEO = "EOIR_Video"
    EOIR_THERMAL = "EOIR_Thermal"
    EOIR_PLAIN = "EOIR_Plain"
    SAR = "SAR"
    ISAR = "ISAR"
    MPR = "MPR"


class TaskKind(str, Enum):
    MON = "MON"  # monitor a zone
    ES = "ES"  # escort along a path
    TP = "TP"  # photograph a target
    MAP = "MAP"  # map a zone


class UavType(str, Enum):
    URAV = "URAV"
    MALE = "MALE"
    HALE = "HALE"
    UCAV = "UCAV"


class WindowMode(str, Enum):
    FIXED = "Fixed"
    DURATION_ONLY = "DurationOnly"
    FREE = "Free"


class ProfileKind(str, Enum):
    ROUTE = "Route"
    CLIMB = "Climb"
    DESCENT = "Descent"


class DependencyKind(str, Enum):
    TIME = "Time"
    SAME_UAV = "SameUav"
    DIFF_UAV = "DiffUav"


# relation token -> (base relation, swapped?)
ALLEN_RELATIONS: dict[str, tuple[str, bool]] = {
    "before": ("before", False),
    "after": ("before", True),
    "meets": ("meets", False),
    "met-by": ("meets", True),
    "overlaps": ("overlaps", False),
    "overlapped-by": ("overlaps", True),
    "starts": ("starts", False),
    "started-by": ("starts", True),
    "during": ("during", False),
    "contains": ("during", True),
    "finishes": ("finishes", False),
    "finished-by": ("finishes", True),
    "equals": ("equals", False),
}

_TASK_SENSORS: dict[TaskKind, frozenset[SensorKind]] = {
    TaskKind.MON: frozenset({SensorKind.EOIR_VIDEO, SensorKind.ISAR}),
    TaskKind.ES: frozenset({SensorKind.EOIR_THERMAL, SensorKind.SAR}),
    TaskKind.TP: frozenset({SensorKind.EOIR_PLAIN}),
    TaskKind.MAP: frozenset({SensorKind.SAR, SensorKind.ISAR, SensorKind.MPR}),
}

# physical sensor -> requirements it satisfies
_SUBSUMES: dict[SensorKind, frozenset[SensorKind]] = {
    SensorKind.EOIR_PLAIN: frozenset(
        {SensorKind.EOIR_PLAIN, SensorKind.EOIR_VIDEO, SensorKind.EOIR_THERMAL}
    ),
    SensorKind.EOIR_VIDEO: frozenset({SensorKind.EOIR_VIDEO, SensorKind.EOIR_PLAIN}),
    SensorKind.EOIR_THERMAL: frozenset({SensorKind.EOIR_THERMAL, SensorKind.EOIR_PLAIN}),
    SensorKind.SAR: frozenset({SensorKind.SAR}),
    SensorKind.ISAR: frozenset({SensorKind.ISAR}),
    SensorKind.MPR: frozenset({SensorKind.MPR}),
}

# Table 3: range NM, autonomy h, cost/h, max speed kt, max altitude ft, max fuel kg, sensors
UAV_CATALOG: dict[UavType, dict] = {
    UavType.URAV: dict(
        range=1000.0, autonomy=20.0, cost_per_hour=5.0, max_speed=120.0,
        max_altitude=20000.0, max_fuel=500.0,
        sensors=(SensorKind.EOIR_VIDEO, SensorKind.EOIR_THERMAL),
    ),
    UavType.MALE: dict(
        range=5000.0, autonomy=30.0, cost_per_hour=10.0, max_speed=250.0,
        max_altitude=40000.0, max_fuel=2500.0,
        sensors=(SensorKind.EOIR_PLAIN, SensorKind.MPR),
    ),
    UavType.HALE: dict(
        range=15000.0, autonomy=40.0, cost_per_hour=15.0, max_speed=400.0,
        max_altitude=65000.0, max_fuel=6000.0,
        sensors=(SensorKind.EOIR_VIDEO, SensorKind.ISAR),
    ),
    UavType.UCAV: dict(
        range=1500.0, autonomy=15.0, cost_per_hour=25.0, max_speed=450.0,
        max_altitude=35000.0, max_fuel=9000.0,
        sensors=(SensorKind.EOIR_PLAIN, SensorKind.SAR),
    ),
}


@dataclass(frozen=True)
class GeoPoint:
    """Longitude/latitude in degrees, altitude in feet."""

    lon: float
    lat: float
    alt: float = 0.0


@dataclass(frozen=True)
class TimeWindow:
    mode: WindowMode
    start: float | None = None
    end: float | None = None
    duration: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", WindowMode(self.mode))

    @classmethod
    def fixed(cls, start: float, end: float) -> "TimeWindow":
        return cls(WindowMode.FIXED, start, end, end - start)

    @classmethod
    def duration_only(cls, duration: float) -> "TimeWindow":
        return cls(WindowMode.DURATION_ONLY, None, None, duration)

    @classmethod
    def free(cls) -> "TimeWindow":
        return cls(WindowMode.FREE)

    @property
    def is_fixed(self) -> bool:
        return self.mode is WindowMode.FIXED


@dataclass(frozen=True)
class TaskSpec:
    id: str
    kind: TaskKind
    zone: tuple[GeoPoint, ...]
    window: TimeWindow
    multi_uav: bool = False
    required_uavs: int = 1
    swath: float = 1.0  # NM, only used by MAP sweeps

    @property
    def compatible_sensors(self) -> frozenset[SensorKind]:
        return _TASK_SENSORS[self.kind]


@dataclass(frozen=True)
class FlightProfile:
    id: str
    kind: ProfileKind
    speed: float  # kt
    fuel_ratio: float  # kg/h
    altitude: float | None = None  # ft, Route profiles
    angle: float | None = None  # deg, Climb/Descent profiles


@dataclass(frozen=True)
class SensorPerformance:
    speed: float  # kt
    altitude: float  # ft


@dataclass(frozen=True)
class UavSpec:
    id: str
    uav_type: UavType
    position: GeoPoint
    initial_fuel: float
    sensors: tuple[SensorKind, ...]
    range: float
    autonomy: float
    cost_per_hour: float
    max_speed: float
    max_altitude: float
    max_fuel: float
    profiles: tuple[FlightProfile, ...]
    sensor_performance: tuple[tuple[SensorKind, SensorPerformance], ...] = ()

    @property
    def effective_sensors(self) -> frozenset[SensorKind]:
        return effective_sensors(self.sensors)

    def performance(self, required: SensorKind) -> SensorPerformance:
        """Optimum execution speed/altitude when fulfilling ``required``.

        The lookup goes through the physical sensor that satisfies the
        requirement (a plain EO/IR sensor serves a videotracking request).
        """
        table = dict(self.sensor_performance)
        if required in table:
            return table[required]
        for physical in self.sensors:
            if required in _SUBSUMES[physical] and physical in table:
                return table[physical]
        return SensorPerformance(0.5 * self.max_speed, 0.5 * self.max_altitude)

    @property
    def min_fuel_ratio(self) -> float:
        return min(p.fuel_ratio for p in self.profiles)


@dataclass(frozen=True)
class GcsSpec:
    id: str
    position: GeoPoint
    max_uavs: int
    permitted_types: frozenset[UavType]
    coverage: float  # NM


@dataclass(frozen=True)
class Dependency:
    kind: DependencyKind
    first: str
    second: str
    relation: str | None = None  # Allen token for Time dependencies


@dataclass(frozen=True)
class NoFlyZone:
    id: str
    polygon: tuple[GeoPoint, ...]


@dataclass(frozen=True)
class Region:
    lon_min: float
    lat_min: float
    lon_max: float
    lat_max: float

    def contains(self, p: GeoPoint) -> bool:
        return self.lon_min <= p.lon <= self.lon_max and self.lat_min <= p.lat <= self.lat_max


@dataclass(frozen=True)
class MissionScenario:
    tasks: tuple[TaskSpec, ...]
    uavs: tuple[UavSpec, ...]
    gcss: tuple[GcsSpec, ...]
    region: Region
    nfzs: tuple[NoFlyZone, ...] = ()
    dependencies: tuple[Dependency, ...] = ()
    name: str = field(default="scenario", compare=False)

    def task_index(self, task_id: str) -> int:
        for i, t in enumerate(self.tasks):
            if t.id == task_id:
                return i
        raise KeyError(task_id)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


def task_sensor_set(kind: TaskKind | str) -> frozenset[SensorKind]:
    return _TASK_SENSORS[TaskKind(kind)]


def effective_sensors(sensors: Iterable[SensorKind]) -> frozenset[SensorKind]:
    out: set[SensorKind] = set()
    for s in sensors:
        out |= _SUBSUMES[SensorKind(s)]
    return frozenset(out)


def valid_sensors(task: TaskSpec, uav: UavSpec) -> tuple[SensorKind, ...]:
    """Sensors ``uav`` may use on ``task``, in enumeration order."""
    usable = task.compatible_sensors & uav.effective_sensors
    return tuple(s for s in SensorKind if s in usable)


def is_compatible(task: TaskSpec, uav: UavSpec) -> bool:
    return bool(task.compatible_sensors & uav.effective_sensors)


def default_profiles(max_speed: float, max_altitude: float, max_fuel: float,
                     autonomy: float) -> tuple[FlightProfile, ...]:
    altitude = 0.8 * max_altitude
    return (
        FlightProfile("min-consumption", ProfileKind.ROUTE, 0.6 * max_speed,
                      max_fuel / (1.1 * autonomy), altitude=altitude),
        FlightProfile("max-speed", ProfileKind.ROUTE, max_speed,
                      max_fuel / (0.55 * autonomy), altitude=altitude),
    )


def catalog_uav(uav_type: UavType | str, id: str, position: GeoPoint,
                fuel: float | None = None) -> UavSpec:
    """Build a UAV from the type catalog; ``fuel`` defaults to a full tank."""
    try:
        kind = UavType(uav_type)
    except ValueError:
        raise ValueError(f"unknown UAV type {uav_type!r}") from None
    row = UAV_CATALOG[kind]
    return UavSpec(
        id=id,
        uav_type=kind,
        position=position,
        initial_fuel=row["max_fuel"] if fuel is None else float(fuel),
        sensors=row["sensors"],
        range=row["range"],
        autonomy=row["autonomy"],
        cost_per_hour=row["cost_per_hour"],
        max_speed=row["max_speed"],
        max_altitude=row["max_altitude"],
        max_fuel=row["max_fuel"],
        profiles=default_profiles(row["max_speed"], row["max_altitude"],
                                  row["max_fuel"], row["autonomy"]),
    )


def _point_ok(p: GeoPoint) -> bool:
    return (
        -180.0 <= p.lon <= 180.0
        and -90.0 <= p.lat <= 90.0
        and math.isfinite(p.alt)
        and p.alt >= 0.0
    )


def _check_window(task: TaskSpec, out: list[Violation]) -> None:
    w = task.window
    if w.mode is WindowMode.FIXED:
        if w.start is None or w.end is None or w.duration is None:
            out.append(Violation("window", f"task {task.id}: fixed window needs start/end"))
        elif not (w.end - w.start > 0) or abs((w.end - w.start) - w.duration) > 1e-9:
            out.append(Violation("window", f"task {task.id}: end - start must equal duration > 0"))
    elif w.mode is WindowMode.DURATION_ONLY:
        if w.duration is None or not w.duration > 0:
            out.append(Violation("window", f"task {task.id}: duration must be > 0"))
    elif task.kind is TaskKind.MON:
        out.append(Violation("window", f"task {task.id}: MON tasks need a duration"))


def validate_scenario(scenario: MissionScenario) -> list[Violation]:
    """Return every invariant violation of ``scenario`` (empty when valid)."""
    out: list[Violation] = []
    s = scenario
    if not s.tasks:
        out.append(Violation("empty", "at least one task is required"))
    if not s.uavs:
        out.append(Violation("empty", "at least one UAV is required"))
    if not s.gcss:
        out.append(Violation("empty", "at least one GCS is required"))

    for label, items in (("task", s.tasks), ("uav", s.uavs), ("gcs", s.gcss), ("nfz", s.nfzs)):
        seen: set[str] = set()
        for item in items:
            if item.id in seen:
                out.append(Violation("duplicate-id", f"duplicate {label} id {item.id!r}"))
            seen.add(item.id)

    r = s.region
    if not (r.lon_min < r.lon_max and r.lat_min < r.lat_max):
        out.append(Violation("region", "region bounds are empty"))

    shapes = {TaskKind.TP: (1, 1), TaskKind.ES: (2, None),
              TaskKind.MON: (3, None), TaskKind.MAP: (3, None)}
    for t in s.tasks:
        if t.multi_uav and t.kind is not TaskKind.MAP:
            out.append(Violation("multi-uav", f"task {t.id}: multiUav only for MAP"))
        if t.required_uavs < 1:
            out.append(Violation("multi-uav", f"task {t.id}: requiredUavCount must be positive"))
        elif not t.multi_uav and t.required_uavs != 1:
            out.append(Violation("multi-uav", f"task {t.id}: requiredUavCount must be 1 unless multiUav"))
        elif t.required_uavs > len(s.uavs):
            out.append(Violation("multi-uav", f"task {t.id}: requires more UAVs than the fleet has"))
        lo, hi = shapes[t.kind]
        if len(t.zone) < lo or (hi is not None and len(t.zone) > hi):
            out.append(Violation("zone", f"task {t.id}: {t.kind.value} zone has {len(t.zone)} points"))
        if t.kind in (TaskKind.MON, TaskKind.MAP) and len(t.zone) >= 3:
            if not Polygon([(p.lon, p.lat) for p in t.zone]).is_valid:
                out.append(Violation("zone", f"task {t.id}: zone polygon is not simple"))
        if t.swath <= 0:
            out.append(Violation("zone", f"task {t.id}: swath must be positive"))
        for p in t.zone:
            if not _point_ok(p):
                out.append(Violation("coordinates", f"task {t.id}: point out of range"))
            elif not r.contains(p):
                out.append(Violation("region", f"task {t.id}: zone leaves the region"))
        _check_window(t, out)

    for u in s.uavs:
        if not _point_ok(u.position):
            out.append(Violation("coordinates", f"uav {u.id}: position out of range"))
        elif not r.contains(u.position):
            out.append(Violation("region", f"uav {u.id}: position outside region"))
        if not u.profiles:
            out.append(Violation("profiles", f"uav {u.id}: needs at least one flight profile"))
        positive = (u.range, u.autonomy, u.cost_per_hour, u.max_speed,
                    u.max_altitude, u.max_fuel, u.initial_fuel)
        if not all(v > 0 for v in positive):
            out.append(Violation("uav-field", f"uav {u.id}: numeric fields must be positive"))
        if u.initial_fuel > u.max_fuel:
            out.append(Violation("fuel", f"uav {u.id}: initial fuel exceeds tank capacity"))
        if not u.sensors:
            out.append(Violation("sensors", f"uav {u.id}: carries no sensors"))
        for p in u.profiles:
            if not (p.speed > 0 and p.fuel_ratio > 0):
                out.append(Violation("profiles", f"uav {u.id}: profile {p.id} needs speed, fuelRatio > 0"))
            if p.speed > u.max_speed:
                out.append(Violation("profiles", f"uav {u.id}: profile {p.id} exceeds max speed"))
            if p.altitude is not None and p.altitude > u.max_altitude:
                out.append(Violation("profiles", f"uav {u.id}: profile {p.id} exceeds max altitude"))
        for _, perf in u.sensor_performance:
            if not perf.speed > 0:
                out.append(Violation("sensors", f"uav {u.id}: sensor speed must be positive"))

    for g in s.gcss:
        if g.max_uavs < 1:
            out.append(Violation("gcs", f"gcs {g.id}: maxUavs must be >= 1"))
        if not g.permitted_types:
            out.append(Violation("gcs", f"gcs {g.id}: permitted types empty"))
        if not g.coverage > 0:
            out.append(Violation("gcs", f"gcs {g.id}: coverage must be positive"))
        if not _point_ok(g.position):
            out.append(Violation("coordinates", f"gcs {g.id}: position out of range"))
        elif not r.contains(g.position):
            out.append(Violation("region", f"gcs {g.id}: position outside region"))

    for z in s.nfzs:
        if len(z.polygon) < 3 or not Polygon([(p.lon, p.lat) for p in z.polygon]).is_valid:
            out.append(Violation("nfz", f"nfz {z.id}: polygon must be simple with >= 3 vertices"))

    task_ids = {t.id for t in s.tasks}
    for d in s.dependencies:
        if d.first not in task_ids or d.second not in task_ids:
            out.append(Violation("dependency", f"dependency {d.first}->{d.second}: unknown task"))
        if d.first == d.second:
            out.append(Violation("dependency", f"dependency on {d.first} references itself"))
        if d.kind is DependencyKind.TIME and d.relation not in ALLEN_RELATIONS:
            out.append(Violation("dependency", f"unknown Allen relation {d.relation!r}"))
    return out
