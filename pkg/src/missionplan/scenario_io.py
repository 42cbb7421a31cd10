"""JSON scenario files.

Layout (all keys required unless noted)::

    {"name": str (optional), "region": [lon_min, lat_min, lon_max, lat_max],
     "tasks": [{"id", "kind", "zone": [[lon, lat, alt], ...],
                "window": {"mode", "start"?, "end"?, "duration"?},
                "multi_uav"?, "required_uavs"?, "swath"?}],
     "uavs": [{"id", "type", "position", "initial_fuel", "sensors", "range",
               "autonomy", "cost_per_hour", "max_speed", "max_altitude",
               "max_fuel", "profiles": [{"id", "kind", "speed", "fuel_ratio",
               "altitude"?, "angle"?}], "sensor_performance"?: {sensor: [kt, ft]}}],
     "gcss": [{"id", "position", "max_uavs", "permitted_types", "coverage"}],
     "nfzs"?: [{"id", "polygon"}],
     "dependencies"?: [{"kind", "first", "second", "relation"?}]}

A UAV may instead be given as ``{"id", "type", "position", "catalog": true}``
(optionally with ``initial_fuel``) to take its envelope from the type table.
Unknown keys are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from missionplan.scenario import (
    Dependency,
    DependencyKind,
    FlightProfile,
    GcsSpec,
    GeoPoint,
    MissionScenario,
    NoFlyZone,
    ProfileKind,
    Region,
    SensorKind,
    SensorPerformance,
    TaskKind,
    TaskSpec,
    TimeWindow,
    UavSpec,
    UavType,
    WindowMode,
    catalog_uav,
)


class ScenarioFormatError(ValueError):
    pass


def _fields(obj: dict, where: str, required: set[str], optional: set[str] = frozenset()) -> None:
    if not isinstance(obj, dict):
        raise ScenarioFormatError(f"{where}: expected an object")
    unknown = set(obj) - required - set(optional)
    if unknown:
        raise ScenarioFormatError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ScenarioFormatError(f"{where}: missing field(s) {sorted(missing)}")


def _enum(cls, value, where: str):
    try:
        return cls(value)
    except ValueError:
        raise ScenarioFormatError(f"{where}: unknown {cls.__name__} {value!r}") from None


def _point(v, where: str) -> GeoPoint:
    if not isinstance(v, (list, tuple)) or len(v) not in (2, 3):
        raise ScenarioFormatError(f"{where}: a point is [lon, lat] or [lon, lat, alt]")
    return GeoPoint(*(float(x) for x in v))


def _points(v, where: str) -> tuple[GeoPoint, ...]:
    if not isinstance(v, list):
        raise ScenarioFormatError(f"{where}: expected a list of points")
    return tuple(_point(p, f"{where}[{i}]") for i, p in enumerate(v))


def _opt_float(v):
    return None if v is None else float(v)


def _task(d: dict, where: str) -> TaskSpec:
    _fields(d, where, {"id", "kind", "zone", "window"}, {"multi_uav", "required_uavs", "swath"})
    w = d["window"]
    _fields(w, f"{where}.window", {"mode"}, {"start", "end", "duration"})
    window = TimeWindow(_enum(WindowMode, w["mode"], f"{where}.window"),
                        _opt_float(w.get("start")), _opt_float(w.get("end")), _opt_float(w.get("duration")))
    return TaskSpec(str(d["id"]), _enum(TaskKind, d["kind"], where), _points(d["zone"], f"{where}.zone"),
                    window, bool(d.get("multi_uav", False)), int(d.get("required_uavs", 1)),
                    float(d.get("swath", 1.0)))


def _profile(d: dict, where: str) -> FlightProfile:
    _fields(d, where, {"id", "kind", "speed", "fuel_ratio"}, {"altitude", "angle"})
    return FlightProfile(str(d["id"]), _enum(ProfileKind, d["kind"], where), float(d["speed"]),
                         float(d["fuel_ratio"]), _opt_float(d.get("altitude")), _opt_float(d.get("angle")))


_UAV_FIELDS = {"id", "type", "position", "initial_fuel", "sensors", "range", "autonomy",
               "cost_per_hour", "max_speed", "max_altitude", "max_fuel", "profiles"}


def _uav(d: dict, where: str) -> UavSpec:
    if isinstance(d, dict) and d.get("catalog"):
        _fields(d, where, {"id", "type", "position", "catalog"}, {"initial_fuel"})
        try:
            return catalog_uav(d["type"], str(d["id"]), _point(d["position"], f"{where}.position"),
                               _opt_float(d.get("initial_fuel")))
        except ValueError as exc:
            raise ScenarioFormatError(f"{where}: {exc}") from None
    _fields(d, where, _UAV_FIELDS, {"sensor_performance"})
    perf = d.get("sensor_performance", {})
    if not isinstance(perf, dict):
        raise ScenarioFormatError(f"{where}.sensor_performance: expected an object")
    return UavSpec(
        id=str(d["id"]),
        uav_type=_enum(UavType, d["type"], where),
        position=_point(d["position"], f"{where}.position"),
        initial_fuel=float(d["initial_fuel"]),
        sensors=tuple(_enum(SensorKind, s, f"{where}.sensors") for s in d["sensors"]),
        range=float(d["range"]),
        autonomy=float(d["autonomy"]),
        cost_per_hour=float(d["cost_per_hour"]),
        max_speed=float(d["max_speed"]),
        max_altitude=float(d["max_altitude"]),
        max_fuel=float(d["max_fuel"]),
        profiles=tuple(_profile(p, f"{where}.profiles[{i}]") for i, p in enumerate(d["profiles"])),
        sensor_performance=tuple(
            (_enum(SensorKind, k, f"{where}.sensor_performance"), SensorPerformance(float(v[0]), float(v[1])))
            for k, v in perf.items()),
    )


def _gcs(d: dict, where: str) -> GcsSpec:
    _fields(d, where, {"id", "position", "max_uavs", "permitted_types", "coverage"})
    return GcsSpec(str(d["id"]), _point(d["position"], f"{where}.position"), int(d["max_uavs"]),
                   frozenset(_enum(UavType, t, where) for t in d["permitted_types"]), float(d["coverage"]))


def _dependency(d: dict, where: str) -> Dependency:
    _fields(d, where, {"kind", "first", "second"}, {"relation"})
    rel = d.get("relation")
    return Dependency(_enum(DependencyKind, d["kind"], where), str(d["first"]), str(d["second"]),
                      None if rel is None else str(rel))


def scenario_from_dict(data: dict[str, Any]) -> MissionScenario:
    _fields(data, "scenario", {"region", "tasks", "uavs", "gcss"}, {"name", "nfzs", "dependencies"})
    region = data["region"]
    if not isinstance(region, list) or len(region) != 4:
        raise ScenarioFormatError("scenario.region: expected [lon_min, lat_min, lon_max, lat_max]")
    nfzs = []
    for i, z in enumerate(data.get("nfzs", [])):
        _fields(z, f"nfzs[{i}]", {"id", "polygon"})
        nfzs.append(NoFlyZone(str(z["id"]), _points(z["polygon"], f"nfzs[{i}].polygon")))
    return MissionScenario(
        tasks=tuple(_task(t, f"tasks[{i}]") for i, t in enumerate(data["tasks"])),
        uavs=tuple(_uav(u, f"uavs[{i}]") for i, u in enumerate(data["uavs"])),
        gcss=tuple(_gcs(g, f"gcss[{i}]") for i, g in enumerate(data["gcss"])),
        region=Region(*(float(x) for x in region)),
        nfzs=tuple(nfzs),
        dependencies=tuple(_dependency(d, f"dependencies[{i}]") for i, d in enumerate(data.get("dependencies", []))),
        name=str(data.get("name", "scenario")),
    )


def _pt(p: GeoPoint) -> list[float]:
    return [p.lon, p.lat, p.alt]


def _drop_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def scenario_to_dict(s: MissionScenario) -> dict[str, Any]:
    return {
        "name": s.name,
        "region": [s.region.lon_min, s.region.lat_min, s.region.lon_max, s.region.lat_max],
        "tasks": [{
            "id": t.id, "kind": t.kind.value, "zone": [_pt(p) for p in t.zone],
            "window": _drop_none({"mode": t.window.mode.value, "start": t.window.start,
                                  "end": t.window.end, "duration": t.window.duration}),
            "multi_uav": t.multi_uav, "required_uavs": t.required_uavs, "swath": t.swath,
        } for t in s.tasks],
        "uavs": [{
            "id": u.id, "type": u.uav_type.value, "position": _pt(u.position),
            "initial_fuel": u.initial_fuel, "sensors": [x.value for x in u.sensors],
            "range": u.range, "autonomy": u.autonomy, "cost_per_hour": u.cost_per_hour,
            "max_speed": u.max_speed, "max_altitude": u.max_altitude, "max_fuel": u.max_fuel,
            "profiles": [_drop_none({"id": p.id, "kind": p.kind.value, "speed": p.speed,
                                     "fuel_ratio": p.fuel_ratio, "altitude": p.altitude,
                                     "angle": p.angle}) for p in u.profiles],
            "sensor_performance": {k.value: [v.speed, v.altitude] for k, v in u.sensor_performance},
        } for u in s.uavs],
        "gcss": [{
            "id": g.id, "position": _pt(g.position), "max_uavs": g.max_uavs,
            "permitted_types": sorted(t.value for t in g.permitted_types), "coverage": g.coverage,
        } for g in s.gcss],
        "nfzs": [{"id": z.id, "polygon": [_pt(p) for p in z.polygon]} for z in s.nfzs],
        "dependencies": [_drop_none({"kind": d.kind.value, "first": d.first, "second": d.second,
                                     "relation": d.relation}) for d in s.dependencies],
    }


def load_scenario(path: str | Path) -> MissionScenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: not valid JSON ({exc})") from None
    return scenario_from_dict(data)


def save_scenario(scenario: MissionScenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")
