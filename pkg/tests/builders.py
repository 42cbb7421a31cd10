"""Small hand-made scenarios shared by the tests."""

from __future__ import annotations

import dataclasses

from missionplan.scenario import (
    Dependency,
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
)

REGION = Region(0.0, 0.0, 2.0, 2.0)


def square(cx: float, cy: float, half: float = 0.05) -> tuple[GeoPoint, ...]:
    return (GeoPoint(cx - half, cy - half), GeoPoint(cx + half, cy - half),
            GeoPoint(cx + half, cy + half), GeoPoint(cx - half, cy + half))


def tp(id: str, lon: float, lat: float, window: TimeWindow | None = None) -> TaskSpec:
    return TaskSpec(id, TaskKind.TP, (GeoPoint(lon, lat),), window or TimeWindow.duration_only(0.5))


def mon(id: str, lon: float, lat: float, window: TimeWindow | None = None) -> TaskSpec:
    return TaskSpec(id, TaskKind.MON, square(lon, lat), window or TimeWindow.duration_only(0.5))


def uav(kind: str, id: str, lon: float = 0.0, lat: float = 1.0, fuel: float | None = None):
    return catalog_uav(kind, id, GeoPoint(lon, lat), fuel)


def gcs(id: str = "G1", lon: float = 0.0, lat: float = 1.0, max_uavs: int = 4,
        types=tuple(UavType), coverage: float = 500.0) -> GcsSpec:
    return GcsSpec(id, GeoPoint(lon, lat), max_uavs, frozenset(UavType(t) for t in types), coverage)


def scenario(tasks, uavs, gcss=None, nfzs=(), deps: tuple[Dependency, ...] = (), name="test") -> MissionScenario:
    return MissionScenario(tuple(tasks), tuple(uavs), tuple(gcss or (gcs(),)), REGION,
                           tuple(nfzs), tuple(deps), name)


def box_nfz(id: str, lon0: float, lat0: float, lon1: float, lat1: float) -> NoFlyZone:
    return NoFlyZone(id, (GeoPoint(lon0, lat0), GeoPoint(lon1, lat0), GeoPoint(lon1, lat1), GeoPoint(lon0, lat1)))


def one_task() -> MissionScenario:
    return scenario([tp("T1", 1.0, 1.0)], [uav("URAV", "U1")])


def two_by_two() -> MissionScenario:
    return scenario([tp("T1", 1.0, 0.6), mon("T2", 1.2, 1.4)],
                    [uav("URAV", "U1", 0.0, 0.5), uav("MALE", "U2", 0.0, 1.5)])


def es(id: str, pts, window: TimeWindow | None = None) -> TaskSpec:
    return TaskSpec(id, TaskKind.ES, tuple(GeoPoint(x, y) for x, y in pts), window or TimeWindow.duration_only(0.3))


def map_task(id: str, lon: float, lat: float, window: TimeWindow | None = None, half: float = 0.1) -> TaskSpec:
    return TaskSpec(id, TaskKind.MAP, square(lon, lat, half), window or TimeWindow.duration_only(0.5),
                    multi_uav=True, required_uavs=2, swath=2.0)


def checker_scenarios() -> list[MissionScenario]:
    """Small instances (n <= 3, m <= 2) that between them trip every constraint family."""
    from missionplan.scenario import DependencyKind as D

    s1 = scenario(
        [tp("T1", 1.0, 0.6, TimeWindow.fixed(1.0, 1.5)), mon("T2", 1.2, 1.4),
         es("T3", [(0.5, 1.0), (0.8, 1.2)])],
        [uav("HALE", "U1", 0.0, 0.5), uav("UCAV", "U2", 0.0, 1.5)],
        [gcs("G1", 0.0, 1.0, max_uavs=2, coverage=80.0)],
        deps=(Dependency(D.TIME, "T1", "T2", "before"),), name="c1")
    s2 = scenario(
        [map_task("T1", 1.0, 1.0), tp("T2", 1.5, 0.5, TimeWindow.fixed(2.0, 2.2))],
        [uav("MALE", "U1", 0.0, 0.5), uav("UCAV", "U2", 0.0, 1.5)],
        [gcs("G1", 0.0, 1.0, max_uavs=3, types=("MALE", "UCAV"), coverage=200.0),
         gcs("G2", 2.0, 1.0, max_uavs=2, types=("URAV", "UCAV"), coverage=200.0)],
        nfzs=[box_nfz("N1", 0.4, 0.2, 0.6, 0.9)],
        deps=(Dependency(D.TIME, "T1", "T2", "before"),), name="c2")
    s3 = scenario(
        [mon("T1", 0.8, 0.5), tp("T2", 1.5, 1.5, TimeWindow.free()), mon("T3", 0.4, 1.6)],
        [uav("URAV", "U1", 0.0, 1.0, fuel=60.0), uav("HALE", "U2", 2.0, 1.0)],
        [gcs("G1", 1.0, 1.0, coverage=150.0), gcs("G2", 1.0, 0.0, max_uavs=2, coverage=150.0)],
        deps=(Dependency(D.DIFF_UAV, "T1", "T3"), Dependency(D.SAME_UAV, "T2", "T3")), name="c3")
    s4 = scenario(
        [mon("T1", 0.7, 0.7, TimeWindow.fixed(0.5, 1.5)), mon("T2", 1.3, 1.3, TimeWindow.duration_only(3.0)),
         tp("T3", 1.0, 1.8, TimeWindow.fixed(14.0, 14.5))],
        [uav("URAV", "U1", 0.0, 0.2), uav("UCAV", "U2", 2.0, 0.2)],
        [gcs("G1", 1.0, 1.0, coverage=200.0)],
        nfzs=[box_nfz("N1", 0.9, 0.3, 1.1, 1.5)],
        deps=(Dependency(D.TIME, "T3", "T1", "after"),), name="c4")
    short = dataclasses.replace(uav("UCAV", "U1", 0.0, 0.2), range=150.0)
    s5 = scenario(
        [tp("T1", 0.6, 0.6), tp("T2", 1.8, 1.8, TimeWindow.fixed(3.0, 3.5)), mon("T3", 1.0, 1.4)],
        [short, uav("MALE", "U2", 2.0, 0.2)],
        [gcs("G1", 1.0, 1.0, max_uavs=3, coverage=150.0)],
        nfzs=[box_nfz("N1", 1.2, 0.9, 1.5, 1.5)], name="c5")
    return [s1, s2, s3, s4, s5]
