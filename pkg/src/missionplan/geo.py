"""Distances and NFZ-avoiding paths between mission points.

Distances use a spherical Earth; altitude differences are folded in as a
Euclidean term. Paths are planned with Theta* over a lon/lat grid whose
blocked cells are every cell touching a no-fly-zone polygon.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from shapely.geometry import Polygon, box
from shapely.prepared import prep

from missionplan.scenario import GeoPoint, MissionScenario, NoFlyZone, Region

EARTH_RADIUS_NM = 3440.065
FEET_PER_NM = 6076.115

Cell = tuple[int, int]


def distance(p1: GeoPoint, p2: GeoPoint) -> float:
    """Great-circle ground distance combined with the altitude difference, in NM."""
    lat1, lat2 = math.radians(p1.lat), math.radians(p2.lat)
    dlat = lat2 - lat1
    dlon = math.radians(p2.lon - p1.lon)
    a = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    ground = 2 * EARTH_RADIUS_NM * math.asin(min(1.0, math.sqrt(a)))
    dz = (p2.alt - p1.alt) / FEET_PER_NM
    if dz == 0.0:
        return ground
    return math.hypot(ground, dz)


@dataclass(frozen=True)
class Path:
    waypoints: tuple[GeoPoint, ...]
    length: float


def path_length(waypoints: Sequence[GeoPoint]) -> float:
    if len(waypoints) < 2:
        raise ValueError("a path needs at least two waypoints")
    return sum(distance(a, b) for a, b in zip(waypoints, waypoints[1:]))


def make_path(waypoints: Sequence[GeoPoint]) -> Path:
    return Path(tuple(waypoints), path_length(waypoints))


class Grid:
    """Occupancy grid over the scenario region.

    Args:
        region: Bounding box in degrees.
        nfzs: No-fly zones; every cell whose closed rectangle intersects one
            of them is blocked.
        cells: Number of cells along each axis.
    """

    def __init__(self, region: Region, nfzs: Iterable[NoFlyZone] = (), cells: int = 64):
        if cells < 1:
            raise ValueError("grid needs at least one cell per axis")
        self.region = region
        self.nx = self.ny = int(cells)
        self.dx = (region.lon_max - region.lon_min) / self.nx
        self.dy = (region.lat_max - region.lat_min) / self.ny
        self.blocked = np.zeros((self.nx, self.ny), dtype=bool)
        for zone in nfzs:
            self._block(Polygon([(p.lon, p.lat) for p in zone.polygon]))
        self.fingerprint = (region, self.nx, self.blocked.tobytes())

    @classmethod
    def from_scenario(cls, scenario: MissionScenario, cells: int = 64) -> "Grid":
        return cls(scenario.region, scenario.nfzs, cells)

    def _block(self, poly: Polygon) -> None:
        shape = prep(poly)
        lon0, lat0, lon1, lat1 = poly.bounds
        i0, j0 = self._clamp(math.floor((lon0 - self.region.lon_min) / self.dx),
                             math.floor((lat0 - self.region.lat_min) / self.dy))
        i1, j1 = self._clamp(math.floor((lon1 - self.region.lon_min) / self.dx),
                             math.floor((lat1 - self.region.lat_min) / self.dy))
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                x = self.region.lon_min + i * self.dx
                y = self.region.lat_min + j * self.dy
                if shape.intersects(box(x, y, x + self.dx, y + self.dy)):
                    self.blocked[i, j] = True

    def _clamp(self, i: int, j: int) -> Cell:
        return min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1)

    def cell_of(self, p: GeoPoint) -> Cell:
        return self._clamp(math.floor((p.lon - self.region.lon_min) / self.dx),
                           math.floor((p.lat - self.region.lat_min) / self.dy))

    def center(self, c: Cell, alt: float = 0.0) -> GeoPoint:
        return GeoPoint(self.region.lon_min + (c[0] + 0.5) * self.dx,
                        self.region.lat_min + (c[1] + 0.5) * self.dy, alt)

    def is_free(self, p: GeoPoint) -> bool:
        return not self.blocked[self.cell_of(p)]

    def _segment_cells(self, a: GeoPoint, b: GeoPoint) -> Iterable[Cell]:
        """Every cell whose closed rectangle the segment a-b touches."""
        x0 = (a.lon - self.region.lon_min) / self.dx
        y0 = (a.lat - self.region.lat_min) / self.dy
        x1 = (b.lon - self.region.lon_min) / self.dx
        y1 = (b.lat - self.region.lat_min) / self.dy
        i, j = self._clamp(math.floor(x0), math.floor(y0))
        iend, jend = self._clamp(math.floor(x1), math.floor(y1))
        dx, dy = x1 - x0, y1 - y0
        sx = 1 if dx > 0 else -1
        sy = 1 if dy > 0 else -1
        tdx = abs(1.0 / dx) if dx else math.inf
        tdy = abs(1.0 / dy) if dy else math.inf
        if dx > 0:
            tmx = (i + 1 - x0) / dx
        elif dx < 0:
            tmx = (x0 - i) / -dx
        else:
            tmx = math.inf
        if dy > 0:
            tmy = (j + 1 - y0) / dy
        elif dy < 0:
            tmy = (y0 - j) / -dy
        else:
            tmy = math.inf
        yield i, j
        for _ in range(2 * (self.nx + self.ny) + 4):
            if (i, j) == (iend, jend):
                return
            t = min(tmx, tmy)
            if t > 1.0:
                return
            if abs(tmx - tmy) <= 1e-12:
                # through a corner: both side cells are touched
                for c in ((i + sx, j), (i, j + sy)):
                    if 0 <= c[0] < self.nx and 0 <= c[1] < self.ny:
                        yield c
                i += sx
                j += sy
                tmx += tdx
                tmy += tdy
            elif tmx < tmy:
                i += sx
                tmx += tdx
            else:
                j += sy
                tmy += tdy
            if not (0 <= i < self.nx and 0 <= j < self.ny):
                return
            yield i, j

    def line_of_sight(self, a: GeoPoint, b: GeoPoint) -> bool:
        blocked = self.blocked
        return not any(blocked[c] for c in self._segment_cells(a, b))

    def neighbors(self, c: Cell) -> Iterable[Cell]:
        i, j = c
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                n = (i + di, j + dj)
                if 0 <= n[0] < self.nx and 0 <= n[1] < self.ny and not self.blocked[n]:
                    yield n


def plan_path(grid: Grid, start: GeoPoint, goal: GeoPoint) -> Path | None:
    """Theta* path from ``start`` to ``goal``; ``None`` when unreachable.

    A cell inherits its predecessor's parent whenever that parent sees it,
    which shortens the grid path into any-angle segments. Open-list ties
    prefer the larger g-value, then the smaller cell index.
    """
    if not (grid.is_free(start) and grid.is_free(goal)):
        return None
    if grid.line_of_sight(start, goal):
        return make_path([start, goal])

    s_cell, g_cell = grid.cell_of(start), grid.cell_of(goal)
    alt = start.alt

    def pos(c: Cell) -> GeoPoint:
        if c == s_cell:
            return start
        if c == g_cell:
            return goal
        return grid.center(c, alt)

    g: dict[Cell, float] = {s_cell: 0.0}
    parent: dict[Cell, Cell] = {s_cell: s_cell}
    closed: set[Cell] = set()
    heap = [(distance(start, goal), -0.0, s_cell)]
    while heap:
        _, _, s = heapq.heappop(heap)
        if s in closed:
            continue
        closed.add(s)
        if s == g_cell:
            cells = [s]
            while parent[cells[-1]] != cells[-1]:
                cells.append(parent[cells[-1]])
            return make_path([pos(c) for c in reversed(cells)])
        ps = parent[s]
        for n in grid.neighbors(s):
            if n in closed or not grid.line_of_sight(pos(s), pos(n)):
                continue
            if ps != s and grid.line_of_sight(pos(ps), pos(n)):
                cand, par = g[ps] + distance(pos(ps), pos(n)), ps
            else:
                cand, par = g[s] + distance(pos(s), pos(n)), s
            if cand < g.get(n, math.inf) - 1e-12:
                g[n] = cand
                parent[n] = par
                heapq.heappush(heap, (cand + distance(pos(n), goal), -cand, n))
    return None


def astar_path(grid: Grid, start: GeoPoint, goal: GeoPoint) -> Path | None:
    """Plain 8-connected grid A* (waypoints restricted to cell centres)."""
    if not (grid.is_free(start) and grid.is_free(goal)):
        return None
    s_cell, g_cell = grid.cell_of(start), grid.cell_of(goal)
    alt = start.alt

    def pos(c: Cell) -> GeoPoint:
        if c == s_cell:
            return start
        if c == g_cell:
            return goal
        return grid.center(c, alt)

    g = {s_cell: 0.0}
    parent = {s_cell: s_cell}
    closed: set[Cell] = set()
    heap = [(distance(start, goal), -0.0, s_cell)]
    while heap:
        _, _, s = heapq.heappop(heap)
        if s in closed:
            continue
        closed.add(s)
        if s == g_cell:
            cells = [s]
            while parent[cells[-1]] != cells[-1]:
                cells.append(parent[cells[-1]])
            return make_path([pos(c) for c in reversed(cells)])
        for n in grid.neighbors(s):
            if n in closed or not grid.line_of_sight(pos(s), pos(n)):
                continue
            cand = g[s] + distance(pos(s), pos(n))
            if cand < g.get(n, math.inf) - 1e-12:
                g[n] = cand
                parent[n] = s
                heapq.heappush(heap, (cand + distance(pos(n), goal), -cand, n))
    return None


class PathPlanner:
    """Memoising front-end to :func:`plan_path` for one grid.

    The cache only ever stores the deterministic result for a key, so sharing
    a planner between readers cannot change what they observe.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        self._cache: dict[tuple[GeoPoint, GeoPoint], Path | None] = {}

    def path(self, start: GeoPoint, goal: GeoPoint) -> Path | None:
        key = (start, goal)
        try:
            return self._cache[key]
        except KeyError:
            result = plan_path(self.grid, start, goal)
            self._cache[key] = result
            return result
