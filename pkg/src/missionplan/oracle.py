"""Exact Pareto fronts for small instances and the hypervolume gap metric.

Two exact search modes share one contract:

* ``prune=False`` walks the canonical chromosome decision tree and runs the
  full evaluator on every leaf. Its size is bounded up front.
* ``prune=True`` (default) builds each UAV's candidate sub-plans with a
  label search (extend one task at a time, drop a partial plan when another
  one with the same visited set, last task, clock and cross-UAV footprint is
  no worse on flight time, distance and fuel), keeps only per-UAV sub-plans
  that are Pareto-optimal on their objective contributions, then merges UAVs
  one at a time while discarding dominated partial fleets. Sums and maxima
  are monotone, so nothing on the true front is lost.

Every witness from either mode is re-checked by :class:`PlanEvaluator`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from missionplan.objectives import ObjectiveVector, compute_objectives, parse_selection
from missionplan.plan import EPS, Chromosome, PlanEvaluator, allen_holds
from missionplan.scenario import DependencyKind, MissionScenario, is_compatible, valid_sensors

DEFAULT_BUDGET = 10**8


class OracleOverflow(RuntimeError):
    """The instance needs more search nodes than the budget allows."""


@dataclass
class ExactFront:
    selection: tuple[str, ...]
    vectors: list[ObjectiveVector] = field(default_factory=list)
    witnesses: list[Chromosome] = field(default_factory=list)
    nodes: int = 0
    overflow: bool = False

    def points(self) -> np.ndarray:
        return np.array([v.values(self.selection) for v in self.vectors], dtype=float).reshape(
            len(self.vectors), len(self.selection))

    def keys(self) -> set[tuple[float, ...]]:
        return {tuple(round(x, 9) for x in v.values(self.selection)) for v in self.vectors}


def _pareto_keep(rows: Sequence[Sequence[float]]) -> list[int]:
    """Indices of non-dominated rows; the first of equal rows is kept."""
    keep: list[int] = []
    for i, r in enumerate(rows):
        dominated = False
        for j in keep:
            q = rows[j]
            if all(a <= b for a, b in zip(q, r)):
                dominated = True
                break
        if dominated:
            continue
        keep = [j for j in keep if not (all(a <= b for a, b in zip(r, rows[j])) and tuple(r) != tuple(rows[j]))]
        keep.append(i)
    return sorted(keep)


def _finish(scenario: MissionScenario, sel, candidates, ev: PlanEvaluator, nodes: int) -> ExactFront:
    """Deduplicate, filter to the front, and re-verify every witness."""
    costs = [u.cost_per_hour for u in scenario.uavs]
    seen: dict[tuple[float, ...], tuple[Chromosome, ObjectiveVector]] = {}
    for ch, vec in candidates:
        seen.setdefault(tuple(round(x, 9) for x in vec.values(sel)), (ch, vec))
    keys = sorted(seen)
    kept = _pareto_keep(keys)
    front = ExactFront(sel, nodes=nodes)
    for i in kept:
        ch, vec = seen[keys[i]]
        report, plan = ev.evaluate(ch)
        if not report.feasible:
            raise RuntimeError(f"exact search produced an infeasible witness: {report.violations}")
        check = compute_objectives(plan, costs)
        if not all(math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9)
                   for a, b in zip(check.values(sel), vec.values(sel))):
            raise RuntimeError("exact search disagrees with the evaluator on a witness")
        front.vectors.append(check)
        front.witnesses.append(ch)
    return front


# ------------------------------------------------------------------ brute force


def brute_force_size(scenario: MissionScenario) -> int:
    """Upper bound on leaves of the canonical chromosome tree."""
    total = math.factorial(len(scenario.tasks))
    for t in scenario.tasks:
        m = len(scenario.uavs)
        per = max(len(u.profiles) * max(1, len(valid_sensors(t, u))) for u in scenario.uavs)
        total *= math.comb(m, t.required_uavs) * per ** t.required_uavs
    for u in scenario.uavs:
        total *= len(scenario.gcss) * len(u.profiles)
    return total


def _brute(scenario: MissionScenario, sel, budget: int, ev: PlanEvaluator) -> ExactFront:
    bound = brute_force_size(scenario)
    if bound > budget:
        return ExactFront(sel, nodes=bound, overflow=True)
    n, m, l = len(scenario.tasks), len(scenario.uavs), len(scenario.gcss)
    costs = [u.cost_per_hour for u in scenario.uavs]
    task_sets = []
    for t, task in enumerate(scenario.tasks):
        cands = [u for u, uav in enumerate(scenario.uavs) if is_compatible(task, uav)]
        task_sets.append(list(itertools.combinations(cands, task.required_uavs)))
    candidates, nodes = [], 0
    for assign in itertools.product(*task_sets):
        used = sorted({u for a in assign for u in a})
        seqs_seen = set()
        orders = []
        for perm in itertools.permutations(range(n)):
            key = tuple(tuple(t for t in perm if u in assign[t]) for u in range(m))
            if key not in seqs_seen:
                seqs_seen.add(key)
                orders.append(perm)
        slot_choices = []
        for t in range(n):
            per_uav = [list(itertools.product(range(len(scenario.uavs[u].profiles)),
                                              valid_sensors(scenario.tasks[t], scenario.uavs[u])))
                       for u in assign[t]]
            slot_choices.append(list(itertools.product(*per_uav)))
        gcs_choices = list(itertools.product(range(l), repeat=len(used)))
        ret_choices = list(itertools.product(*[range(len(scenario.uavs[u].profiles)) for u in used]))
        for perm in orders:
            for slots in itertools.product(*slot_choices):
                prof = tuple(tuple(p for p, _ in s) for s in slots)
                sens = tuple(tuple(x for _, x in s) for s in slots)
                for gsel in gcs_choices:
                    gcs = [0] * m
                    for u, g in zip(used, gsel):
                        gcs[u] = g
                    for rsel in ret_choices:
                        ret = [0] * m
                        for u, r in zip(used, rsel):
                            ret[u] = r
                        nodes += 1
                        ch = Chromosome(assign, perm, tuple(gcs), prof, sens, tuple(ret))
                        report, plan = ev.evaluate(ch, validate=False)
                        if report.feasible:
                            candidates.append((ch, compute_objectives(plan, costs)))
    return _finish(scenario, sel, candidates, ev, nodes)


# ------------------------------------------------------------- label search


@dataclass
class _Option:
    """One UAV's complete sub-plan."""

    uav: int
    seq: tuple[int, ...]
    choices: tuple[tuple[int, object], ...]  # (profile, sensor) per leg
    ret: int
    contrib: tuple[float, ...]  # per-UAV objective contributions, selection order
    gcs_mask: int
    intervals: tuple[tuple[int, float, float], ...]  # (task, start, end) of dependency tasks
    prec: frozenset  # (a, b): multi-UAV task a precedes b in this UAV's sequence


class _Search:
    def __init__(self, scenario: MissionScenario, sel, budget: int, ev: PlanEvaluator):
        self.s = scenario
        self.sel = sel
        self.budget = budget
        self.ev = ev
        self.nodes = 0
        self.time_tasks = set()
        self.same, self.diff, self.time_deps = [], [], []
        for d in scenario.dependencies:
            i, j = scenario.task_index(d.first), scenario.task_index(d.second)
            if d.kind is DependencyKind.SAME_UAV:
                self.same.append((i, j))
            elif d.kind is DependencyKind.DIFF_UAV:
                self.diff.append((i, j))
            else:
                self.time_deps.append((i, j, d.relation))
                self.time_tasks |= {i, j}
        self.multi = {t for t, task in enumerate(scenario.tasks) if task.required_uavs > 1}

    def tick(self, k: int = 1) -> None:
        self.nodes += k
        if self.nodes > self.budget:
            raise OracleOverflow(f"search exceeded {self.budget} nodes")

    def _mask(self, u: int, points) -> int:
        uav = self.s.uavs[u]
        mask = 0
        pts = list(points)
        for g, gcs in enumerate(self.s.gcss):
            if uav.uav_type in gcs.permitted_types and all(self.ev.covered(g, p) for p in pts):
                mask |= 1 << g
        return mask

    def _sensor_reps(self, t: int, u: int):
        reps, seen = [], set()
        uav = self.s.uavs[u]
        for sensor in valid_sensors(self.s.tasks[t], uav):
            perf = uav.performance(sensor)
            if perf not in seen:
                seen.add(perf)
                reps.append(sensor)
        return reps

    def _internal_ok(self, seq_set) -> bool:
        for i, j in self.diff:
            if i in seq_set and j in seq_set:
                return False
        return True

    def uav_options(self, u: int) -> list[_Option]:
        s, ev = self.s, self.ev
        uav = s.uavs[u]
        tasks = [t for t, task in enumerate(s.tasks) if is_compatible(task, uav)]
        sensors = {t: self._sensor_reps(t, u) for t in tasks}
        all_mask = (1 << len(s.gcss)) - 1
        # label: (seq, choices, here, prev_end, ft, dist, fuel, mask, intervals)
        layer = [((), (), uav.position, None, 0.0, 0.0, 0.0, all_mask, ())]
        options: list[_Option] = []
        while layer:
            nxt: dict[tuple, list] = {}
            for seq, choices, here, prev_end, ft, dist, fuel, mask, ivals in layer:
                if seq:
                    options.extend(self._close(u, seq, choices, prev_end, ft, dist, fuel, mask, ivals))
                seq_set = set(seq)
                for t in tasks:
                    if t in seq_set or not self._internal_ok(seq_set | {t}):
                        continue
                    for p in range(len(uav.profiles)):
                        for sensor in sensors[t]:
                            self.tick()
                            leg = ev.leg(t, u, len(seq), p, sensor, here, prev_end)
                            if leg is None:
                                continue
                            if prev_end is None:
                                if leg.departure < -EPS:
                                    continue
                            elif not prev_end <= leg.departure + EPS:
                                continue
                            nft = ft + leg.dur_path + leg.dur_task + leg.dur_loiter
                            ndist = dist + leg.distance_path + leg.distance_task + leg.distance_loiter
                            nfuel = fuel + leg.fuel_path + leg.fuel_task + leg.fuel_loiter
                            if not (nft < uav.autonomy and ndist < uav.range and nfuel < uav.initial_fuel):
                                continue
                            nmask = mask & self._mask(u, itertools.chain(
                                leg.path.waypoints, ev.geometry[t].vertices))
                            if not nmask:
                                continue
                            nivals = ivals
                            if t in self.time_tasks:
                                nivals = ivals + ((t, leg.start, leg.end),)
                                if not self._time_ok(nivals):
                                    continue
                            nseq = seq + (t,)
                            key = (frozenset(nseq), t, leg.end, nmask, tuple(sorted(nivals)),
                                   self._prec(nseq))
                            label = (nseq, choices + ((p, sensor),), ev.geometry[t].exit, leg.end,
                                     nft, ndist, nfuel, nmask, nivals)
                            self._insert(nxt, key, label)
            layer = [lab for labs in nxt.values() for lab in labs]
        return self._filter_options(options)

    @staticmethod
    def _insert(bucket: dict, key, label) -> None:
        labs = bucket.setdefault(key, [])
        acc = label[4:7]
        for other in labs:
            if all(a <= b for a, b in zip(other[4:7], acc)):
                return
        labs[:] = [o for o in labs if not all(a <= b for a, b in zip(acc, o[4:7]))]
        labs.append(label)

    def _prec(self, seq) -> frozenset:
        ms = [t for t in seq if t in self.multi]
        return frozenset((a, b) for k, a in enumerate(ms) for b in ms[k + 1:])

    def _close(self, u, seq, choices, prev_end, ft, dist, fuel, mask, ivals) -> list[_Option]:
        s, ev = self.s, self.ev
        uav = s.uavs[u]
        seq_set = set(seq)
        for i, j in self.same:
            if (i in seq_set) != (j in seq_set):
                return []
        back = ev.planner.path(ev.geometry[seq[-1]].exit, uav.position)
        if back is None:
            return []
        rmask = mask & self._mask(u, back.waypoints)
        if not rmask:
            return []
        out = []
        for r, fp in enumerate(uav.profiles):
            self.tick()
            dur = back.length / fp.speed
            tft = ft + dur
            tdist = dist + back.length
            tfuel = fuel + dur * fp.fuel_ratio
            if not (tft < uav.autonomy and tdist < uav.range and tfuel < uav.initial_fuel):
                continue
            values = {
                "uavs": 1.0, "flight-time": tft, "fuel": tfuel, "distance": tdist,
                "cost": uav.cost_per_hour * tft, "makespan": prev_end + dur,
            }
            out.append(_Option(u, seq, choices, r, tuple(values[n] for n in self.sel), rmask,
                               tuple(sorted(ivals)), self._prec(seq)))
        return out

    def _filter_options(self, options: list[_Option]) -> list[_Option]:
        groups: dict[tuple, list[_Option]] = {}
        for o in options:
            groups.setdefault((frozenset(o.seq), o.gcs_mask, o.intervals, o.prec), []).append(o)
        out = []
        for key in sorted(groups, key=repr):
            opts = groups[key]
            keep = _pareto_keep([o.contrib for o in opts])
            out.extend(opts[i] for i in keep)
        return out

    # ------------------------------------------------------------ fleet merge

    def _gcs_ok(self, masks: tuple[int, ...]) -> bool:
        caps = [g.max_uavs - 1 for g in self.s.gcss]
        order = sorted(masks, key=lambda mk: bin(mk).count("1"))

        def place(k: int) -> bool:
            if k == len(order):
                return True
            for g in range(len(caps)):
                if order[k] >> g & 1 and caps[g] > 0:
                    caps[g] -= 1
                    if place(k + 1):
                        return True
                    caps[g] += 1
            return False

        return place(0)

    def _time_ok(self, ivals) -> bool:
        for i, j, rel in self.time_deps:
            for ti, si, ei in ivals:
                if ti != i:
                    continue
                for tj, sj, ej in ivals:
                    if tj == j and not allen_holds(rel, si, ei, sj, ej):
                        return False
        return True

    @staticmethod
    def _acyclic(edges) -> bool:
        nodes = {x for e in edges for x in e}
        succ = {x: [b for a, b in edges if a == x] for x in nodes}
        state: dict = {}

        def visit(x) -> bool:
            state[x] = 1
            for y in succ[x]:
                if state.get(y) == 1 or (y not in state and not visit(y)):
                    return False
            state[x] = 2
            return True

        return all(visit(x) for x in nodes if x not in state)

    def merge(self, per_uav: list[list[_Option]]):
        s = self.s
        need = tuple(t.required_uavs for t in s.tasks)
        mk = "makespan"
        agg_max = [n == mk for n in self.sel]
        zero = tuple(0.0 for _ in self.sel)
        # state key -> list of (agg, picks)
        states: dict[tuple, list[tuple[tuple[float, ...], tuple[_Option, ...]]]] = {
            (tuple(0 for _ in need), (), (), frozenset()): [(zero, ())]
        }
        for u, opts in enumerate(per_uav):
            nxt: dict[tuple, list] = {}
            for key, entries in states.items():
                cover, masks, ivals, prec = key
                for agg, picks in entries:
                    self.tick()
                    self._add(nxt, key, agg, picks)
                for o in opts:
                    if any(cover[t] >= need[t] for t in o.seq):
                        continue
                    if o.intervals and not self._time_ok(ivals + o.intervals):
                        continue
                    nprec = prec | o.prec
                    if o.prec and not self._acyclic(nprec):
                        continue
                    nmasks = tuple(sorted(masks + (o.gcs_mask,)))
                    if not self._gcs_ok(nmasks):
                        continue
                    ncover = list(cover)
                    for t in o.seq:
                        ncover[t] += 1
                    nkey = (tuple(ncover), nmasks, tuple(sorted(ivals + o.intervals)), nprec)
                    for agg, picks in entries:
                        self.tick()
                        nagg = tuple(max(a, c) if is_max else a + c
                                     for a, c, is_max in zip(agg, o.contrib, agg_max))
                        self._add(nxt, nkey, nagg, picks + (o,))
            states = nxt
        finals = []
        for (cover, _, _, _), entries in states.items():
            if cover == need:
                finals.extend(entries)
        return finals

    @staticmethod
    def _add(bucket: dict, key, agg, picks) -> None:
        entries = bucket.setdefault(key, [])
        for other, _ in entries:
            if all(a <= b for a, b in zip(other, agg)):
                return
        entries[:] = [e for e in entries if not all(a <= b for a, b in zip(agg, e[0]))]
        entries.append((agg, picks))

    def witness(self, picks: tuple[_Option, ...]) -> Chromosome:
        s = self.s
        n, m = len(s.tasks), len(s.uavs)
        assign: list[list[int]] = [[] for _ in range(n)]
        slot: dict[tuple[int, int], tuple[int, object]] = {}
        gcs_masks, ret = {}, [0] * m
        edges = set()
        for o in picks:
            for t, c in zip(o.seq, o.choices):
                assign[t].append(o.uav)
                slot[(t, o.uav)] = c
            edges |= {(a, b) for a, b in zip(o.seq, o.seq[1:])}
            gcs_masks[o.uav] = o.gcs_mask
            ret[o.uav] = o.ret
        # global order consistent with every UAV sequence (smallest index first)
        indeg = {t: 0 for t in range(n)}
        for _, b in edges:
            indeg[b] += 1
        order, ready = [], sorted(t for t in range(n) if indeg[t] == 0)
        while ready:
            t = ready.pop(0)
            order.append(t)
            for a, b in sorted(edges):
                if a == t:
                    indeg[b] -= 1
                    if indeg[b] == 0:
                        ready.append(b)
                        ready.sort()
        gcs = self._assign_gcs(gcs_masks, [0] * m)
        assign_t = tuple(tuple(sorted(a)) for a in assign)
        prof = tuple(tuple(slot[(t, u)][0] for u in assign_t[t]) for t in range(n))
        sens = tuple(tuple(slot[(t, u)][1] for u in assign_t[t]) for t in range(n))
        return Chromosome(assign_t, tuple(order), tuple(gcs), prof, sens, tuple(ret))

    def _assign_gcs(self, masks: dict[int, int], gcs: list[int]) -> list[int]:
        caps = [g.max_uavs - 1 for g in self.s.gcss]
        uavs = sorted(masks)

        def place(k: int) -> bool:
            if k == len(uavs):
                return True
            u = uavs[k]
            for g in range(len(caps)):
                if masks[u] >> g & 1 and caps[g] > 0:
                    caps[g] -= 1
                    gcs[u] = g
                    if place(k + 1):
                        return True
                    caps[g] += 1
            return False

        place(0)
        return gcs


def exact_pof(scenario: MissionScenario, objectives: Sequence[str] = ("distance", "makespan"),
              budget: int = DEFAULT_BUDGET, prune: bool = True, grid_cells: int = 64,
              evaluator: PlanEvaluator | None = None) -> ExactFront:
    """Exact non-dominated set of feasible objective vectors, with witnesses.

    Returns an :class:`ExactFront` with ``overflow=True`` (and no vectors) when
    the search would exceed ``budget`` nodes.
    """
    sel = parse_selection(objectives)
    ev = evaluator or PlanEvaluator(scenario, grid_cells)
    if not prune:
        return _brute(scenario, sel, budget, ev)
    search = _Search(scenario, sel, budget, ev)
    try:
        per_uav = [search.uav_options(u) for u in range(len(scenario.uavs))]
        finals = search.merge(per_uav)
    except OracleOverflow:
        return ExactFront(sel, nodes=search.nodes, overflow=True)
    costs = [u.cost_per_hour for u in scenario.uavs]
    candidates = []
    keys = _pareto_keep([agg for agg, _ in finals])
    for i in keys:
        ch = search.witness(finals[i][1])
        _, plan = ev.evaluate(ch)
        vec = compute_objectives(plan, costs) if plan is not None else None
        if vec is None:
            raise RuntimeError("exact search produced an infeasible witness")
        candidates.append((ch, vec))
    return _finish(scenario, sel, candidates, ev, search.nodes)


# ------------------------------------------------------------------ hypervolume


def nondominated(points: np.ndarray) -> np.ndarray:
    """Unique non-dominated rows, lexicographically sorted."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) == 0:
        return pts
    le = (pts[:, None, :] <= pts[None, :, :]).all(axis=2)
    lt = (pts[:, None, :] < pts[None, :, :]).any(axis=2)
    dominated = (le & lt).any(axis=0)
    return pts[~dominated]


def hypervolume(points: np.ndarray, ref: np.ndarray) -> float:
    """Exact dominated volume (minimisation) bounded by ``ref``; 2-D sweep, slicing above."""
    pts = nondominated(points)
    ref = np.asarray(ref, dtype=float)
    pts = pts[(pts < ref).all(axis=1)] if len(pts) else pts
    if len(pts) == 0:
        return 0.0
    return _hv(pts, ref)


def _hv(pts: np.ndarray, ref: np.ndarray) -> float:
    d = pts.shape[1]
    if d == 1:
        return float(ref[0] - pts[:, 0].min())
    if d == 2:
        p = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
        vol, best_y = 0.0, ref[1]
        for k in range(len(p)):
            x = p[k, 0]
            x_next = p[k + 1, 0] if k + 1 < len(p) else ref[0]
            best_y = min(best_y, p[k, 1])
            vol += (x_next - x) * (ref[1] - best_y)
        return float(vol)
    p = pts[np.argsort(pts[:, -1], kind="stable")]
    vol = 0.0
    for k in range(len(p)):
        z_next = p[k + 1, -1] if k + 1 < len(p) else ref[-1]
        if z_next > p[k, -1]:
            vol += (z_next - p[k, -1]) * _hv(nondominated(p[:k + 1, :-1]), ref[:-1])
    return float(vol)


def hypervolume_mc(points: np.ndarray, ref: np.ndarray, samples: int = 10**6,
                   seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate and its standard error over the box [min, ref]."""
    pts = nondominated(points)
    ref = np.asarray(ref, dtype=float)
    lo = pts.min(axis=0)
    box = float(np.prod(ref - lo))
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    chunk = 50_000
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        x = lo + rng.random((k, len(ref))) * (ref - lo)
        hits += int((pts[None, :, :] <= x[:, None, :]).all(axis=2).any(axis=1).sum())
        done += k
    frac = hits / samples
    return box * frac, box * math.sqrt(frac * (1 - frac) / samples)


@dataclass
class FrontComparison:
    optimal: np.ndarray
    approx: np.ndarray
    hypervolume: float
    normalized: bool = True
    stderr: float = 0.0


def _as_points(front, selection) -> np.ndarray:
    if isinstance(front, np.ndarray):
        return front.astype(float)
    rows = [v.values(selection) if isinstance(v, ObjectiveVector) else tuple(v) for v in front]
    return np.array(rows, dtype=float).reshape(len(rows), -1)


def compare_fronts(optimal, approx, objectives: Sequence[str] | None = None,
                   samples: int = 10**6, seed: int = 0) -> FrontComparison:
    """Volume dominated by ``optimal`` but not by ``approx`` after min-max scaling.

    Both fronts are scaled to [0, 1] per objective over their union and the
    reference point sits at 1.1 on every axis. Values are first rounded to 9
    decimals, the same identity used for archive keys, so summation-order
    noise cannot be blown up by the scaling.
    """
    sel = parse_selection(objectives) if objectives is not None else None
    opt = np.round(_as_points(optimal, sel), 9)
    app = np.round(_as_points(approx, sel), 9)
    if len(opt) == 0 or len(app) == 0:
        raise ValueError("hypervolume gap needs two non-empty fronts")
    if not (np.isfinite(opt).all() and np.isfinite(app).all()):
        raise ValueError("fronts must be finite")
    both = np.vstack([opt, app])
    lo, hi = both.min(axis=0), both.max(axis=0)
    span = np.where(hi - lo > 1e-9 * np.maximum(1.0, np.abs(hi)), hi - lo, 1.0)
    n_opt = (opt - lo) / span
    n_app = (app - lo) / span
    ref = np.full(both.shape[1], 1.1)
    union = nondominated(np.vstack([n_opt, n_app]))
    mine = nondominated(n_app)
    if union.shape == mine.shape and np.array_equal(union, mine):
        return FrontComparison(opt, app, 0.0, True)
    if both.shape[1] <= 4:
        gap = hypervolume(union, ref) - hypervolume(mine, ref)
        return FrontComparison(opt, app, max(0.0, gap), True)
    hv_u, se_u = hypervolume_mc(union, ref, samples, seed)
    hv_a, se_a = hypervolume_mc(mine, ref, samples, seed)
    return FrontComparison(opt, app, max(0.0, hv_u - hv_a), True, math.hypot(se_u, se_a))


def hypervolume_gap(optimal, approx, objectives: Sequence[str] | None = None) -> float:
    return compare_fronts(optimal, approx, objectives).hypervolume
