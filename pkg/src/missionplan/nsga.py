"""Hybrid multi-objective GA: constraint-gated fitness with NSGA-II survival.

The generation loop keeps ``population`` individuals, retains the ``elite``
best by (front rank, crowding), breeds ``population - elite`` offspring from
a rank-weighted roulette over the elite, and truncates the union with the
NSGA-II rule. A cumulative archive of non-dominated feasible solutions drives
the stopping rule: the run ends once the archive has not changed for
``stop_generations`` consecutive generations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from missionplan.objectives import ObjectiveVector, compute_objectives, parse_selection
from missionplan.plan import Chromosome, PlanEvaluator
from missionplan.scenario import MissionScenario, is_compatible, valid_sensors

Fitness = Callable[[Chromosome], ObjectiveVector]


@dataclass(frozen=True)
class GaConfig:
    population: int = 1000
    elite: int = 100
    mutation_probability: float = 0.1
    max_generations: int = 300
    stop_generations: int = 10
    seed: int = 0
    objectives: tuple[str, ...] = ("distance", "makespan")
    grid_cells: int = 64

    def __post_init__(self):
        object.__setattr__(self, "objectives", parse_selection(self.objectives))
        if not 1 <= self.elite <= self.population:
            raise ValueError("elite size must be in [1, population]")
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise ValueError("mutation probability must lie in [0, 1]")
        if self.stop_generations < 1 or self.max_generations < 0:
            raise ValueError("generation limits must be positive")


class Encoding:
    """Allele domains for one scenario."""

    def __init__(self, scenario: MissionScenario):
        self.scenario = scenario
        self.n = len(scenario.tasks)
        self.m = len(scenario.uavs)
        self.l = len(scenario.gcss)
        self.candidates: list[tuple[int, ...]] = []
        for task in scenario.tasks:
            ok = tuple(u for u, uav in enumerate(scenario.uavs) if is_compatible(task, uav))
            if len(ok) < task.required_uavs:
                ok = tuple(range(self.m))
            self.candidates.append(ok)
        self.required = [t.required_uavs for t in scenario.tasks]
        self.n_profiles = [len(u.profiles) for u in scenario.uavs]
        self.sensors = {
            (t, u): valid_sensors(task, uav)
            for t, task in enumerate(scenario.tasks)
            for u, uav in enumerate(scenario.uavs)
        }

    def task_genes(self, t: int, rng: np.random.Generator):
        """Fresh (UAVs, profiles, sensors) vectors for task ``t``."""
        cands = self.candidates[t]
        picks = rng.choice(len(cands), size=self.required[t], replace=False)
        uavs = tuple(cands[int(i)] for i in picks)
        profiles = tuple(int(rng.integers(self.n_profiles[u])) for u in uavs)
        sensors = []
        for u in uavs:
            usable = self.sensors[(t, u)]
            sensors.append(usable[int(rng.integers(len(usable)))] if usable else None)
        return uavs, profiles, tuple(sensors)

    def random(self, rng: np.random.Generator) -> Chromosome:
        assign, profiles, sensors = [], [], []
        for t in range(self.n):
            a, p, s = self.task_genes(t, rng)
            assign.append(a)
            profiles.append(p)
            sensors.append(s)
        order = tuple(int(x) for x in rng.permutation(self.n))
        gcs = tuple(int(rng.integers(self.l)) for _ in range(self.m))
        ret = tuple(int(rng.integers(self.n_profiles[u])) for u in range(self.m))
        return Chromosome(tuple(assign), order, gcs, tuple(profiles), tuple(sensors), ret)


def init_population(scenario: MissionScenario, config: GaConfig,
                    rng: np.random.Generator, encoding: Encoding | None = None) -> list[Chromosome]:
    enc = encoding or Encoding(scenario)
    return [enc.random(rng) for _ in range(config.population)]


# ------------------------------------------------------------------ operators


def pmx(a: Sequence[int], b: Sequence[int], lo: int, hi: int) -> tuple[int, ...]:
    """Child carrying ``a[lo..hi]`` (inclusive) with the rest repaired from ``b``."""
    child = list(b)
    child[lo:hi + 1] = a[lo:hi + 1]
    segment = set(a[lo:hi + 1])
    where_in_a = {v: i for i, v in enumerate(a)}
    for i in list(range(lo)) + list(range(hi + 1, len(b))):
        v = b[i]
        while v in segment:
            v = b[where_in_a[v]]
        child[i] = v
    return tuple(child)


def _two_points(rng: np.random.Generator, size: int) -> tuple[int, int]:
    a, b = sorted(int(x) for x in rng.integers(0, size + 1, size=2))
    return a, b


def _swap(x: tuple, y: tuple, a: int, b: int) -> tuple[tuple, tuple]:
    return x[:a] + y[a:b] + x[b:], y[:a] + x[a:b] + y[b:]


def crossover(p1: Chromosome, p2: Chromosome, rng: np.random.Generator) -> tuple[Chromosome, Chromosome]:
    """Per-allele recombination of two parents.

    Task-indexed alleles (UAVs, path profiles, sensors) swap the same
    two-point segment so per-task vectors stay aligned; the order permutation
    uses PMX; UAV-indexed alleles (GCS, return profile) swap another segment.
    """
    n, m = len(p1.order), len(p1.gcs)
    a, b = _two_points(rng, n)
    as1, as2 = _swap(p1.assign, p2.assign, a, b)
    pp1, pp2 = _swap(p1.path_profile, p2.path_profile, a, b)
    ss1, ss2 = _swap(p1.sensor, p2.sensor, a, b)
    lo, hi = sorted(int(x) for x in rng.integers(0, n, size=2))
    o1 = pmx(p1.order, p2.order, lo, hi)
    o2 = pmx(p2.order, p1.order, lo, hi)
    c, d = _two_points(rng, m)
    g1, g2 = _swap(p1.gcs, p2.gcs, c, d)
    r1, r2 = _swap(p1.return_profile, p2.return_profile, c, d)
    return (Chromosome(as1, o1, g1, pp1, ss1, r1), Chromosome(as2, o2, g2, pp2, ss2, r2))


def insert_move(perm: Sequence[int], first: int, second: int) -> tuple[int, ...]:
    """Move the value at position ``second`` to just after position ``first``."""
    if first == second:
        return tuple(perm)
    anchor, value = perm[first], perm[second]
    rest = [v for v in perm if v != value]
    k = rest.index(anchor)
    return tuple(rest[:k + 1] + [value] + rest[k + 1:])


def mutate(c: Chromosome, pm: float, rng: np.random.Generator, encoding: Encoding) -> Chromosome:
    """Each operator group fires independently with probability ``pm``."""
    if pm <= 0.0:
        return c
    draws = rng.random(3)
    if draws[0] < pm:
        t = int(rng.integers(encoding.n))
        a, p, s = encoding.task_genes(t, rng)
        c = replace(
            c,
            assign=c.assign[:t] + (a,) + c.assign[t + 1:],
            path_profile=c.path_profile[:t] + (p,) + c.path_profile[t + 1:],
            sensor=c.sensor[:t] + (s,) + c.sensor[t + 1:],
        )
    if draws[1] < pm and encoding.n > 1:
        i, j = (int(x) for x in rng.choice(encoding.n, size=2, replace=False))
        c = replace(c, order=insert_move(c.order, i, j))
    if draws[2] < pm:
        u = int(rng.integers(encoding.m))
        g = int(rng.integers(encoding.l))
        r = int(rng.integers(encoding.n_profiles[u]))
        c = replace(c, gcs=c.gcs[:u] + (g,) + c.gcs[u + 1:],
                    return_profile=c.return_profile[:u] + (r,) + c.return_profile[u + 1:])
    return c


# -------------------------------------------------------------------- ranking


def dominance_matrix(F: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is True when row ``i`` Pareto-dominates row ``j``."""
    le = (F[:, None, :] <= F[None, :, :]).all(axis=2)
    lt = (F[:, None, :] < F[None, :, :]).any(axis=2)
    return le & lt


def front_ranks(F: np.ndarray) -> np.ndarray:
    """Fast non-dominated sorting; returns the front index of every row."""
    if len(F) == 0:
        return np.full(0, -1, dtype=np.int64)
    # equal rows share a front, so sort the distinct rows only
    U, inverse = np.unique(F, axis=0, return_inverse=True)
    return _peel(U)[inverse.reshape(-1)]


def _peel(F: np.ndarray) -> np.ndarray:
    n = len(F)
    ranks = np.full(n, -1, dtype=np.int64)
    D = dominance_matrix(F)
    remaining = D.sum(axis=0).astype(np.int64)
    front = np.flatnonzero(remaining == 0)
    r = 0
    while front.size:
        ranks[front] = r
        remaining = remaining - D[front].sum(axis=0)
        remaining[ranks >= 0] = -1
        front = np.flatnonzero(remaining == 0)
        r += 1
    return ranks


def crowding_distance(F: np.ndarray) -> np.ndarray:
    """Crowding distance within one front; boundary rows get ``inf``."""
    n, k = F.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = math.inf
        return dist
    for j in range(k):
        order = np.lexsort((np.arange(n), F[:, j]))
        col = F[order, j]
        dist[order[0]] = dist[order[-1]] = math.inf
        if not (math.isfinite(col[0]) and math.isfinite(col[-1])):
            continue
        span = col[-1] - col[0]
        if span > 0:
            dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


@dataclass
class RankedIndividual:
    chromosome: Chromosome
    objectives: ObjectiveVector
    rank: int
    crowding: float


def rank_matrix(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ranks = front_ranks(F)
    crowd = np.zeros(len(F))
    for r in range(int(ranks.max()) + 1 if len(F) else 0):
        idx = np.flatnonzero(ranks == r)
        crowd[idx] = crowding_distance(F[idx])
    return ranks, crowd


def nsga2_rank(population: Sequence[Chromosome], objectives: Sequence[ObjectiveVector],
               selection: Sequence[str]) -> list[RankedIndividual]:
    F = np.array([v.values(selection) for v in objectives], dtype=float).reshape(len(objectives), len(selection))
    ranks, crowd = rank_matrix(F)
    return [RankedIndividual(c, v, int(r), float(d))
            for c, v, r, d in zip(population, objectives, ranks, crowd)]


def best_order(ranks: np.ndarray, crowd: np.ndarray) -> np.ndarray:
    """Indices sorted by rank, then crowding (descending), then index."""
    return np.lexsort((np.arange(len(ranks)), -crowd, ranks))


# -------------------------------------------------------------------- archive


def _key(values: Sequence[float]) -> tuple[float, ...]:
    return tuple(round(v, 9) for v in values)


@dataclass
class ParetoArchive:
    """Mutually non-dominated feasible solutions keyed by rounded objective values."""

    selection: tuple[str, ...]
    members: dict[tuple[float, ...], tuple[Chromosome, ObjectiveVector]] = field(default_factory=dict)

    def keys(self) -> frozenset[tuple[float, ...]]:
        return frozenset(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def entries(self) -> list[tuple[Chromosome, ObjectiveVector]]:
        return [self.members[k] for k in sorted(self.members)]

    def vectors(self) -> list[ObjectiveVector]:
        return [v for _, v in self.entries()]

    def update(self, candidates: Sequence[tuple[Chromosome, ObjectiveVector]]) -> bool:
        """Merge feasible candidates; returns True when the key set changed."""
        pool = list(self.entries())
        for ch, v in candidates:
            if v.feasible:
                pool.append((ch, v))
        if not pool:
            return False
        # first occurrence wins among equal keys, archive members come first
        unique: dict[tuple[float, ...], tuple[Chromosome, ObjectiveVector]] = {}
        for ch, v in pool:
            unique.setdefault(_key(v.values(self.selection)), (ch, v))
        keys = list(unique)
        F = np.array(keys, dtype=float).reshape(len(keys), len(self.selection))
        D = dominance_matrix(F)
        keep = ~D.any(axis=0)
        new = {keys[i]: unique[keys[i]] for i in np.flatnonzero(keep)}
        changed = new.keys() != self.members.keys()
        self.members = new
        return changed


# --------------------------------------------------------------------- evolve


@dataclass
class GenerationRecord:
    generation: int
    archive_size: int
    feasible: int
    best: dict[str, float]


@dataclass
class EvolveResult:
    archive: ParetoArchive
    generations: int
    convergence_generation: int
    converged: bool
    history: list[GenerationRecord]
    feasible_found: bool
    evaluations: int


def make_fitness(scenario: MissionScenario, grid_cells: int = 64,
                 evaluator: PlanEvaluator | None = None) -> Fitness:
    ev = evaluator or PlanEvaluator(scenario, grid_cells)
    costs = [u.cost_per_hour for u in scenario.uavs]

    def fitness(ch: Chromosome) -> ObjectiveVector:
        _, plan = ev.evaluate(ch, validate=False)
        return compute_objectives(plan, costs)

    return fitness


def evolve(scenario: MissionScenario, config: GaConfig, fitness: Fitness | None = None,
           on_generation: Callable | None = None) -> EvolveResult:
    """Run the GA until the archive is stable or the generation budget ends.

    Args:
        scenario: Problem instance.
        config: GA parameters.
        fitness: Optional replacement for the constraint-gated objective
            evaluation (must be deterministic).
        on_generation: Optional ``f(generation, population, vectors, archive)``
            observer called after initialisation and after each generation.
    """
    sel = config.objectives
    rng = np.random.Generator(np.random.PCG64(config.seed))
    enc = Encoding(scenario)
    fit = fitness or make_fitness(scenario, config.grid_cells)
    cache: dict[Chromosome, ObjectiveVector] = {}

    def evaluate_all(chs: Sequence[Chromosome]) -> list[ObjectiveVector]:
        out = []
        for ch in chs:
            v = cache.get(ch)
            if v is None:
                v = fit(ch)
                cache[ch] = v
            out.append(v)
        return out

    pop = init_population(scenario, config, rng, enc)
    vecs = evaluate_all(pop)
    archive = ParetoArchive(sel)
    archive.update(list(zip(pop, vecs)))
    history = [_record(0, archive, vecs, sel)]
    if on_generation:
        on_generation(0, pop, vecs, archive)

    lam, mu = config.population, config.elite
    n_off = lam - mu
    stable, last_change, gen = 0, 0, 0
    while gen < config.max_generations and stable < config.stop_generations:
        gen += 1
        F = np.array([v.values(sel) for v in vecs], dtype=float)
        ranks, crowd = rank_matrix(F)
        elite_idx = best_order(ranks, crowd)[:mu]
        elite = [pop[i] for i in elite_idx]
        weights = 1.0 / (1.0 + ranks[elite_idx])
        weights = weights / weights.sum()

        offspring: list[Chromosome] = []
        while len(offspring) < n_off:
            if mu > 1:
                i, j = rng.choice(mu, size=2, replace=False, p=weights)
            else:
                i = j = 0
            c1, c2 = crossover(elite[int(i)], elite[int(j)], rng)
            offspring.append(mutate(c1, config.mutation_probability, rng, enc))
            offspring.append(mutate(c2, config.mutation_probability, rng, enc))
        offspring = offspring[:n_off]
        off_vecs = evaluate_all(offspring)

        union = pop + offspring
        union_vecs = vecs + off_vecs
        U = np.array([v.values(sel) for v in union_vecs], dtype=float)
        u_ranks, u_crowd = rank_matrix(U)
        survivors = best_order(u_ranks, u_crowd)[:lam]
        pop = [union[i] for i in survivors]
        vecs = [union_vecs[i] for i in survivors]

        changed = archive.update(list(zip(offspring, off_vecs)))
        if changed:
            stable, last_change = 0, gen
        elif len(archive):
            stable += 1
        history.append(_record(gen, archive, vecs, sel))
        if on_generation:
            on_generation(gen, pop, vecs, archive)

    return EvolveResult(
        archive=archive,
        generations=gen,
        convergence_generation=last_change,
        converged=stable >= config.stop_generations,
        history=history,
        feasible_found=len(archive) > 0,
        evaluations=len(cache),
    )


def _record(gen: int, archive: ParetoArchive, vecs: Sequence[ObjectiveVector],
            sel: Sequence[str]) -> GenerationRecord:
    best = {}
    for k, name in enumerate(sel):
        vals = [key[k] for key in archive.keys()]
        best[name] = min(vals) if vals else math.inf
    return GenerationRecord(gen, len(archive), sum(v.feasible for v in vecs), best)
