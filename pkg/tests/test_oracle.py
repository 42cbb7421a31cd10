import itertools
import math

import numpy as np
import pytest

from builders import checker_scenarios, gcs, one_task, scenario, tp, two_by_two, uav
from independent import Checker, all_chromosomes
from missionplan.datasets import generate_dataset, random_small_recipe
from missionplan.objectives import ObjectiveVector
from missionplan.oracle import compare_fronts, exact_pof, hypervolume, hypervolume_mc, nondominated

SMALL = [one_task(), two_by_two()] + checker_scenarios()


def inclusion_exclusion(points, ref):
    """Union of boxes [p, ref] by inclusion-exclusion (exponential, tiny inputs only)."""
    pts = [np.asarray(p, float) for p in points]
    ref = np.asarray(ref, float)
    total = 0.0
    for k in range(1, len(pts) + 1):
        for sub in itertools.combinations(pts, k):
            corner = np.max(sub, axis=0)
            total += (-1) ** (k + 1) * float(np.prod(np.clip(ref - corner, 0, None)))
    return total


def independent_front(sc):
    """(distance, makespan) front from the naive checker over every chromosome."""
    ck = Checker(sc, 32)
    rows = []
    for ch in all_chromosomes(sc):
        if ck.families(ch):
            continue
        used = [s for s in ck.simulate(ch) if s["legs"]]
        rows.append((sum(s["dist"] for s in used), max(s["ret_time"] for s in used)))
    return sorted(map(tuple, nondominated(np.array(rows)))) if rows else []


# --------------------------------------------------------------- exact front


@pytest.mark.parametrize("sc", SMALL, ids=lambda s: s.name)
@pytest.mark.parametrize("objectives", [("distance", "makespan"), ("uavs", "fuel", "cost"), ("flight-time",)])
def test_pruned_search_matches_brute_force(sc, objectives):
    a = exact_pof(sc, objectives, grid_cells=32)
    b = exact_pof(sc, objectives, prune=False, grid_cells=32)
    assert not a.overflow and not b.overflow
    assert a.keys() == b.keys()


@pytest.mark.parametrize("sc", [two_by_two()] + checker_scenarios(), ids=lambda s: s.name)
def test_front_matches_independent_checker(sc):
    got = sorted(tuple(p) for p in exact_pof(sc, grid_cells=32).points())
    want = independent_front(sc)
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert g == pytest.approx(w, rel=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_pruned_matches_brute_on_random_instances(seed):
    sc = generate_dataset(random_small_recipe(seed, max_tasks=3, max_uavs=2))
    a = exact_pof(sc, ("distance", "makespan", "cost"), grid_cells=32)
    b = exact_pof(sc, ("distance", "makespan", "cost"), prune=False, grid_cells=32)
    assert a.keys() == b.keys()


def test_single_task_front_is_a_point():
    front = exact_pof(one_task(), ("distance", "makespan"), grid_cells=32)
    assert len(front.vectors) == 1
    assert front.witnesses[0].assign == ((0,),)


def test_infeasible_instance_has_empty_front():
    # the lone ground station cannot control the lone UAV
    sc = scenario([tp("T1", 1.0, 1.0)], [uav("URAV", "U1")], [gcs(types=("HALE",))])
    front = exact_pof(sc, grid_cells=32)
    assert not front.overflow
    assert front.vectors == [] and front.points().shape == (0, 2)


def test_budget_overflow_is_reported():
    sc = checker_scenarios()[2]
    assert exact_pof(sc, budget=10, grid_cells=32).overflow
    assert exact_pof(sc, budget=10, prune=False, grid_cells=32).overflow


# ---------------------------------------------------------------- hypervolume


def test_hypervolume_gap_example():
    opt = [(1, 3), (2, 2), (3, 1)]
    app = [(2, 3), (3, 2)]
    assert compare_fronts(opt, app).hypervolume == pytest.approx(0.35)
    assert compare_fronts(opt, opt).hypervolume == 0.0


def test_gap_ignores_summation_noise():
    # equivalent plans whose sums differ in the last bit
    assert compare_fronts([(524.4613198747988, 1.3858782815902928)],
                          [(524.461319874799, 1.3858782815902928)]).hypervolume == 0.0
    assert compare_fronts([(1.0, 3.0), (3.0, 1.0)], [(1.0 + 4e-16, 3.0), (3.0, 1.0)]).hypervolume == 0.0
    assert compare_fronts([(0.0000000015, 1.0)], [(0.00000000149999999, 1.0)]).hypervolume == 0.0


def test_gap_of_superset_is_zero():
    opt = [(1, 3), (3, 1)]
    assert compare_fronts(opt, opt + [(2, 2)]).hypervolume == 0.0


def test_gap_accepts_objective_vectors():
    a = [ObjectiveVector(0, 0, 0, 1, 0, 3), ObjectiveVector(0, 0, 0, 3, 0, 1)]
    b = [ObjectiveVector(0, 0, 0, 3, 0, 3)]
    assert compare_fronts(a, b, ("distance", "makespan")).hypervolume > 0


def test_gap_rejects_empty_or_infinite_fronts():
    with pytest.raises(ValueError):
        compare_fronts([], [(1, 1)])
    with pytest.raises(ValueError):
        compare_fronts([(1, 1)], [(math.inf, 1)])


def test_rectangle_volumes():
    assert hypervolume(np.array([[0.0, 0.0]]), [1.0, 2.0]) == pytest.approx(2.0)
    assert hypervolume(np.array([[0.5, 0.5, 0.5]]), [1.0, 1.0, 1.0]) == pytest.approx(0.125)
    assert hypervolume(np.array([[2.0, 0.0]]), [1.0, 1.0]) == 0.0


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_hypervolume_matches_inclusion_exclusion(dim):
    rng = np.random.default_rng(dim)
    for _ in range(60):
        pts = rng.random((int(rng.integers(1, 7)), dim))
        ref = np.full(dim, 1.1)
        assert hypervolume(pts, ref) == pytest.approx(inclusion_exclusion(pts, ref), abs=1e-12)


def test_hypervolume_is_monotone_under_additions():
    rng = np.random.default_rng(11)
    for _ in range(100):
        pts = rng.random((5, 3))
        extra = rng.random((1, 3))
        ref = np.ones(3)
        assert hypervolume(np.vstack([pts, extra]), ref) >= hypervolume(pts, ref) - 1e-12


def test_monte_carlo_estimate_agrees_with_exact():
    rng = np.random.default_rng(2)
    pts = rng.random((6, 5))
    ref = np.full(5, 1.1)
    est, se = hypervolume_mc(pts, ref, 200_000, seed=1)
    exact = inclusion_exclusion(pts, ref)
    assert abs(est - exact) <= 4 * se + 1e-12
