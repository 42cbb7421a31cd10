import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import checker_scenarios, two_by_two
from independent import all_chromosomes
from missionplan.objectives import (
    OBJECTIVE_NAMES,
    PENALTY,
    ObjectiveVector,
    batch_bounds,
    compute_objectives,
    dominates,
    parse_selection,
    rating,
)
from missionplan.plan import DecodedPlan, PlanEvaluator, UavSchedule


def sched(u, legs, flight_time=0.0, fuel=0.0, dist=0.0, ret=0.0):
    s = UavSchedule(u, 0, 0, legs)
    s.flight_time, s.total_fuel, s.total_distance, s.return_time = flight_time, fuel, dist, ret
    return s


def vec(*vals, feasible=True):
    vals = list(vals) + [0.0] * (6 - len(vals))
    return ObjectiveVector(*vals, feasible=feasible)


def test_makespan_is_latest_return_and_cost_uses_hourly_rate():
    plan = DecodedPlan(None, [sched(0, [object()], 3.0, 30.0, 300.0, 5.0),
                              sched(1, [object()], 2.0, 10.0, 100.0, 7.5)])
    v = compute_objectives(plan, [10.0, 4.0])
    assert v.makespan == 7.5
    assert v.total_cost == pytest.approx(10 * 3 + 4 * 2)
    assert (v.n_uavs, v.total_flight_time, v.total_fuel, v.total_distance) == (2, 5.0, 40.0, 400.0)


def test_unused_uav_contributes_nothing():
    plan = DecodedPlan(None, [sched(0, [object()], 3.0, 30.0, 300.0, 5.0), sched(1, [], 99.0, 99.0, 99.0, 99.0)])
    v = compute_objectives(plan, [10.0, 1000.0])
    assert v.n_uavs == 1
    assert v.total_cost == 30.0
    assert v.makespan == 5.0


def test_infeasible_plan_gets_penalty():
    assert compute_objectives(None, [1.0]) is PENALTY
    assert not PENALTY.feasible
    assert all(math.isinf(x) for x in PENALTY.values())


def test_objectives_resum_the_decoded_schedule():
    sc = checker_scenarios()[0]
    ev = PlanEvaluator(sc, 64)
    costs = [u.cost_per_hour for u in sc.uavs]
    checked = 0
    for ch in itertools.islice(all_chromosomes(sc), 0, 13824, 37):
        report, plan = ev.evaluate(ch)
        if not report.feasible:
            continue
        v = compute_objectives(plan, costs)
        used = [s for s in plan.schedules if s.legs]
        ft = [sum(l.dur_path + l.dur_task + l.dur_loiter for l in s.legs) + s.dur_return for s in used]
        assert v.total_flight_time == pytest.approx(sum(ft), rel=1e-12)
        assert v.total_cost == pytest.approx(sum(costs[s.uav] * f for s, f in zip(used, ft)), rel=1e-12)
        assert v.total_distance == pytest.approx(sum(
            sum(l.distance_path + l.distance_task + l.distance_loiter for l in s.legs) + s.distance_return
            for s in used), rel=1e-12)
        assert v.makespan == pytest.approx(max(s.legs[-1].end + s.dur_return for s in used), rel=1e-12)
        checked += 1
    assert checked > 0


def test_dominance_examples():
    a, b = vec(1, 2), vec(2, 2)
    assert dominates(a, b) and not dominates(b, a)
    assert not dominates(a, a)
    c = vec(2, 1)
    assert not dominates(a, c) and not dominates(c, a)
    assert dominates(c, a, ("flight-time",))


small = st.integers(0, 3).map(float)
vectors = st.lists(small, min_size=6, max_size=6).map(lambda xs: ObjectiveVector(*xs))


@given(vectors, vectors, vectors)
def test_dominance_is_a_strict_partial_order(a, b, c):
    assert not dominates(a, a)
    assert not (dominates(a, b) and dominates(b, a))
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


def test_selection_parsing():
    assert parse_selection("distance, makespan") == ("distance", "makespan")
    assert parse_selection(OBJECTIVE_NAMES) == OBJECTIVE_NAMES
    for bad in ("", "distance,distance", "speed"):
        with pytest.raises(ValueError):
            parse_selection(bad)


def test_rating_examples():
    batch = [vec(1, 10, 100, 0, 0, 0), vec(3, 20, 300, 0, 0, 0), vec(2, 15, 200, 0, 0, 0)]
    lo, hi = batch_bounds(batch)
    assert lo == [1, 10, 100, 0, 0, 0] and hi == [3, 20, 300, 0, 0, 0]
    assert rating(batch, lo, hi) == pytest.approx([0.0, 3.0, 1.5])


def test_rating_single_objective_midpoint():
    assert rating([vec(5)], [0] * 6, [10, 0, 0, 0, 0, 0]) == [0.5]
    assert rating([vec(1, 2, 3, 4, 5, 6)], [1, 2, 3, 4, 5, 6], [9] * 6) == [0.0]


def test_rating_of_singleton_batch_is_zero():
    v = [vec(1, 2, 3, 4, 5, 6)]
    assert rating(v, *batch_bounds(v)) == [0.0]


def test_rating_rejects_bad_input():
    with pytest.raises(ValueError):
        rating([], [0] * 6, [1] * 6)
    with pytest.raises(ValueError):
        rating([vec(1)], [2] + [0] * 5, [1] * 6)


@given(st.lists(st.lists(st.floats(0, 1e3), min_size=6, max_size=6), min_size=2, max_size=8),
       st.lists(st.floats(0.5, 20), min_size=6, max_size=6),
       st.lists(st.floats(-50, 50), min_size=6, max_size=6))
def test_rating_invariant_under_positive_affine_maps(rows, scale, shift):
    batch = [ObjectiveVector(*r) for r in rows]
    moved = [ObjectiveVector(*(a * x + b for x, a, b in zip(r, scale, shift))) for r in rows]
    base = rating(batch, *batch_bounds(batch))
    other = rating(moved, *batch_bounds(moved))
    # columns that collapse to a constant after rounding may differ; skip those batches
    lo, hi = batch_bounds(batch)
    mlo, mhi = batch_bounds(moved)
    if any((h > l) != (mh > ml) for l, h, ml, mh in zip(lo, hi, mlo, mhi)):
        return
    assert other == pytest.approx(base, abs=1e-6)


def test_rating_is_monotone_in_each_objective():
    batch = [vec(1, 1, 1, 1, 1, 1), vec(3, 3, 3, 3, 3, 3), vec(2, 2, 2, 2, 2, 2)]
    lo, hi = batch_bounds(batch)
    r = rating(batch, lo, hi)
    assert r[0] < r[2] < r[1]
    assert r[0] == 0.0 and r[1] == pytest.approx(6.0)


def test_two_by_two_objectives_are_finite():
    sc = two_by_two()
    ev = PlanEvaluator(sc, 32)
    found = 0
    for ch in all_chromosomes(sc):
        report, plan = ev.evaluate(ch)
        if report.feasible:
            v = compute_objectives(plan, scenario=sc)
            assert all(math.isfinite(x) for x in v.values())
            assert v.n_uavs >= 1
            found += 1
    assert found > 0
