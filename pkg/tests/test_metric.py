"""Metric core: validation, radii, charges, costs, lower bound."""

import json

import numpy as np
import pytest

from facloc.baselines import brute_force_opt
from facloc.generators import figure2_instance, random_instance
from facloc.metric import (
    AsymmetricDistance,
    Configuration,
    EmptyConfiguration,
    MetricInstance,
    NonPositiveOpeningCost,
    NonZeroDiagonal,
    TriangleViolation,
    ZeroDistanceBetweenDistinctPoints,
    characteristic_radii,
    charge,
    cost_lower_bound,
    read_instance,
    smoothed_radii,
    total_cost,
    validate_instance,
    write_instance,
)


def collinear3():
    """Points at coordinates 0, 1, 2 with opening cost 3 each."""
    return validate_instance(3, [[0, 1, 2], [1, 0, 1], [2, 1, 0]], [3.0, 3.0, 3.0])


def radius_by_bisection(row, cost):
    """Independent root-finder for the radius equation (monotone bisection)."""

    def g(r):
        return sum(max(0.0, r - d) for d in row)

    lo, hi = 0.0, cost + max(row) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < cost:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- validation ---------------------------------------------------------------


def test_validate_two_point_reference():
    inst = validate_instance(2, [[0, 1], [1, 0]], [1, 99])
    assert inst.n == 2
    assert inst.dist[0, 1] == 1.0


def test_validate_single_point():
    inst = validate_instance(1, [[0.0]], [5.0])
    assert inst.n == 1


def test_triangle_violation_reports_witness():
    with pytest.raises(TriangleViolation) as err:
        validate_instance(3, [[0, 1, 5], [1, 0, 1], [5, 1, 0]], [1, 1, 1])
    assert err.value.witness == (0, 1, 2)


def test_validate_rejections():
    with pytest.raises(NonZeroDiagonal):
        validate_instance(2, [[1, 1], [1, 0]], [1, 1])
    with pytest.raises(AsymmetricDistance):
        validate_instance(2, [[0, 1], [2, 0]], [1, 1])
    with pytest.raises(ZeroDistanceBetweenDistinctPoints):
        validate_instance(2, [[0, 0], [0, 0]], [1, 1])
    with pytest.raises(NonPositiveOpeningCost):
        validate_instance(2, [[0, 1], [1, 0]], [1, 0])


# -- characteristic radii -----------------------------------------------------


def test_radius_single_point():
    inst = validate_instance(1, [[0.0]], [5.0])
    assert characteristic_radii(inst)[0] == pytest.approx(5.0, abs=1e-12)


def test_radii_two_point_reference():
    r = characteristic_radii(figure2_instance())
    assert r == pytest.approx([1.0, 50.0], abs=1e-12)


def test_radii_collinear_match_bisection_oracle():
    inst = collinear3()
    r = characteristic_radii(inst)
    assert r == pytest.approx([2.0, 5.0 / 3.0, 2.0], rel=1e-12)
    for i in range(3):
        assert r[i] == pytest.approx(
            radius_by_bisection(inst.dist[i], inst.open_cost[i]), rel=1e-9
        )


def test_radii_match_bisection_on_random_instances():
    for t in range(25):
        inst = random_instance(10, seed=500 + t, kind="euclidean" if t % 2 else "graph-metric")
        r = characteristic_radii(inst)
        for i in range(inst.n):
            oracle = radius_by_bisection(inst.dist[i], inst.open_cost[i])
            assert abs(r[i] - oracle) <= 1e-9 * max(1.0, oracle)


def test_radii_satisfy_fixed_point_equation():
    for t in range(20):
        inst = random_instance(12, seed=700 + t)
        r = characteristic_radii(inst)
        for i in range(inst.n):
            inside = inst.dist[i] <= r[i]
            residual = (r[i] - inst.dist[i][inside]).sum() - inst.open_cost[i]
            assert abs(residual) <= 1e-9 * max(1.0, inst.open_cost[i])


# -- smoothed radii -----------------------------------------------------------


def test_smoothed_two_point_reference():
    inst = figure2_instance()
    rbar = smoothed_radii(inst, characteristic_radii(inst))
    assert rbar == pytest.approx([1.0, 2.0], abs=1e-12)


def test_smoothed_collinear_matches_direct_min():
    inst = collinear3()
    r = characteristic_radii(inst)
    rbar = smoothed_radii(inst, r)
    assert rbar == pytest.approx([2.0, 5.0 / 3.0, 2.0], rel=1e-12)
    for i in range(3):
        direct = min(inst.dist[i, j] + r[j] for j in range(3))
        assert rbar[i] == pytest.approx(direct, rel=1e-12)


def test_smoothed_dominated_and_idempotent():
    for t in range(15):
        inst = random_instance(14, seed=900 + t)
        r = characteristic_radii(inst)
        rbar = smoothed_radii(inst, r)
        assert (rbar <= r + 1e-12).all()
        again = smoothed_radii(inst, rbar)
        assert again == pytest.approx(rbar, rel=1e-12)


# -- configurations and charges -----------------------------------------------


def test_configuration_assignment_rules():
    inst = collinear3()
    config = Configuration.from_open(inst, [2, 0])
    assert config.open == (0, 2)
    assert config.assign[0] == 0 and config.assign[2] == 2
    # The middle point ties between both facilities; the lower index wins.
    assert config.assign[1] == 0
    with pytest.raises(EmptyConfiguration):
        Configuration.from_open(inst, [])


def test_charge_two_point_reference():
    inst = figure2_instance()
    r = characteristic_radii(inst)
    config = Configuration.from_open(inst, [0])
    assert charge(inst, r, 0, config) == pytest.approx(1.0, abs=1e-12)
    assert charge(inst, r, 1, config) == pytest.approx(1.0, abs=1e-12)
    assert charge(inst, r, 0, config) + charge(inst, r, 1, config) == pytest.approx(
        total_cost(inst, config), abs=1e-12
    )


def test_charge_of_isolated_facility_is_its_radius():
    inst = validate_instance(1, [[0.0]], [5.0])
    r = characteristic_radii(inst)
    config = Configuration.from_open(inst, [0])
    assert charge(inst, r, 0, config) == pytest.approx(r[0], abs=1e-12)


def test_charge_matches_independent_formula():
    rng = np.random.default_rng(4)
    for t in range(30):
        inst = random_instance(6, seed=1100 + t)
        r = characteristic_radii(inst)
        open_set = sorted(rng.choice(6, size=int(rng.integers(1, 7)), replace=False))
        config = Configuration.from_open(inst, open_set)
        for i in range(6):
            direct = min(inst.dist[i][j] for j in open_set)
            for j in open_set:
                direct += max(0.0, r[j] - inst.dist[j][i])
            assert charge(inst, r, i, config) == pytest.approx(direct, rel=1e-12)


def test_cost_of_opening_everything_is_total_opening_cost():
    inst = collinear3()
    config = Configuration.from_open(inst, range(3))
    assert total_cost(inst, config) == pytest.approx(float(inst.open_cost.sum()), rel=1e-12)


def test_charge_identity_on_random_instances():
    rng = np.random.default_rng(5)
    for t in range(40):
        inst = random_instance(8, seed=1300 + t)
        r = characteristic_radii(inst)
        open_set = rng.choice(8, size=int(rng.integers(1, 9)), replace=False)
        config = Configuration.from_open(inst, open_set)
        charges = sum(charge(inst, r, i, config) for i in range(8))
        cost = total_cost(inst, config)
        assert abs(charges - cost) <= 1e-9 * max(1.0, cost)


# -- lower bound --------------------------------------------------------------


def test_lower_bound_two_point_reference():
    inst = figure2_instance()
    assert cost_lower_bound(inst) == pytest.approx(0.5, abs=1e-12)
    assert cost_lower_bound(inst) <= brute_force_opt(inst).cost


def test_lower_bound_single_point():
    inst = validate_instance(1, [[0.0]], [5.0])
    assert cost_lower_bound(inst) == pytest.approx(5.0 / 6.0, rel=1e-12)
    assert cost_lower_bound(inst) <= brute_force_opt(inst).cost


def test_lower_bound_below_optimum_on_random_instances():
    for t in range(200):
        inst = random_instance(8, seed=1500 + t, kind="euclidean" if t % 2 else "graph-metric")
        assert cost_lower_bound(inst) <= brute_force_opt(inst).cost * (1 + 1e-12)


# -- scaling covariance -------------------------------------------------------


def test_scaling_covariance_is_exact_for_power_of_two():
    inst = random_instance(9, seed=77)
    lam = 2.0  # scaling by a power of two commutes with float rounding
    scaled = MetricInstance(inst.n, lam * inst.dist, lam * inst.open_cost)
    r, r2 = characteristic_radii(inst), characteristic_radii(scaled)
    assert np.array_equal(lam * r, r2)
    assert np.array_equal(lam * smoothed_radii(inst, r), smoothed_radii(scaled, r2))
    opt, opt2 = brute_force_opt(inst), brute_force_opt(scaled)
    assert opt.config.open == opt2.config.open
    assert opt2.cost == lam * opt.cost


# -- file format --------------------------------------------------------------


def test_instance_json_round_trip(tmp_path):
    inst = random_instance(7, seed=3)
    path = tmp_path / "inst.json"
    write_instance(inst, str(path))
    data = json.loads(path.read_text())
    assert set(data) == {"n", "f", "d"}
    loaded = read_instance(str(path))
    assert loaded.n == inst.n
    assert np.array_equal(loaded.dist, inst.dist)
    assert np.array_equal(loaded.open_cost, inst.open_cost)
