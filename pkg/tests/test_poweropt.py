"""Feasibility checks and power-split optimizer behavior.

The K=2 feasible sets have closed forms (far share above theta/(1+theta) for
SIC decoding, above (1+theta)/(2+theta) under JT), so the region predicate is
checked exhaustively against those inequalities.  Optimizer results are pinned
on the two-tier reference network where the lattice is small enough to
enumerate by hand.
"""

import numpy as np
import pytest

from conftest import MU, two_tier_network
from nomalab.analytics import PowerAllocation, Scheme, cell_coverage, cell_throughput
from nomalab.errors import SpecError
from nomalab.poweropt import (
    FeasibleRegion,
    feasible,
    feasible_region,
    optimize_cell_coverage,
    optimize_cell_throughput,
)

NC = Scheme.NON_COORDINATED
JT = Scheme.COORDINATED_JT


@pytest.fixture(scope="module")
def balanced():
    return two_tier_network(MU)


# ---------------------------------------------------------------------------
# feasibility verdicts


def test_feasible_reference_split():
    verdict = feasible(PowerAllocation((0.25, 0.75)), 1.0, NC)
    assert verdict.ok
    assert bool(verdict)
    assert verdict.violation is None


def test_equal_split_rejected_with_named_constraint():
    verdict = feasible(PowerAllocation((0.5, 0.5)), 1.0, NC)
    assert not verdict.ok
    assert not bool(verdict)
    assert verdict.violation == (
        "user 2 decode margin: beta[2] > theta * sum(beta[1..1]) (slack 0)"
    )


def test_jt_violation_names_binding_margin():
    alloc = PowerAllocation((0.34, 0.66))
    # fine for plain SIC decoding, but the JT combining margin is negative
    assert feasible(alloc, 1.0, NC).ok
    verdict = feasible(alloc, 1.0, JT)
    assert not verdict.ok
    assert verdict.violation == (
        "JT margin at user 1: beta[2] > beta[1] + theta * sum(beta[1..1]) (slack -0.02)"
    )


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
def test_two_user_region_matches_closed_form(theta):
    # NC: beta2 > theta*beta1; JT adds beta2 > (1+theta)*beta1.
    for b2 in np.linspace(0.505, 0.995, 99):
        alloc = PowerAllocation((1.0 - float(b2), float(b2)))
        b1 = 1.0 - b2
        assert feasible(alloc, theta, NC).ok == (b2 - theta * b1 > 0)
        assert feasible(alloc, theta, JT).ok == (b2 - (1.0 + theta) * b1 > 0)


def test_jt_boundary_is_excluded():
    third = PowerAllocation((1.0 / 3.0, 2.0 / 3.0))
    assert not feasible(third, 1.0, JT).ok
    assert feasible(PowerAllocation((0.333, 0.667)), 1.0, JT).ok


def test_single_user_always_feasible():
    one = PowerAllocation((1.0,))
    for theta in (0.1, 1.0, 50.0):
        assert feasible(one, theta, NC).ok
        assert feasible(one, theta, JT).ok


def test_feasible_accepts_scheme_name():
    alloc = PowerAllocation((0.25, 0.75))
    assert feasible(alloc, 1.0, "non_coordinated").ok
    with pytest.raises(ValueError):
        feasible(alloc, 1.0, "round_robin")


def test_feasible_rejects_bad_threshold():
    alloc = PowerAllocation((0.25, 0.75))
    with pytest.raises(ValueError):
        feasible(alloc, 0.0, NC)
    with pytest.raises(ValueError):
        feasible(alloc, -1.0, JT)


# ---------------------------------------------------------------------------
# feasible_region


def test_region_validation():
    with pytest.raises(ValueError):
        feasible_region(0, 1.0, NC)
    with pytest.raises(ValueError):
        feasible_region(2, 0.0, NC)


def test_region_lists_constraints():
    region = feasible_region(2, 1.0, NC)
    assert isinstance(region, FeasibleRegion)
    assert len(region.constraints) == 2
    assert all("beta" in text for text in region.constraints)
    jt_region = feasible_region(2, 1.0, JT)
    assert any("JT" in text for text in jt_region.constraints)


def test_region_contains_and_margin():
    region = feasible_region(2, 1.0, NC)
    assert region.contains((0.25, 0.75))
    assert not region.contains((0.5, 0.5))
    # margin shrinks the region: the binding slack at (0.25, 0.75) is beta1
    assert region.contains((0.25, 0.75), margin=0.24)
    assert not region.contains((0.25, 0.75), margin=0.25)
    with pytest.raises(ValueError):
        region.contains((0.2, 0.3, 0.5))


# ---------------------------------------------------------------------------
# optimizers: pinned results on the balanced two-tier network


def test_coverage_grid_optimum(balanced):
    res = optimize_cell_coverage(balanced, 0, NC, method="grid", resolution=0.01)
    assert res.method == "grid"
    assert res.best_alloc.betas == (0.21, 0.79)
    assert res.best_value == pytest.approx(0.7626088318853135, rel=1e-12)
    assert res.evaluations == 49
    assert feasible(res.best_alloc, 1.0, NC).ok


def test_coverage_pattern_refines_grid(balanced):
    res = optimize_cell_coverage(balanced, 0, NC, method="pattern", resolution=0.01)
    assert res.method == "pattern"
    assert res.best_alloc.betas == pytest.approx(
        (0.20839843749999998, 0.7916015625), rel=1e-12
    )
    assert res.best_value == pytest.approx(0.7626134420842152, rel=1e-12)
    assert res.evaluations == 81
    assert res.best_value >= 0.7626088318853135


def test_throughput_grid_optimum(balanced):
    res = optimize_cell_throughput(balanced, 1, NC, method="grid", resolution=0.01)
    assert res.best_alloc.betas == (0.32, 0.68)
    assert res.best_value == pytest.approx(2.411281962505737, rel=1e-12)
    assert res.evaluations == 49


def test_throughput_pattern_optimum(balanced):
    res = optimize_cell_throughput(balanced, 1, NC, method="pattern", resolution=0.01)
    assert res.best_alloc.betas == pytest.approx(
        (0.32302734375, 0.6769726562499999), rel=1e-12
    )
    assert res.best_value == pytest.approx(2.4113330895935374, rel=1e-12)
    assert res.evaluations == 81


def test_optima_sit_in_expected_bands(balanced):
    cov = optimize_cell_coverage(balanced, 0, NC, method="grid", resolution=0.01)
    thr = optimize_cell_throughput(balanced, 1, NC, method="grid", resolution=0.01)
    assert abs(cov.best_alloc.betas[1] - 0.80) <= 0.05
    assert abs(thr.best_alloc.betas[1] - 0.65) <= 0.05


def test_pattern_dominates_random_feasible_draws(balanced):
    best = optimize_cell_coverage(
        balanced, 0, NC, method="pattern", resolution=0.01
    ).best_value
    rng = np.random.default_rng(7)
    for b2 in rng.uniform(0.5 + 1e-6, 1.0 - 1e-6, 300):
        alloc = PowerAllocation((1.0 - float(b2), float(b2)))
        assert cell_coverage(balanced, alloc, 0, NC) <= best + 1e-12


def test_grid_refinement_never_degrades(balanced):
    values = [
        optimize_cell_coverage(balanced, 0, NC, method="grid", resolution=r).best_value
        for r in (0.2, 0.1, 0.05, 0.025, 0.01)
    ]
    assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))
    assert values[-1] > values[0]


def test_throughput_objective_is_unimodal(balanced):
    shares = np.arange(0.505, 0.9951, 0.001)
    obj = [
        cell_throughput(balanced, PowerAllocation((1.0 - float(b), float(b))), 1, NC)
        for b in shares
    ]
    steps = np.diff(obj)
    signs = np.sign(steps[steps != 0.0])
    assert int(np.sum(signs[:-1] != signs[1:])) == 1
    assert signs[0] > 0 and signs[-1] < 0


def test_jt_grid_enumerates_only_feasible_cells(balanced):
    # at resolution 0.02 the JT constraint beta2 > 2*beta1 leaves 16 lattice points
    res = optimize_cell_coverage(balanced, 1, JT, method="grid", resolution=0.02)
    assert res.evaluations == 16
    assert res.best_alloc.betas == (0.14, 0.86)
    assert res.best_value == pytest.approx(0.7564723291632534, rel=1e-12)
    assert feasible(res.best_alloc, 1.0, JT).ok


def test_three_user_coarse_lattice(balanced):
    cfg = two_tier_network(MU, group_size=3)
    res = optimize_cell_coverage(cfg, 1, NC, method="grid", resolution=0.1)
    # ordered positive triples on the 0.1 lattice with strict decode margins:
    # only (0.1, 0.2, 0.7) and (0.1, 0.3, 0.6) qualify at theta=1
    assert res.evaluations == 2
    assert res.best_alloc.betas == (0.1, 0.3, 0.6)
    assert res.best_value == pytest.approx(0.3641589367954469, rel=1e-12)


def test_single_user_group_is_trivial():
    cfg = two_tier_network(MU, group_size=1)
    res = optimize_cell_coverage(cfg, 0, NC, method="grid", resolution=0.01)
    assert res.best_alloc.betas == (1.0,)
    assert res.evaluations == 1
    assert res.best_value == pytest.approx(
        cell_coverage(cfg, PowerAllocation((1.0,)), 0, NC), rel=1e-12
    )


def test_coarse_lattice_with_no_feasible_point_raises(balanced):
    with pytest.raises(SpecError, match="no feasible power split on the step-0.5 lattice"):
        optimize_cell_coverage(balanced, 0, NC, method="grid", resolution=0.5)


def test_optimizer_argument_validation(balanced):
    with pytest.raises(ValueError):
        optimize_cell_coverage(balanced, 0, NC, method="newton", resolution=0.01)
    for resolution in (0.0, 1.0, 1.5, -0.1):
        with pytest.raises(ValueError):
            optimize_cell_coverage(balanced, 0, NC, method="grid", resolution=resolution)
