import numpy as np
import pytest

from geometry.base.errors import PreconditionError
from geometry.surface_group import GroupWord, axis_of
from dynamics.base.lifted_system import IdentitySystem
from dynamics.systems.isometry import IsometrySystem
from dynamics.systems.twist import make_twist
from dynamics.trajectory import iterate
from rotation.audits import AuditReport, power_inverse_audit, star_shape_audit
from rotation.estimation import (
    DirectionalSpeedSet,
    RotationSetEstimate,
    annulus_rotation_number,
    annulus_sandwich,
    axis_seeds,
    direction_set,
    displacement_sample,
    grid_seeds,
    homological_vector,
    metric_rescale,
    realisation_distance_check,
    rotation_sample,
    scan_rotation_set,
)
from rotation.periodic import periodic_orbit_search

from conftest import TWIST_CORE, TWIST_THETA, TWIST_WIDTH


def test_identity_system_has_zero_rotation(genus2):
    seeds = grid_seeds(genus2, 6, seed=1)
    estimate = scan_rotation_set(IdentitySystem(genus2), 1, seeds, 10)
    assert estimate.directions == {}
    assert all(s.speed == 0.0 for s in estimate.samples)
    assert all(not np.any(h.v) for h in estimate.homology)


def test_isometry_speed_equals_translation_length(genus2):
    axis, length = axis_of(genus2, "a1")
    traj = iterate(IsometrySystem(genus2, "a1"), 0.1 + 0.05j, 50)
    sample = rotation_sample(traj, axis, deck="a1")
    assert sample.speed == pytest.approx(length, abs=1e-8)
    assert sample.displacement > 0.0


def test_isometry_speed_stays_exact_on_long_orbits(genus2):
    axis, length = axis_of(genus2, "a1")
    traj = iterate(IsometrySystem(genus2, "a1"), 0.1 + 0.05j, 1000)
    sample = rotation_sample(traj, axis, deck="a1")
    assert sample.speed == pytest.approx(length, abs=1e-9)
    assert abs(sample.offsets[1] - sample.offsets[0]) < 1e-9


def test_reversed_axis_reads_negative_displacement(genus2):
    axis, length = axis_of(genus2, "a1")
    traj = iterate(IsometrySystem(genus2, "a1"), 0.1 + 0.05j, 30)
    sample = rotation_sample(traj, axis.reversed(), deck="a1")
    assert sample.displacement == pytest.approx(-30 * length, abs=1e-9)


def test_deck_must_own_the_geodesic(genus2):
    axis, _ = axis_of(genus2, "a1")
    traj = iterate(IsometrySystem(genus2, "a1"), 0j, 3)
    with pytest.raises(PreconditionError):
        rotation_sample(traj, axis, deck="b1")


def test_displacement_sample_on_long_orbits(genus2):
    _, length = axis_of(genus2, "a1")
    axis_start = axis_seeds(genus2, "a1", [0.0], 1)[0]
    sample = displacement_sample(iterate(IsometrySystem(genus2, "a1"), axis_start, 400))
    assert sample.direction is not None
    assert sample.speed == pytest.approx(length, abs=1e-9)


def test_isometry_homology_and_word_growth(genus2):
    traj = iterate(IsometrySystem(genus2, "a1"), 0j, 20)
    h = homological_vector(traj)
    assert h.v.tolist() == [1.0, 0.0, 0.0, 0.0]
    assert h.word_length == 20


def test_commutator_has_zero_homology(genus2):
    traj = iterate(IsometrySystem(genus2, "a1 b1 A1 B1"), 0j, 10)
    h = homological_vector(traj)
    assert not np.any(h.v)
    assert h.word_length > 0


def test_twist_speed_on_its_core(genus2, twist):
    traj = iterate(twist, axis_seeds(genus2, TWIST_CORE, [0.0], 1)[0], 50)
    assert rotation_sample(traj, twist.axis, deck=TWIST_CORE).speed == pytest.approx(TWIST_THETA, abs=1e-6)


def test_twist_homology_follows_the_core(genus2, twist):
    n = 200
    traj = iterate(twist, axis_seeds(genus2, TWIST_CORE, [0.0], 1)[0], n)
    v = homological_vector(traj).v
    expected = np.array([0.0, 0.0, TWIST_THETA / twist.length, 0.0])
    assert np.max(np.abs(v - expected)) <= 1.0 / n + 2e-2


def test_annulus_sandwich_for_isometry(genus2):
    _, length = axis_of(genus2, "a1")
    estimate = annulus_rotation_number(IsometrySystem(genus2, "a1"), "a1", grid_seeds(genus2, 8), 20)
    assert estimate.sandwich_holds
    assert estimate.forward_speed == pytest.approx(length, rel=0.1)
    assert estimate.reversed_speed == 0.0
    assert len(estimate.to_frame()) == 8


def test_annulus_sandwich_for_twist(genus2, twist):
    estimate = annulus_rotation_number(twist, TWIST_CORE, grid_seeds(genus2, 16, seed=3), 60)
    assert estimate.sandwich_holds
    assert 0.0 <= estimate.forward_speed <= TWIST_THETA + twist.length / 60


def test_annulus_band_jump_matches_isometry_steps(genus2):
    estimate = annulus_rotation_number(IsometrySystem(genus2, "a1"), "a1", grid_seeds(genus2, 4), 200)
    for s in estimate.samples:
        assert s["band_end"] - s["band_start"] == 200
        assert s["speed"] == pytest.approx(estimate.length, abs=1e-12)


def test_annulus_sandwich_rejects_mismatched_displacement(genus2):
    estimate = annulus_rotation_number(IsometrySystem(genus2, "a1"), "a1", grid_seeds(genus2, 3), 10)
    assert estimate.sandwich_holds
    estimate.samples[1]["displacement"] += 2.5 * estimate.length
    assert not estimate.sandwich_holds
    assert estimate.to_dict()["sandwich_holds"] is False


def test_annulus_sandwich_bounds():
    assert annulus_sandwich(3, 3.5, 1.0)
    assert annulus_sandwich(4, 3.5, 1.0)
    assert annulus_sandwich(2, 2.0, 1.0)
    assert not annulus_sandwich(5, 3.5, 1.0)
    assert not annulus_sandwich(-1, 0.2, 1.0)


def test_scan_bins_core_direction(genus2, twist):
    seeds = axis_seeds(genus2, TWIST_CORE, [0.0, 0.1], 4)
    estimate = scan_rotation_set(twist, 1, seeds, 40)
    speed_set = estimate.speed_set(TWIST_CORE)
    assert speed_set is not None
    assert speed_set.v_max == pytest.approx(TWIST_THETA, abs=2e-2)
    assert TWIST_CORE in direction_set(estimate)
    assert len(estimate.to_frame()) == len(seeds)


def test_scan_is_thread_independent(genus2, twist):
    seeds = axis_seeds(genus2, TWIST_CORE, [0.0, 0.2], 2)
    one = scan_rotation_set(twist, 1, seeds, 20, {"threads": 1})
    four = scan_rotation_set(twist, 1, seeds, 20, {"threads": 4})
    assert [s.speed for s in one.samples] == [s.speed for s in four.samples]


def test_metric_rescale():
    assert metric_rescale([1.0, 2.0], 2.0, 4.0).tolist() == [2.0, 4.0]


def test_realisation_distance_check(genus2, twist):
    traj = iterate(twist, axis_seeds(genus2, TWIST_CORE, [0.1], 1)[0], 20)
    sample = rotation_sample(traj, twist.axis, deck=TWIST_CORE)
    check = realisation_distance_check(sample, 0.0, genus2.circumradius)
    assert check["ok"]
    assert check["start_distance"] == pytest.approx(0.1, abs=1e-9)


def test_periodic_identity_rotation(genus2):
    result = periodic_orbit_search(IdentitySystem(genus2), "a1", 0, 1, {"grid_size": 4})
    assert result.found
    assert result.residual == pytest.approx(0.0, abs=1e-12)


def test_periodic_point_for_rational_twist(genus2):
    _, length = axis_of(genus2, TWIST_CORE)
    S = make_twist(genus2, TWIST_CORE, length / 3.0, TWIST_WIDTH)
    result = periodic_orbit_search(S, TWIST_CORE, 1, 3, {"along": S.axis, "grid_size": 16})
    assert result.found
    assert result.residual < 1e-6
    assert result.to_dict()["q"] == 3


def test_periodic_search_reports_missing_orbit(genus2):
    result = periodic_orbit_search(IdentitySystem(genus2), "a1", 1, 1, {"grid_size": 4, "refine_best": 1,
                                                                       "max_iterations": 20})
    assert not result.found
    assert result.to_dict()["witness"] is None


def test_star_shape_audit_passes_for_dense_speeds(genus2, twist):
    estimate = RotationSetEstimate()
    speeds = DirectionalSpeedSet(GroupWord.parse(TWIST_CORE), twist.axis, twist.length)
    for v in np.linspace(0.0, TWIST_THETA, 41):
        speeds.add(v)
    estimate.directions[TWIST_CORE] = speeds
    report = star_shape_audit(estimate, twist)
    assert report["passed"]
    assert report["details"][TWIST_CORE]["extra_samples"] == 0


def test_star_shape_audit_fills_gaps_on_twist(genus2, twist):
    estimate = RotationSetEstimate()
    speeds = DirectionalSpeedSet(GroupWord.parse(TWIST_CORE), twist.axis, twist.length)
    speeds.add(TWIST_THETA)
    estimate.directions[TWIST_CORE] = speeds
    report = star_shape_audit(estimate, twist, config={"n": 30, "budget": 200})
    assert report["passed"], report["findings"]
    assert report["details"][TWIST_CORE]["extra_samples"] > 0


def test_power_inverse_audit_on_twist(genus2, twist):
    seeds = axis_seeds(genus2, TWIST_CORE, [0.0], 3)
    report = power_inverse_audit(twist, 2, seeds, 30, word_ball_radius=1)
    assert report["passed"], report["findings"]
    detail = report["details"][TWIST_CORE]
    assert detail["v_max_power"] == pytest.approx(2.0 * detail["v_max"], abs=2e-2)
    assert detail["reversed_direction"] == "A2"


def test_audit_report_records_findings():
    report = AuditReport("star_shape")
    report._add_finding("a1", "sin muestra", "error")
    out = report.to_dict()
    assert not out["passed"]
    assert out["findings"][0]["severity"] == "error"
    assert out["execution_id"]
