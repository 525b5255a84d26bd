import math

import numpy as np
import pytest

from geometry.base.errors import AmbiguousCrossingError, NotRankTwoError, PreconditionError
from geometry.base.hyperbolic_core import (
    BoundaryPoint,
    Geodesic,
    MobiusTransform,
    apply,
    boundary_interleave,
    geodesic_distance,
)
from geometry.geodesic_lab import (
    IntersectionWitness,
    NoneFound,
    classify_covering,
    commutator_trace,
    crossing_orientation_sequence,
    geodesics_cross,
    nielsen_reduce,
    self_intersection_witness,
    subgroup_ball,
)
from geometry.surface_group import GroupWord, axis_of


# par partido en la autointersección de a1·(b1 a1 B1), dentro del asa 1
PANTS_PAIR = ("a1 b1 a1 B1", "a1 a1 b1 a1 B1")


def test_diameters_cross_at_origin():
    hit = geodesics_cross(Geodesic.from_angles(0.0, math.pi),
                          Geodesic.from_angles(math.pi / 2.0, 3.0 * math.pi / 2.0))
    assert abs(hit.point) < 1e-12
    assert hit.orientation.crosses


def test_nested_geodesics_do_not_cross():
    assert geodesics_cross(Geodesic.from_angles(0.0, 2.0), Geodesic.from_angles(0.5, 1.5)) is None


def test_shared_endpoint_is_ambiguous():
    with pytest.raises(AmbiguousCrossingError):
        geodesics_cross(Geodesic.from_angles(0.0, 2.0), Geodesic.from_angles(2.0, 4.0))


def test_crossing_point_lies_on_both_geodesics():
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 100:
        a1, b1, a2, b2 = rng.uniform(0.0, 2.0 * math.pi, 4)
        try:
            G1, G2 = Geodesic.from_angles(a1, b1), Geodesic.from_angles(a2, b2)
        except PreconditionError:
            continue
        if not boundary_interleave(G1, G2).crosses:
            continue
        pairs = [(a1, b1), (a2, b2), (a1, a2), (a1, b2), (b1, a2), (b1, b2)]
        if min(abs(math.remainder(x - y, 2.0 * math.pi)) for x, y in pairs) < 0.1:
            continue
        hit = geodesics_cross(G1, G2)
        assert geodesic_distance(hit.point, G1) < 1e-8
        assert geodesic_distance(hit.point, G2) < 1e-8
        checked += 1


def test_generator_axes_cross(genus2):
    axis_a, _ = axis_of(genus2, "a1")
    axis_b, _ = axis_of(genus2, "b1")
    hit = geodesics_cross(axis_a, axis_b)
    assert hit is not None
    assert geodesic_distance(hit.point, axis_a) < 1e-8
    assert geodesic_distance(hit.point, axis_b) < 1e-8


def test_side_pairing_curve_is_simple(genus2):
    result = self_intersection_witness(genus2, "a1", 4)
    assert isinstance(result, NoneFound)
    assert result.radius == 4


def test_non_primitive_class_has_a_witness(genus2):
    w = GroupWord.parse("a1 a1 b1 b1")
    hit = self_intersection_witness(genus2, w, 4)
    assert isinstance(hit, IntersectionWitness)
    axis, _ = axis_of(genus2, w)
    image = apply(genus2.evaluate(hit.deck), axis)
    assert boundary_interleave(axis, image).crosses
    assert boundary_interleave(axis, image) == hit.orientation
    assert geodesic_distance(hit.point, axis) < 1e-8
    assert geodesic_distance(hit.point, image) < 1e-8


def test_figure_eight_class_has_a_witness(genus2):
    w = GroupWord.parse("a1 b2")
    hit = self_intersection_witness(genus2, w, 4)
    assert isinstance(hit, IntersectionWitness)
    axis, _ = axis_of(genus2, w)
    image = apply(genus2.evaluate(hit.deck), axis)
    assert boundary_interleave(axis, image) == hit.orientation
    assert len(hit.deck) <= 4


def test_witness_search_is_thread_independent(genus2):
    w = GroupWord.parse("a1 a1 b1 b1")
    serial = self_intersection_witness(genus2, w, 4, threads=1)
    parallel = self_intersection_witness(genus2, w, 4, threads=4)
    assert serial.deck == parallel.deck


def test_nielsen_one_left_multiplication():
    result = nielsen_reduce("a1", "a1 b1")
    assert (str(result.w1), str(result.w2)) == ("a1", "b1")
    assert len(result.moves) == 1
    assert not result.degenerate


def test_nielsen_flags_rank_one_pair():
    assert nielsen_reduce("a1", "A1").degenerate


def test_nielsen_preserves_the_subgroup(genus2):
    original = (GroupWord.parse("a1 b1 a1"), GroupWord.parse("b1 a1"))
    result = nielsen_reduce(*original)
    members = {w for w, _ in subgroup_ball(genus2, (result.w1, result.w2), 4)}
    assert all(w in members for w in original)


def test_pair_of_crossing_simple_curves_is_a_punctured_torus(genus2):
    cls = classify_covering(genus2, "a1", "b1", radius=4)
    assert cls.kind == "PuncturedTorus"
    assert cls.witnesses == [None, None]
    assert [str(w) for w in cls.reduced_pair] == ["a1", "b1"]


def test_covering_decision_is_stable_under_radius(genus2):
    kinds = [classify_covering(genus2, "a1", "b1", radius=r).kind for r in (2, 3, 4)]
    assert kinds == ["PuncturedTorus"] * 3


def test_tiny_radius_is_undetermined(genus2):
    assert classify_covering(genus2, "a1", "b1", radius=1).kind == "Undetermined"


def test_common_power_is_not_rank_two(genus2):
    with pytest.raises(NotRankTwoError):
        classify_covering(genus2, "a1", "a1 a1", radius=2)


def test_split_figure_eight_is_a_three_punctured_sphere(genus2):
    cls = classify_covering(genus2, *PANTS_PAIR, radius=4)
    assert cls.kind == "ThreePuncturedSphere"
    assert [str(w) for w in cls.reduced_pair] == ["a1", "b1 a1 B1"]
    assert cls.commutator_trace > 2.0
    assert not cls.axes_cross
    for word, hit in zip(PANTS_PAIR, cls.witnesses):
        axis, _ = axis_of(genus2, word)
        image = apply(genus2.evaluate(hit.deck), axis)
        assert boundary_interleave(axis, image) == hit.orientation


def test_covering_decisions_never_flip_with_radius(genus2):
    for pair in (("a1", "b1"), PANTS_PAIR):
        kinds = [classify_covering(genus2, *pair, radius=r).kind for r in (1, 2, 3, 4)]
        determined = [k for k in kinds if k != "Undetermined"]
        assert len(set(determined)) == 1
        first = kinds.index(determined[0])
        assert all(k == determined[0] for k in kinds[first:])
    assert determined[0] == "ThreePuncturedSphere"


def test_commutator_trace_separates_the_two_coverings(genus2):
    torus = commutator_trace(genus2.evaluate("a1"), genus2.evaluate("b1"))
    assert torus < -2.0
    moved = commutator_trace(genus2.evaluate("a1"), genus2.evaluate("a1 b1"))
    assert moved == pytest.approx(torus, rel=1e-9)
    pants = commutator_trace(genus2.evaluate("a1"), genus2.evaluate("b1 a1 B1"))
    assert pants > 2.0


def test_long_subgroup_words_do_not_break_the_search(genus2):
    cls = classify_covering(genus2, "a1 A2", "a1 a1 A2 A2 A1", radius=3)
    assert cls.kind == "PuncturedTorus"
    assert cls.commutator_trace < -2.0


def test_disjoint_loops_are_rejected(genus2):
    with pytest.raises(PreconditionError):
        classify_covering(genus2, "a1", "a2", radius=2)


def test_crossing_orientation_sequence():
    G = Geodesic.from_angles(0.0, math.pi)
    p0 = BoundaryPoint(math.pi / 4.0)
    assert crossing_orientation_sequence(G, MobiusTransform.rotation(math.pi / 4.0), p0)
    assert not crossing_orientation_sequence(G, MobiusTransform.rotation(-math.pi / 8.0), p0)
