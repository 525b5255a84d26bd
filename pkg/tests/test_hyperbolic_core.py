import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from geometry.base.errors import NearBoundaryError, PreconditionError
from geometry.base.hyperbolic_core import (
    BoundaryPoint,
    Geodesic,
    Interleave,
    MobiusTransform,
    apply,
    boundary_interleave,
    classify,
    fermi_coordinates,
    from_fermi,
    geodesic_distance,
    geodesic_distance_between,
    hyp_distance,
    point_along,
    project_onto_geodesic,
)


def random_disk_points(count, seed=0, r_max=0.9):
    rng = np.random.default_rng(seed)
    radii = r_max * np.sqrt(rng.uniform(0.0, 1.0, count))
    angles = rng.uniform(0.0, 2.0 * math.pi, count)
    return [complex(r * math.cos(a), r * math.sin(a)) for r, a in zip(radii, angles)]


def random_geodesics(count, seed=1):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a, b = rng.uniform(0.0, 2.0 * math.pi, 2)
        if abs(math.remainder(a - b, 2.0 * math.pi)) > 0.3:
            out.append(Geodesic.from_angles(a, b))
    return out


def test_identity_fixes_points():
    z = 0.3 + 0.1j
    assert apply(MobiusTransform.identity(), z) == pytest.approx(z)


def test_isometries_preserve_distance():
    pts = random_disk_points(40)
    M = MobiusTransform.translation(1.3, 0.4) @ MobiusTransform.rotation(2.1)
    for z, w in zip(pts[::2], pts[1::2]):
        assert hyp_distance(apply(M, z), apply(M, w)) == pytest.approx(hyp_distance(z, w), abs=1e-9)


def test_translation_moves_origin_by_its_length():
    M = MobiusTransform(math.e, 0.0, 0.0, 1.0 / math.e)
    assert hyp_distance(0j, apply(M, 0j)) == pytest.approx(2.0, abs=1e-12)


def test_distance_to_itself_is_zero():
    assert hyp_distance(0.4 - 0.2j, 0.4 - 0.2j) == 0.0


def test_half_plane_points_distance_log4():
    def cayley(zeta):
        return (zeta - 1j) / (zeta + 1j)

    assert hyp_distance(cayley(1j), cayley(4j)) == pytest.approx(math.log(4.0), abs=1e-12)


def test_distance_matches_metric_quadrature():
    pts = random_disk_points(10, seed=3)
    for z, w in zip(pts[::2], pts[1::2]):
        u = apply(MobiusTransform.to_origin(z), w)
        length, _ = quad(lambda r: 2.0 / (1.0 - r * r), 0.0, abs(u), epsabs=1e-13)
        assert hyp_distance(z, w) == pytest.approx(length, abs=1e-6)


def test_apply_refuses_points_near_boundary():
    M = MobiusTransform.translation(24.0)
    with pytest.raises(NearBoundaryError):
        apply(M, 0j)


def test_classify_identity():
    assert classify(MobiusTransform.identity()).kind == "identity"


def test_classify_hyperbolic_length():
    M = MobiusTransform(math.e, 0.0, 0.0, 1.0 / math.e)
    assert M.trace == pytest.approx(2.0 * math.cosh(1.0))
    cls = classify(M)
    assert cls.is_hyperbolic
    assert cls.length == pytest.approx(2.0, abs=1e-12)


def test_classify_axis_is_oriented_towards_attracting_end():
    cls = classify(MobiusTransform.translation(1.0))
    assert cls.axis.b.angle == pytest.approx(0.0, abs=1e-9)
    assert cls.axis.a.angle == pytest.approx(math.pi, abs=1e-9)


def test_classify_rotation_is_elliptic_about_origin():
    cls = classify(MobiusTransform.rotation(math.pi / 3.0))
    assert cls.kind == "elliptic"
    assert abs(cls.center) < 1e-12


def test_projection_of_point_on_geodesic_is_itself():
    G = random_geodesics(1)[0]
    z = point_along(G, 0.7)
    assert abs(project_onto_geodesic(z, G) - z) < 1e-10


def test_projection_of_origin_on_diameter():
    G = Geodesic.from_angles(0.4, 0.4 + math.pi)
    assert abs(project_onto_geodesic(0j, G)) < 1e-12


def test_projection_matches_golden_section_oracle():
    for z, G in zip(random_disk_points(6, seed=5, r_max=0.7), random_geodesics(6, seed=6)):
        foot = project_onto_geodesic(z, G)
        res = minimize_scalar(lambda t: hyp_distance(z, point_along(G, t)), bracket=(-1.0, 1.0),
                              method="golden", options={"xtol": 1e-12})
        assert hyp_distance(foot, point_along(G, res.x)) < 1e-6
        assert geodesic_distance(z, G) <= res.fun + 1e-9


def test_fermi_coordinates_round_trip():
    G = random_geodesics(1, seed=9)[0]
    z = from_fermi(G, 0.35, -0.8)
    s, t = fermi_coordinates(z, G)
    assert s == pytest.approx(0.35, abs=1e-10)
    assert t == pytest.approx(-0.8, abs=1e-10)


def test_point_along_moves_by_arclength():
    G = random_geodesics(1, seed=11)[0]
    assert hyp_distance(point_along(G, -0.4), point_along(G, 1.1)) == pytest.approx(1.5, abs=1e-9)


def test_interleave_crossing_diameters():
    G1 = Geodesic.from_angles(0.0, math.pi)
    G2 = Geodesic.from_angles(math.pi / 2.0, 3.0 * math.pi / 2.0)
    assert boundary_interleave(G1, G2) == Interleave.CROSS_POSITIVE
    assert boundary_interleave(G1, G2.reversed()) == Interleave.CROSS_NEGATIVE


def test_interleave_disjoint_and_shared():
    G1 = Geodesic.from_angles(0.0, math.pi / 2.0)
    assert boundary_interleave(G1, Geodesic.from_angles(math.pi, 3.0 * math.pi / 2.0)) == Interleave.DISJOINT
    assert boundary_interleave(G1, Geodesic.from_angles(math.pi / 2.0, math.pi)) == Interleave.SHARED_ENDPOINT


def test_distance_between_disjoint_geodesics_is_isometry_invariant():
    G1 = Geodesic.from_angles(0.0, 1.0)
    G2 = Geodesic.from_angles(2.0, 4.0)
    M = MobiusTransform.translation(0.8, 1.9)
    d = geodesic_distance_between(G1, G2)
    assert d > 0.0
    assert geodesic_distance_between(apply(M, G1), apply(M, G2)) == pytest.approx(d, abs=1e-9)


def test_geodesic_needs_distinct_endpoints():
    with pytest.raises(PreconditionError):
        Geodesic(BoundaryPoint(1.0), BoundaryPoint(1.0 + 2.0 * math.pi))


def test_boundary_points_are_mapped_on_the_circle():
    p = apply(MobiusTransform.translation(0.9, 0.3), BoundaryPoint(2.0))
    assert abs(abs(p.z) - 1.0) < 1e-12
    assert abs(cmath.exp(1j * p.angle) - p.z) < 1e-12
