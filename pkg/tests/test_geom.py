import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyplane.geom import (CAYLEY, CAYLEY_INV, DISK, HALFPLANE, INF, J, STANDARD_TRIANGLE, TAU,
                          BoundaryPoint, DegenerateError, Geodesic, IdealPolygon, InvalidMapError,
                          MobiusMap, OrientationError, angle_to_real, arc_region_diameter,
                          canonical_angle, disk_geodesic_circle, fix_pm1_scaling,
                          gap_chart_coeffs, gap_normalizer, harmonic_measure, harmonic_measures,
                          mobius_from_triples, polygon_contains, polygon_diameter, real_to_angle,
                          reflect_boundary)

angles = st.floats(0, TAU, exclude_max=True, allow_nan=False)
disk_points = st.builds(lambda r, t: r * cmath.exp(1j * t), st.floats(0, 0.95), angles)


def sorted_triple(a, b, c):
    return sorted([a, b, c])


def separated(ts, gap=1e-3):
    s = sorted(ts)
    diffs = np.diff(s + [s[0] + TAU])
    return diffs.min() > gap


# --- boundary coordinates ----------------------------------------------------------

def test_cayley_sends_i_to_origin_and_inf_to_one():
    assert abs(CAYLEY(1j)) < 1e-15
    assert CAYLEY(INF) == pytest.approx(1)
    assert CAYLEY_INV(0) == pytest.approx(1j)


@given(st.floats(-1e6, 1e6))
def test_real_angle_round_trip(x):
    assert angle_to_real(real_to_angle(x)) == pytest.approx(x, rel=1e-9, abs=1e-9)


@given(st.floats(-1e3, 1e3))
def test_real_to_angle_matches_cayley(x):
    w = CAYLEY(complex(x))
    assert cmath.exp(1j * real_to_angle(x)) == pytest.approx(w, abs=1e-12)


def test_angle_zero_is_infinity():
    assert angle_to_real(0.0) == INF
    assert BoundaryPoint.halfplane(INF).angle == 0.0


@given(st.floats(-50, 50))
def test_canonical_angle_idempotent(t):
    a = canonical_angle(t)
    assert 0 <= a < TAU
    assert canonical_angle(a) == a


def test_boundary_point_rejects_interior():
    with pytest.raises(ValueError):
        BoundaryPoint.from_complex(0.5, DISK)


# --- Möbius maps ---------------------------------------------------------------------

@given(disk_points, angles)
def test_disk_automorphism_preserves_circle(z0, theta):
    m = MobiusMap.disk_automorphism(z0, theta)
    w = m(cmath.exp(0.7j))
    assert abs(abs(w) - 1) < 1e-9
    assert abs(m(z0)) < 1e-12


@given(disk_points, angles, disk_points)
def test_compose_and_inverse(z0, theta, z):
    m = MobiusMap.disk_automorphism(z0, theta)
    assert (m.inverse() @ m)(z) == pytest.approx(z, abs=1e-9)
    assert m.determinant == pytest.approx(1)


def test_singular_matrix_rejected():
    with pytest.raises(InvalidMapError):
        MobiusMap(1, 1, 1, 1)


@given(angles, angles, angles, disk_points, angles)
def test_from_triples_hits_targets(a, b, c, z0, theta):
    src = sorted_triple(a, b, c)
    if not separated(src, 1e-2):
        return
    m = MobiusMap.disk_automorphism(z0, theta)
    dst = [canonical_angle(cmath.phase(m(cmath.exp(1j * t)))) for t in src]
    got = mobius_from_triples(src, dst, source=DISK, target=DISK)
    for t, d in zip(src, dst):
        assert cmath.exp(1j * got(BoundaryPoint.disk(t)).angle) == pytest.approx(
            cmath.exp(1j * d), abs=1e-8)
    assert got.close_to(m, 1e-6)


def test_from_triples_rejects_degenerate_and_reversed():
    with pytest.raises(DegenerateError):
        mobius_from_triples([0.0, 0.0, 1.0], list(STANDARD_TRIANGLE))
    with pytest.raises(OrientationError):
        mobius_from_triples([0.0, 2.0, 1.0], list(STANDARD_TRIANGLE))


def test_halfplane_triple_with_infinity():
    m = mobius_from_triples([0.0, 1.0, INF], list(STANDARD_TRIANGLE), source=HALFPLANE, target=DISK)
    assert m(0.0) == pytest.approx(1)
    assert m(1.0) == pytest.approx(J)
    assert m(INF) == pytest.approx(J * J)


# --- geodesics and polygons ------------------------------------------------------------

def test_geodesic_circle_oracle():
    kind, c, r = disk_geodesic_circle(1 + 0j, J)
    assert kind == "circle"
    assert c == pytest.approx(1 + 1j * math.sqrt(3))
    assert r == pytest.approx(math.sqrt(3))
    # orthogonal to the unit circle
    assert abs(c) ** 2 == pytest.approx(1 + r * r)


def test_antipodal_geodesic_is_line():
    assert disk_geodesic_circle(1 + 0j, -1 + 0j)[0] == "line"


def test_polygon_rejects_clockwise():
    with pytest.raises(OrientationError):
        IdealPolygon.from_angles([0.0, 4.0, 2.0])


def test_standard_triangle_contains_origin():
    t = IdealPolygon.from_angles(STANDARD_TRIANGLE)
    assert polygon_contains(t, 0)
    assert polygon_contains(t, 0.99)  # inside the cusp at apex 1
    assert not polygon_contains(t, -0.5)
    assert t.diameter() == pytest.approx(math.sqrt(3))


@given(disk_points, angles)
def test_containment_is_mobius_equivariant(z0, theta):
    t = IdealPolygon.from_angles(STANDARD_TRIANGLE)
    m = MobiusMap.disk_automorphism(z0, theta)
    z = 0.3 + 0.1j
    assert polygon_contains(t, z) == polygon_contains(t.map(m), m(z))


def test_polygon_model_round_trip():
    t = IdealPolygon.from_reals([0.0, 1.0, INF])
    back = t.to(DISK).to(HALFPLANE)
    assert [p.value for p in back.apexes] == pytest.approx([0.0, 1.0, INF])


@given(angles, angles, angles)
def test_polygon_diameter_is_max_chord(a, b, c):
    tri = np.array(sorted([a, b, c]))
    pts = np.exp(1j * tri)
    best = max(abs(pts[i] - pts[j]) for i in range(3) for j in range(3))
    assert polygon_diameter(tri) == pytest.approx(best, abs=1e-12)


@given(angles, st.floats(1e-3, TAU - 1e-3))
def test_arc_region_diameter_bounds(s, sweep):
    d = arc_region_diameter(s, s + sweep)
    assert 0 < d <= 2
    if sweep >= math.pi:
        assert d == 2


# --- harmonic measure --------------------------------------------------------------

def test_harmonic_measures_at_origin_are_arc_fractions():
    hm = harmonic_measures(0j, np.array([STANDARD_TRIANGLE]))
    assert hm == pytest.approx(np.full((1, 3), 1 / 3))


@given(disk_points, angles, angles, angles)
def test_harmonic_measures_sum_to_one(z, a, b, c):
    if not separated([a, b, c]):
        return
    hm = harmonic_measures(z, np.array([sorted([a, b, c])]))
    assert hm.sum() == pytest.approx(1)


@given(disk_points, angles, disk_points)
def test_harmonic_measure_is_conformally_invariant(z0, theta, z):
    m = MobiusMap.disk_automorphism(z0, theta)
    arc = (0.4, 2.5)
    img = [canonical_angle(cmath.phase(m(cmath.exp(1j * t)))) for t in arc]
    assert harmonic_measure(z, *arc) == pytest.approx(harmonic_measure(m(z), *img), abs=1e-9)


def test_harmonic_measure_halfplane_oracle():
    # from i, the interval (0, inf) of the real line has measure 1/2
    assert harmonic_measure(1j, BoundaryPoint.halfplane(0.0), BoundaryPoint.halfplane(INF),
                            HALFPLANE) == pytest.approx(0.5)


# --- gap normalization ------------------------------------------------------------

@given(angles, st.floats(0.05, TAU - 0.05))
def test_gap_chart_sends_feet_to_pm1(s, sweep):
    e = canonical_angle(s + sweep)
    for pin in ("derivative", "midpoint"):
        a, b, c, d = gap_chart_coeffs(s, e, pin)
        f = lambda t: (a * cmath.exp(1j * t) + b) / (c * cmath.exp(1j * t) + d)
        assert f(s) == pytest.approx(1, abs=1e-8)
        assert f(e) == pytest.approx(-1, abs=1e-8)
        # the gap side of the boundary lands outside [-1, 1]
        assert abs(f(s + sweep / 3).real) > 1


@given(angles, st.floats(0.05, TAU - 0.05))
def test_gap_chart_matches_generic_normalizer(s, sweep):
    e = canonical_angle(s + sweep)
    a, b, c, d = gap_chart_coeffs(s, e, "midpoint")
    m = gap_normalizer(Geodesic.from_angles(s, e), "midpoint")
    z = 0.2 + 0.1j
    assert (a * z + b) / (c * z + d) == pytest.approx(m(z), rel=1e-7, abs=1e-7)


@given(angles, st.floats(0.05, 3.0))
def test_derivative_pin_has_unit_modulus(s, sweep):
    e = canonical_angle(s + sweep)
    a, b, c, d = gap_chart_coeffs(s, e)
    z = cmath.exp(1j * s)
    det = a * d - b * c
    assert abs(det / (c * z + d) ** 2) == pytest.approx(1, rel=1e-7)


def test_fix_pm1_scaling():
    m = fix_pm1_scaling(0.25)
    assert m(1.0) == pytest.approx(1)
    assert m(-1.0) == pytest.approx(-1)
    assert abs(m.derivative(1.0)) == pytest.approx(0.25)


# --- reflection ----------------------------------------------------------------------

def test_farey_reflections():
    assert reflect_boundary(INF, 0.0, 1.0) == pytest.approx(0.5)
    assert reflect_boundary(0.0, 1.0, INF) == pytest.approx(2.0)
    assert reflect_boundary(1.0, INF, 0.0) == pytest.approx(-1.0)


@given(angles, angles, angles)
def test_reflection_is_an_involution_on_the_circle(a, b, c):
    if not separated([a, b, c], 1e-2):
        return
    pa, pb, pc = (cmath.exp(1j * t) for t in (a, b, c))
    r = reflect_boundary(pc, pa, pb)
    assert abs(abs(r) - 1) < 1e-8
    assert reflect_boundary(r, pa, pb) == pytest.approx(pc, abs=1e-7)
