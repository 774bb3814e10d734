"""Slice curves, escape coordinates, parameter rays, and the transfer map.

The sheet formulas are checked against exact polynomial identities, the
coordinate inversion against round trips through independently computed
escape data, and landings against the defining equations of their
parameters (multiplier-1 cycles, critical orbit relations).
"""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from cubicrays.angles import Angle
from cubicrays.dynamics import CubicMap, green
from cubicrays.slices import (
    InternalRayTrace,
    ParamRayTrace,
    SlicePoint,
    TYPE_C_CENTER,
    capture_coordinate,
    capture_depth,
    classify_escape_s2,
    internal_param_ray,
    mu,
    param_angle,
    param_from_coords,
    param_green,
    phi,
    psi,
    psi_inverse,
    region_of,
    s1,
    s2_discriminant_root,
    s2_follow_v,
    s2_point,
    s2_points,
    s2_sheet_of,
    trace_parameter_ray,
    w_region,
)


def circ_diff(x: float, y: float) -> float:
    d = (x - y) % 1.0
    return min(d, 1.0 - d)


# ------------------------------------------------------------ curve algebra


def test_period_two_curve_is_the_cofactor_of_the_fixed_point_locus():
    # f_{a,v}(v) - a must equal (v - a)(v^2 + av + 1 - 2a^2) identically;
    # checked exactly at random rationals, which suffices for a polynomial
    # identity of this degree
    rng = np.random.default_rng(7)
    for _ in range(40):
        a = Fraction(int(rng.integers(-60, 60)), int(rng.integers(1, 40)))
        v = Fraction(int(rng.integers(-60, 60)), int(rng.integers(1, 40)))
        lhs = (v - a) ** 2 * (v + 2 * a) + v - a
        rhs = (v - a) * (v * v + a * v + 1 - 2 * a * a)
        assert lhs == rhs


def test_s2_points_carry_a_period_two_critical_orbit():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        a = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        for pt in s2_points(a):
            f = pt.map
            assert abs(f(a) - pt.v) == 0.0  # f(a) = v by construction
            assert abs(f(pt.v) - a) <= 1e-10 * (1.0 + abs(a)) ** 3
            assert abs(pt.v - a) > 1e-8


def test_s2_point_examples():
    plus, minus = s2_points(0.0)
    assert abs(plus.v - 1j) < 1e-15 and abs(minus.v + 1j) < 1e-15
    f = plus.map
    assert abs(f(0.0) - 1j) < 1e-15 and abs(f(1j)) < 1e-15

    golden = math.sqrt(5.0)
    plus, minus = s2_points(1.0)
    assert abs(plus.v - (-1 + golden) / 2) < 1e-14
    assert abs(minus.v - (-1 - golden) / 2) < 1e-14

    branch = s2_points(2.0 / 3.0)
    assert len(branch) == 1
    assert branch[0].flag == "branch_point"
    assert abs(branch[0].v + 1.0 / 3.0) < 1e-12
    other = s2_points(-2.0 / 3.0)
    assert len(other) == 1 and abs(other[0].v - 1.0 / 3.0) < 1e-12


def test_sheet_asymptotics_at_large_a():
    a = 50.0
    plus = s2_point(a, "plus")
    minus = s2_point(a, "minus")
    assert abs(plus.v - (a - 1.0 / (3 * a))) < 1e-4
    assert abs(minus.v - (-2 * a + 1.0 / (3 * a))) < 1e-4


def test_branch_cut_is_the_real_segment():
    # continuous across the real axis outside [-2/3, 2/3]
    for x in (0.7, 1.0, -2.5):
        up = s2_discriminant_root(complex(x, 1e-9))
        dn = s2_discriminant_root(complex(x, -1e-9))
        assert abs(up - dn) < 1e-6
    # jumps across the segment
    for x in (0.0, 0.3, -0.5):
        up = s2_discriminant_root(complex(x, 1e-9))
        dn = s2_discriminant_root(complex(x, -1e-9))
        assert abs(up - dn) > 1.0


def test_sheet_labels_respect_the_sign_involution():
    # (a, v) -> (-a, -v) maps each sheet to itself
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if abs(a) < 0.8:
            continue
        p = s2_point(a, "plus")
        q = s2_point(-a, "plus")
        assert abs(q.v + p.v) <= 1e-14 * (1.0 + abs(a))


def test_sheet_monodromy_around_branch_points():
    def follow_loop(center, radius, steps=800):
        a0 = center + radius
        v = s2_point(a0, "plus").v
        for k in range(1, steps + 1):
            a = center + radius * cmath.exp(2j * math.pi * k / steps)
            v = s2_follow_v(a, v)
        return s2_sheet_of(a0, v)

    assert follow_loop(2.0 / 3.0, 0.25) == "minus"   # one branch point
    assert follow_loop(-2.0 / 3.0, 0.25) == "minus"
    assert follow_loop(0.0, 2.0) == "plus"           # both: trivial monodromy
    assert follow_loop(2.0, 0.5) == "plus"           # neither


# ------------------------------------------------------ escape coordinates


def test_param_green_agrees_with_cocritical_escape_rate():
    # the cocritical point and the free critical point share their image,
    # so the same escape rate must come out of either orbit
    for pt in (s1(2 + 0.7j), s2_point(1.8 - 0.4j, "plus"),
               s2_point(1.2 + 1.1j, "minus")):
        g_direct = green(pt.map, 2.0 * pt.a)
        assert abs(g_direct - param_green(pt)) < 1e-11


def test_phi_leading_coefficient():
    # B(2a) ~ 2^(2/3) a at large a: the first orbit ratio f(2a)/(2a)^3
    # tends to 1/2, not 1, so the naive 2a asymptote is off by 2^(1/3)
    for pt in (s1(200.0), s2_point(200.0, "plus"), s2_point(200.0, "minus")):
        lead = phi(pt) / (2.0 ** (2.0 / 3.0) * pt.a)
        assert abs(lead - 1.0) < 1e-4


def test_phi_rejects_bounded_points():
    with pytest.raises(ValueError):
        phi(s1(0.1))
    with pytest.raises(ValueError):
        phi(s1(2.0), region="E2B")


def test_param_from_coords_named_round_trip():
    pt = param_from_coords("E1", 64.0, 0)
    assert abs(phi(pt) - 64.0) <= 1e-6
    # the true leading behavior a ~ rho / 2^(2/3)
    assert abs(pt.a - 64.0 / 2.0 ** (2.0 / 3.0)) < 0.5
    assert abs(pt.a.imag) < 1e-9


def test_param_from_coords_round_trips_randomly():
    rng = np.random.default_rng(23)
    regions = ["E1", "E2B", "E2D"]
    for i in range(48):
        region = regions[i % 3]
        rho = math.exp(rng.uniform(math.log(1.25), math.log(100.0)))
        t = Fraction(int(rng.integers(0, 64)), 64)
        pt = param_from_coords(region, rho, t)
        assert region_of(pt) == region
        want = rho * cmath.exp(2j * math.pi * float(t))
        assert abs(phi(pt) - want) <= 1e-8 * rho


def test_coordinate_injectivity_witness():
    pts = []
    for rho in (1.5, 2.5):
        for k in range(12):
            pts.append(param_from_coords("E2B", rho, Fraction(k, 12)).a)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert abs(pts[i] - pts[j]) > 1e-6


# ----------------------------------------------------------- parameter rays


def test_trace_keeps_angle_and_decreases_potential():
    for region, t in (("E1", Fraction(1, 8)), ("E2D", Fraction(1, 5))):
        tr = trace_parameter_ray(region, t, rho_floor=1.5)
        assert tr.status == "reached_floor"
        pots = [p for _, p in tr.samples]
        assert all(p1 > p2 for p1, p2 in zip(pots, pots[1:]))
        assert abs(pots[-1] - math.log(1.5)) < 1e-9
        for pt, p in tr.samples:
            w = phi(pt)
            assert abs(math.log(abs(w)) - p) < 1e-7
            assert circ_diff(cmath.phase(w) / (2 * math.pi), float(t)) < 1e-6


def test_preperiodic_ray_lands_and_matches_its_critical_orbit_relation():
    # angle 1/9 falls onto the fixed angle 0 after two triplings, so the
    # landing parameter sends the free critical point onto a repelling
    # fixed point in two steps
    tr = trace_parameter_ray("E1", Fraction(1, 9), rho_floor=1.0)
    assert tr.status == "landed"
    refined = trace_parameter_ray("E1", Fraction(1, 9), rho_floor=1.0,
                                  polish=("misiurewicz", 2, 1))
    a = refined.landing.a
    x = refined.landing_aux
    f = refined.landing.map
    assert abs(tr.landing.a - a) < 1e-6
    assert abs(f(x) - x) < 1e-10 * (1.0 + abs(x))
    assert abs(f.orbit(-a, 2)[-1] - x) < 1e-10
    assert abs(f.deriv(x)) > 1.0


def test_coperiodic_ray_exhausts_budget_then_polishes_parabolic():
    plain = trace_parameter_ray("E1", Fraction(1, 24), rho_floor=1.0)
    assert plain.status == "budget_exhausted"
    tr = trace_parameter_ray("E1", Fraction(1, 24), rho_floor=1.0,
                             polish=("parabolic", 2))
    a = tr.landing.a
    x = tr.landing_aux
    f = tr.landing.map
    z = f(x)
    assert abs(f(z) - x) < 1e-9
    assert abs(f.deriv(x) * f.deriv(z) - 1.0) < 1e-8
    # the polished point is where the plain trace was heading; the approach
    # to a parabolic landing is slow so the gap is still visible
    assert abs(plain.samples[-1][0].a - a) < 5e-3


def test_fixed_angle_ray_lands_at_one_half():
    # on the real axis the escape boundary is where the free critical value
    # 4a^3 + a reaches the repelling fixed point (-a + sqrt(9a^2+4))/2,
    # which happens exactly at a = 1/2 with fixed point 1
    tr = trace_parameter_ray("E1", 0, rho_floor=1.0)
    assert tr.status == "landed"
    assert abs(tr.landing.a - 0.5) < 1e-6
    refined = trace_parameter_ray("E1", 0, rho_floor=1.0,
                                  polish=("misiurewicz", 1, 1))
    assert abs(refined.landing.a - 0.5) < 1e-10
    assert abs(refined.landing_aux - 1.0) < 1e-10


# ------------------------------------------------------------- the transfer


def test_psi_preserves_escape_coordinates():
    pt = param_from_coords("E1", 2.0, 0)
    image = psi(pt)
    assert region_of(image) == "E2B"
    assert image.sheet == "plus"
    assert abs(phi(image) - 2.0) <= 1e-6

    back = psi_inverse(image)
    assert abs(back.a - pt.a) < 1e-6

    rng = np.random.default_rng(5)
    for _ in range(8):
        rho = math.exp(rng.uniform(math.log(1.3), math.log(50.0)))
        t = Fraction(int(rng.integers(0, 48)), 48)
        p = param_from_coords("E1", rho, t)
        q = psi(p)
        assert abs(phi(q) - phi(p)) <= 1e-7 * rho


def test_psi_is_near_identity_far_out():
    pt = s1(40.0)
    image = psi(pt)
    assert abs(image.a - 40.0) < 1e-3


def test_psi_rejects_wrong_region():
    with pytest.raises(ValueError):
        psi(s2_point(3.0, "plus"))
    with pytest.raises(ValueError):
        psi_inverse(s1(3.0))


# --------------------------------------------------------------- classifier


def test_classify_constructed_regions():
    b = param_from_coords("E2B", 2.0, 0)
    assert classify_escape_s2(b) == "E2B"
    d = param_from_coords("E2D", 2.0, 0)
    assert classify_escape_s2(d, grid=768) == "E2D"


def test_classify_deeper_sample():
    b = param_from_coords("E2B", 4.0, Fraction(1, 7))
    assert classify_escape_s2(b, grid=768) == "E2B"


def test_classify_respects_the_sign_involution():
    b = param_from_coords("E2B", 2.0, 0)
    mirrored = SlicePoint("s2", -b.a, -b.v, s2_sheet_of(-b.a, -b.v))
    assert classify_escape_s2(mirrored, grid=512) in ("E2B", "unresolved")


def test_classify_bounded_point():
    assert classify_escape_s2(s2_point(0.0, "plus")) == "not_escape"


def test_classify_rejects_s1_points():
    with pytest.raises(ValueError):
        classify_escape_s2(s1(2.0))


# ---------------------------------------------------------------- W sectors


def test_w_region_examples():
    assert w_region(Fraction(1, 16)).label == "W1"
    assert w_region(0).label == "none"
    assert w_region(Fraction(1, 24)).label == "none"   # boundary ray
    assert w_region(Fraction(21, 48)).label == "W2"
    assert w_region(Fraction(27, 48)).label == "W3"
    assert w_region(Fraction(45, 48)).label == "W4"
    assert w_region(Fraction(11, 24)).label == "none"


def test_w_intervals_are_disjoint_unit_24ths():
    from cubicrays.laminations import _W_INTERVALS

    for lo, hi in _W_INTERVALS:
        assert (hi - lo) == Angle(1, 24)
    angles = [a for pair in _W_INTERVALS for a in pair]
    assert len(set(angles)) == 8


# ------------------------------------------------------------ internal rays


def test_internal_ray_principal_real_axis():
    tr = internal_param_ray("principal", Fraction(1, 2), quadrant="I")
    assert tr.status == "reached_end"
    end = tr.endpoint
    assert abs(end - 0.5) < 1e-3
    r_end, _ = 1.0 - 1e-6, None
    val = mu(end)
    assert abs(abs(val) - r_end) < 1e-9
    assert abs(val - r_end * cmath.exp(1j * math.pi)) < 1e-6

    opposite = internal_param_ray("principal", Fraction(1, 2), quadrant="III")
    assert abs(opposite.endpoint + 0.5) < 1e-3


def test_internal_ray_quadrant_two():
    tr = internal_param_ray("principal", Fraction(1, 6), quadrant="II")
    end = tr.endpoint
    assert end.imag > 0
    want = (1.0 - 1e-6) * cmath.exp(2j * math.pi / 6.0)
    assert abs(mu(end) - want) < 1e-9


def test_internal_ray_quadrant_validation():
    with pytest.raises(ValueError):
        internal_param_ray("principal", Fraction(1, 2), quadrant="II")
    with pytest.raises(ValueError):
        internal_param_ray("principal", Fraction(1, 2))
    with pytest.raises(ValueError):
        internal_param_ray("typeC", 0, quadrant="I")


def test_capture_center_and_rays():
    c = TYPE_C_CENTER
    f = CubicMap(c, c)
    assert abs(f.orbit(-c, 2)[-1] - c) < 1e-12
    assert capture_depth(c) == 2

    for t in (Fraction(0), Fraction(1, 2)):
        tr = internal_param_ray("typeC", t, r_end=0.9)
        want = 0.9 * cmath.exp(2j * math.pi * float(t))
        assert abs(capture_coordinate(tr.endpoint) - want) < 1e-9
    a0 = internal_param_ray("typeC", 0, r_end=0.9).endpoint
    a1 = internal_param_ray("typeC", Fraction(1, 2), r_end=0.9).endpoint
    assert abs(a0 - a1) > 1e-2


# ------------------------------------------------------------- serialization


def test_slice_point_json_round_trip():
    pt = s2_point(1.5 + 0.25j, "minus")
    again = SlicePoint.from_json(pt.to_json())
    assert again == pt

    tr = trace_parameter_ray("E1", Fraction(1, 8), rho_floor=2.0)
    d = tr.to_json()
    assert d["region"] == "E1" and d["angle"] == "1/8"
    assert len(d["samples"]) == len(tr.samples)
