"""Boundary landings, the extension map, and the identification probes."""

import json
from fractions import Fraction

import pytest

from cubicrays.angles import Angle, AngleSet, in_open_arc
from cubicrays.boundary import (
    _binary_ternary_codes,
    colanding_search,
    landing_polish,
    principal_check,
    psi_hat,
    quotient_check,
    ray_landing,
    type_c_check,
    type_c_ray_candidates,
    verify_transfer,
)
from cubicrays.slices import TYPE_C_CENTER, param_from_coords

# polished landing parameters, frozen from independent traces
E1_LANDINGS = {
    Fraction(7, 8): 0.294871403 - 0.442323089j,
    Fraction(5, 8): -0.294871403 - 0.442323089j,
    Fraction(35, 36): 0.506602782 - 0.120563906j,
    Fraction(8, 9): 0.372514309 - 0.367461029j,
    Fraction(1, 24): 0.497405889 + 0.258567327j,
    Fraction(1, 12): 0.497405889 + 0.258567327j,
}
E2B_LANDINGS = {
    Fraction(1, 8): 0.374684138j,
    Fraction(3, 8): 0.374684138j,
    Fraction(7, 8): -0.374684138j,
    Fraction(35, 36): 0.675837849 + 0j,
    Fraction(19, 36): -0.675837849 + 0j,
    Fraction(1, 24): 0.489002449 - 0.081180938j,
    Fraction(17, 72): 0.913626249j,
}

CLOSE = dict(abs=3e-9)


def test_landing_polish_selection():
    assert landing_polish("1/24") == ("parabolic", 2)
    assert landing_polish("211/240") == ("parabolic", 4)
    assert landing_polish("7/8") == ("misiurewicz", 1, 2)
    assert landing_polish("17/72") == ("misiurewicz", 2, 2)
    # periodic angles keep a one-step offset onto their own cycle
    assert landing_polish("1/2") == ("misiurewicz", 1, 1)
    assert landing_polish("2/9") == ("misiurewicz", 2, 1)


def test_binary_ternary_codes():
    assert _binary_ternary_codes(Fraction(0)) == (Fraction(0), Fraction(1, 2))
    assert _binary_ternary_codes(Fraction(1, 2)) == (
        Fraction(1, 3), Fraction(1, 6))
    assert _binary_ternary_codes(Fraction(1, 4)) == (
        Fraction(1, 9), Fraction(1, 18))
    # non-dyadic arguments carry one eventually periodic code
    assert _binary_ternary_codes(Fraction(1, 3)) == (Fraction(1, 8),)
    assert _binary_ternary_codes(Fraction(2, 3)) == (Fraction(3, 8),)


def test_type_c_ray_candidates():
    assert set(type_c_ray_candidates("1/2")) == {Angle(7, 27), Angle(13, 54)}
    assert set(type_c_ray_candidates("0")) == {Angle(2, 9), Angle(5, 18)}
    mirrored = type_c_ray_candidates("1/2", center=-TYPE_C_CENTER)
    assert set(mirrored) == {Angle(7, 27) + Angle(1, 2),
                             Angle(13, 54) + Angle(1, 2)}
    assert type_c_ray_candidates("1/2", center=1.0 + 1.0j) == ()


@pytest.mark.parametrize("theta,a", sorted(E1_LANDINGS.items()))
def test_e1_landing_values(theta, a):
    lnd = ray_landing("E1", theta)
    assert lnd.status == "landed"
    assert lnd.a == pytest.approx(a, **CLOSE)


@pytest.mark.parametrize("theta,a", sorted(E2B_LANDINGS.items()))
def test_e2b_landing_values(theta, a):
    lnd = ray_landing("E2B", theta)
    assert lnd.status == "landed"
    assert lnd.a == pytest.approx(a, **CLOSE)


def test_landing_kinds():
    assert ray_landing("E1", "7/8").kind[:2] == ("misiurewicz", 1)
    par = ray_landing("E1", "1/24").kind
    assert par[0] == "parabolic" and par[1] == 2
    assert ray_landing("E2B", "17/72").kind[:2] == ("misiurewicz", 2)


def test_psi_hat_fixed_cocritical_anchors():
    """At angle zero both landings pin the cocritical point to a fixed one."""
    res = psi_hat(0, check_schedules=True)
    assert res.status == "landed"
    assert res.e1.a == pytest.approx(0.5, abs=1e-9)
    assert abs(res.e1.point.v - 0.5) < 1e-9
    assert res.e2b.a == pytest.approx(2 ** -0.5, abs=1e-9)
    assert abs(res.e2b.point.v) < 1e-9
    assert res.schedule_gap < 1e-9


def test_psi_hat_parabolic_corner():
    res = psi_hat("1/24")
    assert res.status == "landed"
    assert res.e1.a == pytest.approx(E1_LANDINGS[Fraction(1, 24)], **CLOSE)
    assert res.e2b.a == pytest.approx(E2B_LANDINGS[Fraction(1, 24)], **CLOSE)
    assert res.e1.kind[0] == res.e2b.kind[0] == "parabolic"
    assert json.dumps(res.to_json())


def test_transfer_coperiodic_pair_confirmed():
    res = verify_transfer("1/24", "1/12")
    assert res.verdict == "confirmed"
    assert res.e1_colands and res.e2b_colands


def test_transfer_asymmetry_on_sheet():
    # the sheet glues the two-cycle rays that stay apart upstairs
    res = verify_transfer("5/8", "7/8")
    assert res.verdict == "confirmed_asymmetry"
    assert res.e2b_colands and not res.e1_colands
    assert res.e1_gap == pytest.approx(2 * 0.294871403, abs=1e-6)
    assert res.witness is not None
    assert json.dumps(res.to_json())


def test_transfer_critically_finite_pair():
    res = verify_transfer("2/9", "5/18")
    assert res.verdict == "confirmed"
    assert res.e1_colands and res.e2b_colands
    e1 = ray_landing("E1", "2/9")
    assert e1.a == pytest.approx(0.852663391j, **CLOSE)
    e2b = ray_landing("E2B", "2/9")
    assert e2b.a == pytest.approx(0.891481772j, **CLOSE)


def test_transfer_unrelated_angles():
    res = verify_transfer("17/72", "145/648")
    assert res.verdict == "confirmed"
    assert not res.e1_colands and not res.e2b_colands


def test_colanding_corner_pairs():
    pairs, table = colanding_search(
        "E1", ["1/24", "1/12", "5/12", "11/24"])
    assert len(pairs) == 2
    groups = {frozenset(str(a) for a in grp) for grp, _ in pairs}
    assert groups == {frozenset({"1/24", "1/12"}),
                      frozenset({"5/12", "11/24"})}
    assert all(l.status == "landed" for l in table.values())


def test_period_three_angles_land_apart():
    """Every denominator-26 ray lands alone, in both regions.

    The period-three cycles all sit at internal arguments with tripling
    access, so no two of their rays share a landing point; the co-landing
    transfer pairs first appear among the capture-root angles instead.
    """
    angles = sorted({Fraction(c, 26) for c in range(1, 26)} - {Fraction(1, 2)})
    assert len(angles) == 24
    for region in ("E1", "E2B"):
        pairs, table = colanding_search(region, angles)
        assert pairs == ()
        assert sum(1 for l in table.values() if l.status == "landed") == 24


def test_quotient_identity_point_level_two():
    f = param_from_coords("E1", 2.0, 0)
    res = quotient_check(f, 2)
    assert res.verdict == "consistent"
    assert AngleSet([Angle(1, 4), Angle(3, 4)]) in res.predicted.classes
    assert res.measured == res.predicted


def test_quotient_four_ray_cluster():
    f = param_from_coords("E1", 2.0, Fraction(1, 16))
    res = quotient_check(f, 2)
    assert res.verdict == "consistent"
    merged = [c for c in res.measured.classes if len(c) == 4]
    assert len(merged) == 1
    assert merged[0] == AngleSet(
        [Angle(1, 8), Angle(1, 4), Angle(3, 8), Angle(3, 4)])


def test_quotient_level_three_unchanged():
    f = param_from_coords("E1", 2.0, 0)
    res = quotient_check(f, 3)
    assert res.verdict == "consistent"
    assert len(res.measured.classes) == 24
    assert res.measured == res.source


def test_type_c_basilica_identification():
    res = type_c_check("1/6")
    assert res.verdict == "identified_with"
    assert res.partner == Angle(5, 6)
    assert res.image == pytest.approx(0.904911777j, **CLOSE)
    assert res.certificate["kind"] == "common_landing"
    assert res.certificate["held"]
    angles = {str(r.angle) for r in res.rays + res.partner_rays}
    assert angles == {"49/216", "59/216"}
    # and symmetrically from the partner's side
    back = type_c_check("5/6")
    assert back.verdict == "identified_with" and back.partner == Angle(1, 6)
    assert back.image == pytest.approx(res.image, **CLOSE)


def test_type_c_root_identification():
    res = type_c_check("1/3")
    assert res.verdict == "identified_with"
    assert res.partner == Angle(2, 3)
    assert res.image == pytest.approx(0.913626249j, **CLOSE)


def test_type_c_deeper_identification():
    res = type_c_check("1/12")
    assert res.verdict == "identified_with"
    assert res.partner == Angle(11, 12)
    assert res.image == pytest.approx(0.898237445j, **CLOSE)


def test_type_c_singleton_tip():
    res = type_c_check("1/2")
    assert res.verdict == "injective_here"
    assert {str(r.angle) for r in res.rays} == {"7/27", "13/54"}
    assert res.image == pytest.approx(0.919942052j, **CLOSE)
    assert res.certificate["kind"] == "singleton" and res.certificate["held"]
    assert len(res.samples_checked) == 4


def test_type_c_singleton_off_axis():
    res = type_c_check("1/4")
    assert res.verdict == "injective_here"
    assert {str(r.angle) for r in res.rays} == {"19/81", "37/162"}
    assert res.image == pytest.approx(0.005875117 + 0.910322685j, **CLOSE)
    assert json.dumps(res.to_json())


def test_principal_pair_same_quadrant():
    res = principal_check("1/6", "I")
    assert res.verdict == "pair_same_quadrant"
    assert res.partner == Angle(5, 6)
    assert res.arc == "IV"
    assert [str(r.angle) for r in res.rays] == ["7/8"]
    assert res.point == pytest.approx(E1_LANDINGS[Fraction(7, 8)], abs=1e-5)
    assert res.image == pytest.approx(-0.374684138j, **CLOSE)
    assert res.separation == pytest.approx(2 * 0.374684138, abs=1e-6)
    cert = res.certificate
    assert cert["kind"] == "alpha_absorption" and cert["held"]
    assert cert["forced_set"] == ["1/8", "3/8", "5/8", "7/8"]


def test_principal_pair_with_crossing_certificate():
    res = principal_check("5/12", "I")
    assert res.verdict == "pair_same_quadrant"
    assert res.arc == "I"
    assert [str(r.angle) for r in res.rays] == ["35/36"]
    assert res.image == pytest.approx(0.675837849 + 0j, **CLOSE)
    cert = res.certificate
    assert cert["kind"] == "crossing" and cert["held"]
    assert set(cert["alpha_pair"]) == {"1/4", "3/4"}
    # the landing angle lies in the quadrant's external window
    assert in_open_arc(Angle(35, 36), Angle(23, 24), Angle(1, 24))


def test_principal_corner_bijection():
    res = principal_check("1/3", "I")
    assert res.verdict == "parabolic_singleton"
    assert res.certificate["kind"] == "parabolic_bijection"
    assert set(res.corners) == {"W1", "W2", "W3", "W4"}
    assert res.corners["W1"]["angles"] == ["1/24", "1/12"]
    w1 = complex(*res.corners["W1"]["point"])
    assert w1 == pytest.approx(0.497405889 + 0.258567327j, **CLOSE)
    img = complex(*res.corners["W1"]["image"])
    assert img == pytest.approx(0.489002449 - 0.081180938j, **CLOSE)
    assert res.separation > 1e-3
    other = principal_check("2/3", "III")
    assert other.verdict == "parabolic_singleton" and other.arc == "W3"


def test_principal_parabolic_pair():
    """A doubling-periodic arg lands a co-landing coperiodic pair."""
    res = principal_check("1/5", "I")
    assert res.verdict == "parabolic_singleton"
    assert {str(r.angle) for r in res.rays} == {"211/240", "53/60"}
    assert res.point == pytest.approx(0.332779425 - 0.415082757j, **CLOSE)
    cert = res.certificate
    assert cert["kind"] == "coperiodic_pair" and cert["held"]
    assert cert["tail_period"] == 4
    assert res.separation > 1e-3
    assert json.dumps(res.to_json())


def test_principal_preperiodic_singleton():
    res = principal_check("1/4", "I")
    assert res.verdict == "singleton"
    assert [str(r.angle) for r in res.rays] == ["8/9"]
    assert res.point == pytest.approx(E1_LANDINGS[Fraction(8, 9)], abs=1e-5)
    assert res.separation > 1e-3
