"""Boundary landings of the escape regions and the identification checks.

The escape-region isomorphism extends over rational parameter-ray angles;
this module traces those landings (with a Newton refinement chosen from
the angle's tripling arithmetic), discovers the full ray set of a boundary
point, and runs the falsifiable probes behind the injectivity dichotomy
on the type A and type C component boundaries: identified basilica pairs,
singleton fibers, parabolic corners, and the transfer of co-landing
relations between the two regions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .angles import (
    Angle,
    AngleSet,
    coperiod_status,
    in_open_arc,
    is_basilica_angle,
    periodic_angles,
    preperiod_pair,
)
from .dynamics import orbit_portrait
from .laminations import (
    AnglePartition,
    alpha_pairs_for_angle,
    basilica_partner,
    predicted_psi_portrait,
)
from .slices import (
    TYPE_C_CENTER,
    SlicePoint,
    internal_param_ray,
    param_angle,
    param_green,
    psi,
    s1,
    trace_parameter_ray,
)

TWO_CYCLES = (
    (Angle(1, 8), Angle(3, 8)),
    (Angle(1, 4), Angle(3, 4)),
    (Angle(5, 8), Angle(7, 8)),
)

# principal-component corner directions; the four boundary arcs meet at
# internal argument 1/3 or 2/3 and split the a-plane into angular sectors
_CORNER_ARG = math.atan2(0.258567326795, 0.497405888628)


def _cdist(x: float, y: float) -> float:
    d = (x - y) % 1.0
    return min(d, 1.0 - d)


# ---------------------------------------------------------------- landings

def landing_polish(t) -> Tuple:
    """Refinement equation for the landing parameter of ray angle t.

    Preperiod one under tripling means the angle is coperiodic and the
    ray lands on a parabolic parameter; otherwise the cocritical orbit
    falls onto a repelling cycle and the landing is critically finite.
    """
    t = Angle(t)
    m, q = preperiod_pair(t)
    if m == 1:
        if coperiod_status(t, q) == "none":
            raise ValueError(f"preperiod-one angle {t} is not coperiodic")
        return ("parabolic", q)
    # the cocritical point and the free critical value share all forward
    # images, so "cocritical orbit periodic after m" reads m >= 1 here
    return ("misiurewicz", max(1, m), q)


@dataclass(frozen=True)
class RayLanding:
    """A parameter ray's landing in one escape region."""

    region: str
    angle: Angle
    point: SlicePoint
    status: str
    kind: Optional[tuple] = None
    refinement_gap: Optional[float] = None

    @property
    def a(self) -> complex:
        return complex(self.point.a)

    def to_json(self) -> dict:
        d = {
            "region": self.region,
            "angle": str(self.angle),
            "a": [self.point.a.real, self.point.a.imag],
            "v": [self.point.v.real, self.point.v.imag],
            "status": self.status,
        }
        if self.kind is not None:
            d["kind"] = [self.kind[0]] + [
                x if isinstance(x, (int, float)) else [x.real, x.imag]
                for x in self.kind[1:]
            ]
        if self.refinement_gap is not None:
            d["refinement_gap"] = self.refinement_gap
        return d


def ray_landing(region: str, t, substeps: int = 4,
                rho_seed: float = 1e6) -> RayLanding:
    """Landing of the parameter ray at angle t, refined and verified.

    The refinement is distrusted (and the raw trace endpoint kept, with
    status "unresolved") when Newton jumps away from the traced endpoint,
    which would mean it converged to a different solution of the landing
    equation.
    """
    t = Angle(t)
    if substeps == 4 and rho_seed == 1e6:
        return _landing_cached(region, t)
    return _landing_uncached(region, t, substeps, rho_seed)


@lru_cache(maxsize=None)
def _landing_cached(region: str, t: Angle) -> RayLanding:
    return _landing_uncached(region, t, 4, 1e6)


def _landing_uncached(region: str, t: Angle, substeps: int,
                      rho_seed: float) -> RayLanding:
    try:
        pol = landing_polish(t)
    except ValueError:
        pol = None
    try:
        tr = trace_parameter_ray(region, t, rho_floor=1.0, substeps=substeps,
                                 rho_seed=rho_seed, polish=pol)
    except (RuntimeError, ValueError, ZeroDivisionError):
        if pol is None:
            raise
        tr = trace_parameter_ray(region, t, rho_floor=1.0, substeps=substeps,
                                 rho_seed=rho_seed)
    raw = tr.samples[-1][0]
    if tr.landing is None:
        return RayLanding(region, t, raw, "unresolved")
    gap = abs(tr.landing.a - raw.a)
    # parabolic approaches crawl, so their refinement may jump farther
    cap = 0.2 if (pol is not None and pol[0] == "parabolic") else 0.02
    if gap > cap * (1.0 + abs(raw.a)):
        return RayLanding(region, t, raw, "unresolved",
                          refinement_gap=gap)
    return RayLanding(region, t, tr.landing, "landed", tr.landing_kind, gap)


# ----------------------------------------------------------------- psi_hat

@dataclass(frozen=True)
class PsiHatResult:
    t: Angle
    e1: RayLanding
    e2b: RayLanding
    schedule_gap: Optional[float] = None

    @property
    def status(self) -> str:
        if self.e1.status == "landed" and self.e2b.status == "landed":
            return "landed"
        return "unresolved"

    def to_json(self) -> dict:
        d = {
            "t": str(self.t),
            "status": self.status,
            "e1": self.e1.to_json(),
            "e2b": self.e2b.to_json(),
        }
        if self.schedule_gap is not None:
            d["schedule_gap"] = self.schedule_gap
        return d


def psi_hat(t, check_schedules: bool = False) -> PsiHatResult:
    """Boundary extension at angle t: landing parameters in both regions.

    check_schedules re-traces both rays along a different descent
    schedule and records the worst disagreement, guarding against a
    limit that depends on the approach path.
    """
    t = Angle(t)
    e1 = ray_landing("E1", t)
    e2b = ray_landing("E2B", t)
    gap = None
    if check_schedules:
        alt1 = ray_landing("E1", t, substeps=7, rho_seed=1e5)
        alt2 = ray_landing("E2B", t, substeps=7, rho_seed=1e5)
        gap = max(abs(alt1.a - e1.a), abs(alt2.a - e2b.a))
    return PsiHatResult(t, e1, e2b, gap)


# ---------------------------------------------------------- ray discovery

def _binary_ternary_codes(t: Fraction) -> Tuple[Fraction, ...]:
    """Binary digit codes of t read back in base three.

    Dyadic rationals other than zero carry two codes (trailing zeros and
    trailing ones); zero carries the codes 0 and .111... as the two ends
    of the circle.  All other rationals have a single eventually periodic
    code.
    """
    t = Fraction(t) % 1
    if t == 0:
        return (Fraction(0), Fraction(1, 2))
    m, p = preperiod_pair(t, d=2)
    digits = []
    u = t
    for _ in range(m + p):
        u = u * 2
        digits.append(int(u))  # floor; u < 2
        u = u % 1
    pre, cyc = digits[:m], digits[m:]
    val = Fraction(0)
    for i, d in enumerate(pre, start=1):
        val += Fraction(d, 3 ** i)
    cyc_num = 0
    for d in cyc:
        cyc_num = cyc_num * 3 + d
    val += Fraction(cyc_num, (3 ** p - 1) * 3 ** m)
    if cyc == [0]:
        # dyadic: the twin code trades the last 1 for a tail of ones
        return (val, val - Fraction(1, 2 * 3 ** m))
    return (val,)


def type_c_ray_candidates(t, center: complex = TYPE_C_CENTER) -> Tuple[Angle, ...]:
    """Exact-angle candidates for the parameter rays at a type C boundary
    point of internal argument t, for the two on-axis components."""
    shift = Fraction(0)
    if abs(center + TYPE_C_CENTER) < 1e-9:
        shift = Fraction(1, 2)
    elif abs(center - TYPE_C_CENTER) > 1e-9:
        return ()
    frac = Angle(t).frac
    return tuple(
        Angle((code + 2) / 9 + shift) for code in _binary_ternary_codes(frac)
    )


def _angle_menu(max_m: int = 6, max_denominator: int = 728) -> Tuple[Fraction, ...]:
    # reduced fractions whose tripling orbit is eventually periodic of
    # small period: denominators 2^e (3^p - 1) 3^m
    out = set()
    for p in (1, 2, 3, 4):
        base = 3 ** p - 1
        for e in range(4):
            for m in range(max_m + 1):
                den = (2 ** e) * base * 3 ** m
                if den > 8 * 3 ** max_m:
                    continue
                for c in range(den):
                    fr = Fraction(c, den)
                    if fr.denominator <= max_denominator:
                        out.add(fr)
    return tuple(sorted(out))


@lru_cache(maxsize=8)
def _menu_cached(max_m: int, max_denominator: int) -> Tuple[Fraction, ...]:
    return _angle_menu(max_m, max_denominator)


def _outward_angle_estimate(a0: complex, direction: complex) -> Optional[float]:
    """Extrapolated parameter angle of the access sector behind a0.

    Walks outward from a boundary point along the given direction, reads
    the cocritical angle at the escaping samples, and extrapolates the
    two innermost readings back to the boundary.
    """
    d = direction / abs(direction)
    readings = []
    s = 2e-3
    while s < 0.1 and len(readings) < 4:
        pt = s1(a0 + s * d)
        if param_green(pt) > 0:
            readings.append((s, param_angle(pt)))
        s *= 2.0
    if len(readings) < 2:
        return None
    (s1_, th1), (s2_, th2) = readings[0], readings[1]
    dth = (th2 - th1 + 0.5) % 1.0 - 0.5
    return (th1 - s1_ * dth / (s2_ - s1_)) % 1.0


def discover_rays(
    target: complex,
    directions: Sequence[complex],
    candidates: Sequence = (),
    region: str = "E1",
    tol: float = 1e-4,
    width: float = 0.02,
    max_denominator: int = 728,
    max_traces: int = 12,
) -> Tuple[RayLanding, ...]:
    """All verified parameter rays landing at the target within tol.

    Exact candidates are traced first.  Walk estimates along the given
    directions mark the access sectors; any estimate not yet explained
    by a verified angle tries its nearest menu fractions in turn.  The
    ray count is discovered, never assumed.
    """
    tried = set()
    found: Dict[Angle, RayLanding] = {}

    def attempt(angle: Angle) -> bool:
        if angle in found:
            return True
        if angle in tried or len(tried) >= max_traces:
            return False
        tried.add(angle)
        lnd = ray_landing(region, angle)
        if lnd.status == "landed" and abs(lnd.a - target) < tol:
            found[angle] = lnd
            return True
        return False

    for c in candidates:
        attempt(Angle(c))

    estimates: List[float] = []
    for d in directions:
        for eps in (0.0, 0.35, -0.35):
            est = _outward_angle_estimate(target, d * cmath.exp(1j * eps))
            if est is not None and all(_cdist(est, e) > 2e-3 for e in estimates):
                estimates.append(est)
    menu = _menu_cached(6, max_denominator)
    for est in estimates:
        if any(_cdist(float(a.frac), est) < 2e-3 for a in found):
            continue
        near = sorted(menu, key=lambda fr: _cdist(float(fr), est))[:3]
        for fr in near:
            if _cdist(float(fr), est) > width:
                break
            if attempt(Angle(fr)):
                break
    return tuple(found[k] for k in sorted(found, key=lambda x: x.frac))


# ---------------------------------------------------------- transfer check

@dataclass(frozen=True)
class TransferResult:
    theta: Angle
    theta_prime: Angle
    verdict: str  # confirmed | confirmed_asymmetry | refuted | unresolved
    e1_colands: Optional[bool] = None
    e2b_colands: Optional[bool] = None
    e1_gap: Optional[float] = None
    e2b_gap: Optional[float] = None
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        d = {
            "theta": str(self.theta),
            "theta_prime": str(self.theta_prime),
            "verdict": self.verdict,
            "e1_colands": self.e1_colands,
            "e2b_colands": self.e2b_colands,
            "e1_gap": self.e1_gap,
            "e2b_gap": self.e2b_gap,
        }
        if self.witness is not None:
            d["witness"] = self.witness
        return d


def _both_coperiodic(s: Angle, t: Angle) -> bool:
    for u in (s, t):
        m, q = preperiod_pair(u)
        if m != 1 or coperiod_status(u, q) == "none":
            return False
    return True


def verify_transfer(theta, theta_prime, tol: float = 1e-8) -> TransferResult:
    """Check the transfer of the co-landing relation between the regions.

    Co-landing in the first region must imply co-landing on the
    quadratic-like sheet; for a coperiodic pair the implication is an
    equivalence.  A co-landing found only on the second side for a
    non-coperiodic pair is the expected one-way behaviour and is
    recorded as confirmed asymmetry, witness attached.
    """
    s, t = Angle(theta), Angle(theta_prime)
    l1, l1p = ray_landing("E1", s), ray_landing("E1", t)
    l2, l2p = ray_landing("E2B", s), ray_landing("E2B", t)
    if any(l.status != "landed" for l in (l1, l1p, l2, l2p)):
        return TransferResult(s, t, "unresolved")
    g1 = abs(l1.a - l1p.a)
    g2 = abs(l2.a - l2p.a)
    c1 = g1 < tol * (1.0 + abs(l1.a))
    c2 = g2 < tol * (1.0 + abs(l2.a))
    witness = {
        "e1": [l1.to_json(), l1p.to_json()],
        "e2b": [l2.to_json(), l2p.to_json()],
    }
    if c1 and not c2:
        return TransferResult(s, t, "refuted", c1, c2, g1, g2, witness)
    if c2 and not c1:
        if _both_coperiodic(s, t):
            return TransferResult(s, t, "refuted", c1, c2, g1, g2, witness)
        return TransferResult(s, t, "confirmed_asymmetry", c1, c2, g1, g2,
                              witness)
    return TransferResult(s, t, "confirmed", c1, c2, g1, g2)


def colanding_search(region: str, angles, tol: float = 1e-8):
    """Group angles whose parameter rays land at one point of the region.

    Returns the non-singleton groups as (AngleSet, SlicePoint) pairs plus
    the full landing table; unresolved rays are excluded and reported in
    the table with their status.
    """
    table = {Angle(t): ray_landing(region, t) for t in angles}
    groups: List[Tuple[List[Angle], RayLanding]] = []
    for t in sorted(table, key=lambda x: x.frac):
        lnd = table[t]
        if lnd.status != "landed":
            continue
        for grp, rep in groups:
            if abs(lnd.a - rep.a) < tol * (1.0 + abs(rep.a)):
                grp.append(t)
                break
        else:
            groups.append(([t], lnd))
    pairs = tuple(
        (AngleSet(grp), rep.point) for grp, rep in groups if len(grp) > 1
    )
    return pairs, table


# ---------------------------------------------------------- quotient check

@dataclass(frozen=True)
class QuotientResult:
    verdict: str  # consistent | inconsistent
    q: int
    t_param: Angle
    measured: AnglePartition
    predicted: AnglePartition
    source: AnglePartition
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        d = {
            "verdict": self.verdict,
            "q": self.q,
            "t_param": str(self.t_param),
            "source_classes": [[str(a) for a in c] for c in self.source.classes],
            "predicted_classes": [[str(a) for a in c]
                                  for c in self.predicted.classes],
            "measured_classes": [[str(a) for a in c]
                                 for c in self.measured.classes],
        }
        if self.witness is not None:
            d["witness"] = self.witness
        return d


def quotient_check(f: SlicePoint, q: int, depth: int = 44,
                   tol: float = 1e-6) -> QuotientResult:
    """Compare the transferred orbit portrait against the lamination
    prediction at level q.

    The portrait of the transferred parameter must equal the source
    portrait with the distinguished-fixed-point classes merged (q = 2)
    or be unchanged (other q).  depth bounds the ray-trace refinement.
    """
    ground = periodic_angles(q)
    t_param = Angle(Fraction(param_angle(f)).limit_denominator(10 ** 6))
    source = orbit_portrait(f.map, ground, tol=tol, sweeps=depth)
    g = psi(f)
    measured = orbit_portrait(g.map, ground, tol=tol, sweeps=depth)
    predicted = predicted_psi_portrait(source, q, t_param)
    if measured == predicted:
        return QuotientResult("consistent", q, t_param, measured, predicted,
                              source)
    witness = {
        "f": [f.a.real, f.a.imag],
        "psi_f": [g.a.real, g.a.imag],
        "predicted": [[str(a) for a in c] for c in predicted.classes],
        "measured": [[str(a) for a in c] for c in measured.classes],
    }
    return QuotientResult("inconsistent", q, t_param, measured, predicted,
                          source, witness)


# ------------------------------------------------------------ type C check

@dataclass(frozen=True)
class TypeCResult:
    verdict: str  # identified_with | injective_here
    t: Angle
    partner: Optional[Angle]
    point: complex
    partner_point: Optional[complex]
    rays: Tuple[RayLanding, ...]
    partner_rays: Tuple[RayLanding, ...]
    image: complex
    image_gap: float
    certificate: dict
    samples_checked: Tuple[Angle, ...] = ()

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "t": str(self.t),
            "partner": None if self.partner is None else str(self.partner),
            "point": [self.point.real, self.point.imag],
            "partner_point": None if self.partner_point is None else
                [self.partner_point.real, self.partner_point.imag],
            "rays": [r.to_json() for r in self.rays],
            "partner_rays": [r.to_json() for r in self.partner_rays],
            "image": [self.image.real, self.image.imag],
            "image_gap": self.image_gap,
            "certificate": self.certificate,
            "samples_checked": [str(s) for s in self.samples_checked],
        }


def _internal_endpoint(component: str, t, quadrant=None, center=None):
    tr = internal_param_ray(component, t, quadrant=quadrant, center=center,
                            r_end=1 - 1e-5)
    if tr.status != "reached_end":
        raise RuntimeError(
            f"internal ray {t} stalled at {tr.endpoint:.6f}")
    a, b = tr.samples[-2][0], tr.samples[-1][0]
    return tr.endpoint, (b - a) if abs(b - a) > 0 else 1.0


def _e2b_images(rays: Sequence[RayLanding]) -> Tuple[Tuple[RayLanding, ...], float]:
    """E2B landings of the given E1 ray angles and their worst spread."""
    images = tuple(ray_landing("E2B", r.angle) for r in rays)
    pts = [im.a for im in images if im.status == "landed"]
    if len(pts) < len(images) or not pts:
        return images, math.inf
    spread = max(abs(p - q) for p in pts for q in pts)
    return images, spread


def type_c_check(t, center: complex = TYPE_C_CENTER,
                 tol: float = 1e-6,
                 samples: Sequence = (Angle(1, 8), Angle(3, 8),
                                      Angle(5, 8), Angle(7, 8))) -> TypeCResult:
    """Identification test at a type C boundary point of internal arg t.

    Basilica arguments must be glued to their partner (equal image within
    tol and a single common landing point of all discovered rays, the
    double witness); other arguments must have a singleton fiber among
    the sampled boundary points.
    """
    t = Angle(t)
    f_pt, f_dir = _internal_endpoint("typeC", t, center=center)
    rays = discover_rays(f_pt, [f_dir],
                         candidates=type_c_ray_candidates(t, center), tol=10 * tol)
    if not rays:
        raise RuntimeError(f"no parameter ray verified at internal arg {t}")
    images, spread = _e2b_images(rays)
    image = images[0].a

    if is_basilica_angle(t):
        tt = basilica_partner(t)
        p_pt, p_dir = _internal_endpoint("typeC", tt, center=center)
        p_rays = discover_rays(p_pt, [p_dir],
                               candidates=type_c_ray_candidates(tt, center),
                               tol=10 * tol)
        if not p_rays:
            raise RuntimeError(f"no parameter ray verified at internal arg {tt}")
        p_images, p_spread = _e2b_images(p_rays)
        gap = abs(image - p_images[0].a)
        joint = max(spread, p_spread, gap)
        certificate = {
            "kind": "common_landing",
            "angles": [str(r.angle) for r in rays + p_rays],
            "joint_spread": joint,
            "held": bool(joint < tol * (1.0 + abs(image))),
        }
        if not certificate["held"]:
            raise RuntimeError(
                f"basilica identification failed at {t}: spread {joint:.3e}")
        return TypeCResult("identified_with", t, tt, f_pt, p_pt, rays,
                           p_rays, image, gap, certificate)

    # singleton: the point's own rays must agree, and no sampled internal
    # argument may share the image
    checked = []
    for s in samples:
        s = Angle(s)
        if s == t:
            continue
        cands = type_c_ray_candidates(s, center)
        try:
            s_pt, s_dir = _internal_endpoint("typeC", s, center=center)
        except RuntimeError:
            continue
        s_rays = discover_rays(s_pt, [s_dir], candidates=cands, tol=10 * tol)
        if not s_rays:
            continue
        s_img = ray_landing("E2B", s_rays[0].angle)
        if s_img.status == "landed" and abs(s_img.a - image) < 10 * tol:
            raise RuntimeError(
                f"unexpected second preimage at internal arg {s} of {t}")
        checked.append(s)
    certificate = {
        "kind": "singleton",
        "angles": [str(r.angle) for r in rays],
        "own_spread": spread,
        "held": bool(spread < tol * (1.0 + abs(image))),
    }
    if not certificate["held"]:
        raise RuntimeError(f"rays of {t} do not share one image")
    return TypeCResult("injective_here", t, None, f_pt, None, rays, (),
                       image, spread, certificate, tuple(checked))


# ---------------------------------------------------------- principal check

@dataclass(frozen=True)
class PrincipalResult:
    verdict: str  # pair_same_quadrant | singleton | parabolic_singleton
    t: Angle
    quadrant: str
    arc: str
    point: complex
    rays: Tuple[RayLanding, ...]
    partner: Optional[Angle] = None
    partner_point: Optional[complex] = None
    partner_rays: Tuple[RayLanding, ...] = ()
    opposite_point: Optional[complex] = None
    opposite_rays: Tuple[RayLanding, ...] = ()
    image: Optional[complex] = None
    image_gap: Optional[float] = None
    separation: Optional[float] = None
    certificate: Optional[dict] = None
    corners: Optional[dict] = None

    def to_json(self) -> dict:
        cx = lambda z: None if z is None else [z.real, z.imag]
        return {
            "verdict": self.verdict,
            "t": str(self.t),
            "quadrant": self.quadrant,
            "arc": self.arc,
            "point": cx(self.point),
            "rays": [r.to_json() for r in self.rays],
            "partner": None if self.partner is None else str(self.partner),
            "partner_point": cx(self.partner_point),
            "partner_rays": [r.to_json() for r in self.partner_rays],
            "opposite_point": cx(self.opposite_point),
            "opposite_rays": [r.to_json() for r in self.opposite_rays],
            "image": cx(self.image),
            "image_gap": self.image_gap,
            "separation": self.separation,
            "certificate": self.certificate,
            "corners": self.corners,
        }


def arc_of(a: complex) -> str:
    """Boundary arc of the principal component containing the point,
    named by quadrant; the four corners cut the plane at fixed angles."""
    th = cmath.phase(a)
    c = _CORNER_ARG
    if -c <= th <= c:
        return "I"
    if c < th < math.pi - c:
        return "II"
    if -math.pi + c < th < -c:
        return "IV"
    return "III"


_CORNER_PAIRS = {
    "W1": (Angle(1, 24), Angle(1, 12)),
    "W2": (Angle(5, 12), Angle(11, 24)),
    "W3": (Angle(13, 24), Angle(7, 12)),
    "W4": (Angle(11, 12), Angle(23, 24)),
}


def _coperiodic_near(p: int, estimates: Sequence[float],
                     width: float = 0.01) -> Tuple[Angle, ...]:
    """Coperiodic angles of tail period p near any of the estimates.

    These are the non-periodic tripling preimages of the period-p cycles,
    the angles whose parameter rays land at parabolic boundary points.
    """
    if p > 8:
        raise RuntimeError(f"tail period {p} too large to enumerate")
    den = 3 ** p - 1
    out = []
    for c in range(1, den):
        if preperiod_pair(Fraction(c, den)) != (0, p):
            continue
        for k in range(3):
            th = Angle(Fraction(c + k * den, 3 * den))
            if preperiod_pair(th.frac) != (1, p):
                continue
            d = min(_cdist(float(th.frac), e) for e in estimates)
            if d <= width:
                out.append((d, th))
    return tuple(th for _, th in sorted(set(out), key=lambda x: (x[0], x[1].frac)))


def _crossing_certificate(chord: Tuple[Angle, Angle]) -> dict:
    """Ray-crossing obstruction against identifying opposite-arc points.

    A common landing point for the chord's two cocritical rays would
    force them to cross the rays of a repelling two-cycle: either the
    chord strictly interleaves that cycle's pair, or (when the chord
    shares an angle with the pair) the co-landing set absorbs whole
    cycles until its tripling image fixes a point no periodic ray has.
    """
    s, u = chord
    for pair in alpha_pairs_for_angle(s) + alpha_pairs_for_angle(u):
        inside = sum(1 for x in pair if in_open_arc(x, s, u))
        shares = s in pair or u in pair
        if inside == 1 and not shares:
            return {
                "kind": "crossing",
                "chord": [str(s), str(u)],
                "alpha_pair": [str(x) for x in pair],
                "held": True,
            }
    # shared-angle degeneracy: close up under alpha-pair membership
    forced = {s, u}
    grew = True
    while grew:
        grew = False
        for x in list(forced):
            for pair in alpha_pairs_for_angle(x):
                if x in pair:
                    for y in pair:
                        if y not in forced:
                            forced.add(y)
                            grew = True
    closed = all(x * 3 in forced for x in forced)
    no_fixed = all(x * 3 != x for x in forced)
    return {
        "kind": "alpha_absorption",
        "chord": [str(s), str(u)],
        "forced_set": sorted(str(x) for x in forced),
        "held": bool(closed and no_fixed and len(forced) > 2),
    }


def principal_check(t, quadrant: str = "I", tol: float = 1e-6) -> PrincipalResult:
    """Fiber test on the principal component boundary at internal arg t.

    Basilica arguments away from the corners must be glued exactly to the
    same-arc partner and separated from the opposite-arc one, with the
    ray-crossing certificate recorded; the corner arguments 1/3 and 2/3
    give four parabolic landings mapping bijectively; other doubling-
    periodic arguments land at parabolic points carrying a co-landing
    coperiodic pair; doubling-preperiodic non-basilica arguments give
    plain singletons.
    """
    t = Angle(t)
    if t == Angle(1, 3) or t == Angle(2, 3):
        return _principal_corners(t, quadrant, tol)

    f_pt, f_dir = _internal_endpoint("principal", t, quadrant=quadrant)
    arc = arc_of(f_pt)
    if preperiod_pair(t, 2)[0] == 0:
        # doubling-periodic arg away from the corners: parabolic landing
        return _principal_parabolic(t, quadrant, arc, f_pt, f_dir, tol)
    rays = discover_rays(f_pt, [f_dir], tol=10 * tol)
    if not rays:
        raise RuntimeError(f"no parameter ray verified at internal arg {t}")
    images, spread = _e2b_images(rays)
    image = images[0].a

    if not is_basilica_angle(t):
        # involution partner lands the mirror arc; images must differ
        mirror = ray_landing("E2B", rays[0].angle + Angle(1, 2))
        sep = abs(mirror.a - image) if mirror.status == "landed" else math.inf
        if sep < 10 * tol:
            raise RuntimeError(f"unexpected gluing across arcs at {t}")
        return PrincipalResult(
            "singleton", t, quadrant, arc, rays[0].a, rays,
            image=image, image_gap=spread, separation=sep,
            certificate={"kind": "singleton", "held": bool(spread < tol)})

    tt = basilica_partner(t)
    p_pt = p_dir = None
    for sel in (arc, "I", "II", "III", "IV"):
        try:
            cand_pt, cand_dir = _internal_endpoint("principal", tt,
                                                   quadrant=sel)
        except (ValueError, RuntimeError):
            continue
        if arc_of(cand_pt) == arc:
            p_pt, p_dir = cand_pt, cand_dir
            break
    if p_pt is None:
        raise RuntimeError(f"no same-arc partner ray found for {t} on {arc}")
    p_rays = discover_rays(p_pt, [p_dir], tol=10 * tol)
    if not p_rays:
        raise RuntimeError(f"no parameter ray verified at internal arg {tt}")
    p_images, p_spread = _e2b_images(p_rays)
    gap = max(spread, p_spread, abs(image - p_images[0].a))
    if gap > tol * (1.0 + abs(image)):
        raise RuntimeError(f"same-arc identification failed at {t}: {gap:.3e}")

    # opposite-arc partner comes from the sign involution exactly
    o_pt = -p_pt
    o_angle = p_rays[0].angle + Angle(1, 2)
    o_land = ray_landing("E1", o_angle)
    if o_land.status != "landed" or abs(o_land.a - o_pt) > 10 * tol * (1 + abs(o_pt)):
        raise RuntimeError("sign involution check failed for opposite arc")
    o_image = ray_landing("E2B", o_angle)
    sep = abs(o_image.a - image)
    if sep <= 10 * tol:
        raise RuntimeError(
            f"opposite-arc separation failed at {t}: {sep:.3e}")

    certificate = _crossing_certificate((rays[0].angle, o_angle))
    return PrincipalResult(
        "pair_same_quadrant", t, quadrant, arc, rays[0].a, rays,
        partner=tt, partner_point=p_rays[0].a, partner_rays=p_rays,
        opposite_point=o_land.a, opposite_rays=(o_land, o_image),
        image=image, image_gap=gap, separation=sep, certificate=certificate)


def _principal_parabolic(t: Angle, quadrant: str, arc: str, f_pt: complex,
                         f_dir: complex, tol: float) -> PrincipalResult:
    """Doubling-periodic internal arg away from the corners.

    The landing parameter carries a parabolic cycle whose tail period is
    the doubling period of t, and the access sector belongs to a pair of
    coperiodic rays that co-land there, as at the corners.  The internal
    ray crawls near such a point, so candidates are matched against its
    endpoint with a loose cap and the co-landing of the polished pair is
    the sharp check.
    """
    p = preperiod_pair(t, 2)[1]
    estimates = [
        est for eps in (0.0, 0.35, -0.35)
        if (est := _outward_angle_estimate(f_pt, f_dir * cmath.exp(1j * eps)))
        is not None
    ]
    if not estimates:
        raise RuntimeError(f"no escaping access found at internal arg {t}")
    cands = _coperiodic_near(p, estimates)
    rays = discover_rays(f_pt, (), candidates=cands, tol=1e-3,
                         max_traces=16)
    if len(rays) != 2:
        raise RuntimeError(
            f"expected a coperiodic pair at internal arg {t}, verified "
            f"{[str(r.angle) for r in rays]}")
    pt = rays[0].a
    glue = abs(rays[0].a - rays[1].a)
    if glue > tol * (1.0 + abs(pt)):
        raise RuntimeError(f"coperiodic pair does not co-land at {t}: {glue:.3e}")
    images, ispread = _e2b_images(rays)
    image = images[0].a

    # sign involution: the mirror pair must land apart on both sides
    o_angle = rays[0].angle + Angle(1, 2)
    o_land = ray_landing("E1", o_angle)
    if o_land.status != "landed" or abs(o_land.a + pt) > 10 * tol * (1 + abs(pt)):
        raise RuntimeError("sign involution check failed for opposite arc")
    o_image = ray_landing("E2B", o_angle)
    sep = abs(o_image.a - image)
    if sep <= 10 * tol:
        raise RuntimeError(f"opposite-arc separation failed at {t}: {sep:.3e}")
    certificate = {
        "kind": "coperiodic_pair",
        "angles": [str(r.angle) for r in rays],
        "tail_period": p,
        "gluing_gap": glue,
        "held": bool(glue <= tol * (1.0 + abs(pt))
                     and ispread <= tol * (1.0 + abs(image))),
    }
    return PrincipalResult(
        "parabolic_singleton", t, quadrant, arc, pt, rays,
        opposite_point=o_land.a, opposite_rays=(o_land, o_image),
        image=image, image_gap=ispread, separation=sep,
        certificate=certificate)


def _principal_corners(t: Angle, quadrant: str, tol: float) -> PrincipalResult:
    landings = {}
    for name, pair in _CORNER_PAIRS.items():
        e1 = [ray_landing("E1", s) for s in pair]
        e2 = [ray_landing("E2B", s) for s in pair]
        if any(l.status != "landed" for l in e1 + e2):
            raise RuntimeError(f"corner {name} rays did not land")
        if abs(e1[0].a - e1[1].a) > tol or abs(e2[0].a - e2[1].a) > tol:
            raise RuntimeError(f"corner {name} rays do not co-land")
        landings[name] = (e1, e2)
    pts = [landings[n][0][0].a for n in _CORNER_PAIRS]
    imgs = [landings[n][1][0].a for n in _CORNER_PAIRS]
    min_sep = min(abs(p - q) for i, p in enumerate(pts)
                  for q in pts[i + 1:])
    min_img_sep = min(abs(p - q) for i, p in enumerate(imgs)
                      for q in imgs[i + 1:])
    if min_sep <= 10 * tol or min_img_sep <= 10 * tol:
        raise RuntimeError("parabolic corners or their images collide")
    corners = {
        name: {
            "angles": [str(s) for s in pair],
            "point": [landings[name][0][0].a.real, landings[name][0][0].a.imag],
            "image": [landings[name][1][0].a.real, landings[name][1][0].a.imag],
        }
        for name, pair in _CORNER_PAIRS.items()
    }
    # the corner carrying the requested argument on the requested arc
    mine = {"1/3": {"I": "W4", "II": "W2", "III": "W2", "IV": "W4"},
            "2/3": {"I": "W1", "II": "W1", "III": "W3", "IV": "W3"}}
    name = mine[str(t)].get(quadrant, "W4")
    pt = complex(*corners[name]["point"])
    e1_pair, e2_pair = landings[name]
    return PrincipalResult(
        "parabolic_singleton", t, quadrant, name, pt,
        tuple(e1_pair), image=e2_pair[0].a,
        image_gap=abs(e2_pair[0].a - e2_pair[1].a),
        separation=min(min_sep, min_img_sep),
        certificate={"kind": "parabolic_bijection", "held": True,
                     "min_corner_separation": min_sep,
                     "min_image_separation": min_img_sep},
        corners=corners)
