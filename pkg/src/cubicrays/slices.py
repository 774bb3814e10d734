"""Parameter slices of the cubic family and their escape coordinates.

Two one-parameter slices are studied.  On the first the marked critical
point is a fixed point (v = a).  On the second it has period two:
dividing f(f(a)) - a by the period-one factor (v - a) leaves

    v^2 + a v + 1 - 2 a^2 = 0,

a two-sheeted curve over the a-plane branched over a = +-2/3.  With
w(a) = 3a sqrt(1 - 4/(9 a^2)) (principal root, so the branch cut is
exactly the segment [-2/3, 2/3]) the sheets are v = (-a +- w)/2.  On
the plus sheet v = a - 1/(3a) + O(1/a^3): the marked two-cycle stays
close to the critical point and the map is quadratic-like there.  On
the minus sheet v = -2a + 1/(3a) + O(1/a^3) and the cycle straddles two
separated disks.

The escape coordinate of a slice point is the Boettcher position of the
cocritical point, phi = B(2a), a conformal isomorphism from each escape
region onto the outside of the closed unit disk.  Its inverse is
computed by Newton continuation in a on the orbit equations
f_a^n(2a) = target along the tripling orbit of the angle, which keeps
every Newton target in the regime where the Boettcher coordinate is the
identity to high relative accuracy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .angles import Angle
from .dynamics import CubicMap, basin_boettcher, cocritical_angle, green
from .laminations import _W_INTERVALS, in_open_arc

SLICES = ("s1", "s2")
SHEETS = ("plus", "minus")
REGIONS = ("E1", "E2B", "E2D")

_REGION_SLICE = {"E1": ("s1", None), "E2B": ("s2", "plus"), "E2D": ("s2", "minus")}


@dataclass(frozen=True)
class SlicePoint:
    slice_name: str
    a: complex
    v: complex
    sheet: Optional[str] = None
    flag: Optional[str] = None  # "branch_point" / "degenerate" markers

    @property
    def map(self) -> CubicMap:
        return CubicMap(self.a, self.v)

    def __post_init__(self):
        if self.slice_name not in SLICES:
            raise ValueError(f"unknown slice {self.slice_name!r}")
        if self.slice_name == "s2" and self.sheet not in SHEETS:
            raise ValueError("s2 points carry a sheet label")

    def to_json(self) -> dict:
        d = {
            "slice": self.slice_name,
            "a": [self.a.real, self.a.imag],
            "v": [self.v.real, self.v.imag],
        }
        if self.sheet is not None:
            d["sheet"] = self.sheet
        if self.flag is not None:
            d["flag"] = self.flag
        return d

    @staticmethod
    def from_json(d: dict) -> "SlicePoint":
        return SlicePoint(
            d["slice"],
            complex(d["a"][0], d["a"][1]),
            complex(d["v"][0], d["v"][1]),
            d.get("sheet"),
            d.get("flag"),
        )


def s1(a: complex) -> SlicePoint:
    """Point of the fixed-critical-point slice over a."""
    a = complex(a)
    return SlicePoint("s1", a, a)


def s2_discriminant_root(a: complex) -> complex:
    """w(a) = 3a sqrt(1 - 4/(9a^2)); branch cut exactly [-2/3, 2/3]."""
    a = complex(a)
    if a == 0:
        return 2j  # limit along the upper side at the midpoint of the cut
    return 3.0 * a * cmath.sqrt(1.0 - 4.0 / (9.0 * a * a))


def s2_point(a: complex, sheet: str) -> SlicePoint:
    """The period-two slice point over a on the named sheet."""
    a = complex(a)
    if sheet not in SHEETS:
        raise ValueError(f"unknown sheet {sheet!r}")
    w = s2_discriminant_root(a)
    if abs(w) <= 1e-9 * (1.0 + 3.0 * abs(a)):
        # double root where the sheets meet
        return SlicePoint("s2", a, -a / 2.0, sheet, "branch_point")
    v = (-a + w) / 2.0 if sheet == "plus" else (-a - w) / 2.0
    flag = None
    if abs(v - a) <= 1e-14 * (1.0 + abs(a)):
        flag = "degenerate"  # cannot occur: substituting v = a gives 1 = 0
    return SlicePoint("s2", a, v, sheet, flag)


def s2_points(a: complex) -> Tuple[SlicePoint, ...]:
    """Both period-two slice points over a; a single flagged point over
    the branch parameters +-2/3 where the two sheets meet."""
    plus = s2_point(a, "plus")
    if plus.flag == "branch_point":
        return (plus,)
    return (plus, s2_point(a, "minus"))


def s2_sheet_of(a: complex, v: complex) -> str:
    """Sheet label of the root v among the two values over a."""
    pts = s2_points(a)
    return min(pts, key=lambda p: abs(p.v - v)).sheet


def s2_follow_v(a: complex, v_anchor: complex) -> complex:
    """The root of the sheet equation over a nearest to a previous value.

    Continuation helper: nearest-root tracking keeps v on the analytic
    continuation of the starting sheet along any path avoiding +-2/3.
    """
    a = complex(a)
    w = s2_discriminant_root(a)
    cands = ((-a + w) / 2.0, (-a - w) / 2.0)
    return min(cands, key=lambda v: abs(v - v_anchor))


def slice_point(slice_name: str, a: complex, v_anchor: Optional[complex] = None,
                sheet: Optional[str] = None) -> SlicePoint:
    """Point of a slice over a, continued from v_anchor or by sheet label."""
    if slice_name == "s1":
        return s1(a)
    if v_anchor is not None:
        v = s2_follow_v(a, v_anchor)
        return SlicePoint("s2", complex(a), v, s2_sheet_of(a, v))
    if sheet is None:
        raise ValueError("s2 needs a sheet label or a v anchor")
    return s2_point(a, sheet)


def _dv_da(slice_name: str, a: complex, v: complex) -> complex:
    if slice_name == "s1":
        return 1.0 + 0.0j
    # implicit differentiation of v^2 + a v + 1 - 2 a^2 = 0
    return (4.0 * a - v) / (2.0 * v + a)


# ------------------------------------------------------- escape coordinates

def param_green(pt: SlicePoint) -> float:
    """Escape rate of the free critical orbit; 0 outside the escape regions.

    The cocritical point shares its image with the free critical point, so
    their escape rates agree and this equals log |phi|.
    """
    return green(pt.map, pt.map.free_critical)


def param_angle(pt: SlicePoint) -> float:
    """External angle of the cocritical point, in turns."""
    return cocritical_angle(pt.map)


def region_of(pt: SlicePoint) -> str:
    if param_green(pt) <= 0:
        raise ValueError("point is not in an escape region")
    if pt.slice_name == "s1":
        return "E1"
    return "E2B" if pt.sheet == "plus" else "E2D"


def phi(pt: SlicePoint, region: Optional[str] = None) -> complex:
    """Escape coordinate B(2a) as a complex number of modulus > 1."""
    if region is not None and region_of(pt) != region:
        raise ValueError(f"point is not in region {region}")
    g = param_green(pt)
    if g <= 0:
        raise ValueError("point is not in an escape region")
    return cmath.exp(g + 2j * math.pi * param_angle(pt))


# -------------------------------------------------- Newton on orbit targets

def _orbit_and_derivative(
    slice_name: str, a: complex, v: complex, n: int
) -> Tuple[complex, complex]:
    """f_a^n(2a) and its total a-derivative along the slice."""
    vp = _dv_da(slice_name, a, v)
    z = 2.0 * a
    dz = 2.0 + 0.0j
    for _ in range(n):
        fz = (z - a) * (z - a) * (z + 2.0 * a) + v
        dfz = 3.0 * (z - a) * (z + a) * dz + 6.0 * a * (a - z) + vp
        z, dz = fz, dfz
    return z, dz


def _solve_cocritical_target(
    slice_name: str,
    a0: complex,
    v0: complex,
    n: int,
    target: complex,
    iters: int = 40,
    rel_tol: float = 1e-12,
) -> Tuple[complex, complex]:
    """Newton in a for f_a^n(2a) = target, keeping v on the slice sheet."""
    a, v = complex(a0), complex(v0)
    for _ in range(iters):
        z, dz = _orbit_and_derivative(slice_name, a, v, n)
        err = z - target
        if abs(err) < rel_tol * max(1.0, abs(target)):
            return a, v
        if dz == 0:
            break
        step = err / dz
        if abs(step) < 1e-14 * (1.0 + abs(a)):
            # the residual has hit the evaluation noise floor of the orbit;
            # the parameter itself cannot move any further
            return a, v
        # damp wild steps; the continuation seeds are close
        cap = 0.25 * (1.0 + abs(a))
        if abs(step) > cap:
            step *= cap / abs(step)
        a = a - step
        v = a if slice_name == "s1" else s2_follow_v(a, v)
    raise RuntimeError(f"parameter Newton failed at orbit depth {n}")


def _descend(slice_name, sheet, t: Angle, p_stop: float, rho_seed: float,
             substeps: int):
    """Generator of ray points (potential, a, v) at decreasing potentials.

    Newton targets are f_a^n(2a) = exp(3^n p) e^{2 pi i 3^n t}; the orbit
    depth n grows so the target modulus stays within [rho_seed, rho_seed^3],
    where identifying the Boettcher coordinate with the point itself is
    accurate to a relative O(|a|^2 / rho_seed^2).
    """
    p0 = math.log(rho_seed)
    if p_stop <= 0:
        raise ValueError("potential floor must be positive")
    p_top = max(p0, p_stop)
    levels = int(math.log(p_top / p_stop) / math.log(3.0)) + 4
    dirs = [cmath.exp(2j * math.pi * float(t * (3 ** n))) for n in range(levels + 2)]

    # seed from f(2a) = 4 a^3 + v ~ 4 a^3 on the branch with arg(a) ~ t
    z1 = math.exp(3.0 * p_top)
    a = (z1 / 4.0) ** (1.0 / 3.0) * cmath.exp(2j * math.pi * float(t))
    v = a if slice_name == "s1" else s2_point(a, sheet).v

    p_level = p_top
    a, v = _solve_cocritical_target(slice_name, a, v, 1, z1 * dirs[1])
    yield p_level, a, v
    n = 1
    while p_level > p_stop * (1.0 + 1e-12):
        p_next = max(p_level / 3.0, p_stop)
        for s in range(1, substeps + 1):
            p = p_level * (p_next / p_level) ** (s / substeps)
            n_use = n + 1 if 3.0 ** (n + 1) * p <= 3.0 * p0 else n
            target = math.exp(3.0 ** n_use * p) * dirs[n_use]
            a, v = _solve_cocritical_target(slice_name, a, v, n_use, target)
        n = n_use
        p_level = p_next
        yield p_level, a, v


@dataclass
class ParamRayTrace:
    region: str
    angle: Angle
    samples: List[Tuple[SlicePoint, float]] = field(default_factory=list)
    status: str = "traced"
    landing: Optional[SlicePoint] = None
    landing_aux: Optional[complex] = None  # cycle point of a landing refinement
    landing_kind: Optional[tuple] = None   # ("parabolic", ell, mult) or
                                           # ("misiurewicz", m, ell)

    @property
    def endpoint(self) -> SlicePoint:
        if self.landing is not None:
            return self.landing
        return self.samples[-1][0]

    def to_json(self) -> dict:
        d = {
            "region": self.region,
            "angle": f"{self.angle.numerator}/{self.angle.denominator}",
            "status": self.status,
            "samples": [[pt.to_json(), p] for pt, p in self.samples],
        }
        if self.landing is not None:
            d["landing"] = self.landing.to_json()
        return d


def param_from_coords(
    region: str,
    rho: float,
    t,
    rho_seed: float = 1e6,
    substeps: int = 4,
) -> SlicePoint:
    """The slice point with escape coordinate rho e^{2 pi i t}, rho > 1."""
    if region not in REGIONS:
        raise ValueError(f"unknown region {region!r}")
    if rho <= 1.0:
        raise ValueError("rho must exceed 1")
    slice_name, sheet = _REGION_SLICE[region]
    p_stop = math.log(rho)
    for _, a, v in _descend(slice_name, sheet, Angle(t), p_stop, rho_seed, substeps):
        pass
    return slice_point(slice_name, a, v_anchor=v)


def trace_parameter_ray(
    region: str,
    t,
    rho_floor: float = 1.0,
    rho_seed: float = 1e6,
    substeps: int = 4,
    land_tol: float = 1e-9,
    p_budget: float = 1e-12,
    polish: Optional[Tuple] = None,
) -> ParamRayTrace:
    """Parameter ray of an escape region at angle t, traced inward.

    With rho_floor > 1 the trace stops at that coordinate modulus
    (status "reached_floor").  With rho_floor = 1 it continues toward the
    region boundary and declares landing when consecutive parameters are
    within land_tol of each other; slow landings exhaust the potential
    budget instead and are reported, not forced ("budget_exhausted").

    polish optionally refines the endpoint by a landing equation:
    ('parabolic', q) solves for a multiplier-1 cycle of period q,
    ('misiurewicz', m, l) puts the free critical point on a repelling
    l-cycle after m steps.
    """
    if region not in REGIONS:
        raise ValueError(f"unknown region {region!r}")
    t = Angle(t)
    slice_name, sheet = _REGION_SLICE[region]
    if rho_floor > 1.0:
        p_stop = math.log(rho_floor)
        landing_mode = False
    elif rho_floor == 1.0:
        p_stop = p_budget
        landing_mode = True
    else:
        raise ValueError("rho_floor must be >= 1")

    trace = ParamRayTrace(region=region, angle=t)
    prev_a = None
    for p, a, v in _descend(slice_name, sheet, t, p_stop, rho_seed, substeps):
        pt = slice_point(slice_name, a, v_anchor=v)
        trace.samples.append((pt, p))
        if landing_mode and prev_a is not None and abs(a - prev_a) < land_tol:
            trace.status = "landed"
            trace.landing = pt
            break
        prev_a = a
    else:
        trace.status = "budget_exhausted" if landing_mode else "reached_floor"

    if polish is not None:
        pt = trace.samples[-1][0]
        if polish[0] == "parabolic":
            a, v, x, ell, lam = polish_parabolic(slice_name, polish[1],
                                                 pt.a, pt.v)
            trace.landing_kind = ("parabolic", ell, lam)
        elif polish[0] == "misiurewicz":
            a, v, x = _misiurewicz_newton(slice_name, polish[1], polish[2],
                                          pt.a, pt.v)
            trace.landing_kind = ("misiurewicz", polish[1], polish[2])
        else:
            raise ValueError(f"unknown polish {polish!r}")
        trace.status = "landed"
        trace.landing = slice_point(slice_name, a, v_anchor=v)
        trace.landing_aux = x
    return trace


# ----------------------------------------------------- landing refinements

def _orbit_jet(a: complex, v: complex, vp: complex, x: complex, dx_da: complex,
               n: int):
    """Orbit of x under f_a with first derivatives in x and in a.

    Returns lists (z_k, dz_k/dx, dz_k/da) for k = 0..n, treating x and a
    as independent and v as v(a) with derivative vp.
    """
    zs = [x]
    zx = [1.0 + 0.0j]
    za = [dx_da]
    for _ in range(n):
        z = zs[-1]
        fp = 3.0 * (z - a) * (z + a)
        zs.append((z - a) * (z - a) * (z + 2.0 * a) + v)
        zx.append(fp * zx[-1])
        za.append(fp * za[-1] + 6.0 * a * (a - z) + vp)
    return zs, zx, za


def _solve2(m11, m12, m21, m22, r1, r2):
    det = m11 * m22 - m12 * m21
    if det == 0:
        raise RuntimeError("singular Jacobian in landing refinement")
    return (r1 * m22 - r2 * m12) / det, (m11 * r2 - m21 * r1) / det


def _parabolic_newton(
    slice_name: str,
    q: int,
    a0: complex,
    v0: complex,
    x0: Optional[complex] = None,
    iters: int = 60,
    tol: float = 1e-12,
    mult: complex = 1.0 + 0.0j,
):
    """Parameter and cycle point with f_a^q(x) = x, (f_a^q)'(x) = mult.

    The unknowns are (a, x); for mult = 1 the Jacobian is nearly
    anti-triangular at the solution since d/dx of the cycle equation
    vanishes there, so the system stays well-conditioned exactly where
    plain cycle Newton breaks.
    """
    a, v = complex(a0), complex(v0)
    x = complex(x0) if x0 is not None else _seed_parabolic_cycle(a, v, q, mult)
    for _ in range(iters):
        vp = _dv_da(slice_name, a, v)
        zs = [x]
        zx = [1.0 + 0.0j]
        zxx = [0.0j]
        za = [0.0j]
        zxa = [0.0j]
        for _ in range(q):
            z = zs[-1]
            fp = 3.0 * (z - a) * (z + a)
            fpp = 6.0 * z
            fa = 6.0 * a * (a - z) + vp
            fpa = -6.0 * a
            zs.append((z - a) * (z - a) * (z + 2.0 * a) + v)
            zxx.append(fpp * zx[-1] * zx[-1] + fp * zxx[-1])
            zxa.append(fpp * za[-1] * zx[-1] + fpa * zx[-1] + fp * zxa[-1])
            zx.append(fp * zx[-1])
            za.append(fp * za[-1] + fa)
        f1 = zs[q] - x
        f2 = zx[q] - mult
        j11 = za[q]
        j12 = zx[q] - 1.0
        j21 = zxa[q]
        j22 = zxx[q]
        da, dx = _solve2(j11, j12, j21, j22, f1, f2)
        a, x = a - da, x - dx
        v = a if slice_name == "s1" else s2_follow_v(a, v)
        if abs(da) + abs(dx) < tol * (1.0 + abs(a) + abs(x)):
            return a, v, x
    raise RuntimeError("parabolic refinement did not converge")


def _misiurewicz_newton(
    slice_name: str,
    m: int,
    ell: int,
    a0: complex,
    v0: complex,
    x0: Optional[complex] = None,
    iters: int = 60,
    tol: float = 1e-12,
):
    """Parameter with f_a^m(-a) on a repelling ell-cycle point x."""
    a, v = complex(a0), complex(v0)
    if x0 is None:
        zs, _, _ = _orbit_jet(a, v, _dv_da(slice_name, a, v), -a, -1.0, m)
        x = zs[m]
    else:
        x = complex(x0)
    for _ in range(iters):
        vp = _dv_da(slice_name, a, v)
        cz, czx, cza = _orbit_jet(a, v, vp, x, 0.0, ell)
        oz, _, oza = _orbit_jet(a, v, vp, -a, -1.0, m)
        f1 = cz[ell] - x
        f2 = oz[m] - x
        j11 = cza[ell]
        j12 = czx[ell] - 1.0
        j21 = oza[m]
        j22 = -1.0 + 0.0j
        da, dx = _solve2(j11, j12, j21, j22, f1, f2)
        a, x = a - da, x - dx
        v = a if slice_name == "s1" else s2_follow_v(a, v)
        if abs(da) + abs(dx) < tol * (1.0 + abs(a) + abs(x)):
            return a, v, x
    raise RuntimeError("preperiodic refinement did not converge")


def _seed_parabolic_cycle(a: complex, v: complex, q: int,
                          target: complex = 1.0 + 0.0j) -> complex:
    """The q-cycle point whose multiplier is nearest the target.

    Selecting by multiplier skips the marked superattracting cycle, which
    solves the cycle equation for every parameter of the slice and would
    trap the refinement on a singular solution line.
    """
    base = np.poly1d([1.0, 0.0, -3.0 * a * a, 2.0 * a ** 3 + v])
    comp = base
    for _ in range(q - 1):
        comp = np.poly1d(np.polyval(base, comp))
    roots = np.roots(comp - np.poly1d([1.0, 0.0]))
    f = CubicMap(a, v)

    def mult(r):
        m = 1.0 + 0.0j
        z = complex(r)
        for _ in range(q):
            m *= f.deriv(z)
            z = f(z)
        return m

    return complex(min(roots, key=lambda r: abs(mult(r) - target)))


def _parabolic_candidates(q: int) -> List[Tuple[int, complex]]:
    # an ell-cycle whose multiplier is a primitive (q/ell)-th root of
    # unity becomes a single multiplier-1 cycle for f^q
    out = []
    for ell in range(1, q + 1):
        if q % ell:
            continue
        k = q // ell
        for j in range(k):
            if math.gcd(j, k) == 1:
                out.append((ell, cmath.exp(2j * math.pi * j / k)))
    return out


def polish_parabolic(slice_name: str, q: int, a0: complex, v0: complex):
    """Refine a near-parabolic ray endpoint onto the exact parabolic point.

    Tries every degeneracy type compatible with a period-q ray cluster
    (saddle-node q-cycle, and shorter cycles with root-of-unity
    multiplier, e.g. the doubling case of a fixed point with multiplier
    -1 when q = 2) and keeps the converged solution nearest the endpoint.
    Returns (a, v, x, ell, multiplier_target).
    """
    best = None
    for ell, lam in _parabolic_candidates(q):
        try:
            a, v, x = _parabolic_newton(slice_name, ell, a0, v0, mult=lam)
        except RuntimeError:
            continue
        gap = abs(a - a0)
        if gap > 0.1 * (1.0 + abs(a0)):
            continue  # converged to some other parabolic point, not ours
        if best is None or gap < best[0]:
            best = (gap, a, v, x, ell, lam)
    if best is None:
        raise RuntimeError(
            "no parabolic refinement converged near the ray endpoint")
    return best[1:]


# ------------------------------------------------------------ the transfer

def psi(pt: SlicePoint, rho_seed: float = 1e6) -> SlicePoint:
    """Escape-coordinate transfer from the fixed-point slice escape region
    to the quadratic-like sheet of the period-two slice: same coordinate,
    other region."""
    if region_of(pt) != "E1":
        raise ValueError("psi expects a point of the first escape region")
    g = param_green(pt)
    return param_from_coords("E2B", math.exp(g), param_angle(pt),
                             rho_seed=rho_seed)


def psi_inverse(pt: SlicePoint, rho_seed: float = 1e6) -> SlicePoint:
    if region_of(pt) != "E2B":
        raise ValueError("psi_inverse expects a quadratic-like sheet point")
    g = param_green(pt)
    return param_from_coords("E1", math.exp(g), param_angle(pt),
                             rho_seed=rho_seed)


# -------------------------------------------------------- region classifier

def classify_escape_s2(
    pt: SlicePoint,
    budget: int = 120,
    grid: int = 768,
    margin: int = 5,
) -> str:
    """Which escape region a period-two slice point belongs to.

    Returns "not_escape" if the free critical point stays bounded for
    budget iterations.  Otherwise the marked two-cycle {a, v} is tested
    for lying in one component of the non-escaping set (the basilica-like
    region "E2B", where the cycle components touch at the distinguished
    boundary fixed point) or in two (the disk region "E2D").

    The sampling window is centered on a at the natural component scale
    1/|3a f'(v)|, the curvature scale of the superattracting return map,
    so the marked components span a grid-size-independent number of
    pixels.  When v falls inside the window the verdict is read off
    connected-component labels (after a one-step closing that repairs the
    single-pixel pinch at the touching point); when v lies far outside,
    confinement of the a-component away from the window border certifies
    that the components are distinct.  "unresolved" is returned when the
    marked points sit within margin pixels of the escaping set or the
    component geometry does not settle after one window enlargement.
    """
    from scipy import ndimage

    if pt.slice_name != "s2":
        raise ValueError("classification applies to period-two slice points")
    f = pt.map
    a, v = complex(pt.a), complex(pt.v)
    R = f.escape_radius
    z = f.free_critical
    for _ in range(budget):
        if abs(z) > R:
            break
        z = f(z)
    else:
        return "not_escape"

    curv = abs(3.0 * a * f.deriv(v))
    if curv == 0:
        return "unresolved"
    r_scale = 1.0 / curv

    for enlarge in (1.0, 4.0):
        half = 20.0 * r_scale * enlarge
        xs = np.linspace(a.real - half, a.real + half, grid)
        ys = np.linspace(a.imag - half, a.imag + half, grid)
        X, Y = np.meshgrid(xs, ys)
        alive = np.ones((grid, grid), dtype=bool)
        W = X + 1j * Y
        for _ in range(budget):
            W[alive] = (W[alive] - a) ** 2 * (W[alive] + 2 * a) + v
            alive &= np.abs(W) <= R

        def pixel(zz: complex) -> Optional[Tuple[int, int]]:
            ix = int(round((zz.real - xs[0]) / (xs[1] - xs[0])))
            iy = int(round((zz.imag - ys[0]) / (ys[1] - ys[0])))
            if 0 <= ix < grid and 0 <= iy < grid:
                return iy, ix
            return None

        pa = pixel(a)
        pv = pixel(v)
        v_inside = pv is not None and abs(v - a) <= 0.6 * half
        if not alive[pa]:
            return "unresolved"
        if v_inside and not alive[pv]:
            return "unresolved"
        dist = ndimage.distance_transform_cdt(alive, metric="chessboard")
        if dist[pa] <= margin or (v_inside and dist[pv] <= margin):
            return "unresolved"

        closed = ndimage.binary_closing(
            alive, structure=np.ones((3, 3), dtype=bool))
        labels, _ = ndimage.label(closed, structure=np.ones((3, 3), dtype=int))
        comp = labels == labels[pa]
        touches_border = (comp[0, :].any() or comp[-1, :].any()
                          or comp[:, 0].any() or comp[:, -1].any())
        if v_inside:
            if labels[pv] == labels[pa]:
                return "E2B"
            if not touches_border:
                return "E2D"
            # the a-component leaves the window, so it might still reach v
        elif not touches_border:
            return "E2D"
    return "unresolved"


# ------------------------------------------------------------- the W sectors

_W_LABELS = ("W1", "W2", "W3", "W4")


@dataclass(frozen=True)
class WRegion:
    label: str
    interval: Optional[Tuple[Angle, Angle]]


def w_region(t) -> WRegion:
    """Which of the four special open angle sectors, if any, t falls in.

    Boundary angles belong to no sector; they are the eight coperiodic
    rays bounding the sectors.
    """
    t = Angle(t)
    for name, (lo, hi) in zip(_W_LABELS, _W_INTERVALS):
        if in_open_arc(t, lo, hi):
            return WRegion(name, (lo, hi))
    return WRegion("none", None)


# --------------------------------------------------- internal parameter rays

_QUADRANT_DIR = {
    "I": 1.0 + 0.0j,
    "II": 1.0j,
    "III": -1.0 + 0.0j,
    "IV": -1.0j,
}

TYPE_C_CENTER = 0.8660254037844386j  # sqrt(3)/2 i: the free critical orbit
                                     # falls exactly onto the fixed point in
                                     # two steps, 1 + 4a^2/3 = 0


def mu(a: complex) -> complex:
    """Basin position of the free critical point on the fixed-point slice.

    Defined where -a is attracted to the superattracting fixed point a;
    even in a, and mu ~ -2 sqrt(3) a^2 near 0.
    """
    a = complex(a)
    return basin_boettcher(CubicMap(a, a), -a)


def capture_coordinate(a: complex, depth: int = 2) -> complex:
    """Basin position of f^depth(-a) on the fixed-point slice.

    Internal coordinate of the capture components, whose centers have
    f^depth(-a) exactly equal to the fixed point.
    """
    a = complex(a)
    f = CubicMap(a, a)
    return basin_boettcher(f, f.orbit(-a, depth)[-1])


def capture_depth(center: complex, max_depth: int = 12) -> int:
    """Steps until the free critical orbit hits the fixed point, at a
    capture-component center."""
    f = CubicMap(complex(center), complex(center))
    z = -complex(center)
    for m in range(1, max_depth + 1):
        z = f(z)
        if abs(z - center) < 1e-9 * (1.0 + abs(center)):
            return m
    raise ValueError("not a capture center within the depth limit")


@dataclass
class InternalRayTrace:
    component: str
    quadrant: Optional[str]
    angle: Angle
    samples: List[Tuple[complex, float]] = field(default_factory=list)
    status: str = "traced"

    @property
    def endpoint(self) -> complex:
        return self.samples[-1][0]


def _radius_schedule(r_min: float, r_end: float, step: float) -> List[float]:
    # uniform out to 0.9, then geometric shrink of 1 - r toward the boundary
    rs = list(np.arange(r_min, min(0.9, r_end), step))
    if r_end <= 0.9:
        rs.append(r_end)
        return rs
    gap = 0.1
    while gap > 1.0 - r_end:
        rs.append(1.0 - gap)
        gap *= 0.75
    rs.append(r_end)
    return rs


def internal_param_ray(
    component: str,
    t,
    quadrant: Optional[str] = None,
    center: Optional[complex] = None,
    r_end: float = 1.0 - 1e-6,
    r_min: float = 0.05,
    step: float = 0.02,
) -> InternalRayTrace:
    """Continuation of an internal parameter ray toward its boundary landing.

    component "principal": solves mu(a) = r e^{2 pi i t}; the coordinate is
    a double cover of the disk, and quadrant (I right, II top, III left,
    IV bottom, cut by the internal rays of arguments 1/3 and 2/3) selects
    the branch.  component "typeC": solves the capture coordinate on the
    component around center (default the top capture center on the
    imaginary axis); no quadrant applies.

    The endpoint at r_end approximates the boundary landing parameter of
    internal angle t to O(1 - r_end).
    """
    t = Angle(t)
    if component == "principal":
        if quadrant not in _QUADRANT_DIR:
            raise ValueError("the principal component needs a quadrant")
        direction = _QUADRANT_DIR[quadrant]
        coord = mu
        w0 = r_min * cmath.exp(2j * math.pi * float(t))
        seed = cmath.sqrt(-w0 / (2.0 * math.sqrt(3.0)))
        cand = max((seed, -seed),
                   key=lambda s: (s * direction.conjugate()).real)
        if (cand * direction.conjugate()).real < abs(cand) * 0.45:
            raise ValueError(f"angle {t} is not in quadrant {quadrant}")
        a = cand
    elif component == "typeC":
        if quadrant is not None:
            raise ValueError("capture components have no quadrants")
        c = complex(center) if center is not None else TYPE_C_CENTER
        depth = capture_depth(c)
        coord = lambda a: capture_coordinate(a, depth)
        # linear seed from a numerical derivative at the center
        h = 1e-5 * (1.0 + abs(c))
        d = (coord(c + h) - coord(c - h)) / (2.0 * h)
        if d == 0:
            raise RuntimeError("degenerate capture coordinate at the center")
        a = c + r_min * cmath.exp(2j * math.pi * float(t)) / d
    else:
        raise ValueError(f"unknown component kind {component!r}")

    trace = InternalRayTrace(component=component, quadrant=quadrant, angle=t)
    for r in _radius_schedule(r_min, r_end, step):
        target = r * cmath.exp(2j * math.pi * float(t))
        prev = a
        for _ in range(50):
            try:
                err = coord(a) - target
            except ValueError:
                # the iterate overshot the component, where the coordinate
                # diverges; bisect back toward the last evaluable point
                a = 0.5 * (a + prev)
                continue
            if abs(err) < 1e-12:
                break
            prev = a
            h = 1e-7 * (1.0 + abs(a))
            d = None
            for _ in range(6):
                try:
                    d = (coord(a + h) - coord(a - h)) / (2.0 * h)
                    break
                except ValueError:
                    h *= 0.25  # probe crossed the boundary; shrink it
            if d is None or d == 0:
                raise RuntimeError("flat derivative on internal ray")
            step_a = err / d
            cap = 0.2 * (1.0 + abs(a))
            if abs(step_a) > cap:
                step_a *= cap / abs(step_a)
            a -= step_a
        else:
            trace.status = "stalled"
            trace.samples.append((a, float(r)))
            return trace
        trace.samples.append((a, float(r)))
    trace.status = "reached_end"
    return trace
