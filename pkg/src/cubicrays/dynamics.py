"""Cubic polynomial dynamics: escape data, Boettcher coordinates, rays.

The maps are the monic cubics with marked critical points +a and -a,

    f(z) = (z - a)^2 (z + 2a) + v = z^3 - 3 a^2 z + 2 a^3 + v,

so f(a) = v, the cocritical point is 2a, and f(2a) = f(-a) = 4 a^3 + v.
External rays are traced by backward iteration along the tripling orbit
of the angle; landing points are then sharpened by Newton iterations on
the defining equation of the landing cycle.  A ray crashes when a
forward image of its angle differs from the cocritical angle by exactly
one third of a turn, in which case the trace stops on an iterated
preimage of the free critical point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .angles import Angle, AngleSet, preperiod_pair
from .laminations import AnglePartition


@dataclass(frozen=True)
class CubicMap:
    a: complex
    v: complex

    def __call__(self, z: complex) -> complex:
        w = z - self.a
        return w * w * (z + 2 * self.a) + self.v

    def deriv(self, z: complex) -> complex:
        return 3.0 * (z - self.a) * (z + self.a)

    def orbit(self, z: complex, n: int) -> List[complex]:
        out = [complex(z)]
        for _ in range(n):
            out.append(self(out[-1]))
        return out

    @property
    def cocritical(self) -> complex:
        return 2 * self.a

    @property
    def free_critical(self) -> complex:
        return -self.a

    @property
    def free_critical_value(self) -> complex:
        return 4 * self.a ** 3 + self.v

    @property
    def escape_radius(self) -> float:
        # |z| beyond this gives |f(z)| >= 2 |z|
        return 4.0 * max(1.0, abs(self.a), abs(self.v))


def green(f: CubicMap, z: complex, max_iter: int = 400) -> float:
    """Escape rate of z, the potential log|B(z)|; 0.0 for bounded orbits."""
    R = f.escape_radius
    z = complex(z)
    n = 0
    while abs(z) <= R:
        if n >= max_iter:
            return 0.0
        z = f(z)
        n += 1
    scale = 3.0 ** (-n)
    g = scale * math.log(abs(z))
    for _ in range(60):
        if abs(z) > 1e40:
            break
        w = f(z)
        scale /= 3.0
        g += scale * math.log(abs(w) / abs(z) ** 3)
        z = w
    return g


def escapes(f: CubicMap, z: complex, max_iter: int = 400) -> bool:
    return green(f, z, max_iter=max_iter) > 0.0


def boettcher(f: CubicMap, z: complex) -> complex:
    """Conjugacy to w -> w^3 near infinity, normalized tangent to identity.

    Evaluated as z * prod (f(z_k)/z_k^3)^(1/3^(k+1)) with principal roots;
    each factor stays close to 1 outside the escape radius, so the point
    itself must already be out there.  Deeper points have a well defined
    modulus exp(green) and angle external_angle, but not both at once on
    a single principal branch.
    """
    z = complex(z)
    if abs(z) <= f.escape_radius:
        raise ValueError(
            "point inside the escape radius; combine green and external_angle"
        )
    log_b = cmath.log(z)
    scale = 1.0
    for _ in range(80):
        if abs(z) > 1e40:
            break
        w = f(z)
        ratio = w / z ** 3
        if abs(ratio - 1.0) > 0.95:
            raise ValueError("Boettcher product factor out of range")
        scale /= 3.0
        log_b += scale * cmath.log(ratio)
        z = w
    return cmath.exp(log_b)


def _boettcher_arg(f: CubicMap, z: complex, max_iter: int = 400) -> float:
    """Argument of the Boettcher coordinate in turns, resolved along the orbit.

    Works below the escape radius as well: the principal-branch product is
    accumulated from the first orbit point where its factors are small, and
    the argument is divided back down the orbit choosing the preimage angle
    nearest to the plain argument of each point.  That choice is safe because
    past the escape radius arg B(z) differs from arg z by well under 1/6 of
    a turn.
    """
    z = complex(z)
    pts = [z]
    n = 0
    while abs(pts[-1]) <= f.escape_radius:
        if n >= max_iter:
            raise ValueError("orbit does not escape; external angle undefined")
        pts.append(f(pts[-1]))
        n += 1
    w = pts[-1]
    theta = cmath.phase(w) / (2 * math.pi)
    scale = 1.0
    zz = w
    for _ in range(80):
        if abs(zz) > 1e40:
            break
        nxt = f(zz)
        ratio = nxt / zz ** 3
        scale /= 3.0
        theta += scale * cmath.phase(ratio) / (2 * math.pi)
        zz = nxt
    theta %= 1.0
    for k in range(n - 1, -1, -1):
        proxy = (cmath.phase(pts[k]) / (2 * math.pi)) % 1.0
        best = None
        for j in range(3):
            cand = (theta + j) / 3.0
            d = abs(cand - proxy) % 1.0
            d = min(d, 1.0 - d)
            if best is None or d < best[0]:
                best = (d, cand)
        theta = best[1] % 1.0
    return theta


def external_angle(f: CubicMap, z: complex) -> float:
    """External angle of an escaping point, in turns in [0, 1)."""
    return _boettcher_arg(f, z)


def cocritical_angle(f: CubicMap) -> float:
    """External angle of the cocritical point 2a; the parameter angle."""
    return _boettcher_arg(f, f.cocritical)


# ------------------------------------------------------------- ray tracing

_OMEGA = cmath.exp(2j * math.pi / 3)


def _cubic_preimages(f: CubicMap, w: complex) -> Tuple[complex, complex, complex]:
    """The three solutions of f(z) = w, via Cardano on the depressed cubic.

    f(z) - w = z^3 + p z + q with p = -3a^2, q = 2a^3 + v - w.  The cube
    root branch with the larger |u^3| avoids cancellation; one Newton step
    per root polishes the rounding off.
    """
    a = complex(f.a)
    p = -3.0 * a * a
    q = 2.0 * a ** 3 + complex(f.v) - complex(w)
    s = cmath.sqrt(0.25 * q * q + p ** 3 / 27.0)
    u3 = -0.5 * q + s
    alt = -0.5 * q - s
    if abs(alt) > abs(u3):
        u3 = alt
    if u3 == 0:
        return (0.0j, 0.0j, 0.0j)
    u = u3 ** (1.0 / 3.0)
    roots = []
    for _ in range(3):
        z = u - p / (3.0 * u)
        # one Newton polish step on z^3 + p z + q
        d = 3.0 * z * z + p
        if d != 0:
            z -= (z * (z * z + p) + q) / d
        roots.append(z)
        u *= _OMEGA
    return tuple(roots)


def _nearest(cands, anchor: complex) -> complex:
    return min(cands, key=lambda r: abs(r - anchor))


def _newton_orbit_eq(
    f: CubicMap, x0: complex, m: int, q: int, iters: int = 80, tol: float = 1e-13
) -> Tuple[complex, bool]:
    """Newton for f^(m+q)(x) = f^m(x); with m = 0 these are period-q points."""
    x = complex(x0)
    for _ in range(iters):
        zs = [x]
        for _ in range(m + q):
            zs.append(f(zs[-1]))
        dprod = 1.0 + 0.0j
        derivs = []
        for zk in zs[:-1]:
            dprod *= f.deriv(zk)
            derivs.append(dprod)
        fval = zs[m + q] - zs[m]
        dval = derivs[m + q - 1] - (derivs[m - 1] if m > 0 else 1.0)
        if dval == 0:
            return x, False
        step = fval / dval
        x -= step
        if abs(step) < tol * max(1.0, abs(x)):
            return x, True
    return x, False


@dataclass
class RayTrace:
    angle: Angle
    status: str  # 'landed' | 'crashed' | 'traced'
    points: List[Tuple[float, complex]] = field(default_factory=list)
    landing_point: Optional[complex] = None
    preperiod: Optional[int] = None
    period: Optional[int] = None
    crash_index: Optional[int] = None
    crash_potential: Optional[float] = None
    crash_point: Optional[complex] = None

    @property
    def endpoint(self) -> complex:
        if self.landing_point is not None:
            return self.landing_point
        if self.crash_point is not None:
            return self.crash_point
        return self.points[-1][1]


def _crash_index(t: Angle, s: float, sweeps: int, window: float) -> Optional[int]:
    """Least j with 3^j t = s +- 1/3 within the window, else None."""
    cur = t
    for j in range(sweeps):
        x = float(cur)
        for target in (s + 1.0 / 3.0, s - 1.0 / 3.0):
            d = abs(x - target) % 1.0
            if min(d, 1.0 - d) < window:
                return j
        cur = cur * 3
    return None


def trace_dynamical_ray(
    f: CubicMap,
    t,
    sweeps: int = 44,
    param_angle: Optional[float] = None,
    crash_window: float = 1e-8,
    substeps: int = 4,
) -> RayTrace:
    """External ray of f at rational angle t, traced from infinity inward.

    Backward iteration along the angle orbit: level k holds a point on the
    ray at angle 3^k t, and each sweep pulls every level through the cubic,
    cutting the potential of the ray end by 3.  substeps interleaved
    ladders subdivide each potential step, keeping consecutive points
    close enough to pick the right preimage branch even where the ray
    passes near the free critical point.  If any branch choice along the
    way is a near-tie the whole trace retries with 3x then 9x substeps,
    and raises RuntimeError if the ambiguity persists.  Rational angles
    always land or crash; landing points are polished on their
    (pre)periodic equation.
    """
    t = Angle(t)
    if substeps < 1:
        raise ValueError("substeps must be at least 1")
    M = max(1.0, abs(f.a), abs(f.v))
    rho = max(1e4, 100.0 * M * M)

    j_crash = None
    g_crit = green(f, f.free_critical)
    if g_crit > 0.0:
        if param_angle is None:
            param_angle = cocritical_angle(f)
        j_crash = _crash_index(t, param_angle, sweeps + 8, crash_window)
        # a seed radius beyond the critical value keeps every trace level
        # above the crash potential until the intended stopping depth
        rho = max(rho, math.exp(min(230.0, 5.4 * g_crit)))
    # tripling the base potential keeps every interleaved seed rung at or
    # beyond the plain seed radius (and exp(3 * 230) still fits a float)
    p0 = 3.0 * math.log(rho)

    n_sweeps = sweeps
    crash_pot = None
    if j_crash is not None:
        crash_pot = g_crit / 3.0 ** j_crash
        # stop the trace just above the crash potential; the factor 5.4
        # keeps even the deepest interleaved rung a factor 1.8 above it
        n_sweeps = int(math.log(p0 / (5.4 * crash_pot)) / math.log(3.0))
        n_sweeps = max(n_sweeps, j_crash + 1)

    levels = n_sweeps + 1
    angs = [t]
    for _ in range(levels):
        angs.append(angs[-1] * 3)

    trace = None
    deep = None
    for K in (substeps, 3 * substeps, 9 * substeps):
        # ladder j carries the ray points at potentials p0 * 3^(-s - j/K)
        pts = [
            [cmath.exp(p0 * 3.0 ** (-j / K)) * cmath.exp(2j * math.pi * float(s))
             for s in angs]
            for j in range(K)
        ]
        trace = RayTrace(angle=t, status="traced")
        # margin = runner-up preimage distance over chosen distance; a
        # preimage-branch slip (which silently relocates the tail onto
        # another ray) needs a near-tie at the escaping critical value,
        # so a comfortable minimum margin certifies the trace.  With no
        # escaping critical point the basin of infinity holds no branch
        # points and near-ties only occur where two accesses to one
        # landing point merge, which is harmless.  Seed-sweep margins
        # are skipped: the rung radii are not yet comparable there.
        margin = math.inf
        watch = g_crit > 0.0
        for s in range(1, n_sweeps + 1):
            for j in range(K):
                ref = pts[j - 1] if j > 0 else pts[K - 1]
                cur = pts[j]
                for k in range(levels - s):
                    roots = _cubic_preimages(f, cur[k + 1])
                    cur[k] = _nearest(roots, ref[k])
                    if watch and s >= 2:
                        ds = sorted(abs(r - ref[k]) for r in roots)
                        if len(ds) > 1 and ds[0] > 0.0:
                            margin = min(margin, ds[1] / ds[0])
                trace.points.append((p0 * 3.0 ** (-s - j / K), cur[0]))
        deep = pts[K - 1]
        if margin >= 1.5:
            break
    else:
        raise RuntimeError(
            f"ray {t}: preimage branches stayed ambiguous (margin "
            f"{margin:.3f}) even with {9 * substeps} substeps"
        )
    if j_crash is not None:
        w = complex(f.free_critical)
        for i in range(j_crash, 0, -1):
            w = _nearest(_cubic_preimages(f, w), deep[i - 1])
        trace.status = "crashed"
        trace.crash_index = j_crash
        trace.crash_potential = crash_pot
        trace.crash_point = w
        return trace

    m, q = preperiod_pair(t, 3)
    x, ok = _newton_orbit_eq(f, deep[0], m, q)
    if ok and abs(x - deep[0]) < 0.2 * M:
        trace.status = "landed"
        trace.landing_point = x
        trace.preperiod = m
        trace.period = q
    return trace


# ---------------------------------------------------------- orbit portraits

class AmbiguousPortrait(ValueError):
    pass


def orbit_portrait(
    f: CubicMap,
    angles,
    tol: float = 1e-6,
    check_equivariance: bool = True,
    sweeps: int = 44,
) -> AnglePartition:
    """Partition of angles by common landing point of their external rays.

    Landing points come Newton-refined onto their (pre)periodic equation,
    so rays landing on the same point agree to refinement accuracy while
    distinct (pre)periodic points may sit only ~1e-7 apart deep in an
    escape region.  Grouping therefore happens at the refinement scale
    (capped by tol); any pair of landing points within 10x of that scale
    without being grouped is reported as ambiguous rather than silently
    split.
    """
    aset = AngleSet(angles)
    if len(aset) == 0:
        raise ValueError("no angles given")
    s = None
    if green(f, f.free_critical) > 0:
        s = cocritical_angle(f)
    landings = {}
    for t in aset:
        tr = trace_dynamical_ray(f, t, sweeps=sweeps, param_angle=s)
        if tr.status != "landed":
            raise ValueError(f"ray {t} did not land (status {tr.status})")
        landings[t] = tr.landing_point

    scale = max(1.0, abs(f.a), abs(f.v))
    group_tol = min(tol, 1e-10 * scale)
    items = list(aset)
    classes: List[List[Angle]] = []
    reps: List[complex] = []
    for t in items:
        z = landings[t]
        hit = None
        for i, r in enumerate(reps):
            if abs(z - r) < group_tol:
                hit = i
                break
        if hit is None:
            classes.append([t])
            reps.append(z)
        else:
            classes[hit].append(t)
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            d = abs(reps[i] - reps[j])
            if d < 10 * group_tol:
                raise AmbiguousPortrait(
                    f"landing points {d:.2e} apart; grouping scale "
                    f"{group_tol:.0e} cannot separate them"
                )
    portrait = AnglePartition(aset, classes)

    if check_equivariance:
        images = aset.map(lambda u: u * 3)
        if all(u in aset for u in images):
            for c in portrait.classes:
                target = portrait.class_of(c[0] * 3)
                for u in c:
                    if u * 3 not in target:
                        raise AmbiguousPortrait(
                            "portrait not equivariant under tripling"
                        )
    return portrait


def periodic_points(f: CubicMap, q: int) -> np.ndarray:
    """Roots of f^q(z) = z by direct polynomial composition; small q only."""
    if q < 1 or q > 4:
        raise ValueError("periodic_points is intended for 1 <= q <= 4")
    a = complex(f.a)
    base = np.poly1d([1.0, 0.0, -3.0 * a * a, 2.0 * a ** 3 + f.v])
    comp = base
    for _ in range(q - 1):
        comp = np.poly1d(np.polyval(base, comp))
    eqn = comp - np.poly1d([1.0, 0.0])
    return np.roots(eqn)


# ----------------------------------------------- basin Boettcher coordinate

def basin_boettcher(f: CubicMap, z: complex, max_terms: int = 400) -> complex:
    """Boettcher coordinate of the superattracting fixed point a.

    Requires f(a) = a.  With h = z - a the local form is
    f(a + h) = a + 3 a h^2 (1 + h/(3a)), and

        beta(z) = 3a (z - a) * prod_n (1 + h_n/(3a))^(1/2^(n+1))

    satisfies beta(f(z)) = beta(z)^2 with beta(z) ~ 3a (z - a) near a.
    Returns 0 when the orbit hits a exactly.  Meaningful on the immediate
    basin; elsewhere the product may fail to settle, which raises.
    """
    a = complex(f.a)
    if a == 0:
        raise ValueError("marked critical point is degenerate at a = 0")
    if abs(f(a) - a) > 1e-12 * (1.0 + abs(f.v)):
        raise ValueError("a is not a fixed point of this map")
    h = complex(z) - a
    if h == 0:
        return 0.0j
    log_acc = 0.0j
    weight = 0.5
    for _ in range(max_terms):
        factor = 1.0 + h / (3.0 * a)
        if abs(factor) < 1e-14:
            return 0.0j  # lands exactly on a after finitely many steps
        term = weight * cmath.log(factor)
        log_acc += term
        if abs(term) < 1e-18:
            break
        if abs(h) > 1e8 * (1.0 + abs(a)):
            raise ValueError("orbit leaves the basin; coordinate undefined")
        h = 3.0 * a * h * h * factor
        weight *= 0.5
    else:
        raise ValueError("basin coordinate did not converge")
    return 3.0 * a * (complex(z) - a) * cmath.exp(log_acc)
