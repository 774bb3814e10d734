"""Tessellations of the escape regions by coperiodic parameter rays.

The coperiod-q parameter rays of an escape region land at parabolic
parameters, and they land in clusters: almost always two rays to a
landing point, occasionally four.  The landed ray system cuts the
region into finitely many faces, and on each face the orbit portrait of
the period-q dynamical rays is constant, so a face is adequately
described by the circular arcs of ray angles it spans.

One slice can carry two escape regions whose rays land on common
parabolic parameters.  A cluster whose vertex also receives the sibling
region's rays separates its two flanks for good: the cut continues
through the sibling region to the other end of the slice.  A private
vertex does not, and the sectors on either side of its wake belong to
one face, connected around the wake through the connectedness locus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .angles import (
    Angle,
    arc_length,
    coperiodic_angles,
    in_open_arc,
    periodic_angles,
)
from .dynamics import orbit_portrait
from .laminations import AnglePartition, is_subpartition
from .slices import SlicePoint, param_from_coords, trace_parameter_ray


class TessellationError(Exception):
    pass


# ----------------------------------------------------- co-landing clusters

@dataclass(frozen=True)
class Colanding:
    """Coperiod-q parameter rays of a region grouped by landing point.

    clusters holds index tuples into angles; vertices the shared polished
    landing parameter of each cluster; kinds the parabolic type of each
    landing as (cycle length, multiplier).  Rays whose landing refinement
    failed are reported in unresolved and belong to no cluster.
    """

    region: str
    q: int
    tol: float
    angles: Tuple[Angle, ...]
    clusters: Tuple[Tuple[int, ...], ...]
    vertices: Tuple[SlicePoint, ...]
    cycle_points: Tuple[complex, ...]
    kinds: Tuple[Tuple[int, complex], ...]
    unresolved: Tuple[int, ...]

    @property
    def pairs(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(c for c in self.clusters if len(c) == 2)

    @property
    def large_clusters(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(c for c in self.clusters if len(c) > 2)

    @property
    def unpaired(self) -> Tuple[int, ...]:
        return tuple(c[0] for c in self.clusters if len(c) == 1)

    def cluster_angles(self, k: int) -> Tuple[Angle, ...]:
        return tuple(self.angles[i] for i in self.clusters[k])


def colanding_pairs(region: str, q: int, tol: float = 1e-6) -> Colanding:
    """Trace every coperiod-q ray of the region and group by landing.

    Landings are refined onto exact parabolic parameters before grouping,
    so tol only has to absorb refinement residuals, not the slow parabolic
    approach of the raw trace.  Landing points closer than 10 * tol that
    did not group are an ambiguity error rather than a silent split.
    """
    if q < 1:
        raise ValueError("coperiod must be at least 1")
    angles = sorted(coperiodic_angles(q), key=lambda t: t.frac)
    landings: Dict[int, Tuple[SlicePoint, complex, Tuple[int, complex]]] = {}
    unresolved: List[int] = []
    for i, t in enumerate(angles):
        try:
            tr = trace_parameter_ray(region, t, polish=("parabolic", q))
        except RuntimeError:
            unresolved.append(i)
            continue
        _, ell, lam = tr.landing_kind
        landings[i] = (tr.landing, tr.landing_aux, (ell, lam))

    clusters: List[List[int]] = []
    reps: List[complex] = []
    for i in sorted(landings):
        z = complex(landings[i][0].a)
        hit = None
        for k, r in enumerate(reps):
            if abs(z - r) < tol:
                hit = k
                break
        if hit is None:
            clusters.append([i])
            reps.append(z)
        else:
            clusters[hit].append(i)
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            d = abs(reps[i] - reps[j])
            if d < 10 * tol:
                raise TessellationError(
                    f"co-landing points {d:.2e} apart; tolerance {tol:.0e} "
                    "cannot separate them")

    clusters.sort(key=lambda c: c[0])
    return Colanding(
        region=region,
        q=q,
        tol=tol,
        angles=tuple(angles),
        clusters=tuple(tuple(c) for c in clusters),
        vertices=tuple(landings[c[0]][0] for c in clusters),
        cycle_points=tuple(landings[c[0]][1] for c in clusters),
        kinds=tuple(landings[c[0]][2] for c in clusters),
        unresolved=tuple(unresolved),
    )


def compare_pairings(left: Colanding, right: Colanding) -> dict:
    """How two regions' co-landing structures agree on common angles.

    Pairs whose angles appear in clusters of size two on both sides must
    match exactly; clusters of any other size are collected as exceptions
    together with whether the partner side's pairs refine them (a large
    cluster on one side splitting into pairs on the other).
    """
    if left.angles != right.angles:
        raise ValueError("pairings compare only over the same angle set")

    def pair_set(col: Colanding):
        return {frozenset(col.cluster_angles(k))
                for k, c in enumerate(col.clusters) if len(c) == 2}

    def exceptional(col: Colanding):
        return [frozenset(col.cluster_angles(k))
                for k, c in enumerate(col.clusters) if len(c) != 2]

    lp, rp = pair_set(left), pair_set(right)
    le, re = exceptional(left), exceptional(right)
    exc_angles = set().union(*le, *re) if (le or re) else set()
    lp_clean = {p for p in lp if not (p & exc_angles)}
    rp_clean = {p for p in rp if not (p & exc_angles)}
    refined = all(
        any(p <= big for p in (lp | rp)) or len(big) == 1
        for big in le + re
    ) if (le or re) else True
    refines = []
    for big in le + re:
        covering = [sorted(p) for p in (lp | rp) if p <= big]
        refines.append({"cluster": sorted(big), "partner_pairs": covering})
    return {
        "pairs_agree": lp_clean == rp_clean,
        "common_pairs": sorted(sorted(p) for p in lp_clean & rp_clean),
        "only_left": sorted(sorted(p) for p in lp_clean - rp_clean),
        "only_right": sorted(sorted(p) for p in rp_clean - lp_clean),
        "exceptions": refines,
        "exceptions_refined_by_pairs": refined,
    }


# ------------------------------------------------------------------- faces

@dataclass(frozen=True)
class Face:
    """A complementary region of the landed ray system.

    arcs are the circular angle intervals in which the face meets the
    circle at infinity; chain is the nesting stack of (cluster index,
    rays crossed) identifying the face, empty for the face containing
    angle zero.
    """

    index: int
    arcs: Tuple[Tuple[Angle, Angle], ...]
    chain: Tuple[Tuple[int, int], ...]

    @property
    def depth(self) -> int:
        return len(self.chain)

    def contains(self, t) -> bool:
        t = Angle(t)
        return any(in_open_arc(t, lo, hi) for lo, hi in self.arcs)

    @property
    def longest_arc(self) -> Tuple[Angle, Angle]:
        return max(self.arcs, key=lambda ar: arc_length(ar[0], ar[1]))

    def inside_cluster(self, k: int) -> bool:
        return any(c == k for c, _ in self.chain)


@dataclass(frozen=True)
class Wake:
    """The part of the circle cut off behind one co-landing cluster."""

    bounding: Tuple[Angle, ...]
    root: SlicePoint
    face_indices: Tuple[int, ...]


@dataclass(frozen=True)
class Tessellation:
    """Faces cut from an escape region by its coperiod-q rays.

    separating flags the clusters whose vertex also receives rays from
    the sibling escape region of the same slice; those cuts disconnect
    their two flanks, private ones do not.
    """

    region: str
    q: int
    colanding: Colanding
    faces: Tuple[Face, ...]
    separating: Tuple[bool, ...] = ()

    @property
    def edges(self) -> Tuple[Angle, ...]:
        return self.colanding.angles

    @property
    def pairing(self) -> Tuple[Tuple[int, ...], ...]:
        return self.colanding.clusters

    @property
    def vertices(self) -> Tuple[SlicePoint, ...]:
        return self.colanding.vertices

    def face_of(self, t) -> Face:
        t = Angle(t)
        if t in set(self.edges):
            raise ValueError(f"{t} lies on a coperiodic ray, not in a face")
        for face in self.faces:
            if face.contains(t):
                return face
        raise RuntimeError("angle escaped the face cover")  # unreachable

    def wakes(self) -> Tuple[Wake, ...]:
        out = []
        for k, c in enumerate(self.pairing):
            if len(c) < 2:
                continue
            out.append(Wake(
                bounding=self.colanding.cluster_angles(k),
                root=self.vertices[k],
                face_indices=tuple(f.index for f in self.faces
                                   if f.inside_cluster(k)),
            ))
        return tuple(out)

    def to_json(self, path=None) -> str:
        col = self.colanding
        payload = {
            "region": self.region,
            "q": self.q,
            "edges": [str(t) for t in col.angles],
            "pairing": [list(c) for c in col.clusters],
            "vertices": [pt.to_json() for pt in col.vertices],
            "kinds": [[ell, [lam.real, lam.imag]] for ell, lam in col.kinds],
            "unresolved": list(col.unresolved),
            "separating": list(self.separating),
            "faces": [
                {"index": f.index,
                 "arcs": [[str(lo), str(hi)] for lo, hi in f.arcs],
                 "chain": [list(link) for link in f.chain]}
                for f in self.faces
            ],
        }
        text = json.dumps(payload, indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _shared_flags(
    col: Colanding,
    sibling: Optional[Colanding],
    tol: float,
) -> Tuple[bool, ...]:
    """Which of col's vertices also receive the sibling region's rays."""
    if sibling is None:
        return tuple(False for _ in col.clusters)
    sib = [(complex(pt.a), complex(pt.v)) for pt in sibling.vertices]
    flags = []
    for pt in col.vertices:
        a, v = complex(pt.a), complex(pt.v)
        flags.append(any(abs(a - a2) < tol and abs(v - v2) < tol
                         for a2, v2 in sib))
    return tuple(flags)


def _assemble_faces(
    col: Colanding,
    separating: Tuple[bool, ...],
) -> Tuple[Face, ...]:
    """Cut the circle by the co-landing clusters, walking once around.

    The sweep groups arcs by their nesting chain, then decides which
    consecutive arcs of a group belong to one face.  Two arcs flanking a
    private cluster connect around its wake, so they glue; a separating
    cluster's cut continues through the sibling region and keeps its
    flanks apart.  Groups close up circularly: the depth-zero group
    wraps through the basepoint, a wake-interior group wraps around the
    near side of its own vertex, below anything nested.

    Private clusters of size one cut nothing and are skipped; a
    separating singleton still splits its two flanks.  A cluster
    interleaving with another is a crossing, which the landing geometry
    forbids; it is reported rather than tolerated.
    """
    events: List[Tuple[Angle, int, bool]] = []
    sizes: Dict[int, int] = {}
    for k, c in enumerate(col.clusters):
        if len(c) >= 2:
            sizes[k] = len(c)
            for i in c:
                events.append((col.angles[i], k, True))
        elif separating[k]:
            events.append((col.angles[c[0]], k, False))
    events.sort(key=lambda e: e[0].frac)
    if not events:
        raise TessellationError("no co-landing clusters to cut faces with")

    stack: List[Tuple[int, int]] = []
    open_set: Dict[int, int] = {}
    Chain = Tuple[Tuple[int, int], ...]
    # per chain, in sweep order: [arc, cluster hanging after it or None]
    groups: Dict[Chain, List[List]] = {}
    pending: Optional[Tuple[Chain, int]] = None
    for idx, (t, k, multi) in enumerate(events):
        opens = not multi or k not in open_set
        if pending is not None and opens:
            ch, pos = pending
            groups[ch][pos][1] = k
        if multi:
            if k in open_set:
                if not stack or stack[-1][0] != k:
                    raise TessellationError(
                        f"clusters {stack[-1][0]} and {k} interleave on the "
                        "circle: co-landing rays cross")
                seen = open_set[k] + 1
                if seen == sizes[k]:
                    stack.pop()
                    del open_set[k]
                else:
                    stack[-1] = (k, seen)
                    open_set[k] = seen
            else:
                stack.append((k, 1))
                open_set[k] = 1
        lo = t
        hi = events[(idx + 1) % len(events)][0]
        ch = tuple(stack)
        groups.setdefault(ch, []).append([(lo, hi), None])
        pending = (ch, len(groups[ch]) - 1)
    if stack:
        raise TessellationError("a cluster wraps the basepoint inconsistently")
    # the final arc wraps to the first event, which always opens
    ch, pos = pending
    groups[ch][pos][1] = events[0][1]

    faces = []
    for ch, entries in groups.items():
        m = len(entries)
        cuts = [i for i in range(m)
                if entries[i][1] is not None and separating[entries[i][1]]]
        if not cuts:
            faces.append((tuple(e[0] for e in entries), ch))
            continue
        for j, c in enumerate(cuts):
            start = (c + 1) % m
            span = (cuts[(j + 1) % len(cuts)] - start) % m + 1
            run = tuple(entries[(start + x) % m][0] for x in range(span))
            faces.append((run, ch))

    faces.sort(key=lambda f: (len(f[1]), f[0][0][0].frac))
    return tuple(Face(index=i, arcs=arcs, chain=ch)
                 for i, (arcs, ch) in enumerate(faces))


_SIBLING = {"E2B": "E2D", "E2D": "E2B"}


def build_faces(
    region: str,
    q: int,
    tol: float = 1e-6,
    sibling: Optional[Colanding] = None,
    colanding: Optional[Colanding] = None,
) -> Tessellation:
    """Tessellate an escape region by its coperiod-q parameter rays.

    For the two regions sharing a slice the sibling's co-landing data is
    computed as well (or passed in, to reuse across builds): vertices hit
    from both regions separate their flanking sectors, private ones do
    not, and the face decomposition depends on knowing which is which.
    The region's own co-landing data can be passed the same way.
    """
    if colanding is not None and (colanding.region != region
                                  or colanding.q != q):
        raise ValueError("colanding data does not match the requested build")
    col = colanding if colanding is not None else colanding_pairs(
        region, q, tol)
    sib_name = _SIBLING.get(region)
    if sibling is None and sib_name is not None:
        sibling = colanding_pairs(sib_name, q, tol)
    separating = _shared_flags(col, sibling, tol)
    return Tessellation(region=region, q=q, colanding=col,
                        faces=_assemble_faces(col, separating),
                        separating=separating)


# -------------------------------------------------------- face portraits

_SAMPLE_PLAN: Tuple[Tuple[Fraction, float], ...] = (
    (Fraction(1, 2), 2.0),
    (Fraction(1, 4), 1.5),
    (Fraction(3, 4), 4.0),
    (Fraction(1, 4), 4.0),
    (Fraction(3, 4), 1.5),
    (Fraction(3, 8), 2.0),
    (Fraction(5, 8), 2.0),
    (Fraction(1, 8), 1.5),
    (Fraction(7, 8), 4.0),
)


def face_portrait(
    tess: Tessellation,
    face: Face,
    q: Optional[int] = None,
    samples: int = 5,
    tol: float = 1e-6,
) -> AnglePartition:
    """The period-q dynamical-ray portrait shared by a face's parameters.

    Samples the face at several distinct angles and potentials, spreading
    the samples over all of the face's arcs; sample angles lie strictly
    inside an arc, which keeps them away from coperiodic angles, so no
    portrait ray can crash on a precritical point.  Disagreement between
    samples is a falsification finding and raises rather than averaging.
    """
    if q is None:
        q = tess.q
    if q != tess.q:
        raise ValueError("portrait period must match the tessellation")
    if samples < 1 or samples > len(_SAMPLE_PLAN):
        raise ValueError(f"samples must be in 1..{len(_SAMPLE_PLAN)}")
    ground = periodic_angles(q)

    seen: List[Tuple[Tuple[float, Angle], AnglePartition]] = []
    for i, (frac_pos, rho) in enumerate(_SAMPLE_PLAN[:samples]):
        lo, hi = face.arcs[i % len(face.arcs)]
        span = arc_length(lo, hi)
        t = Angle(lo.frac + span * frac_pos)
        pt = param_from_coords(tess.region, rho, t)
        portrait = orbit_portrait(pt.map, ground, tol=tol)
        seen.append(((rho, t), portrait))
    base = seen[0][1]
    for (coords, portrait) in seen[1:]:
        if portrait != base:
            raise TessellationError(
                "portrait_varies_in_face: "
                f"face {face.index} of ({tess.region}, q={tess.q}) gave "
                f"{base} at {seen[0][0]} but {portrait} at {coords}")
    return base


def monotonicity_probe(
    region: str,
    theta,
    q: int,
    tol: float = 1e-6,
    tess: Optional[Tessellation] = None,
    samples: int = 5,
) -> dict:
    """Compare the face portraits on the two sides of a coperiodic ray.

    The inward side is the face behind the ray's co-landing cluster (its
    wake side); the relation states how the portrait changes when
    crossing inward: "larger" when the outward portrait is a strict
    subpartition of the inward one, "smaller" for the reverse, "equal",
    or "incomparable".  Which bounding ray of the wake is the primary one
    is not distinguished here; the side itself is determined by the
    nesting chain, noted in the labeling field.
    """
    theta = Angle(theta)
    if tess is None:
        tess = build_faces(region, q, tol)
    if tess.region != region or tess.q != q:
        raise ValueError("tessellation does not match the probe request")
    try:
        edge_index = tess.edges.index(theta)
    except ValueError:
        raise ValueError(f"{theta} is not a coperiod-{q} angle") from None
    cluster_index = next(
        (k for k, c in enumerate(tess.pairing) if edge_index in c), None)
    if cluster_index is None or len(tess.pairing[cluster_index]) < 2:
        raise TessellationError(
            f"ray {theta} landed alone or unresolved; it bounds no wake")

    after = before = None
    for face in tess.faces:
        for lo, hi in face.arcs:
            if lo == theta:
                after = face
            if hi == theta:
                before = face
    assert after is not None and before is not None
    in_after = after.inside_cluster(cluster_index)
    in_before = before.inside_cluster(cluster_index)
    if in_after == in_before:
        # both sides sit inside the cluster: theta is an interior edge of
        # a larger cluster; take the deeper chain as inward
        inward, outward = ((after, before)
                           if after.chain >= before.chain else (before, after))
        side_note = "interior edge of a large cluster; inward by chain depth"
    else:
        inward, outward = (after, before) if in_after else (before, after)
        side_note = "wake side by nesting chain"

    p_in = face_portrait(tess, inward, samples=samples, tol=tol)
    p_out = face_portrait(tess, outward, samples=samples, tol=tol)
    if p_in == p_out:
        relation = "equal"
    elif is_subpartition(p_out, p_in):
        relation = "larger"
    elif is_subpartition(p_in, p_out):
        relation = "smaller"
    else:
        relation = "incomparable"
    return {
        "edge": theta,
        "relation": relation,
        "inward_face": inward.index,
        "outward_face": outward.index,
        "inward_portrait": p_in,
        "outward_portrait": p_out,
        "labeling": side_note,
    }
