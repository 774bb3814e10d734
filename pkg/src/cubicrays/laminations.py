"""Chord laminations under angle doubling, and angle partitions.

The central object is the invariant lamination whose leaves join the pairs
of external angles that land together on the Julia set of z^2 - 1.  Its
leaves are generated from the fixed leaf {1/3, 2/3} by repeated pullback
under halving.  A pullback step has a binary choice of how to pair the four
preimage endpoints; the correct pairing groups endpoints lying in the same
half-circle cut by the chord {1/6, 2/3} (the two halving preimages of 1/3).
Unlinkedness of the result is verified, not assumed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .angles import Angle, AngleSet, basilica_index, in_open_arc

_CHORD_LO = Angle(1, 6)   # halving preimages of 1/3; both lie on the
_CHORD_HI = Angle(2, 3)   # boundary of the central gap of the lamination


@dataclass(frozen=True)
class Leaf:
    """An unordered chord of the circle with distinct rational endpoints."""

    a: Angle
    b: Angle

    def __post_init__(self):
        a, b = Angle(self.a), Angle(self.b)
        if a == b:
            raise ValueError("leaf endpoints must be distinct")
        if b < a:
            a, b = b, a
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def endpoints(self) -> Tuple[Angle, Angle]:
        return (self.a, self.b)

    def image(self) -> "Leaf":
        return Leaf(self.a * 2, self.b * 2)

    def __iter__(self):
        return iter((self.a, self.b))

    def __str__(self) -> str:
        return f"{{{self.a}, {self.b}}}"


def unlinked(l1: Leaf, l2: Leaf) -> bool:
    """True unless the chords strictly cross inside the disk.

    Shared endpoints never count as crossing.  l1 and l2 cross exactly when
    precisely one endpoint of l2 lies in the open arc (l1.a, l1.b).
    """
    shared = {l1.a, l1.b} & {l2.a, l2.b}
    if shared:
        return True
    in_arc = sum(1 for t in (l2.a, l2.b) if in_open_arc(t, l1.a, l1.b))
    return in_arc != 1


def _same_half(s: Angle, t: Angle) -> bool:
    # halves cut by the chord {1/6, 2/3}; endpoints of the chord never occur
    # among pullback endpoints except for the fixed leaf, handled separately
    return in_open_arc(s, _CHORD_LO, _CHORD_HI) == in_open_arc(t, _CHORD_LO, _CHORD_HI)


def _pull_back(leaf: Leaf) -> Tuple[Leaf, Leaf]:
    """The two halving preimages of a leaf, paired by half-circle."""
    a0 = Angle(leaf.a.frac / 2)
    a1 = a0 + Angle(1, 2)
    b0 = Angle(leaf.b.frac / 2)
    b1 = b0 + Angle(1, 2)
    for t in (a0, a1, b0, b1):
        if t in (_CHORD_LO, _CHORD_HI):
            # only the fixed leaf {1/3, 2/3} pulls back onto the chord
            raise ValueError(f"pullback endpoint {t} lies on the separating chord")
    if _same_half(a0, b0):
        return Leaf(a0, b0), Leaf(a1, b1)
    return Leaf(a0, b1), Leaf(a1, b0)


class LaminationError(Exception):
    pass


class Lamination:
    """A finite collection of pairwise unlinked leaves, graded by depth."""

    def __init__(self, generations: Sequence[Sequence[Leaf]]):
        self.generations = [tuple(g) for g in generations]
        self.leaves: Tuple[Leaf, ...] = tuple(
            leaf for gen in self.generations for leaf in gen
        )
        self._check_unlinked_fast()

    @property
    def depth(self) -> int:
        return len(self.generations) - 1

    def __iter__(self):
        return iter(self.leaves)

    def __len__(self) -> int:
        return len(self.leaves)

    def leaf_with_endpoint(self, t) -> Optional[Leaf]:
        t = Angle(t)
        for leaf in self.leaves:
            if t in (leaf.a, leaf.b):
                return leaf
        return None

    def _check_unlinked_fast(self) -> None:
        """Crossing check in O(n log n) by bracket matching around the circle.

        Walking the circle, a chord family is non-crossing iff every chord
        can close only when it is on top of the open-chord stack.  Endpoint
        collisions would break the walk and are rejected first.
        """
        events: List[Tuple[Angle, int]] = []
        for idx, leaf in enumerate(self.leaves):
            events.append((leaf.a, idx))
            events.append((leaf.b, idx))
        events.sort(key=lambda e: e[0].frac)
        for (t1, i1), (t2, i2) in zip(events, events[1:]):
            if t1 == t2 and i1 != i2:
                raise LaminationError(f"distinct leaves share the endpoint {t1}")
        stack: List[int] = []
        seen: Dict[int, bool] = {}
        for t, idx in events:
            if idx not in seen:
                seen[idx] = True
                stack.append(idx)
            else:
                if not stack or stack[-1] != idx:
                    raise LaminationError(
                        f"leaf {self.leaves[idx]} crosses another leaf"
                    )
                stack.pop()
        # circular crossing equals partial overlap of the [min, max] spans,
        # so a clean matching leaves nothing open
        if stack:
            raise LaminationError("unbalanced chord matching")

    def to_json(self, path=None) -> str:
        payload = {
            "depth": self.depth,
            "generations": [
                [[str(leaf.a), str(leaf.b)] for leaf in gen]
                for gen in self.generations
            ],
        }
        text = json.dumps(payload, indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_json(cls, text: str) -> "Lamination":
        payload = json.loads(text)
        gens = [
            [Leaf(Angle(a), Angle(b)) for a, b in gen]
            for gen in payload["generations"]
        ]
        return cls(gens)


def basilica_lamination(depth: int) -> Lamination:
    """Leaves of the doubling-invariant basilica lamination to a given depth.

    Generation 0 is the fixed leaf {1/3, 2/3}; generation 1 is its other
    preimage {1/6, 5/6}; generation k pulls back generation k-1.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    fixed = Leaf(Angle(1, 3), Angle(2, 3))
    gens: List[List[Leaf]] = [[fixed]]
    if depth >= 1:
        gens.append([Leaf(Angle(1, 6), Angle(5, 6))])
    for _ in range(2, depth + 1):
        nxt: List[Leaf] = []
        for leaf in gens[-1]:
            nxt.extend(_pull_back(leaf))
        gens.append(nxt)
    return Lamination(gens)


def basilica_partner(t) -> Angle:
    """The unique angle paired with t in the basilica lamination.

    Defined exactly for angles t with 2^n t = 1/3 mod 1 for some n; the
    partner shares a leaf with t and the pairing is an involution.
    """
    t = Angle(t)
    n = basilica_index(t)
    if n is None:
        raise ValueError(f"{t} is not an angle of the basilica lamination")
    if t == Angle(1, 3):
        return Angle(2, 3)
    if t == Angle(2, 3):
        return Angle(1, 3)
    if t == Angle(1, 6):
        return Angle(5, 6)
    if t == Angle(5, 6):
        return Angle(1, 6)
    up = basilica_partner(t * 2)
    c0 = Angle(up.frac / 2)
    c1 = c0 + Angle(1, 2)
    if _same_half(t, c0):
        return c0
    return c1


# ---------------------------------------------------------------- partitions

class AnglePartition:
    """A partition of a finite angle set into unordered classes."""

    def __init__(self, ground: Iterable, classes: Iterable[Iterable]):
        self.ground = AngleSet(ground)
        cl = [AngleSet(c) for c in classes]
        cl = [c for c in cl if len(c) > 0]
        cl.sort(key=lambda c: c[0].frac)
        self.classes: Tuple[AngleSet, ...] = tuple(cl)
        union: List[Angle] = []
        for c in self.classes:
            union.extend(c)
        if AngleSet(union) != self.ground or sum(len(c) for c in self.classes) != len(
            self.ground
        ):
            raise ValueError("classes must partition the ground set")

    @classmethod
    def discrete(cls, ground: Iterable) -> "AnglePartition":
        g = AngleSet(ground)
        return cls(g, [[t] for t in g])

    def class_of(self, t) -> AngleSet:
        t = Angle(t)
        for c in self.classes:
            if t in c:
                return c
        raise KeyError(f"{t} not in ground set")

    def merge(self, angles: Iterable) -> "AnglePartition":
        """Partition with the classes of the given angles fused into one."""
        targets = [Angle(t) for t in angles]
        fused: List[Angle] = []
        rest: List[AngleSet] = []
        for c in self.classes:
            if any(t in c for t in targets):
                fused.extend(c)
            else:
                rest.append(c)
        return AnglePartition(self.ground, rest + [fused])

    def apply(self, fn) -> "AnglePartition":
        return AnglePartition(
            self.ground.map(fn), [c.map(fn) for c in self.classes]
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnglePartition):
            return NotImplemented
        return self.ground == other.ground and self.classes == other.classes

    def __hash__(self):
        return hash((self.ground, self.classes))

    def __repr__(self) -> str:
        body = ", ".join(
            "{" + ", ".join(str(t) for t in c) + "}" for c in self.classes
        )
        return f"AnglePartition[{body}]"

    def to_json(self, path=None) -> str:
        payload = {
            "ground": [str(t) for t in self.ground],
            "classes": [[str(t) for t in c] for c in self.classes],
        }
        text = json.dumps(payload, indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_json(cls, text: str) -> "AnglePartition":
        payload = json.loads(text)
        return cls(
            [Angle(t) for t in payload["ground"]],
            [[Angle(t) for t in c] for c in payload["classes"]],
        )


def is_subpartition(p: AnglePartition, q: AnglePartition) -> bool:
    """True when every class of p is contained in some class of q."""
    if p.ground != q.ground:
        raise ValueError("partitions compare only over the same ground set")
    for c in p.classes:
        holder = q.class_of(c[0])
        if any(t not in holder for t in c):
            return False
    return True


# ------------------------------------------------- predicted transfer merge

_W_INTERVALS = (
    (Angle(1, 24), Angle(2, 24)),
    (Angle(10, 24), Angle(11, 24)),
    (Angle(13, 24), Angle(14, 24)),
    (Angle(22, 24), Angle(23, 24)),
)

_PERIOD_TWO_CYCLES = (
    (Angle(1, 8), Angle(3, 8)),
    (Angle(2, 8), Angle(6, 8)),
    (Angle(5, 8), Angle(7, 8)),
)


def alpha_pairs_for_angle(t) -> Tuple[Tuple[Angle, Angle], ...]:
    """Tripling two-cycles landing at the distinguished fixed point.

    For a parameter angle t (not coperiodic of coperiod two) these are the
    two-cycles whose angles both lie in the open arc (t - 1/3, t + 1/3):
    one cycle generically, two when t lies in a four-ray sector.
    """
    t = Angle(t)
    lo, hi = t - Angle(1, 3), t + Angle(1, 3)
    out = tuple(
        cyc
        for cyc in _PERIOD_TWO_CYCLES
        if in_open_arc(cyc[0], lo, hi) and in_open_arc(cyc[1], lo, hi)
    )
    if len(out) not in (1, 2):
        raise ValueError(f"unexpected two-cycle selection for angle {t}")
    return out


def in_w_interval(t) -> bool:
    t = Angle(t)
    return any(in_open_arc(t, lo, hi) for lo, hi in _W_INTERVALS)


def predicted_psi_portrait(p: AnglePartition, q: int, t) -> AnglePartition:
    """Expected landing partition after transfer between the escape regions.

    For q != 2 the partition is unchanged.  For q = 2 the classes of the
    angles that land at the distinguished fixed point merge: one two-cycle
    away from the four-ray sectors, both two-cycles (four angles) inside.
    """
    t = Angle(t)
    if q != 2:
        return p
    from .angles import coperiod_status

    if coperiod_status(t, 2) != "none":
        raise ValueError(f"transfer undefined on the coperiod-two ray {t}")
    pairs = alpha_pairs_for_angle(t)
    if in_w_interval(t):
        if len(pairs) != 2:
            raise ValueError(f"expected two cycles inside a four-ray sector at {t}")
        return p.merge([a for pair in pairs for a in pair])
    if len(pairs) != 1:
        raise ValueError(f"expected a single two-cycle at {t}")
    return p.merge(pairs[0])
