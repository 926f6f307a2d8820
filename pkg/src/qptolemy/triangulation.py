"""Labeled ideal triangulations stored as oriented triangle triples.

Each triangle is a triple of side labels listed counter-clockwise.  Arc labels
are ``1..n``; each arc fills exactly two sides.  Bordered fixtures also carry
boundary edges labeled ``-1..-b`` that fill a single side and are never
flipped or permuted.  Gluing along an arc is always orientation reversing, so
every triple list describes an oriented surface.

Side ``k`` of a triangle runs from corner ``k`` to corner ``k + 1``.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    FlipOnSelfFoldedArc,
    InvalidTriangulation,
    PermutationOutOfRange,
    UnknownArc,
)
from .perm import Perm

# Orientation of the per-triangle adjacency sign: for a counter-clockwise
# triple (a, b, c), eps(a, b) = eps(b, c) = eps(c, a) = EPSILON_SIGN.
# Calibrated against cross-ratios in tests/test_shear.py.
EPSILON_SIGN = 1

Triple = tuple[int, int, int]


def _rotate_min(tri: Triple) -> Triple:
    k = tri.index(min(tri))
    return tri[k:] + tri[:k]


@dataclass(frozen=True)
class Triangulation:
    triangles: tuple[Triple, ...]
    genus: int | None = None
    punctures: int | None = None
    boundary: int = 0
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        tris = tuple(tuple(int(x) for x in t) for t in self.triangles)
        object.__setattr__(self, "triangles", tris)
        if self.validate:
            check_triangulation(self)

    # -- basic structure -------------------------------------------------

    @cached_property
    def n_arcs(self) -> int:
        return sum(1 for t in self.triangles for x in t if x > 0) // 2

    @property
    def arcs(self) -> range:
        return range(1, self.n_arcs + 1)

    @cached_property
    def slots(self) -> dict[int, tuple[tuple[int, int], ...]]:
        """Map label -> the (triangle, side) positions it occupies."""
        out: dict[int, list[tuple[int, int]]] = {}
        for i, tri in enumerate(self.triangles):
            for k, x in enumerate(tri):
                out.setdefault(x, []).append((i, k))
        return {x: tuple(v) for x, v in out.items()}

    def triangles_of(self, a: int) -> tuple[int, ...]:
        self._check_arc(a)
        return tuple(i for i, _ in self.slots[a])

    def is_self_folded(self, a: int) -> bool:
        (i, _), (j, _) = self.slots[a]
        return i == j

    @cached_property
    def vertices(self) -> dict[tuple[int, int], int]:
        """Map each corner (triangle, k) to a vertex index."""
        parent = {(i, k): (i, k) for i in range(len(self.triangles)) for k in range(3)}

        def find(c):
            while parent[c] != c:
                parent[c] = parent[parent[c]]
                c = parent[c]
            return c

        def union(c, d):
            rc, rd = find(c), find(d)
            if rc != rd:
                parent[rc] = rd

        for x, pos in self.slots.items():
            if x < 0:
                continue
            (i, k), (j, m) = pos
            union((i, k), (j, (m + 1) % 3))
            union((i, (k + 1) % 3), (j, m))
        roots: dict[tuple[int, int], int] = {}
        out = {}
        for c in sorted(parent):
            r = find(c)
            out[c] = roots.setdefault(r, len(roots))
        return out

    @property
    def n_vertices(self) -> int:
        return len(set(self.vertices.values()))

    def endpoints(self, a: int) -> frozenset[int]:
        i, k = self.slots[a][0]
        return frozenset({self.vertices[(i, k)], self.vertices[(i, (k + 1) % 3)]})

    def boundary_components(self) -> int:
        # follow boundary edges head-to-tail through their shared vertex
        succ = {}
        heads = {}
        for x, ((i, k),) in ((x, p) for x, p in self.slots.items() if x < 0):
            tail = self.vertices[(i, k)]
            head = self.vertices[(i, (k + 1) % 3)]
            heads[x] = head
            succ.setdefault(tail, []).append(x)
        seen: set[int] = set()
        comps = 0
        for x in heads:
            if x in seen:
                continue
            comps += 1
            stack = [x]
            while stack:
                y = stack.pop()
                if y in seen:
                    continue
                seen.add(y)
                stack.extend(succ.get(heads[y], []))
        return comps

    def euler_characteristic(self) -> int:
        return self.n_vertices - (self.n_arcs + self.boundary) + len(self.triangles)

    def _check_arc(self, a: int) -> None:
        if type(a) is int and 1 <= a <= self.n_arcs:
            return
        if not (isinstance(a, (int, np.integer)) and 1 <= a <= self.n_arcs):
            raise UnknownArc(f"arc {a} not in 1..{self.n_arcs}")

    # -- comparison ------------------------------------------------------

    @cached_property
    def canonical(self) -> tuple[Triple, ...]:
        return tuple(sorted(_rotate_min(t) for t in self.triangles))

    def __eq__(self, other):
        if not isinstance(other, Triangulation):
            return NotImplemented
        return self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    def with_triangles(self, triangles) -> "Triangulation":
        return Triangulation(tuple(triangles), self.genus, self.punctures, self.boundary, validate=False)

    def _derive(self, triangles: tuple[Triple, ...], slots: dict) -> "Triangulation":
        """Unvalidated copy with new triangles and a precomputed slot map."""
        T = object.__new__(Triangulation)
        T.__dict__.update(
            triangles=triangles,
            genus=self.genus,
            punctures=self.punctures,
            boundary=self.boundary,
            validate=False,
            n_arcs=self.n_arcs,
            slots=slots,
        )
        return T

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        d = {"arcs": self.n_arcs, "triangles": [list(t) for t in self.triangles]}
        if self.genus is not None:
            d["genus"] = self.genus
        if self.punctures is not None:
            d["punctures"] = self.punctures
        if self.boundary:
            d["boundary"] = self.boundary
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Triangulation":
        if "triangles" not in d:
            raise InvalidTriangulation("missing 'triangles'")
        tris = []
        for idx, t in enumerate(d["triangles"]):
            if not isinstance(t, list) or len(t) != 3 or not all(isinstance(x, int) for x in t):
                raise InvalidTriangulation(f"expected three integer labels, got {t!r}", idx)
            tris.append(tuple(t))
        T = cls(tuple(tris), d.get("genus"), d.get("punctures"), d.get("boundary", 0))
        if "arcs" in d and d["arcs"] != T.n_arcs:
            raise InvalidTriangulation(f"declared {d['arcs']} arcs, found {T.n_arcs}")
        return T

    @classmethod
    def load(cls, path: str | Path) -> "Triangulation":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def dump(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)


def check_triangulation(T: Triangulation) -> None:
    """Raise :class:`InvalidTriangulation` naming the first violated invariant."""
    tris = T.triangles
    if not tris:
        raise InvalidTriangulation("no triangles")
    counts: Counter[int] = Counter()
    for idx, tri in enumerate(tris):
        if len(tri) != 3:
            raise InvalidTriangulation("a triangle has exactly three sides", idx)
        for x in tri:
            if x == 0:
                raise InvalidTriangulation("label 0 is not allowed", idx)
            counts[x] += 1
            if x > 0 and counts[x] > 2:
                raise InvalidTriangulation(f"arc {x} occupies more than two sides", idx)
            if x < 0 and counts[x] > 1:
                raise InvalidTriangulation(f"boundary edge {x} occupies more than one side", idx)
    arcs = sorted(x for x in counts if x > 0)
    for idx, tri in enumerate(tris):
        for x in tri:
            if x > 0 and counts[x] != 2:
                raise InvalidTriangulation(f"arc {x} occupies only one side", idx)
    if arcs != list(range(1, len(arcs) + 1)):
        raise InvalidTriangulation(f"arc labels are not contiguous 1..n: {arcs}")
    bd = sorted((x for x in counts if x < 0), reverse=True)
    if bd != list(range(-1, -len(bd) - 1, -1)):
        raise InvalidTriangulation(f"boundary labels are not contiguous -1..-b: {bd}")
    if len(bd) != T.boundary:
        raise InvalidTriangulation(f"declared {T.boundary} boundary edges, found {len(bd)}")
    n = len(arcs)
    if 3 * len(tris) != 2 * n + len(bd):
        raise InvalidTriangulation("side count does not match arc count")

    # connectivity of the dual graph
    adj: dict[int, set[int]] = {i: set() for i in range(len(tris))}
    for x, pos in T.slots.items():
        if x > 0:
            (i, _), (j, _) = pos
            adj[i].add(j)
            adj[j].add(i)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in adj[i] - seen:
            seen.add(j)
            stack.append(j)
    if len(seen) != len(tris):
        missing = min(set(range(len(tris))) - seen)
        raise InvalidTriangulation("surface is not connected", missing)

    if T.boundary == 0 and T.genus is not None and T.punctures is not None:
        g, s = T.genus, T.punctures
        if n != 6 * g - 6 + 3 * s:
            raise InvalidTriangulation(f"expected {6 * g - 6 + 3 * s} arcs for genus {g} with {s} punctures, found {n}")
        if len(tris) != 4 * g - 4 + 2 * s:
            raise InvalidTriangulation(f"expected {4 * g - 4 + 2 * s} triangles, found {len(tris)}")
        if T.n_vertices != s:
            raise InvalidTriangulation(f"expected {s} punctures, gluing has {T.n_vertices}")
    elif T.boundary and T.genus is not None:
        b = T.boundary_components()
        if T.euler_characteristic() != 2 - 2 * T.genus - b:
            raise InvalidTriangulation(
                f"Euler characteristic {T.euler_characteristic()} does not match genus {T.genus} with {b} boundary components"
            )
        if T.punctures is not None and T.n_vertices != T.punctures:
            raise InvalidTriangulation(f"expected {T.punctures} marked points, gluing has {T.n_vertices}")


# -- operations ------------------------------------------------------------


def build_standard(genus: int, punctures: int) -> Triangulation:
    """A triangulation of the closed genus-``genus`` surface with ``punctures`` punctures.

    Genus ``g >= 1`` starts from the fan-triangulated ``4g``-gon with the
    usual side pairing; genus zero starts from the doubled triangle.  Extra
    punctures are added by starring a triangle.
    """
    g, s = int(genus), int(punctures)
    if g < 0 or s < 1 or 6 * g - 6 + 3 * s <= 0:
        raise ValueError(f"no ideal triangulation for genus {g} with {s} punctures")
    if g == 0:
        if s < 3:
            raise ValueError("the sphere needs at least three punctures")
        tris = [(1, 2, 3), (3, 2, 1)]
        base = 3
    else:
        m = 4 * g
        sides = []
        for i in range(g):
            a, b = 2 * i + 1, 2 * i + 2
            sides += [a, b, a, b]
        nxt = 2 * g + 1
        diag = {1: sides[0], m - 1: sides[m - 1]}
        for k in range(2, m - 1):
            diag[k] = nxt
            nxt += 1
        tris = [(diag[k], sides[k], diag[k + 1]) for k in range(1, m - 1)]
        base = 1
    n = max(max(t) for t in tris)
    for _ in range(s - base):
        a, b, c = tris.pop(0)
        x, y, z = n + 1, n + 2, n + 3
        n += 3
        # star the first triangle: new vertex joined to its three corners
        tris += [(a, y, x), (b, z, y), (c, x, z)]
    return Triangulation(tuple(tris), g, s)


def flip(T: Triangulation, a: int) -> Triangulation:
    """Replace arc ``a`` by the other diagonal of its quadrilateral, keeping its label."""
    T._check_arc(a)
    slots = T.slots
    (i, k), (j, m) = slots[a]
    if i == j:
        raise FlipOnSelfFoldedArc(f"arc {a} has both sides on triangle {i}")
    t1, t2 = T.triangles[i], T.triangles[j]
    x, y = t1[(k + 1) % 3], t1[(k + 2) % 3]
    z, w = t2[(m + 1) % 3], t2[(m + 2) % 3]
    new_i, new_j = (a, y, z), (a, w, x)
    tris = list(T.triangles)
    tris[i] = new_i
    tris[j] = new_j
    # only the labels on the two rewritten triangles move
    new_slots = dict(slots)
    for lbl in {a, x, y, z, w}:
        new_slots[lbl] = [p for p in slots[lbl] if p[0] != i and p[0] != j]
    for idx, tri in ((i, new_i), (j, new_j)):
        for side, lbl in enumerate(tri):
            new_slots[lbl].append((idx, side))
    for lbl in {a, x, y, z, w}:
        new_slots[lbl] = tuple(sorted(new_slots[lbl]))
    return T._derive(tuple(tris), new_slots)


def apply_permutation(T: Triangulation, p: Perm) -> Triangulation:
    """Relabel every arc ``x`` as ``p(x)``."""
    n = T.n_arcs
    for x in p.support():
        if not 1 <= x <= n:
            raise PermutationOutOfRange(f"permutation moves {x}, outside 1..{n}")
    if p.is_identity():
        return T
    m = p.mapping
    tris = tuple(tuple(m.get(x, x) for x in t) for t in T.triangles)
    return T._derive(tris, {m.get(x, x): v for x, v in T.slots.items()})


def labeled_equal(T1: Triangulation, T2: Triangulation) -> bool:
    return T1.canonical == T2.canonical


def epsilon(T: Triangulation) -> np.ndarray:
    """Antisymmetric adjacency matrix indexed by arcs (row/column ``a - 1``)."""
    n = T.n_arcs
    eps = np.zeros((n, n), dtype=np.int64)
    for tri in T.triangles:
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            if a > 0 and b > 0 and a != b:
                eps[a - 1, b - 1] += EPSILON_SIGN
                eps[b - 1, a - 1] -= EPSILON_SIGN
    return eps


def pentagon_applicable(T: Triangulation, a: int, b: int) -> bool:
    if a == b:
        return False
    try:
        ta, tb = T.triangles_of(a), T.triangles_of(b)
    except UnknownArc:
        return False
    if ta[0] == ta[1] or tb[0] == tb[1]:
        return False
    common = set(ta) & set(tb)
    if len(common) != 1:
        return False
    # three distinct triangles; confirm the five flips close up on (a b)
    S = T
    for x in (a, b, a, b, a):
        (i, _), (j, _) = S.slots[x]
        if i == j:
            return False
        S = flip(S, x)
    return labeled_equal(S, apply_permutation(T, Perm.transposition(a, b)))


def pentagon_orientation(T: Triangulation, a: int, b: int) -> int:
    """+1 when ``b`` follows ``a`` counter-clockwise in their common triangle, else -1."""
    common = set(T.triangles_of(a)) & set(T.triangles_of(b))
    (c,) = common
    tri = T.triangles[c]
    ka = tri.index(a)
    return 1 if tri[(ka + 1) % 3] == b else -1


COMMUTATION_MODES = ("quadrilateral", "endpoint")


def commuting_flips(T: Triangulation, a: int, b: int, mode: str = "quadrilateral") -> bool:
    """Whether flips on ``a`` and ``b`` commute.

    ``"quadrilateral"`` asks that the two flip quadrilaterals share no
    triangle.  ``"endpoint"`` additionally asks that the arcs share no end
    point, which is far more restrictive on surfaces with few punctures.
    """
    if mode not in COMMUTATION_MODES:
        raise ValueError(f"unknown commutation mode {mode!r}")
    if a == b:
        return False
    try:
        ta, tb = T.triangles_of(a), T.triangles_of(b)
    except UnknownArc:
        return False
    if set(ta) & set(tb):
        return False
    if ta[0] == ta[1] or tb[0] == tb[1]:
        return False
    if mode == "endpoint":
        return not (T.endpoints(a) & T.endpoints(b))
    return True
