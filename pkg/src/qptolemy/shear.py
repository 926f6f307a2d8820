"""Shearing coordinates: the classical shadow used as a numeric oracle.

Coordinates are float arrays indexed by ``label - 1``.  A flip of ``a``
negates ``t[a]`` and shifts every side of the flip quadrilateral.  The shift
is applied once per side occurrence: a side ``x`` that follows ``a`` in its
triangle gains ``s * phi(s * t[a])`` with ``s = EPSILON_SIGN``, a side that
precedes ``a`` uses ``s = -EPSILON_SIGN``.  When every arc appears at most
once around the quadrilateral this is the textbook formula
``t[b] + eps(a, b) * phi(sign(eps(a, b)) * t[a])``; the per-occurrence form
also covers sides glued to each other, where ``eps`` alone loses
information.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from ._kernels import PROGRAM_WIDTH, dphi_np, phi_np, run_program
from .errors import DegenerateQuadrilateral, DimensionMismatch
from .triangulation import Triangulation, epsilon, flip
from . import triangulation as _tri

INF = math.inf


# -- cross-ratios ----------------------------------------------------------


@dataclass(frozen=True)
class IdealQuadrilateral:
    """Four boundary points of the upper half-plane, counter-clockwise.

    Points are reals or ``math.inf``.  Increasing real order followed by
    ``inf`` is counter-clockwise.
    """

    p1: float
    p2: float
    p3: float
    p4: float

    def __iter__(self):
        return iter((self.p1, self.p2, self.p3, self.p4))


def shear_from_cross_ratio(q: IdealQuadrilateral | Sequence[float]) -> float:
    """``log(-(p1-p2)(p3-p4) / ((p1-p4)(p3-p2)))`` for the diagonal ``p1 p3``."""
    p1, p2, p3, p4 = (float(x) for x in q)
    pts = (p1, p2, p3, p4)
    if any(math.isnan(x) for x in pts):
        raise DegenerateQuadrilateral("point is NaN")
    if len(set(pts)) < 4:
        raise DegenerateQuadrilateral(f"points are not pairwise distinct: {pts}")
    n_inf = sum(math.isinf(x) for x in pts)
    if n_inf > 1:
        raise DegenerateQuadrilateral("at most one point may lie at infinity")
    # factors containing the point at infinity cancel pairwise
    factors_num = [(p1, p2), (p3, p4)]
    factors_den = [(p1, p4), (p3, p2)]
    num = [a - b for a, b in factors_num if not (math.isinf(a) or math.isinf(b))]
    den = [a - b for a, b in factors_den if not (math.isinf(a) or math.isinf(b))]
    if n_inf:
        # one numerator and one denominator factor dropped; their ratio is +1
        # or -1 according to the sign of infinity in each
        sign = 1.0
        for a, b in factors_num:
            if math.isinf(a) or math.isinf(b):
                sign *= math.copysign(1.0, a if math.isinf(a) else -b)
        for a, b in factors_den:
            if math.isinf(a) or math.isinf(b):
                sign *= math.copysign(1.0, a if math.isinf(a) else -b)
        value = sign * math.prod(num) / math.prod(den)
    else:
        value = math.prod(num) / math.prod(den)
    arg = -value
    if not arg > 0:
        raise DegenerateQuadrilateral(f"cross-ratio argument {arg} is not positive; p1 p3 does not separate p2, p4")
    return math.log(arg)


# -- flips on coordinates --------------------------------------------------


def flip_sides(T: Triangulation, a: int) -> list[tuple[int, int]]:
    """``(label, sign)`` for each arc side of the flip quadrilateral of ``a``."""
    T._check_arc(a)
    (i, k), (j, m) = T.slots[a]
    t1, t2 = T.triangles[i], T.triangles[j]
    s = _tri.EPSILON_SIGN
    sides = [(t1[(k + 1) % 3], s), (t1[(k + 2) % 3], -s), (t2[(m + 1) % 3], s), (t2[(m + 2) % 3], -s)]
    return [(x, sg) for x, sg in sides if x > 0]


def _check_dim(T: Triangulation, t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.shape[-1] != T.n_arcs:
        raise DimensionMismatch(f"coordinate vector has {t.shape[-1]} entries, triangulation has {T.n_arcs} arcs")
    return t


def flip_coords(T: Triangulation, a: int, t) -> np.ndarray:
    """Coordinates in ``flip(T, a)`` of the point with coordinates ``t`` in ``T``."""
    flip(T, a)  # raises for self-folded or unknown arcs
    t = _check_dim(T, t)
    out = np.array(t, dtype=np.float64, copy=True)
    ta = t[..., a - 1]
    for x, s in flip_sides(T, a):
        out[..., x - 1] += s * phi_np(s * ta)
    out[..., a - 1] = -ta
    return out


def jacobian(T: Triangulation, a: int, t) -> np.ndarray:
    """Closed-form ``d t'(i) / d t(j)`` of :func:`flip_coords`."""
    flip(T, a)
    t = _check_dim(T, t)
    n = T.n_arcs
    J = np.eye(n)
    ta = float(t[a - 1])
    for x, s in flip_sides(T, a):
        # d/dta of s * phi(s * ta) = phi'(s * ta)
        J[x - 1, a - 1] += float(dphi_np(s * ta))
    J[a - 1, :] = 0.0
    J[a - 1, a - 1] = -1.0
    return J


def finite_difference_jacobian(T: Triangulation, a: int, t, h: float = 1e-6) -> np.ndarray:
    t = _check_dim(T, t)
    n = T.n_arcs
    J = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (flip_coords(T, a, t + e) - flip_coords(T, a, t - e)) / (2 * h)
    return J


def poisson_invariance_check(T: Triangulation, a: int, t) -> float:
    """Max-norm of ``J eps(T) J^T - eps(flip(T, a))`` at ``t``."""
    J = jacobian(T, a, t)
    lhs = J @ epsilon(T) @ J.T
    return float(np.max(np.abs(lhs - epsilon(flip(T, a))))) if T.n_arcs else 0.0


# -- words -----------------------------------------------------------------


def compile_word(w) -> tuple[np.ndarray, np.ndarray]:
    """Translate a :class:`~qptolemy.words.FlipWord` into a kernel program."""
    from .words import Flip

    n = w.source.n_arcs
    rows = []
    perms = []
    for T, g in zip(w.states, w.gens):
        row = np.zeros(PROGRAM_WIDTH, dtype=np.int64)
        if isinstance(g, Flip):
            sides = flip_sides(T, g.arc)
            row[0], row[1], row[2] = _kernels.FLIP, g.arc - 1, len(sides)
            for i, (x, s) in enumerate(sides):
                row[3 + i] = x - 1
                row[7 + i] = s
        else:
            dest = np.arange(n, dtype=np.int64)
            for x, y in g.moved:
                dest[x - 1] = y - 1
            row[0], row[1] = _kernels.PERM, len(perms)
            perms.append(dest)
        rows.append(row)
    program = np.array(rows, dtype=np.int64).reshape(-1, PROGRAM_WIDTH)
    table = np.array(perms, dtype=np.int64).reshape(-1, n)
    if table.shape[0] == 0:
        table = np.zeros((1, n), dtype=np.int64)
    return program, table


def word_action(T: Triangulation, w, t, use_numba: bool | None = None):
    """Transport ``t`` (one vector or a batch of rows) along ``w``.

    Returns the target triangulation and the transported coordinates, in
    the same shape as ``t``.
    """
    from .words import FlipWord

    if not isinstance(w, FlipWord) or w.source != T:
        w = FlipWord(T, tuple(w.gens if isinstance(w, FlipWord) else w))
    t = _check_dim(T, t)
    program, table = compile_word(w)
    out = run_program(np.atleast_2d(t), program, table, use_numba)
    return w.target, out.reshape(t.shape)


def relative_error(before, after) -> float:
    before = np.asarray(before)
    after = np.asarray(after)
    scale = max(1.0, float(np.max(np.abs(before))) if before.size else 1.0)
    return float(np.max(np.abs(after - before))) / scale if before.size else 0.0


def random_points(n: int, samples: int, seed: int, low: float = -3.0, high: float = 3.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=(samples, n))


def identity_residual(w, samples: int = 100, seed: int = 0, low: float = -3.0, high: float = 3.0,
                      use_numba: bool | None = None) -> float:
    """Worst relative error of ``w`` acting on seeded random points.

    A relator acts as the identity, so the residual should vanish up to
    rounding.  Rows are compared one by one and the maximum is returned.
    """
    T = w.source
    pts = random_points(T.n_arcs, samples, seed, low, high)
    target, out = word_action(T, w, pts, use_numba)
    if target != T:
        return math.inf
    return max(relative_error(p, q) for p, q in zip(pts, out))


def same_action(w1, w2, samples: int = 100, seed: int = 0, use_numba: bool | None = None) -> float:
    """Worst relative difference between the actions of two words on one source."""
    pts = random_points(w1.source.n_arcs, samples, seed)
    _, a = word_action(w1.source, w1, pts, use_numba)
    _, b = word_action(w2.source, w2, pts, use_numba)
    return max(relative_error(x, y) for x, y in zip(a, b))


# -- calibration of the epsilon sign --------------------------------------


def _disc_points(T: Triangulation, points: Sequence[float]) -> dict[tuple[int, int], float]:
    """Attach ``points[k]`` to the tail of boundary edge ``-(k + 1)`` of a polygon."""
    by_vertex = {}
    for x, ((i, k),) in ((x, p) for x, p in T.slots.items() if x < 0):
        by_vertex[T.vertices[(i, k)]] = points[-x - 1]
    return {c: by_vertex[v] for c, v in T.vertices.items()}


def polygon_shears(T: Triangulation, points: Sequence[float]) -> np.ndarray:
    """Shear coordinates of a triangulated ideal polygon with the given vertices."""
    at = _disc_points(T, points)
    t = np.empty(T.n_arcs)
    for a in T.arcs:
        (i, k), (j, m) = T.slots[a]
        q = (at[(i, k)], at[(j, (m + 2) % 3)], at[(i, (k + 1) % 3)], at[(i, (k + 2) % 3)])
        t[a - 1] = shear_from_cross_ratio(q)
    return t


def fan_polygon(m: int) -> Triangulation:
    """Fan triangulation of an ideal ``m``-gon from its first vertex.

    Boundary edge ``-k`` runs from vertex ``k - 1`` to vertex ``k``; diagonal
    ``j`` joins vertex 0 to vertex ``j + 1``.
    """
    if m < 4:
        raise ValueError("need at least four vertices")
    # triangle (v0, v_j, v_{j+1}) has sides v0v_j, v_j v_{j+1}, v_{j+1} v0
    tris = []
    for j in range(1, m - 1):
        first = -1 if j == 1 else j - 1  # v0 v_j
        last = -m if j == m - 2 else j  # v_{j+1} v0
        tris.append((first, -(j + 1), last))
    return Triangulation(tuple(tris), 0, m, m)


def calibrate_epsilon_sign(points: Sequence[float] = (-2.0, -0.5, 0.0, 0.7, 1.9, 4.2)) -> int:
    """The epsilon sign under which :func:`flip_coords` matches cross-ratios.

    Flips every diagonal of a fan-triangulated ideal polygon, recomputes all
    shears from the same points, and compares with the flip formula under
    both signs.  Returns the sign that agrees to 1e-12; raises otherwise.
    """
    T = fan_polygon(len(points))
    t = polygon_shears(T, points)
    saved = _tri.EPSILON_SIGN
    good = []
    try:
        for sign in (1, -1):
            _tri.EPSILON_SIGN = sign
            ok = True
            for a in T.arcs:
                T2 = flip(T, a)
                if np.max(np.abs(flip_coords(T, a, t) - polygon_shears(T2, points))) > 1e-12:
                    ok = False
                    break
            if ok:
                good.append(sign)
    finally:
        _tri.EPSILON_SIGN = saved
    if len(good) != 1:
        raise RuntimeError(f"calibration inconclusive: consistent signs {good}")
    return good[0]


__all__ = [
    "IdealQuadrilateral",
    "shear_from_cross_ratio",
    "flip_sides",
    "flip_coords",
    "jacobian",
    "finite_difference_jacobian",
    "poisson_invariance_check",
    "compile_word",
    "word_action",
    "identity_residual",
    "same_action",
    "random_points",
    "relative_error",
    "polygon_shears",
    "fan_polygon",
    "calibrate_epsilon_sign",
]
