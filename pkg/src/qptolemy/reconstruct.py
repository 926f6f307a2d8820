"""Search for labeled triangulations on which a set of flip words closes up.

The fixtures' source triangulations are known only through the words that
act on them.  The search runs in two stages:

1. enumerate every unlabeled triangulation of the surface by breadth-first
   search over the flip graph, starting from a random gluing, and keep one
   representative per combinatorial type (a canonical form computed over all
   rooted traversals);
2. for each type, assign arc labels by backtracking so that every word is
   applicable and returns a labeled-equal triangulation.  A partial
   assignment is pruned as soon as a flip on an assigned label hits a
   self-folded arc; each new label resumes the run where it stopped.

Boundary labels are carried over from the seed unchanged.
"""
from __future__ import annotations

import random
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor

from .errors import BudgetExhausted, InvalidTriangulation
from .triangulation import Triangulation
from .words import Flip, Generator

Raw = tuple[tuple[int, int, int], ...]

DEFAULT_RECONSTRUCT_BUDGET = 5_000_000


def _slots(tris: Raw) -> dict[int, list[tuple[int, int]]]:
    out: dict[int, list[tuple[int, int]]] = {}
    for i, t in enumerate(tris):
        for k, x in enumerate(t):
            out.setdefault(x, []).append((i, k))
    return out


def _flip_raw(tris: Raw, slots, a: int) -> Raw | None:
    (i, k), (j, m) = slots[a]
    if i == j:
        return None
    t1, t2 = tris[i], tris[j]
    x, y = t1[(k + 1) % 3], t1[(k + 2) % 3]
    z, w = t2[(m + 1) % 3], t2[(m + 2) % 3]
    out = list(tris)
    out[i] = (a, y, z)
    out[j] = (a, w, x)
    return tuple(out)


def random_gluing(n_arcs: int, genus: int, punctures: int, boundary: int = 0, seed: int = 0,
                  max_tries: int = 100_000) -> Triangulation:
    """A random triangulation with the given topology and no self-folded arcs."""
    sides = 2 * n_arcs + boundary
    if sides % 3:
        raise InvalidTriangulation(f"{n_arcs} arcs and {boundary} boundary edges do not fill triangles")
    n_tri = sides // 3
    rng = random.Random(seed)
    slots = [(t, k) for t in range(n_tri) for k in range(3)]
    for _ in range(max_tries):
        rng.shuffle(slots)
        tris = [[0, 0, 0] for _ in range(n_tri)]
        for i, (t, k) in enumerate(slots[:boundary]):
            tris[t][k] = -(i + 1)
        rest = slots[boundary:]
        for i in range(0, len(rest), 2):
            (t, k), (u, m) = rest[i], rest[i + 1]
            tris[t][k] = tris[u][m] = i // 2 + 1
        try:
            T = Triangulation(tuple(map(tuple, tris)), genus, punctures, boundary)
        except InvalidTriangulation:
            continue
        if any(T.is_self_folded(a) for a in T.arcs):
            continue
        if boundary and T.boundary_components() != punctures:
            continue
        return T
    raise InvalidTriangulation(f"no gluing found for genus {genus}, {punctures} punctures in {max_tries} tries")


def unlabeled_form(tris: Raw) -> Raw:
    """Canonical form up to arc relabeling and boundary relabeling."""
    slots = _slots(tris)
    best = None
    for i0 in range(len(tris)):
        for k0 in range(3):
            rot = {i0: k0}
            order = [i0]
            lab: dict[int, int] = {}
            rows = []
            q = 0
            while q < len(order):
                i = order[q]
                q += 1
                r, t = rot[i], tris[i]
                row = []
                for d in range(3):
                    k = (r + d) % 3
                    x = t[k]
                    if x < 0:
                        row.append(-1)
                        continue
                    row.append(lab.setdefault(x, len(lab) + 1))
                    (a, b), (c, e) = slots[x]
                    j, m = (c, e) if (a, b) == (i, k) else (a, b)
                    if j not in rot:
                        rot[j] = m
                        order.append(j)
                rows.append(tuple(row))
            form = tuple(rows)
            if best is None or form < best:
                best = form
    return best


def enumerate_types(T: Triangulation, limit: int = 200_000) -> list[Raw]:
    """One representative per combinatorial type reachable by flips from ``T``."""
    start = T.triangles
    seen = {unlabeled_form(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for tris in frontier:
            slots = _slots(tris)
            for a in range(1, T.n_arcs + 1):
                new = _flip_raw(tris, slots, a)
                if new is None:
                    continue
                key = unlabeled_form(new)
                if key not in seen:
                    seen[key] = new
                    nxt.append(new)
        if len(seen) > limit:
            raise BudgetExhausted(f"more than {limit} combinatorial types", best=list(seen.values()))
        frontier = nxt
    return list(seen.values())


# -- label search ------------------------------------------------------------


def _labels_in(word: Sequence[Generator]) -> list[int]:
    out: list[int] = []
    for g in word:
        xs = [g.arc] if isinstance(g, Flip) else sorted(g.support())
        for x in xs:
            if x not in out:
                out.append(x)
    return out


def _flip_tracked(tris: Raw, slots: dict, a: int):
    """Flip edge ``a`` updating the slot map in place of a rebuild; None if self-folded."""
    (i, k), (j, m) = slots[a]
    if i == j:
        return None
    t1, t2 = tris[i], tris[j]
    x, y = t1[(k + 1) % 3], t1[(k + 2) % 3]
    z, w = t2[(m + 1) % 3], t2[(m + 2) % 3]
    out = list(tris)
    out[i] = (a, y, z)
    out[j] = (a, w, x)
    new = dict(slots)
    touched = {a, x, y, z, w}
    for lbl in touched:
        new[lbl] = [p for p in slots[lbl] if p[0] != i and p[0] != j]
    for idx in (i, j):
        for side, lbl in enumerate(out[idx]):
            new[lbl].append((idx, side))
    return tuple(out), new


def _resume(state, word):
    """Continue a run of ``word`` until it needs an unassigned label.

    ``state`` is ``(tris, slots, labels, position)`` where ``labels`` maps
    the current name of each assigned label to its edge.  Returns the new
    state, or ``None`` when a flip hits a self-folded edge.  Generators
    before the stop point only move assigned labels, so an unassigned label
    still carries its original name there.
    """
    tris, slots, L, gi = state
    while gi < len(word):
        g = word[gi]
        if isinstance(g, Flip):
            if g.arc not in L:
                break
            res = _flip_tracked(tris, slots, L[g.arc])
            if res is None:
                return None
            tris, slots = res
        else:
            if any(x not in L for x in g.support()):
                break
            m = g.mapping
            L = {m.get(x, x): e for x, e in L.items()}
        gi += 1
    return tris, slots, L, gi


def _relabeled(tris: Raw, inv: dict[int, int]):
    out = []
    for t in tris:
        r = tuple(("l", inv[x]) if x in inv else (("b", x) if x < 0 else ("u", x)) for x in t)
        k = r.index(min(r))
        out.append(r[k:] + r[:k])
    return sorted(out)


def _closes(tris0, L0, tris1, L1) -> bool:
    inv0 = {e: x for x, e in L0.items()}
    inv1 = {e: x for x, e in L1.items()}
    return _relabeled(tris0, inv0) == _relabeled(tris1, inv1)


class _Counter:
    def __init__(self, budget):
        self.left = budget

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExhausted("reconstruction budget exhausted")


def label_assignments(tris: Raw, words: Sequence[Sequence[Generator]], n: int, budget: int | None = None,
                      stop_after: int | None = None) -> list[dict[int, int]]:
    """All maps label -> edge id under which every word applies and closes up."""
    counter = _Counter(budget if budget is not None else DEFAULT_RECONSTRUCT_BUDGET)
    found: list[dict[int, int]] = []
    slots0 = _slots(tris)

    def per_word(wi: int, L: dict[int, int]):
        if stop_after and len(found) >= stop_after:
            return
        if wi == len(words):
            found.append(dict(L))
            return
        w = words[wi]
        need = [x for x in _labels_in(w) if x not in L]

        def assign(k: int, L: dict[int, int], state):
            counter.tick()
            state = _resume(state, w)
            if state is None:
                return
            if k == len(need):
                end_tris, _, end_L, _ = state
                if _closes(tris, L, end_tris, end_L):
                    per_word(wi + 1, L)
                return
            used = set(L.values())
            label = need[k]
            t, sl, cur, gi = state
            for e in range(1, n + 1):
                if e in used:
                    continue
                L2 = dict(L)
                L2[label] = e
                cur2 = dict(cur)
                cur2[label] = e
                assign(k + 1, L2, (t, sl, cur2, gi))

        assign(0, L, (tris, slots0, dict(L), 0))

    per_word(0, {})
    return found


def _apply_assignment(tris: Raw, L: dict[int, int], n: int) -> Raw:
    inv = {e: x for x, e in L.items()}
    free = iter(x for x in range(1, n + 1) if x not in L)
    for e in range(1, n + 1):
        if e not in inv:
            inv[e] = next(free)
    return tuple(tuple(inv.get(x, x) if x > 0 else x for x in t) for t in tris)


def _search_type(args):
    tris, words, n, budget = args
    return [_apply_assignment(tris, L, n) for L in label_assignments(tris, words, n, budget)]


def reconstruct_triangulation(
    words: Sequence[Sequence[Generator] | str],
    n: int,
    genus: int,
    punctures: int,
    boundary: int = 0,
    budget: int | None = None,
    seed: int = 0,
    workers: int = 1,
) -> list[Triangulation]:
    """Triangulations on ``n`` arcs on which every word applies and closes up.

    ``words`` are generator lists (or word strings) without a source.  The
    budget bounds the number of label-assignment nodes per combinatorial
    type; :class:`BudgetExhausted` carries the candidates found so far.
    Results are sorted by their triangle lists, so the output does not
    depend on ``workers``.
    """
    from .words import parse_gens

    skeletons = [parse_gens(w) if isinstance(w, str) else tuple(w) for w in words]
    for w in skeletons:
        for g in w:
            labels = [g.arc] if isinstance(g, Flip) else list(g.support())
            if any(not 1 <= x <= n for x in labels):
                return []
    # most constrained word first: fewest new labels per generator
    skeletons.sort(key=lambda w: (len(_labels_in(w)), -len(w)))
    seed_T = random_gluing(n, genus, punctures, boundary, seed)
    types = enumerate_types(seed_T)
    jobs = [(t, skeletons, n, budget) for t in types]
    found: list[Raw] = []
    try:
        if workers > 1:
            with ProcessPoolExecutor(workers) as ex:
                for part in ex.map(_search_type, jobs):
                    found += part
        else:
            for job in jobs:
                found += _search_type(job)
    except BudgetExhausted as exc:
        exc.best = _to_triangulations(found, genus, punctures, boundary)
        raise
    return _to_triangulations(found, genus, punctures, boundary)


def _to_triangulations(found, genus, punctures, boundary) -> list[Triangulation]:
    uniq = {}
    for tris in found:
        T = Triangulation(tris, genus, punctures, boundary)
        uniq.setdefault(T.canonical, T)
    return [uniq[k] for k in sorted(uniq)]


def mirror(T: Triangulation) -> Triangulation:
    """The same gluing with every triangle's orientation reversed."""
    return Triangulation(tuple(t[::-1] for t in T.triangles), T.genus, T.punctures, T.boundary)


def same_up_to_boundary(T1: Triangulation, T2: Triangulation) -> bool:
    """Labeled equality after forgetting which boundary edge is which."""
    return _strip(T1) == _strip(T2)


def _strip(T: Triangulation):
    rows = (tuple(x if x > 0 else 0 for x in t) for t in T.triangles)
    return sorted(min(r[j:] + r[:j] for j in range(3)) for r in rows)


__all__ = [
    "DEFAULT_RECONSTRUCT_BUDGET",
    "enumerate_types",
    "label_assignments",
    "mirror",
    "random_gluing",
    "reconstruct_triangulation",
    "same_up_to_boundary",
    "unlabeled_form",
]
