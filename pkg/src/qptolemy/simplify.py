"""Bounded search for rewrite sequences, and relator phases.

The search works on a normal form: a flip sequence followed by one
permutation.  Its moves are macros over the primitive rules of
:mod:`qptolemy.words`:

* ``cancel``  ``F_a F_a -> 1``
* ``tri``     ``F_a F_b F_a -> z^d F_b F_a (a b)`` on a pentagon pair
* ``untri``   the reverse of ``tri`` (one flip longer)
* ``comm``    swap two commuting flips

``cancel`` and ``tri`` shorten the word and are applied greedily (lowest
position first, then lowest arc label).  When neither applies, a
breadth-first search over ``comm`` moves, with at most ``max_untri``
``untri`` moves per search, looks for a word where one does.  Every macro
expands into primitive :class:`~qptolemy.words.Step` records, so a
successful search doubles as a replayable :class:`ProofScript`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import BudgetExhausted, NotARelator
from .perm import IDENTITY, Perm
from .triangulation import Triangulation, commuting_flips, flip, pentagon_applicable
from .words import (
    Flip,
    FlipWord,
    ProofScript,
    Step,
    apply_rule,
    pentagon_phase,
    replay,
)

DEFAULT_BUDGET = 50000


@dataclass(frozen=True)
class Move:
    kind: str  # cancel | tri | untri | comm
    pos: int
    a: int = 0
    b: int = 0


# -- normal form -----------------------------------------------------------


def normalize_steps(w: FlipWord) -> tuple[FlipWord, list[Step]]:
    """Push every permutation to the right end and merge; phase free."""
    steps: list[Step] = []
    cur = w
    while True:
        gens = cur.gens
        step = None
        for i in range(len(gens) - 1):
            if isinstance(gens[i], Perm):
                rule = "PermMerge" if isinstance(gens[i + 1], Perm) else "PermNaturality"
                step = Step(i, rule, "fwd" if rule == "PermMerge" else "bwd")
                break
        if step is None:
            return cur, steps
        cur = apply_rule(cur, step)
        steps.append(step)


def split_normal(w: FlipWord) -> tuple[tuple[int, ...], Perm]:
    gens = w.gens
    perm = gens[-1] if gens and isinstance(gens[-1], Perm) else IDENTITY
    flips = gens[:-1] if perm is not IDENTITY else gens
    if any(isinstance(g, Perm) for g in flips):
        raise ValueError("word is not in flip-then-permutation normal form")
    return tuple(g.arc for g in flips), perm


def _states(source: Triangulation, flips) -> list[Triangulation]:
    out = [source]
    T = source
    for a in flips:
        T = flip(T, a)
        out.append(T)
    return out


def _advance(states, move: Move, new_flips) -> list[Triangulation]:
    """States of ``new_flips`` after ``move``, reusing the unchanged ones."""
    i = move.pos
    if move.kind == "comm":
        return states[: i + 1] + [flip(states[i], new_flips[i])] + states[i + 2 :]
    if move.kind == "cancel":
        return states[: i + 1] + states[i + 3 :]
    out = states[: i + 1]
    T = states[i]
    for a in new_flips[i:]:
        T = flip(T, a)
        out.append(T)
    return out


def _relabel(flips, p: Perm):
    m = p.mapping
    return tuple(m.get(x, x) for x in flips)


def reducing_moves(states, flips) -> list[Move]:
    out = []
    n = len(flips)
    for i in range(n - 1):
        if flips[i] == flips[i + 1]:
            out.append(Move("cancel", i, flips[i]))
    for i in range(n - 2):
        a, b = flips[i], flips[i + 1]
        if a != b and flips[i + 2] == a and pentagon_applicable(states[i], a, b):
            out.append(Move("tri", i, a, b))
    out.sort(key=lambda m: (m.pos, m.a, m.b, m.kind))
    return out


def neutral_moves(states, flips, commutation, allow_untri: bool) -> list[Move]:
    out = []
    for i in range(len(flips) - 1):
        a, b = flips[i], flips[i + 1]
        if commuting_flips(states[i], a, b, commutation):
            out.append(Move("comm", i, a, b))
        elif allow_untri and a != b and pentagon_applicable(states[i], b, a):
            # F_a F_b -> F_b F_a F_b (a b), with the pentagon pair read as (b, a)
            out.append(Move("untri", i, b, a))
    return out


def apply_move(source, states, flips, perm, move: Move):
    """Return (flips, perm, delta) after ``move``."""
    i = move.pos
    if move.kind == "cancel":
        return flips[:i] + flips[i + 2 :], perm, 0
    if move.kind == "comm":
        return flips[:i] + (flips[i + 1], flips[i]) + flips[i + 2 :], perm, 0
    a, b = move.a, move.b
    t = Perm.transposition(a, b)
    if move.kind == "tri":
        rest = _relabel(flips[i + 3 :], t)
        return flips[:i] + (b, a) + rest, t.then(perm), pentagon_phase(states[i], a, b)
    if move.kind == "untri":
        rest = _relabel(flips[i + 2 :], t)
        return flips[:i] + (a, b, a) + rest, t.then(perm), -pentagon_phase(states[i], a, b)
    raise ValueError(move.kind)  # pragma: no cover


def move_steps(flips, perm, move: Move) -> list[Step]:
    """Primitive steps realizing ``move`` on the normal-form word."""
    i, a, b = move.pos, move.a, move.b
    m = len(flips)
    has_perm = not perm.is_identity()
    if move.kind == "cancel":
        return [Step(i, "Involution")]
    if move.kind == "comm":
        return [Step(i, "Commutation")]
    t = str(Perm.transposition(a, b))
    if move.kind == "tri":
        steps = [
            Step(i + 3, "Involution", "bwd", {"arc": b}),
            Step(i + 4, "Involution", "bwd", {"arc": a}),
            Step(i, "Pentagon"),
        ]
        # perm now at i, followed by F_a F_b and the m - i - 3 remaining flips
        steps += [Step(k, "PermNaturality", "bwd") for k in range(i, m - 1)]
        if has_perm:
            steps.append(Step(m - 1, "PermMerge"))
        return steps
    if move.kind == "untri":
        steps = [Step(i + 2, "PermMerge", "bwd", {"perm": t})]
        if i + 2 < m:
            steps += [Step(k, "PermNaturality", "bwd") for k in range(i + 3, m + 1)]
            if has_perm:
                steps.append(Step(m + 1, "PermMerge"))
        steps += [
            Step(i + 1, "PermNaturality"),
            Step(i, "PermNaturality"),
            Step(i, "Pentagon", "bwd", {"arcs": [a, b]}),
            Step(i + 4, "Involution"),
            Step(i + 3, "Involution"),
        ]
        return steps
    raise ValueError(move.kind)  # pragma: no cover


# -- search ----------------------------------------------------------------


@dataclass
class SimplifyResult:
    word: FlipWord
    delta: int
    script: ProofScript
    exhausted: bool = False
    expanded: int = 0


def _search_moves(source, flips, perm, budget, depth, commutation, max_untri):
    """Greedy descent with breadth-first escapes; returns (moves, expanded, exhausted)."""
    moves: list[Move] = []
    expanded = 0
    states = _states(source, flips)
    while True:
        red = reducing_moves(states, flips)
        if red:
            mv = red[0]
            new, perm, _ = apply_move(source, states, flips, perm, mv)
            states, flips = _advance(states, mv, new), new
            moves.append(mv)
            expanded += 1
            if expanded > budget:
                return moves, expanded, True
            continue
        # breadth-first over neutral moves
        start = (flips, perm)
        seen = {start}
        queue = deque([(flips, perm, (), 0, states)])
        found = None
        while queue and found is None:
            f, p, path, n_untri, st = queue.popleft()
            if len(path) >= depth:
                continue
            for mv in neutral_moves(st, f, commutation, n_untri < max_untri):
                f2, p2, _ = apply_move(source, st, f, p, mv)
                key = (f2, p2)
                if key in seen:
                    continue
                seen.add(key)
                expanded += 1
                if expanded > budget:
                    return moves, expanded, True
                n2 = n_untri + (mv.kind == "untri")
                st2 = _advance(st, mv, f2)
                red2 = reducing_moves(st2, f2)
                # an untri must be paid back by more than one shortening
                if red2 and (n2 == 0 or _net_gain(st2, f2, p2) > n2):
                    found = (path + (mv,), f2, p2, st2)
                    break
                queue.append((f2, p2, path + (mv,), n2, st2))
        if found is None:
            return moves, expanded, False
        path, flips, perm, states = found
        moves.extend(path)


def _net_gain(states, flips, perm) -> int:
    """Shortening obtained by greedy reduction from this word."""
    start = len(flips)
    for _ in range(64):
        red = reducing_moves(states, flips)
        if not red:
            break
        new, perm, _ = apply_move(None, states, flips, perm, red[0])
        states, flips = _advance(states, red[0], new), new
    return start - len(flips)


def auto_simplify(
    w: FlipWord,
    budget: int = DEFAULT_BUDGET,
    depth: int = 4,
    commutation: str = "quadrilateral",
    max_untri: int = 1,
    strict: bool = False,
) -> SimplifyResult:
    """Shorten ``w`` by the phase-tracked rules; deterministic.

    Returns the simplified word, the accumulated phase delta, and the
    primitive script that produced it.  If the budget runs out the best word
    found is returned with ``exhausted`` set, or :class:`BudgetExhausted` is
    raised when ``strict``.
    """
    norm, steps = normalize_steps(w)
    flips, perm = split_normal(norm)
    moves, expanded, exhausted = _search_moves(w.source, flips, perm, budget, depth, commutation, max_untri)
    cur = norm
    for mv in moves:
        f, p = split_normal(cur)
        for st in move_steps(f, p, mv):
            cur = apply_rule(cur, st, commutation)
            steps.append(st)
    script = ProofScript(tuple(steps))
    result = SimplifyResult(cur, cur.zexp - w.zexp, script, exhausted, expanded)
    if exhausted and strict:
        raise BudgetExhausted(f"budget of {budget} expansions exhausted", best=result)
    return result


def relator_phase(
    w: FlipWord,
    script: ProofScript | None = None,
    budget: int = DEFAULT_BUDGET,
    commutation: str = "quadrilateral",
) -> int:
    """Exponent ``k`` with ``w = z**k`` times the identity; ``w.zexp`` included."""
    if not w.gens:
        return w.zexp
    if not w.is_automorphism():
        raise NotARelator("the word does not return to its source triangulation")
    if script is not None:
        final, _ = replay(w, script, commutation)
    else:
        res = auto_simplify(w, budget, commutation=commutation)
        if res.exhausted and res.word.gens:
            raise NotARelator(f"budget exhausted at {len(res.word)} generators")
        final = res.word
    if final.gens:
        raise NotARelator(f"reduction stops at the non-identity word {FlipWord(final.source, final.gens)}")
    return final.zexp
