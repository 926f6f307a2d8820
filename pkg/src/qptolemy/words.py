"""Phase-tracked words in the quantized Ptolemy groupoid.

A :class:`FlipWord` is a source triangulation, a sequence of generators
(:class:`Flip` or :class:`~qptolemy.perm.Perm`) applied left to right, and an
integer ``zexp``: the word stands for ``z**zexp`` times the composite.  A
permutation generator relabels every arc ``x`` as ``p(x)``, so flips and
permutations satisfy ``F_a p = p F_{p(a)}``.

The pentagon ``F_a F_b F_a F_b F_a = z**d (a b)`` is the only relation with a
nontrivial scalar.  Its exponent ``d`` depends on the orientation of the pair
in their common triangle: with ``b`` following ``a`` counter-clockwise it is
``PENTAGON_PHASE``, otherwise ``-PENTAGON_PHASE``.  A single orientation-blind
scalar is impossible: reading the same pentagon backwards from the relabeled
end state forces the scalar to equal its own inverse.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import (
    FinalWordMismatch,
    FlipOnSelfFoldedArc,
    FormatError,
    NonComposable,
    PatternMismatch,
    PermutationOutOfRange,
    RuleNotApplicable,
    ScriptStepFailed,
    UnknownArc,
    WordNotApplicable,
)
from .perm import Perm
from .triangulation import (
    Triangulation,
    apply_permutation,
    commuting_flips,
    flip,
    labeled_equal,
    pentagon_applicable,
    pentagon_orientation,
)

# Exponent of z picked up by a forward pentagon whose second arc follows the
# first counter-clockwise.  Fixed by requiring the torus twist reduction
# F3 F4 F3 (2 4) = z^-1 F4 F3 (2 4 3).
PENTAGON_PHASE = -1


@dataclass(frozen=True, order=True)
class Flip:
    arc: int

    def __str__(self):
        return f"F{self.arc}"


Generator = Union[Flip, Perm]


def parse_generator(tok: str) -> Generator:
    tok = tok.strip()
    if tok.startswith("F"):
        try:
            return Flip(int(tok[1:]))
        except ValueError:
            raise FormatError(f"bad flip token {tok!r}") from None
    if tok.startswith("P") or tok.startswith("("):
        try:
            return Perm.parse(tok)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    raise FormatError(f"unknown generator {tok!r}")


def format_generator(g: Generator) -> str:
    return str(g) if isinstance(g, Flip) else f"P{g}"


def parse_gens(items: Iterable[str] | str) -> tuple[Generator, ...]:
    """Parse ``"F3 F4 P(2 4)"`` or a list of tokens."""
    if isinstance(items, str):
        items = _tokenize(items)
    gens = []
    for tok in items:
        g = parse_generator(tok)
        if isinstance(g, Perm) and g.is_identity():
            continue
        gens.append(g)
    return tuple(gens)


_TOKEN_RE = re.compile(r"\s*(F\d+|P?(?:\([\d\s,]*\)\s*)+)")


def _tokenize(text: str) -> list[str]:
    out, i = [], 0
    text = text.strip()
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise FormatError(f"unexpected text {text[i:i + 10]!r} in word")
        out.append(m.group(1).strip())
        i = m.end()
    return out


def step_state(T: Triangulation, g: Generator) -> Triangulation:
    if isinstance(g, Flip):
        return flip(T, g.arc)
    return apply_permutation(T, g)


def _states(source: Triangulation, gens: Sequence[Generator]) -> list[Triangulation]:
    states = [source]
    T = source
    for i, g in enumerate(gens):
        try:
            T = step_state(T, g)
        except (FlipOnSelfFoldedArc, UnknownArc, PermutationOutOfRange) as exc:
            raise WordNotApplicable(i, str(exc)) from None
        states.append(T)
    return states


@dataclass(frozen=True)
class FlipWord:
    source: Triangulation
    gens: tuple[Generator, ...] = ()
    zexp: int = 0
    _checked: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        gens = tuple(g for g in self.gens if not (isinstance(g, Perm) and g.is_identity()))
        object.__setattr__(self, "gens", gens)
        if self._checked:
            self.states  # noqa: B018 - validates applicability

    @classmethod
    def parse(cls, source: Triangulation, text: str | Iterable[str], zexp: int = 0) -> "FlipWord":
        return cls(source, parse_gens(text), zexp)

    @cached_property
    def states(self) -> list[Triangulation]:
        """Triangulation before each generator, plus the target at the end."""
        return _states(self.source, self.gens)

    @property
    def target(self) -> Triangulation:
        return self.states[-1]

    def is_automorphism(self) -> bool:
        return labeled_equal(self.source, self.target)

    def __len__(self):
        return len(self.gens)

    def __str__(self):
        body = " ".join(format_generator(g) for g in self.gens) or "1"
        return body if self.zexp == 0 else f"z^{self.zexp} {body}"

    def gen_strings(self) -> list[str]:
        return [format_generator(g) for g in self.gens]

    def to_dict(self, source_ref=None) -> dict:
        return {
            "source": source_ref if source_ref is not None else self.source.to_dict(),
            "zexp": self.zexp,
            "gens": self.gen_strings(),
        }

    @classmethod
    def from_dict(cls, d: dict, base: Path | None = None, source: Triangulation | None = None) -> "FlipWord":
        if source is None:
            src = d.get("source")
            if isinstance(src, dict):
                source = Triangulation.from_dict(src)
            elif isinstance(src, str):
                path = Path(src)
                if base is not None and not path.is_absolute():
                    path = base / path
                source = Triangulation.load(path)
            else:
                raise FormatError("word needs a source triangulation")
        return cls(source, parse_gens(d.get("gens", [])), int(d.get("zexp", 0)))

    @classmethod
    def load(cls, path: str | Path, source: Triangulation | None = None) -> "FlipWord":
        path = Path(path)
        with open(path) as fh:
            return cls.from_dict(json.load(fh), base=path.parent, source=source)

    def with_gens(self, gens, zexp=None) -> "FlipWord":
        return FlipWord(self.source, tuple(gens), self.zexp if zexp is None else zexp)


def identity(T: Triangulation) -> FlipWord:
    return FlipWord(T)


def compose(w1: FlipWord, w2: FlipWord) -> FlipWord:
    if not labeled_equal(w1.target, w2.source):
        raise NonComposable("target of the first word differs from the source of the second")
    return FlipWord(w1.source, w1.gens + w2.gens, w1.zexp + w2.zexp)


def invert(w: FlipWord) -> FlipWord:
    gens = tuple(g if isinstance(g, Flip) else g.inverse() for g in reversed(w.gens))
    return FlipWord(w.target, gens, -w.zexp)


def expand_ad(prefix: FlipWord, core: FlipWord) -> FlipWord:
    """``prefix . core . prefix^-1``."""
    return compose(compose(prefix, core), invert(prefix))


def power(w: FlipWord, k: int) -> FlipWord:
    out = identity(w.source)
    for _ in range(k):
        out = compose(out, w)
    return out


# -- rewrite rules ---------------------------------------------------------

RULE_KINDS = ("Involution", "Commutation", "Pentagon", "PermNaturality", "PermMerge", "PhaseMove")


@dataclass(frozen=True)
class Step:
    """One rule application.

    ``args`` by rule:

    * Involution: backward needs ``arc`` (the pair to insert).
    * Pentagon: backward needs ``arcs`` ``[a, b]``.
    * PermMerge: backward needs ``perm``, the left factor split off.
    * PhaseMove: ``zexp``, the running exponent asserted at this point.
    """

    pos: int
    rule: str
    dir: str = "fwd"
    args: tuple = ()

    def __post_init__(self):
        if self.rule not in RULE_KINDS:
            raise FormatError(f"unknown rule {self.rule!r}")
        if self.dir not in ("fwd", "bwd"):
            raise FormatError(f"direction must be 'fwd' or 'bwd', got {self.dir!r}")
        args = self.args
        if isinstance(args, dict):
            args = tuple(sorted((k, _freeze(v)) for k, v in args.items()))
        object.__setattr__(self, "args", args)

    @property
    def kwargs(self) -> dict:
        return dict(self.args)

    def to_dict(self) -> dict:
        d = {"pos": self.pos, "rule": self.rule, "dir": self.dir}
        if self.args:
            d["args"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.args}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Step":
        try:
            return cls(int(d["pos"]), d["rule"], d.get("dir", "fwd"), d.get("args", {}))
        except KeyError as exc:
            raise FormatError(f"script step missing {exc}") from None

    def __str__(self):
        extra = "".join(f" {k}={v}" for k, v in self.args)
        return f"{self.rule}[{self.dir}]@{self.pos}{extra}"


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v


@dataclass(frozen=True)
class ProofScript:
    steps: tuple[Step, ...] = ()
    name: str = ""

    def __len__(self):
        return len(self.steps)

    def to_dict(self) -> dict:
        d = {"steps": [s.to_dict() for s in self.steps]}
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: dict | list) -> "ProofScript":
        if isinstance(d, list):
            return cls(tuple(Step.from_dict(s) for s in d))
        return cls(tuple(Step.from_dict(s) for s in d.get("steps", [])), d.get("name", ""))

    @classmethod
    def load(cls, path: str | Path) -> "ProofScript":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def pentagon_phase(T: Triangulation, a: int, b: int) -> int:
    """Exponent of ``z`` in ``F_a F_b F_a F_b F_a = z**k (a b)`` starting at ``T``."""
    return PENTAGON_PHASE * pentagon_orientation(T, a, b)


def _flip_at(gens, i) -> int:
    if i < 0 or i >= len(gens) or not isinstance(gens[i], Flip):
        raise PatternMismatch(i, "expected a flip")
    return gens[i].arc


def _perm_at(gens, i) -> Perm:
    if i < 0 or i >= len(gens) or not isinstance(gens[i], Perm):
        raise PatternMismatch(i, "expected a permutation")
    return gens[i]


def rewrite(
    w: FlipWord, step: Step, commutation: str = "quadrilateral"
) -> tuple[tuple[Generator, ...], int]:
    """Return the rewritten generator list and the phase delta of ``step``."""
    gens = w.gens
    i = step.pos
    if not 0 <= i <= len(gens):
        raise RuleNotApplicable(i, "position out of range")
    states = w.states
    rule, fwd = step.rule, step.dir == "fwd"
    args = step.kwargs

    if rule == "Involution":
        if fwd:
            a, b = _flip_at(gens, i), _flip_at(gens, i + 1)
            if a != b:
                raise PatternMismatch(i, f"F{a} F{b} is not a repeated flip")
            return gens[:i] + gens[i + 2 :], 0
        a = int(args.get("arc", 0))
        S = states[i]
        if not 1 <= a <= S.n_arcs or S.is_self_folded(a):
            raise RuleNotApplicable(i, f"arc {a} is not flippable here")
        return gens[:i] + (Flip(a), Flip(a)) + gens[i:], 0

    if rule == "Commutation":
        a, b = _flip_at(gens, i), _flip_at(gens, i + 1)
        if not commuting_flips(states[i], a, b, commutation):
            raise RuleNotApplicable(i, f"F{a} and F{b} do not commute here")
        return gens[:i] + (Flip(b), Flip(a)) + gens[i + 2 :], 0

    if rule == "Pentagon":
        if fwd:
            arcs = [_flip_at(gens, i + k) for k in range(5)]
            a, b = arcs[0], arcs[1]
            if arcs != [a, b, a, b, a] or a == b:
                raise PatternMismatch(i, f"{' '.join(f'F{x}' for x in arcs)} is not a pentagon word")
            if not pentagon_applicable(states[i], a, b):
                raise RuleNotApplicable(i, f"arcs {a}, {b} do not span a pentagon")
            return gens[:i] + (Perm.transposition(a, b),) + gens[i + 5 :], pentagon_phase(states[i], a, b)
        p = _perm_at(gens, i)
        a, b = (int(x) for x in args.get("arcs", (0, 0)))
        if p != Perm.transposition(a, b):
            raise PatternMismatch(i, f"expected the transposition ({a} {b}), found {p}")
        if not pentagon_applicable(states[i], a, b):
            raise RuleNotApplicable(i, f"arcs {a}, {b} do not span a pentagon")
        fl = (Flip(a), Flip(b))
        return gens[:i] + fl + fl + (Flip(a),) + gens[i + 1 :], -pentagon_phase(states[i], a, b)

    if rule == "PermNaturality":
        if fwd:
            a = _flip_at(gens, i)
            p = _perm_at(gens, i + 1)
            return gens[:i] + (p, Flip(p(a))) + gens[i + 2 :], 0
        p = _perm_at(gens, i)
        b = _flip_at(gens, i + 1)
        return gens[:i] + (Flip(p.inverse()(b)), p) + gens[i + 2 :], 0

    if rule == "PermMerge":
        if fwd:
            p, q = _perm_at(gens, i), _perm_at(gens, i + 1)
            r = p.then(q)
            return gens[:i] + ((r,) if not r.is_identity() else ()) + gens[i + 2 :], 0
        if "perm" not in args:
            raise RuleNotApplicable(i, "backward merge needs the split-off factor 'perm'")
        left = Perm.parse(args["perm"]) if isinstance(args["perm"], str) else args["perm"]
        if left.is_identity():
            raise RuleNotApplicable(i, "cannot split off the identity")
        if i < len(gens) and isinstance(gens[i], Perm):
            rest = left.inverse().then(gens[i])
            tail = gens[i + 1 :]
        else:
            rest = left.inverse()
            tail = gens[i:]
        new = (left,) + ((rest,) if not rest.is_identity() else ())
        try:
            apply_permutation(states[i], left)
        except PermutationOutOfRange as exc:
            raise RuleNotApplicable(i, str(exc)) from None
        return gens[:i] + new + tail, 0

    if rule == "PhaseMove":
        return gens, 0

    raise RuleNotApplicable(i, f"unknown rule {rule!r}")  # pragma: no cover


def _splice_states(w: FlipWord, gens, pos: int) -> list[Triangulation]:
    """States of ``gens`` reusing those of ``w`` outside the rewritten window.

    Every rule preserves the triangulation at the end of its window, so
    only the window itself is recomputed; the junction is checked.
    """
    old, old_states = w.gens, w.states
    n_old, n_new = len(old), len(gens)
    tail = 0
    while tail < min(n_old, n_new) - pos and old[n_old - 1 - tail] == gens[n_new - 1 - tail]:
        tail += 1
    mid = _states(old_states[pos], gens[pos : n_new - tail])
    if not labeled_equal(mid[-1], old_states[n_old - tail]):
        raise RuleNotApplicable(pos, "rewrite changed the target triangulation")
    return old_states[:pos] + mid + old_states[n_old - tail + 1 :]


def apply_rule(w: FlipWord, step: Step, commutation: str = "quadrilateral") -> FlipWord:
    gens, delta = rewrite(w, step, commutation)
    out = FlipWord(w.source, gens, w.zexp + delta, _checked=False)
    pos = min(step.pos, len(out.gens))
    if out.gens[:pos] != w.gens[:pos]:  # pragma: no cover - rules never touch the prefix
        pos = 0
    out.__dict__["states"] = _splice_states(w, out.gens, pos)
    return out


def replay(w: FlipWord, script: ProofScript, commutation: str = "quadrilateral") -> tuple[FlipWord, int]:
    """Apply every step of ``script``; return the final word and the total phase delta."""
    delta = 0
    cur = w
    for k, step in enumerate(script.steps):
        if step.rule == "PhaseMove":
            want = step.kwargs.get("zexp")
            if want is not None and cur.zexp != int(want):
                raise ScriptStepFailed(k, step.rule, f"running exponent is {cur.zexp}, script asserts {want}")
            continue
        try:
            nxt = apply_rule(cur, step, commutation)
        except (RuleNotApplicable, WordNotApplicable) as exc:
            raise ScriptStepFailed(k, step.rule, str(exc)) from None
        delta += nxt.zexp - cur.zexp
        cur = nxt
    return cur, delta


def check_script(w_from: FlipWord, script: ProofScript, w_to: FlipWord, commutation: str = "quadrilateral") -> int:
    final, delta = replay(w_from, script, commutation)
    if final.gens != w_to.gens:
        raise FinalWordMismatch(f"script ends at {final} but {FlipWord(w_to.source, w_to.gens)} was expected")
    return delta
