"""Dehn-twist words and the fixture datasets that carry them.

A fixture is one JSON document holding a triangulation, its twist words,
alternative expressions of those twists, the relations among them and the
proof scripts connecting everything.  Fixtures are data: nothing here
trusts them until :func:`validate_fixture` has passed.

Script endpoints are named by references:

``Da``           the canonical word of twist ``Da`` (with its exponent)
``Da@reduced``   the alternative expression ``reduced`` of ``Da``
``relator:Chain``  the relator ``lhs . invert(rhs)`` of a relation
``identity``     the empty word; the script's ``zexp`` gives its exponent
``X/Y``          the quotient ``X . invert(Y)`` of two of the above
"""
from __future__ import annotations

import copy
import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import (
    FormatError,
    NotTwoArcConfiguration,
    PtolemyError,
    UnknownTwist,
)
from .perm import Perm
from .shear import same_action
from .triangulation import Triangulation, apply_permutation, check_triangulation, flip, labeled_equal
from .words import Flip, FlipWord, ProofScript, compose, expand_ad, identity, invert, parse_gens, replay

FORMAT_VERSION = 1
FIXTURE_ENV = "QPTOLEMY_FIXTURES"
BUILTIN = {"sphere": "four-holed-sphere.json", "torus": "two-holed-torus.json"}

CONSTRAINTS = ("triangulation", "applicable", "closes", "construction", "replays", "equivalent")


@dataclass(frozen=True)
class TwistEntry:
    name: str
    word: FlipWord
    fixture: str = ""
    # (prefix, a, b) when the word is Ad(prefix) F_b (a b)
    ad: tuple[str, int, int] | None = None


@dataclass(frozen=True)
class TwistForm:
    """Another expression of a twist; ``word`` includes its z exponent."""

    twist: str
    name: str
    word: FlipWord
    script: str | None = None


@dataclass(frozen=True)
class ScriptEntry:
    name: str
    source: str
    target: str
    script: ProofScript
    zexp: int | None = None  # exponent of the target when it is ``identity``


@dataclass
class FixtureDataset:
    name: str
    triangulation: Triangulation
    twists: dict[str, TwistEntry]
    forms: dict[str, TwistForm] = field(default_factory=dict)
    relations: list[dict] = field(default_factory=list)
    scripts: dict[str, ScriptEntry] = field(default_factory=dict)
    description: str = ""
    content_hash: str = ""

    # -- lookup ----------------------------------------------------------

    def twist(self, name: str) -> TwistEntry:
        try:
            return self.twists[name]
        except KeyError:
            raise UnknownTwist(f"no twist {name!r} on fixture {self.name!r}") from None

    def relation(self, kind: str) -> dict:
        for r in self.relations:
            if r["kind"].lower() == kind.lower():
                return r
        raise UnknownTwist(f"no relation {kind!r} on fixture {self.name!r}")

    def resolve(self, ref: str, zexp: int | None = None) -> FlipWord:
        """The word named by a script reference."""
        if ref == "identity":
            return FlipWord(self.triangulation, (), zexp or 0)
        if "/" in ref:
            left, right = ref.split("/", 1)
            return compose(self.resolve(left), invert(self.resolve(right)))
        if ref.startswith("relator:"):
            r = self.relation(ref.split(":", 1)[1])
            return relator_word(self, r["lhs"], r["rhs"])
        if "@" in ref:
            if ref not in self.forms:
                raise UnknownTwist(f"no expression {ref!r} on fixture {self.name!r}")
            return self.forms[ref].word
        return self.twist(ref).word

    # -- serialization ---------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict, content_hash: str = "") -> "FixtureDataset":
        """Parse a fixture document; words are not checked here."""
        try:
            if d.get("format_version") != FORMAT_VERSION:
                raise FormatError(f"unsupported format_version {d.get('format_version')!r}")
            td = d["triangulation"]
            T = Triangulation(
                tuple(tuple(t) for t in td["triangles"]),
                td.get("genus"),
                td.get("punctures"),
                td.get("boundary", 0),
                validate=False,
            )
            name = d.get("name", "")
            twists, forms = {}, {}
            for e in d["twists"]:
                w = FlipWord(T, parse_gens(e["word"]), int(e.get("zexp", 0)), _checked=False)
                ad = e.get("ad")
                ad = (ad["prefix"], int(ad["a"]), int(ad["b"])) if ad else None
                twists[e["name"]] = TwistEntry(e["name"], w, name, ad)
                for f in e.get("forms", []):
                    fw = FlipWord(T, parse_gens(f["word"]), int(f.get("zexp", 0)), _checked=False)
                    key = f"{e['name']}@{f['name']}"
                    forms[key] = TwistForm(e["name"], f["name"], fw, f.get("script"))
            scripts = {}
            for s in d.get("scripts", []):
                scripts[s["name"]] = ScriptEntry(
                    s["name"], s["from"], s["to"], ProofScript.from_dict(s["steps"]), s.get("zexp")
                )
            relations = [dict(r) for r in d.get("relations", [])]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"malformed fixture: {exc!r}") from None
        return cls(name, T, twists, forms, relations, scripts, d.get("description", ""), content_hash)

    def to_dict(self) -> dict:
        twists = []
        for t in self.twists.values():
            e = {"name": t.name, "word": " ".join(t.word.gen_strings()), "zexp": t.word.zexp}
            if t.ad:
                e["ad"] = {"prefix": t.ad[0], "a": t.ad[1], "b": t.ad[2]}
            fs = [f for f in self.forms.values() if f.twist == t.name]
            if fs:
                e["forms"] = [
                    {"name": f.name, "word": " ".join(f.word.gen_strings()), "zexp": f.word.zexp, "script": f.script}
                    for f in fs
                ]
            twists.append(e)
        scripts = []
        for s in self.scripts.values():
            e = {"name": s.name, "from": s.source, "to": s.target}
            if s.zexp is not None:
                e["zexp"] = s.zexp
            e["steps"] = [st.to_dict() for st in s.script.steps]
            scripts.append(e)
        return {
            "format_version": FORMAT_VERSION,
            "name": self.name,
            "description": self.description,
            "triangulation": self.triangulation.to_dict(),
            "twists": twists,
            "relations": self.relations,
            "scripts": scripts,
        }


_SCALAR_ARRAY = re.compile(r"\[\s*([^\[\]{}\"]*?|(?:\s*\"[^\"]*\",?)+)\s*\]")


def dumps_fixture(d: FixtureDataset) -> str:
    """JSON text with one script step per line."""
    doc = d.to_dict()
    steps = {s["name"]: s.pop("steps") for s in doc["scripts"]}
    for s in doc["scripts"]:
        s["steps"] = f"@@{s['name']}@@"
    text = _SCALAR_ARRAY.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]",
                             json.dumps(doc, indent=1))
    for name, st in steps.items():
        body = ",\n    ".join(json.dumps(x, separators=(",", ":")) for x in st)
        text = text.replace(f'"@@{name}@@"', f"[\n    {body}\n   ]" if st else "[]")
    return text + "\n"


def loads_fixture(text: str) -> FixtureDataset:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"fixture is not valid JSON: {exc}") from None
    return FixtureDataset.from_dict(doc, hashlib.sha256(text.encode()).hexdigest())


def load_fixture(path: str | Path) -> FixtureDataset:
    """Load a fixture file; bare names resolve against the fixture directory."""
    return loads_fixture(Path(fixture_path(path)).read_text())


def fixture_dir() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("qptolemy") / "data"))


def fixture_path(name: str | Path) -> Path:
    p = Path(name)
    if p.exists():
        return p
    key = BUILTIN.get(str(name), str(name))
    cand = fixture_dir() / key
    if cand.exists():
        return cand
    if not key.endswith(".json") and (fixture_dir() / f"{key}.json").exists():
        return fixture_dir() / f"{key}.json"
    raise FileNotFoundError(f"no fixture {name!s}")


# -- twist constructors ------------------------------------------------------


def elementary_twist(T: Triangulation, a: int, b: int) -> FlipWord:
    """``F_b (a b)``: the twist about the curve crossing exactly arcs ``a`` and ``b``.

    The curve crosses only ``a`` and ``b`` when the two triangles on either
    side of ``b`` both contain ``a``, so ``a`` and ``b`` cobound an annulus
    made of those two triangles.  Flipping ``b`` then rotates the annulus by
    one step, and the transposition restores the labels.
    """
    if a == b:
        raise NotTwoArcConfiguration("the two arcs must differ")
    for x in (a, b):
        if not 1 <= x <= T.n_arcs:
            raise NotTwoArcConfiguration(f"arc {x} not in 1..{T.n_arcs}")
    if T.is_self_folded(a) or T.is_self_folded(b):
        raise NotTwoArcConfiguration(f"arcs {a} and {b} must not be self-folded")
    tb, ta = T.triangles_of(b), set(T.triangles_of(a))
    if set(tb) != ta:
        raise NotTwoArcConfiguration(f"arcs {a} and {b} do not cobound a two-triangle annulus")
    p = Perm.transposition(a, b)
    if not labeled_equal(apply_permutation(flip(T, b), p), T):
        raise NotTwoArcConfiguration(f"flipping {b} does not rotate an annulus onto itself")
    return FlipWord(T, (Flip(b), p))


def conjugated_twist(prefix: FlipWord, a: int, b: int) -> FlipWord:
    """``Ad(prefix) F_b (a b)`` as a word on the source of ``prefix``."""
    return expand_ad(prefix, elementary_twist(prefix.target, a, b))


def relator_word(d: FixtureDataset, lhs, rhs) -> FlipWord:
    """``lhs . invert(rhs)``, each side the product of its twists in written order."""
    def product(names):
        out = identity(d.triangulation)
        for n in names:
            out = compose(out, d.twist(n).word)
        return out

    return compose(product(lhs), invert(product(rhs)))


# -- validation ----------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    constraint: str
    subject: str
    ok: bool
    detail: str = ""


@dataclass
class FixtureReport:
    fixture: str
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def by_constraint(self) -> dict[str, bool]:
        out = {}
        for c in self.checks:
            out[c.constraint] = out.get(c.constraint, True) and c.ok
        return out

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            mark = "ok  " if c.ok else "FAIL"
            out.append(f"{mark} {c.constraint:<13} {c.subject}" + (f": {c.detail}" if c.detail else ""))
        return out


def _word_state(w: FlipWord):
    try:
        return w.states, ""
    except PtolemyError as exc:
        return None, str(exc)


def validate_fixture(d: FixtureDataset, samples: int = 20, seed: int = 0, tol: float = 1e-9) -> FixtureReport:
    """Certify a fixture against every constraint the text supplies.

    * ``triangulation``: the triples form a valid triangulation
    * ``applicable``: every flip of every word is legal at its step
    * ``closes``: every twist word and expression returns the triangulation
    * ``construction``: twists recorded as ``Ad(prefix) F_b (a b)`` rebuild
    * ``replays``: every script replays step by step
    * ``equivalent``: every script ends exactly at its claimed target, and
      every expression acts on shear coordinates like its twist

    Failures are collected rather than raised.
    """
    checks: list[Check] = []

    def add(constraint, subject, ok, detail=""):
        checks.append(Check(constraint, subject, bool(ok), detail))

    try:
        check_triangulation(d.triangulation)
        add("triangulation", d.name, True)
    except PtolemyError as exc:
        add("triangulation", d.name, False, str(exc))
        return FixtureReport(d.name, checks)
    T = Triangulation(d.triangulation.triangles, d.triangulation.genus, d.triangulation.punctures,
                      d.triangulation.boundary)

    words: dict[str, FlipWord] = {}
    for name, t in d.twists.items():
        words[name] = FlipWord(T, t.word.gens, t.word.zexp, _checked=False)
    for key, f in d.forms.items():
        words[key] = FlipWord(T, f.word.gens, f.word.zexp, _checked=False)

    good: dict[str, FlipWord] = {}
    for name, w in words.items():
        states, err = _word_state(w)
        add("applicable", name, states is not None, err)
        if states is None:
            continue
        closes = labeled_equal(states[-1], T)
        add("closes", name, closes, "" if closes else "the word does not return the triangulation")
        if closes:
            good[name] = w

    for name, t in d.twists.items():
        if t.ad is None:
            continue
        prefix, a, b = t.ad
        try:
            built = conjugated_twist(FlipWord(T, parse_gens(prefix)), a, b)
            ok = built.gens == words[name].gens
            add("construction", name, ok, "" if ok else f"Ad form rebuilds to {built}")
        except PtolemyError as exc:
            add("construction", name, False, str(exc))

    ds = FixtureDataset(d.name, T, {n: TwistEntry(n, words[n], d.name, t.ad) for n, t in d.twists.items()},
                        d.forms, d.relations, d.scripts)
    for name, s in d.scripts.items():
        try:
            start = ds.resolve(s.source)
            want = ds.resolve(s.target, s.zexp)
            start = FlipWord(T, start.gens, start.zexp)
        except PtolemyError as exc:
            add("replays", name, False, f"cannot build endpoints: {exc}")
            continue
        try:
            final, _ = replay(start, s.script)
        except PtolemyError as exc:
            add("replays", name, False, str(exc))
            continue
        add("replays", name, True, f"{len(s.script)} steps")
        ok = final.gens == want.gens and final.zexp == want.zexp
        add("equivalent", name, ok, "" if ok else f"ends at {final}, expected {want}")

    for key, f in d.forms.items():
        if key not in good or f.twist not in good:
            continue
        res = same_action(good[f.twist], good[key], samples=samples, seed=seed)
        add("equivalent", f"{key} action", res < tol, f"shear residual {res:.2e}")
        if f.script is not None and f.script not in d.scripts:
            add("equivalent", key, False, f"names the missing script {f.script!r}")

    for r in d.relations:
        if r.get("script") and r["script"] not in d.scripts:
            add("replays", f"relation {r['kind']}", False, f"names the missing script {r['script']!r}")

    return FixtureReport(d.name, checks)


# -- mutation suite ------------------------------------------------------------


def mutants(doc: dict) -> list[tuple[str, dict]]:
    """Single-label mutations of a fixture document.

    Each mutant changes exactly one label: the first two labels of one
    triangle are swapped, one flip in a twist word is retargeted, or one
    arc label inside a triangle is replaced by a neighbouring arc.
    """
    out = []
    tris = doc["triangulation"]["triangles"]
    n = doc["triangulation"].get("arcs") or max(max(t) for t in tris)
    for i, t in enumerate(tris):
        m = copy.deepcopy(doc)
        m["triangulation"]["triangles"][i] = [t[1], t[0], t[2]]
        out.append((f"swap sides in triangle {i}", m))
    for i, t in enumerate(tris):
        k = next(j for j in range(3) if t[j] > 0)
        m = copy.deepcopy(doc)
        m["triangulation"]["triangles"][i][k] = t[k] % n + 1
        out.append((f"relabel arc {t[k]} in triangle {i}", m))
    for e_idx, e in enumerate(doc["twists"]):
        toks = e["word"].split()
        for k, tok in enumerate(toks):
            if tok.startswith("F"):
                a = int(tok[1:])
                m = copy.deepcopy(doc)
                toks2 = list(toks)
                toks2[k] = f"F{a % n + 1}"
                m["twists"][e_idx]["word"] = " ".join(toks2)
                out.append((f"retarget {tok} in {e['name']}", m))
                break
    return out


def builtin_documents() -> dict[str, dict]:
    return {k: json.loads(fixture_path(k).read_text()) for k in BUILTIN}


__all__ = [
    "BUILTIN",
    "CONSTRAINTS",
    "Check",
    "FIXTURE_ENV",
    "FORMAT_VERSION",
    "FixtureDataset",
    "FixtureReport",
    "ScriptEntry",
    "TwistEntry",
    "TwistForm",
    "builtin_documents",
    "conjugated_twist",
    "dumps_fixture",
    "elementary_twist",
    "fixture_dir",
    "fixture_path",
    "load_fixture",
    "loads_fixture",
    "mutants",
    "relator_word",
    "validate_fixture",
]
