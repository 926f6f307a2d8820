"""Command-line entry point: ``qptolemy <command> [options]``.

Exit status: 0 on success, 1 when a verification fails, 2 on I/O or format
errors.  Fixture arguments accept a path or a bundled name (``sphere``,
``torus``); bare names are looked up in ``$QPTOLEMY_FIXTURES`` when set.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import __version__
from .catalog import BUILTIN, FIXTURE_ENV, FixtureDataset, load_fixture, validate_fixture
from .errors import (
    FinalWordMismatch,
    FormatError,
    InconsistentSystem,
    NonIntegralCoefficient,
    PtolemyError,
    ScriptStepFailed,
    UnknownTwist,
)
from .extension import (
    DEFAULT_TOL,
    cohomology_class,
    normalize_lifts,
    punctures_of,
    raw_exponents,
    relations_of,
    verify_all,
)
from .reconstruct import DEFAULT_RECONSTRUCT_BUDGET, mirror, reconstruct_triangulation, same_up_to_boundary
from .simplify import DEFAULT_BUDGET, auto_simplify
from .words import FlipWord, ProofScript, parse_gens, replay

OK, FAILED, IO_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    fixtures: list[str] = field(default_factory=list)
    seed: int = 0
    samples: int = 100
    tol: float = DEFAULT_TOL
    budget: int = DEFAULT_BUDGET
    format: str = "text"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.samples < 1:
            raise ValueError("--samples must be at least 1")

    def to_dict(self) -> dict:
        return {"command": self.command, "seed": self.seed, "samples": self.samples,
                "tol": self.tol, "budget": self.budget}


def _emit(cfg: RunConfig, doc: dict, text_lines: list[str]) -> None:
    if cfg.format == "json":
        doc = {"config": cfg.to_dict(), **doc}
        print(json.dumps(doc, indent=1, sort_keys=True))
    else:
        print("\n".join(text_lines))


def _load_all(names) -> list[FixtureDataset]:
    return [load_fixture(n) for n in names]


# -- validate ------------------------------------------------------------------


def cmd_validate(cfg: RunConfig, args) -> int:
    datasets = _load_all(cfg.fixtures)
    status, doc, lines = OK, {"fixtures": []}, []
    for d in datasets:
        rep = validate_fixture(d, seed=cfg.seed, tol=cfg.tol)
        doc["fixtures"].append({
            "name": d.name,
            "hash": d.content_hash,
            "ok": rep.ok,
            "constraints": rep.by_constraint(),
            "failures": [f"{c.constraint} {c.subject}: {c.detail}" for c in rep.failures],
        })
        lines.append(f"{d.name} ({d.content_hash[:12]}): {'pass' if rep.ok else 'FAIL'}")
        for name, ok in rep.by_constraint().items():
            lines.append(f"  {name:<13} {'pass' if ok else 'FAIL'}")
        if not rep.ok:
            first = rep.failures[0]
            lines.append(f"  first failure: {first.constraint} {first.subject}: {first.detail}")
            status = FAILED
        elif args.verbose:
            lines += ["    " + ln for ln in rep.lines()]
    _emit(cfg, doc, lines)
    return status


# -- verify --------------------------------------------------------------------


def cmd_verify(cfg: RunConfig, args) -> int:
    datasets = _load_all(cfg.fixtures)
    kinds = None if (args.all or args.klass) else args.relation
    if kinds is None and not (args.all or args.klass):
        raise FormatError("give --relation NAME, --all or --class")
    reports = verify_all(
        datasets, kinds, samples=cfg.samples, seed=cfg.seed, tol=cfg.tol,
        search=args.search, budget=cfg.budget, statement=args.statement,
    )
    status = OK if all(r.relator_valid for r in reports) else FAILED
    doc = {"fixtures": {d.name: d.content_hash for d in datasets}, "relations": []}
    normalized, k, cls = {}, None, None
    notes = []
    try:
        k, normalized = normalize_lifts(raw_exponents(reports))
    except InconsistentSystem as exc:
        notes.append(f"normalization: {exc}")
        if args.klass:
            status = FAILED
    if args.klass and k is not None:
        lantern_fixture = next((d for d in datasets if any(s.kind == "Lantern" for s in relations_of(d))), None)
        s = args.punctures if args.punctures is not None else punctures_of(lantern_fixture or datasets[0])
        try:
            cls = cohomology_class(normalized, s, k)
        except NonIntegralCoefficient as exc:
            notes.append(f"class: {exc}")
            status = FAILED

    lines = [f"{'relation':<9} {'fixture':<18} {'valid':<6} {'residual':<9} {'zexp':>5} {'normalized':>10}"]
    for r in reports:
        norm = normalized.get(r.kind) if r.relator_valid else None
        entry = r.to_dict()
        entry.update(relation=r.kind, valid=r.relator_valid, residual=entry.pop("oracle_residual"),
                     zexp=r.z_exponent, normalized=norm)
        for key in ("kind", "relator_valid", "z_exponent"):
            entry.pop(key)
        doc["relations"].append(entry)
        res = "-" if r.oracle_residual == float("inf") else f"{r.oracle_residual:.1e}"
        z = "-" if r.z_exponent is None else str(r.z_exponent)
        nz = "-" if norm is None else str(norm)
        flag = " *" if r.derived else ""
        lines.append(f"{r.kind:<9} {r.fixture:<18} {'yes' if r.relator_valid else 'NO':<6} {res:<9} {z:>5} {nz:>10}{flag}")
        if r.orientation_note:
            notes.append(f"{r.kind}: {r.orientation_note}")
        if r.phases_agree is not None:
            notes.append(f"{r.kind}: script {r.script_zexp}, search {r.search_zexp}"
                         f" ({'agree' if r.phases_agree else 'DISAGREE'})")
        for e in r.errors:
            notes.append(f"{r.kind}: {e}")
    if k is not None:
        doc["normalization"] = {"k": k}
        lines.append(f"lift shift k = {k}")
    if cls is not None:
        doc["class"] = {**cls.to_dict(), "line": cls.line()}
        lines.append(cls.line())
    if notes:
        doc["notes"] = notes
        lines += ["", *notes]
    if any(r.derived for r in reports):
        lines.append("* no dedicated fixture; exponent carried over from another relation")
    _emit(cfg, doc, lines)
    return status


# -- script ----------------------------------------------------------------------


def _word_arg(d: FixtureDataset, text: str, zexp: int | None = None) -> FlipWord:
    """A reference (``Db``, ``Db@reduced``, ``relator:Chain``) or literal word text."""
    try:
        return d.resolve(text, zexp)
    except UnknownTwist:
        pass
    if text.lstrip().startswith(("F", "P", "z")):
        body = text.strip()
        z = 0
        if body.startswith("z^"):
            head, _, body = body.partition(" ")
            z = int(head[2:])
        return FlipWord(d.triangulation, parse_gens(body), z)
    raise UnknownTwist(f"{text!r} is neither a reference nor a word")


def cmd_script(cfg: RunConfig, args) -> int:
    (fx,) = cfg.fixtures[:1] or [BUILTIN["torus"]]
    d = load_fixture(fx)
    if args.script_file:
        with open(args.script_file) as fh:
            script = ProofScript.from_dict(json.load(fh))
        entry = None
    else:
        if args.script not in d.scripts:
            raise UnknownTwist(f"no script {args.script!r} on {d.name}; have {', '.join(d.scripts)}")
        entry = d.scripts[args.script]
        script = entry.script
    src_ref = args.from_word or (entry.source if entry else None)
    dst_ref = args.to_word or (entry.target if entry else None)
    if src_ref is None:
        raise FormatError("--from is required with --script-file")
    start = _word_arg(d, src_ref)
    doc = {"fixture": d.name, "hash": d.content_hash, "script": args.script or args.script_file,
           "from": str(start), "steps": len(script)}
    final, delta = replay(start, script)
    doc.update(to=str(final), delta=delta)
    lines = [f"{d.name}: {len(script)} steps", f"from {start}", f"to   {final}", f"phase delta {delta}"]
    if dst_ref is not None:
        want = _word_arg(d, dst_ref)
        if final.gens != want.gens:
            raise FinalWordMismatch(f"script ends at {final} but {FlipWord(want.source, want.gens)} was expected")
    _emit(cfg, doc, lines)
    return OK


# -- reconstruct -----------------------------------------------------------------


def cmd_reconstruct(cfg: RunConfig, args) -> int:
    d = load_fixture(cfg.fixtures[0]) if cfg.fixtures else None
    if args.word:
        words = list(args.word)
        n, genus, punct, bd = args.arcs, args.genus, args.punctures, args.boundary
        if n is None or genus is None or punct is None:
            raise FormatError("--word needs --arcs, --genus and --punctures")
    elif d is not None:
        words = [" ".join(t.word.gen_strings()) for t in d.twists.values()]
        T = d.triangulation
        n, genus, punct, bd = T.n_arcs, T.genus, T.punctures, T.boundary
    else:
        raise FormatError("give --fixture or --word")
    budget = args.budget if args.budget is not None else DEFAULT_RECONSTRUCT_BUDGET
    cands = reconstruct_triangulation(words, n, genus, punct, bd or 0, budget=budget, seed=cfg.seed)
    doc = {"arcs": n, "words": words, "candidates": []}
    lines = [f"{len(cands)} candidate(s) on {n} arcs"]
    for i, T in enumerate(cands):
        item = {"triangles": [list(t) for t in T.triangles]}
        tag = ""
        if d is not None and not args.word:
            item["matches_fixture"] = same_up_to_boundary(T, d.triangulation)
            item["mirror_of_fixture"] = same_up_to_boundary(mirror(T), d.triangulation)
            tag = " = fixture" if item["matches_fixture"] else (" = mirror" if item["mirror_of_fixture"] else "")
            if args.phases:
                item["phases"] = _candidate_phases(d, T, item["mirror_of_fixture"])
                tag += f"  phases {item['phases']}"
        doc["candidates"].append(item)
        lines.append(f"  [{i}] {[tuple(t) for t in T.triangles]}{tag}")
    _emit(cfg, doc, lines)
    return OK if cands else FAILED


def _candidate_phases(d: FixtureDataset, T, flipped: bool = False) -> dict[str, int | None]:
    """Relator exponents on a candidate, replaying the fixture's own scripts.

    Stored twist exponents come from pentagon phases, so a mirror candidate
    takes them with the opposite sign.
    """
    sign = -1 if flipped else 1
    alt = FixtureDataset(d.name, T, {}, {}, d.relations, d.scripts)
    for name, t in d.twists.items():
        alt.twists[name] = type(t)(name, FlipWord(T, t.word.gens, sign * t.word.zexp), d.name, t.ad)
    out = {}
    for spec in relations_of(alt):
        if not spec.script:
            continue
        try:
            final, _ = replay(alt.resolve(f"relator:{spec.kind}"), alt.scripts[spec.script].script)
            out[spec.kind] = final.zexp if not final.gens else None
        except PtolemyError:
            out[spec.kind] = None
    return out


# -- simplify ----------------------------------------------------------------------


def cmd_simplify(cfg: RunConfig, args) -> int:
    (fx,) = cfg.fixtures[:1] or [BUILTIN["torus"]]
    d = load_fixture(fx)
    w = _word_arg(d, args.word)
    res = auto_simplify(w, cfg.budget, commutation=args.commutation)
    doc = {"fixture": d.name, "hash": d.content_hash, "from": str(w), "to": str(res.word),
           "delta": res.delta, "steps": len(res.script), "expanded": res.expanded, "exhausted": res.exhausted}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(res.script.to_dict(), fh, indent=1)
        doc["script_file"] = args.out
    lines = [f"from {w}", f"to   {res.word}", f"phase delta {res.delta}, {len(res.script)} steps,"
             f" {res.expanded} expansions" + (" (budget exhausted)" if res.exhausted else "")]
    _emit(cfg, doc, lines)
    return FAILED if res.exhausted else OK


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fixture", action="append", default=None,
                        help=f"fixture path or bundled name (default: all; directory from ${FIXTURE_ENV})")
    common.add_argument("--seed", type=int, default=0, help="seed of the shear oracle and searches")
    common.add_argument("--samples", type=int, default=100, help="random shear vectors per oracle check")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative tolerance of the oracle")
    common.add_argument("--budget", type=int, default=None, help="search budget")
    common.add_argument("--format", choices=("text", "json"), default="text")

    ap = argparse.ArgumentParser(prog="qptolemy", description="Flip words, relators and their central exponents.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="certify fixture datasets")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("verify", parents=[common], help="verify relations and their exponents")
    p.add_argument("--relation", action="append", help="relation kind (repeatable)")
    p.add_argument("--all", action="store_true", help="every relation on the fixtures")
    p.add_argument("--class", dest="klass", action="store_true", help="print the extension class")
    p.add_argument("--search", action="store_true", help="also reduce by search and compare")
    p.add_argument("--statement", action="store_true", help="also reduce relations in their statement orientation")
    p.add_argument("--punctures", type=int, default=None, help="puncture count s for the class line")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("script", parents=[common], help="replay a proof script")
    p.add_argument("--script", help="name of a bundled script")
    p.add_argument("--script-file", help="script JSON file")
    p.add_argument("--from", dest="from_word", help="start word: reference or word text")
    p.add_argument("--to", dest="to_word", help="expected end word: reference or word text")
    p.set_defaults(func=cmd_script)

    p = sub.add_parser("reconstruct", parents=[common], help="search for triangulations carrying the words")
    p.add_argument("--word", action="append", help="word skeleton (repeatable); default: the fixture's twists")
    p.add_argument("--arcs", type=int)
    p.add_argument("--genus", type=int)
    p.add_argument("--punctures", type=int)
    p.add_argument("--boundary", type=int, default=0)
    p.add_argument("--phases", action="store_true", help="replay relation scripts on every candidate")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("simplify", parents=[common], help="shorten a word by the rewrite rules")
    p.add_argument("--word", required=True, help="reference or word text")
    p.add_argument("--commutation", choices=("quadrilateral", "endpoint"), default="quadrilateral")
    p.add_argument("--out", help="write the script to this file")
    p.set_defaults(func=cmd_simplify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    fixtures = args.fixture
    if fixtures is None:
        fixtures = [] if args.command in ("reconstruct",) else list(BUILTIN)
        if args.command in ("script", "simplify"):
            fixtures = ["torus"]
    budget = args.budget if args.budget is not None else DEFAULT_BUDGET
    try:
        cfg = RunConfig(args.command, fixtures, args.seed, args.samples, args.tol, budget, args.format)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO_ERROR
    try:
        return args.func(cfg, args)
    except (FileNotFoundError, IsADirectoryError, PermissionError, FormatError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO_ERROR
    except (ScriptStepFailed, FinalWordMismatch) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return FAILED
    except PtolemyError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
