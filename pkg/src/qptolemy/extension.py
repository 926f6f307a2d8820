"""Relators of the mapping class group relations and their central exponents.

Each relation ``lhs = z^k rhs`` is checked through its relator
``lhs . invert(rhs)``: the word must close up, fix random shear vectors,
and reduce to ``z^k`` by its bundled script (and, when asked, by search).
The exponents then feed the lift normalization and the class bookkeeping.

Class dictionary, as used here and not re-derived: after normalization by
the per-twist shift ``k`` the extension is generated by ``w = z^k``; the
chain exponent divided by ``k`` is the coefficient of chi and the puncture
exponent divided by ``k`` is the coefficient of each Euler class.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import asdict, dataclass, field

from .catalog import FixtureDataset, relator_word
from .errors import (
    InconsistentSystem,
    NonIntegralCoefficient,
    PtolemyError,
    UnknownTwist,
)
from .shear import identity_residual
from .simplify import DEFAULT_BUDGET, auto_simplify
from .words import FlipWord, replay

RELATION_KINDS = ("Braid0", "Braid1", "Lantern", "Chain", "Puncture")
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class RelationSpec:
    kind: str
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]
    zexp: int | None = None  # claimed exponent, if the fixture states one
    script: str | None = None
    derived_from: str | None = None
    note: str = ""
    statement: tuple[tuple[str, ...], tuple[str, ...]] | None = None

    def __post_init__(self):
        if self.kind not in RELATION_KINDS:
            raise ValueError(f"unknown relation kind {self.kind!r}")

    @property
    def lhs_count(self) -> int:
        return len(self.lhs)

    @property
    def rhs_count(self) -> int:
        return len(self.rhs)

    @classmethod
    def from_dict(cls, r: Mapping) -> "RelationSpec":
        st = r.get("statement")
        return cls(
            r["kind"],
            tuple(r["lhs"]),
            tuple(r["rhs"]),
            r.get("zexp"),
            r.get("script"),
            r.get("derived_from"),
            r.get("note", ""),
            (tuple(st["lhs"]), tuple(st["rhs"])) if st else None,
        )


def relations_of(d: FixtureDataset) -> list[RelationSpec]:
    return [RelationSpec.from_dict(r) for r in d.relations]


def find_relation(datasets: Iterable[FixtureDataset], kind: str) -> tuple[RelationSpec, FixtureDataset]:
    for d in datasets:
        for spec in relations_of(d):
            if spec.kind.lower() == kind.lower():
                return spec, d
    raise UnknownTwist(f"no fixture carries the relation {kind!r}")


def build_relator(spec: RelationSpec, d: FixtureDataset) -> FlipWord:
    """``lhs . invert(rhs)``; an automorphism word when the relation holds."""
    return relator_word(d, spec.lhs, spec.rhs)


@dataclass
class RelationReport:
    kind: str
    fixture: str
    relator_valid: bool
    oracle_residual: float
    z_exponent: int | None
    orientation_note: str = ""
    lhs_count: int = 0
    rhs_count: int = 0
    script_zexp: int | None = None
    search_zexp: int | None = None
    statement_zexp: int | None = None
    derived: bool = False
    length: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def phases_agree(self) -> bool | None:
        if self.script_zexp is None or self.search_zexp is None:
            return None
        return self.script_zexp == self.search_zexp

    def to_dict(self) -> dict:
        out = asdict(self)
        if not math.isfinite(out["oracle_residual"]):
            out["oracle_residual"] = None
        return out


def _search_phase(w: FlipWord, budget: int) -> int | None:
    res = auto_simplify(w, budget)
    return res.word.zexp if not res.word.gens else None


def verify_relation(
    spec: RelationSpec,
    d: FixtureDataset,
    scripts=None,
    samples: int = 100,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    search: bool = False,
    budget: int = DEFAULT_BUDGET,
    statement: bool = False,
) -> RelationReport:
    """Check one relation; failures are recorded in the report, not raised.

    The exponent is taken from the bundled script (``scripts`` overrides the
    fixture's own), or from the search when there is no script.  With
    ``search`` both paths run and the report records whether they agree.
    With ``statement`` the relation is also reduced in the orientation of
    its statement, when the fixture records one.
    """
    if spec.derived_from:
        return _derived(spec, d, scripts, samples, seed, tol, search, budget)
    rep = RelationReport(spec.kind, d.name, False, math.inf, None, spec.note,
                         spec.lhs_count, spec.rhs_count)
    try:
        w = build_relator(spec, d)
    except PtolemyError as exc:
        rep.errors.append(f"relator: {exc}")
        return rep
    rep.length = len(w)
    if not w.is_automorphism():
        rep.errors.append("relator does not close up")
        return rep
    rep.oracle_residual = identity_residual(w, samples, seed)
    if not rep.oracle_residual < tol:
        rep.errors.append(f"shear residual {rep.oracle_residual:.3e} exceeds {tol:g}")

    table = scripts if scripts is not None else {k: v.script for k, v in d.scripts.items()}
    script = table.get(spec.script) if spec.script else None
    if script is not None:
        try:
            final, _ = replay(w, script)
            if final.gens:
                rep.errors.append(f"script ends at {final}, not at a scalar")
            else:
                rep.script_zexp = final.zexp
        except PtolemyError as exc:
            rep.errors.append(f"script: {exc}")
    if search or script is None:
        rep.search_zexp = _search_phase(w, budget)
        if rep.search_zexp is None:
            rep.errors.append("search did not reach a scalar within the budget")
    rep.z_exponent = rep.script_zexp if rep.script_zexp is not None else rep.search_zexp
    if rep.phases_agree is False:
        rep.errors.append(f"script gives {rep.script_zexp}, search gives {rep.search_zexp}")
    if spec.zexp is not None and rep.z_exponent is not None and rep.z_exponent != spec.zexp:
        rep.errors.append(f"fixture claims {spec.zexp}, reduction gives {rep.z_exponent}")

    if statement and spec.statement:
        lhs, rhs = spec.statement
        try:
            rep.statement_zexp = _search_phase(relator_word(d, lhs, rhs), budget)
        except PtolemyError as exc:
            rep.errors.append(f"statement orientation: {exc}")
    if spec.statement:
        s_lhs, s_rhs = (" ".join(x) for x in spec.statement)
        shown = "not computed" if rep.statement_zexp is None else f"z^{rep.statement_zexp}"
        rep.orientation_note = (
            f"derivation {' '.join(spec.lhs)} = z^{rep.z_exponent} {' '.join(spec.rhs)}; "
            f"statement {s_lhs} vs {s_rhs}: {shown}"
        )
    rep.relator_valid = not rep.errors and rep.z_exponent is not None
    if not rep.relator_valid:
        rep.z_exponent = None
    return rep


def _derived(spec, d, scripts, samples, seed, tol, search, budget) -> RelationReport:
    src = next((s for s in relations_of(d) if s.kind == spec.derived_from), None)
    rep = RelationReport(spec.kind, d.name, False, math.inf, None, spec.note,
                         spec.lhs_count, spec.rhs_count, derived=True)
    if src is None:
        rep.errors.append(f"relation {spec.derived_from!r} is not on the fixture")
        return rep
    base = verify_relation(src, d, scripts, samples, seed, tol, search, budget)
    rep.oracle_residual = base.oracle_residual
    rep.script_zexp, rep.search_zexp = base.script_zexp, base.search_zexp
    rep.errors = [f"{spec.derived_from}: {e}" for e in base.errors]
    rep.relator_valid = base.relator_valid
    rep.z_exponent = base.z_exponent
    if spec.zexp is not None and rep.z_exponent is not None and rep.z_exponent != spec.zexp:
        rep.errors.append(f"fixture claims {spec.zexp}, {spec.derived_from} gives {rep.z_exponent}")
        rep.relator_valid, rep.z_exponent = False, None
    rep.orientation_note = f"{spec.note} ({spec.derived_from} exponent, twist counts {spec.lhs_count}/{spec.rhs_count})"
    return rep


# -- normalization and class -----------------------------------------------------


def normalize_lifts(raw: Mapping[str, tuple[int, int, int]]) -> tuple[int, dict[str, int]]:
    """Per-twist shift ``k`` that makes the lantern exponent vanish.

    ``raw`` maps relation name to ``(exponent, lhs count, rhs count)``.
    Rescaling every twist lift by ``z^k`` moves an exponent to
    ``exponent + k * (lhs count - rhs count)``.
    """
    key = {name.lower(): name for name in raw}
    for name, (e, _, _) in raw.items():
        if name.lower().startswith("braid") and e != 0:
            raise InconsistentSystem(f"braid relation {name} has exponent {e}; lifts must braid trivially")
    if "lantern" not in key:
        raise InconsistentSystem("no lantern exponent to normalize against")
    e, lc, rc = raw[key["lantern"]]
    delta = lc - rc
    if delta == 0:
        if e != 0:
            raise InconsistentSystem("lantern twist counts agree, so no shift can cancel its exponent")
        k = 0
    elif e % delta:
        raise InconsistentSystem(f"lantern exponent {e} is not a multiple of {delta}")
    else:
        k = -e // delta
    return k, {name: e + k * (lc - rc) for name, (e, lc, rc) in raw.items()}


@dataclass(frozen=True)
class ExtensionClass:
    w_exponent: int
    chi: int
    euler: tuple[int, ...]

    @property
    def degenerate(self) -> bool:
        return self.w_exponent == 0

    def line(self) -> str:
        def term(c, sym):
            return sym if c == 1 else f"{c}·{sym}"

        parts = [term(self.chi, "chi")] + [term(c, f"e_{i + 1}") for i, c in enumerate(self.euler)]
        w = f"z^{{{self.w_exponent}}}"
        return " + ".join(parts) + f" over A = <{w}>" + (" (degenerate)" if self.degenerate else "")

    def to_dict(self) -> dict:
        return {"w": f"z^{self.w_exponent}", "chi": self.chi, "euler": list(self.euler), "degenerate": self.degenerate}


def cohomology_class(normalized: Mapping[str, int], s: int, k: int) -> ExtensionClass:
    """Coefficients of chi and of the ``s`` Euler classes in units of ``w = z^k``."""
    lower = {n.lower(): v for n, v in normalized.items()}
    chain, punct = lower.get("chain", 0), lower.get("puncture", 0)
    if k == 0:
        if chain or punct:
            raise NonIntegralCoefficient("w = z^0 cannot express nonzero exponents")
        return ExtensionClass(0, 0, (0,) * s)
    for name, v in (("chain", chain), ("puncture", punct)):
        if v % k:
            raise NonIntegralCoefficient(f"{name} exponent {v} is not a multiple of {k}")
    return ExtensionClass(k, chain // k, (punct // k,) * s)


def raw_exponents(reports: Iterable[RelationReport]) -> dict[str, tuple[int, int, int]]:
    out = {}
    for r in reports:
        if r.relator_valid and r.kind not in out:
            out[r.kind] = (r.z_exponent, r.lhs_count, r.rhs_count)
    return out


def verify_all(
    datasets: Iterable[FixtureDataset],
    kinds: Iterable[str] | None = None,
    **kwargs,
) -> list[RelationReport]:
    """Reports for every requested relation on every fixture, sorted by name."""
    want = {k.lower() for k in kinds} if kinds else None
    out = []
    for d in datasets:
        for spec in relations_of(d):
            if want is None or spec.kind.lower() in want:
                out.append(verify_relation(spec, d, **kwargs))
    if want:
        missing = want - {r.kind.lower() for r in out}
        if missing:
            raise UnknownTwist(f"no fixture carries {', '.join(sorted(missing))}")
    return sorted(out, key=lambda r: (r.kind, r.fixture))


def punctures_of(d: FixtureDataset) -> int:
    return d.triangulation.punctures or 0


__all__ = [
    "DEFAULT_TOL",
    "ExtensionClass",
    "RELATION_KINDS",
    "RelationReport",
    "RelationSpec",
    "build_relator",
    "cohomology_class",
    "find_relation",
    "normalize_lifts",
    "punctures_of",
    "raw_exponents",
    "relations_of",
    "verify_all",
    "verify_relation",
]
