import pytest
from hypothesis import given
from hypothesis import strategies as st

from qptolemy.errors import InconsistentSystem, NonIntegralCoefficient, UnknownTwist
from qptolemy.extension import (
    ExtensionClass,
    RelationSpec,
    cohomology_class,
    find_relation,
    normalize_lifts,
    raw_exponents,
    relations_of,
    verify_all,
    verify_relation,
)
from qptolemy.words import ProofScript

RAW = {"Lantern": (-12, 3, 4), "Chain": (-24, 12, 2), "Puncture": (-12, 3, 3), "Braid0": (0, 2, 2), "Braid1": (0, 3, 3)}


def test_normalization_oracle():
    k, norm = normalize_lifts(RAW)
    assert k == -12
    assert norm == {"Lantern": 0, "Chain": -144, "Puncture": -12, "Braid0": 0, "Braid1": 0}
    cls = cohomology_class(norm, 4, k)
    assert (cls.w_exponent, cls.chi, cls.euler) == (-12, 12, (1, 1, 1, 1))
    assert cls.line() == "12·chi + e_1 + e_2 + e_3 + e_4 over A = <z^{-12}>"


def test_normalization_errors():
    with pytest.raises(InconsistentSystem, match="braid"):
        normalize_lifts({**RAW, "Braid1": (2, 3, 3)})
    with pytest.raises(InconsistentSystem, match="no lantern"):
        normalize_lifts({"Chain": (-24, 12, 2)})
    with pytest.raises(InconsistentSystem, match="multiple"):
        normalize_lifts({"Lantern": (-13, 5, 3)})
    with pytest.raises(NonIntegralCoefficient):
        cohomology_class({"Chain": -150, "Puncture": -12}, 4, -12)
    assert cohomology_class({"Lantern": 0}, 2, 0).degenerate


@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(-5, 5))
def test_shift_moves_exponents_linearly(lantern_k, chain_e, shift):
    """Shifting every lift by z^shift changes nothing after normalization."""
    raw = {"Lantern": (-lantern_k, 3, 4), "Chain": (chain_e, 12, 2)}
    moved = {n: (e + shift * (a - b), a, b) for n, (e, a, b) in raw.items()}
    assert normalize_lifts(raw)[1] == normalize_lifts(moved)[1]


def test_relations_verify(torus, sphere):
    reports = verify_all([torus, sphere])
    got = {(r.kind, r.fixture): r.z_exponent for r in reports}
    assert got == {
        ("Braid0", "four-holed-sphere"): 0,
        ("Braid0", "two-holed-torus"): 0,
        ("Braid1", "two-holed-torus"): 0,
        ("Chain", "two-holed-torus"): -24,
        ("Lantern", "four-holed-sphere"): -12,
        ("Puncture", "four-holed-sphere"): -12,
    }
    assert all(r.relator_valid and r.oracle_residual < 1e-12 for r in reports)
    assert raw_exponents(reports)["Chain"] == (-24, 12, 2)
    puncture = next(r for r in reports if r.kind == "Puncture")
    assert puncture.derived and "Lantern exponent" in puncture.orientation_note


def test_search_agrees_with_script(torus):
    spec, d = find_relation([torus], "Braid1")
    rep = verify_relation(spec, d, search=True)
    assert (rep.script_zexp, rep.search_zexp, rep.phases_agree) == (0, 0, True)


def test_wrong_script_is_reported(torus):
    spec = next(s for s in relations_of(torus) if s.kind == "Chain")
    rep = verify_relation(spec, torus, scripts={"chain": torus.scripts["Db.reduced"].script})
    assert not rep.relator_valid and rep.z_exponent is None
    assert any("script" in e for e in rep.errors)


def test_non_relator_is_rejected(torus):
    spec = RelationSpec.from_dict({"kind": "Braid0", "lhs": ["Da"], "rhs": ["Db"], "zexp": 0, "script": None})
    rep = verify_relation(spec, torus, samples=10)
    assert not rep.relator_valid


def test_claimed_exponent_must_match(torus):
    doc = dict(torus.relation("Chain"), zexp=-22)
    rep = verify_relation(RelationSpec.from_dict(doc), torus, samples=10)
    assert not rep.relator_valid
    assert any("claims -22" in e for e in rep.errors)


def test_unknown_kind(torus):
    with pytest.raises(UnknownTwist):
        verify_all([torus], ["Lantern"])


def test_class_serialization():
    cls = ExtensionClass(-12, 12, (1, 1))
    assert cls.to_dict() == {"w": "z^-12", "chi": 12, "euler": [1, 1], "degenerate": False}


def test_lantern_statement_orientation(sphere):
    """Written with D0 D1 D2 D3 on the left the lantern reduces to the opposite sign."""
    spec = next(s for s in relations_of(sphere) if s.kind == "Lantern")
    rep = verify_relation(spec, sphere, samples=10, statement=True)
    assert (rep.z_exponent, rep.statement_zexp) == (-12, 12)
    assert "statement D0 D1 D2 D3 vs D12 D23 D13: z^12" in rep.orientation_note
