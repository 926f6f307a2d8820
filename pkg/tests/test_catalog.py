import json
import shutil

import pytest

from qptolemy.catalog import (
    BUILTIN,
    FIXTURE_ENV,
    FixtureDataset,
    builtin_documents,
    conjugated_twist,
    dumps_fixture,
    elementary_twist,
    fixture_path,
    load_fixture,
    loads_fixture,
    mutants,
    validate_fixture,
)
from qptolemy.errors import FormatError, NotTwoArcConfiguration, UnknownTwist
from qptolemy.words import FlipWord

HASHES = {
    "sphere": "7e77cd5fccd51bab5592650003aba3d07ba61295f10b11e2e1660906fdff4349",
    "torus": "ae1d252934eec46bbdc05e9f25568de340478225a43466a877176ff5d27991ec",
}


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_bundled_fixture_is_stable(name):
    d = load_fixture(name)
    assert d.content_hash == HASHES[name]
    text = fixture_path(name).read_text()
    assert dumps_fixture(loads_fixture(text)) == text


def test_fixture_contents(torus, sphere):
    assert sorted(torus.twists) == ["Da", "Db", "Dc", "De", "Df"]
    assert sorted(sphere.twists) == ["D0", "D1", "D12", "D13", "D2", "D23", "D3"]
    assert [r["kind"] for r in sphere.relations] == ["Braid0", "Lantern", "Puncture"]
    assert len(torus.scripts["chain"].script) == 1253
    assert len(sphere.scripts["lantern"].script) == 456


def test_validate_bundled(torus, sphere):
    for d in (torus, sphere):
        rep = validate_fixture(d)
        assert rep.ok, rep.lines()
        assert all(rep.by_constraint().values())


def test_resolve_grammar(torus):
    assert str(torus.resolve("Da@reduced")) == "z^-1 F4 F3 P(2 4 3)"
    assert torus.resolve("identity", -3).zexp == -3
    q = torus.resolve("De@lift/De")
    assert q.is_automorphism() and len(q) == 2 * 8
    with pytest.raises(UnknownTwist):
        torus.resolve("Dz")
    with pytest.raises(UnknownTwist):
        torus.resolve("Da@nothing")


def test_elementary_twist(torus):
    p = FlipWord.parse(torus.triangulation, "F8 F1 F5")
    assert str(elementary_twist(p.target, 4, 8)) == "F8 P(4 8)"
    assert conjugated_twist(p, 4, 8).gens == torus.twists["Db"].word.gens
    with pytest.raises(NotTwoArcConfiguration):
        elementary_twist(p.target, 4, 4)
    with pytest.raises(NotTwoArcConfiguration):
        elementary_twist(torus.triangulation, 1, 2)


def test_transposed_label_fails_applicability():
    doc = builtin_documents()["torus"]
    doc["twists"][0]["word"] = doc["twists"][0]["word"].replace("F3 F4", "F4 F3", 1)
    rep = validate_fixture(FixtureDataset.from_dict(doc))
    assert not rep.ok
    assert not rep.by_constraint()["closes"] or not rep.by_constraint()["applicable"]


def test_corrupted_triangle_named():
    doc = builtin_documents()["sphere"]
    doc["triangulation"]["triangles"][2] = [10, 4, 0]
    rep = validate_fixture(FixtureDataset.from_dict(doc))
    assert not rep.by_constraint()["triangulation"]
    assert "triangle 2" in rep.failures[0].detail


def test_mutants_are_single_label_and_caught():
    doc = builtin_documents()["torus"]
    ms = mutants(doc)
    assert len(ms) == 17
    for label, m in ms[:6]:
        assert not validate_fixture(FixtureDataset.from_dict(m)).ok, label


def test_format_errors(tmp_path):
    with pytest.raises(FormatError):
        loads_fixture("{not json")
    doc = builtin_documents()["torus"]
    doc["format_version"] = 99
    with pytest.raises(FormatError, match="format_version"):
        FixtureDataset.from_dict(doc)
    with pytest.raises(FileNotFoundError):
        load_fixture(tmp_path / "missing.json")


def test_fixture_dir_from_env(tmp_path, monkeypatch):
    shutil.copy(fixture_path("torus"), tmp_path / "mine.json")
    monkeypatch.setenv(FIXTURE_ENV, str(tmp_path))
    assert load_fixture("mine").name == "two-holed-torus"
    with pytest.raises(FileNotFoundError):
        load_fixture("sphere")


def test_to_dict_roundtrip(sphere):
    again = FixtureDataset.from_dict(json.loads(dumps_fixture(sphere)))
    assert again.to_dict() == sphere.to_dict()
