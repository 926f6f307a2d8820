import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qptolemy.errors import FinalWordMismatch, PatternMismatch, RuleNotApplicable, ScriptStepFailed, WordNotApplicable
from qptolemy.perm import Perm
from qptolemy.shear import fan_polygon
from qptolemy.words import (
    PENTAGON_PHASE,
    Flip,
    FlipWord,
    ProofScript,
    Step,
    apply_rule,
    check_script,
    compose,
    invert,
    parse_gens,
    power,
    replay,
)

P5 = fan_polygon(5)


def test_parse_print_roundtrip(torus):
    w = torus.twists["Db"].word
    assert str(w) == "F8 F1 F5 F8 P(4 8) F5 F1 F8"
    assert FlipWord.parse(torus.triangulation, str(w)).gens == w.gens
    assert parse_gens("F3 F4 P(2 4)") == (Flip(3), Flip(4), Perm.transposition(2, 4))
    assert str(torus.twists["De"].word).startswith("z^-1 F3 F5")


def test_inapplicable_word_names_step():
    with pytest.raises(WordNotApplicable, match="generator 1"):
        FlipWord.parse(P5, "F1 F7")


def test_rules_on_small_words():
    assert str(apply_rule(FlipWord.parse(fan_polygon(6), "F1 F3"), Step(0, "Commutation"))) == "F3 F1"
    penta = apply_rule(FlipWord.parse(P5, "F2 F1 F2 F1 F2"), Step(0, "Pentagon"))
    assert str(penta) == "z^-1 P(1 2)" and PENTAGON_PHASE == -1
    back = apply_rule(FlipWord.parse(P5, "P(1 2)"), Step(0, "Pentagon", "bwd", {"arcs": [2, 1]}))
    assert str(back) == "z^1 F2 F1 F2 F1 F2"
    assert str(apply_rule(FlipWord.parse(P5, "F1 F1"), Step(0, "Involution"))) == "1"
    assert str(apply_rule(FlipWord.parse(P5, "F1 P(1 2)"), Step(0, "PermNaturality"))) == "P(1 2) F2"
    assert str(apply_rule(FlipWord.parse(P5, "P(1 2) P(1 2)"), Step(0, "PermMerge"))) == "1"


def test_rule_failures():
    with pytest.raises(RuleNotApplicable):
        apply_rule(FlipWord.parse(P5, "F1 F2"), Step(0, "Commutation"))
    with pytest.raises(PatternMismatch):
        apply_rule(FlipWord.parse(P5, "F1 F2"), Step(0, "Involution"))
    with pytest.raises(RuleNotApplicable):
        apply_rule(FlipWord.parse(P5, "F1"), Step(5, "Involution"))


def test_script_replay_and_errors(torus):
    entry = torus.scripts["Db.reduced"]
    start = torus.resolve("Db")
    final, delta = replay(start, entry.script)
    assert (str(final), delta, len(entry.script)) == ("z^-3 F1 F5 F8 F4 P(1 5)(4 8)", -3, 27)
    with pytest.raises(ScriptStepFailed) as info:
        replay(torus.resolve("Da"), entry.script)
    assert info.value.index == 0
    with pytest.raises(FinalWordMismatch):
        check_script(start, entry.script, torus.resolve("Da@reduced"))
    # a PhaseMove step asserts the running exponent
    bad = ProofScript(entry.script.steps + (Step(0, "PhaseMove", args={"zexp": 0}),))
    with pytest.raises(ScriptStepFailed, match="script asserts 0"):
        replay(start, bad)


def test_script_json_roundtrip(torus):
    s = torus.scripts["chain"].script
    assert len(s) == 1253
    again = ProofScript.from_dict(json.loads(json.dumps(s.to_dict())))
    assert again == s


def test_compose_invert_power(torus):
    Da = torus.resolve("Da")
    assert len(power(Da, 3)) == 3 * len(Da)
    assert invert(invert(Da)).gens == Da.gens
    ident = compose(Da, invert(Da))
    assert ident.is_automorphism()
    assert invert(torus.resolve("De")).zexp == 1


@given(st.lists(st.integers(1, 2), max_size=10))
def test_inverse_word_closes(arcs):
    w = FlipWord(P5, tuple(Flip(a) for a in arcs))
    both = compose(w, invert(w))
    assert both.target.canonical == P5.canonical
