import pytest

from qptolemy.errors import BudgetExhausted
from qptolemy.reconstruct import (
    enumerate_types,
    mirror,
    random_gluing,
    reconstruct_triangulation,
    same_up_to_boundary,
)
from qptolemy.words import FlipWord, compose, invert, replay


def skeletons(d):
    return [" ".join(t.word.gen_strings()) for t in d.twists.values()]


@pytest.fixture(scope="module")
def torus_candidates(torus):
    return reconstruct_triangulation(skeletons(torus), 8, 1, 2, 2)


def test_torus_candidates(torus, torus_candidates):
    assert len(torus_candidates) == 4
    T = torus.triangulation
    direct = [c for c in torus_candidates if same_up_to_boundary(c, T)]
    mirrored = [c for c in torus_candidates if same_up_to_boundary(mirror(c), T)]
    assert len(direct) == 2 and len(mirrored) == 2


def test_relator_phase_is_candidate_independent(torus, torus_candidates):
    """Up to the orientation sign a mirror image must carry."""
    chain = torus.relation("Chain")
    script = torus.scripts["chain"].script
    for C in torus_candidates:
        sign = 1 if same_up_to_boundary(C, torus.triangulation) else -1

        def product(names):
            out = FlipWord(C, ())
            for n in names:
                t = torus.twists[n].word
                out = compose(out, FlipWord(C, t.gens, sign * t.zexp))
            return out

        relator = compose(product(chain["lhs"]), invert(product(chain["rhs"])))
        final, _ = replay(relator, script)
        assert not final.gens
        assert final.zexp == -24 * sign


def test_once_punctured_torus():
    found = reconstruct_triangulation(["F1 P(2 3)"], 3, 1, 1)
    assert len(found) == 2
    # a bare flip changes the labeling, so it cannot close up by itself
    assert reconstruct_triangulation(["F1"], 3, 1, 1) == []


def test_contradictory_words():
    assert reconstruct_triangulation(["F1 F1 F2"], 3, 1, 1) == []
    assert reconstruct_triangulation(["F9"], 3, 1, 1) == []


def test_budget(torus):
    with pytest.raises(BudgetExhausted) as info:
        reconstruct_triangulation(skeletons(torus), 8, 1, 2, 2, budget=5)
    assert isinstance(info.value.best, list)


def test_random_gluing_topology():
    T = random_gluing(6, 1, 2, seed=4)
    assert (T.n_arcs, T.n_vertices) == (6, 2)
    assert not any(T.is_self_folded(a) for a in T.arcs)
    assert len(enumerate_types(random_gluing(3, 1, 1))) == 1
