import pytest
from hypothesis import given
from hypothesis import strategies as st

from qptolemy.errors import FlipOnSelfFoldedArc, InvalidTriangulation, PermutationOutOfRange, UnknownArc
from qptolemy.perm import Perm
from qptolemy.shear import fan_polygon
from qptolemy.triangulation import (
    Triangulation,
    apply_permutation,
    build_standard,
    check_triangulation,
    epsilon,
    flip,
    labeled_equal,
    pentagon_applicable,
    pentagon_orientation,
)


@pytest.mark.parametrize(
    "g,s,arcs,tris",
    [(1, 1, 3, 2), (1, 2, 6, 4), (2, 1, 9, 6), (0, 4, 6, 4), (0, 3, 3, 2)],
)
def test_standard_counts(g, s, arcs, tris):
    T = build_standard(g, s)
    assert (T.n_arcs, len(T.triangles), T.n_vertices) == (arcs, tris, s)


def test_flip_rule_on_pentagon():
    T = fan_polygon(5)
    assert T.triangles == ((-1, -2, 1), (1, -3, 2), (2, -4, -5))
    assert flip(T, 1).triangles == ((1, -2, -3), (1, 2, -1), (2, -4, -5))


def test_fixture_surfaces(torus, sphere):
    T = torus.triangulation
    assert (T.n_arcs, T.boundary_components(), T.euler_characteristic()) == (8, 2, -2)
    S = sphere.triangulation
    assert (S.n_arcs, S.boundary_components(), S.euler_characteristic()) == (10, 4, -2)


def test_invalid_triangle_is_named():
    with pytest.raises(InvalidTriangulation, match="triangle 1"):
        Triangulation(((1, 2, 3), (3, 1, 1)))
    with pytest.raises(InvalidTriangulation, match="triangle 0"):
        Triangulation(((1, 2), (1, 2, 3), (3, 4, 4)))
    with pytest.raises(InvalidTriangulation, match="contiguous"):
        Triangulation(((1, 2, 4), (4, 1, 2)))


def test_flip_errors():
    T = build_standard(0, 4)
    with pytest.raises(UnknownArc):
        flip(T, 7)
    folded = Triangulation(((1, 1, 2), (2, 3, 4), (4, 3, -1)), boundary=1, validate=False)
    with pytest.raises(FlipOnSelfFoldedArc):
        flip(folded, 1)
    with pytest.raises(PermutationOutOfRange):
        apply_permutation(T, Perm.transposition(1, 9))


def test_pentagon_orientation():
    T = fan_polygon(5)
    assert pentagon_applicable(T, 1, 2) and pentagon_applicable(T, 2, 1)
    assert (pentagon_orientation(T, 1, 2), pentagon_orientation(T, 2, 1)) == (-1, 1)
    assert not pentagon_applicable(T, 1, 1)


@st.composite
def walks(draw):
    g, s = draw(st.sampled_from([(1, 1), (1, 2), (0, 4), (2, 1)]))
    T = build_standard(g, s)
    return T, draw(st.lists(st.integers(1, T.n_arcs), max_size=12))


@given(walks())
def test_flip_walk_invariants(walk):
    T, arcs = walk
    S = T
    for a in arcs:
        if S.is_self_folded(a):
            continue
        S2 = flip(S, a)
        assert labeled_equal(flip(S2, a), S)
        S = S2
    check_triangulation(Triangulation(S.triangles, T.genus, T.punctures))
    assert S.euler_characteristic() == T.euler_characteristic()
    eps = epsilon(S)
    assert (eps == -eps.T).all()
