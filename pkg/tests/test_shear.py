import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qptolemy import _kernels
from qptolemy.errors import DegenerateQuadrilateral, DimensionMismatch
from qptolemy.shear import (
    calibrate_epsilon_sign,
    compile_word,
    fan_polygon,
    finite_difference_jacobian,
    flip_coords,
    identity_residual,
    jacobian,
    poisson_invariance_check,
    polygon_shears,
    random_points,
    shear_from_cross_ratio,
    word_action,
)
from qptolemy.triangulation import EPSILON_SIGN, flip


def test_cross_ratio_values():
    assert shear_from_cross_ratio((-1, 0, 1, math.inf)) == 0.0
    assert shear_from_cross_ratio((0, 1, 3, 7)) == pytest.approx(math.log(2 / 7), abs=1e-15)
    with pytest.raises(DegenerateQuadrilateral):
        shear_from_cross_ratio((0, 0, 1, 2))
    with pytest.raises(DegenerateQuadrilateral):
        shear_from_cross_ratio((0, 2, 1, 3))


def test_flip_coords_value():
    out = flip_coords(fan_polygon(5), 1, [0.5, -1.0])
    np.testing.assert_allclose(out, [-0.5, -1.47407698], atol=1e-8)
    with pytest.raises(DimensionMismatch):
        flip_coords(fan_polygon(5), 1, [0.5])


def test_epsilon_sign_calibrated():
    assert calibrate_epsilon_sign() == EPSILON_SIGN == 1


def test_flip_matches_polygon_geometry():
    pts = (-3.0, -1.0, 0.2, 0.9, 2.5, 6.0, 11.0)
    T = fan_polygon(len(pts))
    t = polygon_shears(T, pts)
    S = T
    for a in (2, 4, 1, 3):
        t = flip_coords(S, a, t)
        S = flip(S, a)
        np.testing.assert_allclose(t, polygon_shears(S, pts), atol=1e-12)


def test_relators_fix_points(torus, sphere):
    assert identity_residual(torus.resolve("relator:Chain")) < 1e-12
    assert identity_residual(sphere.resolve("relator:Lantern")) < 1e-12
    # a twist is not a relator
    assert identity_residual(torus.resolve("Da")) > 1.0


def test_flip_differentials(torus):
    T = torus.triangulation
    t = random_points(T.n_arcs, 1, 3)[0]
    for a in T.arcs:
        assert np.max(np.abs(jacobian(T, a, t) - finite_difference_jacobian(T, a, t))) < 1e-8
        assert poisson_invariance_check(T, a, t) < 1e-12


@given(st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_kernels_agree(seed, rows):
    from qptolemy.catalog import load_fixture

    w = load_fixture("sphere").resolve("relator:Lantern")
    prog, table = compile_word(w)
    pts = random_points(w.source.n_arcs, rows, seed)
    a = _kernels.run_program(pts, prog, table, use_numba=True)
    b = _kernels.run_program(pts, prog, table, use_numba=False)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_word_action_shapes(torus):
    T = torus.triangulation
    target, out = word_action(T, torus.resolve("Da"), np.zeros(8))
    assert out.shape == (8,) and target.canonical == T.canonical


def test_env_flag_disables_numba():
    env = dict(os.environ, QPTOLEMY_DISABLE_NUMBA="1")
    code = "from qptolemy import _kernels; print(_kernels.USE_NUMBA)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
