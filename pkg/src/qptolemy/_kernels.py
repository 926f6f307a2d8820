"""Batch kernels for transporting shear coordinates along flip programs.

A program is an ``(K, 11)`` int64 array; each row is one generator:

    kind=0 (flip):  [0, a, m, b0, b1, b2, b3, s0, s1, s2, s3]
    kind=1 (perm):  [1, row, 0, ...]   row indexes ``perm_table``

Indices are zero based.  For a flip the ``m`` side positions ``b_i`` receive
``s_i * phi(s_i * t[a])`` and ``t[a]`` is negated.  Since
``phi(-x) = phi(x) - x`` one evaluation of ``phi`` serves all four sides.  ``perm_table[row, x]`` is
the new index of coordinate ``x``.

The numba kernel runs unless ``QPTOLEMY_DISABLE_NUMBA`` is set to a truthy
value or numba is missing.  Numpy's vectorized ``exp``/``log1p`` overtake the
scalar loop somewhere between 200 and 400 rows (see
``benchmarks/bench_kernels.py``), so larger batches go to numpy unless a
caller insists.  Both paths agree to rounding.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None


def _env_disabled() -> bool:
    return os.environ.get("QPTOLEMY_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = numba is not None and not _env_disabled()

FLIP, PERM = 0, 1
PROGRAM_WIDTH = 11
NUMBA_MAX_ROWS = 256


def phi_np(z):
    """log(1 + exp(z)) without overflow."""
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def dphi_np(z):
    z = np.asarray(z, dtype=np.float64)
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def run_program_np(t, program, perm_table):
    t = np.array(t, dtype=np.float64, copy=True)
    for op in program:
        if op[0] == FLIP:
            a, m = op[1], op[2]
            ta = t[:, a].copy()
            p = phi_np(ta)
            for i in range(m):
                t[:, op[3 + i]] += p if op[7 + i] > 0 else ta - p
            t[:, a] = -ta
        else:
            dest = perm_table[op[1]]
            out = np.empty_like(t)
            out[:, dest] = t
            t = out
    return t


if numba is not None:

    @numba.njit(cache=True, fastmath=False, nogil=True)
    def _phi_scalar(z):
        if z > 0.0:
            return z + np.log1p(np.exp(-z))
        return np.log1p(np.exp(z))

    @numba.njit(cache=True, fastmath=False, nogil=True)
    def _run_program_nb(t, program, perm_table):
        rows, n = t.shape
        out = t.copy()
        buf = np.empty(n)
        for r in range(rows):
            for k in range(program.shape[0]):
                if program[k, 0] == 0:
                    a = program[k, 1]
                    ta = out[r, a]
                    p = _phi_scalar(ta)
                    for i in range(program[k, 2]):
                        if program[k, 7 + i] > 0:
                            out[r, program[k, 3 + i]] += p
                        else:
                            out[r, program[k, 3 + i]] += ta - p
                    out[r, a] = -ta
                else:
                    dest = perm_table[program[k, 1]]
                    for x in range(n):
                        buf[dest[x]] = out[r, x]
                    for x in range(n):
                        out[r, x] = buf[x]
        return out

else:  # pragma: no cover
    _run_program_nb = None


def run_program(t, program, perm_table, use_numba=None):
    """Apply ``program`` to every row of ``t`` (shape ``(rows, n)``)."""
    t = np.ascontiguousarray(np.atleast_2d(t), dtype=np.float64)
    program = np.ascontiguousarray(program, dtype=np.int64).reshape(-1, PROGRAM_WIDTH)
    perm_table = np.ascontiguousarray(perm_table, dtype=np.int64).reshape(-1, t.shape[1])
    if use_numba is None:
        use_numba = USE_NUMBA and t.shape[0] <= NUMBA_MAX_ROWS
    if use_numba and _run_program_nb is not None:
        return _run_program_nb(t, program, perm_table)
    return run_program_np(t, program, perm_table)
