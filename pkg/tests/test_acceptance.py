"""One check per acceptance criterion, each with its tolerance and time limit.

Every test records a PASS/FAIL line before asserting; the lines are printed
together at the end of the run.
"""
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from qptolemy.catalog import FixtureDataset, builtin_documents, load_fixture, mutants, validate_fixture
from qptolemy.extension import cohomology_class, normalize_lifts, punctures_of, raw_exponents, verify_all
from qptolemy.shear import (
    fan_polygon,
    finite_difference_jacobian,
    identity_residual,
    jacobian,
    poisson_invariance_check,
    random_points,
)
from qptolemy.simplify import DEFAULT_BUDGET, auto_simplify
from qptolemy.triangulation import pentagon_orientation
from qptolemy.words import FlipWord, replay


def record(n, ok, detail, seconds, limit=None):
    timing = f"{seconds * 1e3:.1f} ms" if seconds < 1 else f"{seconds:.2f} s"
    if limit is not None:
        timing += f" (limit {limit})"
    ACCEPTANCE[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}  [{timing}]"
    assert ok, ACCEPTANCE[n]


def best_time(fn, repeat=5):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


@pytest.fixture(scope="module")
def datasets():
    return [load_fixture("sphere"), load_fixture("torus")]


def test_c01_pentagon_scalar():
    T = fan_polygon(5)
    a, b = 2, 1  # b follows a counter-clockwise in their common triangle
    assert pentagon_orientation(T, a, b) == 1
    w = FlipWord.parse(T, f"F{a} F{b} F{a} F{b} F{a}")
    res, dt = best_time(lambda: auto_simplify(w))
    ok = str(res.word) == "z^-1 P(1 2)" and dt < 1e-3
    record(1, ok, f"F2F1F2F1F2 -> {res.word}", dt, "1 ms")


def test_c02_braid_lift(datasets):
    torus = datasets[1]
    got, total = {}, 0.0
    for twist in ("Db", "Da"):
        entry = torus.scripts[f"{twist}.reduced"]
        (final, _), dt = best_time(lambda: replay(torus.resolve(twist), entry.script))
        got[twist] = str(final)
        total = max(total, dt)
    ok = (
        got["Db"] == "z^-3 F1 F5 F8 F4 P(1 5)(4 8)"
        and got["Da"] == "z^-1 F4 F3 P(2 4 3)"
        and total < 0.01
    )
    record(2, ok, f"Db -> {got['Db']}; Da -> {got['Da']}", total, "10 ms each")


def test_c03_braid_relator(datasets):
    w = datasets[1].resolve("relator:Braid1")
    t0 = time.perf_counter()
    res = auto_simplify(w, DEFAULT_BUDGET)
    dt = time.perf_counter() - t0
    ok = not res.word.gens and res.word.zexp == 0 and not res.exhausted and dt < 10
    record(3, ok, f"DaDbDa(DbDaDb)^-1 -> {res.word} after {res.expanded} expansions", dt, "10 s")


def test_c04_lantern(datasets):
    sphere = datasets[0]
    t0 = time.perf_counter()
    final, _ = replay(sphere.resolve("relator:Lantern"), sphere.scripts["lantern"].script)
    dt = time.perf_counter() - t0
    ok = not final.gens and final.zexp == -12 and dt < 1
    record(4, ok, f"D12 D23 D13 (D2 D1 D0 D3)^-1 -> {final}", dt, "1 s")


def test_c05_chain(datasets):
    torus = datasets[1]
    t0 = time.perf_counter()
    final, _ = replay(torus.resolve("relator:Chain"), torus.scripts["chain"].script)
    dt = time.perf_counter() - t0
    ok = not final.gens and final.zexp == -24 and dt < 1
    record(5, ok, f"(DaDbDc)^4 (DeDf)^-1 -> {final} in {len(torus.scripts['chain'].script)} steps", dt, "1 s")


def test_c06_normalization_and_class(datasets):
    t0 = time.perf_counter()
    reports = verify_all(datasets)
    k, norm = normalize_lifts(raw_exponents(reports))
    cls = cohomology_class(norm, punctures_of(datasets[0]), k)
    dt = time.perf_counter() - t0
    ok = (
        k == -12
        and (norm["Lantern"], norm["Chain"], norm["Puncture"]) == (0, -144, -12)
        and (cls.chi, cls.euler) == (12, (1, 1, 1, 1))
    )
    record(6, ok, f"k={k}, lantern {norm['Lantern']}, chain {norm['Chain']}, puncture {norm['Puncture']};"
                  f" class ({cls.chi}, {list(cls.euler)})", dt)


def test_c07_classical_oracle(datasets):
    worst, slowest, count = 0.0, 0.0, 0
    for d in datasets:
        t0 = time.perf_counter()
        for r in d.relations:
            if r.get("derived_from"):
                continue
            worst = max(worst, identity_residual(d.resolve(f"relator:{r['kind']}"), samples=100, seed=0))
            count += 1
        slowest = max(slowest, time.perf_counter() - t0)
    ok = worst < 1e-9 and slowest < 5
    record(7, ok, f"{count} relators, worst relative residual {worst:.1e} (tol 1e-9)", slowest, "5 s per fixture")


def test_c08_poisson(datasets):
    t0 = time.perf_counter()
    worst, checks = 0.0, 0
    for i, d in enumerate(datasets):
        T = d.triangulation
        pts = random_points(T.n_arcs, 100, seed=i)
        for a in T.arcs:
            if T.is_self_folded(a):
                continue
            for t in pts:
                worst = max(worst, poisson_invariance_check(T, a, t))
                checks += 1
    dt = time.perf_counter() - t0
    record(8, worst < 1e-8 and dt < 5, f"{checks} arc-point pairs, max |J eps J^T - eps'| = {worst:.1e} (tol 1e-8)",
           dt, "5 s")


def test_c09_jacobian(datasets):
    t0 = time.perf_counter()
    worst, checks = 0.0, 0
    for i, d in enumerate(datasets):
        T = d.triangulation
        pts = random_points(T.n_arcs, 100, seed=10 + i)
        for a in T.arcs:
            for t in pts:
                diff = np.max(np.abs(jacobian(T, a, t) - finite_difference_jacobian(T, a, t, h=1e-6)))
                worst = max(worst, float(diff))
                checks += 1
    dt = time.perf_counter() - t0
    record(9, worst < 1e-6 and dt < 5, f"{checks} arc-point pairs, max |J - J_fd| = {worst:.1e} (tol 1e-6)", dt, "5 s")


def test_c10_fixture_integrity(datasets):
    t0 = time.perf_counter()
    valid = all(validate_fixture(d).ok for d in datasets)
    total = caught = 0
    for doc in builtin_documents().values():
        for _, m in mutants(doc):
            total += 1
            caught += not validate_fixture(FixtureDataset.from_dict(m)).ok
    dt = time.perf_counter() - t0
    ok = valid and total >= 20 and caught == total and dt < 30
    record(10, ok, f"bundled fixtures {'valid' if valid else 'INVALID'}; {caught}/{total} mutants detected", dt, "30 s")


def test_c11_phase_well_defined(datasets):
    t0 = time.perf_counter()
    reports = [r for r in verify_all(datasets, search=True) if not r.derived]
    both = [r for r in reports if r.script_zexp is not None and r.search_zexp is not None]
    ok = bool(both) and all(r.script_zexp == r.search_zexp for r in both)
    detail = ", ".join(f"{r.kind} {r.script_zexp}/{r.search_zexp}" for r in both)
    record(11, ok, f"script/search: {detail}", time.perf_counter() - t0)
