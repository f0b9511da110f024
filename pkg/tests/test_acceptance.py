"""One test per acceptance criterion; each prints a single pass/fail line."""

import os
import subprocess
import sys
import time

from braceworks import suites


def report(capsys, n, checks, budget, elapsed):
    ok = all(c["pass"] for c in checks) and elapsed < budget
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({len(checks)} checks, {elapsed:.1f}s)")
    failed = [c for c in checks if not c["pass"]]
    assert not failed, failed
    assert elapsed < budget


def crit(capsys, n, fn, budget, **kw):
    t0 = time.perf_counter()
    checks = fn(**kw)
    report(capsys, n, checks, budget, time.perf_counter() - t0)


def test_criterion_01_signs(capsys):
    crit(capsys, 1, suites.suite_signs, 10)


def test_criterion_02_binfty(capsys):
    crit(capsys, 2, suites.suite_binfty, 120)


def test_criterion_03_hochschild_oracle(capsys):
    crit(capsys, 3, suites.suite_hochschild, 120)


def test_criterion_04_dual_bar(capsys):
    crit(capsys, 4, suites.suite_dualbar, 60)


def test_criterion_05_counit(capsys):
    crit(capsys, 5, suites.suite_counit, 60)


def test_criterion_06_composition_table(capsys):
    crit(capsys, 6, suites.suite_table, 10)


def test_criterion_07_mc_equivalence(capsys):
    crit(capsys, 7, suites.suite_mc, 120)


def test_criterion_08_cohochschild(capsys):
    crit(capsys, 8, suites.suite_cohoch, 300)


def test_criterion_09_schoch(capsys):
    crit(capsys, 9, suites.suite_schoch, 600)


def test_criterion_10_lifting(capsys):
    crit(capsys, 10, suites.suite_lift, 300)


def test_criterion_11_sigma(capsys):
    crit(capsys, 11, suites.suite_sigma, 120)


COMMANDS = [
    ["hochschild", "--input", "dual"],
    ["hochschild", "--input", "triangular_f3", "--format", "csv"],
    ["cohochschild", "--input", "dual", "--resolution", "periodic"],
    ["schoch", "--input", "dual", "--no-columns"],
    ["lift", "--input", "dual"],
    ["bar", "--input", "product", "--max-arity", "2"],
    ["verify", "--suite", "mc"],
]


def _cold_runs(tmp_path, tag):
    procs = []
    for i, cmd in enumerate(COMMANDS):
        env = dict(os.environ, BRACEWORKS_CACHE=str(tmp_path / f"{tag}{i}"))
        procs.append(subprocess.Popen([sys.executable, "-m", "braceworks.cli", *cmd], env=env,
                                      stdout=subprocess.PIPE, stderr=subprocess.DEVNULL))
    return [p.communicate()[0] for p in procs]


def test_criterion_12_determinism(capsys, tmp_path):
    t0 = time.perf_counter()
    a = _cold_runs(tmp_path, "a")
    b = _cold_runs(tmp_path, "b")
    checks = [{"name": " ".join(c), "pass": bool(x) and x == y} for c, x, y in zip(COMMANDS, a, b)]
    report(capsys, 12, checks, 600, time.perf_counter() - t0)
