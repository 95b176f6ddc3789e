"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as
they are produced; they are also repeated in the terminal summary.
"""

import time
from math import log, pi

import numpy as np

from polymean.chareq import CharacteristicFn, EquationParams
from polymean.cli import main as cli_main
from polymean.fields import CylinderWave, Monomial, PlaneWave, kernel_basis, wirtinger, wirtinger_fd
from polymean.meanvalue import (calibrate_plane_wave_constant, plane_wave_constant, plane_wave_defect, residual,
                                residuals)
from polymean.synthesis import non_zero_lambda, random_spec, verify_solution, with_injected_wave
from polymean.tworadii import check_counterexample, common_zeros, counterexample, real_ratio_pairs
from polymean.zeroscan import circle_winding, find_zeros, strip_check, select_Zr, winding_number

from conftest import PARAMS_GRID

RESULTS: list[str] = []

# min |lam| |G'(lam)| over zeros with |lam| > 10, recorded at half the value
# observed with lambda_max = 40
DERIVATIVE_FLOOR = {(1, 0): 3.6, (2, 0): 41.0, (2, 1): 0.98, (3, 1): 8.9, (3, 2): 0.098}


def report(n: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)


def disk_points(rng, radius, n):
    rho = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    return rho * np.exp(1j * rng.uniform(-pi, pi, n))


def plane_wave_cases(rng, n):
    out = []
    while len(out) < n:
        lam = rng.uniform(0.5, 20.0) * np.exp(1j * rng.uniform(-pi, pi))
        if abs(lam.imag) > 3.0:
            continue
        alpha = rng.uniform(-pi, pi)
        z = complex(disk_points(rng, 1.0, 1)[0])
        out.append((complex(lam), alpha, z))
    return out


# -- 1 ------------------------------------------------------------------------

def test_criterion_1_plane_wave_closed_form():
    start = time.perf_counter()
    worst = 0.0
    constants_ok = True
    for m, s in PARAMS_GRID:
        constants_ok &= calibrate_plane_wave_constant(m, s) == plane_wave_constant(s)
        for r in (0.7, 1.0, 1.3):
            params = EquationParams(m, s, r)
            rng = np.random.default_rng(1000 * m + 100 * s + int(10 * r))
            for lam, alpha, z in plane_wave_cases(rng, 100):
                got = -residual(PlaneWave(lam, alpha), z, params).residual
                want = plane_wave_defect(lam, alpha, z, params)
                worst = max(worst, abs(got - want) / abs(want))
    elapsed = time.perf_counter() - start
    ok = constants_ok and worst <= 1e-7 and elapsed < 120
    report(1, ok, f"1500 plane waves, max relative deviation {worst:.2e} (tol 1e-7), "
                  f"calibrated constant frozen: {constants_ok}, {elapsed:.1f}s")
    assert ok


# -- 2 ------------------------------------------------------------------------

def test_criterion_2_catalog_certification():
    start = time.perf_counter()
    worst_g, problems = 0.0, []
    for m, s in PARAMS_GRID:
        fn = CharacteristicFn(m, s)
        cat = find_zeros(fn, 40.0, seed=0)
        if cat.origin_multiplicity != 2 * (m - s):
            problems.append(f"origin {m, s}")
        if winding_number(fn, cat.outer_rect) != cat.total_multiplicity():
            problems.append(f"outer winding {m, s}")
        for z in cat.zeros:
            g = abs(complex(fn(z.lam)))
            worst_g = max(worst_g, g)
            if g > 1e-10:
                problems.append(f"|G| at {z.lam}")
            if circle_winding(fn, z.lam, z.isolation_radius) != z.multiplicity:
                problems.append(f"isolating winding at {z.lam}")
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 300
    report(2, ok, f"5 catalogs to 40, max |G| at zeros {worst_g:.1e} (tol 1e-10), "
                  f"windings consistent, {elapsed:.1f}s" + (f", problems: {problems}" if problems else ""))
    assert ok


# -- 3 ------------------------------------------------------------------------

def test_criterion_3_strip_and_simplicity():
    details, ok = [], True
    for ms in PARAMS_GRID:
        fn = CharacteristicFn(*ms)
        near, far = find_zeros(fn, 40.0), find_zeros(fn, 80.0)
        a, b = strip_check(near), strip_check(far)
        bound_ok = all(abs(z.lam.imag) <= a.c1 * log(1 + abs(z.lam)) * (1 + 1e-12)
                       for z in near.zeros if abs(z.lam) > 4)
        stable = abs(b.c1 - a.c1) <= 0.2 * a.c1
        simple = a.all_large_simple and b.all_large_simple
        floor_ok = min(a.c2, b.c2) > DERIVATIVE_FLOOR[ms]
        ok &= bound_ok and stable and simple and floor_ok
        details.append(f"{ms}: c1 {a.c1:.3f}->{b.c1:.3f}, c2 {min(a.c2, b.c2):.3g}>{DERIVATIVE_FLOOR[ms]}")
    report(3, ok, "; ".join(details))
    assert ok


# -- 4 ------------------------------------------------------------------------

def test_criterion_4_cylinder_waves_at_zeros(catalogs):
    start = time.perf_counter()
    worst_ratio, worst_rel, worst_abs, count = 0.0, 0.0, 0.0, 0
    for ms in PARAMS_GRID:
        r = 1.0
        R = 3 * r
        params = EquationParams(*ms, r)
        zs = disk_points(np.random.default_rng(4), R - r, 20)
        # field scale over the disk the quadrature touches
        grid = np.linspace(0, R, 48)[:, None] * np.exp(2j * pi * np.arange(128) / 128)[None, :]
        for zero in select_Zr(catalogs[ms], r)[:10]:
            fields = [CylinderWave(zero.lam, eta, k)
                      for k in range(-2, 3) for eta in range(zero.multiplicity)]
            for f, row in zip(fields, residuals(fields, zs, params)):
                scale = max(1.0, float(np.max(np.abs(f(grid)))))
                for rep in row:
                    count += 1
                    worst_ratio = max(worst_ratio, abs(rep.residual) / (3 * rep.quad_error_estimate))
                    worst_abs = max(worst_abs, abs(rep.residual))
                    worst_rel = max(worst_rel, abs(rep.residual) / scale)
    elapsed = time.perf_counter() - start
    ok = worst_ratio <= 1.0 and worst_rel <= 1e-8
    report(4, ok, f"{count} residuals, max |res|/(3 err) {worst_ratio:.2f}, "
                  f"max |res|/field scale {worst_rel:.1e} (tol 1e-8; raw max |res| {worst_abs:.1e}), "
                  f"{elapsed:.1f}s")
    assert ok


# -- 5 ------------------------------------------------------------------------

def test_criterion_5_polynomial_basis():
    worst, annihilated, n = 0.0, True, 0
    centers = [0.0, 0.35 - 0.6j, -0.8 + 0.1j]
    for m, s in PARAMS_GRID:
        params = EquationParams(m, s, 1.0)
        for k in range(-5, 6):
            for b in kernel_basis(k, params):
                n += 1
                coef, _ = b.monomial.exact_derivative(m - s, m)
                annihilated &= coef == 0 and isinstance(coef, int)
                for z in centers:
                    worst = max(worst, abs(residual(b.monomial, z, params).residual))
    ok = annihilated and worst <= 1e-9
    report(5, ok, f"{n} basis monomials, exact annihilation {annihilated}, max residual {worst:.1e} (tol 1e-9)")
    assert ok


# -- 6 ------------------------------------------------------------------------

def test_criterion_6_synthesized_solutions(catalogs):
    start = time.perf_counter()
    worst_ratio, weakest_control = 0.0, np.inf
    for ms in PARAMS_GRID:
        params = EquationParams(*ms, 1.0)
        cat = catalogs[ms]
        for seed in (0, 1):
            spec = random_spec(cat, params, np.random.default_rng(seed),
                               n_harmonics=5, n_zeros=5, alpha=4.0)
            rep = verify_solution(spec, 3.0)
            worst_ratio = max(worst_ratio, rep.max_ratio)
            bad = verify_solution(with_injected_wave(spec, non_zero_lambda(cat, params)), 3.0)
            weakest_control = min(weakest_control, bad.max_ratio)
    elapsed = time.perf_counter() - start
    ok = worst_ratio <= 1.0 and weakest_control > 10.0
    report(6, ok, f"10 random specs, max residual/max(1e-9, 3 err) {worst_ratio:.2f}; "
                  f"negative control min ratio {weakest_control:.1e} (> 10), {elapsed:.1f}s")
    assert ok


# -- 7 ------------------------------------------------------------------------

def test_criterion_7_counterexample(catalogs):
    start = time.perf_counter()
    ok, checked, worst_res, weakest_pde = True, 0, 0.0, np.inf
    pairs_found = 0
    for ms in PARAMS_GRID:
        cat = catalogs[ms]
        cases = [(1.0, 1.0, hit) for hit in common_zeros(cat, 1.0, 1.0)[:6]]
        for i, j, q in real_ratio_pairs(cat):
            pairs_found += 1
            cases += [(1.0, q, hit) for hit in common_zeros(cat, 1.0, q)]
        for r1, r2, hit in cases:
            R = 3 * max(r1, r2)
            rep = check_counterexample(counterexample(hit.lam), *ms, r1, r2, R)
            checked += 1
            ok &= rep.passed
            worst_res = max(worst_res, *rep.max_residual_ratio)
            weakest_pde = min(weakest_pde, rep.pde_ratio)
    elapsed = time.perf_counter() - start
    report(7, ok, f"{checked} counterexamples, max residual/tolerance {worst_res:.2e}, "
                  f"min max|apply_pde|/max|field| {weakest_pde:.2f} (>= 1e-3); "
                  f"real-ratio pairs in catalogs: {pairs_found}, {elapsed:.1f}s")
    assert ok


# -- 8 ------------------------------------------------------------------------

def derivative_cases(rng, n):
    cases = []
    while len(cases) < n:
        p = int(rng.integers(0, 4))
        q = int(rng.integers(0, 4 - p))
        if p + q == 0:
            continue
        kind = int(rng.integers(3))
        lam = complex(rng.uniform(0.5, 8.0), rng.uniform(-1.5, 1.5))
        if kind == 0:
            f = PlaneWave(lam, rng.uniform(-pi, pi))
        elif kind == 1:
            f = CylinderWave(lam, int(rng.integers(0, 3)), int(rng.integers(-3, 4)))
        else:
            # exponents at least the orders, so the derivative is not identically zero
            f = Monomial(p + int(rng.integers(0, 3)), q + int(rng.integers(0, 3)))
        z = complex(disk_points(rng, 1.5, 1)[0])
        if abs(z) < 0.2:
            continue
        cases.append((f, z, (p, q)))
    return cases


def test_criterion_8_derivative_cross_check():
    worst = 0.0
    for f, z, order in derivative_cases(np.random.default_rng(8), 200):
        exact = complex(wirtinger(f, z, order))
        worst = max(worst, abs(wirtinger_fd(f, z, order) - exact) / abs(exact))
    ok = worst <= 1e-5
    report(8, ok, f"200 cases with p+q <= 3, max relative error {worst:.1e} (tol 1e-5)")
    assert ok


# -- 9 ------------------------------------------------------------------------

def _numbers(seed):
    out = []
    cat = find_zeros(CharacteristicFn(2, 1), 30.0, seed=seed)
    out += [v for z in cat.zeros for v in (z.lam.real, z.lam.imag, z.abs_gprime)]
    params = EquationParams(2, 1, 1.0)
    rng = np.random.default_rng(seed)
    for lam, alpha, z in plane_wave_cases(rng, 5):
        res = residual(PlaneWave(lam, alpha), z, params)
        out += [res.residual.real, res.residual.imag, res.quad_error_estimate]
    spec = random_spec(cat, params, np.random.default_rng(seed), n_harmonics=3, n_zeros=2)
    rep = verify_solution(spec, 3.0, n_samples=8)
    out += [rep.max_residual, rep.max_error_estimate]
    return np.array(out)


def _cli_outputs(tmp_path, tag):
    texts = []
    for i, argv in enumerate([
        ["zeros", "--m", "1", "--s", "0", "--lambda-max", "20", "--seed", "3"],
        ["verify", "--m", "2", "--s", "1", "--field", "cylinder@zero-index-1", "--seed", "3"],
        ["two-radii", "--m", "1", "--s", "0", "--r1", "1", "--r2", "1", "--R", "3", "--lambda-max", "20"],
    ]):
        path = tmp_path / f"{tag}-{i}"
        assert cli_main(argv + ["--out", str(path)]) == 0
        texts.append(path.read_text().replace(str(path), "OUT"))
    return texts


def test_criterion_9_determinism(tmp_path, capsys):
    a, b = _numbers(5), _numbers(5)
    rel = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
    same_files = _cli_outputs(tmp_path, "first") == _cli_outputs(tmp_path, "second")
    capsys.readouterr()
    ok = rel <= 1e-12 and same_files
    report(9, ok, f"{a.size} reported numbers, max relative difference {rel:.1e} (tol 1e-12); "
                  f"CLI outputs byte-identical: {same_files}")
    assert ok
