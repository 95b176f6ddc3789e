import numpy as np
import pytest

from polymean.chareq import EquationParams, eval_g
from polymean.fields import CylinderWave, Superposition, kernel_basis, wirtinger_fd
from polymean.synthesis import (PdeOperator, PolyCoef, SolutionSpec, SpecValidationError, WaveCoef,
                                apply_pde, build_solution, check_decay, non_zero_lambda, polynomial_part,
                                random_spec, sample_points, verify_solution, wave_part, with_injected_wave)
from polymean.zeroscan import select_Zr


def test_constant_spec():
    spec = SolutionSpec(EquationParams(1, 0), 0, b=(PolyCoef(0, 0, 1.0),))
    f = build_solution(spec)
    for z in (0, 0.3 + 0.4j, -1.1j):
        assert f(z) == 1


def test_single_wave_spec():
    lam = -7.9 - 3.5j
    spec = SolutionSpec(EquationParams(1, 0), 0, c=(WaveCoef(lam, 0, 0, 1.0),))
    f = build_solution(spec)
    z = 0.4 - 0.2j
    assert f(z) == CylinderWave(lam, 0, 0)(z)


@pytest.mark.parametrize("bad", [
    dict(a=(PolyCoef(0, 1, 1.0),)),                  # p > s-1
    dict(a=(PolyCoef(-1, 0, 1.0),)),                 # p + k < 0
    dict(b=(PolyCoef(0, 1, 1.0),)),                  # p > m-s-1
    dict(b=(PolyCoef(3, 0, 1.0),)),                  # |k| > K
    dict(c=(WaveCoef(5.0, -1, 0, 1.0),)),            # eta < 0
    dict(alpha=0.0),
])
def test_validation(bad):
    spec = SolutionSpec(EquationParams(2, 1), 1, **bad)
    with pytest.raises(SpecValidationError):
        spec.validate()


def test_validation_multiplicity():
    spec = SolutionSpec(EquationParams(2, 1), 1, c=(WaveCoef(5.0, 1, 0, 1.0),), multiplicities={5 + 0j: 1})
    with pytest.raises(SpecValidationError):
        spec.validate()


def test_decay_examples():
    p = EquationParams(2, 1)
    assert check_decay(SolutionSpec(p, 0)).ok
    lam = 8.8 + 4.7j
    edge = abs(lam) ** -4.0
    assert check_decay(SolutionSpec(p, 0, c=(WaveCoef(lam, 0, 0, edge),), alpha=4.0)).ok
    bad = WaveCoef(lam, 0, 0, 2 * edge)
    rep = check_decay(SolutionSpec(p, 0, c=(WaveCoef(lam, 0, 0, 0.1 * edge), bad), alpha=4.0))
    assert not rep.ok and rep.worst == bad and rep.worst_ratio == pytest.approx(2.0)


def test_pde_operator_and_zero_field():
    params = EquationParams(3, 1)
    op = PdeOperator.for_params(params)
    assert (op.p, op.q) == (2, 3)
    assert apply_pde(Superposition([]), 0.3, op) == 0


def test_pde_kills_basis_monomials_exactly():
    params = EquationParams(3, 1)
    op = PdeOperator.for_params(params)
    for k in range(-4, 5):
        for b in kernel_basis(k, params):
            assert apply_pde(b.monomial, 0.7 - 0.2j, op) == 0


def test_pde_on_cylinder_wave():
    lam = 4.0 - 1.0j
    op = PdeOperator.for_params(EquationParams(1, 0))
    f = CylinderWave(lam, 0, 0)
    z = 0.5 + 0.3j
    expected = (lam / 2) * (-lam / 2) * CylinderWave(lam, 0, 0)(z)
    got = apply_pde(f, z, op)
    assert got == pytest.approx(expected, rel=1e-13)
    assert abs(got) > 0.1
    assert wirtinger_fd(f, z, (1, 1)) == pytest.approx(got, rel=1e-6)


def test_pde_sees_only_wave_part(catalogs):
    params = EquationParams(2, 1)
    spec = random_spec(catalogs[(2, 1)], params, np.random.default_rng(1), n_harmonics=3, n_zeros=2)
    op = PdeOperator.for_params(params)
    z = 0.3 - 0.9j
    assert apply_pde(polynomial_part(spec), z, op) == 0
    assert apply_pde(build_solution(spec), z, op) == apply_pde(wave_part(spec), z, op)


def test_sample_points():
    zs = sample_points(2.0, 20)
    assert len(zs) == 29 and zs[0] == 0
    assert np.all(np.abs(zs) < 2.0)
    assert np.all(np.abs(zs[-8:]) == pytest.approx(1.96))


def test_polynomial_spec_solves():
    params = EquationParams(3, 1)
    rng = np.random.default_rng(5)
    a = [PolyCoef(k, p, complex(*rng.normal(size=2))) for k in range(-2, 3) for p in range(1) if p + k >= 0]
    b = [PolyCoef(k, p, complex(*rng.normal(size=2))) for k in range(-2, 3) for p in range(2)]
    rep = verify_solution(SolutionSpec(params, 2, tuple(a), tuple(b)), 3.0)
    assert rep.passed and rep.max_residual <= 1e-9
    assert "does not certify" in rep.note


def test_random_spec_solves_and_control_fails(catalogs):
    params = EquationParams(2, 1)
    cat = catalogs[(2, 1)]
    spec = random_spec(cat, params, np.random.default_rng(0), n_harmonics=5, n_zeros=5)
    assert check_decay(spec).ok
    assert len({t.lam for t in spec.c}) == 5
    rep = verify_solution(spec, 3.0)
    assert rep.passed, rep
    lam = non_zero_lambda(cat, params)
    assert abs(eval_g(params, lam)) > 1e-3
    bad = verify_solution(with_injected_wave(spec, lam), 3.0)
    assert bad.max_ratio > 10


def test_truncation_tail_shrinks(catalogs):
    # bands of further zeros with decaying coefficients change the field less and less
    zeros = select_Zr(catalogs[(1, 0)], 1.0)
    zs = sample_points(0.9 * 2.0, 30)
    alpha = 6.0

    def band(lo, hi):
        picked = [z for z in zeros if lo <= abs(z.lam) < hi]
        f = Superposition([(abs(z.lam) ** -alpha, CylinderWave(z.lam, 0, 0)) for z in picked])
        return np.max(np.abs(f(zs)))

    sizes = [band(0, 10), band(10, 20), band(20, 40)]
    assert sizes[0] > sizes[1] > sizes[2]
