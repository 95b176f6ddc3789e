"""Truncated solutions built from polynomial and cylinder-wave terms.

A solution is specified harmonic by harmonic:

    f_k(rho) = sum_p a_{k,p} rho^{2p+k}                  (0 <= p <= s-1, p+k >= 0)
             + sum_p b_{k,p} rho^{2p+s+|k+s|}            (0 <= p <= m-s-1)
             + sum_{lam, eta} c_{lam,eta,k} Phi_{lam,eta,k}(rho)

and the field is ``sum_k f_k(rho) e^{ik phi}``.  The polynomial part is
annihilated by ``d_z^{m-s} d_zbar^m``; the cylinder waves, for ``lam`` a
zero of ``g_r`` and ``eta`` below its multiplicity, satisfy the mean-value
equation.  Only finite truncations are representable, so the decay of the
``c`` coefficients is recorded as a declared exponent and checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .chareq import EquationParams, eval_g
from .fields import CylinderWave, Field, Monomial, Superposition, kernel_basis, wirtinger
from .meanvalue import DEFAULT_RULE, QuadratureRule, residuals
from .zeroscan import Zero, ZeroCatalog, select_Zr

NEGATIVE_CONTROL_FACTOR = 10.0
_GOLDEN_ANGLE = pi * (3 - sqrt(5))


class SpecValidationError(ValueError):
    pass


@dataclass(frozen=True)
class PolyCoef:
    k: int
    p: int
    value: complex


@dataclass(frozen=True)
class WaveCoef:
    lam: complex
    eta: int
    k: int
    value: complex


@dataclass(frozen=True)
class SolutionSpec:
    params: EquationParams
    K: int
    a: tuple[PolyCoef, ...] = ()
    b: tuple[PolyCoef, ...] = ()
    c: tuple[WaveCoef, ...] = ()
    alpha: float = 4.0
    C: float = 1.0
    multiplicities: dict = field(default_factory=dict, compare=False, hash=False)

    def validate(self) -> None:
        m, s = self.params.m, self.params.s
        for t in self.a:
            if not (abs(t.k) <= self.K and 0 <= t.p <= s - 1 and t.p + t.k >= 0):
                raise SpecValidationError(f"a-coefficient out of range: {t}")
        for t in self.b:
            if not (abs(t.k) <= self.K and 0 <= t.p <= m - s - 1):
                raise SpecValidationError(f"b-coefficient out of range: {t}")
        for t in self.c:
            if abs(t.k) > self.K or t.eta < 0:
                raise SpecValidationError(f"c-coefficient out of range: {t}")
            n = self.multiplicities.get(complex(t.lam))
            if n is not None and t.eta >= n:
                raise SpecValidationError(f"eta={t.eta} not below multiplicity {n} of {t.lam}")
        if not (self.alpha > 0 and self.C > 0):
            raise SpecValidationError("decay exponent and constant must be positive")


@dataclass(frozen=True)
class PdeOperator:
    """``d_z^p d_zbar^q`` with ``p = m - s`` and ``q = m``."""

    p: int
    q: int

    @classmethod
    def for_params(cls, params: EquationParams) -> "PdeOperator":
        return cls(params.m - params.s, params.m)


def _poly_monomial(params: EquationParams, role: str, k: int, p: int) -> Monomial:
    for item in kernel_basis(k, params):
        if item.role == role and item.p == p:
            return item.monomial
    raise SpecValidationError(f"no {role}-term with k={k}, p={p}")


def polynomial_part(spec: SolutionSpec) -> Superposition:
    terms = [(t.value, _poly_monomial(spec.params, "a", t.k, t.p)) for t in spec.a]
    terms += [(t.value, _poly_monomial(spec.params, "b", t.k, t.p)) for t in spec.b]
    return Superposition(terms)


def wave_part(spec: SolutionSpec) -> Superposition:
    return Superposition([(t.value, CylinderWave(complex(t.lam), t.eta, t.k)) for t in spec.c])


def build_solution(spec: SolutionSpec) -> Superposition:
    """The field ``sum_k f_k(rho) e^{ik phi}`` of a validated spec."""
    spec.validate()
    return Superposition([(1.0, polynomial_part(spec)), (1.0, wave_part(spec))])


@dataclass(frozen=True)
class DecayReport:
    ok: bool
    worst_ratio: float  # max |c| |lam|^alpha / C
    worst: WaveCoef | None


def check_decay(spec: SolutionSpec) -> DecayReport:
    """Check ``|c| <= C |lam|^-alpha`` for every wave coefficient."""
    worst, ratio = None, 0.0
    for t in spec.c:
        q = abs(t.value) * abs(t.lam) ** spec.alpha / spec.C
        if q > ratio:
            worst, ratio = t, q
    # boundary case |c| = C |lam|^-alpha passes despite rounding in the power
    return DecayReport(ratio <= 1.0 + 1e-12, ratio, worst)


def apply_pde(f: Field, z, op: PdeOperator):
    """``d_z^{m-s} d_zbar^m f`` at ``z``."""
    return wirtinger(f, z, (op.p, op.q))


def sample_points(radius: float, n: int) -> np.ndarray:
    """Sunflower points in the open disk, plus the origin and 8 points near its rim."""
    j = np.arange(n)
    inner = radius * np.sqrt((j + 0.5) / n) * np.exp(1j * _GOLDEN_ANGLE * j)
    rim = 0.98 * radius * np.exp(1j * (2 * pi * np.arange(8) / 8 + pi / 8))
    return np.concatenate([[0j], inner, rim])


@dataclass(frozen=True)
class SolutionReport:
    R: float
    n_points: int
    max_residual: float
    max_error_estimate: float
    max_ratio: float  # max |residual| / max(abs_tol, 3 err)
    passed: bool
    note: str = ("checks that the represented field solves the equation; "
                 "it does not certify that every solution has this form")


def verify_solution(spec: SolutionSpec, R: float, n_samples: int = 20,
                    rule: QuadratureRule = DEFAULT_RULE, abs_tol: float = 1e-9) -> SolutionReport:
    """Residual of the built solution over the disk of radius ``R - r``."""
    r = spec.params.r
    if not R > r:
        raise ValueError("R must exceed r")
    f = build_solution(spec)
    zs = sample_points(R - r, n_samples)
    reps = residuals([f], zs, spec.params, rule)[0]
    ratios = [abs(x.residual) / max(abs_tol, 3 * x.quad_error_estimate) for x in reps]
    return SolutionReport(
        R, len(zs),
        max(abs(x.residual) for x in reps),
        max(x.quad_error_estimate for x in reps),
        max(ratios),
        all(q <= 1.0 for q in ratios),
    )


def random_spec(catalog: ZeroCatalog, params: EquationParams, rng: np.random.Generator, *,
                n_harmonics: int = 3, n_zeros: int = 3, alpha: float = 4.0, C: float = 1.0,
                zeros: list[Zero] | None = None) -> SolutionSpec:
    """A random spec over ``n_harmonics`` harmonics and the ``n_zeros`` smallest zeros of Z_r."""
    if zeros is None:
        zeros = select_Zr(catalog, params.r)[:n_zeros]
    K = (n_harmonics - 1) // 2 + (n_harmonics - 1) % 2
    ks = list(range(-K, K + 1))[:n_harmonics]

    def draw():
        return complex(rng.normal(), rng.normal()) / sqrt(2)

    a, b, c = [], [], []
    for k in ks:
        a += [PolyCoef(k, p, draw()) for p in range(params.s) if p + k >= 0]
        b += [PolyCoef(k, p, draw()) for p in range(params.m - params.s)]
        for z in zeros:
            for eta in range(z.multiplicity):
                u = draw()
                u /= max(1.0, abs(u))
                c.append(WaveCoef(z.lam, eta, k, C * abs(z.lam) ** (-alpha) * u))
    mult = {complex(z.lam): z.multiplicity for z in zeros}
    return SolutionSpec(params, K, tuple(a), tuple(b), tuple(c), alpha, C, mult)


def with_injected_wave(spec: SolutionSpec, lam: complex, k: int = 0, value: complex = 1.0) -> SolutionSpec:
    """Copy of ``spec`` with one extra cylinder wave at an arbitrary ``lam``."""
    extra = WaveCoef(complex(lam), 0, k, complex(value))
    return SolutionSpec(spec.params, max(spec.K, abs(k)), spec.a, spec.b, spec.c + (extra,),
                        spec.alpha, spec.C, spec.multiplicities)


def non_zero_lambda(catalog: ZeroCatalog, params: EquationParams) -> complex:
    """A point of the Z_r half-plane where g_r is far from zero (for negative controls)."""
    first = select_Zr(catalog, params.r)[0].lam
    lam = 1.1 * first
    assert abs(eval_g(params, lam)) > 1e-3
    return lam
