"""Both sides of the weighted disk mean-value equation and their residual.

For a field ``f`` and a center ``z`` the equation reads

    sum_{n=s}^{m-1} r^{2n+2} / (2 (n-s)! (n+1)!) d_z^{n-s} d_zbar^n f(z)
        = (1/2pi) int_{|w|<=r} f(z+w) w^s dA(w)

The left side (the *derivative sum*) is computed from exact Wirtinger
derivatives; the right side (the *disk mean*) by Gauss-Legendre in the
radius and the trapezoid rule in the angle.  ``residual = lhs - rhs``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import factorial, pi
from typing import Sequence

import numpy as np

from .chareq import EquationParams, eval_g
from .fields import Field, PlaneWave, Superposition, evaluate_many, wirtinger

EPS = np.finfo(float).eps
# rounding allowance: multiple of eps times the sum of absolute contributions
ROUNDOFF_FACTOR = 32.0
SATISFIES_ABS_TOL = 1e-9


class QuadratureError(RuntimeError):
    """Node doubling failed to reach the requested agreement."""


@dataclass(frozen=True)
class QuadratureRule:
    """Polar product rule on a disk.

    ``n_rho`` Gauss-Legendre nodes on ``[0, r]`` and ``n_t`` trapezoid nodes
    on ``[-pi, pi)``.  When ``adaptive`` the rule is compared with its
    half-resolution sibling and doubled until the two agree to ``rel_tol``
    (capped at ``max_rho`` x ``max_t``).
    """

    n_rho: int = 64
    n_t: int = 256
    adaptive: bool = True
    rel_tol: float = 1e-11
    max_rho: int = 512
    max_t: int = 2048

    def __post_init__(self):
        if self.n_t % 2:
            raise ValueError("n_t must be even")
        if self.n_rho < 2 or self.n_t < 4:
            raise ValueError("quadrature rule too small")

    def doubled(self) -> "QuadratureRule":
        return QuadratureRule(2 * self.n_rho, 2 * self.n_t, self.adaptive, self.rel_tol,
                              self.max_rho, self.max_t)


DEFAULT_RULE = QuadratureRule()


@dataclass(frozen=True)
class ResidualReport:
    """``residual = lhs - rhs`` at one center, with an error estimate.

    ``quad_error_estimate`` combines the two-resolution quadrature difference
    with rounding allowances for both sides.
    """

    z: complex
    lhs: complex
    rhs: complex
    residual: complex
    quad_error_estimate: float

    def satisfied(self, abs_tol: float = SATISFIES_ABS_TOL) -> bool:
        """Whether the equation holds here to within the noise floor."""
        return abs(self.residual) <= max(abs_tol, 3.0 * self.quad_error_estimate)


# -- right side --------------------------------------------------------------

def _disk_mean_once(fields, zs, s, r, n_rho, n_t):
    x, w = np.polynomial.legendre.leggauss(n_rho)
    rho = 0.5 * r * (x + 1.0)
    w_rho = 0.5 * r * w * rho ** (s + 1)
    t = -pi + 2 * pi * np.arange(n_t) / n_t
    e = np.exp(1j * t)
    weights = w_rho[:, None] * np.exp(1j * s * t)[None, :] / n_t
    pts = zs[:, None, None] + rho[None, :, None] * e[None, None, :]
    vals = evaluate_many(fields, pts)
    terms = vals * weights[None, None]
    value = terms.sum(axis=(-2, -1))
    roundoff = ROUNDOFF_FACTOR * EPS * np.abs(terms).sum(axis=(-2, -1))
    return value, roundoff


def disk_means(fields: Sequence[Field], zs, params: EquationParams,
               rule: QuadratureRule = DEFAULT_RULE) -> tuple[np.ndarray, np.ndarray]:
    """Weighted disk means for every (field, center) pair.

    Returns ``(values, errors)``, each of shape ``(len(fields), len(zs))``.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    s, r = params.s, params.r
    n_rho, n_t = rule.n_rho, rule.n_t
    coarse, _ = _disk_mean_once(fields, zs, s, r, max(2, n_rho // 2), max(4, n_t // 2))
    while True:
        fine, roundoff = _disk_mean_once(fields, zs, s, r, n_rho, n_t)
        diff = np.abs(fine - coarse)
        floor = rule.rel_tol * np.abs(fine) + roundoff
        if not rule.adaptive or np.all(diff <= floor):
            return fine, diff + roundoff
        if 2 * n_rho > rule.max_rho or 2 * n_t > rule.max_t:
            if np.all(diff <= 1e3 * floor):
                return fine, diff + roundoff
            raise QuadratureError(
                f"disk quadrature not converged at ({n_rho}, {n_t}): "
                f"max difference {diff.max():.3e}")
        coarse = fine
        n_rho, n_t = 2 * n_rho, 2 * n_t


def weighted_disk_mean(f: Field, z: complex, params: EquationParams,
                       rule: QuadratureRule = DEFAULT_RULE) -> tuple[complex, float]:
    """``(1/2pi) int_0^r int_{-pi}^{pi} f(z + rho e^{it}) rho^{s+1} e^{ist} dt drho``."""
    vals, errs = disk_means([f], [z], params, rule)
    return complex(vals[0, 0]), float(errs[0, 0])


# -- left side -----------------------------------------------------------------

def derivative_sum_coefficients(params: EquationParams) -> list[tuple[int, int, float]]:
    """``(p, q, coefficient)`` for each term ``n = s..m-1`` of the derivative sum."""
    m, s, r = params.m, params.s, params.r
    return [(n - s, n, r ** (2 * n + 2) / (2 * factorial(n - s) * factorial(n + 1)))
            for n in range(s, m)]


def _derivative_sums(fields, zs, params):
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    total = np.zeros((len(fields), len(zs)), dtype=complex)
    mag = np.zeros((len(fields), len(zs)))
    for i, f in enumerate(fields):
        for p, q, c in derivative_sum_coefficients(params):
            term = c * np.asarray(wirtinger(f, zs, (p, q)))
            total[i] += term
            mag[i] += np.abs(term)
    return total, mag


def derivative_sum(f: Field, z, params: EquationParams):
    """Left side of the mean-value equation at ``z``."""
    total, _ = _derivative_sums([f], z, params)
    out = total[0]
    return out[0] if np.ndim(z) == 0 else out


# -- residual --------------------------------------------------------------------

def residuals(fields: Sequence[Field], zs, params: EquationParams,
              rule: QuadratureRule = DEFAULT_RULE) -> list[list[ResidualReport]]:
    """Residual reports for every field (outer list) at every center (inner list)."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    rhs, rhs_err = disk_means(fields, zs, params, rule)
    lhs, lhs_mag = _derivative_sums(fields, zs, params)
    err = rhs_err + ROUNDOFF_FACTOR * EPS * lhs_mag
    return [[ResidualReport(complex(z), complex(lhs[i, j]), complex(rhs[i, j]),
                            complex(lhs[i, j] - rhs[i, j]), float(err[i, j]))
             for j, z in enumerate(zs)] for i in range(len(fields))]


def residual(f: Field, z: complex, params: EquationParams,
             rule: QuadratureRule = DEFAULT_RULE) -> ResidualReport:
    """Derivative sum minus disk mean of ``f`` at ``z``."""
    return residuals([f], [z], params, rule)[0][0]


def residual_sweep(f: Field, zs, params: EquationParams,
                   rule: QuadratureRule = DEFAULT_RULE) -> list[ResidualReport]:
    return residuals([f], zs, params, rule)[0]


# -- plane-wave closed form ---------------------------------------------------------

# Unimodular constant in the plane-wave identity, fixed per s by calibrate_plane_wave_constant.
def plane_wave_constant(s: int) -> complex:
    return 1j**s


CALIBRATION_POINT = dict(lam=1.7, alpha=0.3, z=0.2 + 0.1j, r=1.0)


def plane_wave_structure(lam: complex, alpha: float, z: complex, params: EquationParams) -> complex:
    """``g_r(lam) e^{i alpha s} (r^{s+1}/lam) (lam r)^{s+1} f(z)`` without the constant."""
    s, r = params.s, params.r
    f = PlaneWave(lam, alpha)
    return complex(eval_g(params, lam) * np.exp(1j * alpha * s) * r ** (s + 1) / lam
                   * (lam * r) ** (s + 1) * f(z))


def plane_wave_defect(lam: complex, alpha: float, z: complex, params: EquationParams) -> complex:
    """Predicted disk mean minus derivative sum for the plane wave ``PlaneWave(lam, alpha)``.

    Equals ``-residual(PlaneWave(lam, alpha), z, params).residual``.
    """
    lam = complex(lam)
    if abs(lam) < 1e-6:
        raise ValueError("plane_wave_defect requires |lam| >= 1e-6")
    return plane_wave_constant(params.s) * plane_wave_structure(lam, alpha, z, params)


def calibrate_plane_wave_constant(m: int, s: int, rule: QuadratureRule = DEFAULT_RULE) -> complex:
    """Pick the unimodular constant in {1, i, -1, -i} that matches the quadrature.

    Evaluated once at the reference point ``CALIBRATION_POINT``.
    """
    ref = CALIBRATION_POINT
    params = EquationParams(m, s, ref["r"])
    f = PlaneWave(ref["lam"], ref["alpha"])
    target = -residual(f, ref["z"], params, rule).residual
    base = plane_wave_structure(ref["lam"], ref["alpha"], ref["z"], params)
    candidates = [1, 1j, -1, -1j]
    return min(candidates, key=lambda c: abs(c * base - target))


# -- Fourier coefficients ---------------------------------------------------------

def fourier_coeff(f: Field, k: int, rho: float, n_t: int = 256) -> complex:
    """``(1/2pi) int f(rho e^{it}) e^{-ikt} dt`` by the periodic trapezoid rule."""
    if abs(k) > n_t / 4:
        warnings.warn(f"harmonic {k} is close to the aliasing limit of {n_t} nodes", stacklevel=2)
    t = -pi + 2 * pi * np.arange(n_t) / n_t
    vals = np.asarray(f(rho * np.exp(1j * t)))
    return complex(np.mean(vals * np.exp(-1j * k * t)))


def fourier_coeffs(f: Field, ks: Sequence[int], rho: float, n_t: int = 256) -> np.ndarray:
    t = -pi + 2 * pi * np.arange(n_t) / n_t
    vals = np.asarray(f(rho * np.exp(1j * t)))
    return np.array([np.mean(vals * np.exp(-1j * k * t)) for k in ks])


def superposition_residual_bound(coefs, reports: Sequence[ResidualReport]) -> float:
    """``sum |c_i| (|residual_i| + err_i)``; bounds the residual of the combination."""
    return float(sum(abs(c) * (abs(rep.residual) + rep.quad_error_estimate)
                     for c, rep in zip(coefs, reports)))


__all__ = [
    "QuadratureRule", "ResidualReport", "QuadratureError", "DEFAULT_RULE",
    "weighted_disk_mean", "disk_means", "derivative_sum", "residual", "residuals",
    "residual_sweep", "plane_wave_defect", "plane_wave_constant", "calibrate_plane_wave_constant",
    "fourier_coeff", "fourier_coeffs", "Superposition",
]
