"""Common zeros of g_{r1} and g_{r2}, and the regimes of the two-radii problem.

Because ``g_r(z) = G(rz)``, the zero set of ``g_r`` is the radius-1 set
scaled by ``1/r``.  A common zero therefore corresponds to two canonical
zeros ``w1, w2`` with ``w1/r1 = w2/r2``, which is tested directly on the
catalog instead of comparing two rescaled floating-point lists.

Emptiness is only ever established up to the catalog's scanned bound and the
match tolerance; both travel with every report.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .chareq import EquationParams
from .fields import CylinderWave, Field, Monomial, Superposition, wirtinger
from .meanvalue import DEFAULT_RULE, QuadratureRule, residuals
from .synthesis import PdeOperator, sample_points
from .zeroscan import Zero, ZeroCatalog, select_Zr

MATCH_TOL = 1e-9
# relative tolerance for deciding R == r1 + r2
BOUNDARY_RTOL = 1e-12
# apply_pde must reach this fraction of the sampled field magnitude
PDE_VIOLATION_FRACTION = 1e-3


class Regime(str, enum.Enum):
    INJECTIVE = "Injective"
    COUNTEREXAMPLE_CONSTRUCTED = "CounterexampleConstructed"
    NONCONSTRUCTIVE = "NonconstructiveCounterexampleRegime"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class CommonZero:
    lam: complex  # the common zero w1/r1
    w1: int  # index into the canonical list
    w2: int
    ratio_defect: float  # |w2/w1 - r2/r1|


@dataclass(frozen=True)
class TwoRadiiReport:
    m: int
    s: int
    r1: float
    r2: float
    R: float
    common_zeros: tuple[CommonZero, ...]
    regime: Regime
    lambda_max: float
    tol: float
    counterexample: Field | None = field(default=None, compare=False)


def canonical_zeros(catalog: ZeroCatalog) -> list[Zero]:
    """Radius-1 representatives of Z_r, ordered by modulus."""
    return select_Zr(catalog, 1.0)


def common_zeros(catalog: ZeroCatalog, r1: float, r2: float, tol: float = MATCH_TOL) -> list[CommonZero]:
    """All ``lam = w1/r1 = w2/r2`` with ``w1, w2`` canonical, matched within ``tol``.

    A pair matches when ``|w2 - w1 r2/r1| <= tol (1 + |w1|)``.
    """
    if not (r1 > 0 and r2 > 0):
        raise ValueError("radii must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    ws = np.array([z.lam for z in canonical_zeros(catalog)], dtype=complex)
    if r1 == r2:
        return [CommonZero(complex(w / r1), i, i, 0.0) for i, w in enumerate(ws)]
    ratio = r2 / r1
    target = ws * ratio
    gap = np.abs(ws[None, :] - target[:, None])  # [i, j] = |w_j - w_i r2/r1|
    hits = np.argwhere(gap <= tol * (1.0 + np.abs(ws))[:, None])
    out = []
    for i, j in hits:
        defect = abs(ws[j] / ws[i] - ratio)
        out.append(CommonZero(complex(ws[i] / r1), int(i), int(j), float(defect)))
    return out


def real_ratio_pairs(catalog: ZeroCatalog, tol: float = MATCH_TOL) -> list[tuple[int, int, float]]:
    """Canonical pairs ``(i, j, w_j/w_i)`` with a real ratio above 1.

    Each such pair gives radii ``(1, w_j/w_i)`` with a common zero.
    """
    ws = [z.lam for z in canonical_zeros(catalog)]
    out = []
    for i, a in enumerate(ws):
        for j, b in enumerate(ws):
            if i == j:
                continue
            q = b / a
            if q.real > 1 and abs(q.imag) <= tol * abs(q):
                out.append((i, j, q.real))
    return out


def counterexample(lam: complex) -> CylinderWave:
    """``Phi_{lam,0,0}``: solves the equation for every radius with ``g_r(lam) = 0``."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("the origin is never a common zero")
    return CylinderWave(lam, 0, 0)


@dataclass(frozen=True)
class ContractReport:
    max_residual_ratio: tuple[float, float]  # per radius: max |res| / max(abs_tol, 3 err)
    pde_ratio: float  # max |apply_pde| / max |field| over the samples
    passed: bool


def check_counterexample(f: Field, m: int, s: int, r1: float, r2: float, R: float, *,
                         n_samples: int = 20, rule: QuadratureRule = DEFAULT_RULE,
                         abs_tol: float = 1e-9) -> ContractReport:
    """Residual for both radii on ``|z| < R - r_i``, and failure of the PDE."""
    ratios = []
    zs_all = []
    for r in (r1, r2):
        params = EquationParams(m, s, r)
        zs = sample_points(R - r, n_samples)
        zs_all.append(zs)
        reps = residuals([f], zs, params, rule)[0]
        ratios.append(max(abs(x.residual) / max(abs_tol, 3 * x.quad_error_estimate) for x in reps))
    zs = np.concatenate(zs_all)
    op = PdeOperator(m - s, m)
    pde = np.max(np.abs(wirtinger(f, zs, (op.p, op.q))))
    scale = np.max(np.abs(f(zs)))
    pde_ratio = float(pde / scale)
    passed = max(ratios) <= 1.0 and pde_ratio >= PDE_VIOLATION_FRACTION
    return ContractReport((ratios[0], ratios[1]), pde_ratio, passed)


def classify(catalog: ZeroCatalog, r1: float, r2: float, R: float, tol: float = MATCH_TOL) -> TwoRadiiReport:
    """Place ``(r1, r2, R)`` in one of the two-radii regimes."""
    if not (r1 > 0 and r2 > 0):
        raise ValueError("radii must be positive")
    if not max(r1, r2) < R:
        raise ValueError("need max(r1, r2) < R")
    found = tuple(common_zeros(catalog, r1, r2, tol))
    example = None
    if found:
        regime = Regime.COUNTEREXAMPLE_CONSTRUCTED
        example = counterexample(found[0].lam)
    elif math.isclose(R, r1 + r2, rel_tol=BOUNDARY_RTOL):
        regime = Regime.INDETERMINATE
    elif R > r1 + r2:
        regime = Regime.INJECTIVE
    else:
        regime = Regime.NONCONSTRUCTIVE
    return TwoRadiiReport(catalog.m, catalog.s, float(r1), float(r2), float(R), found, regime,
                          catalog.lambda_max, float(tol), example)


def polynomial_solution(m: int, s: int, rng: np.random.Generator, K: int = 2) -> Superposition:
    """Random combination of the monomials ``z^a zbar^b`` with ``a < m-s`` or ``b < m``.

    These are exactly the monomials killed by ``d_z^{m-s} d_zbar^m``; used to
    check that solutions of both equations in the injective regime solve the PDE.
    """
    terms = []
    for a in range(m - s + K):
        for b in range(m + K):
            if a < m - s or b < m:
                terms.append((complex(rng.normal(), rng.normal()), Monomial(a, b)))
    return Superposition(terms)
