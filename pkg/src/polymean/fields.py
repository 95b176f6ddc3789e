"""Smooth test fields on the plane with exact Wirtinger derivatives.

Each field knows how to express a mixed derivative ``d_z^p d_zbar^q f`` as
a finite linear combination of fields of the same family:

* plane wave   ``exp(i lam (x cos a + y sin a))``: a scalar multiple of itself;
* cylinder wave ``Phi_{lam,eta,k}(rho) e^{ik phi}``: cylinder waves of order
  ``k + q - p`` and lower ``eta``;
* monomial     ``z^a conj(z)^b``: a falling-factorial multiple of a monomial.

``wirtinger_fd`` is an independent central-difference check of the same
derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import NamedTuple, Sequence

import numpy as np

from .chareq import EquationParams
from .specfun import bessel_j_deriv_many


class WirtingerOrder(NamedTuple):
    p: int  # number of d/dz
    q: int  # number of d/dzbar


class Field:
    """Base class; subclasses are immutable and evaluate vectorised over ``z``."""

    def __call__(self, z):
        return Superposition([(1.0, self)])(z)

    def derivative_terms(self, p: int, q: int) -> list[tuple[complex, "Field"]]:
        raise NotImplementedError

    @property
    def length_scale(self) -> float:
        return 1.0

    def __add__(self, other: "Field") -> "Superposition":
        return Superposition([(1.0, self), (1.0, other)])

    def __rmul__(self, c) -> "Superposition":
        return Superposition([(complex(c), self)])


@dataclass(frozen=True)
class PlaneWave(Field):
    lam: complex
    alpha: float

    def direct(self, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.lam * (z.real * np.cos(self.alpha) + z.imag * np.sin(self.alpha)))

    def derivative_terms(self, p, q):
        c = (0.5j * self.lam) ** (p + q) * np.exp(1j * self.alpha * (q - p))
        return [(complex(c), self)]

    @property
    def length_scale(self):
        return 1.0 / max(1.0, abs(self.lam))


@dataclass(frozen=True)
class CylinderWave(Field):
    """``Phi_{lam,eta,k}(|z|) e^{ik arg z}`` with ``Phi = rho^eta J_k^{(eta)}(lam rho)``."""

    lam: complex
    eta: int
    k: int

    def derivative_terms(self, p, q):
        n = p + q
        kk = self.k + q - p
        sign = (-1) ** q
        out = []
        for j in range(min(self.eta, n) + 1):
            c = comb(self.eta, j) * factorial(n) / factorial(n - j) * self.lam ** (n - j) / 2.0**n
            out.append((complex(sign * c), CylinderWave(self.lam, self.eta - j, kk)))
        return out

    @property
    def length_scale(self):
        return 1.0 / max(1.0, abs(self.lam))


@dataclass(frozen=True)
class Monomial(Field):
    """``z^a conj(z)^b``."""

    a: int
    b: int

    def direct(self, z):
        z = np.asarray(z, dtype=complex)
        return z**self.a * np.conj(z) ** self.b

    def exact_derivative(self, p: int, q: int) -> tuple[int, "Monomial"]:
        """Integer coefficient and monomial of ``d_z^p d_zbar^q``; coefficient 0 when it vanishes."""
        if p > self.a or q > self.b:
            return 0, Monomial(0, 0)
        c = (factorial(self.a) // factorial(self.a - p)) * (factorial(self.b) // factorial(self.b - q))
        return c, Monomial(self.a - p, self.b - q)

    def derivative_terms(self, p, q):
        c, mono = self.exact_derivative(p, q)
        return [(complex(c), mono)] if c else []


class Superposition(Field):
    """Finite linear combination of fields, flattened to depth one."""

    def __init__(self, terms: Sequence[tuple[complex, Field]]):
        flat: list[tuple[complex, Field]] = []
        for c, f in terms:
            if isinstance(f, Superposition):
                flat.extend((complex(c) * c2, f2) for c2, f2 in f.terms)
            else:
                flat.append((complex(c), f))
        self.terms = tuple(flat)

    def __repr__(self):
        return f"Superposition({list(self.terms)!r})"

    def __eq__(self, other):
        return isinstance(other, Superposition) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def derivative_terms(self, p, q):
        return [(c * c2, f2) for c, f in self.terms for c2, f2 in f.derivative_terms(p, q)]

    @property
    def length_scale(self):
        return min((f.length_scale for _, f in self.terms), default=1.0)

    def __call__(self, z):
        out = evaluate_many([self], z)[0]
        return out[()] if out.ndim == 0 else out


def _as_terms(f: Field):
    return f.terms if isinstance(f, Superposition) else ((1.0, f),)


def evaluate_many(fields: Sequence[Field], z) -> np.ndarray:
    """Evaluate several fields on the same points, shape ``(len(fields),) + z.shape``.

    Cylinder waves sharing a ``lam`` (within and across fields) share one
    Bessel recurrence.
    """
    z = np.asarray(z, dtype=complex)
    out = np.zeros((len(fields),) + z.shape, dtype=complex)
    groups: dict[complex, dict[tuple[int, int], list[tuple[int, complex]]]] = {}
    for idx, f in enumerate(fields):
        for c, g in _as_terms(f):
            if c == 0:
                continue
            if isinstance(g, CylinderWave):
                groups.setdefault(complex(g.lam), {}).setdefault((g.k, g.eta), []).append((idx, c))
            else:
                out[idx] += c * g.direct(z)
    if not groups:
        return out
    rho = np.abs(z)
    unit = np.where(rho > 0, z / np.where(rho > 0, rho, 1.0), 1.0)
    powers: dict[int, np.ndarray] = {}

    def harmonic(k):
        if k not in powers:
            powers[k] = unit**k if k >= 0 else np.conj(unit) ** (-k)
        return powers[k]

    for lam, bucket in groups.items():
        vals = bessel_j_deriv_many(bucket.keys(), lam * rho)
        for (k, eta), users in bucket.items():
            base = rho**eta * vals[(k, eta)] * harmonic(k)
            for idx, c in users:
                out[idx] += c * base
    return out


# -- module-level operations --------------------------------------------------

def eval_field(f: Field, z):
    """Pointwise value of ``f``."""
    return f(z)


def wirtinger(f: Field, z, order: WirtingerOrder | tuple[int, int]):
    """Exact ``d_z^p d_zbar^q f`` at ``z``."""
    p, q = order
    if p < 0 or q < 0:
        raise ValueError("derivative orders must be nonnegative")
    if p == q == 0:
        return f(z)
    terms = f.derivative_terms(p, q)
    if not terms:
        z = np.asarray(z, dtype=complex)
        res = np.zeros(z.shape, dtype=complex)
        return res[()] if res.ndim == 0 else res
    return Superposition(terms)(z)


# -- finite differences ---------------------------------------------------------

FD_MAX_ORDER = 4
_FD_STEP = {1: 1e-3, 2: 3e-3, 3: 6e-3, 4: 1e-2}


class OrderTooHighError(ValueError):
    pass


@lru_cache(maxsize=None)
def _central_weights(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Fourth-order central stencil for the d-th derivative (unit spacing)."""
    if d == 0:
        return np.array([0]), np.array([1.0])
    half = (d + 1) // 2 + 1
    nodes = np.arange(-half, half + 1)
    vander = np.vander(nodes.astype(float), increasing=True).T
    rhs = np.zeros(len(nodes))
    rhs[d] = factorial(d)
    return nodes, np.linalg.solve(vander, rhs)


def _operator_expansion(p: int, q: int) -> dict[tuple[int, int], complex]:
    """Coefficients of d_x^i d_y^j in 2^-(p+q) (d_x - i d_y)^p (d_x + i d_y)^q."""
    poly = {(0, 0): 1.0 + 0j}
    for factor in [(1.0, -1j)] * p + [(1.0, 1j)] * q:
        nxt: dict[tuple[int, int], complex] = {}
        for (i, j), c in poly.items():
            nxt[(i + 1, j)] = nxt.get((i + 1, j), 0) + c * factor[0] / 2
            nxt[(i, j + 1)] = nxt.get((i, j + 1), 0) + c * factor[1] / 2
        poly = nxt
    return poly


def wirtinger_fd(f: Field, z: complex, order: WirtingerOrder | tuple[int, int],
                 h: float | None = None) -> complex:
    """Central-difference approximation of ``d_z^p d_zbar^q f`` at a point.

    Uses d_z = (d_x - i d_y)/2 and d_zbar = (d_x + i d_y)/2 with tensor
    products of fourth-order central stencils.  The default step is tied to
    the field's oscillation length and to the derivative order.
    """
    p, q = order
    n = p + q
    if n > FD_MAX_ORDER:
        raise OrderTooHighError(f"finite differences support p+q <= {FD_MAX_ORDER}, got {n}")
    z = complex(z)
    if n == 0:
        return complex(f(z))
    if h is None:
        h = _FD_STEP[n] * f.length_scale
    elif not 1e-5 <= h <= 1e-2:
        raise ValueError("step h must lie in [1e-5, 1e-2]")
    total = 0j
    for (i, j), c in _operator_expansion(p, q).items():
        xi, wi = _central_weights(i)
        yj, wj = _central_weights(j)
        pts = z + h * (xi[:, None] + 1j * yj[None, :])
        vals = np.asarray(f(pts))
        total += c * np.sum(wi[:, None] * wj[None, :] * vals) / h ** (i + j)
    return complex(total)


# -- polynomial solutions ------------------------------------------------------

@dataclass(frozen=True)
class BasisMonomial:
    monomial: Monomial
    role: str  # "a" or "b"
    p: int


def kernel_basis(k: int, params: EquationParams) -> list[BasisMonomial]:
    """Monomials ``rho^N e^{ik phi}`` spanning the polynomial part of harmonic ``k``.

    a-terms: ``rho^{2p+k}``, ``0 <= p <= s-1``, ``p+k >= 0``;
    b-terms: ``rho^{2p+s+|k+s|}``, ``0 <= p <= m-s-1``.
    A monomial ``z^a zbar^b`` has ``rho``-power ``a+b`` and harmonic ``a-b``.
    """
    m, s = params.m, params.s
    out = [BasisMonomial(Monomial(p + k, p), "a", p) for p in range(s) if p + k >= 0]
    for p in range(m - s):
        if k + s >= 0:
            mono = Monomial(p + s + k, p + s)
        else:
            mono = Monomial(p, p - k)
        out.append(BasisMonomial(mono, "b", p))
    return out
