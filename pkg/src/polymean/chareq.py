"""The characteristic entire function of the mean-value equation.

For fixed ``(m, s)`` the radius-free function is

    G(w) = J_{s+1}(w) / w^{s+1} - sum_{j=0}^{m-s-1} (-1)^j w^{2j} / (j! (j+s+1)! 2^{2j+s+1})

and ``g_r(z) = G(r z)``.  The subtracted polynomial is exactly the first
``m - s`` terms of the Taylor series of ``J_{s+1}(w)/w^{s+1}``, so near the
origin G is evaluated from the remaining tail of that series, which avoids
the cancellation of the Bessel form.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .specfun import bessel_j_orders

TAIL_MAX_TERMS = 80
TAIL_REL_STOP = 1e-18


@dataclass(frozen=True)
class EquationParams:
    """The triple ``(m, s, r)`` fixing one instance of the mean-value equation."""

    m: int
    s: int
    r: float = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if int(self.s) != self.s or not 0 <= self.s <= self.m - 1:
            raise ValueError(f"s must satisfy 0 <= s <= m-1, got s={self.s}, m={self.m}")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")

    def with_radius(self, r: float) -> "EquationParams":
        return EquationParams(self.m, self.s, r)

    @property
    def characteristic(self) -> "CharacteristicFn":
        return CharacteristicFn(self.m, self.s)


def _coef(j: int, s: int) -> float:
    """Taylor coefficient of w^{2j} in J_{s+1}(w)/w^{s+1}."""
    return (-1) ** j / (factorial(j) * factorial(j + s + 1) * 2.0 ** (2 * j + s + 1))


@dataclass(frozen=True)
class CharacteristicFn:
    """Canonical characteristic function ``G`` for a given ``(m, s)``.

    ``threshold`` is the modulus below which the tail series is used; by
    default ``max(6, 2(m-s)+4)``.
    """

    m: int
    s: int
    threshold: float | None = None

    def __post_init__(self):
        EquationParams(self.m, self.s)
        if self.threshold is None:
            object.__setattr__(self, "threshold", float(max(6, 2 * (self.m - self.s) + 4)))

    @property
    def origin_order(self) -> int:
        """Order of the zero of G at the origin."""
        return 2 * (self.m - self.s)

    def poly_coefficients(self) -> list[float]:
        """Coefficients of w^{2j}, j = 0..m-s-1, of the subtracted polynomial."""
        return [_coef(j, self.s) for j in range(self.m - self.s)]

    # -- the two representations -------------------------------------------

    def bessel_form(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        nu = self.s + 1
        jn = bessel_j_orders(nu, w)[nu]
        return jn / w**nu - self._poly(w)

    def bessel_form_deriv(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        nu = self.s + 1
        jn1 = bessel_j_orders(nu + 1, w)[nu + 1]
        return -jn1 / w**nu - self._poly_deriv(w)

    def tail_series(self, w) -> np.ndarray:
        return self._tail(np.asarray(w, dtype=complex), deriv=False)

    def tail_series_deriv(self, w) -> np.ndarray:
        return self._tail(np.asarray(w, dtype=complex), deriv=True)

    def _poly(self, w):
        w2 = w * w
        acc = np.zeros_like(w)
        for c in reversed(self.poly_coefficients()):
            acc = acc * w2 + c
        return acc

    def _poly_deriv(self, w):
        w2 = w * w
        acc = np.zeros_like(w)
        coefs = self.poly_coefficients()
        for j in range(len(coefs) - 1, 0, -1):
            acc = acc * w2 + 2 * j * coefs[j]
        # acc is now sum 2j c_j w^{2j-2}; one factor of w restores the power
        return acc * w

    def _tail(self, w, deriv: bool):
        j0 = self.m - self.s
        w2 = w * w
        if deriv:
            term = 2 * j0 * _coef(j0, self.s) * w ** (2 * j0 - 1)
        else:
            term = _coef(j0, self.s) * w ** (2 * j0)
        acc = term.copy()
        for j in range(j0 + 1, j0 + TAIL_MAX_TERMS):
            # ratio of consecutive Taylor coefficients times w^2
            ratio = -w2 / (4.0 * j * (j + self.s + 1))
            if deriv:
                ratio = ratio * (2 * j) / (2 * j - 2)
            term = term * ratio
            acc = acc + term
            if np.all(np.abs(term) <= TAIL_REL_STOP * np.abs(acc)):
                break
        return acc

    # -- public evaluation -------------------------------------------------

    def __call__(self, w):
        return eval_G(self, w)

    def deriv(self, w):
        return eval_G_deriv(self, w)

    def magnitude_scale(self, w) -> np.ndarray:
        """Typical size of the terms whose difference is G(w); used for tolerances."""
        w = np.asarray(w, dtype=complex)
        aw2 = np.abs(w) ** 2
        poly = sum(abs(c) * aw2**j for j, c in enumerate(self.poly_coefficients()))
        return np.maximum(1.0, poly)


def _dispatch(fn: CharacteristicFn, w, near, far):
    w = np.asarray(w, dtype=complex)
    out = np.empty(w.shape, dtype=complex)
    small = np.abs(w) <= fn.threshold
    if np.any(small):
        out[small] = near(w[small])
    if np.any(~small):
        out[~small] = far(w[~small])
    return out[()] if out.ndim == 0 else out


def eval_G(fn: CharacteristicFn, w):
    """G(w), choosing the tail series near the origin and the Bessel form elsewhere."""
    return _dispatch(fn, w, fn.tail_series, fn.bessel_form)


def eval_G_deriv(fn: CharacteristicFn, w):
    """G'(w), using d/dw[J_nu(w)/w^nu] = -J_{nu+1}(w)/w^nu away from the origin."""
    return _dispatch(fn, w, fn.tail_series_deriv, fn.bessel_form_deriv)


def eval_g(params: EquationParams, z):
    """g_r(z) = G(r z)."""
    return eval_G(params.characteristic, params.r * np.asarray(z, dtype=complex))


def eval_g_deriv(params: EquationParams, z):
    """g_r'(z) = r G'(r z)."""
    return params.r * eval_G_deriv(params.characteristic, params.r * np.asarray(z, dtype=complex))
