"""Bessel functions of the first kind for integer order and complex argument.

Small arguments use the power series directly; larger ones use Miller's
backward recurrence, normalised with the generating-function identity

    exp(i*sigma*w) = J_0(w) + 2 * sum_{n>=1} (i*sigma)^n J_n(w)

where ``sigma`` is chosen so that ``|exp(i*sigma*w)| = exp(|Im w|)``.  The
normalising sum is then of the same size as its largest terms, so the
recurrence keeps full relative accuracy off the real axis too.

Everything here is vectorised over the argument ``w``.
"""

from __future__ import annotations

from math import comb

import numpy as np

# Operating envelope.  Arguments outside it raise instead of losing digits.
ENVELOPE_ABS = 200.0
ENVELOPE_IMAG = 40.0
# Largest derivative order accepted by bessel_j_deriv.
MAX_DERIV_ORDER = 8
# |w| at or below which the power series is used.
SERIES_RADIUS = 4.0

_SERIES_TERMS = 40
_RESCALE = 1e200


class OutOfEnvelopeError(ValueError):
    """Raised when an argument lies outside the accurate evaluation envelope."""


def _check_envelope(w: np.ndarray) -> None:
    if not np.all(np.isfinite(w)):
        raise OutOfEnvelopeError("non-finite Bessel argument")
    if w.size == 0:
        return
    if np.max(np.abs(w)) > ENVELOPE_ABS or np.max(np.abs(w.imag)) > ENVELOPE_IMAG:
        raise OutOfEnvelopeError(
            f"Bessel argument outside envelope |w| <= {ENVELOPE_ABS}, "
            f"|Im w| <= {ENVELOPE_IMAG} (max |w| = {np.max(np.abs(w)):.4g}, "
            f"max |Im w| = {np.max(np.abs(w.imag)):.4g})"
        )


def _series(n_max: int, w: np.ndarray) -> np.ndarray:
    """J_0..J_{n_max} by the ascending series; accurate for |w| <= SERIES_RADIUS."""
    out = np.empty((n_max + 1,) + w.shape, dtype=complex)
    half = w / 2.0
    q = -(half * half)
    lead = np.ones_like(w)  # (w/2)^n / n!
    for n in range(n_max + 1):
        if n:
            lead = lead * half / n
        term = lead.copy()
        acc = term.copy()
        for j in range(1, _SERIES_TERMS):
            term = term * q / (j * (j + n))
            acc += term
        out[n] = acc
    return out


def _miller(n_max: int, w: np.ndarray) -> np.ndarray:
    """J_0..J_{n_max} by normalised backward recurrence; requires w != 0."""
    out = np.empty((n_max + 1,) + w.shape, dtype=complex)
    upper = w.imag > 0
    for mask, sigma in ((upper, -1.0), (~upper, 1.0)):
        if np.any(mask):
            out[:, mask] = _miller_same_sign(n_max, w[mask], sigma)
    return out


def _miller_same_sign(n_max: int, w: np.ndarray, sigma: float) -> np.ndarray:
    wmax = float(np.max(np.abs(w)))
    start = int(max(n_max, wmax) + 40 + 8 * wmax ** (1.0 / 3.0))
    start += start % 2
    unit = 1j * sigma
    out = np.zeros((n_max + 1,) + w.shape, dtype=complex)

    f_next = np.zeros_like(w)
    f_cur = np.full_like(w, 1e-30)
    tmp = np.empty_like(w)
    # powers of i*sigma cycle with period 4
    cycle = [2.0 * unit**j for j in range(4)]
    total = cycle[start % 4] * f_cur
    if start <= n_max:
        out[start] = f_cur
    two_over_w = 2.0 / w
    for n in range(start, 0, -1):
        # f_{n-1} = (2n/w) f_n - f_{n+1}, written into the buffer of f_{n+1}
        np.multiply(f_cur, two_over_w, out=tmp)
        tmp *= n
        np.subtract(tmp, f_next, out=f_next)
        f_next, f_cur = f_cur, f_next
        # growth per step is below 1e13 inside the envelope, so every 8 steps suffices
        if n % 8 == 0:
            big = np.abs(f_cur) > _RESCALE
            if np.any(big):
                scale = np.where(big, 1.0 / _RESCALE, 1.0)
                f_cur *= scale
                f_next *= scale
                total *= scale
                out *= scale
        if n - 1 <= n_max:
            out[n - 1] = f_cur
        if n > 1:
            total += cycle[(n - 1) % 4] * f_cur
        else:
            total += f_cur
    return out * (np.exp(unit * w) / total)


def bessel_j_orders(n_max: int, w) -> np.ndarray:
    """Return ``J_0(w), ..., J_{n_max}(w)`` stacked along a new leading axis."""
    w = np.asarray(w, dtype=complex)
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    _check_envelope(w)
    flat = w.reshape(-1)
    out = np.empty((n_max + 1, flat.size), dtype=complex)
    small = np.abs(flat) <= SERIES_RADIUS
    if np.any(small):
        out[:, small] = _series(n_max, flat[small])
    if np.any(~small):
        out[:, ~small] = _miller(n_max, flat[~small])
    return out.reshape((n_max + 1,) + w.shape)


def _signed_table(orders, w) -> dict[int, np.ndarray]:
    orders = list(orders)
    top = max(abs(k) for k in orders)
    table = bessel_j_orders(top, w)
    return {k: (table[-k] * (-1) ** (k % 2) if k < 0 else table[k]) for k in set(orders)}


def bessel_j(k: int, w):
    """J_k(w) for integer ``k`` (negative allowed) and complex ``w``.

    Negative orders go through J_{-k} = (-1)^k J_k.
    """
    k = int(k)
    res = _signed_table([k], w)[k]
    return res[()] if res.ndim == 0 else res


def _deriv_from_table(table: dict[int, np.ndarray], k: int, eta: int) -> np.ndarray:
    acc = 0
    for j in range(eta + 1):
        acc = acc + (-1) ** j * comb(eta, j) * table[k - eta + 2 * j]
    return acc / 2.0**eta


def bessel_j_deriv(k: int, eta: int, w):
    """eta-th derivative of J_k at w.

    Uses J_k' = (J_{k-1} - J_{k+1}) / 2 applied eta times, i.e.
    ``2^-eta * sum_j (-1)^j C(eta, j) J_{k-eta+2j}``.
    """
    k, eta = int(k), int(eta)
    if eta < 0 or eta > MAX_DERIV_ORDER:
        raise ValueError(f"derivative order must lie in [0, {MAX_DERIV_ORDER}], got {eta}")
    orders = [k - eta + 2 * j for j in range(eta + 1)]
    res = _deriv_from_table(_signed_table(orders, w), k, eta)
    res = np.asarray(res)
    return res[()] if res.ndim == 0 else res


def bessel_j_deriv_many(pairs, w) -> dict[tuple[int, int], np.ndarray]:
    """Evaluate J_k^{(eta)}(w) for several ``(k, eta)`` pairs with one recurrence."""
    pairs = [(int(k), int(e)) for k, e in pairs]
    for _, eta in pairs:
        if eta < 0 or eta > MAX_DERIV_ORDER:
            raise ValueError(f"derivative order must lie in [0, {MAX_DERIV_ORDER}], got {eta}")
    orders = {k - e + 2 * j for k, e in pairs for j in range(e + 1)}
    table = _signed_table(orders, w)
    return {(k, e): _deriv_from_table(table, k, e) for k, e in pairs}


def phi(lam, eta: int, k: int, rho):
    """Cylinder-wave radial profile ``(d/dl)^eta J_k(l*rho)`` at ``l = lam``.

    By the chain rule this is ``rho^eta * J_k^{(eta)}(lam*rho)``.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be nonnegative")
    res = rho**eta * np.asarray(bessel_j_deriv(k, eta, complex(lam) * rho))
    return res[()] if res.ndim == 0 else res

