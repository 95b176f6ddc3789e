"""Certified zeros of the characteristic function G.

Zeros are located by quadtree subdivision driven by the argument principle,
polished by Newton's method, and each one is certified by the winding
number of G around a small isolating circle.  G is even with real Taylor
coefficients, so the zero set is symmetric under ``w -> -w`` and
``w -> conj(w)``; only representatives with ``Re w > 0, Im w >= 0`` are
stored.  The zero at the origin is recorded separately.

Search region (before reflection)::

    U = [a, X] x [-b, H]

with a thin strip ``[-a, a] x [-H, H]`` around the imaginary axis certified
to contain only the origin zero.  Completeness is checked against the
winding number of the full box ``[-X, X] x [-H, H]``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import ceil, log, pi

import numpy as np

from .chareq import CharacteristicFn

log_ = logging.getLogger(__name__)

# minimum of |G/G'| on a contour, relative to the contour diameter
CLEARANCE = 1e-6
WINDING_STABLE = 0.02
WINDING_INTEGER_GAP = 0.1
MIN_CELL_DIAMETER = 0.05
NEWTON_MAXITER = 50
DEDUP_TOL = 1e-8
MAX_JITTER_TRIES = 5
MAX_EDGE_PANELS = 1 << 14
NEWTON_RTOL = 1e-12

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


class ScanError(RuntimeError):
    """Base class for zero-scan failures."""


class BoundaryTooCloseError(ScanError):
    """G is too small somewhere on a contour for the argument principle."""


class NonIntegerWindingError(ScanError):
    """The contour integral did not settle near an integer."""


class CertificationError(ScanError):
    """Subdivision or certification could not isolate the zeros of a region."""

    def __init__(self, message, cells=()):
        super().__init__(message)
        self.cells = list(cells)


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def corners(self):
        return (complex(self.x0, self.y0), complex(self.x1, self.y0),
                complex(self.x1, self.y1), complex(self.x0, self.y1))

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.x1 - self.x0, self.y1 - self.y0))

    def contains(self, w: complex, margin: float = 0.0) -> bool:
        return (self.x0 - margin <= w.real <= self.x1 + margin
                and self.y0 - margin <= w.imag <= self.y1 + margin)

    def reflected(self) -> "Rect":
        return Rect(-self.x1, -self.x0, -self.y1, -self.y0)


# -- argument principle ------------------------------------------------------

def _contour_nodes(rect: Rect, h: float):
    pts, wts = [], []
    c = rect.corners
    for a, b in zip(c, c[1:] + c[:1]):
        panels = max(2, int(ceil(abs(b - a) / h)))
        t = (np.arange(panels)[:, None] + 0.5 * (_GL_X[None, :] + 1.0)) / panels
        pts.append((a + (b - a) * t).ravel())
        wts.append(np.broadcast_to((b - a) * 0.5 * _GL_W[None, :] / panels, t.shape).ravel())
    return np.concatenate(pts), np.concatenate(wts)


def _log_deriv_integral(fn: CharacteristicFn, pts, wts, size, clearance):
    g = np.asarray(fn(pts))
    gp = np.asarray(fn.deriv(pts))
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = np.abs(g) / np.abs(gp)
    # |G/G'| estimates the distance to the nearest zero
    if not np.nanmin(np.where(g == 0, 0.0, dist)) >= clearance * size:
        raise BoundaryTooCloseError(
            f"contour passes within {np.nanmin(dist):.3e} of a zero "
            f"(clearance {clearance:.0e} x size {size:.3g})")
    return complex(np.sum(wts * gp / g)) / (2j * pi)


def winding_value(fn: CharacteristicFn, rect: Rect, *, clearance: float = CLEARANCE,
                  h0: float | None = None) -> float:
    """Converged value of (1/2 pi i) times the contour integral of G'/G around ``rect``."""
    if h0 is None:
        h0 = min(0.5, 0.25 * min(rect.x1 - rect.x0, rect.y1 - rect.y0))
    h = h0
    perimeter = 2 * ((rect.x1 - rect.x0) + (rect.y1 - rect.y0))
    size = rect.diameter
    prev = _log_deriv_integral(fn, *_contour_nodes(rect, h), size, clearance)
    while True:
        h /= 2
        if perimeter / h > 4 * MAX_EDGE_PANELS:
            raise NonIntegerWindingError(f"winding integral on {rect} did not converge")
        cur = _log_deriv_integral(fn, *_contour_nodes(rect, h), size, clearance)
        if abs(cur - prev) < WINDING_STABLE and abs(cur - round(cur.real)) < WINDING_INTEGER_GAP:
            return cur.real
        prev = cur


def winding_number(fn: CharacteristicFn, rect: Rect, *, clearance: float = CLEARANCE,
                   h0: float | None = None) -> int:
    """Number of zeros of G (with multiplicity) inside ``rect``.

    Raises BoundaryTooCloseError when G nearly vanishes on the boundary and
    NonIntegerWindingError when panel doubling fails to settle.
    """
    value = winding_value(fn, rect, clearance=clearance, h0=h0)
    n = int(round(value))
    if abs(value - n) > WINDING_INTEGER_GAP:
        raise NonIntegerWindingError(f"winding {value:.4f} on {rect} is not near an integer")
    return n


def circle_winding(fn: CharacteristicFn, center: complex, radius: float,
                   n_nodes: int = 64) -> int:
    """Winding number of G around a circle, by the periodic trapezoid rule."""
    prev = None
    while n_nodes <= 1 << 16:
        theta = 2 * pi * np.arange(n_nodes) / n_nodes
        e = np.exp(1j * theta)
        pts = center + radius * e
        g = np.asarray(fn(pts))
        gp = np.asarray(fn.deriv(pts))
        if np.min(np.abs(g)) < CLEARANCE * radius * np.max(np.abs(gp)):
            raise BoundaryTooCloseError("isolating circle passes too close to a zero")
        val = complex(np.mean(gp / g * radius * e))
        if prev is not None and abs(val - prev) < WINDING_STABLE and abs(val - round(val.real)) < WINDING_INTEGER_GAP:
            return int(round(val.real))
        prev = val
        n_nodes *= 2
    raise NonIntegerWindingError("circle winding did not converge")


# -- Newton ------------------------------------------------------------------

def newton(fn: CharacteristicFn, w0: complex, multiplicity: int = 1,
           maxiter: int = NEWTON_MAXITER, radius: float = np.inf) -> tuple[complex, bool]:
    """Newton (multiplicity-corrected) iteration; returns (root, converged).

    Iterates that leave the disk of ``radius`` about ``w0`` count as failure.
    """
    w = complex(w0)
    step = np.inf
    for _ in range(maxiter):
        g = complex(fn(w))
        gp = complex(fn.deriv(w))
        if gp == 0:
            return w, False
        step = multiplicity * g / gp
        w -= step
        if abs(w - w0) > radius:
            return w, False
        if abs(step) <= 4e-16 * max(1.0, abs(w)):
            break
    g = complex(fn(w))
    tol = NEWTON_RTOL * float(fn.magnitude_scale(w)) if multiplicity == 1 else 1e-10
    return w, abs(g) <= tol or abs(step) <= 4e-16 * max(1.0, abs(w))


# -- catalog -----------------------------------------------------------------

@dataclass(frozen=True)
class Zero:
    """A certified zero: value, multiplicity, and its certification data."""

    lam: complex
    multiplicity: int
    winding: int
    abs_g: float
    abs_gprime: float
    isolation_radius: float

    def scaled(self, r: float, lam: complex | None = None) -> "Zero":
        """The corresponding zero of g_r = G(r .) (optionally a symmetric image)."""
        lam = self.lam if lam is None else lam
        return Zero(lam / r, self.multiplicity, self.winding, self.abs_g,
                    self.abs_gprime * r, self.isolation_radius / r)


@dataclass(frozen=True)
class ZeroCatalog:
    m: int
    s: int
    lambda_max: float
    strip_height: float
    zeros: tuple[Zero, ...]
    origin_multiplicity: int
    outer_rect: Rect | None = None
    outer_winding: int | None = None

    @property
    def fn(self) -> CharacteristicFn:
        return CharacteristicFn(self.m, self.s)

    def total_multiplicity(self) -> int:
        """Zeros in the outer box implied by the catalog and the symmetries."""
        total = self.origin_multiplicity
        for z in self.zeros:
            images = 2 if z.lam.imag == 0 else 4
            total += images * z.multiplicity
        return total

    def all_zeros(self) -> list[complex]:
        """Every zero in the scanned box, symmetric images included (origin excluded)."""
        return [w for z in self.zeros for w in symmetric_images(z.lam)]


def symmetric_images(w: complex) -> list[complex]:
    out = []
    for v in (w, -w, w.conjugate(), -w.conjugate()):
        if not any(v == u for u in out):
            out.append(v)
    return out


def strip_height(fn: CharacteristicFn, lambda_max: float) -> float:
    """Height of the search strip; zeros satisfy Im w ~ (2m - s - 1/2) log|w|."""
    return (2 * fn.m - fn.s + 1) * log(1 + lambda_max) + 2


@dataclass
class _Scan:
    fn: CharacteristicFn
    rng: np.random.Generator
    found: list = field(default_factory=list)
    failed: list = field(default_factory=list)

    def split(self, rect: Rect, total: int):
        last = None
        for _ in range(MAX_JITTER_TRIES + 1):
            dx, dy = rect.x1 - rect.x0, rect.y1 - rect.y0
            xm = rect.x0 + dx * (0.5 + self.rng.uniform(-0.05, 0.05))
            ym = rect.y0 + dy * (0.5 + self.rng.uniform(-0.05, 0.05))
            kids = [Rect(rect.x0, xm, rect.y0, ym), Rect(xm, rect.x1, rect.y0, ym),
                    Rect(rect.x0, xm, ym, rect.y1), Rect(xm, rect.x1, ym, rect.y1)]
            try:
                counts = [winding_number(self.fn, k) for k in kids]
            except (BoundaryTooCloseError, NonIntegerWindingError) as exc:
                last = exc
                continue
            if sum(counts) == total:
                return list(zip(kids, counts))
            last = CertificationError(f"child windings {counts} do not sum to {total}")
        raise CertificationError(f"could not subdivide {rect}: {last}", [rect])

    def run(self, rect: Rect, total: int):
        queue = [(rect, total)]
        while queue:
            cell, n = queue.pop(0)
            if n == 0:
                continue
            if n == 1:
                w, ok = newton(self.fn, cell.center, radius=cell.diameter)
                if ok and cell.contains(w, margin=1e-12 * max(1.0, abs(w))):
                    self.found.append((w, 1))
                    continue
                if cell.diameter < MIN_CELL_DIAMETER:
                    self.failed.append(cell)
                    continue
            elif cell.diameter < MIN_CELL_DIAMETER:
                w, ok = newton(self.fn, cell.center, multiplicity=n, radius=cell.diameter)
                if ok and cell.contains(w, margin=0.1 * cell.diameter):
                    self.found.append((w, n))
                else:
                    self.failed.append(cell)
                continue
            try:
                queue.extend(self.split(cell, n))
            except CertificationError as exc:
                self.failed.extend(exc.cells)


def _with_jitter(rng, build, attempt):
    for i in range(MAX_JITTER_TRIES + 1):
        rect = build(0.0 if i == 0 else rng.uniform(-0.01, 0.01))
        try:
            return rect, attempt(rect)
        except (BoundaryTooCloseError, NonIntegerWindingError):
            continue
    raise CertificationError("contour kept touching a zero after jittering")


def find_zeros(fn: CharacteristicFn, lambda_max: float, *, seed: int = 0) -> ZeroCatalog:
    """Locate and certify every zero of G in the strip up to ``lambda_max``.

    The result covers the box ``[-X, X] x [-H, H]`` with ``X`` within 0.01
    of ``lambda_max`` and ``H = strip_height(fn, lambda_max)``.
    """
    if lambda_max < 5:
        raise ValueError("lambda_max must be at least 5")
    rng = np.random.default_rng(seed)
    H = strip_height(fn, lambda_max)
    order = fn.origin_order

    # origin: small square, then the strip around the imaginary axis
    origin_rect, origin_mult = _with_jitter(
        rng, lambda d: Rect(-0.05 - d, 0.05 + d, -0.05 + d, 0.05 - d),
        lambda r: winding_number(fn, r))
    if origin_mult != order:
        raise CertificationError(
            f"origin winding {origin_mult} differs from the tail-series order {order}", [origin_rect])
    a = 0.1
    _, strip_count = _with_jitter(
        rng, lambda d: Rect(-(a + d), a + d, -(H + d), H + d), lambda r: winding_number(fn, r))
    if strip_count != origin_mult:
        raise CertificationError(
            f"strip about the imaginary axis holds {strip_count - origin_mult} extra zeros")

    X = float(lambda_max)
    region, total = _with_jitter(
        rng, lambda d: Rect(a, X + d, -0.1 + d / 2, H), lambda r: winding_number(fn, r))
    X = region.x1
    scan = _Scan(fn, rng)
    scan.run(region, total)
    if scan.failed:
        raise CertificationError(
            f"{len(scan.failed)} cell(s) bottomed out without an isolated zero", scan.failed)

    reps = _dedup_and_fold(fn, scan.found)
    zeros = _certify(fn, reps)

    outer = Rect(-X, X, -H, H)
    outer_winding = winding_number(fn, outer)
    catalog = ZeroCatalog(fn.m, fn.s, float(lambda_max), H, tuple(zeros), origin_mult,
                          outer, outer_winding)
    if outer_winding != catalog.total_multiplicity():
        raise CertificationError(
            f"outer winding {outer_winding} != certified total {catalog.total_multiplicity()}",
            [outer])
    log_.info("m=%d s=%d: %d zero representatives up to %.1f", fn.m, fn.s, len(zeros), lambda_max)
    return catalog


def _dedup_and_fold(fn, found):
    merged: list[list] = []
    for w, n in sorted(found, key=lambda t: (abs(t[0]), t[0].real)):
        for item in merged:
            if abs(item[0] - w) < DEDUP_TOL * max(1.0, abs(w)):
                item[1] += n
                break
        else:
            merged.append([w, n])
    reps = []
    for w, n in merged:
        axis_tol = 1e-9 * max(1.0, abs(w))
        if abs(w.imag) <= axis_tol:
            w = complex(w.real, 0.0)
        elif w.imag < 0:
            continue  # conjugate of a representative found above the axis
        reps.append((w, n))
    reps.sort(key=lambda t: (abs(t[0]), t[0].imag))
    return reps


def _certify(fn, reps):
    everything = [0j] + [v for w, _ in reps for v in symmetric_images(w)]
    zeros = []
    for w, n in reps:
        others = [abs(v - w) for v in everything if v != w]
        radius = min(0.5, 0.25 * min(others))
        wind = circle_winding(fn, w, radius)
        if wind != n:
            raise CertificationError(f"isolating winding {wind} != multiplicity {n} at {w}")
        zeros.append(Zero(w, n, wind, float(abs(fn(w))), float(abs(fn.deriv(w))), radius))
    return zeros


# -- derived sets ------------------------------------------------------------

def in_Zr_halfplane(w: complex) -> bool:
    """Membership filter for Z_r: Re w < 0, or Re w = 0 and Im w < 0."""
    return w.real < 0 or (w.real == 0 and w.imag < 0)


def select_Zr(catalog: ZeroCatalog, r: float) -> list[Zero]:
    """Zeros of g_r kept by the half-plane filter, scaled from the catalog."""
    out = []
    for z in catalog.zeros:
        for v in symmetric_images(z.lam):
            if in_Zr_halfplane(v):
                out.append(z.scaled(r, v))
    out.sort(key=lambda z: (abs(z.lam), z.lam.imag))
    return out


@dataclass(frozen=True)
class StripReport:
    r: float
    c1: float
    c2: float | None
    large_threshold: float
    all_large_simple: bool
    offenders: tuple[complex, ...]
    n_checked: int


def strip_check(catalog: ZeroCatalog, r: float = 1.0, *, simple_threshold: float = 10.0,
                 c1: float | None = None) -> StripReport:
    """Fit the strip constant and the derivative floor on catalog zeros of g_r.

    The strip fit uses zeros with ``|lam| > 4/r``.  Zeros with ``|lam|``
    above ``simple_threshold`` (radius-``r`` scale) must be simple; their
    minimum of ``|lam| |g_r'(lam)|`` is reported as ``c2``.  Passing ``c1``
    checks the bound against a given constant and lists violations.
    """
    if not catalog.zeros:
        raise ValueError("empty catalog")
    lams = [z.scaled(r) for z in catalog.zeros]
    strip = [z for z in lams if abs(z.lam) > 4 / r]
    ratios = [abs(z.lam.imag) / log(1 + abs(z.lam)) for z in strip]
    fitted = max(ratios) if ratios else 0.0
    offenders = []
    if c1 is not None:
        offenders = [z.lam for z, q in zip(strip, ratios) if q > c1]
    large = [z for z in lams if abs(z.lam) > simple_threshold]
    simple = all(z.multiplicity == 1 for z in large)
    offenders += [z.lam for z in large if z.multiplicity != 1]
    c2 = min(abs(z.lam) * z.abs_gprime for z in large) if large else None
    return StripReport(r, fitted, c2, simple_threshold, simple, tuple(offenders), len(strip))
