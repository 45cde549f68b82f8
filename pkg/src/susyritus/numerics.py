"""Quadrature, finite differences and small diagnostics shared by the checks."""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, StepUnderflow, TailError

# 15-point Kronrod extension of the 7-point Gauss rule (non-negative half)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NOISE = 1e3 * np.finfo(float).eps

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes
_WG_FULL[[1, 3, 5]] = _WG[:3]
_WG_FULL[7] = _WG[3]
_WG_FULL[[13, 11, 9]] = _WG[:3]


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError("a grid needs at least 16 points")
        if not self.x_max > self.x_min:
            raise ValueError("grid bounds must be increasing")

    @property
    def spacing(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def samples(self):
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True)
class ResidualReport:
    quantity_name: str
    sup_abs: float
    rel_to: float
    grid: Grid

    @property
    def relative(self):
        return self.sup_abs / self.rel_to if self.rel_to > 0 else self.sup_abs

    def passes(self, tol):
        return bool(np.isfinite(self.relative) and self.relative < tol)


def make_grid(window, n_points):
    lo, hi = window
    return Grid(float(lo), float(hi), int(n_points))


def integrate(f, window, tol=1e-10, *, rel_tol=0.0, initial_panels=16, max_panels=200000,
              check_tails=False, tail_tol=1e-8):
    """Adaptive Gauss-Kronrod (7/15) quadrature over a finite window.

    ``f`` takes an array of abscissae and returns values of shape ``(n,)`` or
    ``(k, n)``; vector-valued integrands are refined until every component
    meets the tolerance.  Panels whose embedded Gauss/Kronrod difference is
    above their share of ``tol`` are bisected.

    With ``check_tails`` the integrand magnitude at the window ends is
    compared with its maximum and :class:`TailError` is raised when the
    window cuts off more than ``tail_tol`` of it.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ValueError("integration window must be increasing")
    edges = np.linspace(lo, hi, initial_panels + 1)
    a, b = edges[:-1], edges[1:]
    total = None
    err_total = None
    peak = 0.0
    width = hi - lo
    for _ in range(64):
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
        vals = np.asarray(f(x), dtype=float)
        vec = vals.ndim == 2
        vals = vals.reshape((-1, a.size, 15)) if vec else vals.reshape((1, a.size, 15))
        if not np.all(np.isfinite(vals)):
            raise ConvergenceError("integrand is not finite on the window")
        peak = max(peak, float(np.abs(vals).max(initial=0.0)))
        kron = (vals @ _WK) * half
        gauss = (vals @ _WG_FULL) * half
        err = np.abs(kron - gauss).max(axis=0)
        if total is None:
            total = np.zeros(vals.shape[0])
            err_total = 0.0
        budget = max(tol, rel_tol * float(np.abs(total + kron.sum(axis=1)).max()))
        # panels already at the integrand's rounding-noise level cannot improve
        noise = _NOISE * (np.abs(vals) @ _WK).max(axis=0) * half
        ok = (err <= budget * (b - a) / width) | (err <= noise)
        total += kron[:, ok].sum(axis=1)
        err_total += float(err[ok].sum())
        if ok.all():
            break
        a_bad, b_bad = a[~ok], b[~ok]
        m = 0.5 * (a_bad + b_bad)
        a = np.concatenate([a_bad, m])
        b = np.concatenate([m, b_bad])
        if a.size > max_panels:
            raise ConvergenceError("adaptive quadrature exceeded its panel budget")
    else:
        raise ConvergenceError("adaptive quadrature did not converge")
    if check_tails:
        ends = np.abs(np.asarray(f(np.array([lo, hi])), dtype=float))
        if ends.max() > tail_tol * max(peak, np.finfo(float).tiny):
            raise TailError(f"integrand at window edge is {ends.max() / peak:.1e} of its peak")
    return total if vec else float(total[0])


def _d1_stencil(f, x, h):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def first_derivative(f, x, h=None):
    """Five-point central first derivative with one Richardson level (O(h^6))."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-3 * (1.0 + np.abs(x))
    return (16 * _d1_stencil(f, x, h / 2) - _d1_stencil(f, x, h)) / 15


def _d2_stencil(f, x, h):
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h)


def second_derivative(f, x, h=None, *, tol=None):
    """Five-point second derivative refined by two Richardson levels.

    Returns ``(value, error_estimate)``.  When ``tol`` is given the step is
    halved until the estimate meets it; :class:`StepUnderflow` is raised once
    the step would fall below 1e-7.
    """
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-3 * (1.0 + np.abs(x))
    h = np.asarray(h, dtype=float)
    while True:
        d0 = _d2_stencil(f, x, h)
        d1 = _d2_stencil(f, x, h / 2)
        d2 = _d2_stencil(f, x, h / 4)
        # stencil error is O(h^4)
        r1 = (16 * d1 - d0) / 15
        r2 = (16 * d2 - d1) / 15
        value = (64 * r2 - r1) / 63
        err = np.abs(value - r2)
        if tol is None or np.all(err <= tol):
            return value, err
        h = h / 2
        if np.any(h / 4 < 1e-7):
            raise StepUnderflow("second-derivative step collapsed before meeting tolerance")


def count_nodes(samples, threshold=1e-10):
    """Sign changes of ``samples`` ignoring entries below threshold * max|samples|."""
    s = np.asarray(samples, dtype=float)
    peak = np.abs(s).max(initial=0.0)
    if peak == 0.0:
        return 0
    keep = s[np.abs(s) > threshold * peak]
    return int(np.count_nonzero(np.sign(keep[1:]) != np.sign(keep[:-1])))


def gram_matrix(functions, window, tol=1e-12, check_tails=True):
    """Matrix of pairwise L2 inner products over ``window``."""
    k = len(functions)
    iu, ju = np.triu_indices(k)

    def products(x):
        vals = np.array([fn(x) for fn in functions])
        return vals[iu] * vals[ju]

    flat = integrate(products, window, tol=tol, check_tails=check_tails,
                     tail_tol=1e-14)
    flat = np.atleast_1d(flat)
    g = np.zeros((k, k))
    g[iu, ju] = flat
    g[ju, iu] = flat
    return g


def sup_residual(name, residual, reference, grid):
    """Package a sup-norm residual against a reference magnitude."""
    return ResidualReport(name, float(np.max(np.abs(residual))), float(reference), grid)
