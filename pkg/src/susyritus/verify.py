"""Invariant suite: every analytic identity of the construction, checked numerically.

Each check produces an :class:`InvariantResult` with the measured residual
and its threshold.  Derivatives inside the library are analytic; the checks
use finite differences and quadrature as independent oracles.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import ritus
from .intertwine import IntertwinedSystem
from .numerics import count_nodes, first_derivative, gram_matrix, integrate, second_derivative
from .seeds import UNIFORM

FAULTS = ("spectrum",)


@dataclass
class InvariantResult:
    name: str
    measured: float
    threshold: float
    detail: str = ""

    @property
    def passed(self):
        return bool(np.isfinite(self.measured) and self.measured < self.threshold)


@dataclass
class VerificationReport:
    results: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r.passed for r in self.results)

    def add(self, name, measured, threshold, detail=""):
        self.results.append(InvariantResult(name, float(measured), float(threshold), detail))

    def failures(self):
        return [r for r in self.results if not r.passed]

    def format(self):
        lines = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            extra = f"  ({r.detail})" if r.detail else ""
            lines.append(f"{status}  {r.name:<40s} {r.measured:.3e} < {r.threshold:.0e}{extra}")
        return "\n".join(lines)


def closed_form_spectrum(config, level):
    """k^(1)_level straight from the configuration (independent of the evaluators)."""
    if level == 0:
        return 0.0
    n = level - 1
    if config.seed_kind == UNIFORM:
        return config.omega * n - config.epsilon1
    return config.alpha * n * (2 * config.q2 - config.alpha * n) - config.epsilon1


def _sup_rel(residual, reference):
    ref = np.abs(reference).max()
    return float(np.abs(residual).max() / ref) if ref > 0 else float(np.abs(residual).max())


def _grid(window, n_points):
    return np.linspace(window[0], window[1], n_points)


def _top_seed(seed, n_top):
    return n_top if seed.n_max is None else min(n_top, seed.n_max)


def _top_level(system, n_top):
    return n_top if system.n_levels is None else min(n_top, system.n_levels - 1)


def check_spectrum(system, report, n_top, spectrum=None):
    spectrum = spectrum or system.spectrum
    worst = 0.0
    for level in range(_top_level(system, n_top + 1) + 1):
        expected = closed_form_spectrum(system.config, level)
        worst = max(worst, abs(spectrum(level) - expected) / max(1.0, abs(expected)))
    report.add("spectrum_rule", worst, 1e-12)


def check_riccati(system, report, x):
    v = system.shifted_potential(x)
    w = system.superpotential(x)
    res = w * w + system.superpotential_prime(x) - v
    report.add("riccati_W1", np.abs(res).max() / (1 + np.abs(v).max()), 1e-8)


def check_u1_ode(system, report, x):
    """(-u1'' + V0~ u1)/u1 = -(log u1)'' - ((log u1)')^2 + V0~, by finite differences.

    Dividing by u1 keeps the check meaningful where u1 varies over hundreds
    of e-folds; the residual is scaled like the Riccati identity.
    """
    d1 = first_derivative(system.log_u1, x)
    d2, _ = second_derivative(system.log_u1, x)
    v = system.shifted_potential(x)
    report.add("u1_ode", np.abs(-d2 - d1 * d1 + v).max() / (1 + np.abs(v).max()), 1e-8)


def check_seed(system, report, n_top, n_points):
    seed = system.seed
    top = _top_seed(seed, n_top)
    worst_plus = worst_minus = worst_ladder = 0.0
    nodes_ok = True
    for n in range(top + 1):
        x = _grid(seed.window(n), n_points)
        f = seed.eigenfunction(n, x)
        d2, _ = second_derivative(lambda y: seed.eigenfunction(n, y), x)
        worst_plus = max(worst_plus, _sup_rel(-d2 + (seed.partner_potential(x, 1) - seed.eigenvalue(n)) * f, f))
        nodes_ok &= count_nodes(f) == n
        if seed.n_max is None or n + 1 <= seed.n_max:
            xm = _grid(seed.window(n + 1), n_points)
            fm = seed.eigenfunction(n, xm, sigma=-1)
            d2m, _ = second_derivative(lambda y: seed.eigenfunction(n, y, sigma=-1), xm)
            kn = seed.eigenvalue(n, -1)
            worst_minus = max(worst_minus, _sup_rel(-d2m + (seed.partner_potential(xm, -1) - kn) * fm, fm))
            up = lambda y: seed.eigenfunction(n + 1, y)  # noqa: E731
            lowered = first_derivative(up, xm) + seed.superpotential(xm) * up(xm)
            worst_ladder = max(worst_ladder, _sup_rel(lowered - math.sqrt(kn) * fm, fm))
    report.add("seed_schrodinger_sigma+1", worst_plus, 1e-5, f"n <= {top}")
    report.add("seed_schrodinger_sigma-1", worst_minus, 1e-5)
    report.add("seed_ladder_L0-", worst_ladder, 1e-6)
    report.add("seed_node_count", 0.0 if nodes_ok else 1.0, 0.5)
    x = _grid(seed.window(0), n_points)
    f0 = lambda y: seed.eigenfunction(0, y)  # noqa: E731
    report.add("seed_ground_annihilation", _sup_rel(first_derivative(f0, x) + seed.superpotential(x) * f0(x), f0(x)), 1e-8)
    funcs = [(lambda y, n=n: seed.eigenfunction(n, y)) for n in range(top + 1)]
    g = gram_matrix(funcs, seed.window(top))
    report.add("seed_orthonormality", np.abs(g - np.eye(len(funcs))).max(), 1e-6)


def check_transformed(system, report, n_top, n_points, spectrum=None):
    spectrum = spectrum or system.spectrum
    top = _top_level(system, n_top)
    x = _grid(system.window, n_points)
    worst = 0.0
    for level in range(top + 1):
        st = system.state(level)
        f = st(x)
        d2, _ = second_derivative(st, x)
        worst = max(worst, _sup_rel(-d2 + (system.partner_potential(x) - spectrum(level)) * f, f))
    report.add("transformed_schrodinger", worst, 1e-5, f"levels <= {top}")
    f0 = system.state(0)
    lowered = first_derivative(f0, x) + system.superpotential(x) * f0(x)
    report.add("ground_annihilation_L1-", _sup_rel(lowered, f0(x)), 1e-8)
    report.add("transformed_ground_nodes", float(count_nodes(f0(x))), 0.5)
    funcs = [system.state(level) for level in range(top + 1)]
    g = gram_matrix(funcs, system.window)
    report.add("transformed_orthonormality", np.abs(g - np.eye(len(funcs))).max(), 1e-6)


def check_intertwining(system, report, n_points, n_states=3):
    seed = system.seed
    x = _grid(system.window, n_points)
    worst_int = worst_fac1 = worst_fac2 = 0.0
    for n in range(_top_seed(seed, n_states - 1) + 1):
        kt = seed.eigenvalue(n) - system.epsilon1

        def phi(y, n=n):
            return system.superpotential(y) * seed.eigenfunction(n, y) - seed.eigenfunction_prime(n, y)

        p = phi(x)
        d2, _ = second_derivative(phi, x)
        worst_int = max(worst_int, _sup_rel(-d2 + (system.partner_potential(x) - kt) * p, p))
        # L1- L1+ psi = H0~ psi = k~ psi
        psi = seed.eigenfunction(n, x)
        down = first_derivative(phi, x) + system.superpotential(x) * p
        worst_fac1 = max(worst_fac1, _sup_rel(down - kt * psi, kt * psi))
        # L1+ L1- phi = H1 phi = k~ phi

        def lowered(y, n=n, phi=phi):
            # phi' from the seed equation psi'' = (V0+ - k_n) psi, so only the
            # outer derivative below is taken numerically
            w = system.superpotential(y)
            f = seed.eigenfunction(n, y)
            d2f = (seed.partner_potential(y) - seed.eigenvalue(n)) * f
            dphi = system.superpotential_prime(y) * f + w * seed.eigenfunction_prime(n, y) - d2f
            return dphi + w * phi(y)

        up = -first_derivative(lowered, x) + system.superpotential(x) * lowered(x)
        worst_fac2 = max(worst_fac2, _sup_rel(up - kt * p, kt * p))
    report.add("intertwining_H1_L1+", worst_int, 1e-5)
    report.add("factorization_L1-L1+", worst_fac1, 1e-5)
    report.add("factorization_L1+L1-", worst_fac2, 1e-5)


def check_extra_level(system, report, n_grid=2000):
    """Finite-difference spectrum of H1: exactly one level below k_0^+ - epsilon1."""
    lo, hi = system.window
    x = np.linspace(lo, hi, n_grid + 2)[1:-1]
    h = x[1] - x[0]
    diag = 2.0 / h**2 + system.partner_potential(x)
    off = np.full(n_grid - 1, -1.0 / h**2)
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, 2), eigvals_only=True)
    gap = -system.epsilon1
    tol = 1e-2 * gap
    below = int(np.count_nonzero(vals < gap - tol))
    report.add("extra_level_count", abs(below - 1), 0.5, f"lowest FD levels {vals[0]:.2e}, {vals[1]:.4f}")
    report.add("extra_level_at_zero", abs(vals[0]), tol)


def check_closed_forms(system, report, x):
    if system.closed_forms_available():
        b1 = system.field(x)
        report.add("B1_closed_form", np.abs(b1 - system.closed_form_field(x)).max() / (1 + np.abs(b1).max()), 1e-8)
        report.add("W1_closed_form", _sup_rel(system.superpotential(x) - system.closed_form_superpotential(x),
                                              system.superpotential(x)), 1e-9)
        worst = 0.0
        for n in range(3):
            st = system.state(n + 1)
            worst = max(worst, _sup_rel(st.raw(x) - system.closed_form_excited(n, x), st.raw(x)))
        report.add("excited_state_closed_form", worst, 1e-8)
    if system.seed.kind != UNIFORM:
        fd = first_derivative(system.superpotential, x) / system.e_charge
        b1 = system.field(x)
        report.add("B1_vs_fd_dW1", _sup_rel(b1 - fd, b1), 1e-6)
        worst = 0.0
        for n in range(_top_seed(system.seed, 2) + 1):
            raw = system.state(n + 1).raw(x)
            worst = max(worst, _sup_rel(raw - system.closed_form_excited_exponential(n, x), raw))
        report.add("excited_state_closed_form", worst, 1e-8)


def check_densities(system, report, x, n_levels=3):
    top = _top_level(system, n_levels)
    neg = 0.0
    for level in range(top + 1):
        prof = ritus.charge_density_mode(system, level, x)
        neg = max(neg, float(-min(prof.values.min(), 0.0)))
    report.add("charge_density_nonnegative", neg, 1e-300)
    j0 = ritus.current_density_mode(system, 0, x)
    report.add("ground_current_zero", np.abs(j0.values).max(), 1e-300)
    worst = 0.0
    for level in range(1, top + 1):
        total = integrate(lambda y, level=level: ritus.charge_density_mode(system, level, y).values,
                          system.window, tol=1e-12)
        worst = max(worst, abs(total - 2.0))
    report.add("excited_charge_integral_2", worst, 1e-6)


def check_dirac(report, n_samples=100, seed=20240605):
    ids = ritus.dirac_trace_identities()
    report.add("clifford_algebra", ids["clifford"], 1e-15)
    report.add("trace_identities", max(ids["trace_gamma_l_gamma_mu"],
                                       ids["trace_gamma_l_gamma0_gamma_mu_gamma0"]), 1e-12)
    report.add("projectors", max(ids["projector_idempotent"], ids["projector_orthogonal"],
                                 ids["projector_complete"]), 1e-15)
    rng = np.random.default_rng(seed)
    worst = worst_sandwich = 0.0
    done = 0
    while done < n_samples:
        p0, k, m = rng.uniform(-3, 3), rng.uniform(0, 5), rng.uniform(-2, 2)
        if abs(p0 * p0 - k - m * m) < 1e-2:
            continue
        s = ritus.propagator_momentum(p0, k, m)
        inv = ritus.slash_pbar(p0, k) - m * ritus.IDENTITY
        worst = max(worst, np.abs(inv @ s - ritus.IDENTITY).max())
        worst_sandwich = max(worst_sandwich, np.abs(inv @ s @ inv - inv).max())
        done += 1
    report.add("propagator_inverse", worst, 1e-12, f"{n_samples} off-pole samples")
    report.add("propagator_sandwich", worst_sandwich, 1e-12)


def run_invariants(system: IntertwinedSystem, window=None, n_points=1024, n_top=5, fault=None):
    """Run the full invariant suite.

    Parameters
    ----------
    system : IntertwinedSystem
    window : tuple, optional
        Grid for the pointwise identities (defaults to the system window).
    fault : {None, "spectrum"}
        Test hook: corrupt the named rule to confirm the suite catches it.
    """
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    spectrum = None
    if fault == "spectrum":
        def spectrum(level):
            k = system.spectrum(level)
            return k + 1e-3 * level
    report = VerificationReport()
    x = _grid(window or system.window, n_points)
    if not system.degenerate:
        check_spectrum(system, report, n_top, spectrum)
    check_riccati(system, report, x)
    check_u1_ode(system, report, x)
    check_seed(system, report, n_top, n_points)
    if not system.degenerate:
        check_transformed(system, report, n_top, n_points, spectrum)
        check_intertwining(system, report, n_points)
        check_extra_level(system, report)
        check_closed_forms(system, report, x)
        check_densities(system, report, x)
    check_dirac(report)
    return report

