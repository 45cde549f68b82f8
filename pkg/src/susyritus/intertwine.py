"""First-order intertwining (level-addition SUSY) built on a seed system.

Given a factorization energy ``epsilon1 <= 0`` and the deformation parameter
``nu1``, the seed Hamiltonian is shifted to H0~ = -d^2/dx^2 + V+(x) - epsilon1,
a nodeless zero-energy solution u1 of H0~ u1 = 0 is built from confluent
hypergeometric functions, and

    W1 = u1'/u1,   V1 = V0~ - 2 W1',   B1 = W1'/e.

The new Hamiltonian keeps the seed levels (shifted by -epsilon1) and gains a
ground state F0 ~ 1/u1 at zero energy.
"""

import logging
import math

import numpy as np

from . import specfun
from .errors import (
    ConfigError,
    ConvergenceError,
    LevelError,
    SingularTransformError,
    UnsupportedTransformError,
)
from .numerics import integrate
from .seeds import UNIFORM, SeedSystem

log = logging.getLogger(__name__)

# bound-state levels whose seed windows make up the system window
_WINDOW_LEVELS = 8
_SCREEN_POINTS = 10 * 1024
# below this log(rho) the leading small-argument term of U is used; the
# neglected relative correction is O(rho^min(1, b-1))
_LOG_RHO_TINY = -300.0


class TransformedState:
    """One normalized eigenstate of the transformed Hamiltonian.

    Calling the state evaluates the normalized profile.  ``raw`` is the
    profile before the numeric normalization (for excited levels this is
    L1+ F_n / sqrt(k~_n), which is already unit-norm up to quadrature error),
    and ``norm_constant`` is the factor that multiplies it.
    """

    def __init__(self, level, eigenvalue, raw, norm_constant):
        self.level = level
        self.eigenvalue = eigenvalue
        self.raw = raw
        self.norm_constant = norm_constant

    def __call__(self, x):
        return self.norm_constant * self.raw(x)

    def __repr__(self):
        return (f"TransformedState(level={self.level}, eigenvalue={self.eigenvalue!r}, "
                f"norm_constant={self.norm_constant!r})")


class IntertwinedSystem:
    """Generalized first-order intertwining of a seed system.

    Parameters
    ----------
    seed : SeedSystem
        The seed; its config supplies ``epsilon1`` and ``nu1``.
    screen_window : tuple of float, optional
        Extra x-interval to include in the nodelessness screen (e.g. an
        output grid).  The system window is always screened.

    Raises
    ------
    SingularTransformError
        If u1 changes sign (or is not finite) on the screened interval.
    """

    def __init__(self, seed: SeedSystem, screen_window=None):
        self.seed = seed
        cfg = seed.config
        self.config = cfg
        self.epsilon1 = cfg.epsilon1
        self.nu1 = cfg.nu1
        self.e_charge = cfg.e_charge
        self.degenerate = cfg.epsilon1 == 0.0
        if self.degenerate:
            log.info("epsilon1 = 0: u1 is the seed ground state and no level is added")
        if seed.kind == UNIFORM:
            self.omega = seed.omega
            self.a = -cfg.epsilon1 / (2.0 * self.omega)
            self.b = 0.5
            if self.a == 0.0:
                self.c = 0.0
            else:
                lg = math.lgamma(self.a + 0.5) - math.lgamma(self.a)
                self.c = 2.0 * cfg.nu1 * math.exp(lg)
        else:
            alpha, q2 = seed.alpha, seed.q2
            self.kappa = math.sqrt(q2 * q2 - cfg.epsilon1)
            self.a = (self.kappa - q2) / alpha
            self.b = 1.0 + 2.0 * self.kappa / alpha
            self.c = (2.0 * q2 / alpha) * (1.0 + 1.0 / cfg.nu1)
            if self.c <= 0:
                raise ConfigError("nu1 gives a non-positive U coefficient; u1 would have a node")
        self._norms = {}
        self.window = self._system_window()
        self._screen(self.window)
        if screen_window is not None:
            self._screen(screen_window)

    # ------------------------------------------------------------- windows

    def _system_window(self):
        seed = self.seed
        top = _WINDOW_LEVELS if seed.n_max is None else min(seed.n_max, _WINDOW_LEVELS)
        los, his = zip(*(seed.window(n) for n in range(top + 1)))
        lo, hi = min(los), max(his)
        pad = 0.1 * (hi - lo)
        return (lo - pad, hi + pad)

    def _screen(self, window):
        x = np.linspace(window[0], window[1], _SCREEN_POINTS)
        log_g, sign = self._log_g(x)
        if not np.all(np.isfinite(log_g)) or np.any(sign <= 0):
            bad = x[(sign <= 0) | ~np.isfinite(log_g)]
            raise SingularTransformError(
                f"u1 has a node or is not finite near x = {bad[0]:.6g}; "
                "choose nu1 inside the admissible range")

    # ---------------------------------------------------- auxiliary solution

    def _uniform_parts(self, x):
        """g, g_eta/g, g_etaeta/g for u1 = exp(-eta^2/2) g(eta)."""
        a, c = self.a, self.c
        eta = self.seed.eta(x)
        z = eta * eta
        m1 = specfun.kummer_m(a, 0.5, z)
        dm1 = 2 * a * specfun.kummer_m(a + 1, 1.5, z) if a != 0 else np.zeros_like(z)
        ddm1 = (4 * a * (a + 1) / 3) * specfun.kummer_m(a + 2, 2.5, z) if a != 0 else np.zeros_like(z)
        g = m1
        g1 = 2 * eta * dm1
        g2 = 2 * dm1 + 4 * z * ddm1
        if c != 0:
            a2 = a + 0.5
            m2 = specfun.kummer_m(a2, 1.5, z)
            dm2 = (a2 / 1.5) * specfun.kummer_m(a2 + 1, 2.5, z)
            ddm2 = (a2 * (a2 + 1) / 3.75) * specfun.kummer_m(a2 + 2, 3.5, z)
            g = g + c * eta * m2
            g1 = g1 + c * (m2 + 2 * z * dm2)
            g2 = g2 + c * (6 * eta * dm2 + 4 * eta * z * ddm2)
        return eta, g, g1 / g, g2 / g

    def _exp_parts(self, x):
        """rho, log(e^-rho g) and h = rho g'/g (rho-derivative) for the exponential seed.

        Everything is carried with the e^rho growth of M removed, so ratios
        stay accurate far into the strong-field side.  Below rho ~ 1e-287 the
        leading small-argument form of U is used in log rho, so the weak-field
        side never needs rho itself.
        """
        a, b, c = self.a, self.b, self.c
        shape = np.shape(x)
        log_rho = np.atleast_1d(self.seed.log_rho(x))
        rho = np.exp(log_rho)
        lc = math.log(c)
        tiny = log_rho < _LOG_RHO_TINY
        lm0 = np.zeros_like(rho)
        lu0 = (math.lgamma(b - 1) - math.lgamma(a) + (1 - b) * log_rho) - rho
        ok = ~tiny
        if ok.any():
            lm0[ok] = specfun.log_kummer_m_scaled(a, b, rho[ok])[0]
            lu0[ok] = specfun.log_tricomi_u(a, b, rho[ok])[0] - rho[ok]
        log_g = np.logaddexp(lm0, lc + lu0)
        if a == 0.0:
            return rho.reshape(shape), log_g.reshape(shape), np.zeros(shape)
        lm1 = np.zeros_like(rho)
        lu1 = (math.lgamma(b) - math.lgamma(a + 1) - b * log_rho) - rho
        if ok.any():
            lm1[ok] = specfun.log_kummer_m_scaled(a + 1, b + 1, rho[ok])[0]
            lu1[ok] = specfun.log_tricomi_u(a + 1, b + 1, rho[ok])[0] - rho[ok]
        h = (a / b) * np.exp(log_rho + lm1 - log_g) - c * a * np.exp(log_rho + lu1 - log_g)
        return rho.reshape(shape), log_g.reshape(shape), h.reshape(shape)

    def _log_g(self, x):
        if self.seed.kind == UNIFORM:
            _, g, _, _ = self._uniform_parts(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.log(np.abs(g)), np.sign(g)
        _, log_g, _ = self._exp_parts(x)
        return log_g, np.ones_like(log_g)

    def log_u1(self, x):
        """log u1(x); u1 itself over- or underflows far from the well."""
        x = np.asarray(x, dtype=float)
        log_g, sign = self._log_g(x)
        if np.any(sign <= 0):
            raise SingularTransformError("u1 is not positive at the requested points")
        if self.seed.kind == UNIFORM:
            eta = self.seed.eta(x)
            return -0.5 * eta * eta + log_g
        return 0.5 * self.seed.rho(x) - self.kappa * x + log_g

    def u1(self, x):
        """Nodeless solution of -u1'' + V0~ u1 = 0 (unnormalized)."""
        return np.exp(self.log_u1(x))

    # ---------------------------------------------------------- potentials

    def shifted_potential(self, x):
        """V0~(x) = V+(x) - epsilon1."""
        return self.seed.partner_potential(x, 1) - self.epsilon1

    def superpotential(self, x):
        """W1 = u1'/u1 from contiguous-identity derivatives."""
        x = np.asarray(x, dtype=float)
        if self.seed.kind == UNIFORM:
            eta, _, r1, _ = self._uniform_parts(x)
            return math.sqrt(self.omega / 2) * (-eta + r1)
        rho, _, h = self._exp_parts(x)
        return 0.5 * self.seed.alpha * rho - self.kappa - self.seed.alpha * h

    def superpotential_prime(self, x):
        """dW1/dx, analytic."""
        x = np.asarray(x, dtype=float)
        if self.seed.kind == UNIFORM:
            _, _, r1, r2 = self._uniform_parts(x)
            return 0.5 * self.omega * (-1.0 + r2 - r1 * r1)
        rho, _, h = self._exp_parts(x)
        alpha = self.seed.alpha
        # rho^2 (g''/g - (g'/g)^2) + rho g'/g with g'' eliminated through
        # rho g'' + (b - rho) g' - a g = 0
        return alpha * alpha * (rho * (self.a - 0.5) + (1.0 - self.b + rho) * h - h * h)

    def calF(self, x):
        """The exponential-seed correction term F(rho) = W1 - alpha rho/2 + kappa."""
        if self.seed.kind == UNIFORM:
            raise UnsupportedTransformError("F(rho) is defined for the exponential seed only")
        _, _, h = self._exp_parts(np.asarray(x, dtype=float))
        return -self.seed.alpha * h

    def partner_potential(self, x):
        """V1 = V0~ - 2 W1'."""
        return self.shifted_potential(x) - 2.0 * self.superpotential_prime(x)

    def field(self, x):
        """Generated magnetic field B1 = W1'/e."""
        return self.superpotential_prime(x) / self.e_charge

    # ------------------------------------------------------------ spectrum

    def _require_addition(self):
        if self.degenerate:
            raise UnsupportedTransformError(
                "epsilon1 = 0 is the level-deletion case (1/u1 is not normalizable); "
                "only level addition (epsilon1 < 0) is supported for the spectrum and states")

    def spectrum(self, level):
        """k^(1)_level: 0 for the new ground state, k_{level-1}^+ - epsilon1 otherwise."""
        self._require_addition()
        if level < 0:
            raise LevelError("negative level")
        if level == 0:
            return 0.0
        return self.seed.eigenvalue(level - 1) - self.epsilon1

    @property
    def n_levels(self):
        """Number of bound levels of the transformed Hamiltonian (None if unbounded)."""
        n = self.seed.n_max
        return None if n is None else n + 2

    # ------------------------------------------------------ eigenfunctions

    def _ground_raw(self, x):
        ref = self._ground_ref()
        return np.exp(ref - self.log_u1(x))

    def _ground_ref(self):
        # log u1 at its minimum on the window, so the scaled profile peaks near 1
        if "ref" not in self._norms:
            xs = np.linspace(self.window[0], self.window[1], 4097)
            self._norms["ref"] = float(np.min(self.log_u1(xs)))
        return self._norms["ref"]

    def _excited_raw(self, n):
        k = self.seed.eigenvalue(n) - self.epsilon1
        root = math.sqrt(k)

        def raw(x):
            x = np.asarray(x, dtype=float)
            f = self.seed.eigenfunction(n, x)
            fp = self.seed.eigenfunction_prime(n, x)
            return (self.superpotential(x) * f - fp) / root

        return raw

    def state(self, level):
        """Normalized transformed eigenstate ``level`` (0 is the added ground state)."""
        self._require_addition()
        eigenvalue = self.spectrum(level)
        raw = self._ground_raw if level == 0 else self._excited_raw(level - 1)
        if level not in self._norms:
            try:
                val = integrate(lambda x: raw(x) ** 2, self.window, tol=1e-300, rel_tol=1e-12,
                                check_tails=True, tail_tol=1e-12)
            except ConvergenceError:
                if level == 0:
                    raise
                # A^+ maps unit-norm seed states to norm sqrt(k), so raw is
                # already normalized; the quadrature only trims truncation error
                val = 1.0
            self._norms[level] = 1.0 / math.sqrt(val)
        return TransformedState(level, eigenvalue, raw, self._norms[level])

    def eigenfunction(self, level, x):
        return self.state(level)(x)

    def eigenfunction_prime(self, level, x):
        """dF^(1)/dx from the intertwining structure.

        Ground state: F0' = -W1 F0.  Excited states: with psi = F_n and
        phi = L1+ psi / sqrt(k~), phi' = (W1' psi + W1 psi' - psi'') / sqrt(k~)
        and psi'' = (V0~ - k~) psi.
        """
        x = np.asarray(x, dtype=float)
        st = self.state(level)
        if level == 0:
            return -self.superpotential(x) * st(x)
        n = level - 1
        kt = self.seed.eigenvalue(n) - self.epsilon1
        psi = self.seed.eigenfunction(n, x)
        dpsi = self.seed.eigenfunction_prime(n, x)
        d2psi = (self.shifted_potential(x) - kt) * psi
        val = self.superpotential_prime(x) * psi + self.superpotential(x) * dpsi - d2psi
        return st.norm_constant * val / math.sqrt(kt)

    # ---------------------------------------------------------- operators

    def lower(self, f, x, fprime):
        """L1- f = f' + W1 f, given samples of f and f'."""
        return fprime + self.superpotential(x) * f

    def raise_(self, f, x, fprime):
        """L1+ f = -f' + W1 f, given samples of f and f'."""
        return -fprime + self.superpotential(x) * f

    # -------------------------------------------------------- closed forms

    def closed_forms_available(self):
        """True for the uniform seed with nu1 = 0 and epsilon1 = -omega/5 (a = 1/10)."""
        return (self.seed.kind == UNIFORM and self.nu1 == 0.0
                and math.isclose(self.a, 0.1, rel_tol=0, abs_tol=1e-14))

    def _tenth_ratio(self, eta):
        z = eta * eta
        m0 = specfun.kummer_m(0.1, 0.5, z)
        r = specfun.kummer_m(1.1, 1.5, z) / m0
        s = specfun.kummer_m(2.1, 2.5, z) / m0
        return r, s

    def closed_form_superpotential(self, x):
        """W1 = sqrt(omega/2) eta (-1 + (2/5) M(11/10,3/2,eta^2)/M(1/10,1/2,eta^2))."""
        self._require_closed_forms()
        eta = self.seed.eta(x)
        r, _ = self._tenth_ratio(eta)
        return math.sqrt(self.omega / 2) * eta * (-1.0 + 0.4 * r)

    def closed_form_field(self, x):
        """B1 = B0 [-1 + (2/5) d/deta (eta R)], R = M(11/10,3/2,eta^2)/M(1/10,1/2,eta^2).

        The eta-derivative is taken on W1/sqrt(omega/2), so no extra
        sqrt(2/omega) factor appears inside the bracket.
        """
        self._require_closed_forms()
        eta = self.seed.eta(x)
        r, s = self._tenth_ratio(eta)
        # R' = 2 eta [(11/15) M(21/10,5/2)/M0 - (1/5) R^2]
        dr = 2 * eta * ((11.0 / 15.0) * s - 0.2 * r * r)
        return self.config.B0 * (-1.0 + 0.4 * (r + eta * dr))

    def closed_form_potential(self, x):
        return self.shifted_potential(x) - 2.0 * self.e_charge * self.closed_form_field(x)

    def closed_form_excited(self, n, x):
        """F^(1)_{n+1} = [(2 eta/5) R F_n - sqrt(2n) F_{n-1}] / sqrt(2(n + 1/5))."""
        self._require_closed_forms()
        eta = self.seed.eta(x)
        r, _ = self._tenth_ratio(eta)
        val = 0.4 * eta * r * self.seed.eigenfunction(n, x)
        if n > 0:
            val = val - math.sqrt(2 * n) * self.seed.eigenfunction(n - 1, x)
        return val / math.sqrt(2 * (n + 0.2))

    def closed_form_excited_exponential(self, n, x):
        """[(q2 - kappa + F(rho)) - A-] F_n / sqrt(k~_n), A- = -alpha rho d/drho + q2 - alpha rho/2."""
        if self.seed.kind == UNIFORM:
            raise UnsupportedTransformError("exponential seed only")
        seed = self.seed
        x = np.asarray(x, dtype=float)
        rho = seed.rho(x)
        alpha, q2 = seed.alpha, seed.q2
        f = seed.eigenfunction(n, x)
        # dF/drho from the Laguerre form
        s = q2 / alpha - n
        lag = specfun.laguerre(n, 2 * s, rho)
        dlag = -specfun.laguerre(n - 1, 2 * s + 1, rho) if n > 0 else 0.0
        pref = seed.normalization(n) * np.exp(seed._exp_log_prefactor(n, rho))
        df_drho = pref * ((-0.5 + s / rho) * lag + dlag)
        a_minus_f = -alpha * rho * df_drho + (q2 - 0.5 * alpha * rho) * f
        kt = seed.eigenvalue(n) - self.epsilon1
        return ((q2 - self.kappa + self.calF(x)) * f - a_minus_f) / math.sqrt(kt)

    def _require_closed_forms(self):
        if not self.closed_forms_available():
            raise UnsupportedTransformError(
                "closed forms exist for the uniform seed with nu1 = 0, epsilon1 = -omega/5 only")
