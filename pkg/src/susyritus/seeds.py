"""Seed field configurations: uniform field and exponentially decaying field.

Both seeds give a Pauli-type 1D problem

    [-d^2/dx^2 + W0(x)^2 - sigma W0'(x)] F = k F

with a closed-form spectrum.  The uniform field is a shifted harmonic
oscillator in ``eta = sqrt(omega/2) (x + 2 p2/omega)``; the exponential field
is a Morse problem in ``rho = (2D/alpha) exp(-alpha x)``.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import specfun
from .errors import ConfigError, LevelError
from .numerics import integrate


UNIFORM = "uniform"
EXPONENTIAL = "exponential"

# log-amplitude drop that defines the eigenfunction support window
_WINDOW_DROP = 40.0


class FieldWarning(UserWarning):
    """Parameters accepted but outside the range the construction is stated for."""


@dataclass(frozen=True)
class FieldConfig:
    """Physical parameters of one seed-plus-transform instance."""

    seed_kind: str
    B0: float
    p2: float
    epsilon1: float
    nu1: float
    alpha: float = 0.0
    e_charge: float = 1.0
    m: float = 0.0
    m_sign: int = 1

    def __post_init__(self):
        kind = self.seed_kind.lower()
        object.__setattr__(self, "seed_kind", kind)
        if kind not in (UNIFORM, EXPONENTIAL):
            raise ConfigError(f"unknown seed kind {self.seed_kind!r}")
        for name in ("B0", "p2", "epsilon1", "nu1", "alpha", "e_charge", "m"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.B0 <= 0:
            raise ConfigError("B0 must be positive")
        if self.e_charge <= 0:
            raise ConfigError("e_charge must be positive")
        if self.epsilon1 > 0:
            raise ConfigError("epsilon1 must not exceed the seed ground energy 0")
        if self.m_sign not in (1, -1):
            raise ConfigError("m_sign must be +1 or -1")
        if self.m != 0 and int(math.copysign(1, self.m)) != self.m_sign:
            object.__setattr__(self, "m_sign", int(math.copysign(1, self.m)))
        if kind == UNIFORM:
            if not -1.0 < self.nu1 < 1.0:
                raise ConfigError("uniform seed needs nu1 in (-1, 1)")
        else:
            if self.alpha <= 0:
                raise ConfigError("exponential seed needs alpha > 0")
            if -1.0 <= self.nu1 <= 0.0:
                raise ConfigError("exponential seed needs nu1 outside [-1, 0]")
            if self.q2 <= 0:
                raise ConfigError("q2 = p2 + D must be positive for bound states to exist")
            if self.B0 <= 1:
                warnings.warn(f"B0 = {self.B0:g}: the exponential construction is stated for B0 > 1",
                              FieldWarning, stacklevel=3)

    @property
    def omega(self):
        return 2.0 * self.e_charge * self.B0

    @property
    def D(self):
        return self.e_charge * self.B0 / self.alpha

    @property
    def q2(self):
        return self.p2 + self.D

    def replace(self, **changes):
        return replace(self, **changes)


class SeedSystem:
    """Evaluators for the seed superpotential, potentials and bound states.

    Immutable after construction; exponential-seed normalization constants are
    computed lazily and memoized.
    """

    def __init__(self, config: FieldConfig):
        self.config = config
        self.kind = config.seed_kind
        self._norms = {}
        if self.kind == UNIFORM:
            self.omega = config.omega
            self.center = -2.0 * config.p2 / self.omega
            self._scale = math.sqrt(self.omega / 2.0)
        else:
            self.alpha = config.alpha
            self.D = config.D
            self.q2 = config.q2
            self._log_rho0 = math.log(2.0 * self.D / self.alpha)

    # ------------------------------------------------------------ geometry

    @property
    def n_max(self):
        """Largest bound-state index (``None`` for the unbounded uniform tower)."""
        if self.kind == UNIFORM:
            return None
        # strict n < q2/alpha: at equality the state is not square integrable
        return int(math.ceil(self.q2 / self.alpha)) - 1

    def eta(self, x):
        return self._scale * (np.asarray(x, dtype=float) - self.center)

    def rho(self, x):
        return np.exp(self.log_rho(x))

    def log_rho(self, x):
        return self._log_rho0 - self.alpha * np.asarray(x, dtype=float)

    def x_from_rho(self, rho):
        return (self._log_rho0 - np.log(rho)) / self.alpha

    def _check_level(self, n):
        if n < 0 or (self.n_max is not None and n > self.n_max):
            raise LevelError(f"level {n} outside bound-state range (n_max={self.n_max})")

    # ------------------------------------------------------- superpotential

    def superpotential(self, x):
        """W0(x), with the transverse momentum folded in."""
        x = np.asarray(x, dtype=float)
        c = self.config
        if self.kind == UNIFORM:
            return 0.5 * self.omega * x + c.p2
        return c.p2 - self.D * np.expm1(-self.alpha * x)

    def superpotential_prime(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == UNIFORM:
            return np.full_like(x, 0.5 * self.omega)
        return self.alpha * self.D * np.exp(-self.alpha * x)

    def field(self, x):
        """Seed magnetic field B0(x) = W0'(x)/e."""
        return self.superpotential_prime(x) / self.config.e_charge

    def partner_potential(self, x, sigma=1):
        """V0^sigma(x) = W0^2 - sigma W0'."""
        if sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        w = self.superpotential(x)
        return w * w - sigma * self.superpotential_prime(x)

    # ------------------------------------------------------------- spectrum

    def eigenvalue(self, n, sigma=1):
        """k_n^sigma; the sigma = -1 tower is the sigma = +1 tower shifted by one."""
        if sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        level = n if sigma == 1 else n + 1
        self._check_level(level)
        if n < 0:
            raise LevelError("negative level")
        if self.kind == UNIFORM:
            return self.omega * level
        return self.alpha * level * (2.0 * self.q2 - self.alpha * level)

    # -------------------------------------------------------- eigenfunctions

    def _uniform_norm(self, n):
        return math.sqrt(math.sqrt(self.omega / (2 * math.pi)) / (2.0 ** n * math.factorial(n)))

    def _exp_log_prefactor(self, n, rho):
        """log of exp(-rho/2) rho^s relative to its peak value at rho = 2s.

        Written as s [log(1 + d) - d] with d = rho/(2s) - 1, which avoids the
        cancellation between two large terms when s is large.
        """
        s = self.q2 / self.alpha - n
        d = (rho - 2 * s) / (2 * s)
        with np.errstate(divide="ignore"):  # rho underflowing to 0 gives log 0 = -inf
            # log1p(d) near the peak; log(rho / 2s) once d -> -1 would round away rho
            log_ratio = np.where(d < -0.5, np.log(rho / (2 * s)), np.log1p(np.maximum(d, -0.5)))
        return s * (log_ratio - d)

    def _exp_raw(self, n, x):
        """Unnormalized exponential-seed eigenfunction, peak prefactor scaled to 1."""
        rho = self.rho(x)
        s = self.q2 / self.alpha - n
        return np.exp(self._exp_log_prefactor(n, rho)) * specfun.laguerre(n, 2 * s, rho)

    def _exp_raw_prime(self, n, x):
        rho = self.rho(x)
        s = self.q2 / self.alpha - n
        pref = np.exp(self._exp_log_prefactor(n, rho))
        lag = specfun.laguerre(n, 2 * s, rho)
        dlag = -specfun.laguerre(n - 1, 2 * s + 1, rho) if n > 0 else 0.0
        # d/dx = -alpha rho d/drho, multiplied through so rho = 0 is harmless
        return -self.alpha * pref * ((s - 0.5 * rho) * lag + rho * dlag)

    def normalization(self, n):
        """N_n; closed form for the uniform seed, by quadrature for the exponential one.

        For the exponential seed the value returned multiplies the internally
        peak-scaled profile, not the bare ``exp(-rho/2) rho^s L_n`` form.
        """
        self._check_level(n)
        if self.kind == UNIFORM:
            return self._uniform_norm(n)
        if n not in self._norms:
            val = integrate(lambda x: self._exp_raw(n, x) ** 2, self.window(n),
                            tol=1e-300, rel_tol=1e-12)
            self._norms[n] = 1.0 / math.sqrt(val)
        return self._norms[n]

    def eigenfunction(self, n, x, sigma=1):
        """Normalized F_{n,p2,sigma}(x).

        sigma = -1 states come from the ladder relation
        F_{n,-1} = L0^- F_{n+1,+1} / sqrt(k_{n+1}^+) with L0^- = d/dx + W0.
        """
        if sigma == -1:
            self._check_level(n + 1)
            k = self.eigenvalue(n + 1)
            up = self.eigenfunction(n + 1, x)
            return (self.eigenfunction_prime(n + 1, x) + self.superpotential(x) * up) / math.sqrt(k)
        if sigma != 1:
            raise ValueError("sigma must be +1 or -1")
        self._check_level(n)
        if self.kind == UNIFORM:
            eta = self.eta(x)
            return self._uniform_norm(n) * np.exp(-0.5 * eta * eta) * specfun.hermite(n, eta)
        return self.normalization(n) * self._exp_raw(n, x)

    def eigenfunction_prime(self, n, x):
        """Analytic dF_{n,p2,+1}/dx."""
        self._check_level(n)
        if self.kind == UNIFORM:
            eta = self.eta(x)
            h = specfun.hermite(n, eta)
            hm = specfun.hermite(n - 1, eta) if n > 0 else 0.0
            g = self._uniform_norm(n) * np.exp(-0.5 * eta * eta) * (2 * n * hm - eta * h)
            return self._scale * g
        return self.normalization(n) * self._exp_raw_prime(n, x)

    # ---------------------------------------------------------------- window

    def window(self, n=0):
        """x-interval outside which F_{n,p2,+1}^2 is negligible (< ~1e-30 of its peak)."""
        self._check_level(n)
        if self.kind == UNIFORM:
            half = (math.sqrt(2 * n + 1) + 6.5) / self._scale
            return (self.center - half, self.center + half)
        s = self.q2 / self.alpha - n
        beta = 2 * s

        def phi(u):
            return -0.5 * np.exp(u) + s * u + n * np.log1p(np.exp(u) / (beta + 1))

        u = np.linspace(math.log(1e-300), math.log(1e6 + 40 * (s + n)), 20001)
        vals = phi(u)
        i = int(np.argmax(vals))
        target = vals[i] - _WINDOW_DROP
        lo_u = _bisect(phi, u[0], u[i], target) if vals[0] < target else u[0]
        hi_u = _bisect(phi, u[i], u[-1], target)
        x_hi = (self._log_rho0 - lo_u) / self.alpha
        x_lo = (self._log_rho0 - hi_u) / self.alpha
        return (float(x_lo), float(x_hi))


def _bisect(fn, lo, hi, target, iters=200):
    f_lo = fn(lo) - target
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid) - target
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return 0.5 * (lo + hi)
