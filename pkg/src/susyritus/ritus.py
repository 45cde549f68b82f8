"""Ritus modes, the diagonal momentum-space propagator and per-mode densities.

In the Ritus basis the propagator is diagonal, S_F(p) = (gamma.pbar + m) /
(p0^2 - k - m^2) with pbar = (p0, 0, sqrt(k)).  After the Wick-rotated p0
integral (int dp0/(p0^2 + b) = pi/sqrt(b)) each level contributes a real
x-profile times a spectral weight:

* charge:  rho_0 = |F0^(1)|^2 with weight sgn(m);
           rho_l = |F_l^(1)|^2 + |F_{l-1,+1}|^2 with weight m/sqrt(m^2 + k_l);
* current: j_0 = 0;  j_l = F_{l-1,+1} F_l^(1) with weight sqrt(k_l)/sqrt(m^2 + k_l).

Overall factors (pi e for the charge, -2 i^ell e pi for the current) are kept
as metadata rather than multiplied into the real profiles.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, LevelError, PoleError, TailError
from .intertwine import IntertwinedSystem
from .seeds import EXPONENTIAL, UNIFORM, FieldConfig, SeedSystem

# -------------------------------------------------------------- Dirac algebra

IDENTITY = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

GAMMA = (SIGMA3, 1j * SIGMA1, 1j * SIGMA2)
METRIC = np.diag([1.0, -1.0, -1.0])
P_PLUS = 0.5 * (IDENTITY + GAMMA[0])
P_MINUS = 0.5 * (IDENTITY - GAMMA[0])

CHARGE_PREFACTOR = "pi*e"
POLE_TOL = 1e-9


def current_prefactor(ell):
    """Symbolic and numeric -2 i^ell e pi (with e = 1 in the numeric value)."""
    if ell not in (1, 2):
        raise ValueError("current component ell must be 1 or 2")
    return f"-2*i^{ell}*e*pi", complex(-2 * (1j ** ell) * math.pi)


def dirac_trace_identities():
    """Numerically check the 2+1D Dirac-algebra identities.

    Returns a dict mapping identity name to the largest absolute deviation.
    """
    report = {}
    dev = 0.0
    for mu in range(3):
        for nu in range(3):
            anti = GAMMA[mu] @ GAMMA[nu] + GAMMA[nu] @ GAMMA[mu]
            dev = max(dev, np.abs(anti - 2 * METRIC[mu, nu] * IDENTITY).max())
    report["clifford"] = float(dev)
    tr1 = tr2 = 0.0
    for ell in (1, 2):
        for mu in (1, 2):
            delta = 1.0 if ell == mu else 0.0
            tr1 = max(tr1, abs(np.trace(GAMMA[ell] @ GAMMA[mu]) + 2 * delta))
            t = np.trace(GAMMA[ell] @ GAMMA[0] @ GAMMA[mu] @ GAMMA[0])
            tr2 = max(tr2, abs(t - 2 * delta))
    report["trace_gamma_l_gamma_mu"] = float(tr1)
    report["trace_gamma_l_gamma0_gamma_mu_gamma0"] = float(tr2)
    report["projector_idempotent"] = float(max(np.abs(P_PLUS @ P_PLUS - P_PLUS).max(),
                                               np.abs(P_MINUS @ P_MINUS - P_MINUS).max()))
    report["projector_orthogonal"] = float(max(np.abs(P_PLUS @ P_MINUS).max(),
                                               np.abs(P_MINUS @ P_PLUS).max()))
    report["projector_complete"] = float(np.abs(P_PLUS + P_MINUS - IDENTITY).max())
    return report


def slash_pbar(p0, k):
    """gamma.pbar = p0 gamma^0 - sqrt(k) gamma^2 for pbar = (p0, 0, sqrt(k))."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return p0 * GAMMA[0] - math.sqrt(k) * GAMMA[2]


def propagator_momentum(p0, k, m, pole_tol=POLE_TOL, scale=1.0):
    """S_F(p) = (gamma.pbar + m) / (p0^2 - k - m^2).

    Raises
    ------
    PoleError
        When |p0^2 - k - m^2| < pole_tol * scale.
    """
    denom = p0 * p0 - k - m * m
    if abs(denom) < pole_tol * scale:
        raise PoleError(f"p0^2 - k - m^2 = {denom:.3e} is on the mass shell")
    return (slash_pbar(p0, k) + m * IDENTITY) / denom


# ---------------------------------------------------------------- Ritus modes


def with_p2(system: IntertwinedSystem, p2):
    """The same construction at a different transverse momentum."""
    if p2 == system.config.p2:
        return system
    return IntertwinedSystem(SeedSystem(system.config.replace(p2=float(p2))))


@dataclass(frozen=True)
class RitusMode:
    """One diagonal Ritus matrix E_p(z) with its quantum numbers."""

    system: IntertwinedSystem
    level: int
    p0: float

    @property
    def p2(self):
        return self.system.config.p2

    @property
    def k(self):
        return self.system.spectrum(self.level)

    @property
    def pbar(self):
        return (self.p0, 0.0, math.sqrt(self.k))

    def components(self, x):
        """Real x-profiles (E_+, E_-) without the plane-wave phase."""
        x = np.asarray(x, dtype=float)
        upper = self.system.eigenfunction(self.level, x)
        if self.level == 0:
            lower = np.zeros_like(upper)
        else:
            lower = self.system.seed.eigenfunction(self.level - 1, x)
        return upper, lower

    def matrix(self, t, x, y):
        """E_p(z) = exp(-i(p0 t - p2 y)) diag(F^(1)_l(x), F_{l-1,+1}(x)); shape (..., 2, 2)."""
        t, x, y = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float), np.asarray(y, float))
        phase = np.exp(-1j * (self.p0 * t - self.p2 * y))
        upper, lower = self.components(x)
        out = np.zeros(x.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = phase * upper
        out[..., 1, 1] = phase * lower
        return out


def ritus_matrix(system, level, p0, t, x, y, p2=None):
    """Evaluate the Ritus matrix of ``level`` at (t, x, y)."""
    if p2 is not None:
        system = with_p2(system, p2)
    return RitusMode(system, level, p0).matrix(t, x, y)


# ------------------------------------------------------------------ densities


@dataclass
class DensityProfile:
    """A per-mode density profile sampled on a grid."""

    kind: str
    level: int
    p2: float
    m: float
    x: np.ndarray
    values: np.ndarray
    coefficient: float
    prefactor: str
    eigenvalue: float
    metadata: dict = field(default_factory=dict)


def _mass_sign(system, m, m_sign):
    if m != 0:
        return 1 if m > 0 else -1
    sign = system.config.m_sign if m_sign is None else m_sign
    if sign not in (1, -1):
        raise ConfigError("m = 0 needs an explicit sign flag of +1 or -1")
    return sign


def charge_coefficient(k, m, sign=1):
    """Spectral weight m/sqrt(m^2 + k); sgn(m) for the zero mode."""
    if k == 0:
        return float(sign)
    return m / math.sqrt(m * m + k)


def current_coefficient(k, m):
    if k == 0:
        return 0.0
    return math.sqrt(k) / math.sqrt(m * m + k)


def charge_density_mode(system, level, x, m=None, m_sign=None):
    """rho_level(x, p2) and its spectral weight.

    Parameters
    ----------
    system : IntertwinedSystem
    level : int
        0 for the added ground state, l >= 1 for the mode built on seed level l-1.
    x : array_like
    m : float, optional
        Mass gap; defaults to the configured value.
    m_sign : {+1, -1}, optional
        Sign used for sgn(m) when m == 0.
    """
    m = system.config.m if m is None else float(m)
    x = np.asarray(x, dtype=float)
    mode = RitusMode(system, level, 0.0)
    upper, lower = mode.components(x)
    k = mode.k
    sign = _mass_sign(system, m, m_sign)
    st = system.state(level)
    return DensityProfile(
        kind="charge", level=level, p2=system.config.p2, m=m, x=x,
        values=upper * upper + lower * lower,
        coefficient=charge_coefficient(k, m, sign), prefactor=CHARGE_PREFACTOR,
        eigenvalue=k, metadata={"norm_constant": st.norm_constant, "window": system.window},
    )


def current_density_mode(system, level, x, m=None, ell=1):
    """j_level(x, p2): product of the two spin-component profiles.

    The ground mode has a single nonzero component, so its current vanishes.
    The factor 2 in the prefactor accounts for the term plus its conjugate.
    """
    m = system.config.m if m is None else float(m)
    x = np.asarray(x, dtype=float)
    mode = RitusMode(system, level, 0.0)
    upper, lower = mode.components(x)
    k = mode.k
    symbol, _ = current_prefactor(ell)
    st = system.state(level)
    return DensityProfile(
        kind="current", level=level, p2=system.config.p2, m=m, x=x,
        values=upper * lower, coefficient=current_coefficient(k, m), prefactor=symbol,
        eigenvalue=k, metadata={"norm_constant": st.norm_constant, "window": system.window, "ell": ell},
    )


def density_p2_integral(system, level, x, p2_range, quadrature=64, kind="charge", m=None,
                        tail_tol=1e-4):
    """Weighted p2 integral of a per-mode density, int dp2 c(p2) rho_level(x, p2).

    ``quadrature`` is a Gauss-Legendre node count over ``p2_range`` or an
    explicit ``(nodes, weights)`` pair.  Momenta at which the level is not
    bound contribute zero.  Diagnostic only.

    Raises
    ------
    TailError
        If the integrand at the ends of ``p2_range`` exceeds ``tail_tol``
        of the integral's peak.
    """
    x = np.asarray(x, dtype=float)
    lo, hi = p2_range
    if isinstance(quadrature, int):
        t, w = np.polynomial.legendre.leggauss(quadrature)
        nodes = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
        weights = 0.5 * (hi - lo) * w
        check_ends = True
    else:
        nodes, weights = (np.asarray(v, dtype=float) for v in quadrature)
        check_ends = False

    def weighted(p2):
        try:
            sys_p = with_p2(system, p2)
            if kind == "charge":
                prof = charge_density_mode(sys_p, level, x, m=m)
            else:
                prof = current_density_mode(sys_p, level, x, m=m)
        except (LevelError, ConfigError):
            return np.zeros_like(x)
        return prof.coefficient * prof.values

    total = np.zeros_like(x)
    for p, wt in zip(nodes, weights):
        total += wt * weighted(p)
    if check_ends:
        ends = np.abs(weighted(lo)) + np.abs(weighted(hi))
        scale = np.abs(total).max()
        if scale > 0 and ends.max() * (hi - lo) > tail_tol * scale:
            raise TailError("p2 integrand has not decayed at the ends of p2_range")
    m_val = system.config.m if m is None else m
    prefactor = CHARGE_PREFACTOR if kind == "charge" else current_prefactor(1)[0]
    return DensityProfile(
        kind=f"{kind}_p2_integrated", level=level, p2=float("nan"), m=m_val, x=x, values=total,
        coefficient=1.0, prefactor=prefactor, eigenvalue=float("nan"),
        metadata={"p2_range": (lo, hi), "nodes": len(nodes), "weighted": True},
    )


# ----------------------------------------------------------------- alpha scan


@dataclass
class LimitScanRow:
    alpha: float
    k_errors: list
    w0_error: float
    v0_error: float
    rho0_discrepancy: float


@dataclass
class LimitScanReport:
    omega: float
    p2: float
    window: tuple
    rows: list


def limit_scan_alpha(base: FieldConfig, alphas, n_max=3, window=None, n_points=1024,
                     epsilon_fraction=0.2, nu1_exponential=-1.5, nu1_uniform=0.0):
    """Compare exponential-seed quantities with their uniform-field limits.

    B0 (hence omega = 2 e B0) is held fixed, so D = omega/(2 alpha).  Seed
    errors are |k_n^+ - omega n| for n <= n_max and sup-norm differences of W0
    and V0^+ on a fixed window; the transformed discrepancy is
    sup|rho0^exp - rho0^unif| / max rho0^unif, with epsilon1 = -fraction k1^+
    on both sides.
    """
    alphas = [float(a) for a in alphas]
    if any(a <= 0 for a in alphas):
        raise ConfigError("alphas must be positive")
    omega = 2 * base.e_charge * base.B0
    unif_cfg = FieldConfig(UNIFORM, base.B0, base.p2, -epsilon_fraction * omega, nu1_uniform,
                           e_charge=base.e_charge, m=base.m, m_sign=base.m_sign)
    unif_seed = SeedSystem(unif_cfg)
    if window is None:
        window = unif_seed.window(0)
    x = np.linspace(window[0], window[1], n_points)
    unif = IntertwinedSystem(unif_seed)
    w0_u = unif_seed.superpotential(x)
    v0_u = unif_seed.partner_potential(x, 1)
    rho_u = unif.eigenfunction(0, x) ** 2
    rows = []
    for alpha in alphas:
        q2 = base.p2 + base.e_charge * base.B0 / alpha
        k1 = alpha * (2 * q2 - alpha)
        cfg = FieldConfig(EXPONENTIAL, base.B0, base.p2, -epsilon_fraction * k1, nu1_exponential,
                          alpha=alpha, e_charge=base.e_charge, m=base.m, m_sign=base.m_sign)
        seed = SeedSystem(cfg)
        top = n_max if seed.n_max is None else min(n_max, seed.n_max)
        k_err = [abs(seed.eigenvalue(n) - omega * n) for n in range(top + 1)]
        sys_e = IntertwinedSystem(seed)
        rho_e = sys_e.eigenfunction(0, x) ** 2
        rows.append(LimitScanRow(
            alpha=alpha, k_errors=k_err,
            w0_error=float(np.abs(seed.superpotential(x) - w0_u).max()),
            v0_error=float(np.abs(seed.partner_potential(x, 1) - v0_u).max()),
            rho0_discrepancy=float(np.abs(rho_e - rho_u).max() / rho_u.max()),
        ))
    return LimitScanReport(omega=omega, p2=base.p2, window=tuple(window), rows=rows)
