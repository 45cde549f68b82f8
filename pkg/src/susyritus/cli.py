"""Command-line interface: CSV data for the figure presets and the verification suite.

Subcommands
-----------
profile      x, V0_tilde, V1, B0, B1
spectrum     n, k_seed_plus, k_transformed
density      x, then one charge (rho_*) or current (j_*) column per level
verify       run every invariant check and print the report
limit-scan   seed convergence errors and transformed ground discrepancy vs alpha

Exit codes: 0 success, 1 numerical failure, 2 configuration error,
3 singular transform, 4 verification failure.
"""

import argparse
import io
import math
import sys
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    LevelError,
    SingularTransformError,
    SusyRitusError,
    UnsupportedTransformError,
)
from .intertwine import IntertwinedSystem
from .presets import get_preset, PRESETS
from .ritus import CHARGE_PREFACTOR, charge_density_mode, current_density_mode, limit_scan_alpha
from .seeds import EXPONENTIAL, UNIFORM, FieldConfig, SeedSystem
from .verify import FAULTS, run_invariants

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2
EXIT_SINGULAR = 3
EXIT_VERIFY = 4

_MIN_FIGURE_POINTS = 64
# flags a preset takes over; RunConfig attribute names
_PRESET_FIELDS = ("seed", "B0", "p2", "epsilon1", "nu1", "alphas", "x_min", "x_max")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines one CLI output (written into the CSV header)."""

    command: str
    seed: str = UNIFORM
    B0: float = 0.5
    p2: float = 1.0
    epsilon1: float = None
    nu1: float = 0.0
    alphas: tuple = ()
    epsilon_fraction: float = None
    m: float = 0.0
    m_sign: int = 1
    e_charge: float = 1.0
    x_min: float = None
    x_max: float = None
    n_points: int = 1024
    n_max: int = 5
    precision: int = 12
    out: str = None
    preset: str = None
    which: str = "charge"
    levels: tuple = ("ground", 0, 1, 2)
    fault: str = None

    def __post_init__(self):
        if self.n_points < 2:
            raise ConfigError("npoints must be at least 2")
        if self.command in ("profile", "density") and self.n_points < _MIN_FIGURE_POINTS:
            raise ConfigError(f"figure outputs need npoints >= {_MIN_FIGURE_POINTS}")
        if not 1 <= self.precision <= 17:
            raise ConfigError("precision must be between 1 and 17 digits")
        if self.n_max < 0:
            raise ConfigError("nmax must be non-negative")
        if (self.x_min is None) != (self.x_max is None):
            raise ConfigError("give both xmin and xmax, or neither")
        if self.x_min is not None and not self.x_max > self.x_min:
            raise ConfigError("xmax must exceed xmin")
        if self.which not in ("charge", "current"):
            raise ConfigError("which must be 'charge' or 'current'")
        if self.epsilon1 is None and self.epsilon_fraction is None:
            raise ConfigError("give epsilon1 (or a preset)")
        # build the field configs once so invalid parameters fail before any work
        self.field_configs()

    def field_configs(self):
        """One FieldConfig per alpha (a single one for the uniform seed)."""
        common = dict(e_charge=self.e_charge, m=self.m, m_sign=self.m_sign)
        if self.seed == UNIFORM:
            eps = self.epsilon1
            if eps is None:
                eps = -self.epsilon_fraction * 2 * self.e_charge * self.B0
            return [FieldConfig(UNIFORM, self.B0, self.p2, eps, self.nu1, **common)]
        if self.seed != EXPONENTIAL:
            raise ConfigError(f"unknown seed kind {self.seed!r}")
        if not self.alphas:
            raise ConfigError("the exponential seed needs --alpha")
        out = []
        for alpha in self.alphas:
            eps = self.epsilon1
            if eps is None:
                q2 = self.p2 + self.e_charge * self.B0 / alpha
                eps = -self.epsilon_fraction * alpha * (2 * q2 - alpha)
            out.append(FieldConfig(EXPONENTIAL, self.B0, self.p2, eps, self.nu1, alpha=alpha, **common))
        return out

    def header_lines(self):
        skip = ("out", "fault")
        items = [(k, v) for k, v in asdict(self).items() if k not in skip]
        return [f"{k} = {_fmt_meta(v)}" for k, v in items]


def _fmt_meta(v):
    if isinstance(v, tuple):
        return ",".join(str(x) for x in v)
    return str(v)


# ---------------------------------------------------------------- CSV output


class CsvTable:
    """Column-oriented table rendered as commented, deterministic CSV."""

    def __init__(self, precision=12):
        self.precision = precision
        self.comments = []
        self.names = []
        self.columns = []

    def comment(self, text):
        self.comments.append(text)

    def add(self, name, values):
        self.names.append(name)
        self.columns.append(list(values))

    def _cell(self, v):
        if v is None:
            return ""
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            return str(int(v))
        v = float(v)
        if not math.isfinite(v):
            raise SusyRitusError("refusing to write a non-finite value to CSV")
        if v == 0.0:
            v = 0.0  # drop the sign of negative zero
        return f"{v:.{self.precision}g}"

    def render(self):
        lengths = {len(c) for c in self.columns}
        if len(lengths) > 1:
            raise ValueError("columns differ in length")
        buf = io.StringIO()
        for line in self.comments:
            buf.write(f"# {line}\n")
        buf.write(",".join(self.names) + "\n")
        for row in zip(*self.columns):
            buf.write(",".join(self._cell(v) for v in row) + "\n")
        return buf.getvalue()


def _new_table(cfg, title):
    table = CsvTable(cfg.precision)
    table.comment(f"susyritus {__version__} {cfg.command}: {title}")
    for line in cfg.header_lines():
        table.comment(line)
    return table


def _suffix(fc, multi):
    return f"@alpha={fc.alpha:g}" if multi else ""


def _system(fc, window):
    return IntertwinedSystem(SeedSystem(fc), screen_window=window)


def _grid(cfg, configs):
    """Common x grid; with no explicit window the first system's window is used."""
    if cfg.x_min is not None:
        window = (cfg.x_min, cfg.x_max)
    else:
        window = IntertwinedSystem(SeedSystem(configs[0])).window
    return np.linspace(window[0], window[1], cfg.n_points)


# ------------------------------------------------------------------ commands


def cmd_profile(cfg):
    """Columns x, V0_tilde, V1, B0, B1 (one block per alpha for multi-alpha runs)."""
    configs = cfg.field_configs()
    multi = len(configs) > 1
    x = _grid(cfg, configs)
    table = _new_table(cfg, "potentials and magnetic fields")
    table.comment("V0_tilde = W0^2 - W0' - epsilon1; V1 = V0_tilde - 2 W1'; B = W'/e")
    table.add("x", x)
    for fc in configs:
        system = _system(fc, (x[0], x[-1]))
        sfx = _suffix(fc, multi)
        table.add("V0_tilde" + sfx, system.shifted_potential(x))
        table.add("V1" + sfx, system.partner_potential(x))
        table.add("B0" + sfx, system.seed.field(x))
        table.add("B1" + sfx, system.field(x))
    return table


def cmd_spectrum(cfg):
    """Columns n, k_seed_plus, k_transformed for n = 0..nmax (bounded by the tower)."""
    configs = cfg.field_configs()
    multi = len(configs) > 1
    table = _new_table(cfg, "spectra")
    table.comment("k_transformed(n) is the level-n eigenvalue of the new Hamiltonian; "
                  "level 0 is the added state")
    systems = [IntertwinedSystem(SeedSystem(fc)) for fc in configs]
    top = cfg.n_max
    sizes = [s.n_levels for s in systems]
    if all(size is not None for size in sizes):
        top = min(top, max(sizes) - 1)
    ns = list(range(top + 1))
    table.add("n", ns)
    for fc, system in zip(configs, systems):
        seed = system.seed
        sfx = _suffix(fc, multi)
        seed_col, new_col = [], []
        for n in ns:
            try:
                seed_col.append(seed.eigenvalue(n))
            except LevelError:
                seed_col.append(None)
            n_levels = system.n_levels
            new_col.append(system.spectrum(n) if n_levels is None or n < n_levels else None)
        table.add("k_seed_plus" + sfx, seed_col)
        table.add("k_transformed" + sfx, new_col)
    return table


def _parse_level(token):
    token = str(token).strip().lower()
    if token in ("ground", "g"):
        return "ground"
    try:
        n = int(token)
    except ValueError:
        raise ConfigError(f"bad level {token!r}; use 'ground' or a seed index n >= 0") from None
    if n < 0:
        raise ConfigError("excited levels are seed indices n >= 0")
    return n


def cmd_density(cfg):
    """Per-mode charge or current densities.

    Level ``ground`` is the added state (column ``rho_0``/``j_0``); an integer
    n selects the excited mode built on seed level n (column ``rho_{n+1}``).
    """
    configs = cfg.field_configs()
    multi = len(configs) > 1
    levels = [_parse_level(t) for t in cfg.levels]
    x = _grid(cfg, configs)
    charge = cfg.which == "charge"
    table = _new_table(cfg, "charge densities" if charge else "current densities")
    if charge:
        table.comment(f"prefactor {CHARGE_PREFACTOR}; column = F_up^2 + F_down^2; "
                      "weight m/sqrt(m^2+k) (sgn m for k = 0)")
    else:
        table.comment("prefactor -2*i^ell*e*pi (factor 2 from the conjugate term); "
                      "column = F_up F_down; weight sqrt(k)/sqrt(m^2+k)")
    table.add("x", x)
    stem = "rho" if charge else "j"
    for fc in configs:
        system = _system(fc, (x[0], x[-1]))
        sfx = _suffix(fc, multi)
        for lev in levels:
            level = 0 if lev == "ground" else lev + 1
            n_levels = system.n_levels
            if n_levels is not None and level >= n_levels:
                raise LevelError(f"level {lev} is not bound for alpha = {fc.alpha:g} "
                                 f"({n_levels} transformed levels)")
            if charge:
                prof = charge_density_mode(system, level, x)
            else:
                prof = current_density_mode(system, level, x)
            name = f"{stem}_{level}{sfx}"
            table.comment(f"{name}: level {level} ({'ground' if level == 0 else f'n={level - 1}'}), "
                          f"k = {prof.eigenvalue:.{cfg.precision}g}, "
                          f"weight = {prof.coefficient:.{cfg.precision}g}, prefactor {prof.prefactor}")
            table.add(name, prof.values)
    return table


def cmd_verify(cfg, stream):
    """Run the invariant suite for every configured system; True when all pass."""
    ok = True
    for fc in cfg.field_configs():
        system = IntertwinedSystem(SeedSystem(fc))
        window = (cfg.x_min, cfg.x_max) if cfg.x_min is not None else None
        report = run_invariants(system, window=window, n_points=max(cfg.n_points, 64),
                                n_top=cfg.n_max, fault=cfg.fault)
        label = f"{fc.seed_kind}" + (f" alpha={fc.alpha:g}" if fc.seed_kind == EXPONENTIAL else "")
        stream.write(f"== {label}\n{report.format()}\n")
        for fail in report.failures():
            stream.write(f"FAILED: {fail.name}\n")
        ok = ok and report.ok
    stream.write("verification " + ("passed" if ok else "FAILED") + "\n")
    return ok


def cmd_limit_scan(cfg):
    """Rows per alpha: seed errors |k_n^+ - omega n|, sup|dW0|, sup|dV0|, rho0 discrepancy."""
    alphas = cfg.alphas
    base = FieldConfig(UNIFORM, cfg.B0, cfg.p2, 0.0, 0.0, e_charge=cfg.e_charge, m=cfg.m,
                       m_sign=cfg.m_sign)
    window = (cfg.x_min, cfg.x_max) if cfg.x_min is not None else None
    frac = cfg.epsilon_fraction
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = limit_scan_alpha(base, alphas, n_max=cfg.n_max, window=window,
                                  n_points=cfg.n_points, epsilon_fraction=frac,
                                  nu1_exponential=cfg.nu1)
    table = _new_table(cfg, "alpha -> 0 limit scan")
    table.comment(f"omega = {report.omega:g}; comparison window = "
                  f"[{report.window[0]:.6g}, {report.window[1]:.6g}]; epsilon1 = -{frac:g} k_1^+")
    table.comment("rho0_discrepancy = sup|rho0_exp - rho0_unif| / max rho0_unif")
    n_cols = min(len(r.k_errors) for r in report.rows)
    table.add("alpha", [r.alpha for r in report.rows])
    for n in range(n_cols):
        table.add(f"k_err_n{n}", [r.k_errors[n] for r in report.rows])
    table.add("W0_sup_err", [r.w0_error for r in report.rows])
    table.add("V0_sup_err", [r.v0_error for r in report.rows])
    table.add("rho0_discrepancy", [r.rho0_discrepancy for r in report.rows])
    return table


# ----------------------------------------------------------------- arg parsing


def _float_list(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_common(p):
    g = p.add_argument_group("field configuration")
    g.add_argument("--preset", choices=sorted(PRESETS), help="built-in figure parameter set")
    g.add_argument("--seed", choices=(UNIFORM, EXPONENTIAL), help="seed field (default uniform)")
    g.add_argument("--B0", type=float, help="seed field strength (default 0.5)")
    g.add_argument("--alpha", type=_float_list,
                   help="exponential decay rate(s), comma separated")
    g.add_argument("--p2", type=float, help="transverse momentum (default 1)")
    g.add_argument("--m", type=float, default=0.0, help="mass gap (default 0)")
    g.add_argument("--m-sign", type=int, choices=(1, -1), default=1,
                   help="sign used for sgn(m) when m = 0")
    g.add_argument("--epsilon1", type=float, help="factorization energy (<= 0)")
    g.add_argument("--nu1", type=float, help="u1 mixing parameter (default 0)")
    g.add_argument("--nmax", type=int, default=5, help="highest level index reported (default 5)")
    o = p.add_argument_group("grid and output")
    o.add_argument("--xmin", type=float)
    o.add_argument("--xmax", type=float)
    o.add_argument("--npoints", type=int, default=1024)
    o.add_argument("--precision", type=int, default=12, help="significant digits (default 12)")
    o.add_argument("--out", help="output path (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="susyritus",
        description="Dirac propagators in graphene under SUSY-intertwined magnetic fields.",
        epilog="exit codes: 0 ok, 1 numerical failure, 2 configuration error, "
               "3 singular transform, 4 verification failure",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("profile", help="potentials and magnetic fields")
    _add_common(p)
    p = sub.add_parser("spectrum", help="seed and transformed eigenvalues")
    _add_common(p)
    p = sub.add_parser("density", help="per-mode charge or current densities")
    _add_common(p)
    p.add_argument("--which", choices=("charge", "current"))
    p.add_argument("--levels", help="comma-separated levels, e.g. ground,0,1,2")
    p = sub.add_parser("verify", help="run the invariant suite")
    _add_common(p)
    p.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    p = sub.add_parser("limit-scan", help="alpha -> 0 comparison with the uniform seed")
    _add_common(p)
    p.add_argument("--alphas", type=_float_list, help="alpha values (default 0.1,0.05,0.025)")
    return parser


def config_from_args(args, warn=None):
    """Assemble a RunConfig; preset values replace explicitly given flags with a warning."""
    warn = warn or (lambda msg: print(f"warning: {msg}", file=sys.stderr))
    flags = dict(seed=args.seed, B0=args.B0, p2=args.p2, epsilon1=args.epsilon1, nu1=args.nu1,
                 alphas=args.alpha, x_min=args.xmin, x_max=args.xmax)
    if args.command == "limit-scan" and args.alphas is not None:
        flags["alphas"] = args.alphas
    values = {}
    if args.preset:
        pr = get_preset(args.preset)
        preset_vals = dict(seed=pr.seed_kind, B0=pr.B0, p2=pr.p2, epsilon1=pr.epsilon1,
                           nu1=pr.nu1, alphas=tuple(pr.alphas), x_min=pr.window[0],
                           x_max=pr.window[1])
        for key in _PRESET_FIELDS:
            if flags[key] is not None and flags[key] != preset_vals[key]:
                warn(f"--preset {pr.name} overrides the {key} flag")
        values.update(preset_vals)
        values.update(epsilon_fraction=pr.epsilon_fraction, which=pr.which, levels=tuple(pr.levels))
    else:
        defaults = dict(seed=UNIFORM, B0=0.5, p2=1.0, nu1=0.0, alphas=())
        for key, val in flags.items():
            values[key] = defaults.get(key) if val is None else val
    if args.command == "limit-scan":
        # the scan always runs the exponential seed with epsilon1 = -fraction * k_1^+
        if not (args.preset and values["seed"] == EXPONENTIAL):
            values["nu1"] = -1.5 if args.nu1 is None else args.nu1
        values["seed"] = EXPONENTIAL
        values["alphas"] = values["alphas"] or (0.1, 0.05, 0.025)
        values["epsilon1"] = None
        values["epsilon_fraction"] = values.get("epsilon_fraction") or 0.2
    which = getattr(args, "which", None)
    if which is not None:
        values["which"] = which
    levels = getattr(args, "levels", None)
    if levels is not None:
        values["levels"] = tuple(t.strip() for t in levels.split(",") if t.strip())
    return RunConfig(
        command=args.command, m=args.m, m_sign=args.m_sign, n_points=args.npoints,
        n_max=args.nmax, precision=args.precision, out=args.out, preset=args.preset,
        fault=getattr(args, "inject_fault", None), **values,
    )


def _emit(text, out, stdout):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _run(args, stdout, stderr):
    cfg = config_from_args(args, warn=lambda msg: print(f"warning: {msg}", file=stderr))
    if cfg.command == "verify":
        buf = io.StringIO()
        ok = cmd_verify(cfg, buf)
        _emit(buf.getvalue(), cfg.out, stdout)
        return EXIT_OK if ok else EXIT_VERIFY
    command = {"profile": cmd_profile, "spectrum": cmd_spectrum,
               "density": cmd_density, "limit-scan": cmd_limit_scan}[cfg.command]
    _emit(command(cfg).render(), cfg.out, stdout)
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None):
    """Entry point; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                return _run(args, stdout, stderr)
            finally:
                for msg in dict.fromkeys(str(w.message) for w in caught):
                    print(f"warning: {msg}", file=stderr)
    except SingularTransformError as exc:
        print(f"error: singular transform: {exc}", file=stderr)
        return EXIT_SINGULAR
    except (ConfigError, UnsupportedTransformError, LevelError, KeyError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except SusyRitusError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
