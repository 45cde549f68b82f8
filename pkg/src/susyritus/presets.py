"""Built-in parameter sets for the figure data.

Each preset names the field parameters, the plotting window and the output
it is meant for.  Multi-alpha presets list several inhomogeneities; the CLI
emits one CSV with a column block per alpha.
"""

from dataclasses import dataclass

from .seeds import EXPONENTIAL, UNIFORM, FieldConfig


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    seed_kind: str
    B0: float
    p2: float
    nu1: float
    window: tuple
    command: str
    alphas: tuple = ()
    epsilon1: float = None
    epsilon_fraction: float = None
    which: str = "charge"
    levels: tuple = ("ground", 0, 1, 2)

    def configs(self):
        """One FieldConfig per alpha (a single config for the uniform seed)."""
        if self.seed_kind == UNIFORM:
            return [FieldConfig(UNIFORM, self.B0, self.p2, self.epsilon1, self.nu1)]
        out = []
        for alpha in self.alphas:
            eps = self.epsilon1
            if eps is None:
                q2 = self.p2 + self.B0 / alpha
                eps = -self.epsilon_fraction * alpha * (2 * q2 - alpha)
            out.append(FieldConfig(EXPONENTIAL, self.B0, self.p2, eps, self.nu1, alpha=alpha))
        return out


_FIG1 = dict(seed_kind=UNIFORM, B0=0.5, p2=1.0, nu1=0.0, epsilon1=-0.2, window=(-8.0, 4.0))
_FIG2 = dict(seed_kind=EXPONENTIAL, B0=1.0, p2=5.0, nu1=-1.5, epsilon1=-5.5, alphas=(1.0,),
             window=(-5.0, 5.0))
_SMALL = dict(seed_kind=EXPONENTIAL, B0=0.5, p2=1.0, nu1=-1.5, epsilon_fraction=0.2)

PRESETS = {
    "fig1": Preset("fig1", "uniform seed: V0~, V1, B0, B1", command="profile", **_FIG1),
    "fig3": Preset("fig3", "uniform seed: mode densities", command="density", **_FIG1),
    "fig2": Preset("fig2", "exponential seed: V0~, V1, B0, B1", command="profile", **_FIG2),
    "fig4": Preset("fig4", "exponential seed: mode densities", command="density", **_FIG2),
    "fig5": Preset("fig5", "small alpha: V1 and B1", command="profile",
                   alphas=(0.11, 0.09, 0.07, 0.05), window=(-22.0, 22.0), **_SMALL),
    "fig7": Preset("fig7", "small alpha: mode densities", command="density",
                   alphas=(0.05,), window=(-14.0, 10.0), **_SMALL),
    "fig8": Preset("fig8", "ground density across alpha", command="density",
                   alphas=(2.0, 1.0, 0.2, 0.11), window=(-8.0, 5.0), levels=("ground",),
                   **_SMALL),
}


def get_preset(name):
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
