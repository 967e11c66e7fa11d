"""Global tolerances and iteration budgets."""

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    tol: float = 1e-9
    singular_tol: float = 1e-10
    residual_tol: float = 1e-9
    restarts: int = 500
    steps: int = 200
    power_rtol: float = 1e-12
    samples: int = 1000
    seed: int = 0

    def with_(self, **changes):
        return replace(self, **changes)


def default_config():
    """Return the default config, honouring ``OVPFRAME_TOL`` when set."""
    cfg = Config()
    env = os.environ.get("OVPFRAME_TOL")
    if env:
        cfg = cfg.with_(tol=float(env))
    return cfg


def resolve(cfg):
    return default_config() if cfg is None else cfg
