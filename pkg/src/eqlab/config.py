"""Default numerical tolerances.

Every threshold used by the library lives here so callers (and the CLI's
``--tol-*`` flags) can override them in one place.
"""
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # nbody
    collision_rel: float = 1e-13
    cc_residual: float = 1e-10
    rhombus_xtol: float = 1e-13
    # reduction
    gs_drop: float = 1e-10
    decoupling: float = 1e-8
    pairing_rel: float = 1e-8
    # spectral, all relative to ||L||
    stable_rel: float = 1e-8
    unstable_rel: float = 1e-6
    cluster_rel: float = 1e-7
    rank_rel: float = 1e-8
    backward_rel: float = 1e-10
    # emcurv
    borderline: float = 1e-12
    threshold_xtol: float = 1e-6

    def override(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT = Tolerances()
