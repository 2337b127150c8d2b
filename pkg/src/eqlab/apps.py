"""End-to-end analyses of planar relative equilibria.

Each pipeline reduces the relative equilibrium to shape coordinates, applies
the two-dimensional curvature test plane by plane, and compares the outcome
with a direct eigenvalue computation.
"""
from dataclasses import dataclass

import numpy as np

from . import emcurv, nbody, reduction, spectral
from .config import DEFAULT
from .errors import PreconditionError

STABLE = "Stable"
UNSTABLE = "Unstable"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class PlaneReport:
    index: int
    alpha: float
    beta: float
    k: float
    plane_verdict: str
    zero_set: str
    consistent: bool = True


def plane_report(index, alpha, beta, k, tol=DEFAULT, energy=1.0):
    """Curvature verdict and zero-set type of one invariant plane."""
    if alpha <= 0 or beta <= 0:
        # a non-maximum direction: the quadratic model does not apply, and a
        # saddle or minimum of the shape potential is outside the theorem
        return PlaneReport(index, float(alpha), float(beta), float(k), INDETERMINATE, "n/a", False)
    model = emcurv.QuadModel2D(alpha, beta, k)
    return PlaneReport(index, float(alpha), float(beta), float(k),
                       emcurv.stability_outcome(model, tol),
                       emcurv.zero_set(model, energy).kind)


def prop52_verdict(planes):
    """Combine per-plane verdicts of a decoupled system.

    Any unstable plane makes the whole system unstable; all stable planes give
    ``Stable``; otherwise the result is ``Indeterminate``.
    """
    verdicts = [p.plane_verdict if isinstance(p, PlaneReport) else p for p in planes]
    if not verdicts:
        raise PreconditionError("need at least one plane")
    if any(v == UNSTABLE for v in verdicts):
        return UNSTABLE
    if all(v == STABLE for v in verdicts):
        return STABLE
    return INDETERMINATE


@dataclass(frozen=True)
class LagrangeResult:
    masses: tuple
    routh: bool
    routh_ratio: float
    curvature_criterion: bool
    spectral: spectral.StabilityVerdict
    alpha: float
    beta: float
    k: float
    hred_eigenvalues: tuple

    @property
    def consistent(self):
        return self.routh == self.curvature_criterion == self.spectral.is_stable


def lagrange_closed_form(masses):
    """``(k, alpha, beta)`` for masses rescaled to unit total."""
    m = np.asarray(masses, float) / np.sum(masses)
    mu = m[0] * m[1] + m[0] * m[2] + m[1] * m[2]
    k = mu**0.75
    root = np.sqrt(max(0.0, 1 - 3 * mu))
    return k, 0.75 * k * k * (1 - root), 0.75 * k * k * (1 + root)


def lagrange_pipeline(masses, tol=DEFAULT):
    """Routh test, curvature test and direct spectrum for the Lagrange triangle.

    Masses are rescaled to unit total before reduction.
    """
    masses = np.asarray(masses, float)
    if masses.shape != (3,) or np.any(masses <= 0):
        raise PreconditionError("need three positive masses")
    m = masses / masses.sum()
    ratio, routh = spectral.routh_holds(m)
    cc = nbody.build_lagrange(m, 2, tol)
    red = reduction.reduce_planar(cc, tol=tol)
    w = np.linalg.eigvalsh(red.Hred)
    alpha, beta = -w[1] / 2, -w[0] / 2
    model_ok = alpha > 0 and beta > 0
    crit = model_ok and emcurv.stability_test(emcurv.QuadModel2D(alpha, beta, red.k))
    verdict = spectral.analyze(red.linear_system(), "planar", tol)
    return LagrangeResult(tuple(masses), routh, ratio, bool(crit), verdict,
                          float(alpha), float(beta), float(red.k), tuple(float(x) for x in w))


@dataclass(frozen=True)
class FourBodyResult:
    kind: str
    m: float
    shape_ratio: float
    split_found: bool
    planes: tuple
    pairing_residual: float
    spectral: spectral.StabilityVerdict
    overall: str
    hred_eigenvalues: tuple
    plane_spectra: tuple
    reduced_spectrum: tuple

    @property
    def consistent(self):
        if not self.split_found or self.overall == INDETERMINATE:
            return True
        return (self.overall == STABLE) == self.spectral.is_stable


def four_body_pipeline(kind, m=1.0, tol=DEFAULT):
    """Square (equal masses ``m``) or rhombus with masses ``(m, 1, m, 1)``."""
    if kind == "square":
        cc, s = nbody.build_square(m, tol), 1.0
    elif kind == "rhombus":
        cc, s = nbody.build_rhombus(m, tol)
    else:
        raise PreconditionError(f"unknown four-body kind {kind!r}")
    red = reduction.reduce_planar(cc, tol=tol)
    Lred = red.linear_system()
    verdict = spectral.analyze(Lred, "planar", tol)
    split = reduction.split_into_symplectic_planes(red, tol=tol)
    hw = tuple(float(x) for x in np.linalg.eigvalsh(red.Hred))
    if isinstance(split, reduction.NoSplit):
        return FourBodyResult(kind, float(m), float(s), False, (), split.residual, verdict,
                              INDETERMINATE, hw, (), tuple(verdict.eigenvalues))
    planes, spectra = [], []
    for i, pl in enumerate(split.planes):
        planes.append(plane_report(i, pl.alpha, pl.beta, red.k, tol))
        if pl.alpha > 0 and pl.beta > 0:
            toy = emcurv.toy_linear_system(emcurv.QuadModel2D(pl.alpha, pl.beta, red.k))
            spectra.append(tuple(spectral.spectrum(toy, tol)))
    overall = prop52_verdict(planes)
    return FourBodyResult(kind, float(m), float(s), True, tuple(planes), split.residual, verdict,
                          overall, hw, tuple(spectra), tuple(verdict.eigenvalues))
