"""Eigenvalues, stability verdicts, inclination sweeps and threshold search."""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .config import DEFAULT
from .errors import EqlabError, NumericalError, PreconditionError

LINEARLY_STABLE = "LinearlyStable"
SPECTRALLY_STABLE_ONLY = "SpectrallyStableOnly"
UNSTABLE = "Unstable"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class StabilityVerdict:
    eigenvalues: tuple
    max_real: float
    zero_multiplicity: int
    verdict: str
    norm: float
    degenerate_zero: bool = False
    clusters: tuple = field(default=(), repr=False)

    @property
    def is_stable(self):
        return self.verdict == LINEARLY_STABLE


def spectrum(L, tol=DEFAULT):
    """Eigenvalues of a dense real matrix sorted by ``(Re, Im)``.

    Each eigenvalue is checked for backward error: the smallest singular
    value of ``L - lam I`` must be below ``tol.backward_rel * |L|``.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise PreconditionError("matrix must be square")
    if not np.all(np.isfinite(L)):
        raise PreconditionError("matrix has non-finite entries")
    try:
        ev = np.linalg.eigvals(L)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("eigenvalue iteration failed") from exc
    norm = np.linalg.norm(L, 2)
    eye = np.eye(L.shape[0])
    worst = max((np.linalg.svd(L - lam * eye, compute_uv=False)[-1] for lam in ev),
                default=0.0)
    if worst > tol.backward_rel * max(norm, 1.0):
        raise NumericalError("eigenvalues fail the backward-error check", residual=worst)
    order = np.lexsort((ev.imag, ev.real))
    return [complex(z) for z in ev[order]]


def _cluster(ev, radius):
    """Single-linkage clusters of points closer than ``radius``."""
    n = len(ev)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(ev[i] - ev[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _geometric_multiplicity(L, lam, rank_tol):
    s = np.linalg.svd(L - lam * np.eye(L.shape[0]), compute_uv=False)
    return max(1, int(np.sum(s <= rank_tol)))


def classify(eigs, L, context="planar", tol=DEFAULT):
    """Stability verdict of the linear system ``z' = L z``.

    Parameters
    ----------
    eigs : sequence of complex
    L : ndarray
    context : {"planar", "r4"}
        In ``r4`` a double zero eigenvalue is expected and left out of the
        diagonalizability test.

    Returns
    -------
    StabilityVerdict
        ``verdict`` is ``Indeterminate`` when the largest real part sits
        between the stable and unstable tolerances.
    """
    if context not in ("planar", "r4"):
        raise PreconditionError(f"unknown context {context!r}")
    L = np.asarray(L, float)
    ev = np.asarray(eigs, complex)
    norm = float(np.linalg.norm(L, 2))
    scale = max(norm, np.finfo(float).tiny)
    groups = _cluster(ev, tol.cluster_rel * scale)
    centers = [ev[g].mean() for g in groups]

    zero_idx = [i for i, c in enumerate(centers) if abs(c) <= tol.cluster_rel * scale]
    zero_mult = sum(len(groups[i]) for i in zero_idx)
    max_real = max((abs(c.real) for i, c in enumerate(centers) if i not in zero_idx),
                   default=0.0)

    degenerate = context == "r4" and zero_mult > 2
    diagonalizable = True
    for i, (g, c) in enumerate(zip(groups, centers)):
        if abs(c.real) > tol.stable_rel * scale or len(g) == 1:
            continue
        alg = len(g)
        lam = 0.0 if i in zero_idx else c
        if i in zero_idx and context == "r4":
            if alg == 2:
                continue
            need = alg - 1
        else:
            need = alg
        if _geometric_multiplicity(L, lam, tol.rank_rel * scale) < need:
            diagonalizable = False

    if max_real > tol.unstable_rel * scale:
        verdict = UNSTABLE
    elif max_real > tol.stable_rel * scale:
        verdict = INDETERMINATE
    elif diagonalizable:
        verdict = LINEARLY_STABLE
    else:
        verdict = SPECTRALLY_STABLE_ONLY
    return StabilityVerdict(tuple(complex(z) for z in ev), float(max_real), int(zero_mult),
                            verdict, norm, degenerate, tuple(tuple(g) for g in groups))


def analyze(L, context="planar", tol=DEFAULT):
    """``classify(spectrum(L), L, context)``."""
    return classify(spectrum(L, tol), L, context, tol)


def routh_ratio(masses):
    m = np.asarray(masses, float)
    if m.shape != (3,) or np.any(m <= 0):
        raise PreconditionError("need three positive masses")
    return float((m[0] * m[1] + m[0] * m[2] + m[1] * m[2]) / m.sum() ** 2)


def routh_holds(masses):
    """Return ``(ratio, ratio < 1/27)``."""
    r = routh_ratio(masses)
    return r, bool(r < 1 / 27)


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    max_real: float
    zero_multiplicity: int
    verdict: str
    norm: float = float("nan")
    error: str = ""


def inclined_verdict(masses, gamma, tol=DEFAULT):
    """Verdict on ``E3`` for the Lagrange triangle inclined by ``gamma`` in R^4."""
    from . import linearization, nbody, reduction

    cc = nbody.incline(nbody.build_lagrange(masses, 4, tol), gamma, tol)
    frame = linearization.make_frame(cc, "isoclinic4", tol)
    split = reduction.build_split(linearization.linearize(cc, frame, tol), tol)
    return analyze(split.L_red, "r4", tol)


def _row(masses, gamma, tol):
    try:
        v = inclined_verdict(masses, gamma, tol)
    except EqlabError as exc:
        return SweepRow(gamma, float("nan"), -1, "error", error=str(exc))
    return SweepRow(gamma, v.max_real, v.zero_multiplicity, v.verdict, v.norm)


def thread_count():
    """Worker cap from ``EQLAB_THREADS`` (default 1)."""
    raw = os.environ.get("EQLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sweep_inclination(masses, grid, tol=DEFAULT, threads=None):
    """Verdict rows for ``grid`` equally spaced angles in ``[0, pi/2]``.

    A failing grid point yields a row with verdict ``"error"``; the sweep
    continues.  Rows are returned in angle order whatever the thread count.
    """
    if int(grid) != grid or grid < 2:
        raise PreconditionError("grid must be an integer >= 2")
    gammas = np.linspace(0.0, np.pi / 2, int(grid))
    threads = thread_count() if threads is None else max(1, int(threads))
    if threads == 1:
        return [_row(masses, g, tol) for g in gammas]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda g: _row(masses, g, tol), gammas))


def find_threshold(objective, bracket, xtol=None, tol=DEFAULT):
    """Bisection on a boolean ``objective`` that flips once inside ``bracket``.

    Returns the midpoint of the final interval, whose width is below ``xtol``.
    """
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise PreconditionError("bracket must satisfy lo < hi")
    xtol = tol.threshold_xtol if xtol is None else xtol
    flo, fhi = bool(objective(lo)), bool(objective(hi))
    if flo == fhi:
        raise PreconditionError(f"objective is {flo} at both ends of {bracket}")
    x = optimize.bisect(lambda t: 1.0 if bool(objective(t)) == fhi else -1.0, lo, hi,
                        xtol=xtol / 2, maxiter=200)
    return float(x)
