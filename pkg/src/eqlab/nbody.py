"""Newtonian n-body potential, its derivatives, and central configurations.

Positions are stored body-major: ``q = (q_1, ..., q_n)`` with each ``q_i`` a
``d``-vector, so ``q.reshape(n, d)`` recovers the per-body rows.  The
gravitational constant is 1 and ``U(q) = sum_{i<j} m_i m_j / r_ij``.
"""
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .config import DEFAULT
from .errors import CollisionError, NumericalError, PreconditionError


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MassSystem:
    masses: np.ndarray
    dim: int

    def __post_init__(self):
        m = _frozen(self.masses).ravel()
        if m.size < 2:
            raise PreconditionError("need at least two bodies")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise PreconditionError(f"masses must be positive, got {m}")
        if self.dim not in (2, 4):
            raise PreconditionError(f"dimension must be 2 or 4, got {self.dim}")
        object.__setattr__(self, "masses", m)

    @property
    def n(self):
        return self.masses.size

    @property
    def total_mass(self):
        return float(self.masses.sum())

    @property
    def mass_matrix(self):
        """Diagonal ``M = diag(m_1 I_d, ..., m_n I_d)``."""
        return np.diag(np.repeat(self.masses, self.dim))

    @property
    def mass_diag(self):
        return np.repeat(self.masses, self.dim)


@dataclass(frozen=True)
class Configuration:
    system: MassSystem
    q: np.ndarray

    def __post_init__(self):
        q = _frozen(self.q).ravel()
        if q.size != self.system.n * self.system.dim:
            raise PreconditionError(
                f"expected {self.system.n * self.system.dim} coordinates, got {q.size}")
        object.__setattr__(self, "q", q)

    @property
    def positions(self):
        return self.q.reshape(self.system.n, self.system.dim)

    @property
    def masses(self):
        return self.system.masses

    @property
    def dim(self):
        return self.system.dim

    def center_of_mass(self):
        m = self.masses
        return m @ self.positions / m.sum()

    def m_norm2(self):
        """``|q|_M^2 = q^T M q``."""
        return float(self.system.mass_diag @ self.q**2)

    def distances(self):
        X = self.positions
        return np.linalg.norm(X[:, None, :] - X[None, :, :], axis=-1)


@dataclass(frozen=True)
class CentralConfiguration:
    config: Configuration
    lam: float
    residual: float

    @property
    def q(self):
        return self.config.q

    @property
    def system(self):
        return self.config.system

    @property
    def masses(self):
        return self.config.masses

    @property
    def dim(self):
        return self.config.dim


def _cfg(c):
    return c.config if isinstance(c, CentralConfiguration) else c


def _pairs(c, tol=DEFAULT):
    X = c.positions
    diff = X[:, None, :] - X[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    diam = r.max()
    iu = np.triu_indices(c.system.n, 1)
    if diam == 0 or np.any(r[iu] < tol.collision_rel * diam):
        raise CollisionError("configuration has a collision")
    return diff, r


def potential(c, tol=DEFAULT):
    """Newtonian potential ``U(q)``, strictly positive."""
    c = _cfg(c)
    _, r = _pairs(c, tol)
    m = c.masses
    iu = np.triu_indices(m.size, 1)
    return float(np.sum(m[iu[0]] * m[iu[1]] / r[iu]))


def gradient(c, tol=DEFAULT):
    """``grad U(q)`` as a flat vector of length ``d n``."""
    c = _cfg(c)
    diff, r = _pairs(c, tol)
    m = c.masses
    np.fill_diagonal(r, np.inf)
    # dU/dq_i = -sum_j m_i m_j (q_i - q_j) / r_ij^3
    w = np.outer(m, m) / r**3
    g = -np.einsum("ij,ijk->ik", w, diff)
    return g.ravel()


def hessian(c, tol=DEFAULT):
    """``D^2 U(q)`` assembled from the pairwise blocks.

    Off-diagonal blocks are ``m_i m_j / r^3 (I - 3 u u^T)``; diagonal blocks make
    every block row sum to zero.
    """
    c = _cfg(c)
    diff, r = _pairs(c, tol)
    m = c.masses
    n, d = c.system.n, c.dim
    H = np.zeros((n * d, n * d))
    eye = np.eye(d)
    for i in range(n):
        for j in range(i + 1, n):
            u = diff[i, j] / r[i, j]
            D = m[i] * m[j] / r[i, j] ** 3 * (eye - 3 * np.outer(u, u))
            H[i * d:(i + 1) * d, j * d:(j + 1) * d] = D
            H[j * d:(j + 1) * d, i * d:(i + 1) * d] = D
    for i in range(n):
        blk = slice(i * d, (i + 1) * d)
        H[blk, blk] = -sum(H[blk, j * d:(j + 1) * d] for j in range(n) if j != i)
    return H


def cc_residual(c, tol=DEFAULT, norm_tol=1e-10):
    """``|M^{-1} grad U(q) + U(q) q|_M`` for a centered, normalized ``c``."""
    if isinstance(c, CentralConfiguration):
        c = c.config
    if abs(c.m_norm2() - 1.0) > norm_tol:
        raise PreconditionError(f"configuration not normalized: |q|_M^2 = {c.m_norm2()}")
    mdiag = c.system.mass_diag
    r = gradient(c, tol) / mdiag + potential(c, tol) * c.q
    return float(np.sqrt(mdiag @ r**2))


def normalize(c, tol=DEFAULT):
    """Translate to zero center of mass and scale to ``|q|_M = 1``."""
    _pairs(c, tol)
    X = c.positions - c.center_of_mass()
    shifted = Configuration(c.system, X.ravel())
    return Configuration(c.system, X.ravel() / np.sqrt(shifted.m_norm2()))


def as_central(c, tol=DEFAULT):
    """Normalize ``c`` and certify it as a central configuration.

    Raises
    ------
    NumericalError
        If the residual after normalization exceeds ``tol.cc_residual``
        times ``max(1, U(q))``; rounding in the residual grows with the mass scale.
    """
    c = normalize(c, tol)
    res = cc_residual(c, tol)
    if res > tol.cc_residual * max(1.0, potential(c, tol)):
        raise NumericalError("not a central configuration", residual=res)
    return CentralConfiguration(c, potential(c, tol), res)


def _embed(planar_xy, d):
    X = np.zeros((planar_xy.shape[0], d))
    X[:, :2] = planar_xy
    return X


def build_lagrange(masses, d=2, tol=DEFAULT):
    """Equilateral triangle with vertices ``(1,0), (-1/2, -sqrt3/2), (-1/2, sqrt3/2)``."""
    s3 = np.sqrt(3.0)
    xy = np.array([[1.0, 0.0], [-0.5, -s3 / 2], [-0.5, s3 / 2]])
    system = MassSystem(np.asarray(masses, float), d)
    if system.n != 3:
        raise PreconditionError("Lagrange configuration needs three masses")
    return as_central(Configuration(system, _embed(xy, d).ravel()), tol)


def _rhombus_config(m, s, mass=1.0):
    # pair of mass m on the x-axis at (+-s, 0), unit masses at (0, +-1)
    system = MassSystem(np.array([m, 1.0, m, 1.0]) * mass, 2)
    xy = np.array([[s, 0.0], [0.0, 1.0], [-s, 0.0], [0.0, -1.0]])
    return Configuration(system, xy.ravel())


def _rhombus_mismatch(m, s):
    # Difference of the two per-body "lambda" values; zero exactly at a CC.
    c = _rhombus_config(m, s)
    acc = (gradient(c) / c.system.mass_diag).reshape(4, 2)
    return -acc[0, 0] / s + acc[1, 1] / 1.0


def build_rhombus(m, tol=DEFAULT, bracket=(0.2, 5.0)):
    """Rhombus CC with masses ``(m, 1, m, 1)``; the ``m`` pair sits on the x-axis.

    The diagonal ratio ``s = a/b`` is found by bisection.
    """
    if m <= 0:
        raise PreconditionError("mass must be positive")
    lo, hi = bracket
    flo, fhi = _rhombus_mismatch(m, lo), _rhombus_mismatch(m, hi)
    if np.sign(flo) == np.sign(fhi):
        raise NumericalError("rhombus shape bracket has no sign change",
                             bracket=bracket, residual=(flo, fhi))
    s = optimize.bisect(lambda s: _rhombus_mismatch(m, s), lo, hi,
                        xtol=tol.rhombus_xtol, maxiter=200)
    try:
        cc = as_central(_rhombus_config(m, s), tol)
    except NumericalError as exc:
        raise NumericalError("rhombus solve did not converge", bracket=bracket,
                             shape_ratio=s, **exc.diagnostics) from exc
    return cc, s


def build_square(mass=1.0, tol=DEFAULT):
    """Four equal masses at the vertices of a square."""
    if mass <= 0:
        raise PreconditionError("mass must be positive")
    return as_central(_rhombus_config(1.0, 1.0, mass), tol)


def rotation_xz(gamma):
    """4x4 rotation by ``gamma`` in the xz-plane."""
    c, s = np.cos(gamma), np.sin(gamma)
    return np.array([[c, 0, s, 0], [0, 1, 0, 0], [-s, 0, c, 0], [0, 0, 0, 1.0]])


def incline(cc, gamma, tol=DEFAULT):
    """Rotate every body of a 4-dimensional CC by ``rotation_xz(gamma)``."""
    if cc.dim != 4:
        raise PreconditionError("incline needs a configuration in R^4")
    X = cc.config.positions @ rotation_xz(gamma).T
    c = Configuration(cc.system, X.ravel())
    return CentralConfiguration(c, potential(c, tol), cc_residual(c, tol))


def tangent_basis(cc):
    """M-orthonormal basis of ``T_q S``: zero center of mass and M-orthogonal to q."""
    from ._linalg import m_orthonormalize  # local import keeps module graph flat

    n, d = cc.system.n, cc.dim
    mdiag = cc.system.mass_diag
    trans = [np.tile(e, n) for e in np.eye(d)]
    fixed = m_orthonormalize(trans + [cc.q], mdiag)
    return m_orthonormalize(list(np.eye(n * d)), mdiag, against=fixed)


def restricted_hessian(cc, tol=DEFAULT, zero_tol=1e-9):
    """``H(q) = M^{-1} D^2U(q) + U(q) I`` and its inertia on ``T_q S``.

    Returns
    -------
    H : ndarray
    inertia : dict
        ``index`` (negative), ``nullity`` and ``positive`` counts of the
        quadratic form restricted to the tangent space of the sphere.
    """
    c = cc.config if isinstance(cc, CentralConfiguration) else cc
    U = potential(c, tol)
    D2 = hessian(c, tol)
    mdiag = c.system.mass_diag
    H = D2 / mdiag[:, None] + U * np.eye(mdiag.size)
    T = tangent_basis(cc if isinstance(cc, CentralConfiguration)
                      else CentralConfiguration(c, U, np.nan))
    form = T.T @ (D2 + U * np.diag(mdiag)) @ T
    w = np.linalg.eigvalsh((form + form.T) / 2)
    scale = max(1.0, np.abs(w).max())
    inertia = {
        "index": int(np.sum(w < -zero_tol * scale)),
        "nullity": int(np.sum(np.abs(w) <= zero_tol * scale)),
        "positive": int(np.sum(w > zero_tol * scale)),
    }
    return H, inertia
