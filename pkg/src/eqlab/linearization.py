"""Rotating frames and the linearized flow at a relative equilibrium.

Phase-space vectors are stacked as ``z = (q, p)``.  The symplectic matrix is
``J = [[0, I], [-I, 0]]``, i.e. ``J(q, p) = (p, -q)``, and a quadratic
Hamiltonian ``H = z^T B z / 2`` generates ``z' = J B z``.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import nbody
from .config import DEFAULT
from .errors import PreconditionError

FRAME_KINDS = ("planar", "simple4", "isoclinic4")

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def symplectic_matrix(dim):
    """Standard ``J`` of size ``2 dim``."""
    I = np.eye(dim)
    Z = np.zeros((dim, dim))
    return np.block([[Z, I], [-I, Z]])


def frame_block(kind, k):
    """Per-body generator of the rigid rotation."""
    if kind == "planar":
        return k * J2
    blk = np.zeros((4, 4))
    blk[:2, :2] = k * J2
    if kind == "isoclinic4":
        blk[2:, 2:] = -k * J2
    elif kind != "simple4":
        raise PreconditionError(f"unknown frame kind {kind!r}")
    return blk


@dataclass(frozen=True)
class RotatingFrame:
    kind: str
    k: float
    block: np.ndarray
    K: np.ndarray


@dataclass(frozen=True)
class LinearizedRE:
    frame: RotatingFrame
    cc: nbody.CentralConfiguration
    L: np.ndarray
    Bsym: np.ndarray

    @property
    def K(self):
        return self.frame.K

    @property
    def mass_diag(self):
        return self.cc.system.mass_diag

    @property
    def size(self):
        return self.L.shape[0]


def equilibrium_residual(cc, frame):
    """``|-K^2 q - lambda q|``; zero when the frame rotates ``cc`` rigidly."""
    K = frame.K
    return float(np.linalg.norm(-K @ (K @ cc.q) - cc.lam * cc.q))


def make_frame(cc, kind, tol=DEFAULT, eq_tol=1e-10):
    """Rotating frame with angular speed ``k = sqrt(lambda)``.

    Parameters
    ----------
    cc : CentralConfiguration
    kind : {"planar", "simple4", "isoclinic4"}
        ``planar`` needs ``d = 2``; the two 4-dimensional kinds need ``d = 4``,
        and ``simple4`` also needs every body in the xy-plane.
    """
    if kind not in FRAME_KINDS:
        raise PreconditionError(f"unknown frame kind {kind!r}")
    d = cc.dim
    if kind == "planar" and d != 2:
        raise PreconditionError("planar frame requires d = 2")
    if kind != "planar" and d != 4:
        raise PreconditionError(f"{kind} frame requires d = 4")
    if kind == "simple4":
        off = np.abs(cc.config.positions[:, 2:]).max()
        if off > eq_tol:
            raise PreconditionError(
                f"simple rotation needs the configuration in the xy-plane (offset {off:.3g})")
    k = float(np.sqrt(cc.lam))
    block = frame_block(kind, k)
    K = np.kron(np.eye(cc.system.n), block)
    block.setflags(write=False)
    K.setflags(write=False)
    frame = RotatingFrame(kind, k, block, K)
    res = equilibrium_residual(cc, frame)
    if res > eq_tol:
        raise PreconditionError(f"frame does not rotate the configuration rigidly (residual {res:.3g})")
    return frame


def linearize(cc, frame, tol=DEFAULT, eq_tol=1e-10):
    """Linear Hamiltonian system at the relative equilibrium.

    ``L = [[K, M^-1], [D^2U, K]]`` and ``Bsym = [[-D^2U, K^T], [K, M^-1]]``, so
    that ``L = J Bsym`` and ``Bsym = -J L``.
    """
    if frame.K.shape[0] != cc.q.size:
        raise PreconditionError("frame and configuration sizes differ")
    res = equilibrium_residual(cc, frame)
    if res > eq_tol:
        raise PreconditionError(f"frame incompatible with configuration (residual {res:.3g})")
    K = frame.K
    D2 = nbody.hessian(cc.config, tol)
    Minv = np.diag(1.0 / cc.system.mass_diag)
    L = np.block([[K, Minv], [D2, K]])
    Bsym = np.block([[-D2, K.T], [K, Minv]])
    L.setflags(write=False)
    Bsym.setflags(write=False)
    return LinearizedRE(frame, cc, L, Bsym)


@dataclass(frozen=True)
class RotatingHamiltonianData:
    """Magnetic one-form ``theta_Q = -M K Q`` and effective potential ``V``."""
    magnetic_matrix: np.ndarray
    theta: Callable
    V: Callable
    grad_V: Callable


def rotating_hamiltonian_data(cc, frame, tol=DEFAULT):
    """Magnetic potential and effective potential of the rotating frame.

    ``V(Q) = -U(Q) - |K Q|_M^2 / 2``; with this sign ``grad V`` vanishes at the
    central configuration.
    """
    system = cc.system
    mdiag = system.mass_diag
    K = frame.K
    MK = mdiag[:, None] * K

    def theta(Q):
        return -MK @ np.asarray(Q, float)

    def V(Q):
        Q = np.asarray(Q, float)
        KQ = K @ Q
        return -nbody.potential(nbody.Configuration(system, Q), tol) - 0.5 * KQ @ (mdiag * KQ)

    def grad_V(Q):
        Q = np.asarray(Q, float)
        return -nbody.gradient(nbody.Configuration(system, Q), tol) + mdiag * (K @ (K @ Q))

    return RotatingHamiltonianData(-MK, theta, V, grad_V)
