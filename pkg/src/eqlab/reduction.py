"""Symplectic splitting of the linearized system and planar shape reduction.

The configuration space splits M-orthogonally into translations ``W1``,
symmetry directions ``W2`` and shape directions ``W3``; each ``Ei = Wi + M Wi``
is then a symplectic subspace invariant under the linear flow.  ``W1 + W2`` is
the largest ``K``-invariant subspace inside the span of translations,
infinitesimal rotations ``S q`` (``S`` in so(d)) and the dilation ``q``.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import nbody
from ._linalg import largest_invariant_subspace, m_orthonormalize, orth
from .config import DEFAULT
from .errors import NumericalError, PreconditionError
from .linearization import J2, linearize, make_frame


@dataclass(frozen=True)
class SymplecticSplit:
    """Adapted basis and the flow restricted to ``E3``.

    Attributes
    ----------
    A : ndarray
        ``(dn, dn)`` with ``A^T M A = M`` and ``A K = K A``.
    V : ndarray
        ``A M^{-1/2}``; its columns are M-orthonormal.
    partition : dict
        Configuration-slot indices of ``E1``, ``E2``, ``E3``.
    L_red : ndarray
        Restriction of the transformed linear system to ``E3``.
    L_transformed : ndarray
        The full system in adapted coordinates.
    decoupling : float
        Largest entry coupling ``E3`` to ``E1 + E2``.
    """
    A: np.ndarray
    V: np.ndarray
    partition: dict
    L_red: np.ndarray
    L_transformed: np.ndarray
    decoupling: float

    def dims(self):
        """Phase-space dimensions of ``E1``, ``E2``, ``E3``."""
        return {name: 2 * len(idx) for name, idx in self.partition.items()}


def _symmetry_vectors(cc):
    n, d = cc.system.n, cc.dim
    trans = [np.tile(e, n) for e in np.eye(d)]
    rots = []
    for a, b in combinations(range(d), 2):
        S = np.zeros((d, d))
        S[a, b], S[b, a] = 1.0, -1.0
        rots.append(np.kron(np.eye(n), S) @ cc.q)
    return trans, rots + [np.array(cc.q)]


def _slots(block):
    """Pair slots ``(j, i)`` with ``block e_j = k e_i`` and the kernel slots."""
    pairs, kernel = [], []
    for j in range(block.shape[1]):
        col = block[:, j]
        if not np.any(col):
            kernel.append(j)
        elif col.max() > 0:
            pairs.append((j, int(np.argmax(col))))
    return pairs, kernel


def _paired_basis(W, K, k, mdiag, drop):
    """M-orthonormal basis of the K-invariant span of ``W`` as pairs and kernel vectors."""
    P_range = -(K @ K) / k**2
    R = P_range @ W
    Z = W - R
    # both parts are measured against the full column so rounding-level pieces drop out
    ref = np.sqrt(np.einsum("ij,i,ij->j", W, mdiag, W))
    pairs = []
    accepted = np.zeros((W.shape[0], 0))
    for v, r in zip(R.T, ref):
        B = m_orthonormalize([v], mdiag, against=accepted, drop=drop, ref_norms=[r])
        if B.shape[1] == 0:
            continue
        u = B[:, 0]
        ku = K @ u / k
        pairs.append((u, ku))
        accepted = np.column_stack([accepted, u, ku])
    kern = m_orthonormalize(list(Z.T), mdiag, drop=drop, ref_norms=ref)
    return pairs, list(kern.T)


def build_split(lin, tol=DEFAULT, rank_rtol=1e-9):
    """Split ``lin`` into ``E1 + E2 + E3`` and restrict the flow to ``E3``.

    Raises
    ------
    NumericalError
        If the transformed system couples ``E3`` to the rest above
        ``tol.decoupling * max(1, |L|)`` or the basis is incomplete.
    """
    cc, frame = lin.cc, lin.frame
    n, d = cc.system.n, cc.dim
    if d not in (2, 4):
        raise PreconditionError("split needs d in {2, 4}")
    mdiag = cc.system.mass_diag
    K, k = frame.K, frame.k
    N = n * d

    trans, sym = _symmetry_vectors(cc)
    W1 = orth(np.column_stack(trans), rank_rtol)
    W12 = largest_invariant_subspace(orth(np.column_stack(trans + sym), rank_rtol), K, rank_rtol)

    e1 = m_orthonormalize(list(W1.T), mdiag, drop=tol.gs_drop)
    e2 = m_orthonormalize(list(W12.T), mdiag, against=e1, drop=tol.gs_drop)
    e3 = m_orthonormalize(list(np.eye(N)), mdiag, against=np.column_stack([e1, e2]),
                          drop=tol.gs_drop)

    pair_slots, ker_slots = _slots(frame.block)
    pair_slots = [(b * d + j, b * d + i) for b in range(n) for j, i in pair_slots]
    ker_slots = [b * d + j for b in range(n) for j in ker_slots]

    V = np.zeros((N, N))
    partition = {}
    pi = ki = 0
    for name, W in (("E1", e1), ("E2", e2), ("E3", e3)):
        pairs, kern = _paired_basis(W, K, k, mdiag, tol.gs_drop)
        idx = []
        for u, ku in pairs:
            if pi >= len(pair_slots):
                raise NumericalError("basis has too many rotation pairs", subspace=name)
            j, i = pair_slots[pi]
            V[:, j], V[:, i] = u, ku
            idx += [j, i]
            pi += 1
        for z in kern:
            if ki >= len(ker_slots):
                raise NumericalError("basis has too many kernel vectors", subspace=name)
            V[:, ker_slots[ki]] = z
            idx.append(ker_slots[ki])
            ki += 1
        partition[name] = np.array(sorted(idx), dtype=int)
    if pi != len(pair_slots) or ki != len(ker_slots):
        raise NumericalError("adapted basis is incomplete",
                             pairs=pi, kernel=ki, expected=(len(pair_slots), len(ker_slots)))

    A = V * np.sqrt(mdiag)[None, :]
    Ainv = np.linalg.solve(A, np.eye(N))
    S = np.block([[A, np.zeros((N, N))], [np.zeros((N, N)), Ainv.T]])
    Sinv = np.block([[Ainv, np.zeros((N, N))], [np.zeros((N, N)), A.T]])
    Lt = Sinv @ lin.L @ S

    i3 = partition["E3"]
    I3 = np.concatenate([i3, N + i3])
    rest = np.setdiff1d(np.arange(2 * N), I3)
    decoupling = 0.0
    if rest.size and I3.size:
        decoupling = float(max(np.abs(Lt[np.ix_(I3, rest)]).max(),
                               np.abs(Lt[np.ix_(rest, I3)]).max()))
    if decoupling >= tol.decoupling * max(1.0, np.linalg.norm(lin.L, 2)):
        raise NumericalError("E3 does not decouple", residual=decoupling,
                             dims={key: 2 * len(v) for key, v in partition.items()})
    L_red = Lt[np.ix_(I3, I3)]
    for arr in (A, V, L_red, Lt):
        arr.setflags(write=False)
    return SymplecticSplit(A, V, partition, L_red, Lt, decoupling)


@dataclass(frozen=True)
class ReducedPlanarSystem:
    """Shape coordinates of a planar relative equilibrium.

    Columns of ``Bshape`` come in pairs ``(v, J v)``; ``Hred`` is the Hessian
    of the reduced effective potential.
    """
    Bshape: np.ndarray
    k: float
    Hred: np.ndarray
    cc: nbody.CentralConfiguration

    @property
    def J_red(self):
        return np.kron(np.eye(self.Hred.shape[0] // 2), J2)

    def linear_system(self):
        """``z' = L z`` for ``z = (x, p)`` in shape coordinates."""
        m = self.Hred.shape[0]
        kJ = self.k * self.J_red
        return np.block([[kJ, np.eye(m)], [-self.Hred - self.k**2 * np.eye(m), kJ]])


def reduced_hessian(cc, B, k, tol=DEFAULT):
    """``-B^T D^2U(q) B - k^2 I``."""
    D2 = nbody.hessian(cc.config, tol)
    H = -B.T @ D2 @ B - k**2 * np.eye(B.shape[1])
    return (H + H.T) / 2


def reduce_planar(cc, frame=None, tol=DEFAULT):
    """Reduce a planar relative equilibrium to its shape dynamics.

    Raises
    ------
    NumericalError
        If the basis construction breaks down.
    """
    if cc.dim != 2:
        raise PreconditionError("planar reduction needs d = 2")
    frame = frame or make_frame(cc, "planar", tol)
    split = build_split(linearize(cc, frame, tol), tol)
    B = np.array(split.V[:, split.partition["E3"]])
    if B.shape[1] != 2 * cc.system.n - 4:
        raise NumericalError("unexpected shape-space dimension", dim=B.shape[1])
    B.setflags(write=False)
    H = reduced_hessian(cc, B, frame.k, tol)
    H.setflags(write=False)
    return ReducedPlanarSystem(B, frame.k, H, cc)


def lagrange_shape_vector(masses):
    """Closed-form M-unit shape vector for the Lagrange triangle.

    Valid for masses summing to one, with vertices ``(1, 0)``,
    ``(-1/2, -sqrt3/2)``, ``(-1/2, sqrt3/2)``.  Its partner is ``J v``.
    """
    m1, m2, m3 = masses
    mu = m1 * m2 + m1 * m3 + m2 * m3
    v = np.array([
        0.0,
        np.sqrt(m2 * m3 / m1),
        np.sqrt(3 * m1 * m3 / (4 * m2)),
        -np.sqrt(m1 * m3 / (4 * m2)),
        -np.sqrt(3 * m1 * m2 / (4 * m3)),
        -np.sqrt(m1 * m2 / (4 * m3)),
    ])
    return v / np.sqrt(mu)


@dataclass(frozen=True)
class SymplecticPlane:
    u: np.ndarray
    Ju: np.ndarray
    alpha: float
    beta: float


@dataclass(frozen=True)
class PlaneSplit:
    planes: tuple
    residual: float


@dataclass(frozen=True)
class NoSplit:
    residual: float


def split_into_symplectic_planes(red, rel_tol=None, tol=DEFAULT):
    """Split ``Hred`` into 2x2 blocks on planes ``span(u, J u)``.

    Eigenvectors of ``Hred`` are grouped into eigenvalue clusters with bases
    ``B_c``.  The Hessian splits exactly when every cross block
    ``B_c'^T J B_c`` is a partial isometry, i.e. ``J`` carries each eigenspace
    onto a sum of eigenspaces without mixing.

    Returns
    -------
    PlaneSplit or NoSplit
        Never raises for a non-splitting matrix; ``NoSplit.residual`` is the
        worst deviation of a cross-block singular value from 0 or 1.
    """
    H = np.asarray(red.Hred if hasattr(red, "Hred") else red, float)
    m = H.shape[0]
    if m % 2 or m == 0:
        raise PreconditionError("reduced Hessian must have even positive size")
    Jr = np.kron(np.eye(m // 2), J2)
    rel_tol = tol.pairing_rel if rel_tol is None else rel_tol
    w, U = np.linalg.eigh((H + H.T) / 2)
    scale = max(np.abs(w).max(), np.finfo(float).tiny)
    groups = [[0]]
    for i in range(1, m):
        if w[i] - w[groups[-1][-1]] <= rel_tol * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    bases = [U[:, g] for g in groups]
    vals = [float(np.mean(w[g])) for g in groups]

    worst = 0.0
    cross = {}
    for a, Ba in enumerate(bases):
        for b, Bb in enumerate(bases):
            _, s, vt = np.linalg.svd(Bb.T @ Jr @ Ba)
            s2 = s**2
            worst = max(worst, float(np.max(np.minimum(s2, 1 - s2), initial=0.0)))
            cross[a, b] = vt[: int(np.sum(s2 > 0.5))]
    if worst > rel_tol:
        return NoSplit(worst)

    planes = []
    for a, Ba in enumerate(bases):
        for b in range(a, len(bases)):
            X = Ba @ cross[a, b].T
            if b > a:
                for u in X.T:
                    planes.append(SymplecticPlane(u, Jr @ u, -vals[a] / 2, -vals[b] / 2))
                continue
            # J-invariant piece of one eigenspace: peel off (u, Ju) pairs
            used = np.zeros((m, 0))
            for u in X.T:
                u = u - used @ (used.T @ u)
                nu = np.linalg.norm(u)
                if nu < 0.5:
                    continue
                u = u / nu
                used = np.column_stack([used, u, Jr @ u])
                planes.append(SymplecticPlane(u, Jr @ u, -vals[a] / 2, -vals[a] / 2))
    if 2 * len(planes) != m:
        return NoSplit(max(worst, rel_tol))
    return PlaneSplit(tuple(planes), worst)
