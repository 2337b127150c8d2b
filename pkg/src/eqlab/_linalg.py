"""Small linear-algebra helpers in the mass-weighted inner product."""
import numpy as np


def m_inner(u, v, mdiag):
    return float(u @ (mdiag * v))


def m_orthonormalize(vectors, mdiag, against=None, drop=1e-10, ref_norms=None):
    """Modified Gram-Schmidt in the inner product ``<u, v> = u^T M v``.

    Each candidate is orthogonalized twice against the accepted set (and the
    fixed columns of ``against``).  Candidates whose residual M-norm falls
    below ``drop`` times their original M-norm (or ``ref_norms[i]`` when
    given, e.g. for vectors that are themselves differences) are discarded.

    Returns
    -------
    ndarray
        Matrix whose columns are the accepted M-orthonormal vectors.
    """
    fixed = [] if against is None else list(np.asarray(against).T)
    basis = []
    for i, v in enumerate(vectors):
        w = np.array(v, dtype=float)
        norm0 = np.sqrt(m_inner(w, w, mdiag)) if ref_norms is None else ref_norms[i]
        if norm0 == 0:
            continue
        for _ in range(2):
            for b in fixed + basis:
                w -= m_inner(b, w, mdiag) * b
        nw = np.sqrt(m_inner(w, w, mdiag))
        if nw > drop * norm0:
            basis.append(w / nw)
    if not basis:
        return np.zeros((len(mdiag), 0))
    return np.column_stack(basis)


def orth(X, rtol=1e-9):
    """Euclidean orthonormal basis for the column span of ``X``."""
    if X.shape[1] == 0:
        return X
    u, s, _ = np.linalg.svd(X, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return X[:, :0]
    return u[:, s > rtol * s[0]]


def null_space(A, rtol=1e-9, scale=None):
    """Orthonormal basis of the numerical null space of ``A``."""
    _, s, vt = np.linalg.svd(A)
    ref = scale if scale is not None else (s[0] if s.size else 0.0)
    rank = int(np.sum(s > rtol * ref)) if ref > 0 else 0
    return vt[rank:].T.conj()


def largest_invariant_subspace(W, K, rtol=1e-9, max_iter=100):
    """Largest ``K``-invariant subspace contained in ``span(W)``.

    Repeatedly keeps the part of the current subspace whose image under
    ``K`` stays inside it.  ``W`` must have orthonormal columns.
    """
    scale = np.linalg.norm(K, 2) or 1.0
    for _ in range(max_iter):
        if W.shape[1] == 0:
            return W
        KW = K @ W
        out = KW - W @ (W.T @ KW)
        C = null_space(out, rtol, scale=scale)
        if C.shape[1] == W.shape[1]:
            return W
        W = orth(W @ C, rtol)
    raise RuntimeError("invariant-subspace iteration did not stabilize")
