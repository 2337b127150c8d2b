import numpy as np
import pytest

from eqlab import linearization as li, nbody, spectral
from eqlab.errors import PreconditionError


def planar_lagrange(m=(1, 1, 1)):
    cc = nbody.build_lagrange(list(m), 2)
    return cc, li.make_frame(cc, "planar")


def inclined(m=(1, 1, 1), g=np.pi / 4):
    cc = nbody.incline(nbody.build_lagrange(list(m), 4), g)
    return cc, li.make_frame(cc, "isoclinic4")


def pairing_error(ev, iso=1e-5):
    """Worst distance from an isolated eigenvalue to the images of the spectrum
    under z -> -z and z -> conj(z), plus the same for clustered eigenvalues.

    Defective clusters (zero, and the rotating translations) spread by about
    sqrt(eps) * |L|, so they are reported separately.
    """
    ev = np.asarray(ev)
    gaps = np.array([np.sort(np.abs(ev - z))[1] for z in ev])
    err = {True: 0.0, False: 0.0}
    for img in (-ev, ev.conj()):
        for z, g in zip(img, gaps):
            key = bool(g > iso)
            err[key] = max(err[key], np.abs(ev - z).min())
    return err[True], err[False]


class TestFrames:
    def test_planar_speed(self):
        for m in ([1, 1, 1], [2, 3, 5]):
            cc, fr = planar_lagrange(m)
            assert fr.k == pytest.approx(np.sqrt(nbody.potential(cc)), rel=1e-14)

    def test_isoclinic_inclined(self):
        cc, fr = inclined(g=np.pi / 4)
        assert li.equilibrium_residual(cc, fr) < 1e-10
        np.testing.assert_allclose(-fr.K @ fr.K, fr.k**2 * np.eye(12), atol=1e-15)

    def test_simple_at_zero(self):
        cc = nbody.build_lagrange([1, 1, 1], 4)
        fr = li.make_frame(cc, "simple4")
        assert li.equilibrium_residual(cc, fr) < 1e-10

    def test_simple_requires_plane(self):
        cc = nbody.incline(nbody.build_lagrange([1, 1, 1], 4), 0.3)
        with pytest.raises(PreconditionError):
            li.make_frame(cc, "simple4")

    def test_planar_requires_d2(self):
        with pytest.raises(PreconditionError):
            li.make_frame(nbody.build_lagrange([1, 1, 1], 4), "planar")
        with pytest.raises(PreconditionError):
            li.make_frame(nbody.build_lagrange([1, 1, 1], 2), "isoclinic4")

    def test_block_structure(self):
        cc, fr = inclined()
        n, d = 3, 4
        for b in range(n):
            blk = fr.K[b * d:(b + 1) * d, b * d:(b + 1) * d]
            np.testing.assert_array_equal(blk, fr.block)
            np.testing.assert_array_equal(blk, -blk.T)
        M = cc.system.mass_matrix
        np.testing.assert_array_equal(M @ fr.K, fr.K @ M)


class TestLinearize:
    def test_hamiltonian_structure(self):
        for cc, fr in (planar_lagrange(), inclined()):
            lin = li.linearize(cc, fr)
            N = cc.q.size
            J = li.symplectic_matrix(N)
            assert np.abs(lin.Bsym - lin.Bsym.T).max() < 1e-14
            assert np.abs(-J @ lin.L - lin.Bsym).max() < 1e-14
            assert np.abs(J @ lin.Bsym - lin.L).max() < 1e-14
            # Hamiltonian: L^T J + J L = 0, i.e. J L is symmetric
            assert np.abs(lin.L.T @ J + J @ lin.L).max() < 1e-13

    def test_block_form(self):
        cc, fr = planar_lagrange([2, 3, 5])
        lin = li.linearize(cc, fr)
        N = 6
        np.testing.assert_array_equal(lin.L[:N, :N], fr.K)
        np.testing.assert_array_equal(lin.L[N:, N:], fr.K)
        np.testing.assert_array_equal(lin.L[:N, N:], np.diag(1 / cc.system.mass_diag))
        np.testing.assert_array_equal(lin.L[N:, :N], nbody.hessian(cc))

    def test_planar_trace_zero(self):
        lin = li.linearize(*planar_lagrange())
        assert lin.L.shape == (12, 12)
        assert abs(np.trace(lin.L)) < 1e-14

    def test_inclined_spectrum_symmetry(self):
        lin = li.linearize(*inclined([1, 2, 3], 0.6))
        assert lin.L.shape == (24, 24)
        ev = np.linalg.eigvals(lin.L)
        isolated, clustered = pairing_error(ev)
        assert isolated < 1e-9
        assert clustered < np.sqrt(np.finfo(float).eps) * np.linalg.norm(lin.L, 2)

    def test_planar_full_spectrum_zeros(self):
        # In the rotating frame translations rotate too (eigenvalues +-ik), so
        # only the rotation/dilation pair sits at zero, as a 2x2 Jordan block.
        cc, fr = planar_lagrange()
        lin = li.linearize(cc, fr)
        ev = spectral.spectrum(lin.L)
        v = spectral.classify(ev, lin.L)
        assert v.zero_multiplicity == 2
        trans = [z for z in ev if abs(abs(z) - fr.k) < 1e-6 and abs(z.real) < 1e-6]
        assert len(trans) >= 4

    def test_incompatible_frame(self):
        cc = nbody.build_lagrange([1, 1, 1], 2)
        other = li.make_frame(nbody.build_lagrange([5, 1, 1], 2), "planar")
        with pytest.raises(PreconditionError):
            li.linearize(cc, other)


class TestRotatingHamiltonian:
    def test_planar_magnetic_form(self):
        cc, fr = planar_lagrange([2, 3, 5])
        data = li.rotating_hamiltonian_data(cc, fr)
        th = data.theta(cc.q).reshape(3, 2)
        X = cc.config.positions
        expected = fr.k * cc.masses[:, None] * np.column_stack([X[:, 1], -X[:, 0]])
        np.testing.assert_allclose(th, expected, atol=1e-15)

    def test_effective_potential_at_cc(self):
        for cc, fr in (planar_lagrange([2, 3, 5]), inclined([1, 2, 3], 1.1)):
            data = li.rotating_hamiltonian_data(cc, fr)
            assert data.V(cc.q) == pytest.approx(-1.5 * cc.lam, rel=1e-12)
            assert np.linalg.norm(data.grad_V(cc.q)) < 1e-10

    def test_grad_matches_finite_differences(self):
        cc, fr = planar_lagrange([2, 3, 5])
        data = li.rotating_hamiltonian_data(cc, fr)
        Q = cc.q + 0.05 * np.random.default_rng(0).normal(size=6)
        h = 1e-6
        fd = np.array([(data.V(Q + h * e) - data.V(Q - h * e)) / (2 * h) for e in np.eye(6)])
        np.testing.assert_allclose(data.grad_V(Q), fd, rtol=1e-6, atol=1e-8)
