import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqlab import nbody
from eqlab.errors import CollisionError, NumericalError, PreconditionError

# shape ratio a/b of the (2, 1, 2, 1) rhombus, from a scalar force balance
# solved independently with brentq (see test_rhombus_ratio_matches_force_balance)
RHOMBUS_M2_RATIO = 0.725183391196763


def cfg(masses, positions):
    positions = np.asarray(positions, float)
    return nbody.Configuration(nbody.MassSystem(masses, positions.shape[1]), positions.ravel())


def random_config(rng, n=3, d=2):
    m = rng.uniform(0.2, 3.0, n)
    X = rng.normal(size=(n, d))
    return cfg(m, X)


def fd_gradient(c, h=1e-5):
    g = np.zeros_like(c.q)
    for i in range(c.q.size):
        e = np.zeros_like(c.q)
        e[i] = h
        up = nbody.potential(nbody.Configuration(c.system, c.q + e))
        dn = nbody.potential(nbody.Configuration(c.system, c.q - e))
        g[i] = (up - dn) / (2 * h)
    return g


def fd_hessian(c, h=1e-5):
    H = np.zeros((c.q.size, c.q.size))
    for i in range(c.q.size):
        e = np.zeros_like(c.q)
        e[i] = h
        up = nbody.gradient(nbody.Configuration(c.system, c.q + e))
        dn = nbody.gradient(nbody.Configuration(c.system, c.q - e))
        H[:, i] = (up - dn) / (2 * h)
    return H


class TestPotential:
    def test_unit_triangle(self):
        s3 = np.sqrt(3) / 2
        c = cfg([1, 1, 1], [[0, 0], [1, 0], [0.5, s3]])
        assert nbody.potential(c) == pytest.approx(3.0, rel=1e-14)

    def test_two_bodies(self):
        assert nbody.potential(cfg([2, 3], [[0, 0], [2, 0]])) == pytest.approx(3.0)

    def test_normalized_equal_mass_lagrange(self):
        cc = nbody.build_lagrange([1 / 3] * 3, 2)
        # k = mu^(3/4) with mu = 1/3, so U = k^2 = 3^(-3/2)
        assert nbody.potential(cc) == pytest.approx(3 ** -1.5, rel=1e-12)
        assert nbody.potential(cc) == pytest.approx(0.1924500897, abs=1e-10)

    def test_collision_raises(self):
        with pytest.raises(CollisionError):
            nbody.potential(cfg([1, 1, 1], [[0, 0], [0, 0], [1, 0]]))


class TestGradient:
    def test_two_body_attraction(self):
        g = nbody.gradient(cfg([1, 1], [[-0.5, 0], [0.5, 0]])).reshape(2, 2)
        np.testing.assert_allclose(g[0], [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(g[1], [-1.0, 0.0], atol=1e-15)

    def test_blocks_sum_to_zero(self):
        c = random_config(np.random.default_rng(3), 4, 4)
        g = nbody.gradient(c).reshape(4, 4)
        assert np.abs(g.sum(axis=0)).max() < 1e-12

    def test_finite_differences(self):
        c = random_config(np.random.default_rng(0))
        g = nbody.gradient(c)
        assert np.linalg.norm(g - fd_gradient(c)) / np.linalg.norm(g) < 1e-7

    def test_collision_raises(self):
        with pytest.raises(CollisionError):
            nbody.gradient(cfg([1, 1], [[1, 1], [1, 1]]))


class TestHessian:
    def test_two_body_block(self):
        H = nbody.hessian(cfg([1, 1], [[0, 0], [1, 0]]))
        np.testing.assert_allclose(H[:2, 2:], np.diag([-2.0, 1.0]), atol=1e-15)

    def test_symmetric_exactly(self):
        H = nbody.hessian(random_config(np.random.default_rng(1), 4, 4))
        assert np.array_equal(H, H.T)

    def test_block_rows_vanish(self):
        c = random_config(np.random.default_rng(2), 3, 4)
        H = nbody.hessian(c)
        blocks = H.reshape(3, 4, 3, 4).sum(axis=2)
        assert np.abs(blocks).max() < 1e-12

    def test_finite_differences(self):
        c = random_config(np.random.default_rng(5))
        H = nbody.hessian(c)
        assert np.linalg.norm(H - fd_hessian(c)) / np.linalg.norm(H) < 1e-6


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(3, 2), (4, 2), (3, 4), (2, 4)]))
def test_derivatives_match_finite_differences(seed, shape):
    rng = np.random.default_rng(seed)
    c = random_config(rng, *shape)
    # keep bodies reasonably separated so the step is small relative to r_ij
    r = c.distances()[np.triu_indices(shape[0], 1)]
    if r.min() < 0.3:
        c = nbody.Configuration(c.system, c.q * (0.3 / r.min()))
    g = nbody.gradient(c)
    assert np.linalg.norm(g - fd_gradient(c)) / np.linalg.norm(g) < 1e-6
    H = nbody.hessian(c)
    assert np.linalg.norm(H - fd_hessian(c)) / np.linalg.norm(H) < 1e-6
    assert np.abs(g.reshape(shape).sum(axis=0)).max() < 1e-12
    assert np.abs(H.reshape(shape[0], shape[1], shape[0], shape[1]).sum(axis=2)).max() < 1e-12


class TestResidualAndNormalize:
    def test_lagrange_any_masses(self):
        for m in ([1, 1, 1], [2, 3, 5], [0.01, 7, 1]):
            assert nbody.cc_residual(nbody.build_lagrange(m, 2)) < 1e-12

    def test_square(self):
        assert nbody.cc_residual(nbody.build_square()) < 1e-12

    def test_isosceles_not_central(self):
        c = nbody.normalize(cfg([1, 1, 1], [[0, 0], [2, 0], [1, 0.5]]))
        assert nbody.cc_residual(c) > 1e-3

    def test_unnormalized_rejected(self):
        with pytest.raises(PreconditionError):
            nbody.cc_residual(cfg([1, 1, 1], [[0, 0], [2, 0], [1, 0.5]]))

    def test_normalize_properties(self):
        c = cfg([1, 2, 3], [[0, 0], [2, 0], [1, 0.5]])
        n = nbody.normalize(c)
        assert np.linalg.norm(n.center_of_mass()) < 1e-15
        assert n.m_norm2() == pytest.approx(1.0, abs=1e-15)
        r0, r1 = c.distances(), n.distances()
        iu = np.triu_indices(3, 1)
        ratio = r1[iu] / r0[iu]
        assert np.ptp(ratio) < 1e-14

    def test_normalize_idempotent_and_scale_invariant(self):
        c = cfg([1, 2, 3], [[0, 0], [2, 0], [1, 0.5]])
        n = nbody.normalize(c)
        np.testing.assert_allclose(nbody.normalize(n).q, n.q, atol=1e-15)
        big = nbody.Configuration(c.system, 7 * c.q)
        np.testing.assert_allclose(nbody.normalize(big).q, n.q, atol=1e-14)

    def test_triangle_vertices_normalized(self):
        cc = nbody.build_lagrange([1, 1, 1], 4)
        assert np.linalg.norm(cc.config.center_of_mass()) < 1e-15
        assert cc.config.m_norm2() == pytest.approx(1.0, abs=1e-14)


class TestBuilders:
    @pytest.mark.parametrize("m,d", [([1, 1, 1], 2), ([50.46, 1, 1], 4), ([2, 3, 5], 2)])
    def test_lagrange(self, m, d):
        cc = nbody.build_lagrange(m, d)
        assert cc.residual < 1e-12
        assert cc.lam == pytest.approx(nbody.potential(cc), rel=1e-12)
        if d == 4:
            assert np.abs(cc.config.positions[:, 2:]).max() == 0

    def test_lagrange_needs_three(self):
        with pytest.raises(PreconditionError):
            nbody.build_lagrange([1, 1], 2)

    def test_square_geometry(self):
        cc = nbody.build_square(1.0)
        r = cc.config.distances()
        sides = [r[0, 1], r[1, 2], r[2, 3], r[3, 0]]
        assert np.ptp(sides) < 1e-14
        assert r[0, 2] == pytest.approx(sides[0] * np.sqrt(2), rel=1e-14)
        assert r[1, 3] == pytest.approx(sides[0] * np.sqrt(2), rel=1e-14)

    def test_square_heavy(self):
        assert nbody.build_square(5.0).residual < 1e-12

    def test_rhombus_unit_is_square(self):
        _, s = nbody.build_rhombus(1.0)
        assert s == pytest.approx(1.0, abs=1e-10)

    def test_rhombus_m2(self):
        cc, s = nbody.build_rhombus(2.0)
        assert cc.residual < 1e-10
        assert s == pytest.approx(RHOMBUS_M2_RATIO, abs=1e-11)

    def test_rhombus_ratio_matches_force_balance(self):
        from scipy.optimize import brentq

        def balance(s, m):
            # acceleration/position equal for an m body on x and a unit body on y
            return m / (4 * s**3) + 2 / (s * s + 1) ** 1.5 - 0.25 - 2 * m / (s * s + 1) ** 1.5

        oracle = brentq(lambda s: balance(s, 2.0), 0.2, 5.0, xtol=1e-15)
        assert oracle == pytest.approx(RHOMBUS_M2_RATIO, abs=1e-14)

    def test_rhombus_exchange_symmetry(self):
        _, s2 = nbody.build_rhombus(2.0)
        _, s05 = nbody.build_rhombus(0.5)
        assert s05 == pytest.approx(1 / s2, abs=1e-8)

    def test_rhombus_bad_bracket(self):
        with pytest.raises(NumericalError) as info:
            nbody.build_rhombus(2.0, bracket=(2.0, 5.0))
        assert "bracket" in info.value.diagnostics


class TestIncline:
    def test_zero_is_identity(self):
        cc = nbody.build_lagrange([1, 1, 1], 4)
        np.testing.assert_array_equal(nbody.incline(cc, 0.0).q, cc.q)

    def test_quarter_turn_leaves_xy_plane(self):
        X = nbody.incline(nbody.build_lagrange([1, 2, 3], 4), np.pi / 2).config.positions
        # x is carried onto -z while y is untouched: the triangle spans y and z
        assert np.abs(X[:, 0]).max() < 1e-15
        assert np.abs(X[:, 3]).max() == 0
        assert np.abs(X[:, 2]).max() > 0.1 and np.abs(X[:, 1]).max() > 0.1

    @pytest.mark.parametrize("g", [0.1, 0.7, 1.3])
    def test_isometry(self, g):
        cc = nbody.build_lagrange([1, 2, 3], 4)
        t = nbody.incline(cc, g)
        assert t.config.m_norm2() == pytest.approx(1.0, abs=1e-12)
        assert t.lam == pytest.approx(cc.lam, rel=1e-12)
        assert t.residual < 1e-10

    def test_needs_r4(self):
        with pytest.raises(PreconditionError):
            nbody.incline(nbody.build_lagrange([1, 1, 1], 2), 0.3)


class TestRestrictedHessian:
    def test_dilation_eigenvector(self):
        cc = nbody.build_lagrange([1, 1, 1], 2)
        H, _ = nbody.restricted_hessian(cc)
        # Euler's identity D^2U q = 2 U M q, hence H q = 3 lambda q
        np.testing.assert_allclose(H @ cc.q, 3 * cc.lam * cc.q, atol=1e-10)

    @pytest.mark.parametrize("builder", [
        lambda: nbody.build_lagrange([1, 2, 3], 2),
        lambda: nbody.build_square(),
        lambda: nbody.build_lagrange([1, 1, 1], 4),
    ])
    def test_rotational_degeneracy(self, builder):
        cc = builder()
        H, inertia = nbody.restricted_hessian(cc)
        d, n = cc.dim, cc.system.n
        for a in range(d):
            for b in range(a + 1, d):
                S = np.zeros((d, d))
                S[a, b], S[b, a] = 1, -1
                v = np.kron(np.eye(n), S) @ cc.q
                assert np.linalg.norm(H @ v) < 1e-10
        assert inertia["nullity"] >= 1

    def test_lagrange_inertia(self):
        _, inertia = nbody.restricted_hessian(nbody.build_lagrange([1, 1, 1], 2))
        assert inertia == {"index": 0, "nullity": 1, "positive": 2}

    def test_any_configuration(self):
        c = nbody.normalize(cfg([1, 1, 1], [[0, 0], [2, 0], [1, 0.5]]))
        H, _ = nbody.restricted_hessian(c)
        assert H.shape == (6, 6)


def test_mass_system_validation():
    with pytest.raises(PreconditionError):
        nbody.MassSystem([1.0, -1.0], 2)
    with pytest.raises(PreconditionError):
        nbody.MassSystem([1.0], 2)
    with pytest.raises(PreconditionError):
        nbody.MassSystem([1.0, 1.0], 3)
    assert nbody.MassSystem([1.0, 2.0], 2).total_mass == 3.0


def test_values_are_immutable():
    cc = nbody.build_lagrange([1, 1, 1], 2)
    with pytest.raises(ValueError):
        cc.q[0] = 1.0
