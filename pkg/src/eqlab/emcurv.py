"""Electromagnetic curvature of the planar quadratic model.

The model lives on the Euclidean plane with potential
``V(x, y) = -alpha x^2 - beta y^2`` and magnetic potential
``theta = k(-y dx + x dy)``, so the magnetic function is ``b = 2k``.  With
``k = 1`` it is the standard toy system; the n-body shape reduction produces
general ``k``.  The origin is a nondegenerate maximum of ``V`` with value 0.
"""
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .errors import PreconditionError

EMPTY = "Empty"
HYPERBOLA = "Hyperbola"
PARALLEL_LINES = "ParallelLines"
ELLIPSE = "Ellipse"
NONPOSITIVE_CORE = "NonPositiveCore"

STABLE = "Stable"
BORDERLINE = "Borderline"
UNSTABLE = "Unstable"


@dataclass(frozen=True)
class QuadModel2D:
    alpha: float
    beta: float
    k: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "k"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise PreconditionError(f"{name} must be positive, got {v}")

    @property
    def b(self):
        """Magnetic function (constant)."""
        return 2.0 * self.k

    e0 = 0.0

    def V(self, x, y):
        return -self.alpha * np.asarray(x) ** 2 - self.beta * np.asarray(y) ** 2

    def scaled(self, c):
        """The model ``(c^2 alpha, c^2 beta, c k)``; same dynamics up to time scale."""
        return QuadModel2D(c * c * self.alpha, c * c * self.beta, c * self.k)


def _jacobi_factor(model, x, y, e):
    E = e - model.V(x, y)
    if np.any(E <= 0):
        raise PreconditionError("energy must exceed the potential at every point")
    return E


def general_curvature(e_minus_V, gauss, lap_V, dV_norm2, db_Jv, b, dV_Jv):
    """Electromagnetic curvature of a surface from pointwise data.

    Parameters
    ----------
    e_minus_V : float
        ``e - V(q)``, positive.
    gauss : float
        Gaussian curvature of the metric.
    lap_V, dV_norm2 : float
        Laplacian of ``V`` and ``|dV|^2``.
    db_Jv, dV_Jv : float
        ``db`` and ``dV`` evaluated on ``J v_hat``.
    b : float
        Magnetic function.
    """
    E = e_minus_V
    return (gauss / (2 * E)
            + lap_V / (4 * E**2)
            + dV_norm2 / (4 * E**3)
            - db_Jv / (2 * E) ** 1.5
            - 2 * b * dV_Jv / (2 * E) ** 2.5
            + b * b / (4 * E**2))


def curvature(model, q, phi, e):
    """Curvature ``K_e(q, v)`` for the unit direction ``v = (cos phi, sin phi)``."""
    x, y = q
    E = _jacobi_factor(model, x, y, e)
    a, c, k = model.alpha, model.beta, model.k
    return ((2 * k * k - a - c) / (2 * E**2)
            + (a * a * x * x + c * c * y * y) / E**3
            - np.sqrt(2.0) * k * (a * x * np.sin(phi) - c * y * np.cos(phi)) / E**2.5)


def q_polynomial(model, t):
    """``Q(t) = t^2 - sqrt2 k t + (2k^2 - alpha - beta)/2``."""
    k = model.k
    return t * t - np.sqrt(2.0) * k * t + (2 * k * k - model.alpha - model.beta) / 2


def min_curvature_over_directions(model, q, e):
    """``min_phi K_e(q, phi) = Q(t) / (e - V)^2``."""
    x, y = q
    E = _jacobi_factor(model, x, y, e)
    t = np.sqrt((model.alpha**2 * np.asarray(x) ** 2 + model.beta**2 * np.asarray(y) ** 2) / E)
    return q_polynomial(model, t) / E**2


def q_roots(model):
    """Roots ``(t_-, t_+)`` of ``Q``, or ``None`` when ``alpha + beta < k^2``."""
    k = model.k
    disc = model.alpha + model.beta - k * k
    if disc < 0:
        return None
    r = np.sqrt(disc)
    return (k - r) / np.sqrt(2.0), (k + r) / np.sqrt(2.0)


@dataclass(frozen=True)
class ZeroSetClass:
    """Boundary of the positive-curvature component around the origin.

    The curve is ``c_x x^2 + c_y y^2 = rhs``.  ``axes`` holds semiaxes for an
    ellipse and asymptote slopes ``|dy/dx|`` for a hyperbola.
    """
    kind: str
    coefficients: tuple = None
    t_minus: float = None
    axes: tuple = None


def zero_set(model, e, zero_tol=1e-12):
    """Classify the zero set of the direction-minimized curvature at energy ``e``."""
    if e <= 0:
        raise PreconditionError("energy must be positive")
    roots = q_roots(model)
    if roots is None:
        return ZeroSetClass(EMPTY)
    tm = roots[0]
    a, b = model.alpha, model.beta
    if tm <= 0:
        # Q(0) <= 0: curvature at the origin is already non-positive
        return ZeroSetClass(NONPOSITIVE_CORE, None, tm)
    t2 = tm * tm
    sa, sb = a - t2, b - t2
    scale = max(1.0, model.k**2)
    coeffs = (a * sa, b * sb, t2 * e)
    if abs(sa) <= zero_tol * scale or abs(sb) <= zero_tol * scale:
        return ZeroSetClass(PARALLEL_LINES, coeffs, tm)
    if sa * sb < 0:
        # asymptotes: c_x x^2 + c_y y^2 = 0
        slope = np.sqrt(-coeffs[0] / coeffs[1])
        return ZeroSetClass(HYPERBOLA, coeffs, tm, (slope, -slope))
    return ZeroSetClass(ELLIPSE, coeffs, tm,
                        (np.sqrt(coeffs[2] / coeffs[0]), np.sqrt(coeffs[2] / coeffs[1])))


def conic_branches(zs, num=200, extent=None):
    """Sample the conic described by ``zs`` as a list of ``(num, 2)`` arrays.

    Ellipses give one closed branch.  Hyperbolas give two branches with
    hyperbolic parameter in ``[-extent, extent]`` (default 2); parallel lines
    give two segments with free coordinate in the same range.
    """
    if zs.coefficients is None:
        return []
    cx, cy, rhs = zs.coefficients
    if zs.kind == ELLIPSE:
        th = np.linspace(0, 2 * np.pi, num + 1)
        ax, ay = zs.axes
        return [np.column_stack([ax * np.cos(th), ay * np.sin(th)])]
    extent = 2.0 if extent is None else extent
    s = np.linspace(-extent, extent, num)
    if zs.kind == HYPERBOLA:
        if cx > 0:
            x = np.sqrt(rhs / cx) * np.cosh(s)
            y = np.sqrt(-rhs / cy) * np.sinh(s)
            return [np.column_stack([x, y]), np.column_stack([-x, y])]
        x = np.sqrt(-rhs / cx) * np.sinh(s)
        y = np.sqrt(rhs / cy) * np.cosh(s)
        return [np.column_stack([x, y]), np.column_stack([x, -y])]
    if zs.kind == PARALLEL_LINES:
        # the surviving coefficient is positive; both zero leaves no real points
        tiny = 1e-12 * max(abs(cx), abs(cy), rhs, 1.0)
        if cx > tiny and cx >= cy:
            x0 = np.sqrt(rhs / cx)
            return [np.column_stack([np.full(num, x0), s]),
                    np.column_stack([np.full(num, -x0), s])]
        if cy > tiny:
            y0 = np.sqrt(rhs / cy)
            return [np.column_stack([s, np.full(num, y0)]),
                    np.column_stack([s, np.full(num, -y0)])]
    return []


def conic_points(zs, num=200, extent=None):
    """All sample points of :func:`conic_branches` stacked into one array."""
    branches = conic_branches(zs, num, extent)
    return np.vstack(branches) if branches else np.zeros((0, 2))


def stability_outcome(model, tol=DEFAULT):
    """``Stable`` if ``sqrt(alpha) + sqrt(beta) < sqrt2 k``; equality gives ``Borderline``."""
    gap = np.sqrt(2.0) * model.k - (np.sqrt(model.alpha) + np.sqrt(model.beta))
    if abs(gap) <= tol.borderline * max(1.0, model.k):
        return BORDERLINE
    return STABLE if gap > 0 else UNSTABLE


def stability_test(model):
    """Strict inequality ``sqrt(alpha) + sqrt(beta) < sqrt2 k``."""
    return bool(np.sqrt(model.alpha) + np.sqrt(model.beta) < np.sqrt(2.0) * model.k)


def toy_linear_system(model):
    """Hamilton's equations of the model in ``(x, y, x', y')`` form."""
    a, b, k = model.alpha, model.beta, model.k
    return np.array([
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [2 * a, 0.0, 0.0, 2 * k],
        [0.0, 2 * b, -2 * k, 0.0],
    ])


def characteristic_coefficients(model):
    """Coefficients of ``l^4 + c2 l^2 + c0``."""
    return 4 * model.k**2 - 2 * (model.alpha + model.beta), 4 * model.alpha * model.beta


@dataclass(frozen=True)
class Loop:
    """Closed curve with its velocity; both callables accept arrays of times."""
    position: object
    velocity: object
    period: float


def ellipse_loop(model):
    """Clockwise ellipse with semiaxes ``beta^{1/4}``, ``alpha^{1/4}``."""
    a4, b4 = model.beta**0.25, model.alpha**0.25
    w = np.sqrt(2.0) * (model.alpha * model.beta) ** 0.25
    return Loop(lambda t: (a4 * np.cos(w * t), -b4 * np.sin(w * t)),
                lambda t: (-a4 * w * np.sin(w * t), -b4 * w * np.cos(w * t)),
                2 * np.pi / w)


def circle_loop(model, omega=None):
    """Clockwise unit circle; the default speed ``sqrt(alpha + beta)`` minimizes the action."""
    w = np.sqrt(model.alpha + model.beta) if omega is None else omega
    return Loop(lambda t: (np.cos(w * t), -np.sin(w * t)),
                lambda t: (-w * np.sin(w * t), -w * np.cos(w * t)),
                2 * np.pi / w)


def ellipse_action_closed_form(model):
    """Free-period action of :func:`ellipse_loop` in closed form."""
    a, b, k = model.alpha, model.beta, model.k
    return np.sqrt(2.0) * np.pi * (a * b) ** 0.25 * (np.sqrt(a) + np.sqrt(b) - np.sqrt(2.0) * k)


def circle_action_closed_form(model):
    """Action of :func:`circle_loop` at its default speed."""
    return 2 * np.pi * (np.sqrt(model.alpha + model.beta) - model.k)


def loop_action(model, loop, nodes=10000, close_tol=1e-9):
    """``int_0^T [|g'|^2/2 + theta(g') - V(g)] dt`` by the periodic trapezoid rule.

    The integrand is smooth and periodic, so the equispaced rule converges
    geometrically.
    """
    T = float(loop.period)
    p0, p1 = np.asarray(loop.position(0.0)), np.asarray(loop.position(T))
    if not np.all(np.abs(p1 - p0) <= close_tol * max(1.0, np.abs(p0).max())):
        raise PreconditionError("loop is not closed over the given period")
    t = np.linspace(0.0, T, nodes, endpoint=False)
    x, y = loop.position(t)
    vx, vy = loop.velocity(t)
    lag = 0.5 * (vx**2 + vy**2) + model.k * (-y * vx + x * vy) - model.V(x, y)
    return float(np.sum(lag) * T / nodes)


@dataclass(frozen=True)
class ManeCertificate:
    """``EqualsE0`` with a calibrating ``C``, or ``StrictlyAbove`` with a negative-action loop."""
    kind: str
    C: float = None
    coefficients: tuple = None
    action: float = None
    loop: Loop = None


def hamiltonian_on_exact_form(model, C):
    """Diagonal coefficients of ``H(q, d(Cxy))`` as a quadratic form in ``(x, y)``."""
    k = model.k
    return 0.5 * (C - k) ** 2 - model.alpha, 0.5 * (C + k) ** 2 - model.beta


def mane_certificate(model, coef_tol=1e-12):
    """Decide whether the critical value equals the maximum of ``V``.

    If ``sqrt(alpha) + sqrt(beta) >= sqrt2 k`` an exact form ``d(C xy)`` keeps
    the Hamiltonian non-positive everywhere.  Otherwise the ellipse loop has
    negative action.
    """
    k, a, b = model.k, model.alpha, model.beta
    lo = max(k - np.sqrt(2 * a), -k - np.sqrt(2 * b))
    hi = min(k + np.sqrt(2 * a), -k + np.sqrt(2 * b))
    if lo <= hi + coef_tol:
        C = 0.5 * (lo + hi) if lo <= hi else lo
        cx, cy = hamiltonian_on_exact_form(model, C)
        if max(cx, cy) <= coef_tol * max(1.0, k * k):
            return ManeCertificate("EqualsE0", C=float(C), coefficients=(float(cx), float(cy)))
    loop = ellipse_loop(model)
    return ManeCertificate("StrictlyAbove", action=loop_action(model, loop), loop=loop)


def curvature_map(model, e, xs, ys):
    """``min_phi K_e`` on the grid ``xs x ys``; rows follow ``ys``."""
    X, Y = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float))
    return min_curvature_over_directions(model, (X, Y), e)
