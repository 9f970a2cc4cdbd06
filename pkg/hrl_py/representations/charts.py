"""
C^{1,alpha} boundary geometry: rigid motions, local graph charts and the
boundary surfaces they are cut from.

A chart at a boundary point q is built from the isometry L_q that sends q
to the origin and the outward normal at q to e_n. In those coordinates the
boundary is the graph z_n = Phi(zeta) over a ball O of radius `radius` in
R^{n-1}, with Phi(0) = 0 and grad Phi(0) = 0.
"""

import numpy as np

from hrl_py.framework.errors import ChartMismatchError, DomainError
from hrl_py.framework.sphere import check_dimension
from hrl_py.utils.math import as_points, householder_to_axis, row_norms
from hrl_py.utils.polynomial import Polynomial


class Isometry:
    """Rigid motion x -> R x + b with R orthogonal."""

    def __init__(self, rotation, translation):
        R = np.array(rotation, dtype=float)
        b = np.array(translation, dtype=float).ravel()
        if R.ndim != 2 or R.shape[0] != R.shape[1] or R.shape[0] != len(b):
            raise ValueError("Rotation %s and translation %s do not match" % (R.shape, b.shape))
        if np.max(np.abs(R.T @ R - np.eye(len(b)))) > 1e-10:
            raise ValueError("Rotation matrix is not orthogonal")
        R.setflags(write=False)
        b.setflags(write=False)
        self.rotation = R
        self.translation = b

    @property
    def n(self):
        return len(self.translation)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n), np.zeros(n))

    @classmethod
    def random(cls, n, rng, scale=1.0):
        """A random rotation (Haar, via QR) with a Gaussian translation."""
        Q, R = np.linalg.qr(rng.standard_normal((n, n)))
        Q = Q * np.sign(np.diag(R))[None, :]
        return cls(Q, scale * rng.standard_normal(n))

    def apply(self, points):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            return self.rotation @ points + self.translation
        return points @ self.rotation.T + self.translation[None, :]

    __call__ = apply

    def inverse(self):
        return Isometry(self.rotation.T, -self.rotation.T @ self.translation)

    def compose(self, other):
        """self o other."""
        return Isometry(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def orthogonality_error(self):
        return float(np.max(np.abs(self.rotation.T @ self.rotation - np.eye(self.n))))

    def __repr__(self):
        return "Isometry(n=%d, b=%s)" % (self.n, list(self.translation))


def normalize_at(q, normal):
    """The isometry sending q to 0 and `normal` to e_n.

    The rotation is the Householder reflection taking normal to e_n, so an
    already vertical normal gives the identity rotation."""
    q = np.asarray(q, dtype=float).ravel()
    normal = np.asarray(normal, dtype=float).ravel()
    norm = float(np.linalg.norm(normal))
    if norm == 0.0 or not np.isfinite(norm):
        raise DomainError("Cannot normalize at q=%s with zero normal" % list(q))
    H = householder_to_axis(normal / norm, axis=-1)
    return Isometry(H, -H @ q)


class GraphChart:
    """Boundary near `anchor` as the graph z_n = Phi(zeta), |zeta| <= radius.

    Subclasses implement :meth:`phi`; :meth:`grad_phi` defaults to central
    differences.

    Args:
        anchor (array): boundary point q.
        iso (Isometry): L_q, sending q to 0 and the normal to e_n.
        alpha (float): Holder exponent of grad Phi.
        c2 (float): Holder constant of grad Phi on O.
        radius (float): extent of O.
    """

    FD_STEP = 1e-6

    def __init__(self, anchor, iso, alpha, c2, radius, name=None):
        self.anchor = np.asarray(anchor, dtype=float).ravel()
        self.iso = iso
        if not 0.0 < alpha <= 1.0:
            raise ValueError("Chart exponent alpha must be in (0, 1], got %s" % alpha)
        self.alpha = float(alpha)
        self.c2 = None if c2 is None else float(c2)
        self.radius = float(radius)
        self.name = name if name is not None else "chart"

    @property
    def n(self):
        return len(self.anchor)

    def phi(self, zeta):
        raise NotImplementedError

    def grad_phi(self, zeta):
        zeta = as_points(zeta, n=self.n - 1)
        columns = []
        for j in range(self.n - 1):
            shift = np.zeros(self.n - 1)
            shift[j] = self.FD_STEP
            columns.append((self.phi(zeta + shift) - self.phi(zeta - shift)) / (2.0 * self.FD_STEP))
        return np.column_stack(columns)

    def in_domain(self, zeta, tol=1e-12):
        zeta = as_points(zeta, n=self.n - 1)
        return row_norms(zeta) <= self.radius * (1.0 + tol)

    def require_domain(self, zeta):
        inside = self.in_domain(zeta)
        if not np.all(inside):
            bad = as_points(zeta, n=self.n - 1)[np.argmin(inside)]
            raise DomainError(
                "zeta=%s lies outside the chart domain |zeta| <= %g" % (list(bad), self.radius)
            )

    def to_local(self, points):
        return self.iso.apply(as_points(points, n=self.n))

    def from_local(self, zeta, t=None):
        zeta = as_points(zeta, n=self.n - 1)
        t = self.phi(zeta) if t is None else np.asarray(t, dtype=float)
        return self.iso.inverse().apply(np.column_stack([zeta, t]))

    def graph_residual(self, points):
        """|z_n - Phi(zeta)| in chart coordinates; inf where zeta is outside O."""
        local = self.to_local(points)
        zeta, t = local[:, :-1], local[:, -1]
        residual = np.full(len(local), np.inf)
        inside = self.in_domain(zeta)
        if np.any(inside):
            residual[inside] = np.abs(t[inside] - self.phi(zeta[inside]))
        return np.where(np.isnan(residual), np.inf, residual)

    def verify_normalization(self, tol=1e-10):
        """Checks Phi(0) = 0 and grad Phi(0) = 0."""
        origin = np.zeros((1, self.n - 1))
        value = float(self.phi(origin)[0])
        grad = float(np.max(np.abs(self.grad_phi(origin))))
        return value, grad, abs(value) <= tol and grad <= max(tol, 10 * self.FD_STEP**2)

    def as_surface(self):
        """The boundary near this chart as the level set z_n - Phi(zeta) = 0."""
        chart = self

        def psi(points):
            local = chart.to_local(points)
            return local[:, -1] - chart.phi(local[:, :-1])

        return LevelSetSurface(self.n, psi, name="graph(%s)" % self.name)

    def transformed(self, iso):
        """The same chart for the boundary moved by `iso`."""
        raise NotImplementedError

    def __repr__(self):
        return "%s(%s, q=%s, radius=%g)" % (
            type(self).__name__,
            self.name,
            list(np.round(self.anchor, 6)),
            self.radius,
        )


class FunctionChart(GraphChart):
    """A chart with Phi (and optionally grad Phi) given as functions of zeta."""

    def __init__(self, anchor, iso, phi, alpha, c2, radius, grad=None, name=None, params=None):
        super().__init__(anchor, iso, alpha, c2, radius, name=name)
        self._phi = phi
        self._grad = grad
        # builtin name and shape parameters, kept for atlas files
        self.params = params

    def phi(self, zeta):
        return np.asarray(self._phi(as_points(zeta, n=self.n - 1)), dtype=float)

    def grad_phi(self, zeta):
        if self._grad is None:
            return super().grad_phi(zeta)
        return np.asarray(self._grad(as_points(zeta, n=self.n - 1)), dtype=float)

    def transformed(self, iso):
        return FunctionChart(
            iso.apply(self.anchor),
            self.iso.compose(iso.inverse()),
            self._phi,
            self.alpha,
            self.c2,
            self.radius,
            grad=self._grad,
            name=self.name,
            params=self.params,
        )

    @classmethod
    def sphere(cls, anchor, normal, radius, sphere_radius=1.0, alpha=1.0, c2=None):
        """Chart of a round sphere of radius R: Phi = sqrt(R^2 - |zeta|^2) - R.

        With alpha = 1 the default C2 is the exact bound R^2 / (R^2 - radius^2)^{3/2}."""
        R = float(sphere_radius)
        if radius >= R:
            raise ValueError("Sphere chart radius %g must be below the sphere radius %g" % (radius, R))
        if c2 is None and alpha == 1.0:
            c2 = R * R / (R * R - radius * radius) ** 1.5
        return cls(
            anchor,
            normalize_at(anchor, normal),
            lambda z: np.sqrt(R * R - np.einsum("ij,ij->i", z, z)) - R,
            alpha,
            c2,
            radius,
            grad=lambda z: -z / np.sqrt(R * R - np.einsum("ij,ij->i", z, z))[:, None],
            name="sphere",
            params={"phi": "sphere", "sphere_radius": R},
        )

    @classmethod
    def paraboloid(cls, anchor, normal, radius, a=1.0, alpha=1.0, c2=None):
        """Phi = a |zeta|^2, with C2 = 2|a| for alpha = 1."""
        if c2 is None and alpha == 1.0:
            c2 = 2.0 * abs(a)
        return cls(
            anchor,
            normalize_at(anchor, normal),
            lambda z: a * np.einsum("ij,ij->i", z, z),
            alpha,
            c2,
            radius,
            grad=lambda z: 2.0 * a * z,
            name="paraboloid",
            params={"phi": "paraboloid", "a": a},
        )

    @classmethod
    def polynomial(cls, anchor, normal, radius, poly, alpha, c2):
        if not isinstance(poly, Polynomial):
            poly = Polynomial.from_terms(len(anchor) - 1, poly)
        return cls(
            anchor,
            normalize_at(anchor, normal),
            poly,
            alpha,
            c2,
            radius,
            grad=poly.gradient,
            name="polynomial",
            params={"phi": {"terms": poly.to_terms()}},
        )


class SurfaceChart(GraphChart):
    """Chart of a level-set surface; Phi solves psi(L^{-1}(zeta, t)) = 0 for t.

    Newton's method in t starts at t = 0; points where it fails to converge
    get Phi = nan. The gradient comes from implicit differentiation."""

    MAX_ITER = 50
    TOL = 1e-15

    def __init__(self, surface, anchor, iso, alpha, c2, radius, name=None):
        super().__init__(anchor, iso, alpha, c2, radius, name=name)
        self.surface = surface
        self._inverse = iso.inverse()

    def _points(self, zeta, t):
        return self._inverse.apply(np.column_stack([zeta, t]))

    def _local_gradient(self, zeta, t):
        # gradient of psi o L^{-1} is R grad psi
        return self.surface.grad_psi(self._points(zeta, t)) @ self.iso.rotation.T

    def phi(self, zeta):
        zeta = as_points(zeta, n=self.n - 1)
        t = np.zeros(len(zeta))
        with np.errstate(invalid="ignore", divide="ignore"):
            for _ in range(self.MAX_ITER):
                value = self.surface.psi(self._points(zeta, t))
                dt = value / self._local_gradient(zeta, t)[:, -1]
                t = t - dt
                if not np.any(np.abs(dt) > self.TOL):
                    break
        converged = np.abs(self.surface.psi(self._points(zeta, t))) <= 1e-10
        return np.where(converged, t, np.nan)

    def grad_phi(self, zeta):
        zeta = as_points(zeta, n=self.n - 1)
        g = self._local_gradient(zeta, self.phi(zeta))
        return -g[:, :-1] / g[:, -1:]

    def transformed(self, iso):
        return self.surface.transformed(iso).chart_at(
            iso.apply(self.anchor), self.radius, self.alpha, self.c2
        )


class QuadricChart(SurfaceChart):
    """Chart of a quadric, with Phi from the closed-form root in t."""

    def phi(self, zeta):
        zeta = as_points(zeta, n=self.n - 1)
        surface = self.surface
        R = self.iso.rotation
        A = R @ surface.matrix @ R.T
        d = R @ (self.anchor - surface.center)
        e = zeta + d[None, :-1]
        a = A[-1, -1]
        beta = e @ A[:-1, -1]
        gamma = np.einsum("ij,jk,ik->i", e, A[:-1, :-1], e) - 1.0
        # (t + d_n) solves a s^2 + 2 beta s + gamma = 0
        disc = beta * beta - a * gamma
        with np.errstate(invalid="ignore", divide="ignore"):
            root = np.sqrt(disc)
            s1 = (-beta - np.where(beta >= 0.0, root, -root)) / a
            s2 = np.where(s1 != 0.0, gamma / (a * s1), 0.0)
        t1, t2 = s1 - d[-1], s2 - d[-1]
        t = np.where(np.abs(t1) <= np.abs(t2), t1, t2)
        return np.where(disc >= 0.0, t, np.nan)


class BoundarySurface:
    """A closed hypersurface psi(y) = 0, with psi < 0 inside."""

    FD_STEP = 1e-6

    def __init__(self, n, name=None):
        check_dimension(n)
        self.n = n
        self.name = name if name is not None else "surface"

    def psi(self, points):
        raise NotImplementedError

    def grad_psi(self, points):
        points = as_points(points, n=self.n)
        columns = []
        for j in range(self.n):
            shift = np.zeros(self.n)
            shift[j] = self.FD_STEP
            columns.append((self.psi(points + shift) - self.psi(points - shift)) / (2.0 * self.FD_STEP))
        return np.column_stack(columns)

    def distance_proxy(self, points):
        """First-order distance |psi| / |grad psi| to the surface."""
        points = as_points(points, n=self.n)
        return np.abs(self.psi(points)) / row_norms(self.grad_psi(points))

    def outward_normal(self, q):
        g = self.grad_psi(as_points(q, n=self.n))[0]
        norm = float(np.linalg.norm(g))
        if norm == 0.0:
            raise DomainError("Surface gradient vanishes at q=%s" % list(q))
        return g / norm

    def chart_at(self, q, radius, alpha=1.0, c2=None):
        q = np.asarray(q, dtype=float).ravel()
        return SurfaceChart(self, q, normalize_at(q, self.outward_normal(q)), alpha, c2, radius, name=self.name)

    def transformed(self, iso):
        raise NotImplementedError


class QuadricSurface(BoundarySurface):
    """(y - c)^T A (y - c) = 1 for a symmetric positive definite A."""

    def __init__(self, matrix, center=None, name=None):
        A = np.array(matrix, dtype=float)
        super().__init__(A.shape[0], name=name if name is not None else "quadric")
        if np.max(np.abs(A - A.T)) > 1e-12:
            raise ValueError("Quadric matrix must be symmetric")
        if np.min(np.linalg.eigvalsh(A)) <= 0.0:
            raise ValueError("Quadric matrix must be positive definite")
        self.matrix = A
        self.center = np.zeros(self.n) if center is None else np.asarray(center, dtype=float)

    @classmethod
    def sphere(cls, n, radius=1.0, center=None):
        return cls(np.eye(n) / radius**2, center, name="sphere")

    @classmethod
    def ellipsoid(cls, semi_axes, rotation=None, center=None):
        """Ellipsoid with the given semi-axes along the columns of `rotation`."""
        semi_axes = np.asarray(semi_axes, dtype=float)
        R = np.eye(len(semi_axes)) if rotation is None else np.asarray(rotation, dtype=float)
        A = R @ np.diag(1.0 / semi_axes**2) @ R.T
        return cls(0.5 * (A + A.T), center, name="ellipsoid")

    @classmethod
    def image_of_ball(cls, matrix, name=None):
        """Image of the unit ball under y = M x: y^T (M M^T)^{-1} y = 1."""
        M = np.asarray(matrix, dtype=float)
        A = np.linalg.inv(M @ M.T)
        return cls(0.5 * (A + A.T), name=name)

    def psi(self, points):
        diff = as_points(points, n=self.n) - self.center[None, :]
        return np.einsum("ij,jk,ik->i", diff, self.matrix, diff) - 1.0

    def grad_psi(self, points):
        diff = as_points(points, n=self.n) - self.center[None, :]
        return 2.0 * diff @ self.matrix

    def chart_at(self, q, radius, alpha=1.0, c2=None):
        q = np.asarray(q, dtype=float).ravel()
        return QuadricChart(self, q, normalize_at(q, self.outward_normal(q)), alpha, c2, radius, name=self.name)

    def transformed(self, iso):
        R = iso.rotation
        A = R @ self.matrix @ R.T
        return QuadricSurface(0.5 * (A + A.T), iso.apply(self.center), name=self.name)

    def __repr__(self):
        return "QuadricSurface(%s, n=%d)" % (self.name, self.n)


class LevelSetSurface(BoundarySurface):
    """psi(y) = 0 for a vectorized psi, e.g. psi(y) = |f^{-1}(y)|^2 - 1."""

    def __init__(self, n, psi, grad_psi=None, name=None):
        super().__init__(n, name=name if name is not None else "level-set")
        self._psi = psi
        self._grad = grad_psi

    def psi(self, points):
        return np.asarray(self._psi(as_points(points, n=self.n)), dtype=float)

    def grad_psi(self, points):
        if self._grad is None:
            return super().grad_psi(points)
        return np.asarray(self._grad(as_points(points, n=self.n)), dtype=float)

    def transformed(self, iso):
        back = iso.inverse()
        grad = None
        if self._grad is not None:
            grad = lambda pts: self._grad(back.apply(pts)) @ iso.rotation.T
        return LevelSetSurface(self.n, lambda pts: self._psi(back.apply(pts)), grad, name=self.name)

    @classmethod
    def image_of_ball(cls, ball_map):
        """Boundary of f(B) as |f^{-1}(y)|^2 - 1 = 0."""

        def psi(points):
            x = ball_map.invert(points)
            return np.einsum("ij,ij->i", x, x) - 1.0

        def grad_psi(points):
            # grad of |x|^2 - 1 with x = f^{-1}(y) is 2 Df(x)^{-T} x
            x = ball_map.invert(points)
            J = ball_map.jacobian_at(x)
            return 2.0 * np.linalg.solve(np.transpose(J, (0, 2, 1)), x[..., None])[..., 0]

        return cls(ball_map.n, psi, grad_psi, name="image(%s)" % ball_map.name)


def estimate_c2(chart, alpha=None, pairs=512, seed=0):
    """Sampled sup of |grad Phi(zeta) - grad Phi(omega)| / |zeta - omega|^alpha on O.

    Half of the pairs are uniform in O, half are close pairs. A diagnostic
    lower bound, never a proof of the constant."""
    alpha = chart.alpha if alpha is None else alpha
    rng = np.random.default_rng(seed)
    m = chart.n - 1
    g = rng.standard_normal((2 * pairs, m))
    g /= row_norms(g)[:, None]
    radii = chart.radius * rng.random(2 * pairs) ** (1.0 / m)
    zeta, omega = np.split(g * radii[:, None], 2)
    close = pairs // 2
    step = rng.standard_normal((close, m))
    step *= (10.0 ** rng.uniform(-4.0, -1.0, size=close) / row_norms(step))[:, None]
    omega[:close] = zeta[:close] + step
    keep = chart.in_domain(omega)
    zeta, omega = zeta[keep], omega[keep]
    diff = row_norms(chart.grad_phi(zeta) - chart.grad_phi(omega))
    dist = row_norms(zeta - omega)
    ratio = diff / dist**alpha
    ratio = ratio[np.isfinite(ratio)]
    return float(np.max(ratio)) if len(ratio) else float("nan")


class DomainSpec:
    """The target domain of a map: boundary geometry plus the covering constants.

    Either an analytic `surface` (charts are built on demand at any boundary
    point) or an atlas of `charts` must be given.

    Args:
        n (int): dimension.
        surface (BoundarySurface): boundary as a level set.
        charts (list): atlas of GraphChart.
        delta (float): sphere-side neighbourhood radius of V(eta).
        rho (float): target-side radius.
        lipschitz_G (float): Lipschitz constant of the reference map G.
        reference_map (BallMap): G itself, when known.
        reference_distortion (float): K(G), used when G is not given.
        alpha (float): boundary Holder exponent.
        c2 (float): global gradient-Holder constant. When None each chart's
            constant is estimated and inflated by `c2_margin`.
        chart_radius (float): extent of charts built from the surface.
    """

    def __init__(
        self,
        n,
        surface=None,
        charts=(),
        delta=0.2,
        rho=None,
        lipschitz_G=None,
        reference_map=None,
        reference_distortion=1.0,
        alpha=1.0,
        c2=None,
        chart_radius=0.3,
        c2_margin=0.05,
        name="domain",
    ):
        check_dimension(n)
        if surface is None and not charts:
            raise ValueError("A domain needs a boundary surface or an atlas of charts")
        if not delta > 0.0:
            raise ValueError("delta must be positive, got %s" % delta)
        self.n = n
        self.surface = surface
        self.charts = list(charts)
        self.delta = float(delta)
        self.rho = None if rho is None else float(rho)
        self.lipschitz_G = None if lipschitz_G is None else float(lipschitz_G)
        self.reference_map = reference_map
        self.reference_distortion = float(reference_distortion)
        self.alpha = float(alpha)
        self.c2 = None if c2 is None else float(c2)
        self.chart_radius = float(chart_radius)
        self.c2_margin = float(c2_margin)
        self.name = name

    def _atlas_chart(self, q):
        for chart in self.charts:
            local = chart.to_local(q)
            if chart.in_domain(local[:, :-1])[0] and chart.graph_residual(q)[0] <= 1e-8:
                return chart, float(np.linalg.norm(local[0, :-1]))
        raise ChartMismatchError("No chart of %s covers q=%s" % (self.name, list(np.ravel(q))))

    def chart_at(self, q):
        """A chart anchored exactly at the boundary point q."""
        q = np.asarray(q, dtype=float).ravel()
        if self.surface is not None:
            surface, radius, alpha, c2 = self.surface, self.chart_radius, self.alpha, self.c2
        else:
            base, offset = self._atlas_chart(q)
            if offset == 0.0:
                return base
            surface = base.as_surface()
            radius = base.radius - offset
            alpha = base.alpha
            c2 = base.c2 if base.c2 is not None else self.c2
        chart = surface.chart_at(q, radius, alpha, c2)
        if chart.c2 is None:
            chart.c2 = (1.0 + self.c2_margin) * estimate_c2(chart)
        return chart

    def covers(self, points, tol=1e-8):
        """Whether each point lies on the boundary (within `tol`)."""
        points = as_points(points, n=self.n)
        if self.surface is not None:
            return self.surface.distance_proxy(points) <= tol
        covered = np.zeros(len(points), dtype=bool)
        for chart in self.charts:
            covered |= chart.graph_residual(points) <= tol
        return covered

    def transformed(self, iso):
        """The domain moved by a rigid motion (for L o f)."""
        reference = None if self.reference_map is None else self.reference_map.compose_isometry(iso)
        return DomainSpec(
            self.n,
            surface=None if self.surface is None else self.surface.transformed(iso),
            charts=[chart.transformed(iso) for chart in self.charts],
            delta=self.delta,
            rho=self.rho,
            lipschitz_G=self.lipschitz_G,
            reference_map=reference,
            reference_distortion=self.reference_distortion,
            alpha=self.alpha,
            c2=self.c2,
            chart_radius=self.chart_radius,
            c2_margin=self.c2_margin,
            name="L(%s)" % self.name,
        )

    def __repr__(self):
        return "DomainSpec(%s, n=%d, delta=%g)" % (self.name, self.n, self.delta)
