"""
Maps of the unit ball into R^n, with analytic or finite-difference Jacobians.
"""

import numpy as np

from hrl_py.framework.extension import BoundaryData, HarmonicField
from hrl_py.framework.sphere import check_dimension
from hrl_py.utils.math import as_points, fd_jacobian, row_norms


class BallMap:
    """A map f: B^n -> R^n.

    Args:
        n (int): dimension.
        func (callable): vectorized, maps (N, n) points to (N, n) images.
        jacobian (callable): optional analytic Jacobian, (N, n) -> (N, n, n).
        boundary_trace (BoundaryData): F = f restricted to the sphere. When
            omitted `func` is assumed to extend continuously to the sphere and
            is evaluated there directly.
        name (str): label used in reports and by the gallery.
    """

    def __init__(self, n, func, jacobian=None, boundary_trace=None, name="map"):
        check_dimension(n)
        self.n = n
        self._func = func
        self._jacobian = jacobian
        self._trace = boundary_trace
        self.name = name

    def __call__(self, points):
        points = as_points(points, n=self.n)
        values = np.asarray(self._func(points), dtype=float).reshape(len(points), self.n)
        if not np.all(np.isfinite(values)):
            raise ValueError("Map '%s' returned non-finite values" % self.name)
        return values

    @property
    def has_analytic_jacobian(self):
        return self._jacobian is not None

    def jacobian_at(self, points, analytic=True):
        """Jacobians at a batch of points, shape (N, n, n)."""
        points = as_points(points, n=self.n)
        if analytic and self._jacobian is not None:
            return np.asarray(self._jacobian(points), dtype=float).reshape(len(points), self.n, self.n)
        return fd_jacobian(self, points)

    def check_jacobian(self, points, tol=1e-5):
        """Max deviation between the analytic and finite-difference Jacobians."""
        if self._jacobian is None:
            return 0.0, True
        deviation = float(np.max(np.abs(self.jacobian_at(points) - self.jacobian_at(points, analytic=False))))
        return deviation, deviation <= tol

    def trace(self):
        """Boundary values F = f|_S as vector BoundaryData."""
        if self._trace is not None:
            return self._trace
        return BoundaryData(self.n, self.__call__, arity=self.n, name=self.name)

    def invert(self, targets, tol=1e-13, max_iter=50):
        """Solves f(x) = y for a batch of targets with Newton's method."""
        y = as_points(targets, n=self.n)
        x = y.copy()
        for _ in range(max_iter):
            residual = self(x) - y
            if np.max(row_norms(residual)) < tol:
                break
            step = np.linalg.solve(self.jacobian_at(x), residual[..., None])[..., 0]
            x = x - step
        return x

    def compose_isometry(self, iso):
        """L o f for a rigid motion L."""
        jacobian = None
        if self._jacobian is not None:
            jacobian = lambda pts: np.einsum("ij,njk->nik", iso.rotation, self._jacobian(pts))
        trace = self.trace()
        return BallMap(
            self.n,
            lambda pts: iso.apply(self._func(pts)),
            jacobian=jacobian,
            boundary_trace=trace.map(iso.apply, name="L(%s)" % trace.name),
            name="L(%s)" % self.name,
        )

    def __repr__(self):
        return "BallMap(%s, n=%d)" % (self.name, self.n)

    @classmethod
    def linear(cls, matrix, name="linear"):
        A = np.asarray(matrix, dtype=float)
        n = A.shape[0]
        return cls(
            n,
            lambda pts: pts @ A.T,
            jacobian=lambda pts: np.broadcast_to(A, (len(pts), n, n)),
            name=name,
        )

    @classmethod
    def scaling(cls, n, factor, center=None, name=None):
        """x -> center + factor * x."""
        c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
        return cls(
            n,
            lambda pts: c[None, :] + factor * pts,
            jacobian=lambda pts: np.broadcast_to(factor * np.eye(n), (len(pts), n, n)),
            name=name if name is not None else "scale(%g)" % factor,
        )

    @classmethod
    def from_boundary_data(cls, data, field=None, name=None, boundary_gap=1e-12):
        """The Poisson extension of vector boundary data as a map.

        Points with 1 - |x| below `boundary_gap` take the boundary value."""
        if data.arity != data.n:
            raise ValueError("A ball map needs boundary data with arity n=%d" % data.n)
        field = field if field is not None else HarmonicField(data)

        def func(pts):
            out = np.empty_like(pts)
            r = row_norms(pts)
            for i, (x, radius) in enumerate(zip(pts, r)):
                if radius >= 1.0 - boundary_gap:
                    out[i] = data.at(x)
                else:
                    out[i] = field.evaluate(x).value
            return out

        return cls(data.n, func, boundary_trace=data, name=name if name is not None else data.name)


def compose_inverse(reference, f, name=None):
    """g = G^{-1} o f, with G inverted by Newton's method.

    The Jacobian is analytic when both maps have one."""
    jacobian = None
    if reference.has_analytic_jacobian and f.has_analytic_jacobian:

        def jacobian(pts):
            inner = reference.invert(f(pts))
            return np.linalg.solve(reference.jacobian_at(inner), f.jacobian_at(pts))

    return BallMap(
        f.n,
        lambda pts: reference.invert(f(pts)),
        jacobian=jacobian,
        name=name if name is not None else "%s^-1 o %s" % (reference.name, f.name),
    )
