"""
Boundary data on S^{n-1} and their Poisson extensions into the ball.

:class:`BoundaryData` wraps a vectorized function F: S^{n-1} -> R^m.
:class:`HarmonicField` is u = P[F]; its value and Jacobian at interior
points are quadratures of F against the Poisson kernel and the gradient
kernel. By default every evaluation point gets its own graded rule,
refined around x/|x| at the scale of 1 - |x|.
"""

from collections import namedtuple

import numpy as np

from hrl_py.framework.kernels import STABILIZE_RADIUS, gradient_kernel, poisson_kernel
from hrl_py.framework.sphere import (
    AZIMUTH_DEGREE,
    INNER_LEVELS,
    PANEL_ORDER,
    SpherePoint,
    ball_coords,
    check_dimension,
    make_graded_quadrature,
    points_at_chords,
    required_degree,
    sphere_coords,
)
from hrl_py.utils.math import row_norms, sphere_uniform

HolderMeta = namedtuple("HolderMeta", ["mu", "M"])

# Value of an extension (or its Jacobian) together with the resolution flag
Evaluation = namedtuple("Evaluation", ["value", "accurate"])


class BoundaryData:
    """A function F: S^{n-1} -> R^m.

    Args:
        n (int): dimension of the ambient space.
        func (callable): maps an (N, n) array of unit vectors to (N,) or (N, m) values.
        arity (int): m; 1 for scalar data, n for boundary traces of maps.
        holder_meta (tuple): optional known (mu, M) with |F(xi)-F(eta)| <= M|xi-eta|^mu.
        name (str): label used in tables and reports.
    """

    def __init__(self, n, func, arity=1, holder_meta=None, name=None):
        check_dimension(n)
        if arity < 1:
            raise ValueError("Arity must be at least 1, got %s" % arity)
        self.n = n
        self.arity = int(arity)
        self._func = func
        self.holder_meta = HolderMeta(*holder_meta) if holder_meta is not None else None
        self.name = name if name is not None else "data"

    def __call__(self, points):
        """Values at a batch of sphere points, shape (N, m)."""
        pts = sphere_coords(points, n=self.n)
        values = np.asarray(self._func(pts), dtype=float).reshape(len(pts), self.arity)
        if not np.all(np.isfinite(values)):
            bad = pts[np.argmax(~np.all(np.isfinite(values), axis=1))]
            raise ValueError("Boundary data '%s' is not finite at xi=%s" % (self.name, list(bad)))
        return values

    def at(self, xi):
        """Value at a single sphere point, shape (m,)."""
        return self(xi)[0]

    def map(self, fn, arity=None, name=None):
        """Post-composes with `fn`, which acts on (N, m) value arrays."""
        return BoundaryData(
            self.n,
            lambda pts: fn(self(pts)),
            arity=self.arity if arity is None else arity,
            name=name if name is not None else "map(%s)" % self.name,
        )

    def component(self, j):
        return self.map(lambda v: v[:, j], arity=1, name="%s[%d]" % (self.name, j))

    def verify_holder(self, pairs=1000, seed=0):
        """Spot-checks the declared Holder metadata on random pairs.

        Half of the pairs are uniform, half are close pairs with chords down
        to 1e-6. Returns True when no pair exceeds M|xi-eta|^mu (or when there
        is no metadata)."""
        if self.holder_meta is None:
            return True
        mu, M = self.holder_meta
        rng = np.random.default_rng(seed)
        a = sphere_uniform(rng, pairs, self.n)
        b = sphere_uniform(rng, pairs, self.n)
        half = pairs // 2
        chords = 10.0 ** rng.uniform(-6.0, 0.0, size=half)
        b[:half] = np.array([points_at_chords(p, [c], rng)[0] for p, c in zip(a[:half], chords)])
        diff = row_norms(self(a) - self(b))
        dist = row_norms(a - b)
        return bool(np.all(diff <= M * dist**mu * (1.0 + 1e-9) + 1e-13))

    @classmethod
    def constant(cls, n, value):
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(
            n,
            lambda pts: np.tile(value, (len(pts), 1)),
            arity=len(value),
            holder_meta=(1.0, 0.0),
            name="constant",
        )

    @classmethod
    def coordinate(cls, n, j):
        return cls(n, lambda pts: pts[:, j], holder_meta=(1.0, 1.0), name="xi_%d" % (j + 1))

    @classmethod
    def identity(cls, n):
        return cls(n, lambda pts: pts, arity=n, holder_meta=(1.0, 1.0), name="identity")

    @classmethod
    def distance_power(cls, eta, mu):
        """F(xi) = |xi - eta|^mu; anchored at eta its Holder constant is exactly 1."""
        eta = sphere_coords(eta)[0]
        return cls(
            len(eta),
            lambda pts: row_norms(pts - eta[None, :]) ** mu,
            holder_meta=(min(mu, 1.0), 2.0 ** max(mu - 1.0, 0.0) * max(mu, 1.0)),
            name="|xi-eta|^%g" % mu,
        )

    def __repr__(self):
        return "BoundaryData(%s, n=%d, m=%d)" % (self.name, self.n, self.arity)


class HarmonicField:
    """The Poisson extension u = P[F] of boundary data.

    Args:
        data (BoundaryData): the boundary values F.
        rule (QuadratureRule): a fixed rule for every point. When omitted
            each point x gets a graded rule centred at x/|x| with finest
            scale (1-|x|)/2.
        min_gap (float): below this value of 1-|x| graded results are
            flagged as unresolved.
    """

    def __init__(
        self,
        data,
        rule=None,
        panel_order=PANEL_ORDER,
        inner_levels=INNER_LEVELS,
        azimuth_degree=AZIMUTH_DEGREE,
        min_gap=1e-12,
    ):
        if rule is not None and rule.n != data.n:
            raise ValueError("Rule is on S^%d, data on S^%d" % (rule.n - 1, data.n - 1))
        self.data = data
        self.rule = rule
        self.panel_order = panel_order
        self.inner_levels = inner_levels
        self.azimuth_degree = azimuth_degree
        self.min_gap = min_gap
        self._rule_values = None

    @property
    def n(self):
        return self.data.n

    @property
    def arity(self):
        return self.data.arity

    def rule_for(self, x):
        """The rule used at x and whether it resolves the kernel there."""
        x = ball_coords(x)
        r = float(np.linalg.norm(x))
        if self.rule is not None:
            return self.rule, self.rule.degree >= required_degree(r)
        center = x / r if r > 0.0 else SpherePoint.axis(self.n).coords
        rule = make_graded_quadrature(
            self.n,
            center,
            0.5 * (1.0 - r),
            panel_order=self.panel_order,
            inner_levels=self.inner_levels,
            azimuth_degree=self.azimuth_degree,
        )
        return rule, (1.0 - r) >= self.min_gap

    def _values(self, rule):
        if rule is self.rule:
            if self._rule_values is None:
                self._rule_values = self.data(rule.nodes)
            return self._rule_values
        return self.data(rule.nodes)

    def _check(self, x):
        x = ball_coords(x)
        if len(x) != self.n:
            raise ValueError("Point in R^%d for a field on B^%d" % (len(x), self.n))
        return x

    def evaluate(self, x):
        """u(x) with its accuracy flag."""
        x = self._check(x)
        rule, accurate = self.rule_for(x)
        p = poisson_kernel(x, rule.nodes)
        return Evaluation(rule.integrate(p[:, None] * self._values(rule)), accurate)

    def evaluate_gradient(self, x, anchor=None):
        """Jacobian of u at x (shape (m, n)) with its accuracy flag.

        With an anchor eta the integrand is Q(x, xi)[F(xi) - F(eta)], which
        has the same integral because Q has zero mean. Beyond the
        stabilization radius the anchor defaults to x/|x|."""
        x = self._check(x)
        r = float(np.linalg.norm(x))
        if anchor is None and r > STABILIZE_RADIUS:
            anchor = x / r
        rule, accurate = self.rule_for(x)
        q = gradient_kernel(x, rule.nodes)
        values = self._values(rule)
        if anchor is not None:
            values = values - self.data.at(anchor)[None, :]
        return Evaluation(rule.integrate(values[:, :, None] * q[:, None, :]), accurate)

    def __repr__(self):
        rule = self.rule.name if self.rule is not None else "graded"
        return "HarmonicField(%s, rule=%s)" % (self.data.name, rule)


def extend(field, x):
    """u(x) = integral of P(x, xi) F(xi) over the sphere, shape (m,)."""
    return field.evaluate(x).value


def gradient(field, x, anchor=None):
    """Jacobian of the extension at x, shape (m, n); rows are component gradients."""
    return field.evaluate_gradient(x, anchor=anchor).value
