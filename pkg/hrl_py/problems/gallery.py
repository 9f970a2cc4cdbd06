"""Gallery of harmonic quasiconformal maps with their target domains.

Planar maps (n = 2):

    identity        f(x) = x onto the unit disk
    linear-diag     f(x) = diag(1.2, 0.8) x onto an ellipse
    linear-shear    f(x) = [[1, 0.3], [0, 1]] x onto an ellipse
    zcz-c           f(z) = z + c conj(z), c in {0.1, 0.3, 0.5}; the image is the
                    ellipse with semi-axes 1+c, 1-c and K = (1+c)/(1-c)
    circle-diffeo   Poisson extension of theta -> theta + 0.2 sin(theta),
                    a harmonic diffeomorphism of the disk (no closed form)

Spatial maps (n = 3):

    identity, linear-diag (diag(1.2, 1.0, 0.8))
    perturbed-cubic      f = x + 0.05 grad(x1 x2 x3)
    perturbed-quadratic  f = x + 0.1 grad((x1^2 - x2^2) / 2)

Each map comes with a DomainSpec whose reference map G is a scaling about
f(0) onto a ball containing f(B).
"""

import numpy as np
from scipy.special import jv

from hrl_py.framework.errors import ConfigurationError
from hrl_py.framework.extension import BoundaryData
from hrl_py.framework.sphere import check_dimension
from hrl_py.representations.ball_map import BallMap
from hrl_py.representations.charts import DomainSpec, LevelSetSurface, QuadricSurface
from hrl_py.utils.math import row_norms, spiral_points

DELTA = 0.2
CHART_RADIUS = 0.3
PERTURBATION_SAMPLES = 4096


def _linear_problem(matrix, name, chart_radius=CHART_RADIUS):
    M = np.asarray(matrix, dtype=float)
    n = M.shape[0]
    ball_map = BallMap.linear(M, name=name)
    lipschitz = float(np.linalg.svd(M, compute_uv=False)[0])
    if np.allclose(M, np.eye(n)):
        surface = QuadricSurface.sphere(n)
    else:
        surface = QuadricSurface.image_of_ball(M, name="image(%s)" % name)
    domain = DomainSpec(
        n,
        surface=surface,
        delta=DELTA,
        rho=2.0 * chart_radius,
        lipschitz_G=lipschitz,
        reference_map=BallMap.scaling(n, lipschitz, name="G"),
        alpha=1.0,
        chart_radius=chart_radius,
        name=surface.name,
    )
    return ball_map, domain


def _zcz(c):
    def build(n):
        return _linear_problem(np.diag([1.0 + c, 1.0 - c]), "zcz-%g" % c, chart_radius=0.4)

    return build


def circle_diffeo_trace(amplitude=0.2):
    """Boundary values e^{i(theta + a sin theta)} on the unit circle."""

    def func(pts):
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        phase = theta + amplitude * np.sin(theta)
        return np.column_stack([np.cos(phase), np.sin(phase)])

    return BoundaryData(2, func, arity=2, name="circle-diffeo")


def _circle_diffeo(n, amplitude=0.2):
    trace = circle_diffeo_trace(amplitude)
    ball_map = BallMap.from_boundary_data(trace, name="circle-diffeo")
    # mean of the boundary values: the Fourier coefficient of e^{i theta} e^{i a sin theta} at 0
    center = np.array([-jv(1, amplitude), 0.0])
    lipschitz = 1.0 + float(np.linalg.norm(center))
    domain = DomainSpec(
        2,
        surface=QuadricSurface.sphere(2),
        delta=DELTA,
        rho=2.0 * CHART_RADIUS,
        lipschitz_G=lipschitz,
        reference_map=BallMap.scaling(2, lipschitz, center=center, name="G"),
        alpha=1.0,
        chart_radius=CHART_RADIUS,
        name="disk",
    )
    return ball_map, domain


def perturbed_map(gradient, hessian, eps, name):
    """x -> x + eps grad h(x) for a harmonic polynomial h."""
    n = 3
    return BallMap(
        n,
        lambda pts: pts + eps * gradient(pts),
        jacobian=lambda pts: np.eye(n)[None, :, :] + eps * hessian(pts),
        name=name,
    )


def _cubic_gradient(pts):
    x1, x2, x3 = pts.T
    return np.column_stack([x2 * x3, x1 * x3, x1 * x2])


def _cubic_hessian(pts):
    x1, x2, x3 = pts.T
    zero = np.zeros(len(pts))
    return np.stack(
        [
            np.column_stack([zero, x3, x2]),
            np.column_stack([x3, zero, x1]),
            np.column_stack([x2, x1, zero]),
        ],
        axis=1,
    )


def perturbed_cubic(eps=0.05):
    return perturbed_map(_cubic_gradient, _cubic_hessian, eps, "perturbed-cubic")


def _perturbed_cubic(n, eps=0.05):
    ball_map = perturbed_cubic(eps)
    radius = 1.01 * float(np.max(row_norms(ball_map(spiral_points(3, PERTURBATION_SAMPLES)))))
    domain = DomainSpec(
        3,
        surface=LevelSetSurface.image_of_ball(ball_map),
        delta=DELTA,
        rho=2.0 * CHART_RADIUS,
        lipschitz_G=radius,
        reference_map=BallMap.scaling(3, radius, name="G"),
        alpha=1.0,
        chart_radius=CHART_RADIUS,
        name="image(perturbed-cubic)",
    )
    return ball_map, domain


def _perturbed_quadratic(n, eps=0.1):
    # grad h = (x1, -x2, 0) makes the map linear
    return _linear_problem(np.diag([1.0 + eps, 1.0 - eps, 1.0]), "perturbed-quadratic")


_GALLERY = {
    2: {
        "identity": lambda n: _linear_problem(np.eye(2), "identity"),
        "linear-diag": lambda n: _linear_problem(np.diag([1.2, 0.8]), "linear-diag"),
        "linear-shear": lambda n: _linear_problem([[1.0, 0.3], [0.0, 1.0]], "linear-shear"),
        "zcz-0.1": _zcz(0.1),
        "zcz-0.3": _zcz(0.3),
        "zcz-0.5": _zcz(0.5),
        "circle-diffeo": _circle_diffeo,
    },
    3: {
        "identity": lambda n: _linear_problem(np.eye(3), "identity"),
        "linear-diag": lambda n: _linear_problem(np.diag([1.2, 1.0, 0.8]), "linear-diag"),
        "perturbed-cubic": _perturbed_cubic,
        "perturbed-quadratic": _perturbed_quadratic,
    },
    4: {
        "identity": lambda n: _linear_problem(np.eye(4), "identity"),
        "linear-diag": lambda n: _linear_problem(np.diag([1.2, 1.1, 0.9, 0.8]), "linear-diag"),
    },
}


def gallery_names(n):
    check_dimension(n)
    return sorted(_GALLERY[n])


def make_problem(name, n):
    """(BallMap, DomainSpec) for a gallery entry."""
    check_dimension(n)
    if name not in _GALLERY[n]:
        raise ConfigurationError(
            "Unknown gallery map '%s' for n=%d; choose from %s" % (name, n, gallery_names(n))
        )
    return _GALLERY[n][name](n)


def gallery(n):
    """Every gallery map of dimension n, in name order."""
    return [make_problem(name, n)[0] for name in gallery_names(n)]


def gallery_map(n, name):
    return make_problem(name, n)[0]


def gallery_domain(n, name):
    return make_problem(name, n)[1]
