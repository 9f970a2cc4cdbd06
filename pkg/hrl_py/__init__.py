import hrl_py.utils as util
from hrl_py.utils.misc import json_safe, parse_override

# Framework
from hrl_py.framework.errors import *
from hrl_py.framework.sphere import (
    SUPPORTED_DIMENSIONS,
    SpherePoint,
    BallPoint,
    QuadratureRule,
    make_quadrature,
    make_graded_quadrature,
    required_degree,
    zonal_integrate,
    zonal_integrate_chordal,
    geodesic_chord_identity,
)
from hrl_py.framework.kernels import (
    KernelValue,
    chordal_quantity,
    poisson_kernel,
    gradient_kernel,
    evaluate_kernels,
    kernel_bound_certificate,
)
from hrl_py.framework.extension import BoundaryData, HarmonicField, Evaluation, extend, gradient

# Representations
from hrl_py.representations.ball_map import BallMap, compose_inverse
from hrl_py.representations.charts import (
    Isometry,
    normalize_at,
    GraphChart,
    FunctionChart,
    SurfaceChart,
    QuadricChart,
    BoundarySurface,
    QuadricSurface,
    LevelSetSurface,
    DomainSpec,
    estimate_c2,
)
from hrl_py.utils.interfaces.conversion import load_atlas, save_atlas

# Algorithms
from hrl_py.algorithms.regularity import (
    HolderSampler,
    HolderEstimate,
    DecayProfile,
    holder_estimate,
    decay_profile,
    bounded_gradient_check,
    radial_holder_from_gradient,
    global_holder_check,
    geometric_grid,
    explicit_decay_constant,
    explicit_gradient_bound,
)
from hrl_py.algorithms.qc_analysis import (
    DistortionReport,
    distortion,
    mori_exponent,
    mori_check,
)
from hrl_py.algorithms.chart_bounds import (
    chart_product_bound,
    normal_component_bound,
    qc_component_propagation,
    isometry_gradient_propagation,
    spot_check_chart,
    validate_delta,
)
from hrl_py.algorithms.bootstrap import (
    ExponentLadder,
    BootstrapConfig,
    BootstrapReport,
    make_ladder,
    initial_exponent,
    bootstrap_verify,
    lipschitz_certificate,
)

# Problems
from hrl_py.problems.oracles import oracle_harmonics
from hrl_py.problems.gallery import gallery, gallery_names, make_problem
