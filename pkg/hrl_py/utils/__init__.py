# Assorted convenient functions
from hrl_py.utils.math import (
    as_points,
    unit,
    row_norms,
    compensated_sum,
    householder_to_axis,
    fd_jacobian,
    discrete_laplacian,
    loglog_slope,
)
from hrl_py.utils.misc import json_safe, parse_override
from hrl_py.utils.parallel import parallel_map, thread_count
from hrl_py.utils.polynomial import Polynomial
from hrl_py.utils import typ
