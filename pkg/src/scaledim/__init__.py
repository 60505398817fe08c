"""Scale-local Rényi dimensions of 2-D point distributions.

Pipeline: generate points (``maps``) -> micro-scale occupancy grid and coarse
rebinning (``grid``) -> Rényi entropies on a scale schedule (``entropy``) ->
scale-local dimensions, running averages and estimators (``dimension``) ->
q-derivative and dimension-transport diagnostics (``transport``).  ``oracle``
holds brute-force references used for checking.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .grid import (HENON_BOX, Box2, CoarseHistogram, MicroGrid, OffsetVector, ScalePoint,  # noqa: F401
                   build_microgrid, dither_offsets, rebin, scale_points, scale_schedule)
from .maps import (MapParams, Orbit, cantor_dust, henon_orbit, iterate_henon,  # noqa: F401
                   random_henon_orbit, uniform_lattice)
from .entropy import ScaleScan, correlation_sum, entropy_scan, renyi_entropy  # noqa: F401
from .dimension import (estimator_chi2_ratio, estimator_Di, estimator_Dprime,  # noqa: F401
                        estimator_report, fit_dimension, interval_average, running_average,
                        scale_local)
from .transport import dimension_transport, kullback_check, monotonicity_report, q_derivative_fd  # noqa: F401
