"""Configuration variables"""

from logging import CRITICAL, ERROR, WARNING, INFO, DEBUG # pylint: disable=unused-import

LOG_LEVEL = INFO

# g below this counts as zero (components, active edges, F finiteness)
TAU_G = 1e-12
SIMPLEX_TOL = 1e-12
CONTINUITY_TOL = 1e-9

# solver defaults, overridable through wgeodesic.solver.solver_options
DEFAULT_K = 64
DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 20000
DEFAULT_JUMP_ABS = 1e-2
DEFAULT_MOBILITY = "arithmetic"
CHECK_EVERY = 10
STEP_SAFETY = 0.95
# residual balancing of the primal and dual step sizes
ADAPT_ALPHA = 0.5
ADAPT_DECAY = 0.95
BALANCE_FACTOR = 1.5

JUMP_MEDIAN_FACTOR = 10.0

# dual_h ascent over the simplex
DUAL_H_TOL = 1e-10
DUAL_H_MAX_ITER = 5000

# quadrature and root finding
QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-12
QUAD_LIMIT = 200
ROOT_TOL = 1e-13

# ODE oracle
ODE_DELTA1 = 0.05
ODE_STEP = 1e-4
ODE_CONSERVATION_TOL = 1e-8
ODE_MAX_HALVINGS = 6

AUDIT_SAMPLES = 1000
CSV_FLOAT_FORMAT = "%.17g"
