"""Discrete geodesics: paths, the primal-dual solver and certificates"""

from wgeodesic.solver.certificate import (CertificateReport, certify,
                                          hamiltonian_system_residual,
                                          normalize_dual)
from wgeodesic.solver.feasible import (feasible_path, hodge_lift,
                                       interpolated_path, tangent_projection)
from wgeodesic.solver.paths import (DiscretePath, DualPath, energy_drift,
                                    energy_profile)
from wgeodesic.solver.pdhg import GeodesicResult, solve_geodesic, solver_options
