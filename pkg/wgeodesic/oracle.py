"""Reference geodesics with known action

Two-vertex geodesics are explicit up to quadrature: the mass on vertex
1 moves at constant speed in the coordinate G(x) = ∫₀ˣ dr/√g(r, 1 - r).
On the 3-vertex graph with ω₁₂ = ω₂₃ = 1, ω₁₃ = 0 and the arithmetic
mean, two further geodesics are known: one that stays on the face
ρ₁ = 0, and one with interior endpoints that touches that face at its
midpoint, obtained by integrating the reduced Euler-Lagrange equations.
"""

from dataclasses import dataclass
from logging import info, warning

import numpy as np
from scipy.integrate import solve_ivp

from wgeodesic.config import (DEFAULT_JUMP_ABS, ODE_CONSERVATION_TOL,
                              ODE_DELTA1, ODE_MAX_HALVINGS, ODE_STEP, TAU_G)
from wgeodesic.exceptions import OracleError
from wgeodesic.graph import boundary_example_graph, two_vertex_graph
from wgeodesic.mobility import (builtin, inverse_section_primitive,
                                is_builtin, require_finite_c_g,
                                section_primitive)
from wgeodesic.solver import (DiscretePath, DualPath,
                              hamiltonian_system_residual, normalize_dual)


class TwoVertexGeodesic:
    """Geodesic on the graph 1 - 2 with weight omega12

    g (Mobility)
    omega12 (float): positive edge weight
    rho_start, rho_end (float): mass on vertex 1 at t = 0 and t = 1
    """

    def __init__(self, g, omega12, rho_start, rho_end):
        assert omega12 > 0
        for mass in (rho_start, rho_end):
            if not 0.0 <= mass <= 1.0:
                raise ValueError(f"Mass on vertex 1 must be in [0, 1], "
                                 f"got {mass!r}")
        require_finite_c_g(g)
        self.g = g
        self.omega12 = float(omega12)
        self.rho_start = float(rho_start)
        self.rho_end = float(rho_end)
        self.graph = two_vertex_graph(self.omega12)
        self._total = section_primitive(g, 1.0)
        self._offset = self.G_fn(self.rho_start)
        self.C = self.G_fn(self.rho_end) - self._offset


    def __repr__(self):
        return (f"TwoVertexGeodesic({self.g.name}, {self.omega12}, "
                f"{self.rho_start} -> {self.rho_end})")


    def G_fn(self, tau): # pylint: disable=invalid-name
        """Return ∫₀^τ dr / √g(r, 1 - r)"""
        return section_primitive(self.g, tau)


    def G_inv(self, value): # pylint: disable=invalid-name
        """Return τ with G(τ) = value"""
        return inverse_section_primitive(self.g, value, self._total)


    @property
    def w_squared(self):
        """W_g² = C²/ω₁₂"""
        return self.C ** 2 / self.omega12


    @property
    def action(self):
        """Action C²/(2ω₁₂) of the geodesic"""
        return 0.5 * self.w_squared


    def rho1_at(self, t):
        """Return the mass on vertex 1 at time t"""
        if self.C == 0:
            return self.rho_start
        return self.G_inv(self._offset + self.C * t)


    def sample(self, times):
        """Return the densities at the given times as a len(times)×2 array"""
        first = np.array([self.rho1_at(t) for t in times])
        return np.stack([first, 1.0 - first], axis=1)


    def _path_from_times(self, times):
        rho = self.sample(times)
        K = len(times) - 1
        momenta = np.diff(rho[:, 0])[:, None] * K / np.sqrt(self.omega12)
        return DiscretePath(self.graph, self.g, rho, momenta)


    def path(self, K):
        """Return the geodesic sampled at the nodes k/K"""
        return self._path_from_times(np.linspace(0.0, 1.0, K + 1))


    def path_warped(self, K, power=2.0):
        """Feasible, non-geodesic path through the same curve at t^power"""
        return self._path_from_times(np.linspace(0.0, 1.0, K + 1) ** power)


    def dual(self, K, path=None):
        """Return the gauge-normalized dual of the sampled geodesic

        The midpoint potential is (v/√ω₁₂, 0), where m = g v on the edge.
        """

        path = self.path(K) if path is None else path
        rho_mid = path.rho_mid()
        mobility = self.g(rho_mid[:, 0], rho_mid[:, 1])
        momenta = path.m_edges()[:, 0]
        velocity = np.where(mobility > TAU_G,
                            momenta / np.maximum(mobility, TAU_G), 0.0)
        mu = np.zeros((path.K, 2))
        mu[:, 0] = velocity / np.sqrt(self.omega12)
        return normalize_dual(DualPath.from_midpoint_potentials(
            self.graph, self.g, path, mu))


def two_vertex_geodesic(g, omega12, rho0_1, rho1_1, K):
    """Return (path, dual, W²) of the two-vertex geodesic"""
    geodesic = TwoVertexGeodesic(g, omega12, rho0_1, rho1_1)
    path = geodesic.path(K)
    return path, geodesic.dual(K, path), geodesic.w_squared


def three_vertex_boundary(g, K, rho0=(0.0, 0.0, 1.0), rho1=(0.0, 0.5, 0.5)):
    """Return (path, W²) of the geodesic that stays on the face ρ₁ = 0

    Both endpoints have no mass on vertex 1. Moving mass of vertex 1
    to vertex 2 never increases the action, so the geodesic is the
    two-vertex geodesic of the edge (2, 3).

    Raise ValueError for a non-arithmetic mobility or endpoints with
    mass on vertex 1
    """

    if not is_builtin(g, "arithmetic"):
        raise ValueError("The face geodesic is known for the arithmetic "
                         f"mean only, got {g.name}")
    rho0, rho1 = np.asarray(rho0, dtype=float), np.asarray(rho1, dtype=float)
    if rho0[0] != 0 or rho1[0] != 0:
        raise ValueError("Endpoints must have no mass on vertex 1")

    graph = boundary_example_graph()
    edge = TwoVertexGeodesic(g, 1.0, rho0[1], rho1[1])
    pair = edge.sample(np.linspace(0.0, 1.0, K + 1))
    rho = np.column_stack([np.zeros(K + 1), pair])
    momenta = np.zeros((K, len(graph.edges)))
    momenta[:, graph.edges.index((1, 2))] = -np.diff(rho[:, 2]) * K
    return DiscretePath(graph, g, rho, momenta), edge.w_squared


def reduced_lagrangian_l0(q, u):
    """Return u₁²/(1 - q₃) + u₃²/(1 - q₁)

    This is the action integrand of the arithmetic mean on the 3-vertex
    boundary graph in the coordinates q = (ρ₁, ρ₃), u = q̇.
    """

    q1, q3 = q
    u1, u3 = u
    if q3 >= 1 or q1 >= 1:
        raise ValueError(f"Reduced Lagrangian needs q1, q3 < 1, got {q}")
    return u1 ** 2 / (1.0 - q3) + u3 ** 2 / (1.0 - q1)


def _reduced_equations(_, state):
    """Euler-Lagrange equations of the reduced Lagrangian and l₁"""
    q1, q3, u1, u3, _ = state
    return [u1,
            u3,
            -u1 * u3 / (1.0 - q3) + 0.5 * u3 ** 2 * (1.0 - q3) / (1.0 - q1) ** 2,
            -u1 * u3 / (1.0 - q1) + 0.5 * u1 ** 2 * (1.0 - q1) / (1.0 - q3) ** 2,
            -u1 ** 2 / (1.0 - q3) ** 2]


@dataclass
class OdeGeodesic:
    """Boundary-touching geodesic with interior endpoints and diagnostics"""

    delta1: float
    step: float
    times: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    q_tilde: np.ndarray
    l: np.ndarray
    path: DiscretePath
    dual: DualPath
    conservation_drift: float
    q1_max: float
    q3_min: float
    q3_max: float
    q1_ddot0: float
    q1_ddot_min: float
    hamiltonian_residual: float
    halvings: int = 0

    @property
    def action(self):
        """Exact action 4δ₁² of the rescaled geodesic"""
        return 4.0 * self.delta1 ** 2


    def window_violations(self):
        """Return the list of violated a posteriori bounds"""
        violations = []
        if self.q1_max > 0.085:
            violations.append(f"|q1| reaches {self.q1_max:.4g} > 0.085")
        if not 0.48 <= self.q3_min <= self.q3_max <= 0.62:
            violations.append(f"q3 leaves [0.48, 0.62]: "
                              f"[{self.q3_min:.4g}, {self.q3_max:.4g}]")
        if self.q1_ddot_min < 0.1:
            violations.append(f"q1'' drops to {self.q1_ddot_min:.4g} < 0.1")
        if np.any(self.q[:, 0] < 0.05 * self.times ** 2 - 1e-15):
            violations.append("q1 falls below 0.05 t^2")
        return violations


def _integrate(delta1, step):
    count = int(round(2.0 * delta1 / step))
    if count < 2 or abs(count * step - 2.0 * delta1) > 1e-9 * delta1:
        raise ValueError(f"step {step!r} must divide 2*delta1 = "
                         f"{2.0 * delta1!r}")
    times = np.linspace(-delta1, delta1, count + 1)
    initial = [0.0, 0.5, 0.0, 1.0, 0.0]
    settings = {"method": "DOP853", "rtol": 1e-12, "atol": 1e-14}

    backward_times = times[times <= 0][::-1]
    forward_times = times[times > 0]
    backward = solve_ivp(_reduced_equations, (0.0, -delta1), initial,
                         t_eval=backward_times, **settings)
    forward = solve_ivp(_reduced_equations, (0.0, delta1), initial,
                        t_eval=forward_times, **settings)
    if not (backward.success and forward.success):
        raise OracleError(f"ODE integration failed: {backward.message} / "
                          f"{forward.message}")
    states = np.hstack([backward.y[:, ::-1], forward.y]).T
    return times, states


def _build(delta1, step, jump_abs):
    times, states = _integrate(delta1, step)
    q, qdot, l1 = states[:, :2], states[:, 2:4], states[:, 4]
    q1, q3 = q[:, 0], q[:, 1]
    u1, u3 = qdot[:, 0], qdot[:, 1]

    conserved = u1 ** 2 / (1.0 - q3) + u3 ** 2 / (1.0 - q1)
    drift = float(np.max(np.abs(conserved - 1.0)))
    if drift > ODE_CONSERVATION_TOL:
        raise OracleError(f"Conserved quantity drifts by {drift:.3g}, more "
                          f"than {ODE_CONSERVATION_TOL:g}; reduce the step")

    l2 = l1 - 2.0 * u1 / (1.0 - q3)
    l3 = l2 + 2.0 * u3 / (1.0 - q1)
    l = np.column_stack([l1, l2, l3])
    q_tilde = np.column_stack([q1, 1.0 - q1 - q3, q3])
    accelerations = np.array([_reduced_equations(0.0, state)[2]
                              for state in states])

    graph = boundary_example_graph()
    g = builtin("arithmetic")
    K = len(times) - 1
    momenta = np.zeros((K, len(graph.edges)))
    momenta[:, graph.edges.index((0, 1))] = np.diff(q1) * K
    momenta[:, graph.edges.index((1, 2))] = -np.diff(q3) * K
    path = DiscretePath(graph, g, q_tilde, momenta)
    dual = DualPath.from_nodes(graph, g, 2.0 * delta1 * l, jump_abs)

    return OdeGeodesic(
        delta1=delta1, step=step, times=times, q=q, qdot=qdot,
        q_tilde=q_tilde, l=l, path=path, dual=dual,
        conservation_drift=drift,
        q1_max=float(np.max(np.abs(q1))),
        q3_min=float(np.min(q3)), q3_max=float(np.max(q3)),
        q1_ddot0=float(accelerations[np.argmin(np.abs(times))]),
        q1_ddot_min=float(np.min(accelerations)),
        hamiltonian_residual=hamiltonian_system_residual(graph, g, path,
                                                         dual))


def solve_boundary_ode(delta1=ODE_DELTA1, step=ODE_STEP,
                       jump_abs=DEFAULT_JUMP_ABS):
    """Integrate the reduced equations and check the result

    The trajectory starts from q = (0, ½), q̇ = (0, 1) at t = 0 and is
    integrated over [-δ₁, δ₁]. When an a posteriori bound fails, δ₁ is
    halved, at most ODE_MAX_HALVINGS times.

    Return an OdeGeodesic; raise OracleError when the bounds cannot be
    met or the conserved quantity drifts
    """

    if not 0 < delta1 <= 0.05:
        raise ValueError(f"delta1 must be in (0, 0.05], got {delta1!r}")
    for halvings in range(ODE_MAX_HALVINGS + 1):
        result = _build(delta1, step, jump_abs)
        violations = result.window_violations()
        if not violations:
            result.halvings = halvings
            info(f"ODE geodesic: delta1 = {delta1:g}, action "
                 f"{result.action:.6g}, drift "
                 f"{result.conservation_drift:.3g}")
            return result
        warning(f"Halving delta1 = {delta1:g}: {'; '.join(violations)}")
        delta1 /= 2.0
    raise OracleError(f"ODE window bounds still fail after "
                      f"{ODE_MAX_HALVINGS} halvings")


def ode_boundary_geodesic(delta1=ODE_DELTA1, step=ODE_STEP):
    """Return (path, dual) of the boundary-touching geodesic"""
    result = solve_boundary_ode(delta1, step)
    return result.path, result.dual
