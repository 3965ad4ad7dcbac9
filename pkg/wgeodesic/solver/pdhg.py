"""Primal-dual hybrid gradient solver for the discrete geodesic problem

The primal unknowns are the interior node densities, the interval
momenta m and auxiliary mobilities θ. The objective is

    Σ_k Σ_e (Δt/2) m²/θ  with  θ ≤ g(ρ̄_i, ρ̄_j)  and  ρᵏ in the simplex,

subject to the discrete continuity equation. The continuity equation
is handled exactly by projection in the primal step; the three convex
terms are handled through their proximal maps in the dual step.
"""

from collections import namedtuple
from logging import debug, info, warning

import numpy as np
from munch import Munch
from scipy import sparse
from scipy.sparse.linalg import splu, svds

from wgeodesic.config import (ADAPT_ALPHA, ADAPT_DECAY, BALANCE_FACTOR,
                              CHECK_EVERY, CONTINUITY_TOL, DEFAULT_JUMP_ABS,
                              DEFAULT_K, DEFAULT_MAX_ITER, DEFAULT_MOBILITY,
                              DEFAULT_TOL, STEP_SAFETY, TAU_G)
from wgeodesic.energy import action, perspective
from wgeodesic.simplex import as_prob_vector, project_simplex
from wgeodesic.solver.certificate import certify, normalize_dual
from wgeodesic.solver.feasible import feasible_path
from wgeodesic.solver.paths import DiscretePath, DualPath
from wgeodesic.solver.proximal import (conjugate_step, hypograph_prox,
                                       perspective_prox, simplex_prox)


class GeodesicResult(namedtuple("GeodesicResult", ["path", "dual", "report",
                                                   "converged",
                                                   "iterations"])):
    """Outcome of solve_geodesic"""

    __slots__ = ()

    def astuple(self):
        """Return (path, dual, report)"""
        return self.path, self.dual, self.report


def solver_options(**overrides):
    """Return the solver options with overrides applied

    Raise KeyError on an unknown option name
    """

    options = Munch(K=DEFAULT_K, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                    jump_abs=DEFAULT_JUMP_ABS, mobility=DEFAULT_MOBILITY,
                    check_every=CHECK_EVERY)
    for key, value in overrides.items():
        if key not in options:
            raise KeyError(f"Unknown solver option {key!r}; expected one of "
                           f"{', '.join(sorted(options))}")
        options[key] = value
    return options


class GeodesicProblem:
    """Discrete geodesic problem in the form min Φ(Ax + c) over Bx = d

    graph (WeightedGraph)
    mobility (Mobility)
    rho0, rho1 (numpy.ndarray): endpoint probability vectors
    K (int): number of time intervals, at least 2
    weight (float): positive factor on the action; the minimizers do
        not depend on it, the multipliers scale with it
    """

    def __init__(self, graph, mobility, rho0, rho1, K, weight=1.0):
        self.graph = graph
        self.mobility = mobility
        self.rho0 = rho0
        self.rho1 = rho1
        self.K = K
        self.dt = 1.0 / K
        assert weight > 0
        self.weight = weight

        n, edges = graph.n, len(graph.edges)
        self.n_rho = (K - 1) * n
        self.n_edge = K * edges
        self.size = self.n_rho + 2 * self.n_edge
        self.kappa_scale = 0.5 * self.dt * weight

        self.operator, self.offset = self._build_operator()
        self.constraint, self.target = self._build_constraint()
        reduced = self.constraint[:-1]
        self._reduced = reduced
        self._reduced_target = self.target[:-1]
        self._factor = splu(sparse.csc_matrix(reduced @ reduced.T))


    def _midpoint_operator(self):
        """ρ̄ = M ρ_interior + ρ̄_fixed for the K interval averages"""
        n, K = self.graph.n, self.K
        averaging = sparse.diags([0.5, 0.5], [0, 1], shape=(K, K + 1))
        full = sparse.kron(averaging, sparse.identity(n), format="csr")
        interior = full[:, n:K * n]
        fixed = np.zeros((K, n))
        fixed[0] += 0.5 * self.rho0
        fixed[-1] += 0.5 * self.rho1
        return interior, fixed.ravel()


    def _build_operator(self):
        graph, K = self.graph, self.K
        n, edges = graph.n, len(graph.edges)
        midpoint, fixed = self._midpoint_operator()
        columns = np.arange(edges)
        tails = sparse.csr_matrix((np.ones(edges), (columns, graph.tails)),
                                  shape=(edges, n))
        heads = sparse.csr_matrix((np.ones(edges), (columns, graph.heads)),
                                  shape=(edges, n))
        pick_tails = sparse.kron(sparse.identity(K), tails) @ midpoint
        pick_heads = sparse.kron(sparse.identity(K), heads) @ midpoint

        zero_rho = sparse.csr_matrix((self.n_edge, self.n_rho))
        zero_edge = sparse.csr_matrix((self.n_edge, self.n_edge))
        identity = sparse.identity(self.n_edge)
        blocks = [
            [zero_rho, zero_edge, identity],            # perspective t = θ
            [zero_rho, identity, zero_edge],            # perspective s = m
            [pick_tails, zero_edge, zero_edge],         # hypograph a
            [pick_heads, zero_edge, zero_edge],         # hypograph b
            [zero_rho, zero_edge, identity],            # hypograph t
            [sparse.identity(self.n_rho),
             sparse.csr_matrix((self.n_rho, self.n_edge)),
             sparse.csr_matrix((self.n_rho, self.n_edge))]]
        operator = sparse.bmat(blocks, format="csr")

        offset = np.zeros(operator.shape[0])
        start = 2 * self.n_edge
        offset[start:start + self.n_edge] = \
            sparse.kron(sparse.identity(K), tails) @ fixed
        offset[start + self.n_edge:start + 2 * self.n_edge] = \
            sparse.kron(sparse.identity(K), heads) @ fixed
        return operator, offset


    def _build_constraint(self):
        """Rows (ρᵏ⁺¹ - ρᵏ)/Δt + D mᵏ = 0 for k = 0..K-1 over (ρ, m, θ)"""
        n, K = self.graph.n, self.K
        difference = sparse.diags([-1.0, 1.0], [0, 1], shape=(K, K + 1)) / \
            self.dt
        full = sparse.kron(difference, sparse.identity(n), format="csr")
        flux = sparse.kron(sparse.identity(K),
                           sparse.csr_matrix(self.graph.incidence))
        constraint = sparse.hstack(
            [full[:, n:K * n], flux,
             sparse.csr_matrix((K * n, self.n_edge))], format="csr")

        target = np.zeros((K, n))
        target[0] += self.rho0 / self.dt
        target[-1] -= self.rho1 / self.dt
        return constraint, target.ravel()


    def split(self, x):
        """Return (interior ρ rows, m as K×E, θ as K×E)"""
        K, n, edges = self.K, self.graph.n, len(self.graph.edges)
        rho = x[:self.n_rho].reshape(K - 1, n)
        m = x[self.n_rho:self.n_rho + self.n_edge].reshape(K, edges)
        theta = x[self.n_rho + self.n_edge:].reshape(K, edges)
        return rho, m, theta


    def pack(self, path):
        """Primal vector of a DiscretePath with θ = g(ρ̄)"""
        rho_mid = path.rho_mid()
        theta = self.mobility(rho_mid[:, self.graph.tails],
                              rho_mid[:, self.graph.heads])
        return np.concatenate([path.rho[1:-1].ravel(),
                               path.m_edges().ravel(), theta.ravel()])


    def project_affine(self, x):
        """Euclidean projection onto the continuity constraints"""
        excess = self._reduced @ x - self._reduced_target
        return x - self._reduced.T @ self._factor.solve(excess)


    def prox_objective(self, w, sigma):
        """prox of Φ/σ at w, block by block"""
        edges = self.n_edge
        t, s = perspective_prox(w[:edges], w[edges:2 * edges],
                                self.kappa_scale / sigma)
        a, b, theta = hypograph_prox(self.mobility,
                                     w[2 * edges:3 * edges],
                                     w[3 * edges:4 * edges],
                                     w[4 * edges:5 * edges])
        rows = simplex_prox(w[5 * edges:].reshape(self.K - 1, self.graph.n))
        return np.concatenate([t, s, a, b, theta, rows.ravel()])


    def objective(self, x):
        """Finite part of Σ (Δt/2) m²/θ"""
        _, m, theta = self.split(x)
        values, finite = perspective(theta, m, TAU_G)
        return self.kappa_scale * float(values[finite].sum())


    def multipliers(self, y):
        """Continuity multipliers ν with Aᵀy + Bᵀν = 0 on (ρ, m)"""
        gradient = self.operator.T @ y
        used = self.n_rho + self.n_edge
        transposed = self.constraint.T.tocsr()[:used].toarray()
        nu, *_ = np.linalg.lstsq(transposed, -gradient[:used], rcond=None)
        return nu.reshape(self.K, self.graph.n)


    def potentials(self, y):
        """Interval potentials μ of the unweighted action, K×n"""
        return self.multipliers(y) / (self.dt * self.weight)


    def initial_dual(self, x):
        """A subgradient of Φ at Ax + c for a primal point with θ = g(ρ̄)

        The perspective block gets the gradient of κ s²/t and the
        hypograph block the normal μ(-∂₁g, -∂₂g, 1) with μ = κ m²/θ²,
        so the θ columns cancel. Intervals with θ ≤ τ_g start at 0.
        """

        edges = self.n_edge
        values = self.operator @ x + self.offset
        theta, m = values[:edges], values[edges:2 * edges]
        a, b = values[2 * edges:3 * edges], values[3 * edges:4 * edges]
        with np.errstate(invalid="ignore"):
            slope_a = np.asarray(self.mobility.partial1(a, b), dtype=float)
            slope_b = np.asarray(self.mobility.partial1(b, a), dtype=float)
        usable = (theta > TAU_G) & np.isfinite(slope_a) \
            & np.isfinite(slope_b)
        ratio = np.where(usable, m / np.where(usable, theta, 1.0), 0.0)
        normal = self.kappa_scale * ratio ** 2
        slope_a = np.where(usable, slope_a, 0.0)
        slope_b = np.where(usable, slope_b, 0.0)

        y = np.zeros_like(values)
        y[:edges] = -normal
        y[edges:2 * edges] = 2.0 * self.kappa_scale * ratio
        y[2 * edges:3 * edges] = -normal * slope_a
        y[3 * edges:4 * edges] = -normal * slope_b
        y[4 * edges:5 * edges] = normal
        return y


def _restore_continuity(graph, mobility, rho, m):
    """Zero momenta on inactive edges and repair continuity on active ones"""
    dt = 1.0 / (rho.shape[0] - 1)
    rho_mid = 0.5 * (rho[:-1] + rho[1:])
    active = mobility(rho_mid[:, graph.tails],
                      rho_mid[:, graph.heads]) > TAU_G
    m = np.where(active, m, 0.0)
    residual = np.diff(rho, axis=0) / dt + m @ graph.incidence.T
    for k in range(len(m)):
        if not np.any(active[k]):
            continue
        correction, *_ = np.linalg.lstsq(graph.incidence[:, active[k]],
                                         -residual[k], rcond=None)
        m[k, active[k]] += correction
    return m


def _rms(vector):
    return float(np.sqrt(np.mean(vector ** 2))) if len(vector) else 0.0


def run_pdhg(problem, x, options):
    """Iterate from the primal point x until the stopping test passes

    The dual starts from a subgradient of Φ at the starting point. Every
    check_every iterations the primal residual (x - x⁺)/τ and the dual
    residual (y - y⁺)/σ + A(x̄ - x⁺) are compared; when one exceeds the
    other by more than BALANCE_FACTOR, τ and σ are scaled in opposite
    directions by a factor 1 - α that decays geometrically, so τσ‖A‖²
    stays below 1.

    Return (x, y, converged, iterations)
    """

    norm = svds(problem.operator, k=1, return_singular_vectors=False,
                random_state=0)[0]
    tau = sigma = STEP_SAFETY / norm
    alpha = ADAPT_ALPHA
    y = problem.initial_dual(x)
    x_bar = x.copy()
    previous = problem.objective(x)
    debug(f"PDHG with step {tau:.4g}, {problem.size} primal unknowns")

    for iteration in range(1, options.max_iter + 1):
        dual_point = y + sigma * (problem.operator @ x_bar + problem.offset)
        y_new = conjugate_step(
            dual_point, sigma, lambda w: problem.prox_objective(w, sigma))
        x_new = problem.project_affine(x - tau * (problem.operator.T @ y_new))

        if iteration % options.check_every == 0:
            current = problem.objective(x_new)
            primal = _rms(x - x_new) / tau
            dual = _rms((y - y_new) / sigma
                        + problem.operator @ (x_bar - x_new))
            change = abs(current - previous) / max(abs(previous), TAU_G)
            debug(f"Iteration {iteration}: objective {current:.12g}, "
                  f"residuals {primal:.3g} / {dual:.3g}")
            if max(primal, dual, change) <= options.tol:
                return x_new, y_new, True, iteration
            previous = current

            if primal > BALANCE_FACTOR * dual:
                tau, sigma = tau / (1.0 - alpha), sigma * (1.0 - alpha)
                alpha *= ADAPT_DECAY
            elif dual > BALANCE_FACTOR * primal:
                tau, sigma = tau * (1.0 - alpha), sigma / (1.0 - alpha)
                alpha *= ADAPT_DECAY

        x_bar = 2.0 * x_new - x
        x, y = x_new, y_new

    return x, y, False, options.max_iter


def solve_geodesic(graph, g, rho0, rho1, K=None, opts=None):
    """Minimize the discrete action between rho0 and rho1

    graph (WeightedGraph)
    g (Mobility)
    rho0, rho1 (array-like): endpoint probability vectors
    K (int): number of time intervals, opts.K when omitted
    opts (Munch): options from solver_options

    Return a GeodesicResult
    """

    opts = solver_options() if opts is None else opts
    K = opts.K if K is None else K
    if K < 2:
        raise ValueError(f"K must be at least 2, got {K}")
    rho0 = as_prob_vector(rho0, graph.n)
    rho1 = as_prob_vector(rho1, graph.n)
    info(f"Solving for a geodesic with n={graph.n}, K={K}, "
         f"mobility {g.name}")

    if np.array_equal(rho0, rho1):
        path = DiscretePath.constant(graph, g, rho0, K)
        dual = DualPath.zero(graph, g, K)
        return GeodesicResult(path, dual, certify(graph, g, path, dual),
                              True, 0)

    start = feasible_path(graph, g, rho0, rho1, K)
    # scale the objective to about 1 at the start
    start_action = action(start)
    weight = 1.0 / start_action.value \
        if start_action.finite and start_action.value > TAU_G else 1.0
    problem = GeodesicProblem(graph, g, rho0, rho1, K, weight)
    x, y, converged, iterations = run_pdhg(problem, problem.pack(start),
                                           opts)
    if not converged:
        warning(f"Solver stopped after {iterations} iterations without "
                f"reaching tolerance {opts.tol:g}")

    interior, m, _ = problem.split(x)
    rho = np.vstack([rho0, project_simplex(interior), rho1])
    m = _restore_continuity(graph, g, rho, m)
    path = DiscretePath(graph, g, rho, m, validate=False)
    residual = path.continuity_residual()
    if residual > CONTINUITY_TOL:
        warning(f"Continuity residual {residual:.3g} after clean-up")

    dual = normalize_dual(DualPath.from_midpoint_potentials(
        graph, g, path, problem.potentials(y)))
    report = certify(graph, g, path, dual, converged, iterations)
    info(f"Finished after {iterations} iterations: W^2 = "
         f"{2.0 * report.action:.10g}")
    return GeodesicResult(path, dual, report, converged, iterations)
