"""Action integrand, Hamiltonians and their gradients

Infinite action is carried as ActionValue(finite=False) rather than a
float sentinel so that sums over edges and time intervals propagate it
unambiguously.
"""

from collections import namedtuple
from dataclasses import dataclass
from logging import warning

import numpy as np

from wgeodesic.config import DUAL_H_MAX_ITER, DUAL_H_TOL, TAU_G
from wgeodesic.exceptions import BoundaryError, DimensionError
from wgeodesic.graph import (check_vector, edge_mobility, edge_values,
                             edge_field, laplacian)
from wgeodesic.simplex import barycenter, project_simplex


DualHResult = namedtuple("DualHResult", ["value", "rho", "converged"])


@dataclass(frozen=True)
class ActionValue:
    """Nonnegative extended real; value is meaningful only when finite"""

    value: float = 0.0
    finite: bool = True

    def __post_init__(self):
        if self.finite and not self.value >= 0:
            raise ValueError(f"Action value must be nonnegative, "
                             f"got {self.value}")


    def __float__(self):
        return float(self.value) if self.finite else float("inf")


    def __add__(self, other):
        if not (self.finite and other.finite):
            return INFINITE_ACTION
        return ActionValue(self.value + other.value)


    def scale(self, factor):
        """Return factor times the value, factor ≥ 0"""
        assert factor >= 0
        if not self.finite:
            return INFINITE_ACTION
        return ActionValue(factor * self.value)


    @classmethod
    def from_float(cls, value):
        """Return an ActionValue from a float, mapping inf to the flag"""
        return cls(float(value)) if np.isfinite(value) else INFINITE_ACTION


INFINITE_ACTION = ActionValue(0.0, finite=False)


def perspective(t, s, tau=0.0):
    """Elementwise f(t, s) with a finiteness mask

    f(t, s) = s²/t if t > tau, 0 if s = 0 and t ≤ tau, and +∞
    otherwise.

    Return (values, finite) where values is 0 at infinite entries
    """

    t, s = np.broadcast_arrays(np.asarray(t, dtype=float),
                               np.asarray(s, dtype=float))
    positive = t > tau
    values = np.zeros(t.shape)
    values[positive] = s[positive] ** 2 / t[positive]
    finite = positive | (s == 0)
    return values, finite


def f(t, s):
    """Return f(t, s) as an ActionValue

    f(t, s) = s²/t for t > 0, 0 for s = t = 0 and +∞ otherwise.
    """
    values, finite = perspective(t, s)
    if not finite:
        return INFINITE_ACTION
    return ActionValue(float(values))


def big_f(graph, g, rho, m):
    """Return F(ρ, m) = ½ Σ over directed edges of f(g_ij(ρ), m_ij)

    Edges with g_ij(ρ) ≤ τ_g count as g = 0.
    """
    values, finite = perspective(edge_mobility(graph, g, rho),
                                 edge_values(graph, m), TAU_G)
    if not np.all(finite):
        return INFINITE_ACTION
    return ActionValue(float(values.sum()))


def interval_energies(graph, g, rho_mid, m_edges):
    """Return F on each time interval as (values, finite) arrays

    rho_mid (numpy.ndarray): K×n midpoint densities
    m_edges (numpy.ndarray): K×E per-edge momenta
    """
    mobility = g(rho_mid[:, graph.tails], rho_mid[:, graph.heads])
    values, finite = perspective(mobility, m_edges, TAU_G)
    return values.sum(axis=1), np.all(finite, axis=1)


def action(path):
    """Return 𝒜 = ½ Σ_k Δt F((ρᵏ + ρᵏ⁺¹)/2, mᵏ) as an ActionValue

    path (DiscretePath)
    """
    values, finite = interval_energies(path.graph, path.mobility,
                                       path.rho_mid(), path.m_edges())
    if not np.all(finite):
        return INFINITE_ACTION
    return ActionValue(0.5 * path.dt * float(values.sum()))


def velocity(graph, g, rho, m):
    """Return v with m = g v on edges where g > τ_g and v = 0 elsewhere"""
    mobility = edge_mobility(graph, g, rho)
    values = edge_values(graph, m)
    active = mobility > TAU_G
    velocities = np.zeros_like(values)
    velocities[active] = values[active] / mobility[active]
    return edge_field(graph, velocities)


def momentum_norm_bound(graph, g, rho, m, eps0):
    """Return ε₀(g)(Σρ) Σ_E f(g_ij, m_ij) - Σ_E m_ij²

    The difference is nonnegative for every ρ ≥ 0 and every m; +inf
    when F is infinite.
    """
    rho = check_vector(graph, rho, "rho")
    energy = big_f(graph, g, rho, m)
    if not energy.finite:
        return float("inf")
    return eps0 * rho.sum() * energy.value \
        - float(np.sum(edge_values(graph, m) ** 2))


def _check_nonnegative(graph, rho):
    rho = check_vector(graph, rho, "rho")
    if np.any(rho < 0):
        raise ValueError("rho must be entrywise nonnegative")
    return rho


def hamiltonian_hg(graph, g, rho, phi):
    """Return H_g(ρ, φ) = ¼ Σ over directed edges of ω g (φ_i - φ_j)²"""
    rho = _check_nonnegative(graph, rho)
    phi = check_vector(graph, phi, "phi")
    difference = phi[graph.tails] - phi[graph.heads]
    weights = graph.omega[graph.tails, graph.heads]
    return 0.5 * float(np.sum(weights * edge_mobility(graph, g, rho)
                              * difference ** 2))


def grad_phi_hg(graph, g, rho, phi):
    """Return ∂H_g/∂φ_i = Σ_j ω_ij g(ρ_i, ρ_j)(φ_i - φ_j), i.e. L(ρ)φ"""
    rho = _check_nonnegative(graph, rho)
    phi = check_vector(graph, phi, "phi")
    return laplacian(graph, g, rho) @ phi


def rho_gradients(graph, g, rho_rows, phi_rows):
    """Row-wise ∂H_g/∂ρ for stacked (ρ, φ) pairs, without boundary check

    rho_rows, phi_rows (numpy.ndarray): K×n arrays

    Return the K×n array ½ Σ_j ω_ij ∂₁g(ρ_i, ρ_j)(φ_i - φ_j)²
    """

    tails, heads = graph.tails, graph.heads
    weights = graph.omega[tails, heads]
    squared = (phi_rows[:, tails] - phi_rows[:, heads]) ** 2
    with np.errstate(invalid="ignore"):
        at_tail = 0.5 * weights * squared \
            * g.partial1(rho_rows[:, tails], rho_rows[:, heads])
        at_head = 0.5 * weights * squared \
            * g.partial1(rho_rows[:, heads], rho_rows[:, tails])
    # a zero difference kills the term even where ∂₁g is infinite
    at_tail = np.where(squared == 0, 0.0, at_tail)
    at_head = np.where(squared == 0, 0.0, at_head)

    gradients = np.zeros(rho_rows.shape)
    for column, (tail, head) in enumerate(zip(tails, heads)):
        gradients[:, tail] += at_tail[:, column]
        gradients[:, head] += at_head[:, column]
    return gradients


def grad_rho_hg(graph, g, rho, phi):
    """Return ∂H_g/∂ρ_i = ½ Σ_j ω_ij ∂₁g(ρ_i, ρ_j)(φ_i - φ_j)²

    Raise BoundaryError if any ρ_i ≤ τ_g, where ∂₁g may be undefined.
    """
    rho = check_vector(graph, rho, "rho")
    phi = check_vector(graph, phi, "phi")
    if np.any(rho <= TAU_G):
        raise BoundaryError("grad_rho_hg needs rho in the open quadrant, "
                            f"got {rho.tolist()}")
    return rho_gradients(graph, g, rho[None, :], phi[None, :])[0]


def h_zero(a):
    """Return the recession Hamiltonian H₀(a) = max_i a_i"""
    return float(np.max(a))


def _dual_h_objective(graph, g, a, squared, rho):
    """(a, ρ) + ½ Σ_E b_e² g(ρ_i, ρ_j) for each row of rho"""
    mobility = g(rho[:, graph.tails], rho[:, graph.heads])
    return rho @ a + 0.5 * (mobility * squared).sum(axis=1)


def _dual_h_gradient(graph, g, a, squared, rho):
    floored = np.maximum(rho, 1e-15)
    tails, heads = graph.tails, graph.heads
    at_tail = 0.5 * squared * g.partial1(floored[:, tails],
                                         floored[:, heads])
    at_head = 0.5 * squared * g.partial1(floored[:, heads],
                                         floored[:, tails])
    gradient = np.tile(a, (rho.shape[0], 1))
    for column, (tail, head) in enumerate(zip(tails, heads)):
        gradient[:, tail] += at_tail[:, column]
        gradient[:, head] += at_head[:, column]
    return np.minimum(gradient, 1e12)


def maximize_dual_h(graph, g, a, b):
    """Maximize (a, ρ) + ½‖b‖²_ρ over the probability simplex

    For a linear mobility the objective is linear and the maximum is
    taken at a vertex. Otherwise projected gradient ascent with a
    backtracking step runs from the n vertices and the barycenter at
    once and the best end point wins.

    a (array-like): vector of length n
    b (numpy.ndarray): n×n edge field

    Return a DualHResult(value, rho, converged)
    """

    a = check_vector(graph, a, "a")
    squared = edge_values(graph, b) ** 2
    starts = np.vstack([np.eye(graph.n), barycenter(graph.n)])

    if g.linear:
        values = _dual_h_objective(graph, g, a, squared, np.eye(graph.n))
        best = int(np.argmax(values))
        return DualHResult(float(values[best]), np.eye(graph.n)[best], True)

    rho = starts
    values = _dual_h_objective(graph, g, a, squared, rho)
    steps = np.ones(len(rho))
    converged = False
    for _ in range(DUAL_H_MAX_ITER):
        gradient = _dual_h_gradient(graph, g, a, squared, rho)
        candidate = project_simplex(rho + steps[:, None] * gradient)
        candidate_values = _dual_h_objective(graph, g, a, squared,
                                             candidate)
        improved = candidate_values >= values - 1e-15
        movement = np.max(np.abs(candidate - rho), axis=1)

        rho = np.where(improved[:, None], candidate, rho)
        values = np.where(improved, candidate_values, values)
        steps = np.where(improved, 1.5 * steps, 0.5 * steps)

        if np.all((improved & (movement <= DUAL_H_TOL))
                  | (steps < 1e-20)):
            converged = True
            break

    best = int(np.argmax(values))
    if not converged:
        warning(f"dual_h ascent stopped after {DUAL_H_MAX_ITER} iterations "
                f"with best value {values[best]!r}")
    return DualHResult(float(values[best]), rho[best], converged)


def dual_h(graph, g, a, b):
    """Return H(a, b) = max over ρ in the simplex of (a, ρ) + ½‖b‖²_ρ"""
    return maximize_dual_h(graph, g, a, b).value


def dual_h_batch(graph, g, a_rows, b_rows):
    """Return H(a_k, b_k) for stacked inputs

    a_rows (numpy.ndarray): K×n
    b_rows (numpy.ndarray): K×E per-edge values of b
    """
    a_rows = np.asarray(a_rows, dtype=float)
    b_rows = np.asarray(b_rows, dtype=float)
    if a_rows.ndim != 2 or a_rows.shape[1] != graph.n:
        raise DimensionError(f"Expected K×{graph.n} rates, "
                             f"got {a_rows.shape}")
    if g.linear:
        # objective at the vertex e_k: a_k + ½ Σ_{e ∋ k} b_e² g(1, 0)
        incident = 0.5 * float(g(1.0, 0.0)) * b_rows ** 2
        vertex_values = a_rows.copy()
        for column, (tail, head) in enumerate(zip(graph.tails,
                                                  graph.heads)):
            vertex_values[:, tail] += incident[:, column]
            vertex_values[:, head] += incident[:, column]
        return vertex_values.max(axis=1)
    return np.array([dual_h(graph, g, a, edge_field(graph, b))
                     for a, b in zip(a_rows, b_rows)])
