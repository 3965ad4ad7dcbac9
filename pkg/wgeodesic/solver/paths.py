"""Time-discrete primal and dual paths

A DiscretePath stores ρ at the K + 1 nodes t_k = k/K and the momentum
m on the K intervals. A DualPath stores λ at the nodes together with
the split of every increment into a jump, taken at the start of the
interval, and an absolutely continuous rate.
"""

from logging import debug

import numpy as np

from wgeodesic.config import (CONTINUITY_TOL, DEFAULT_JUMP_ABS,
                              JUMP_MEDIAN_FACTOR, SIMPLEX_TOL, TAU_G)
from wgeodesic.energy import interval_energies, rho_gradients
from wgeodesic.exceptions import DimensionError, DistributionError
from wgeodesic.graph import edge_field, edge_values


class DiscretePath:
    """Path (ρ, m) on the uniform grid of [0, 1] with K intervals

    graph (WeightedGraph)
    mobility (Mobility)
    rho (array-like): (K+1)×n node densities, rows on the simplex
    m_edges (array-like): K×E interval momenta on graph.edges
    validate (bool): check the simplex rows and discrete continuity
    """

    def __init__(self, graph, mobility, rho, m_edges, validate=True):
        rho = np.array(rho, dtype=float)
        m_edges = np.array(m_edges, dtype=float)
        if rho.ndim != 2 or rho.shape[1] != graph.n or rho.shape[0] < 2:
            raise DimensionError(f"rho must be (K+1)×{graph.n} with K ≥ 1, "
                                 f"got {rho.shape}")
        if m_edges.shape != (rho.shape[0] - 1, len(graph.edges)):
            raise DimensionError(
                f"Momentum must be {rho.shape[0] - 1}×{len(graph.edges)}, "
                f"got {m_edges.shape}")

        self.graph = graph
        self.mobility = mobility
        self.rho = rho
        self._m_edges = m_edges
        self.K = rho.shape[0] - 1
        self.dt = 1.0 / self.K

        if validate:
            self.validate()


    def __repr__(self):
        return f"DiscretePath(K={self.K}, n={self.graph.n})"


    @classmethod
    def from_fields(cls, graph, mobility, rho, m, validate=True):
        """Build a path from K n×n momentum edge fields"""
        m_edges = np.array([edge_values(graph, field) for field in m])
        return cls(graph, mobility, rho, m_edges, validate)


    @classmethod
    def constant(cls, graph, mobility, rho0, K):
        """Return the path resting at rho0 with zero momentum"""
        rho = np.tile(np.asarray(rho0, dtype=float), (K + 1, 1))
        return cls(graph, mobility, rho, np.zeros((K, len(graph.edges))))


    def validate(self):
        """Raise if a row leaves the simplex or continuity fails"""
        if np.any(self.rho < -SIMPLEX_TOL) \
                or np.any(np.abs(self.rho.sum(axis=1) - 1.0) > 1e-10):
            raise DistributionError("Path leaves the probability simplex")
        residual = self.continuity_residual()
        if residual > CONTINUITY_TOL:
            raise ValueError(f"Discrete continuity violated by {residual:.3g}")


    @property
    def m(self):
        """Momenta as a K×n×n array of edge fields"""
        return np.array([edge_field(self.graph, values)
                         for values in self._m_edges])


    @property
    def rho0(self):
        """Initial density"""
        return self.rho[0]


    @property
    def rho1(self):
        """Final density"""
        return self.rho[-1]


    def m_edges(self):
        """Return the K×E per-edge momenta"""
        return self._m_edges


    def times(self):
        """Return the K + 1 node times"""
        return np.linspace(0.0, 1.0, self.K + 1)


    def mid_times(self):
        """Return the K interval midpoints"""
        return (np.arange(self.K) + 0.5) * self.dt


    def rho_mid(self):
        """Return the K×n interval averages (ρᵏ + ρᵏ⁺¹)/2"""
        return 0.5 * (self.rho[:-1] + self.rho[1:])


    def continuity_residual(self):
        """Return max |(ρᵏ⁺¹ - ρᵏ)/Δt + div_G(mᵏ)| over nodes and vertices"""
        rate = np.diff(self.rho, axis=0) / self.dt
        divergence = self._m_edges @ self.graph.incidence.T
        return float(np.max(np.abs(rate + divergence), initial=0.0))


    def reversed(self):
        """Return the time-reversed path, from rho1 to rho0"""
        return DiscretePath(self.graph, self.mobility, self.rho[::-1],
                            -self._m_edges[::-1], validate=False)


def energy_profile(path):
    """Return F(ρ̄ᵏ, mᵏ) on each interval, inf where F is infinite"""
    values, finite = interval_energies(path.graph, path.mobility,
                                       path.rho_mid(), path.m_edges())
    return np.where(finite, values, np.inf)


def energy_drift(profile):
    """Return stdev/mean of an energy profile, 0 for a zero profile"""
    profile = np.asarray(profile, dtype=float)
    if not np.all(np.isfinite(profile)):
        return float("inf")
    mean = profile.mean()
    if mean <= 0:
        return 0.0
    return float(profile.std() / mean)


class DualPath:
    """Dual potential λ on the time grid

    Increments satisfy λᵏ⁺¹ - λᵏ = jumpᵏ + Δt·abs_rateᵏ. On interval k
    the potential first jumps by jumpᵏ, then moves linearly at rate
    abs_rateᵏ; its value halfway through the interval is the one paired
    with the momentum.

    graph (WeightedGraph)
    mobility (Mobility)
    lam (array-like): (K+1)×n node values
    jump (array-like): K×n jump parts
    abs_rate (array-like): K×n absolutely continuous rates
    """

    def __init__(self, graph, mobility, lam, jump, abs_rate):
        lam = np.array(lam, dtype=float)
        jump = np.array(jump, dtype=float)
        abs_rate = np.array(abs_rate, dtype=float)
        if lam.ndim != 2 or lam.shape[1] != graph.n or lam.shape[0] < 2:
            raise DimensionError(f"lambda must be (K+1)×{graph.n}, "
                                 f"got {lam.shape}")
        interval_shape = (lam.shape[0] - 1, graph.n)
        if jump.shape != interval_shape or abs_rate.shape != interval_shape:
            raise DimensionError(f"jump and abs_rate must be "
                                 f"{interval_shape[0]}×{graph.n}")

        self.graph = graph
        self.mobility = mobility
        self.lam = lam
        self.jump = jump
        self.abs_rate = abs_rate
        self.K = lam.shape[0] - 1
        self.dt = 1.0 / self.K


    def __repr__(self):
        return f"DualPath(K={self.K}, n={self.graph.n})"


    @classmethod
    def from_parts(cls, graph, mobility, lam0, jump, abs_rate):
        """Build node values from λ⁰ and the per-interval increments"""
        jump = np.asarray(jump, dtype=float)
        abs_rate = np.asarray(abs_rate, dtype=float)
        dt = 1.0 / jump.shape[0]
        increments = jump + dt * abs_rate
        lam = np.vstack([lam0, lam0 + np.cumsum(increments, axis=0)])
        return cls(graph, mobility, lam, jump, abs_rate)


    @classmethod
    def zero(cls, graph, mobility, K):
        """Return λ ≡ 0"""
        return cls(graph, mobility, np.zeros((K + 1, graph.n)),
                   np.zeros((K, graph.n)), np.zeros((K, graph.n)))


    @classmethod
    def from_nodes(cls, graph, mobility, lam, jump_abs=DEFAULT_JUMP_ABS):
        """Split node values into rates and outlier jumps

        An increment λᵏ⁺¹_i - λᵏ_i is a jump when its size exceeds
        JUMP_MEDIAN_FACTOR times the median increment size of that
        coordinate and also exceeds jump_abs. The rate of a jump
        interval is the mean of the neighbouring regular rates.
        """

        lam = np.array(lam, dtype=float)
        increments = np.diff(lam, axis=0)
        dt = 1.0 / increments.shape[0]
        sizes = np.abs(increments)
        median = np.median(sizes, axis=0)
        flagged = (sizes > JUMP_MEDIAN_FACTOR * median) & (sizes > jump_abs)

        rates = increments / dt
        abs_rate = rates.copy()
        jump = np.zeros_like(increments)
        for k, i in zip(*np.nonzero(flagged)):
            neighbours = [rates[neighbour, i] for neighbour in (k - 1, k + 1)
                          if 0 <= neighbour < len(rates)
                          and not flagged[neighbour, i]]
            abs_rate[k, i] = np.mean(neighbours) if neighbours else 0.0
            jump[k, i] = increments[k, i] - dt * abs_rate[k, i]
        if np.any(flagged):
            debug(f"Detected {int(flagged.sum())} jump increments")
        return cls(graph, mobility, lam, jump, abs_rate)


    @classmethod
    def from_midpoint_potentials(cls, graph, mobility, path, mu):
        """Build a dual from one potential per time interval

        On interval k the rate is the Hamiltonian rate
        -∂H_g/∂ρ(ρ̄ᵏ, μᵏ), with ρ̄ floored at τ_g, and the potential
        passes through μᵏ at the midpoint. The mismatch between the end
        of one interval and the start of the next is the jump.

        path (DiscretePath)
        mu (array-like): K×n interval potentials
        """

        mu = np.asarray(mu, dtype=float)
        if mu.shape != (path.K, graph.n):
            raise DimensionError(f"mu must be {path.K}×{graph.n}, "
                                 f"got {mu.shape}")
        rates = -rho_gradients(graph, mobility,
                               np.maximum(path.rho_mid(), TAU_G), mu)
        starts = mu - 0.5 * path.dt * rates
        ends = mu + 0.5 * path.dt * rates

        lam = np.vstack([starts[:1], ends])
        jump = np.zeros_like(mu)
        jump[1:] = starts[1:] - ends[:-1]
        return cls(graph, mobility, lam, jump, rates)


    def increments(self):
        """Return the K×n node increments"""
        return np.diff(self.lam, axis=0)


    def midpoint_values(self):
        """Return λ halfway through each interval, after its jump"""
        return self.lam[:-1] + self.jump + 0.5 * self.dt * self.abs_rate


    def midpoint_gradients(self):
        """Return ∇_G of the midpoint values as K×E edge values"""
        middle = self.midpoint_values()
        return self.graph.sqrt_weights * (middle[:, self.graph.tails]
                                          - middle[:, self.graph.heads])


    def consistency_residual(self):
        """Return max |λᵏ⁺¹ - λᵏ - jumpᵏ - Δt abs_rateᵏ|"""
        return float(np.max(np.abs(self.increments() - self.jump
                                   - self.dt * self.abs_rate), initial=0.0))


    def monotonicity_violation(self):
        """Return the largest increase of any coordinate between nodes"""
        return max(0.0, float(np.max(self.increments(), initial=0.0)))


    def dual_value(self, rho0, rho1):
        """Return (λ(1), ρ¹) - (λ(0), ρ⁰)"""
        return float(self.lam[-1] @ rho1 - self.lam[0] @ rho0)
