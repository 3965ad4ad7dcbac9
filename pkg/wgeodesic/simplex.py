"""Probability vectors, g-connected components and the Poincaré function"""

from dataclasses import dataclass
from logging import warning

import numpy as np
from networkx.utils import UnionFind
from scipy.linalg import eigh

from wgeodesic.config import SIMPLEX_TOL, TAU_G
from wgeodesic.exceptions import DimensionError, DistributionError
from wgeodesic.graph import (check_vector, edge_mobility, gradient,
                             laplacian, weighted_norm_sq)


def as_prob_vector(rho, n=None, tol=SIMPLEX_TOL):
    """Validate a probability vector and return it as a float array

    Entries in [-tol, 0) are set to zero.

    rho (array-like): candidate vector
    n (int): expected length, unchecked if None
    tol (float): tolerance on negativity and on the total mass

    Raise DimensionError on a wrong shape and DistributionError if rho
    is not on the simplex.
    """

    rho = np.array(rho, dtype=float)
    if rho.ndim != 1 or (n is not None and rho.shape[0] != n):
        raise DimensionError(f"Probability vector must have length {n}, "
                             f"got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise DistributionError("Probability vector has non-finite entries")
    if np.any(rho < -tol):
        raise DistributionError(f"Probability vector has negative entries: "
                                f"{rho.tolist()}")
    if abs(rho.sum() - 1.0) > tol:
        raise DistributionError(
            f"Probability vector sums to {rho.sum()!r}, not 1")
    return np.maximum(rho, 0.0)


def is_interior(rho, tol=0.0):
    """Return True if every entry of rho exceeds tol"""
    return bool(np.all(np.asarray(rho) > tol))


def project_simplex(values):
    """Euclidean projection onto the probability simplex

    Sort-and-threshold algorithm, applied to each row of a 2-D array.

    values (numpy.ndarray): vector or matrix of row vectors

    Return the projection with the same shape
    """

    values = np.asarray(values, dtype=float)
    rows = np.atleast_2d(values)
    n = rows.shape[1]
    ordered = -np.sort(-rows, axis=1)
    cumulative = np.cumsum(ordered, axis=1) - 1.0
    index = np.arange(1, n + 1)
    support = ordered - cumulative / index > 0
    # the support condition holds on a prefix of the sorted entries
    count = n - np.argmax(support[:, ::-1], axis=1)
    theta = cumulative[np.arange(rows.shape[0]), count - 1] / count
    projected = np.maximum(rows - theta[:, None], 0.0)
    return projected.reshape(values.shape)


@dataclass(frozen=True)
class ComponentPartition:
    """g-connected components of ρ and the vertices left out of them

    components (tuple): frozensets of 0-based vertices, ordered by their
        smallest vertex
    unassigned (frozenset): vertices incident to no edge with g > τ_g
    isolated (frozenset): unassigned vertices carrying positive mass
    """

    components: tuple
    unassigned: frozenset
    isolated: frozenset = frozenset()

    def is_single_full(self, n):
        """Return True if one component covers all n vertices"""
        return len(self.components) == 1 and len(self.components[0]) == n


    def to_dict(self):
        """Return the partition with 1-based vertex lists"""
        return {
            "components": [sorted(vertex + 1 for vertex in component)
                           for component in self.components],
            "unassigned": sorted(vertex + 1 for vertex in self.unassigned),
            "isolated": sorted(vertex + 1 for vertex in self.isolated)}


def g_components(graph, g, rho):
    """Return the ComponentPartition of rho

    Two vertices are g-connected when a path of edges with
    g(ρ_i, ρ_j) > τ_g joins them. Vertices with no such edge are
    unassigned; those with positive mass are also flagged as isolated.
    """

    rho = check_vector(graph, rho, "rho")
    active = edge_mobility(graph, g, rho) > TAU_G
    groups = UnionFind()
    for (i, j), is_active in zip(graph.edges, active):
        if is_active:
            groups.union(i, j)
    touched = {vertex for edge, is_active in zip(graph.edges, active)
               if is_active for vertex in edge}

    components = sorted((frozenset(vertices) for vertices in
                         groups.to_sets() if vertices & touched),
                        key=min)
    unassigned = frozenset(range(graph.n)) - touched
    isolated = frozenset(vertex for vertex in unassigned if rho[vertex] > 0)
    if isolated:
        warning(f"Vertices {sorted(v + 1 for v in isolated)} carry mass "
                "but have no edge with positive mobility")
    return ComponentPartition(tuple(components), unassigned, isolated)


def poincare(graph, g, rho):
    """Return γ_P(ρ), the second smallest eigenvalue of L(ρ)

    γ_P(ρ) = min over Σβ = 0, Σβ² = 1 of ½ Σ g_ij ω_ij (β_i - β_j)²
    with the sum over directed edges. Values within round-off of 0
    are returned as 0.
    """

    eigenvalues = eigh(laplacian(graph, g, rho), eigvals_only=True)
    if eigenvalues[1] <= 1e-13 * max(float(eigenvalues[-1]), 1.0):
        return 0.0
    return float(eigenvalues[1])


def fiedler_vector(graph, g, rho):
    """Return a unit eigenvector of L(ρ) for the eigenvalue γ_P(ρ)"""
    _, eigenvectors = eigh(laplacian(graph, g, rho))
    return eigenvectors[:, 1]


def poincare_inequality_check(graph, g, rho, lam):
    """Return ‖∇_G λ̃‖²_ρ - γ_P(ρ)‖λ̃‖² with λ̃ = λ - mean(λ)

    The Poincaré inequality states that the residual is nonnegative.
    """

    lam = check_vector(graph, lam, "lambda")
    centred = lam - lam.mean()
    return weighted_norm_sq(graph, g, rho, gradient(graph, centred)) \
        - poincare(graph, g, rho) * float(centred @ centred)


def barycenter(n):
    """Return the uniform probability vector of length n"""
    if n < 1:
        raise DimensionError(f"n must be positive, got {n}")
    return np.full(n, 1.0 / n)
