"""Weighted graphs and the discrete calculus on their edges

Vector fields on edges ("edge fields") are dense n×n skew-symmetric
matrices that vanish off the edge set. Internally the solver works with
per-edge vectors in the order of WeightedGraph.edges, obtained with
edge_values and turned back with edge_field.
"""

from functools import cached_property

import networkx as nx
import numpy as np

from wgeodesic.exceptions import DimensionError, GraphError


class WeightedGraph:
    """Undirected connected graph with symmetric nonnegative weights

    omega (array-like): n×n symmetric weight matrix; zero entries are
        non-edges
    """

    def __init__(self, omega):
        omega = np.array(omega, dtype=float)
        if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
            raise DimensionError(
                f"Weight matrix must be square, got shape {omega.shape}")
        if omega.shape[0] < 2:
            raise GraphError("A weighted graph needs at least 2 vertices")
        if not np.all(np.isfinite(omega)) or np.any(omega < 0):
            raise GraphError("Weights must be finite and nonnegative")
        if np.any(np.diag(omega) != 0):
            raise GraphError("Self-loops are not allowed")
        if not np.array_equal(omega, omega.T):
            raise GraphError("Weight matrix must be symmetric")

        omega.setflags(write=False)
        self.omega = omega
        self.n = omega.shape[0]
        tails, heads = np.nonzero(np.triu(omega > 0, k=1))
        self.tails = tails
        self.heads = heads
        self.edges = list(zip(tails.tolist(), heads.tolist()))
        self.sqrt_weights = np.sqrt(omega[tails, heads])

        if not nx.is_connected(self.to_networkx()):
            raise GraphError("Graph restricted to positive weights is "
                             "not connected")


    def __repr__(self):
        return f"WeightedGraph(n={self.n}, edges={len(self.edges)})"


    @classmethod
    def from_edges(cls, n, edges, one_based=True):
        """Build a graph from a list of weighted edges

        Each edge is listed once or twice; both orientations are set.
        Edges with zero weight are dropped.

        n (int): vertex count
        edges (list): [i, j, w] triples
        one_based (bool): whether vertex indices start at 1

        Return a WeightedGraph
        """

        assert isinstance(n, int)
        omega = np.zeros((n, n))
        offset = 1 if one_based else 0
        for edge in edges:
            if len(edge) != 3:
                raise GraphError(f"Edge {edge} is not an [i, j, w] triple")
            i, j, weight = int(edge[0]) - offset, int(edge[1]) - offset, \
                float(edge[2])
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"Edge {edge} refers to a vertex outside "
                                 f"{offset}..{n - 1 + offset}")
            if i == j:
                raise GraphError(f"Self-loop at vertex {edge[0]}")
            if weight < 0:
                raise GraphError(f"Negative weight on edge {edge}")
            if omega[i, j] not in (0.0, weight):
                raise GraphError(f"Conflicting weights for edge {edge}")
            omega[i, j] = omega[j, i] = weight
        return cls(omega)


    def to_networkx(self):
        """Return the positive-weight graph as a networkx.Graph"""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_weighted_edges_from(
            (i, j, self.omega[i, j]) for i, j in self.edges)
        return graph


    @cached_property
    def incidence(self):
        """Signed √ω-scaled incidence matrix D (n×E)

        div_G(m) = D @ edge_values(G, m). For edge e = (i, j) with i < j
        the column has -√ω_ij at i and +√ω_ij at j.
        """
        matrix = np.zeros((self.n, len(self.edges)))
        columns = np.arange(len(self.edges))
        matrix[self.tails, columns] = -self.sqrt_weights
        matrix[self.heads, columns] = self.sqrt_weights
        matrix.setflags(write=False)
        return matrix


def check_vector(graph, vector, name="vector"):
    """Return vector as a float array of length n or raise DimensionError"""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (graph.n,):
        raise DimensionError(
            f"{name} must have length {graph.n}, got shape {vector.shape}")
    return vector


def check_edge_field(graph, field, name="edge field"):
    """Return field as an n×n float array or raise DimensionError"""
    field = np.asarray(field, dtype=float)
    if field.shape != (graph.n, graph.n):
        raise DimensionError(f"{name} must have shape "
                             f"({graph.n}, {graph.n}), got {field.shape}")
    return field


def is_edge_field(graph, field, tol=0.0):
    """Return True if field is skew-symmetric and vanishes off edges"""
    field = check_edge_field(graph, field)
    skew = np.max(np.abs(field + field.T), initial=0.0) <= tol
    support = np.max(np.abs(field[graph.omega == 0]), initial=0.0) <= tol
    return bool(skew and support)


def edge_values(graph, field):
    """Return the values of an edge field on G.edges (i < j)"""
    field = check_edge_field(graph, field)
    return field[graph.tails, graph.heads]


def edge_field(graph, values):
    """Return the skew-symmetric n×n field with given per-edge values"""
    values = np.asarray(values, dtype=float)
    if values.shape != (len(graph.edges),):
        raise DimensionError(f"Expected {len(graph.edges)} edge values, "
                             f"got shape {values.shape}")
    field = np.zeros((graph.n, graph.n))
    field[graph.tails, graph.heads] = values
    field[graph.heads, graph.tails] = -values
    return field


def edge_mobility(graph, g, rho):
    """Return g(ρ_i, ρ_j) on each edge of G.edges"""
    rho = check_vector(graph, rho, "rho")
    return g(rho[graph.tails], rho[graph.heads])


def mobility_matrix(graph, g, rho):
    """Return the symmetric n×n matrix of g_ij(ρ), zero off edges"""
    values = edge_mobility(graph, g, rho)
    matrix = np.zeros((graph.n, graph.n))
    matrix[graph.tails, graph.heads] = values
    matrix[graph.heads, graph.tails] = values
    return matrix


def gradient(graph, phi):
    """Discrete gradient (∇_G φ)_ij = √ω_ij (φ_i - φ_j)

    graph (WeightedGraph)
    phi (array-like): potential on vertices

    Return an n×n edge field
    """
    phi = check_vector(graph, phi, "phi")
    return np.sqrt(graph.omega) * (phi[:, None] - phi[None, :])


def divergence_g(graph, m):
    """Discrete divergence div_G(m)_i = Σ_j √ω_ij m_ji"""
    m = check_edge_field(graph, m, "m")
    return np.sum(np.sqrt(graph.omega) * m.T, axis=1)


def divergence_rho(graph, g, rho, v):
    """ρ-weighted divergence div_ρ(v)_i = Σ_j √ω_ij v_ji g_ij(ρ)

    It is the negative adjoint of the gradient for the ρ-weighted
    inner product, and div_ρ(v) = div_G(g∘v).
    """
    v = check_edge_field(graph, v, "v")
    weights = np.sqrt(graph.omega) * mobility_matrix(graph, g, rho)
    return np.sum(weights * v.T, axis=1)


def weighted_inner(graph, g, rho, u, v):
    """Return (u, v)_ρ = ½ Σ over directed edges of u v g(ρ_i, ρ_j)"""
    return float(np.sum(edge_values(graph, u) * edge_values(graph, v)
                        * edge_mobility(graph, g, rho)))


def weighted_norm_sq(graph, g, rho, v):
    """Return ‖v‖²_ρ, the sum over undirected edges of v_ij² g_ij(ρ)"""
    values = edge_values(graph, v)
    return float(np.sum(values ** 2 * edge_mobility(graph, g, rho)))


def laplacian(graph, g, rho):
    """ρ-weighted Laplacian L(ρ) with L_ij = -ω_ij g_ij(ρ)

    Its quadratic form is β ↦ ½ Σ ω g (β_i - β_j)² over directed edges.
    """
    weighted = graph.omega * mobility_matrix(graph, g, rho)
    return np.diag(weighted.sum(axis=1)) - weighted


def two_vertex_graph(omega12=1.0):
    """Return the graph with two vertices joined by one edge"""
    return WeightedGraph([[0.0, omega12], [omega12, 0.0]])


def path_graph(n, weight=1.0):
    """Return the path 1 - 2 - ... - n with equal weights"""
    return WeightedGraph.from_edges(
        n, [(i, i + 1, weight) for i in range(n - 1)], one_based=False)


def star_graph(n, weight=1.0):
    """Return the star with centre vertex 0 and n - 1 leaves"""
    return WeightedGraph.from_edges(
        n, [(0, i, weight) for i in range(1, n)], one_based=False)


def complete_graph(n, weight=1.0):
    """Return the complete graph on n vertices with equal weights"""
    omega = np.full((n, n), float(weight))
    np.fill_diagonal(omega, 0.0)
    return WeightedGraph(omega)


def boundary_example_graph():
    """Return the 3-vertex graph with ω12 = ω23 = 1 and ω13 = 0"""
    return WeightedGraph.from_edges(3, [(1, 2, 1.0), (2, 3, 1.0),
                                        (1, 3, 0.0)])


def random_connected_graph(n, rng, extra_edge_probability=0.3,
                           weight_range=(0.5, 2.0)):
    """Return a random connected graph

    A random spanning tree is completed with independent extra edges;
    weights are uniform on weight_range.

    n (int): vertex count
    rng (numpy.random.Generator)
    """

    assert isinstance(rng, np.random.Generator)
    omega = np.zeros((n, n))
    order = rng.permutation(n)
    for position in range(1, n):
        i = order[position]
        j = order[rng.integers(position)]
        omega[i, j] = omega[j, i] = rng.uniform(*weight_range)
    for i in range(n):
        for j in range(i + 1, n):
            if omega[i, j] == 0 and rng.random() < extra_edge_probability:
                omega[i, j] = omega[j, i] = rng.uniform(*weight_range)
    return WeightedGraph(omega)
