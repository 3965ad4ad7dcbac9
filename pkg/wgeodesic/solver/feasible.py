"""Feasible paths: the solver's starting point and upper bounds

feasible_path concatenates two-vertex geodesics along the edges of a
breadth-first spanning tree. It always has finite action when C_g is
finite, even between boundary points. interpolated_path moves ρ
linearly and lifts the mass rate to a gradient field; it needs
g-connected intermediate densities.
"""

from collections import namedtuple
from logging import debug

import networkx as nx
import numpy as np

from wgeodesic.config import TAU_G
from wgeodesic.exceptions import UnrepresentableError
from wgeodesic.graph import (check_vector, divergence_rho, edge_mobility,
                             edge_values, gradient, laplacian)
from wgeodesic.mobility import (inverse_section_primitive, require_finite_c_g,
                                section_primitive)
from wgeodesic.simplex import as_prob_vector, poincare
from wgeodesic.solver.paths import DiscretePath


Move = namedtuple("Move", ["tail", "head", "total", "start", "end", "state"])


def hodge_lift(graph, g, rho, h):
    """Return the ρ-minimal field w = ∇_G ψ with h + div_ρ(w) = 0

    ψ solves L(ρ)ψ = h on the complement of the constants.

    h (array-like): mass rate with zero sum

    Raise UnrepresentableError when γ_P(ρ) = 0
    """

    rho = check_vector(graph, rho, "rho")
    h = check_vector(graph, h, "h")
    if abs(h.sum()) > 1e-10 * max(1.0, np.abs(h).max()):
        raise ValueError(f"h must have zero sum, got {h.sum()!r}")
    if not np.any(h):
        return np.zeros((graph.n, graph.n))
    if poincare(graph, g, rho) <= TAU_G:
        raise UnrepresentableError(
            "L(rho) is singular on mean-zero vectors (gamma_P = 0); "
            "the rate cannot be written as a rho-divergence")
    psi, *_ = np.linalg.lstsq(laplacian(graph, g, rho), h, rcond=None)
    return gradient(graph, psi - psi.mean())


def tangent_projection(graph, g, rho, v):
    """Return the ρ-orthogonal projection of v onto gradient fields"""
    return hodge_lift(graph, g, rho, -divergence_rho(graph, g, rho, v))


def interpolated_path(graph, g, rho0, rho1, K):
    """Linear interpolation of ρ with momentum g(ρ̄)·hodge_lift(ρ̄, ρ¹ - ρ⁰)

    Raise UnrepresentableError if some interval average is not
    g-connected.
    """

    rho0 = as_prob_vector(rho0, graph.n)
    rho1 = as_prob_vector(rho1, graph.n)
    times = np.linspace(0.0, 1.0, K + 1)[:, None]
    rho = (1.0 - times) * rho0 + times * rho1
    rate = rho1 - rho0
    momenta = []
    for middle in 0.5 * (rho[:-1] + rho[1:]):
        lifted = edge_values(graph, hodge_lift(graph, g, middle, rate))
        momenta.append(edge_mobility(graph, g, middle) * lifted)
    return DiscretePath(graph, g, rho, np.array(momenta))


def _gather_moves(graph, tree, order, rho):
    """Moves that push all the mass of rho to the root, leaves first"""
    state = rho.copy()
    moves = []
    for vertex in reversed(order[1:]):
        mass = state[vertex]
        if mass <= 0:
            continue
        parent = next(iter(tree.predecessors(vertex)))
        total = mass + state[parent]
        moves.append(Move(vertex, parent, total, mass / total, 0.0,
                          state.copy()))
        state[parent] = total
        state[vertex] = 0.0
    return moves


def _reverse_moves(moves):
    """The moves undoing moves, in reverse order"""
    reversed_moves = []
    for move in reversed(moves):
        state = move.state.copy()
        state[move.head] = move.total
        state[move.tail] = 0.0
        reversed_moves.append(Move(move.tail, move.head, move.total,
                                   move.end, move.start, state))
    return reversed_moves


def _move_state(move, x):
    """State of a move whose tail holds the fraction x of the pair mass"""
    state = move.state.copy()
    state[move.tail] = move.total * x
    state[move.head] = move.total * (1.0 - x)
    return state


def _move_positions(g, move, fractions, total):
    """Tail fractions x at the given fractions of the move duration"""
    start = section_primitive(g, move.start)
    end = section_primitive(g, move.end)
    return [inverse_section_primitive(g, start + fraction * (end - start),
                                      total)
            for fraction in fractions]


def move_action(graph, g, move):
    """Action s C²/(2ω) of a move run over unit time"""
    spread = section_primitive(g, move.end) - section_primitive(g, move.start)
    return move.total * spread ** 2 \
        / (2.0 * graph.omega[move.tail, move.head])


def _allocate_intervals(weights, K):
    """Integer interval counts ≥ 1 close to K·weights/Σweights"""
    count = len(weights)
    shares = (K - count) * weights / weights.sum()
    allocation = np.floor(shares).astype(int)
    remainder = K - count - allocation.sum()
    allocation[np.argsort(allocation - shares)[:remainder]] += 1
    return allocation + 1


def _node_densities(graph, g, moves, K):
    """Densities at the K + 1 nodes of the concatenated moves"""
    total = section_primitive(g, 1.0)
    weights = np.sqrt([move_action(graph, g, move) for move in moves])
    if K >= len(moves):
        rows = [moves[0].state]
        for move, intervals in zip(moves, _allocate_intervals(weights, K)):
            fractions = np.arange(1, intervals + 1) / intervals
            rows.extend(_move_state(move, x) for x in
                        _move_positions(g, move, fractions, total))
        return np.array(rows)

    # fewer intervals than moves: sample the continuous concatenation
    boundaries = np.concatenate([[0.0], np.cumsum(weights) / weights.sum()])
    rows = []
    for time in np.linspace(0.0, 1.0, K + 1):
        index = min(np.searchsorted(boundaries, time, side="right") - 1,
                    len(moves) - 1)
        duration = boundaries[index + 1] - boundaries[index]
        fraction = min((time - boundaries[index]) / duration, 1.0)
        x, = _move_positions(g, moves[index], [fraction], total)
        rows.append(_move_state(moves[index], x))
    return np.array(rows)


def tree_momenta(graph, tree, rho):
    """Momenta carried by the spanning tree that realize the node rates

    On each interval mᵏ solves D_T mᵏ = -(ρᵏ⁺¹ - ρᵏ)/Δt using only
    tree edges; the solution is exact since D_T has full column rank and
    the rates have zero sum. With fewer intervals than moves, an
    interval spanning two moves through an empty vertex has infinite
    action under a mobility vanishing on the boundary.
    """

    K = rho.shape[0] - 1
    columns = [index for index, (i, j) in enumerate(graph.edges)
               if tree.has_edge(i, j) or tree.has_edge(j, i)]
    reduced = graph.incidence[:, columns]
    rates = -np.diff(rho, axis=0) * K
    solution, *_ = np.linalg.lstsq(reduced, rates.T, rcond=None)
    # round-off on idle edges would give infinite action where g = 0
    solution[np.abs(solution) <= 1e-12 * np.abs(solution).max(initial=0.0)] \
        = 0.0
    momenta = np.zeros((K, len(graph.edges)))
    momenta[:, columns] = solution.T
    return momenta


def feasible_path(graph, g, rho0, rho1, K):
    """Return a feasible path of finite action from rho0 to rho1

    All mass is first gathered at the root, argmax ρ¹, moving leaves to
    their parents in a breadth-first spanning tree; the reverse of the
    gathering of ρ¹ then spreads it out. Every move follows the
    two-vertex geodesic of its edge and moves share time in proportion
    to the square root of their actions.

    Raise DivergentIntegralError when C_g is infinite
    """

    rho0 = as_prob_vector(rho0, graph.n)
    rho1 = as_prob_vector(rho1, graph.n)
    if np.array_equal(rho0, rho1):
        return DiscretePath.constant(graph, g, rho0, K)
    require_finite_c_g(g)

    root = int(np.argmax(rho1))
    tree = nx.bfs_tree(graph.to_networkx(), root)
    order = list(tree)
    moves = _gather_moves(graph, tree, order, rho0) \
        + _reverse_moves(_gather_moves(graph, tree, order, rho1))
    debug(f"Feasible path uses {len(moves)} two-vertex moves")

    rho = _node_densities(graph, g, moves, K)
    rho[0], rho[-1] = rho0, rho1
    return DiscretePath(graph, g, rho, tree_momenta(graph, tree, rho))
