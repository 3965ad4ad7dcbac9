"""Script for timing the geodesic solver on a random graph"""

from time import perf_counter

import click
import numpy as np

from wgeodesic.graph import random_connected_graph
from wgeodesic.mobility import builtin
from wgeodesic.solver import solve_geodesic, solver_options


def time_solver(n, K, mobility, repeats=1, seed=0):
    """Time solve_geodesic between two random distributions

    If repeats > 1, calculate the average time, excluding the first
    attempt since this includes building the sparse factorizations for
    the first time.
    """
    rng = np.random.default_rng(seed)
    graph = random_connected_graph(n, rng)
    rho0, rho1 = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    g = builtin(mobility)
    options = solver_options(K=K, mobility=mobility)
    print(f"Timing n={n}, K={K}, {mobility} mobility {repeats} times")

    timings = []
    for _ in range(0, repeats):
        tic = perf_counter()
        result = solve_geodesic(graph, g, rho0, rho1, K, options)
        toc = perf_counter()

        timings.append(toc - tic)
        print(f"{toc - tic:0.4f} seconds, {result.iterations} iterations, "
              f"W = {result.report.distance:.8g}")

    if repeats > 1:
        timings = timings[1:] # discard first
        average = sum(timings) / len(timings)
        print(f"Average time without first attempt: {average:0.4f}")


@click.command()
@click.option("--n", type=int, default=5)
@click.option("--K", "K", type=int, default=32)
@click.option("--mobility", default="arithmetic",
              type=click.Choice(["arithmetic", "logarithmic", "harmonic"]))
@click.option("--repeats", type=int, default=3)
@click.option("--seed", type=int, default=0)
def main(n, K, mobility, repeats, seed):
    """Time the solver"""
    time_solver(n, K, mobility, repeats, seed)


if __name__ == "__main__":
    main() # pylint: disable=no-value-for-parameter
