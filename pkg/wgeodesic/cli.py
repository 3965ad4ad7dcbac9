"""Command line interface

Exit status is 0 on success, 2 when an input is rejected and 3 when the
solver stops before reaching its tolerance.
"""

from functools import wraps
from json import dumps
from os import makedirs
from os.path import join

import click

from wgeodesic.exceptions import WGeodesicError
from wgeodesic.io import (load_distribution, load_graph, load_options,
                          read_dual, read_momentum, read_trajectory,
                          write_dual, write_momentum, write_report,
                          write_trajectory)
from wgeodesic.mobility import audit as audit_mobility
from wgeodesic.mobility import builtin, require_finite_c_g
from wgeodesic.oracle import (TwoVertexGeodesic, solve_boundary_ode,
                              three_vertex_boundary)
from wgeodesic.simplex import g_components, poincare as poincare_value
from wgeodesic.solver import (DiscretePath, DualPath, certify,
                              solve_geodesic, solver_options)


EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3


def handle_errors(command):
    """Turn rejected input into exit status 2 with a message on stderr"""

    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (WGeodesicError, ValueError, KeyError) as exception:
            click.echo(f"Error: {exception}", err=True)
            raise SystemExit(EXIT_INVALID) from exception

    return wrapper


def solver_flags(command):
    """Options shared by the commands that run the solver"""
    flags = [
        click.option("--graph", "graph_path", required=True,
                     type=click.Path(exists=True, dir_okay=False)),
        click.option("--mobility", default=None,
                     type=click.Choice(["arithmetic", "logarithmic",
                                        "harmonic"])),
        click.option("--rho0", required=True,
                     help="JSON array or file holding one"),
        click.option("--rho1", required=True,
                     help="JSON array or file holding one"),
        click.option("--K", "K", type=int, default=None),
        click.option("--tol", type=float, default=None),
        click.option("--max-iter", type=int, default=None),
        click.option("--jump-abs", type=float, default=None),
        click.option("--options", "options_path", default=None,
                     type=click.Path(exists=True, dir_okay=False),
                     help="JSON object of solver options"),
        click.option("--seed", type=int, default=0,
                     help="Recorded in the report")]
    for flag in reversed(flags):
        command = flag(command)
    return command


def build_options(options_path, **flags):
    """Merge flags over an options file over the defaults"""
    overrides = load_options(options_path) if options_path else {}
    overrides.update({key: value for key, value in flags.items()
                      if value is not None})
    return solver_options(**overrides)


def _solve(graph_path, rho0, rho1, options):
    graph = load_graph(graph_path)
    g = builtin(options.mobility)
    require_finite_c_g(g)
    start = load_distribution(rho0, graph.n)
    end = load_distribution(rho1, graph.n)
    return solve_geodesic(graph, g, start, end, options.K, options)


def _report_dict(report, seed=None):
    data = report.to_dict()
    if seed is not None:
        data["seed"] = seed
    return data


def _write_outputs(out, path, dual, report_data):
    makedirs(out, exist_ok=True)
    write_trajectory(join(out, "trajectory.csv"), path)
    write_momentum(join(out, "momentum.csv"), path)
    write_dual(join(out, "dual.csv"), dual)
    write_report(join(out, "report.json"), report_data)


@click.group()
def main():
    """Geodesics and the W_g distance on the probability simplex of a
    weighted graph"""


@main.command()
@solver_flags
@click.option("--out", default=None, help="Directory for report.json")
@handle_errors
def dist(graph_path, rho0, rho1, options_path, seed, out, **flags):
    """Print the distance W_g between two distributions"""
    options = build_options(options_path, **flags)
    result = _solve(graph_path, rho0, rho1, options)
    click.echo(f"{result.report.distance:.10g}")
    if out:
        makedirs(out, exist_ok=True)
        write_report(join(out, "report.json"),
                     _report_dict(result.report, seed))
    if not result.converged:
        raise SystemExit(EXIT_NOT_CONVERGED)


@main.command()
@solver_flags
@click.option("--out", required=True, help="Output directory")
@handle_errors
def geodesic(graph_path, rho0, rho1, options_path, seed, out, **flags):
    """Compute a geodesic and write its trajectory, dual and report"""
    options = build_options(options_path, **flags)
    result = _solve(graph_path, rho0, rho1, options)
    _write_outputs(out, result.path, result.dual,
                   _report_dict(result.report, seed))
    click.echo(f"{result.report.distance:.10g}")
    if not result.converged:
        raise SystemExit(EXIT_NOT_CONVERGED)


@main.command()
@click.option("--graph", "graph_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--mobility", default="arithmetic",
              type=click.Choice(["arithmetic", "logarithmic", "harmonic"]))
@click.option("--rho0", required=True, help="JSON array or file holding one")
@handle_errors
def poincare(graph_path, mobility, rho0):
    """Print γ_P(ρ) and the g-connected components of ρ"""
    graph = load_graph(graph_path)
    g = builtin(mobility)
    rho = load_distribution(rho0, graph.n)
    click.echo(f"{poincare_value(graph, g, rho):.10g}")
    click.echo(dumps(g_components(graph, g, rho).to_dict(), sort_keys=True))


@main.command("certify")
@click.option("--graph", "graph_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--mobility", default="arithmetic",
              type=click.Choice(["arithmetic", "logarithmic", "harmonic"]))
@click.option("--input", "input_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Directory with trajectory.csv, momentum.csv, dual.csv")
@click.option("--jump-abs", type=float, default=None)
@click.option("--out", default=None, help="Directory for certificate.json")
@handle_errors
def certify_command(graph_path, mobility, input_dir, jump_abs, out):
    """Certify a stored path against a stored dual"""
    graph = load_graph(graph_path)
    g = builtin(mobility)
    jump_abs = solver_options().jump_abs if jump_abs is None else jump_abs
    rho = read_trajectory(join(input_dir, "trajectory.csv"))
    momenta = read_momentum(join(input_dir, "momentum.csv"), graph)
    path = DiscretePath(graph, g, rho, momenta)
    dual = read_dual(join(input_dir, "dual.csv"), graph, g, jump_abs)
    report = certify(graph, g, path, dual)
    click.echo(dumps(report.to_dict(), sort_keys=True))
    if out:
        makedirs(out, exist_ok=True)
        write_report(join(out, "certificate.json"), report)


@main.command()
@click.argument("case", type=click.Choice(["two-vertex", "boundary3", "ode"]))
@click.option("--mobility", default="arithmetic",
              type=click.Choice(["arithmetic", "logarithmic", "harmonic"]))
@click.option("--omega", type=float, default=1.0)
@click.option("--rho0", default="[1, 0]", help="Two-vertex start")
@click.option("--rho1", default="[0, 1]", help="Two-vertex end")
@click.option("--K", "K", type=int, default=64)
@click.option("--delta1", type=float, default=None)
@click.option("--step", type=float, default=None)
@click.option("--out", default=None, help="Output directory")
@handle_errors
def oracle(case, mobility, omega, rho0, rho1, K, delta1, step, out):
    """Run a reference geodesic and print its W_g²"""
    g = builtin(mobility)
    if case == "two-vertex":
        start = load_distribution(rho0, 2)
        end = load_distribution(rho1, 2)
        reference = TwoVertexGeodesic(g, omega, start[0], end[0])
        path = reference.path(K)
        dual = reference.dual(K, path)
        expected = reference.w_squared
    elif case == "boundary3":
        path, expected = three_vertex_boundary(g, K)
        dual = DualPath.zero(path.graph, g, K)
    else:
        ode_settings = {key: value for key, value in
                        (("delta1", delta1), ("step", step))
                        if value is not None}
        result = solve_boundary_ode(**ode_settings)
        path, dual, expected = result.path, result.dual, 2.0 * result.action

    report = certify(path.graph, g, path, dual)
    click.echo(f"{expected:.10g}")
    if out:
        data = report.to_dict()
        data["expected_w_squared"] = float(expected)
        _write_outputs(out, path, dual, data)


@main.command()
@click.option("--mobility", default="arithmetic",
              type=click.Choice(["arithmetic", "logarithmic", "harmonic"]))
@click.option("--samples", type=int, default=None)
@click.option("--seed", type=int, default=0)
@handle_errors
def audit(mobility, samples, seed):
    """Check the mobility hypotheses on random samples"""
    settings = {"seed": seed}
    if samples is not None:
        settings["samples"] = samples
    report = audit_mobility(builtin(mobility), **settings)
    click.echo(dumps(report.to_dict(), sort_keys=True))
