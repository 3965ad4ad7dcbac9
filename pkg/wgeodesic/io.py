"""Reading and writing graphs, distributions, paths and reports

Graphs, distributions and options are JSON. Paths are CSV files with a
header row and every float written with CSV_FLOAT_FORMAT, so that
equal results give byte-identical files.
"""

from csv import reader
from json import JSONDecodeError, dump, load, loads
from logging import critical
from os.path import exists

import numpy as np

from wgeodesic.config import CSV_FLOAT_FORMAT
from wgeodesic.exceptions import FileFormatError
from wgeodesic.graph import WeightedGraph
from wgeodesic.simplex import as_prob_vector
from wgeodesic.solver import DualPath


def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as json_file:
            return load(json_file)
    except JSONDecodeError as exception:
        critical(f"Error parsing JSON file {path}")
        raise FileFormatError(f"{path} is not valid JSON: {exception}") \
            from exception


def load_graph(path):
    """Load a graph file {"n": int, "edges": [[i, j, w], ...]}

    Vertices are 1-based. Return a WeightedGraph
    """

    data = _read_json(path)
    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        critical(f"Graph file {path} lacks the n or edges key")
        raise FileFormatError(f"Graph file {path} must be an object with "
                              "keys n and edges")
    return WeightedGraph.from_edges(int(data["n"]), data["edges"])


def load_distribution(value, n):
    """Load a probability vector from an inline JSON array or a file

    value (str): JSON array text, or a path to a file holding one
    n (int): number of vertices
    """

    if exists(value):
        data = _read_json(value)
    else:
        try:
            data = loads(value)
        except JSONDecodeError as exception:
            critical(f"Error parsing distribution {value!r}")
            raise FileFormatError(f"Distribution {value!r} is neither a "
                                  "file nor a JSON array") from exception
    if not isinstance(data, list):
        raise FileFormatError(f"Distribution must be a JSON array, got "
                              f"{type(data).__name__}")
    return as_prob_vector(data, n)


def load_options(path):
    """Load a JSON object of solver options"""
    data = _read_json(path)
    if not isinstance(data, dict):
        raise FileFormatError(f"Options file {path} must hold an object")
    return data


def _write_csv(path, header, rows):
    np.savetxt(path, rows, fmt=CSV_FLOAT_FORMAT, delimiter=",",
               header=",".join(header), comments="")


def _read_csv(path):
    """Return (header, float rows) of a CSV file"""
    with open(path, "r", encoding="utf-8", newline="") as csv_file:
        lines = list(reader(csv_file))
    if not lines:
        critical(f"CSV file {path} is empty")
        raise FileFormatError(f"{path} is empty")
    header, body = lines[0], [line for line in lines[1:] if line]
    try:
        rows = np.array(body, dtype=float)
    except ValueError as exception:
        critical(f"Error parsing CSV file {path}")
        raise FileFormatError(f"{path} has non-numeric or ragged rows") \
            from exception
    if rows.ndim != 2 or rows.shape[1] != len(header):
        critical(f"CSV file {path} has rows not matching its header")
        raise FileFormatError(f"{path} rows do not match the header")
    return header, rows


def write_trajectory(path, discrete_path):
    """Write columns t, rho_1..rho_n, one row per node"""
    n = discrete_path.graph.n
    _write_csv(path, ["t"] + [f"rho_{i + 1}" for i in range(n)],
               np.column_stack([discrete_path.times(), discrete_path.rho]))


def read_trajectory(path):
    """Return the (K+1)×n node densities of a trajectory file"""
    header, rows = _read_csv(path)
    if header[0] != "t" or any(not name.startswith("rho_")
                               for name in header[1:]):
        raise FileFormatError(f"{path} is not a trajectory file")
    return rows[:, 1:]


def write_momentum(path, discrete_path):
    """Write columns t_mid, m_i_j for each edge i < j (1-based)"""
    names = [f"m_{i + 1}_{j + 1}" for i, j in discrete_path.graph.edges]
    _write_csv(path, ["t_mid"] + names,
               np.column_stack([discrete_path.mid_times(),
                                discrete_path.m_edges()]))


def read_momentum(path, graph):
    """Return the K×E momenta of a momentum file in graph edge order"""
    header, rows = _read_csv(path)
    expected = ["t_mid"] + [f"m_{i + 1}_{j + 1}" for i, j in graph.edges]
    if header != expected:
        raise FileFormatError(f"{path} has columns {header}, expected "
                              f"{expected}")
    return rows[:, 1:]


def write_dual(path, dual):
    """Write columns t, lambda_1..n, jump_1..n

    The jump on row k is the jump at the start of interval k; the last
    row carries no jump.
    """

    n = dual.graph.n
    jumps = np.vstack([dual.jump, np.zeros(n)])
    _write_csv(path, ["t"] + [f"lambda_{i + 1}" for i in range(n)]
               + [f"jump_{i + 1}" for i in range(n)],
               np.column_stack([np.linspace(0.0, 1.0, dual.K + 1),
                                dual.lam, jumps]))


def read_dual(path, graph, mobility, jump_abs):
    """Read a dual file into a DualPath

    Without jump columns the jumps are detected from the node values.
    """

    header, rows = _read_csv(path)
    n = graph.n
    if len(header) not in (n + 1, 2 * n + 1) or header[0] != "t":
        raise FileFormatError(f"{path} does not hold a dual for n={n}")
    lam = rows[:, 1:n + 1]
    if len(header) == n + 1:
        return DualPath.from_nodes(graph, mobility, lam, jump_abs)
    jump = rows[:-1, n + 1:]
    K = len(rows) - 1
    abs_rate = (np.diff(lam, axis=0) - jump) * K
    return DualPath(graph, mobility, lam, jump, abs_rate)


def write_report(path, report):
    """Write a report dict (or an object with to_dict) as sorted JSON"""
    data = report.to_dict() if hasattr(report, "to_dict") else report
    with open(path, "w", encoding="utf-8") as json_file:
        dump(data, json_file, indent=2, sort_keys=True)
        json_file.write("\n")
