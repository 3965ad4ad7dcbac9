"""Tests for wgeodesic.io"""

from json import load
from os.path import join
from tempfile import TemporaryDirectory
from unittest import TestCase

import numpy as np

from tests import DATA_DIRECTORY
from wgeodesic.exceptions import DistributionError, FileFormatError
from wgeodesic.io import (load_distribution, load_graph, load_options,
                          read_dual, read_momentum, read_trajectory,
                          write_dual, write_momentum, write_report,
                          write_trajectory)
from wgeodesic.mobility import builtin
from wgeodesic.oracle import TwoVertexGeodesic, three_vertex_boundary
from wgeodesic.solver import certify


def helper_data_path(filename):
    """Return the path of a file in the test data directory"""
    return join(DATA_DIRECTORY, filename)


class TestLoad(TestCase):
    """Test loading graphs, distributions and options"""

    def test_load_graph(self):
        """1-based edge lists become 0-based graph edges"""
        graph = load_graph(helper_data_path("graph_boundary.json"))
        self.assertEqual(graph.n, 3)
        self.assertEqual(graph.edges, [(0, 1), (1, 2)])
        self.assertEqual(graph.omega[0, 2], 0.0)


    def test_malformed_json(self):
        """Invalid JSON is logged and raises FileFormatError"""
        with self.assertLogs(level="CRITICAL"):
            with self.assertRaises(FileFormatError):
                load_graph(helper_data_path("malformed.json"))


    def test_missing_key(self):
        """A graph file without edges raises FileFormatError"""
        with self.assertLogs(level="CRITICAL"):
            with self.assertRaises(FileFormatError):
                load_graph(helper_data_path("graph_missing_edges.json"))


    def test_distribution_inline_and_file(self):
        """Distributions come inline or from a file"""
        inline = load_distribution("[0, 0.5, 0.5]", 3)
        from_file = load_distribution(
            helper_data_path("rho_boundary_end.json"), 3)
        np.testing.assert_array_equal(inline, from_file)


    def test_distribution_errors(self):
        """Bad distributions are rejected"""
        with self.assertRaises(DistributionError):
            load_distribution("[0.5, 0.6]", 2)
        with self.assertRaises(FileFormatError):
            load_distribution('{"rho": [1, 0]}', 2)
        with self.assertLogs(level="CRITICAL"):
            with self.assertRaises(FileFormatError):
                load_distribution("not json", 2)


    def test_load_options(self):
        """Options files hold an object"""
        options = load_options(helper_data_path("options_fast.json"))
        self.assertEqual(options, {"K": 8, "max_iter": 200, "tol": 1e-6})
        with self.assertRaises(FileFormatError):
            load_options(helper_data_path("rho_boundary_end.json"))


class TestWriteRead(TestCase):
    """Test writing results and reading them back"""

    def setUp(self):
        """Two-vertex geodesic with its dual, in a temporary directory"""
        self.directory = TemporaryDirectory() # pylint: disable=consider-using-with
        geodesic = TwoVertexGeodesic(builtin("arithmetic"), 1.0, 0.8, 0.1)
        self.path = geodesic.path(8)
        self.dual = geodesic.dual(8, self.path)


    def tearDown(self):
        """Remove the temporary directory"""
        self.directory.cleanup()


    def helper_file(self, filename):
        """Path of a file in the temporary directory"""
        return join(self.directory.name, filename)


    def test_trajectory(self):
        """Densities survive a write and read exactly"""
        filename = self.helper_file("trajectory.csv")
        write_trajectory(filename, self.path)
        with open(filename, "r", encoding="utf-8") as csv_file:
            self.assertEqual(csv_file.readline().strip(), "t,rho_1,rho_2")
        np.testing.assert_array_equal(read_trajectory(filename),
                                      self.path.rho)


    def test_momentum(self):
        """Momenta survive a write and read exactly"""
        filename = self.helper_file("momentum.csv")
        write_momentum(filename, self.path)
        np.testing.assert_array_equal(read_momentum(filename,
                                                    self.path.graph),
                                      self.path.m_edges())


    def test_momentum_wrong_graph(self):
        """Momentum columns must match the edges of the graph"""
        filename = self.helper_file("momentum.csv")
        write_momentum(filename, self.path)
        boundary_path, _ = three_vertex_boundary(builtin("arithmetic"), 8)
        with self.assertRaises(FileFormatError):
            read_momentum(filename, boundary_path.graph)


    def test_dual(self):
        """The dual read back certifies the path as before"""
        filename = self.helper_file("dual.csv")
        write_dual(filename, self.dual)
        dual = read_dual(filename, self.path.graph, self.path.mobility, 1e-2)
        np.testing.assert_array_equal(dual.lam, self.dual.lam)
        np.testing.assert_array_equal(dual.jump, self.dual.jump)
        before = certify(self.path.graph, self.path.mobility, self.path,
                         self.dual)
        after = certify(self.path.graph, self.path.mobility, self.path, dual)
        self.assertAlmostEqual(after.gap, before.gap, places=12)
        self.assertAlmostEqual(after.hj_residual, before.hj_residual,
                               places=10)


    def test_dual_without_jumps(self):
        """Node values alone are split into rates and jumps"""
        filename = self.helper_file("dual.csv")
        with open(filename, "w", encoding="utf-8") as csv_file:
            csv_file.write("t,lambda_1,lambda_2\n0,0,0\n0.5,-1,-1\n1,-2,-2\n")
        dual = read_dual(filename, self.path.graph, self.path.mobility, 1e-2)
        self.assertEqual(dual.K, 2)
        np.testing.assert_allclose(dual.abs_rate, np.full((2, 2), -2.0))


    def test_ragged_csv(self):
        """Rows not matching the header raise FileFormatError"""
        filename = self.helper_file("trajectory.csv")
        with open(filename, "w", encoding="utf-8") as csv_file:
            csv_file.write("t,rho_1,rho_2\n0,1\n")
        with self.assertLogs(level="CRITICAL"):
            with self.assertRaises(FileFormatError):
                read_trajectory(filename)


    def test_report(self):
        """Reports are written as JSON with nested residuals"""
        filename = self.helper_file("report.json")
        write_report(filename, certify(self.path.graph, self.path.mobility,
                                       self.path, self.dual))
        with open(filename, "r", encoding="utf-8") as json_file:
            data = load(json_file)
        self.assertIn("residuals", data)
        self.assertEqual(data["hj_certificate"], "binding")
        self.assertAlmostEqual(data["distance"] ** 2, 2.0 * data["action"],
                               places=12)
