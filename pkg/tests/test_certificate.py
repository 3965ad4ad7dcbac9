"""Tests for wgeodesic.solver.certificate"""

from unittest import TestCase

import numpy as np

from tests import TestCaseWithRandomGenerator
from wgeodesic.energy import dual_h_batch
from wgeodesic.graph import path_graph, two_vertex_graph
from wgeodesic.mobility import builtin
from wgeodesic.oracle import TwoVertexGeodesic
from wgeodesic.solver import (DiscretePath, DualPath, certify,
                              hamiltonian_system_residual, normalize_dual)


class TestCertifyOracle(TestCase):
    """Certify reference geodesics against their duals"""

    @classmethod
    def setUpClass(cls):
        """Sampled two-vertex geodesic under the arithmetic mean"""
        cls.geodesic = TwoVertexGeodesic(builtin("arithmetic"), 1.0, 1.0, 0.0)
        cls.path = cls.geodesic.path(64)
        cls.dual = cls.geodesic.dual(64, cls.path)


    def test_residuals_vanish(self):
        """Every optimality residual is at round-off level"""
        report = certify(self.path.graph, self.path.mobility, self.path,
                         self.dual)
        self.assertAlmostEqual(report.action, 1.0, places=9)
        self.assertLessEqual(abs(report.gap), 1e-9)
        self.assertLessEqual(report.velocity_residual, 1e-9)
        self.assertLessEqual(report.hj_residual, 1e-9)
        self.assertLessEqual(report.pointwise_hj_residual, 1e-9)
        self.assertLessEqual(report.jump_residual, 1e-9)
        self.assertEqual(report.monotonicity_violation, 0.0)
        self.assertLessEqual(report.energy_drift, 1e-8)
        self.assertGreater(report.momentum_bound_slack, 0.0)
        self.assertEqual(report.hj_certificate, "binding")


    def test_distance(self):
        """The reported distance is √(2𝒜) = √2"""
        report = certify(self.path.graph, self.path.mobility, self.path,
                         self.dual)
        self.assertAlmostEqual(report.distance, np.sqrt(2.0), places=9)


    def test_warped_path_has_gap(self):
        """A reparametrized path costs more: positive gap and drift"""
        warped = self.geodesic.path_warped(64)
        report = certify(warped.graph, warped.mobility, warped, self.dual)
        self.assertGreater(report.gap, 0.1)
        self.assertGreater(report.energy_drift, 0.1)


    def test_weak_duality(self):
        """The dual value bounds the action of any path with its endpoints"""
        for power in (0.5, 1.5, 2.0, 3.0):
            warped = self.geodesic.path_warped(64, power)
            report = certify(warped.graph, warped.mobility, warped,
                             self.dual)
            self.assertGreaterEqual(report.gap, -1e-9)


    def test_hamiltonian_system(self):
        """The geodesic solves the Hamiltonian system, the warped path not"""
        residual = hamiltonian_system_residual(
            self.path.graph, self.path.mobility, self.path, self.dual)
        self.assertLessEqual(residual, 1e-8)

        warped = self.geodesic.path_warped(64)
        residual = hamiltonian_system_residual(
            warped.graph, warped.mobility, warped, self.dual)
        self.assertGreater(residual, 0.1)


    def test_report_dict(self):
        """Residuals are nested and the distance is added"""
        data = certify(self.path.graph, self.path.mobility, self.path,
                       self.dual, converged=False, iterations=12).to_dict()
        self.assertIn("velocity_residual", data["residuals"])
        self.assertNotIn("velocity_residual", data)
        self.assertFalse(data["converged"])
        self.assertEqual(data["iterations"], 12)
        self.assertAlmostEqual(data["distance"], np.sqrt(2.0), places=9)


class TestCertifyBoundary(TestCase):
    """Certificates with boundary endpoints"""

    def test_harmonic_advisory(self):
        """γ_P = 0 at an endpoint makes the certificate advisory"""
        geodesic = TwoVertexGeodesic(builtin("harmonic"), 1.0, 1.0, 0.0)
        path = geodesic.path(16)
        dual = geodesic.dual(16, path)
        with self.assertLogs(level="WARNING"):
            report = certify(path.graph, path.mobility, path, dual)
        self.assertEqual(report.hj_certificate, "advisory")
        self.assertLessEqual(report.velocity_residual, 1e-9)
        self.assertLessEqual(report.hj_residual, 1e-8)


    def test_zero_path(self):
        """A constant path with zero dual has all residuals zero"""
        graph = path_graph(3)
        g = builtin("arithmetic")
        path = DiscretePath.constant(graph, g, [0.2, 0.3, 0.5], 4)
        report = certify(graph, g, path, DualPath.zero(graph, g, 4))
        self.assertEqual(report.action, 0.0)
        self.assertEqual(report.gap, 0.0)
        self.assertEqual(report.velocity_residual, 0.0)
        self.assertEqual(report.hj_residual, 0.0)
        self.assertEqual(report.jump_residual, 0.0)
        self.assertEqual(report.energy_drift, 0.0)


class TestNormalizeDual(TestCaseWithRandomGenerator):
    """Test the gauge normalization of duals"""

    def helper_random_dual(self, K=8):
        """Arithmetic-mean dual on one edge with random node values"""
        graph = two_vertex_graph(2.0)
        lam = np.cumsum(self.rng.normal(size=(K + 1, 2)), axis=0)
        return DualPath.from_nodes(graph, builtin("arithmetic"), lam)


    def test_hamiltonian_vanishes(self):
        """After normalization H(rate, ∇λ̄) = 0 on every interval"""
        dual = normalize_dual(self.helper_random_dual())
        values = dual_h_batch(dual.graph, dual.mobility, dual.abs_rate,
                              dual.midpoint_gradients())
        self.assertAllClose(values, np.zeros(dual.K), atol=1e-9)
        self.assertTrue(np.all(dual.jump.max(axis=1) <= 1e-15))


    def test_gradients_unchanged(self):
        """Normalization shifts all coordinates together"""
        dual = self.helper_random_dual()
        normalized = normalize_dual(dual)
        self.assertAllClose(normalized.midpoint_gradients(),
                            dual.midpoint_gradients(), atol=1e-10)
        self.assertAllClose(normalized.lam[0], dual.lam[0])


    def test_idempotent(self):
        """Normalizing twice changes nothing"""
        once = normalize_dual(self.helper_random_dual())
        twice = normalize_dual(once)
        self.assertAllClose(twice.lam, once.lam, atol=1e-10)


    def test_constant_shift(self):
        """A constant added to λ survives normalization unchanged"""
        dual = self.helper_random_dual()
        shifted = DualPath(dual.graph, dual.mobility, dual.lam + 3.0,
                           dual.jump, dual.abs_rate)
        self.assertAllClose(normalize_dual(shifted).lam,
                            normalize_dual(dual).lam + 3.0, atol=1e-10)
