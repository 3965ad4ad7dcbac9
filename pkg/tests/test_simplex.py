"""Tests for wgeodesic.simplex"""

from unittest import TestCase

import numpy as np

from tests import TestCaseWithRandomGenerator
from wgeodesic.exceptions import DimensionError, DistributionError
from wgeodesic.graph import (boundary_example_graph, laplacian, path_graph,
                             random_connected_graph, two_vertex_graph)
from wgeodesic.mobility import builtin
from wgeodesic.simplex import (as_prob_vector, barycenter, fiedler_vector,
                               g_components, is_interior, poincare,
                               poincare_inequality_check, project_simplex)


class TestProbabilityVectors(TestCase):
    """Test validation and projection of probability vectors"""

    def test_valid(self):
        """A probability vector is returned as floats"""
        rho = as_prob_vector([0.25, 0.75], 2)
        self.assertEqual(rho.tolist(), [0.25, 0.75])


    def test_round_off_clipped(self):
        """Tiny negative entries are set to zero"""
        rho = as_prob_vector([-1e-14, 1.0 + 1e-14], 2)
        self.assertEqual(rho[0], 0.0)


    def test_errors(self):
        """Wrong lengths and off-simplex vectors are rejected"""
        with self.assertRaises(DimensionError):
            as_prob_vector([0.5, 0.5], 3)
        with self.assertRaises(DistributionError):
            as_prob_vector([0.6, 0.6], 2)
        with self.assertRaises(DistributionError):
            as_prob_vector([1.5, -0.5], 2)
        with self.assertRaises(DistributionError):
            as_prob_vector([np.nan, 1.0], 2)


    def test_interior(self):
        """is_interior needs all entries positive"""
        self.assertTrue(is_interior([0.5, 0.5]))
        self.assertFalse(is_interior([0.0, 1.0]))


    def test_barycenter(self):
        """The barycenter is uniform"""
        self.assertEqual(barycenter(4).tolist(), [0.25] * 4)
        with self.assertRaises(DimensionError):
            barycenter(0)


    def test_project_simplex_examples(self):
        """Known projections onto the simplex"""
        np.testing.assert_allclose(project_simplex([1.0, 1.0]), [0.5, 0.5])
        np.testing.assert_allclose(project_simplex([2.0, 0.0]), [1.0, 0.0])
        np.testing.assert_allclose(project_simplex([0.2, 0.3, 0.5]),
                                   [0.2, 0.3, 0.5])


    def test_project_simplex_rows(self):
        """Rows of a matrix are projected independently"""
        rows = np.random.default_rng(5).normal(size=(20, 4))
        projected = project_simplex(rows)
        self.assertEqual(projected.shape, rows.shape)
        np.testing.assert_allclose(projected.sum(axis=1), np.ones(20),
                                   atol=1e-12)
        self.assertTrue(np.all(projected >= 0))
        np.testing.assert_allclose(projected[3], project_simplex(rows[3]))


class TestComponents(TestCase):
    """Test g-connected components"""

    def test_boundary_example_at_start(self):
        """ρ = (0, 0, 1): vertices 2 and 3 connected, 1 unassigned"""
        partition = g_components(boundary_example_graph(),
                                 builtin("arithmetic"), [0.0, 0.0, 1.0])
        self.assertEqual(partition.components, (frozenset({1, 2}),))
        self.assertEqual(partition.unassigned, frozenset({0}))
        self.assertEqual(partition.isolated, frozenset())
        self.assertEqual(partition.to_dict()["components"], [[2, 3]])


    def test_boundary_example_at_end(self):
        """ρ = (0, ½, ½): a single component covering all vertices"""
        partition = g_components(boundary_example_graph(),
                                 builtin("arithmetic"), [0.0, 0.5, 0.5])
        self.assertTrue(partition.is_single_full(3))
        self.assertEqual(partition.to_dict()["components"], [[1, 2, 3]])


    def test_isolated_mass(self):
        """A vertex with mass but no active edge is flagged"""
        with self.assertLogs(level="WARNING"):
            partition = g_components(path_graph(3), builtin("harmonic"),
                                     [1.0, 0.0, 0.0])
        self.assertEqual(partition.components, ())
        self.assertEqual(partition.unassigned, frozenset({0, 1, 2}))
        self.assertEqual(partition.isolated, frozenset({0}))


    def test_interior_single_component(self):
        """Any interior ρ on a connected graph gives one component"""
        rng = np.random.default_rng(2)
        graph = random_connected_graph(6, rng)
        rho = rng.random(6) + 0.1
        partition = g_components(graph, builtin("harmonic"), rho / rho.sum())
        self.assertTrue(partition.is_single_full(6))


class TestPoincare(TestCaseWithRandomGenerator):
    """Test the Poincaré function"""

    def test_two_vertex_uniform(self):
        """γ_P(½, ½) = 1 on one unit edge with the arithmetic mean"""
        self.assertAlmostEqual(poincare(two_vertex_graph(),
                                        builtin("arithmetic"), [0.5, 0.5]),
                               1.0, places=12)


    def test_boundary_example_zero(self):
        """γ_P = 0 when vertex 1 is decoupled"""
        self.assertEqual(poincare(boundary_example_graph(),
                                  builtin("arithmetic"), [0.0, 0.0, 1.0]),
                         0.0)


    def test_positive_iff_single_component(self):
        """γ_P > 0 exactly when one g-component covers all vertices"""
        g = builtin("harmonic")
        for _ in range(30):
            graph = random_connected_graph(5, self.rng)
            rho = self.random_distribution(5, interior=False)
            partition = g_components(graph, g, rho)
            self.assertEqual(poincare(graph, g, rho) > 0,
                             partition.is_single_full(5))


    def test_brute_force(self):
        """No mean-zero unit β has a smaller quadratic form than γ_P"""
        g = builtin("logarithmic")
        graph = random_connected_graph(5, self.rng)
        rho = self.random_distribution(5)
        matrix = laplacian(graph, g, rho)
        beta = self.rng.normal(size=(10000, 5))
        beta -= beta.mean(axis=1, keepdims=True)
        beta /= np.linalg.norm(beta, axis=1, keepdims=True)
        forms = np.einsum("ki,ij,kj->k", beta, matrix, beta)
        self.assertGreaterEqual(forms.min(), poincare(graph, g, rho) - 1e-9)


    def test_concave_along_segments(self):
        """γ_P is concave along segments of the simplex"""
        g = builtin("arithmetic")
        graph = random_connected_graph(4, self.rng)
        for _ in range(20):
            rho0 = self.random_distribution(4, interior=False)
            rho1 = self.random_distribution(4, interior=False)
            t = self.rng.random()
            middle = poincare(graph, g, (1 - t) * rho0 + t * rho1)
            chord = (1 - t) * poincare(graph, g, rho0) \
                + t * poincare(graph, g, rho1)
            self.assertGreaterEqual(middle, chord - 1e-9)


    def test_inequality(self):
        """The Poincaré inequality holds with equality at the Fiedler vector"""
        g = builtin("harmonic")
        graph = random_connected_graph(5, self.rng)
        rho = self.random_distribution(5)
        for _ in range(100):
            lam = self.rng.normal(size=5)
            self.assertGreaterEqual(
                poincare_inequality_check(graph, g, rho, lam), -1e-10)
        self.assertAlmostEqual(poincare_inequality_check(
            graph, g, rho, np.ones(5)), 0.0, places=12)
        self.assertAlmostEqual(poincare_inequality_check(
            graph, g, rho, fiedler_vector(graph, g, rho)), 0.0, places=10)
