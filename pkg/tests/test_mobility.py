"""Tests for wgeodesic.mobility"""

from unittest import TestCase

import numpy as np

from tests import TestCaseWithRandomGenerator
from wgeodesic.exceptions import (DivergentIntegralError, QuadratureError,
                                  UnknownMobilityError)
from wgeodesic.mobility import (Mobility, audit, builtin, c_g, epsilon0,
                                inverse_section_primitive, is_builtin,
                                require_finite_c_g, section_primitive)


def helper_squared_mobility():
    """1-homogeneous mobility with section x²(1 - x)², so C_g = ∞"""
    return Mobility.custom("squared",
                           lambda r, s: (r * s) ** 2 / (r + s) ** 3)


def helper_oscillating_mobility():
    """Arithmetic mean modulated by a fast oscillation of r/(r + s)"""
    return Mobility.custom(
        "oscillating",
        lambda r, s: 0.5 * (r + s) * (1.0 + 0.5 * np.sin(1e6 * r / (r + s))))


def helper_convex_mobility():
    """Symmetric 1-homogeneous but convex function"""
    return Mobility.custom("convex", lambda r, s: (r ** 2 + s ** 2) / (r + s))


class TestBuiltinMobilities(TestCase):
    """Test values of the builtin mobilities"""

    def test_arithmetic(self):
        """Arithmetic mean of 1 and 3 is 2"""
        self.assertEqual(builtin("arithmetic")(1.0, 3.0), 2.0)


    def test_harmonic(self):
        """Harmonic mobility rs/(r + s), zero on the boundary"""
        g = builtin("harmonic")
        self.assertAlmostEqual(g(1.0, 3.0), 0.75, places=15)
        self.assertEqual(g(0.0, 0.4), 0.0)
        self.assertEqual(g(0.0, 0.0), 0.0)


    def test_logarithmic(self):
        """Logarithmic mean of 1 and e is e - 1"""
        g = builtin("logarithmic")
        self.assertAlmostEqual(g(1.0, np.e), np.e - 1.0, places=14)
        self.assertAlmostEqual(g(0.3, 0.3), 0.3, places=15)
        self.assertEqual(g(0.0, 0.5), 0.0)


    def test_logarithmic_continuous_near_diagonal(self):
        """The series branch agrees with the closed form near r = s"""
        g = builtin("logarithmic")
        r = 0.5
        self.assertAlmostEqual(g(r, r * (1 + 2e-8)), g(r, r * (1 + 1e-7)),
                               places=7)


    def test_vectorized(self):
        """Mobilities accept arrays and return arrays"""
        g = builtin("harmonic")
        values = g(np.array([1.0, 0.0, 2.0]), np.array([1.0, 1.0, 2.0]))
        np.testing.assert_allclose(values, [0.5, 0.0, 1.0])


    def test_partials(self):
        """Closed-form ∂₁ of the harmonic mobility"""
        g = builtin("harmonic")
        self.assertAlmostEqual(g.partial1(1.0, 3.0), 9.0 / 16.0, places=15)
        self.assertAlmostEqual(g.partial2(1.0, 3.0), 1.0 / 16.0, places=15)


    def test_unknown(self):
        """Unknown names raise UnknownMobilityError"""
        with self.assertRaises(UnknownMobilityError):
            builtin("geometric")
        with self.assertRaises(KeyError):
            builtin("")


    def test_max_on_unit_square(self):
        """max g on [0, 1]² is g(1, 1)"""
        self.assertEqual(builtin("arithmetic").max_on_unit_square(), 1.0)
        self.assertEqual(builtin("harmonic").max_on_unit_square(), 0.5)


    def test_is_builtin(self):
        """Builtins are recognized by their function, not their name"""
        self.assertTrue(is_builtin(builtin("harmonic"), "harmonic"))
        self.assertFalse(is_builtin(builtin("harmonic"), "arithmetic"))
        impostor = Mobility.custom("arithmetic", lambda r, s: 0.5 * (r + s))
        self.assertFalse(is_builtin(impostor, "arithmetic"))


class TestConstants(TestCase):
    """Test C_g, ε₀ and the primitive G"""

    def test_c_g_arithmetic(self):
        """C_g = √2 for the arithmetic mean"""
        result = c_g(builtin("arithmetic"))
        self.assertTrue(result.finite)
        self.assertAlmostEqual(result.value, np.sqrt(2.0), places=8)


    def test_c_g_harmonic(self):
        """C_g = π for the harmonic mobility"""
        result = c_g(builtin("harmonic"))
        self.assertTrue(result.finite)
        self.assertAlmostEqual(result.value, np.pi, places=8)


    def test_c_g_error_estimate(self):
        """The quadrature error estimate of C_g stays below 1e-8"""
        for name in ("harmonic", "logarithmic"):
            result = c_g(builtin(name))
            self.assertTrue(np.isfinite(result.value), name)
            self.assertLessEqual(result.abserr, 1e-8, name)
        self.assertLessEqual(abs(c_g(builtin("harmonic")).value - np.pi),
                             1e-8)


    def test_c_g_logarithmic_finite(self):
        """C_g of the logarithmic mean is finite and between the others"""
        value = require_finite_c_g(builtin("logarithmic"))
        self.assertGreater(value, np.sqrt(2.0))
        self.assertLess(value, np.pi)


    def test_c_g_symmetric_halves(self):
        """G(½) = C_g/2 and G(1) = C_g for the symmetric sections"""
        for name in ("harmonic", "logarithmic"):
            g = builtin(name)
            value = c_g(g).value
            self.assertAlmostEqual(section_primitive(g, 0.5), 0.5 * value,
                                   places=8)
            self.assertAlmostEqual(section_primitive(g, 1.0), value,
                                   places=8)


    def test_c_g_quadrature_failure(self):
        """An integrable but wildly oscillating integrand is refused"""
        with self.assertRaises(QuadratureError):
            c_g(helper_oscillating_mobility())


    def test_section_primitive_at_zero(self):
        """G(0) = 0 for mobilities vanishing on the boundary"""
        for name in ("harmonic", "logarithmic"):
            g = builtin(name)
            self.assertEqual(section_primitive(g, 0.0), 0.0)
            self.assertEqual(inverse_section_primitive(g, 0.0), 0.0)
            self.assertGreater(section_primitive(g, 1e-6), 0.0)


    def test_c_g_divergent(self):
        """A section vanishing quadratically gives C_g = ∞"""
        g = helper_squared_mobility()
        result = c_g(g)
        self.assertFalse(result.finite)
        self.assertEqual(result.value, np.inf)
        with self.assertRaises(DivergentIntegralError):
            require_finite_c_g(g)


    def test_epsilon0(self):
        """ε₀ = ½ for the arithmetic and ¼ for the harmonic mobility"""
        self.assertAlmostEqual(epsilon0(builtin("arithmetic")), 0.5,
                               places=10)
        self.assertAlmostEqual(epsilon0(builtin("harmonic")), 0.25,
                               places=10)


    def test_section_primitive(self):
        """G(x) = √2 x for the arithmetic mean, G(1) = C_g"""
        g = builtin("arithmetic")
        for x in (0.0, 0.2, 0.5, 0.9, 1.0):
            self.assertAlmostEqual(section_primitive(g, x),
                                   np.sqrt(2.0) * x, places=9)
        harmonic = builtin("harmonic")
        self.assertAlmostEqual(section_primitive(harmonic, 1.0), np.pi,
                               places=8)
        # G(x) = 2 arcsin(√x) for the harmonic mobility
        self.assertAlmostEqual(section_primitive(harmonic, 0.3),
                               2.0 * np.arcsin(np.sqrt(0.3)), places=8)


    def test_section_primitive_domain(self):
        """G is defined on [0, 1] only"""
        with self.assertRaises(ValueError):
            section_primitive(builtin("arithmetic"), 1.5)


    def test_inverse_section_primitive(self):
        """The inverse recovers x, clamped at the ends"""
        g = builtin("harmonic")
        for x in (0.1, 0.5, 0.75):
            self.assertAlmostEqual(
                inverse_section_primitive(g, section_primitive(g, x)), x,
                places=10)
        self.assertEqual(inverse_section_primitive(g, -1.0), 0.0)
        self.assertEqual(inverse_section_primitive(g, 10.0), 1.0)


class TestHypographProjection(TestCaseWithRandomGenerator):
    """Test projection onto the hypograph cone of g"""

    def test_arithmetic_inside(self):
        """Points below the plane are unchanged"""
        g = builtin("arithmetic")
        a, b, t = g.project_hypograph(np.array([1.0]), np.array([2.0]),
                                      np.array([1.0]))
        self.assertEqual((a[0], b[0], t[0]), (1.0, 2.0, 1.0))


    def test_arithmetic_outside(self):
        """Points above the plane land on it along its normal"""
        g = builtin("arithmetic")
        a, b, t = g.project_hypograph(np.array([0.0]), np.array([0.0]),
                                      np.array([3.0]))
        self.assertAlmostEqual(a[0], 1.0, places=15)
        self.assertAlmostEqual(b[0], 1.0, places=15)
        self.assertAlmostEqual(t[0], 1.0, places=15)


    def test_harmonic_projection_is_nearest(self):
        """Projection lies in the set and beats random points of the set"""
        g = builtin("harmonic")
        points = self.rng.normal(size=(40, 3))
        a, b, t = g.project_hypograph(points[:, 0], points[:, 1],
                                      points[:, 2])
        self.assertTrue(np.all(a >= -1e-12))
        self.assertTrue(np.all(b >= -1e-12))
        self.assertTrue(np.all(t <= g(np.maximum(a, 0), np.maximum(b, 0))
                               + 1e-9))

        members_ab = self.rng.random((500, 2)) * 3.0
        members_t = g(members_ab[:, 0], members_ab[:, 1]) \
            - self.rng.random(500) * 3.0
        members = np.column_stack([members_ab, members_t])
        projected = np.column_stack([a, b, t])
        for point, nearest in zip(points, projected):
            best = np.min(np.linalg.norm(members - point, axis=1))
            self.assertLessEqual(np.linalg.norm(nearest - point),
                                 best + 1e-6)


class TestAudit(TestCase):
    """Test the mobility audit"""

    def test_builtins_pass(self):
        """Arithmetic and harmonic mobilities satisfy the hypotheses"""
        for name in ("arithmetic", "harmonic"):
            report = audit(builtin(name), samples=500, seed=1)
            self.assertTrue(report.passed(1e-6), report.to_dict())
            self.assertEqual(report.positivity, 0.0)


    def test_convex_fails(self):
        """A convex function fails the concavity check with a warning"""
        with self.assertLogs(level="WARNING"):
            report = audit(helper_convex_mobility(), samples=200)
        self.assertGreater(report.concavity, 1e-6)
        self.assertFalse(report.passed(1e-6))


    def test_audit_samples(self):
        """At least one sample is required"""
        with self.assertRaises(ValueError):
            audit(builtin("arithmetic"), samples=0)


    def test_report_dict(self):
        """The report dict names the mobility and the seed"""
        data = audit(builtin("arithmetic"), samples=10, seed=7).to_dict()
        self.assertEqual(data["mobility"], "arithmetic")
        self.assertEqual(data["seed"], 7)
