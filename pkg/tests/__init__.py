"""Unit tests for wgeodesic

Tests are contained in the individual modules. Those drawing random
data should inherit the TestCaseWithRandomGenerator class.
"""

from os.path import abspath, dirname, join
from unittest import TestCase

import numpy as np


DATA_DIRECTORY = join(dirname(abspath(__file__)), "test_io_data")


class TestCaseWithRandomGenerator(TestCase):
    """Base TestCase with a freshly seeded numpy random generator"""

    seed = 20240601

    def setUp(self):
        """Seed the generator so that every test sees the same draws"""
        self.rng = np.random.default_rng(self.seed)


    def random_distribution(self, n, interior=True):
        """Return a random probability vector of length n

        With interior=False about a third of the entries are zero, but
        never all of them.
        """
        values = self.rng.random(n) + (0.05 if interior else 0.0)
        if not interior:
            values[self.rng.random(n) < 0.33] = 0.0
            if not np.any(values):
                values[0] = 1.0
        return values / values.sum()


    def assertAllClose(self, actual, expected, atol=1e-12, rtol=0.0): # pylint: disable=invalid-name
        """Fail unless the arrays agree elementwise"""
        np.testing.assert_allclose(actual, expected, rtol=rtol, atol=atol)
