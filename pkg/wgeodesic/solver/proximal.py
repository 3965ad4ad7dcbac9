"""Proximal maps used by the primal-dual iteration"""

import numpy as np

from wgeodesic.simplex import project_simplex


NEWTON_ITERATIONS = 60


def perspective_prox(t0, s0, kappa):
    """Proximal map of κ s²/t at the points (t0, s0)

    The minimizer of κ s²/t + ½(t - t0)² + ½(s - s0)² over t > 0 (or
    the origin) is (0, 0) when t0 + s0²/(4κ) ≤ 0. Otherwise t is the
    root of (t - t0)(t + 2κ)² = κ s0² above max(t0, 0) and
    s = s0 t/(t + 2κ).

    The cubic is convex and increasing right of its root, so Newton
    steps started from an upper bound decrease monotonically onto it.
    With u = t + 2κ, A = t0 + 2κ and B = κ s0², both A₊ + ∛B and
    A₊ + B/A₊² bound u from above.

    t0, s0 (numpy.ndarray): coordinates, same shape
    kappa (float): positive scale

    Return (t, s)
    """

    assert kappa > 0
    t0 = np.asarray(t0, dtype=float)
    s0 = np.asarray(s0, dtype=float)
    squared = s0 ** 2

    lower = np.maximum(t0, 0.0)
    shifted = np.maximum(t0 + 2.0 * kappa, 0.0)
    cubic = kappa * squared
    with np.errstate(divide="ignore"):
        ratio = np.where(shifted > 0, cubic / shifted ** 2, np.inf)
    t = np.minimum(lower + squared / (4.0 * kappa),
                   shifted + np.minimum(np.cbrt(cubic), ratio) - 2.0 * kappa)
    t = np.maximum(t, lower)
    for _ in range(NEWTON_ITERATIONS):
        value = (t - t0) * (t + 2.0 * kappa) ** 2 - cubic
        slope = (t + 2.0 * kappa) ** 2 \
            + 2.0 * (t - t0) * (t + 2.0 * kappa)
        step = np.where(slope > 0, value / np.where(slope > 0, slope, 1.0),
                        0.0)
        t = np.maximum(t - step, lower)
        if np.all(np.abs(step) <= 1e-14 * np.maximum(t - t0, 1.0)):
            break

    origin = t0 + squared / (4.0 * kappa) <= 0
    t = np.where(origin, 0.0, t)
    s = np.where(origin, 0.0, s0 * t / (t + 2.0 * kappa))
    return t, s


def hypograph_prox(mobility, a, b, t):
    """Projection onto the hypograph of the mobility"""
    return mobility.project_hypograph(a, b, t)


def simplex_prox(rows):
    """Row-wise projection onto the probability simplex"""
    return project_simplex(rows)


def conjugate_step(v, sigma, prox):
    """Return prox of σF* at v through the Moreau identity

    prox (callable): w ↦ prox of F/σ at w
    """
    return v - sigma * prox(v / sigma)
