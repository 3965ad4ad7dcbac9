"""Mobility functions g and the constants derived from them

A mobility weights the conductivity of an edge by the masses at its
endpoints. All evaluation is vectorized over numpy arrays and never
touches negative arguments.
"""

from collections import namedtuple
from dataclasses import asdict, dataclass
from logging import debug, warning

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from wgeodesic.config import (AUDIT_SAMPLES, QUAD_ABS_TOL, QUAD_LIMIT,
                              QUAD_REL_TOL, ROOT_TOL)
from wgeodesic.exceptions import (DivergentIntegralError, QuadratureError,
                                  UnknownMobilityError)


CgResult = namedtuple("CgResult", ["value", "abserr", "finite"])

GRID_POINTS = 33
REFINEMENTS = 10


def _as_result(values):
    """Return a float for 0-d arrays, the array otherwise"""
    return float(values) if np.ndim(values) == 0 else values


def _broadcast(r, s):
    return np.broadcast_arrays(np.asarray(r, dtype=float),
                               np.asarray(s, dtype=float))


def _arithmetic(r, s):
    r, s = _broadcast(r, s)
    return _as_result(0.5 * (r + s))


def _arithmetic_partial1(r, s):
    r, _ = _broadcast(r, s)
    return _as_result(np.full(r.shape, 0.5))


def _logarithmic(r, s):
    r, s = _broadcast(r, s)
    values = np.zeros(r.shape)
    positive = (r > 0) & (s > 0)
    close = positive & (np.abs(r - s) <= 1e-8 * np.maximum(r, s))
    far = positive & ~close
    values[far] = (r[far] - s[far]) / (np.log(r[far]) - np.log(s[far]))
    mean = 0.5 * (r[close] + s[close])
    delta = (r[close] - s[close]) / (r[close] + s[close])
    values[close] = mean * (1.0 - delta ** 2 / 3.0)
    return _as_result(values)


def _logarithmic_partial1(r, s):
    r, s = _broadcast(r, s)
    values = np.zeros(r.shape)
    positive = (r > 0) & (s > 0)
    close = positive & (np.abs(r - s) <= 1e-8 * np.maximum(r, s))
    far = positive & ~close
    log_ratio = np.log(r[far]) - np.log(s[far])
    values[far] = (log_ratio - (r[far] - s[far]) / r[far]) / log_ratio ** 2
    delta = (r[close] - s[close]) / (r[close] + s[close])
    values[close] = 0.5 - delta / 3.0 + delta ** 2 / 6.0
    # infinite slope when leaving the boundary towards positive mass
    values[(r == 0) & (s > 0)] = np.inf
    return _as_result(values)


def _harmonic(r, s):
    r, s = _broadcast(r, s)
    values = np.zeros(r.shape)
    positive = (r > 0) & (s > 0)
    values[positive] = r[positive] * s[positive] / (r[positive]
                                                     + s[positive])
    return _as_result(values)


def _harmonic_partial1(r, s):
    r, s = _broadcast(r, s)
    values = np.zeros(r.shape)
    total = r + s
    nonzero = total > 0
    values[nonzero] = (s[nonzero] / total[nonzero]) ** 2
    return _as_result(values)


def finite_difference_partial1(function):
    """Return a central-difference ∂₁ for a vectorized function of (r, s)

    The step is h = 1e-6·max(r, s, 1e-8); near r = 0 a forward
    difference keeps the arguments nonnegative.
    """

    def partial1(r, s):
        r, s = _broadcast(r, s)
        step = 1e-6 * np.maximum(np.maximum(r, s), 1e-8)
        lower = np.maximum(r - step, 0.0)
        upper = r + step
        values = (np.asarray(function(upper, s), dtype=float)
                  - np.asarray(function(lower, s), dtype=float)) \
            / (upper - lower)
        return _as_result(values)

    return partial1


class Mobility:
    """Symmetric, concave, 1-homogeneous mobility function

    name (str): arithmetic, logarithmic, harmonic or a custom label
    function (callable): vectorized g(r, s) for r, s ≥ 0
    partial1 (callable): vectorized ∂₁g(r, s); finite differences are
        used when omitted
    linear (bool): whether g is linear, enabling closed forms
    """

    def __init__(self, name, function, partial1=None, linear=False):
        assert isinstance(name, str)
        assert callable(function)
        self.name = name
        self._function = function
        self._partial1 = partial1 if partial1 is not None \
            else finite_difference_partial1(function)
        self.linear = linear


    def __repr__(self):
        return f"Mobility({self.name!r})"


    def __call__(self, r, s):
        return self._function(r, s)


    @classmethod
    def custom(cls, name, function, partial1=None):
        """Wrap a user supplied vectorized function as a Mobility"""
        return cls(name, function, partial1)


    @property
    def function(self):
        """The vectorized g(r, s)"""
        return self._function


    def partial1(self, r, s):
        """Return ∂₁g(r, s)"""
        return self._partial1(r, s)


    def partial2(self, r, s):
        """Return ∂₂g(r, s) = ∂₁g(s, r)"""
        return self._partial1(s, r)


    def section(self, x):
        """Return g(x, 1 - x) for x in [0, 1]"""
        x = np.asarray(x, dtype=float)
        return self._function(x, 1.0 - x)


    def max_on_unit_square(self):
        """Return max of g over [0, 1]², attained at (1, 1)"""
        return float(self._function(1.0, 1.0))


    def project_hypograph(self, a, b, t):
        """Project points onto {(a, b, t) : a, b ≥ 0, t ≤ g(a, b)}

        For the arithmetic mean the constraint a, b ≥ 0 is dropped and
        the set is the half-space t ≤ (a + b)/2.

        a, b, t (numpy.ndarray): coordinates of the points, same shape

        Return the projected (a, b, t)
        """

        a, b, t = (np.array(array, dtype=float) for array in (a, b, t))
        if self.linear:
            excess = np.maximum(t - self._function(a, b), 0.0)
            return a + excess / 3.0, b + excess / 3.0, t - 2.0 * excess / 3.0

        inside = (a >= 0) & (b >= 0)
        inside[inside] = t[inside] <= self._function(a[inside], b[inside])
        outside = ~inside
        if np.any(outside):
            points = np.stack([a[outside], b[outside], t[outside]], axis=1)
            projected = self._project_outside(points)
            a[outside], b[outside], t[outside] = projected.T
        return a, b, t


    def _project_outside(self, points):
        """Nearest point of the hypograph cone for points outside it

        The boundary of the cone is the union of the rays through
        (x, 1 - x, g(x, 1 - x)) and the two faces a = 0 and b = 0.
        """

        candidates = [self._project_onto_rays(points),
                      self._project_onto_face(points, 0),
                      self._project_onto_face(points, 1)]
        distances = np.stack([np.sum((candidate - points) ** 2, axis=1)
                              for candidate in candidates])
        best = np.argmin(distances, axis=0)
        return np.stack(candidates)[best, np.arange(len(points))]


    def _ray_score(self, points, x):
        """Return <z, u(x)>₊² / |u(x)|² for rays u(x) = (x, 1-x, h(x))"""
        height = self.section(x)
        inner = points[:, [0]] * x + points[:, [1]] * (1.0 - x) \
            + points[:, [2]] * height
        return np.maximum(inner, 0.0) ** 2 \
            / (x ** 2 + (1.0 - x) ** 2 + height ** 2)


    def _project_onto_rays(self, points):
        """Nearest point on the curved part of the boundary

        The best ray parameter x is located on a grid of GRID_POINTS
        values, then on finer grids spanning the neighbouring cells,
        each 16 times finer than the last.
        """

        x = np.broadcast_to(np.linspace(0.0, 1.0, GRID_POINTS),
                            (len(points), GRID_POINTS))
        offsets = np.linspace(-1.0, 1.0, GRID_POINTS)
        spacing = 1.0 / (GRID_POINTS - 1)
        rows = np.arange(len(points))
        for _ in range(REFINEMENTS):
            best = x[rows, np.argmax(self._ray_score(points, x), axis=1)]
            x = np.clip(best[:, None] + spacing * offsets, 0.0, 1.0)
            spacing *= 2.0 / (GRID_POINTS - 1)
        x = x[rows, np.argmax(self._ray_score(points, x), axis=1)]

        rays = np.stack([x, 1.0 - x, self.section(x)], axis=1)
        scale = np.maximum(np.sum(points * rays, axis=1), 0.0) \
            / np.sum(rays ** 2, axis=1)
        return scale[:, None] * rays


    def _project_onto_face(self, points, zero_axis):
        """Project onto the face where coordinate zero_axis vanishes

        The face is the planar cone {s ≥ 0, t ≤ c s} with c = g(0, 1).
        """

        other_axis = 1 - zero_axis
        slope = float(self._function(0.0, 1.0))
        s, t = points[:, other_axis], points[:, 2]
        edge = np.array([1.0, slope]) / np.hypot(1.0, slope)

        inside = (s >= 0) & (t <= slope * s)
        along_edge = np.maximum(s * edge[0] + t * edge[1], 0.0)
        on_edge = np.stack([along_edge * edge[0], along_edge * edge[1]],
                           axis=1)
        on_down_ray = np.stack([np.zeros_like(t), np.minimum(t, 0.0)],
                               axis=1)
        planar = np.stack([s, t], axis=1)
        use_edge = np.sum((on_edge - planar) ** 2, axis=1) \
            <= np.sum((on_down_ray - planar) ** 2, axis=1)
        best = np.where(use_edge[:, None], on_edge, on_down_ray)
        best = np.where(inside[:, None], planar, best)

        projected = np.zeros_like(points)
        projected[:, other_axis] = best[:, 0]
        projected[:, 2] = best[:, 1]
        return projected


BUILTIN_MOBILITIES = {
    "arithmetic": lambda: Mobility("arithmetic", _arithmetic,
                                   _arithmetic_partial1, linear=True),
    "logarithmic": lambda: Mobility("logarithmic", _logarithmic,
                                    _logarithmic_partial1),
    "harmonic": lambda: Mobility("harmonic", _harmonic, _harmonic_partial1),
}


def builtin(name):
    """Return the builtin mobility called name

    Raise UnknownMobilityError for names other than arithmetic,
    logarithmic and harmonic.
    """
    try:
        return BUILTIN_MOBILITIES[name]()
    except KeyError as exception:
        raise UnknownMobilityError(
            f"Unknown mobility {name!r}; expected one of "
            f"{', '.join(sorted(BUILTIN_MOBILITIES))}") from exception


def is_builtin(g, name):
    """Return True if g evaluates the builtin mobility called name

    The name of g is not looked at: a custom mobility labelled
    "arithmetic" is not the builtin one.
    """
    reference = builtin(name)
    return g.function is reference.function and g.linear == reference.linear


def _half_integrals(g):
    """Integrands of C_g on [0, √½] after r = u² and 1 - r = u²

    The small argument u² is passed to g as it is; forming 1 - (1 - u²)
    would round it to 0 for u below 1e-8. The value at u = 0 is set
    to 0.
    """

    def integrand(u, small_first):
        u = np.asarray(u, dtype=float)
        small, large = u * u, 1.0 - u * u
        values = g(small, large) if small_first else g(large, small)
        positive = u > 0
        result = np.zeros(u.shape)
        result[positive] = 2.0 * u[positive] \
            / np.sqrt(np.asarray(values, dtype=float)[positive])
        return _as_result(result)

    def near_zero(u):
        return integrand(u, True)

    def near_one(u):
        return integrand(u, False)

    return near_zero, near_one


def _tail_diverges(integrand):
    """Detect a non-integrable endpoint singularity at u = 0

    Integrals over [10^-2(k+1), 10^-2k] shrink geometrically for an
    integrable singularity and stay of the same size for a divergent one.
    """

    pieces = []
    for k in range(1, 5):
        piece, _ = quad(integrand, 10.0 ** (-2 * (k + 1)), 10.0 ** (-2 * k),
                        limit=QUAD_LIMIT)
        pieces.append(piece)
    if not np.all(np.isfinite(pieces)):
        return True
    return pieces[-1] > 1e-12 and pieces[-1] >= 0.5 * pieces[-2]


def c_g(g):
    """Return C_g = ∫₀¹ dr / √g(r, 1 - r) as a CgResult

    The integral is split at ½ and each half is computed by adaptive
    Gauss-Kronrod quadrature after the substitution r = u² (near 0) or
    1 - r = u² (near 1), which removes inverse square root
    singularities.

    Raise QuadratureError if the quadrature fails to converge on an
    integrable integrand; a divergent integral is reported with
    finite=False and value inf.
    """

    assert isinstance(g, Mobility)
    upper = np.sqrt(0.5)
    value, abserr, converged = 0.0, 0.0, True
    for integrand in _half_integrals(g):
        with np.errstate(divide="ignore", invalid="ignore"):
            if _tail_diverges(integrand):
                debug(f"C_g integrand of {g.name} is not integrable")
                return CgResult(np.inf, np.inf, False)
            result = quad(integrand, 0.0, upper, epsabs=QUAD_ABS_TOL,
                          epsrel=QUAD_REL_TOL, limit=QUAD_LIMIT,
                          full_output=1)
        value += result[0]
        abserr += result[1]
        converged = converged and len(result) == 3

    if not np.isfinite(value):
        return CgResult(np.inf, np.inf, False)
    if not converged or abserr > 1e-8:
        raise QuadratureError(f"C_g quadrature for {g.name} did not reach "
                              f"1e-8 (estimated error {abserr:.3g})")
    return CgResult(value, abserr, True)


def require_finite_c_g(g):
    """Return C_g or raise DivergentIntegralError when it is infinite"""
    result = c_g(g)
    if not result.finite:
        raise DivergentIntegralError(
            f"Mobility {g.name} has C_g = inf; geodesics between all pairs "
            "of probability vectors require a finite C_g")
    return result.value


def section_primitive(g, x):
    """Return G(x) = ∫₀ˣ dr / √g(r, 1 - r) for x in [0, 1]

    Uses the substitutions of c_g on each half of [0, 1]. The result is
    inf when the integrand is not integrable at 0 and x > 0.
    """

    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"G is defined on [0, 1], got {x!r}")
    if x == 0.0:
        return 0.0
    near_zero, near_one = _half_integrals(g)
    with np.errstate(divide="ignore", invalid="ignore"):
        if x <= 0.5:
            value, _ = quad(near_zero, 0.0, np.sqrt(x), epsabs=QUAD_ABS_TOL,
                            epsrel=QUAD_REL_TOL, limit=QUAD_LIMIT)
            return float(value)
        first, _ = quad(near_zero, 0.0, np.sqrt(0.5), epsabs=QUAD_ABS_TOL,
                        epsrel=QUAD_REL_TOL, limit=QUAD_LIMIT)
        second, _ = quad(near_one, np.sqrt(1.0 - x), np.sqrt(0.5),
                         epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL,
                         limit=QUAD_LIMIT)
    return float(first + second)


def inverse_section_primitive(g, value, total=None):
    """Return x in [0, 1] with G(x) = value

    total (float): G(1), computed when omitted
    """

    total = section_primitive(g, 1.0) if total is None else total
    if value <= 0.0:
        return 0.0
    if value >= total:
        return 1.0
    return float(brentq(lambda x: section_primitive(g, x) - value, 0.0,
                        1.0, xtol=ROOT_TOL, rtol=4 * np.finfo(float).eps))


def epsilon0(g):
    """Return ε₀(g) = max of x ↦ g(x, 1 - x) on [0, 1]

    A grid of 1001 points locates the maximum of the concave section;
    a bounded golden-section/parabolic search refines it.
    """

    assert isinstance(g, Mobility)
    grid = np.linspace(0.0, 1.0, 1001)
    values = g.section(grid)
    best = int(np.argmax(values))
    bounds = (grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)])
    refined = minimize_scalar(lambda x: -g.section(x), bounds=bounds,
                              method="bounded", options={"xatol": 1e-12})
    return float(max(values[best], -refined.fun))


@dataclass
class AuditReport:
    """Largest violations of the mobility hypotheses on random samples"""

    mobility: str
    samples: int
    seed: int
    symmetry: float
    positivity: float
    homogeneity: float
    concavity: float
    section_concavity: float
    euler: float
    partial_fd: float
    min_concavity_slack: float

    def to_dict(self):
        """Return the report as a JSON-ready dict"""
        return asdict(self)


    def passed(self, tol=1e-9):
        """Return True if every violation is at most tol"""
        return all(value <= tol for value in
                   (self.symmetry, self.positivity, self.homogeneity,
                    self.concavity, self.section_concavity, self.euler,
                    self.partial_fd))


def audit(g, samples=AUDIT_SAMPLES, seed=0):
    """Check the mobility hypotheses of g on random points

    Points are drawn from (0, 1]² and scale factors from (0, 10].
    Violations are returned as data, never raised.

    g (Mobility)
    samples (int): number of random points per check
    seed (int): seed of the random generator

    Return an AuditReport
    """

    assert isinstance(g, Mobility)
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")
    rng = np.random.default_rng(seed)

    def unit(size):
        return 1.0 - rng.random(size)

    r, s = unit(samples), unit(samples)
    value = np.asarray(g(r, s), dtype=float)
    symmetry = np.max(np.abs(value - g(s, r)))
    # fraction of samples with g(r, s) <= 0
    positivity = float(np.mean(value <= 0))

    scale = 10.0 * unit(samples)
    scaled = np.asarray(g(scale * r, scale * s), dtype=float)
    homogeneity = np.max(np.abs(scaled - scale * value)
                         / np.maximum(scale * np.abs(value), 1e-300))

    r2, s2 = unit(samples), unit(samples)
    midpoint = np.asarray(g(0.5 * (r + r2), 0.5 * (s + s2)), dtype=float)
    slack = midpoint - 0.5 * (value + g(r2, s2))
    min_slack = float(np.min(slack))

    x, y = rng.random(samples), rng.random(samples)
    section_slack = g.section(0.5 * (x + y)) \
        - 0.5 * (g.section(x) + g.section(y))

    euler = np.max(np.abs(r * g.partial1(r, s) + s * g.partial1(s, r)
                          - value))

    reference = finite_difference_partial1(g)(r, s)
    partial = np.asarray(g.partial1(r, s), dtype=float)
    partial_fd = np.max(np.abs(partial - reference)
                        / np.maximum(1.0, np.abs(partial)))

    report = AuditReport(
        mobility=g.name, samples=samples, seed=seed,
        symmetry=float(symmetry), positivity=float(positivity),
        homogeneity=float(homogeneity), concavity=max(0.0, -min_slack),
        section_concavity=max(0.0, -float(np.min(section_slack))),
        euler=float(euler), partial_fd=float(partial_fd),
        min_concavity_slack=min_slack)
    if not report.passed(1e-6):
        warning(f"Mobility {g.name} fails its audit: {report.to_dict()}")
    return report
