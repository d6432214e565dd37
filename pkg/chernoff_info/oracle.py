"""
Brute-force evaluators used to validate the closed-form and optimized results:
direct summation over discrete supports, adaptive quadrature over scalar
supports, and importance-sampled Monte Carlo for low-dimensional continuous
families. Nothing here uses the Jensen/Bregman identities under test, except
alpha_grid_argmax which searches them by brute force.
"""
import logging
import math

import numpy as np
from scipy import integrate, optimize, special, stats

from .divergences import _jensen_value
from .errors import RangeError, UnsupportedError
from .families import NATURAL, POSITIVE_REALS, SIMPLEX, check_compatible, log_density
from .utils import check_open_unit

logger = logging.getLogger(__name__)

DISCRETE_SUM = "discrete_sum"
ADAPTIVE_QUADRATURE = "adaptive_quadrature"
MONTE_CARLO = "monte_carlo"
SCHEMES = (DISCRETE_SUM, ADAPTIVE_QUADRATURE, MONTE_CARLO)

# Largest continuous integration dimension handled by Monte Carlo.
MAX_MC_DIMENSION = 3

QUADRATURE_LIMIT = 500
GRID_POINTS = 2001


class IntegrationSpec(object):
    def __init__(self, scheme=None, tail_epsilon=1e-14, abs_tolerance=1e-9, range_sigmas=12.0, mc_samples=10 ** 6):
        """
        How the oracle integrates.

        :param scheme: discrete_sum, adaptive_quadrature, monte_carlo, or None to pick from the support.
        :param tail_epsilon: Bound on the mass left out by truncating a discrete sum.
        :param abs_tolerance: Absolute error target of the quadrature.
        :param range_sigmas: Half-width, in standard deviations, of the quadrature range on unbounded supports.
        :param mc_samples: Number of Monte Carlo draws.
        """
        if scheme is not None and scheme not in SCHEMES:
            raise UnsupportedError("Unknown integration scheme '%s'" % scheme)
        if not (tail_epsilon > 0 and abs_tolerance > 0 and range_sigmas > 0):
            raise RangeError("Integration tolerances and range must be positive")
        if int(mc_samples) != mc_samples or mc_samples < 1000:
            raise RangeError("mc_samples must be an integer >= 1000, got %r" % (mc_samples,))
        self.scheme = scheme
        self.tail_epsilon = float(tail_epsilon)
        self.abs_tolerance = float(abs_tolerance)
        self.range_sigmas = float(range_sigmas)
        self.mc_samples = int(mc_samples)

    def toDict(self):
        return {"scheme": self.scheme, "tail_epsilon": self.tail_epsilon, "abs_tolerance": self.abs_tolerance,
                "range_sigmas": self.range_sigmas, "mc_samples": self.mc_samples}


class VerificationRecord(object):
    def __init__(self, name, computed, reference, tolerance):
        """One comparison of a computed quantity against its oracle value."""
        self.name = name
        self.computed = float(computed)
        self.reference = float(reference)
        self.tolerance = float(tolerance)

    @property
    def error(self):
        return abs(self.computed - self.reference)

    @property
    def passed(self):
        return self.error <= self.tolerance

    def __repr__(self):
        return "VerificationRecord(%s, error=%.3e, %s)" % (self.name, self.error, "ok" if self.passed else "FAILED")

    def toDict(self):
        return {"name": self.name, "computed": self.computed, "reference": self.reference,
                "error": self.error, "tolerance": self.tolerance, "passed": self.passed}


def _integration_dimension(family):
    if family.support.kind == SIMPLEX:
        return family.support.dimension - 1
    return family.support.dimension


def _natural_scheme(family):
    if family.support.discrete:
        return DISCRETE_SUM
    if _integration_dimension(family) == 1:
        return ADAPTIVE_QUADRATURE
    return MONTE_CARLO


def resolve_scheme(family, spec):
    natural = _natural_scheme(family)
    scheme = spec.scheme or natural
    if scheme == MONTE_CARLO:
        if family.support.discrete or family.support.scalar:
            raise UnsupportedError("Monte Carlo is only used for vector-valued families, not %r" % family)
        if _integration_dimension(family) > MAX_MC_DIMENSION:
            raise UnsupportedError("Monte Carlo oracle handles at most %d dimensions" % MAX_MC_DIMENSION)
    elif scheme != natural:
        raise UnsupportedError("Scheme %s does not apply to %r" % (scheme, family))
    return scheme


def _scalar_moments(point):
    family = point.family
    params = family.conventional(point)
    name = family.name
    if name == "poisson":
        return params["lambda"], math.sqrt(params["lambda"])
    if name == "bernoulli":
        return params["p"], math.sqrt(params["p"] * (1 - params["p"]))
    if name == "exponential":
        return 1.0 / params["lambda"], 1.0 / params["lambda"]
    if name == "gaussian-fixed-sigma":
        return params["mu"], family.hyper["sigma"]
    if name == "gaussian-1d":
        return params["mu"], math.sqrt(params["var"])
    if name == "gaussian-mvn" and family.matrix_dim == 1:
        return params["mu"][0], math.sqrt(params["sigma"][0][0])
    raise UnsupportedError("No scalar moments for %r" % family)


def _log_poisson_tail_bound(lam, k):
    # P(X >= k) <= exp(-lam) (e lam / k)^k for k > lam
    return -lam + k * (1.0 + math.log(lam) - math.log(k))


def discrete_support(points, spec):
    """Support points 0..K, with K chosen so that every point's tail beyond K is below spec.tail_epsilon."""
    family = points[0].family
    if family.support.upper is not None:
        return np.arange(family.support.upper + 1, dtype=float)
    rates = [_scalar_moments(p)[0] for p in points]
    log_eps = math.log(spec.tail_epsilon)
    k = int(math.floor(max(rates))) + 1
    while max(_log_poisson_tail_bound(lam, k) for lam in rates) >= log_eps:
        k += 1
    logger.debug("Truncating discrete sum at k = %d", k)
    return np.arange(k + 1, dtype=float)


def _quadrature_range(points, spec):
    family = points[0].family
    if family.support.kind == SIMPLEX:
        return 0.0, 1.0, None, False
    moments = [_scalar_moments(p) for p in points]
    rs = spec.range_sigmas
    hi = max(m + rs * s for m, s in moments)
    if family.support.kind == POSITIVE_REALS:
        lo = 0.0
    else:
        lo = min(m - rs * s for m, s in moments)
    breaks = sorted(set(m for m, _ in moments if lo < m < hi))
    return lo, hi, breaks or None, family.support.kind == POSITIVE_REALS


def _embed(family, x):
    """Samples for abscissae x of a one-dimensional integral; simplex points are (x, 1 - x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if family.support.kind == SIMPLEX:
        return np.stack([x, 1.0 - x], axis=1)
    return x


def evaluation_grid(p, q, spec=None):
    """Points at which two scalar or discrete densities are compared."""
    spec = spec or IntegrationSpec()
    check_compatible(p, q)
    family = p.family
    if family.support.discrete:
        return discrete_support([p, q], spec)
    if not family.support.scalar:
        raise UnsupportedError("No evaluation grid for %r" % family)
    lo, hi, _, _ = _quadrature_range([p, q], spec)
    return np.linspace(lo, hi, GRID_POINTS)


def _integrate(fn, points, spec):
    """Sum or integrate fn (a batch of samples -> values) over the support of the points' family."""
    family = points[0].family
    scheme = resolve_scheme(family, spec)
    if scheme == DISCRETE_SUM:
        return float(np.sum(fn(discrete_support(points, spec))))
    if scheme == ADAPTIVE_QUADRATURE:
        lo, hi, breaks, tail = _quadrature_range(points, spec)

        def scalar(x):
            return float(fn(_embed(family, x))[0])

        kwargs = dict(epsabs=spec.abs_tolerance, epsrel=1e-11, limit=QUADRATURE_LIMIT)
        total = integrate.quad(scalar, lo, hi, points=breaks, **kwargs)[0]
        if tail:
            total += integrate.quad(scalar, hi, np.inf, **kwargs)[0]
        return total
    raise UnsupportedError("Use the Monte Carlo entry points for %r" % family)


def _integrate_exp(log_fn, points, spec):
    """
    Integral of exp(log_fn). Quadrature runs on the integrand divided by its peak on a
    grid, so the absolute tolerance acts as a relative one for small integrals.
    """
    family = points[0].family
    if resolve_scheme(family, spec) != ADAPTIVE_QUADRATURE:
        return _integrate(lambda x: np.exp(log_fn(x)), points, spec)
    lo, hi, _, _ = _quadrature_range(points, spec)
    values = log_fn(_embed(family, np.linspace(lo, hi, GRID_POINTS)[1:-1]))
    values = values[np.isfinite(values)]
    shift = float(np.max(values)) if values.size else 0.0
    return math.exp(shift) * _integrate(lambda x: np.exp(log_fn(x) - shift), points, spec)


def _reference(point):
    """(sampler, log-density) of point computed from its conventional parameters with scipy/numpy."""
    family = point.family
    params = family.conventional(point)
    if family.name == "gaussian-mvn":
        d = family.matrix_dim
        dist = stats.multivariate_normal(mean=params["mu"], cov=params["sigma"])

        def draw(n, rng):
            return np.asarray(dist.rvs(size=n, random_state=rng)).reshape(n, d)

        def logpdf(x):
            return np.atleast_1d(dist.logpdf(x))

        return draw, logpdf
    if family.name == "dirichlet":
        alpha = np.asarray(params["p"])
        log_norm = special.gammaln(alpha.sum()) - special.gammaln(alpha).sum()

        def draw(n, rng):
            return rng.dirichlet(alpha, size=n)

        def logpdf(x):
            return log_norm + np.log(x).dot(alpha - 1.0)

        return draw, logpdf
    raise UnsupportedError("No Monte Carlo reference distribution for %r" % family)


def _monte_carlo(log_integrand, points, spec, seed):
    """
    Importance-sampled integral of exp(log_integrand) with the equal mixture of the
    points' distributions as proposal. Returns (estimate, standard error).
    """
    resolve_scheme(points[0].family, IntegrationSpec(scheme=MONTE_CARLO, mc_samples=spec.mc_samples))
    rng = np.random.default_rng(seed)
    n = spec.mc_samples
    references = [_reference(p) for p in points]
    component = rng.integers(len(references), size=n)
    draws = [draw(n, rng) for draw, _ in references]
    x = draws[0]
    for i in range(1, len(draws)):
        x = np.where((component == i)[:, None], draws[i], x)
    log_proposal = special.logsumexp(np.stack([logpdf(x) for _, logpdf in references]), axis=0) - math.log(len(references))
    weights = np.exp(log_integrand(x) - log_proposal)
    return float(np.mean(weights)), float(np.std(weights, ddof=1) / math.sqrt(n))


def monte_carlo_coefficient(p, q, alpha, spec=None, seed=0):
    """Monte Carlo estimate of c_alpha(p : q) and its standard error."""
    spec = spec or IntegrationSpec(scheme=MONTE_CARLO)
    alpha = check_open_unit(alpha)
    check_compatible(p, q)

    def log_integrand(x):
        return alpha * log_density(p, x) + (1.0 - alpha) * log_density(q, x)

    return _monte_carlo(log_integrand, [p, q], spec, seed)


def chernoff_coefficient_numeric(p, q, alpha, spec=None, seed=0):
    """c_alpha(p : q) = int p^alpha q^(1 - alpha), by summation, quadrature or Monte Carlo."""
    spec = spec or IntegrationSpec()
    alpha = check_open_unit(alpha)
    check_compatible(p, q)
    if resolve_scheme(p.family, spec) == MONTE_CARLO:
        return monte_carlo_coefficient(p, q, alpha, spec, seed)[0]

    def log_integrand(x):
        return alpha * log_density(p, x) + (1.0 - alpha) * log_density(q, x)

    return _integrate_exp(log_integrand, [p, q], spec)


def kl_numeric(p, q, spec=None, seed=0):
    """KL(p : q) = int p log(p / q), with 0 log 0 = 0."""
    spec = spec or IntegrationSpec()
    check_compatible(p, q)
    if resolve_scheme(p.family, spec) == MONTE_CARLO:
        draw, _ = _reference(p)
        x = draw(spec.mc_samples, np.random.default_rng(seed))
        return float(np.mean(log_density(p, x) - log_density(q, x)))

    def integrand(x):
        lp = log_density(p, x)
        density = np.exp(lp)
        return np.where(density > 0, density * (lp - log_density(q, x)), 0.0)

    return _integrate(integrand, [p, q], spec)


def normalization_check(family, theta, spec=None, seed=0):
    """|1 - total mass| of the density exp(<t(x), theta> - F(theta) + k(x))."""
    spec = spec or IntegrationSpec()
    if theta.family != family or theta.system != NATURAL:
        raise UnsupportedError("normalization_check needs a natural-coordinate point of %r" % family)
    if resolve_scheme(family, spec) == MONTE_CARLO:
        mass = _monte_carlo(lambda x: log_density(theta, x), [theta], spec, seed)[0]
    else:
        mass = _integrate_exp(lambda x: log_density(theta, x), [theta], spec)
    return abs(1.0 - mass)


def bayes_error_numeric(family, theta1, theta2, w1, spec=None):
    """Exact two-class Bayes error sum/integral of min(w1 p1(x), w2 p2(x))."""
    spec = spec or IntegrationSpec()
    check_compatible(theta1, theta2)
    if theta1.family != family:
        raise UnsupportedError("Parameters do not belong to %r" % family)
    w1 = check_open_unit(w1, "w1")
    log_w1 = math.log(w1)
    log_w2 = math.log1p(-w1)

    def integrand(x):
        return np.exp(np.minimum(log_w1 + log_density(theta1, x), log_w2 + log_density(theta2, x)))

    return _integrate(integrand, [theta1, theta2], spec)


def alpha_grid_argmax(p, q, step, spec=None, refine=False):
    """
    Brute-force max over alpha in {step, 2 step, ..., 1 - step} of C_alpha(p : q).

    The objective is the generic Jensen route, or -log of the numeric coefficient when
    spec is given. Exact ties go to the grid point nearest 1/2. With refine, the
    maximum is polished by a bounded scalar search within one step of the grid argmax.
    Returns (alpha, value).
    """
    step = float(step)
    if not 0.0 < step < 0.5:
        raise RangeError("Grid step must lie in (0, 1/2), got %r" % step)
    check_compatible(p, q)

    if spec is None:
        def objective(a):
            return _jensen_value(p, q, a)
    else:
        def objective(a):
            return -math.log(chernoff_coefficient_numeric(p, q, a, spec))

    n = int(round(1.0 / step))
    best_alpha, best_value = None, None
    for i in range(1, n):
        a = i * step
        if a >= 1.0:
            break
        value = objective(a)
        if (best_value is None or value > best_value
                or (value == best_value and abs(a - 0.5) < abs(best_alpha - 0.5))):
            best_alpha, best_value = a, value

    if refine and best_value > 0:
        lo = max(best_alpha - step, 0.5 * step)
        hi = min(best_alpha + step, 1.0 - 0.5 * step)
        res = optimize.minimize_scalar(lambda a: -objective(a), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        if -res.fun > best_value:
            best_alpha, best_value = float(res.x), float(-res.fun)
    return best_alpha, best_value
