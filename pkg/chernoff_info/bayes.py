"""
Two-class Bayesian hypothesis testing between members of one exponential family:
the MAP rule, samplers, Monte Carlo error estimates, and the divergence-based
bounds on the Bayes error.
"""
import logging
import math

import numpy as np
from scipy import optimize

from .chernoff import chernoff_information
from .divergences import _jensen_value, bhattacharyya, jeffreys, resistor_average
from .errors import DimensionError, UnsupportedError
from .families import NATURAL, check_compatible, difference, log_normalizer
from .utils import check_open_unit

logger = logging.getLogger(__name__)

ORDER_TOLERANCE = 1e-12
# Exponent bracket for the bounded search of the unequal-prior bound.
SEARCH_MARGIN = 1e-9


class BinaryProblem(object):
    def __init__(self, family, theta1, theta2, w1=0.5):
        """
        Two classes C1, C2 with densities p(x; theta1), p(x; theta2) of family and priors w1, 1 - w1.
        """
        check_compatible(theta1, theta2)
        if theta1.family != family:
            raise DimensionError("Class parameters belong to %r, not %r" % (theta1.family, family))
        if theta1.system != NATURAL:
            raise DimensionError("Class parameters must be natural-coordinate points")
        self.family = family
        self.theta1 = theta1
        self.theta2 = theta2
        self.w1 = check_open_unit(w1, "w1")

    @property
    def w2(self):
        return 1.0 - self.w1

    def toDict(self):
        return {"family": self.family.name, "hyper": dict(self.family.hyper),
                "p": self.family.conventional(self.theta1), "q": self.family.conventional(self.theta2),
                "w1": self.w1}


class ErrorEstimate(object):
    def __init__(self, point_estimate, std_error, samples):
        self.point_estimate = float(point_estimate)
        self.std_error = float(std_error)
        self.samples = int(samples)

    def __repr__(self):
        return "ErrorEstimate(%r +/- %r, n=%d)" % (self.point_estimate, self.std_error, self.samples)

    def toDict(self):
        return {"point_estimate": self.point_estimate, "std_error": self.std_error, "samples": self.samples}


class BoundReport(object):
    def __init__(self, chernoff_info, alpha_star, resistor, jeffreys, bhattacharyya_info, violations=None):
        self.chernoff_info = float(chernoff_info)
        self.alpha_star = float(alpha_star)
        self.resistor = float(resistor)
        self.jeffreys = float(jeffreys)
        self.bhattacharyya_info = float(bhattacharyya_info)
        self.violations = list(violations or [])

    @property
    def ordered(self):
        return not self.violations

    def toDict(self):
        return {
            "chernoff_info": self.chernoff_info,
            "alpha_star": self.alpha_star,
            "resistor": self.resistor,
            "jeffreys": self.jeffreys,
            "bhattacharyya_info": self.bhattacharyya_info,
            "ordered": self.ordered,
            "violations": list(self.violations),
        }


def _decision_scores(problem, x):
    family = problem.family
    V, M = family.sufficient_statistic(family.as_samples(x))
    delta = difference(problem.theta1, problem.theta2)
    score = V.dot(delta.vector)
    if M is not None:
        score = score + np.einsum("nij,ij->n", M, delta.matrix)
    return score - log_normalizer(problem.theta1) + log_normalizer(problem.theta2)


def map_decide_batch(problem, x):
    """MAP labels (1 or 2) for a batch of samples; ties go to class 1."""
    threshold = math.log(problem.w2 / problem.w1)
    return np.where(_decision_scores(problem, x) >= threshold, 1, 2)


def map_decide(problem, x):
    """
    MAP label of one sample: class 1 iff
    <t(x), theta1 - theta2> - F(theta1) + F(theta2) >= log(w2 / w1).
    """
    return int(map_decide_batch(problem, x)[0])


def sample(family, theta, n, seed=0):
    """
    n independent draws from p(x; theta), reproducible for a given seed
    (an int or a numpy SeedSequence). Vector families return an (n, d) array.
    """
    n = int(n)
    rng = np.random.default_rng(seed)
    params = family.conventional(theta)
    name = family.name
    if name == "poisson":
        return rng.poisson(params["lambda"], size=n).astype(float)
    if name == "bernoulli":
        return (rng.random(n) < params["p"]).astype(float)
    if name == "exponential":
        return rng.exponential(1.0 / params["lambda"], size=n)
    if name == "gaussian-fixed-sigma":
        return rng.normal(params["mu"], family.hyper["sigma"], size=n)
    if name == "gaussian-1d":
        return rng.normal(params["mu"], math.sqrt(params["var"]), size=n)
    if name == "gaussian-mvn":
        mu = np.asarray(params["mu"])
        chol = np.linalg.cholesky(np.asarray(params["sigma"]))
        return mu + rng.standard_normal((n, family.matrix_dim)).dot(chol.T)
    raise UnsupportedError("Sampling from %r is not supported" % family)


def empirical_bayes_error(problem, n, seed=0):
    """
    Monte Carlo Bayes error of the MAP rule: draw the class from the prior, then the
    observation from that class, and count misclassifications.
    """
    n = int(n)
    if n < 1:
        raise ValueError("Need at least one sample, got %d" % n)
    label_seed, seed1, seed2 = np.random.SeedSequence(seed).spawn(3)
    from_class1 = np.random.default_rng(label_seed).random(n) < problem.w1
    n1 = int(np.count_nonzero(from_class1))
    mistakes = 0
    if n1:
        x1 = sample(problem.family, problem.theta1, n1, seed1)
        mistakes += int(np.count_nonzero(map_decide_batch(problem, x1) != 1))
    if n - n1:
        x2 = sample(problem.family, problem.theta2, n - n1, seed2)
        mistakes += int(np.count_nonzero(map_decide_batch(problem, x2) != 2))
    estimate = mistakes / float(n)
    logger.debug("%d of %d samples misclassified", mistakes, n)
    return ErrorEstimate(estimate, math.sqrt(estimate * (1.0 - estimate) / n), n)


def _log_bound(problem, alpha, divergence):
    return alpha * math.log(problem.w1) + (1.0 - alpha) * math.log(problem.w2) - divergence


def chernoff_bound(problem, alpha):
    """E* <= w1^alpha w2^(1 - alpha) c_alpha(p1 : p2)."""
    alpha = check_open_unit(alpha)
    return math.exp(_log_bound(problem, alpha, _jensen_value(problem.theta1, problem.theta2, alpha)))


def best_chernoff_bound(problem, cfg=None):
    """
    The tightest Chernoff bound over alpha: at the Chernoff exponent alpha* for equal
    priors, at the minimiser of w1^alpha w2^(1 - alpha) c_alpha otherwise.
    """
    return optimal_bound_alpha(problem, cfg)[1]


def optimal_bound_alpha(problem, cfg=None):
    """
    Exponent minimising the Chernoff bound, and the bound there.

    With equal priors this is alpha*; otherwise the prior factor tilts the optimum and the
    (convex) log-bound is minimised by a bounded scalar search.
    """
    if problem.w1 == 0.5:
        result = chernoff_information(problem.theta1, problem.theta2, cfg)
        return result.alpha_star, math.exp(_log_bound(problem, result.alpha_star, result.info))

    def objective(alpha):
        return _log_bound(problem, alpha, _jensen_value(problem.theta1, problem.theta2, alpha))

    res = optimize.minimize_scalar(objective, bounds=(SEARCH_MARGIN, 1.0 - SEARCH_MARGIN), method="bounded",
                                   options={"xatol": 1e-10})
    return float(res.x), math.exp(float(res.fun))


def bhattacharyya_lower_bound(problem):
    """E* >= 1/2 (1 - sqrt(1 - 4 w1 w2 rho^2)), rho the Bhattacharyya coefficient."""
    rho = math.exp(-_jensen_value(problem.theta1, problem.theta2, 0.5))
    return 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - 4.0 * problem.w1 * problem.w2 * rho * rho)))


def bound_ordering_report(problem, cfg=None):
    """
    Chernoff information, resistor-average and (half) Jeffreys divergences and the
    Bhattacharyya distance of the class densities, checking C_1/2 <= C* <= R <= J.
    """
    p, q = problem.theta1, problem.theta2
    result = chernoff_information(p, q, cfg)
    report = BoundReport(result.info, result.alpha_star, resistor_average(p, q).value, jeffreys(p, q).value,
                         bhattacharyya(p, q).value)
    chain = [
        ("bhattacharyya_info <= chernoff_info", report.bhattacharyya_info, report.chernoff_info),
        ("chernoff_info <= resistor", report.chernoff_info, report.resistor),
        ("resistor <= jeffreys", report.resistor, report.jeffreys),
    ]
    for label, lower, upper in chain:
        if lower > upper + ORDER_TOLERANCE * max(1.0, abs(upper)):
            logger.warning("Bound ordering violated: %s (%.17g > %.17g) for p=%r, q=%r", label, lower, upper, p, q)
            report.violations.append(label)
    return report
