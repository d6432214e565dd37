"""
Chernoff information C* = max_alpha J_F^(alpha)(theta_p : theta_q) between two
members of the same exponential family.

Convention: theta(alpha) = alpha theta_p + (1 - alpha) theta_q throughout. Along
that segment the bisector gap B_F(theta_p : theta) - B_F(theta_q : theta) equals
dJ/dalpha, decreasing from B_F(theta_p : theta_q) > 0 at alpha = 0 to
-B_F(theta_q : theta_p) < 0 at alpha = 1; its unique root is the Chernoff point.
"""
import logging
import math

import numpy as np

from . import oracle
from .divergences import _jensen_value, bregman
from .errors import DomainError, NonConvergenceError, RangeError, UnsupportedError
from .families import (EXPECTATION, NATURAL, ParamPoint, check_compatible, combine, difference, gradient,
                       inner_product, legendre_dual, log_density, log_normalizer)
from .utils import check_open_unit

logger = logging.getLogger(__name__)

CLOSED_FORM = "closed_form"
BISECTION = "bisection"

CSV_HEADER = "alpha,chernoff_alpha_divergence"


class BisectionConfig(object):
    def __init__(self, alpha_tolerance=1e-12, gap_tolerance=1e-10, max_iterations=200):
        """
        Stopping rule of the geodesic bisection: stop when the alpha interval is no
        wider than alpha_tolerance or the bisector gap is within gap_tolerance.
        """
        alpha_tolerance = float(alpha_tolerance)
        gap_tolerance = float(gap_tolerance)
        if not (alpha_tolerance > 0 and gap_tolerance > 0):
            raise RangeError("Bisection tolerances must be positive")
        if int(max_iterations) != max_iterations or max_iterations < 1:
            raise RangeError("max_iterations must be an integer >= 1, got %r" % (max_iterations,))
        self.alpha_tolerance = alpha_tolerance
        self.gap_tolerance = gap_tolerance
        self.max_iterations = int(max_iterations)

    def toDict(self):
        return {"alpha_tolerance": self.alpha_tolerance, "gap_tolerance": self.gap_tolerance,
                "max_iterations": self.max_iterations}


class ChernoffResult(object):
    def __init__(self, alpha_star, info, theta_star, bregman_gap, iterations, method):
        self.alpha_star = float(alpha_star)
        self.info = float(info)
        self.theta_star = theta_star
        self.bregman_gap = float(bregman_gap)
        self.iterations = int(iterations)
        self.method = method

    def __repr__(self):
        return "ChernoffResult(alpha_star=%r, info=%r, method=%s, iterations=%d)" % (
            self.alpha_star, self.info, self.method, self.iterations)

    def toDict(self):
        return {
            "alpha_star": self.alpha_star,
            "info": self.info,
            "method": self.method,
            "iterations": self.iterations,
            "bregman_gap": self.bregman_gap,
            "chernoff_point": self.theta_star.family.conventional(self.theta_star),
        }


class SweepTable(object):
    def __init__(self, alphas, values):
        """(alpha, C_alpha) samples, ordered by alpha."""
        rows = sorted(zip([float(a) for a in alphas], [float(v) for v in values]))
        self.alphas = [a for a, _ in rows]
        self.values = [v for _, v in rows]

    def __len__(self):
        return len(self.alphas)

    def rows(self):
        return list(zip(self.alphas, self.values))

    def argmax(self):
        """The (alpha, value) row with the largest value; ties go to the row nearest 1/2."""
        best = None
        for a, v in self.rows():
            if best is None or v > best[1] or (v == best[1] and abs(a - 0.5) < abs(best[0] - 0.5)):
                best = (a, v)
        return best

    def toDict(self):
        return {"alpha": list(self.alphas), "chernoff_alpha_divergence": list(self.values)}

    def toCSV(self, out):
        """Write the table as CSV to a path or an open file."""
        lines = [CSV_HEADER] + ["%.17g,%.17g" % row for row in self.rows()]
        text = "\n".join(lines) + "\n"
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w") as fp:
                fp.write(text)


def _check_natural_pair(p, q):
    check_compatible(p, q)
    if p.system != NATURAL:
        raise DomainError("Expected natural-coordinate points")


def e_geodesic(p, q, lam):
    """Point (1 - lam) theta_p + lam theta_q of the exponential geodesic."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise RangeError("lambda must lie in [0, 1], got %r" % lam)
    _check_natural_pair(p, q)
    return combine(p, q, 1.0 - lam, lam)


def m_geodesic_eta(p, q, lam):
    """Point (1 - lam) eta_p + lam eta_q, the mixture geodesic in expectation coordinates."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise RangeError("lambda must lie in [0, 1], got %r" % lam)
    check_compatible(p, q)
    if p.system != EXPECTATION:
        raise DomainError("Mixture geodesics are interpolated in expectation coordinates")
    return combine(p, q, 1.0 - lam, lam)


def bisector_gap(p, q, theta):
    """B_F(theta_p : theta) - B_F(theta_q : theta); zero on the right-sided Bregman bisector."""
    _check_natural_pair(p, q)
    family = p.family
    return bregman(family, p, theta).value - bregman(family, q, theta).value


def optimality_residual(p, q, theta):
    """
    (F(theta_p) - F(theta_q)) - <theta_p - theta_q, grad F(theta)>, the derivative of
    alpha -> J^(alpha)(theta_p : theta_q) at theta = theta(alpha). Zero at the Chernoff point.
    """
    _check_natural_pair(p, q)
    check_compatible(p, theta)
    return (log_normalizer(p) - log_normalizer(q)) - inner_product(difference(p, q), gradient(theta))


def _degenerate(p, q, method):
    return ChernoffResult(0.5, 0.0, combine(p, q, 0.5, 0.5), 0.0, 0, method)


def _result(p, q, alpha, iterations, method):
    theta = combine(p, q, alpha, 1.0 - alpha)
    if 0.0 < alpha < 1.0:
        info = _jensen_value(p, q, alpha)
    else:
        info = 0.0
    return ChernoffResult(alpha, info, theta, bisector_gap(p, q, theta), iterations, method)


def chernoff_bisection(p, q, cfg=None):
    """
    Geodesic bisection for the Chernoff point.

    Halves the alpha bracket [lo, hi] while keeping gap(lo) > 0 > gap(hi), until the
    bracket is narrower than cfg.alpha_tolerance or the gap is within cfg.gap_tolerance.
    """
    if cfg is None:
        cfg = BisectionConfig()
    _check_natural_pair(p, q)
    if p.same_as(q):
        return _degenerate(p, q, BISECTION)

    lo, hi = 0.0, 1.0
    best_alpha, best_gap = None, None
    iterations = 0
    alpha = 0.5
    converged = False
    while iterations < cfg.max_iterations:
        iterations += 1
        alpha = 0.5 * (lo + hi)
        theta = combine(p, q, alpha, 1.0 - alpha)
        gap = bisector_gap(p, q, theta)
        logger.debug("iteration %d: alpha in [%.17g, %.17g], gap %.3e", iterations, lo, hi, gap)
        if best_gap is None or abs(gap) < abs(best_gap):
            best_alpha, best_gap = alpha, gap
        if abs(gap) <= cfg.gap_tolerance:
            converged = True
            break
        if gap > 0:
            lo = alpha
        else:
            hi = alpha
        if hi - lo <= cfg.alpha_tolerance:
            alpha = 0.5 * (lo + hi)
            converged = True
            break

    if not converged:
        raise NonConvergenceError(
            "Bisection did not converge in %d iterations (best alpha %.17g, gap %.3e)"
            % (iterations, best_alpha, best_gap),
            alpha=best_alpha, gap=best_gap, iterations=iterations)
    return _result(p, q, alpha, iterations, BISECTION)


def chernoff_closed_form_order1(p, q, cfg=None):
    """
    Closed-form Chernoff information for order-1 families:

        alpha* = ((grad F)^-1(s) - theta_q) / (theta_p - theta_q),  s = (F(p) - F(q)) / (theta_p - theta_q)

    Families without an inverse gradient (or of higher order) go through
    chernoff_bisection instead, and the result's method says so.
    """
    _check_natural_pair(p, q)
    family = p.family
    if family.order != 1 or not family.has_dual or family.matrix_dim is not None:
        logger.info("No closed form for %r; falling back to bisection", family)
        return chernoff_bisection(p, q, cfg)
    if p.same_as(q):
        return _degenerate(p, q, CLOSED_FORM)
    tp = p.coords[0]
    tq = q.coords[0]
    slope = (log_normalizer(p) - log_normalizer(q)) / (tp - tq)
    m = legendre_dual(ParamPoint(family, [slope], system=EXPECTATION)).coords[0]
    alpha = min(max((m - tq) / (tp - tq), 0.0), 1.0)
    return _result(p, q, alpha, 0, CLOSED_FORM)


def chernoff_information(p, q, cfg=None):
    """Chernoff information: closed form when available, geodesic bisection otherwise."""
    return chernoff_closed_form_order1(p, q, cfg)


def poisson_chernoff_closed_form(lam1, lam2):
    """
    Chernoff exponent and information between Poisson(lam1) and Poisson(lam2).

    With rho = lam2 / lam1 and L = log rho:

        C = lam1 ((rho - 1)(log((rho - 1) / L) - 1) + L) / L,

    and alpha* = 1 - log((rho - 1) / L) / L is the weight on lam1.
    """
    lam1 = float(lam1)
    lam2 = float(lam2)
    if not (lam1 > 0 and lam2 > 0):
        raise DomainError("Poisson rates must be positive")
    if lam1 == lam2:
        return 0.5, 0.0
    rho = lam2 / lam1
    L = math.log(rho)
    z = math.log((rho - 1.0) / L)
    info = lam1 * ((rho - 1.0) * (z - 1.0) + L) / L
    return 1.0 - z / L, info


def default_grid(points):
    """The grid {i / (points + 1) : i = 1..points}."""
    points = int(points)
    if points < 2:
        raise RangeError("An alpha grid needs at least 2 points, got %d" % points)
    return [i / float(points + 1) for i in range(1, points + 1)]


def alpha_sweep(p, q, grid):
    """C_alpha(p : q) on every alpha of grid, as a SweepTable ordered by alpha."""
    _check_natural_pair(p, q)
    alphas = [check_open_unit(a) for a in grid]
    return SweepTable(alphas, [_jensen_value(p, q, a) for a in alphas])


def chernoff_point_density_check(p, q, result, spec=None):
    """
    Largest pointwise deviation between the Chernoff distribution p_F(x; theta*) and the
    normalized geometric mean p^a q^(1 - a) / c_a, a = alpha*, over the oracle's grid.
    """
    _check_natural_pair(p, q)
    family = p.family
    if not (family.support.discrete or family.support.scalar):
        raise UnsupportedError("Density check needs a scalar or discrete support, not %s" % family.support.kind)
    spec = spec or oracle.IntegrationSpec()
    a = result.alpha_star
    grid = oracle.evaluation_grid(p, q, spec)
    coefficient = oracle.chernoff_coefficient_numeric(p, q, a, spec) if 0.0 < a < 1.0 else 1.0
    chernoff_density = np.exp(log_density(result.theta_star, grid))
    geometric = np.exp(a * log_density(p, grid) + (1.0 - a) * log_density(q, grid) - math.log(coefficient))
    return float(np.max(np.abs(chernoff_density - geometric)))
