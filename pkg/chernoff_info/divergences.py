"""
Divergences between two members of the same exponential family.

Every alpha-divergence here goes through the skew Jensen divergence of the
log-normalizer on natural parameters, since

    C_alpha(p : q) = -log int p^alpha q^(1 - alpha) = J_F^(alpha)(theta_p : theta_q).

Hand-derived closed forms for particular families are kept separately at the
bottom of the module and are checked against the generic route.
"""
import math

import numpy as np
from scipy import special

from .errors import DimensionError, RangeError
from .families import NATURAL, check_compatible, combine, difference, gradient, inner_product, log_normalizer
from .utils import check_open_unit, clamp_nonnegative


CLOSED_FORM = "closed_form"
GENERIC_JENSEN = "generic_jensen"
ORACLE = "oracle"


class DivergenceValue(object):
    def __init__(self, value, method, alpha=None, name=None):
        """
        A nonnegative divergence in nats.

        :param method: closed_form, generic_jensen or oracle.
        :param alpha: Exponent for members of an alpha-family, else None.
        :param name: Name of the divergence, for reports.
        """
        self.value = float(value)
        self.method = method
        self.alpha = alpha
        self.name = name

    def __float__(self):
        return self.value

    def __repr__(self):
        if self.alpha is None:
            return "DivergenceValue(%r, %s)" % (self.value, self.method)
        return "DivergenceValue(%r, %s, alpha=%r)" % (self.value, self.method, self.alpha)

    def toDict(self):
        obj = {"value": self.value, "method": self.method}
        if self.alpha is not None:
            obj["alpha"] = self.alpha
        if self.name is not None:
            obj["name"] = self.name
        return obj


def _check_pair(family, p, q):
    check_compatible(p, q)
    if p.system != NATURAL:
        raise DimensionError("Divergences take natural-coordinate points")
    if family is not None and p.family != family:
        raise DimensionError("Points belong to %r, not %r" % (p.family, family))


def _bregman_value(p, q):
    fp = log_normalizer(p)
    fq = log_normalizer(q)
    cross = inner_product(difference(p, q), gradient(q))
    return clamp_nonnegative(fp - fq - cross, scale=max(abs(fp), abs(fq), abs(cross)))


def bregman(family, p, q):
    """B_F(theta_p : theta_q) = F(p) - F(q) - <p - q, grad F(q)>."""
    _check_pair(family, p, q)
    return DivergenceValue(_bregman_value(p, q), CLOSED_FORM, name="bregman")


def _jensen_value(p, q, alpha):
    # The larger weight always goes first: 1 - w is then exact for w >= 1/2, so
    # J(p:q; a) and J(q:p; 1 - a) evaluate the same floating-point expression.
    if alpha < 0.5:
        p, q, alpha = q, p, 1.0 - alpha
    w = alpha
    fp = log_normalizer(p)
    fq = log_normalizer(q)
    fm = log_normalizer(combine(p, q, w, 1.0 - w))
    return clamp_nonnegative(w * fp + (1.0 - w) * fq - fm, scale=max(abs(fp), abs(fq), abs(fm)))


def skew_jensen(family, p, q, alpha):
    """J_F^(alpha)(p : q) = alpha F(p) + (1 - alpha) F(q) - F(alpha p + (1 - alpha) q)."""
    alpha = check_open_unit(alpha)
    _check_pair(family, p, q)
    return DivergenceValue(_jensen_value(p, q, alpha), GENERIC_JENSEN, alpha=alpha, name="skew_jensen")


def chernoff_alpha_divergence(p, q, alpha):
    """Chernoff alpha-divergence of the first type, C_alpha(p : q) = J_F^(alpha)(theta_p : theta_q)."""
    alpha = check_open_unit(alpha)
    _check_pair(None, p, q)
    return DivergenceValue(_jensen_value(p, q, alpha), GENERIC_JENSEN, alpha=alpha, name="chernoff_alpha")


def chernoff_coefficient(p, q, alpha):
    """c_alpha(p : q) = exp(-C_alpha(p : q)), in (0, 1]."""
    return math.exp(-chernoff_alpha_divergence(p, q, alpha).value)


def chernoff_alpha_divergence_second_type(p, q, alpha):
    """C'_alpha(p : q) = (1 - c_alpha(p : q)) / (alpha (1 - alpha))."""
    alpha = check_open_unit(alpha)
    _check_pair(None, p, q)
    value = -math.expm1(-_jensen_value(p, q, alpha)) / (alpha * (1.0 - alpha))
    return DivergenceValue(value, GENERIC_JENSEN, alpha=alpha, name="chernoff_alpha_second_type")


def kl(p, q):
    """KL(p : q) = B_F(theta_q : theta_p); note the swapped arguments."""
    _check_pair(None, p, q)
    return DivergenceValue(_bregman_value(q, p), CLOSED_FORM, name="kl")


def _limit_alpha(alpha):
    try:
        alpha = float(alpha)
    except (TypeError, ValueError):
        raise RangeError("alpha must be a real number, got %r" % (alpha,))
    if alpha == 1.0:
        return alpha
    return check_open_unit(alpha)


def renyi(p, q, alpha):
    """R_alpha(p : q) = J_F^(alpha)(theta_p : theta_q) / (1 - alpha); alpha = 1 gives KL(p : q)."""
    alpha = _limit_alpha(alpha)
    if alpha == 1.0:
        value = kl(p, q)
        return DivergenceValue(value.value, value.method, alpha=alpha, name="renyi")
    _check_pair(None, p, q)
    return DivergenceValue(_jensen_value(p, q, alpha) / (1.0 - alpha), GENERIC_JENSEN, alpha=alpha, name="renyi")


def tsallis(p, q, alpha):
    """T_alpha(p : q) = (1 - c_alpha(p : q)) / (1 - alpha); alpha = 1 gives KL(p : q)."""
    alpha = _limit_alpha(alpha)
    if alpha == 1.0:
        value = kl(p, q)
        return DivergenceValue(value.value, value.method, alpha=alpha, name="tsallis")
    _check_pair(None, p, q)
    value = -math.expm1(-_jensen_value(p, q, alpha)) / (1.0 - alpha)
    return DivergenceValue(value, GENERIC_JENSEN, alpha=alpha, name="tsallis")


def amari_alpha(p, q, alpha_amari):
    """
    Amari alpha-divergence A_a(p : q) = 4 / (1 - a^2) (1 - c_{(1 - a)/2}(p : q)).

    a = -1 is KL(p : q) and a = +1 is KL(q : p).
    """
    try:
        a = float(alpha_amari)
    except (TypeError, ValueError):
        raise RangeError("alpha must be a real number, got %r" % (alpha_amari,))
    if a == -1.0:
        value = kl(p, q)
    elif a == 1.0:
        value = kl(q, p)
    elif -1.0 < a < 1.0:
        _check_pair(None, p, q)
        c_complement = -math.expm1(-_jensen_value(p, q, 0.5 * (1.0 - a)))
        return DivergenceValue(4.0 / (1.0 - a * a) * c_complement, GENERIC_JENSEN, alpha=a, name="amari_alpha")
    else:
        raise RangeError("Amari alpha must lie in [-1, 1], got %r" % a)
    return DivergenceValue(value.value, value.method, alpha=a, name="amari_alpha")


def bhattacharyya(p, q):
    """Bhattacharyya distance C_1/2(p : q)."""
    _check_pair(None, p, q)
    return DivergenceValue(_jensen_value(p, q, 0.5), GENERIC_JENSEN, alpha=0.5, name="bhattacharyya")


def jeffreys(p, q):
    """Half the Jeffreys divergence: the arithmetic mean of the two sided KL divergences."""
    value = 0.5 * (kl(p, q).value + kl(q, p).value)
    return DivergenceValue(value, CLOSED_FORM, name="jeffreys")


def resistor_average(p, q):
    """Resistor-average distance KL(p:q) KL(q:p) / (KL(p:q) + KL(q:p)); 0 when p = q."""
    a = kl(p, q).value
    b = kl(q, p).value
    if a + b == 0.0:
        return DivergenceValue(0.0, CLOSED_FORM, name="resistor_average")
    return DivergenceValue(a * b / (a + b), CLOSED_FORM, name="resistor_average")


def _covariance(sigma):
    return np.atleast_2d(np.asarray(sigma, dtype=float))


def gaussian_chernoff_alpha_closed_form(mu1, sigma1, mu2, sigma2, alpha):
    """
    Chernoff alpha-divergence between N(mu1, sigma1) and N(mu2, sigma2).

    C_alpha = 1/2 log(|S| / (|sigma1|^(1 - alpha) |sigma2|^alpha))
              + alpha (1 - alpha) / 2 dmu^T S^-1 dmu,   S = (1 - alpha) sigma1 + alpha sigma2.

    Agrees with the skew Jensen divergence of the MVN log-normalizer.
    """
    alpha = check_open_unit(alpha)
    s1 = _covariance(sigma1)
    s2 = _covariance(sigma2)
    dmu = np.atleast_1d(np.asarray(mu1, dtype=float)) - np.atleast_1d(np.asarray(mu2, dtype=float))
    mixed = (1.0 - alpha) * s1 + alpha * s2
    _, logdet_mixed = np.linalg.slogdet(mixed)
    _, logdet1 = np.linalg.slogdet(s1)
    _, logdet2 = np.linalg.slogdet(s2)
    value = 0.5 * (logdet_mixed - (1.0 - alpha) * logdet1 - alpha * logdet2)
    value += 0.5 * alpha * (1.0 - alpha) * dmu.dot(np.linalg.solve(mixed, dmu))
    return DivergenceValue(clamp_nonnegative(value, scale=abs(logdet_mixed)), CLOSED_FORM, alpha=alpha,
                           name="chernoff_alpha")


def gaussian_renyi_closed_form(mu1, sigma1, mu2, sigma2, alpha):
    """R_alpha between two Gaussians, C_alpha / (1 - alpha) with C_alpha as above."""
    c = gaussian_chernoff_alpha_closed_form(mu1, sigma1, mu2, sigma2, alpha)
    return DivergenceValue(c.value / (1.0 - c.alpha), CLOSED_FORM, alpha=c.alpha, name="renyi")


def dirichlet_chernoff_alpha_closed_form(p, q, alpha):
    """
    Chernoff alpha-divergence between Dirichlet(p) and Dirichlet(q):

        alpha sum log G(p_i) + (1 - alpha) sum log G(q_i) - sum log G(m_i)
        - alpha log G(sum p_i) - (1 - alpha) log G(sum q_i) + log G(sum m_i),

    with m = alpha p + (1 - alpha) q.
    """
    alpha = check_open_unit(alpha)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    m = alpha * p + (1.0 - alpha) * q
    value = (alpha * np.sum(special.gammaln(p)) + (1.0 - alpha) * np.sum(special.gammaln(q))
             - np.sum(special.gammaln(m))
             - alpha * special.gammaln(np.sum(p)) - (1.0 - alpha) * special.gammaln(np.sum(q))
             + special.gammaln(np.sum(m)))
    return DivergenceValue(clamp_nonnegative(value), CLOSED_FORM, alpha=alpha, name="chernoff_alpha")


def poisson_kl_closed_form(lam_p, lam_q):
    """KL(Poisson(lam_p) : Poisson(lam_q)) = lam_q - lam_p + lam_p log(lam_p / lam_q)."""
    value = lam_q - lam_p + lam_p * math.log(lam_p / lam_q)
    return DivergenceValue(clamp_nonnegative(value, scale=max(lam_p, lam_q)), CLOSED_FORM, name="kl")
