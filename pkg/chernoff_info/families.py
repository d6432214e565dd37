"""
Exponential families in canonical form

    p(x; theta) = exp(<t(x), theta> - F(theta) + k(x))

together with their Legendre duality (expectation coordinates eta = grad F(theta))
and a small catalog of concrete families.
"""
import logging
import numbers

import numpy as np
from scipy import special

from .errors import ConstructionError, DimensionError, DomainError, UnsupportedError


logger = logging.getLogger(__name__)

NATURAL = "natural"
EXPECTATION = "expectation"

# Distance to the boundary of the open natural domain below which a point is rejected.
BOUNDARY_MARGIN = 1e-12

DISCRETE_NONNEGATIVE_INTEGERS = "discrete-nonnegative-integers"
REAL_LINE = "real-line"
POSITIVE_REALS = "positive-reals"
SIMPLEX = "simplex"
REAL_VECTOR = "real-vector"


class Support(object):
    def __init__(self, kind, dimension=1, upper=None):
        """
        Describes the sample space of a family.

        :param kind: One of the support kind constants of this module.
        :param dimension: Number of coordinates of a single sample.
        :param upper: Largest support point for bounded discrete supports (1 for Bernoulli).
        """
        self.kind = kind
        self.dimension = dimension
        self.upper = upper

    @property
    def discrete(self):
        return self.kind == DISCRETE_NONNEGATIVE_INTEGERS

    @property
    def scalar(self):
        return self.dimension == 1 and self.kind != SIMPLEX

    def toDict(self):
        obj = {"kind": self.kind, "dimension": self.dimension}
        if self.upper is not None:
            obj["upper"] = self.upper
        return obj


class Statistic(object):
    """A vector, optionally paired with a symmetric matrix block, that is not tied to a family."""

    def __init__(self, vector, matrix=None):
        self.vector = np.asarray(vector, dtype=float).reshape(-1)
        self.matrix = None if matrix is None else np.asarray(matrix, dtype=float)


class FamilyDescriptor(object):
    def __init__(self, name, order, vector_size, log_normalizer, grad_log_normalizer,
                 sufficient_statistic, carrier, domain_test, expectation_test, support,
                 to_natural, from_natural, inv_grad_log_normalizer=None, matrix_dim=None,
                 hyper=None, param_names=()):
        """
        A concrete exponential family.

        The callables taking parameters all receive the raw (vector, matrix) pair of a
        point; matrix is None for families without a matrix block.

        :param name: Family kind, e.g. "poisson".
        :param order: Dimension D of the natural parameter space.
        :param vector_size: Length of the vector block of a parameter.
        :param log_normalizer: (v, m) -> F(theta).
        :param grad_log_normalizer: (v, m) -> (v, m) of grad F(theta).
        :param inv_grad_log_normalizer: (v, m) -> (v, m) of (grad F)^-1(eta), or None.
        :param sufficient_statistic: samples -> (V, M) with one row per sample.
        :param carrier: samples -> k(x) per sample.
        :param domain_test: (v, m) -> bool, membership in the open natural domain.
        :param expectation_test: (v, m) -> bool, membership in the image of grad F.
        :param support: Support descriptor.
        :param to_natural: conventional params dict -> (v, m).
        :param from_natural: (v, m) -> conventional params dict.
        :param matrix_dim: Size d of the matrix block, None if there is none.
        :param hyper: Fixed hyperparameters the family was built with.
        """
        self.name = name
        self.order = order
        self.vector_size = vector_size
        self.log_normalizer = log_normalizer
        self.grad_log_normalizer = grad_log_normalizer
        self.inv_grad_log_normalizer = inv_grad_log_normalizer
        self.sufficient_statistic = sufficient_statistic
        self.carrier = carrier
        self.domain_test = domain_test
        self.expectation_test = expectation_test
        self.support = support
        self.to_natural = to_natural
        self.from_natural = from_natural
        self.matrix_dim = matrix_dim
        self.hyper = dict(hyper or {})
        self.param_names = tuple(param_names)

    @property
    def has_dual(self):
        return self.inv_grad_log_normalizer is not None

    def point(self, params):
        """Natural-coordinate ParamPoint for the conventional parameters params."""
        v, m = self.to_natural(params)
        return ParamPoint(self, v, m)

    def conventional(self, point):
        """Conventional parameters of a natural-coordinate point, as builtin types."""
        if point.system != NATURAL:
            point = legendre_dual(point)
        params = self.from_natural(point.coords, point.matrix_part)
        out = {}
        for k, v in params.items():
            v = np.asarray(v)
            out[k] = v.tolist() if v.ndim else float(v)
        return out

    def as_samples(self, x):
        """Reshape x to a batch of samples: (n, d) for vector and simplex supports, (n,) otherwise."""
        x = np.asarray(x, dtype=float)
        if self.support.kind in (REAL_VECTOR, SIMPLEX):
            return x.reshape(-1, self.support.dimension)
        return x.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, FamilyDescriptor):
            return NotImplemented
        return self.name == other.name and self.hyper == other.hyper

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.hyper.items()))))

    def __repr__(self):
        if self.hyper:
            hyper = ", ".join("%s=%r" % kv for kv in sorted(self.hyper.items()))
            return "FamilyDescriptor(%s, %s)" % (self.name, hyper)
        return "FamilyDescriptor(%s)" % self.name

    def toDict(self):
        return {"family": self.name, "hyper": dict(self.hyper), "order": self.order,
                "support": self.support.toDict()}


class ParamPoint(object):
    def __init__(self, family, coords, matrix_part=None, system=NATURAL):
        """
        A parameter of family in natural or expectation coordinates.

        The arrays are copied and frozen; points are immutable.
        """
        if system not in (NATURAL, EXPECTATION):
            raise ValueError("Unknown coordinate system '%s'" % system)
        coords = np.array(coords, dtype=float).reshape(-1)
        if coords.shape != (family.vector_size,):
            raise DimensionError("%r expects a vector block of size %d, got %d"
                                 % (family, family.vector_size, coords.size))
        if family.matrix_dim is None:
            if matrix_part is not None:
                raise DimensionError("%r has no matrix block" % family)
        else:
            if matrix_part is None:
                raise DimensionError("%r requires a %dx%d matrix block"
                                     % (family, family.matrix_dim, family.matrix_dim))
            matrix_part = np.array(matrix_part, dtype=float)
            d = family.matrix_dim
            if matrix_part.shape != (d, d):
                raise DimensionError("%r expects a %dx%d matrix block, got shape %s"
                                     % (family, d, d, matrix_part.shape))
            if not np.allclose(matrix_part, matrix_part.T, rtol=1e-10, atol=1e-12):
                raise DomainError("Matrix block must be symmetric")
            matrix_part = 0.5 * (matrix_part + matrix_part.T)
            matrix_part.setflags(write=False)
        if not np.all(np.isfinite(coords)) or (matrix_part is not None and not np.all(np.isfinite(matrix_part))):
            raise DomainError("Parameter has non-finite entries")
        if system == NATURAL and not family.domain_test(coords, matrix_part):
            raise DomainError("Point outside the natural domain of %r: %s" % (family, _describe(coords, matrix_part)))
        if system == EXPECTATION and not family.expectation_test(coords, matrix_part):
            raise DomainError("Point outside the expectation domain of %r: %s" % (family, _describe(coords, matrix_part)))
        coords.setflags(write=False)
        self.family = family
        self.coords = coords
        self.matrix_part = matrix_part
        self.system = system

    def parts(self):
        return self.coords, self.matrix_part

    def flatten(self):
        if self.matrix_part is None:
            return np.array(self.coords)
        return np.concatenate([self.coords, self.matrix_part.ravel()])

    def same_as(self, other):
        """Exact equality of family, coordinate system and values."""
        if self.family != other.family or self.system != other.system:
            return False
        if not np.array_equal(self.coords, other.coords):
            return False
        if self.matrix_part is None:
            return True
        return np.array_equal(self.matrix_part, other.matrix_part)

    def __repr__(self):
        return "ParamPoint(%s, %s, %s)" % (self.family.name, self.system, _describe(self.coords, self.matrix_part))


def _describe(v, m):
    if m is None:
        return np.array2string(np.asarray(v), precision=6)
    return "%s | %s" % (np.array2string(np.asarray(v), precision=6),
                        np.array2string(np.asarray(m), precision=6).replace("\n", ""))


def _parts(x):
    if isinstance(x, ParamPoint):
        return x.coords, x.matrix_part
    if isinstance(x, Statistic):
        return x.vector, x.matrix
    return np.asarray(x, dtype=float).reshape(-1), None


def check_compatible(*points):
    """Raise DimensionError unless every point belongs to the same family and coordinate system."""
    first = points[0]
    for p in points[1:]:
        if p.family != first.family:
            raise DimensionError("Points belong to different families: %r and %r" % (first.family, p.family))
        if p.system != first.system:
            raise DimensionError("Points are in different coordinate systems: %s and %s" % (first.system, p.system))


def inner_product(a, b):
    """
    Composite inner product <a, b> = a1^T b1 + tr(a2^T b2).

    a and b may be ParamPoints, Statistics or plain vectors.
    """
    av, am = _parts(a)
    bv, bm = _parts(b)
    if av.shape != bv.shape:
        raise DimensionError("Vector blocks differ in shape: %s vs %s" % (av.shape, bv.shape))
    if (am is None) != (bm is None):
        raise DimensionError("Only one operand has a matrix block")
    value = float(np.dot(av, bv))
    if am is not None:
        if am.shape != bm.shape:
            raise DimensionError("Matrix blocks differ in shape: %s vs %s" % (am.shape, bm.shape))
        value += float(np.sum(am * bm))
    return value


def combine(p, q, w_p, w_q):
    """The point w_p * p + w_q * q, in the coordinate system shared by p and q."""
    check_compatible(p, q)
    v = w_p * p.coords + w_q * q.coords
    m = None
    if p.matrix_part is not None:
        m = w_p * p.matrix_part + w_q * q.matrix_part
    return ParamPoint(p.family, v, m, p.system)


def difference(p, q):
    """p - q as a Statistic (differences are not parameters)."""
    check_compatible(p, q)
    m = None
    if p.matrix_part is not None:
        m = p.matrix_part - q.matrix_part
    return Statistic(p.coords - q.coords, m)


def _require(point, system):
    if point.system != system:
        raise DomainError("Expected a point in %s coordinates, got %s" % (system, point.system))


def log_normalizer(p):
    """F(theta) at a natural-coordinate point."""
    _require(p, NATURAL)
    return float(p.family.log_normalizer(p.coords, p.matrix_part))


def gradient(p):
    """grad F(theta) as an expectation-coordinate point."""
    _require(p, NATURAL)
    v, m = p.family.grad_log_normalizer(p.coords, p.matrix_part)
    return ParamPoint(p.family, v, m, EXPECTATION)


def legendre_dual(p):
    """Flip between natural and expectation coordinates via grad F and its inverse."""
    if p.system == NATURAL:
        return gradient(p)
    family = p.family
    if not family.has_dual:
        raise UnsupportedError("%r provides no inverse gradient; expectation to natural is unsupported" % family)
    v, m = family.inv_grad_log_normalizer(p.coords, p.matrix_part)
    return ParamPoint(family, v, m, NATURAL)


def dual_log_normalizer(p):
    """F*(eta) = <theta, eta> - F(theta) with theta = (grad F)^-1(eta)."""
    _require(p, EXPECTATION)
    theta = legendre_dual(p)
    return inner_product(theta, p) - log_normalizer(theta)


def dual_bregman(a, b):
    """B_{F*}(eta_a : eta_b) between two expectation-coordinate points."""
    _require(a, EXPECTATION)
    check_compatible(a, b)
    theta_b = legendre_dual(b)
    return dual_log_normalizer(a) - dual_log_normalizer(b) - inner_product(difference(a, b), theta_b)


def hessian_log_normalizer(p, step=1e-5):
    """
    Central finite-difference Hessian of F at p over the flattened parameter
    (vector block, then row-major matrix block). This is the Fisher information.
    """
    _require(p, NATURAL)
    family = p.family
    flat = p.flatten()
    n = flat.size
    nv = family.vector_size

    def grad_flat(x):
        v = x[:nv]
        m = None if family.matrix_dim is None else x[nv:].reshape(family.matrix_dim, family.matrix_dim)
        gv, gm = family.grad_log_normalizer(v, m)
        if gm is None:
            return np.asarray(gv, dtype=float)
        return np.concatenate([gv, np.asarray(gm).ravel()])

    hess = np.empty((n, n))
    for i in range(n):
        h = step * max(1.0, abs(flat[i]))
        up = flat.copy()
        down = flat.copy()
        up[i] += h
        down[i] -= h
        hess[:, i] = (grad_flat(up) - grad_flat(down)) / (2 * h)
    return 0.5 * (hess + hess.T)


def log_density(p, x):
    """log p(x; theta) = <t(x), theta> - F(theta) + k(x) for a batch of samples x."""
    _require(p, NATURAL)
    family = p.family
    samples = family.as_samples(x)
    V, M = family.sufficient_statistic(samples)
    value = V.dot(p.coords)
    if M is not None:
        value = value + np.einsum("nij,ij->n", M, p.matrix_part)
    return value - log_normalizer(p) + family.carrier(samples)


def _param(params, key):
    try:
        return params[key]
    except (KeyError, TypeError):
        raise DomainError("Missing conventional parameter '%s'" % key)


def _positive(value, key):
    value = float(value)
    if not value > 0:
        raise DomainError("Parameter '%s' must be positive, got %r" % (key, value))
    return value


def _scalar_stat(x):
    return x.reshape(-1, 1), None


def _zero_carrier(x):
    return np.zeros(x.shape[0])


def _poisson(hyper):
    def to_natural(params):
        return np.array([np.log(_positive(_param(params, "lambda"), "lambda"))]), None

    def from_natural(v, m):
        return {"lambda": np.exp(v[0])}

    def F(v, m):
        return np.exp(v[0])

    def grad(v, m):
        return np.array([np.exp(v[0])]), None

    def inv_grad(v, m):
        return np.array([np.log(v[0])]), None

    def carrier(x):
        return -special.gammaln(x + 1)

    return FamilyDescriptor(
        "poisson", 1, 1, F, grad, _scalar_stat, carrier,
        domain_test=lambda v, m: True,
        expectation_test=lambda v, m: v[0] > 0,
        support=Support(DISCRETE_NONNEGATIVE_INTEGERS),
        to_natural=to_natural, from_natural=from_natural,
        inv_grad_log_normalizer=inv_grad, param_names=("lambda",))


def _bernoulli(hyper):
    def to_natural(params):
        p = float(_param(params, "p"))
        if not 0 < p < 1:
            raise DomainError("Parameter 'p' must lie in (0, 1), got %r" % p)
        return np.array([special.logit(p)]), None

    def from_natural(v, m):
        return {"p": special.expit(v[0])}

    def F(v, m):
        return np.logaddexp(0.0, v[0])

    def grad(v, m):
        return np.array([special.expit(v[0])]), None

    def inv_grad(v, m):
        return np.array([special.logit(v[0])]), None

    return FamilyDescriptor(
        "bernoulli", 1, 1, F, grad, _scalar_stat, _zero_carrier,
        domain_test=lambda v, m: True,
        expectation_test=lambda v, m: 0 < v[0] < 1,
        support=Support(DISCRETE_NONNEGATIVE_INTEGERS, upper=1),
        to_natural=to_natural, from_natural=from_natural,
        inv_grad_log_normalizer=inv_grad, param_names=("p",))


def _exponential(hyper):
    def to_natural(params):
        return np.array([-_positive(_param(params, "lambda"), "lambda")]), None

    def from_natural(v, m):
        return {"lambda": -v[0]}

    def F(v, m):
        return -np.log(-v[0])

    def grad(v, m):
        return np.array([-1.0 / v[0]]), None

    def inv_grad(v, m):
        return np.array([-1.0 / v[0]]), None

    return FamilyDescriptor(
        "exponential", 1, 1, F, grad, _scalar_stat, _zero_carrier,
        domain_test=lambda v, m: v[0] < -BOUNDARY_MARGIN,
        expectation_test=lambda v, m: v[0] > 0,
        support=Support(POSITIVE_REALS),
        to_natural=to_natural, from_natural=from_natural,
        inv_grad_log_normalizer=inv_grad, param_names=("lambda",))


def _gaussian_fixed_sigma(hyper):
    try:
        sigma = float(hyper["sigma"])
    except (KeyError, TypeError, ValueError):
        raise ConstructionError("gaussian-fixed-sigma requires a numeric hyperparameter 'sigma'")
    if not sigma > 0:
        raise ConstructionError("gaussian-fixed-sigma requires sigma > 0, got %r" % sigma)
    s2 = sigma * sigma

    def to_natural(params):
        return np.array([float(_param(params, "mu")) / s2]), None

    def from_natural(v, m):
        return {"mu": v[0] * s2}

    def F(v, m):
        return 0.5 * v[0] * v[0] * s2

    def grad(v, m):
        return np.array([v[0] * s2]), None

    def inv_grad(v, m):
        return np.array([v[0] / s2]), None

    def carrier(x):
        return -x * x / (2 * s2) - 0.5 * np.log(2 * np.pi * s2)

    return FamilyDescriptor(
        "gaussian-fixed-sigma", 1, 1, F, grad, _scalar_stat, carrier,
        domain_test=lambda v, m: True,
        expectation_test=lambda v, m: True,
        support=Support(REAL_LINE),
        to_natural=to_natural, from_natural=from_natural,
        inv_grad_log_normalizer=inv_grad, hyper={"sigma": sigma}, param_names=("mu",))


def _gaussian_1d(hyper):
    def to_natural(params):
        mu = float(_param(params, "mu"))
        var = _positive(_param(params, "var"), "var")
        return np.array([mu / var, -0.5 / var]), None

    def from_natural(v, m):
        var = -0.5 / v[1]
        return {"mu": v[0] * var, "var": var}

    def F(v, m):
        return -v[0] * v[0] / (4 * v[1]) + 0.5 * np.log(-np.pi / v[1])

    def grad(v, m):
        mean = -v[0] / (2 * v[1])
        return np.array([mean, mean * mean - 0.5 / v[1]]), None

    def inv_grad(v, m):
        var = v[1] - v[0] * v[0]
        return np.array([v[0] / var, -0.5 / var]), None

    def stat(x):
        return np.stack([x, x * x], axis=1), None

    return FamilyDescriptor(
        "gaussian-1d", 2, 2, F, grad, stat, _zero_carrier,
        domain_test=lambda v, m: v[1] < -BOUNDARY_MARGIN,
        expectation_test=lambda v, m: v[1] - v[0] * v[0] > 0,
        support=Support(REAL_LINE),
        to_natural=to_natural, from_natural=from_natural,
        inv_grad_log_normalizer=inv_grad, param_names=("mu", "var"))


def _dimension(hyper, kind, minimum):
    try:
        d = hyper["d"]
    except (KeyError, TypeError):
        raise ConstructionError("%s requires an integer hyperparameter 'd'" % kind)
    if isinstance(d, bool) or not isinstance(d, numbers.Integral) or d < minimum:
        raise ConstructionError("%s requires an integer d >= %d, got %r" % (kind, minimum, d))
    return int(d)


def _positive_definite(matrix):
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        return False
    return True


def _gaussian_mvn(hyper):
    d = _dimension(hyper, "gaussian-mvn", 1)

    def to_natural(params):
        mu = np.asarray(_param(params, "mu"), dtype=float).reshape(-1)
        sigma = np.asarray(_param(params, "sigma"), dtype=float)
        if mu.shape != (d,) or sigma.shape != (d, d):
            raise DimensionError("gaussian-mvn(d=%d) expects mu of length %d and a %dx%d sigma" % (d, d, d, d))
        if not np.allclose(sigma, sigma.T) or not _positive_definite(sigma):
            raise DomainError("Parameter 'sigma' must be symmetric positive definite")
        precision = np.linalg.inv(sigma)
        precision = 0.5 * (precision + precision.T)
        return precision.dot(mu), 0.5 * precision

    def from_natural(v, m):
        sigma = 0.5 * np.linalg.inv(m)
        sigma = 0.5 * (sigma + sigma.T)
        return {"mu": sigma.dot(v), "sigma": sigma}

    def F(v, m):
        _, logdet = np.linalg.slogdet(m)
        return 0.25 * v.dot(np.linalg.solve(m, v)) - 0.5 * logdet + 0.5 * d * np.log(np.pi)

    def grad(v, m):
        inv = np.linalg.inv(m)
        a = inv.dot(v)
        return 0.5 * a, -0.25 * np.outer(a, a) - 0.5 * inv

    def inv_grad(v, m):
        sigma = -m - np.outer(v, v)
        precision = np.linalg.inv(sigma)
        precision = 0.5 * (precision + precision.T)
        return precision.dot(v), 0.5 * precision

    def stat(x):
        return x, -np.einsum("ni,nj->nij", x, x)

    def domain_test(v, m):
        return np.linalg.eigvalsh(m).min() > BOUNDARY_MARGIN

    def expectation_test(v, m):
        return _positive_definite(-m - np.outer(v, v))

    return FamilyDescriptor(
        "gaussian-mvn", d * (d + 3) // 2, d, F, grad, stat, _zero_carrier,
        domain_test=domain_test, expectation_test=expectation_test,
        support=Support(REAL_VECTOR, dimension=d),
        to_natural=to_natural, from_natural=from_natural,
        inv_grad_log_normalizer=inv_grad, matrix_dim=d, hyper={"d": d},
        param_names=("mu", "sigma"))


def _dirichlet(hyper):
    d = _dimension(hyper, "dirichlet", 2)

    def to_natural(params):
        p = np.asarray(_param(params, "p"), dtype=float).reshape(-1)
        if p.shape != (d,):
            raise DimensionError("dirichlet(d=%d) expects p of length %d" % (d, d))
        if not np.all(p > 0):
            raise DomainError("Parameter 'p' must be positive componentwise")
        return p - 1.0, None

    def from_natural(v, m):
        return {"p": v + 1.0}

    def F(v, m):
        return np.sum(special.gammaln(v + 1.0)) - special.gammaln(d + np.sum(v))

    def grad(v, m):
        return special.digamma(v + 1.0) - special.digamma(d + np.sum(v)), None

    def stat(x):
        return np.log(x), None

    return FamilyDescriptor(
        "dirichlet", d, d, F, grad, stat, _zero_carrier,
        domain_test=lambda v, m: bool(np.all(v > -1.0 + BOUNDARY_MARGIN)),
        expectation_test=lambda v, m: bool(np.all(v < 0)),
        support=Support(SIMPLEX, dimension=d),
        to_natural=to_natural, from_natural=from_natural,
        hyper={"d": d}, param_names=("p",))


FAMILY_BUILDERS = {
    "poisson": _poisson,
    "bernoulli": _bernoulli,
    "exponential": _exponential,
    "gaussian-fixed-sigma": _gaussian_fixed_sigma,
    "gaussian-1d": _gaussian_1d,
    "gaussian-mvn": _gaussian_mvn,
    "dirichlet": _dirichlet,
}


def make_family(kind, hyper=None):
    """
    Build a catalog family.

    :param kind: One of the keys of FAMILY_BUILDERS.
    :type kind: str
    :param hyper: Fixed hyperparameters: {"sigma": s} for gaussian-fixed-sigma,
        {"d": d} for gaussian-mvn and dirichlet.
    :type hyper: dict
    """
    if kind not in FAMILY_BUILDERS:
        raise ConstructionError("Unknown family '%s'; expected one of %s" % (kind, ", ".join(sorted(FAMILY_BUILDERS))))
    if hyper is not None and not isinstance(hyper, dict):
        raise ConstructionError("Hyperparameters must be a mapping, got %r" % (hyper,))
    family = FAMILY_BUILDERS[kind](hyper or {})
    logger.debug("Built %r", family)
    return family
