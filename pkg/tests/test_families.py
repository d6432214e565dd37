import math

import numpy as np
import pytest
from scipy import stats

from chernoff_info import oracle
from chernoff_info.divergences import bregman
from chernoff_info.errors import ConstructionError, DimensionError, DomainError, UnsupportedError
from chernoff_info.families import (EXPECTATION, NATURAL, ParamPoint, Statistic, check_compatible, combine,
                                    dual_bregman, dual_log_normalizer, gradient, hessian_log_normalizer,
                                    inner_product, legendre_dual, log_density, log_normalizer, make_family)

from conftest import random_params


def test_make_family_rejects_bad_input():
    with pytest.raises(ConstructionError):
        make_family("gamma")
    with pytest.raises(ConstructionError):
        make_family("gaussian-fixed-sigma")
    with pytest.raises(ConstructionError):
        make_family("gaussian-fixed-sigma", {"sigma": 0.0})
    with pytest.raises(ConstructionError):
        make_family("dirichlet", {"d": 1})
    with pytest.raises(ConstructionError):
        make_family("gaussian-mvn", {"d": True})
    with pytest.raises(ConstructionError):
        make_family("poisson", [1, 2])


def test_family_equality_uses_name_and_hyper():
    assert make_family("poisson") == make_family("poisson")
    assert make_family("gaussian-mvn", {"d": 2}) != make_family("gaussian-mvn", {"d": 3})
    assert hash(make_family("dirichlet", {"d": 3})) == hash(make_family("dirichlet", {"d": 3}))


def test_conventional_round_trip():
    poisson = make_family("poisson")
    p = poisson.point({"lambda": 2.0})
    assert p.system == NATURAL
    assert p.coords[0] == pytest.approx(math.log(2.0))
    assert poisson.conventional(p)["lambda"] == pytest.approx(2.0)

    mvn = make_family("gaussian-mvn", {"d": 2})
    sigma = [[2.0, 0.3], [0.3, 1.0]]
    q = mvn.point({"mu": [1.0, -1.0], "sigma": sigma})
    back = mvn.conventional(q)
    np.testing.assert_allclose(back["mu"], [1.0, -1.0], atol=1e-12)
    np.testing.assert_allclose(back["sigma"], sigma, atol=1e-12)


def test_points_outside_the_domain_are_rejected():
    with pytest.raises(DomainError):
        ParamPoint(make_family("exponential"), [0.0])
    with pytest.raises(DomainError):
        ParamPoint(make_family("gaussian-1d"), [1.0, 0.0])
    with pytest.raises(DomainError):
        make_family("poisson").point({"lambda": -1.0})
    with pytest.raises(DomainError):
        ParamPoint(make_family("poisson"), [float("nan")])
    with pytest.raises(DomainError):
        make_family("dirichlet", {"d": 2}).point({"p": [1.0, 0.0]})
    mvn = make_family("gaussian-mvn", {"d": 2})
    with pytest.raises(DomainError):
        ParamPoint(mvn, [0.0, 0.0], [[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(DomainError):
        ParamPoint(mvn, [0.0, 0.0], [[1.0, 0.0], [0.0, -1.0]])


def test_shape_mismatch_is_a_dimension_error():
    mvn = make_family("gaussian-mvn", {"d": 2})
    with pytest.raises(DimensionError):
        ParamPoint(mvn, [0.0, 0.0, 0.0], np.eye(2))
    with pytest.raises(DimensionError):
        ParamPoint(mvn, [0.0, 0.0])
    with pytest.raises(DimensionError):
        ParamPoint(make_family("poisson"), [0.0], np.eye(1))
    with pytest.raises(DimensionError):
        check_compatible(make_family("poisson").point({"lambda": 1.0}), make_family("bernoulli").point({"p": 0.5}))
    with pytest.raises(DimensionError):
        inner_product([1.0, 2.0], [1.0])


def test_points_are_immutable():
    p = make_family("gaussian-1d").point({"mu": 0.0, "var": 1.0})
    with pytest.raises(ValueError):
        p.coords[0] = 1.0


def test_bernoulli_near_degenerate_points():
    bernoulli = make_family("bernoulli")
    low = bernoulli.point({"p": 1e-300})
    high = bernoulli.point({"p": 1 - 1e-15})
    assert np.isfinite(log_normalizer(low))
    assert np.isfinite(log_normalizer(high))
    assert low.coords[0] < -690


def test_combine_and_inner_product():
    family = make_family("gaussian-1d")
    p = family.point({"mu": 0.0, "var": 1.0})
    q = family.point({"mu": 2.0, "var": 4.0})
    mid = combine(p, q, 0.5, 0.5)
    np.testing.assert_allclose(mid.coords, 0.5 * (p.coords + q.coords))
    assert mid.system == NATURAL
    assert inner_product(p, Statistic([1.0, 1.0])) == pytest.approx(p.coords.sum())


def test_duality_round_trip_and_young_fenchel(family, rng):
    if not family.has_dual:
        pytest.skip("no inverse gradient")
    for _ in range(100):
        theta = family.point(random_params(family, rng))
        eta = legendre_dual(theta)
        assert eta.system == EXPECTATION
        back = legendre_dual(eta)
        np.testing.assert_allclose(back.flatten(), theta.flatten(), rtol=1e-9, atol=1e-9)
        fenchel = log_normalizer(theta) + dual_log_normalizer(eta)
        assert fenchel == pytest.approx(inner_product(theta, eta), abs=1e-9)


def test_dirichlet_has_no_inverse_gradient():
    family = make_family("dirichlet", {"d": 3})
    eta = gradient(family.point({"p": [1.0, 2.0, 3.0]}))
    assert not family.has_dual
    with pytest.raises(UnsupportedError):
        legendre_dual(eta)


def test_dual_bregman_swaps_arguments(family, random_pair):
    if not family.has_dual:
        pytest.skip("no inverse gradient")
    for _ in range(10):
        p, q = random_pair(family)
        expected = bregman(family, q, p).value
        assert dual_bregman(gradient(p), gradient(q)) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("kind,hyper,params", [
    ("poisson", None, {"lambda": 0.5}),
    ("poisson", None, {"lambda": 2.0}),
    ("poisson", None, {"lambda": 10.0}),
    ("bernoulli", None, {"p": 0.3}),
    ("exponential", None, {"lambda": 1.7}),
    ("gaussian-fixed-sigma", {"sigma": 0.4}, {"mu": 1.0}),
    ("gaussian-1d", None, {"mu": -1.0, "var": 2.5}),
    ("gaussian-mvn", {"d": 1}, {"mu": [0.5], "sigma": [[3.0]]}),
    ("gaussian-mvn", {"d": 2}, {"mu": [0.5, 1.0], "sigma": [[2.0, 0.4], [0.4, 1.0]]}),
    ("dirichlet", {"d": 2}, {"p": [2.0, 3.0]}),
    ("dirichlet", {"d": 3}, {"p": [0.7, 2.0, 4.0]}),
])
def test_density_is_normalized(kind, hyper, params):
    family = make_family(kind, hyper)
    spec = oracle.IntegrationSpec(mc_samples=2000)
    assert oracle.normalization_check(family, family.point(params), spec) <= 1e-6


def test_mvn_log_normalizer_matches_gaussian_normalization():
    family = make_family("gaussian-mvn", {"d": 3})
    mu = np.array([0.3, -1.0, 2.0])
    sigma = np.array([[2.0, 0.3, 0.1], [0.3, 1.0, -0.2], [0.1, -0.2, 0.5]])
    theta = family.point({"mu": mu, "sigma": sigma})
    expected = 0.5 * mu.dot(np.linalg.solve(sigma, mu)) + 0.5 * np.linalg.slogdet(2 * np.pi * sigma)[1]
    assert log_normalizer(theta) == pytest.approx(expected, abs=1e-10)


def test_log_density_matches_scipy():
    x = np.array([0.0, 1.0, 3.0, 7.0])
    p = make_family("poisson").point({"lambda": 2.5})
    np.testing.assert_allclose(log_density(p, x), stats.poisson.logpmf(x, 2.5), atol=1e-12)

    g = make_family("gaussian-1d").point({"mu": 1.0, "var": 2.0})
    np.testing.assert_allclose(log_density(g, x), stats.norm.logpdf(x, 1.0, math.sqrt(2.0)), atol=1e-12)

    e = make_family("exponential").point({"lambda": 0.5})
    np.testing.assert_allclose(log_density(e, x), stats.expon.logpdf(x, scale=2.0), atol=1e-12)

    mvn = make_family("gaussian-mvn", {"d": 2})
    sigma = [[1.0, 0.2], [0.2, 0.5]]
    xs = np.array([[0.0, 0.0], [1.0, -1.0]])
    m = mvn.point({"mu": [0.5, 0.0], "sigma": sigma})
    np.testing.assert_allclose(log_density(m, xs), stats.multivariate_normal.logpdf(xs, [0.5, 0.0], sigma),
                               atol=1e-12)

    dirichlet = make_family("dirichlet", {"d": 3})
    d = dirichlet.point({"p": [1.5, 2.0, 0.8]})
    point = np.array([0.2, 0.5, 0.3])
    assert log_density(d, point)[0] == pytest.approx(stats.dirichlet.logpdf(point, [1.5, 2.0, 0.8]), abs=1e-12)


def test_dirichlet_log_normalizer_matches_log_gamma():
    family = make_family("dirichlet", {"d": 4})
    p = [0.5, 1.5, 3.0, 7.25]
    expected = sum(math.lgamma(a) for a in p) - math.lgamma(sum(p))
    assert log_normalizer(family.point({"p": p})) == pytest.approx(expected, abs=1e-12)


def test_hessian_is_the_second_derivative():
    p = make_family("poisson").point({"lambda": 3.0})
    assert hessian_log_normalizer(p)[0, 0] == pytest.approx(3.0, rel=1e-6)
    e = make_family("exponential").point({"lambda": 2.0})
    assert hessian_log_normalizer(e)[0, 0] == pytest.approx(0.25, rel=1e-6)
    g = make_family("gaussian-1d").point({"mu": 0.0, "var": 1.0})
    hess = hessian_log_normalizer(g)
    # Fisher information of (x, x^2) at N(0, 1): Var x = 1, Cov(x, x^2) = 0, Var x^2 = 2
    np.testing.assert_allclose(hess, [[1.0, 0.0], [0.0, 2.0]], atol=1e-6)


def random_direction(family, rng):
    v = rng.normal(size=family.vector_size)
    m = None
    if family.matrix_dim is not None:
        a = rng.normal(size=(family.matrix_dim, family.matrix_dim))
        m = 0.5 * (a + a.T)
    scale = math.sqrt(inner_product(Statistic(v, m), Statistic(v, m)))
    return v / scale, None if m is None else m / scale


def test_log_normalizer_is_convex(family, random_pair, rng):
    for _ in range(100):
        p, q = random_pair(family)
        lam = rng.uniform(0.0, 1.0)
        mixed = combine(p, q, lam, 1.0 - lam)
        assert log_normalizer(mixed) <= lam * log_normalizer(p) + (1.0 - lam) * log_normalizer(q) + 1e-12


def test_natural_domain_is_convex(family, random_pair, rng):
    for _ in range(100):
        p, q = random_pair(family)
        for lam in (1e-9, rng.uniform(0.0, 1.0), 1.0 - 1e-9):
            v = lam * p.coords + (1.0 - lam) * q.coords
            m = None if p.matrix_part is None else lam * p.matrix_part + (1.0 - lam) * q.matrix_part
            assert family.domain_test(v, m)


def test_gradient_matches_finite_differences(family, rng):
    h = 1e-5
    for _ in range(100):
        theta = family.point(random_params(family, rng))
        dv, dm = random_direction(family, rng)
        plus = ParamPoint(family, theta.coords + h * dv, None if dm is None else theta.matrix_part + h * dm)
        minus = ParamPoint(family, theta.coords - h * dv, None if dm is None else theta.matrix_part - h * dm)
        numeric = (log_normalizer(plus) - log_normalizer(minus)) / (2 * h)
        assert inner_product(gradient(theta), Statistic(dv, dm)) == pytest.approx(numeric, rel=1e-6, abs=1e-8)


def test_composite_inner_product():
    assert inner_product(Statistic([1.0, 0.0]), Statistic([0.0, 1.0])) == 0.0
    assert inner_product(Statistic([1.0], [[2.0]]), Statistic([3.0], [[4.0]])) == 11.0


def test_composite_inner_product_is_the_elementwise_sum(rng):
    for _ in range(20):
        av, bv = rng.normal(size=2), rng.normal(size=2)
        am, bm = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
        expected = sum(av[i] * bv[i] for i in range(2))
        expected += sum(am[i, j] * bm[i, j] for i in range(2) for j in range(2))
        assert inner_product(Statistic(av, am), Statistic(bv, bm)) == pytest.approx(expected, abs=1e-14)

    mvn = make_family("gaussian-mvn", {"d": 2})
    theta = mvn.point({"mu": [1.0, -0.5], "sigma": [[1.5, 0.2], [0.2, 0.7]]})
    eta = gradient(theta)
    expected = theta.coords.dot(eta.coords) + np.trace(theta.matrix_part.T.dot(eta.matrix_part))
    assert inner_product(theta, eta) == pytest.approx(expected, abs=1e-12)


def test_poisson_dual_log_normalizer():
    poisson = make_family("poisson")
    assert dual_log_normalizer(ParamPoint(poisson, [1.0], system=EXPECTATION)) == pytest.approx(-1.0, abs=1e-15)
    for lam in (0.5, 2.0, 7.5):
        eta = ParamPoint(poisson, [lam], system=EXPECTATION)
        assert dual_log_normalizer(eta) == pytest.approx(lam * math.log(lam) - lam, abs=1e-12)


def test_dual_log_normalizer_is_the_grid_maximum(family, rng):
    if not family.has_dual or family.order != 1 or family.matrix_dim is not None:
        pytest.skip("grid maximisation over a scalar natural parameter")
    for _ in range(5):
        theta = family.point(random_params(family, rng))
        eta = gradient(theta)
        grid = theta.coords[0] + np.linspace(-1.0, 1.0, 20001)
        grid = grid[[family.domain_test(np.array([x]), None) for x in grid]]
        values = grid * eta.coords[0] - family.log_normalizer(np.array([grid]), None)
        assert dual_log_normalizer(eta) == pytest.approx(values.max(), abs=1e-6)
