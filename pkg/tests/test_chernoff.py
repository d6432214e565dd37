import io

import numpy as np
import pytest

from chernoff_info import oracle
from chernoff_info.chernoff import (BISECTION, CLOSED_FORM, BisectionConfig, SweepTable, alpha_sweep, bisector_gap,
                                    chernoff_bisection, chernoff_closed_form_order1, chernoff_information,
                                    chernoff_point_density_check, default_grid, e_geodesic, m_geodesic_eta,
                                    optimality_residual, poisson_chernoff_closed_form)
from chernoff_info.divergences import bregman, skew_jensen
from chernoff_info.errors import DomainError, NonConvergenceError, RangeError
from chernoff_info.families import gradient, make_family

POISSON_PAIRS = [(0.5, 2.0), (1.0, 3.0), (2.0, 5.0), (10.0, 15.0)]


def test_equal_variance_gaussians(gauss_eq_var):
    p, q = gauss_eq_var
    for result in (chernoff_bisection(p, q), chernoff_closed_form_order1(p, q)):
        assert result.alpha_star == pytest.approx(0.5, abs=1e-9)
        assert result.info == pytest.approx(4.0 / 72.0, abs=1e-10)

    g = make_family("gaussian-1d")
    result = chernoff_information(g.point({"mu": 0.0, "var": 9.0}), g.point({"mu": 2.0, "var": 9.0}))
    assert result.method == BISECTION
    assert result.alpha_star == pytest.approx(0.5, abs=1e-9)
    assert result.info == pytest.approx(4.0 / 72.0, abs=1e-10)


@pytest.mark.parametrize("lam1,lam2", POISSON_PAIRS)
def test_poisson_closed_form(poisson, lam1, lam2):
    p = poisson.point({"lambda": lam1})
    q = poisson.point({"lambda": lam2})
    alpha, info = poisson_chernoff_closed_form(lam1, lam2)

    closed = chernoff_closed_form_order1(p, q)
    assert closed.method == CLOSED_FORM
    assert closed.alpha_star == pytest.approx(alpha, abs=1e-9)
    assert closed.info == pytest.approx(info, abs=1e-10)

    bisected = chernoff_bisection(p, q)
    assert bisected.alpha_star == pytest.approx(alpha, abs=1e-9)
    assert bisected.info == pytest.approx(info, abs=1e-10)

    _, grid_value = oracle.alpha_grid_argmax(p, q, 1e-3, spec=oracle.IntegrationSpec(), refine=True)
    assert grid_value == pytest.approx(info, abs=1e-6)


def test_poisson_closed_form_values_and_swap():
    alpha, info = poisson_chernoff_closed_form(2.0, 5.0)
    assert alpha == pytest.approx(0.462, abs=1e-3)
    assert info == pytest.approx(0.3397, abs=1e-3)
    swapped_alpha, swapped_info = poisson_chernoff_closed_form(5.0, 2.0)
    assert swapped_info == pytest.approx(info, abs=1e-12)
    assert swapped_alpha == pytest.approx(1.0 - alpha, abs=1e-12)
    assert poisson_chernoff_closed_form(3.0, 3.0) == (0.5, 0.0)
    with pytest.raises(DomainError):
        poisson_chernoff_closed_form(0.0, 1.0)


def test_grid_brackets_the_poisson_exponent(poisson):
    p = poisson.point({"lambda": 2.0})
    q = poisson.point({"lambda": 5.0})
    alpha, _ = poisson_chernoff_closed_form(2.0, 5.0)
    grid_alpha, _ = oracle.alpha_grid_argmax(p, q, 1e-4)
    assert abs(grid_alpha - alpha) <= 1e-4


def test_mvn_bisection_against_grid_search(random_pair):
    mvn = make_family("gaussian-mvn", {"d": 2})
    for _ in range(5):
        p, q = random_pair(mvn)
        result = chernoff_bisection(p, q)
        grid_alpha, _ = oracle.alpha_grid_argmax(p, q, 1e-4)
        assert abs(grid_alpha - result.alpha_star) <= 1e-4
        _, refined = oracle.alpha_grid_argmax(p, q, 1e-4, refine=True)
        assert result.info == pytest.approx(refined, abs=1e-7)


def test_mvn_bisection_against_monte_carlo(random_pair):
    mvn = make_family("gaussian-mvn", {"d": 2})
    spec = oracle.IntegrationSpec(mc_samples=10 ** 6)
    for seed in range(2):
        p, q = random_pair(mvn)
        result = chernoff_information(p, q)
        value, std_error = oracle.monte_carlo_coefficient(p, q, result.alpha_star, spec, seed=seed)
        assert abs(value - np.exp(-result.info)) <= 5 * std_error


def test_bisector_gap_endpoints(family, random_pair):
    p, q = random_pair(family)
    assert bisector_gap(p, q, p) == pytest.approx(-bregman(family, q, p).value, abs=1e-12)
    assert bisector_gap(p, q, q) == pytest.approx(bregman(family, p, q).value, abs=1e-12)
    assert bisector_gap(p, q, p) < 0 < bisector_gap(p, q, q)
    assert bisector_gap(p, p, q) == 0.0


def test_optimality_residual_is_the_bisector_gap(family, random_pair):
    for _ in range(5):
        p, q = random_pair(family)
        theta, _ = random_pair(family)
        assert optimality_residual(p, q, theta) == pytest.approx(bisector_gap(p, q, theta), abs=1e-10)


def test_gap_is_monotone_along_the_geodesic(family, random_pair):
    for _ in range(3):
        p, q = random_pair(family)
        gaps = [bisector_gap(p, q, e_geodesic(p, q, lam)) for lam in np.linspace(0.005, 0.995, 100)]
        assert np.all(np.diff(gaps) > 0)


def test_chernoff_point_balances_the_bregman_divergences(family, random_pair):
    for _ in range(5):
        p, q = random_pair(family)
        result = chernoff_information(p, q)
        from_p = bregman(family, p, result.theta_star).value
        from_q = bregman(family, q, result.theta_star).value
        assert abs(from_p - from_q) <= 1e-9
        assert from_p == pytest.approx(result.info, abs=1e-9)
        expected = result.alpha_star * p.coords + (1.0 - result.alpha_star) * q.coords
        np.testing.assert_allclose(result.theta_star.coords, expected, atol=1e-12, rtol=1e-12)
        assert result.info == pytest.approx(skew_jensen(family, p, q, result.alpha_star).value, abs=1e-12)


def test_symmetry_of_chernoff_information(family, random_pair):
    for _ in range(5):
        p, q = random_pair(family)
        forward = chernoff_information(p, q)
        backward = chernoff_information(q, p)
        assert forward.info == pytest.approx(backward.info, abs=1e-10)
        assert forward.alpha_star + backward.alpha_star == pytest.approx(1.0, abs=1e-8)


def test_bisection_iteration_count(family, random_pair):
    for _ in range(5):
        p, q = random_pair(family)
        assert chernoff_bisection(p, q).iterations <= 41


def test_kl_balance_and_density_at_the_chernoff_point(scalar_family, random_pair):
    for _ in range(3):
        p, q = random_pair(scalar_family)
        result = chernoff_information(p, q)
        r = result.theta_star
        assert abs(oracle.kl_numeric(r, p) - oracle.kl_numeric(r, q)) <= 1e-5
        assert chernoff_point_density_check(p, q, result) <= 1e-6


def test_density_check_degenerate_pair(poisson):
    p = poisson.point({"lambda": 3.0})
    result = chernoff_information(p, p)
    assert result.alpha_star == 0.5
    assert result.info == 0.0
    assert chernoff_point_density_check(p, p, result) <= 1e-12


def test_non_convergence_carries_the_best_iterate(poisson):
    p = poisson.point({"lambda": 2.0})
    q = poisson.point({"lambda": 5.0})
    with pytest.raises(NonConvergenceError) as excinfo:
        chernoff_bisection(p, q, BisectionConfig(max_iterations=3))
    assert excinfo.value.iterations == 3
    assert 0.0 < excinfo.value.alpha < 1.0
    assert excinfo.value.gap is not None


def test_bisection_config_validation():
    with pytest.raises(RangeError):
        BisectionConfig(alpha_tolerance=0.0)
    with pytest.raises(RangeError):
        BisectionConfig(gap_tolerance=-1.0)
    with pytest.raises(RangeError):
        BisectionConfig(max_iterations=0)
    assert BisectionConfig().toDict() == {"alpha_tolerance": 1e-12, "gap_tolerance": 1e-10, "max_iterations": 200}


def test_fallback_chain(random_pair):
    poisson = make_family("poisson")
    assert chernoff_information(*random_pair(poisson)).method == CLOSED_FORM
    for family in (make_family("gaussian-1d"), make_family("dirichlet", {"d": 3}), make_family("gaussian-mvn", {"d": 2})):
        assert chernoff_information(*random_pair(family)).method == BISECTION


def test_geodesics():
    poisson = make_family("poisson")
    p = poisson.point({"lambda": 1.0})
    q = poisson.point({"lambda": 4.0})
    assert e_geodesic(p, q, 0.0).same_as(p)
    assert e_geodesic(p, q, 1.0).same_as(q)
    with pytest.raises(RangeError):
        e_geodesic(p, q, 1.5)

    eta_p, eta_q = gradient(p), gradient(q)
    mid = m_geodesic_eta(eta_p, eta_q, 0.5)
    assert mid.coords[0] == pytest.approx(2.5)
    # the mixture 0.7 Poisson(1) + 0.3 Poisson(4) has mean 0.7 * 1 + 0.3 * 4
    assert m_geodesic_eta(eta_p, eta_q, 0.3).coords[0] == pytest.approx(1.9)
    with pytest.raises(DomainError):
        m_geodesic_eta(p, q, 0.5)

    mvn = make_family("gaussian-mvn", {"d": 2})
    a = mvn.point({"mu": [0.0, 0.0], "sigma": [[1.0, 0.9], [0.9, 1.0]]})
    b = mvn.point({"mu": [1.0, 2.0], "sigma": [[1.0, -0.9], [-0.9, 1.0]]})
    assert np.linalg.eigvalsh(e_geodesic(a, b, 0.5).matrix_part).min() > 0


def test_sweep_tables(gauss_eq_var):
    p, q = gauss_eq_var
    pair = alpha_sweep(p, q, [0.7, 0.3])
    assert pair.alphas == [0.3, 0.7]
    assert pair.values[0] == pytest.approx(pair.values[1], rel=1e-12)

    table = alpha_sweep(p, q, default_grid(99))
    assert len(table) == 99
    alpha, value = table.argmax()
    assert alpha == 0.5
    assert value == pytest.approx(4.0 / 72.0, abs=1e-12)
    for a, b in zip(table.values, reversed(table.values)):
        assert a == pytest.approx(b, rel=1e-9)


def test_unequal_variance_sweep_peaks_off_center():
    g = make_family("gaussian-1d")
    p = g.point({"mu": 0.0, "var": 9.0})
    q = g.point({"mu": 2.0, "var": 36.0})
    table = alpha_sweep(p, q, default_grid(99))
    result = chernoff_information(p, q)
    alpha, value = table.argmax()
    assert abs(alpha - 0.5) > 0.01
    assert abs(alpha - result.alpha_star) <= 0.01
    assert value <= result.info + 1e-9


def test_sweep_csv():
    table = SweepTable([0.5, 0.25], [0.125, 0.1])
    out = io.StringIO()
    table.toCSV(out)
    assert out.getvalue() == "alpha,chernoff_alpha_divergence\n0.25,0.10000000000000001\n0.5,0.125\n"
    assert table.toDict() == {"alpha": [0.25, 0.5], "chernoff_alpha_divergence": [0.1, 0.125]}


def test_default_grid():
    assert default_grid(3) == [0.25, 0.5, 0.75]
    with pytest.raises(RangeError):
        default_grid(1)


def test_result_to_dict(poisson):
    result = chernoff_information(poisson.point({"lambda": 2.0}), poisson.point({"lambda": 5.0}))
    obj = result.toDict()
    assert obj["method"] == CLOSED_FORM
    assert obj["chernoff_point"]["lambda"] == pytest.approx(2.0 ** result.alpha_star * 5.0 ** (1 - result.alpha_star))
