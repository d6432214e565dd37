import numpy as np
import pytest

from chernoff_info.families import make_family


CATALOG = [
    ("poisson", None),
    ("bernoulli", None),
    ("exponential", None),
    ("gaussian-fixed-sigma", {"sigma": 1.5}),
    ("gaussian-1d", None),
    ("gaussian-mvn", {"d": 2}),
    ("dirichlet", {"d": 3}),
]

SCALAR_AND_DISCRETE = ["poisson", "bernoulli", "exponential", "gaussian-1d"]


def random_params(family, rng):
    name = family.name
    if name == "poisson":
        return {"lambda": rng.uniform(0.2, 10.0)}
    if name == "bernoulli":
        return {"p": rng.uniform(0.05, 0.95)}
    if name == "exponential":
        return {"lambda": rng.uniform(0.2, 5.0)}
    if name == "gaussian-fixed-sigma":
        return {"mu": rng.uniform(-3.0, 3.0)}
    if name == "gaussian-1d":
        return {"mu": rng.uniform(-3.0, 3.0), "var": rng.uniform(0.3, 4.0)}
    if name == "gaussian-mvn":
        d = family.matrix_dim
        a = rng.normal(size=(d, d))
        return {"mu": rng.uniform(-1.0, 1.0, size=d), "sigma": 0.5 * a.dot(a.T) + 0.5 * np.eye(d)}
    if name == "dirichlet":
        return {"p": rng.uniform(0.5, 5.0, size=family.support.dimension)}
    raise KeyError(name)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_pair(rng):
    """Factory: random_pair(family) -> two natural-coordinate points of family."""
    def make(family):
        return family.point(random_params(family, rng)), family.point(random_params(family, rng))
    return make


@pytest.fixture(params=CATALOG, ids=[kind for kind, _ in CATALOG])
def family(request):
    kind, hyper = request.param
    return make_family(kind, hyper)


@pytest.fixture(params=SCALAR_AND_DISCRETE)
def scalar_family(request):
    return make_family(request.param)


@pytest.fixture
def poisson():
    return make_family("poisson")


@pytest.fixture
def gauss_eq_var():
    """N(0, 9) vs N(2, 9) as a fixed-sigma family."""
    family = make_family("gaussian-fixed-sigma", {"sigma": 3.0})
    return family.point({"mu": 0.0}), family.point({"mu": 2.0})
