import math

import pytest

from qidlaw import bernoulli, dirac, geometric, make_law, poisson, uniform

SQRT2 = math.sqrt(2.0)


def qid_lattice_corpus():
    return {
        "bernoulli03": bernoulli(0.3),
        "bernoulli025": bernoulli(0.25),
        "bernoulli075": bernoulli(0.75),
        "dirac3": dirac(3.0),
        "poisson2": poisson(2.0),
        "poisson15": poisson(1.5),
        "geometric05": geometric(0.5),
    }


def torus_law():
    return make_law([(0.0, 0.8), (1.0, 0.1), (SQRT2, 0.1)])


@pytest.fixture(params=sorted(qid_lattice_corpus()))
def qid_lattice_law(request):
    return qid_lattice_corpus()[request.param]


@pytest.fixture
def sqrt2_uniform():
    return uniform([0.0, 1.0, SQRT2])
