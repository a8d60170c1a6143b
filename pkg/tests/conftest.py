import numpy as np
import pytest

from lorenzlab import (
    Budgets,
    builtin_map,
    decompose,
    find_periodic_points,
    find_renormalizations,
)

# the worked quadratic pair: left 3.4x(1-x), right 1-4x(1-x)
P_CYCLE = 0.48880830755049054
Q_CYCLE = 0.849574136468393
A3 = 5.0 / 17.0
B3 = 12.0 / 17.0


@pytest.fixture(scope="session")
def ex1():
    return builtin_map("paper-example")


@pytest.fixture(scope="session")
def ex2():
    return builtin_map("logistic4-embed")


@pytest.fixture(scope="session")
def ex3():
    return builtin_map("logistic3.4-embed")


@pytest.fixture(scope="session")
def cat1(ex1):
    return find_periodic_points(ex1, 12)


@pytest.fixture(scope="session")
def cat2(ex2):
    return find_periodic_points(ex2, 12)


@pytest.fixture(scope="session")
def cat3(ex3):
    return find_periodic_points(ex3, 12)


@pytest.fixture(scope="session")
def seq3(ex3, cat3):
    return find_renormalizations(ex3, 12, 8, catalog=cat3)


@pytest.fixture(scope="session")
def dec1(ex1):
    return decompose(ex1, Budgets())


@pytest.fixture(scope="session")
def dec2(ex2):
    return decompose(ex2, Budgets())


@pytest.fixture(scope="session")
def dec3(ex3):
    return decompose(ex3, Budgets())


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
