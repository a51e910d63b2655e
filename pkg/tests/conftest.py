import pytest

from lyapbound import (compute_constants, compute_traces, det_coefficients,
                       validate_ensemble)

from _refs import EX51_MATRICES, EX51_PROBS, EX52_MATRICES, EX52_PROBS


@pytest.fixture(scope="session")
def ex51():
    return validate_ensemble(EX51_MATRICES, EX51_PROBS)


@pytest.fixture(scope="session")
def consts51(ex51):
    return compute_constants(ex51)


@pytest.fixture(scope="session")
def traces51(ex51, consts51):
    return compute_traces(ex51, consts51, 10)


@pytest.fixture(scope="session")
def coeffs51(traces51):
    return det_coefficients(traces51)


@pytest.fixture(scope="session")
def ex52():
    return validate_ensemble(EX52_MATRICES, EX52_PROBS)


@pytest.fixture(scope="session")
def consts52(ex52):
    return compute_constants(ex52)


@pytest.fixture(scope="session")
def traces52(ex52, consts52):
    return compute_traces(ex52, consts52, 15)


@pytest.fixture(scope="session")
def coeffs52(traces52):
    return det_coefficients(traces52)
