import numpy as np
import pytest

from noiseless_amp.transform import AmplificationRequest

# reference spectra (six significant digits) for n=4 at amplitudes 2 and 2.3
REF_LAMBDA_A = np.array([0.976392, 0.971942, 1.02428, 1.02739])
REF_LAMBDA_B = np.array([1.00553, 0.991527, 0.99452, 1.00842])


@pytest.fixture
def worked_request():
    return AmplificationRequest(4, 2.0, 2.3)


@pytest.fixture
def small_request():
    return AmplificationRequest(4, 0.3, 0.7)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
