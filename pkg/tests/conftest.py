import os
from dataclasses import replace

import pytest
from hypothesis import HealthCheck, settings

from rydctl import dynamics as dyn
from rydctl.mqdt import default_model
from rydctl.spectrum import FieldConfig

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def field600():
    return FieldConfig(I_c=600.0)


@pytest.fixture(scope="session")
def calibrated_pulse():
    base = dyn.PulseConfig()
    return replace(base, gamma_r=dyn.calibrate_dephasing(0.03, base))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
