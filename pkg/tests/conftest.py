import pytest

from donorqho.hydrogenic import build_donor_model
from donorqho.materials import MaterialParams, material_at
from donorqho.set_orthodox import SetParams

# Material parameters exactly as quoted for the three compositions.
QUOTED_MATERIALS = {
    0.0: MaterialParams(0.0, 12.90, 0.063),
    0.25: MaterialParams(0.25, 12.19, 0.084),
    0.3: MaterialParams(0.3, 12.05, 0.088),
}


@pytest.fixture
def al25():
    return build_donor_model(material_at(0.25))


@pytest.fixture
def device_set():
    """Symmetric SET with C_total = 890 aF, R_total = 200.8 kOhm, C_g = 0.364 aF."""
    return SetParams.symmetric(890.0, 0.364, 200.8, 0.3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
