import numpy as np
import pytest
from hypothesis import strategies as st

from sqcavity.model import BathSpec, SystemParams


def random_density_matrix(d, rng):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


baths = st.one_of(
    st.builds(BathSpec.squeezed, st.floats(0, 1.0), st.floats(-np.pi, np.pi)),
    st.builds(BathSpec.thermal, st.floats(0, 2.0)),
    st.just(BathSpec.vacuum()),
)

params = st.builds(
    SystemParams,
    delta_c=st.floats(-30, 30),
    g=st.floats(0, 20),
    eta=st.floats(0, 2),
    gamma=st.floats(0.1, 3),
    kappa=st.floats(0.1, 3),
    bath=baths,
    delta_a=st.one_of(st.none(), st.floats(-30, 30)),
)


# --- acceptance summary ---------------------------------------------------------

_ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and (
        report.when == "call" or (report.when == "setup" and report.failed)
    ):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE.append((item.name, "PASS" if report.passed else "FAIL", doc))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, doc in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {name}: {doc}")
