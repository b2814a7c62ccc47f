import numpy as np
import pytest

from gkdvlab.spectral import SpectralField, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_field(grid, rng, decay=None):
    """Random real field; with ``decay`` the coefficients fall off like exp(-decay|k|)."""
    c = np.fft.fft(rng.standard_normal(grid.N)) / grid.N
    if decay is not None:
        c = c * np.exp(-decay * grid.abs_k)
    c[grid.nyquist] = c[grid.nyquist].real
    return SpectralField(grid, c)


@pytest.fixture
def small_grid():
    return make_grid(16, 2 * np.pi)


# -- acceptance summary ------------------------------------------------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    detail = props.get("detail", "")
    if report.failed and not detail:
        crash = getattr(report.longrepr, "reprcrash", None)
        detail = crash.message.splitlines()[0][:160] if crash else ""
    _ACCEPTANCE[props["criterion"]] = (report.outcome, props.get("title", ""), detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        outcome, title, detail = _ACCEPTANCE[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"{verdict}  criterion {number:>2}: {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
