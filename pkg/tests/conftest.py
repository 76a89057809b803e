import pytest
from hypothesis import HealthCheck, settings

from fadingmgf import expfit, models

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])


@pytest.fixture(scope="session", autouse=True)
def _isolated_fit_store(tmp_path_factory):
    # CLI commands default to a fit store under the user's cache directory
    mp = pytest.MonkeyPatch()
    mp.setenv("FADINGMGF_FIT_STORE", str(tmp_path_factory.mktemp("store") / "expfit.txt"))
    yield
    mp.undo()


@pytest.fixture
def criterion():
    return record_criterion


@pytest.fixture
def fresh_cache(tmp_path):
    """A fit cache backed by a temporary store, installed as the default."""
    cache = expfit.set_default_store(tmp_path / "fits.txt")
    yield cache
    expfit.set_default_store(None)


@pytest.fixture(autouse=True)
def _pristine_exponents():
    # a failed mutation test must not leak a perturbed table into later tests
    saved = dict(models.EXPONENTS)
    yield
    if models.EXPONENTS != saved:
        models.EXPONENTS.clear()
        models.EXPONENTS.update(saved)
    models.clear_cache()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
