import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ymblow", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ymblow")


@pytest.fixture(scope="session")
def p5():
    from ymblow.profiles import make_params
    return make_params(5)


@pytest.fixture(scope="session")
def op5():
    from ymblow.evolve import assemble_operators
    from ymblow.profiles import make_params
    return assemble_operators(make_params(5), 64)


@pytest.fixture(scope="session")
def op5_48():
    from ymblow.evolve import assemble_operators
    from ymblow.profiles import make_params
    return assemble_operators(make_params(5), 48)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS, _line
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        terminalreporter.write_line(_line(num))
