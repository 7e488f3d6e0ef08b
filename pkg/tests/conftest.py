import pytest

from ncquiver.dynamics import gh_quiver
from ncquiver.ncalg import free_plane, one_vertex_quiver, quiver_create
from ncquiver.symplectic import canonical_two_form

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def plane():
    return free_plane()


@pytest.fixture
def plane_omega(plane):
    return canonical_two_form(plane)


@pytest.fixture
def q2():
    """Q_2: loop a at 1, x: 2 -> 1, y2: 1 -> 2."""
    return quiver_create(["1", "2"], [("a", "1", "1"), ("x", "2", "1"), ("y2", "1", "2")])


@pytest.fixture
def q2bar():
    return gh_quiver(2)


@pytest.fixture
def q2bar_omega(q2bar):
    return canonical_two_form(q2bar)


@pytest.fixture
def free3():
    return one_vertex_quiver("x", "y", "z")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
