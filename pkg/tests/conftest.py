import pytest

from eventfhn import SystemParams, build_grid, build_system, run, sample_initial


def simulate(mode, n=40, m=2000, horizon=6.0, **overrides):
    params = SystemParams(**overrides)
    grid = build_grid(n, m, horizon)
    system = build_system(grid, params)
    traj, log = run(system, grid, params, sample_initial(grid), mode)
    return traj, log, system, grid, params


@pytest.fixture(scope="session")
def desk_runs():
    """Desk-experiment runs shared across test modules, keyed by label."""
    return {
        "uncontrolled": simulate("uncontrolled"),
        "continuous": simulate("continuous"),
        "event_0.001": simulate("event_triggered", beta=0.001),
        "event_0.05": simulate("event_triggered", beta=0.05),
        "event_0": simulate("event_triggered", beta=0.0),
    }


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def verdict(request, capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def emit(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.stash.setdefault(ACCEPTANCE_KEY, []).append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return ok

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
