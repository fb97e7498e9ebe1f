import sys

from hypothesis import HealthCheck, settings

# numba compiles on first call, so per-example deadlines are meaningless here
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    results = []
    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance"):
            results = getattr(mod, "RESULTS", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(results, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
