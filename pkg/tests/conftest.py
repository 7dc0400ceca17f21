import pytest

from wulffcount import ETA_SKYSCRAPER, ETA_YOUNG, build_inner_shape
from wulffcount.counting import partition_table, plane_partition_table

SKY_SAMPLES = 128 * 128


@pytest.fixture(scope="session")
def young_shape():
    return build_inner_shape(ETA_YOUNG, 4096)


@pytest.fixture(scope="session")
def young_shape_w10():
    return build_inner_shape(ETA_YOUNG, 4096, window=10.0)


@pytest.fixture(scope="session")
def sky_shape():
    return build_inner_shape(ETA_SKYSCRAPER, SKY_SAMPLES)


@pytest.fixture(scope="session")
def p_table():
    return partition_table(10000)


@pytest.fixture(scope="session")
def pp_table():
    return plane_partition_table(5000)


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""

    def report(number, title, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join("%s %s" % (text, "ok" if passed else "FAILED") for text, passed in checks)
        line = "criterion %d %s: %s (%s)" % (number, "PASS" if ok else "FAIL", title, detail)
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
