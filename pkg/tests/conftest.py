import pytest

from afspin.catalog import FAMILIES, instantiate_family

# criterion number -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def fixture_instances():
    """Every catalog family at a few parameter values."""
    out = []
    for fid, spec in FAMILIES.items():
        if not spec.params:
            out.append((fid, {}))
            continue
        for k in (1, 2, 3):
            if "l" in spec.params:
                out.extend((fid, {"k": k, "l": l}) for l in (1, 2))
            else:
                out.append((fid, {"k": k}))
    return out


@pytest.fixture
def f1():
    return instantiate_family("F1", {"k": 1})


@pytest.fixture
def f2():
    return instantiate_family("F2", {"k": 1, "l": 1})


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
