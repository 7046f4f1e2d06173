import numpy as np
import pytest

from alphacir.mechanism import ModelParams

# benchmark parameter sets used as fixtures throughout the suite
BOND_SET = dict(a=0.1, b=0.3, sigma=0.1, sigma_z=0.3, r0=0.05)
PATH_SET = dict(a=0.1, b=0.3, sigma=0.1, sigma_z=0.3, r0=0.1)
JUMP_SET = dict(a=0.1, b=0.1, sigma=0.1, sigma_z=0.1, r0=0.2)


@pytest.fixture
def bond_params():
    def make(alpha=1.5, **overrides):
        return ModelParams(alpha=alpha, **{**BOND_SET, **overrides})
    return make


@pytest.fixture
def jump_params():
    def make(alpha=1.5, **overrides):
        return ModelParams(alpha=alpha, **{**JUMP_SET, **overrides})
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ------------------------------------------------- acceptance bookkeeping

_criterion_lines = []


def record_criterion(num: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {detail}"
    _criterion_lines.append((num, line))
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for _, line in sorted(_criterion_lines):
        terminalreporter.write_line(line)
