import numpy as np
import pytest

from qsvm_ocr.svm import TrainingSet

X1 = np.array([0.9872, 0.1595])
X2 = np.array([0.3544, 0.9351])


@pytest.fixture
def ref_ts():
    return TrainingSet([X1, X2], [1, -1])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, n_qubits):
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


_CRITERIA = []


def record_criterion(name, ok, detail=""):
    _CRITERIA.append((name, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
