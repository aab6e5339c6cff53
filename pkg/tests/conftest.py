import numpy as np
import pytest

from driftlens import LabeledDataset

_ACCEPTANCE = {}


def record_criterion(number, title, status, detail=""):
    _ACCEPTANCE[number] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, detail = _ACCEPTANCE[number]
        line = f"[{status:^7}] {number}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def toy_source():
    # class 1 = {(0,0), (2,0)}, class 2 = {(0,2), (2,2)}
    X = np.array([[0.0, 2.0, 0.0, 2.0],
                  [0.0, 0.0, 2.0, 2.0]])
    return LabeledDataset(X, np.array([1, 1, 2, 2]), "toy-source")


@pytest.fixture
def toy_target():
    # toy source shifted by (1, 1)
    return np.array([[1.0, 3.0, 1.0, 3.0],
                     [1.0, 1.0, 3.0, 3.0]])


def random_labeled(rng, dim=6, counts=(5, 7, 4)):
    labels = np.repeat(np.arange(1, len(counts) + 1), counts)
    centres = 2.0 * rng.standard_normal((dim, len(counts)))
    X = centres[:, labels - 1] + rng.standard_normal((dim, labels.size))
    return LabeledDataset(X, labels, "random")
