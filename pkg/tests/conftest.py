import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"
SAMPLE_IMAGES = DATA / "mnist-sample-images-idx3-ubyte.gz"
SAMPLE_LABELS = DATA / "mnist-sample-labels-idx1-ubyte.gz"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unit(rng, dim, size=None):
    shape = (dim,) if size is None else (size, dim)
    v = rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in module.RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}")
