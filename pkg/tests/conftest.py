import numpy as np
import pytest

from creakml.corpus import SyntheticCorpusSpec, generate_synthetic_corpus


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Six speakers per class, 6 s each: quick enough for end-to-end tests."""
    spec = SyntheticCorpusSpec(n_per_class=6, duration_s=6.0, seed=3)
    return generate_synthetic_corpus(spec, tmp_path_factory.mktemp("small_corpus"))


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def blobs(n=200, sep=4.0, seed=0):
    """Two unit-variance 2-D Gaussian blobs centered at (0, 0) and (sep, 0), shuffled.

    The optimal rule is ``x[:, 0] > sep / 2``.
    """
    r = np.random.default_rng(seed)
    y = np.repeat([0, 1], n // 2)
    x = np.column_stack([sep * y, np.zeros(n)]) + r.standard_normal((n, 2))
    perm = r.permutation(n)
    return x[perm], y[perm]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
