import numpy as np
import pytest

from reqgan.linalg import jacobi_eigh


@pytest.mark.parametrize("n", [1, 2, 3, 10, 35])
def test_matches_lapack(n, rng):
    a = rng.normal(size=(n, n))
    a = a + a.T
    w, v = jacobi_eigh(a)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-11)
    np.testing.assert_allclose(v.T @ v, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(a @ v, v * w, atol=1e-11)


def test_degenerate_and_diagonal():
    w, v = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(w, [1, 2, 3])
    w, _ = jacobi_eigh(np.eye(4) * 2)
    np.testing.assert_array_equal(w, [2, 2, 2, 2])


def test_ill_conditioned(rng):
    q = np.linalg.qr(rng.normal(size=(12, 12)))[0]
    d = np.logspace(-18, 2, 12)
    w, _ = jacobi_eigh((q * d) @ q.T)
    np.testing.assert_allclose(w, d, atol=1e-13 * d.max())


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        jacobi_eigh(np.ones((2, 3)))
