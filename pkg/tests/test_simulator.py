import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import random_unit
from reqgan.circuits import CircuitTemplate, build_generator, cx, ry
from reqgan.simulator import apply_cx, apply_ry, expect_z, run_circuit, validate_state, zero_state

R2 = np.sqrt(2) / 2


@pytest.mark.parametrize("angle, expected", [(0, [1, 0]), (np.pi, [0, 1]), (np.pi / 2, [R2, R2])])
def test_ry_on_zero(angle, expected):
    np.testing.assert_allclose(apply_ry(zero_state(1), 0, angle), expected, atol=1e-15)


def test_cx_examples():
    e = np.eye(4)
    np.testing.assert_array_equal(apply_cx(e[0], 0, 1), e[0])
    np.testing.assert_array_equal(apply_cx(e[2], 0, 1), e[3])
    np.testing.assert_allclose(apply_cx(R2 * (e[0] + e[2]), 0, 1), R2 * (e[0] + e[3]))


def test_expect_z_examples():
    assert expect_z(zero_state(3), 0) == 1 and expect_z(zero_state(3), 2) == 1
    assert expect_z(np.array([0.0, 1.0]), 0) == -1
    assert abs(expect_z(np.array([R2, R2]), 0)) < 1e-15


def test_run_circuit_examples():
    s = zero_state(2)
    np.testing.assert_array_equal(run_circuit(CircuitTemplate(2, ()), [], s), s)
    flip = CircuitTemplate(2, (ry(0, 0),))
    np.testing.assert_allclose(run_circuit(flip, [np.pi], s), [0, 0, 1, 0], atol=1e-15)
    np.testing.assert_array_equal(run_circuit(build_generator(2), np.zeros(3)), [1, 0, 0, 0])


def test_errors():
    s = zero_state(2)
    with pytest.raises(IndexError):
        apply_ry(s, 2, 0.1)
    with pytest.raises(IndexError):
        expect_z(s, 5)
    with pytest.raises(ValueError):
        apply_cx(s, 1, 1)
    with pytest.raises(ValueError):
        run_circuit(build_generator(2), np.zeros(2))
    with pytest.raises(ValueError):
        run_circuit(build_generator(2), np.zeros(3), zero_state(3))
    with pytest.raises(ValueError):
        validate_state(np.ones(4))
    with pytest.raises(ValueError):
        validate_state(np.ones(3) / np.sqrt(3))


@pytest.mark.parametrize("q", [1, 2, 3, 4, 5])
def test_gates_match_dense_oracle(q, rng):
    for _ in range(20):
        s = random_unit(rng, 1 << q)
        t = int(rng.integers(q))
        a = rng.uniform(-np.pi, np.pi)
        np.testing.assert_allclose(apply_ry(s, t, a), oracles.single(t, q, oracles.ry_matrix(a)) @ s, atol=1e-12)
        assert abs(expect_z(s, t) - s @ oracles.single(t, q, oracles.Z) @ s) < 1e-12
        if q > 1:
            c = int((t + 1 + rng.integers(q - 1)) % q)
            np.testing.assert_allclose(apply_cx(s, c, t), oracles.cnot(c, t, q) @ s, atol=1e-12)


def test_cx_involution_bit_exact(rng):
    s = random_unit(rng, 16)
    np.testing.assert_array_equal(apply_cx(apply_cx(s, 3, 0), 3, 0), s)


def test_batched_gates(rng):
    states = random_unit(rng, 8, size=5)
    angles = rng.uniform(-3, 3, size=5)
    out = apply_ry(states, 1, angles)
    for k in range(5):
        np.testing.assert_allclose(out[k], apply_ry(states[k], 1, angles[k]), atol=1e-15)
    np.testing.assert_allclose(expect_z(states, 2), [expect_z(s, 2) for s in states], atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.lists(st.floats(-10, 10), min_size=1, max_size=12), st.integers(0, 2**32 - 1))
def test_norm_preserved(q, angles, seed):
    rng = np.random.default_rng(seed)
    s = random_unit(rng, 1 << q)
    for a in angles:
        s = apply_ry(s, int(rng.integers(q)), a)
        if q > 1:
            c, t = rng.choice(q, 2, replace=False)
            s = apply_cx(s, int(c), int(t))
    assert abs(np.linalg.norm(s) - 1) < 1e-12
    assert s.dtype == np.float64
