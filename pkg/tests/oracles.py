"""Independent reference implementations: dense Kronecker-product matrices.

Nothing here calls the simulator; gates are expanded to full 2^q x 2^q
matrices with qubit 0 as the most significant bit.
"""
from functools import lru_cache

import numpy as np

I2 = np.eye(2)
Z = np.diag([1.0, -1.0])
P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])
X = np.array([[0.0, 1.0], [1.0, 0.0]])


def ry_matrix(angle):
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def kron_all(ops):
    out = np.eye(1)
    for op in ops:
        out = np.kron(out, op)
    return out


def single(q, n, op):
    return kron_all([op if k == q else I2 for k in range(n)])


@lru_cache(maxsize=None)
def cnot(control, target, n):
    a = kron_all([P0 if k == control else I2 for k in range(n)])
    b = kron_all([P1 if k == control else X if k == target else I2 for k in range(n)])
    return a + b


def circuit_unitary(template, params):
    n = template.num_qubits
    u = np.eye(1 << n)
    for g in template.gates:
        if g.kind == "ry":
            m = single(g.target, n, ry_matrix(params[g.slot]))
        else:
            m = cnot(g.control, g.target, n)
        u = m @ u
    return u


def circuit_state(template, params):
    n = template.num_qubits
    psi = np.eye(1 << n)[0]
    for g in template.gates:
        if g.kind == "ry":
            psi = single(g.target, n, ry_matrix(params[g.slot])) @ psi
        else:
            psi = cnot(g.control, g.target, n) @ psi
    return psi


def sigma_dense(template, params, x):
    """<Z on last qubit> after running ``template`` on ``x (x) |0>``."""
    n = template.num_qubits
    psi = circuit_unitary(template, params) @ np.kron(x, [1.0, 0.0])
    return float(psi @ single(n - 1, n, Z) @ psi)


def H(order):
    h = np.array([[1.0]])
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    return h


def published_2q(theta):
    """Two-qubit amplitudes as published: (c c1, c s1, s c2, s s2) with primed angles H2 theta[1:3]."""
    c1, s1 = np.cos(theta[0] / 2), np.sin(theta[0] / 2)
    tp = H(2) @ theta[1:3] / 2
    c, s = np.cos(tp), np.sin(tp)
    return np.array([c1 * c[0], c1 * s[0], s1 * c[1], s1 * s[1]])


def published_3q(theta):
    """Three-qubit amplitudes as published, primed angles from H2 and H4."""
    c1, s1 = np.cos(theta[0] / 2), np.sin(theta[0] / 2)
    tp, tq = H(2) @ theta[1:3] / 2, H(4) @ theta[3:7] / 2
    cp, sp, cq, sq = np.cos(tp), np.sin(tp), np.cos(tq), np.sin(tq)
    return np.array([
        c1 * cp[0] * cq[0], c1 * cp[0] * sq[0], c1 * sp[0] * cq[3], c1 * sp[0] * sq[3],
        s1 * sp[1] * sq[1], s1 * sp[1] * cq[1], s1 * cp[1] * sq[2], s1 * cp[1] * cq[2],
    ])


def generic_ucr_unitary(angles, controls, target, n):
    """Multiplexed Ry as a block-diagonal sum over control patterns (no CX)."""
    u = np.zeros((1 << n, 1 << n))
    for pattern, a in enumerate(angles):
        ops = [I2] * n
        for i, c in enumerate(controls):
            bit = (pattern >> (len(controls) - 1 - i)) & 1
            ops[c] = P1 if bit else P0
        ops[target] = ry_matrix(a)
        u += kron_all(ops)
    return u
