"""Real-amplitude statevector simulation.

States are plain float arrays of shape ``(..., 2**q)``; any leading axes are
batch axes, so one call can push a whole population of circuits through a
gate. Basis index ``i`` labels ``|q_0 q_1 ... q_{q-1}>`` with ``q_0`` the most
significant bit.

Only the gates the adversarial circuits need are provided: ``Ry``, ``CX``
and a Pauli-Z readout.
"""
from __future__ import annotations

import numpy as np

NORM_TOL = 1e-12


def num_qubits_of(state: np.ndarray) -> int:
    dim = np.shape(state)[-1]
    q = int(dim).bit_length() - 1
    if dim < 2 or 1 << q != dim:
        raise ValueError(f"state length {dim} is not a power of two >= 2")
    return q


def zero_state(num_qubits: int) -> np.ndarray:
    """Return ``|0...0>`` on ``num_qubits`` qubits."""
    if num_qubits < 1:
        raise ValueError("num_qubits must be >= 1")
    state = np.zeros(1 << num_qubits)
    state[0] = 1.0
    return state


def validate_state(state, *, tol: float = NORM_TOL) -> np.ndarray:
    """Check a (possibly batched) state for real dtype, length and unit norm."""
    state = np.asarray(state)
    if np.iscomplexobj(state):
        raise TypeError("complex amplitudes are not supported")
    state = state.astype(float, copy=False)
    num_qubits_of(state)
    norms = np.linalg.norm(state, axis=-1)
    if not np.all(np.abs(norms - 1.0) <= tol):
        raise ValueError("state is not unit-norm")
    return state


def _check_qubit(qubit: int, num_qubits: int) -> None:
    if not 0 <= qubit < num_qubits:
        raise IndexError(f"qubit {qubit} out of range for {num_qubits} qubits")


def _split(state: np.ndarray, qubit: int) -> np.ndarray:
    q = num_qubits_of(state)
    _check_qubit(qubit, q)
    return state.reshape(state.shape[:-1] + (1 << qubit, 2, 1 << (q - qubit - 1)))


def apply_ry(state, target: int, angle) -> np.ndarray:
    """Rotate ``target`` by ``Ry(angle)``.

    ``angle`` is a scalar or an array broadcastable against the batch axes of
    ``state``. Returns a new array.
    """
    state = np.asarray(state, dtype=float)
    view = _split(state, target)
    angle = np.asarray(angle, dtype=float)[..., None, None]
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    a0, a1 = view[..., 0, :], view[..., 1, :]
    out = np.stack((c * a0 - s * a1, s * a0 + c * a1), axis=-2)
    return out.reshape(out.shape[:-3] + (-1,))


def apply_cx(state, control: int, target: int) -> np.ndarray:
    """Flip ``target`` on every basis state whose ``control`` bit is 1."""
    state = np.asarray(state, dtype=float)
    q = num_qubits_of(state)
    _check_qubit(control, q)
    _check_qubit(target, q)
    if control == target:
        raise ValueError("control and target must differ")
    out = state.copy()
    tensor = out.reshape(state.shape[:-1] + (2,) * q)
    nb = state.ndim - 1
    sel = [slice(None)] * tensor.ndim
    sel[nb + control] = 1
    # target axis index after the control axis has been removed by integer indexing
    axis = nb + target - (1 if target > control else 0)
    sub = tensor[tuple(sel)]
    tensor[tuple(sel)] = np.flip(sub, axis=axis)
    return out


def expect_z(state, qubit: int) -> np.ndarray | float:
    """``<Z>`` on ``qubit``: probability of bit 0 minus probability of bit 1."""
    state = np.asarray(state, dtype=float)
    view = _split(state, qubit)
    probs = np.square(view).sum(axis=(-3, -1))
    value = probs[..., 0] - probs[..., 1]
    return float(value) if np.ndim(value) == 0 else value


def run_circuit(template, params, initial=None) -> np.ndarray:
    """Apply ``template`` with ``params`` to ``initial`` (default ``|0...0>``).

    ``params`` has shape ``(..., template.num_params)``; ``initial`` has shape
    ``(..., 2**template.num_qubits)``. Leading axes broadcast against each
    other, so a population of parameter vectors can be run on a batch of
    input states at once (insert singleton axes to get an outer product).
    """
    params = np.asarray(params, dtype=float)
    if params.shape[-1:] != (template.num_params,):
        raise ValueError(
            f"expected {template.num_params} parameters, got shape {params.shape}"
        )
    if initial is None:
        initial = zero_state(template.num_qubits)
    state = np.asarray(initial, dtype=float)
    if num_qubits_of(state) != template.num_qubits:
        raise ValueError(
            f"initial state has {num_qubits_of(state)} qubits, "
            f"template needs {template.num_qubits}"
        )
    batch = np.broadcast_shapes(params.shape[:-1], state.shape[:-1])
    state = np.broadcast_to(state, batch + state.shape[-1:])
    params = np.broadcast_to(params, batch + params.shape[-1:])
    for gate in template.gates:
        if gate.kind == "ry":
            state = apply_ry(state, gate.target, params[..., gate.slot])
        else:
            state = apply_cx(state, gate.control, gate.target)
    return np.array(state)
