"""Generator and discriminator ansatze built from uniformly controlled rotations.

A template is an immutable, time-ordered gate list. The generator on ``n``
qubits is a single ``Ry`` on ``q_0`` followed by a cascade of uniformly
controlled Y-rotations (UCRs), one per remaining qubit, giving ``2**n - 1``
angles and ``2**n - n - 1`` CX gates. The discriminator is the generator
layout on ``n + 1`` qubits (ancilla last) plus one extra ``Ry`` per input
qubit.

An ``m``-fold UCR on ``target`` is built recursively::

    U(c_0..c_{m-1}; t) = U(c_1..c_{m-1}; t[0::2]) . CX(c_0, target) . U(c_1..c_{m-1}; t[1::2])

in time order, with base case ``Ry(t_0) . CX(c, target) . Ry(t_1)``. The
stride split of the angle slots is what makes the two- and three-qubit
amplitudes come out in the closed product-of-half-angle form (see
``generator_amplitudes_3q`` in the tests).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .simulator import NORM_TOL, num_qubits_of, run_circuit, zero_state

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class Gate:
    kind: str  # "ry" or "cx"
    target: int
    control: int | None = None
    slot: int | None = None

    def __post_init__(self):
        if self.kind == "ry":
            if self.slot is None or self.control is not None:
                raise ValueError("ry gates need a slot and no control")
        elif self.kind == "cx":
            if self.control is None or self.slot is not None:
                raise ValueError("cx gates need a control and no slot")
            if self.control == self.target:
                raise ValueError("cx control and target must differ")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    def __str__(self):
        if self.kind == "ry":
            return f"ry q{self.target} slot={self.slot}"
        return f"cx q{self.control} q{self.target}"


def ry(target: int, slot: int) -> Gate:
    return Gate("ry", target, slot=slot)


def cx(control: int, target: int) -> Gate:
    return Gate("cx", target, control=control)


@dataclass(frozen=True)
class CircuitTemplate:
    num_qubits: int
    gates: tuple[Gate, ...]
    num_params: int = field(init=False)

    def __post_init__(self):
        slots = sorted({g.slot for g in self.gates if g.kind == "ry"})
        if slots != list(range(len(slots))):
            raise ValueError("angle slots must be contiguous from 0")
        for g in self.gates:
            for q in (g.target, g.control):
                if q is not None and not 0 <= q < self.num_qubits:
                    raise IndexError(f"gate {g} outside {self.num_qubits} qubits")
        object.__setattr__(self, "num_params", len(slots))

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def dump(self) -> str:
        """One gate per line, in time order."""
        return "\n".join(str(g) for g in self.gates) + "\n"

    def __add__(self, other: CircuitTemplate) -> CircuitTemplate:
        if other.num_qubits != self.num_qubits:
            raise ValueError("templates act on different qubit counts")
        return CircuitTemplate(self.num_qubits, self.gates + other.gates)


def hadamard(order: int) -> np.ndarray:
    """Unnormalized Sylvester Hadamard matrix of size ``order`` (power of 2)."""
    if order < 1 or order & (order - 1):
        raise ValueError("order must be a power of two")
    h = np.ones((1, 1), dtype=int)
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    return h


def _ucr_gates(controls, target, slots):
    if len(controls) == 1:
        return [ry(target, slots[0]), cx(controls[0], target), ry(target, slots[1])]
    rest = controls[1:]
    return (
        _ucr_gates(rest, target, slots[0::2])
        + [cx(controls[0], target)]
        + _ucr_gates(rest, target, slots[1::2])
    )


def build_ucr(controls, target: int, slot_base: int = 0, num_qubits: int | None = None):
    """Return the gate list of an ``len(controls)``-fold UCR on ``target``.

    The fragment uses slots ``slot_base .. slot_base + 2**m - 1``. When
    ``num_qubits`` is given a standalone template (with slots renumbered
    from 0) is returned instead of a gate list.
    """
    controls = list(controls)
    if not controls:
        raise ValueError("a UCR needs at least one control")
    if len(set(controls)) != len(controls) or target in controls:
        raise ValueError("controls must be distinct and exclude the target")
    m = len(controls)
    gates = _ucr_gates(controls, target, list(range(slot_base, slot_base + (1 << m))))
    if num_qubits is None:
        return gates
    shifted = [ry(g.target, g.slot - slot_base) if g.kind == "ry" else g for g in gates]
    return CircuitTemplate(num_qubits, tuple(shifted))


def _generator_gates(n: int, offset: int = 0):
    gates = [ry(0, offset)]
    slot = offset + 1
    for m in range(1, n):
        gates += build_ucr(range(m), m, slot)
        slot += 1 << m
    return gates


@lru_cache(maxsize=None)
def build_generator(n: int) -> CircuitTemplate:
    """Generator ansatz on ``n`` qubits: ``2**n - 1`` angles, ``2**n - n - 1`` CX."""
    if n < 1:
        raise ValueError("generator needs n >= 1 qubits")
    return CircuitTemplate(n, tuple(_generator_gates(n)))


@lru_cache(maxsize=None)
def build_discriminator(n: int) -> CircuitTemplate:
    """Discriminator on ``n`` input qubits plus an ancilla at index ``n``.

    Generator layout on ``n + 1`` qubits followed by a local ``Ry`` layer on
    the input qubits; ``2**(n+1) + n - 1`` angles, ``2**(n+1) - n - 2`` CX.
    """
    if n < 1:
        raise ValueError("discriminator needs n >= 1 input qubits")
    gates = _generator_gates(n + 1)
    first = (1 << (n + 1)) - 1
    gates += [ry(q, first + q) for q in range(n)]
    return CircuitTemplate(n + 1, tuple(gates))


def generator_param_count(n: int) -> int:
    return (1 << n) - 1


def discriminator_param_count(n: int) -> int:
    return (1 << (n + 1)) + n - 1


def generator_state(n: int, theta) -> np.ndarray:
    """Amplitudes prepared by the generator from ``|0...0>``.

    ``theta`` may carry leading batch axes.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1:] != (generator_param_count(n),):
        raise ValueError(
            f"generator on {n} qubits takes {generator_param_count(n)} angles, "
            f"got shape {theta.shape}"
        )
    return run_circuit(build_generator(n), theta, zero_state(n))


def ucr_branch_table(gates, controls, target):
    """Effective action of a UCR fragment per control basis state.

    For control pattern ``l`` (``controls[0]`` most significant) the target
    sees ``X**parity[l] . Ry(weights[l] @ angles)``, where ``angles`` are the
    fragment's slots in increasing order. Returns ``(parity, weights)``.
    """
    controls = list(controls)
    m = len(controls)
    slots = sorted({g.slot for g in gates if g.kind == "ry"})
    col = {s: i for i, s in enumerate(slots)}
    parity = np.zeros(1 << m, dtype=int)
    weights = np.zeros((1 << m, len(slots)), dtype=int)
    for l in range(1 << m):
        bits = {c: (l >> (m - 1 - i)) & 1 for i, c in enumerate(controls)}
        p = 0
        for g in gates:
            if g.kind == "ry":
                if g.target == target:
                    weights[l, col[g.slot]] += -1 if p else 1
            elif g.target == target and bits.get(g.control, 0):
                p ^= 1
        parity[l] = p
    return parity, weights


@lru_cache(maxsize=None)
def _level_tables(n: int):
    tables = []
    slot = 1
    for m in range(1, n):
        gates = build_ucr(range(m), m, slot)
        parity, weights = ucr_branch_table(gates, range(m), m)
        k = 1 << m
        if not np.array_equal(weights @ weights.T, k * np.eye(k, dtype=int)):
            raise AssertionError("UCR branch weights are not a Hadamard-type matrix")
        tables.append((slot, parity, weights))
        slot += k
    return tables


def wrap_angle(theta):
    """Map angles into ``[-pi, pi)``."""
    return np.mod(np.asarray(theta, dtype=float) + np.pi, TWO_PI) - np.pi


def state_to_params(target, *, return_sign: bool = False):
    """Generator angles in ``[-pi, pi)`` that prepare ``target``.

    Works level by level: the block norms at each qubit fix the effective
    branch angle of every control pattern, and the inverse Hadamard
    transform turns those into the UCR's slot angles. Wrapping an angle by
    ``2*pi`` negates the whole state, so the result reproduces ``target`` up
    to a global sign; pass ``return_sign=True`` to get that sign as well
    (``generator_state(n, theta) == sign * target``). Zero-norm blocks get a
    branch angle of 0.
    """
    x = np.asarray(target)
    if np.iscomplexobj(x):
        raise TypeError("complex amplitudes are not supported")
    x = x.astype(float)
    if x.ndim != 1:
        raise ValueError("state_to_params takes a single state vector")
    n = num_qubits_of(x)
    if abs(np.linalg.norm(x) - 1.0) > 1e-10:
        raise ValueError("target state must be unit-norm")

    def level_pairs(m):
        # amplitudes (or block norms) for bit q_m = 0 / 1 under each m-bit prefix
        blocks = x.reshape(1 << m, 2, -1)
        if m == n - 1:
            return blocks[:, 0, 0], blocks[:, 1, 0]
        norms = np.linalg.norm(blocks, axis=-1)
        return norms[:, 0], norms[:, 1]

    theta = np.zeros(generator_param_count(n))
    a0, a1 = level_pairs(0)
    theta[0] = 2 * np.arctan2(a1[0], a0[0])
    for m, (slot, parity, weights) in enumerate(_level_tables(n), start=1):
        a0, a1 = level_pairs(m)
        phi = np.where(parity == 1, 2 * np.arctan2(a0, a1), 2 * np.arctan2(a1, a0))
        theta[slot:slot + (1 << m)] = weights.T @ phi / (1 << m)

    wrapped = wrap_angle(theta)
    flips = int(np.rint((theta - wrapped) / TWO_PI).sum())
    sign = -1 if flips % 2 else 1
    return (wrapped, sign) if return_sign else wrapped
