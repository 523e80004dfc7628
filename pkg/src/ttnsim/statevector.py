"""Dense statevector simulation, the verification oracle for both engines.

Amplitude ordering is big-endian in the qubit index: qubit 0 is the most
significant bit of the amplitude index. All engines share this convention.
"""

import numpy as np

from .circuits import Circuit
from .gates import Gate

DEFAULT_QUBIT_CAP = 20


def basis_vector(bits) -> np.ndarray:
    bits = list(bits)
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        idx = (idx << 1) | b
    vec = np.zeros(2 ** len(bits), dtype=np.complex128)
    vec[idx] = 1.0
    return vec


def apply_gate(vec: np.ndarray, g: Gate, num_qubits: int) -> np.ndarray:
    """Apply one gate to a dense statevector by direct index action."""
    psi = vec.reshape([2] * num_qubits)
    if g.num_qubits == 1:
        (q,) = g.qubits
        psi = np.tensordot(g.matrix, psi, axes=(1, q))
        psi = np.moveaxis(psi, 0, q)
    else:
        qa, qb = g.qubits
        m4 = g.matrix.reshape(2, 2, 2, 2)  # (out_a, out_b, in_a, in_b)
        psi = np.tensordot(m4, psi, axes=((2, 3), (qa, qb)))
        psi = np.moveaxis(psi, (0, 1), (qa, qb))
    return np.ascontiguousarray(psi).reshape(-1)


def sv_simulate(c: Circuit, bits=None, qubit_cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """Run the circuit on a dense statevector starting from a basis state."""
    if c.num_qubits > qubit_cap:
        raise ValueError(f"{c.num_qubits} qubits exceeds the dense cap of {qubit_cap}")
    if bits is None:
        bits = [0] * c.num_qubits
    if len(bits) != c.num_qubits:
        raise ValueError("bits length must equal the qubit count")
    vec = basis_vector(bits)
    for g in c.gates:
        vec = apply_gate(vec, g, c.num_qubits)
    return vec


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2 for two normalized pure states."""
    if a.shape != b.shape:
        raise ValueError(f"state sizes differ: {a.shape} vs {b.shape}")
    return float(np.abs(np.vdot(a, b)) ** 2)


def overlap_error(a: np.ndarray, b: np.ndarray) -> float:
    """Fidelity deficit 1 - |<a|b>|^2, in [0, 1] for normalized states.

    Symmetric and invariant under a global phase of either argument.
    """
    return max(0.0, 1.0 - fidelity(a, b))
