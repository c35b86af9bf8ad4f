"""Named reference states."""

from __future__ import annotations

import numpy as np

from .linalg import DensityMatrix, PureState


def basis_state(bits: str) -> PureState:
    """Computational basis state; ``bits`` is written most significant qubit first."""
    amps = np.zeros(1 << len(bits), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return PureState(amps)


def product_zero(n_qubits: int) -> PureState:
    return basis_state("0" * n_qubits)


def ghz(n_qubits: int = 3) -> PureState:
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return PureState(amps)


def w_state(n_qubits: int = 3) -> PureState:
    amps = np.zeros(1 << n_qubits, dtype=complex)
    for k in range(n_qubits):
        amps[1 << k] = 1.0
    return PureState.normalized(amps)


def bell_phi_plus() -> PureState:
    return PureState(np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2))


def werner(p: float) -> DensityMatrix:
    """``p |Phi+><Phi+| + (1 - p) I/4``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner weight p must lie in [0, 1], got {p}")
    phi = bell_phi_plus().amplitudes
    return DensityMatrix(p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4)


def maximally_mixed(n_qubits: int = 2) -> DensityMatrix:
    d = 1 << n_qubits
    return DensityMatrix(np.eye(d, dtype=complex) / d)
