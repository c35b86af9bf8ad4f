"""Concurrence of pure states, Wootters' formula, and concurrence of assistance."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .linalg import DensityMatrix, PureState, psd_sqrt, reduced_state, singular_values

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SIGMA_Y, SIGMA_Y)


def bipartition(side, n_qubits: int) -> tuple[list[int], list[int]]:
    """Validate ``side`` as one half of a cut of ``n_qubits`` qubits; return both halves."""
    if isinstance(side, (int, np.integer)):
        side = [side]
    a = sorted({int(k) for k in side})
    if any(not 0 <= k < n_qubits for k in a):
        raise ValueError(f"partition {a} has qubit indices outside 0..{n_qubits - 1}")
    b = [k for k in range(n_qubits) if k not in a]
    if not a or not b:
        raise ValueError("both sides of a bipartition must be nonempty")
    return a, b


def pure_concurrence(psi: PureState, partition: Iterable[int] | int) -> float:
    """``sqrt(2 (1 - tr rho_A^2))`` across the cut ``partition | rest``."""
    a, b = bipartition(partition, psi.n_qubits)
    keep = a if len(a) <= len(b) else b
    r = reduced_state(psi, keep).matrix
    purity = float(np.sum(np.abs(r) ** 2))
    return math.sqrt(max(0.0, 2.0 * (1.0 - purity)))


def _two_qubit(rho: DensityMatrix) -> np.ndarray:
    if rho.matrix.shape != (4, 4):
        raise ValueError(f"expected a two-qubit (4x4) state, got {rho.matrix.shape}")
    return rho.matrix


def spin_flip(rho: DensityMatrix) -> np.ndarray:
    """``(sigma_y x sigma_y) rho* (sigma_y x sigma_y)``."""
    m = _two_qubit(rho)
    return YY @ m.conj() @ YY


def wootters_spectrum(rho: DensityMatrix) -> np.ndarray:
    """Eigenvalues of ``sqrt(sqrt(rho) rho~ sqrt(rho))`` in decreasing order.

    ``rho~ = X^2`` with ``X = YY sqrt(rho)* YY``, so the requested values are the
    singular values of ``sqrt(rho) X``; the Hermitian dilation keeps the zero
    ones at round-off level instead of ``sqrt(round-off)``.
    """
    _two_qubit(rho)
    s = psd_sqrt(rho)
    x = YY @ s.conj() @ YY
    lam = singular_values(s @ x)
    return np.sort(np.clip(lam, 0.0, None))[::-1]


def concurrence_from_spectrum(lam: np.ndarray) -> float:
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def wootters_concurrence(rho: DensityMatrix) -> float:
    """``max(0, l1 - l2 - l3 - l4)``."""
    return concurrence_from_spectrum(wootters_spectrum(rho))


def concurrence_of_assistance(rho: DensityMatrix) -> float:
    """Closed form ``l1 + l2 + l3 + l4`` of the maximal average pure-state concurrence."""
    return float(np.sum(wootters_spectrum(rho)))
