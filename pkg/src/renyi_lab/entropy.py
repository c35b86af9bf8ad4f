"""Classical and quantum Renyi entropies in bits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .linalg import DensityMatrix, herm_eig

LN2 = np.log(2.0)
ONE_TOLERANCE = 1e-6
PROB_NEG_TOL = 1e-12
PROB_SUM_TOL = 1e-10
ZERO_EIGENVALUE = 1e-15


@dataclass(frozen=True)
class AlphaParam:
    """Renyi order ``alpha > 0``.

    Within ``one_tolerance`` of 1 the Shannon / von Neumann limit is used
    instead of the ``1/(1 - alpha)`` form, which loses about six digits there.
    """

    alpha: float
    one_tolerance: float = ONE_TOLERANCE

    def __post_init__(self):
        a = float(self.alpha)
        if not np.isfinite(a) or a <= 0:
            raise ValueError(f"alpha must be a positive real, got {self.alpha!r}")
        if self.one_tolerance <= 0:
            raise ValueError("one_tolerance must be positive")
        object.__setattr__(self, "alpha", a)

    @property
    def is_shannon(self) -> bool:
        return abs(self.alpha - 1.0) < self.one_tolerance

    def __float__(self):
        return self.alpha


def as_alpha(a) -> AlphaParam:
    return a if isinstance(a, AlphaParam) else AlphaParam(float(a))


def as_probability_vector(p) -> np.ndarray:
    """Validate a probability vector; tiny negatives are clipped to zero."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("probability vector is empty")
    if np.any(~np.isfinite(p)) or np.any(p < -PROB_NEG_TOL) or np.any(p > 1 + PROB_NEG_TOL):
        raise ValueError("probabilities must lie in [0, 1]")
    if abs(p.sum() - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"probabilities sum to {p.sum()!r}, expected 1")
    return np.clip(p, 0.0, 1.0)


def _renyi_bits(p: np.ndarray, a: AlphaParam) -> float:
    p = np.where(p < ZERO_EIGENVALUE, 0.0, p)
    if a.is_shannon:
        value = -xlogy(p, p).sum() / LN2
    else:
        value = np.log2(np.sum(p[p > 0] ** a.alpha)) / (1.0 - a.alpha)
    return max(0.0, float(value))


def renyi_entropy(p, alpha) -> float:
    """Renyi-alpha entropy ``log2(sum p_i**alpha) / (1 - alpha)`` in bits."""
    return _renyi_bits(as_probability_vector(p), as_alpha(alpha))


def spectrum(rho: DensityMatrix) -> np.ndarray:
    """Eigenvalues of ``rho``, descending, tiny negatives clipped."""
    return np.clip(herm_eig(rho.matrix)[0], 0.0, None)


def quantum_renyi_entropy(rho: DensityMatrix, alpha) -> float:
    """Renyi-alpha entropy of the spectrum of ``rho``; von Neumann entropy at alpha = 1."""
    w = herm_eig(rho.matrix)[0]
    return _renyi_bits(as_probability_vector(w), as_alpha(alpha))
