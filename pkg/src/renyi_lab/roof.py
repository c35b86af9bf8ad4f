"""Convex-roof optimization over pure-state decompositions of two-qubit states.

Every ensemble of a state ``rho = sum_j l_j |e_j><e_j|`` of rank ``r`` has the
form ``|psi~_i> = sum_j U_ij sqrt(l_j) |e_j>`` for an ``m x r`` matrix ``U``
with orthonormal columns.  ``U`` is parametrized by QR-orthonormalizing an
unconstrained complex matrix, and the average pure-state measure is minimized
(or maximized) by multi-start local optimization.  The result is only a bound:
an upper bound on a roof minimum, a lower bound on an assisted maximum.

Pure-state measures are evaluated from the Schmidt spectrum of each member,
computed directly from its 2x2 amplitude matrix; nothing here calls the
closed forms in ``concurrence`` or ``renyi_ent``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .entropy import as_alpha
from .linalg import DensityMatrix, PureState, herm_eig, validate_isometry

RANK_TOL = 1e-10
AGREE_TOL = 1e-6


@dataclass(frozen=True)
class Measure:
    """Pure-state functional averaged by the roof: ``concurrence`` or ``renyi`` with an ``alpha``."""

    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in ("concurrence", "renyi"):
            raise ValueError(f"unknown measure {self.kind!r}")
        if self.kind == "renyi":
            object.__setattr__(self, "alpha", as_alpha(self.alpha).alpha)

    @classmethod
    def parse(cls, spec) -> "Measure":
        """Accept a ``Measure``, ``"concurrence"``, ``"renyi:2"`` or ``("renyi", 2)``."""
        if isinstance(spec, Measure):
            return spec
        if isinstance(spec, tuple):
            return cls(*spec)
        kind, _, alpha = str(spec).partition(":")
        return cls(kind, float(alpha) if alpha else None)

    def __str__(self):
        return self.kind if self.kind == "concurrence" else f"renyi:{self.alpha:g}"


@dataclass(frozen=True)
class RoofBudget:
    """Optimizer settings.

    ``restarts`` is an upper bound; the search stops early once ``patience``
    consecutive restarts fail to improve the best value by more than
    ``AGREE_TOL`` (``patience=None`` always runs every restart).
    """

    restarts: int = 64
    max_iter: int = 2000
    ensemble_size: int = 8
    xatol: float = 1e-9
    method: str = "l-bfgs-b"
    seed: int = 0
    patience: int | None = 6

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1 or self.ensemble_size < 1:
            raise ValueError("restarts, max_iter and ensemble_size must be positive")
        if self.method not in ("l-bfgs-b", "nelder-mead"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True, eq=False)
class Decomposition:
    weights: np.ndarray
    states: list

    def reconstruct(self) -> np.ndarray:
        return sum(p * np.outer(s.amplitudes, s.amplitudes.conj()) for p, s in zip(self.weights, self.states))


@dataclass(frozen=True, eq=False)
class RoofResult:
    value: float
    converged: bool
    decomposition: Decomposition
    spectral_value: float
    restarts_run: int
    nfev: int = field(repr=False)

    @property
    def unconverged(self) -> bool:
        return not self.converged

    def __float__(self):
        return self.value


def _support(rho: DensityMatrix) -> np.ndarray:
    """Columns ``sqrt(l_j) e_j`` over the eigenvalues above ``RANK_TOL``."""
    w, v = herm_eig(rho.matrix)
    keep = w > RANK_TOL
    return v[:, keep] * np.sqrt(w[keep])


def decompositions_from_unitary(rho: DensityMatrix, u) -> Decomposition:
    """Ensemble ``|psi~_i> = sum_j u_ij sqrt(l_j) |e_j>``; zero-weight members are dropped."""
    b = _support(rho)
    u = validate_isometry(u)
    if u.shape[1] != b.shape[1]:
        raise ValueError(f"isometry has {u.shape[1]} columns but rho has rank {b.shape[1]}")
    if u.shape[0] < u.shape[1]:
        raise ValueError("isometry needs at least as many rows as columns")
    psi = u @ b.T
    weights = np.sum(np.abs(psi) ** 2, axis=1)
    keep = weights > 1e-15
    states = [PureState.normalized(row) for row in psi[keep]]
    return Decomposition(weights[keep] / weights[keep].sum(), states)


def _weighted_measure(psi: np.ndarray, measure: Measure) -> float:
    """``sum_i p_i E(psi_i)`` for unnormalized two-qubit rows ``psi`` (``p_i = |psi_i|^2``)."""
    weights = np.einsum("ij,ij->i", psi.real, psi.real) + np.einsum("ij,ij->i", psi.imag, psi.imag)
    det = np.abs(psi[:, 0] * psi[:, 3] - psi[:, 1] * psi[:, 2])
    if measure.kind == "concurrence":
        return float(2.0 * det.sum())
    ok = weights > 1e-300
    p = weights[ok]
    d = det[ok] / p
    # Schmidt weights: roots of s^2 - s + d^2 = 0
    disc = np.sqrt(np.maximum(0.0, 1.0 - 4.0 * d * d))
    lo = 2.0 * d * d / (1.0 + disc)
    hi = 1.0 - lo
    a = as_alpha(measure.alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        if a.is_shannon:
            ent = -(hi * np.log2(hi) + np.where(lo > 0, lo * np.log2(lo), 0.0))
        else:
            ent = np.log2(hi ** a.alpha + lo ** a.alpha) / (1.0 - a.alpha)
    return float(np.dot(p, ent))


def _isometry(theta: np.ndarray, m: int, r: int) -> np.ndarray:
    k = m * r
    z = (theta[:k] + 1j * theta[k:]).reshape(m, r)
    q, _ = np.linalg.qr(z)
    return q


def _optimize(rho: DensityMatrix, measure, budget: RoofBudget, sign: float) -> RoofResult:
    measure = Measure.parse(measure)
    b = _support(rho)
    r = b.shape[1]
    m = max(budget.ensemble_size, r)
    bt = b.T

    spectral = _weighted_measure(bt, measure)
    if r == 1:
        dec = Decomposition(np.array([1.0]), [PureState.normalized(bt[0])])
        return RoofResult(spectral, True, dec, spectral, 0, 1)

    def objective(theta):
        return sign * _weighted_measure(_isometry(theta, m, r) @ bt, measure)

    # restart 0 starts exactly at the spectral decomposition (zero-padded rows),
    # so the result never ends up worse than it
    start0 = np.zeros((m, r))
    start0[:r, :r] = np.eye(r)
    x_spectral = np.concatenate([start0.ravel(), np.zeros(m * r)])

    best_val, best_theta = np.inf, None
    values = []
    nfev = 0
    stale = 0
    runs = 0
    for k in range(budget.restarts):
        if k == 0:
            x0 = x_spectral
        else:
            x0 = np.random.default_rng([budget.seed, k]).standard_normal(2 * m * r)
        if budget.method == "nelder-mead":
            res = minimize(
                objective, x0, method="Nelder-Mead",
                options={"maxiter": budget.max_iter, "xatol": budget.xatol, "fatol": 1e-12, "adaptive": True},
            )
        else:
            res = minimize(objective, x0, method="L-BFGS-B", options={"maxiter": budget.max_iter})
        runs += 1
        nfev += res.nfev
        values.append(res.fun)
        stale = 0 if res.fun < best_val - AGREE_TOL else stale + 1
        if res.fun < best_val:
            best_val, best_theta = res.fun, res.x
        if budget.patience is not None and stale >= budget.patience:
            break

    if sign * spectral < best_val:
        best_val, best_theta = sign * spectral, x_spectral
    agree = sum(1 for v in values if v <= best_val + AGREE_TOL)
    value = sign * best_val
    dec = decompositions_from_unitary(rho, _isometry(best_theta, m, r))
    return RoofResult(float(value), agree >= 2, dec, spectral, runs, nfev)


def convex_roof_min(rho: DensityMatrix, measure="concurrence", budget: RoofBudget | None = None) -> RoofResult:
    """Smallest average ``measure`` found over decompositions of a two-qubit ``rho``."""
    _check_two_qubit(rho)
    return _optimize(rho, measure, budget or RoofBudget(), 1.0)


def roof_max(rho: DensityMatrix, measure="concurrence", budget: RoofBudget | None = None) -> RoofResult:
    """Largest average ``measure`` found over decompositions of a two-qubit ``rho``."""
    _check_two_qubit(rho)
    return _optimize(rho, measure, budget or RoofBudget(), -1.0)


def _check_two_qubit(rho: DensityMatrix):
    if rho.matrix.shape != (4, 4):
        raise ValueError("roof optimization is implemented for two-qubit states only")


def pure_measure(psi: PureState, measure) -> float:
    """The roof's pure-state functional evaluated on a single two-qubit state."""
    if psi.n_qubits != 2:
        raise ValueError("pure_measure needs a two-qubit state")
    return _weighted_measure(psi.amplitudes[None, :], Measure.parse(measure))


def spectral_average(rho: DensityMatrix, measure) -> float:
    return _weighted_measure(_support(rho).T, Measure.parse(measure))

