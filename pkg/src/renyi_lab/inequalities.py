"""Monogamy and polygamy residuals for multi-qubit pure states.

Every residual is signed so that ``residual >= 0`` means the inequality holds:
``lhs - sum(rhs_terms)`` for monogamy-type and ``sum(rhs_terms) - lhs`` for
polygamy-type inequalities.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .concurrence import pure_concurrence, wootters_spectrum
from .entropy import as_alpha, renyi_entropy, spectrum
from .errors import ConjecturalAlphaError, ConjecturalAlphaWarning
from .linalg import PureState, haar_random_pure, reduced_state
from .renyi_ent import CONJECTURE_ALPHA_FLOOR, closed_form_status, f_alpha
from .roof import Measure, RoofBudget, roof_max

VIOLATION_TOL = 1e-9
MONOGAMY_ALPHA_MIN = 2.0
POLYGAMY_WINDOW = (0.83, 1.44)

INEQUALITIES = ("ckw", "renyi_monogamy", "coa_polygamy", "eoa_polygamy", "renyi_polygamy")
POLYGAMY_IDS = {"coa_polygamy", "eoa_polygamy", "renyi_polygamy"}
ALPHA_IDS = {"renyi_monogamy", "renyi_polygamy"}


@dataclass(frozen=True)
class ResidualReport:
    """One inequality evaluated on one state at one alpha."""

    inequality_id: str
    alpha: float | None
    lhs: float
    rhs_terms: tuple
    residual: float
    state_seed: int | None = None
    focus: int = 0
    conjectural: bool = False
    unconverged: bool = False

    @classmethod
    def build(cls, inequality_id, lhs, rhs_terms, alpha=None, **kw) -> "ResidualReport":
        rhs_terms = tuple(float(v) for v in rhs_terms)
        return cls(inequality_id, alpha, float(lhs), rhs_terms,
                   _signed_residual(inequality_id, float(lhs), rhs_terms), **kw)

    def recomputed_residual(self) -> float:
        return _signed_residual(self.inequality_id, self.lhs, self.rhs_terms)

    def status(self, tol: float = VIOLATION_TOL) -> str:
        """``"satisfied"``, ``"numerical-zero"`` (in ``[-tol, 0)``) or ``"violation"``."""
        if self.residual >= 0:
            return "satisfied"
        return "numerical-zero" if self.residual >= -tol else "violation"


def _signed_residual(inequality_id: str, lhs: float, rhs_terms: tuple) -> float:
    total = math.fsum(rhs_terms)
    return total - lhs if inequality_id in POLYGAMY_IDS else lhs - total


@dataclass
class _Terms:
    """Alpha-independent quantities for one (state, focus) pair."""

    focus_spectrum: np.ndarray
    focus_concurrence: float
    pair_states: list
    pair_spectra: list

    @property
    def pair_concurrences(self) -> np.ndarray:
        return np.array([max(0.0, s[0] - s[1] - s[2] - s[3]) for s in self.pair_spectra])

    @property
    def pair_assistance(self) -> np.ndarray:
        return np.array([float(np.sum(s)) for s in self.pair_spectra])


def _terms(psi: PureState, focus: int) -> _Terms:
    n = psi.n_qubits
    if not 2 <= n:
        raise ValueError("inequalities need at least two qubits")
    if not 0 <= focus < n:
        raise ValueError(f"focus {focus} is not a qubit index of a {n}-qubit state")
    pairs = [reduced_state(psi, [focus, i]) for i in range(n) if i != focus]
    return _Terms(
        focus_spectrum=spectrum(reduced_state(psi, [focus])),
        focus_concurrence=pure_concurrence(psi, [focus]),
        pair_states=pairs,
        pair_spectra=[wootters_spectrum(r) for r in pairs],
    )


def _check_alpha_window(inequality_id, alpha, floor, strict) -> bool:
    """Return the ``conjectural`` flag, warning or raising outside the supported range."""
    al = float(alpha)
    if inequality_id == "renyi_monogamy":
        if closed_form_status(al, floor) == "unsupported":
            _complain(f"alpha={al} is below the conjecture floor {floor}", strict)
        return al < MONOGAMY_ALPHA_MIN
    lo, hi = POLYGAMY_WINDOW
    if not lo <= al <= hi:
        _complain(f"alpha={al} lies outside the polygamy window [{lo}, {hi}]", strict)
        return True
    return not as_alpha(al).is_shannon


def _complain(msg: str, strict: bool):
    if strict:
        raise ConjecturalAlphaError(msg)
    warnings.warn(msg, ConjecturalAlphaWarning, stacklevel=4)


def _report(inequality_id, t: _Terms, alpha=None, *, seed=None, focus=0, floor=CONJECTURE_ALPHA_FLOOR,
            strict=False, oracle_rhs=False, budget=None, check_alpha=True) -> ResidualReport:
    conjectural = False
    unconverged = False
    if inequality_id in ALPHA_IDS and check_alpha:
        conjectural = _check_alpha_window(inequality_id, alpha, floor, strict)
    if inequality_id == "ckw":
        lhs, rhs = t.focus_concurrence ** 2, t.pair_concurrences ** 2
    elif inequality_id == "coa_polygamy":
        lhs, rhs = t.focus_concurrence ** 2, t.pair_assistance ** 2
    elif inequality_id == "renyi_monogamy":
        lhs = renyi_entropy(t.focus_spectrum, alpha)
        rhs = np.atleast_1d(f_alpha(t.pair_concurrences, alpha))
    elif inequality_id == "renyi_polygamy":
        lhs = renyi_entropy(t.focus_spectrum, alpha)
        if oracle_rhs:
            results = [roof_max(r, Measure("renyi", float(alpha)), budget) for r in t.pair_states]
            rhs = [r.value for r in results]
            unconverged = any(r.unconverged for r in results)
        else:
            rhs = np.atleast_1d(f_alpha(np.clip(t.pair_assistance, 0.0, 1.0), alpha))
    elif inequality_id == "eoa_polygamy":
        lhs = renyi_entropy(t.focus_spectrum, 1.0)
        results = [roof_max(r, Measure("renyi", 1.0), budget) for r in t.pair_states]
        rhs = [r.value for r in results]
        unconverged = any(r.unconverged for r in results)
    else:
        raise ValueError(f"unknown inequality {inequality_id!r}; expected one of {INEQUALITIES}")
    return ResidualReport.build(
        inequality_id, lhs, rhs, None if alpha is None else float(alpha),
        state_seed=seed, focus=focus, conjectural=conjectural, unconverged=unconverged,
    )


def ckw_residual(psi: PureState, focus: int = 0, state_seed: int | None = None) -> ResidualReport:
    """``C^2_{focus|rest} - sum_i C^2(rho_{focus,i})``."""
    return _report("ckw", _terms(psi, focus), seed=state_seed, focus=focus)


def renyi_monogamy_residual(psi: PureState, focus: int = 0, alpha=2.0, state_seed: int | None = None,
                            floor: float = CONJECTURE_ALPHA_FLOOR, strict: bool = False) -> ResidualReport:
    """``E_a(focus|rest) - sum_i E_a(rho_{focus,i})``; guaranteed ``>= 0`` for alpha >= 2."""
    return _report("renyi_monogamy", _terms(psi, focus), alpha, seed=state_seed, focus=focus,
                   floor=floor, strict=strict)


def coa_polygamy_residual(psi: PureState, focus: int = 0, state_seed: int | None = None) -> ResidualReport:
    """``sum_i C^a(rho_{focus,i})^2 - C^2_{focus|rest}``."""
    return _report("coa_polygamy", _terms(psi, focus), seed=state_seed, focus=focus)


def eoa_polygamy_residual(psi: PureState, focus: int = 0, state_seed: int | None = None,
                          budget: RoofBudget | None = None) -> ResidualReport:
    """``sum_i E^a(rho_{focus,i}) - E(focus|rest)`` with the assisted terms from ``roof_max``.

    The optimizer lower-bounds each assisted term, so the residual is itself a
    lower bound on the true one.
    """
    return _report("eoa_polygamy", _terms(psi, focus), seed=state_seed, focus=focus, budget=budget)


def renyi_polygamy_residual(psi: PureState, focus: int = 0, alpha=1.0, state_seed: int | None = None,
                            oracle_rhs: bool = False, budget: RoofBudget | None = None,
                            strict: bool = False) -> ResidualReport:
    """``sum_i f_a(C^a(rho_{focus,i})) - E_a(focus|rest)``.

    The default right-hand side is the certified lower bound ``f_a(C^a)`` on
    each assisted term, so a non-negative residual implies the inequality.
    ``oracle_rhs`` substitutes the optimizer's estimate instead.
    """
    return _report("renyi_polygamy", _terms(psi, focus), alpha, seed=state_seed, focus=focus,
                   strict=strict, oracle_rhs=oracle_rhs, budget=budget)


# -- batch checks -------------------------------------------------------------

@dataclass
class AlphaSummary:
    """Reduction of all residuals for one alpha; ``worst_*`` locate the minimum."""

    alpha: float | None
    n_checks: int = 0
    min_residual: float | None = None
    residuals: list = field(default_factory=list, repr=False)
    violations: int = 0
    numerical_zeros: int = 0
    unconverged: int = 0
    worst_seed: int | None = None
    worst_focus: int | None = None
    violating: list = field(default_factory=list)

    @property
    def mean_residual(self) -> float | None:
        # fsum is exact, so the mean does not depend on chunking or order
        return math.fsum(self.residuals) / self.n_checks if self.n_checks else None

    def add(self, rep: ResidualReport, tol: float):
        self.n_checks += 1
        self.residuals.append(rep.residual)
        self.unconverged += rep.unconverged
        key = (rep.state_seed, rep.focus)
        if self.min_residual is None or rep.residual < self.min_residual or (
            rep.residual == self.min_residual and key < (self.worst_seed, self.worst_focus)
        ):
            self.min_residual = rep.residual
            self.worst_seed, self.worst_focus = key
        status = rep.status(tol)
        if status == "violation":
            self.violations += 1
            self.violating.append(key)
        elif status == "numerical-zero":
            self.numerical_zeros += 1

    def merge(self, other: "AlphaSummary"):
        if other.min_residual is not None and (
            self.min_residual is None
            or other.min_residual < self.min_residual
            or (other.min_residual == self.min_residual
                and (other.worst_seed, other.worst_focus) < (self.worst_seed, self.worst_focus))
        ):
            self.min_residual = other.min_residual
            self.worst_seed, self.worst_focus = other.worst_seed, other.worst_focus
        self.n_checks += other.n_checks
        self.residuals.extend(other.residuals)
        self.violations += other.violations
        self.numerical_zeros += other.numerical_zeros
        self.unconverged += other.unconverged
        self.violating.extend(other.violating)


@dataclass
class BatchSummary:
    inequality_id: str
    n_qubits: int
    n_samples: int
    seed: int
    tolerance: float
    per_alpha: list

    @property
    def violations(self) -> int:
        return sum(s.violations for s in self.per_alpha)

    @property
    def unconverged(self) -> int:
        return sum(s.unconverged for s in self.per_alpha)


def sample_state(n_qubits: int, seed: int, index: int) -> PureState:
    """The ``index``-th Haar sample of a batch run with ``seed``."""
    return haar_random_pure(n_qubits, [seed, index])


def _run_chunk(args) -> list:
    (inequality_id, alphas, n_qubits, seed, indices, foci, tol, oracle_rhs, budget) = args
    parts = [AlphaSummary(a) for a in alphas]
    for idx in indices:
        psi = sample_state(n_qubits, seed, idx)
        for focus in foci:
            t = _terms(psi, focus)
            for part in parts:
                rep = _report(inequality_id, t, part.alpha, seed=idx, focus=focus,
                              oracle_rhs=oracle_rhs, budget=budget, check_alpha=False)
                part.add(rep, tol)
    return parts


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("RENYI_LAB_THREADS", "1")))
    except ValueError:
        return 1


def batch_check(inequality_id: str, alpha_list=None, n_qubits: int = 3, n_samples: int = 1000, seed: int = 0,
                *, focus: int = 0, all_foci: bool = False, tolerance: float = VIOLATION_TOL,
                oracle_rhs: bool = False, budget: RoofBudget | None = None, workers: int | None = None,
                floor: float = CONJECTURE_ALPHA_FLOOR, strict: bool = False) -> BatchSummary:
    """Evaluate one inequality on ``n_samples`` Haar-random states for every alpha.

    Sample ``k`` is drawn from the RNG seeded with ``(seed, k)``, so the summary
    does not depend on ``workers``.
    """
    if inequality_id not in INEQUALITIES:
        raise ValueError(f"unknown inequality {inequality_id!r}; expected one of {INEQUALITIES}")
    if n_samples < 0:
        raise ValueError("n_samples must be >= 0")
    if inequality_id in ALPHA_IDS:
        if not alpha_list:
            raise ValueError(f"{inequality_id} needs at least one alpha")
        alphas = sorted(float(a) for a in alpha_list)
        for a in alphas:
            _check_alpha_window(inequality_id, a, floor, strict)
    else:
        alphas = [None]
    foci = list(range(n_qubits)) if all_foci else [focus]
    if any(not 0 <= f < n_qubits for f in foci):
        raise ValueError(f"focus {focus} out of range for {n_qubits} qubits")

    workers = default_workers() if workers is None else max(1, workers)
    indices = list(range(n_samples))
    common = (inequality_id, alphas, n_qubits, seed)
    tail = (foci, tolerance, oracle_rhs, budget)
    if workers == 1 or n_samples < 2 * workers:
        chunks = [_run_chunk(common + (indices,) + tail)]
    else:
        bounds = np.linspace(0, n_samples, workers + 1).astype(int)
        jobs = [common + (indices[b0:b1],) + tail for b0, b1 in zip(bounds[:-1], bounds[1:])]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_chunk, jobs))
    totals = [AlphaSummary(a) for a in alphas]
    for parts in chunks:
        for total, part in zip(totals, parts):
            total.merge(part)
    for total in totals:
        total.violating.sort()
    return BatchSummary(inequality_id, n_qubits, n_samples, seed, tolerance, totals)
