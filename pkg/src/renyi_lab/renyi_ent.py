"""Renyi-alpha entanglement of qubit systems.

The central object is the concurrence-to-entanglement curve

    f_alpha(x) = log2[((1 - t)/2)**alpha + ((1 + t)/2)**alpha] / (1 - alpha),
    t = sqrt(1 - x**2),

which gives the Renyi-alpha entanglement of any Schmidt-rank-2 pure state
from its concurrence ``x``, and of any two-qubit mixed state whenever the
curve is monotone and convex (alpha >= 1, and numerically down to ~0.83).

Numerics
--------
Everything is written in terms of the smaller Schmidt weight
``p = (1 - t)/2 = x**2 / (2 (1 + t))`` and the rapidity
``w = atanh(t) = log1p(t) - log(x)``, which are free of cancellation at both
ends of [0, 1].  With these, ``(1 + t)**b - (1 - t)**b = 2 x**b sinh(b w)``
and ``(1 + t)**b + (1 - t)**b = 2 x**b cosh(b w)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable

import mpmath
import numpy as np
from scipy.special import xlog1py, xlogy

from .concurrence import bipartition, concurrence_of_assistance, wootters_concurrence
from .entropy import LN2, AlphaParam, as_alpha, quantum_renyi_entropy
from .errors import ConjecturalAlphaError, ConjecturalAlphaWarning, DomainError
from .linalg import DensityMatrix, PureState, reduced_state

CONJECTURE_ALPHA_FLOOR = 0.83
DOMAIN_TOL = 1e-12


def _scalar_or_array(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def _clamp_unit(x, name="x", lo_open=False, hi_open=False) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < -DOMAIN_TOL) or np.any(x > 1 + DOMAIN_TOL):
        raise DomainError(f"{name} must lie in [0, 1]")
    x = np.clip(x, 0.0, 1.0)
    if lo_open and np.any(x <= 0.0):
        raise DomainError(f"{name} must be > 0")
    if hi_open and np.any(x >= 1.0):
        raise DomainError(f"{name} must be < 1")
    return x


def _t_and_p(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t = np.sqrt((1.0 - x) * (1.0 + x))
    return t, x * x / (2.0 * (1.0 + t))


def _rapidity(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log1p(t) - np.log(x)


def _sinh_over_cosh(b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``sinh(b) / cosh(c)`` for ``c >= 0`` without overflow."""
    ab = np.abs(b)
    with np.errstate(over="ignore", invalid="ignore"):
        r = np.sign(b) * np.exp(ab - c) * (-np.expm1(-2.0 * ab)) / (1.0 + np.exp(-2.0 * c))
    return np.where(b == 0.0, 0.0, r)


def _sech2(c: np.ndarray) -> np.ndarray:
    e = np.exp(-2.0 * c)
    return 4.0 * e / (1.0 + e) ** 2


def formation_curve(x):
    """``H((1 + sqrt(1 - x^2)) / 2)`` with the binary entropy ``H`` in bits (the alpha -> 1 limit)."""
    x = _clamp_unit(x)
    _, p = _t_and_p(x)
    return _scalar_or_array(-(xlogy(p, p) + xlog1py(1.0 - p, -p)) / LN2)


def f_alpha(x, alpha):
    """Concurrence-to-Renyi-entanglement curve; vectorized over ``x``."""
    a = as_alpha(alpha)
    x = _clamp_unit(x)
    if a.is_shannon:
        return formation_curve(x)
    al = a.alpha
    _, p = _t_and_p(x)
    # log(p**al + q**al) with q = 1 - p >= p factored out
    log_q = np.log1p(-p)
    with np.errstate(divide="ignore"):
        log_ratio = np.log(p) - log_q
    val = (al * log_q + np.log1p(np.exp(al * log_ratio))) / ((1.0 - al) * LN2)
    return _scalar_or_array(val)


def f_alpha_d1(x, alpha):
    """First derivative of ``f_alpha`` on ``0 < x <= 1``."""
    a = as_alpha(alpha)
    x = _clamp_unit(x, lo_open=True)
    t, _ = _t_and_p(x)
    w = _rapidity(x, t)
    at_one = t == 0.0
    ts = np.where(at_one, 1.0, t)
    if a.is_shannon:
        # limit alpha -> 1: x * atanh(t) / t
        val = np.where(at_one, 1.0, x * w / ts) / LN2
    else:
        al = a.alpha
        r1 = _sinh_over_cosh((al - 1.0) * w, al * w)
        val = np.where(at_one, al, al * r1 / ((al - 1.0) * ts)) / LN2
    return _scalar_or_array(val)


def f_alpha_d2(x, alpha):
    """Second derivative of ``f_alpha`` on ``0 < x < 1``.

    Uses the closed form of the second derivative of
    ``g(x) = -ln[(1 - t)**a + (1 + t)**a]``,

        g'' = B (A1^(a-1) - A2^(a-1)) (A1^a + A2^a) / t
              + B [x^2 (A1^(a-1) - A2^(a-1))^2 - 4 (a - 1) x^(2a - 2)],
        A1, A2 = 1 +- t,   B = a / (t^2 (A1^a + A2^a)^2),

    rewritten with the sinh/cosh identities, and ``f'' = g'' / ((a - 1) ln 2)``.
    Near alpha = 1 the derivative of the limit ``E'(x) = x atanh(t) / (t ln 2)``
    is used: ``E'' ln 2 = w/t - 1/t^2 + x^2 w / t^3``.
    """
    a = as_alpha(alpha)
    x = _clamp_unit(x, lo_open=True, hi_open=True)
    t, _ = _t_and_p(x)
    w = _rapidity(x, t)
    if a.is_shannon:
        return _scalar_or_array((w / t - 1.0 / (t * t) + x * x * w / t ** 3) / LN2)
    al = a.alpha
    r1 = _sinh_over_cosh((al - 1.0) * w, al * w)
    bracket = x * r1 / t + (x * r1) ** 2 - (al - 1.0) * _sech2(al * w)
    g2 = al * bracket / (t * t * x * x)
    return _scalar_or_array(g2 / ((al - 1.0) * LN2))


@dataclass(frozen=True)
class FAlphaEval:
    x: float
    alpha: AlphaParam
    value: float
    d1: float
    d2: float


def f_alpha_eval(x: float, alpha) -> FAlphaEval:
    """Value and first two derivatives of ``f_alpha`` at an interior point."""
    a = as_alpha(alpha)
    return FAlphaEval(float(x), a, f_alpha(x, a), f_alpha_d1(x, a), f_alpha_d2(x, a))


def _check_disk(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.isnan(x)) or np.any(np.isnan(y)):
        raise DomainError("h_alpha arguments must not be NaN")
    if np.any(x < -DOMAIN_TOL) or np.any(y < -DOMAIN_TOL):
        raise DomainError("h_alpha needs x, y >= 0")
    x = np.clip(x, 0.0, None)
    y = np.clip(y, 0.0, None)
    r = np.hypot(x, y)
    if np.any(r * r > 1.0 + DOMAIN_TOL):
        raise DomainError("h_alpha needs x^2 + y^2 <= 1")
    return np.minimum(x, 1.0), np.minimum(y, 1.0), np.minimum(r, 1.0)


def h_alpha(x, y, alpha):
    """``f(sqrt(x^2 + y^2)) - f(x) - f(y)`` on the quarter disk."""
    a = as_alpha(alpha)
    x, y, r = _check_disk(x, y)
    return _scalar_or_array(np.asarray(f_alpha(r, a)) - f_alpha(x, a) - f_alpha(y, a))


def _require_above_one(a: AlphaParam, name: str):
    if a.alpha <= 1.0:
        raise DomainError(f"{name} is defined here for alpha > 1, got {a.alpha}")


def l_alpha(x, alpha):
    """``(A1^(a-1) - A2^(a-1)) / (t (A1^a + A2^a))`` on ``0 < x <= 1``; equals ``a - 1`` at x = 1."""
    a = as_alpha(alpha)
    _require_above_one(a, "l_alpha")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("l_alpha needs x > 0")
    x = _clamp_unit(x)
    al = a.alpha
    t, _ = _t_and_p(x)
    w = _rapidity(x, t)
    at_one = t == 0.0
    ts = np.where(at_one, 1.0, t)
    r1 = _sinh_over_cosh((al - 1.0) * w, al * w)
    return _scalar_or_array(np.where(at_one, al - 1.0, r1 / (x * ts)))


def _log2_sum_pow(u, v, al):
    """``log2(u**al + v**al)`` for ``u >= v >= 0``, u > 0."""
    with np.errstate(divide="ignore"):
        return al * np.log2(u) + np.log1p(np.exp(al * (np.log(v) - np.log(u)))) / LN2


def m_alpha(x, alpha):
    """``h_alpha`` restricted to the arc ``x^2 + y^2 = 1``.

    ``1 - 2a/(a-1) + (log2[(1+x)^a + (1-x)^a] + log2[(1-t)^a + (1+t)^a]) / (a-1)``
    where the first log comes from ``f(sqrt(1 - x^2))``.
    """
    a = as_alpha(alpha)
    _require_above_one(a, "m_alpha")
    x = _clamp_unit(x)
    al = a.alpha
    t, _ = _t_and_p(x)
    one_minus_t = x * x / (1.0 + t)
    val = (
        1.0
        - 2.0 * al / (al - 1.0)
        + (_log2_sum_pow(1.0 + x, 1.0 - x, al) + _log2_sum_pow(1.0 + t, one_minus_t, al)) / (al - 1.0)
    )
    return _scalar_or_array(val)


# -- extended precision re-evaluation ---------------------------------------

def f_alpha_mp(x, alpha, dps: int = 50):
    """``f_alpha`` in mpmath arithmetic at ``dps`` decimal digits."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        al = mpmath.mpf(float(alpha))
        t = mpmath.sqrt(max(mpmath.mpf(0), 1 - x * x))
        if abs(al - 1) < mpmath.mpf(float(as_alpha(alpha).one_tolerance)):
            p = (1 - t) / 2
            ent = -(p * mpmath.log(p, 2) if p > 0 else 0) - (1 - p) * mpmath.log(1 - p, 2)
            return +ent
        s = ((1 - t) / 2) ** al + ((1 + t) / 2) ** al
        return mpmath.log(s, 2) / (1 - al)


def h_alpha_mp(x, y, alpha, dps: int = 50):
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        y = mpmath.mpf(y)
        r = min(mpmath.mpf(1), mpmath.sqrt(x * x + y * y))
        return f_alpha_mp(r, alpha, dps) - f_alpha_mp(x, alpha, dps) - f_alpha_mp(y, alpha, dps)


def f_alpha_d2_mp(x, alpha, dps: int = 50):
    """Second derivative of ``f_alpha`` from the A1/A2/B form, evaluated in mpmath."""
    a = as_alpha(alpha)
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        if a.is_shannon:
            d1 = lambda z: z * mpmath.atanh(mpmath.sqrt(1 - z * z)) / mpmath.sqrt(1 - z * z)
            return mpmath.diff(d1, x) / mpmath.log(2)
        al = mpmath.mpf(a.alpha)
        t = mpmath.sqrt(1 - x * x)
        a1, a2 = 1 + t, 1 - t
        s = a1 ** al + a2 ** al
        d = a1 ** (al - 1) - a2 ** (al - 1)
        b = al / ((1 - x * x) * s ** 2)
        g2 = b * d * s / t + b * (x * x * d ** 2 - 4 * (al - 1) * x ** (2 * al - 2))
        return g2 / ((al - 1) * mpmath.log(2))


# -- entanglement of states ---------------------------------------------------

def closed_form_status(alpha, floor: float = CONJECTURE_ALPHA_FLOOR) -> str:
    """``"proven"`` for alpha >= 1, ``"conjectural"`` down to ``floor``, ``"unsupported"`` below."""
    al = float(alpha)
    if al >= 1.0 - as_alpha(alpha).one_tolerance:
        return "proven"
    return "conjectural" if al >= floor else "unsupported"


def _guard_floor(alpha, floor: float, strict: bool):
    if closed_form_status(alpha, floor) == "unsupported":
        msg = f"alpha={float(alpha)} is below the conjecture floor {floor}; f_alpha(C) is not known to apply"
        if strict:
            raise ConjecturalAlphaError(msg)
        warnings.warn(msg, ConjecturalAlphaWarning, stacklevel=3)


def renyi_entanglement_pure(psi: PureState, partition: Iterable[int] | int, alpha) -> float:
    """Renyi-alpha entropy of the reduced state on the smaller side of the cut."""
    a, b = bipartition(partition, psi.n_qubits)
    keep = a if len(a) <= len(b) else b
    return quantum_renyi_entropy(reduced_state(psi, keep), alpha)


def renyi_entanglement_two_qubit(
    rho: DensityMatrix, alpha, floor: float = CONJECTURE_ALPHA_FLOOR, strict: bool = False
) -> float:
    """``f_alpha(C(rho))`` for a two-qubit state.

    Warns with ``ConjecturalAlphaWarning`` (or raises ``ConjecturalAlphaError``
    when ``strict``) for alpha below ``floor``.
    """
    _guard_floor(alpha, floor, strict)
    return f_alpha(wootters_concurrence(rho), alpha)


def reoa_lower_bound(
    rho: DensityMatrix, alpha, floor: float = CONJECTURE_ALPHA_FLOOR, strict: bool = False
) -> float:
    """``f_alpha(C^a(rho))``, a lower bound on the Renyi-alpha entanglement of assistance."""
    _guard_floor(alpha, floor, strict)
    return f_alpha(concurrence_of_assistance(rho), alpha)
