"""Grid scans and bisection searches for the sign structure of ``f_alpha''`` and ``h_alpha``.

A scan reduces a function over a fixed grid to its extremum and a verdict.
Candidate violations found in double precision are re-evaluated with mpmath
before the verdict is taken, so a cancellation artifact cannot produce a
spurious violation.  Threshold searches bisect on the boolean verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .entropy import as_alpha
from .errors import BracketError, NonMonotoneTransitionError
from .renyi_ent import f_alpha_d2, f_alpha_d2_mp, h_alpha, h_alpha_mp

SCAN_TOL = 1e-12
N_RECHECK = 8
COARSE_POINTS = 9

HOLDS = "holds"
VIOLATED = "violated"


@dataclass(frozen=True)
class SweepResult:
    """Extremum of a scan; ``extremal_location`` is ``(x,)`` or ``(x, y)``."""

    kind: str
    alpha: float
    grid_spec: dict
    extremal_value: float
    extremal_location: tuple
    verdict: str
    tolerance: float = SCAN_TOL
    rechecked: bool = False

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS


@dataclass(frozen=True)
class ThresholdResult:
    """Final bracket ``[lo, hi]`` of a bisection; ``history`` holds every bracket visited."""

    kind: str
    lo: float
    hi: float
    iters: int
    coarse: tuple
    history: tuple = field(repr=False)

    @property
    def width(self) -> float:
        return self.hi - self.lo


# -- grids --------------------------------------------------------------------

def convexity_grid(x_grid: int) -> np.ndarray:
    """Uniform points in (0, 1) plus ``1 - x`` log-spaced from 1e-1 down to 1e-8."""
    if x_grid < 100:
        raise ValueError("x_grid must be at least 100")
    uniform = np.linspace(0.0, 1.0, x_grid + 2)[1:-1]
    near_one = 1.0 - np.logspace(-8, -1, x_grid)
    return np.unique(np.concatenate([uniform, near_one]))


def polar_grid(radial: int, angular: int) -> tuple[np.ndarray, np.ndarray]:
    """``(C, t)`` pairs sorted lexicographically.

    ``C`` takes ``radial`` uniform values in (0, 1] and ``radial`` log-spaced
    values in [1e-6, 0.1]; ``t`` takes ``angular`` values strictly inside (0, pi/2).
    """
    if radial < 100 or angular < 100:
        raise ValueError("polar grids need at least 100 x 100 points")
    c = np.unique(np.concatenate([np.arange(1, radial + 1) / radial, np.logspace(-6, -1, radial)]))
    t = np.arange(1, angular + 1) * (np.pi / 2) / (angular + 1)
    cc, tt = np.meshgrid(c, t, indexing="ij")
    return cc.ravel(), tt.ravel()


# -- scans --------------------------------------------------------------------

def _candidates(values: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` smallest values, ties resolved toward the lower index."""
    k = min(k, values.size)
    return np.argsort(values, kind="stable")[:k]


def convexity_scan(alpha, x_grid: int = 10_000, tol: float = SCAN_TOL) -> SweepResult:
    """Minimum of ``f_alpha''`` over (0, 1); holds iff the minimum is ``>= -tol``."""
    a = as_alpha(alpha)
    x = convexity_grid(x_grid)
    d2 = np.asarray(f_alpha_d2(x, a), dtype=float)
    spec = {"x_uniform": x_grid, "x_log_near_one": x_grid, "one_minus_x_min": 1e-8, "points": int(x.size)}
    idx = _candidates(d2, N_RECHECK)
    value, loc, rechecked = float(d2[idx[0]]), (float(x[idx[0]]),), False
    if value < -tol:
        exact = [float(f_alpha_d2_mp(x[i], a)) for i in idx]
        j = int(np.argmin(exact))
        value, loc, rechecked = exact[j], (float(x[idx[j]]),), True
    verdict = HOLDS if value >= -tol else VIOLATED
    return SweepResult("convexity", a.alpha, spec, value, loc, verdict, tol, rechecked)


def _h_scan(kind: str, alpha, radial: int, angular: int, tol: float, sign: float) -> SweepResult:
    # sign = +1 looks for the minimum (nonnegativity), -1 for the maximum (nonpositivity)
    a = as_alpha(alpha)
    c, t = polar_grid(radial, angular)
    x, y = c * np.cos(t), c * np.sin(t)
    h = sign * np.asarray(h_alpha(x, y, a), dtype=float)
    spec = {"C_uniform": radial, "C_log": radial, "C_log_range": [1e-6, 0.1], "t": angular, "points": int(c.size)}
    idx = _candidates(h, N_RECHECK)
    value, i0, rechecked = float(h[idx[0]]), int(idx[0]), False
    if value < -tol:
        exact = [sign * float(h_alpha_mp(x[i], y[i], a)) for i in idx]
        j = int(np.argmin(exact))
        value, i0, rechecked = exact[j], int(idx[j]), True
    verdict = HOLDS if value >= -tol else VIOLATED
    loc = (float(x[i0]), float(y[i0]))
    return SweepResult(kind, a.alpha, spec, sign * value, loc, verdict, tol, rechecked)


def h_nonneg_scan(alpha, radial: int = 200, angular: int = 200, tol: float = SCAN_TOL) -> SweepResult:
    """Minimum of ``h_alpha`` over the polar grid; holds iff ``>= -tol``."""
    return _h_scan("h_nonneg", alpha, radial, angular, tol, 1.0)


def h_sign_scan(alpha, radial: int = 200, angular: int = 200, tol: float = SCAN_TOL) -> SweepResult:
    """Maximum of ``h_alpha`` over the polar grid; holds iff ``<= tol``."""
    return _h_scan("h_sign", alpha, radial, angular, tol, -1.0)


# -- threshold searches -------------------------------------------------------

def _bisect(kind: str, scan, lo: float, hi: float, iters: int, lo_verdict: str) -> ThresholdResult:
    """Bisect for the point where ``scan(alpha).verdict`` leaves ``lo_verdict``."""
    if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo < hi):
        raise BracketError(f"need 0 < lo < hi, got lo={lo}, hi={hi}")
    if iters < 1:
        raise BracketError("iters must be positive")
    hi_verdict = HOLDS if lo_verdict == VIOLATED else VIOLATED

    coarse_alpha = np.linspace(lo, hi, COARSE_POINTS)
    coarse = tuple((float(al), scan(al).verdict) for al in coarse_alpha)
    if coarse[0][1] != lo_verdict or coarse[-1][1] != hi_verdict:
        raise BracketError(
            f"{kind}: expected {lo_verdict} at lo={lo} and {hi_verdict} at hi={hi}, "
            f"got {coarse[0][1]} and {coarse[-1][1]}"
        )
    flips = [i for i in range(1, len(coarse)) if coarse[i][1] != coarse[i - 1][1]]
    if len(flips) != 1:
        raise NonMonotoneTransitionError(f"{kind}: verdict changes {len(flips)} times on the coarse grid {coarse}")

    a, b = coarse[flips[0] - 1][0], coarse[flips[0]][0]
    history = [(lo, hi), (a, b)]
    target = (hi - lo) / 2 ** iters
    while b - a > target:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if scan(mid).verdict == lo_verdict:
            a = mid
        else:
            b = mid
        history.append((a, b))
    return ThresholdResult(kind, float(a), float(b), iters, coarse, tuple(history))


def convexity_threshold(lo: float = 0.5, hi: float = 2.0, iters: int = 20, x_grid: int = 10_000,
                        tol: float = SCAN_TOL) -> ThresholdResult:
    """Smallest alpha from which ``f_alpha`` is convex on the scan grid.

    ``lo`` must scan as violated and ``hi`` as holding.  The final bracket has
    width at most ``(hi - lo) / 2**iters``.
    """
    return _bisect("convexity", lambda al: convexity_scan(al, x_grid, tol), lo, hi, iters, VIOLATED)


def polygamy_threshold(lo: float = 1.0, hi: float = 2.0, iters: int = 20, radial: int = 200,
                       angular: int = 200, tol: float = SCAN_TOL) -> ThresholdResult:
    """Largest alpha up to which ``h_alpha <= 0`` on the scan grid.

    ``lo`` must scan as holding and ``hi`` as violated.
    """
    return _bisect("polygamy", lambda al: h_sign_scan(al, radial, angular, tol), lo, hi, iters, HOLDS)


def monogamy_threshold(lo: float = 1.9, hi: float = 2.0, iters: int = 10, radial: int = 200,
                       angular: int = 200, tol: float = SCAN_TOL) -> ThresholdResult:
    """Transition of the ``h_alpha >= -tol`` verdict between ``lo`` (violated) and ``hi`` (holds).

    Below alpha = 2 the negative values of ``h_alpha`` shrink rapidly toward the
    origin, so the bracket found here depends on ``tol`` and the radial floor
    of the grid rather than locating where ``h_alpha`` first goes negative.
    """
    return _bisect("monogamy", lambda al: h_nonneg_scan(al, radial, angular, tol), lo, hi, iters, VIOLATED)
