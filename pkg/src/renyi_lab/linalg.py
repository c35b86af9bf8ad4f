"""Small dense complex linear algebra for qubit registers.

Conventions
-----------
Multi-qubit amplitudes are stored in binary order: basis index
``i = sum_k q_k * 2**k`` so qubit 0 is the least significant bit.  The same
holds for density matrices: subsystem ``k`` of ``dims`` is the ``k``-th least
significant tensor factor, i.e. ``matrix == kron(rho_{n-1}, ..., rho_0)`` for a
product state.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidStateError

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
EIG_INPUT_TOL = 1e-10
SQRT_NEGATIVE_TOL = 1e-8

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

# Eigenvalues of a PSD matrix below this fraction of its norm are round-off
# of exact zeros; keeping them puts ~sqrt(eps) noise into square roots.
_SQRT_ZERO_REL = 64 * np.finfo(float).eps


def _as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector of ``n_qubits`` qubits."""

    amplitudes: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        d = amps.size
        n = d.bit_length() - 1
        if d < 2 or (1 << n) != d:
            raise InvalidStateError(f"amplitude vector length {d} is not 2**n with n >= 1")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state is not normalized: <psi|psi> = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise InvalidStateError("cannot normalize the zero vector")
        return cls(amps / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density_matrix(self) -> "DensityMatrix":
        psi = self.amplitudes
        return DensityMatrix(np.outer(psi, psi.conj()), [2] * self.n_qubits, validate=False)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    ``dims`` lists subsystem dimensions (least significant first) and defaults
    to qubits.  Pass ``validate=False`` only for matrices produced by
    operations that preserve validity.
    """

    matrix: np.ndarray
    dims: tuple = None
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        m = _as_matrix(self.matrix).copy()
        if m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got {m.shape}")
        dims = self.dims
        if dims is None:
            n = m.shape[0].bit_length() - 1
            if (1 << n) != m.shape[0]:
                raise InvalidStateError("dims must be given for non-qubit dimensions")
            dims = (2,) * n if n else (1,)
        dims = tuple(int(d) for d in dims)
        if any(d < 1 for d in dims) or math.prod(dims) != m.shape[0]:
            raise InvalidStateError(f"dims {dims} do not match matrix size {m.shape[0]}")
        if validate:
            herm_err = float(np.max(np.abs(m - m.conj().T)))
            if herm_err > HERMITIAN_TOL:
                raise InvalidStateError(f"matrix is not Hermitian (max deviation {herm_err:.3g})")
            tr = complex(np.trace(m))
            if abs(tr - 1.0) > TRACE_TOL:
                raise InvalidStateError(f"trace is {tr}, expected 1")
            lam_min = herm_eig(m)[0][-1]
            if lam_min < -PSD_TOL:
                raise InvalidStateError(f"matrix has negative eigenvalue {lam_min:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def kron(a, b) -> np.ndarray:
    """Tensor product with ``a`` as the more significant factor."""
    return np.kron(_as_matrix(a), _as_matrix(b))


def _normalize_keep(keep: Iterable[int], n_sub: int) -> list[int]:
    if isinstance(keep, (int, np.integer)):
        keep = [keep]
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    bad = [k for k in keep if not 0 <= k < n_sub]
    if bad:
        raise ValueError(f"subsystem indices {bad} out of range for {n_sub} subsystems")
    return keep


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduce ``rho`` onto the subsystems listed in ``keep``.

    The kept subsystems retain their relative order.
    """
    dims = rho.dims
    n = len(dims)
    keep = _normalize_keep(keep, n)
    # numpy axis j holds subsystem n-1-j
    rev = dims[::-1]
    t = rho.matrix.reshape(rev + rev)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    out_row, out_col = [], []
    for j in range(n):
        sub = n - 1 - j
        if sub in keep:
            out_row.append(row[j])
            out_col.append(col[j])
        else:
            col[j] = row[j]
    expr = "".join(row) + "".join(col) + "->" + "".join(out_row) + "".join(out_col)
    kept_dims = tuple(dims[k] for k in keep)
    d = math.prod(kept_dims)
    red = np.einsum(expr, t).reshape(d, d)
    return DensityMatrix(red, kept_dims, validate=False)


def reduced_state(psi: PureState, keep) -> DensityMatrix:
    """Reduced density matrix of a pure state, without forming ``|psi><psi|``."""
    n = psi.n_qubits
    keep = _normalize_keep(keep, n)
    t = psi.amplitudes.reshape((2,) * n)
    keep_axes = [n - 1 - k for k in reversed(keep)]
    rest_axes = [j for j in range(n) if j not in keep_axes]
    m = np.transpose(t, keep_axes + rest_axes).reshape(1 << len(keep), -1)
    return DensityMatrix(m @ m.conj().T, (2,) * len(keep), validate=False)


def herm_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns
    -------
    eigenvalues : ndarray of float, sorted in descending order
    eigenvectors : ndarray, column ``k`` belongs to ``eigenvalues[k]``
    """
    m = _as_matrix(h)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"herm_eig needs a square matrix, got {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > EIG_INPUT_TOL:
        raise ValueError("herm_eig needs a Hermitian matrix")
    n = m.shape[0]
    # Python scalars beat numpy call overhead at n <= 16.
    a = [[complex(z) for z in row] for row in m.tolist()]
    for i in range(n):
        a[i][i] = complex(a[i][i].real)
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    scale = max(1.0, float(np.linalg.norm(m)))
    threshold = JACOBI_TOL * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq.conjugate() / r
                tau = (a[q][q].real - a[p][p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                cp = c * phase
                for row in a:
                    x, y = row[p], row[q]
                    row[p] = c * x - sp * y
                    row[q] = s * x + cp * y
                spc, cpc = sp.conjugate(), cp.conjugate()
                ap, aq = a[p], a[q]
                a[p] = [c * x - spc * y for x, y in zip(ap, aq)]
                a[q] = [s * x + cpc * y for x, y in zip(ap, aq)]
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = c * x - sp * y
                    row[q] = s * x + cp * y
    w = np.array([a[i][i].real for i in range(n)])
    order = np.argsort(-w, kind="stable")
    return w[order], np.array(v, dtype=complex)[:, order]


def psd_sqrt(rho) -> np.ndarray:
    """Positive square root of a PSD matrix (a ``DensityMatrix`` or array)."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else _as_matrix(rho)
    w, v = herm_eig(m)
    if w[-1] < -SQRT_NEGATIVE_TOL:
        raise InvalidStateError(f"matrix has significantly negative eigenvalue {w[-1]:.3g}")
    cutoff = _SQRT_ZERO_REL * max(1.0, abs(w[0]))
    root = np.sqrt(np.where(w > cutoff, w, 0.0))
    s = (v * root) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def singular_values(a) -> np.ndarray:
    """Singular values, descending, via the Hermitian dilation ``[[0, A], [A^H, 0]]``.

    Small singular values come out with absolute accuracy ~eps*||A||, unlike
    square roots of eigenvalues of ``A^H A``.
    """
    m = _as_matrix(a)
    r, c = m.shape
    dil = np.zeros((r + c, r + c), dtype=complex)
    dil[:r, r:] = m
    dil[r:, :r] = m.conj().T
    w, _ = herm_eig(dil)
    return np.clip(w[: min(r, c)], 0.0, None)


def haar_random_pure(n_qubits: int, seed) -> PureState:
    """Haar-random pure state from a normalized complex Gaussian vector.

    ``seed`` is anything ``numpy.random.default_rng`` accepts, typically an
    int or a ``(run_seed, sample_index)`` pair.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    rng = np.random.default_rng(seed)
    d = 1 << n_qubits
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(z / np.linalg.norm(z))


def random_unitary(dim: int, seed) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def validate_isometry(u, tol: float = 1e-9) -> np.ndarray:
    u = _as_matrix(u)
    gram = u.conj().T @ u
    if np.max(np.abs(gram - np.eye(u.shape[1]))) > tol:
        raise ValueError("columns are not orthonormal")
    return u


def subsystem_complement(part: Sequence[int], n: int) -> list[int]:
    return [k for k in range(n) if k not in set(part)]
