"""Dense linear algebra used by the operator algebra.

Vectors and matrices are plain ``float64`` numpy arrays. The symmetric
eigensolver (cyclic Jacobi) and the Cholesky factorization are written here
rather than delegated, so every spectral bound the solver certifies comes from
one small, auditable code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEFAULT_RANK_TOL = 1e-10
SYM_TOL = 1e-12


class LinalgError(ValueError):
    """Raised on dimension, symmetry or definiteness violations."""


class FactorizationError(LinalgError):
    def __init__(self, pivot: int, value: float):
        super().__init__(f"matrix is not positive definite: pivot {pivot} is {value!r}")
        self.pivot = pivot
        self.value = value


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    min_nonzero: float | None = None
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0])


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size == 0:
        raise LinalgError(f"expected a nonempty vector, got shape {v.shape}")
    return v


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise LinalgError(f"expected a matrix, got shape {m.shape}")
    return m


def is_symmetric(S: np.ndarray, tol: float = SYM_TOL) -> bool:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(S)))) if S.size else 1.0
    return bool(np.max(np.abs(S - S.T), initial=0.0) <= tol * scale)


def check_symmetric(S) -> np.ndarray:
    S = as_matrix(S)
    if S.shape[0] != S.shape[1]:
        raise LinalgError(f"matrix must be square, got {S.shape}")
    if not is_symmetric(S):
        raise LinalgError("matrix is not symmetric")
    return S


def jacobi_eigh(S, tol: float = 1e-15, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns ``(w, V)`` with ``w`` ascending and ``S = V diag(w) V^T``.
    """
    S = check_symmetric(S)
    n = S.shape[0]
    a = 0.5 * (S + S.T)
    V = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), V
    scale = math.sqrt(float(np.sum(a * a)))
    if scale == 0.0:
        return np.zeros(n), V
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) <= 1e-18 * scale:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # a <- J^T a J, with J the rotation in the (p, q) plane
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise LinalgError("Jacobi iteration did not converge")
    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def sym_eigs(S, rank_tol: float = DEFAULT_RANK_TOL, vectors: bool = False) -> SpectralSummary:
    """Eigenvalues of a symmetric matrix, ascending.

    ``min_nonzero`` is the smallest eigenvalue exceeding
    ``rank_tol * max(|lambda|)``, or ``None`` if there is none.
    """
    w, V = jacobi_eigh(S)
    top = float(np.max(np.abs(w)))
    above = w[w > rank_tol * top] if top > 0 else w[:0]
    mnz = float(above[0]) if above.size else None
    return SpectralSummary(w, mnz, V if vectors else None)


def eig_max(S) -> float:
    return sym_eigs(S).max


def eig_min(S) -> float:
    return sym_eigs(S).min


def min_nonzero_eig(S, rank_tol: float = DEFAULT_RANK_TOL) -> float:
    if rank_tol <= 0:
        raise LinalgError("rank_tol must be positive")
    summary = sym_eigs(S, rank_tol)
    if summary.min_nonzero is None:
        raise LinalgError("no nonzero eigenvalue")
    return summary.min_nonzero


def cholesky(S) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == S``.

    Raises
    ------
    FactorizationError
        If a pivot is not strictly positive; the failing index is attached.
    """
    S = check_symmetric(S)
    n = S.shape[0]
    L = np.zeros_like(S)
    for j in range(n):
        d = S[j, j] - L[j, :j] @ L[j, :j]
        if not d > 0.0:
            raise FactorizationError(j, float(d))
        L[j, j] = math.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (S[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def is_positive_definite(S) -> bool:
    try:
        cholesky(S)
    except LinalgError:
        return False
    return True


def solve_lower(L: np.ndarray, B) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    X = np.zeros_like(B)
    for i in range(L.shape[0]):
        X[i] = (B[i] - L[i, :i] @ X[:i]) / L[i, i]
    return X


def solve_upper(U: np.ndarray, B) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    X = np.zeros_like(B)
    for i in range(U.shape[0] - 1, -1, -1):
        X[i] = (B[i] - U[i, i + 1:] @ X[i + 1:]) / U[i, i]
    return X


def cho_solve(L: np.ndarray, B) -> np.ndarray:
    return solve_upper(L.T, solve_lower(L, B))


def spd_inverse(S) -> np.ndarray:
    L = cholesky(S)
    inv = cho_solve(L, np.eye(L.shape[0]))
    return 0.5 * (inv + inv.T)


def weighted_norm_sq(v, Mw) -> float:
    """``<v, Mw v>``; negative values are returned as-is for indefinite ``Mw``."""
    v = np.asarray(v, dtype=float)
    Mw = as_matrix(Mw)
    if Mw.shape[0] != Mw.shape[1] or Mw.shape[1] != v.shape[0]:
        raise LinalgError(f"dimension mismatch: {Mw.shape} vs {v.shape}")
    # matrix-valued v (n x p) is weighted column by column
    return float(np.sum(v * (Mw @ v)))


def gen_eig_max(Mnum, Mden) -> float:
    """Largest ``mu`` with ``Mnum v = mu Mden v`` for PD ``Mden``."""
    Mnum = check_symmetric(Mnum)
    Mden = check_symmetric(Mden)
    if Mnum.shape != Mden.shape:
        raise LinalgError(f"dimension mismatch: {Mnum.shape} vs {Mden.shape}")
    L = cholesky(Mden)
    B = solve_lower(L, solve_lower(L, Mnum).T)
    B = 0.5 * (B + B.T)
    return max(eig_max(B), 0.0)


def sym_pinv(S, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a symmetric PSD matrix."""
    summary = sym_eigs(S, rank_tol, vectors=True)
    w, V = summary.eigenvalues, summary.eigenvectors
    top = float(np.max(np.abs(w)))
    inv = np.array([1.0 / x if x > rank_tol * top else 0.0 for x in w])
    return (V * inv) @ V.T


def sym_sqrt_factor(S, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """``A`` with ``A @ A.T == S`` for symmetric PSD ``S`` (eigenvalue square root)."""
    summary = sym_eigs(S, rank_tol, vectors=True)
    w = np.clip(summary.eigenvalues, 0.0, None)
    top = float(np.max(w)) if w.size else 0.0
    w = np.where(w > rank_tol * top, w, 0.0)
    return summary.eigenvectors * np.sqrt(w)


def format_matrix(M) -> str:
    M = as_matrix(M)
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    for row in M:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    tokens = text.split()
    if len(tokens) < 2:
        raise LinalgError("matrix text needs a 'rows cols' header")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
        values = [float(t) for t in tokens[2:]]
    except ValueError as exc:
        raise LinalgError(f"malformed matrix text: {exc}") from None
    if rows < 1 or cols < 1 or len(values) != rows * cols:
        raise LinalgError(f"expected {rows}x{cols} entries, found {len(values)}")
    return np.array(values, dtype=float).reshape(rows, cols)


def write_matrix(path, M) -> None:
    Path(path).write_text(format_matrix(M))


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())
