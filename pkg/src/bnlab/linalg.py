"""Dense linear algebra kernel and spectral functionals.

The singular value decomposition here is a one-sided Jacobi iteration:
columns of the (possibly transposed) matrix are rotated pairwise until all
mutual inner products fall below a relative threshold. For the small dense
matrices this library works with (up to a few hundred rows) Jacobi is simple,
deterministic and accurate down to the smallest singular values, which the
spectral functionals below (pseudo-determinant, pseudo-log, k-determinant,
Schatten powers) depend on.

Conventions:
  * matrices are 2-D float64 numpy arrays, row-major;
  * singular values are returned in descending order;
  * "rank" style cutoffs are relative (``tol * s1``) except for
    ``numerical_rank`` which applies an absolute threshold with strict
    inequality, matching how trained-weight spectra are usually cut.

All functions are pure: inputs are never mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError

DEFAULT_RANK_TOL = 1e-10

_JACOBI_TOL = 1e-14
_MAX_SWEEPS = 60


def as_matrix(a) -> np.ndarray:
    """Validate and convert input to a finite 2-D float64 array."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(1, -1) if m.size else m.reshape(0, 0)
    if m.ndim != 2:
        raise InputError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


@dataclass
class SvdResult:
    """Thin SVD ``a = u @ diag(s) @ v.T``.

    ``u`` and ``v`` carry orthonormal columns, ``s`` is descending and
    non-negative with ``len(s) == min(a.shape)``.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.T


def _complete_orthonormal(u: np.ndarray, cols: list[int]) -> None:
    """Fill the listed (zero) columns of ``u`` with an orthonormal complement.

    Deterministic: walks the standard basis in index order and Gram-Schmidts
    against everything accepted so far.
    """
    n = u.shape[0]
    filled = [j for j in range(u.shape[1]) if j not in cols]
    basis = [u[:, j].copy() for j in filled]
    need = iter(cols)
    target = next(need, None)
    for i in range(n):
        if target is None:
            return
        cand = np.zeros(n)
        cand[i] = 1.0
        for b in basis:
            cand -= (b @ cand) * b
        norm = math.sqrt(cand @ cand)
        if norm > 0.5:
            cand /= norm
            u[:, target] = cand
            basis.append(cand)
            target = next(need, None)
    if target is not None:
        raise ConvergenceError("failed to complete orthonormal basis")


def svd(a) -> SvdResult:
    """One-sided Jacobi SVD.

    Rotations are applied to column pairs of the matrix (or its transpose when
    that side is smaller) until every pairwise inner product is below
    ``1e-14`` relative to the column norms.
    """
    m = as_matrix(a)
    if m.size == 0:
        raise InputError("cannot decompose an empty matrix")
    transposed = m.shape[0] < m.shape[1]
    b = (m.T if transposed else m).copy()
    n, k = b.shape
    v = np.eye(k)

    # Prescale to unit max entry so squared norms neither overflow nor
    # underflow for reasonably scaled inputs.
    scale = float(np.abs(b).max())
    if scale > 0.0:
        b /= scale
    else:
        scale = 1.0

    # Columns this far below the matrix norm are numerical noise left over
    # from cancellation; freeze them at exactly zero so the sweep terminates.
    floor2 = float(np.sum(b * b)) * 1e-36

    converged = False
    for _ in range(_MAX_SWEEPS):
        rotated = False
        for i in range(k - 1):
            for j in range(i + 1, k):
                bi = b[:, i]
                bj = b[:, j]
                alpha = bi @ bi
                beta = bj @ bj
                if alpha <= floor2 and np.any(bi):
                    b[:, i] = 0.0
                    alpha = 0.0
                if beta <= floor2 and np.any(bj):
                    b[:, j] = 0.0
                    beta = 0.0
                gamma = bi @ bj
                if gamma == 0.0 or abs(gamma) <= _JACOBI_TOL * math.sqrt(alpha) * math.sqrt(beta):
                    continue
                diff = beta - alpha
                if abs(diff) < 2.0 * abs(gamma) * 1e150:
                    zeta = diff / (2.0 * gamma)
                    t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                else:
                    # limit of the rotation formula as |zeta| -> inf
                    t = gamma / diff
                c = 1.0 / math.hypot(1.0, t)
                s = c * t
                new_i = c * bi - s * bj
                new_j = s * bi + c * bj
                b[:, i] = new_i
                b[:, j] = new_j
                vi = v[:, i].copy()
                vj = v[:, j].copy()
                v[:, i] = c * vi - s * vj
                v[:, j] = s * vi + c * vj
                rotated = True
        if not rotated:
            converged = True
            break
    if not converged:
        raise ConvergenceError(f"Jacobi SVD did not converge in {_MAX_SWEEPS} sweeps")

    raw = np.sqrt(np.einsum("ij,ij->j", b, b))
    order = np.argsort(-raw, kind="stable")
    raw = raw[order]
    sigma = raw * scale
    b = b[:, order]
    v = v[:, order]

    u = np.zeros_like(b)
    zero_cols = []
    for j in range(k):
        if raw[j] > 0.0:
            u[:, j] = b[:, j] / raw[j]
        else:
            zero_cols.append(j)
    if zero_cols:
        _complete_orthonormal(u, zero_cols)

    # Deterministic sign convention: largest-magnitude entry of each left
    # vector is positive (paired flip keeps the product unchanged).
    for j in range(k):
        idx = int(np.argmax(np.abs(u[:, j])))
        if u[idx, j] < 0.0:
            u[:, j] = -u[:, j]
            v[:, j] = -v[:, j]

    if transposed:
        u, v = v, u
    return SvdResult(u=u, s=sigma, v=v)


def singular_values(a) -> np.ndarray:
    return svd(a).s


def pseudo_det(a, tol: float = DEFAULT_RANK_TOL) -> float:
    """Product of the singular values above ``tol * s1``.

    The empty product (zero matrix, or everything below the cut) is 1, so
    that its log vanishes.
    """
    if tol < 0:
        raise InputError("tol must be >= 0")
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 1.0
    kept = s[s > tol * s[0]]
    return float(np.prod(kept)) if kept.size else 1.0


def rank_rel(a, tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above ``tol * s1`` (relative cutoff)."""
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def pseudo_log_gram(a, tol: float = DEFAULT_RANK_TOL) -> tuple[np.ndarray, float]:
    """Matrix log of the Gram ``a.T @ a`` on its positive eigenspace.

    Non-zero eigenvalues ``s_i**2`` are replaced by ``2*log(s_i)``, zero ones
    stay zero. Returns the matrix together with its squared Frobenius norm.
    """
    if tol < 0:
        raise InputError("tol must be >= 0")
    res = svd(a)
    s = res.s
    logs = np.zeros_like(s)
    if s.size and s[0] > 0.0:
        keep = s > tol * s[0]
        logs[keep] = 2.0 * np.log(s[keep])
    mat = (res.v * logs) @ res.v.T
    return mat, float(np.sum(logs**2))


def k_det(a, k: int) -> float:
    """Product of the ``k`` largest singular values."""
    m = as_matrix(a)
    if k < 0 or k > min(m.shape):
        raise InputError(f"k={k} out of range for shape {m.shape}")
    if k == 0:
        return 1.0
    s = singular_values(m)
    return float(np.prod(s[:k]))


def schatten_pow(a, p: float, tol: float = DEFAULT_RANK_TOL) -> float:
    """Sum of ``s_i**p`` over the singular values above ``tol * s1``.

    ``p`` must be positive. The relative cutoff keeps numerically-zero
    singular values from polluting small powers.
    """
    if p <= 0:
        raise InputError("p must be > 0")
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 0.0
    kept = s[s > tol * s[0]]
    return float(np.sum(kept**p))


def numerical_rank(a, threshold: float) -> int:
    """Count of singular values strictly above an absolute threshold."""
    if threshold <= 0:
        raise InputError("threshold must be > 0")
    m = as_matrix(a)
    if m.size == 0:
        return 0
    s = singular_values(m)
    return int(np.sum(s > threshold))


def nearest_partial_isometry(a, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Top-``k`` singular vector blocks ``(U_k, V_k)``.

    ``U_k @ V_k.T`` is the closest rank-``k`` partial isometry when the k-th
    singular value is positive; ties between equal singular values are broken
    by the deterministic ordering of the SVD (arbitrary among optima).
    """
    m = as_matrix(a)
    if k < 0 or k > min(m.shape):
        raise InputError(f"k={k} out of range for shape {m.shape}")
    res = svd(m)
    return res.u[:, :k].copy(), res.v[:, :k].copy()


def pinv(a, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with relative cutoff ``tol * s1``."""
    if tol < 0:
        raise InputError("tol must be >= 0")
    res = svd(a)
    s = res.s
    inv = np.zeros_like(s)
    if s.size and s[0] > 0.0:
        keep = s > tol * s[0]
        inv[keep] = 1.0 / s[keep]
    return (res.v * inv) @ res.u.T
