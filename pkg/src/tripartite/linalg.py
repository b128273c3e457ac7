"""Small dense complex linear algebra.

Everything here works on numpy arrays and accepts a stack of matrices
(leading batch axes), so the Monte-Carlo drivers can push 10^5 reduced
density matrices through one call. Matrices are at most 8x8.

The Hermitian eigensolver is a cyclic complex Jacobi iteration. Each
``(p, q)`` rotation is applied to the whole stack at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import BadDimension, NoConvergence, NonHermitian, NotPsd

MAX_DIM = 8
MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-14
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-12
# Eigenvalues below CLAMP_REL * (largest eigenvalue) are treated as exact
# zeros by psd_sqrt and the concurrence route; roundoff noise sits near 1e-16.
CLAMP_REL = 1e-14
# stack slices processed per Jacobi pass; keeps the working set in cache
CHUNK = 4096


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues (descending) and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues[..., None, :]) @ np.swapaxes(v, -1, -2).conj()


def _as_square_stack(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise BadDimension(f"expected square matrices, got shape {a.shape}")
    if a.shape[-1] > MAX_DIM:
        raise BadDimension(f"dimension {a.shape[-1]} exceeds {MAX_DIM}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.asarray(m), -1, -2).conj()


def frobenius(m: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(m) ** 2, axis=(-2, -1)))


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    off = ~np.eye(a.shape[-1], dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., off]) ** 2, axis=-1))


def _jacobi(a: np.ndarray, want_vectors: bool):
    """Diagonalize a flat stack ``a`` of shape (n, d, d) in place."""
    if a.shape[0] > CHUNK:
        parts = [_jacobi(a[i:i + CHUNK], want_vectors) for i in range(0, a.shape[0], CHUNK)]
        w = np.concatenate([p[0] for p in parts])
        v = np.concatenate([p[1] for p in parts]) if want_vectors else None
        return w, v
    n, d, _ = a.shape
    v = np.broadcast_to(np.eye(d, dtype=complex), a.shape).copy() if want_vectors else None
    scale = frobenius(a)
    target = OFFDIAG_TOL * scale
    skip = np.maximum(1e-6 * OFFDIAG_TOL * scale, 1e-290)
    pairs = list(combinations(range(d), 2))
    for _ in range(MAX_SWEEPS):
        if np.all(_offdiag_norm(a) <= target):
            break
        for p, q in pairs:
            h = a[:, p, q]
            r = np.abs(h)
            # rotations far below the convergence target are skipped
            active = r > skip
            if not active.any():
                continue
            r_safe = np.where(active, r, 1.0)
            phase = np.where(active, h / r_safe, 1.0)
            app = a[:, p, p].real
            aqq = a[:, q, q].real
            zeta = (aqq - app) / (2.0 * r_safe)
            sign = np.where(zeta >= 0.0, 1.0, -1.0)
            t = sign / (np.abs(zeta) + np.hypot(1.0, zeta))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            ph_c = phase.conj()
            # columns: A <- A G with G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
            col_p = a[:, :, p].copy()
            col_q = a[:, :, q]
            a[:, :, p] = c[:, None] * col_p - (s * ph_c)[:, None] * col_q
            a[:, :, q] = s[:, None] * col_p + (c * ph_c)[:, None] * col_q
            # rows: A <- G^dagger A
            row_p = a[:, p, :].copy()
            row_q = a[:, q, :]
            a[:, p, :] = c[:, None] * row_p - (s * phase)[:, None] * row_q
            a[:, q, :] = s[:, None] * row_p + (c * phase)[:, None] * row_q
            a[:, p, q] = 0.0
            a[:, q, p] = 0.0
            a[:, p, p] = a[:, p, p].real
            a[:, q, q] = a[:, q, q].real
            if want_vectors:
                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = c[:, None] * vp - (s * ph_c)[:, None] * vq
                v[:, :, q] = s[:, None] * vp + (c * ph_c)[:, None] * vq
    else:
        if not np.all(_offdiag_norm(a) <= target):
            raise NoConvergence(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    return np.diagonal(a, axis1=-2, axis2=-1).real.copy(), v


def _check_hermitian(a: np.ndarray) -> None:
    asym = frobenius(a - dagger(a))
    if np.any(asym > HERMITIAN_TOL * np.maximum(frobenius(a), np.finfo(float).tiny)):
        raise NonHermitian("matrix is not Hermitian within tolerance")


def eig_hermitian(m) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix or a stack of them.

    Eigenvalues come back sorted in descending order, with eigenvectors
    as the columns of ``eigenvectors``.

    Raises
    ------
    NonHermitian
        If ``||M - M^dagger|| > 1e-10 ||M||``.
    NoConvergence
        If the off-diagonal mass is still above ``1e-14 ||M||`` after
        100 sweeps.
    """
    a = _as_square_stack(m)
    _check_hermitian(a)
    shape = a.shape
    flat = (0.5 * (a + dagger(a))).reshape(-1, shape[-1], shape[-1]).copy()
    w, v = _jacobi(flat, want_vectors=True)
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return HermitianEig(w.reshape(shape[:-1]), v.reshape(shape))


def eigvals_hermitian(m) -> np.ndarray:
    """Descending eigenvalues only; skips accumulating the rotations."""
    a = _as_square_stack(m)
    _check_hermitian(a)
    shape = a.shape
    flat = (0.5 * (a + dagger(a))).reshape(-1, shape[-1], shape[-1]).copy()
    w, _ = _jacobi(flat, want_vectors=False)
    return -np.sort(-w, axis=-1).reshape(shape[:-1])


def clamp_spectrum(w: np.ndarray) -> np.ndarray:
    """Zero out eigenvalues that are indistinguishable from roundoff."""
    top = np.max(np.abs(w), axis=-1, keepdims=True)
    return np.where(w <= CLAMP_REL * top, 0.0, w)


def psd_sqrt(m) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix (or stack).

    Eigenvalues in ``[-1e-12, CLAMP_REL * lambda_max]`` are set to zero
    before taking roots, so rank-deficient inputs give an exactly
    rank-deficient root.
    """
    eig = eig_hermitian(m)
    w = eig.eigenvalues
    floor = PSD_TOL * np.maximum(1.0, np.max(np.abs(w), axis=-1, keepdims=True))
    if np.any(w < -floor):
        raise NotPsd(f"negative eigenvalue {float(np.min(w)):.3e}")
    root = np.sqrt(clamp_spectrum(np.maximum(w, 0.0)))
    v = eig.eigenvectors
    return (v * root[..., None, :]) @ dagger(v)


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors)."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def det2(m: np.ndarray) -> np.ndarray:
    """Closed-form determinant of 2x2 matrices (stack-aware)."""
    m = np.asarray(m)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def det(m) -> np.ndarray:
    a = _as_square_stack(m)
    if a.shape[-1] == 2:
        return det2(a)
    return np.linalg.det(a)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)
