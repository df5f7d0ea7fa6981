"""Cyclic Jacobi eigenvalues for stacks of small Hermitian matrices."""

from __future__ import annotations

import numpy as np

from ..errors import ConvergenceError

__all__ = ["hermitize", "jacobi_eigvalsh"]

MAX_SWEEPS = 100
OFF_TOL = 1e-14
_NEGLIGIBLE = 1e-30


def hermitize(x: np.ndarray) -> np.ndarray:
    """Hermitian matrix built from the upper triangle of ``x`` (diagonal made real)."""
    x = np.asarray(x, dtype=complex)
    upper = np.triu(x, 1)
    out = upper + np.conj(np.swapaxes(upper, -1, -2))
    d = x.shape[-1]
    idx = np.arange(d)
    out[..., idx, idx] = x[..., idx, idx].real
    return out


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    d = a.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def jacobi_eigvalsh(a: np.ndarray, tol: float = OFF_TOL,
                    max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of Hermitian matrices, shape ``(..., d, d) -> (..., d)``, descending.

    Each rotation first removes the phase of ``a[p, q]`` and then applies the
    real symmetric Jacobi rotation that zeroes it. Sweeps stop once the
    off-diagonal Frobenius norm of every matrix is below ``tol * ||a||_F``.
    """
    a = np.array(a, dtype=complex, copy=True)
    batch_shape = a.shape[:-2]
    d = a.shape[-1]
    a = a.reshape((-1, d, d))
    if d == 1:
        return a[:, 0, 0].real.reshape(batch_shape + (1,))

    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-1, -2)))
    pairs = [(p, q) for p in range(d - 1) for q in range(p + 1, d)]
    for _ in range(max_sweeps):
        if np.all(_offdiag_norm(a) <= tol * scale):
            break
        for p, q in pairs:
            apq = a[:, p, q]
            r = np.abs(apq)
            # entries far below the matrix scale are dropped instead of rotated
            active = r > _NEGLIGIBLE * scale
            r_safe = np.where(active, r, 1.0)
            phase = np.where(active, apq.real / r_safe + 1j * (apq.imag / r_safe), 1.0)
            theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * r_safe)
            sign = np.where(theta >= 0.0, 1.0, -1.0)
            big = np.abs(theta) > 1e150
            theta_c = np.where(big, 1.0, theta)
            t = np.where(big, 0.5 / np.where(big, theta, 1.0),
                         sign / (np.abs(theta_c) + np.sqrt(theta_c * theta_c + 1.0)))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # U = diag(1, e^{-i phi}) @ [[c, s], [-s, c]] restricted to (p, q)
            u_pp = c
            u_pq = s
            u_qp = -s * np.conj(phase)
            u_qq = c * np.conj(phase)

            col_p = a[:, :, p].copy()
            col_q = a[:, :, q]
            a[:, :, p] = col_p * u_pp[:, None] + col_q * u_qp[:, None]
            a[:, :, q] = col_p * u_pq[:, None] + col_q * u_qq[:, None]
            row_p = a[:, p, :].copy()
            row_q = a[:, q, :]
            a[:, p, :] = np.conj(u_pp)[:, None] * row_p + np.conj(u_qp)[:, None] * row_q
            a[:, q, :] = np.conj(u_pq)[:, None] * row_p + np.conj(u_qq)[:, None] * row_q
            a[:, p, q] = 0.0
            a[:, q, p] = 0.0
            a[:, p, p] = a[:, p, p].real
            a[:, q, q] = a[:, q, q].real
    else:
        if not np.all(_offdiag_norm(a) <= tol * scale):
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    eig = np.diagonal(a, axis1=-2, axis2=-1).real
    eig = -np.sort(-eig, axis=-1)
    return eig.reshape(batch_shape + (d,))
