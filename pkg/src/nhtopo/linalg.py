"""Dense complex linear algebra for non-Hermitian matrices.

The eigensolver wraps LAPACK's ``zgeev`` (Hessenberg reduction followed by
shifted QR) through :func:`scipy.linalg.eig` and adds biorthonormal left
vectors, residual diagnostics and a defectiveness flag. The Pfaffian is an
in-tree Parlett-Reid tridiagonalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NonFiniteInput,
    NotAntisymmetric,
    OddDimension,
)

DEFAULT_TOL = 1e-8


def as_matrix(H, name="H"):
    """Validate and return ``H`` as a square complex ndarray.

    Raises
    ------
    DimensionMismatch
        If ``H`` is not a square 2-D array.
    NonFiniteInput
        If any entry is NaN or infinite.
    """
    A = np.asarray(H, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteInput(f"{name} contains non-finite entries")
    return A


def max_norm(H):
    """Largest absolute entry of ``H`` (the reference scale for tolerances)."""
    return float(np.max(np.abs(H))) if np.size(H) else 0.0


@dataclass(frozen=True)
class Spectrum:
    """Biorthogonal eigendecomposition of a square matrix.

    Attributes
    ----------
    eigenvalues : ndarray, shape (n,)
        Sorted lexicographically by (real part, imaginary part).
    right_vectors : ndarray, shape (n, n)
        Column ``k`` is the right eigenvector ``phi_k`` with unit 2-norm.
    left_vectors : ndarray, shape (n, n)
        Column ``k`` is ``chi_k``; ``chi_m^H phi_n = delta_mn`` whenever
        ``defective_flag`` is false.
    residual_max : float
        ``max_n ||H phi_n - E_n phi_n||``.
    left_residual_max : float
        ``max_n ||chi_n^H H - E_n chi_n^H||`` for unit-normalized ``chi_n``.
    defective_flag : bool
        True when the eigenvector matrix is numerically singular.
    condition : float
        2-norm condition number of ``right_vectors``.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    residual_max: float
    left_residual_max: float
    defective_flag: bool
    condition: float

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def biorthogonality_error(self):
        """Max-norm deviation of ``chi^H phi`` from the identity."""
        G = self.left_vectors.conj().T @ self.right_vectors
        return max_norm(G - np.eye(self.dim))


def lexsort_complex(values):
    """Indices that sort complex ``values`` by real part, then imaginary part."""
    values = np.asarray(values)
    return np.lexsort((values.imag, values.real))


def eigendecompose(H, tol=DEFAULT_TOL):
    """Eigenvalues with matched right and left eigenvectors.

    Parameters
    ----------
    H : array_like
        Square complex matrix.
    tol : float
        Relative tolerance. The decomposition is flagged defective when the
        condition number of the right-eigenvector matrix exceeds ``1/tol``.

    Returns
    -------
    Spectrum

    Notes
    -----
    For diagonalizable input the left vectors are the columns of
    ``inv(V)^H``, which makes them exactly biorthonormal to the right vectors
    and resolves degenerate clusters without any eigenvalue matching. When
    ``V`` is numerically singular the LAPACK left vectors are kept instead,
    scaled so that ``chi_n^H phi_n = 1`` where that overlap is nonzero.
    """
    A = as_matrix(H)
    n = A.shape[0]
    try:
        w, vl, vr = sla.eig(A, left=True, right=True, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"eigensolver did not converge: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(vr))):
        raise ConvergenceFailure("eigensolver returned non-finite output")

    order = lexsort_complex(w)
    w, vl, vr = w[order], vl[:, order], vr[:, order]
    vr = vr / np.linalg.norm(vr, axis=0)

    sv = np.linalg.svd(vr, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    defective = not (cond < 1.0 / tol)

    if not defective:
        left = np.linalg.inv(vr).conj().T
    else:
        left = vl / np.linalg.norm(vl, axis=0)
        overlap = np.einsum("ij,ij->j", left.conj(), vr)
        ok = np.abs(overlap) > np.finfo(float).eps * n
        left[:, ok] = left[:, ok] / overlap[ok].conj()

    res = np.linalg.norm(A @ vr - vr * w, axis=0)
    lu = left / np.linalg.norm(left, axis=0)
    lres = np.linalg.norm(lu.conj().T @ A - w[:, None] * lu.conj().T, axis=1)
    return Spectrum(
        eigenvalues=w,
        right_vectors=vr,
        left_vectors=left,
        residual_max=float(res.max()),
        left_residual_max=float(lres.max()),
        defective_flag=defective,
        condition=cond,
    )


def pfaffian(A, tol=1e-10):
    """Pfaffian of a complex antisymmetric matrix by Parlett-Reid elimination.

    Parameters
    ----------
    A : array_like
        Even-dimensional matrix with ``A^T = -A``.
    tol : float
        Antisymmetry tolerance relative to ``max(1, max|A|)``.

    Returns
    -------
    complex

    Raises
    ------
    NotAntisymmetric, OddDimension
    """
    M = as_matrix(A, "A").copy()
    n = M.shape[0]
    if max_norm(M + M.T) > tol * max(1.0, max_norm(M)):
        raise NotAntisymmetric("matrix is not antisymmetric within tolerance")
    if n % 2:
        raise OddDimension(f"Pfaffian requires even dimension, got {n}")

    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        # pivot the largest entry of column k below the diagonal into row k+1
        kp = k + 1 + int(np.argmax(np.abs(M[k + 1:, k])))
        if kp != k + 1:
            M[[k + 1, kp], :] = M[[kp, k + 1], :]
            M[:, [k + 1, kp]] = M[:, [kp, k + 1]]
            pf = -pf
        if M[k + 1, k] == 0:
            return 0.0 + 0.0j
        pf *= M[k, k + 1]
        if k + 2 < n:
            tau = M[k, k + 2:] / M[k, k + 1]
            col = M[k + 2:, k + 1].copy()
            M[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return complex(pf)


def propagator(H, t, tol=DEFAULT_TOL, method="auto", spectrum=None):
    """Matrix propagator ``exp(-i H t)``.

    Parameters
    ----------
    H : array_like
        Square generator.
    t : float
        Evolution time.
    method : {"auto", "eigen", "pade"}
        ``"auto"`` uses the eigen-expansion unless the decomposition is
        defective, in which case it falls back to scaling-and-squaring Pade
        (:func:`scipy.linalg.expm`).
    spectrum : Spectrum, optional
        Precomputed decomposition of ``H`` to reuse.
    """
    A = as_matrix(H)
    if not np.isfinite(t):
        raise NonFiniteInput("time must be finite")
    if method not in ("auto", "eigen", "pade"):
        raise ValueError(f"unknown propagator method {method!r}")
    if method == "pade":
        return sla.expm(-1j * t * A)
    spec = spectrum if spectrum is not None else eigendecompose(A, tol)
    if spec.defective_flag:
        if method == "eigen":
            raise ConvergenceFailure("eigen-expansion requested for a defective matrix")
        return sla.expm(-1j * t * A)
    V, W = spec.right_vectors, spec.left_vectors
    return (V * np.exp(-1j * spec.eigenvalues * t)) @ W.conj().T
