"""Generalized symmetry operators, AZ classification and spectral constraints.

A symmetry operator ``A`` acts on a Hamiltonian as one of

* anti-unitary (``conjugates=True``): ``A H A^-1 = U H* U^-1``
* transposing (``transpose=True``): ``U H^T U^-1``, the form in which
  particle-hole symmetry of a BdG matrix with asymmetric hopping closes
* unitary: ``U H U^-1``

and the generalized relation is ``A H A^-1 = exp(i phi) H``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import BlochHamiltonian, RealSpaceModel, as_kpoints, bz_grid
from .errors import (
    AsymmetricGrid,
    ConflictingCandidates,
    DimensionMismatch,
    NonFiniteInput,
    WrongSquareSign,
)
from .linalg import Spectrum, as_matrix, eigendecompose, max_norm

TWO_PI = 2.0 * np.pi

AZ_TABLE = {
    # (T^2, C^2, chiral) -> class; 0 means absent
    (0, 0, 0): "A",
    (0, 0, 1): "AIII",
    (1, 0, 0): "AI",
    (1, 1, 1): "BDI",
    (0, 1, 0): "D",
    (-1, 1, 1): "DIII",
    (-1, 0, 0): "AII",
    (-1, -1, 1): "CII",
    (0, -1, 0): "C",
    (1, -1, 1): "CI",
}

_MERGE = {
    "AI": "AI|D",
    "D": "AI|D",
    "AII": "AII|C",
    "C": "AII|C",
    "DIII": "CI|DIII",
    "CI": "CI|DIII",
}


def unified_class(label):
    """Non-Hermitian unified class of an AZ label.

    Multiplying ``H`` by ``i`` exchanges time-reversal and particle-hole
    symmetry while keeping their squares, so AI and D, AII and C, and DIII
    and CI become equivalent. BDI and CII map to themselves and the complex
    classes are unaffected. The map is idempotent: a unified label is
    returned unchanged.
    """
    if label in _MERGE:
        return _MERGE[label]
    return label


def _wrap_phase(phi):
    phi = float(phi)
    if not np.isfinite(phi):
        raise NonFiniteInput("phase must be finite")
    out = phi % TWO_PI
    return 0.0 if np.isclose(out, TWO_PI, rtol=0, atol=1e-15) else out


@dataclass(frozen=True)
class AntiUnitarySymmetry:
    """Symmetry operator ``A`` with ``A H A^-1 = exp(i phase_phi) H``.

    Parameters
    ----------
    unitary_part : ndarray
        Unitary matrix ``U``.
    conjugates : bool
        True for an anti-unitary operator ``U K``.
    phase_phi : float
        Phase in ``[0, 2 pi)``; 0 for time reversal, pi for particle-hole.
    square_sign : {+1, -1, None}
        Declared value of ``A^2``; verified against ``U U*`` at construction.
    transpose : bool
        Act by transposition instead of complex conjugation.
    name : str
        Label used in reports.
    """

    unitary_part: np.ndarray
    conjugates: bool = True
    phase_phi: float = 0.0
    square_sign: Optional[int] = None
    transpose: bool = False
    name: str = ""

    def __post_init__(self):
        U = as_matrix(self.unitary_part, "U")
        object.__setattr__(self, "unitary_part", U)
        object.__setattr__(self, "phase_phi", _wrap_phase(self.phase_phi))
        if self.conjugates and self.transpose:
            raise ValueError("an operator either conjugates or transposes, not both")
        n = U.shape[0]
        if max_norm(U.conj().T @ U - np.eye(n)) > 1e-10:
            raise ValueError("unitary_part is not unitary")
        if self.square_sign is not None:
            if self.square_sign not in (1, -1):
                raise ValueError("square_sign must be +1, -1 or None")
            if self.antilinear_like and self.computed_square() != self.square_sign:
                raise ValueError("U U* does not equal square_sign * I")

    @property
    def dim(self):
        return self.unitary_part.shape[0]

    @property
    def antilinear_like(self):
        """True for conjugating or transposing operators."""
        return self.conjugates or self.transpose

    def computed_square(self, tol=1e-10):
        """Sign ``s`` with ``U U* = s I``, or None when neither holds."""
        U = self.unitary_part
        UU = U @ U.conj()
        eye = np.eye(self.dim)
        if max_norm(UU - eye) <= tol:
            return 1
        if max_norm(UU + eye) <= tol:
            return -1
        return None

    def apply(self, H):
        """``A H A^-1`` for a single matrix or a stack of matrices."""
        U = self.unitary_part
        H = np.asarray(H, dtype=complex)
        if self.conjugates:
            X = H.conj()
        elif self.transpose:
            X = np.swapaxes(H, -1, -2)
        else:
            X = H
        return U @ X @ U.conj().T

    def on_state(self, psi):
        """Action on state vectors (columns)."""
        psi = np.asarray(psi, dtype=complex)
        return self.unitary_part @ (psi.conj() if self.conjugates else psi)

    def image(self, E):
        """Eigenvalue partner forced by the symmetry.

        ``E* exp(-i phi)`` for conjugating operators, ``exp(-i phi) E``
        otherwise.
        """
        E = np.asarray(E, dtype=complex)
        rot = np.exp(-1j * self.phase_phi)
        return rot * (E.conj() if self.conjugates else E)

    def with_phase(self, phi):
        return replace(self, phase_phi=phi)


@dataclass
class SymmetryReport:
    relation_residual: float
    holds: bool
    az_class: str = "unclassified"
    unified_class: Optional[str] = None
    details: dict = field(default_factory=dict)


def check_generalized_symmetry(H, A, tol=1e-8):
    """Residual of ``A H A^-1 - exp(i phi) H`` in max-norm.

    ``holds`` is true iff the residual is at most ``tol * max|H|``.
    """
    H = as_matrix(H)
    if H.shape[0] != A.dim:
        raise DimensionMismatch(f"H has dim {H.shape[0]} but operator has dim {A.dim}")
    res = max_norm(A.apply(H) - np.exp(1j * A.phase_phi) * H)
    return SymmetryReport(relation_residual=res, holds=bool(res <= tol * max_norm(H)))


def _resolve_grid(Hk, kgrid):
    if kgrid is None:
        return bz_grid(101, Hk.spatial_dim)
    if np.isscalar(kgrid):
        return bz_grid(int(kgrid), Hk.spatial_dim)
    return as_kpoints(kgrid, Hk.spatial_dim)


def _check_symmetric_grid(ks, atol=1e-9):
    def canon(k):
        return np.round(((k + np.pi) % TWO_PI - np.pi) / atol).astype(np.int64)

    pos = canon(ks)
    # identify -pi with +pi
    edge = int(np.round(np.pi / atol))
    pos[pos == -edge] = edge
    neg = canon(-ks)
    neg[neg == -edge] = edge
    have = {tuple(r) for r in pos}
    if not all(tuple(r) in have for r in neg):
        raise AsymmetricGrid("grid is not closed under k -> -k")


def check_bloch_symmetry(Hk, A, kgrid=None, tol=1e-8):
    """Verify the momentum-resolved relation on a symmetric grid.

    Conjugating and transposing operators relate ``H(k)`` to ``H(-k)``;
    unitary operators are treated as momentum-reversing (inversion-like).
    """
    if Hk.band_count != A.dim:
        raise DimensionMismatch(f"bands={Hk.band_count} but operator dim={A.dim}")
    ks = _resolve_grid(Hk, kgrid)
    _check_symmetric_grid(ks)
    Hp = Hk.matrices(ks)
    Hm = Hk.matrices(-ks)
    lhs = A.apply(Hm)
    res = float(np.max(np.abs(lhs - np.exp(1j * A.phase_phi) * Hp)))
    scale = float(np.max(np.abs(Hp)))
    return SymmetryReport(relation_residual=res, holds=bool(res <= tol * scale))


def check_chiral(Hk, S, kgrid=None, tol=1e-8):
    """Verify ``S H(k) S^-1 = -H(k)`` at every grid point."""
    U = S.unitary_part if isinstance(S, AntiUnitarySymmetry) else as_matrix(S, "S")
    if U.shape[0] != Hk.band_count:
        raise DimensionMismatch("chiral operator dimension mismatch")
    ks = _resolve_grid(Hk, kgrid)
    Hs = Hk.matrices(ks)
    res = float(np.max(np.abs(U @ Hs @ U.conj().T + Hs)))
    scale = float(np.max(np.abs(Hs)))
    return SymmetryReport(relation_residual=res, holds=bool(res <= tol * scale))


def _same_operator(a, b):
    return (
        a.conjugates == b.conjugates
        and a.transpose == b.transpose
        and a.unitary_part.shape == b.unitary_part.shape
        and np.allclose(a.unitary_part, b.unitary_part, atol=1e-10)
    )


def classify_az(Hk, candidates, kgrid=None, tol=1e-8):
    """AZ class of a Bloch Hamiltonian from a list of candidate operators.

    Each conjugating or transposing candidate is tried as TRS (phase 0) and
    as PHS (phase pi); each unitary candidate is tried as a chiral operator.
    The class follows from the signature ``(T^2, C^2, S)``.

    Raises
    ------
    ConflictingCandidates
        If two distinct operators pass the same role.
    """
    ks = _resolve_grid(Hk, kgrid)
    found = {"T": [], "C": [], "S": []}
    worst = 0.0
    for cand in candidates:
        if not isinstance(cand, AntiUnitarySymmetry):
            cand = AntiUnitarySymmetry(np.asarray(cand), conjugates=False)
        if cand.dim != Hk.band_count:
            raise DimensionMismatch("candidate dimension does not match band count")
        if cand.antilinear_like:
            for role, phi in (("T", 0.0), ("C", np.pi)):
                rep = check_bloch_symmetry(Hk, cand.with_phase(phi), ks, tol)
                if rep.holds and cand.computed_square() is not None:
                    found[role].append(cand)
                    worst = max(worst, rep.relation_residual)
        else:
            rep = check_chiral(Hk, cand, ks, tol)
            if rep.holds:
                found["S"].append(cand)
                worst = max(worst, rep.relation_residual)
    for role, ops in found.items():
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                if not _same_operator(ops[i], ops[j]):
                    raise ConflictingCandidates(f"two distinct operators pass the {role} role")
    t2 = found["T"][0].computed_square() if found["T"] else 0
    c2 = found["C"][0].computed_square() if found["C"] else 0
    s = 1 if (found["S"] or (t2 and c2)) else 0
    az = AZ_TABLE.get((t2, c2, s), "unclassified")
    return SymmetryReport(
        relation_residual=worst,
        holds=True,
        az_class=az,
        unified_class=unified_class(az) if az != "unclassified" else None,
        details={"T^2": t2, "C^2": c2, "chiral": bool(s)},
    )


@dataclass
class PairingReport:
    """Outcome of a spectral-constraint check.

    ``pairs`` holds index pairs ``(i, j)`` with ``E_j`` the partner of ``E_i``;
    ``self_symmetric`` holds indices with ``E`` equal to its own partner.
    """

    self_symmetric: list
    pairs: list
    violations: list
    max_mismatch: float
    tol: float

    @property
    def holds(self):
        return not self.violations


def verify_spectral_constraints(spec, A, tol=1e-8):
    """Match every eigenvalue with the partner the symmetry requires.

    Matching is a minimum-weight assignment between the eigenvalues and
    their images, which handles degenerate clusters without a greedy pass.
    ``tol`` is relative to ``max(1, max|E|)``.
    """
    E = spec.eigenvalues if isinstance(spec, Spectrum) else np.asarray(spec, dtype=complex).ravel()
    F = A.image(E)
    scale = max(1.0, float(np.max(np.abs(E)))) if E.size else 1.0
    atol = tol * scale
    cost = np.abs(F[:, None] - E[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(cols)
    perm[rows] = cols
    mism = cost[np.arange(E.size), perm]
    self_sym, pairs, bad = [], [], []
    for i in range(E.size):
        j = int(perm[i])
        if mism[i] > atol:
            bad.append(i)
        elif abs(F[i] - E[i]) <= atol:
            self_sym.append(i)
        elif i < j or perm[j] != i:
            pairs.append((i, j))
    return PairingReport(self_sym, pairs, bad, float(mism.max()) if E.size else 0.0, atol)


@dataclass
class KramersReport:
    applicable: bool
    self_symmetric_count: int
    degenerate: bool
    orthogonality_max: float
    real_parts_paired: Optional[bool]
    holds: bool


def kramers_check(H, A, tol=1e-8):
    """Generalized Kramers degeneracy for an anti-unitary ``A`` with ``A^2 = -1``.

    Checks that self-symmetric eigenvalues (``E = E* exp(-i phi)``) are
    evenly degenerate, that every eigenvector is orthogonal to its image
    under ``A``, and for ``phi = 0`` that the real parts of the whole
    spectrum pair up. ``applicable`` is false when no self-symmetric
    eigenvalue exists.
    """
    if not A.conjugates:
        raise WrongSquareSign("Kramers check needs an anti-unitary operator")
    if A.computed_square() != -1:
        raise WrongSquareSign("Kramers check needs A^2 = -1")
    H = as_matrix(H)
    if H.shape[0] != A.dim:
        raise DimensionMismatch("operator and Hamiltonian dimensions differ")
    spec = eigendecompose(H)
    E = spec.eigenvalues
    scale = max(1.0, max_norm(H))
    atol = tol * scale
    deg_tol = max(atol, 1e-6 * scale)
    self_idx = np.where(np.abs(A.image(E) - E) <= atol)[0]
    degenerate = True
    for i in self_idx:
        mult = int(np.sum(np.abs(E - E[i]) <= deg_tol))
        if mult % 2:
            degenerate = False
    V = spec.right_vectors
    AV = A.on_state(V)
    orth = float(np.max(np.abs(np.einsum("ij,ij->j", V.conj(), AV))))
    paired = None
    if np.isclose(A.phase_phi, 0.0, atol=1e-12):
        re = np.sort(E.real)
        paired = bool(re.size % 2 == 0 and np.all(np.abs(re[0::2] - re[1::2]) <= deg_tol))
    holds = degenerate and orth <= deg_tol and (paired is not False)
    return KramersReport(
        applicable=bool(self_idx.size),
        self_symmetric_count=int(self_idx.size),
        degenerate=degenerate,
        orthogonality_max=orth,
        real_parts_paired=paired,
        holds=bool(holds),
    )


def deformed_symmetry(A, phi):
    """Operator describing ``exp(-i phi/2) H`` given ``A`` for ``H``.

    A conjugating operator picks up ``phi`` in its phase; linear operators
    (including the transposing form) keep their phase.
    """
    if A.conjugates:
        return A.with_phase(A.phase_phi + phi)
    return A


def deform_phase(H0, phi):
    """Unification deformation ``H_phi = exp(-i phi/2) H_0``.

    Accepts a matrix, a :class:`BlochHamiltonian` or a
    :class:`RealSpaceModel`. Bloch maps also record the accumulated phase
    and carry updated symmetry operators.
    """
    phi = float(phi)
    if not np.isfinite(phi):
        raise NonFiniteInput("phase must be finite")
    z = np.exp(-0.5j * phi)
    if isinstance(H0, BlochHamiltonian):
        fn, afn = H0.matrices_fn, H0.analytic_fn
        return H0.with_changes(
            matrices_fn=lambda ks: z * fn(ks),
            analytic_fn=None if afn is None else (lambda ks: z * afn(ks)),
            phase=H0.phase + phi,
            symmetries={k: deformed_symmetry(v, phi) for k, v in H0.symmetries.items()},
        )
    if isinstance(H0, RealSpaceModel):
        return replace(H0, matrix=z * H0.matrix)
    return z * as_matrix(H0)
