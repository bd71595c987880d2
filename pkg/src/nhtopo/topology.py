"""Complex gaps, topological invariants, edge states and disorder sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.optimize import linear_sum_assignment, minimize_scalar

from . import models
from .core import BlochHamiltonian, RealSpaceModel, bz_grid
from .errors import (
    GapClosedAtTRIM,
    GaplessRegion,
    ParityNotQuantized,
    PathMismatch,
    PfaffianMismatch,
    UnknownModelKind,
)
from .linalg import eigendecompose, max_norm, pfaffian

GAP_THRESHOLD = 1e-6
DEFAULT_GRID_1D = 501
DEFAULT_GRID_2D = 101


# ---------------------------------------------------------------------------
# Complex gap
# ---------------------------------------------------------------------------

@dataclass
class GapReport:
    min_separation: float
    gapped: bool
    argmin_k: np.ndarray
    threshold: float = GAP_THRESHOLD


def complex_gap(Hk, grid=None, threshold=GAP_THRESHOLD):
    """Smallest band separation ``min_k min_{m != n} |E_m(k) - E_n(k)|``.

    Parameters
    ----------
    Hk : BlochHamiltonian
    grid : int, optional
        Points per direction of :func:`bz_grid`; default 501 in 1D and 101
        in 2D. Must be at least 64.
    threshold : float
        Absolute gap threshold.
    """
    n = grid if grid is not None else (DEFAULT_GRID_1D if Hk.spatial_dim == 1 else DEFAULT_GRID_2D)
    if n < 64:
        raise ValueError("grid resolution must be at least 64 per dimension")
    ks = bz_grid(n, Hk.spatial_dim)
    E = np.linalg.eigvals(Hk.matrices(ks))
    b = E.shape[1]
    iu, ju = np.triu_indices(b, 1)
    sep = np.abs(E[:, iu] - E[:, ju]).min(axis=1)
    # symmetric minima (k and -k) tie up to rounding; take the first of them
    smin = sep.min()
    i = int(np.flatnonzero(sep <= smin + 1e-12 * max(1.0, smin))[0])
    return GapReport(float(sep[i]), bool(sep[i] > threshold), ks[i], threshold)


# ---------------------------------------------------------------------------
# Class AI and class D invariants
# ---------------------------------------------------------------------------

def _require_undeformed(Hk, what):
    if not np.isclose(np.remainder(Hk.phase, 4 * np.pi), 0.0, atol=1e-12):
        raise ValueError(
            f"{what} uses the Pauli decomposition of the undeformed Hamiltonian; "
            "evaluate it before applying deform_phase"
        )


def _hz_at_trims(Hk):
    if Hk.spatial_dim != 1 or Hk.band_count != 2:
        raise ValueError("expected a one-dimensional two-band Bloch Hamiltonian")
    H = Hk.matrices(np.array([0.0, np.pi]))
    return 0.5 * (H[:, 0, 0] - H[:, 1, 1]), max_norm(H)


def nu_ai(Hk, tol=1e-10):
    """Class-AI invariant from ``(-1)^nu = sgn[i h_z(0) * i h_z(pi)]``.

    For the NHTI this gives ``nu = 1`` exactly when ``|gamma| < 2t``.

    Raises
    ------
    GapClosedAtTRIM
        If ``h_z`` vanishes at ``k = 0`` or ``k = pi``.
    """
    _require_undeformed(Hk, "nu_ai")
    hz, scale = _hz_at_trims(Hk)
    atol = tol * max(1.0, scale)
    if np.any(np.abs(hz.real) > atol):
        raise ValueError("h_z is not purely imaginary at the TRIMs")
    if np.any(np.abs(hz) <= atol):
        raise GapClosedAtTRIM("h_z vanishes at a TRIM")
    s = ((1j * hz[0]) * (1j * hz[1])).real
    return 0 if s > 0 else 1


@dataclass
class NuDResult:
    nu: int
    nu_sign: int
    nu_pfaffian: int
    pf_0: complex
    pf_pi: complex


# Maps the particle-hole basis (c, c^+) to Majorana operators.
_MAJORANA_W = 0.5 * np.array([[1, 1j], [1, -1j]])


def majorana_form(H):
    """Antisymmetric Majorana-basis matrix ``X`` of a 2x2 BdG block at a TRIM.

    ``X`` is the antisymmetric part of ``-2i W^H H W``; for ``H = h_z s_z``
    it equals ``i h_z s_y`` so that ``Pf X = h_z``.
    """
    M = -2j * _MAJORANA_W.conj().T @ H @ _MAJORANA_W
    return 0.5 * (M - M.T)


def nu_d(Hk, tol=1e-10):
    """Class-D invariant by the sign formula and by Pfaffians.

    Returns
    -------
    NuDResult

    Raises
    ------
    GapClosedAtTRIM
    PfaffianMismatch
        If the two evaluations disagree.
    """
    _require_undeformed(Hk, "nu_d")
    hz, scale = _hz_at_trims(Hk)
    atol = tol * max(1.0, scale)
    if np.any(np.abs(hz.imag) > atol):
        raise ValueError("h_z is not real at the TRIMs")
    if np.any(np.abs(hz) <= atol):
        raise GapClosedAtTRIM("h_z vanishes at a TRIM")
    nu_sign = 0 if (hz[0] * hz[1]).real > 0 else 1
    H = Hk.matrices(np.array([0.0, np.pi]))
    pf0 = pfaffian(majorana_form(H[0]))
    pfpi = pfaffian(majorana_form(H[1]))
    prod = pf0 * pfpi
    if abs(prod.imag) > 1e-8 * max(1.0, abs(prod)):
        raise PfaffianMismatch("Pfaffian product is not real")
    nu_pf = 0 if prod.real > 0 else 1
    if nu_pf != nu_sign:
        raise PfaffianMismatch(f"sign path gives {nu_sign}, Pfaffian path gives {nu_pf}")
    return NuDResult(nu_sign, nu_sign, nu_pf, pf0, pfpi)


# ---------------------------------------------------------------------------
# Class AII invariant
# ---------------------------------------------------------------------------

TRIMS_2D = ((0.0, 0.0), (0.0, np.pi), (np.pi, 0.0), (np.pi, np.pi))


@dataclass
class NuAIIResult:
    nu: int
    nu_d1: int
    nu_parity: int
    d1: dict
    parities: dict


def nu_aii(Hk, P=None, tol=1e-8, parity_tol=1e-6):
    """Z2 invariant of an inversion-symmetric class-AII Bloch Hamiltonian.

    Primary path: ``(-1)^nu = prod sgn d_1(k_0)`` over the four TRIMs.
    Secondary path: diagonalize ``H(k_0)``, call a band occupied when
    ``Re(exp(i phase/2) E) < 0`` (``phase`` is the accumulated unification
    phase, zero for an undeformed model), pair Kramers partners by their real
    parts and multiply one parity eigenvalue per occupied pair.

    Raises
    ------
    GapClosedAtTRIM
        If ``d_1`` or an occupied real part vanishes at a TRIM.
    ParityNotQuantized
        If a parity expectation is not +-1 within ``parity_tol``, or two
        members of a Kramers pair disagree.
    PathMismatch
        If the two paths disagree.
    """
    if Hk.spatial_dim != 2:
        raise ValueError("nu_aii expects a two-dimensional Bloch Hamiltonian")
    if P is None:
        P = Hk.symmetries["P"].unitary_part if "P" in Hk.symmetries else models.G1
    P = np.asarray(getattr(P, "unitary_part", P), dtype=complex)
    z = np.exp(0.5j * Hk.phase)
    d1s, pars = {}, {}
    sgn_d1, sgn_par = 1, 1
    for k0 in TRIMS_2D:
        H = Hk.evaluate(np.array(k0))
        scale = max(1.0, max_norm(H))
        d1 = float((z * np.trace(models.G1 @ H)).real / 4.0)
        if abs(d1) <= tol * scale:
            raise GapClosedAtTRIM(f"d1 vanishes at k = {k0}")
        d1s[k0] = d1
        sgn_d1 *= 1 if d1 > 0 else -1

        spec = eigendecompose(H)
        E = z * spec.eigenvalues
        if np.any(np.abs(E.real) <= tol * scale):
            raise GapClosedAtTRIM(f"a band touches Re E = 0 at k = {k0}")
        occ = np.where(E.real < 0)[0]
        if occ.size % 2 or occ.size == 0:
            raise ParityNotQuantized(f"odd number of occupied bands at k = {k0}")
        occ = occ[np.argsort(E.real[occ])]
        V = spec.right_vectors
        pair_par = []
        for a, b in zip(occ[0::2], occ[1::2]):
            vals = []
            for i in (a, b):
                v = V[:, i] / np.linalg.norm(V[:, i])
                p = complex(v.conj() @ P @ v)
                if abs(abs(p) - 1.0) > parity_tol or abs(p.imag) > parity_tol:
                    raise ParityNotQuantized(f"parity {p} at k = {k0}")
                vals.append(int(np.sign(p.real)))
            if vals[0] != vals[1]:
                raise ParityNotQuantized(f"Kramers partners with opposite parity at k = {k0}")
            pair_par.append(vals[0])
        pars[k0] = tuple(pair_par)
        sgn_par *= int(np.prod(pair_par))
    nu1 = 0 if sgn_d1 > 0 else 1
    nu2 = 0 if sgn_par > 0 else 1
    if nu1 != nu2:
        raise PathMismatch(f"d1 path gives {nu1}, parity path gives {nu2}")
    return NuAIIResult(nu1, nu1, nu2, d1s, pars)


def z2_formula(m, t):
    """``nu`` with ``(-1)^nu = sgn[m^2 - 4 t^2]`` for the QSH model."""
    s = m * m - 4 * t * t
    if s == 0 or m == 0:
        raise GapClosedAtTRIM("d1 vanishes at a TRIM")
    return 0 if s > 0 else 1


# ---------------------------------------------------------------------------
# Continuum Dirac model
# ---------------------------------------------------------------------------

def _require_gapped_region(g, m):
    if not abs(m) > abs(g):
        raise GaplessRegion(f"region with m={m}, g={g} is not gapped (need |m| > |g|)")


def winding_integral(p, epsabs=1e-12, epsrel=1e-12, limit=400):
    """Complex value and error estimate of the chiral winding integral.

    ``W = int dk / (4 pi i) tr[S H^-1 dH/dk]`` reduces to
    ``-(m + i delta) / (2 pi ((k + i g)^2 + (m + i delta)^2))`` and is
    integrated over the real line after substituting ``k = tan(theta)``.
    """
    g, m, d = p.g, p.m, p.delta
    _require_gapped_region(g, m)
    b = m + 1j * d

    def f(theta):
        k = np.tan(theta)
        jac = 1.0 + k * k
        return -b / (2 * np.pi * ((k + 1j * g) ** 2 + b * b)) * jac

    lo, hi = -np.pi / 2, np.pi / 2
    centre = np.arctan([-d, d])
    opts = dict(epsabs=epsabs, epsrel=epsrel, limit=limit, points=sorted(set(centre.tolist())))
    re, er = integrate.quad(lambda th: f(th).real, lo, hi, **opts)
    im, ei = integrate.quad(lambda th: f(th).imag, lo, hi, **opts)
    return complex(re, im), float(np.hypot(er, ei))


def winding_number(p, epsabs=1e-12):
    """Real part of the winding integral; equals ``-sgn(m)/2`` when gapped.

    Raises
    ------
    GaplessRegion
    """
    return float(winding_integral(p, epsabs=epsabs)[0].real)


@dataclass
class DomainWallReport:
    """Zero-mode analysis of a two-region Dirac model.

    ``kappa_plus`` and ``kappa_minus`` are complex exponents: the profile is
    ``chi exp(-kappa_plus x)`` for ``x > 0`` and ``chi exp(kappa_minus x)``
    for ``x < 0``, with decay rates given by their real parts.
    """

    exists: bool
    spinor: Optional[tuple]
    kappa_plus: Optional[complex]
    kappa_minus: Optional[complex]
    numeric_min_abs_E: Optional[float] = None
    numeric_exists: Optional[bool] = None

    @property
    def decay_plus(self):
        return None if self.kappa_plus is None else self.kappa_plus.real

    @property
    def decay_minus(self):
        return None if self.kappa_minus is None else self.kappa_minus.real


def _wall_exponents(p):
    gp, mp, dp = p.region("+")
    gm, mm, dm = p.region("-")
    if mp > 0:
        right, kp = (0, 1), complex(mp - gp, dp)
    else:
        right, kp = (1, 0), -complex(mp + gp, dp)
    if mm > 0:
        left, km = (1, 0), complex(mm + gm, dm)
    else:
        left, km = (0, 1), -complex(mm - gm, dm)
    return right, kp, left, km


def dirac_ring_matrices(p, n_sites=1000, spacing=0.05):
    """Off-diagonal blocks of the discretized two-region model on a ring.

    The derivative is a forward difference in one chiral block and a
    backward difference in the other, which removes fermion doubling. Sites
    with ``x < 0`` take the minus-region parameters. Returns ``(A, B)`` with
    ``H = [[0, A], [B, 0]]`` in the eigenbasis of ``S = s_z``.
    """
    n = int(n_sites)
    x = (np.arange(n) - n // 2 + 0.5) * spacing
    gp, mp, dp = p.region("+")
    gm, mm, dm = p.region("-")
    g = np.where(x > 0, gp, gm)
    b = np.where(x > 0, mp + 1j * dp, mm + 1j * dm)
    Df = (np.roll(np.eye(n), 1, axis=1) - np.eye(n)) / spacing
    Db = -Df.T
    A = -1j * Df + np.diag(1j * g - 1j * b)
    B = -1j * Db + np.diag(1j * g + 1j * b)
    return A, B


def domain_wall_bound_state(p, numeric=True, n_sites=1000, spacing=0.05, threshold=1e-3):
    """Existence, spinor and decay of the zero mode at a mass domain wall.

    A bound state exists iff ``sgn m_+ != sgn m_-``; its spinor is
    ``(0, 1)`` when ``m_+ > 0`` and ``(1, 0)`` otherwise. With
    ``numeric=True`` the claim is checked on a discretized ring, where each
    of the two walls carries one zero mode; ``E^2`` are the eigenvalues of
    the product of the chiral blocks.

    Raises
    ------
    GaplessRegion
    """
    if not p.two_region:
        raise ValueError("domain wall needs two-region parameters")
    for side in ("+", "-"):
        g, m, _ = p.region(side)
        _require_gapped_region(g, m)
    right, kp, left, km = _wall_exponents(p)
    exists = right == left
    rep = DomainWallReport(exists, right if exists else None, kp if exists else None, km if exists else None)
    if numeric:
        A, B = dirac_ring_matrices(p, n_sites, spacing)
        e2 = np.linalg.eigvals(A @ B)
        emin = float(np.sqrt(np.min(np.abs(e2))))
        rep.numeric_min_abs_E = emin
        rep.numeric_exists = bool(emin < threshold)
    return rep


# ---------------------------------------------------------------------------
# Edge states
# ---------------------------------------------------------------------------

@dataclass
class EdgeStateReport:
    midgap_energies: np.ndarray
    localization_lengths: np.ndarray
    left_or_right: list
    count: int
    vectors: np.ndarray = field(repr=False, default=None)
    edge_weights: np.ndarray = field(repr=False, default=None)


def qsh_bulk_radius(t, m, lam, gamma, ky, n_kx=401):
    """``min_kx |E(kx, ky)|`` of the bulk QSH bands: the mid-gap disc radius."""
    Hk = models.build_qsh(t, m, lam, gamma)
    kx = np.linspace(-np.pi, np.pi, n_kx)
    ks = np.column_stack([kx, np.full_like(kx, ky)])
    return float(np.min(np.abs(np.linalg.eigvals(Hk.matrices(ks)))))


def _cell_positions(model):
    geom = model.geometry
    if geom.kind in ("chain", "cylinder"):
        return np.arange(geom.shape[0], dtype=float)
    raise ValueError("edge analysis needs a chain or cylinder geometry")


def localize_clusters(model, energies, vectors, cluster_tol):
    """Rotate near-degenerate eigenvectors into position-resolved combinations.

    Within each cluster of eigenvalues closer than ``cluster_tol`` the span is
    orthonormalized and the cell-position operator is diagonalized in it. Any
    combination of degenerate eigenvectors is again an eigenvector, and this
    choice separates states living on opposite edges.
    """
    n = len(energies)
    out = np.array(vectors, dtype=complex, copy=True)
    pos = np.repeat(_cell_positions(model), model.internal_dim)
    done = np.zeros(n, bool)
    for i in range(n):
        if done[i]:
            continue
        members = [j for j in range(n) if not done[j] and abs(energies[j] - energies[i]) <= cluster_tol]
        for j in members:
            done[j] = True
        if len(members) < 2:
            continue
        Q, _ = np.linalg.qr(out[:, members])
        _, U = np.linalg.eigh(Q.conj().T @ (pos[:, None] * Q))
        out[:, members] = Q @ U
    return out


def fit_localization_length(cell_amp, fit_cells=(1, 11), floor=1e-12):
    """Decay length from a least-squares line through ``log`` amplitudes.

    ``cell_amp`` is ordered from the boundary inward; cells in
    ``[fit_cells[0], fit_cells[1])`` below ``floor * max`` are ignored.
    """
    lo, hi = fit_cells
    seg = np.asarray(cell_amp[lo:hi], dtype=float)
    j = np.arange(lo, lo + seg.size)
    keep = seg > floor * np.max(cell_amp)
    if keep.sum() < 2:
        return np.nan
    slope = np.polyfit(j[keep], np.log(seg[keep]), 1)[0]
    return float(-1.0 / slope) if slope < 0 else np.inf


def _protected_values(kind, E, model):
    if kind == "imag":
        return np.abs(E.imag)
    if kind == "abs":
        return np.abs(E)
    if kind == "midgap":
        p = model.params
        r = qsh_bulk_radius(p["t"], p["m"], p["lam"], p["gamma"], model.geometry.ky)
        return np.abs(E) / r
    raise ValueError(f"unknown protected-value rule {kind!r}")


_DEFAULT_RULE = {"nhti": "imag", "majorana": "abs", "qsh_cylinder": "midgap"}


def find_edge_states(
    model,
    protected=None,
    eps=None,
    edge_fraction=0.25,
    weight=0.9,
    fit_cells=(1, 11),
    cluster_tol=1e-4,
):
    """Eigenstates with a protected eigenvalue that live on one boundary.

    Parameters
    ----------
    model : RealSpaceModel
        Open chain or cylinder.
    protected : {"imag", "abs", "midgap"}, optional
        ``|Im E| < eps`` (class AI), ``|E| < eps`` (class D), or for QSH
        cylinders ``|E|`` inside the bulk mid-gap disc at this ``k_y``
        (``eps`` is then a fraction of the disc radius). Defaults by model kind.
    eps : float, optional
        Threshold; ``1e-6`` for "imag" and "abs", ``1.0`` for "midgap".
    edge_fraction, weight : float
        A state qualifies when at least ``weight`` of it lies within
        ``edge_fraction`` of the cells from one end.
    fit_cells : tuple
        Cell window, counted from the boundary, of the decay fit.
    cluster_tol : float
        Degeneracy window, relative to ``max(1, max|H|)``, for
        :func:`localize_clusters`.
    """
    rule = protected or _DEFAULT_RULE.get(model.kind)
    if rule is None:
        raise UnknownModelKind(f"no default edge rule for model kind {model.kind!r}")
    if eps is None:
        eps = 1.0 if rule == "midgap" else 1e-6
    spec = eigendecompose(model.matrix)
    E = spec.eigenvalues
    cand = np.where(_protected_values(rule, E, model) < eps)[0]
    ncell = model.geometry.shape[0]
    empty = EdgeStateReport(np.zeros(0, complex), np.zeros(0), [], 0, np.zeros((model.dim, 0), complex), np.zeros(0))
    if cand.size == 0:
        return empty
    scale = max(1.0, max_norm(model.matrix))
    vecs = localize_clusters(model, E[cand], spec.right_vectors[:, cand], cluster_tol * scale)
    w = model.cell_weights(vecs)
    w = w / w.sum(axis=0)
    q = max(1, int(edge_fraction * ncell))
    left_w, right_w = w[:q].sum(axis=0), w[-q:].sum(axis=0)
    energies, xis, sides, keep, ew = [], [], [], [], []
    for c in range(cand.size):
        if max(left_w[c], right_w[c]) < weight:
            continue
        side = "left" if left_w[c] >= right_w[c] else "right"
        amp = np.sqrt(w[:, c])
        xis.append(fit_localization_length(amp if side == "left" else amp[::-1], fit_cells))
        energies.append(E[cand[c]])
        sides.append(side)
        keep.append(c)
        ew.append(max(left_w[c], right_w[c]))
    if not keep:
        return empty
    return EdgeStateReport(
        np.array(energies), np.array(xis), sides, len(keep), vecs[:, keep], np.array(ew)
    )


# ---------------------------------------------------------------------------
# QSH cylinder: edge branches and exceptional points
# ---------------------------------------------------------------------------

@dataclass
class EdgeBranchScan:
    ky: np.ndarray
    counts: np.ndarray
    energies: list


def qsh_edge_branches(t, m, lam, gamma, Lx=30, ky=None):
    """Mid-gap edge eigenvalues of the QSH cylinder along ``k_y``."""
    ky = np.linspace(-np.pi, np.pi, 121) if ky is None else np.asarray(ky, dtype=float)
    counts, energies = [], []
    for k in ky:
        rep = find_edge_states(models.build_qsh_cylinder(t, m, lam, gamma, Lx, k))
        counts.append(rep.count)
        energies.append(rep.midgap_energies)
    return EdgeBranchScan(ky, np.array(counts), energies)


@dataclass
class ExceptionalPointReport:
    """Exceptional-point search result.

    ``ky`` lists accepted points (eigenvectors collinear and eigenvalues
    within ``coalesce_tol``); ``candidates`` lists every refined minimum of
    eigenvector collinearity together with its pair separation, so a
    finite-size gap that keeps a candidate from being accepted stays visible.
    """

    ky: list
    separations: list
    min_singular_values: list
    candidates: list
    candidate_separations: list
    scan: EdgeBranchScan

    @property
    def count(self):
        return len(self.ky)


def _smallest_cluster(t, m, lam, gamma, Lx, ky, nstates=4):
    H = models.build_qsh_cylinder(t, m, lam, gamma, Lx, ky).matrix
    w, V = np.linalg.eig(H)
    idx = np.argsort(np.abs(w))[:nstates]
    Vn = V[:, idx] / np.linalg.norm(V[:, idx], axis=0)
    s = np.linalg.svd(Vn, compute_uv=False)
    return w[idx], s, Vn


def _collinear_pair_gap(w, Vn):
    """Eigenvalue separation of the most nearly parallel eigenvector pair."""
    G = np.abs(Vn.conj().T @ Vn)
    np.fill_diagonal(G, -1.0)
    a, b = np.unravel_index(np.argmax(G), G.shape)
    return float(abs(w[a] - w[b]))


def find_exceptional_points(
    t, m, lam, gamma, Lx=30, ky=None, coalesce_tol=1e-3, parallel_tol=0.05, xatol=1e-10
):
    """Locate ``k_y`` where two mid-gap edge eigenvalues coalesce.

    At an exceptional point both the eigenvalues and the right eigenvectors
    merge, so the smallest singular value of the normalized eigenvector matrix
    of the four states nearest ``E = 0`` drops toward zero. Local minima of
    that singular value on the ``k_y`` grid (restricted to momenta with
    mid-gap edge states) are refined by bounded Brent minimization. A minimum
    becomes a candidate when the singular value is below ``parallel_tol``; it
    is accepted when the eigenvalues of the most nearly parallel eigenvector
    pair are closer than ``coalesce_tol``.
    """
    scan = qsh_edge_branches(t, m, lam, gamma, Lx, ky)
    k = scan.ky
    smin = np.array([_smallest_cluster(t, m, lam, gamma, Lx, kk)[1][-1] for kk in k])
    cands, cseps, csv = [], [], []
    for i in range(1, k.size - 1):
        if scan.counts[i] < 2 and scan.counts[i - 1] < 2 and scan.counts[i + 1] < 2:
            continue
        if not (smin[i] <= smin[i - 1] and smin[i] <= smin[i + 1]):
            continue
        res = minimize_scalar(
            lambda kk: _smallest_cluster(t, m, lam, gamma, Lx, kk)[1][-1],
            bounds=(k[i - 1], k[i + 1]),
            method="bounded",
            options={"xatol": xatol},
        )
        w, s, Vn = _smallest_cluster(t, m, lam, gamma, Lx, res.x)
        if s[-1] >= parallel_tol or any(abs(res.x - c) < 1e-6 for c in cands):
            continue
        cands.append(float(res.x))
        cseps.append(_collinear_pair_gap(w, Vn))
        csv.append(float(s[-1]))
    order = np.argsort(cands)
    cands = [cands[i] for i in order]
    cseps = [cseps[i] for i in order]
    csv = [csv[i] for i in order]
    keep = [i for i, d in enumerate(cseps) if d < coalesce_tol]
    return ExceptionalPointReport(
        [cands[i] for i in keep],
        [cseps[i] for i in keep],
        [csv[i] for i in keep],
        cands,
        cseps,
        scan,
    )


# ---------------------------------------------------------------------------
# Disorder sweeps
# ---------------------------------------------------------------------------

DISORDER_PRESETS = {
    "majorana": {
        "base": {"tL": 1.4, "tR": 0.6, "Delta": 0.5, "mu": 1.0, "L": 50},
        "fixed": {"tL": 0.3, "tR": 0.3},
        "swept": {"mu": 1.0},
    },
    "nhti": {
        "base": {"t": 1.0, "delta": 0.5, "gamma": 1.0, "L": 50},
        "fixed": {"t": 0.5, "delta": 0.3},
        "swept": {"gamma": 1.0},
    },
    "qsh_cylinder": {
        "base": {"t": 1.0, "m": -1.0, "lam": 0.5, "gamma": 0.5, "Lx": 30, "ky": 0.0},
        "fixed": {},
        "swept": {"m": 0.3, "lam": 0.2, "gamma": 0.3},
    },
}


@dataclass
class SweepRow:
    d: float
    realization: int
    n_edge: int
    max_deviation: float
    bulk_spread: float
    eigenvalues: np.ndarray = field(repr=False)
    edge_energies: np.ndarray = field(repr=False)


@dataclass
class SweepSummary:
    d: float
    max_deviation: float
    mean_bulk_spread: float
    edge_counts: dict


@dataclass
class SweepTable:
    model_kind: str
    rows: list
    summary: list

    def spreads(self):
        return np.array([s.mean_bulk_spread for s in self.summary])


def _sweep_edges(model, kind, window):
    """Edge states of a disordered sample and their protected-value deviations."""
    if kind == "nhti":
        rep = find_edge_states(model, protected="imag", eps=window)
        dev = np.abs(rep.midgap_energies.imag)
    elif kind == "majorana":
        rep = find_edge_states(model, protected="abs", eps=window)
        dev = np.abs(rep.midgap_energies)
    else:
        # disorder moves bulk states into the clean mid-gap disc, so take the
        # four states nearest E = 0 and keep the edge-localized ones
        E = np.linalg.eigvals(model.matrix)
        r = np.sort(np.abs(E))[3] * (1 + 1e-9)
        rep = find_edge_states(model, protected="abs", eps=r)
        dev = np.array(
            [np.min(np.abs(np.delete(E, np.argmin(np.abs(E - e))).real - e.real)) for e in rep.midgap_energies]
        )
    return rep, dev


def _bulk_spread(E, E_edge, E_ref, E_ref_edge):
    def strip(a, b):
        a = list(a)
        for e in b:
            a.pop(int(np.argmin(np.abs(np.array(a) - e))))
        return np.array(a)

    bulk, ref = strip(E, E_edge), strip(E_ref, E_ref_edge)
    C = np.abs(bulk[:, None] - ref[None, :])
    r, c = linear_sum_assignment(C)
    return float(C[r, c].mean())


def disorder_sweep(
    model_kind,
    base=None,
    d_grid=(0.0, 0.5, 1.0),
    n_realizations=20,
    seed=0,
    fixed=None,
    swept=None,
    window=0.1,
):
    """Spectra and edge-state protection across disorder strengths.

    For strength ``d`` each parameter in ``fixed`` carries its own amplitude
    and each parameter in ``swept`` carries ``d`` times its weight. Streams
    are keyed by ``(seed, realization, slot)``, so every ``d`` column reuses
    the same random numbers and only their amplitude changes.

    Edge states are flagged by boundary localization plus a loose window
    (``window``) on the protected quantity, and the reported deviation is
    measured afterwards: ``|Im E|`` for the NHTI, ``|E|`` for the Majorana
    chain, and the real-part Kramers splitting for the QSH cylinder. The bulk
    spread is the mean eigenvalue displacement, under optimal assignment,
    between the disordered bulk and the clean bulk.
    """
    if model_kind not in DISORDER_PRESETS:
        raise UnknownModelKind(f"unknown model kind {model_kind!r}")
    preset = DISORDER_PRESETS[model_kind]
    base = {**preset["base"], **(base or {})}
    fixed = preset["fixed"] if fixed is None else fixed
    swept = preset["swept"] if swept is None else swept

    clean = models.build_disordered(model_kind, base, {}, seed)
    E_ref = np.linalg.eigvals(clean.matrix)
    ref_rep, _ = _sweep_edges(clean, model_kind, window)

    rows, summary = [], []
    for d in d_grid:
        spec_d = dict(fixed)
        for name, wgt in swept.items():
            spec_d[name] = spec_d.get(name, 0.0) + float(d) * wgt
        drows = []
        for r in range(int(n_realizations)):
            mdl = models.build_disordered(model_kind, base, spec_d, seed, r)
            rep, dev = _sweep_edges(mdl, model_kind, window)
            E = np.linalg.eigvals(mdl.matrix)
            spread = _bulk_spread(E, rep.midgap_energies, E_ref, ref_rep.midgap_energies)
            drows.append(
                SweepRow(
                    float(d),
                    r,
                    rep.count,
                    float(dev.max()) if dev.size else 0.0,
                    spread,
                    np.sort_complex(E),
                    rep.midgap_energies,
                )
            )
        rows.extend(drows)
        counts = {}
        for row in drows:
            counts[row.n_edge] = counts.get(row.n_edge, 0) + 1
        summary.append(
            SweepSummary(
                float(d),
                max(row.max_deviation for row in drows),
                float(np.mean([row.bulk_spread for row in drows])),
                counts,
            )
        )
    return SweepTable(model_kind, rows, summary)
