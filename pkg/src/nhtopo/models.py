"""Hamiltonian builders: Bloch maps, finite lattices, disorder, continuum models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import BlochHamiltonian, Geometry, RealSpaceModel
from .errors import NonPositiveHopping, TooFewSites, UnknownModelKind
from .symmetry import AntiUnitarySymmetry

S0 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

MIN_SITES = 4


def _check_hopping(**kw):
    for name, val in kw.items():
        if not (np.isfinite(val) and val > 0):
            raise NonPositiveHopping(f"{name} must be positive, got {val}")


def _check_sites(**kw):
    for name, val in kw.items():
        if int(val) < MIN_SITES:
            raise TooFewSites(f"{name} must be at least {MIN_SITES}, got {val}")


def _pauli_stack(h0, hx, hy, hz):
    k = hx.shape[0]
    out = np.empty((k, 2, 2), dtype=complex)
    out[:, 0, 0] = h0 + hz
    out[:, 1, 1] = h0 - hz
    out[:, 0, 1] = hx - 1j * hy
    out[:, 1, 0] = hx + 1j * hy
    return out


# ---------------------------------------------------------------------------
# NH topological insulator (class AI)
# ---------------------------------------------------------------------------

def nhti_time_reversal():
    """``T = sigma_x K`` with ``T^2 = +1``."""
    return AntiUnitarySymmetry(SX, conjugates=True, phase_phi=0.0, square_sign=1, name="T")


def build_nhti(t, delta, gamma):
    """Two-band Bloch Hamiltonian of the non-Hermitian topological insulator.

    ``h_x = -2i Im(delta) sin k``, ``h_y = 2i Re(delta) sin k`` and
    ``h_z = i (gamma + 2 t cos k)``.
    """
    _check_hopping(t=t)
    delta = complex(delta)
    t, gamma = float(t), float(gamma)

    def mats(ks):
        k = ks[:, 0]
        s, c = np.sin(k), np.cos(k)
        zero = np.zeros_like(k, dtype=complex)
        return _pauli_stack(zero, -2j * delta.imag * s, 2j * delta.real * s, 1j * (gamma + 2 * t * c))

    def disp(ks):
        k = ks[:, 0]
        r = np.sqrt((gamma + 2 * t * np.cos(k)) ** 2 + 4 * abs(delta) ** 2 * np.sin(k) ** 2)
        return np.stack([-1j * r, 1j * r], axis=1)

    return BlochHamiltonian(
        kind="nhti",
        spatial_dim=1,
        band_count=2,
        matrices_fn=mats,
        params={"t": t, "delta": delta, "gamma": gamma},
        analytic_fn=disp,
        symmetries={"T": nhti_time_reversal()},
    )


def _nhti_matrix(t, delta, gamma, periodic):
    """Assemble the chain from per-bond ``t_j, delta_j`` and per-site ``gamma_j``.

    Index ``j`` of the bond arrays labels the bond between cells ``j-1`` and
    ``j``; entry 0 is used only with periodic boundaries.
    """
    L = gamma.shape[0]
    H = np.zeros((2 * L, 2 * L), dtype=complex)
    a = 2 * np.arange(L)
    b = a + 1
    H[a, a] += 1j * gamma
    H[b, b] -= 1j * gamma
    for j in range(L):
        if j == 0 and not periodic:
            continue
        jm = (j - 1) % L
        tj, dj = t[j], delta[j]
        H[a[jm], a[j]] += 1j * tj
        H[a[j], a[jm]] += 1j * tj
        H[b[jm], b[j]] -= 1j * tj
        H[b[j], b[jm]] -= 1j * tj
        H[b[jm], a[j]] += 1j * dj
        H[a[j], b[jm]] += 1j * np.conj(dj)
        H[b[j], a[jm]] -= 1j * dj
        H[a[jm], b[j]] -= 1j * np.conj(dj)
    return H


def build_nhti_chain(t, delta, gamma, L, boundary="open"):
    """Finite NHTI chain in the basis ``(a_1, b_1, a_2, b_2, ...)``.

    With open boundaries the delta terms that would reach outside the chain
    are dropped.
    """
    _check_hopping(t=t)
    _check_sites(L=L)
    L = int(L)
    periodic = _periodic(boundary)
    H = _nhti_matrix(
        np.full(L, float(t)), np.full(L, complex(delta)), np.full(L, float(gamma)), periodic
    )
    return RealSpaceModel(
        kind="nhti",
        geometry=Geometry.chain(L),
        internal_dim=2,
        matrix=H,
        boundary=(boundary,),
        params={"t": float(t), "delta": complex(delta), "gamma": float(gamma), "L": L},
    )


def _periodic(boundary):
    if boundary not in ("open", "periodic"):
        raise ValueError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    return boundary == "periodic"


# ---------------------------------------------------------------------------
# NH Majorana chain (class D)
# ---------------------------------------------------------------------------

def majorana_particle_hole():
    """BdG particle-hole symmetry ``sigma_x H^T(-k) sigma_x = -H(k)``."""
    return AntiUnitarySymmetry(SX, conjugates=False, transpose=True, phase_phi=np.pi, square_sign=1, name="C")


def build_majorana(tL, tR, Delta, mu):
    """BdG Bloch Hamiltonian of the Majorana chain with asymmetric hopping.

    ``H(k) = h_0 + h . sigma`` with ``h_0 = i (tL - tR) sin k``,
    ``h_x = 2 Im(Delta) sin k``, ``h_y = -2 Re(Delta) sin k`` and
    ``h_z = mu + (tL + tR) cos k``.
    """
    _check_hopping(tL=tL, tR=tR)
    tL, tR, mu = float(tL), float(tR), float(mu)
    Delta = complex(Delta)

    def mats(ks):
        k = ks[:, 0]
        s, c = np.sin(k), np.cos(k)
        return _pauli_stack(
            1j * (tL - tR) * s, 2 * Delta.imag * s + 0j, -2 * Delta.real * s + 0j, mu + (tL + tR) * c + 0j
        )

    def disp(ks):
        k = ks[:, 0]
        h0 = 1j * (tL - tR) * np.sin(k)
        r = np.sqrt(4 * abs(Delta) ** 2 * np.sin(k) ** 2 + (mu + (tL + tR) * np.cos(k)) ** 2)
        return np.stack([h0 - r, h0 + r], axis=1)

    return BlochHamiltonian(
        kind="majorana",
        spatial_dim=1,
        band_count=2,
        matrices_fn=mats,
        params={"tL": tL, "tR": tR, "Delta": Delta, "mu": mu},
        analytic_fn=disp,
        symmetries={"C": majorana_particle_hole()},
    )


def _majorana_matrix(tL, tR, Delta, mu, periodic):
    """BdG chain from per-bond ``tL_j, tR_j`` (bond ``j -> j+1``) and per-site ``mu_j``."""
    L = mu.shape[0]
    H = np.zeros((2 * L, 2 * L), dtype=complex)
    Dc = np.conj(Delta)
    for j in range(L):
        H[2 * j:2 * j + 2, 2 * j:2 * j + 2] = mu[j] * SZ
    for j in range(L if periodic else L - 1):
        jp = (j + 1) % L
        fwd = np.array([[tL[j], Dc], [-Delta, -tR[j]]])
        bwd = np.array([[tR[j], -Dc], [Delta, -tL[j]]])
        H[2 * j:2 * j + 2, 2 * jp:2 * jp + 2] += fwd
        H[2 * jp:2 * jp + 2, 2 * j:2 * j + 2] += bwd
    return H


def build_majorana_chain(tL, tR, Delta, mu, L, boundary="open"):
    """Finite BdG chain in the particle-hole basis ``(c_1, c_1^+, c_2, c_2^+, ...)``."""
    _check_hopping(tL=tL, tR=tR)
    _check_sites(L=L)
    L = int(L)
    H = _majorana_matrix(
        np.full(L, float(tL)), np.full(L, float(tR)), complex(Delta), np.full(L, float(mu)), _periodic(boundary)
    )
    return RealSpaceModel(
        kind="majorana",
        geometry=Geometry.chain(L),
        internal_dim=2,
        matrix=H,
        boundary=(boundary,),
        params={"tL": float(tL), "tR": float(tR), "Delta": complex(Delta), "mu": float(mu), "L": L},
    )


# ---------------------------------------------------------------------------
# NH quantum spin Hall insulator (class AII with inversion)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiracAlgebra:
    """Five 4x4 Dirac matrices and their commutators ``[G_i, G_j] / 2i``.

    ``gamma[i - 1]`` is ``G_i``; ``gamma_comm[(i, j)]`` is ``G_ij`` for
    ``1 <= i < j <= 5``.
    """

    gamma: tuple
    gamma_comm: dict
    P: np.ndarray
    T_unitary: np.ndarray

    def comm(self, i, j):
        if i == j:
            return np.zeros((4, 4), dtype=complex)
        if i < j:
            return self.gamma_comm[(i, j)]
        return -self.gamma_comm[(j, i)]

    def G(self, i):
        return self.gamma[i - 1]


def _anti(a, b):
    return a @ b + b @ a


def build_dirac_algebra():
    """Dirac matrices ``s_z x I, s_y x I, s_x x s_x, s_x x s_y, s_x x s_z``."""
    g = (
        np.kron(SZ, S0),
        np.kron(SY, S0),
        np.kron(SX, SX),
        np.kron(SX, SY),
        np.kron(SX, SZ),
    )
    comm = {}
    for i in range(1, 6):
        for j in range(i + 1, 6):
            a, b = g[i - 1], g[j - 1]
            comm[(i, j)] = (a @ b - b @ a) / 2j
    alg = DiracAlgebra(gamma=g, gamma_comm=comm, P=np.kron(SZ, S0), T_unitary=np.kron(S0, 1j * SY))
    _verify_dirac(alg)
    return alg


def _verify_dirac(alg, tol=1e-14):
    eye = np.eye(4)
    for i in range(1, 6):
        for j in range(1, 6):
            want = 2 * eye if i == j else 0 * eye
            if np.max(np.abs(_anti(alg.G(i), alg.G(j)) - want)) > tol:
                raise RuntimeError(f"Clifford relation fails for ({i}, {j})")
    c25 = alg.comm(2, 5)
    checks = [
        (_anti(alg.G(1), c25), -2 * alg.comm(3, 4)),
        (_anti(alg.G(3), c25), 2 * alg.comm(1, 4)),
        (_anti(alg.G(2), c25), 0 * eye),
        (_anti(alg.G(5), c25), 0 * eye),
    ]
    for lhs, rhs in checks:
        if np.max(np.abs(lhs - rhs)) > tol:
            raise RuntimeError("commutator identities fail")


_ALG = build_dirac_algebra()
G1, G2, G3, G4, G5 = _ALG.gamma
G25 = _ALG.comm(2, 5)


def qsh_time_reversal():
    """``T = (I x i s_y) K`` with ``T^2 = -1``."""
    return AntiUnitarySymmetry(_ALG.T_unitary, conjugates=True, phase_phi=0.0, square_sign=-1, name="T")


def qsh_inversion():
    """Inversion ``P = s_z x I``, acting as ``P H(-k) P^-1 = H(k)``."""
    return AntiUnitarySymmetry(_ALG.P, conjugates=False, phase_phi=0.0, name="P")


def qsh_dispersion(ks, t, m, lam, gamma):
    """Closed-form QSH eigenvalues ``+-sqrt(A +- 2 i gamma sqrt(d1^2 + d3^2))``.

    ``A = d1^2 + d2^2 + d3^2 + d5^2 - gamma^2``. Returns shape (N, 4).
    """
    kx, ky = ks[:, 0], ks[:, 1]
    d1 = m + t * np.cos(kx) + t * np.cos(ky)
    d2 = t * np.sin(ky)
    d3 = lam * (np.sin(kx) + np.sin(ky))
    d5 = t * np.sin(kx)
    A = d1 ** 2 + d2 ** 2 + d3 ** 2 + d5 ** 2 - gamma ** 2
    B = 2j * gamma * np.sqrt(d1 ** 2 + d3 ** 2)
    r1, r2 = np.sqrt(A + B + 0j), np.sqrt(A - B + 0j)
    return np.stack([r1, -r1, r2, -r2], axis=1)


def build_qsh(t, m, lam, gamma):
    """Four-band Bloch Hamiltonian ``d1 G1 + d2 G2 + d3 G3 + d5 G5 + i gamma G25``."""
    t, m, lam, gamma = float(t), float(m), float(lam), float(gamma)

    def mats(ks):
        kx, ky = ks[:, 0], ks[:, 1]
        d1 = m + t * np.cos(kx) + t * np.cos(ky)
        d2 = t * np.sin(ky)
        d3 = lam * (np.sin(kx) + np.sin(ky))
        d5 = t * np.sin(kx)
        return (
            d1[:, None, None] * G1
            + d2[:, None, None] * G2
            + d3[:, None, None] * G3
            + d5[:, None, None] * G5
            + 1j * gamma * G25[None]
        )

    return BlochHamiltonian(
        kind="qsh",
        spatial_dim=2,
        band_count=4,
        matrices_fn=mats,
        params={"t": t, "m": m, "lam": lam, "gamma": gamma},
        analytic_fn=lambda ks: qsh_dispersion(ks, t, m, lam, gamma),
        symmetries={"T": qsh_time_reversal(), "P": qsh_inversion()},
    )


def _qsh_x_hop(t, lam):
    return 0.5 * (t * (G1 - 1j * G5) - 1j * lam * G3)


def _qsh_y_hop(t, lam):
    return 0.5 * (t * (G1 - 1j * G2) - 1j * lam * G3)


def _qsh_cylinder_matrix(t, m, lam, gamma, ky, periodic):
    Lx = m.shape[0]
    H = np.zeros((4 * Lx, 4 * Lx), dtype=complex)
    c, s = np.cos(ky), np.sin(ky)
    ZZ = np.kron(SZ, SZ)
    for x in range(Lx):
        H[4 * x:4 * x + 4, 4 * x:4 * x + 4] = (
            (m[x] + t * c) * G1 + t * s * G2 + lam[x] * s * G3 - 1j * gamma[x] * ZZ
        )
    for x in range(Lx if periodic else Lx - 1):
        xp = (x + 1) % Lx
        T = _qsh_x_hop(t, lam[x])
        H[4 * x:4 * x + 4, 4 * xp:4 * xp + 4] += T
        H[4 * xp:4 * xp + 4, 4 * x:4 * x + 4] += T.conj().T
    return H


def build_qsh_cylinder(t, m, lam, gamma, Lx, ky, boundary="open"):
    """QSH strip, open (or periodic) along x and Fourier-transformed along y."""
    _check_sites(Lx=Lx)
    Lx = int(Lx)
    H = _qsh_cylinder_matrix(
        float(t), np.full(Lx, float(m)), np.full(Lx, float(lam)), np.full(Lx, float(gamma)), float(ky), _periodic(boundary)
    )
    return RealSpaceModel(
        kind="qsh_cylinder",
        geometry=Geometry.cylinder(Lx, ky),
        internal_dim=4,
        matrix=H,
        boundary=(boundary, "periodic"),
        params={"t": float(t), "m": float(m), "lam": float(lam), "gamma": float(gamma), "Lx": Lx, "ky": float(ky)},
    )


def _qsh_rectangle_matrix(t, m, lam, gamma, periodic=(False, False)):
    Lx, Ly = m.shape
    n = Lx * Ly
    H = np.zeros((4 * n, 4 * n), dtype=complex)
    ZZ = np.kron(SZ, SZ)

    def idx(x, y):
        return 4 * (x * Ly + y)

    for x in range(Lx):
        for y in range(Ly):
            i = idx(x, y)
            H[i:i + 4, i:i + 4] = m[x, y] * G1 - 1j * gamma[x, y] * ZZ
            if x + 1 < Lx or periodic[0]:
                j = idx((x + 1) % Lx, y)
                T = _qsh_x_hop(t, lam[x, y])
                H[i:i + 4, j:j + 4] += T
                H[j:j + 4, i:i + 4] += T.conj().T
            if y + 1 < Ly or periodic[1]:
                j = idx(x, (y + 1) % Ly)
                T = _qsh_y_hop(t, lam[x, y])
                H[i:i + 4, j:j + 4] += T
                H[j:j + 4, i:i + 4] += T.conj().T
    return H


def build_qsh_rectangle(t, m, lam, gamma, Lx, Ly, boundary=("open", "open")):
    """QSH flake with site index ``x * Ly + y`` and four internal components."""
    _check_sites(Lx=Lx, Ly=Ly)
    Lx, Ly = int(Lx), int(Ly)
    shape = (Lx, Ly)
    per = tuple(_periodic(b) for b in boundary)
    H = _qsh_rectangle_matrix(
        float(t), np.full(shape, float(m)), np.full(shape, float(lam)), np.full(shape, float(gamma)), per
    )
    return RealSpaceModel(
        kind="qsh_rectangle",
        geometry=Geometry.rectangle(Lx, Ly),
        internal_dim=4,
        matrix=H,
        boundary=tuple(boundary),
        params={"t": float(t), "m": float(m), "lam": float(lam), "gamma": float(gamma), "Lx": Lx, "Ly": Ly},
    )


# ---------------------------------------------------------------------------
# Disorder
# ---------------------------------------------------------------------------

DISORDER_SLOTS = {
    "nhti": {"t": 0, "delta": 1, "gamma": 2},
    "majorana": {"tL": 0, "tR": 1, "mu": 2},
    "qsh_cylinder": {"m": 0, "lam": 1, "gamma": 2},
    "qsh_rectangle": {"m": 0, "lam": 1, "gamma": 2},
}


def disorder_stream(seed, realization, slot, shape):
    """Uniform variates on ``[-0.5, 0.5)`` keyed by ``(seed, realization, slot)``.

    A counter-based Philox generator is seeded from a ``SeedSequence`` whose
    spawn key is ``(realization, slot)``, so entry ``j`` of the stream is the
    same no matter which other realizations or slots are drawn, or in what
    order.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(realization), int(slot)))
    rng = np.random.Generator(np.random.Philox(ss))
    return rng.uniform(-0.5, 0.5, size=shape)


def _disordered_field(base, amp, seed, realization, slot, shape):
    if amp == 0:
        return np.full(shape, base)
    return base + amp * disorder_stream(seed, realization, slot, shape)


def build_disordered(model_kind, params, disorder_spec, seed, realization=0):
    """Finite lattice with uniformly distributed parameter disorder.

    Parameters
    ----------
    model_kind : {"nhti", "majorana", "qsh_cylinder", "qsh_rectangle"}
    params : mapping
        Base parameters plus sizes (``L`` for chains, ``Lx`` and ``ky`` for
        cylinders, ``Lx`` and ``Ly`` for rectangles). Optional ``boundary``.
    disorder_spec : mapping
        ``{name: amplitude}``; each named parameter becomes
        ``base + amplitude * eps`` with independent ``eps`` per site or bond.
    seed, realization : int
        Stream key; the same key always yields the same matrix.
    """
    if model_kind not in DISORDER_SLOTS:
        raise UnknownModelKind(f"unknown model kind {model_kind!r}")
    slots = DISORDER_SLOTS[model_kind]
    for name in disorder_spec:
        if name not in slots:
            raise ValueError(f"{model_kind} has no disorderable parameter {name!r}")
    amp = {k: float(disorder_spec.get(k, 0.0)) for k in slots}
    p = dict(params)

    def field(name, base, shape):
        return _disordered_field(base, amp[name], seed, realization, slots[name], shape)

    if model_kind == "nhti":
        _check_hopping(t=p["t"])
        L = int(p["L"])
        _check_sites(L=L)
        boundary = p.get("boundary", "open")
        H = _nhti_matrix(
            field("t", float(p["t"]), L),
            field("delta", complex(p["delta"]), L).astype(complex),
            field("gamma", float(p["gamma"]), L),
            _periodic(boundary),
        )
        geom, idim, bnd = Geometry.chain(L), 2, (boundary,)
    elif model_kind == "majorana":
        _check_hopping(tL=p["tL"], tR=p["tR"])
        L = int(p["L"])
        _check_sites(L=L)
        boundary = p.get("boundary", "open")
        H = _majorana_matrix(
            field("tL", float(p["tL"]), L),
            field("tR", float(p["tR"]), L),
            complex(p["Delta"]),
            field("mu", float(p["mu"]), L),
            _periodic(boundary),
        )
        geom, idim, bnd = Geometry.chain(L), 2, (boundary,)
    elif model_kind == "qsh_cylinder":
        Lx = int(p["Lx"])
        _check_sites(Lx=Lx)
        boundary = p.get("boundary", "open")
        H = _qsh_cylinder_matrix(
            float(p["t"]),
            field("m", float(p["m"]), Lx),
            field("lam", float(p["lam"]), Lx),
            field("gamma", float(p["gamma"]), Lx),
            float(p["ky"]),
            _periodic(boundary),
        )
        geom, idim, bnd = Geometry.cylinder(Lx, p["ky"]), 4, (boundary, "periodic")
    else:
        Lx, Ly = int(p["Lx"]), int(p["Ly"])
        _check_sites(Lx=Lx, Ly=Ly)
        shape = (Lx, Ly)
        H = _qsh_rectangle_matrix(
            float(p["t"]),
            field("m", float(p["m"]), shape),
            field("lam", float(p["lam"]), shape),
            field("gamma", float(p["gamma"]), shape),
        )
        geom, idim, bnd = Geometry.rectangle(Lx, Ly), 4, ("open", "open")
    return RealSpaceModel(
        kind=model_kind,
        geometry=geom,
        internal_dim=idim,
        matrix=H,
        boundary=bnd,
        params={**p, "disorder": dict(amp)},
        disorder_seed=int(seed),
        realization=int(realization),
    )


# ---------------------------------------------------------------------------
# Three-level system and continuum Dirac model
# ---------------------------------------------------------------------------

def build_three_level(Omega, gamma1, gamma2):
    """Driven three-level matrix in the basis ``(e1, g, e2)``."""
    if gamma1 < 0 or gamma2 < 0:
        raise ValueError("loss rates must be nonnegative")
    O = float(Omega)
    return 0.5 * np.array(
        [[-1j * gamma1, O, 0], [O, 0, O], [0, O, -1j * gamma2]], dtype=complex
    )


@dataclass(frozen=True)
class ContinuumDiracParams:
    """Parameters of ``(k + i g) s_x + (m + i delta) s_y``.

    A single region uses ``g, m, delta``; a domain wall uses the ``_plus``
    fields for ``x > 0`` and the ``_minus`` fields for ``x < 0``.
    """

    g_plus: float = 0.0
    m_plus: float = 1.0
    delta_plus: float = 0.0
    g_minus: Optional[float] = None
    m_minus: Optional[float] = None
    delta_minus: Optional[float] = None

    @classmethod
    def single(cls, g, m, delta):
        return cls(g_plus=g, m_plus=m, delta_plus=delta)

    @classmethod
    def wall(cls, g_plus, m_plus, delta_plus, g_minus, m_minus, delta_minus):
        return cls(g_plus, m_plus, delta_plus, g_minus, m_minus, delta_minus)

    @property
    def two_region(self):
        return self.m_minus is not None

    @property
    def g(self):
        return self.g_plus

    @property
    def m(self):
        return self.m_plus

    @property
    def delta(self):
        return self.delta_plus

    def region(self, side):
        if side == "+":
            return self.g_plus, self.m_plus, self.delta_plus
        if not self.two_region:
            raise ValueError("single-region parameters have no minus side")
        return (self.g_minus or 0.0), self.m_minus, (self.delta_minus or 0.0)

    def gapped(self):
        sides = ("+", "-") if self.two_region else ("+",)
        return all(abs(self.region(s)[1]) > abs(self.region(s)[0]) for s in sides)


def dirac_continuum(k, p):
    """``H(k) = (k + i g) s_x + (m + i delta) s_y`` for one region."""
    return (k + 1j * p.g) * SX + (p.m + 1j * p.delta) * SY


def dirac_chiral():
    """Chiral operator ``S = s_z``."""
    return AntiUnitarySymmetry(SZ, conjugates=False, phase_phi=np.pi, name="S")


def build_dirac_bloch(p):
    """Continuum Dirac model wrapped as a (non-periodic) one-dimensional map."""

    def mats(ks):
        k = ks[:, 0]
        return (k + 1j * p.g)[:, None, None] * SX + (p.m + 1j * p.delta) * SY

    def disp(ks):
        k = ks[:, 0]
        r = np.sqrt((k + 1j * p.g) ** 2 + (p.m + 1j * p.delta) ** 2)
        return np.stack([-r, r], axis=1)

    return BlochHamiltonian(
        kind="dirac",
        spatial_dim=1,
        band_count=2,
        matrices_fn=mats,
        params={"g": p.g, "m": p.m, "delta": p.delta},
        analytic_fn=disp,
        symmetries={"S": dirac_chiral()},
    )
