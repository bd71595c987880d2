"""Container types shared across modules: Bloch maps, finite lattices, grids."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional

import numpy as np


def bz_grid(n, dim=1):
    """Symmetric Brillouin-zone grid with ``n`` points per direction.

    The grid is ``linspace(-pi, pi, n)`` along each axis, so it is closed
    under ``k -> -k`` and contains both TRIMs whenever ``n`` is odd.

    Returns
    -------
    ndarray, shape (n**dim, dim)
    """
    if n < 2:
        raise ValueError("grid needs at least two points per direction")
    axis = np.linspace(-np.pi, np.pi, int(n))
    if dim == 1:
        return axis[:, None]
    if dim == 2:
        kx, ky = np.meshgrid(axis, axis, indexing="ij")
        return np.column_stack([kx.ravel(), ky.ravel()])
    raise ValueError("spatial dimension must be 1 or 2")


def as_kpoints(k, dim):
    """Coerce ``k`` (scalar, vector or array of vectors) to shape (N, dim)."""
    arr = np.asarray(k, dtype=float)
    if dim == 1:
        return arr.reshape(-1, 1)
    if arr.ndim == 1:
        if arr.shape[0] != dim:
            raise ValueError(f"expected a {dim}-component wavevector")
        return arr[None, :]
    return arr.reshape(-1, dim)


@dataclass(frozen=True)
class BlochHamiltonian:
    """Momentum-space Hamiltonian ``k -> H(k)``.

    Attributes
    ----------
    kind : str
        Model family identifier ("nhti", "majorana", "qsh", ...).
    spatial_dim : int
        1 or 2.
    band_count : int
        Size of each ``H(k)``.
    matrices_fn : callable
        Maps an (N, spatial_dim) array of wavevectors to an (N, b, b) stack.
    params : mapping
        Model parameters.
    analytic_fn : callable, optional
        Maps wavevectors to an (N, b) array of closed-form eigenvalues.
    phase : float
        Accumulated unification phase; the stored map equals
        ``exp(-i phase / 2) H_0(k)`` for the undeformed model ``H_0``.
    symmetries : mapping
        Declared symmetry operators keyed by role ("T", "C", "P", "S").
    """

    kind: str
    spatial_dim: int
    band_count: int
    matrices_fn: Callable[[np.ndarray], np.ndarray]
    params: Mapping = field(default_factory=dict)
    analytic_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    phase: float = 0.0
    symmetries: Mapping = field(default_factory=dict)

    def matrices(self, ks):
        """Stack of Bloch matrices at the wavevectors ``ks``."""
        return self.matrices_fn(as_kpoints(ks, self.spatial_dim))

    def evaluate(self, k):
        """Bloch matrix at a single wavevector."""
        return self.matrices(k)[0]

    def analytic_dispersion(self, ks):
        """Closed-form eigenvalues at ``ks``, shape (N, band_count)."""
        if self.analytic_fn is None:
            raise NotImplementedError(f"no closed-form dispersion for {self.kind}")
        return self.analytic_fn(as_kpoints(ks, self.spatial_dim))

    def with_changes(self, **kw):
        return replace(self, **kw)


@dataclass(frozen=True)
class Geometry:
    """Lattice geometry: ``chain(L)``, ``cylinder(Lx, ky)`` or ``rectangle(Lx, Ly)``."""

    kind: str
    shape: tuple
    ky: Optional[float] = None

    @property
    def n_sites(self):
        return int(np.prod(self.shape))

    @staticmethod
    def chain(L):
        return Geometry("chain", (int(L),))

    @staticmethod
    def cylinder(Lx, ky):
        return Geometry("cylinder", (int(Lx),), float(ky))

    @staticmethod
    def rectangle(Lx, Ly):
        return Geometry("rectangle", (int(Lx), int(Ly)))


@dataclass(frozen=True)
class RealSpaceModel:
    """Finite-lattice Hamiltonian.

    Basis ordering is site-major: row ``s * internal_dim + alpha`` holds
    internal component ``alpha`` of site ``s``. For rectangles the site index
    is ``s = x * Ly + y``.
    """

    kind: str
    geometry: Geometry
    internal_dim: int
    matrix: np.ndarray
    boundary: tuple
    params: Mapping = field(default_factory=dict)
    disorder_seed: Optional[int] = None
    realization: Optional[int] = None

    def __post_init__(self):
        dim = self.geometry.n_sites * self.internal_dim
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match {dim} basis states")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def cell_weights(self, vectors):
        """Per-site weights of column vectors, shape (n_sites, n_vectors)."""
        v = np.asarray(vectors)
        if v.ndim == 1:
            v = v[:, None]
        w = np.abs(v) ** 2
        return w.reshape(self.geometry.n_sites, self.internal_dim, -1).sum(axis=1)
