"""Periodic cubic lattice and collocated central-difference operators.

Scalar fields are arrays of shape ``(Nx, Ny, Nz)``; vector fields carry the
component index first, shape ``(3, Nx, Ny, Nz)``.  Every derivative is the
two-point central difference ``(f(x+h) - f(x-h)) / 2h`` with periodic wrap,
so ``div(curl v) == 0`` and ``curl(grad f) == 0`` hold up to round-off and
``laplacian`` is literally ``div(grad f)``.  The Fourier symbol of the
derivative along axis ``i`` is ``1j * kappa_i`` with ``kappa_i = sin(k_i h)/h``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NonZeroMean

_AXES = (1, 2, 3)


@dataclass(frozen=True)
class LatticeSpec:
    """Uniform periodic grid with ``dims`` cells per axis and spacing ``spacing``."""

    dims: tuple[int, int, int]
    spacing: float = 1.0

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if len(dims) != 3:
            raise ValueError(f"dims must have three entries, got {self.dims!r}")
        if min(dims) < 1:
            raise ValueError(f"all dims must be >= 1, got {dims}")
        if max(dims) < 4:
            raise ValueError(f"at least one dimension must be >= 4, got {dims}")
        if not (np.isfinite(self.spacing) and self.spacing > 0):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.dims

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.dims))

    @property
    def cell_volume(self) -> float:
        return self.spacing**3

    @property
    def lengths(self) -> tuple[float, float, float]:
        return tuple(n * self.spacing for n in self.dims)

    def coordinates(self) -> np.ndarray:
        """Site positions, shape ``(3, Nx, Ny, Nz)``."""
        axes = [np.arange(n) * self.spacing for n in self.dims]
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Continuum wavenumbers ``k_i`` of each FFT mode, shape ``(3, Nx, Ny, Nz)``."""
        ks = [2 * np.pi * np.fft.fftfreq(n, d=self.spacing) for n in self.dims]
        return np.stack(np.meshgrid(*ks, indexing="ij"))

    @cached_property
    def symbol(self) -> np.ndarray:
        """Central-difference symbol ``kappa_i = sin(k_i h)/h`` per mode.

        Entries that vanish analytically (k = 0 and, on even axes, the
        Nyquist mode) are set to exactly zero.
        """
        kappas = []
        for n in self.dims:
            m = np.arange(n)
            kap = np.sin(2 * np.pi * m / n) / self.spacing
            kap[(2 * m) % n == 0] = 0.0
            kappas.append(kap)
        return np.stack(np.meshgrid(*kappas, indexing="ij"))

    @cached_property
    def kappa_sq(self) -> np.ndarray:
        return np.sum(self.symbol**2, axis=0)

    @cached_property
    def null_modes(self) -> np.ndarray:
        """Boolean mask of modes annihilated by the central-difference Laplacian."""
        return self.kappa_sq == 0.0

    def zeros_scalar(self) -> np.ndarray:
        return np.zeros(self.dims)

    def zeros_vector(self) -> np.ndarray:
        return np.zeros((3, *self.dims))

    def check_scalar(self, f, name="field") -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != self.dims:
            raise ValueError(f"{name} has shape {f.shape}, expected {self.dims}")
        if not np.all(np.isfinite(f)):
            raise ValueError(f"{name} contains non-finite values")
        return f

    def check_vector(self, v, name="field") -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (3, *self.dims):
            raise ValueError(f"{name} has shape {v.shape}, expected {(3, *self.dims)}")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"{name} contains non-finite values")
        return v


def partial(f: np.ndarray, axis: int, lattice: LatticeSpec) -> np.ndarray:
    """Central difference of ``f`` along spatial ``axis`` (0, 1 or 2).

    ``f`` may carry leading component axes; the spatial axes are the last three.
    """
    ax = f.ndim - 3 + axis
    return (np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax)) / (2.0 * lattice.spacing)


def grad(f: np.ndarray, lattice: LatticeSpec) -> np.ndarray:
    return np.stack([partial(f, i, lattice) for i in range(3)])


def div(v: np.ndarray, lattice: LatticeSpec) -> np.ndarray:
    return partial(v[0], 0, lattice) + partial(v[1], 1, lattice) + partial(v[2], 2, lattice)


def curl(v: np.ndarray, lattice: LatticeSpec) -> np.ndarray:
    d = partial
    return np.stack(
        [
            d(v[2], 1, lattice) - d(v[1], 2, lattice),
            d(v[0], 2, lattice) - d(v[2], 0, lattice),
            d(v[1], 0, lattice) - d(v[0], 1, lattice),
        ]
    )


def laplacian(f: np.ndarray, lattice: LatticeSpec) -> np.ndarray:
    """Wide-stencil Laplacian, exactly ``div(grad(f))``."""
    return div(grad(f, lattice), lattice)


def laplacian_symbol(lattice: LatticeSpec) -> np.ndarray:
    """Eigenvalue of :func:`laplacian` on each Fourier mode: ``-sum_i kappa_i**2``."""
    return -lattice.kappa_sq


def null_space_amplitude(f: np.ndarray, lattice: LatticeSpec) -> float:
    """Largest per-site amplitude of ``f`` on the Laplacian null modes."""
    fk = np.fft.fftn(f)
    if not np.any(lattice.null_modes):
        return 0.0
    return float(np.max(np.abs(fk[lattice.null_modes]))) / lattice.n_sites


def inverse_laplacian(f: np.ndarray, lattice: LatticeSpec, tol: float = 1e-10) -> np.ndarray:
    """Spectral inverse of :func:`laplacian` on its range.

    The constant mode, and on even-sized axes the Nyquist modes that the
    central-difference stencil cannot see, carry no information about the
    preimage.  Inputs with a component there larger than ``tol`` times the
    field scale are rejected with :class:`NonZeroMean`; the output has no
    component on those modes.
    """
    f = np.asarray(f, dtype=float)
    scale = max(float(np.max(np.abs(f), initial=0.0)), np.finfo(float).tiny)
    fk = np.fft.fftn(f)
    null = lattice.null_modes
    mean = abs(fk[(0, 0, 0)].real) / lattice.n_sites
    if mean > tol * scale:
        raise NonZeroMean(f"mean {mean:.3e} exceeds tolerance {tol * scale:.3e}")
    residual = np.max(np.abs(fk[null]), initial=0.0) / lattice.n_sites
    if residual > tol * scale:
        raise NonZeroMean(
            f"component {residual:.3e} on Laplacian null modes exceeds tolerance {tol * scale:.3e}"
        )
    sym = laplacian_symbol(lattice)
    out = np.zeros_like(fk)
    out[~null] = fk[~null] / sym[~null]
    return np.fft.ifftn(out).real


def project_out_null_modes(f: np.ndarray, lattice: LatticeSpec) -> np.ndarray:
    """Remove the components of ``f`` on the Laplacian null modes."""
    fk = np.fft.fftn(f)
    fk[lattice.null_modes] = 0.0
    return np.fft.ifftn(fk).real


def projector_symbol(lattice: LatticeSpec) -> np.ndarray:
    """Transverse projector per mode, shape ``(3, 3, Nx, Ny, Nz)``.

    ``delta_ij - kappa_i kappa_j / |kappa|^2``; modes with ``kappa = 0`` get
    the identity.
    """
    kap = lattice.symbol
    k2 = lattice.kappa_sq
    safe = np.where(k2 > 0, k2, 1.0)
    outer = kap[:, None] * kap[None, :] / safe
    return np.eye(3)[:, :, None, None, None] - outer


def transverse_project(v: np.ndarray, lattice: LatticeSpec) -> np.ndarray:
    """Remove the longitudinal (gradient) part of a vector field.

    Applies ``v_k - kappa (kappa . v_k) / |kappa|^2`` mode by mode, so the
    result has zero central-difference divergence up to round-off.
    """
    vk = np.fft.fftn(v, axes=_AXES)
    kap = lattice.symbol
    k2 = lattice.kappa_sq
    safe = np.where(k2 > 0, k2, 1.0)
    vk = vk - kap * (np.sum(kap * vk, axis=0) / safe)
    return np.fft.ifftn(vk, axes=_AXES).real
