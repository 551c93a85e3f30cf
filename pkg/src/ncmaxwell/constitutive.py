"""Pointwise constitutive relations of theta-deformed Maxwell theory.

All maps are first order in the deformation vector ``theta`` and are
evaluated exactly as written; nothing is re-expanded.  Vector arguments have
the component index first, so the functions work equally on a single
3-vector and on lattice fields of shape ``(3, Nx, Ny, Nz)``.

Conventions: ``B = curl A``, ``pi = -D``, Lorentz-Heaviside units with
``c = hbar = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_LEVI_CIVITA = np.zeros((3, 3, 3))
_LEVI_CIVITA[0, 1, 2] = _LEVI_CIVITA[1, 2, 0] = _LEVI_CIVITA[2, 0, 1] = 1.0
_LEVI_CIVITA[0, 2, 1] = _LEVI_CIVITA[2, 1, 0] = _LEVI_CIVITA[1, 0, 2] = -1.0


@dataclass(frozen=True)
class ThetaParams:
    """Space-space non-commutativity, stored as its dual vector.

    Only ``theta_ij`` with spatial indices enters; the time-space components
    are zero by construction.
    """

    theta: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        t = tuple(float(x) for x in self.theta)
        if len(t) != 3 or not all(np.isfinite(t)):
            raise ValueError(f"theta must be three finite reals, got {self.theta!r}")
        object.__setattr__(self, "theta", t)

    @classmethod
    def from_tensor(cls, theta_jk) -> "ThetaParams":
        """Build from an antisymmetric spatial 3x3 tensor: ``theta_i = eps_ijk theta_jk / 2``."""
        t = np.asarray(theta_jk, dtype=float)
        if t.shape != (3, 3) or not np.allclose(t, -t.T):
            raise ValueError("theta tensor must be an antisymmetric 3x3 array")
        return cls(tuple(0.5 * np.einsum("ijk,jk->i", _LEVI_CIVITA, t)))

    def tensor(self) -> np.ndarray:
        return np.einsum("ijk,k->ij", _LEVI_CIVITA, self.vector)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.theta)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.theta))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.theta, dtype=dtype)

    def smallness(self, E, B) -> float:
        """``|theta| * max(|E|, |B|)**2``; first-order truncation wants this << 1."""
        emax = np.max(np.sqrt(_dot(E, E)), initial=0.0)
        bmax = np.max(np.sqrt(_dot(B, B)), initial=0.0)
        return self.norm * max(emax, bmax) ** 2


@dataclass
class EBFields:
    E: np.ndarray
    B: np.ndarray


@dataclass
class DerivedFields:
    D: np.ndarray
    H: np.ndarray
    d: np.ndarray
    h: np.ndarray
    lagrangian_density: np.ndarray
    energy_density: np.ndarray


def _theta(theta) -> np.ndarray:
    t = np.asarray(theta, dtype=float)
    if t.shape != (3,):
        raise ValueError(f"theta must be a 3-vector, got shape {t.shape}")
    return t


def _dot(a, b):
    return np.sum(np.asarray(a) * np.asarray(b), axis=0)


def _bcast(t, like):
    # theta as a vector field compatible with `like`
    return t.reshape((3,) + (1,) * (np.ndim(like) - 1))


def lagrangian_density(E, B, theta):
    """``(E^2 - B^2)(1 + theta.B)/2 - (theta.E)(E.B)``."""
    t = _theta(theta)
    tv = _bcast(t, E)
    return 0.5 * (_dot(E, E) - _dot(B, B)) * (1.0 + _dot(tv, B)) - _dot(tv, E) * _dot(E, B)


def energy_density(E, B, theta):
    """``(E^2 + B^2)(1 + theta.B)/2 - (theta.E)(E.B)``."""
    t = _theta(theta)
    tv = _bcast(t, E)
    return 0.5 * (_dot(E, E) + _dot(B, B)) * (1.0 + _dot(tv, B)) - _dot(tv, E) * _dot(E, B)


def displacement(E, B, theta):
    """Return ``(D, d)`` with ``d = (theta.B)E - (theta.E)B - (E.B)theta`` and ``D = E + d``."""
    t = _theta(theta)
    tv = _bcast(t, E)
    d = _dot(tv, B) * E - _dot(tv, E) * B - _dot(E, B) * tv
    return E + d, d


def magnetic_h(E, B, theta):
    """Return ``(H, h)`` with ``h = (theta.B)B + (theta.E)E - (E^2 - B^2)theta/2``."""
    t = _theta(theta)
    tv = _bcast(t, E)
    h = _dot(tv, B) * B + _dot(tv, E) * E - 0.5 * (_dot(E, E) - _dot(B, B)) * tv
    return B + h, h


def momentum_from_fields(E, B, theta):
    """Canonical momentum conjugate to ``A``; identical to ``-D``."""
    t = _theta(theta)
    tv = _bcast(t, E)
    return -E * (1.0 + _dot(tv, B)) + _dot(tv, E) * B + _dot(E, B) * tv


def electric_from_momentum(pi, B, theta):
    """First-order inverse of :func:`momentum_from_fields`.

    The round trip ``E -> pi -> E`` is off by a term exactly quadratic in theta.
    """
    t = _theta(theta)
    tv = _bcast(t, pi)
    return -pi * (1.0 - _dot(tv, B)) - _dot(tv, pi) * B - _dot(pi, B) * tv


def hamiltonian_density(pi, B, theta):
    """Canonical Hamiltonian density in terms of ``(pi, B)``.

    ``(pi^2 + B^2)/2 + (theta.B)(B^2 - pi^2)/2 + (theta.pi)(pi.B)``.  The
    multiplier terms that generate gauge transformations are left out; they
    vanish on the constraint surface.
    """
    t = _theta(theta)
    tv = _bcast(t, pi)
    p2 = _dot(pi, pi)
    b2 = _dot(B, B)
    return 0.5 * (p2 + b2) + 0.5 * _dot(tv, B) * (b2 - p2) + _dot(tv, pi) * _dot(pi, B)


def magnetic_h_canonical(pi, B, theta):
    """``dH/dB`` of :func:`hamiltonian_density`: the H field written in ``(pi, B)``.

    Agrees with :func:`magnetic_h` evaluated at ``E(pi, B)`` to first order in theta.
    """
    t = _theta(theta)
    tv = _bcast(t, pi)
    return B * (1.0 + _dot(tv, B)) + 0.5 * (_dot(B, B) - _dot(pi, pi)) * tv + pi * _dot(pi, tv)


def velocity_canonical(pi, B, theta):
    """``dH/dpi`` of :func:`hamiltonian_density`; equals ``-E(pi, B)`` exactly."""
    t = _theta(theta)
    tv = _bcast(t, pi)
    return pi * (1.0 - _dot(tv, B)) + _dot(B, pi) * tv + _dot(pi, tv) * B


def derive(E, B, theta) -> DerivedFields:
    D, d = displacement(E, B, theta)
    H, h = magnetic_h(E, B, theta)
    return DerivedFields(
        D=D,
        H=H,
        d=d,
        h=h,
        lagrangian_density=lagrangian_density(E, B, theta),
        energy_density=energy_density(E, B, theta),
    )


def lagrangian_density_covariant(E, B, theta):
    """Lagrangian from the antisymmetric field-strength tensor form.

    Builds the Euclidean ``F_{mu nu}`` (``mu = 4`` the imaginary time axis)
    from ``E`` and ``B`` and evaluates
    ``-F^2/4 + theta_ab F_ab F^2/8 - theta_ab F_ma F_nb F_mn / 2`` with
    ``theta_{i4} = 0``.  Here ``F_jk = eps_jkl B_l`` so that ``B = curl A``.
    Used only to cross-check :func:`lagrangian_density`.
    """
    E = np.asarray(E, dtype=complex)
    B = np.asarray(B, dtype=complex)
    t = _theta(theta)
    shape = E.shape[1:]
    F = np.zeros((4, 4) + shape, dtype=complex)
    F[:3, :3] = np.einsum("jkl,l...->jk...", _LEVI_CIVITA, B)
    # E_i = i F_i4
    F[:3, 3] = -1j * E
    F[3, :3] = 1j * E
    th = np.zeros((4, 4))
    th[:3, :3] = np.einsum("ijk,k->ij", _LEVI_CIVITA, t)
    F2 = np.einsum("mn...,mn...->...", F, F)
    thF = np.einsum("ab,ab...->...", th, F)
    cubic = np.einsum("ab,ma...,nb...,mn...->...", th, F, F, F)
    L = -0.25 * F2 + 0.125 * thF * F2 - 0.5 * cubic
    return L.real
