"""Numerical studies driven by the CLI: Legendre-map scaling and dispersion fits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constitutive as cst
from .dynamics import (
    FieldState,
    GaugeMode,
    coulomb_project,
    make_initial_state,
    parse_axis,
    step_rk4,
)
from .errors import FitFailure
from .lattice import LatticeSpec


def format_number(x: float) -> str:
    """17 significant digits: exact round trip for doubles."""
    return format(float(x), ".17g")


def theta_ladder(theta_max=1e-1, theta_min=1e-4, factor=0.5) -> np.ndarray:
    if not (theta_max > 0 and theta_min > 0 and 0 < factor < 1):
        raise ValueError("need theta_max, theta_min > 0 and 0 < factor < 1")
    out = []
    t = float(theta_max)
    while t >= theta_min * (1 - 1e-12):
        out.append(t)
        t *= factor
    return np.array(out)


def random_fields(lattice: LatticeSpec, seed: int, scale: float = 1.0):
    rng = np.random.default_rng(seed)
    E = scale * rng.standard_normal((3, *lattice.dims))
    B = scale * rng.standard_normal((3, *lattice.dims))
    return E, B


def legendre_residual(E, B, theta) -> float:
    """Max-norm of ``E(pi(E, B), B) - E``; exactly second order in theta."""
    pi = cst.momentum_from_fields(E, B, theta)
    return float(np.max(np.abs(cst.electric_from_momentum(pi, B, theta) - E), initial=0.0))


@dataclass
class LegendreRow:
    theta: float
    max_residual: float
    residual_over_theta_sq: float


def legendre_sweep(E, B, direction, thetas) -> list[LegendreRow]:
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    rows = []
    for t in thetas:
        r = legendre_residual(E, B, t * direction)
        rows.append(LegendreRow(float(t), r, r / t**2))
    return rows


def relative_spread(values) -> float:
    """``(max - min) / |mean|``; zero for an all-zero sequence."""
    v = np.asarray(values, dtype=float)
    mean = abs(np.mean(v))
    if mean == 0.0:
        return 0.0 if np.all(v == 0) else np.inf
    return float((v.max() - v.min()) / mean)


def mode_amplitude(field: np.ndarray, lattice: LatticeSpec, axis: int, mode: int) -> complex:
    idx = [0, 0, 0]
    idx[axis] = mode % lattice.dims[axis]
    return complex(np.fft.fftn(field)[tuple(idx)]) / lattice.n_sites


def fit_frequency(times, amplitudes, max_step=np.pi / 2) -> float:
    """Angular frequency from a least-squares line through the unwrapped phase.

    Amplitudes are assumed to rotate as ``exp(-i omega t)``.  Raises
    :class:`FitFailure` if there are fewer than three samples or if the
    phase advance between samples is too large to unwrap unambiguously.
    """
    t = np.asarray(times, dtype=float)
    z = np.asarray(amplitudes, dtype=complex)
    if len(t) < 3:
        raise FitFailure(f"need at least 3 samples, got {len(t)}")
    if np.any(np.abs(z) == 0):
        raise FitFailure("mode amplitude vanished; phase undefined")
    raw = np.angle(z[1:] / z[:-1])
    if np.any(np.abs(raw) > max_step):
        raise FitFailure("phase advance per sample exceeds the unwrap limit")
    phase = np.concatenate([[np.angle(z[0])], np.angle(z[0]) + np.cumsum(raw)])
    slope = np.polyfit(t, phase, 1)[0]
    return float(-slope)


@dataclass
class DispersionRow:
    k: float
    omega: float
    omega_over_k: float
    theta_dot_B_background: float


def measure_dispersion(lattice: LatticeSpec, theta, params: dict, dt: float, n_steps: int,
                       gauge=GaugeMode.TEMPORAL) -> DispersionRow:
    """Evolve a forward plane wave and fit the frequency of its Fourier mode.

    The forward-moving part of mode ``k`` is isolated as
    ``A_k + i pi_k / omega_0`` with ``omega_0`` the vacuum lattice frequency.
    ``k`` in the result is the lattice wavenumber ``sin(k h)/h``, so that
    vacuum propagation gives ``omega / k = 1`` on any grid.
    """
    params = dict(params)
    params.setdefault("direction", "forward")
    if params["direction"] != "forward":
        raise ValueError("dispersion runs need a forward travelling wave")
    axis = parse_axis(params.get("axis", "x"), "axis")
    pol = parse_axis(params.get("polarization", "z"), "polarization")
    mode = int(params.get("mode", 1))
    state = make_initial_state("plane_wave", params, lattice, theta, gauge)
    kappa = float(np.sin(2 * np.pi * mode / lattice.dims[axis]) / lattice.spacing)
    if kappa <= 0:
        raise ValueError("mode must have a positive lattice wavenumber")

    def amp(s: FieldState) -> complex:
        a = mode_amplitude(s.A[pol], lattice, axis, mode)
        p = mode_amplitude(s.pi[pol], lattice, axis, mode)
        return a + 1j * p / kappa

    times = [state.time]
    amps = [amp(state)]
    gauge = GaugeMode.parse(gauge)
    for _ in range(n_steps):
        state = step_rk4(state, dt, theta, gauge)
        if gauge is GaugeMode.COULOMB:
            state = coulomb_project(state)
        times.append(state.time)
        amps.append(amp(state))
    omega = fit_frequency(times, amps)
    tdb = float(np.dot(np.asarray(theta, dtype=float), state.B_bg))
    return DispersionRow(kappa, omega, omega / kappa, tdb)
