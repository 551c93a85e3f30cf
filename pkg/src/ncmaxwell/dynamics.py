"""Hamiltonian time evolution of the canonical pair (A, pi) on the lattice.

The magnetic field is never stored: it is ``curl A`` plus an optional
uniform background ``B_bg`` (a uniform field cannot be the curl of a
periodic potential, so it is carried separately; it is the curl of a linear
potential, on which central differences are exact).

Two gauges are supported.  ``TEMPORAL`` fixes ``A0 = 0`` and drops the
multiplier terms, so ``dA/dt = -E``.  ``COULOMB`` additionally projects the
state and both time derivatives onto transverse fields.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import constitutive as cst
from .errors import BadParams, NonFinite
from .lattice import LatticeSpec, curl, div, grad, transverse_project

log = logging.getLogger(__name__)


class GaugeMode(enum.Enum):
    TEMPORAL = "temporal"
    COULOMB = "coulomb"

    @classmethod
    def parse(cls, value) -> "GaugeMode":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


@dataclass
class FieldState:
    lattice: LatticeSpec
    A: np.ndarray
    pi: np.ndarray
    A0: Optional[np.ndarray] = None
    pi0: Optional[np.ndarray] = None
    time: float = 0.0
    B_bg: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        lat = self.lattice
        self.A = lat.check_vector(self.A, "A")
        self.pi = lat.check_vector(self.pi, "pi")
        self.A0 = lat.zeros_scalar() if self.A0 is None else lat.check_scalar(self.A0, "A0")
        self.pi0 = lat.zeros_scalar() if self.pi0 is None else lat.check_scalar(self.pi0, "pi0")
        self.B_bg = np.asarray(self.B_bg, dtype=float).reshape(3)

    @classmethod
    def zeros(cls, lattice: LatticeSpec) -> "FieldState":
        return cls(lattice, lattice.zeros_vector(), lattice.zeros_vector())

    def with_fields(self, A, pi, time=None) -> "FieldState":
        return replace(self, A=A, pi=pi, time=self.time if time is None else time)

    def copy(self) -> "FieldState":
        return replace(
            self, A=self.A.copy(), pi=self.pi.copy(), A0=self.A0.copy(), pi0=self.pi0.copy(),
            B_bg=self.B_bg.copy(),
        )


@dataclass(frozen=True)
class DiagnosticsRecord:
    time: float
    total_energy: float
    gauss_residual: float
    divB_residual: float
    faraday_residual: float
    theta_smallness: float

    FIELDS = (
        "time",
        "total_energy",
        "gauss_residual",
        "divB_residual",
        "faraday_residual",
        "theta_smallness",
    )

    def as_tuple(self):
        return tuple(getattr(self, k) for k in self.FIELDS)


def magnetic_field(state: FieldState, A=None) -> np.ndarray:
    A = state.A if A is None else A
    return curl(A, state.lattice) + state.B_bg[:, None, None, None]


def electric_field(state: FieldState, theta) -> np.ndarray:
    return cst.electric_from_momentum(state.pi, magnetic_field(state), theta)


def _derivative(lattice, A, pi, B_bg, theta, gauge):
    B = curl(A, lattice) + B_bg[:, None, None, None]
    dA = cst.velocity_canonical(pi, B, theta)
    dpi = -curl(cst.magnetic_h_canonical(pi, B, theta), lattice)
    if gauge is GaugeMode.COULOMB:
        dA = transverse_project(dA, lattice)
        dpi = transverse_project(dpi, lattice)
    return dA, dpi


def time_derivative(state: FieldState, theta, gauge=GaugeMode.TEMPORAL):
    """Right-hand side of Hamilton's equations, ``(dA/dt, dpi/dt)``.

    ``dA/dt = pi(1 - theta.B) + (B.pi)theta + (pi.theta)B`` and
    ``dpi/dt = -curl H(pi, B)``.  Writing the momentum update as a single
    discrete curl makes ``div(dpi/dt)`` vanish identically.
    """
    return _derivative(state.lattice, state.A, state.pi, state.B_bg, theta, GaugeMode.parse(gauge))


def _rk4_arrays(state: FieldState, dt: float, theta, gauge):
    lat, B_bg = state.lattice, state.B_bg
    A, pi = state.A, state.pi
    k1a, k1p = _derivative(lat, A, pi, B_bg, theta, gauge)
    k2a, k2p = _derivative(lat, A + 0.5 * dt * k1a, pi + 0.5 * dt * k1p, B_bg, theta, gauge)
    k3a, k3p = _derivative(lat, A + 0.5 * dt * k2a, pi + 0.5 * dt * k2p, B_bg, theta, gauge)
    k4a, k4p = _derivative(lat, A + dt * k3a, pi + dt * k3p, B_bg, theta, gauge)
    A_new = A + (dt / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    pi_new = pi + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    return A_new, pi_new


def _rk4(state: FieldState, dt: float, theta, gauge) -> FieldState:
    A_new, pi_new = _rk4_arrays(state, dt, theta, gauge)
    return replace(state, A=A_new, pi=pi_new, time=state.time + dt)


def step_rk4(state: FieldState, dt: float, theta, gauge=GaugeMode.TEMPORAL) -> FieldState:
    """One classical fourth-order Runge-Kutta step.

    ``A0`` and ``pi0`` are carried along unchanged.  Raises :class:`NonFinite`
    if the new state contains NaN or inf.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    with np.errstate(over="ignore", invalid="ignore"):
        A_new, pi_new = _rk4_arrays(state, dt, theta, GaugeMode.parse(gauge))
    t_new = state.time + dt
    if not (np.all(np.isfinite(A_new)) and np.all(np.isfinite(pi_new))):
        raise NonFinite(f"non-finite field values at t={t_new:.6g}")
    return replace(state, A=A_new, pi=pi_new, time=t_new)


def constraint_residuals(state: FieldState) -> tuple[float, float]:
    """Max-norms of the Gauss constraint ``div pi`` and of ``div B``."""
    lat = state.lattice
    gauss = float(np.max(np.abs(div(state.pi, lat))))
    divb = float(np.max(np.abs(div(magnetic_field(state), lat))))
    return gauss, divb


def total_energy(state: FieldState, theta) -> float:
    """Lattice integral of the energy density with ``E`` reconstructed from ``pi``."""
    B = magnetic_field(state)
    E = cst.electric_from_momentum(state.pi, B, theta)
    return float(state.lattice.cell_volume * np.sum(cst.energy_density(E, B, theta)))


def canonical_energy(state: FieldState, theta) -> float:
    """Lattice integral of the canonical Hamiltonian density in ``(pi, B)``.

    This is the quantity the lattice equations of motion conserve exactly;
    it differs from :func:`total_energy` at second order in theta.
    """
    B = magnetic_field(state)
    return float(state.lattice.cell_volume * np.sum(cst.hamiltonian_density(state.pi, B, theta)))


def faraday_residual(state: FieldState, dt: float, theta, gauge=GaugeMode.TEMPORAL) -> float:
    """Max-norm of ``(B(t+dt) - B(t-dt))/(2 dt) + curl E`` around ``state``.

    The neighbouring states come from one RK4 step forward and one backward.
    """
    gauge = GaugeMode.parse(gauge)
    fwd = _rk4(state, dt, theta, gauge)
    bwd = _rk4(state, -dt, theta, gauge)
    dBdt = (magnetic_field(fwd) - magnetic_field(bwd)) / (2.0 * dt)
    E = electric_field(state, theta)
    curlE = curl(E, state.lattice)
    if gauge is GaugeMode.COULOMB:
        curlE = curl(transverse_project(E, state.lattice), state.lattice)
    return float(np.max(np.abs(dBdt + curlE)))


def diagnostics(state: FieldState, theta, dt: float, gauge=GaugeMode.TEMPORAL) -> DiagnosticsRecord:
    gauss, divb = constraint_residuals(state)
    B = magnetic_field(state)
    E = cst.electric_from_momentum(state.pi, B, theta)
    return DiagnosticsRecord(
        time=float(state.time),
        total_energy=total_energy(state, theta),
        gauss_residual=gauss,
        divB_residual=divb,
        faraday_residual=faraday_residual(state, dt, theta, gauge),
        theta_smallness=cst.ThetaParams(tuple(np.asarray(theta, dtype=float))).smallness(E, B),
    )


def evolve(
    state: FieldState,
    n_steps: int,
    dt: float,
    theta,
    gauge=GaugeMode.TEMPORAL,
    sink: Optional[Callable[[DiagnosticsRecord], None]] = None,
    diag_stride: int = 10,
) -> FieldState:
    """Advance ``n_steps`` RK4 steps, sending diagnostics to ``sink``.

    A record is emitted for the initial state and after every ``diag_stride``
    steps.  In Coulomb gauge the state is re-projected after each step so
    that round-off cannot build up a longitudinal part.
    """
    gauge = GaugeMode.parse(gauge)
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    if diag_stride < 1:
        raise ValueError("diag_stride must be >= 1")
    if gauge is GaugeMode.COULOMB:
        state = coulomb_project(state)
    if sink is not None:
        sink(diagnostics(state, theta, dt, gauge))
    for n in range(1, n_steps + 1):
        try:
            state = step_rk4(state, dt, theta, gauge)
        except NonFinite as exc:
            raise NonFinite(f"step {n}: {exc}", step=n) from exc
        if gauge is GaugeMode.COULOMB:
            state = coulomb_project(state)
        if sink is not None and n % diag_stride == 0:
            sink(diagnostics(state, theta, dt, gauge))
    return state


def coulomb_project(state: FieldState) -> FieldState:
    lat = state.lattice
    return replace(
        state,
        A=transverse_project(state.A, lat),
        pi=transverse_project(state.pi, lat),
        A0=lat.zeros_scalar(),
    )


def gauge_transform(state: FieldState, lam: np.ndarray) -> FieldState:
    """``A -> A + grad(lam)``; ``pi``, ``A0``, ``pi0`` untouched."""
    lam = state.lattice.check_scalar(lam, "Lambda")
    return replace(state, A=state.A + grad(lam, state.lattice))


# -- initial data -------------------------------------------------------------

_AXIS_NAMES = {"x": 0, "y": 1, "z": 2}


def parse_axis(value, name) -> int:
    if isinstance(value, str):
        if value.lower() not in _AXIS_NAMES:
            raise BadParams(f"{name} must be one of x, y, z; got {value!r}")
        return _AXIS_NAMES[value.lower()]
    i = int(value)
    if i not in (0, 1, 2):
        raise BadParams(f"{name} must be 0, 1 or 2; got {value!r}")
    return i


def _vec3(value, name):
    v = np.asarray(value, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise BadParams(f"{name} must be three finite reals, got {value!r}")
    return v


def plane_wave_omega(lattice: LatticeSpec, axis: int, mode: int) -> float:
    """Vacuum angular frequency of a lattice plane wave, ``sin(k h)/h``."""
    n = lattice.dims[axis]
    return float(np.sin(2 * np.pi * mode / n) / lattice.spacing)


def make_initial_state(kind: str, params: dict, lattice: LatticeSpec, theta=(0, 0, 0),
                       gauge=GaugeMode.TEMPORAL) -> FieldState:
    """Construct initial data of a named kind.

    Kinds and their parameters (all optional):

    ``plane_wave``
        ``amplitude`` (1.0), ``mode`` (1, integer wave number along ``axis``),
        ``axis`` ("x"), ``polarization`` ("z"), ``direction`` ("standing" with
        ``pi = 0``, or "forward"/"backward" travelling waves with the vacuum
        lattice frequency), ``background_B`` ((0, 0, 0)).
    ``gaussian_pulse``
        ``amplitude``, ``width`` (in units of h, 4.0), ``center`` (fraction of
        the box, 0.5), ``axis``, ``polarization``, ``background_B``.
    ``crossed_uniform``
        ``E`` and ``B`` 3-vectors; ``pi`` is set from the momentum map and
        ``B`` is carried as the uniform background.
    ``random_transverse``
        ``amplitude`` (1.0), ``seed`` (0); white noise in ``A`` and ``pi``,
        transverse-projected.
    """
    params = dict(params or {})
    gauge = GaugeMode.parse(gauge)
    coords = lattice.coordinates()
    bg = _vec3(params.pop("background_B", (0.0, 0.0, 0.0)), "background_B")

    if kind == "plane_wave":
        amp = float(params.pop("amplitude", 1.0))
        mode = int(params.pop("mode", 1))
        axis = parse_axis(params.pop("axis", "x"), "axis")
        pol = parse_axis(params.pop("polarization", "z"), "polarization")
        direction = str(params.pop("direction", "standing")).lower()
        if pol == axis:
            raise BadParams("polarization must be transverse to the propagation axis")
        if direction not in ("standing", "forward", "backward"):
            raise BadParams(f"unknown direction {direction!r}")
        k = 2 * np.pi * mode / lattice.lengths[axis]
        phase = k * coords[axis]
        A = lattice.zeros_vector()
        pi = lattice.zeros_vector()
        A[pol] = amp * np.cos(phase)
        if direction != "standing":
            omega = plane_wave_omega(lattice, axis, mode)
            sign = 1.0 if direction == "forward" else -1.0
            # A = a cos(kx - s w t)  =>  pi = dA/dt (temporal gauge, theta = 0)
            pi[pol] = sign * amp * omega * np.sin(phase)
    elif kind == "gaussian_pulse":
        amp = float(params.pop("amplitude", 1.0))
        axis = parse_axis(params.pop("axis", "x"), "axis")
        width = float(params.pop("width", 4.0)) * lattice.spacing
        center = float(params.pop("center", 0.5)) * lattice.lengths[axis]
        pol = parse_axis(params.pop("polarization", "z"), "polarization")
        if pol == axis:
            raise BadParams("polarization must be transverse to the pulse axis")
        if width <= 0:
            raise BadParams("width must be positive")
        L = lattice.lengths[axis]
        r = (coords[axis] - center + 0.5 * L) % L - 0.5 * L
        A = lattice.zeros_vector()
        A[pol] = amp * np.exp(-0.5 * (r / width) ** 2)
        pi = lattice.zeros_vector()
    elif kind == "crossed_uniform":
        E0 = _vec3(params.pop("E", (0.0, 0.0, 0.0)), "E")
        B0 = _vec3(params.pop("B", (0.0, 0.0, 0.0)), "B")
        bg = bg + B0
        A = lattice.zeros_vector()
        p = cst.momentum_from_fields(E0, bg, theta)
        pi = np.broadcast_to(p[:, None, None, None], A.shape).copy()
    elif kind == "random_transverse":
        amp = float(params.pop("amplitude", 1.0))
        seed = int(params.pop("seed", 0))
        rng = np.random.default_rng(seed)
        A = transverse_project(amp * rng.standard_normal((3, *lattice.dims)), lattice)
        pi = transverse_project(amp * rng.standard_normal((3, *lattice.dims)), lattice)
    else:
        raise BadParams(f"unknown initial state kind {kind!r}")

    if params:
        raise BadParams(f"unused parameters for {kind}: {sorted(params)}")
    state = FieldState(lattice, A, pi, B_bg=bg)
    if gauge is GaugeMode.COULOMB:
        state = coulomb_project(state)
    return state
