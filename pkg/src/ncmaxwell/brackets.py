"""Finite-dimensional Poisson and Dirac bracket algebra on the lattice.

Phase space has eight real coordinates per site: ``A_mu`` and ``pi_mu`` for
``mu = 0..3`` (index 0 is the scalar component).  The continuum delta
function becomes ``delta_xy / h**3`` so that ``h**3``-weighted lattice sums
play the role of integrals, and the fundamental bracket is
``{A_mu(x), pi_nu(y)} = delta_mu_nu delta_xy / h**3``.

Every quantity here is a linear functional
``F = h**3 * sum_x (a(x) . A(x) + p(x) . pi(x))``, so all brackets are
constants computed exactly by dense linear algebra.  Functionals are handled
in families (stacks of rows) to keep that vectorised.

The central-difference Laplacian has a null space on a periodic lattice (the
constant mode, plus Nyquist modes on even-sized axes).  Everything involving
its inverse lives on the complement of that null space, called the *range
sector* below.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import FirstClassViolation, MismatchError, SingularBlock
from .lattice import LatticeSpec, laplacian_symbol, partial, projector_symbol

DENSE_LIMIT = 64
FIRST_CLASS = "first_class"


@dataclass(frozen=True)
class CanonicalLayout:
    """Ordering of the ``8 * Ns`` phase-space coordinates.

    Coordinate ``(kind, mu, site)`` with ``kind`` 0 for ``A`` and 1 for ``pi``
    maps to ``kind * 4 * Ns + mu * Ns + site``; ``site`` is the C-order flat
    index of the lattice position.
    """

    lattice: LatticeSpec

    @property
    def n_sites(self) -> int:
        return self.lattice.n_sites

    @property
    def n_coords(self) -> int:
        return 8 * self.n_sites

    @property
    def measure(self) -> float:
        return self.lattice.cell_volume

    def index(self, kind: int, mu: int, site: int) -> int:
        if kind not in (0, 1) or not 0 <= mu < 4 or not 0 <= site < self.n_sites:
            raise IndexError((kind, mu, site))
        return (kind * 4 + mu) * self.n_sites + site

    @cached_property
    def difference_matrices(self) -> np.ndarray:
        """Dense central-difference matrices, shape ``(3, Ns, Ns)``.

        ``(partial_m f)[x] = sum_y D[m, x, y] f[y]``.
        """
        ns = self.n_sites
        impulses = np.eye(ns).reshape((ns, *self.lattice.dims))
        mats = []
        for m in range(3):
            cols = partial(impulses, m, self.lattice).reshape(ns, ns)
            mats.append(cols.T)
        return np.stack(mats)

    @cached_property
    def laplacian_matrix(self) -> np.ndarray:
        D = self.difference_matrices
        return np.einsum("mxz,mzy->xy", D, D)

    def spectral_operator(self, symbol: np.ndarray) -> np.ndarray:
        """Dense matrix of the translation-invariant operator with Fourier ``symbol``."""
        ns = self.n_sites
        impulses = np.eye(ns).reshape((ns, *self.lattice.dims))
        cols = np.fft.ifftn(np.fft.fftn(impulses, axes=(1, 2, 3)) * symbol, axes=(1, 2, 3))
        return cols.real.reshape(ns, ns).T

    @cached_property
    def laplacian_pinv(self) -> np.ndarray:
        """Pseudo-inverse of the Laplacian matrix, built from its Fourier symbol."""
        sym = laplacian_symbol(self.lattice)
        null = self.lattice.null_modes
        scale = np.max(np.abs(sym))
        if np.any(np.abs(sym[~null]) < 1e-12 * scale):
            raise SingularBlock("Laplacian eigenvalue outside the null modes is numerically zero")
        inv = np.zeros_like(sym)
        inv[~null] = 1.0 / sym[~null]
        return self.spectral_operator(inv)

    @cached_property
    def range_projector(self) -> np.ndarray:
        """Orthogonal projector onto the range sector of the Laplacian."""
        return self.spectral_operator((~self.lattice.null_modes).astype(float))


@dataclass
class LinearFunctional:
    """``F = h**3 * sum_x (gradA(x) . A(x) + gradPi(x) . pi(x))``.

    ``gradA`` and ``gradPi`` have shape ``(4, Nx, Ny, Nz)`` and are the
    functional derivatives of ``F`` with respect to ``A_mu`` and ``pi_mu``.
    """

    gradA: np.ndarray
    gradPi: np.ndarray

    def evaluate(self, A4: np.ndarray, pi4: np.ndarray, lattice: LatticeSpec) -> float:
        return float(lattice.cell_volume * (np.sum(self.gradA * A4) + np.sum(self.gradPi * pi4)))

    def __add__(self, other):
        return LinearFunctional(self.gradA + other.gradA, self.gradPi + other.gradPi)

    def __mul__(self, c):
        return LinearFunctional(c * self.gradA, c * self.gradPi)

    __rmul__ = __mul__


@dataclass
class Family:
    """A stack of ``n`` linear functionals as row matrices of shape ``(n, 4*Ns)``."""

    gradA: np.ndarray
    gradPi: np.ndarray
    name: str = ""

    def __len__(self):
        return self.gradA.shape[0]

    @classmethod
    def from_functionals(cls, items, layout: CanonicalLayout, name="") -> "Family":
        n = 4 * layout.n_sites
        return cls(
            np.stack([np.reshape(f.gradA, n) for f in items]),
            np.stack([np.reshape(f.gradPi, n) for f in items]),
            name,
        )

    def __getitem__(self, i) -> "Family":
        sl = slice(i, i + 1) if isinstance(i, (int, np.integer)) else i
        return Family(self.gradA[sl], self.gradPi[sl], self.name)

    def functional(self, i: int, layout: CanonicalLayout) -> LinearFunctional:
        shape = (4, *layout.lattice.dims)
        return LinearFunctional(self.gradA[i].reshape(shape), self.gradPi[i].reshape(shape))

    def concat(self, *others) -> "Family":
        fams = (self, *others)
        return Family(
            np.concatenate([f.gradA for f in fams]),
            np.concatenate([f.gradPi for f in fams]),
            "+".join(f.name for f in fams),
        )

    def transform(self, M: np.ndarray, name="") -> "Family":
        """Family whose ``i``-th member is ``sum_j M[i, j] * self[j]``."""
        return Family(M @ self.gradA, M @ self.gradPi, name or self.name)

    def evaluate(self, A4, pi4, layout: CanonicalLayout) -> np.ndarray:
        h3 = layout.measure
        return h3 * (self.gradA @ np.reshape(A4, -1) + self.gradPi @ np.reshape(pi4, -1))


def _pointwise(layout: CanonicalLayout, kind: str, mu: int, rows=None) -> Family:
    """``A_mu(x)`` or ``pi_mu(x)`` for every site ``x`` (or a row matrix over sites)."""
    ns = layout.n_sites
    rows = np.eye(ns) if rows is None else rows
    coef = np.zeros((rows.shape[0], 4, ns))
    coef[:, mu, :] = rows / layout.measure
    coef = coef.reshape(rows.shape[0], 4 * ns)
    zero = np.zeros_like(coef)
    if kind == "A":
        return Family(coef, zero, f"A{mu}")
    return Family(zero, coef, f"pi{mu}")


def field_family(layout: CanonicalLayout, kind: str, mu: int) -> Family:
    return _pointwise(layout, kind, mu)


def field_functional(layout: CanonicalLayout, kind: str, mu: int, site: int) -> LinearFunctional:
    return _pointwise(layout, kind, mu).functional(site, layout)


def _divergence(layout: CanonicalLayout, kind: str) -> Family:
    ns = layout.n_sites
    D = layout.difference_matrices
    coef = np.zeros((ns, 4, ns))
    coef[:, 1:, :] = np.transpose(D, (1, 0, 2)) / layout.measure
    coef = coef.reshape(ns, 4 * ns)
    zero = np.zeros_like(coef)
    if kind == "A":
        return Family(coef, zero, "divA")
    return Family(zero, coef, "divPi")


def magnetic_family(layout: CanonicalLayout, i: int) -> Family:
    """``B_i(x) = eps_ijk partial_j A_k(x)`` for every site."""
    ns = layout.n_sites
    D = layout.difference_matrices
    j, k = (i + 1) % 3, (i + 2) % 3
    coef = np.zeros((ns, 4, ns))
    coef[:, 1 + k, :] += D[j]
    coef[:, 1 + j, :] -= D[k]
    coef = coef.reshape(ns, 4 * ns) / layout.measure
    return Family(coef, np.zeros_like(coef), f"B{i + 1}")


def displacement_family(layout: CanonicalLayout, i: int) -> Family:
    """``D_i = -pi_i`` for every site."""
    fam = _pointwise(layout, "pi", i + 1)
    return Family(-fam.gradA, -fam.gradPi, f"D{i + 1}")


def build_constraints(layout: CanonicalLayout, corrupt: bool = False) -> list[Family]:
    """The four constraint families ``[phi1, phi2, phi3, phi4]``.

    ``phi1 = pi_0``, ``phi2 = div pi``, ``phi3 = A_0``, ``phi4 = div A``.
    With ``corrupt=True`` an ``A_0`` term is added to ``phi2``; this breaks
    the first-class algebra and exists only to exercise failure paths.
    """
    phi1 = _pointwise(layout, "pi", 0)
    phi2 = _divergence(layout, "pi")
    phi3 = _pointwise(layout, "A", 0)
    phi4 = _divergence(layout, "A")
    if corrupt:
        phi2 = Family(phi2.gradA + phi3.gradA, phi2.gradPi, "divPi+A0")
    for fam, name in zip((phi1, phi2, phi3, phi4), ("phi1", "phi2", "phi3", "phi4")):
        fam.name = name
    return [phi1, phi2, phi3, phi4]


def bracket_matrix(F: Family, G: Family, layout: CanonicalLayout) -> np.ndarray:
    """``M[a, b] = {F_a, G_b}``."""
    h3 = layout.measure
    return h3 * (F.gradA @ G.gradPi.T - F.gradPi @ G.gradA.T)


def poisson_bracket(F: LinearFunctional, G: LinearFunctional, layout: CanonicalLayout) -> float:
    h3 = layout.measure
    return float(h3 * (np.sum(F.gradA * G.gradPi) - np.sum(F.gradPi * G.gradA)))


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "max_deviation": float(self.max_deviation),
            "tolerance": float(self.tolerance),
            "detail": self.detail,
        }


def _check(name, deviation, tol, strict=False, **detail) -> CheckResult:
    deviation = float(deviation)
    passed = deviation == 0.0 if strict else deviation < tol
    return CheckResult(name, bool(passed), deviation, tol, detail)


def verify_first_class(layout: CanonicalLayout, constraints=None, check: bool = True,
                       dense_limit: int = DENSE_LIMIT) -> CheckResult:
    """Confirm ``{phi1, phi2} = {phi1, phi1} = {phi2, phi2} = 0`` exactly.

    One representative row per family (site 0) is checked against every
    site, which by translation invariance covers all pairs; on lattices up
    to ``dense_limit`` sites the full pair matrix is checked instead.
    """
    phi = constraints if constraints is not None else build_constraints(layout)
    first = phi[0].concat(phi[1])
    ns = layout.n_sites
    rows = np.arange(2 * ns) if ns <= dense_limit else np.array([0, ns])
    M = bracket_matrix(first[rows], first, layout)
    dev = float(np.max(np.abs(M)))
    result = _check(FIRST_CLASS, dev, 0.0, strict=True, pairs_checked=int(M.size))
    if not result.passed:
        a, b = np.unravel_index(np.argmax(np.abs(M)), M.shape)
        label = lambda i: (f"phi{1 + i // ns}", int(i % ns))
        pair = (label(int(rows[a])), label(int(b)))
        result.detail["offending_pair"] = pair
        if check:
            raise FirstClassViolation(
                f"{{{pair[0][0]}({pair[0][1]}), {pair[1][0]}({pair[1][1]})}} = {M[a, b]:.3e}",
                pair=pair,
            )
    return result


@dataclass
class ConstraintMatrix:
    """Bracket matrix of the four constraint families and its inverse.

    Rows and columns are ordered ``(family, site)``.  ``Cinv`` is the
    Moore-Penrose inverse: ``C @ Cinv`` is the projector onto the range
    sector, ``P``.
    """

    C: np.ndarray
    Cinv: np.ndarray
    P: np.ndarray
    constraints: list

    @property
    def size(self) -> int:
        return self.C.shape[0]


def build_constraint_matrix(layout: CanonicalLayout, constraints=None) -> ConstraintMatrix:
    """Assemble ``C`` from brackets and ``Cinv`` from its block structure.

    ``C`` pairs ``phi1`` with ``phi3`` (``-delta/h^3``) and ``phi2`` with
    ``phi4`` (the Laplacian over ``h^3``).  Inverting each 2x2 block gives
    ``Cinv_13 = h^3``, ``Cinv_31 = -h^3`` and ``Cinv_24 = -h^3 L^+``,
    ``Cinv_42 = h^3 L^+``, with ``L^+`` applied spectrally.
    """
    phi = constraints if constraints is not None else build_constraints(layout)
    allphi = phi[0].concat(*phi[1:])
    C = bracket_matrix(allphi, allphi, layout)
    ns = layout.n_sites
    h3 = layout.measure
    Lp = layout.laplacian_pinv
    I = np.eye(ns)
    Cinv = np.zeros_like(C)
    blk = lambda a, b: (slice(a * ns, (a + 1) * ns), slice(b * ns, (b + 1) * ns))
    Cinv[blk(0, 2)] = h3 * I
    Cinv[blk(2, 0)] = -h3 * I
    Cinv[blk(1, 3)] = -h3 * Lp
    Cinv[blk(3, 1)] = h3 * Lp
    P = np.zeros_like(C)
    R = layout.range_projector
    P[blk(0, 0)] = I
    P[blk(2, 2)] = I
    P[blk(1, 1)] = R
    P[blk(3, 3)] = R
    return ConstraintMatrix(C, Cinv, P, list(phi))


def constraint_matrix_checks(cm: ConstraintMatrix, layout: CanonicalLayout,
                             tol: float = 1e-10) -> list[CheckResult]:
    C, Cinv, P = cm.C, cm.Cinv, cm.P
    ns = layout.n_sites
    antisym = np.max(np.abs(C + C.T))
    inv_dev = np.max(np.abs((C @ Cinv - np.eye(cm.size)) @ P))
    blk24 = C[ns:2 * ns, 3 * ns:4 * ns] * layout.measure
    row_sums = np.max(np.abs(blk24.sum(axis=1)))
    scale = np.max(np.abs(blk24))
    return [
        _check("constraint_matrix_antisymmetry", antisym, 0.0, strict=True),
        _check(
            "constraint_matrix_inverse", inv_dev, tol,
            null_modes=int(np.count_nonzero(layout.lattice.null_modes)),
            note="C @ Cinv restricted to the range sector of the Laplacian",
        ),
        _check("laplacian_block_row_sums", row_sums / scale, 1e-14),
    ]


def dirac_bracket_matrix(F: Family, G: Family, cm: ConstraintMatrix, layout: CanonicalLayout) -> np.ndarray:
    """``{F_a, G_b}* = {F_a, G_b} - {F_a, phi} Cinv {phi, G_b}``."""
    phi = cm.constraints[0].concat(*cm.constraints[1:])
    return (
        bracket_matrix(F, G, layout)
        - bracket_matrix(F, phi, layout) @ cm.Cinv @ bracket_matrix(phi, G, layout)
    )


def dirac_bracket(F: LinearFunctional, G: LinearFunctional, cm: ConstraintMatrix,
                  layout: CanonicalLayout) -> float:
    Fa = Family.from_functionals([F], layout)
    Ga = Family.from_functionals([G], layout)
    return float(dirac_bracket_matrix(Fa, Ga, cm, layout)[0, 0])


def random_family(layout: CanonicalLayout, n: int, seed: int = 0) -> Family:
    rng = np.random.default_rng(seed)
    m = 4 * layout.n_sites
    return Family(rng.standard_normal((n, m)), rng.standard_normal((n, m)), "random")


def verify_dirac_annihilation(cm: ConstraintMatrix, layout: CanonicalLayout, n_random: int = 8,
                              seed: int = 0, tol: float = 1e-10) -> CheckResult:
    """``{F, phi_alpha}* = 0`` for random linear ``F`` and every constraint.

    The deviation is measured relative to the largest ordinary bracket
    ``|{F, phi_alpha}|`` so it does not depend on the lattice spacing.
    """
    F = random_family(layout, n_random, seed)
    devs = {}
    worst = 0.0
    for fam in cm.constraints:
        star = dirac_bracket_matrix(F, fam, cm, layout)
        scale = np.max(np.abs(bracket_matrix(F, fam, layout)))
        d = float(np.max(np.abs(star)) / max(scale, np.finfo(float).tiny))
        devs[fam.name] = d
        worst = max(worst, d)
    return _check("dirac_annihilation", worst, tol, per_constraint=devs)


def _all_fields(layout, kind):
    return [_pointwise(layout, kind, mu) for mu in range(4)]


def verify_vanishing_brackets(cm: ConstraintMatrix, layout: CanonicalLayout,
                              tol: float = 1e-10) -> list[CheckResult]:
    """Starred brackets that must vanish identically.

    ``{pi_0, A_0}* = {pi_0, A_i}* = {pi_i, A_0}* = 0`` and
    ``{pi_mu, pi_nu}* = {A_mu, A_nu}* = 0``.
    """
    h3 = layout.measure
    A = _all_fields(layout, "A")
    P = _all_fields(layout, "pi")
    scalar = max(
        np.max(np.abs(dirac_bracket_matrix(P[0], A[0].concat(*A[1:]), cm, layout))),
        np.max(np.abs(dirac_bracket_matrix(P[0].concat(*P[1:]), A[0], cm, layout))),
    )
    allA = A[0].concat(*A[1:])
    allP = P[0].concat(*P[1:])
    pairs = max(
        np.max(np.abs(dirac_bracket_matrix(allA, allA, cm, layout))),
        np.max(np.abs(dirac_bracket_matrix(allP, allP, cm, layout))),
    )
    # brackets scale like 1/h^3; compare in units of the fundamental bracket
    return [
        _check("dirac_vanishing_scalar", scalar * h3, tol),
        _check("dirac_vanishing_pairs", pairs * h3, tol),
    ]


def dirac_kernel_dense(cm: ConstraintMatrix, layout: CanonicalLayout, sites=None) -> np.ndarray:
    """``K[i, j, x, y] = {pi_i(x), A_j(y)}*`` for spatial ``i, j``.

    ``sites`` restricts ``x`` to the given flat indices (all sites by default).
    """
    ns = layout.n_sites
    sites = np.arange(ns) if sites is None else np.atleast_1d(sites)
    rows = np.eye(ns)[sites]
    K = np.empty((3, 3, len(sites), ns))
    Pi = [_pointwise(layout, "pi", i + 1, rows) for i in range(3)]
    A = [_pointwise(layout, "A", j + 1) for j in range(3)]
    allA = A[0].concat(*A[1:])
    for i in range(3):
        block = dirac_bracket_matrix(Pi[i], allA, cm, layout)
        for j in range(3):
            K[i, j] = block[:, j * ns:(j + 1) * ns]
    return K


def dirac_kernel_spectral(layout: CanonicalLayout) -> np.ndarray:
    """Independent evaluation of ``{pi_i(x), A_j(y)}*`` from Fourier symbols.

    ``(-delta_ij delta_xy + (partial_i L^+ partial_j)(x, y)) / h^3``; the
    operator product is formed directly from the symbols
    ``i kappa_i * (1 / -|kappa|^2) * i kappa_j``.
    """
    lat = layout.lattice
    ns = layout.n_sites
    kap = lat.symbol
    k2 = lat.kappa_sq
    safe = np.where(k2 > 0, k2, 1.0)
    K = np.empty((3, 3, ns, ns))
    for i in range(3):
        for j in range(3):
            sym = np.where(k2 > 0, kap[i] * kap[j] / safe, 0.0)
            M = layout.spectral_operator(sym)
            K[i, j] = ((-1.0 if i == j else 0.0) * np.eye(ns) + M) / layout.measure
    return K


def verify_dirac_kernel(cm: ConstraintMatrix, layout: CanonicalLayout, tol: float = 1e-10) -> CheckResult:
    dense = dirac_kernel_dense(cm, layout)
    spec = dirac_kernel_spectral(layout)
    dev = np.max(np.abs(dense - spec)) * layout.measure
    return _check("dirac_kernel_spectral", dev, tol)


def dirac_fourier_kernel(cm: ConstraintMatrix, layout: CanonicalLayout) -> np.ndarray:
    """Fourier symbol of ``{pi_i, A_j}*`` times ``h^3``, shape ``(3, 3, Nx, Ny, Nz)``.

    Built from the representative row at site 0 (translation invariance).
    """
    K = dirac_kernel_dense(cm, layout, sites=0)[:, :, 0, :]
    K = K.reshape((3, 3, *layout.lattice.dims))
    return layout.measure * np.fft.fftn(K, axes=(2, 3, 4))


def verify_dirac_fourier(cm: ConstraintMatrix, layout: CanonicalLayout, tol: float = 1e-10,
                         check: bool = False, dense_limit: int = DENSE_LIMIT) -> list[CheckResult]:
    """Compare the Fourier kernel of ``{pi_i, A_j}*`` with minus the transverse projector.

    Also checks, per mode, that the measured projector is idempotent and
    annihilates the lattice wave vector, and (on small lattices) that the
    dense kernel is circulant so the single-row transform is representative.
    """
    lat = layout.lattice
    S = dirac_fourier_kernel(cm, layout)
    target = -projector_symbol(lat)
    diff = np.abs(S - target)
    per_mode = diff.max(axis=(0, 1))
    bad = np.argwhere(per_mode >= tol)
    results = [
        _check(
            "dirac_fourier_projector", per_mode.max(), tol,
            failing_modes=[tuple(int(v) for v in m) for m in bad[:20]],
            modes_checked=int(per_mode.size),
        )
    ]
    Pm = -S.real
    Pm_t = np.moveaxis(Pm, (0, 1), (-2, -1))
    idem = np.max(np.abs(Pm_t @ Pm_t - Pm_t))
    kap = np.moveaxis(lat.symbol, 0, -1)[..., None]
    annihilate = np.max(np.abs(Pm_t @ kap)) * lat.spacing
    results.append(_check("projector_properties", max(idem, annihilate), tol,
                          idempotence=float(idem), annihilates_kappa=float(annihilate)))
    if layout.n_sites <= dense_limit:
        dense = dirac_kernel_dense(cm, layout)
        row0 = dense[:, :, 0, :].reshape((3, 3, *lat.dims))
        worst = 0.0
        for x in range(layout.n_sites):
            shift = np.unravel_index(x, lat.dims)
            rolled = np.roll(row0, shift, axis=(2, 3, 4)).reshape(3, 3, -1)
            worst = max(worst, float(np.max(np.abs(rolled - dense[:, :, x, :]))))
        results.append(_check("dirac_kernel_circulant", worst * layout.measure, tol))
    if check:
        failed = [r for r in results if not r.passed]
        if failed:
            raise MismatchError("Fourier kernel does not match transverse projector", report=failed)
    return results


def canonical_pairs(layout: CanonicalLayout, constraints=None):
    """``Q = (A_0, div A)`` and ``P = (pi_0, -L^+ div pi)`` as families."""
    phi = constraints if constraints is not None else build_constraints(layout)
    Q = [phi[2], phi[3]]
    P2 = phi[1].transform(-layout.laplacian_pinv, "P2")
    return Q, [phi[0], P2]


def canonical_pairs_check(layout: CanonicalLayout, tol: float = 1e-10, check: bool = False) -> CheckResult:
    """``{Q_i(x), P_j(y)} = delta_ij delta_xy / h^3`` on the range sector."""
    Q, P = canonical_pairs(layout)
    h3 = layout.measure
    ns = layout.n_sites
    R = layout.range_projector
    worst = 0.0
    entries = {}
    for i in range(2):
        for j in range(2):
            M = bracket_matrix(Q[i], P[j], layout) * h3
            expected = (np.eye(ns) if i == 0 else R) if i == j else np.zeros((ns, ns))
            d = float(np.max(np.abs(M - expected)))
            entries[f"Q{i + 1}P{j + 1}"] = d
            worst = max(worst, d)
    result = _check("canonical_pairs", worst, tol, per_pair=entries)
    if check and not result.passed:
        raise MismatchError("canonical pair brackets mismatch", report=[result])
    return result


def verify_fundamental(layout: CanonicalLayout, tol: float = 1e-12) -> list[CheckResult]:
    """``{A_mu(x), pi_nu(y)} = delta delta / h^3`` and ``{B_i(x), D_j(y)} = eps_ijk partial_k delta``."""
    h3 = layout.measure
    ns = layout.n_sites
    A = _all_fields(layout, "A")
    P = _all_fields(layout, "pi")
    worst = 0.0
    for mu in range(4):
        for nu in range(4):
            M = bracket_matrix(A[mu], P[nu], layout) * h3
            expected = np.eye(ns) if mu == nu else 0.0
            worst = max(worst, float(np.max(np.abs(M - expected))))
    D = layout.difference_matrices
    worst_bd = 0.0
    for i in range(3):
        Bi = magnetic_family(layout, i)
        for j in range(3):
            M = bracket_matrix(Bi, displacement_family(layout, j), layout) * h3
            k = 3 - i - j if i != j else None
            if k is None:
                expected = np.zeros((ns, ns))
            else:
                eps = 1.0 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1.0
                expected = eps * D[k]
            worst_bd = max(worst_bd, float(np.max(np.abs(M - expected))) * layout.lattice.spacing)
    return [
        _check("fundamental_bracket", worst, tol),
        _check("magnetic_displacement_bracket", worst_bd, tol),
    ]


AUDIT_CHECKS = (
    "fundamental_bracket",
    "magnetic_displacement_bracket",
    FIRST_CLASS,
    "constraint_matrix_antisymmetry",
    "constraint_matrix_inverse",
    "laplacian_block_row_sums",
    "dirac_annihilation",
    "dirac_vanishing_scalar",
    "dirac_vanishing_pairs",
    "dirac_kernel_spectral",
    "dirac_fourier_projector",
    "projector_properties",
    "dirac_kernel_circulant",
    "canonical_pairs",
)


def run_audit(layout: CanonicalLayout, corrupt: bool = False, tol: float = 1e-10,
              seed: int = 0, dense_limit: int = DENSE_LIMIT) -> list[CheckResult]:
    """Every bracket identity, in the fixed order of :data:`AUDIT_CHECKS`."""
    phi = build_constraints(layout, corrupt=corrupt)
    results = verify_fundamental(layout)
    results.append(verify_first_class(layout, phi, check=False, dense_limit=dense_limit))
    cm = build_constraint_matrix(layout, phi)
    results += constraint_matrix_checks(cm, layout, tol)
    results.append(verify_dirac_annihilation(cm, layout, seed=seed, tol=tol))
    results += verify_vanishing_brackets(cm, layout, tol)
    results.append(verify_dirac_kernel(cm, layout, tol))
    fourier = verify_dirac_fourier(cm, layout, tol, dense_limit=dense_limit)
    if len(fourier) == 2:
        fourier.append(CheckResult("dirac_kernel_circulant", True, 0.0, tol, {"skipped": "lattice above dense limit"}))
    results += fourier
    results.append(canonical_pairs_check(layout, tol))
    assert tuple(r.name for r in results) == AUDIT_CHECKS
    return results
