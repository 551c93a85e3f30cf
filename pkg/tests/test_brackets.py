import numpy as np
import pytest

from ncmaxwell.brackets import (
    AUDIT_CHECKS,
    CanonicalLayout,
    Family,
    LinearFunctional,
    build_constraint_matrix,
    build_constraints,
    canonical_pairs_check,
    constraint_matrix_checks,
    dirac_bracket,
    dirac_bracket_matrix,
    dirac_fourier_kernel,
    dirac_kernel_dense,
    dirac_kernel_spectral,
    field_family,
    field_functional,
    magnetic_family,
    displacement_family,
    bracket_matrix,
    poisson_bracket,
    random_family,
    run_audit,
    verify_dirac_annihilation,
    verify_dirac_fourier,
    verify_first_class,
    verify_vanishing_brackets,
)
from ncmaxwell.errors import FirstClassViolation
from ncmaxwell.lattice import LatticeSpec, curl, div, grad, laplacian, transverse_project


@pytest.fixture(scope="module", params=[((4, 4, 4), 1.0), ((4, 4, 4), 0.5), ((3, 4, 5), 0.7)],
                ids=["4cube-h1", "4cube-h0.5", "3x4x5"])
def setup(request):
    dims, h = request.param
    layout = CanonicalLayout(LatticeSpec(dims, h))
    return layout, build_constraint_matrix(layout)


def _phase_point(layout, seed):
    rng = np.random.default_rng(seed)
    shape = (4, *layout.lattice.dims)
    return rng.standard_normal(shape), rng.standard_normal(shape)


def brute_bracket(F, G, layout):
    """Bracket by differentiating the evaluated functionals coordinate by coordinate."""
    lat = layout.lattice
    A, P = _phase_point(layout, 0)
    total = 0.0
    for idx in np.ndindex(A.shape):
        def d(fun, which):
            Ap, Pp, Am, Pm = A.copy(), P.copy(), A.copy(), P.copy()
            (Ap if which == "A" else Pp)[idx] += 1.0
            (Am if which == "A" else Pm)[idx] -= 1.0
            return (fun.evaluate(Ap, Pp, lat) - fun.evaluate(Am, Pm, lat)) / 2.0
        total += d(F, "A") * d(G, "pi") - d(F, "pi") * d(G, "A")
    return total / lat.cell_volume


class TestFundamental:
    def test_canonical_pair(self):
        layout = CanonicalLayout(LatticeSpec((1, 1, 4), 0.5))
        h3 = layout.measure
        for mu in range(4):
            for nu in range(4):
                for x, y in [(0, 0), (0, 1), (2, 2)]:
                    b = poisson_bracket(field_functional(layout, "A", mu, x), field_functional(layout, "pi", nu, y), layout)
                    assert b == pytest.approx((mu == nu and x == y) / h3)

    def test_matches_brute_force(self):
        layout = CanonicalLayout(LatticeSpec((1, 1, 4), 0.5))
        rng = np.random.default_rng(1)
        shape = (4, 1, 1, 4)
        F = LinearFunctional(rng.standard_normal(shape), rng.standard_normal(shape))
        G = LinearFunctional(rng.standard_normal(shape), rng.standard_normal(shape))
        assert poisson_bracket(F, G, layout) == pytest.approx(brute_bracket(F, G, layout), rel=1e-10)

    def test_bilinear_antisymmetric(self):
        layout = CanonicalLayout(LatticeSpec((4, 4, 4)))
        F, G, H = (random_family(layout, 1, s).functional(0, layout) for s in (1, 2, 3))
        pb = lambda a, b: poisson_bracket(a, b, layout)
        assert pb(F, G) == pytest.approx(-pb(G, F))
        assert pb(F + 2.0 * H, G) == pytest.approx(pb(F, G) + 2 * pb(H, G))

    def test_magnetic_displacement_stencil(self):
        h = 0.5
        layout = CanonicalLayout(LatticeSpec((4, 4, 4), h))
        # {B_1(x), D_2(y)} = eps_123 partial_3 delta(x - y) in units of 1/h^3
        M = bracket_matrix(magnetic_family(layout, 0), displacement_family(layout, 1), layout) * layout.measure
        x = np.ravel_multi_index((1, 1, 1), (4, 4, 4))
        up = np.ravel_multi_index((1, 1, 2), (4, 4, 4))
        dn = np.ravel_multi_index((1, 1, 0), (4, 4, 4))
        assert M[x, up] == pytest.approx(1 / (2 * h))
        assert M[x, dn] == pytest.approx(-1 / (2 * h))
        assert np.count_nonzero(np.abs(M[x]) > 1e-14) == 2
        diag = bracket_matrix(magnetic_family(layout, 2), displacement_family(layout, 2), layout)
        assert not np.any(diag)


class TestConstraints:
    def test_evaluation(self):
        lat = LatticeSpec((4, 4, 4), 0.5)
        layout = CanonicalLayout(lat)
        phi = build_constraints(layout)
        rng = np.random.default_rng(2)
        w = rng.standard_normal((3, *lat.dims))
        lam = rng.standard_normal(lat.dims)
        A4 = np.zeros((4, *lat.dims))
        pi4 = np.zeros((4, *lat.dims))
        A4[0] = rng.standard_normal(lat.dims)
        pi4[0] = rng.standard_normal(lat.dims)
        A4[1:] = grad(lam, lat)
        pi4[1:] = curl(w, lat)
        np.testing.assert_allclose(phi[0].evaluate(A4, pi4, layout), pi4[0].ravel())
        assert np.max(np.abs(phi[1].evaluate(A4, pi4, layout))) < 1e-12
        np.testing.assert_allclose(phi[2].evaluate(A4, pi4, layout), A4[0].ravel())
        np.testing.assert_allclose(phi[3].evaluate(A4, pi4, layout), laplacian(lam, lat).ravel(), atol=1e-12)

    def test_phi1_phi3(self):
        layout = CanonicalLayout(LatticeSpec((4, 4, 4), 0.5))
        phi = build_constraints(layout)
        np.testing.assert_allclose(bracket_matrix(phi[0], phi[2], layout), -np.eye(64) / layout.measure)

    @pytest.mark.parametrize("dims", [(4, 4, 4), (1, 1, 4), (3, 4, 5), (8, 8, 8)])
    def test_first_class(self, dims):
        layout = CanonicalLayout(LatticeSpec(dims, 0.7))
        r = verify_first_class(layout)
        assert r.passed and r.max_deviation == 0.0

    def test_corrupt_fixture(self):
        layout = CanonicalLayout(LatticeSpec((4, 4, 4)))
        with pytest.raises(FirstClassViolation) as info:
            verify_first_class(layout, build_constraints(layout, corrupt=True))
        names = {info.value.pair[0][0], info.value.pair[1][0]}
        assert names == {"phi1", "phi2"}


class TestConstraintMatrix:
    def test_checks_pass(self, setup):
        layout, cm = setup
        assert all(r.passed for r in constraint_matrix_checks(cm, layout))

    def test_inverse_matches_numpy_pinv(self, setup):
        layout, cm = setup
        np.testing.assert_allclose(cm.Cinv, np.linalg.pinv(cm.C), atol=1e-10 * np.max(np.abs(cm.Cinv)))

    def test_laplacian_pinv(self, setup):
        layout, _ = setup
        np.testing.assert_allclose(layout.laplacian_pinv, np.linalg.pinv(layout.laplacian_matrix), atol=1e-10)

    def test_laplacian_matrix_matches_operator(self, setup):
        layout, _ = setup
        f = np.random.default_rng(3).standard_normal(layout.lattice.dims)
        np.testing.assert_allclose(layout.laplacian_matrix @ f.ravel(), laplacian(f, layout.lattice).ravel(), atol=1e-12)

    def test_null_sector_size(self):
        layout = CanonicalLayout(LatticeSpec((4, 4, 4)))
        cm = build_constraint_matrix(layout)
        # 8 null modes of the wide-stencil Laplacian in each of phi2 and phi4
        assert cm.size - np.linalg.matrix_rank(cm.C) == 16


class TestDiracBracket:
    def test_annihilation(self, setup):
        layout, cm = setup
        assert verify_dirac_annihilation(cm, layout).passed

    def test_against_pinv_oracle(self, setup):
        layout, cm = setup
        F, G = random_family(layout, 3, 7), random_family(layout, 2, 8)
        phi = cm.constraints[0].concat(*cm.constraints[1:])
        Cp = np.linalg.pinv(cm.C)
        expected = bracket_matrix(F, G, layout) - bracket_matrix(F, phi, layout) @ Cp @ bracket_matrix(phi, G, layout)
        np.testing.assert_allclose(dirac_bracket_matrix(F, G, cm, layout), expected, atol=1e-9)

    def test_vanishing_brackets(self, setup):
        layout, cm = setup
        assert all(r.passed for r in verify_vanishing_brackets(cm, layout))

    def test_scalar_sector_single(self, setup):
        layout, cm = setup
        p0 = field_functional(layout, "pi", 0, 1)
        a2 = field_functional(layout, "A", 2, 3)
        assert abs(dirac_bracket(p0, a2, cm, layout)) < 1e-10 / layout.measure

    def test_kernel_dense_equals_spectral(self, setup):
        layout, cm = setup
        np.testing.assert_allclose(dirac_kernel_dense(cm, layout), dirac_kernel_spectral(layout),
                                   atol=1e-10 / layout.measure)

    def test_kernel_acts_as_minus_projector(self, setup):
        layout, cm = setup
        lat = layout.lattice
        K = dirac_kernel_dense(cm, layout) * layout.measure
        v = np.random.default_rng(4).standard_normal((3, *lat.dims))
        out = np.einsum("ijxy,jy->ix", K, v.reshape(3, -1)).reshape(v.shape)
        np.testing.assert_allclose(out, -transverse_project(v, lat), atol=1e-10)

    def test_fourier_single_mode(self):
        layout = CanonicalLayout(LatticeSpec((4, 4, 4), 1.0))
        cm = build_constraint_matrix(layout)
        S = dirac_fourier_kernel(cm, layout)
        np.testing.assert_allclose(S[:, :, 1, 0, 0], -np.diag([0.0, 1.0, 1.0]), atol=1e-12)
        np.testing.assert_allclose(S[:, :, 1, 1, 0].real, -(np.eye(3) - np.outer([1, 1, 0], [1, 1, 0]) / 2), atol=1e-12)

    def test_fourier_checks(self, setup):
        layout, cm = setup
        assert all(r.passed for r in verify_dirac_fourier(cm, layout, check=True))

    def test_spatial_transversality(self, setup):
        # the starred bracket of div pi with anything vanishes
        layout, cm = setup
        G = random_family(layout, 2, 9)
        star = dirac_bracket_matrix(cm.constraints[1], G, cm, layout)
        assert np.max(np.abs(star)) < 1e-10 * np.max(np.abs(bracket_matrix(cm.constraints[1], G, layout)))

    def test_canonical_pairs(self, setup):
        layout, _ = setup
        assert canonical_pairs_check(layout, check=True).passed


class TestAudit:
    def test_all_pass(self, setup):
        layout, _ = setup
        results = run_audit(layout)
        assert tuple(r.name for r in results) == AUDIT_CHECKS
        assert all(r.passed for r in results), [r.name for r in results if not r.passed]

    def test_corrupt_fails(self):
        results = run_audit(CanonicalLayout(LatticeSpec((4, 4, 4))), corrupt=True)
        failed = {r.name for r in results if not r.passed}
        assert "first_class" in failed
        first = next(r for r in results if r.name == "first_class")
        assert first.detail["offending_pair"][0][0] in ("phi1", "phi2")

    def test_minimal_lattice(self):
        results = run_audit(CanonicalLayout(LatticeSpec((1, 1, 4), 1.0)))
        assert all(r.passed for r in results)

    def test_family_helpers(self):
        layout = CanonicalLayout(LatticeSpec((1, 1, 4)))
        fam = field_family(layout, "A", 2)
        assert len(fam) == 4
        assert len(fam.concat(fam)) == 8
        two = fam.transform(np.ones((1, 4)))
        A4 = np.zeros((4, 1, 1, 4))
        A4[2] = [1.0, 2.0, 3.0, 4.0]
        assert two.evaluate(A4, np.zeros_like(A4), layout)[0] == pytest.approx(10.0)
        assert isinstance(fam[1], Family)
