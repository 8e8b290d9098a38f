import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steklov_neumann.closed_forms import mu_l_concentric
from steklov_neumann.geometry import AnnulusSpec, StarPolarCurve, annulus_domain, build_domain, build_simply_connected
from steklov_neumann.solver import (HarmonicBasis, SolverError, SolverOptions, assemble_boundary_mass,
                                    assemble_stiffness, circle_pair_poles, solve, solve_pencil)


@pytest.fixture(scope="module")
def concentric():
    return solve(annulus_domain(AnnulusSpec(2, 1.0, 2.0)), n_modes=11)


def test_concentric_mu1(concentric):
    assert abs(concentric.mu0) <= 1e-10
    assert abs(concentric.mu1 - 0.3) <= 1e-10
    assert concentric.multiplicity(1) == 2


def test_concentric_spectrum_matches_closed_form(concentric):
    spec = AnnulusSpec(2, 1.0, 2.0)
    expected = [0.0] + [mu_l_concentric(spec, l).value for l in range(1, 6) for _ in range(2)]
    assert np.max(np.abs(concentric.eigenvalues - expected)) <= 1e-9


def test_trace_normalization(concentric):
    M = assemble_boundary_mass(concentric.domain, concentric.basis)
    C = concentric.coefficients
    assert np.max(np.abs(C.T @ M @ C - np.eye(C.shape[1]))) <= 1e-8


def test_flux_residual_small(concentric):
    assert max(concentric.diagnostics.flux_residual) <= 1e-10
    assert concentric.diagnostics.asymmetry <= 1e-10


def test_disk_steklov_spectrum():
    sol = solve(build_simply_connected(StarPolarCurve(1.0)), SolverOptions(mode="steklov"), n_modes=11)
    expected = [0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5]
    assert np.max(np.abs(sol.eigenvalues - expected)) <= 1e-9


def test_steklov_mode_ignores_hole():
    a = solve(annulus_domain(AnnulusSpec(2, 0.5, 2.0)), SolverOptions(mode="steklov"), n_modes=3)
    assert abs(a.mu1 - 0.5) <= 1e-9


@pytest.mark.parametrize("scale", [0.5, 2.0])
def test_scaling_covariance(scale):
    dom = build_domain(StarPolarCurve(1.5, (0, 0, 0.2)), 0.5)
    base = solve(dom, n_modes=4).eigenvalues
    big = solve(dom.scaled(scale), n_modes=4).eigenvalues
    assert np.max(np.abs(big - base / scale)) <= 1e-9 * max(1, 1 / scale)


def test_translation_invariance():
    dom = build_domain(StarPolarCurve(1.5, (0, 0, 0.2)), 0.5)
    base = solve(dom, n_modes=4).eigenvalues
    moved = solve(dom.translated((3.0, -1.5)), n_modes=4).eigenvalues
    assert np.max(np.abs(moved - base)) <= 1e-9


def test_star_multiplicity_two():
    # reference from N = 56 (flux residual 5e-13); N = 48 agrees to 2e-12
    sol = solve(build_domain(StarPolarCurve(1.5, (0, 0, 0.2)), 0.5), SolverOptions(N=48), n_modes=4)
    assert sol.multiplicity(1) == 2
    assert abs(sol.mu1 - 0.4767107595795) <= 1e-9


def test_circle_pair_poles_symmetric():
    R1, R2, d = 1.0, 2.0, 0.6
    p, q = circle_pair_poles(R1, R2, d)
    # both circles are Apollonius circles of the pole pair
    t = np.linspace(0, 2 * np.pi, 50)
    for c, R in ((0.0, R1), (d, R2)):
        z = 1j * c + R * np.exp(1j * t)
        ratio = np.abs((z - p) / (z - q))
        assert np.ptp(ratio) <= 1e-12 * ratio.max()


@pytest.mark.parametrize("d", [0.3, 0.5])
def test_conformal_basis_agrees_with_plain(d):
    dom = annulus_domain(AnnulusSpec(2, 1.0, 2.0, d))
    a = solve(dom, SolverOptions(N=32), n_modes=3).mu1
    b = solve(dom, SolverOptions(N=40, conformal=False), n_modes=3).mu1
    assert abs(a - b) <= 1e-7


def test_eccentric_converged_and_degenerate():
    dom = annulus_domain(AnnulusSpec(2, 1.0, 2.0, 0.9))
    a = solve(dom, SolverOptions(N=24), n_modes=4)
    b = solve(dom, SolverOptions(N=32), n_modes=4)
    assert abs(a.mu1 - 0.23153723082449) <= 1e-8
    assert abs(a.mu1 - b.mu1) <= 1e-8
    assert a.multiplicity(1) == 2
    assert max(a.diagnostics.flux_residual[:3]) <= 1e-10


@pytest.mark.parametrize("conformal", [True, False])
def test_basis_gradient_matches_finite_differences(conformal):
    dom = annulus_domain(AnnulusSpec(2, 1.0, 2.0, 0.7))
    basis = HarmonicBasis.for_domain(dom, 6, conformal)
    rng = np.random.default_rng(3)
    p = np.column_stack([rng.uniform(-1.6, 1.6, 8), rng.uniform(1.05, 1.5, 8)])
    _, gx, gy = basis.evaluate(p, gradient=True)
    h = 1e-6
    fx = (basis.evaluate(p + [h, 0], gradient=False) - basis.evaluate(p - [h, 0], gradient=False)) / (2 * h)
    fy = (basis.evaluate(p + [0, h], gradient=False) - basis.evaluate(p - [0, h], gradient=False)) / (2 * h)
    assert np.max(np.abs(gx - fx)) <= 1e-6 * max(1, np.max(np.abs(gx)))
    assert np.max(np.abs(gy - fy)) <= 1e-6 * max(1, np.max(np.abs(gy)))


def test_combine_matches_evaluate():
    dom = annulus_domain(AnnulusSpec(2, 1.0, 2.0, 0.4))
    basis = HarmonicBasis.for_domain(dom, 8)
    c = np.random.default_rng(0).standard_normal(basis.dim)
    p = dom.outer.points[::7]
    V, GX, GY = basis.evaluate(p, gradient=True)
    v, gx, gy = basis.combine(c, p, gradient=True)
    assert np.max(np.abs(V @ c - v)) <= 1e-12 * np.max(np.abs(v))
    assert np.max(np.abs(GX @ c - gx)) <= 1e-11 * max(1, np.max(np.abs(gx)))
    assert np.max(np.abs(GY @ c - gy)) <= 1e-11 * max(1, np.max(np.abs(gy)))


def test_stiffness_symmetric_psd():
    dom = annulus_domain(AnnulusSpec(2, 1.0, 2.0, 0.4))
    basis = HarmonicBasis.for_domain(dom, 8)
    K, asym = assemble_stiffness(dom, basis)
    assert asym <= 1e-10
    assert np.min(np.linalg.eigvalsh(K)) >= -1e-10 * np.linalg.norm(K, 2)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 0.6), st.floats(1.5, 3.0))
def test_concentric_property(R1, R2):
    sol = solve(annulus_domain(AnnulusSpec(2, R1, R2)), n_modes=3)
    assert abs(sol.mu1 - mu_l_concentric(AnnulusSpec(2, R1, R2), 1).value) <= 1e-9


def test_pencil_small_example():
    K = np.diag([0.0, 2.0, 6.0])
    M = np.diag([1.0, 1.0, 2.0])
    sol = solve_pencil(K, M)
    assert np.allclose(sol.eigenvalues, [0, 2, 3], atol=1e-12)
    assert np.allclose(sol.coefficients.T @ M @ sol.coefficients, np.eye(3), atol=1e-12)


def test_pencil_drops_infinite_eigenvalues():
    K = np.diag([0.0, 1.0, 5.0])
    M = np.diag([1.0, 1.0, 0.0])
    sol = solve_pencil(K, M)
    assert np.allclose(sol.eigenvalues, [0, 1], atol=1e-12)


def test_pencil_errors():
    with pytest.raises(SolverError):
        solve_pencil(np.eye(2), np.zeros((2, 2)))
    with pytest.raises(SolverError):
        solve_pencil(np.eye(2), np.eye(2))  # no constant mode
    with pytest.raises(ValueError):
        solve_pencil(np.eye(2), np.eye(3))


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(N=0)
    with pytest.raises(ValueError):
        SolverOptions(mode="dirichlet")


def test_needs_hole():
    with pytest.raises(ValueError):
        solve(build_simply_connected(StarPolarCurve(1.0)))


def test_evaluate_rejects_outside(concentric):
    with pytest.raises(ValueError):
        concentric.evaluate(1, [[0.1, 0.0]])
    with pytest.raises(ValueError):
        concentric.evaluate(1, [[2.5, 0.0]])


def test_convergence_delta_reported():
    sol = solve(annulus_domain(AnnulusSpec(2, 1.0, 2.0, 0.5)), n_modes=3, check_convergence=True)
    assert sol.diagnostics.convergence_delta <= 1e-9
    assert abs(sol.mu1 - 0.287799741200634) <= 1e-9
