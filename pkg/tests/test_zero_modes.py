"""
    Unit tests for zero_modes module
"""
import math

import numpy as np
import pytest

from majoranalib import model_builders, zero_modes
from majoranalib.majorana_algebra import MajoranaOperator, commutator
from majoranalib.model_builders import BTriple, ConfigurationError, ModelSpec, SingleQuartic
from majoranalib.zero_modes import SeriesObstructionError


EXACT = 1e-14


def c(*sites, coeff=1.0):
    return MajoranaOperator.monomial(sites, coeff)


def quartic(n_sites=6, kappa=0.5, g=0.0):
    return ModelSpec(n_sites=n_sites, kappa=kappa, g=g, interaction=SingleQuartic())


def test_prepared_identities_hold_exactly():
    """
    Test every commutator [H_0,0, -i c_a c_b c_c] used to build the first-order mode, and their combination.

    """
    identities = zero_modes.prepared_identities()
    assert len(identities) == 12, f"Expected 12 identities, got {len(identities)}"
    for identity in identities:
        assert identity.error <= EXACT, f"{identity.label}: got {identity.computed}, expected {identity.expected}"


def test_first_order_kappa_pieces_solve_their_equations():
    """
    Test gamma_1^(0), gamma_1^(1) (lambda = 0 and 1) and gamma_1^(2) (lambda = 0) against their defining equations.

    """
    spec = quartic()
    h00 = model_builders.build_h0_bond_part(spec)
    h01 = model_builders.build_h0_kappa_part(spec)
    for lambda_ in (0.0, 1.0):
        order0, order1, order2 = zero_modes.closed_form_gamma1_kappa_orders(lambda_)
        # [H_0,0, gamma^(0)] = 2 c2c3c4
        assert (commutator(h00, order0) - 2 * c(2, 3, 4)).norm() <= EXACT, "kappa^0 equation fails"
        # [H_0,0, gamma^(1)] = 2 c1c2c4 - [H_0,1, gamma^(0)]
        rhs1 = 2 * c(1, 2, 4) - commutator(h01, order0)
        assert (commutator(h00, order1) - rhs1).norm() <= EXACT, f"kappa^1 equation fails for lambda={lambda_}"
        expected = (2 * c(3, 4, 6) - 2 * c(1, 3, 7) + 2 * c(2, 4, 7) + 2 * c(2, 3, 8)
                    + 2 * lambda_ * c(2, 3, 4) + 2 * (1 - lambda_) * c(1, 2, 6))
        assert (-commutator(h01, order1) - expected).norm() <= EXACT, f"-[H01, gamma^(1)] wrong for lambda={lambda_}"
    order0, order1, order2 = zero_modes.closed_form_gamma1_kappa_orders(0.0)
    residual = (commutator(h00, order2) + commutator(h01, order1)).norm()
    assert residual <= EXACT, f"kappa^2 equation fails by {residual}"
    assert (commutator(h01, order0) - (2 * c(1, 3, 5) - 2 * c(2, 4, 5) - 2 * c(2, 3, 6))).norm() <= EXACT


def test_kappa_graded_solver_matches_equations():
    """
    Test the nested solver on the kappa orders of -[V, gamma_0].

    """
    spec = quartic()
    series = zero_modes.kappa_graded_solve(spec, [2 * c(2, 3, 4), 2 * c(1, 2, 4)], depth=2)
    assert len(series.terms) == 2, f"Expected 2 kappa orders, got {len(series.terms)}"
    assert max(series.residuals) <= 1e-10, f"Nested residuals {series.residuals}"
    assert series.terms[0].allclose(c(2, 3, 5, coeff=-1j), atol=1e-10), f"kappa^0 piece is {series.terms[0]}"


def test_min_norm_series_first_order():
    """
    Test that the min-norm gamma_1 solves [H_0, gamma_1] = -[V, gamma_0] and is odd and Hermitian.

    """
    spec = quartic(n_sites=5, kappa=0.3)
    solution = zero_modes.series_solve(spec, order=1)
    h0 = model_builders.build_h0(spec)
    v = model_builders.build_interaction(spec)
    assert solution.gammas[0] == model_builders.build_gamma0(spec), "gamma_0 must be the exact edge mode"
    gamma = solution.gammas[1]
    residual = (commutator(h0, gamma) + commutator(v, solution.gammas[0])).norm()
    assert residual <= 1e-10, f"first-order residual {residual}"
    assert math.isclose(solution.residuals[1], residual, abs_tol=1e-12), "reported residual differs"
    assert gamma.parity() == 'odd', "gamma_1 should be odd"
    assert gamma.is_hermitian(1e-12), "gamma_1 should be Hermitian"
    assert gamma.max_site() <= 2 * spec.n_sites - 1, "gamma_1 leaves the window"


def test_closed_form_gauge_series():
    """
    Test the closed-form first order: its kappa orders and its O(kappa^3) residual.

    """
    spec = quartic(n_sites=6, kappa=0.1)
    solution = zero_modes.series_solve(spec, order=1, gauge='paper_lambda', lambda_=0.0)
    assert solution.kappa_orders is not None and len(solution.kappa_orders) == 3, "expected three kappa orders"
    h01 = model_builders.build_h0_kappa_part(spec)
    expected = spec.kappa ** 3 * commutator(h01, solution.kappa_orders[2]).norm()
    assert math.isclose(solution.residuals[1], expected, rel_tol=1e-8), \
        f"residual {solution.residuals[1]} should be the kappa^3 remainder {expected}"
    rows = solution.csv_rows()
    labels = {row[0] for row in rows}
    assert {'0', '1', '1.kappa0', '1.kappa1', '1.kappa2'} <= labels, f"Missing coefficient blocks in {labels}"
    assert ['1.kappa0', '2 3 5', '0', '-1'] in rows, "gamma_1^(0) = -i c2c3c5 should be listed"


def test_closed_form_gauge_names():
    """
    Test that paper_lambda and its alias closed_form_lambda select the same first order at g = 0.1.

    """
    spec = quartic(n_sites=6, kappa=0.5, g=0.1)
    solution = zero_modes.series_solve(spec, 1, gauge='paper_lambda', lambda_=0.0)
    alias = zero_modes.series_solve(spec, 1, gauge='closed_form_lambda', lambda_=0.0)
    assert solution.gauge == 'paper_lambda' and alias.gauge == 'closed_form_lambda', "the given name is kept"
    assert solution.gammas[1].allclose(alias.gammas[1], atol=1e-14), "alias should give the same gamma_1"
    assert solution.kappa_orders[0].allclose(MajoranaOperator.monomial((2, 3, 5), -1j), atol=1e-14), \
        f"Got gamma_1^(0) = {solution.kappa_orders[0]}"
    with pytest.raises(ConfigurationError):
        zero_modes.series_solve(spec, 1, gauge='lambda')


def test_closed_form_gauge_requires_single_quartic():
    """
    Test that the closed-form gauge refuses other models.

    """
    with pytest.raises(ConfigurationError):
        zero_modes.series_solve(ModelSpec(n_sites=6, kappa=0.5, interaction=BTriple()), 1, gauge='paper_lambda')
    with pytest.raises(ConfigurationError):
        zero_modes.series_solve(quartic(n_sites=4), 1, gauge='paper_lambda')
    with pytest.raises(ConfigurationError):
        zero_modes.series_solve(quartic(), 2, gauge='paper_lambda')


def test_obstruction_is_reported():
    """
    Test that a too-narrow window makes the first order unsolvable.

    """
    with pytest.raises(SeriesObstructionError) as info:
        zero_modes.series_solve(quartic(n_sites=5, kappa=0.3), order=1, window=3)
    assert 'obstruction at order 1' in str(info.value), f"Unexpected message {info.value}"


def test_residual_scaling():
    """
    Test the log-log slope of the truncation residual for k = 0 and k = 1.

    """
    spec = quartic(n_sites=5, kappa=0.3)
    grid = np.linspace(0.02, 0.2, 6)
    zeroth = zero_modes.series_residual_scaling(spec, zero_modes.series_solve(spec, 0), grid)
    v_gamma = commutator(model_builders.build_interaction(spec), model_builders.build_gamma0(spec)).norm()
    for point in zeroth.points:
        assert math.isclose(point.total_residual, abs(point.g) * v_gamma, rel_tol=1e-12), f"k=0 residual at {point.g}"
    assert abs(zeroth.slope - 1.0) < 1e-8, f"k=0 slope should be 1, got {zeroth.slope}"

    first = zero_modes.series_residual_scaling(spec, zero_modes.series_solve(spec, 1), grid)
    assert first.slope >= 1.8, f"k=1 slope should be about 2, got {first.slope}"
    assert first.slope_ok, "slope check should pass"


def test_exactly_solvable_family_has_zero_residual():
    """
    Test that b_triple leaves gamma_0 exact at every g.

    """
    spec = ModelSpec(n_sites=5, kappa=0.4, interaction=BTriple())
    report = zero_modes.series_residual_scaling(spec, zero_modes.series_solve(spec, 0), [0.05, 0.1, 0.2])
    assert all(point.total_residual <= 1e-12 for point in report.points), f"Got {report.points}"
    assert report.slope is None, "an exact mode has no residual slope"


def test_anticommutator_zero_mode_commutes():
    """
    Test that (gamma_0 H_0 + H_0 gamma_0) / 2 is conserved and odd.

    """
    spec = ModelSpec(n_sites=4, kappa=0.5)
    mode = zero_modes.anticommutator_zero_mode(spec)
    assert commutator(model_builders.build_h0(spec), mode).norm() <= 1e-12, "the witness should commute with H_0"
    assert mode.parity() == 'odd' and mode, "the witness should be a nonzero odd operator"


@pytest.mark.parametrize('g', [0.0, 0.1])
def test_kernel_method(g):
    """
    Test the kernel matrix structure, the trivial product and the selected mode for N = 4, kappa = 0.5.

    """
    spec = quartic(n_sites=4, kappa=0.5, g=g)
    report = zero_modes.kernel_solve(spec)
    assert report.basis_size == 64, f"Expected 2^6 odd monomials, got {report.basis_size}"
    assert report.antisymmetry_error <= 1e-12, f"M + M^T = {report.antisymmetry_error}"
    assert report.realness_error <= 1e-12, f"Re M = {report.realness_error}"
    assert report.trivial_residual <= 1e-12 and report.trivial_in_kernel, "the full product must be in the kernel"
    assert report.kernel_dimension >= 2 and report.kernel_dimension % 2 == 0, f"dim {report.kernel_dimension}"
    assert report.residual <= 1e-10, f"||[H, gamma]|| = {report.residual}"
    assert report.fock_residual is not None and report.fock_residual <= 1e-10, f"Fock residual {report.fock_residual}"
    assert report.selected.is_hermitian(1e-12), "the selected mode should be Hermitian"
    assert abs(report.selected.coefficient(range(1, 8))) <= 1e-12, "the selected mode must avoid the trivial product"
    if g == 0.0:
        gamma_hat = model_builders.build_gamma0_normalized(spec)
        assert report.selected.allclose(gamma_hat, atol=1e-10), f"expected gamma_hat_0, got {report.selected}"
        assert math.isclose(report.edge_weight, 16 / 17, rel_tol=1e-10), \
            f"c1 and kappa c3 carry 16/17 of gamma_hat_0, got {report.edge_weight}"


def test_edge_weight_counts_whole_support():
    """
    Test that a three-site term inside sites 1..4 counts fully toward the left-edge weight.

    """
    masks = [0b1, 0b111, 0b10000, 0b11111]
    kernel = np.array([[0.0, 0.6], [1.0, 0.0], [0.0, 0.8], [0.0, 0.0]])
    vector, weight = zero_modes._select_edge_mode(kernel, masks, trivial=3)
    assert np.allclose(vector, [0.0, 1.0, 0.0, 0.0], atol=1e-12), f"expected c1c2c3, got {vector}"
    assert math.isclose(weight, 1.0, rel_tol=1e-12), f"Got edge weight {weight}"


def test_kernel_size_limit():
    """
    Test that the kernel method refuses chains longer than 6 sites before building M.

    """
    with pytest.raises(ConfigurationError):
        zero_modes.kernel_solve(quartic(n_sites=7, kappa=0.5, g=0.1))


def test_kernel_matrix_is_hermitian_imaginary():
    """
    Test M_ab = (C_a, [H, C_b]) on a small chain.

    """
    spec = quartic(n_sites=3, kappa=0.7, g=0.3)
    masks = zero_modes.odd_masks(5)
    matrix = zero_modes.kernel_matrix(model_builders.build_hamiltonian(spec), masks)
    assert np.allclose(matrix, matrix.conj().T, atol=1e-12), "M should be Hermitian"
    assert np.max(np.abs(matrix.real)) <= 1e-12, "M should be pure imaginary"
    assert np.max(np.abs(matrix[:, -1])) <= 1e-12, "the full product column should vanish"


def test_localization_of_exact_mode():
    """
    Test that the g = 0 mode decays at rate log|kappa|.

    """
    spec = ModelSpec(n_sites=6, kappa=0.5)
    profile = zero_modes.localization_profile(model_builders.build_gamma0_normalized(spec), spec)
    assert abs(profile.rate - math.log(0.5)) <= 1e-10, f"rate {profile.rate} != log 0.5"
    assert abs(profile.r_squared - 1.0) <= 1e-10, f"geometric decay should fit exactly, r^2 = {profile.r_squared}"
    assert profile.decreasing, f"residuals should decrease: {profile.residuals}"
    assert profile.cutoffs == [2, 3, 4, 5, 6], f"Got cutoffs {profile.cutoffs}"


def test_localization_of_single_site_operator():
    """
    Test that c_1 has no truncation residual and an undefined rate.

    """
    spec = ModelSpec(n_sites=4, kappa=0.5)
    profile = zero_modes.localization_profile(MajoranaOperator.generator(1), spec, with_operator_norm=True)
    assert profile.residuals == [0.0, 0.0, 0.0], f"Got {profile.residuals}"
    assert profile.operator_residuals == [0.0, 0.0, 0.0], f"Got {profile.operator_residuals}"
    assert profile.rate is None and profile.fit_points == 1, "one nonzero shell cannot be fitted"


def test_localization_of_interacting_kernel_mode():
    """
    Test that the g = 0.1 kernel mode for N = 5, kappa = 0.4 has decreasing truncation residuals.

    """
    spec = quartic(n_sites=5, kappa=0.4, g=0.1)
    report = zero_modes.kernel_solve(spec, fock_check=False)
    assert report.profile.decreasing, f"residuals should decrease: {report.profile.residuals}"
    assert report.profile.rate is not None and report.profile.rate < 0, f"rate {report.profile.rate}"
