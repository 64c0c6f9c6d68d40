"""
    Unit tests for spectral module
"""
import math

import numpy as np
import pytest

from majoranalib import constants, model_builders, spectral
from majoranalib.majorana_algebra import MajoranaOperator
from majoranalib.model_builders import ModelSpec, SingleQuartic
from majoranalib.spectral import ContractError, QuadraticFormError


def c(*sites, coeff=1.0):
    return MajoranaOperator.monomial(sites, coeff)


def test_single_bond_spectrum():
    """
    Test the spectrum of i c2 c3 on two modes: {-1, -1, 1, 1}.

    """
    report = spectral.spectrum(c(2, 3, coeff=1j), mode_count=2)
    assert np.allclose(report.eigenvalues, [-1, -1, 1, 1]), f"Got {report.eigenvalues}"
    assert report.clusters == [(0, 2), (2, 2)], f"Got clusters {report.clusters}"
    assert report.cluster_parities(0) == [-1, 1], "ground doublet should hold one state of each parity"
    assert math.isclose(report.gap, 2.0), f"Gap should be 2, got {report.gap}"
    assert report.pairing_splitting < 1e-14, f"Pairing splitting {report.pairing_splitting}"


def test_non_hermitian_input_is_rejected():
    """
    Test that ContractError is raised for a non-Hermitian operator.

    """
    with pytest.raises(ContractError):
        spectral.spectrum(c(1, 2), mode_count=1)


def test_odd_operator_uses_parity_expectation():
    """
    Test that an odd Hermitian operator is diagonalized without sectors and cannot certify pairing.

    """
    report = spectral.spectrum(MajoranaOperator.generator(1), mode_count=1)
    assert not report.sector_resolved, "c_1 mixes the parity sectors"
    assert report.parities == [0, 0], f"Eigenvectors of c_1 have no definite parity, got {report.parities}"
    with pytest.raises(ContractError):
        spectral.require_pairing(report)


def test_spectrum_pairing_under_interaction():
    """
    Test the exact opposite-parity pairing and a positive, Lipschitz-bounded gap for N = 6.

    """
    spec = ModelSpec(n_sites=6, kappa=0.5, interaction=SingleQuartic())
    sweep = spectral.gap_sweep(spec, [0.0, 0.05, -0.05, 0.15, -0.15], strict=True)
    assert sweep.max_splitting < 1e-10, f"Pairing splitting {sweep.max_splitting}"
    assert sweep.min_gap > 0, f"Gap closed: {sweep.min_gap}"
    assert sweep.lipschitz_violations == [], f"Lipschitz violations at {sweep.lipschitz_violations}"
    report = spectral.spectrum(model_builders.build_hamiltonian(spec.with_coupling(0.15)), mode_count=6)
    assert len(report.eigenvalues) == 64, f"Expected 64 eigenvalues, got {len(report.eigenvalues)}"
    spectral.require_pairing(report)
    assert all(size % 2 == 0 for _, size in report.clusters), "every level should come in pairs"


def test_gap_sweep_csv_and_g_max():
    """
    Test the sweep rows and the empirical g_max.

    """
    spec = ModelSpec(n_sites=3, kappa=0.5, interaction=SingleQuartic())
    sweep = spectral.gap_sweep(spec, [0.0, 0.1, 0.2])
    rows = sweep.csv_rows()
    assert len(rows) == 3 and rows[0][0] == '0', f"Unexpected rows {rows}"
    assert sweep.csv_header == ('g', 'splitting', 'gap', 'ground_energy'), f"Got {sweep.csv_header}"
    assert sweep.g_max == 0.2, f"The gap stays open on this grid, g_max should be 0.2, got {sweep.g_max}"


def test_two_path_spectrum_oracle():
    """
    Test that Fock ED of H_0 equals the free-fermion reconstruction from the bulk form, N <= 6.

    """
    for n in range(2, 7):
        spec = ModelSpec(n_sites=n, kappa=0.5)
        exact = spectral.spectrum(model_builders.build_h0(spec), mode_count=n).eigenvalues
        form = spectral.tilde_quadratic_form(spec)
        reconstructed = np.sort(np.repeat(spectral.free_fermion_spectrum(form), 2))
        error = np.max(np.abs(np.asarray(exact) - reconstructed))
        assert error <= 1e-10, f"Spectra differ by {error} at N={n}"


def test_quadratic_form_round_trip_and_errors():
    """
    Test quadratic_form_from against its operator and its error cases.

    """
    op = c(2, 3, coeff=1j) + 0.5 * c(1, 4, coeff=1j)
    form = spectral.quadratic_form_from(op)
    assert form.labels == (1, 2, 3, 4), f"Got labels {form.labels}"
    assert form.operator().allclose(op, atol=1e-15), f"Form rebuilds {form.operator()}"
    assert np.allclose(spectral.free_fermion_spectrum(spectral.quadratic_form_from(c(2, 3, coeff=1j))), [-1, 1])
    with pytest.raises(QuadraticFormError):
        spectral.quadratic_form_from(c(1, 2, 3, 4))
    with pytest.raises(QuadraticFormError):
        spectral.quadratic_form_from(MajoranaOperator.zero())
    with pytest.raises(QuadraticFormError):
        spectral.eta_form(spectral.quadratic_form_from(c(1, 2, coeff=1j), generators=(1, 2, 3, 4)))


def test_tilde_frame():
    """
    Test the tilde variables: canonical relations, orthogonality and the rebuilt H_0.

    """
    frame = spectral.tilde_frame(ModelSpec(n_sites=5, kappa=0.4))
    assert frame.max_anticommutator <= 1e-12, f"Anticommutator {frame.max_anticommutator}"
    assert frame.max_square_error <= 1e-12, f"Square error {frame.max_square_error}"
    assert frame.gram_error <= 1e-12, f"Gram error {frame.gram_error}"
    assert frame.rebuild_error <= 1e-10, f"Rebuilt H_0 differs by {frame.rebuild_error}"
    rotation = frame.rotation()
    assert np.allclose(rotation @ rotation.T, np.eye(10)), "rotation should be orthogonal"
    with pytest.raises(QuadraticFormError):
        spectral.tilde_frame(ModelSpec(n_sites=3, kappa=0.0))


def test_doubled_eta_check():
    """
    Test the eta construction on the doubled bulk system for N = 3, kappa = 0.5.

    """
    report = spectral.doubled_eta_check(ModelSpec(n_sites=3, kappa=0.5))
    assert report.bulk_count == 4, f"Expected 4 bulk generators, got {report.bulk_count}"
    assert report.canonical_error <= 1e-12, f"eta fermions not canonical: {report.canonical_error}"
    assert report.identity_error <= 1e-10, f"H~_0 != 4 eta^dagger |A| eta - 2 Tr|A|: {report.identity_error}"
    assert report.spectrum_error <= 1e-10, f"Spectrum mismatch {report.spectrum_error}"
    assert report.lower_bound_min_eig >= -1e-10, f"Lower bound violated: {report.lower_bound_min_eig}"
    assert report.passed, f"eta check failed: {report}"


def test_single_pair_eta_form():
    """
    Test the eta construction for one pair, H = 2 i a c1 c2: each eta fermion costs 4a.

    """
    a = 0.75
    form = spectral.quadratic_form_from(c(1, 2, coeff=2j * a))
    assert np.allclose(form.matrix, [[0, 1j * a], [-1j * a, 0]]), f"Got A = {form.matrix}"
    eta = spectral.eta_form(form)
    assert np.allclose(eta.abs_matrix, a * np.eye(2), atol=1e-12), f"|A| should be a * 1, got {eta.abs_matrix}"
    assert eta.block_error <= 1e-12, f"U_hat block error {eta.block_error}"

    assert constants.ETA_FORM_PREFACTOR == 4.0, "H = sum c_i A_ij c_j gives 4 eta^dagger |A| eta"
    doubled = c(1, 2, coeff=2j * a) - c(3, 4, coeff=2j * a)
    levels = spectral.spectrum(doubled, mode_count=2).eigenvalues
    assert np.allclose(levels, [-4 * a, 0, 0, 4 * a], atol=1e-12), f"Got doubled spectrum {levels}"
    shifted = np.asarray(levels) - levels[0]
    assert np.allclose(shifted, constants.ETA_FORM_PREFACTOR * a * np.array([0, 1, 1, 2]), atol=1e-12), \
        f"Excitations should be multiples of 4a, got {shifted}"

    report = spectral.doubled_system_check(form)
    assert report.identity_error <= 1e-12, f"H~ != 4 a eta^dagger eta - 4a: {report.identity_error}"
    assert report.spectrum_error <= 1e-12 and report.free_fermion_error <= 1e-12, f"Spectra disagree: {report}"
    assert math.isclose(report.single_particle_gap, a), f"Gap should be {a}, got {report.single_particle_gap}"
    assert report.passed, f"eta check failed: {report}"
