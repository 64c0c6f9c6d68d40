"""
    Unit tests for fock_rep module
"""
import numpy as np
import pytest

from majoranalib import fock_rep
from majoranalib.fock_rep import DimensionError, FockRepresentation
from majoranalib.majorana_algebra import MajoranaOperator, random_operator


def test_generators_satisfy_clifford_relations():
    """
    Test that compiled generators are Hermitian, square to one and anticommute.

    """
    rep = FockRepresentation(3)
    identity = np.eye(rep.dimension)
    mats = [rep.generator(site).toarray() for site in range(1, rep.site_count + 1)]
    for i, a in enumerate(mats):
        assert np.allclose(a, a.conj().T), f"c_{i + 1} is not Hermitian"
        for j, b in enumerate(mats):
            expected = 2 * identity if i == j else 0 * identity
            assert np.allclose(a @ b + b @ a, expected), f"{{c_{i + 1}, c_{j + 1}}} is wrong"


def test_compile_is_a_homomorphism():
    """
    Test compile(a b) = compile(a) compile(b) and compile(a^dagger) = compile(a)^dagger.

    """
    rng = np.random.default_rng(17)
    rep = fock_rep.representation(3)
    for _ in range(5):
        a, b = random_operator(rng, 6, 5), random_operator(rng, 6, 5)
        product = rep.compile(a * b)
        assert np.max(np.abs(product - rep.compile(a) @ rep.compile(b))) <= 1e-10, "product not preserved"
        assert np.allclose(rep.compile(a.dagger()), rep.compile(a).conj().T), "adjoint not preserved"


def test_parity_operator():
    """
    Test that P is diagonal with (-1)^(occupation) and anticommutes with every generator.

    """
    rep = fock_rep.representation(2)
    assert list(rep.parity_diagonal()) == [1, -1, -1, 1], f"Got {rep.parity_diagonal()}"
    parity = fock_rep.parity_operator(2)
    for site in range(1, 5):
        gen = rep.generator(site).toarray()
        assert np.allclose(parity @ gen, -gen @ parity), f"P should anticommute with c_{site}"
    assert list(rep.sector_indices(-1)) == [1, 2], f"Odd sector is {rep.sector_indices(-1)}"


def test_number_operator_is_occupation():
    """
    Test n_1 = (1 + i c1 c2) / 2 is the projector on the occupied state of mode 1.

    """
    matrix = fock_rep.compile(fock_rep.number_operator([1]), 2)
    assert np.allclose(np.diag(matrix), [0, 0, 1, 1]), f"n_1 diagonal is {np.diag(matrix)}"
    total = fock_rep.compile(fock_rep.number_operator([1, 2]), 2)
    assert np.allclose(np.diag(total), [0, 1, 1, 2]), f"N diagonal is {np.diag(total)}"


def test_fermion_number_of_a_mode():
    """
    Test that a^dagger a has eigenvalues 0 and 1 for a = (c1 + i c2) / 2.

    """
    a = 0.5 * (MajoranaOperator.generator(1) + 1j * MajoranaOperator.generator(2))
    values = np.linalg.eigvalsh(fock_rep.compile(fock_rep.fermion_number(a), 1))
    assert np.allclose(values, [0, 1]), f"Expected [0, 1], got {values}"


def test_operator_norm_and_support_checks():
    """
    Test the operator norm and the DimensionError on oversized operators.

    """
    assert abs(fock_rep.operator_norm(MajoranaOperator.generator(3), 2) - 1.0) < 1e-12, "||c_3|| should be 1"
    assert fock_rep.operator_norm(MajoranaOperator.zero(), 2) == 0.0, "||0|| should be 0"
    with pytest.raises(DimensionError):
        fock_rep.compile(MajoranaOperator.generator(5), 2)
    with pytest.raises(ValueError):
        FockRepresentation(0)
    assert fock_rep.mode_count_for(MajoranaOperator.generator(5)) == 3, "c_5 needs three modes"
    assert fock_rep.representation(2) is fock_rep.representation(2), "representations should be cached"
