"""
    Unit tests for majorana_algebra module
"""
from pathlib import Path

import numpy as np
import pytest

from majoranalib import fock_rep
from majoranalib.majorana_algebra import (MajoranaOperator, anticommutator, commutator, dagger,
                                          format_monomial, from_hermitian_coefficients, hermitian_basis_element,
                                          hermitian_phase, inner_product, multiply, odd_masks, parity, parse,
                                          random_operator, to_hermitian_coefficients, truncate_support)

FIXTURES = Path(__file__).parent / 'fixtures'


def c(*sites, coeff=1.0):
    return MajoranaOperator.monomial(sites, coeff)


def test_generators_square_to_one():
    """
    Test c_i c_i = 1 for several sites.

    """
    for site in (1, 2, 7, 40):
        square = c(site) * c(site)
        assert square == MajoranaOperator.identity(), f"c_{site}^2 should be 1, got {square}"


def test_generators_anticommute():
    """
    Test {c_i, c_j} = 2 delta_ij.

    """
    for i in range(1, 6):
        for j in range(1, 6):
            result = anticommutator(c(i), c(j))
            expected = MajoranaOperator.identity(2.0) if i == j else MajoranaOperator.zero()
            assert result == expected, f"{{c_{i}, c_{j}}} should be {expected}, got {result}"


def test_monomial_reduces_to_canonical_order():
    """
    Test that arbitrary products reduce to a sorted monomial times a sign.

    """
    assert c(2, 1) == c(1, 2, coeff=-1.0), f"c2 c1 should be -c1 c2, got {c(2, 1)}"
    assert c(3, 1, 2) == c(1, 2, 3), f"c3 c1 c2 should be +c1 c2 c3, got {c(3, 1, 2)}"
    assert c(1, 2, 1) == c(2, coeff=-1.0), f"c1 c2 c1 should be -c2, got {c(1, 2, 1)}"


def test_product_is_associative():
    """
    Test (ab)c = a(bc) on random operators.

    """
    rng = np.random.default_rng(7)
    a, b, d = (random_operator(rng, 6, 5) for _ in range(3))
    left = multiply(multiply(a, b), d)
    right = multiply(a, multiply(b, d))
    assert left.allclose(right, atol=1e-12), f"Associativity broken by {(left - right).norm()}"


def test_commutator_matches_definition_and_jacobi():
    """
    Test [a, b] = ab - ba and the Jacobi identity.

    """
    rng = np.random.default_rng(11)
    a, b, d = (random_operator(rng, 6, 4) for _ in range(3))
    assert commutator(a, b).allclose(a * b - b * a, atol=1e-12), "commutator differs from ab - ba"
    assert anticommutator(a, b).allclose(a * b + b * a, atol=1e-12), "anticommutator differs from ab + ba"
    jacobi = commutator(a, commutator(b, d)) + commutator(b, commutator(d, a)) + commutator(d, commutator(a, b))
    assert jacobi.norm() < 1e-10, f"Jacobi identity broken by {jacobi.norm()}"


def test_dagger_properties():
    """
    Test (ab)^dagger = b^dagger a^dagger, involution and Hermiticity of i c1 c2.

    """
    rng = np.random.default_rng(3)
    a, b = random_operator(rng, 5, 6), random_operator(rng, 5, 6)
    assert dagger(a * b).allclose(dagger(b) * dagger(a), atol=1e-12), "(ab)^dagger != b^dagger a^dagger"
    assert dagger(dagger(a)) == a, "dagger should be an involution"
    assert c(1, 2, coeff=1j).is_hermitian(), "i c1 c2 should be Hermitian"
    assert not c(1, 2).is_hermitian(), "c1 c2 is anti-Hermitian"
    assert random_operator(rng, 5, 6, hermitian=True).is_hermitian(1e-14), "hermitian=True should symmetrize"


def test_inner_product_and_norm():
    """
    Test the normalized trace inner product.

    """
    assert inner_product(MajoranaOperator.identity(), MajoranaOperator.identity()) == 1, "(1, 1) should be 1"
    assert inner_product(c(1), c(2)) == 0, "distinct monomials are orthogonal"
    a = c(1, coeff=3.0) + c(2, 3, coeff=4j)
    assert abs(a.norm() - 5.0) < 1e-15, f"norm should be 5, got {a.norm()}"
    assert abs(inner_product(a, a) - 25.0) < 1e-12, f"(a, a) should be 25, got {inner_product(a, a)}"


def test_truncate_support():
    """
    Test Pi_{>=m}: terms touching a site >= m are removed.

    """
    a = c(1) + c(1, 2, 3) + c(2, 5, 6)
    truncated = truncate_support(a, 4)
    assert truncated == c(1) + c(1, 2, 3), f"Expected terms inside {{1, 2, 3}}, got {truncated}"
    assert truncate_support(a, 1) == MajoranaOperator.zero(), "cutoff 1 removes everything but the identity"
    assert truncate_support(truncated, 4) == truncated, "Pi should be idempotent"
    rng = np.random.default_rng(11)
    for _ in range(5):
        b = random_operator(rng, 6, 8)
        for cutoff in (2, 4, 6):
            projected = truncate_support(b, cutoff)
            assert truncate_support(projected, cutoff) == projected, f"Pi_{cutoff} is not idempotent"
            assert projected.norm() <= b.norm() + 1e-12, f"coefficient norm grew under Pi_{cutoff}"
            assert fock_rep.operator_norm(projected, 3) <= fock_rep.operator_norm(b, 3) + 1e-10, \
                f"operator norm grew under Pi_{cutoff}"
    with pytest.raises(ValueError):
        truncate_support(a, 0)


def test_parity():
    """
    Test even, odd and mixed parity labels.

    """
    assert parity(c(1, 2) + MajoranaOperator.identity()) == 'even', "c1 c2 + 1 is even"
    assert parity(c(1) + c(1, 2, 3)) == 'odd', "c1 + c1 c2 c3 is odd"
    assert parity(c(1) + c(1, 2)) == 'mixed', "c1 + c1 c2 is mixed"
    assert parity(MajoranaOperator.zero()) == 'even', "the zero operator counts as even"


def test_hermitian_basis():
    """
    Test that C_a is Hermitian, squares to one and carries the phase i^(n(n-1)/2).

    """
    assert hermitian_phase(1) == 1 and hermitian_phase(3) == -1j, "phases for n = 1, 3 are 1 and -i"
    for mask in odd_masks(5):
        element = hermitian_basis_element(mask).operator()
        assert element.is_hermitian(), f"C_{format_monomial(mask)} is not Hermitian"
        assert element * element == MajoranaOperator.identity(), f"C_{format_monomial(mask)}^2 != 1"
    with pytest.raises(ValueError):
        hermitian_basis_element((1, 2))


def test_odd_masks_count_and_order():
    """
    Test that odd_masks lists 2^(n-1) ascending masks.

    """
    masks = odd_masks(5)
    assert len(masks) == 16, f"Expected 16 odd subsets of 5 sites, got {len(masks)}"
    assert list(masks) == sorted(masks), "masks should be ascending"
    assert masks[-1] == 0b11111, "the full product is the last mask"


def test_hermitian_coefficients_are_real_for_hermitian_operators():
    """
    Test conversion to and from the Hermitian basis.

    """
    rng = np.random.default_rng(5)
    a = random_operator(rng, 5, 8, hermitian=True)
    coefficients = to_hermitian_coefficients(a)
    assert max(abs(v.imag) for v in coefficients.values()) < 1e-14, "Hermitian input must give real coefficients"
    assert from_hermitian_coefficients(coefficients).allclose(a, atol=1e-14), "round trip through C_a failed"


def test_text_golden():
    """
    Test the canonical text form against the stored golden file.

    """
    text = (FIXTURES / 'operator_text.txt').read_text().strip()
    op = parse(text)
    assert op.coefficient((1, 3)) == 0.5 - 2j, f"Unexpected c1c3 coefficient {op.coefficient((1, 3))}"
    assert op.to_text() == text, f"Rendering changed:\n{op.to_text()}\n!=\n{text}"
    assert MajoranaOperator.zero().to_text() == '0', "zero renders as '0'"
    with pytest.raises(ValueError):
        parse('3 * c[1]')


def test_display_eps_hides_small_terms():
    """
    Test that display_eps only affects rendering.

    """
    a = c(1) + c(2, coeff=1e-16)
    assert a.to_text(display_eps=1e-14) == '(1.0+0.0j) * c[1]', f"Got {a.to_text(display_eps=1e-14)}"
    assert len(a) == 2, "the small term stays in the operator"
