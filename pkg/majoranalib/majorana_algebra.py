"""
This module contains the MajoranaOperator class, the symbolic currency of the library, and
the exact algebra on it: products, commutators, Hermitian conjugation, parity, the
coefficient inner product and support truncation.

An operator is a sparse linear combination of canonical monomials c_i1 c_i2 ... c_in with
i1 < i2 < ... < in. The generators obey c_i^dagger = c_i and {c_i, c_j} = 2 delta_ij, so every
product reduces to a canonical monomial times a sign. Monomials are keyed by a bitmask
(bit i-1 <=> site i), and operators are immutable once built: every operation returns a
new operator.

    >>> c1, c2 = MajoranaOperator.generator(1), MajoranaOperator.generator(2)
    >>> (c2 * c1).to_text()
    '(-1.0+0.0j) * c[1]c[2]'

"""
import itertools
import numbers
import math
import re
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Optional, Tuple, Union

from . import constants, utils
from .types import Parity, Scalar, SiteMask

_TERM_PATTERN = re.compile(r'^\((?P<coeff>[^()]*)\) \* (?P<monomial>1|(?:c\[\d+\])+)$')
_SITE_PATTERN = re.compile(r'c\[(\d+)\]')

# i^k for k = 0, 1, 2, 3, kept exact
_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


class MajoranaOperator:
    """
    Immutable sparse linear combination of canonical Majorana monomials.

    terms (Mapping[int, complex]): coefficient per SiteSet bitmask.
    prune_tol (float): coefficients with magnitude <= prune_tol are dropped; the default
        drops exact zeros only.

    """
    __slots__ = ('_terms',)

    # numpy scalars defer to the reflected operators below instead of broadcasting
    __array_ufunc__ = None

    def __init__(self, terms: Optional[Mapping[SiteMask, Scalar]] = None,
                 prune_tol: float = constants.DEFAULT_PRUNE_TOL) -> None:
        cleaned: Dict[SiteMask, complex] = {}
        for mask, coeff in (terms or {}).items():
            mask = int(mask)
            if mask < 0:
                raise ValueError(f'site masks must be non-negative; got {mask}.')
            coeff = complex(coeff)
            if abs(coeff) > prune_tol:
                cleaned[mask] = coeff
        self._terms = cleaned

    # Constructors

    @classmethod
    def zero(cls) -> 'MajoranaOperator':
        return cls()

    @classmethod
    def identity(cls, coeff: Scalar = 1.0) -> 'MajoranaOperator':
        return cls({0: coeff})

    @classmethod
    def generator(cls, site: int, coeff: Scalar = 1.0) -> 'MajoranaOperator':
        """
        returns coeff * c_site.
        """
        return cls({utils.sites_to_mask((site,)): coeff})

    @classmethod
    def monomial(cls, sites: Iterable[int], coeff: Scalar = 1.0) -> 'MajoranaOperator':
        """
        sites - generator indices in the order they are multiplied (repeats allowed).
        coeff - prefactor.

        returns coeff * c_s1 c_s2 ... reduced to canonical form.
        """
        mask, sign = 0, 1
        for site in sites:
            bit = utils.sites_to_mask((site,))
            sign *= utils._reorder_sign(mask, bit)
            mask ^= bit
        return cls({mask: sign * complex(coeff)})

    @classmethod
    def linear(cls, coefficients: Mapping[int, Scalar]) -> 'MajoranaOperator':
        """
        returns sum_i coefficients[i] * c_i.
        """
        return cls({utils.sites_to_mask((site,)): coeff for site, coeff in coefficients.items()})

    # Inspection

    def items(self) -> Iterator[Tuple[SiteMask, complex]]:
        return iter(self._terms.items())

    @property
    def terms(self) -> Dict[SiteMask, complex]:
        """
        returns a copy of the mask -> coefficient map.
        """
        return dict(self._terms)

    def coefficient(self, sites: Union[SiteMask, Iterable[int]]) -> complex:
        """
        returns the coefficient of the canonical monomial on `sites` (a mask or ascending sites).
        """
        mask = sites if isinstance(sites, int) else utils.sites_to_mask(sites)
        return self._terms.get(mask, 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def norm(self) -> float:
        """
        returns the coefficient 2-norm sqrt(sum |coeff|^2), equal to the normalized trace norm.
        """
        return math.sqrt(sum(abs(coeff) ** 2 for coeff in self._terms.values()))

    def support(self) -> SiteMask:
        """
        returns the union of all monomial masks.
        """
        mask = 0
        for key in self._terms:
            mask |= key
        return mask

    def max_site(self) -> int:
        return utils.max_site(self.support())

    def parity(self) -> Parity:
        return parity(self)

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return (self - dagger(self)).norm() <= tol

    def allclose(self, other: 'MajoranaOperator', atol: float = constants.ALGEBRA_TOL) -> bool:
        return (self - other).norm() <= atol

    def pruned(self, tol: float) -> 'MajoranaOperator':
        return MajoranaOperator(self._terms, prune_tol=tol)

    def dagger(self) -> 'MajoranaOperator':
        return dagger(self)

    # Arithmetic

    def _lift(self, other: Union['MajoranaOperator', Scalar]) -> 'MajoranaOperator':
        if isinstance(other, MajoranaOperator):
            return other
        if isinstance(other, numbers.Number):
            return MajoranaOperator.identity(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for mask, coeff in other.items():
            out[mask] = out.get(mask, 0j) + coeff
        return MajoranaOperator(out)

    __radd__ = __add__

    def __neg__(self) -> 'MajoranaOperator':
        return MajoranaOperator({mask: -coeff for mask, coeff in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for mask, coeff in other.items():
            out[mask] = out.get(mask, 0j) - coeff
        return MajoranaOperator(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MajoranaOperator):
            return multiply(self, other)
        if isinstance(other, numbers.Number):
            return MajoranaOperator({mask: coeff * other for mask, coeff in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return MajoranaOperator({mask: other * coeff for mask, coeff in self._terms.items()})
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return MajoranaOperator({mask: coeff / other for mask, coeff in self._terms.items()})
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, MajoranaOperator):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # Rendering

    def to_text(self, display_eps: Optional[float] = None) -> str:
        return to_text(self, display_eps=display_eps)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f'MajoranaOperator({self.to_text()!r})'


class HermitianBasisElement(NamedTuple):
    """
    C_a = i^(n(n-1)/2) c_i1 ... c_in for an odd-cardinality site set; C_a^dagger = C_a and C_a^2 = 1.
    """
    mask: SiteMask

    @property
    def sites(self) -> Tuple[int, ...]:
        return utils.mask_to_sites(self.mask)

    @property
    def phase(self) -> complex:
        return hermitian_phase(utils.mask_size(self.mask))

    def operator(self) -> MajoranaOperator:
        return MajoranaOperator({self.mask: self.phase})


# Algebra


def multiply(a: MajoranaOperator, b: MajoranaOperator) -> MajoranaOperator:
    """
    returns the canonical product a * b.
    """
    out: Dict[SiteMask, complex] = {}
    for mask_a, coeff_a in a.items():
        for mask_b, coeff_b in b.items():
            mask = mask_a ^ mask_b
            term = utils._reorder_sign(mask_a, mask_b) * coeff_a * coeff_b
            out[mask] = out.get(mask, 0j) + term
    return MajoranaOperator(out)


def _graded_product(a: MajoranaOperator, b: MajoranaOperator, anti: bool) -> MajoranaOperator:
    # c_A c_B = s c_B c_A, so [c_A, c_B] = (1 - s) c_A c_B and {c_A, c_B} = (1 + s) c_A c_B
    keep = 1 if anti else -1
    out: Dict[SiteMask, complex] = {}
    for mask_a, coeff_a in a.items():
        for mask_b, coeff_b in b.items():
            if utils._commutation_sign(mask_a, mask_b) != keep:
                continue
            mask = mask_a ^ mask_b
            term = 2 * utils._reorder_sign(mask_a, mask_b) * coeff_a * coeff_b
            out[mask] = out.get(mask, 0j) + term
    return MajoranaOperator(out)


def commutator(a: MajoranaOperator, b: MajoranaOperator) -> MajoranaOperator:
    """
    returns [a, b] = ab - ba.
    """
    return _graded_product(a, b, anti=False)


def anticommutator(a: MajoranaOperator, b: MajoranaOperator) -> MajoranaOperator:
    """
    returns {a, b} = ab + ba.
    """
    return _graded_product(a, b, anti=True)


def dagger(a: MajoranaOperator) -> MajoranaOperator:
    """
    returns a^dagger: conjugated coefficients, each monomial reversed ((-1)^(n(n-1)/2)).
    """
    out = {}
    for mask, coeff in a.items():
        n = utils.mask_size(mask)
        sign = -1 if (n * (n - 1) // 2) & 1 else 1
        out[mask] = sign * coeff.conjugate()
    return MajoranaOperator(out)


def inner_product(a: MajoranaOperator, b: MajoranaOperator) -> complex:
    """
    returns (a, b) = sum_S conj(a_S) b_S, the trace inner product normalized so (1, 1) = 1.
    """
    if len(a) <= len(b):
        return sum((coeff_a.conjugate() * b.coefficient(mask) for mask, coeff_a in a.items()), 0j)
    return sum((a.coefficient(mask).conjugate() * coeff_b for mask, coeff_b in b.items()), 0j)


def truncate_support(a: MajoranaOperator, cutoff_site: int) -> MajoranaOperator:
    """
    a - operator to project.
    cutoff_site - first site that is traced out.

    returns Pi_{>=cutoff_site}(a): the terms supported inside {1, ..., cutoff_site - 1}.
    """
    if cutoff_site < constants.MIN_SITE:
        raise ValueError(f'cutoff_site must be at least {constants.MIN_SITE}; got {cutoff_site}.')
    shift = cutoff_site - 1
    return MajoranaOperator({mask: coeff for mask, coeff in a.items() if not mask >> shift})


def parity(a: MajoranaOperator) -> Parity:
    """
    returns 'even' or 'odd' when every term has that site-count parity, else 'mixed'.
    The zero operator is 'even'.
    """
    parities = {utils.mask_size(mask) & 1 for mask, _ in a.items()}
    if len(parities) > 1:
        return 'mixed'
    return 'odd' if parities == {1} else 'even'


# Hermitian monomial basis


def hermitian_phase(n: int) -> complex:
    """
    returns i^(n(n-1)/2), the phase making an n-site monomial Hermitian.
    """
    return _I_POWERS[(n * (n - 1) // 2) % 4]


def hermitian_basis_element(sites: Union[SiteMask, Iterable[int]]) -> HermitianBasisElement:
    mask = sites if isinstance(sites, int) else utils.sites_to_mask(sites)
    if not utils.mask_size(mask) & 1:
        raise ValueError(
            f'Hermitian basis elements have odd cardinality; got sites {utils.mask_to_sites(mask)}.')
    return HermitianBasisElement(mask)


def odd_masks(n_sites: int) -> Tuple[SiteMask, ...]:
    """
    returns every odd-cardinality subset of {1, ..., n_sites} as masks, ascending (2^(n_sites-1) of them).
    """
    if n_sites < 1:
        raise ValueError(f'n_sites must be at least 1; got {n_sites}.')
    return tuple(mask for mask in range(1 << n_sites) if mask.bit_count() & 1)


def to_hermitian_coefficients(a: MajoranaOperator) -> Dict[SiteMask, complex]:
    """
    returns alpha with a = sum_a alpha_a C_a; alpha is real exactly when a is Hermitian.
    """
    return {mask: coeff / hermitian_phase(utils.mask_size(mask)) for mask, coeff in a.items()}


def from_hermitian_coefficients(coefficients: Mapping[SiteMask, Scalar]) -> MajoranaOperator:
    return MajoranaOperator({mask: hermitian_phase(utils.mask_size(mask)) * coeff
                             for mask, coeff in coefficients.items()})


# Text format


def _sort_key(mask: SiteMask) -> Tuple[int, Tuple[int, ...]]:
    return utils.mask_size(mask), utils.mask_to_sites(mask)


def format_monomial(mask: SiteMask) -> str:
    """
    returns 'c[1]c[3]' for the mask of {1, 3} and '1' for the identity.
    """
    if not mask:
        return '1'
    return ''.join(f'c[{site}]' for site in utils.mask_to_sites(mask))


def _format_coeff(coeff: complex) -> str:
    return f'({coeff.real!r}{coeff.imag:+}j)'


def to_text(a: MajoranaOperator, display_eps: Optional[float] = None) -> str:
    """
    returns the canonical rendering: terms sorted by (site count, sites), joined by ' + '.
    display_eps hides small coefficients in the text only; '0' is the zero operator.

    """
    masks = sorted((mask for mask, coeff in a.items()
                    if display_eps is None or abs(coeff) > display_eps), key=_sort_key)
    if not masks:
        return '0'
    return ' + '.join(f'{_format_coeff(a.coefficient(mask))} * {format_monomial(mask)}'
                      for mask in masks)


def parse(text: str) -> MajoranaOperator:
    """
    parses the output of to_text back into an operator.
    Raises ValueError on malformed terms.

    """
    text = text.strip()
    if text == '0':
        return MajoranaOperator.zero()
    result = MajoranaOperator.zero()
    for chunk in text.split(' + '):
        match = _TERM_PATTERN.match(chunk.strip())
        if match is None:
            raise ValueError(f'Cannot parse operator term "{chunk}".')
        coeff = complex(match.group('coeff'))
        monomial = match.group('monomial')
        sites = [] if monomial == '1' else [int(s) for s in _SITE_PATTERN.findall(monomial)]
        result = result + MajoranaOperator.monomial(sites, coeff)
    return result


def random_operator(rng, n_sites: int, n_terms: int, max_degree: Optional[int] = None,
                    hermitian: bool = False) -> MajoranaOperator:
    """
    rng - numpy Generator.
    n_sites - sites are drawn from {1, ..., n_sites}.
    n_terms - number of monomials drawn (duplicates merge).
    max_degree - largest monomial size (default n_sites).
    hermitian - symmetrize as (A + A^dagger) / 2.

    returns a random operator with complex coefficients, used by property checks.
    """
    max_degree = n_sites if max_degree is None else max_degree
    out = MajoranaOperator.zero()
    for _ in range(n_terms):
        degree = int(rng.integers(0, max_degree + 1))
        sites = rng.choice(n_sites, size=degree, replace=False) + 1
        coeff = complex(rng.normal(), rng.normal())
        out = out + MajoranaOperator.monomial(sorted(int(s) for s in sites), coeff)
    if hermitian:
        out = (out + dagger(out)) * 0.5
    return out


def product_of(operators: Iterable[MajoranaOperator]) -> MajoranaOperator:
    """
    returns the ordered product of operators (identity for an empty iterable).
    """
    result = MajoranaOperator.identity()
    for op in operators:
        result = multiply(result, op)
    return result


def pairwise_anticommutators(operators: Iterable[MajoranaOperator]) -> Iterator[Tuple[int, int, MajoranaOperator]]:
    """
    yields (i, j, {op_i, op_j}) for every i < j.
    """
    ops = list(operators)
    for i, j in itertools.combinations(range(len(ops)), 2):
        yield i, j, anticommutator(ops[i], ops[j])
