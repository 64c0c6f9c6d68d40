"""
This module contains the FockRepresentation class, which compiles symbolic MajoranaOperators
into matrices on the 2^M dimensional Fock space of M complex fermion modes.

Majoranas are paired into modes as c_2m-1 = a_m + a_m^dagger, c_2m = -i (a_m - a_m^dagger),
and the modes are ordered with a Jordan-Wigner string, so that

    c_2m-1 = Z x ... x Z x X x 1 x ... x 1
    c_2m   = Z x ... x Z x Y x 1 x ... x 1

with mode 1 the leftmost tensor factor. The occupied state of a mode is the Z = -1 state and
the parity operator is Z x Z x ... x Z.

"""
import functools
import logging
from typing import List

import numpy as np
import scipy.sparse

from . import constants, utils
from .majorana_algebra import MajoranaOperator

logger = logging.getLogger(__name__)

_IDENTITY = scipy.sparse.identity(2, dtype=complex, format='csr')
_PAULI_X = scipy.sparse.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex))
_PAULI_Y = scipy.sparse.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex))
_PAULI_Z = scipy.sparse.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex))


class DimensionError(ValueError):
    """
    Exception raised when an operator does not fit the Fock space it is compiled onto.

    """
    pass


class FockRepresentation:
    """
    Matrix representation of c_1 ... c_2M on M fermion modes.

    Generator matrices are built once (sparse, one nonzero per row) and products of them
    are formed on demand, so a single representation can compile many operators.
    """

    def __init__(self, mode_count: int) -> None:
        if mode_count < 1:
            raise ValueError(f'mode_count must be at least 1; got {mode_count}.')
        if 2 * mode_count > constants.MAX_SITES:
            raise DimensionError(
                f'fock_rep: {mode_count} modes need {2 * mode_count} generators; '
                f'at most {constants.MAX_SITES} sites are supported.')
        self.mode_count = mode_count
        self.dimension = 2 ** mode_count
        self._generators = [self._jordan_wigner(site) for site in range(1, 2 * mode_count + 1)]
        logger.debug('built %d generator matrices of dimension %d', len(self._generators), self.dimension)

    def _jordan_wigner(self, site: int) -> scipy.sparse.csr_matrix:
        mode, local = divmod(site - 1, 2)
        factors = [_PAULI_Z] * mode + [_PAULI_Y if local else _PAULI_X] \
            + [_IDENTITY] * (self.mode_count - mode - 1)
        matrix = factors[0]
        for factor in factors[1:]:
            matrix = scipy.sparse.kron(matrix, factor, format='csr')
        return matrix

    @property
    def site_count(self) -> int:
        return 2 * self.mode_count

    def generator(self, site: int) -> scipy.sparse.csr_matrix:
        """
        returns the sparse matrix of c_site.
        """
        if site < 1 or site > self.site_count:
            raise DimensionError(f'fock_rep: site c_{site} outside [1, {self.site_count}] '
                                 f'for {self.mode_count} modes.')
        return self._generators[site - 1]

    def monomial(self, mask: int) -> scipy.sparse.csr_matrix:
        """
        returns the sparse matrix of the canonical monomial with site bitmask mask.
        """
        matrix = scipy.sparse.identity(self.dimension, dtype=complex, format='csr')
        for site in utils.mask_to_sites(mask):
            matrix = matrix @ self.generator(site)
        return matrix

    def _check_support(self, op: MajoranaOperator) -> None:
        if op.max_site() > self.site_count:
            raise DimensionError(
                f'fock_rep: operator reaches site c_{op.max_site()} but {self.mode_count} modes '
                f'only carry c_1 ... c_{self.site_count}.')

    def compile_sparse(self, op: MajoranaOperator) -> scipy.sparse.csr_matrix:
        """
        op - operator whose support lies in c_1 ... c_2M.

        returns the CSR matrix of op.
        Raises DimensionError if op's support exceeds 2M.
        """
        self._check_support(op)
        matrix = scipy.sparse.csr_matrix((self.dimension, self.dimension), dtype=complex)
        for mask, coeff in op.items():
            matrix = matrix + coeff * self.monomial(mask)
        return matrix

    def compile(self, op: MajoranaOperator) -> np.ndarray:
        """
        returns the dense matrix of op; the correctness reference for every spectral routine.
        """
        if self.mode_count > constants.MAX_DENSE_MODES:
            raise DimensionError(
                f'fock_rep: dense compilation is limited to {constants.MAX_DENSE_MODES} modes; '
                f'got {self.mode_count}. Use compile_sparse instead.')
        return self.compile_sparse(op).toarray()

    def parity_diagonal(self) -> np.ndarray:
        """
        returns the diagonal of P as a +1/-1 integer vector (+1 on even occupation).
        """
        return _parity_diagonal(self.mode_count)

    def parity_operator(self) -> np.ndarray:
        return np.diag(self.parity_diagonal().astype(complex))

    def operator_norm(self, op: MajoranaOperator) -> float:
        """
        returns the spectral norm (largest singular value) of op's matrix.
        """
        if not op:
            return 0.0
        return float(np.linalg.norm(self.compile(op), ord=2))

    def sector_indices(self, parity: int) -> np.ndarray:
        """
        returns the basis indices of the even (parity=+1) or odd (parity=-1) sector.
        """
        if parity not in (1, -1):
            raise ValueError(f'parity must be +1 or -1; got {parity}.')
        return np.flatnonzero(self.parity_diagonal() == parity)


@functools.lru_cache(maxsize=None)
def _parity_diagonal(mode_count: int) -> np.ndarray:
    occupations = np.array([bin(k).count('1') for k in range(2 ** mode_count)])
    diagonal = np.where(occupations % 2 == 0, 1, -1)
    diagonal.setflags(write=False)
    return diagonal


@functools.lru_cache(maxsize=constants.MAX_DENSE_MODES)
def representation(mode_count: int) -> FockRepresentation:
    """
    returns the shared FockRepresentation for mode_count modes.
    """
    return FockRepresentation(mode_count)


def mode_count_for(op: MajoranaOperator) -> int:
    """
    returns the smallest M whose generators cover op's support (at least 1).
    """
    return max(1, (op.max_site() + 1) // 2)


def compile(op: MajoranaOperator, mode_count: int) -> np.ndarray:  # noqa: A001
    return representation(mode_count).compile(op)


def compile_sparse(op: MajoranaOperator, mode_count: int) -> scipy.sparse.csr_matrix:
    return representation(mode_count).compile_sparse(op)


def operator_norm(op: MajoranaOperator, mode_count: int) -> float:
    return representation(mode_count).operator_norm(op)


def parity_operator(mode_count: int) -> np.ndarray:
    """
    returns P = Z x ... x Z, which anticommutes with every compiled generator.
    """
    return representation(mode_count).parity_operator()


def number_operator(modes: List[int]) -> MajoranaOperator:
    """
    modes - 1-based mode numbers.

    returns sum_m a_m^dagger a_m = sum_m (1 + i c_2m-1 c_2m) / 2 as a MajoranaOperator.
    """
    out = MajoranaOperator.zero()
    for mode in modes:
        out = out + 0.5 * (MajoranaOperator.identity()
                           + MajoranaOperator.monomial([2 * mode - 1, 2 * mode], 1j))
    return out


def fermion_number(annihilator: MajoranaOperator) -> MajoranaOperator:
    """
    returns a^dagger a for a complex fermion a written in Majoranas.
    """
    return annihilator.dagger() * annihilator
