"""
This module contains the exact spectral tools: dense diagonalization of compiled Hamiltonians
with degeneracy clustering and parity labels, gap sweeps over the coupling g, and the
free-fermion machinery for quadratic Majorana Hamiltonians (quadratic forms, the tilde
frame that separates the edge modes from the bulk, and the eta fermions of the doubled
system).

Conventions: a quadratic Hamiltonian is written H = sum_ij c_i A_ij c_j + const with A
antisymmetric and pure imaginary. An eigenvalue pair +-e of A contributes +-2e to the
many-body energy, E = const + sum_k 2 e_k (2 n_k - 1).

"""
import logging
import math
from typing import ClassVar, Iterable, List, Optional, Sequence, Tuple

import msgspec
import numpy as np

from . import constants, fock_rep, model_builders, utils
from .majorana_algebra import MajoranaOperator, anticommutator, format_monomial
from .model_builders import ModelSpec
from .types import SweepPoint

logger = logging.getLogger(__name__)


class ContractError(ArithmeticError):
    """
    Exception raised when a numerical contract is broken (non-Hermitian input, broken
    pairing, a gap that jumps faster than the Lipschitz estimate allows).

    """
    pass


class QuadraticFormError(ContractError):
    """
    Exception raised for operators that do not define a usable quadratic form.

    """
    pass


# Spectra


class SpectrumReport(msgspec.Struct):
    """
    eigenvalues (list[float]): ascending.
    parities (list[int]): +1 / -1 per eigenvalue, 0 where the parity expectation is ambiguous.
    clusters (list[tuple[int, int]]): (start, size) of each degeneracy cluster.
    gap (Optional[float]): E(first level above the ground cluster) - E(ground); None for one cluster.
    pairing_splitting (Optional[float]): max |E_even,k - E_odd,k| over the sorted sector spectra.
    ground_splitting (Optional[float]): |E_even,0 - E_odd,0|.
    ambiguous (bool): some spacing lies just above cluster_tol.

    """
    eigenvalues: List[float]
    parities: List[int]
    clusters: List[Tuple[int, int]]
    cluster_tol: float
    gap: Optional[float] = None
    pairing_splitting: Optional[float] = None
    ground_splitting: Optional[float] = None
    sector_resolved: bool = False
    ambiguous: bool = False

    @property
    def ground_energy(self) -> float:
        return self.eigenvalues[0]

    @property
    def ground_degeneracy(self) -> int:
        return self.clusters[0][1]

    def cluster_energies(self) -> List[float]:
        return [self.eigenvalues[start] for start, _ in self.clusters]

    def cluster_parities(self, index: int) -> List[int]:
        """
        returns the parity multiset (sorted) of cluster `index`.
        """
        start, size = self.clusters[index]
        return sorted(self.parities[start:start + size])


def _clusters(values: np.ndarray, cluster_tol: float) -> List[Tuple[int, int]]:
    clusters = []
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[k - 1] >= cluster_tol:
            clusters.append((start, k - start))
            start = k
    return clusters


def spectrum_of_matrix(matrix: np.ndarray, parity_diagonal: np.ndarray, even_parity: bool,
                       cluster_tol: float = constants.DEFAULT_CLUSTER_TOL) -> SpectrumReport:
    """
    matrix - dense Hermitian matrix on the Fock space.
    parity_diagonal - +1/-1 diagonal of the parity operator.
    even_parity - whether matrix commutes with parity; enables sector-resolved diagonalization.
    cluster_tol - consecutive eigenvalues closer than this share a cluster.

    returns the SpectrumReport of matrix.
    """
    if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > constants.HERMITIAN_TOL:
        raise ContractError('spectral: Hamiltonian is not Hermitian '
                            f'(max |H - H^dagger| above {constants.HERMITIAN_TOL:g}).')
    pairing_splitting = ground_splitting = None
    if even_parity:
        even = np.flatnonzero(parity_diagonal == 1)
        odd = np.flatnonzero(parity_diagonal == -1)
        even_values = np.linalg.eigvalsh(matrix[np.ix_(even, even)])
        odd_values = np.linalg.eigvalsh(matrix[np.ix_(odd, odd)])
        values = np.concatenate([even_values, odd_values])
        labels = np.concatenate([np.ones(even.size, dtype=int), -np.ones(odd.size, dtype=int)])
        order = np.argsort(values, kind='stable')
        values, labels = values[order], labels[order]
        if even_values.size == odd_values.size and even_values.size:
            pairing_splitting = float(np.max(np.abs(even_values - odd_values)))
            ground_splitting = float(abs(even_values[0] - odd_values[0]))
    else:
        values, vectors = np.linalg.eigh(matrix)
        expectation = np.real(np.einsum('ik,i,ik->k', vectors.conj(), parity_diagonal, vectors))
        labels = np.where(np.abs(expectation) > constants.PARITY_EXPECTATION_MIN,
                          np.sign(expectation), 0).astype(int)

    clusters = _clusters(values, cluster_tol)
    for start, size in clusters:
        if size == 1 and labels[start] == 0:
            logger.warning('eigenvalue %.6g has parity expectation below %g in a nondegenerate cluster',
                           values[start], constants.PARITY_EXPECTATION_MIN)
    spacings = np.diff(values)
    ambiguous = bool(np.any((spacings >= cluster_tol)
                            & (spacings < constants.CLUSTER_AMBIGUITY_FACTOR * cluster_tol)))
    gap = float(values[clusters[1][0]] - values[0]) if len(clusters) > 1 else None
    return SpectrumReport(
        eigenvalues=[float(v) for v in values], parities=[int(p) for p in labels],
        clusters=clusters, cluster_tol=cluster_tol, gap=gap,
        pairing_splitting=pairing_splitting, ground_splitting=ground_splitting,
        sector_resolved=even_parity, ambiguous=ambiguous)


def spectrum(op: MajoranaOperator, mode_count: Optional[int] = None,
             cluster_tol: float = constants.DEFAULT_CLUSTER_TOL) -> SpectrumReport:
    """
    op - Hermitian operator.
    mode_count - Fock modes M; defaults to the smallest M covering op.
    cluster_tol - degeneracy tolerance.

    returns the full spectrum of op with clusters, parity labels and gap.
    Raises ContractError for non-Hermitian input.
    """
    if not op.is_hermitian(constants.HERMITIAN_TOL):
        raise ContractError('spectral: operator is not Hermitian '
                            f'(|op - op^dagger| = {(op - op.dagger()).norm():.3g}).')
    rep = fock_rep.representation(mode_count or fock_rep.mode_count_for(op))
    logger.debug('diagonalizing %d-term operator on %d modes', len(op), rep.mode_count)
    return spectrum_of_matrix(rep.compile(op), rep.parity_diagonal(), op.parity() == 'even', cluster_tol)


def require_pairing(report: SpectrumReport, pairing_tol: float = constants.PAIRING_TOL) -> None:
    """
    Raises ContractError unless every level pairs with an opposite-parity partner.
    """
    if report.pairing_splitting is None:
        raise ContractError('spectral: pairing undefined (spectrum was not sector-resolved).')
    if report.pairing_splitting > pairing_tol:
        raise ContractError(f'spectral: pairing broken (max opposite-parity splitting '
                            f'{report.pairing_splitting:.2g} > {pairing_tol:g})')


# Gap sweeps


class SweepReport(msgspec.Struct):
    """
    Result of a gap sweep; rows keep the order of the requested grid.
    """
    points: List[SweepPoint]
    reference_gap: Optional[float]
    interaction_norm: float
    lipschitz_violations: List[float]
    ambiguous_points: List[float]
    g_max: Optional[float]
    pairing_tol: float

    csv_header: ClassVar[Tuple[str, ...]] = ('g', 'splitting', 'gap', 'ground_energy')

    @property
    def max_splitting(self) -> float:
        return max((point.splitting for point in self.points), default=0.0)

    @property
    def min_gap(self) -> float:
        return min((point.gap for point in self.points), default=math.nan)

    @property
    def pairing_ok(self) -> bool:
        return self.max_splitting <= self.pairing_tol

    def csv_rows(self) -> List[List[str]]:
        return [[utils.format_float(value) for value in point] for point in self.points]


def _lipschitz_bound(interaction_norm: float, dg: float) -> float:
    return constants.LIPSCHITZ_SAFETY * interaction_norm * abs(dg) + constants.MATRIX_TOL


def _empirical_g_max(points: Sequence[SweepPoint], reference_gap: Optional[float]) -> Optional[float]:
    if reference_gap is None or not points:
        return None
    threshold = constants.G_MAX_GAP_FRACTION * reference_gap
    g_max = None
    for point in sorted(points, key=lambda p: abs(p.g)):
        if not point.gap > threshold:
            break
        g_max = abs(point.g)
    return g_max


def gap_sweep(spec: ModelSpec, g_grid: Iterable[float],
              cluster_tol: float = constants.DEFAULT_CLUSTER_TOL,
              pairing_tol: float = constants.PAIRING_TOL, strict: bool = False) -> SweepReport:
    """
    spec - model; its own g is ignored in favour of g_grid.
    g_grid - couplings, visited in the given order.
    strict - raise ContractError on broken pairing or a broken Lipschitz estimate instead of
        only recording it.

    returns a SweepReport with (g, splitting, gap, ground_energy) rows.
    """
    rep = fock_rep.representation(spec.mode_count)
    h0 = rep.compile(model_builders.build_ladder_h0(spec))
    interaction = model_builders.build_interaction(spec)
    v = rep.compile(interaction)
    v_norm = float(np.linalg.norm(v, ord=2)) if interaction else 0.0
    parity_diagonal = rep.parity_diagonal()
    even = interaction.parity() == 'even'

    reference = spectrum_of_matrix(h0, parity_diagonal, True, cluster_tol)
    points: List[SweepPoint] = []
    ambiguous: List[float] = []
    for g in g_grid:
        g = float(g)
        report = spectrum_of_matrix(h0 + g * v, parity_diagonal, even, cluster_tol)
        splitting = report.ground_splitting if report.ground_splitting is not None else math.nan
        gap = report.gap if report.gap is not None else math.nan
        points.append(SweepPoint(g, splitting, gap, report.ground_energy))
        if report.ambiguous:
            ambiguous.append(g)
        logger.debug('g=%.6g splitting=%.3g gap=%.12g', g, splitting, gap)

    violations = []
    for k, point in enumerate(points):
        checks = [(reference.gap, point.g)] if reference.gap is not None else []
        if k:
            checks.append((points[k - 1].gap, point.g - points[k - 1].g))
        for other_gap, dg in checks:
            if abs(point.gap - other_gap) > _lipschitz_bound(v_norm, dg):
                violations.append(point.g)
                break

    sweep = SweepReport(points=points, reference_gap=reference.gap, interaction_norm=v_norm,
                        lipschitz_violations=violations, ambiguous_points=ambiguous,
                        g_max=_empirical_g_max(points, reference.gap), pairing_tol=pairing_tol)
    if ambiguous:
        logger.warning('cluster tolerance %g is ambiguous at g = %s', cluster_tol, ambiguous)
    if strict and not sweep.pairing_ok:
        raise ContractError(f'spectral: pairing broken (max opposite-parity splitting '
                            f'{sweep.max_splitting:.2g} > {pairing_tol:g})')
    if strict and violations:
        raise ContractError(f'spectral: gap moved faster than {constants.LIPSCHITZ_SAFETY:g} ||V|| |dg| '
                            f'at g = {violations}')
    logger.info('gap sweep over %d points: min gap %.6g, max splitting %.2g',
                len(points), sweep.min_gap, sweep.max_splitting)
    return sweep


# Quadratic forms


class QuadraticForm(msgspec.Struct):
    """
    H = sum_ij c_labels[i] matrix[i, j] c_labels[j] + constant, with matrix antisymmetric and
    pure imaginary, plus its spectral pieces. single_particle_gap is the smallest positive
    eigenvalue; eigenvalues below ZERO_MODE_TOL count as zero modes.

    """
    labels: Tuple[int, ...]
    matrix: np.ndarray
    constant: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    positive_projector: np.ndarray
    negative_projector: np.ndarray
    single_particle_gap: float
    zero_mode_count: int

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, labels: Sequence[int], constant: float = 0.0) -> 'QuadraticForm':
        """
        Raises QuadraticFormError if matrix is not imaginary antisymmetric or has no positive
        eigenvalue.
        """
        matrix = np.asarray(matrix, dtype=complex)
        if not len(labels):
            raise QuadraticFormError('spectral: quadratic form is gapless/empty; no generators.')
        if matrix.shape != (len(labels), len(labels)):
            raise QuadraticFormError(f'spectral: matrix shape {matrix.shape} does not match '
                                     f'{len(labels)} generators.')
        if matrix.size:
            asymmetry = float(np.max(np.abs(matrix + matrix.T)))
            realness = float(np.max(np.abs(matrix.real)))
            if max(asymmetry, realness) > constants.ALGEBRA_TOL:
                raise QuadraticFormError(
                    'spectral: quadratic form must be antisymmetric and pure imaginary '
                    f'(|A + A^T| = {asymmetry:.2g}, |Re A| = {realness:.2g}).')
        values, vectors = np.linalg.eigh(matrix)
        positive = values > constants.ZERO_MODE_TOL
        negative = values < -constants.ZERO_MODE_TOL
        if not np.any(positive):
            raise QuadraticFormError('spectral: quadratic form is gapless/empty; '
                                     'the single-particle gap is undefined.')
        return cls(labels=tuple(int(label) for label in labels), matrix=matrix, constant=float(constant),
                   eigenvalues=values, eigenvectors=vectors,
                   positive_projector=vectors[:, positive] @ vectors[:, positive].conj().T,
                   negative_projector=vectors[:, negative] @ vectors[:, negative].conj().T,
                   single_particle_gap=float(values[positive].min()),
                   zero_mode_count=int(np.count_nonzero(~(positive | negative))))

    @property
    def sign(self) -> np.ndarray:
        """
        s(A) = P_+ - P_-.
        """
        return self.positive_projector - self.negative_projector

    @property
    def abs_matrix(self) -> np.ndarray:
        """
        |A| = A s(A).
        """
        return self.matrix @ self.sign

    def operator(self) -> MajoranaOperator:
        return quadratic_operator(self.matrix, self.labels) + MajoranaOperator.identity(self.constant)


def quadratic_operator(matrix: np.ndarray, labels: Sequence[int]) -> MajoranaOperator:
    """
    returns sum_{i != j} c_labels[i] matrix[i, j] c_labels[j].
    """
    out = MajoranaOperator.zero()
    for i, site_i in enumerate(labels):
        for j, site_j in enumerate(labels):
            if i != j and matrix[i, j] != 0:
                out = out + MajoranaOperator.monomial((site_i, site_j), matrix[i, j])
    return out


def quadratic_form_from(op: MajoranaOperator, generators: Optional[Iterable[int]] = None) -> QuadraticForm:
    """
    op - operator made of identity and two-generator terms only.
    generators - site labels of the form's rows; defaults to op's support.

    returns the QuadraticForm with the antisymmetric split A_ij = -A_ji = coeff(c_i c_j) / 2.
    Raises QuadraticFormError naming the first non-quadratic monomial, or for gapless/empty forms.
    """
    labels = tuple(sorted(generators)) if generators is not None else utils.mask_to_sites(op.support())
    position = {site: k for k, site in enumerate(labels)}
    matrix = np.zeros((len(labels), len(labels)), dtype=complex)
    constant = 0j
    for mask, coeff in op.items():
        sites = utils.mask_to_sites(mask)
        if not sites:
            constant += coeff
            continue
        if len(sites) != 2:
            raise QuadraticFormError(f'spectral: non-quadratic term {format_monomial(mask)} in quadratic form.')
        if any(site not in position for site in sites):
            raise QuadraticFormError(f'spectral: term {format_monomial(mask)} leaves the generator set {labels}.')
        i, j = position[sites[0]], position[sites[1]]
        matrix[i, j] += coeff / 2
        matrix[j, i] -= coeff / 2
    if abs(constant.imag) > constants.ALGEBRA_TOL:
        raise QuadraticFormError(f'spectral: identity coefficient {constant} is not real.')
    return QuadraticForm.from_matrix(matrix, labels, constant.real)


def free_fermion_spectrum(qf: QuadraticForm) -> np.ndarray:
    """
    returns the ascending many-body spectrum const + sum_k 2 e_k (2 n_k - 1) over all occupations.
    Raises QuadraticFormError for an odd generator count (no Fock space of its own).
    """
    size = len(qf.labels)
    if size % 2:
        raise QuadraticFormError(f'spectral: {size} generators do not pair into fermion modes.')
    energies = np.clip(qf.eigenvalues[size // 2:], 0.0, None)
    modes = energies.size
    occupations = (np.arange(2 ** modes)[:, None] >> np.arange(modes)) & 1
    return np.sort(qf.constant + (2 * (2 * occupations - 1)) @ energies)


# Tilde frame


class TildeFrame(msgspec.Struct):
    """
    The orthonormal frame {gamma_hat_0, c~_2, c~_3, ..., c~_2N-1, c_2N} in which H_0 separates
    into bulk and edge. Odd-site vectors are coefficient rows over c_1, c_3, ..., c_2N-1.

    """
    n_sites: int
    kappa: float
    gamma0_hat: np.ndarray
    vectors: np.ndarray
    normalizations: Tuple[float, ...]
    max_anticommutator: float
    max_square_error: float
    gram_error: float
    rebuild_error: float

    def operator(self, label: int) -> MajoranaOperator:
        """
        label - 1 for gamma_hat_0, 2N for c_2N, otherwise the tilde index 2..2N-1.
        """
        if label < 1 or label > 2 * self.n_sites:
            raise ValueError(f'label must be in range [1, {2 * self.n_sites}]; got {label}.')
        if label % 2 == 0:
            return MajoranaOperator.generator(label)
        row = self.gamma0_hat if label == 1 else self.vectors[(label - 3) // 2]
        return MajoranaOperator.linear({2 * m + 1: row[m] for m in range(self.n_sites) if row[m] != 0})

    def rotation(self) -> np.ndarray:
        """
        returns the orthogonal 2N x 2N matrix O with (new generator)_k = sum_i O_ki c_i.
        """
        size = 2 * self.n_sites
        rotation = np.zeros((size, size))
        for label in range(1, size + 1):
            if label % 2 == 0:
                rotation[label - 1, label - 1] = 1.0
            else:
                row = self.gamma0_hat if label == 1 else self.vectors[(label - 3) // 2]
                rotation[label - 1, 0::2] = row
        return rotation


def _tilde_vectors(n_sites: int, kappa: float) -> Tuple[np.ndarray, Tuple[float, ...]]:
    vectors = np.zeros((n_sites - 1, n_sites))
    norms = []
    for ell in range(1, n_sites):
        partial = utils.geometric_norm_sq(kappa, ell)
        row = np.zeros(n_sites)
        row[:ell] = [kappa ** (m - 1) for m in range(1, ell + 1)]
        row[ell] = -partial / kappa ** ell
        norm = float(np.linalg.norm(row))
        vectors[ell - 1] = row / norm
        norms.append(norm)
    return vectors, tuple(norms)


def _rebuilt_h0(frame: TildeFrame) -> MajoranaOperator:
    n, kappa = frame.n_sites, frame.kappa
    norms = frame.normalizations
    out = 1j * kappa * norms[0] * frame.operator(3) * frame.operator(2)
    for ell in range(2, n):
        weight = kappa ** ell / utils.geometric_norm_sq(kappa, ell)
        difference = norms[ell - 1] * frame.operator(2 * ell + 1) - norms[ell - 2] * frame.operator(2 * ell - 1)
        out = out + 1j * weight * difference * frame.operator(2 * ell)
    return out


def tilde_frame(spec: ModelSpec) -> TildeFrame:
    """
    spec - single chain with 0 < |kappa| < 1.

    returns the TildeFrame, verified: the new variables square to one and anticommute, and H_0
    rebuilt from them matches build_h0 symbolically and as Fock matrices.
    Raises QuadraticFormError for kappa = 0, ContractError when a verification fails.
    """
    if spec.kappa == 0:
        raise QuadraticFormError('spectral: the tilde frame needs 0 < |kappa| < 1; got kappa = 0.')
    if spec.legs != 1:
        raise model_builders.ConfigurationError(
            f'spectral: the tilde frame is defined for a single chain; got legs={spec.legs}.')
    n = spec.n_sites
    vectors, norms = _tilde_vectors(n, spec.kappa)
    gamma_hat = np.array([spec.kappa ** m for m in range(n)]) * utils.gamma0_normalization(spec.kappa, n)
    frame = TildeFrame(n_sites=n, kappa=spec.kappa, gamma0_hat=gamma_hat, vectors=vectors,
                       normalizations=norms, max_anticommutator=0.0, max_square_error=0.0,
                       gram_error=0.0, rebuild_error=0.0)

    odd_family = [frame.operator(1)] + [frame.operator(2 * ell + 1) for ell in range(1, n)]
    worst, square_error = 0.0, 0.0
    for a, left in enumerate(odd_family):
        square_error = max(square_error, (left * left - MajoranaOperator.identity()).norm())
        for right in odd_family[a + 1:]:
            worst = max(worst, anticommutator(left, right).norm())
    rotation = frame.rotation()
    frame.max_anticommutator = worst
    frame.max_square_error = square_error
    frame.gram_error = float(np.max(np.abs(2 * rotation @ rotation.T - 2 * np.eye(2 * n))))

    h0 = model_builders.build_h0(spec)
    rebuilt = _rebuilt_h0(frame)
    frame.rebuild_error = (rebuilt - h0).norm()
    if n <= constants.MAX_DENSE_MODES:
        rep = fock_rep.representation(n)
        frame.rebuild_error = max(frame.rebuild_error,
                                  float(np.max(np.abs(rep.compile(rebuilt) - rep.compile(h0)))))
    logger.debug('tilde frame N=%d kappa=%g: anticommutator %.2g, gram %.2g, rebuild %.2g',
                 n, spec.kappa, worst, frame.gram_error, frame.rebuild_error)

    if max(worst, square_error) > constants.ALGEBRA_TOL:
        raise ContractError(f'spectral: tilde variables fail to anticommute '
                            f'(max anticommutator {worst:.2g}, square error {square_error:.2g}).')
    if frame.rebuild_error > constants.MATRIX_TOL:
        raise ContractError(f'spectral: H_0 rebuilt in tilde variables differs by {frame.rebuild_error:.2g}.')
    return frame


def tilde_quadratic_form(spec: ModelSpec, frame: Optional[TildeFrame] = None) -> QuadraticForm:
    """
    returns the bulk form A~ over the tilde labels 2..2N-1.
    Raises ContractError if H_0 couples to gamma_hat_0 or c_2N in the tilde frame.
    """
    frame = frame or tilde_frame(spec)
    size = 2 * spec.n_sites
    raw = quadratic_form_from(model_builders.build_h0(spec), generators=range(1, size + 1))
    rotation = frame.rotation()
    rotated = rotation @ raw.matrix @ rotation.T
    edge_coupling = float(max(np.max(np.abs(rotated[[0, -1], :])), np.max(np.abs(rotated[:, [0, -1]]))))
    if edge_coupling > constants.ALGEBRA_TOL:
        raise ContractError(f'spectral: H_0 couples to the edge modes in the tilde frame ({edge_coupling:.2g}).')
    return QuadraticForm.from_matrix(rotated[1:-1, 1:-1], range(2, size), raw.constant)


# Doubled system and eta fermions


class EtaForm(msgspec.Struct):
    """
    eta^R = eta_real @ (c, d), eta^I = eta_imag @ (c, d), eta = (eta^R + i eta^I) / 2, with
    (c, d) the generators of the form and of its copy. rotation is U_hat and block_error measures
    U_hat^dagger diag(A, -A) U_hat against [[0, i|A|], [-i|A|, 0]].

    """
    rotation: np.ndarray
    eta_real: np.ndarray
    eta_imag: np.ndarray
    abs_matrix: np.ndarray
    block_error: float

    def annihilators(self) -> List[MajoranaOperator]:
        """
        returns eta_i on sites 1..2n, copies d on sites n+1..2n.
        """
        out = []
        for real_row, imag_row in zip(self.eta_real, self.eta_imag):
            real = MajoranaOperator.linear({k + 1: v for k, v in enumerate(real_row) if v != 0})
            imag = MajoranaOperator.linear({k + 1: v for k, v in enumerate(imag_row) if v != 0})
            out.append(0.5 * (real + 1j * imag))
        return out


def eta_form(qf: QuadraticForm) -> EtaForm:
    """
    returns the eta construction for the doubled form diag(A, -A).
    Raises QuadraticFormError if A has zero modes (s(A) undefined there).
    """
    if qf.zero_mode_count:
        raise QuadraticFormError(f'spectral: eta construction needs a gapped form; '
                                 f'A has {qf.zero_mode_count} zero modes.')
    n = len(qf.labels)
    sign = qf.sign
    identity = np.eye(n)
    rotation = np.block([[identity, 1j * sign], [1j * sign, identity]]) / math.sqrt(2)
    doubled = np.block([[qf.matrix, np.zeros((n, n))], [np.zeros((n, n)), -qf.matrix]])
    abs_matrix = qf.abs_matrix
    target = np.block([[np.zeros((n, n)), 1j * abs_matrix], [-1j * abs_matrix, np.zeros((n, n))]])
    block_error = float(np.max(np.abs(rotation.conj().T @ doubled @ rotation - target)))

    # -i s(A) is real because A is imaginary antisymmetric
    mixing = -1j * sign
    if np.max(np.abs(mixing.imag)) > constants.ALGEBRA_TOL:
        raise ContractError('spectral: s(A) is not pure imaginary; eta^R would not be Hermitian.')
    mixing = mixing.real
    eta_real = np.hstack([identity, mixing]) / math.sqrt(2)
    eta_imag = np.hstack([mixing, identity]) / math.sqrt(2)
    return EtaForm(rotation=rotation, eta_real=eta_real, eta_imag=eta_imag,
                   abs_matrix=abs_matrix.real, block_error=block_error)


class EtaCheckReport(msgspec.Struct):
    """
    Verification of H~_0 = 4 eta^dagger |A| eta - 2 Tr|A| on the doubled system.

    identity_error: symbolic norm of the difference.
    spectrum_error: H~_0 - E_min against the eta form, as Fock spectra.
    free_fermion_error: eta form against sum_k 4 a_k n_k.
    lower_bound_min_eig: smallest eigenvalue of H~_0 - E_min - gap * eta^dagger eta.

    """
    bulk_count: int
    single_particle_gap: float
    block_error: float
    canonical_error: float
    identity_error: float
    spectrum_error: float
    free_fermion_error: float
    lower_bound_min_eig: float
    tol: float

    @property
    def passed(self) -> bool:
        errors = (self.block_error, self.canonical_error, self.identity_error,
                  self.spectrum_error, self.free_fermion_error)
        return max(errors) <= self.tol and self.lower_bound_min_eig >= -self.tol


def doubled_system_check(qf: QuadraticForm, tol: float = constants.MATRIX_TOL) -> EtaCheckReport:
    """
    qf - gapped quadratic form on n generators (n <= MAX_DENSE_MODES).

    returns the EtaCheckReport of the doubled system with c on sites 1..n and the copy d on n+1..2n.
    """
    n = len(qf.labels)
    eta = eta_form(qf)
    originals = tuple(range(1, n + 1))
    copies = tuple(range(n + 1, 2 * n + 1))
    doubled = quadratic_operator(qf.matrix, originals) - quadratic_operator(qf.matrix, copies)

    annihilators = eta.annihilators()
    creators = [a.dagger() for a in annihilators]
    canonical_error = 0.0
    for i, a in enumerate(annihilators):
        for j, b in enumerate(creators):
            expected = MajoranaOperator.identity(1.0 if i == j else 0.0)
            canonical_error = max(canonical_error, (anticommutator(a, b) - expected).norm())

    number_form = MajoranaOperator.zero()
    total_number = MajoranaOperator.zero()
    for i in range(n):
        total_number = total_number + creators[i] * annihilators[i]
        for j in range(n):
            if eta.abs_matrix[i, j] != 0:
                number_form = number_form + eta.abs_matrix[i, j] * (creators[i] * annihilators[j])
    eta_hamiltonian = constants.ETA_FORM_PREFACTOR * number_form
    trace = float(np.trace(eta.abs_matrix))
    identity_error = (doubled - eta_hamiltonian + MajoranaOperator.identity(2 * trace)).norm()

    rep = fock_rep.representation(n)
    doubled_values = np.linalg.eigvalsh(rep.compile(doubled))
    eta_values = np.linalg.eigvalsh(rep.compile(eta_hamiltonian))
    shifted = np.sort(doubled_values - doubled_values[0])
    spectrum_error = float(np.max(np.abs(shifted - np.sort(eta_values))))

    single = np.linalg.eigvalsh(eta.abs_matrix)
    occupations = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    free_values = np.sort(constants.ETA_FORM_PREFACTOR * occupations @ single)
    free_fermion_error = float(np.max(np.abs(free_values - np.sort(eta_values))))

    witness = rep.compile(doubled) - doubled_values[0] * np.eye(rep.dimension) \
        - qf.single_particle_gap * rep.compile(total_number)
    lower_bound = float(np.linalg.eigvalsh(witness)[0])

    report = EtaCheckReport(bulk_count=n, single_particle_gap=qf.single_particle_gap,
                            block_error=eta.block_error, canonical_error=canonical_error,
                            identity_error=identity_error, spectrum_error=spectrum_error,
                            free_fermion_error=free_fermion_error, lower_bound_min_eig=lower_bound, tol=tol)
    logger.debug('eta check: %s', report)
    return report


def doubled_eta_check(spec: ModelSpec, tol: float = constants.MATRIX_TOL) -> EtaCheckReport:
    """
    returns the eta check for the bulk form A~ of the chain in spec.
    """
    return doubled_system_check(tilde_quadratic_form(spec), tol)
