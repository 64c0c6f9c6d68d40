"""
This module counts Majorana edge zero modes on ladders of coupled chains and derives their Z2 index.

Every leg of a ladder keeps its right-edge generator c_2N out of the Hamiltonian, so the L right
modes are exact. The left modes are counted from the ground degeneracy D: n_L + n_R Majorana zero
modes pair into (n_L + n_R) / 2 complex zero fermions, so n_L = 2 log2(D) - L, and the index is
n_L mod 2. This inference assumes the ground degeneracy is generated by edge modes only, which holds
in the gapped regime.

"""
import logging
import math
from typing import ClassVar, Iterable, List, Optional, Tuple

import msgspec

from . import constants, model_builders, spectral, utils
from .majorana_algebra import MajoranaOperator, commutator
from .model_builders import InterchainEdge, ModelSpec
from .spectral import ContractError
from .types import LadderPoint

logger = logging.getLogger(__name__)


class AmbiguousClusteringError(ContractError):
    """
    Exception raised when the ground degeneracy of a ladder is not a power of two, so no count of
    edge zero modes explains it.

    """
    pass


class LadderReport(msgspec.Struct):
    """
    degeneracy (int): size of the ground cluster D.
    n_left (int): inferred left zero-mode count 2 log2(D) - L.
    index (int): n_left mod 2.
    right_mode_legs (list[int]): legs j whose c_2N,j commutes exactly with H.
    edge_splitting (Optional[float]): two-leg case only; distance between the two doublets that
        the interchain coupling makes of the g = 0 ground quadruplet.
    chi_certificate_error (Optional[float]): max ||i gamma_a gamma_b - (2 chi^dagger chi - 1)|| over
        the coupled leg pairs.
    multiplicity_base (int): every level multiplicity must be divisible by this, 2^floor(L/2).
    consistent (bool): n_left is nonnegative and n_left + L is even.

    """
    legs: int
    n_sites: int
    kappa: float
    g: float
    degeneracy: int
    n_left: int
    n_right: int
    index: int
    right_mode_legs: List[int]
    edge_splitting: Optional[float]
    chi_certificate_error: Optional[float]
    multiplicity_base: int
    multiplicities: List[int]
    multiplicity_ok: bool
    consistent: bool
    gap: Optional[float]
    ground_energy: float

    csv_header: ClassVar[Tuple[str, ...]] = ('g', 'degeneracy', 'n_left', 'index', 'edge_splitting')

    def point(self) -> LadderPoint:
        splitting = math.nan if self.edge_splitting is None else self.edge_splitting
        return LadderPoint(self.g, self.degeneracy, self.n_left, self.index, splitting)

    def csv_rows(self) -> List[List[str]]:
        return [_point_row(self.point())]


def _point_row(point: LadderPoint) -> List[str]:
    return [utils.format_float(point.g), str(point.degeneracy), str(point.n_left), str(point.index),
            utils.format_float(point.edge_splitting)]


def verify_right_modes(spec: ModelSpec, hamiltonian: Optional[MajoranaOperator] = None) -> List[int]:
    """
    spec - ladder geometry.
    hamiltonian - operator to test; defaults to the model's H_g.

    returns the legs j for which [H, c_2N,j] vanishes exactly.
    """
    hamiltonian = model_builders.build_hamiltonian(spec) if hamiltonian is None else hamiltonian
    legs = []
    for leg, site in enumerate(model_builders.right_edge_sites(spec), start=1):
        if not commutator(hamiltonian, MajoranaOperator.generator(site)):
            legs.append(leg)
        else:
            logger.debug('right-edge generator c_%d of leg %d does not commute with H', site, leg)
    return legs


def chi_certificate(spec: ModelSpec) -> Optional[float]:
    """
    returns max ||i gamma_hat_0,a gamma_hat_0,b - (2 chi^dagger chi - 1)|| over the coupled leg
    pairs (a, b), or None for interactions other than interchain_edge.
    """
    if not isinstance(spec.interaction, InterchainEdge):
        return None
    error = 0.0
    for leg_a, leg_b in model_builders.interchain_pairs(spec):
        coupling = 1j * (model_builders.build_gamma0_normalized(spec, leg_a)
                         * model_builders.build_gamma0_normalized(spec, leg_b))
        chi = model_builders.build_chi(spec, leg_a, leg_b)
        number_form = 2 * (chi.dagger() * chi) - MajoranaOperator.identity()
        error = max(error, (coupling - number_form).norm())
    return error


def _log2_degeneracy(degeneracy: int, report: spectral.SpectrumReport) -> int:
    log2 = math.log2(degeneracy)
    if abs(log2 - round(log2)) > constants.DEGENERACY_LOG_TOL:
        raise AmbiguousClusteringError(
            f'edge_index: ground degeneracy {degeneracy} is not a power of two '
            f'(cluster_tol={report.cluster_tol:g}; lowest levels {report.eigenvalues[:degeneracy + 1]})')
    return int(round(log2))


def _edge_splitting(spec: ModelSpec, report: spectral.SpectrumReport) -> Optional[float]:
    # the g = 0 ground quadruplet of two legs: lower doublet [0, 1], upper doublet [2, 3]
    if spec.legs != 2 or len(report.eigenvalues) < 4:
        return None
    values = report.eigenvalues
    return 0.5 * (values[2] + values[3]) - 0.5 * (values[0] + values[1])


def ladder_experiment(spec: ModelSpec, cluster_tol: float = constants.DEFAULT_CLUSTER_TOL) -> LadderReport:
    """
    spec - ladder with an even-parity interaction that avoids every right-edge site.
    cluster_tol - degeneracy tolerance for the ground cluster.

    returns the LadderReport of H_g.
    Raises AmbiguousClusteringError if the ground degeneracy is not a power of two.
    """
    hamiltonian = model_builders.build_hamiltonian(spec)
    report = spectral.spectrum(hamiltonian, mode_count=spec.mode_count, cluster_tol=cluster_tol)
    degeneracy = report.ground_degeneracy
    n_left = 2 * _log2_degeneracy(degeneracy, report) - spec.legs
    consistent = n_left >= 0 and (n_left + spec.legs) % 2 == 0
    if not consistent:
        logger.warning('inferred left mode count %d is inconsistent with %d legs', n_left, spec.legs)

    base = 2 ** (spec.legs // 2)
    multiplicities = [size for _, size in report.clusters]
    multiplicity_ok = all(size % base == 0 for size in multiplicities)
    if not multiplicity_ok:
        logger.warning('level multiplicities %s are not all divisible by %d', multiplicities, base)

    ladder = LadderReport(legs=spec.legs, n_sites=spec.n_sites, kappa=spec.kappa, g=spec.g,
                          degeneracy=degeneracy, n_left=n_left, n_right=spec.legs, index=n_left % 2,
                          right_mode_legs=verify_right_modes(spec, hamiltonian),
                          edge_splitting=_edge_splitting(spec, report),
                          chi_certificate_error=chi_certificate(spec), multiplicity_base=base,
                          multiplicities=multiplicities, multiplicity_ok=multiplicity_ok,
                          consistent=consistent, gap=report.gap, ground_energy=report.ground_energy)
    logger.info('ladder L=%d g=%g: degeneracy %d, n_left %d, index %d',
                spec.legs, spec.g, degeneracy, n_left, ladder.index)
    return ladder


class LadderSweepReport(msgspec.Struct):
    reports: List[LadderReport]

    csv_header: ClassVar[Tuple[str, ...]] = LadderReport.csv_header

    @property
    def points(self) -> List[LadderPoint]:
        return [report.point() for report in self.reports]

    @property
    def indices(self) -> List[int]:
        return [report.index for report in self.reports]

    @property
    def index_constant(self) -> bool:
        return len(set(self.indices)) <= 1

    def csv_rows(self) -> List[List[str]]:
        return [_point_row(point) for point in self.points]


def ladder_sweep(spec: ModelSpec, g_grid: Iterable[float],
                 cluster_tol: float = constants.DEFAULT_CLUSTER_TOL) -> LadderSweepReport:
    """
    returns the ladder experiment at every g of the grid (in grid order).
    """
    sweep = LadderSweepReport([ladder_experiment(spec.with_coupling(g), cluster_tol) for g in g_grid])
    if not sweep.index_constant:
        logger.warning('Z2 index changes along the sweep: %s', sweep.indices)
    return sweep
