"""
This module constructs Majorana edge zero modes and measures how good and how local they are.

Two constructions are provided:

    series_solve    - the perturbative series gamma = sum_n g^n gamma_n with
                      [H_0, gamma_n] = -[V, gamma_n-1], each order solved as a least-squares
                      problem for the adjoint action of H_0 on odd monomials.
    kernel_solve    - the null space of M_ab = (C_a, [H, C_b]) over the Hermitian monomial
                      basis of sites 1..2N-1.

The kappa-graded split H_0 = kappa H_0,1 + H_0,0 is also available (kappa_graded_solve),
together with the closed-form first-order solutions for V = c_1 c_2 c_3 c_4 and the
commutator identities they are assembled from.

"""
import logging
from typing import ClassVar, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import msgspec
import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import constants, fock_rep, model_builders, utils
from .majorana_algebra import (MajoranaOperator, commutator, format_monomial, hermitian_basis_element,
                               odd_masks, to_hermitian_coefficients, truncate_support)
from .model_builders import ConfigurationError, ModelSpec, SingleQuartic
from .spectral import ContractError
from .types import ScalingPoint

logger = logging.getLogger(__name__)

# The closed-form solutions reach c_9, so they need N >= 5
CLOSED_FORM_MIN_SITES = 5

# Gauge names selecting the closed-form first order; the second is an alias
CLOSED_FORM_GAUGES = ('paper_lambda', 'closed_form_lambda')
GAUGES = ('min_norm',) + CLOSED_FORM_GAUGES


class SeriesObstructionError(ContractError):
    """
    Exception raised when an order of the series has no solution: the right-hand side has a
    component outside the range of the adjoint action of H_0.

    """
    pass


class KernelConsistencyError(RuntimeError):
    """
    Exception raised when the kernel of M is smaller than 2 or odd-dimensional, which no
    Hermitian H on an odd number of generators allows.

    """
    pass


# Adjoint-action least squares


class AdjointSolve(NamedTuple):
    solution: MajoranaOperator
    residual: float
    worst_component: Optional[str]


class AdjointMatrix:
    """
    Matrix of A -> [h, A] from odd monomials on sites 1..window into the monomials it produces.
    Columns are built with the symbolic commutator; rows are discovered along the way.
    """

    def __init__(self, h: MajoranaOperator, window: int) -> None:
        self.h = h
        self.window = window
        self.columns = odd_masks(window)
        self.rows: Dict[int, int] = {}
        row_index, col_index, values = [], [], []
        for col, mask in enumerate(self.columns):
            for out_mask, coeff in commutator(h, MajoranaOperator({mask: 1.0})).items():
                row_index.append(self.rows.setdefault(out_mask, len(self.rows)))
                col_index.append(col)
                values.append(coeff)
        self.matrix = scipy.sparse.csc_matrix((values, (row_index, col_index)),
                                              shape=(max(len(self.rows), 1), len(self.columns)),
                                              dtype=complex)
        logger.debug('adjoint matrix on window %d: %d rows x %d columns, %d nonzeros',
                     window, len(self.rows), len(self.columns), self.matrix.nnz)

    def solve(self, rhs: MajoranaOperator) -> AdjointSolve:
        """
        returns the minimum-norm least-squares solution x of [h, x] = rhs (Hermitized), the norm of
        the unresolved part rhs - [h, x], and that part's largest monomial.
        """
        if not rhs:
            return AdjointSolve(MajoranaOperator.zero(), 0.0, None)
        b = np.zeros(self.matrix.shape[0], dtype=complex)
        for mask, coeff in rhs.items():
            if mask in self.rows:
                b[self.rows[mask]] = coeff
        if len(self.columns) <= constants.DENSE_SOLVE_MAX_COLUMNS:
            x = np.linalg.lstsq(self.matrix.toarray(), b, rcond=None)[0]
        else:
            x = scipy.sparse.linalg.lsqr(self.matrix, b, atol=1e-14, btol=1e-14)[0]
        solution = MajoranaOperator(dict(zip(self.columns, x)), prune_tol=constants.DISPLAY_EPS ** 2)
        solution = 0.5 * (solution + solution.dagger())
        leftover = rhs - commutator(self.h, solution)
        worst = max(leftover.items(), key=lambda item: abs(item[1]), default=None)
        return AdjointSolve(solution, leftover.norm(),
                            format_monomial(worst[0]) if worst is not None else None)


def solve_adjoint(h: MajoranaOperator, rhs: MajoranaOperator, window: int) -> AdjointSolve:
    """
    h - Hermitian operator whose adjoint action is inverted.
    rhs - target of [h, x].
    window - x is sought among odd monomials on sites 1..window.

    returns the AdjointSolve (minimum-norm solution, residual norm, worst component).
    """
    return AdjointMatrix(h, window).solve(rhs)


# Perturbative series


class SeriesSolution(msgspec.Struct):
    """
    gamma = sum_n g^n gammas[n]; residuals[n] = ||[H_0, gamma_n] + [V, gamma_n-1]|| (residuals[0]
    is ||[H_0, gamma_0]||). gauge is 'min_norm' or a closed-form gauge ('paper_lambda', alias
    'closed_form_lambda') with lambda_ its parameter.

    """
    order: int
    gammas: List[MajoranaOperator]
    residuals: List[float]
    gauge: str
    window: int
    lambda_: Optional[float] = None
    kappa_orders: Optional[List[MajoranaOperator]] = None

    csv_header: ClassVar[Tuple[str, ...]] = ('order', 'sites', 're_coeff', 'im_coeff')

    def truncated(self, g: float) -> MajoranaOperator:
        """
        returns sum_{n <= order} g^n gamma_n.
        """
        return sum((g ** n * gamma for n, gamma in enumerate(self.gammas)), MajoranaOperator.zero())

    def csv_rows(self) -> List[List[str]]:
        rows = []
        for n, gamma in enumerate(self.gammas):
            rows.extend([str(n)] + row for row in coefficient_rows(gamma))
        if self.kappa_orders is not None:
            for j, piece in enumerate(self.kappa_orders):
                rows.extend([f'1.kappa{j}'] + row for row in coefficient_rows(piece))
        return rows


def coefficient_rows(op: MajoranaOperator) -> List[List[str]]:
    """
    returns [sites, re_coeff, im_coeff] rows in canonical term order.
    """
    masks = sorted((mask for mask, _ in op.items()), key=lambda m: (utils.mask_size(m), utils.mask_to_sites(m)))
    return [[' '.join(str(s) for s in utils.mask_to_sites(mask)),
             utils.format_float(op.coefficient(mask).real),
             utils.format_float(op.coefficient(mask).imag)] for mask in masks]


def _require_chain(spec: ModelSpec, what: str) -> None:
    if spec.legs != 1:
        raise ConfigurationError(f'zero_modes: {what} is defined for a single chain; got legs={spec.legs}.')


def _check_window(spec: ModelSpec, window: Optional[int]) -> int:
    window = spec.sites_per_leg - 1 if window is None else window
    if window < 1 or window > spec.sites_per_leg - 1:
        raise ConfigurationError(f'zero_modes: window must be in range [1, {spec.sites_per_leg - 1}]; '
                                 f'got {window}.')
    return window


def closed_form_gamma1_kappa_orders(lambda_: float = 0.0) -> Tuple[MajoranaOperator, MajoranaOperator, MajoranaOperator]:
    """
    lambda_ - the free real parameter of the first kappa order.

    returns the kappa orders (gamma_1^(0), gamma_1^(1), gamma_1^(2)) of the first-order mode for
    V = c_1 c_2 c_3 c_4. gamma_1^(2) is the closed form, which solves its defining equation for
    lambda_ = 0 only.
    """
    order0 = MajoranaOperator.monomial((2, 3, 5), -1j)
    order1 = (MajoranaOperator.monomial((3, 4, 5), -1j) + MajoranaOperator.monomial((2, 3, 7), -1j)
              + MajoranaOperator.monomial((1, 3, 4), -1j * lambda_)
              + MajoranaOperator.monomial((1, 2, 5), -1j * (1 - lambda_)))
    order2 = (MajoranaOperator.monomial((2, 4, 6), 2j / 3) + MajoranaOperator.monomial((2, 5, 7), 1j / 3)
              + MajoranaOperator.monomial((3, 4, 7), -2j / 3) + MajoranaOperator.monomial((3, 5, 6), 1j / 3)
              + MajoranaOperator.monomial((1, 2, 7), -1j) + MajoranaOperator.monomial((2, 3, 9), -1j))
    return order0, order1, order2


def _closed_form_gamma1(spec: ModelSpec, lambda_: float, window: int) -> List[MajoranaOperator]:
    if not isinstance(spec.interaction, SingleQuartic):
        raise ConfigurationError('zero_modes: closed-form gauge applies to the c1c2c3c4 interaction only; '
                                 f'got {type(spec.interaction).__name__}.')
    if spec.n_sites < CLOSED_FORM_MIN_SITES:
        raise ConfigurationError(f'zero_modes: closed-form gauge needs N >= {CLOSED_FORM_MIN_SITES}; '
                                 f'got N={spec.n_sites}.')
    order0, order1, order2 = closed_form_gamma1_kappa_orders(lambda_)
    if lambda_ != 0.0:
        rhs = -commutator(model_builders.build_h0_kappa_part(spec), order1)
        order2 = solve_adjoint(model_builders.build_h0_bond_part(spec), rhs, window).solution
    strength = spec.interaction.strength
    return [strength * order0, strength * order1, strength * order2]


def series_solve(spec: ModelSpec, order: int, gauge: str = 'min_norm', lambda_: Optional[float] = None,
                 window: Optional[int] = None,
                 obstruction_tol: float = constants.OBSTRUCTION_TOL) -> SeriesSolution:
    """
    spec - chain with an even-parity interaction.
    order - truncation order k >= 0.
    gauge - 'min_norm' (minimum-norm least squares at every order) or 'paper_lambda' (closed-form
        first order for V = c_1 c_2 c_3 c_4, kappa-series up to kappa^2; order must be 1).
        'closed_form_lambda' is an alias of 'paper_lambda'.
    lambda_ - parameter of the closed-form family (default 0).
    window - solutions use odd monomials on sites 1..window (default 2N - 1).

    returns the SeriesSolution.
    Raises SeriesObstructionError when an order is unsolvable beyond obstruction_tol.
    """
    _require_chain(spec, 'series_solve')
    if order < 0:
        raise ValueError(f'order must be non-negative; got {order}.')
    if gauge not in GAUGES:
        raise ConfigurationError(f'zero_modes: gauge must be one of {", ".join(GAUGES)}; got {gauge!r}.')
    window = _check_window(spec, window)
    h0 = model_builders.build_h0(spec)
    v = model_builders.build_interaction(spec)
    gammas = [model_builders.build_gamma0(spec)]
    residuals = [commutator(h0, gammas[0]).norm()]
    kappa_orders = None

    if gauge in CLOSED_FORM_GAUGES:
        if order != 1:
            raise ConfigurationError(f'zero_modes: {gauge} gauge is defined for order 1; got {order}.')
        lambda_ = 0.0 if lambda_ is None else float(lambda_)
        kappa_orders = _closed_form_gamma1(spec, lambda_, window)
        gamma1 = sum((spec.kappa ** j * piece for j, piece in enumerate(kappa_orders)), MajoranaOperator.zero())
        gammas.append(gamma1)
        # The kappa series stops at kappa^2 and leaves a kappa^3 remainder
        residuals.append((commutator(h0, gamma1) + commutator(v, gammas[0])).norm())
        logger.info('%s gauge (lambda=%g): first-order residual %.3g', gauge, lambda_, residuals[-1])
    else:
        adjoint = None
        for n in range(1, order + 1):
            rhs = -commutator(v, gammas[n - 1])
            if not rhs:
                gammas.append(MajoranaOperator.zero())
                residuals.append(0.0)
                continue
            adjoint = adjoint or AdjointMatrix(h0, window)
            solved = adjoint.solve(rhs)
            if solved.residual > obstruction_tol:
                raise SeriesObstructionError(
                    f'zero_modes: obstruction at order {n} (least-squares residual {solved.residual:.3g} > '
                    f'{obstruction_tol:g}; largest unresolved component {solved.worst_component})')
            gammas.append(solved.solution)
            residuals.append(solved.residual)
            logger.debug('order %d: %d terms, residual %.3g', n, len(solved.solution), solved.residual)

    return SeriesSolution(order=order, gammas=gammas, residuals=residuals, gauge=gauge, window=window,
                          lambda_=lambda_, kappa_orders=kappa_orders)


class ScalingReport(msgspec.Struct):
    """
    Truncation residual ||[H_0 + g V, sum_n g^n gamma_n]|| over a grid, with its log-log slope.
    """
    order: int
    points: List[ScalingPoint]
    slope: Optional[float]
    expected_slope: float

    csv_header: ClassVar[Tuple[str, ...]] = ('g', 'total_residual')

    @property
    def slope_ok(self) -> bool:
        return self.slope is None or self.slope >= self.expected_slope - constants.SLOPE_MARGIN

    def csv_rows(self) -> List[List[str]]:
        return [[utils.format_float(p.g), utils.format_float(p.total_residual)] for p in self.points]


def series_residual_scaling(spec: ModelSpec, solution: SeriesSolution, g_grid: Iterable[float]) -> ScalingReport:
    """
    returns the residual of the truncated series at every g and the fitted log-log slope
    (None when fewer than two residuals exceed the fit floor, e.g. an exact zero mode).
    """
    h0 = model_builders.build_h0(spec)
    v = model_builders.build_interaction(spec)
    # [H_0 + g V, sum g^n gamma_n] = sum_n g^n [H_0, gamma_n] + g^(n+1) [V, gamma_n]
    h0_parts = [commutator(h0, gamma) for gamma in solution.gammas]
    v_parts = [commutator(v, gamma) for gamma in solution.gammas]
    points = []
    for g in g_grid:
        g = float(g)
        total = MajoranaOperator.zero()
        for n, (h0_part, v_part) in enumerate(zip(h0_parts, v_parts)):
            total = total + g ** n * h0_part + g ** (n + 1) * v_part
        points.append(ScalingPoint(g, total.norm()))
    slope = utils.loglog_slope([p.g for p in points], [p.total_residual for p in points],
                               floor=constants.DECAY_FIT_FLOOR)
    report = ScalingReport(order=solution.order, points=points, slope=slope,
                           expected_slope=float(solution.order + 1))
    if not report.slope_ok:
        logger.warning('residual slope %.3f below the expected %d', slope, solution.order + 1)
    return report


# Kappa-graded solver and closed forms


class KappaSeries(NamedTuple):
    terms: List[MajoranaOperator]
    residuals: List[float]


def kappa_graded_solve(spec: ModelSpec, rhs: Sequence[MajoranaOperator], depth: int,
                       window: Optional[int] = None) -> KappaSeries:
    """
    spec - chain; only N and the window matter (the kappa split is kappa-free).
    rhs - kappa orders R_0, R_1, ... of the right-hand side of [H_0, gamma] = R.
    depth - number of kappa orders gamma^(0) ... gamma^(depth-1) to solve.

    returns the minimum-norm pieces of [H_0,0, gamma^(j)] = R_j - [H_0,1, gamma^(j-1)] and the
    residual of each equation.
    """
    _require_chain(spec, 'kappa_graded_solve')
    window = _check_window(spec, window)
    h01 = model_builders.build_h0_kappa_part(spec)
    adjoint = AdjointMatrix(model_builders.build_h0_bond_part(spec), window)
    terms: List[MajoranaOperator] = []
    residuals: List[float] = []
    for j in range(depth):
        target = rhs[j] if j < len(rhs) else MajoranaOperator.zero()
        if terms:
            target = target - commutator(h01, terms[-1])
        solved = adjoint.solve(target)
        terms.append(solved.solution)
        residuals.append(solved.residual)
    return KappaSeries(terms, residuals)


class PreparedIdentity(NamedTuple):
    label: str
    computed: MajoranaOperator
    expected: MajoranaOperator

    @property
    def error(self) -> float:
        return (self.computed - self.expected).norm()


def _m(*sites: int, coeff: complex = 1.0) -> MajoranaOperator:
    return MajoranaOperator.monomial(sites, coeff)


def prepared_identities(n_sites: int = CLOSED_FORM_MIN_SITES + 1) -> List[PreparedIdentity]:
    """
    returns the commutators [H_0,0, -i c_a c_b c_c] used to assemble the closed-form first-order
    mode, each next to its expected value, plus their combination 2 I_246 + I_257 - 2 I_347 + I_356.
    """
    if n_sites < CLOSED_FORM_MIN_SITES:
        raise ValueError(f'n_sites must be at least {CLOSED_FORM_MIN_SITES}; got {n_sites}.')
    h00 = model_builders.chain_plain_bonds(n_sites)

    def ad(*sites: int) -> MajoranaOperator:
        return commutator(h00, _m(*sites, coeff=-1j))

    i246, i257, i347, i356 = ad(2, 4, 6), ad(2, 5, 7), ad(3, 4, 7), ad(3, 5, 6)
    return [
        PreparedIdentity('[H00,-i c2c3c5]', ad(2, 3, 5), 2 * _m(2, 3, 4)),
        PreparedIdentity('[H00,-i c3c4c5]', ad(3, 4, 5), 2 * _m(2, 4, 5)),
        PreparedIdentity('[H00,-i c2c3c7]', ad(2, 3, 7), 2 * _m(2, 3, 6)),
        PreparedIdentity('[H00,-i c1c3c4]', ad(1, 3, 4), 2 * _m(1, 2, 4) - 2 * _m(1, 3, 5)),
        PreparedIdentity('[H00,-i c1c2c5]', ad(1, 2, 5), -2 * _m(1, 3, 5) + 2 * _m(1, 2, 4)),
        PreparedIdentity('[H00,-i c2c3c9]', ad(2, 3, 9), 2 * _m(2, 3, 8)),
        PreparedIdentity('[H00,-i c1c2c7]', ad(1, 2, 7), -2 * _m(1, 3, 7) + 2 * _m(1, 2, 6)),
        PreparedIdentity('I246', i246, -2 * _m(3, 4, 6) - 2 * _m(2, 5, 6) - 2 * _m(2, 4, 7)),
        PreparedIdentity('I257', i257, -2 * _m(3, 5, 7) + 2 * _m(2, 5, 6) + 2 * _m(2, 4, 7)),
        PreparedIdentity('I347', i347, 2 * _m(3, 4, 6) - 2 * _m(3, 5, 7) + 2 * _m(2, 4, 7)),
        PreparedIdentity('I356', i356, 2 * _m(3, 4, 6) - 2 * _m(3, 5, 7) + 2 * _m(2, 5, 6)),
        PreparedIdentity('2I246+I257-2I347+I356', 2 * i246 + i257 - 2 * i347 + i356,
                         -6 * _m(3, 4, 6) - 6 * _m(2, 4, 7)),
    ]


def anticommutator_zero_mode(spec: ModelSpec) -> MajoranaOperator:
    """
    returns (gamma_0 H_0 + H_0 gamma_0) / 2, a three-Majorana operator commuting with H_0.
    """
    h0 = model_builders.build_h0(spec)
    gamma0 = model_builders.build_gamma0(spec)
    return 0.5 * (gamma0 * h0 + h0 * gamma0)


# Localization


class LocalizationProfile(msgspec.Struct):
    """
    residuals[k] = ||gamma - Pi_{>=2m-1}(gamma)|| for m = cutoffs[k] (coefficient norm).
    shell_weights[k] = norm of the terms whose rightmost site is 2m-1 or 2m, m = k + 1.
    rate, intercept, r_squared: fit of log(shell weight) against m; rate = log|kappa| for gamma_0.
    residual_rate: the same fit on the truncation residuals.
    operator_residuals: residuals as Fock operator norms, when requested.

    """
    cutoffs: List[int]
    residuals: List[float]
    shell_weights: List[float]
    rate: Optional[float]
    intercept: Optional[float]
    r_squared: Optional[float]
    fit_points: int
    residual_rate: Optional[float]
    operator_residuals: Optional[List[float]] = None

    csv_header: ClassVar[Tuple[str, ...]] = ('m', 'residual', 'shell_weight')

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.residuals, self.residuals[1:]))

    def csv_rows(self) -> List[List[str]]:
        weights = dict(enumerate(self.shell_weights, start=1))
        return [[str(m), utils.format_float(r), utils.format_float(weights.get(m, 0.0))]
                for m, r in zip(self.cutoffs, self.residuals)]


def _fit(ms: Sequence[int], values: Sequence[float]) -> Tuple[Optional[float], Optional[float], Optional[float], int]:
    points = [(m, np.log(v)) for m, v in zip(ms, values) if v > constants.DECAY_FIT_FLOOR]
    if len(points) < 2:
        return None, None, None, len(points)
    slope, intercept, r_squared = utils.fit_line([p[0] for p in points], [p[1] for p in points])
    return slope, intercept, r_squared, len(points)


def localization_profile(gamma: MajoranaOperator, spec: ModelSpec,
                         with_operator_norm: bool = False) -> LocalizationProfile:
    """
    gamma - mode on leg 1 of spec.
    with_operator_norm - also measure residuals as Fock operator norms (small N only).

    returns the LocalizationProfile of gamma.
    """
    n = spec.n_sites
    cutoffs = list(range(2, n + 1))
    tails = [gamma - truncate_support(gamma, 2 * m - 1) for m in cutoffs]
    residuals = [tail.norm() for tail in tails]
    shell_weights = [(truncate_support(gamma, 2 * m + 1) - truncate_support(gamma, 2 * m - 1)).norm()
                     for m in range(1, n + 1)]
    rate, intercept, r_squared, fit_points = _fit(range(1, n + 1), shell_weights)
    residual_rate = _fit(cutoffs, residuals)[0]
    if rate is None:
        logger.warning('localization rate undefined: %d shell weights above %g',
                       fit_points, constants.DECAY_FIT_FLOOR)
    operator_residuals = None
    if with_operator_norm:
        rep = fock_rep.representation(max(spec.mode_count, fock_rep.mode_count_for(gamma)))
        operator_residuals = [rep.operator_norm(tail) for tail in tails]
    return LocalizationProfile(cutoffs=cutoffs, residuals=residuals, shell_weights=shell_weights, rate=rate,
                               intercept=intercept, r_squared=r_squared, fit_points=fit_points,
                               residual_rate=residual_rate, operator_residuals=operator_residuals)


# Kernel method


class KernelReport(msgspec.Struct):
    """
    basis_size: number of odd monomials on sites 1..2N-1 (2^(2N-2)).
    eigenvalues: spectrum of the Hermitian matrix M, ascending.
    kernel_basis: real orthonormal kernel vectors (columns) over the Hermitian basis C_a, whose
        masks are listed in basis_masks.
    selected: Hermitian kernel mode orthogonal to the full product, with maximal left-edge weight.

    """
    basis_size: int
    kernel_dimension: int
    eigenvalues: np.ndarray
    basis_masks: Tuple[int, ...]
    kernel_basis: np.ndarray
    antisymmetry_error: float
    realness_error: float
    trivial_residual: float
    trivial_in_kernel: bool
    kernel_consistency: float
    selected: MajoranaOperator
    edge_weight: float
    residual: float
    fock_residual: Optional[float]
    profile: LocalizationProfile
    kernel_tol: float

    csv_header: ClassVar[Tuple[str, ...]] = ('sites', 're_coeff', 'im_coeff')

    def csv_rows(self) -> List[List[str]]:
        return coefficient_rows(self.selected)


def kernel_matrix(h: MajoranaOperator, masks: Sequence[int]) -> np.ndarray:
    """
    returns M_ab = (C_a, [h, C_b]) over the Hermitian basis elements with the given masks.
    """
    index = {mask: k for k, mask in enumerate(masks)}
    matrix = np.zeros((len(masks), len(masks)), dtype=complex)
    for b, mask in enumerate(masks):
        image = commutator(h, hermitian_basis_element(mask).operator())
        for out_mask, coeff in to_hermitian_coefficients(image).items():
            if out_mask not in index:
                raise ConfigurationError(f'zero_modes: [H, C] leaves the basis at {format_monomial(out_mask)}; '
                                         'H must act on sites 1..2N-1 only.')
            matrix[index[out_mask], b] = coeff
    return matrix


def _operator_from(vector: np.ndarray, masks: Sequence[int]) -> MajoranaOperator:
    coefficients = {mask: float(v) for mask, v in zip(masks, vector) if v != 0}
    return sum((coeff * hermitian_basis_element(mask).operator() for mask, coeff in coefficients.items()),
               MajoranaOperator.zero())


def _select_edge_mode(kernel: np.ndarray, masks: Sequence[int], trivial: int) -> Tuple[np.ndarray, float]:
    # remove the full-product direction, then maximize the mass of terms supported on the left edge
    projected = kernel.copy()
    projected[trivial, :] = 0.0
    u, s, _ = np.linalg.svd(projected, full_matrices=False)
    span = u[:, s > constants.DEFAULT_KERNEL_TOL]
    if span.shape[1] == 0:
        raise KernelConsistencyError('zero_modes: kernel holds nothing besides the full product.')
    edge = np.array([1.0 if utils.max_site(mask) <= constants.LEFT_EDGE_WINDOW else 0.0 for mask in masks])
    weights, vectors = np.linalg.eigh(span.T @ (edge[:, None] * span))
    vector = span @ vectors[:, -1]
    lead = int(np.argmax(np.abs(vector)))
    if vector[lead] < 0:
        vector = -vector
    return vector, float(weights[-1])


def kernel_solve(spec: ModelSpec, kernel_tol: float = constants.DEFAULT_KERNEL_TOL,
                 fock_check: bool = True) -> KernelReport:
    """
    spec - chain whose H_g acts on sites 1..2N-1.
    kernel_tol - |eigenvalue| (and singular value) below this is a kernel direction.
    fock_check - recompute ||[H, gamma]|| from Fock matrices as an independent check.

    returns the KernelReport.
    Raises ConfigurationError above KERNEL_MAX_SITES sites.
    Raises KernelConsistencyError if the kernel dimension is below 2 or odd.
    """
    _require_chain(spec, 'kernel_solve')
    if spec.n_sites > constants.KERNEL_MAX_SITES:
        raise ConfigurationError(f'zero_modes: kernel method is limited to N <= {constants.KERNEL_MAX_SITES} '
                                 f'(dense {2 ** (2 * constants.KERNEL_MAX_SITES - 2)}-column matrix); '
                                 f'got N={spec.n_sites}.')
    h = model_builders.build_hamiltonian(spec)
    n_odd = spec.sites_per_leg - 1
    masks = odd_masks(n_odd)
    matrix = kernel_matrix(h, masks)
    antisymmetry = float(np.max(np.abs(matrix + matrix.T)))
    realness = float(np.max(np.abs(matrix.real)))
    eigenvalues = np.linalg.eigvalsh(matrix)

    # M = i B with B real antisymmetric; its real null space is M's kernel
    _, singular, vh = scipy.linalg.svd(matrix.imag)
    kernel = vh[singular < kernel_tol].T
    dimension = kernel.shape[1]
    logger.debug('kernel matrix %dx%d: dimension %d, antisymmetry %.2g, realness %.2g',
                 len(masks), len(masks), dimension, antisymmetry, realness)
    if dimension < 2 or dimension % 2:
        raise KernelConsistencyError(f'zero_modes: kernel dimension {dimension} must be even and at least 2.')

    trivial = masks.index((1 << n_odd) - 1)
    trivial_residual = float(np.linalg.norm(matrix[:, trivial]))
    h_norm = h.norm()
    consistency = max(commutator(h, _operator_from(kernel[:, k], masks)).norm() for k in range(dimension))
    if consistency > len(masks) * kernel_tol * max(h_norm, 1.0):
        logger.warning('kernel vectors leave a commutator of %.3g with H', consistency)

    vector, edge_weight = _select_edge_mode(kernel, masks, trivial)
    gamma = _operator_from(vector, masks)
    gamma = 0.5 * (gamma + gamma.dagger())
    residual = commutator(h, gamma).norm()
    fock_residual = None
    if fock_check and spec.mode_count <= constants.MAX_DENSE_MODES:
        rep = fock_rep.representation(spec.mode_count)
        h_matrix, gamma_matrix = rep.compile(h), rep.compile(gamma)
        fock_residual = float(np.linalg.norm(h_matrix @ gamma_matrix - gamma_matrix @ h_matrix, ord=2))
    logger.info('kernel mode: dimension %d, residual %.3g, edge weight %.6f', dimension, residual, edge_weight)
    return KernelReport(basis_size=len(masks), kernel_dimension=dimension, eigenvalues=eigenvalues,
                        basis_masks=masks, kernel_basis=kernel, antisymmetry_error=antisymmetry,
                        realness_error=realness, trivial_residual=trivial_residual,
                        trivial_in_kernel=trivial_residual <= kernel_tol, kernel_consistency=consistency,
                        selected=gamma, edge_weight=edge_weight, residual=residual,
                        fock_residual=fock_residual, profile=localization_profile(gamma, spec),
                        kernel_tol=kernel_tol)
