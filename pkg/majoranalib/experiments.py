"""
This module contains the batch layer: the RunConfig read from a TOML run file, one struct per
experiment, the runner that computes each experiment, and the writers for report.txt, data.csv
and meta (JSON).

A run file looks like

    output_dir = "out/spectrum"

    [model]
    N = 4
    kappa = 0.5
    g = 0.0
    interaction = {kind = "c1c2c3c4"}

    [experiment]
    name = "spectrum"

Nothing is written until the experiment has finished, so a failing run leaves no partial data.csv.

"""
import csv
import logging
import math
import os
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, NamedTuple, Optional, Sequence, Tuple, Union

import msgspec
import numpy as np

from . import __version__, constants, edge_index, model_builders, spectral, utils, zero_modes
from .majorana_algebra import MajoranaOperator, anticommutator, commutator
from .model_builders import ConfigurationError, ModelSpec

logger = logging.getLogger(__name__)


# Configuration


class GGrid(msgspec.Struct, forbid_unknown_fields=True, frozen=True):
    """
    Couplings, either listed (g_values) or as an inclusive linspace (g_min, g_max, points).
    """
    g_values: Optional[Tuple[float, ...]] = None
    g_min: Optional[float] = None
    g_max: Optional[float] = None
    points: Optional[int] = None

    def __post_init__(self) -> None:
        ranged = (self.g_min, self.g_max, self.points)
        if self.g_values is not None:
            if any(value is not None for value in ranged):
                raise ConfigurationError('experiments: give either g_values or g_min/g_max/points, not both.')
            if not self.g_values:
                raise ConfigurationError('experiments: g_values must not be empty.')
        elif any(value is None for value in ranged):
            raise ConfigurationError('experiments: a grid needs g_values or all of g_min, g_max, points.')
        elif self.points < 1:
            raise ConfigurationError(f'experiments: points must be at least 1; got {self.points}.')

    def values(self) -> Tuple[float, ...]:
        if self.g_values is not None:
            return tuple(float(g) for g in self.g_values)
        return utils.linspace_grid(self.g_min, self.g_max, self.points)


class _ExperimentBase(msgspec.Struct, tag_field='name', forbid_unknown_fields=True, frozen=True):
    pass


class SpectrumExperiment(_ExperimentBase, tag='spectrum'):
    cluster_tol: float = constants.DEFAULT_CLUSTER_TOL
    pairing_tol: float = constants.PAIRING_TOL
    require_pairing: bool = False


class GapSweepExperiment(_ExperimentBase, tag='gap-sweep'):
    grid: GGrid = msgspec.field(default_factory=lambda: GGrid(g_min=-0.2, g_max=0.2, points=9))
    cluster_tol: float = constants.DEFAULT_CLUSTER_TOL
    pairing_tol: float = constants.PAIRING_TOL
    strict: bool = True


class SeriesExperiment(_ExperimentBase, tag='zero-mode-series'):
    order: int = 1
    gauge: Literal['min_norm', 'paper_lambda', 'closed_form_lambda'] = 'min_norm'
    lambda_: Optional[float] = msgspec.field(default=None, name='lambda')
    window: Optional[int] = None
    obstruction_tol: float = constants.OBSTRUCTION_TOL
    grid: Optional[GGrid] = None


class KernelExperiment(_ExperimentBase, tag='zero-mode-kernel'):
    kernel_tol: float = constants.DEFAULT_KERNEL_TOL
    fock_check: bool = True


class LocalityExperiment(_ExperimentBase, tag='locality'):
    mode: Literal['gamma0', 'kernel', 'series'] = 'kernel'
    order: int = 1
    kernel_tol: float = constants.DEFAULT_KERNEL_TOL
    with_operator_norm: bool = False


class LadderIndexExperiment(_ExperimentBase, tag='ladder-index'):
    grid: Optional[GGrid] = None
    cluster_tol: float = constants.DEFAULT_CLUSTER_TOL


class CheckSolvableExperiment(_ExperimentBase, tag='check-solvable'):
    tol: float = constants.ALGEBRA_TOL


class TildeCheckExperiment(_ExperimentBase, tag='tilde-check'):
    tol: float = constants.MATRIX_TOL


Experiment = Union[SpectrumExperiment, GapSweepExperiment, SeriesExperiment, KernelExperiment,
                   LocalityExperiment, LadderIndexExperiment, CheckSolvableExperiment, TildeCheckExperiment]


class RunConfig(msgspec.Struct, forbid_unknown_fields=True, frozen=True):
    """
    model (ModelSpec): the Hamiltonian.
    experiment (Experiment): tagged by its "name" key.
    output_dir (Optional[str]): overridden by MAJORANALIB_OUTPUT_DIR, then by --output-dir.

    """
    model: ModelSpec
    experiment: Experiment
    output_dir: Optional[str] = None


class RunMeta(msgspec.Struct):
    config: RunConfig
    version: str
    wall_time_s: float
    result: Any = None


def decode_config(data: Union[bytes, str]) -> RunConfig:
    """
    returns the RunConfig of a TOML document.
    Raises msgspec.ValidationError (schema or model invariant) or msgspec.DecodeError (syntax).
    """
    return msgspec.toml.decode(data, type=RunConfig)


def load_config(path: Union[str, Path]) -> RunConfig:
    return decode_config(Path(path).read_bytes())


def resolve_output_dir(config: RunConfig, override: Optional[str] = None) -> Path:
    """
    returns the output directory: override, else the environment variable, else the config,
    else the default.
    """
    for candidate in (override, os.environ.get(constants.OUTPUT_DIR_ENV), config.output_dir):
        if candidate:
            return Path(candidate)
    return Path(constants.DEFAULT_OUTPUT_DIR)


# Results


class RunResult(NamedTuple):
    report: List[str]
    header: Sequence[str]
    rows: List[List[str]]
    payload: Any


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return 'n/a'
    return f'{value:.6g}'


def _chop(value: float, tol: float) -> float:
    # values within tol of zero are reported as an exact 0
    return 0.0 if value <= tol else value


def _require_dense(spec: ModelSpec) -> None:
    if spec.mode_count > constants.MAX_DENSE_MODES:
        raise ConfigurationError(f'experiments: {spec.mode_count} modes exceed the dense limit of '
                                 f'{constants.MAX_DENSE_MODES}; reduce N or legs.')


def run_spectrum(spec: ModelSpec, experiment: SpectrumExperiment) -> RunResult:
    _require_dense(spec)
    report = spectral.spectrum(model_builders.build_hamiltonian(spec), mode_count=spec.mode_count,
                               cluster_tol=experiment.cluster_tol)
    if experiment.require_pairing:
        spectral.require_pairing(report, experiment.pairing_tol)
    paired = report.pairing_splitting is not None and report.pairing_splitting <= experiment.pairing_tol
    cluster_of = {}
    for number, (start, size) in enumerate(report.clusters):
        cluster_of.update({k: number for k in range(start, start + size)})
    rows = [[str(k), utils.format_float(energy), str(parity), str(cluster_of[k])]
            for k, (energy, parity) in enumerate(zip(report.eigenvalues, report.parities))]
    lines = [f'eigenvalues: {len(report.eigenvalues)}',
             f'opposite-parity pairs: {len(report.eigenvalues) // 2 if paired else 0}',
             f'ground energy: {report.ground_energy:.12g}',
             f'ground degeneracy: {report.ground_degeneracy}',
             f'gap: {_fmt(report.gap)}',
             f'max pairing splitting: {_fmt(report.pairing_splitting)}',
             f'clusters: {len(report.clusters)}']
    return RunResult(lines, ('index', 'energy', 'parity', 'cluster'), rows, report)


def run_gap_sweep(spec: ModelSpec, experiment: GapSweepExperiment) -> RunResult:
    _require_dense(spec)
    sweep = spectral.gap_sweep(spec, experiment.grid.values(), cluster_tol=experiment.cluster_tol,
                               pairing_tol=experiment.pairing_tol, strict=experiment.strict)
    lines = [f'points: {len(sweep.points)}',
             f'reference gap: {_fmt(sweep.reference_gap)}',
             f'min gap: {_fmt(sweep.min_gap)}',
             f'max splitting: {_fmt(sweep.max_splitting)}',
             f'||V||: {_fmt(sweep.interaction_norm)}',
             f'lipschitz violations: {sweep.lipschitz_violations or "none"}',
             f'ambiguous clustering at: {sweep.ambiguous_points or "none"}',
             f'empirical g_max: {_fmt(sweep.g_max)}']
    return RunResult(lines, sweep.csv_header, sweep.csv_rows(), sweep)


def run_series(spec: ModelSpec, experiment: SeriesExperiment) -> RunResult:
    solution = zero_modes.series_solve(spec, experiment.order, gauge=experiment.gauge,
                                       lambda_=experiment.lambda_, window=experiment.window,
                                       obstruction_tol=experiment.obstruction_tol)
    lines = [f'gauge: {solution.gauge}' + (f' (lambda={solution.lambda_:g})' if solution.lambda_ is not None else ''),
             f'order: {solution.order}',
             f'window: c[1]..c[{solution.window}]']
    lines += [f'order {n}: {len(gamma)} terms, residual {_fmt(residual)}'
              for n, (gamma, residual) in enumerate(zip(solution.gammas, solution.residuals))]
    lines.append(f'||[V,gamma_0]|| = {_fmt(commutator(model_builders.build_interaction(spec), solution.gammas[0]).norm())}')
    payload: Dict[str, Any] = {'solution': solution}
    if experiment.grid is not None:
        scaling = zero_modes.series_residual_scaling(spec, solution, experiment.grid.values())
        lines.append(f'residual slope: {_fmt(scaling.slope)} (expected >= '
                     f'{scaling.expected_slope - constants.SLOPE_MARGIN:g}; ok={scaling.slope_ok})')
        payload['scaling'] = scaling
    return RunResult(lines, solution.csv_header, solution.csv_rows(), payload)


def run_kernel(spec: ModelSpec, experiment: KernelExperiment) -> RunResult:
    report = zero_modes.kernel_solve(spec, kernel_tol=experiment.kernel_tol, fock_check=experiment.fock_check)
    lines = [f'basis size: {report.basis_size}',
             f'kernel dimension: {report.kernel_dimension}',
             f'antisymmetry error: {_fmt(report.antisymmetry_error)}',
             f'realness error: {_fmt(report.realness_error)}',
             f'trivial product in kernel: {report.trivial_in_kernel} (residual {_fmt(report.trivial_residual)})',
             f'left-edge weight: {_fmt(report.edge_weight)}',
             f'||[H,gamma]||: {_fmt(report.residual)}',
             f'||[H,gamma]|| (Fock): {_fmt(report.fock_residual)}',
             f'localization rate: {_fmt(report.profile.rate)}']
    return RunResult(lines, report.csv_header, report.csv_rows(), report)


def run_locality(spec: ModelSpec, experiment: LocalityExperiment) -> RunResult:
    if experiment.mode == 'gamma0':
        gamma = model_builders.build_gamma0_normalized(spec)
    elif experiment.mode == 'series':
        gamma = zero_modes.series_solve(spec, experiment.order).truncated(spec.g)
    else:
        gamma = zero_modes.kernel_solve(spec, kernel_tol=experiment.kernel_tol, fock_check=False).selected
    if experiment.with_operator_norm:
        _require_dense(spec)
    profile = zero_modes.localization_profile(gamma, spec, with_operator_norm=experiment.with_operator_norm)
    lines = [f'mode: {experiment.mode}',
             f'rate: {_fmt(profile.rate)} (log|kappa| = {_fmt(math.log(abs(spec.kappa)) if spec.kappa else None)})',
             f'r^2: {_fmt(profile.r_squared)} over {profile.fit_points} points',
             f'residual rate: {_fmt(profile.residual_rate)}',
             f'residuals decreasing: {profile.decreasing}']
    return RunResult(lines, profile.csv_header, profile.csv_rows(), profile)


def run_ladder_index(spec: ModelSpec, experiment: LadderIndexExperiment) -> RunResult:
    _require_dense(spec)
    grid = experiment.grid.values() if experiment.grid is not None else (spec.g,)
    sweep = edge_index.ladder_sweep(spec, grid, cluster_tol=experiment.cluster_tol)
    lines = [f'legs: {spec.legs}',
             f'right modes verified on legs: {sweep.reports[0].right_mode_legs}',
             f'indices (empirical): {sweep.indices}',
             f'index constant: {sweep.index_constant}']
    for report in sweep.reports:
        lines.append(f'g={report.g:g}: degeneracy {report.degeneracy}, n_left {report.n_left}, '
                     f'index {report.index}, edge splitting {_fmt(report.edge_splitting)}, '
                     f'multiplicities divisible by {report.multiplicity_base}: {report.multiplicity_ok}')
    certificate = sweep.reports[0].chi_certificate_error
    if certificate is not None:
        lines.append(f'chi certificate error: {_fmt(certificate)}')
    return RunResult(lines, sweep.csv_header, sweep.csv_rows(), sweep)


def run_check_solvable(spec: ModelSpec, experiment: CheckSolvableExperiment) -> RunResult:
    interaction = model_builders.build_interaction(spec)
    h0 = model_builders.build_ladder_h0(spec)
    rows, lines = [], []
    for leg in range(1, spec.legs + 1):
        gamma = model_builders.build_gamma0(spec, leg)
        v_norm = commutator(interaction, gamma).norm()
        h0_norm = commutator(h0, gamma).norm()
        b_norm = max((anticommutator(gamma, model_builders.build_b(ell, spec, leg)).norm()
                      for ell in range(1, spec.n_sites)), default=0.0)
        rows.append([str(leg), utils.format_float(v_norm), utils.format_float(h0_norm), utils.format_float(b_norm)])
        suffix = f' (leg {leg})' if spec.legs > 1 else ''
        lines += [f'||[V,gamma_0]|| = {_chop(v_norm, experiment.tol):.3g}{suffix}',
                  f'||[H_0,gamma_0]|| = {_chop(h0_norm, experiment.tol):.3g}{suffix}',
                  f'max ||{{gamma_0,b_l}}|| = {_chop(b_norm, experiment.tol):.3g}{suffix}',
                  f'exactly solvable: {v_norm <= experiment.tol}{suffix}']
    return RunResult(lines, ('leg', 'v_commutator', 'h0_commutator', 'b_anticommutator'), rows, None)


def run_tilde_check(spec: ModelSpec, experiment: TildeCheckExperiment) -> RunResult:
    _require_dense(spec)
    frame = spectral.tilde_frame(spec)
    form = spectral.tilde_quadratic_form(spec, frame)
    eta = spectral.doubled_system_check(form, experiment.tol)

    # two independent paths to the spectrum of H_0: Fock ED and the bulk form doubled by the edge pair
    exact = np.asarray(spectral.spectrum(model_builders.build_h0(spec), mode_count=spec.n_sites).eigenvalues)
    reconstructed = np.sort(np.repeat(spectral.free_fermion_spectrum(form), 2))
    oracle_error = float(np.max(np.abs(exact - reconstructed)))

    checks = [('max_anticommutator', frame.max_anticommutator), ('max_square_error', frame.max_square_error),
              ('gram_error', frame.gram_error), ('rebuild_error', frame.rebuild_error),
              ('eta_block_error', eta.block_error), ('eta_canonical_error', eta.canonical_error),
              ('eta_identity_error', eta.identity_error), ('eta_spectrum_error', eta.spectrum_error),
              ('eta_free_fermion_error', eta.free_fermion_error),
              ('lower_bound_min_eig', eta.lower_bound_min_eig), ('spectrum_oracle_error', oracle_error),
              ('single_particle_gap', form.single_particle_gap)]
    lines = [f'{name}: {_fmt(value)}' for name, value in checks]
    if not eta.passed or oracle_error > experiment.tol:
        raise spectral.ContractError(f'spectral: tilde/eta verification failed ({"; ".join(lines)})')
    rows = [[name, utils.format_float(value)] for name, value in checks]
    return RunResult(lines, ('quantity', 'value'), rows, {'frame': frame, 'eta': eta})


_RUNNERS: Dict[type, Callable[[ModelSpec, Any], RunResult]] = {
    SpectrumExperiment: run_spectrum,
    GapSweepExperiment: run_gap_sweep,
    SeriesExperiment: run_series,
    KernelExperiment: run_kernel,
    LocalityExperiment: run_locality,
    LadderIndexExperiment: run_ladder_index,
    CheckSolvableExperiment: run_check_solvable,
    TildeCheckExperiment: run_tilde_check,
}


def run_experiment(config: RunConfig) -> RunResult:
    experiment = config.experiment
    logger.info('running %s on N=%d legs=%d kappa=%g g=%g', type(experiment).__struct_config__.tag,
                config.model.n_sites, config.model.legs, config.model.kappa, config.model.g)
    return _RUNNERS[type(experiment)](config.model, experiment)


# Writers


def enc_hook(obj: Any) -> Any:
    """
    msgspec encoder hook: operators as canonical text, arrays as lists, complex as [re, im].
    """
    if isinstance(obj, MajoranaOperator):
        return obj.to_text()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise NotImplementedError(f'experiments: cannot encode objects of type {type(obj).__name__}.')


def write_csv(path: Path, header: Sequence[str], rows: List[List[str]]) -> None:
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def write_report(path: Path, config: RunConfig, result: RunResult) -> None:
    model = config.model
    heading = [f'majoranalib {__version__}',
               f'experiment: {type(config.experiment).__struct_config__.tag}',
               f'model: N={model.n_sites} legs={model.legs} kappa={model.kappa:g} g={model.g:g} '
               f'interaction={type(model.interaction).__struct_config__.tag}',
               '']
    path.write_text('\n'.join(heading + result.report) + '\n', encoding='utf-8')


def write_meta(path: Path, config: RunConfig, wall_time: float, payload: Any = None) -> None:
    meta = RunMeta(config=config, version=__version__, wall_time_s=wall_time, result=payload)
    path.write_bytes(msgspec.json.format(msgspec.json.encode(meta, enc_hook=enc_hook), indent=2) + b'\n')


def read_meta(path: Union[str, Path]) -> RunMeta:
    return msgspec.json.decode(Path(path).read_bytes(), type=RunMeta)


def execute(config: RunConfig, output_dir: Optional[str] = None) -> Path:
    """
    config - validated run configuration.
    output_dir - command-line override of the output directory.

    returns the directory holding report.txt, data.csv and meta.
    Any library error propagates before a file is written.
    """
    start = time.perf_counter()
    result = run_experiment(config)
    wall_time = time.perf_counter() - start
    target = resolve_output_dir(config, output_dir)
    target.mkdir(parents=True, exist_ok=True)
    write_csv(target / constants.DATA_FILE, result.header, result.rows)
    write_report(target / constants.REPORT_FILE, config, result)
    write_meta(target / constants.META_FILE, config, wall_time, result.payload)
    logger.info('wrote %s, %s and %s to %s', constants.REPORT_FILE, constants.DATA_FILE,
                constants.META_FILE, target)
    return target


# Experiment catalogue

_CATALOGUE: Tuple[Tuple[str, str, str, str], ...] = (
    ('spectrum', 'full ED spectrum with clusters and parity labels',
     'cluster_tol, pairing_tol, require_pairing', 'index,energy,parity,cluster'),
    ('gap-sweep', 'ground splitting and gap over a g grid, Lipschitz check, empirical g_max',
     'grid, cluster_tol, pairing_tol, strict', 'g,splitting,gap,ground_energy'),
    ('zero-mode-series', 'perturbative zero mode sum_n g^n gamma_n, optional residual scaling',
     'order, gauge, lambda, window, obstruction_tol, grid', 'order,sites,re_coeff,im_coeff'),
    ('zero-mode-kernel', 'zero mode from the kernel of (C_a, [H, C_b]) on sites 1..2N-1',
     'kernel_tol, fock_check', 'sites,re_coeff,im_coeff'),
    ('locality', 'truncation residuals and decay rate of a zero mode',
     'mode, order, kernel_tol, with_operator_norm', 'm,residual,shell_weight'),
    ('ladder-index', 'edge zero-mode count and Z2 index of a ladder',
     'grid, cluster_tol', 'g,degeneracy,n_left,index,edge_splitting'),
    ('check-solvable', 'commutator of V with gamma_0 on every leg',
     'tol', 'leg,v_commutator,h0_commutator,b_anticommutator'),
    ('tilde-check', 'tilde frame, eta construction and two-path spectrum oracle',
     'tol', 'quantity,value'),
)


def list_experiments() -> str:
    """
    returns the experiment catalogue: name, purpose, keys of the [experiment] table and data.csv columns.
    """
    lines = ['model keys: N, kappa, legs, g, interaction.kind '
             '(none | explicit | even_sites_only | b_triple | b_pair_hc | interchain_edge | c1c2c3c4)',
             '']
    for name, purpose, keys, columns in _CATALOGUE:
        lines += [name, f'  {purpose}', f'  keys: {keys}', f'  data.csv: {columns}']
    return '\n'.join(lines) + '\n'
