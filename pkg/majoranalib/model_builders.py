"""
This module contains the declarative model description (ModelSpec and the interaction
variants) and the builders that turn it into symbolic MajoranaOperators: the chain and
ladder Hamiltonians, the left edge mode gamma_0 and its normalized form, the b_l operators
and every interaction family.

Sites of a ladder are numbered leg-major: site m of leg j is the global generator
(j - 1) * 2N + m, so every leg keeps its chain contiguous. The right-edge generator
c_2N of each leg never appears in any Hamiltonian built here.

"""
import logging
import math
from typing import Optional, Tuple, Union

import msgspec

from . import constants, utils
from .majorana_algebra import MajoranaOperator, dagger, product_of

logger = logging.getLogger(__name__)


class ConfigurationError(ValueError):
    """
    Exception raised when a model description violates one of its invariants.

    """
    pass


# Interaction variants (tagged by the "kind" key in config files)


class _InteractionBase(msgspec.Struct, tag_field='kind', forbid_unknown_fields=True, frozen=True):
    pass


class NoInteraction(_InteractionBase, tag='none'):
    """
    V = 0.
    """


class ExplicitTerms(_InteractionBase, tag='explicit'):
    """
    V = sum K c_i c_j c_k c_l over terms [i, j, k, l, K] with i < j < k < l (global sites).
    """
    terms: Tuple[Tuple[int, int, int, int, float], ...] = ()


class EvenSitesOnly(_InteractionBase, tag='even_sites_only'):
    """
    V = strength * sum_l c_2l c_2l+2 c_2l+4 c_2l+6 on every leg; commutes with gamma_0.
    """
    strength: float = 1.0


class BTriple(_InteractionBase, tag='b_triple'):
    """
    V = strength * sum_l b_l c_2l c_2l+2 c_2l+4 on every leg.
    """
    strength: float = 1.0


class BPairHc(_InteractionBase, tag='b_pair_hc'):
    """
    V = strength * sum_l [b_l b_l+1 c_2l c_2l+2 + h.c.] on every leg.
    """
    strength: float = 1.0


class InterchainEdge(_InteractionBase, tag='interchain_edge'):
    """
    V = strength * sum_(j, j') i gamma_hat_0,j gamma_hat_0,j' over leg pairs.
    pairs defaults to (1, 2), (3, 4), ...; an odd last leg stays uncoupled.
    """
    strength: float = 1.0
    pairs: Optional[Tuple[Tuple[int, int], ...]] = None


class SingleQuartic(_InteractionBase, tag='c1c2c3c4'):
    """
    V = strength * c_1 c_2 c_3 c_4.
    """
    strength: float = 1.0


InteractionSpec = Union[NoInteraction, ExplicitTerms, EvenSitesOnly, BTriple, BPairHc,
                        InterchainEdge, SingleQuartic]


class ModelSpec(msgspec.Struct, forbid_unknown_fields=True, frozen=True):
    """
    Chain or ladder geometry plus couplings; fully determines H_g = H_0 + g V.

    n_sites (int): N, fermion sites per leg (2N Majoranas per leg). Config key "N".
    legs (int): L, number of chains.
    kappa (float): |kappa| < 1.
    g (float): interaction strength.
    interaction (InteractionSpec): V.

    """
    n_sites: int = msgspec.field(name='N')
    kappa: float
    legs: int = 1
    g: float = 0.0
    interaction: InteractionSpec = msgspec.field(default_factory=NoInteraction)

    def __post_init__(self) -> None:
        if self.n_sites < constants.MIN_CHAIN_LENGTH:
            raise ConfigurationError(
                f'model_builders: N must be at least {constants.MIN_CHAIN_LENGTH}; got {self.n_sites}.')
        if self.legs < constants.MIN_LEGS:
            raise ConfigurationError(
                f'model_builders: legs must be at least {constants.MIN_LEGS}; got {self.legs}.')
        if not math.isfinite(self.kappa) or abs(self.kappa) >= 1:
            raise ConfigurationError(
                f'model_builders: |kappa| < 1 is required for a gapped chain; got kappa={self.kappa}.')
        if not math.isfinite(self.g):
            raise ConfigurationError(f'model_builders: g must be finite; got {self.g}.')
        _validate_interaction(self)

    @property
    def sites_per_leg(self) -> int:
        return 2 * self.n_sites

    @property
    def total_sites(self) -> int:
        return 2 * self.n_sites * self.legs

    @property
    def mode_count(self) -> int:
        """
        complex fermion modes M = L * N of the Fock representation.
        """
        return self.n_sites * self.legs

    def with_coupling(self, g: float) -> 'ModelSpec':
        return msgspec.structs.replace(self, g=float(g))


def _validate_interaction(spec: ModelSpec) -> None:
    interaction = spec.interaction
    if isinstance(interaction, ExplicitTerms):
        for term in interaction.terms:
            sites = term[:4]
            if not all(a < b for a, b in zip(sites, sites[1:])):
                raise ConfigurationError(
                    f'model_builders: explicit term sites must satisfy i < j < k < l; got {sites}.')
            if sites[0] < constants.MIN_SITE or sites[-1] > spec.total_sites:
                raise ConfigurationError(
                    f'model_builders: explicit term sites must lie in [1, {spec.total_sites}]; got {sites}.')
    elif isinstance(interaction, InterchainEdge):
        if spec.legs < 2:
            raise ConfigurationError(
                f'model_builders: interchain_edge needs at least 2 legs; got legs={spec.legs}.')
        for pair in interchain_pairs(spec):
            if len(set(pair)) != 2 or not all(1 <= leg <= spec.legs for leg in pair):
                raise ConfigurationError(
                    f'model_builders: interchain pair must name two distinct legs in [1, {spec.legs}]; '
                    f'got {pair}.')
    elif isinstance(interaction, SingleQuartic):
        if max(constants.C1C2C3C4_SITES) >= spec.sites_per_leg:
            raise ConfigurationError(
                f'model_builders: c1c2c3c4 touches the right-edge site c_{spec.sites_per_leg} '
                f'(N={spec.n_sites}); N must be at least 3.')
    touched = _interaction_support(spec)
    for site in right_edge_sites(spec):
        if touched >> (site - 1) & 1:
            raise ConfigurationError(
                f'model_builders: interaction must not contain the right-edge site c_{site}.')


def _interaction_support(spec: ModelSpec) -> int:
    if isinstance(spec.interaction, ExplicitTerms):
        return utils.sites_to_mask(site for term in spec.interaction.terms for site in term[:4]) \
            if spec.interaction.terms else 0
    # Named families are built away from the right edge by construction
    return 0


# Geometry


def site_index(spec: ModelSpec, m: int, leg: int = 1) -> int:
    """
    m - site within the leg (1..2N).
    leg - leg number (1..L).

    returns the global, leg-major generator index (leg - 1) * 2N + m.
    """
    if m < 1 or m > spec.sites_per_leg:
        raise ValueError(f'm must be in range [1, {spec.sites_per_leg}]; got {m}.')
    if leg < 1 or leg > spec.legs:
        raise ValueError(f'leg must be in range [1, {spec.legs}]; got {leg}.')
    return (leg - 1) * spec.sites_per_leg + m


def right_edge_sites(spec: ModelSpec) -> Tuple[int, ...]:
    """
    returns the global index of c_2N on every leg.
    """
    return tuple(leg * spec.sites_per_leg for leg in range(1, spec.legs + 1))


def interchain_pairs(spec: ModelSpec) -> Tuple[Tuple[int, int], ...]:
    """
    returns the coupled leg pairs: the explicit override, or (1, 2), (3, 4), ...
    """
    interaction = spec.interaction
    if isinstance(interaction, InterchainEdge) and interaction.pairs is not None:
        return tuple(tuple(pair) for pair in interaction.pairs)
    return tuple((j, j + 1) for j in range(1, spec.legs, 2))


# Chain primitives (plain arguments so they also serve the degenerate N = 1 case)


def chain_h0(n_sites: int, kappa: float, offset: int = 0) -> MajoranaOperator:
    """
    returns i kappa sum_{l=1}^{N-1} c_2l-1 c_2l + i sum_{l=1}^{N-1} c_2l c_2l+1, sites shifted by offset.
    """
    return kappa * chain_kappa_bonds(n_sites, offset) + chain_plain_bonds(n_sites, offset)


def chain_kappa_bonds(n_sites: int, offset: int = 0) -> MajoranaOperator:
    """
    H_0,1 = i sum_{l=1}^{N-1} c_2l-1 c_2l, the bonds that carry kappa.
    """
    return MajoranaOperator({utils.sites_to_mask((offset + 2 * ell - 1, offset + 2 * ell)): 1j
                             for ell in range(1, n_sites)})


def chain_plain_bonds(n_sites: int, offset: int = 0) -> MajoranaOperator:
    """
    H_0,0 = i sum_{l=1}^{N-1} c_2l c_2l+1.
    """
    return MajoranaOperator({utils.sites_to_mask((offset + 2 * ell, offset + 2 * ell + 1)): 1j
                             for ell in range(1, n_sites)})


def gamma0(n_sites: int, kappa: float, offset: int = 0) -> MajoranaOperator:
    """
    returns sum_{l=1}^{N} kappa^(l-1) c_2l-1.
    """
    return MajoranaOperator.linear({offset + 2 * ell - 1: kappa ** (ell - 1)
                                    for ell in range(1, n_sites + 1)})


def b_operator(ell: int, kappa: float, offset: int = 0) -> MajoranaOperator:
    """
    returns b_l = kappa c_2l-1 - c_2l+1.
    """
    return MajoranaOperator.linear({offset + 2 * ell - 1: kappa, offset + 2 * ell + 1: -1.0})


# Builders


def _require_chain(spec: ModelSpec, what: str) -> None:
    if spec.legs != 1:
        raise ConfigurationError(
            f'model_builders: {what} is defined for a single chain (legs=1); got legs={spec.legs}. '
            f'Use build_ladder_h0 for ladders.')


def _leg_offset(spec: ModelSpec, leg: int) -> int:
    if leg < 1 or leg > spec.legs:
        raise ValueError(f'leg must be in range [1, {spec.legs}]; got {leg}.')
    return (leg - 1) * spec.sites_per_leg


def build_h0(spec: ModelSpec) -> MajoranaOperator:
    """
    returns H_0 of a single chain.
    Raises ConfigurationError for ladders.
    """
    _require_chain(spec, 'build_h0')
    return chain_h0(spec.n_sites, spec.kappa)


def build_h0_kappa_part(spec: ModelSpec) -> MajoranaOperator:
    """
    returns H_0,1 so that H_0 = kappa H_0,1 + H_0,0.
    """
    _require_chain(spec, 'build_h0_kappa_part')
    return chain_kappa_bonds(spec.n_sites)


def build_h0_bond_part(spec: ModelSpec) -> MajoranaOperator:
    """
    returns H_0,0 so that H_0 = kappa H_0,1 + H_0,0.
    """
    _require_chain(spec, 'build_h0_bond_part')
    return chain_plain_bonds(spec.n_sites)


def build_ladder_h0(spec: ModelSpec) -> MajoranaOperator:
    """
    returns the sum over legs of a copy of H_0, leg-major indexed.
    """
    return sum((chain_h0(spec.n_sites, spec.kappa, _leg_offset(spec, leg))
                for leg in range(1, spec.legs + 1)), MajoranaOperator.zero())


def build_gamma0(spec: ModelSpec, leg: int = 1) -> MajoranaOperator:
    return gamma0(spec.n_sites, spec.kappa, _leg_offset(spec, leg))


def build_gamma0_normalized(spec: ModelSpec, leg: int = 1) -> MajoranaOperator:
    """
    returns gamma_hat_0 = sqrt((1 - kappa^2) / (1 - kappa^(2N))) gamma_0, which squares to 1.
    """
    return utils.gamma0_normalization(spec.kappa, spec.n_sites) * build_gamma0(spec, leg)


def build_b(ell: int, spec: ModelSpec, leg: int = 1) -> MajoranaOperator:
    """
    ell - bond index, 1 <= ell <= N - 1.

    returns b_ell = kappa c_2ell-1 - c_2ell+1.
    """
    if ell < 1 or ell > spec.n_sites - 1:
        raise ValueError(f'ell must be in range [1, {spec.n_sites - 1}]; got {ell}.')
    return b_operator(ell, spec.kappa, _leg_offset(spec, leg))


def _even_sites_family(spec: ModelSpec, offset: int) -> MajoranaOperator:
    last = spec.sites_per_leg - 2
    return sum((MajoranaOperator.monomial([offset + 2 * ell + 2 * k for k in range(4)])
                for ell in range(1, spec.n_sites) if 2 * ell + 6 <= last), MajoranaOperator.zero())


def _b_triple_family(spec: ModelSpec, offset: int) -> MajoranaOperator:
    last = spec.sites_per_leg - 2
    out = MajoranaOperator.zero()
    for ell in range(1, spec.n_sites):
        if 2 * ell + 4 > last:
            break
        evens = MajoranaOperator.monomial([offset + 2 * ell, offset + 2 * ell + 2, offset + 2 * ell + 4])
        out = out + b_operator(ell, spec.kappa, offset) * evens
    return out


def _b_pair_hc_family(spec: ModelSpec, offset: int) -> MajoranaOperator:
    last = spec.sites_per_leg - 2
    out = MajoranaOperator.zero()
    for ell in range(1, spec.n_sites):
        if 2 * ell + 2 > last:
            break
        term = product_of([b_operator(ell, spec.kappa, offset), b_operator(ell + 1, spec.kappa, offset),
                           MajoranaOperator.monomial([offset + 2 * ell, offset + 2 * ell + 2])])
        out = out + term + dagger(term)
    return out


def build_interaction(spec: ModelSpec) -> MajoranaOperator:
    """
    returns V for the model's interaction variant (even parity, Hermitian, no right-edge sites).
    """
    interaction = spec.interaction
    offsets = [_leg_offset(spec, leg) for leg in range(1, spec.legs + 1)]
    if isinstance(interaction, NoInteraction):
        return MajoranaOperator.zero()
    if isinstance(interaction, ExplicitTerms):
        return sum((MajoranaOperator.monomial(term[:4], term[4]) for term in interaction.terms),
                   MajoranaOperator.zero())
    if isinstance(interaction, SingleQuartic):
        return interaction.strength * MajoranaOperator.monomial(constants.C1C2C3C4_SITES)
    if isinstance(interaction, InterchainEdge):
        out = MajoranaOperator.zero()
        for leg_a, leg_b in interchain_pairs(spec):
            out = out + 1j * build_gamma0_normalized(spec, leg_a) * build_gamma0_normalized(spec, leg_b)
        return interaction.strength * out
    family = {EvenSitesOnly: _even_sites_family, BTriple: _b_triple_family,
              BPairHc: _b_pair_hc_family}[type(interaction)]
    return interaction.strength * sum((family(spec, offset) for offset in offsets),
                                      MajoranaOperator.zero())


def build_hamiltonian(spec: ModelSpec) -> MajoranaOperator:
    """
    returns H_g = H_0 + g V (ladder H_0 when legs > 1).
    """
    h0 = build_ladder_h0(spec)
    if spec.g == 0.0:
        return h0
    hamiltonian = h0 + spec.g * build_interaction(spec)
    logger.debug('built H_g with %d terms (N=%d, legs=%d, kappa=%g, g=%g)',
                 len(hamiltonian), spec.n_sites, spec.legs, spec.kappa, spec.g)
    return hamiltonian


def build_edge_fermion(spec: ModelSpec, leg: int = 1) -> MajoranaOperator:
    """
    returns a_E = (gamma_hat_0 + i c_2N) / 2, with {a_E, a_E^dagger} = 1 and a_E^2 = 0.
    """
    right = MajoranaOperator.generator(site_index(spec, spec.sites_per_leg, leg))
    return 0.5 * (build_gamma0_normalized(spec, leg) + 1j * right)


def build_chi(spec: ModelSpec, leg_a: int = 1, leg_b: int = 2) -> MajoranaOperator:
    """
    returns chi = (gamma_hat_0,a + i gamma_hat_0,b) / 2; i gamma_hat_0,a gamma_hat_0,b = 2 chi^dagger chi - 1.
    """
    return 0.5 * (build_gamma0_normalized(spec, leg_a) + 1j * build_gamma0_normalized(spec, leg_b))
