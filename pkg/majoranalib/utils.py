"""

This module contains pure, stateless helper functions that don't depend on any operator.
They handle site bitmasks, reordering signs, geometric sums, number formatting and
small curve fits.

"""
import math
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from . import constants
from .types import Real, SiteMask


def sites_to_mask(sites: Iterable[int]) -> SiteMask:
    """
    returns the bitmask of a collection of distinct site indices.
    Raises ValueError on repeated or out-of-range sites.

    """
    mask = 0
    for site in sites:
        site = int(site)
        if site < constants.MIN_SITE or site > constants.MAX_SITES:
            raise ValueError(
                f'site must be in range [{constants.MIN_SITE}, {constants.MAX_SITES}]; got {site}.')
        bit = 1 << (site - 1)
        if mask & bit:
            raise ValueError(f'site {site} appears twice; a SiteSet holds distinct sites.')
        mask |= bit
    return mask


def mask_to_sites(mask: SiteMask) -> Tuple[int, ...]:
    """
    returns the strictly increasing site tuple encoded by mask.
    """
    sites = []
    while mask:
        low = mask & -mask
        sites.append(low.bit_length())
        mask ^= low
    return tuple(sites)


def mask_size(mask: SiteMask) -> int:
    return mask.bit_count()


def max_site(mask: SiteMask) -> int:
    """
    returns the largest site in mask, 0 for the identity.
    """
    return mask.bit_length()


def _reorder_sign(left: SiteMask, right: SiteMask) -> int:
    """
    returns the sign picked up when the product c_left c_right is merge-sorted into
    ascending order. Each generator of right has to pass every generator of left with a
    larger index; squares c_i c_i = 1 then cancel without further sign.

    """
    count = 0
    while right:
        low = right & -right
        count += (left >> low.bit_length()).bit_count()
        right ^= low
    return -1 if count & 1 else 1


def _commutation_sign(left: SiteMask, right: SiteMask) -> int:
    """
    returns s with c_left c_right = s c_right c_left.
    """
    exponent = left.bit_count() * right.bit_count() - (left & right).bit_count()
    return -1 if exponent & 1 else 1


def geometric_norm_sq(kappa: Real, terms: int) -> float:
    """
    returns sum_{l=0}^{terms-1} kappa^(2l), the squared coefficient norm of
    sum_l kappa^l c_(2l+1).

    """
    if terms <= 0:
        return 0.0
    kappa_sq = float(kappa) ** 2
    if kappa_sq == 1.0:
        return float(terms)
    return (1 - kappa_sq ** terms) / (1 - kappa_sq)


def gamma0_normalization(kappa: Real, n_sites: int) -> float:
    """
    returns sqrt((1 - kappa^2) / (1 - kappa^(2N))), the factor turning gamma_0 into a unit Majorana.
    """
    return 1.0 / math.sqrt(geometric_norm_sq(kappa, n_sites))


def format_float(value: Real) -> str:
    """
    formats a number with the CSV precision, so repeated runs are byte-identical.
    """
    # + 0.0 folds -0.0 into 0.0
    return format(float(value) + 0.0, f'.{constants.CSV_DIGITS}g')


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float, float]:
    """
    returns (slope, intercept, r_squared) of the least-squares line through (xs, ys).
    Raises ValueError with fewer than two points.

    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 2:
        raise ValueError(f'a line fit needs at least two points; got {x.size}.')
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    spread = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if spread == 0.0 else 1.0 - float(np.sum(residual ** 2)) / spread
    return float(slope), float(intercept), r_squared


def loglog_slope(xs: Sequence[float], ys: Sequence[float],
                 floor: float = 0.0) -> Optional[float]:
    """
    returns the slope of log|y| against log|x| over the points with |x| > 0 and |y| > floor,
    or None when fewer than two such points exist.

    """
    points = [(math.log(abs(x)), math.log(abs(y)))
              for x, y in zip(xs, ys) if abs(x) > 0 and abs(y) > floor]
    if len(points) < 2:
        return None
    slope, _, _ = fit_line([p[0] for p in points], [p[1] for p in points])
    return slope


def linspace_grid(g_min: Real, g_max: Real, points: int) -> Tuple[float, ...]:
    """
    returns an inclusive grid of `points` couplings between g_min and g_max.
    """
    if points < 1:
        raise ValueError(f'points must be at least 1; got {points}.')
    if points == 1:
        return (float(g_min),)
    return tuple(float(g) for g in np.linspace(g_min, g_max, points))
