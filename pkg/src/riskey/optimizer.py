"""Budgeted selection of which RIS units to switch on."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .capacity import FormulaVariant, csk_closed_form, effective_variance
from .channel import SystemParams
from .errors import InvalidParameterError


class Strategy(str, enum.Enum):
    TOP_M = "top_m"
    BEST_PREFIX = "best_prefix"
    RANDOM = "random"


@dataclass(frozen=True)
class SelectionResult:
    switches: np.ndarray
    achieved_x: float
    achieved_csk: float
    strategy: Strategy


def unit_gain(sigma2_ra, sigma2_rb):
    """Cascade variance term ``ra*rb/(ra+rb)`` of one unit (elementwise)."""
    ra = np.asarray(sigma2_ra, dtype=float)
    rb = np.asarray(sigma2_rb, dtype=float)
    if np.any(ra <= 0) or np.any(rb <= 0):
        raise InvalidParameterError("unit variances must be positive")
    out = ra * rb / (ra + rb)
    return float(out) if out.ndim == 0 else out


def _gain_order(gains):
    # stable sort on negated gains: descending, ties keep the lower index first
    return np.argsort(-gains, axis=-1, kind="stable")


def top_m_switches(gains, m):
    """Switch mask with the ``m`` largest gains on; works row-wise on 2-D input."""
    gains = np.asarray(gains, dtype=float)
    order = _gain_order(gains)
    switches = np.zeros(gains.shape, dtype=np.int8)
    np.put_along_axis(switches, order[..., :m], 1, axis=-1)
    return switches


def best_prefix_switches(gains, m, sigma2_ab, rho, variant=FormulaVariant.COMPOSED):
    """Best of the ``m + 1`` top-gain prefixes under the closed-form capacity."""
    gains = np.asarray(gains, dtype=float)
    order = _gain_order(gains)
    sorted_gains = np.take_along_axis(gains, order, axis=-1)[..., :m]
    zero = np.zeros(gains.shape[:-1] + (1,))
    prefix_x = np.asarray(sigma2_ab)[..., None] + np.concatenate(
        [zero, np.cumsum(sorted_gains, axis=-1)], axis=-1
    )
    csk = np.asarray(csk_closed_form(prefix_x, rho, variant))
    # first maximum, i.e. the smallest prefix achieving the best capacity
    best_j = np.argmax(csk, axis=-1)
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(gains.shape[-1]), axis=-1)
    return (ranks < np.asarray(best_j)[..., None]).astype(np.int8)


def random_selection(n, m, rng: np.random.Generator, size=None):
    """Exactly ``m`` of ``n`` units on, uniform over all subsets."""
    if m > n or m < 0:
        raise InvalidParameterError(f"cannot select {m} of {n} units")
    if size is None:
        switches = np.zeros(n, dtype=np.int8)
        switches[rng.choice(n, size=m, replace=False)] = 1
        return switches
    keys = rng.random((size, n))
    picks = np.argsort(keys, axis=-1)[:, :m]
    switches = np.zeros((size, n), dtype=np.int8)
    np.put_along_axis(switches, picks, 1, axis=-1)
    return switches


def select_units(params: SystemParams, strategy=Strategy.TOP_M, rng=None,
                 variant=FormulaVariant.COMPOSED) -> SelectionResult:
    """Choose switches under the budget ``params.budget``.

    ``TOP_M`` turns on the ``M`` units with the largest gain.  ``BEST_PREFIX``
    also considers the smaller top-gain prefixes and keeps whichever gives
    the highest closed-form capacity, since the printed13 variant is not
    monotone in ``x`` once ``rho`` is moderately large.  ``RANDOM`` needs ``rng``.
    """
    strategy = Strategy(strategy)
    if params.budget > params.n_units:
        raise InvalidParameterError(f"budget {params.budget} exceeds n_units {params.n_units}")
    if params.batch_shape:
        raise InvalidParameterError("select_units expects a single placement")
    gains = unit_gain(params.sigma2_ra, params.sigma2_rb)
    if strategy is Strategy.TOP_M:
        switches = top_m_switches(gains, params.budget)
    elif strategy is Strategy.BEST_PREFIX:
        switches = best_prefix_switches(gains, params.budget, params.sigma2_ab, params.rho, variant)
    else:
        if rng is None:
            raise InvalidParameterError("random selection needs an rng")
        switches = random_selection(params.n_units, params.budget, rng)
    x = float(effective_variance(params, switches))
    return SelectionResult(
        switches=switches,
        achieved_x=x,
        achieved_csk=csk_closed_form(x, params.rho, variant),
        strategy=strategy,
    )
