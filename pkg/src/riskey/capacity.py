"""Secret key capacity: closed forms and a sample-covariance estimator.

All capacities are in bits per channel use and assume unit noise power.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import SystemParams, check_rho
from .errors import InvalidParameterError

DET_FLOOR = 1e-12
# relative diagonal loading; keeps exactly collinear observations from
# collapsing every determinant onto the floor (0/0)
DIAG_LOADING = 1e-9
MIN_CMI_SAMPLES = 1000


class FormulaVariant(str, enum.Enum):
    PRINTED13 = "printed13"
    COMPOSED = "composed"


@dataclass(frozen=True)
class CapacityReport:
    x: float
    csk_bits: float
    det_e: float
    det_joint3: float
    det_pair: float
    variant: FormulaVariant


def effective_variance(params: SystemParams, switches):
    """Useful signal variance ``sigma2_ab + sum_i w_i * g_i``.

    ``g_i = sigma2_ra_i * sigma2_rb_i / (sigma2_ra_i + sigma2_rb_i)`` is the
    per-unit gain used by the optimizer.
    """
    switches = np.asarray(switches, dtype=float)
    if switches.shape[-1] != params.n_units:
        raise InvalidParameterError(
            f"got {switches.shape[-1]} switches for {params.n_units} units"
        )
    ra, rb = params.sigma2_ra, params.sigma2_rb
    gains = ra * rb / (ra + rb)
    return params.sigma2_ab + np.sum(switches**2 * gains, axis=-1)


def covariance_determinants(x, rho):
    """Return ``(det_e, det_joint3, det_pair)`` for effective variance ``x``."""
    x = np.asarray(x, dtype=float)
    det_e = rho * x + 1.0
    det_joint3 = (rho**2 + 2.0) * x + 1.0
    det_pair = (rho**2 + 1.0) * x + 1.0
    return det_e, det_joint3, det_pair


def csk_closed_form(x, rho, variant=FormulaVariant.COMPOSED):
    """Closed-form capacity with a correlated eavesdropper next to Alice.

    ``COMPOSED`` takes ``log2(det_pair**2 / (det_e * det_joint3))``;
    ``PRINTED13`` uses the published rational function, whose linear
    numerator coefficient is ``2*rho**2 + 4*rho + 2`` instead of
    ``2*rho**2 + 2``.  Both are clamped at zero.  Works elementwise on ``x``.
    """
    variant = FormulaVariant(variant)
    check_rho(rho)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidParameterError("x must be non-negative")
    if variant is FormulaVariant.COMPOSED:
        det_e, det_joint3, det_pair = covariance_determinants(x, rho)
        ratio = det_pair**2 / (det_e * det_joint3)
    else:
        r2 = rho * rho
        num = (r2 * r2 + 2 * r2 + 1) * x**2 + (2 * r2 + 4 * rho + 2) * x + 1
        den = (r2 * rho + 2 * rho) * x**2 + (r2 + rho + 2) * x + 1
        ratio = num / den
    out = np.maximum(np.log2(ratio), 0.0)
    return float(out) if out.ndim == 0 else out


def csk_independent_eve(x):
    """``I(H_A; H_B) = log2((x+1)^2 / (2x+1))`` when Eve learns nothing."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidParameterError("x must be non-negative")
    out = np.log2((x + 1.0) ** 2 / (2.0 * x + 1.0))
    return float(out) if out.ndim == 0 else out


def csk_near_node_exact(x, rho):
    """Exact conditional mutual information ``I(H_A; H_B | H_BE)``.

    Evaluated for the simulated NearNode model, where ``H_A = s + n_A``,
    ``H_B = s + n_B`` and ``H_BE = rho*s + sqrt(1-rho^2)*w + n_BE`` with
    ``var(s) = var(w) = x`` and unit noise.  Used as a diagnostic against
    both closed-form variants.
    """
    check_rho(rho)
    x = np.asarray(x, dtype=float)
    c2 = (rho * x) ** 2
    det_pair = (x + 1.0) ** 2 - c2
    det_joint3 = (x + 1.0) * (2.0 * x + 1.0) - 2.0 * c2
    out = np.maximum(np.log2(det_pair**2 / ((x + 1.0) * det_joint3)), 0.0)
    return float(out) if out.ndim == 0 else out


def capacity_report(params: SystemParams, switches, variant=FormulaVariant.COMPOSED) -> CapacityReport:
    x = float(effective_variance(params, switches))
    det_e, det_joint3, det_pair = covariance_determinants(x, params.rho)
    return CapacityReport(
        x=x,
        csk_bits=csk_closed_form(x, params.rho, variant),
        det_e=float(det_e),
        det_joint3=float(det_joint3),
        det_pair=float(det_pair),
        variant=FormulaVariant(variant),
    )


def _logdet(cov):
    cov = cov + DIAG_LOADING * np.trace(cov).real / len(cov) * np.eye(len(cov))
    det = np.linalg.det(cov).real
    return np.log2(max(det, DET_FLOOR))


def gaussian_cmi_from_samples(h_a, h_b=None, h_be=None):
    """Estimate ``I(H_A; H_B | H_BE)`` from zero-mean complex samples.

    Accepts three equal-length arrays or a single ``(n, 3)`` array of
    triples.  Covariances are averaged outer products (no demeaning); the
    result is clamped at zero.
    """
    if h_b is None and h_be is None:
        triples = np.asarray(h_a)
        if triples.ndim != 2 or triples.shape[1] != 3:
            raise InvalidParameterError("expected an (n, 3) array of observation triples")
    else:
        triples = np.column_stack([np.ravel(h_a), np.ravel(h_b), np.ravel(h_be)])
    n = triples.shape[0]
    if n < MIN_CMI_SAMPLES:
        raise InvalidParameterError(f"need at least {MIN_CMI_SAMPLES} samples, got {n}")

    cov = triples.T @ triples.conj() / n
    a_e = _logdet(cov[np.ix_([0, 2], [0, 2])])
    b_e = _logdet(cov[np.ix_([1, 2], [1, 2])])
    e = _logdet(cov[2:, 2:])
    abe = _logdet(cov)
    return max(a_e + b_e - e - abe, 0.0)
