"""Block-fading channel model for the RIS-assisted key generation link.

Every sub-channel is a zero-mean circular complex Gaussian: real and
imaginary parts are independent with half the configured variance each.
Parameters may be batched: ``sigma2_ab`` of shape ``(T,)`` together with
``sigma2_ra``/``sigma2_rb`` of shape ``(T, N)`` describe ``T`` independent
placements, and every function below broadcasts over the leading axis.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .errors import InvalidParameterError

TWO_PI = 2.0 * np.pi


class EveScenario(str, enum.Enum):
    NEAR_NODE = "near_node"
    NEAR_RIS = "near_ris"


def snr_to_power(snr_db):
    """Direct-path variance for a given SNR with unit noise power."""
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Scenario constants for one link (or a batch of placements).

    Attributes
    ----------
    n_units : int
        Number of RIS reflection units ``N``.
    budget : int
        Maximum number of units that may be switched on ``M``.
    rho : float
        Eavesdropper correlation factor in ``[0, 1]``.
    snr_db : float
        Nominal SNR; only used by :meth:`from_snr` and for bookkeeping.
    sigma2_ab : float or ndarray
        Direct Alice-Bob path variance.
    sigma2_ra, sigma2_rb : ndarray
        Per-unit RIS-Alice and RIS-Bob variances, last axis of length ``N``.
    """

    n_units: int
    budget: int
    rho: float
    snr_db: float
    sigma2_ab: float | np.ndarray
    sigma2_ra: np.ndarray
    sigma2_rb: np.ndarray
    wavelength: float = 0.1
    eve_scenario: EveScenario = EveScenario.NEAR_NODE
    noise_power: float = 1.0

    def __post_init__(self):
        sigma2_ra = np.asarray(self.sigma2_ra, dtype=float)
        sigma2_rb = np.asarray(self.sigma2_rb, dtype=float)
        sigma2_ab = np.asarray(self.sigma2_ab, dtype=float)
        object.__setattr__(self, "sigma2_ra", sigma2_ra)
        object.__setattr__(self, "sigma2_rb", sigma2_rb)
        object.__setattr__(self, "sigma2_ab", sigma2_ab[()] if sigma2_ab.ndim == 0 else sigma2_ab)
        object.__setattr__(self, "eve_scenario", EveScenario(self.eve_scenario))

        if int(self.n_units) != self.n_units or self.n_units < 1:
            raise InvalidParameterError(f"n_units must be a positive integer, got {self.n_units}")
        if int(self.budget) != self.budget or self.budget < 1:
            raise InvalidParameterError(f"budget must be a positive integer, got {self.budget}")
        if self.budget > self.n_units:
            raise InvalidParameterError(f"budget {self.budget} exceeds n_units {self.n_units}")
        check_rho(self.rho)
        if self.noise_power != 1.0:
            raise InvalidParameterError("noise_power is fixed at 1.0")
        if not self.wavelength > 0:
            raise InvalidParameterError(f"wavelength must be positive, got {self.wavelength}")
        if sigma2_ra.shape != sigma2_rb.shape or sigma2_ra.shape[-1:] != (self.n_units,):
            raise InvalidParameterError(
                f"per-unit variances must have last axis {self.n_units}, "
                f"got {sigma2_ra.shape} and {sigma2_rb.shape}"
            )
        for name, arr in (("sigma2_ab", sigma2_ab), ("sigma2_ra", sigma2_ra), ("sigma2_rb", sigma2_rb)):
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise InvalidParameterError(f"{name} must be finite and > 0")

    @classmethod
    def from_snr(cls, snr_db, n_units, budget, rho, rng, size=None, **kwargs):
        """Build params with ``sigma2_ab = 10**(snr/10)`` and exponential unit variances.

        Unit variances are i.i.d. exponential with mean ``10**(snr/10) / 2``.
        With ``size`` set, ``size`` independent placements are drawn at once.
        """
        power = float(snr_to_power(snr_db))
        shape = (n_units,) if size is None else (size, n_units)
        sigma2_ra = rng.exponential(power / 2.0, shape)
        sigma2_rb = rng.exponential(power / 2.0, shape)
        # exponential draws can underflow to exactly zero in principle
        tiny = np.finfo(float).tiny
        sigma2_ra = np.maximum(sigma2_ra, tiny)
        sigma2_rb = np.maximum(sigma2_rb, tiny)
        return cls(
            n_units=n_units,
            budget=budget,
            rho=rho,
            snr_db=snr_db,
            sigma2_ab=power,
            sigma2_ra=sigma2_ra,
            sigma2_rb=sigma2_rb,
            **kwargs,
        )

    @property
    def batch_shape(self):
        return self.sigma2_ra.shape[:-1]


@dataclass(frozen=True)
class RisState:
    """On/off switch bits and phase shifts of the RIS units.

    ``phases`` may carry extra leading axes (one phase vector per coherent
    block) as long as the last axis matches ``switches``.
    """

    switches: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        switches = np.asarray(self.switches)
        phases = np.asarray(self.phases, dtype=float)
        if not np.all((switches == 0) | (switches == 1)):
            raise InvalidParameterError("switch values must be 0 or 1")
        if np.any(phases < 0) or np.any(phases >= TWO_PI):
            raise InvalidParameterError("phases must lie in [0, 2*pi)")
        if switches.shape[-1:] != phases.shape[-1:]:
            raise InvalidParameterError("switches and phases disagree on unit count")
        object.__setattr__(self, "switches", switches.astype(np.int8))
        object.__setattr__(self, "phases", phases)

    @classmethod
    def with_random_phases(cls, switches, rng, size=None):
        """Attach uniform phases on ``[0, 2*pi)``, one draw per coherent block."""
        switches = np.asarray(switches)
        n = switches.shape[-1]
        shape = (n,) if size is None else (size, n)
        return cls(switches=switches, phases=rng.uniform(0.0, TWO_PI, shape))

    @property
    def n_units(self):
        return self.switches.shape[-1]

    def check(self, params: SystemParams):
        if self.n_units != params.n_units:
            raise InvalidParameterError(
                f"RIS state has {self.n_units} units, params expect {params.n_units}"
            )
        if np.any(self.switches.sum(axis=-1) > params.budget):
            raise InvalidParameterError(f"more than budget={params.budget} units switched on")


@dataclass(frozen=True)
class ChannelRealization:
    """One coherent-block draw (or a batch of them) of every sub-channel.

    ``h_ab`` serves both link directions; likewise ``h_ar`` and ``h_rb`` are
    reused for the reverse RIS hops.
    """

    h_ab: np.ndarray
    h_ar: np.ndarray
    h_rb: np.ndarray
    h_ae: np.ndarray
    h_be: np.ndarray
    h_re: np.ndarray

    @property
    def n_units(self):
        return self.h_ar.shape[-1]


@dataclass(frozen=True)
class CsiObservation:
    h_a: np.ndarray
    h_b: np.ndarray
    h_ae_obs: np.ndarray
    h_be_obs: np.ndarray


def check_rho(rho):
    if not 0.0 <= rho <= 1.0:
        raise InvalidParameterError(f"rho must be in [0, 1], got {rho}")


def complex_gaussian(rng, variance, shape):
    """Circular complex Gaussian draws with total variance ``variance``."""
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def correlation_from_distance(distance, wavelength):
    """Eavesdropper correlation ``max(J0(2*pi*l/lambda), 0)``.

    Negative lobes of the Bessel function beyond its first zero are treated
    as fully decorrelated.
    """
    if not wavelength > 0:
        raise InvalidParameterError(f"wavelength must be positive, got {wavelength}")
    distance = np.asarray(distance, dtype=float)
    if np.any(distance < 0):
        raise InvalidParameterError("distance must be non-negative")
    rho = np.maximum(special.j0(TWO_PI * distance / wavelength), 0.0)
    return float(rho) if rho.ndim == 0 else rho


def _batch_shape(params, size):
    batch = params.batch_shape
    if size is None:
        return batch
    size = tuple(np.atleast_1d(size))
    if batch and batch != size:
        raise InvalidParameterError(f"size {size} conflicts with batched params {batch}")
    return size


def sample_channel_set(params: SystemParams, rng: np.random.Generator, size=None) -> ChannelRealization:
    """Draw every sub-channel coefficient for one or ``size`` coherent blocks.

    Eavesdropper coefficients are independent placeholders here;
    :func:`correlate_eve_channels` imposes the scenario's correlation.
    """
    batch = _batch_shape(params, size)
    units = batch + (params.n_units,)
    return ChannelRealization(
        h_ab=complex_gaussian(rng, params.sigma2_ab, batch),
        h_ar=complex_gaussian(rng, params.sigma2_ra, units),
        h_rb=complex_gaussian(rng, params.sigma2_rb, units),
        h_ae=complex_gaussian(rng, params.sigma2_ab, batch),
        h_be=complex_gaussian(rng, params.sigma2_ab, batch),
        h_re=complex_gaussian(rng, params.sigma2_ra, units),
    )


def correlate_eve_channels(real: ChannelRealization, params: SystemParams,
                           rng: np.random.Generator) -> ChannelRealization:
    """Impose the eavesdropper's correlation with the legitimate channels.

    NearNode: Eve sits next to Alice, so ``h_be = rho*h_ab + sqrt(1-rho^2)*n``
    and ``h_re_i = rho*h_ar_i + sqrt(1-rho^2)*n_i`` with fresh noise of the
    matching variance; ``h_ae`` stays independent.  NearRis: all of Eve's
    coefficients are redrawn independent of the legitimate link.
    """
    rho = params.rho
    check_rho(rho)
    batch = real.h_ab.shape
    units = real.h_ar.shape
    if params.eve_scenario is EveScenario.NEAR_NODE:
        spread = np.sqrt(1.0 - rho * rho)
        n_be = complex_gaussian(rng, params.sigma2_ab, batch)
        n_re = complex_gaussian(rng, params.sigma2_ra, units)
        return replace(
            real,
            h_ae=complex_gaussian(rng, params.sigma2_ab, batch),
            h_be=rho * real.h_ab + spread * n_be,
            h_re=rho * real.h_ar + spread * n_re,
        )
    return replace(
        real,
        h_ae=complex_gaussian(rng, params.sigma2_ab, batch),
        h_be=complex_gaussian(rng, params.sigma2_ab, batch),
        h_re=complex_gaussian(rng, params.sigma2_ra, units),
    )


def observe_csi(real: ChannelRealization, ris: RisState, params: SystemParams,
                rng: np.random.Generator, noise: bool = True) -> CsiObservation:
    """Noisy least-squares CSI at Alice, Bob and the eavesdropper.

    ``H_A = h_ab + sum_i h_rb_i * w_i * exp(j*phi_i) * h_ar_i + n_A`` and
    analogously for ``H_B``, ``H_AE``, ``H_BE``.  ``noise=False`` drops the
    additive terms (test hook); the rng is then left untouched.
    """
    ris.check(params)
    if real.n_units != params.n_units:
        raise InvalidParameterError(
            f"realization has {real.n_units} units, params expect {params.n_units}"
        )
    reflect = ris.switches * np.exp(1j * ris.phases)
    direct_gain = np.sum(real.h_rb * reflect * real.h_ar, axis=-1)
    alice_eve = np.sum(real.h_ar * reflect * real.h_re, axis=-1)
    bob_eve = np.sum(real.h_rb * reflect * real.h_re, axis=-1)

    h_a = real.h_ab + direct_gain
    h_b = real.h_ab + direct_gain
    h_ae = real.h_ae + alice_eve
    h_be = real.h_be + bob_eve
    if noise:
        shape = h_a.shape
        h_a = h_a + complex_gaussian(rng, params.noise_power, shape)
        h_b = h_b + complex_gaussian(rng, params.noise_power, shape)
        h_ae = h_ae + complex_gaussian(rng, params.noise_power, shape)
        h_be = h_be + complex_gaussian(rng, params.noise_power, shape)
    return CsiObservation(h_a=h_a, h_b=h_b, h_ae_obs=h_ae, h_be_obs=h_be)


def simulate_observations(params: SystemParams, switches, rng: np.random.Generator,
                          size=None, noise: bool = True) -> CsiObservation:
    """Sample channels, correlate Eve, draw phases and observe, in that order."""
    real = sample_channel_set(params, rng, size)
    real = correlate_eve_channels(real, params, rng)
    ris = RisState.with_random_phases(switches, rng, size=real.h_ab.shape[0] if real.h_ab.ndim else None)
    return observe_csi(real, ris, params, rng, noise=noise)


def signal_power(params: SystemParams, switches):
    """Actual variance of the noiseless legitimate CSI under this model.

    The cascade through unit ``i`` is a product of two independent Gaussians,
    so it contributes ``sigma2_ra_i * sigma2_rb_i``; compare with
    :func:`riskey.capacity.effective_variance`.
    """
    switches = np.asarray(switches)
    return params.sigma2_ab + np.sum(switches * params.sigma2_ra * params.sigma2_rb, axis=-1)
