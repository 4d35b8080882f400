"""Simulation and analysis of RIS-assisted physical-layer secret key generation."""
from .capacity import (
    CapacityReport,
    FormulaVariant,
    capacity_report,
    covariance_determinants,
    csk_closed_form,
    csk_independent_eve,
    csk_near_node_exact,
    effective_variance,
    gaussian_cmi_from_samples,
)
from .channel import (
    ChannelRealization,
    CsiObservation,
    EveScenario,
    RisState,
    SystemParams,
    correlate_eve_channels,
    correlation_from_distance,
    observe_csi,
    sample_channel_set,
    simulate_observations,
)
from .errors import DegenerateQuantizerError, InsufficientDataError, InvalidParameterError
from .harness import ExperimentConfig, Mode, SweepRow, run_capacity_sweep, run_key_experiment
from .keys import BitSequence, QuantizerSpec, fit_quantizer, gray_quantize, unmatched_key_rate
from .nist import TestKind, TestReport, berlekamp_massey, run_nist_test, run_suite
from .optimizer import SelectionResult, Strategy, random_selection, select_units, unit_gain

__version__ = "0.1.0"
