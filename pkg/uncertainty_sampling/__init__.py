# flake8: noqa
from .version import __version__
from .base import OutputFormat, Report, RunConfig, Stage
from .diffraction import (
    DiffractionReport, DiffractionSetup, Estimate, crossover_size, detection_probability,
    equivalent_detector_count, momentum_uncertainty, uncertainty_product, unit_probability_product
)
from .landau_pollak import (
    ProjectorPair, Window, band_limited_state, build_projectors, check_chain, check_lp_inequality,
    discretize_packet, state_bound_check
)
from .packets import DomainParams, ElementaryPacket, MomentSet, analytic_moments, eval_packet, kennard_product
from .protocol import (
    MeasurementRecord, ReducedState, SamplingProtocol, StepBasis, decompose, reduce, run_protocol,
    stage_i, stage_ii, stage_iii, stage_iv
)
from .spectral import (
    MomentMethod, QuadratureSpec, SeriesNormalization, SineSeries, TruncatedState, hermitian_moments,
    integrate, packet_moments, position_moments, reconstruct_truncated, sine_coefficients, superpose,
    tail_weight
)
