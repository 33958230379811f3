"""
The four-stage sampling protocol on the prepared packet ``psi_{n,1}``.

A row of ``N`` detectors partitions the box into slices. Stage (i) accepts
every event; stage (ii) keeps only the events in slice ``l0``; stage (iii)
looks at the reduced state on its own; stage (iv) follows the reduction with
a selective momentum measurement that returns to ``psi_{n,1}``.

.. code-block:: python

    from uncertainty_sampling import run_protocol

    for record in run_protocol(n=10, N=200, l0=80):
        print(record.stage.value, record.U, record.P)
"""
from collections import namedtuple
from dataclasses import dataclass
from functools import cached_property
import logging
import math

import numpy as np

from uncertainty_sampling.base import Report, Stage
from uncertainty_sampling.exceptions import NodeSliceException, ParameterException
from uncertainty_sampling.packets import ElementaryPacket, analytic_moments, eval_packet, require_integer
from uncertainty_sampling.spectral import (
    QuadratureSpec, SeriesNormalization, hermitian_moments, position_moments,
    reconstruct_truncated, sine_coefficients
)

logger = logging.getLogger(__name__)

# smallest slice weight B that is not treated as a node of the packet
NODE_TOLERANCE = 1e-15

# hbar / 2, which a state on its own can never beat
KENNARD_BOUND = 0.5

ProtocolParams = namedtuple('ProtocolParams', ['n', 'N', 'l0', 'kmax'])


def _require_prepared(packet):
    if packet.k != 1:
        raise ParameterException('The protocol starts from psi_{{n,1}}, got k={0}'.format(packet.k))


def _one_minus_sinc(u):
    # 1 - sin(u)/u; the Taylor sum takes over where the subtraction would cancel
    if u >= 0.1:
        return 1.0 - math.sin(u) / u
    u2 = u * u
    return u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0 * (1.0 - u2 / 110.0))))


def _slice_weights(N, l):
    """
    N times the integral of 2 sin^2(pi x) over [(l-1)/N, l/N].

    Written as ``(1 - sinc u) + sinc u * 2 sin^2(theta/2)`` with ``u = pi/N``
    and ``theta = pi (2l-1)/N``, so both terms are non-negative and edge
    slices keep full relative precision. The slice mirrored about the centre
    has the same weight, which keeps ``theta/2`` away from ``pi``.
    """
    l = np.asarray(l)
    u = math.pi / N
    sinc = math.sin(u) / u
    mirrored = np.minimum(2 * l - 1, 2 * N - 2 * l + 1)
    half_angle = np.sin(math.pi * mirrored / (2.0 * N))
    return _one_minus_sinc(u) + sinc * 2.0 * half_angle ** 2


class StepBasis(object):
    """
    The normalized step functions ``u_l = sqrt(N)`` on ``[(l-1)/N, l/N]``
    """

    def __init__(self, N):
        self.N = require_integer(N, 'N', minimum=1)

    @property
    def edges(self):
        return np.arange(self.N + 1) / self.N

    def check_slice(self, l):
        l = require_integer(l, 'l0')
        if not 1 <= l <= self.N:
            raise ParameterException('l0 must be between 1 and N={0}, got {1}'.format(self.N, l))
        return l

    def slice_bounds(self, l):
        l = self.check_slice(l)
        return (l - 1) / self.N, l / self.N

    def u(self, l, xbar):
        lower, upper = self.slice_bounds(l)
        x = np.asarray(xbar, dtype=float)
        return np.where((x >= lower) & (x <= upper), math.sqrt(self.N), 0.0)

    def weights(self):
        """
        ``B_l`` for every slice ``l = 1..N`` of the prepared packet

        :rtype: numpy.ndarray
        """
        return _slice_weights(self.N, np.arange(1, self.N + 1))


class ReducedState(object):
    """
    The state ``psi u_l0 / sqrt(B)`` left after detector ``l0`` fired
    """

    def __init__(self, source, N, l0):
        _require_prepared(source)
        self.basis = StepBasis(N)
        self.l0 = self.basis.check_slice(l0)
        self.N = self.basis.N
        self.source = source
        self.B = float(_slice_weights(self.N, self.l0))
        if self.B < NODE_TOLERANCE:
            raise NodeSliceException(
                'Slice {0} of {1} sits on a node of the packet (B={2:.3g})'.format(self.l0, self.N, self.B))

    @property
    def c(self):
        return math.sqrt(self.B / self.N)

    @property
    def probability(self):
        return self.B / self.N

    @property
    def interval(self):
        return self.basis.slice_bounds(self.l0)

    def __call__(self, xbar):
        return eval_packet(self.source, xbar) * self.basis.u(self.l0, xbar) / math.sqrt(self.B)

    def density(self, xbar):
        return np.abs(self(xbar)) ** 2

    def position_moments(self, spec=None):
        return position_moments(self.density, spec, support=self.interval)

    def __repr__(self):
        return 'ReducedState(n={0}, N={1}, l0={2}, B={3!r})'.format(self.source.n, self.N, self.l0, self.B)


@dataclass(frozen=True)
class MeasurementRecord(Report):
    """
    The uncertainty product ``U`` and relative probability ``P`` of one stage
    """
    stage: Stage
    U: float
    P: float
    params: ProtocolParams
    approx: bool = False
    cumulative_P: float = None

    def __post_init__(self):
        if not self.U > 0:
            raise ParameterException('An uncertainty product must be positive, got {0!r}'.format(self.U))
        if not 0 < self.P <= 1:
            raise ParameterException('A relative probability must lie in (0, 1], got {0!r}'.format(self.P))

    def to_dict(self):
        return {
            'stage': self.stage.value,
            'U': self.U,
            'P': self.P,
            'params': dict(self.params._asdict()),
            'approx': self.approx,
            'cumulative_P': self.cumulative_P,
        }

    @classmethod
    def from_dict(cls, data):
        """
        Rebuild a record from :meth:`to_dict` output, e.g. a parsed JSON line
        """
        return cls(
            stage=Stage(data['stage']),
            U=data['U'],
            P=data['P'],
            params=ProtocolParams(**data['params']),
            approx=data.get('approx', False),
            cumulative_P=data.get('cumulative_P'),
        )


def decompose(packet, N):
    """
    Expand the prepared packet in the step basis

    :param packet: The prepared packet, ``k = 1``
    :type packet: :class:`ElementaryPacket <uncertainty_sampling.packets.ElementaryPacket>`

    :param N: The detector count
    :type N: int

    :returns: ``(c_l, B_l)`` for ``l = 1..N``
    :rtype: list of tuple

    :raises: A :class:`ParameterException <uncertainty_sampling.exceptions.ParameterException>`
        for ``N < 1`` or a packet with ``k != 1``
    """
    _require_prepared(packet)
    basis = StepBasis(N)
    weights = basis.weights()
    amplitudes = np.sqrt(weights / basis.N)
    return list(zip(amplitudes.tolist(), weights.tolist()))


def reduce(packet, N, l0):
    """
    The state after the detector on slice ``l0`` fired

    :rtype: :class:`ReducedState <uncertainty_sampling.protocol.ReducedState>`

    :raises: A :class:`NodeSliceException <uncertainty_sampling.exceptions.NodeSliceException>`
        when the slice carries no weight of the packet
    """
    return ReducedState(packet, N, l0)


class SamplingProtocol(object):
    """
    One protocol run for a prepared packet, detector count and fired slice.

    The reduced state, its moments and its sine series are computed once and
    shared between the stages.
    """

    def __init__(self, packet, N, l0, kmax=None, spec=None,
                 normalization=SeriesNormalization.MIXED.value):
        """
        :param packet: The prepared packet ``psi_{n,1}``
        :type packet: :class:`ElementaryPacket <uncertainty_sampling.packets.ElementaryPacket>`

        :param N: The detector count
        :type N: int

        :param l0: The slice whose detector fired, counted from 1 at ``x = 0``
        :type l0: int

        :param kmax: The sine-series cutoff. Defaults to ``4 * N``
        :type kmax: int

        :param spec: Quadrature for the position moments
        :type spec: :class:`QuadratureSpec <uncertainty_sampling.spectral.QuadratureSpec>`

        :param normalization: How the truncated series is normalized
        :type normalization: str

        :raises: A :class:`ParameterException <uncertainty_sampling.exceptions.ParameterException>`
            for out-of-range integers
        """
        self.reduced = reduce(packet, N, l0)
        self.packet = packet
        self.kmax = 4 * self.reduced.N if kmax is None else require_integer(kmax, 'kmax', minimum=1)
        self.spec = spec or QuadratureSpec()
        self.normalization = SeriesNormalization(normalization)
        self.params = ProtocolParams(packet.n, self.reduced.N, self.reduced.l0, self.kmax)

    @cached_property
    def prepared_moments(self):
        return analytic_moments(self.packet)

    @cached_property
    def reduced_moments(self):
        return self.reduced.position_moments(self.spec)

    @cached_property
    def series(self):
        return sine_coefficients(self.reduced, self.kmax)

    @cached_property
    def series_moments(self):
        return hermitian_moments(self.series, normalization=self.normalization.value)

    def truncated_moments(self):
        """
        Position moments of the state rebuilt from the cut-off series
        """
        state = reconstruct_truncated(self.series)
        return position_moments(state.density, self.spec)

    def stage_i(self):
        U = self.prepared_moments.product
        logger.info('Stage i: U=%.6g, P=1', U)
        return MeasurementRecord(stage=Stage.I, U=U, P=1.0, params=self.params)

    def stage_ii(self):
        U = self.prepared_moments.sd_p * self.reduced_moments.sd_x
        logger.info('Stage ii: U=%.6g, P=%.6g', U, self.reduced.probability)
        return MeasurementRecord(stage=Stage.II, U=U, P=self.reduced.probability, params=self.params)

    def stage_iii(self):
        """
        The reduced state measured on its own, with ``P = 1``

        :raises: A :class:`ParameterException <uncertainty_sampling.exceptions.ParameterException>`
            when the cutoff is too low to resolve the slice, so the cut-off series
            gives a product below the Kennard bound
        """
        U = self.series_moments.sd_p * self.reduced_moments.sd_x
        if U < KENNARD_BOUND:
            raise ParameterException(
                'kmax={0} does not resolve a slice of width 1/{1}: stage iii gives U={2:.4g} < 1/2; '
                'use a cutoff of several times N'.format(self.kmax, self.reduced.N, U))
        logger.info('Stage iii: U=%.6g with kmax=%d, P=1', U, self.kmax)
        return MeasurementRecord(stage=Stage.III, U=U, P=1.0, params=self.params)

    def stage_iv(self):
        U = self.prepared_moments.sd_p * self.reduced_moments.sd_x
        P = min(float(abs(self.series.coeffs[0]) ** 2), 1.0)
        cumulative = self.reduced.probability * P
        logger.info('Stage iv: U=%.6g, P~%.6g, two-step P=%.6g', U, P, cumulative)
        return MeasurementRecord(
            stage=Stage.IV, U=U, P=P, params=self.params, approx=True, cumulative_P=cumulative)

    def run(self):
        """
        :returns: The records of stages i to iv, in order
        :rtype: list of :class:`MeasurementRecord <uncertainty_sampling.protocol.MeasurementRecord>`
        """
        logger.info('Running the protocol for n=%d, N=%d, l0=%d, kmax=%d', *self.params)
        return [self.stage_i(), self.stage_ii(), self.stage_iii(), self.stage_iv()]


def stage_i(packet):
    """
    Every event is accepted: the prepared packet's own product, with ``P = 1``
    """
    _require_prepared(packet)
    U = analytic_moments(packet).product
    return MeasurementRecord(stage=Stage.I, U=U, P=1.0, params=ProtocolParams(packet.n, None, None, None))


def stage_ii(packet, N, l0, spec=None):
    return SamplingProtocol(packet, N, l0, spec=spec).stage_ii()


def stage_iii(packet, N, l0, kmax=None, spec=None, normalization=SeriesNormalization.MIXED.value):
    return SamplingProtocol(packet, N, l0, kmax, spec, normalization).stage_iii()


def stage_iv(packet, N, l0, spec=None):
    return SamplingProtocol(packet, N, l0, spec=spec).stage_iv()


def run_protocol(n, N, l0, kmax=None, spec=None, normalization=SeriesNormalization.MIXED.value):
    """
    Run all four stages for ``psi_{n,1}``

    :param n: The Bloch index of the prepared packet
    :type n: int

    :param N: The detector count
    :type N: int

    :param l0: The fired slice
    :type l0: int

    :param kmax: The sine-series cutoff. Defaults to ``4 * N``
    :type kmax: int

    :rtype: list of :class:`MeasurementRecord <uncertainty_sampling.protocol.MeasurementRecord>`
    """
    return SamplingProtocol(ElementaryPacket(n=n, k=1), N, l0, kmax, spec, normalization).run()
