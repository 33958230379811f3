"""
Quadrature and sine-series machinery for expectation values.

Momentum moments of step-truncated states are never taken from pointwise
derivatives: the state is expanded in the elementary packets
``psi_{n,k}``, the series is cut off at ``kmax``, and the symmetrised
(hermitian) forms of the first and second derivative are evaluated on the
series, either by closed-form sums over coefficient pairs or by composite
quadrature of the synthesised series.

.. code-block:: python

    from uncertainty_sampling import QuadratureSpec, SineSeries, hermitian_moments

    series = SineSeries.single(n=10, k=1)
    hermitian_moments(series).sd_p                                  # pi
    hermitian_moments(series, QuadratureSpec(10000), method='quadrature').sd_p
"""
from dataclasses import dataclass
from enum import Enum
import logging
import math

import numpy as np
from scipy.fft import dct, dst
from scipy.integrate import simpson

from uncertainty_sampling.exceptions import (
    ConfigurationException, NormalizationException, ParameterException
)
from uncertainty_sampling.packets import PHASE_FACTOR, DomainParams, MomentSet, eval_packet

logger = logging.getLogger(__name__)

DEFAULT_PANELS = 100000

# points per block when a truncated series is summed directly
_BLOCK = 4096


class QuadratureRule(Enum):
    SIMPSON = 'simpson'


class MomentMethod(Enum):
    CLOSED_FORM = 'closed-form'
    QUADRATURE = 'quadrature'


class SeriesNormalization(Enum):
    """
    How the moments of a truncated series are normalized.

    ``MIXED`` takes the matrix element between the exact state (whose
    projection on the first ``kmax`` packets is the series) and the normalized
    truncated state, which scales the moments by ``1/sqrt(S)`` with
    ``S = sum |a_k|^2``. ``TRUNCATED`` normalizes both sides (``1/S``) and
    ``NONE`` leaves the sums as they are. For a normalized series all three
    agree.
    """
    MIXED = 'mixed'
    TRUNCATED = 'truncated'
    NONE = 'none'

    def scale(self, norm_squared):
        if self is SeriesNormalization.MIXED:
            return 1.0 / math.sqrt(norm_squared)
        if self is SeriesNormalization.TRUNCATED:
            return 1.0 / norm_squared
        return 1.0


class QuadratureSpec(object):
    """
    A composite quadrature rule with ``panels`` uniform subintervals
    """
    min_panels = 100

    def __init__(self, panels=DEFAULT_PANELS, rule=QuadratureRule.SIMPSON.value):
        """
        :param panels: Number of uniform subintervals of the integration
            interval. Must be even and at least 100
        :type panels: int

        :param rule: The composite rule. Only 'simpson' is available
        :type rule: str

        :raises: A :class:`ConfigurationException <uncertainty_sampling.exceptions.ConfigurationException>`
            for odd or too small panel counts and unknown rules
        """
        if isinstance(panels, bool) or int(panels) != panels:
            raise ConfigurationException('panels must be an integer, got {0!r}'.format(panels))
        if panels < self.min_panels or panels % 2:
            raise ConfigurationException(
                'panels must be even and at least {0}, got {1}'.format(self.min_panels, panels))
        try:
            self.rule = QuadratureRule(rule)
        except ValueError:
            raise ConfigurationException("rule must be 'simpson'")
        self.panels = int(panels)

    def nodes(self, interval=(0.0, 1.0)):
        start, stop = interval
        return np.linspace(start, stop, self.panels + 1)

    def step(self, interval=(0.0, 1.0)):
        start, stop = interval
        return (stop - start) / self.panels

    def __repr__(self):
        return 'QuadratureSpec(panels={0}, rule={1!r})'.format(self.panels, self.rule.value)


def _simpson(values, spec, interval=(0.0, 1.0)):
    h = spec.step(interval)
    if np.iscomplexobj(values):
        return complex(simpson(values.real, dx=h), simpson(values.imag, dx=h))
    return float(simpson(values, dx=h))


def integrate(f, spec=None, interval=(0.0, 1.0)):
    """
    Integrate ``f`` with the composite rule of ``spec``

    :param f: A vectorised function of position; complex values are allowed
    :type f: callable

    :param spec: The quadrature rule. Defaults to 10**5 Simpson panels
    :type spec: :class:`QuadratureSpec <uncertainty_sampling.spectral.QuadratureSpec>`

    :param interval: Integration limits. Defaults to the unit interval
    :type interval: tuple of float

    :returns: The integral, complex when ``f`` is complex-valued
    :rtype: float or complex

    :raises: A :class:`ParameterException <uncertainty_sampling.exceptions.ParameterException>`
        when ``f`` is not finite on the interval
    """
    spec = spec or QuadratureSpec()
    x = spec.nodes(interval)
    values = np.broadcast_to(np.asarray(f(x)), x.shape)
    if not np.all(np.isfinite(values)):
        raise ParameterException('The integrand is not finite on {0}'.format(interval))
    logger.debug('Applying composite %s rule with %d panels on [%g, %g]',
                 spec.rule.value, spec.panels, interval[0], interval[1])
    return _simpson(values, spec, interval)


@dataclass(frozen=True, eq=False)
class SineSeries(object):
    """
    Coefficients ``a_1 .. a_kmax`` of an expansion in the packets ``psi_{n,k}``
    """
    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ParameterException('A sine series needs at least one coefficient')
        if np.sum(np.abs(coeffs) ** 2) > 1.0 + 1e-12:
            raise NormalizationException('The coefficients carry more than unit weight')
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def single(cls, n, k=1):
        """
        The series of the elementary packet ``psi_{n,k}`` itself
        """
        coeffs = np.zeros(k, dtype=complex)
        coeffs[k - 1] = 1.0
        return cls(n=n, coeffs=coeffs)

    @property
    def kmax(self):
        return self.coeffs.size

    @property
    def k(self):
        return np.arange(1, self.kmax + 1)

    @property
    def norm_squared(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def truncated(self, kmax):
        if kmax < 1:
            raise ParameterException('kmax must be at least 1')
        return SineSeries(n=self.n, coeffs=self.coeffs[:kmax])


def superpose(n, coeffs):
    """
    The normalized superposition ``sum_k c_k psi_{n,k}`` as a series

    :param coeffs: Unnormalized complex weights for ``k = 1, 2, ...``
    :type coeffs: sequence of complex

    :rtype: :class:`SineSeries <uncertainty_sampling.spectral.SineSeries>`
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    norm = np.sqrt(np.sum(np.abs(coeffs) ** 2))
    if norm == 0:
        raise NormalizationException('Cannot normalize an all-zero superposition')
    return SineSeries(n=n, coeffs=coeffs / norm)


def tail_weight(series):
    """
    The weight ``1 - sum |a_k|^2`` the cutoff drops from a normalized state

    :rtype: float
    """
    return 1.0 - series.norm_squared


def _first_derivative_matrix(kmax):
    # <sin(j pi x) | d/dx sin(k pi x)> on [0, 1]; antisymmetric
    j, k = np.meshgrid(np.arange(1, kmax + 1), np.arange(1, kmax + 1), indexing='ij')
    odd = (j + k) % 2 == 1
    denominator = np.where(odd, j ** 2 - k ** 2, 1)
    return np.where(odd, 2.0 * j * k / denominator, 0.0)


def _sine_synthesis(values, panels):
    # sum_k values[k-1] sin(k pi x_j) at x_j = j / panels, j = 0..panels
    padded = np.zeros(panels - 1)
    padded[:values.size] = values
    out = np.zeros(panels + 1)
    out[1:-1] = 0.5 * dst(padded, type=1)
    return out


def _cosine_synthesis(values, panels):
    # sum_k values[k-1] cos(k pi x_j) at x_j = j / panels, j = 0..panels
    padded = np.zeros(panels + 1)
    padded[1:values.size + 1] = values
    return 0.5 * dct(padded, type=1)


def _synthesize(transform, values, panels):
    return transform(values.real, panels) + 1j * transform(values.imag, panels)


def _phi_moments_closed_form(series):
    a = series.coeffs
    k = series.k
    norm_squared = series.norm_squared
    p2 = math.pi ** 2 * float(np.sum(k ** 2 * np.abs(a) ** 2))
    if np.any(a.imag != 0):
        p1 = 2.0 * float(np.imag(np.vdot(a, _first_derivative_matrix(series.kmax) @ a)))
    else:
        p1 = 0.0
    return norm_squared, p1, p2


def _phi_moments_quadrature(series, spec):
    if series.kmax >= spec.panels:
        raise ParameterException(
            'The quadrature needs more panels ({0}) than the cutoff ({1})'.format(spec.panels, series.kmax))
    a = series.coeffs
    wavenumber = math.pi * series.k
    g = _synthesize(_sine_synthesis, a, spec.panels)
    dg = _synthesize(_cosine_synthesis, a * wavenumber, spec.panels)
    d2g = _synthesize(_sine_synthesis, -a * wavenumber ** 2, spec.panels)
    # |2i/sqrt(2)|^2 = 2 multiplies every bilinear form of the series
    norm_squared = 2.0 * _simpson(np.abs(g) ** 2, spec)
    first = 2.0 * _simpson(np.conj(g) * dg, spec)
    second = 2.0 * _simpson(np.conj(g) * d2g, spec)
    p1 = (first - np.conj(first)).imag / 2.0
    p2 = -(second + np.conj(second)).real / 2.0
    return norm_squared, p1, p2


def hermitian_moments(series, spec=None, method=MomentMethod.CLOSED_FORM.value,
                      normalization=SeriesNormalization.MIXED.value):
    """
    Momentum moments of the state ``sum_k a_k psi_{n,k}``.

    Writing the state as ``exp(i p_n x) varphi(x)``, the mean is
    ``p_n + <p>_varphi`` and the second moment
    ``p_n^2 + 2 p_n <p>_varphi + <p^2>_varphi``, with the symmetrised forms
    ``<p>_varphi = [<varphi|varphi'> - h.c.] / 2i`` and
    ``<p^2>_varphi = -[<varphi|varphi''> + h.c.] / 2``. The deviation is
    ``sqrt(<p^2>_varphi - <p>_varphi^2)``.

    :param series: The truncated expansion
    :type series: :class:`SineSeries <uncertainty_sampling.spectral.SineSeries>`

    :param spec: Quadrature rule for the 'quadrature' method
    :type spec: :class:`QuadratureSpec <uncertainty_sampling.spectral.QuadratureSpec>`

    :param method: 'closed-form' (sums over coefficient pairs) or 'quadrature'
    :type method: str

    :param normalization: 'mixed', 'truncated' or 'none'. See
        :class:`SeriesNormalization <uncertainty_sampling.spectral.SeriesNormalization>`
    :type normalization: str

    :returns: The momentum entries of a moment set
    :rtype: :class:`MomentSet <uncertainty_sampling.packets.MomentSet>`

    :raises: A :class:`NormalizationException <uncertainty_sampling.exceptions.NormalizationException>`
        for an all-zero series
    """
    method = MomentMethod(method)
    normalization = SeriesNormalization(normalization)
    if not np.any(series.coeffs):
        raise NormalizationException('Cannot take moments of an all-zero series')

    if method is MomentMethod.CLOSED_FORM:
        norm_squared, p1, p2 = _phi_moments_closed_form(series)
    else:
        norm_squared, p1, p2 = _phi_moments_quadrature(series, spec or QuadratureSpec())

    scale = normalization.scale(norm_squared)
    p1 *= scale
    p2 *= scale
    p_n = math.pi * series.n
    logger.debug('Momentum moments by %s with kmax=%d: weight %.12g, <p^2>_phi %.12g',
                 method.value, series.kmax, norm_squared, p2)
    return MomentSet.momentum(
        mean_p=p_n + p1,
        mean_p2=p_n ** 2 + 2.0 * p_n * p1 + p2,
        sd_p=math.sqrt(max(p2 - p1 ** 2, 0.0)),
    )


def _cosine_integrals(m, lower, upper):
    # integral of cos(m pi x) over [lower, upper], as 2 cos(m pi c) sin(m pi h) / (m pi)
    centre = 0.5 * (lower + upper)
    half = 0.5 * (upper - lower)
    out = np.full(m.shape, upper - lower)
    wavenumber = math.pi * m[m > 0]
    out[m > 0] = 2.0 * np.cos(wavenumber * centre) * np.sin(wavenumber * half) / wavenumber
    return out


def sine_coefficients(reduced, kmax=None):
    """
    Expand a reduced state in the packets ``psi_{n,k}``, ``k = 1..kmax``.

    The Bloch phases cancel in ``a_k = <psi_{n,k}|phi_l0>``, which leaves
    ``sqrt(N/B) * integral over the slice of 2 sin(k pi x) sin(pi x)``; the
    integral is taken in closed form, so there is no quadrature error at the
    slice edges. For ``k = 1`` it is the slice weight ``B / N`` itself, which
    keeps ``|a_1|^2 = B / N`` exact on edge slices of large detector rows.

    :param reduced: The state after the detector ``l0`` fired
    :type reduced: :class:`ReducedState <uncertainty_sampling.protocol.ReducedState>`

    :param kmax: The cutoff. Defaults to ``4 * N``
    :type kmax: int

    :rtype: :class:`SineSeries <uncertainty_sampling.spectral.SineSeries>`
    """
    kmax = 4 * reduced.N if kmax is None else kmax
    if kmax < 1:
        raise ParameterException('kmax must be at least 1')
    k = np.arange(1, kmax + 1)
    lower, upper = reduced.interval
    # 2 sin(k pi x) sin(pi x) = cos((k-1) pi x) - cos((k+1) pi x)
    overlap = _cosine_integrals(k - 1, lower, upper) - _cosine_integrals(k + 1, lower, upper)
    overlap[0] = reduced.B / reduced.N
    coeffs = math.sqrt(reduced.N / reduced.B) * overlap
    series = SineSeries(n=reduced.source.n, coeffs=coeffs)
    logger.debug('Expanded slice %d of %d up to k=%d; weight beyond the cutoff %.3g',
                 reduced.l0, reduced.N, kmax, tail_weight(series))
    return series


class TruncatedState(object):
    """
    The normalized state ``sum_k a_k psi_{n,k}(x, 0) / sqrt(sum_k |a_k|^2)``
    """

    def __init__(self, series):
        if not np.any(series.coeffs):
            raise NormalizationException('Cannot normalize an all-zero series')
        self.series = series
        self.norm_squared = series.norm_squared
        self.norm = math.sqrt(self.norm_squared)

    def __call__(self, xbar):
        x = np.atleast_1d(np.asarray(xbar, dtype=float))
        wavenumber = math.pi * self.series.k
        envelope = np.empty(x.shape, dtype=complex)
        for start in range(0, x.size, _BLOCK):
            block = x[start:start + _BLOCK]
            envelope[start:start + _BLOCK] = np.sin(np.outer(block, wavenumber)) @ self.series.coeffs
        values = PHASE_FACTOR * np.exp(1j * math.pi * self.series.n * x) * envelope / self.norm
        if np.ndim(xbar) == 0:
            return complex(values[0])
        return values

    def density(self, xbar):
        return np.abs(self(xbar)) ** 2


def reconstruct_truncated(series):
    """
    The normalized state rebuilt from a cut-off series

    :rtype: :class:`TruncatedState <uncertainty_sampling.spectral.TruncatedState>`

    :raises: A :class:`NormalizationException <uncertainty_sampling.exceptions.NormalizationException>`
        for an all-zero series
    """
    return TruncatedState(series)


def position_moments(density, spec=None, support=(0.0, 1.0)):
    """
    Position moments of a probability density by quadrature

    :param density: A vectorised, non-negative density
    :type density: callable

    :param spec: The quadrature rule
    :type spec: :class:`QuadratureSpec <uncertainty_sampling.spectral.QuadratureSpec>`

    :param support: Where the density lives. Outside of it the density is taken
        to vanish
    :type support: tuple of float

    :rtype: :class:`MomentSet <uncertainty_sampling.packets.MomentSet>`

    :raises: A :class:`NormalizationException <uncertainty_sampling.exceptions.NormalizationException>`
        when the density is negative or does not integrate to 1 within 1e-6
    """
    spec = spec or QuadratureSpec()
    x = spec.nodes(support)
    rho = np.broadcast_to(np.asarray(density(x), dtype=float), x.shape)
    if np.any(rho < -1e-12):
        raise NormalizationException('The density is negative somewhere on {0}'.format(support))
    total = _simpson(rho, spec, support)
    if abs(total - 1.0) > 1e-6:
        raise NormalizationException('The density integrates to {0!r}, not 1'.format(total))
    mean_x = _simpson(x * rho, spec, support)
    mean_x2 = _simpson(x ** 2 * rho, spec, support)
    variance = _simpson((x - mean_x) ** 2 * rho, spec, support)
    return MomentSet.position(mean_x, mean_x2, sd_x=math.sqrt(max(variance, 0.0)))


def packet_moments(packet, dom=None, spec=None):
    """
    Moments of an elementary packet by quadrature, the numerical counterpart
    of :func:`analytic_moments <uncertainty_sampling.packets.analytic_moments>`

    :type packet: :class:`ElementaryPacket <uncertainty_sampling.packets.ElementaryPacket>`

    :rtype: :class:`MomentSet <uncertainty_sampling.packets.MomentSet>`
    """
    dom = dom or DomainParams()
    spec = spec or QuadratureSpec()
    position = position_moments(
        lambda x: np.abs(eval_packet(packet, x, dom)) ** 2,
        spec,
        support=packet.window(dom),
    )
    momentum = hermitian_moments(
        SineSeries.single(packet.n, packet.k), spec, method=MomentMethod.QUADRATURE.value)
    return position.combine(momentum)


__all__ = [
    'QuadratureRule', 'MomentMethod', 'SeriesNormalization', 'QuadratureSpec',
    'SineSeries', 'TruncatedState', 'integrate', 'superpose', 'tail_weight',
    'hermitian_moments', 'sine_coefficients', 'reconstruct_truncated',
    'position_moments', 'packet_moments',
]
