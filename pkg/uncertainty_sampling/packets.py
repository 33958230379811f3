"""
Localized packets on the unit box, in dimensionless units: positions in units
of the box size, momenta in units of hbar over the box size, and times as
``c t / L``.

An elementary packet ``psi_{n,k}`` is a Bloch-like phase ``exp(i pi n x)``
times a sine envelope ``sin(k pi x)`` that vanishes at both ends of its window,
so it is localized and still carries the definite mean momentum ``pi n``.

.. code-block:: python

    from uncertainty_sampling import ElementaryPacket, analytic_moments, kennard_product

    packet = ElementaryPacket(n=10, k=1)
    moments = analytic_moments(packet)
    moments.sd_x, moments.sd_p       # 0.180756..., 3.14159...
    kennard_product(1)               # 0.567862...
"""
from dataclasses import dataclass
import math
import numbers

import numpy as np

from uncertainty_sampling.exceptions import ParameterException


DEFAULT_LAMBDA = 1e-5

# the 2i/sqrt(2) prefactor shared by every elementary packet
PHASE_FACTOR = 2j / math.sqrt(2.0)


def require_integer(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterException('{0} must be an integer, got {1!r}'.format(name, value))
    if minimum is not None and value < minimum:
        raise ParameterException('{0} must be at least {1}, got {2}'.format(name, minimum, value))
    return int(value)


@dataclass(frozen=True)
class DomainParams(object):
    """
    The dimensionless Compton-length ratio ``lam`` and the time ``T``.

    Protocol runs use ``T = 0``; ``lam`` only matters at nonzero time.
    """
    lam: float = DEFAULT_LAMBDA
    T: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterException('lambda must be positive, got {0!r}'.format(self.lam))
        if not self.T >= 0:
            raise ParameterException('T must be non-negative, got {0!r}'.format(self.T))


@dataclass(frozen=True)
class ElementaryPacket(object):
    """
    The two-plane-wave packet with Bloch index ``n`` and sine index ``k``
    """
    n: int
    k: int = 1

    def __post_init__(self):
        require_integer(self.n, 'n')
        require_integer(self.k, 'k', minimum=1)

    @property
    def p_n(self):
        return math.pi * self.n

    @property
    def p_k(self):
        return math.pi * self.k

    def offset(self, dom=None):
        """
        Where the packet's window starts: ``p_n * lam * T``

        :rtype: float
        """
        dom = dom or DomainParams()
        return self.p_n * dom.lam * dom.T

    def window(self, dom=None):
        """
        The unit evaluation window, shifted along with the moving packet

        :rtype: tuple of float
        """
        start = self.offset(dom)
        return start, 1.0 + start


@dataclass(frozen=True)
class MomentSet(object):
    """
    First and second moments of position and momentum, with the standard
    deviations. Entries a computation does not produce are ``None``.
    """
    mean_x: float = None
    mean_x2: float = None
    mean_p: float = None
    mean_p2: float = None
    sd_x: float = None
    sd_p: float = None

    @classmethod
    def position(cls, mean_x, mean_x2, sd_x=None):
        if sd_x is None:
            sd_x = math.sqrt(max(mean_x2 - mean_x ** 2, 0.0))
        return cls(mean_x=mean_x, mean_x2=mean_x2, sd_x=sd_x)

    @classmethod
    def momentum(cls, mean_p, mean_p2, sd_p=None):
        if sd_p is None:
            sd_p = math.sqrt(max(mean_p2 - mean_p ** 2, 0.0))
        return cls(mean_p=mean_p, mean_p2=mean_p2, sd_p=sd_p)

    def combine(self, other):
        """
        Fill the entries missing here from ``other``

        :rtype: :class:`MomentSet <uncertainty_sampling.packets.MomentSet>`
        """
        fields = ('mean_x', 'mean_x2', 'mean_p', 'mean_p2', 'sd_x', 'sd_p')
        return MomentSet(**{
            name: getattr(self, name) if getattr(self, name) is not None else getattr(other, name)
            for name in fields
        })

    @property
    def product(self):
        """
        The uncertainty product ``sd_x * sd_p``

        :raises: ``ValueError`` when either deviation is missing
        """
        if self.sd_x is None or self.sd_p is None:
            raise ValueError('Both deviations are needed for the uncertainty product')
        return self.sd_x * self.sd_p

    def to_dict(self):
        return {
            'mean_x': self.mean_x,
            'mean_x2': self.mean_x2,
            'mean_p': self.mean_p,
            'mean_p2': self.mean_p2,
            'sd_x': self.sd_x,
            'sd_p': self.sd_p,
        }


def eval_packet(packet, xbar, dom=None):
    """
    Evaluate ``psi_{n,k}(xbar, T)``

    :param packet: The packet to evaluate
    :type packet: :class:`ElementaryPacket <uncertainty_sampling.packets.ElementaryPacket>`

    :param xbar: Position or array of positions inside the packet window
    :type xbar: float or numpy.ndarray

    :param dom: Compton ratio and time. Defaults to ``T = 0``
    :type dom: :class:`DomainParams <uncertainty_sampling.packets.DomainParams>`

    :returns: The complex amplitude, with the shape of ``xbar``
    :rtype: complex or numpy.ndarray
    """
    dom = dom or DomainParams()
    x = np.asarray(xbar, dtype=float)
    shift = packet.offset(dom)
    phase = packet.p_n * x - 0.5 * (packet.p_n ** 2 + packet.p_k ** 2) * dom.lam * dom.T
    amplitude = PHASE_FACTOR * np.exp(1j * phase) * np.sin(packet.k * math.pi * (x - shift))
    if amplitude.ndim == 0:
        return complex(amplitude)
    return amplitude


def analytic_moments(packet, dom=None):
    """
    Closed-form moments of an elementary packet over its window

    :rtype: :class:`MomentSet <uncertainty_sampling.packets.MomentSet>`
    """
    shift = packet.offset(dom)
    curvature = 2.0 / (2.0 * math.pi * packet.k) ** 2
    mean_x = 0.5 + shift
    mean_x2 = 1.0 / 3.0 - curvature + shift + shift ** 2
    sd_x = math.sqrt(1.0 - 24.0 / (2.0 * math.pi * packet.k) ** 2) / (2.0 * math.sqrt(3.0))
    return MomentSet(
        mean_x=mean_x,
        mean_x2=mean_x2,
        mean_p=packet.p_n,
        mean_p2=packet.p_n ** 2 + packet.p_k ** 2,
        sd_x=sd_x,
        sd_p=packet.p_k,
    )


def kennard_product(k):
    """
    The uncertainty product of ``psi_{n,k}``, which does not depend on ``n``.

    ``k = 1`` gives the smallest product, 0.567862, just above the Kennard
    bound of 1/2.

    :param k: The sine index
    :type k: int

    :rtype: float

    :raises: A :class:`ParameterException <uncertainty_sampling.exceptions.ParameterException>`
        if ``k < 1``
    """
    k = require_integer(k, 'k', minimum=1)
    return math.pi / (2.0 * math.sqrt(3.0)) * math.sqrt(k ** 2 - 24.0 / (2.0 * math.pi) ** 2)
