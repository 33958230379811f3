"""
Order-of-magnitude estimates for a particle diffracted onto a screen.

A particle of momentum ``p0`` (spread ``dp0``) passes a slit and lands on a
screen at distance ``L``; a detector of size ``dq`` sits at radial position
``q``. Momenta are in units of ``hbar / L`` and lengths in units of ``L``.
Every result is a scaling relation, so each comes back as an
:class:`Estimate <uncertainty_sampling.diffraction.Estimate>` flagged as an
order of magnitude.

.. code-block:: python

    from uncertainty_sampling import DiffractionSetup, detection_probability

    setup = DiffractionSetup(p0=1000, q_over_L=0.5, dq_over_L=0.01)
    detection_probability(setup).value    # 0.005
"""
from collections import namedtuple
from dataclasses import dataclass

from uncertainty_sampling.base import Report
from uncertainty_sampling.exceptions import ConfigurationException, ParameterException

# detector size over screen distance when the detectors cover the screen
FULL_SCREEN = 1.0


class Estimate(namedtuple('Estimate', ['value', 'order_of_magnitude'])):
    __slots__ = ()

    def __new__(cls, value, order_of_magnitude=True):
        return super(Estimate, cls).__new__(cls, float(value), order_of_magnitude)


class DiffractionSetup(object):
    """
    The geometry of one diffraction experiment
    """

    def __init__(self, p0, dp0=1.0, q_over_L=None, dq_over_L=None, annulus_constant=1.0):
        """
        :param p0: Incoming momentum
        :type p0: float

        :param dp0: Momentum spread of the prepared particle. Defaults to 1
        :type dp0: float

        :param q_over_L: Radial position of the detector over the screen distance
        :type q_over_L: float

        :param dq_over_L: Detector size over the screen distance
        :type dq_over_L: float

        :param annulus_constant: Normalization of the density on the detector
            annulus. Defaults to 1
        :type annulus_constant: float

        :raises: A :class:`ConfigurationException <uncertainty_sampling.exceptions.ConfigurationException>`
            for non-positive values or ratios above 1
        """
        values = {'p0': p0, 'dp0': dp0, 'q_over_L': q_over_L, 'dq_over_L': dq_over_L,
                  'annulus_constant': annulus_constant}
        for name, value in values.items():
            if value is None:
                raise ConfigurationException('{0} is required'.format(name))
            if not value > 0:
                raise ConfigurationException('{0} must be positive, got {1!r}'.format(name, value))
        for name in ('q_over_L', 'dq_over_L'):
            if values[name] > 1:
                raise ConfigurationException('{0} must not exceed 1, got {1!r}'.format(name, values[name]))

        self.p0 = float(p0)
        self.dp0 = float(dp0)
        self.q_over_L = float(q_over_L)
        self.dq_over_L = float(dq_over_L)
        self.annulus_constant = float(annulus_constant)

    def to_dict(self):
        return {
            'p0': self.p0,
            'dp0': self.dp0,
            'q_over_L': self.q_over_L,
            'dq_over_L': self.dq_over_L,
            'annulus_constant': self.annulus_constant,
        }


def momentum_uncertainty(setup):
    """
    ``p0 dq/L + dp0 q/L``: the detector-size term plus the intrinsic term

    :rtype: :class:`Estimate <uncertainty_sampling.diffraction.Estimate>`
    """
    return Estimate(setup.p0 * setup.dq_over_L + setup.dp0 * setup.q_over_L)


def crossover_size(setup):
    """
    The detector size ``dp0 q / p0`` at which both momentum terms are equal
    """
    return Estimate(setup.dp0 * setup.q_over_L / setup.p0)


def uncertainty_product(setup):
    """
    ``dp0 (q/L) (dq/L)``, valid while the intrinsic term dominates

    :rtype: :class:`Estimate <uncertainty_sampling.diffraction.Estimate>`

    :raises: A :class:`ParameterException <uncertainty_sampling.exceptions.ParameterException>`
        when the detector is larger than the crossover size
    """
    crossover = crossover_size(setup).value
    if setup.dq_over_L > crossover:
        raise ParameterException(
            'dq/L={0!r} is above the crossover size {1!r}; the detector term dominates'.format(
                setup.dq_over_L, crossover))
    return Estimate(setup.dp0 * setup.q_over_L * setup.dq_over_L)


def detection_probability(setup):
    """
    The chance that the particle lands on the detector, ``~ (q/L) (dq/L)``
    """
    return Estimate(setup.annulus_constant * setup.q_over_L * setup.dq_over_L)


def equivalent_detector_count(setup):
    """
    How many detectors of this size tile the screen, ``L / dq``
    """
    return Estimate(1.0 / setup.dq_over_L)


def unit_probability_product(setup):
    """
    The product ``dp0 dq`` once detectors cover the whole screen, ``dq ~ L``.

    The detection probability is then of order 1 and the product is just the
    prepared spread ``dp0``, of order 1 for a preparation with ``dp0 ~ 1``.
    """
    return Estimate(setup.dp0 * FULL_SCREEN)


@dataclass(frozen=True)
class DiffractionReport(Report):
    setup: DiffractionSetup
    momentum_uncertainty: Estimate
    crossover_size: Estimate
    uncertainty_product: Estimate
    detection_probability: Estimate
    equivalent_detector_count: Estimate
    unit_probability_product: Estimate

    @classmethod
    def evaluate(cls, setup):
        """
        Every estimate for ``setup``. The uncertainty product is ``None`` above
        the crossover size.
        """
        try:
            product = uncertainty_product(setup)
        except ParameterException:
            product = None
        return cls(
            setup=setup,
            momentum_uncertainty=momentum_uncertainty(setup),
            crossover_size=crossover_size(setup),
            uncertainty_product=product,
            detection_probability=detection_probability(setup),
            equivalent_detector_count=equivalent_detector_count(setup),
            unit_probability_product=unit_probability_product(setup),
        )

    @property
    def probability_ratio(self):
        """
        Detection probability over uncertainty product, ``None`` above the crossover
        """
        if self.uncertainty_product is None:
            return None
        return self.detection_probability.value / self.uncertainty_product.value

    def to_dict(self):
        estimates = ('momentum_uncertainty', 'crossover_size', 'uncertainty_product',
                     'detection_probability', 'equivalent_detector_count', 'unit_probability_product')
        data = {'setup': self.setup.to_dict(), 'order_of_magnitude': True,
                'probability_ratio': self.probability_ratio}
        for name in estimates:
            estimate = getattr(self, name)
            data[name] = None if estimate is None else estimate.value
        return data
