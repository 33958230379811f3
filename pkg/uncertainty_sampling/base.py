from abc import ABCMeta, abstractmethod
from enum import Enum
import os

from uncertainty_sampling.exceptions import ConfigurationException


OUTPUT_DIR_ENVIRON = 'UNCERTAINTY_SAMPLING_OUTPUT_DIR'


class Stage(Enum):
    I = 'i'
    II = 'ii'
    III = 'iii'
    IV = 'iv'


class Command(Enum):
    KENNARD = 'kennard'
    PROTOCOL = 'protocol'
    FIGURES = 'figures'
    LANDAU_POLLAK = 'landau-pollak'
    DIFFRACTION = 'diffraction'


class OutputFormat(Enum):
    CSV = 'csv'
    JSON = 'json'


class Report(metaclass=ABCMeta):
    """
    An abstract class for anything the lab reports
    """

    @abstractmethod
    def to_dict(self):
        """
        Must return a JSON-serializable dictionary with every computed value
        of the report

        :rtype: dict
        """
        raise NotImplementedError


class RunConfig(object):
    """
    Settings for one command-line run
    """
    defaults = {
        'n': 10,
        'N': 200,
        'l0': 80,
        'panels': 100000,
        'samples': 1001,
    }

    def __init__(self, command, n=None, N=None, l0=None, kmax=None, panels=None,
                 samples=None, output_dir=None, fmt=None):
        """
        :param command: One of the :class:`Command <uncertainty_sampling.base.Command>` values
        :type command: str

        :param n: Bloch index of the prepared packet. Defaults to 10
        :type n: int

        :param N: Detector count. Defaults to 200
        :type N: int

        :param l0: Index of the detector slice that fired. Defaults to 80
        :type l0: int

        :param kmax: Sine-series cutoff. Defaults to ``4 * N``
        :type kmax: int

        :param panels: Quadrature panels on the unit interval. Defaults to 10**5
        :type panels: int

        :param samples: Points per figure curve. Defaults to 1001
        :type samples: int

        :param output_dir: Directory for output files. If nothing is passed, the
            environment variable UNCERTAINTY_SAMPLING_OUTPUT_DIR is used, then the
            current directory.
        :type output_dir: str

        :param fmt: 'csv' or 'json'. Defaults to 'json'
        :type fmt: str

        :raises: A :class:`ConfigurationException <uncertainty_sampling.exceptions.ConfigurationException>`
            for unknown commands or formats and for out-of-range integers
        """
        try:
            self.command = Command(command)
        except ValueError:
            raise ConfigurationException('Unknown command {0!r}'.format(command))

        try:
            self.fmt = OutputFormat(fmt or OutputFormat.JSON.value)
        except ValueError:
            raise ConfigurationException("Output format must be 'csv' or 'json'")

        self.n = self.defaults['n'] if n is None else n
        self.N = self.defaults['N'] if N is None else N
        self.l0 = self.defaults['l0'] if l0 is None else l0
        self.kmax = 4 * self.N if kmax is None else kmax
        self.panels = self.defaults['panels'] if panels is None else panels
        self.samples = self.defaults['samples'] if samples is None else samples
        self.output_dir = output_dir or os.environ.get(OUTPUT_DIR_ENVIRON) or os.curdir

        if self.N < 1:
            raise ConfigurationException('N must be a positive detector count')
        if not 1 <= self.l0 <= self.N:
            raise ConfigurationException('l0 must be between 1 and N={0}'.format(self.N))
        if self.kmax < 1:
            raise ConfigurationException('kmax must be at least 1')
        if self.samples < 2:
            raise ConfigurationException('samples must be at least 2')

    def to_dict(self):
        return {
            'command': self.command.value,
            'n': self.n,
            'N': self.N,
            'l0': self.l0,
            'kmax': self.kmax,
            'panels': self.panels,
            'samples': self.samples,
            'output_dir': self.output_dir,
            'format': self.fmt.value,
        }
