"""
Projector inequalities on a periodic grid of ``M`` points.

``E`` keeps a window of grid points and ``P`` a window of discrete
frequencies. For any such pair ``||EP||^2 = ||EPE|| <= Tr(EPE) = Tr(PEP)``,
the trace is the phase-space count ``w_x * w_p / M``, and the largest
eigenvalue of ``E + P`` is ``1 + ||EP||``, so
``<E> + <P> <= 1 + ||EP||`` for every state.

.. code-block:: python

    from uncertainty_sampling import build_projectors, check_chain, check_lp_inequality

    pair = build_projectors(M=64, x_window=8, p_window=8)
    check_chain(pair).trace_EPE                   # 1.0
    check_lp_inequality(pair).equality_holds      # True
"""
from collections import namedtuple
from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy.linalg import dft, eigvalsh

from uncertainty_sampling.base import Report
from uncertainty_sampling.exceptions import NormalizationException, ParameterException
from uncertainty_sampling.packets import eval_packet, require_integer

logger = logging.getLogger(__name__)

MAX_GRID = 512

PROJECTOR_TOLERANCE = 1e-10
CHAIN_TOLERANCE = 1e-10
COUNTING_TOLERANCE = 1e-12
EIGEN_TOLERANCE = 1e-8
BAND_LIMIT_TOLERANCE = 1e-6
STATE_NORM_TOLERANCE = 1e-10


Window = namedtuple('Window', ['start', 'width'])


def as_window(window, M):
    """
    Normalize a window argument: a bare width means ``Window(0, width)``

    :rtype: :class:`Window <uncertainty_sampling.landau_pollak.Window>`

    :raises: A :class:`ParameterException <uncertainty_sampling.exceptions.ParameterException>`
        for empty windows or windows wider than the grid
    """
    if not isinstance(window, tuple):
        window = Window(0, window)
    start, width = window
    start = require_integer(start, 'window start')
    width = require_integer(width, 'window width')
    if not 1 <= width <= M:
        raise ParameterException('A window needs between 1 and M={0} points, got {1}'.format(M, width))
    return Window(start % M, width)


def window_indices(window, M):
    return (window.start + np.arange(window.width)) % M


def _largest_eigenvalue(matrix):
    hermitian = 0.5 * (matrix + matrix.conj().T)
    size = hermitian.shape[0]
    return float(eigvalsh(hermitian, subset_by_index=[size - 1, size - 1])[0])


def _residual(matrix):
    idempotency = np.max(np.abs(matrix @ matrix - matrix))
    hermiticity = np.max(np.abs(matrix - matrix.conj().T))
    return float(idempotency), float(hermiticity)


class ProjectorPair(object):
    """
    A coordinate projector ``E`` and a momentum projector ``P`` on the same grid
    """

    def __init__(self, E, P, x_window=None, p_window=None):
        self.E = E
        self.P = P
        self.M = E.shape[0]
        self.x_window = x_window
        self.p_window = p_window

    @classmethod
    def from_matrices(cls, E, P):
        """
        Wrap an arbitrary pair of orthogonal projectors

        :raises: A :class:`ParameterException <uncertainty_sampling.exceptions.ParameterException>`
            when the matrices are not equal-sized hermitian idempotents
        """
        E = np.asarray(E, dtype=complex)
        P = np.asarray(P, dtype=complex)
        if E.ndim != 2 or E.shape[0] != E.shape[1] or E.shape != P.shape:
            raise ParameterException('Projectors must be square matrices of one size')
        for name, matrix in (('E', E), ('P', P)):
            if max(_residual(matrix)) > PROJECTOR_TOLERANCE:
                raise ParameterException('{0} is not an orthogonal projector'.format(name))
        return cls(E, P)

    @property
    def w_x(self):
        return int(round(np.trace(self.E).real))

    @property
    def w_p(self):
        return int(round(np.trace(self.P).real))

    @property
    def expected_trace(self):
        """
        The phase-space count ``w_x * w_p / M``, known only for window-built pairs
        """
        if self.x_window is None or self.p_window is None:
            return None
        return self.x_window.width * self.p_window.width / self.M

    def residuals(self):
        """
        Worst entrywise idempotency and hermiticity residuals of ``E`` and ``P``

        :rtype: dict
        """
        E_idempotency, E_hermiticity = _residual(self.E)
        P_idempotency, P_hermiticity = _residual(self.P)
        return {
            'E_idempotency': E_idempotency,
            'E_hermiticity': E_hermiticity,
            'P_idempotency': P_idempotency,
            'P_hermiticity': P_hermiticity,
        }

    def __repr__(self):
        return 'ProjectorPair(M={0}, x_window={1}, p_window={2})'.format(self.M, self.x_window, self.p_window)


def build_projectors(M, x_window, p_window, max_grid=MAX_GRID):
    """
    Build the window projectors on a grid of ``M`` points.

    ``E`` is diagonal with ones on the grid points of ``x_window``. ``P`` sums
    ``|e_f><e_f|`` over the frequencies ``f`` of ``p_window``, with the plane
    waves ``e_f(j) = exp(2 pi i f j / M) / sqrt(M)`` taken from the unitary
    DFT matrix. Both windows wrap around modulo ``M``.

    :param M: Grid size
    :type M: int

    :param x_window: A width, or ``Window(start, width)`` of grid points
    :type x_window: int or :class:`Window <uncertainty_sampling.landau_pollak.Window>`

    :param p_window: A width, or ``Window(start, width)`` of frequencies
    :type p_window: int or :class:`Window <uncertainty_sampling.landau_pollak.Window>`

    :param max_grid: The largest grid accepted
    :type max_grid: int

    :rtype: :class:`ProjectorPair <uncertainty_sampling.landau_pollak.ProjectorPair>`

    :raises: A :class:`ParameterException <uncertainty_sampling.exceptions.ParameterException>`
        for ``M < 2``, grids above ``max_grid`` and empty windows
    """
    M = require_integer(M, 'M', minimum=2)
    if M > max_grid:
        raise ParameterException('M={0} is above the grid cap of {1}'.format(M, max_grid))
    x_window = as_window(x_window, M)
    p_window = as_window(p_window, M)

    E = np.zeros((M, M), dtype=complex)
    x_indices = window_indices(x_window, M)
    E[x_indices, x_indices] = 1.0

    rows = dft(M, scale='sqrtn')[window_indices(p_window, M)]
    P = rows.conj().T @ rows
    P = 0.5 * (P + P.conj().T)
    logger.debug('Built projectors on M=%d with x window %s and p window %s', M, x_window, p_window)
    return ProjectorPair(E, P, x_window, p_window)


@dataclass(frozen=True)
class ChainReport(Report):
    norm_EP: float
    trace_EPE: float
    trace_PEP: float
    sqrt_trace_EPE: float
    expected_trace: float
    chain_holds: bool
    traces_agree: bool
    counting_holds: bool

    def to_dict(self):
        return {
            'norm_EP': self.norm_EP,
            'trace_EPE': self.trace_EPE,
            'trace_PEP': self.trace_PEP,
            'sqrt_trace_EPE': self.sqrt_trace_EPE,
            'expected_trace': self.expected_trace,
            'chain_holds': self.chain_holds,
            'traces_agree': self.traces_agree,
            'counting_holds': self.counting_holds,
        }


@dataclass(frozen=True)
class InequalityReport(Report):
    lambda_max_EplusP: float
    bound: float
    norm_EP: float
    equality_holds: bool

    def to_dict(self):
        return {
            'lambda_max_EplusP': self.lambda_max_EplusP,
            'bound': self.bound,
            'norm_EP': self.norm_EP,
            'equality_holds': self.equality_holds,
        }


@dataclass(frozen=True)
class StateBoundReport(Report):
    """
    ``bound_holds`` is ``None`` unless the state is band-limited to the
    momentum window
    """
    prob_E: float
    prob_P: float
    trace_bound: float
    ratio: float
    band_limited: bool
    bound_holds: bool = None

    def to_dict(self):
        return {
            'prob_E': self.prob_E,
            'prob_P': self.prob_P,
            'trace_bound': self.trace_bound,
            'ratio': self.ratio,
            'band_limited': self.band_limited,
            'bound_holds': self.bound_holds,
        }


def operator_norm(pair):
    """
    ``||EP||``, the square root of the largest eigenvalue of ``EPE``

    :rtype: float
    """
    EPE = pair.E @ pair.P @ pair.E
    return math.sqrt(min(max(_largest_eigenvalue(EPE), 0.0), 1.0))


def check_chain(pair):
    """
    Evaluate ``||EP||^2 <= Tr(EPE) = Tr(PEP)`` and the phase-space count

    :type pair: :class:`ProjectorPair <uncertainty_sampling.landau_pollak.ProjectorPair>`

    :rtype: :class:`ChainReport <uncertainty_sampling.landau_pollak.ChainReport>`
    """
    norm_EP = operator_norm(pair)
    trace_EPE = float(np.trace(pair.E @ pair.P @ pair.E).real)
    trace_PEP = float(np.trace(pair.P @ pair.E @ pair.P).real)
    expected = pair.expected_trace
    counting_holds = None if expected is None else abs(trace_EPE - expected) <= COUNTING_TOLERANCE
    report = ChainReport(
        norm_EP=norm_EP,
        trace_EPE=trace_EPE,
        trace_PEP=trace_PEP,
        sqrt_trace_EPE=math.sqrt(max(trace_EPE, 0.0)),
        expected_trace=expected,
        chain_holds=norm_EP ** 2 <= trace_EPE + CHAIN_TOLERANCE,
        traces_agree=abs(trace_EPE - trace_PEP) <= CHAIN_TOLERANCE,
        counting_holds=counting_holds,
    )
    logger.debug('Chain on %r: ||EP||=%.12g, Tr(EPE)=%.12g', pair, norm_EP, trace_EPE)
    return report


def check_lp_inequality(pair):
    """
    Compare the largest eigenvalue of ``E + P`` with ``1 + ||EP||``

    :rtype: :class:`InequalityReport <uncertainty_sampling.landau_pollak.InequalityReport>`
    """
    norm_EP = operator_norm(pair)
    lambda_max = _largest_eigenvalue(pair.E + pair.P)
    bound = 1.0 + norm_EP
    return InequalityReport(
        lambda_max_EplusP=lambda_max,
        bound=bound,
        norm_EP=norm_EP,
        equality_holds=abs(lambda_max - bound) <= EIGEN_TOLERANCE,
    )


def state_bound_check(state, pair):
    """
    Probabilities of a grid state in both windows, against ``Tr(EPE)``.

    The bound ``<E> <= Tr(EPE)`` is only asserted for states the momentum
    projector leaves unchanged; for any other state ``bound_holds`` is
    ``None`` and only the ratio is reported.

    :param state: A normalized vector of ``M`` complex amplitudes
    :type state: numpy.ndarray

    :type pair: :class:`ProjectorPair <uncertainty_sampling.landau_pollak.ProjectorPair>`

    :rtype: :class:`StateBoundReport <uncertainty_sampling.landau_pollak.StateBoundReport>`

    :raises: A :class:`NormalizationException <uncertainty_sampling.exceptions.NormalizationException>`
        when the state is not normalized on the grid
    """
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (pair.M,):
        raise ParameterException('The state needs {0} amplitudes, got shape {1}'.format(pair.M, psi.shape))
    norm_squared = float(np.vdot(psi, psi).real)
    if abs(norm_squared - 1.0) > STATE_NORM_TOLERANCE:
        raise NormalizationException('The grid state has norm^2 {0!r}, not 1'.format(norm_squared))

    prob_E = float(np.vdot(psi, pair.E @ psi).real)
    projected = pair.P @ psi
    prob_P = float(np.vdot(psi, projected).real)
    trace_bound = float(np.trace(pair.E @ pair.P @ pair.E).real)
    band_limited = bool(np.linalg.norm(projected - psi) <= BAND_LIMIT_TOLERANCE)
    return StateBoundReport(
        prob_E=prob_E,
        prob_P=prob_P,
        trace_bound=trace_bound,
        ratio=prob_E / trace_bound if trace_bound > 0 else math.inf,
        band_limited=band_limited,
        bound_holds=prob_E <= trace_bound + CHAIN_TOLERANCE if band_limited else None,
    )


def discretize_packet(packet, M):
    """
    Sample ``psi_{n,k}`` at ``x_j = j / M`` and normalize on the grid

    :rtype: numpy.ndarray
    """
    M = require_integer(M, 'M', minimum=2)
    samples = eval_packet(packet, np.arange(M) / M)
    return samples / np.linalg.norm(samples)


def band_limited_state(M, p_window, coefficients):
    """
    The normalized superposition of the plane waves in ``p_window``

    :param coefficients: One complex weight per frequency of the window
    :type coefficients: sequence of complex

    :rtype: numpy.ndarray
    """
    M = require_integer(M, 'M', minimum=2)
    p_window = as_window(p_window, M)
    coefficients = np.asarray(coefficients, dtype=complex)
    if coefficients.shape != (p_window.width,):
        raise ParameterException('Need one coefficient per frequency of the window')
    rows = dft(M, scale='sqrtn')[window_indices(p_window, M)]
    state = rows.conj().T @ coefficients
    norm = np.linalg.norm(state)
    if norm == 0:
        raise NormalizationException('Cannot normalize an all-zero state')
    return state / norm
