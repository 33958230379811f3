"""
The ``uncertainty-sampling`` command.

.. code-block:: bash

    uncertainty-sampling kennard --rows 5
    uncertainty-sampling protocol --n 10 --N 200 --l0 80 --save
    uncertainty-sampling --output-dir out figures --N 100 --l0 40
    uncertainty-sampling landau-pollak --M 64 --wx 8 --wp 8
    uncertainty-sampling diffraction --p0 1000 --dp0 1 --q 0.5 --dq 0.01

Records go to stdout as JSON lines or CSV, log messages to stderr. Invalid
parameters exit with status 2, I/O failures with status 1.
"""
import argparse
import csv
import json
import logging
import os
import sys
import tempfile

import numpy as np

from uncertainty_sampling.base import Command, OutputFormat, RunConfig
from uncertainty_sampling.diffraction import DiffractionReport, DiffractionSetup
from uncertainty_sampling.exceptions import ConfigurationException, NormalizationException, ParameterException
from uncertainty_sampling.landau_pollak import (
    Window, build_projectors, check_chain, check_lp_inequality, discretize_packet, state_bound_check
)
from uncertainty_sampling.packets import ElementaryPacket, analytic_moments, eval_packet
from uncertainty_sampling.protocol import SamplingProtocol
from uncertainty_sampling.spectral import QuadratureSpec, SeriesNormalization, reconstruct_truncated, tail_weight
from uncertainty_sampling.version import __version__

logger = logging.getLogger(__name__)

PROG = 'uncertainty-sampling'
PROTOCOL_FILE = 'protocol.jsonl'
FIGURE_FILES = ('fig1.csv', 'fig2.csv', 'fig3.csv', 'fig4.csv')


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return '{:.17g}'.format(value)
    return str(value)


def _current_umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


def write_atomic(path, write):
    """
    Write a text file through a temporary file in the same directory. The file
    ends up with the mode a plain ``open`` would give it under the current umask.

    :param write: Called with the open text stream
    :type write: callable
    """
    directory = os.path.dirname(path) or os.curdir
    os.makedirs(directory, exist_ok=True)
    handle, temp_path = tempfile.mkstemp(dir=directory, prefix='.', suffix='.tmp')
    try:
        with os.fdopen(handle, 'w', newline='') as stream:
            write(stream)
        os.chmod(temp_path, 0o666 & ~_current_umask())
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise
    logger.info('Wrote %s', path)


def write_csv(path, header, rows):
    def write(stream):
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    write_atomic(path, write)


def write_json_lines(path, items):
    def write(stream):
        for item in items:
            stream.write(json.dumps(item, sort_keys=True) + '\n')
    write_atomic(path, write)


def emit(config, header, rows):
    """
    Print rows of equal keys as JSON lines or as CSV with a header
    """
    if config.fmt is OutputFormat.JSON:
        for row in rows:
            print(json.dumps(dict(zip(header, row)), sort_keys=True))
    else:
        writer = csv.writer(sys.stdout, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])


def emit_report(config, data):
    if config.fmt is OutputFormat.JSON:
        print(json.dumps(data, sort_keys=True))
    else:
        emit(config, ['name', 'value'], sorted(_flatten(data)))


def _flatten(data, prefix=''):
    for key, value in data.items():
        if isinstance(value, dict):
            yield from _flatten(value, '{0}{1}.'.format(prefix, key))
        else:
            yield '{0}{1}'.format(prefix, key), value


def cmd_kennard(config, args):
    if args.rows < 1:
        raise ConfigurationException('rows must be at least 1')
    rows = []
    for k in range(1, args.rows + 1):
        moments = analytic_moments(ElementaryPacket(n=config.n, k=k))
        rows.append((k, moments.sd_x, moments.sd_p, moments.product))
    emit(config, ['k', 'sd_x', 'sd_p', 'product'], rows)
    return 0


def _protocol(config, args):
    return SamplingProtocol(
        ElementaryPacket(n=config.n, k=1), config.N, config.l0, config.kmax,
        spec=QuadratureSpec(config.panels), normalization=getattr(args, 'normalization', 'mixed'))


def cmd_protocol(config, args):
    records = [record.to_dict() for record in _protocol(config, args).run()]
    if config.fmt is OutputFormat.JSON:
        for record in records:
            print(json.dumps(record, sort_keys=True))
    else:
        header = ['stage', 'U', 'P', 'n', 'N', 'l0', 'kmax', 'approx', 'cumulative_P']
        emit(config, header, [
            [record['stage'], record['U'], record['P']] + [record['params'][name] for name in header[3:7]]
            + [record['approx'], record['cumulative_P']]
            for record in records
        ])
    if args.save:
        write_json_lines(os.path.join(config.output_dir, PROTOCOL_FILE), records)
    return 0


def figure_window(reduced):
    """
    The slice of the reduced state, widened by one slice width on each side
    """
    lower, upper = reduced.interval
    width = upper - lower
    return max(lower - width, 0.0), min(upper + width, 1.0)


def figure_data(protocol, samples):
    """
    The four figure tables of a protocol run

    :returns: ``(header, rows)`` per figure file name
    :rtype: dict
    """
    x_box = np.linspace(0.0, 1.0, samples)
    x_slice = np.linspace(*figure_window(protocol.reduced), samples)
    prepared = np.abs(eval_packet(protocol.packet, x_box)) ** 2
    reduced = protocol.reduced.density(x_slice)
    weights = np.abs(protocol.series.coeffs) ** 2
    rebuilt = reconstruct_truncated(protocol.series).density(x_slice)
    return {
        'fig1.csv': (['x', 'density'], zip(x_box.tolist(), prepared.tolist())),
        'fig2.csv': (['x', 'density'], zip(x_slice.tolist(), reduced.tolist())),
        'fig3.csv': (['k', 'weight'], zip(protocol.series.k.tolist(), weights.tolist())),
        'fig4.csv': (['x', 'density'], zip(x_slice.tolist(), rebuilt.tolist())),
    }


def cmd_figures(config, args):
    protocol = _protocol(config, args)
    paths = []
    for name, (header, rows) in figure_data(protocol, config.samples).items():
        path = os.path.join(config.output_dir, name)
        write_csv(path, header, rows)
        paths.append(path)
    emit_report(config, {
        'files': ','.join(paths),
        'kmax': protocol.kmax,
        'tail_weight': tail_weight(protocol.series),
    })
    return 0


def cmd_landau_pollak(config, args):
    pair = build_projectors(args.M, Window(args.x_start, args.wx), Window(args.p_start, args.wp))
    chain = check_chain(pair)
    inequality = check_lp_inequality(pair)
    data = {'M': pair.M, 'w_x': args.wx, 'w_p': args.wp, 'residuals': pair.residuals()}
    data.update(chain.to_dict())
    data.update(inequality.to_dict())
    if args.state_n is not None:
        state = discretize_packet(ElementaryPacket(n=args.state_n, k=1), pair.M)
        data['state'] = state_bound_check(state, pair).to_dict()
    data['passed'] = bool(chain.chain_holds and chain.traces_agree and chain.counting_holds
                          and inequality.equality_holds)
    emit_report(config, data)
    return 0


def cmd_diffraction(config, args):
    setup = DiffractionSetup(
        p0=args.p0, dp0=args.dp0, q_over_L=args.q, dq_over_L=args.dq, annulus_constant=args.annulus_constant)
    emit_report(config, DiffractionReport.evaluate(setup).to_dict())
    return 0


COMMANDS = {
    Command.KENNARD: cmd_kennard,
    Command.PROTOCOL: cmd_protocol,
    Command.FIGURES: cmd_figures,
    Command.LANDAU_POLLAK: cmd_landau_pollak,
    Command.DIFFRACTION: cmd_diffraction,
}


def _add_protocol_arguments(parser):
    parser.add_argument('--n', type=int, help='Bloch index of the prepared packet (default 10)')
    parser.add_argument('--N', type=int, help='detector count (default 200)')
    parser.add_argument('--l0', type=int, help='slice whose detector fired (default 80)')
    parser.add_argument('--kmax', type=int, help='sine-series cutoff (default 4N)')
    parser.add_argument('--panels', type=int, help='quadrature panels (default 100000)')
    parser.add_argument('--normalization', default=SeriesNormalization.MIXED.value,
                        choices=[member.value for member in SeriesNormalization],
                        help='normalization of the truncated series')


def build_parser():
    parser = argparse.ArgumentParser(prog=PROG, description='Sampled uncertainty products and their probabilities')
    parser.add_argument('--version', action='version', version='%(prog)s {0}'.format(__version__))
    parser.add_argument('--output-dir', help='directory for output files')
    parser.add_argument('--format', dest='fmt', choices=[member.value for member in OutputFormat],
                        default=OutputFormat.JSON.value, help='stdout format')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='log to stderr; repeat for debug')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    kennard = commands.add_parser(Command.KENNARD.value, help='uncertainty products of the elementary packets')
    kennard.add_argument('--rows', type=int, default=10, help='number of sine indices k (default 10)')
    kennard.add_argument('--n', type=int, help='Bloch index (default 10)')

    protocol = commands.add_parser(Command.PROTOCOL.value, help='the four sampling stages')
    _add_protocol_arguments(protocol)
    protocol.add_argument('--save', action='store_true', help='also write {0}'.format(PROTOCOL_FILE))

    figures = commands.add_parser(Command.FIGURES.value, help='write the figure tables as CSV files')
    _add_protocol_arguments(figures)
    figures.add_argument('--samples', type=int, help='points per curve (default 1001)')

    projectors = commands.add_parser(Command.LANDAU_POLLAK.value, help='projector inequalities on a grid')
    projectors.add_argument('--M', type=int, default=64, help='grid size (default 64)')
    projectors.add_argument('--wx', type=int, default=8, help='grid points in the coordinate window')
    projectors.add_argument('--wp', type=int, default=8, help='frequencies in the momentum window')
    projectors.add_argument('--x-start', type=int, default=0, help='first grid point of the coordinate window')
    projectors.add_argument('--p-start', type=int, default=0, help='first frequency of the momentum window')
    projectors.add_argument('--state-n', type=int, help='also check the discretized packet psi_{n,1}')

    diffraction = commands.add_parser(Command.DIFFRACTION.value, help='diffraction scaling estimates')
    diffraction.add_argument('--p0', type=float, required=True, help='incoming momentum')
    diffraction.add_argument('--dp0', type=float, default=1.0, help='prepared momentum spread (default 1)')
    diffraction.add_argument('--q', type=float, required=True, help='detector position over screen distance')
    diffraction.add_argument('--dq', type=float, required=True, help='detector size over screen distance')
    diffraction.add_argument('--annulus-constant', type=float, default=1.0, help='annulus normalization')
    return parser


def configure_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def make_config(args):
    return RunConfig(
        args.command,
        n=getattr(args, 'n', None),
        N=getattr(args, 'N', None),
        l0=getattr(args, 'l0', None),
        kmax=getattr(args, 'kmax', None),
        panels=getattr(args, 'panels', None),
        samples=getattr(args, 'samples', None),
        output_dir=args.output_dir,
        fmt=args.fmt,
    )


def main(argv=None):
    """
    Run one command

    :param argv: Arguments without the program name. Defaults to ``sys.argv[1:]``
    :type argv: list of str

    :returns: The exit status
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        config = make_config(args)
        return COMMANDS[config.command](config, args)
    except (ConfigurationException, ParameterException, NormalizationException) as error:
        print('{0}: error: {1}'.format(PROG, error), file=sys.stderr)
        return 2
    except OSError as error:
        print('{0}: error: {1}: {2}'.format(PROG, error.filename, error.strerror), file=sys.stderr)
        return 1
