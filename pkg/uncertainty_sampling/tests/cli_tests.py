import csv
import json
import os
import tempfile
from io import StringIO
from unittest import TestCase

from mock import patch

from uncertainty_sampling import cli
from uncertainty_sampling.base import Stage
from uncertainty_sampling.packets import ElementaryPacket
from uncertainty_sampling.protocol import MeasurementRecord, ProtocolParams, SamplingProtocol


def run(*argv):
    """
    Run the command and capture stdout and stderr
    """
    with patch('sys.stdout', new_callable=StringIO) as stdout, patch('sys.stderr', new_callable=StringIO) as stderr:
        status = cli.main(list(argv))
    return status, stdout.getvalue(), stderr.getvalue()


class WriteAtomicTests(TestCase):
    """
    Tests for write_atomic
    """

    def test_mode_follows_umask(self):
        """
        Test the written file gets the umask mode of a plainly created file
        """
        previous = os.umask(0o022)
        try:
            with tempfile.TemporaryDirectory() as directory:
                path = os.path.join(directory, 'out.csv')
                cli.write_csv(path, ['x'], [(1.0,)])
                mode = os.stat(path).st_mode & 0o777
                with open(path, newline='') as stream:
                    text = stream.read()
        finally:
            os.umask(previous)
        self.assertEqual(mode, 0o644)
        self.assertEqual(text, 'x\n1\n')


class KennardCommandTests(TestCase):
    """
    Tests for the kennard command
    """

    def test_json_rows(self):
        """
        Test one JSON line per sine index
        """
        status, out, _ = run('kennard', '--rows', '3')
        rows = [json.loads(line) for line in out.splitlines()]
        self.assertEqual(status, 0)
        self.assertEqual([row['k'] for row in rows], [1, 2, 3])
        self.assertAlmostEqual(rows[0]['sd_x'], 0.180756, places=6)
        self.assertAlmostEqual(rows[0]['product'], 0.567862, delta=1e-6)
        self.assertTrue(all(row['product'] >= 0.5 for row in rows))

    def test_csv_rows(self):
        """
        Test the CSV table has a header and full precision
        """
        status, out, _ = run('--format', 'csv', 'kennard', '--rows', '2')
        lines = out.split('\n')
        self.assertEqual(status, 0)
        self.assertEqual(lines[0], 'k,sd_x,sd_p,product')
        self.assertEqual(lines[1].split(',')[0], '1')
        self.assertEqual(float(lines[1].split(',')[2]), 3.141592653589793)

    def test_invalid_rows(self):
        """
        Test an empty table is a parameter error
        """
        status, out, err = run('kennard', '--rows', '0')
        self.assertEqual(status, 2)
        self.assertEqual(out, '')
        self.assertIn('rows', err)


class ProtocolCommandTests(TestCase):
    """
    Tests for the protocol command
    """

    def setUp(self):
        params = ProtocolParams(10, 200, 80, 800)
        self.records = [
            MeasurementRecord(stage=Stage.I, U=0.5678, P=1.0, params=params),
            MeasurementRecord(stage=Stage.II, U=0.0045, P=0.009, params=params),
            MeasurementRecord(stage=Stage.III, U=0.827, P=1.0, params=params),
            MeasurementRecord(stage=Stage.IV, U=0.0045, P=0.009, params=params, approx=True, cumulative_P=8.1e-5),
        ]

    @patch.object(SamplingProtocol, 'run', spec_set=True)
    def test_json_lines(self, run_mock):
        """
        Test one JSON object per stage
        """
        run_mock.return_value = self.records
        status, out, _ = run('protocol')

        self.assertEqual(status, 0)
        parsed = [MeasurementRecord.from_dict(json.loads(line)) for line in out.splitlines()]
        self.assertEqual(parsed, self.records)
        run_mock.assert_called_once_with()

    @patch.object(SamplingProtocol, 'run', spec_set=True)
    def test_csv(self, run_mock):
        """
        Test the CSV rows of the stages
        """
        run_mock.return_value = self.records
        status, out, _ = run('--format', 'csv', 'protocol')
        rows = list(csv.DictReader(StringIO(out)))

        self.assertEqual(status, 0)
        self.assertEqual([row['stage'] for row in rows], ['i', 'ii', 'iii', 'iv'])
        self.assertEqual(rows[3]['approx'], 'True')
        self.assertEqual(rows[0]['kmax'], '800')

    @patch.object(SamplingProtocol, 'run', spec_set=True)
    def test_save(self, run_mock):
        """
        Test --save writes the records into the output directory
        """
        run_mock.return_value = self.records
        with tempfile.TemporaryDirectory() as directory:
            status, out, _ = run('--output-dir', directory, 'protocol', '--save')
            with open(os.path.join(directory, 'protocol.jsonl'), newline='') as stream:
                saved = stream.read()

        self.assertEqual(status, 0)
        self.assertEqual(saved, out)

    def test_single_detector(self):
        """
        Test a real run with one detector covering the box
        """
        status, out, _ = run('protocol', '--N', '1', '--l0', '1', '--kmax', '1', '--panels', '1000')
        records = [json.loads(line) for line in out.splitlines()]
        self.assertEqual(status, 0)
        self.assertEqual([record['stage'] for record in records], ['i', 'ii', 'iii', 'iv'])
        for record in records:
            self.assertAlmostEqual(record['U'], 0.567862, delta=1e-6)
        self.assertTrue(records[3]['approx'])

    def test_invalid_parameters(self):
        """
        Test invalid detector counts, slices and panels exit with status 2
        """
        for argv in (['protocol', '--N', '0'], ['protocol', '--l0', '300'], ['protocol', '--panels', '1001'],
                     ['protocol', '--kmax', '100', '--panels', '1000']):
            status, out, err = run(*argv)
            self.assertEqual(status, 2)
            self.assertEqual(out, '')
            self.assertTrue(err.startswith('uncertainty-sampling: error:'))

    def test_missing_command(self):
        """
        Test argparse rejects a call without a command
        """
        with patch('sys.stderr', new_callable=StringIO):
            with self.assertRaises(SystemExit):
                cli.main([])


class FiguresCommandTests(TestCase):
    """
    Tests for the figures command
    """

    argv = ('figures', '--N', '20', '--l0', '8', '--samples', '101', '--panels', '1000')

    def read(self, directory, name):
        with open(os.path.join(directory, name), newline='') as stream:
            return stream.read()

    def test_files(self):
        """
        Test the four tables are written with headers and LF line endings
        """
        with tempfile.TemporaryDirectory() as directory:
            status, out, _ = run('--output-dir', directory, *self.argv)
            contents = {name: self.read(directory, name) for name in cli.FIGURE_FILES}
            leftovers = [name for name in os.listdir(directory) if name not in cli.FIGURE_FILES]

        self.assertEqual(status, 0)
        self.assertEqual(leftovers, [])
        self.assertAlmostEqual(json.loads(out)['kmax'], 80)
        for name, text in contents.items():
            self.assertNotIn('\r', text, msg=name)
        fig1 = list(csv.reader(StringIO(contents['fig1.csv'])))
        self.assertEqual(fig1[0], ['x', 'density'])
        self.assertEqual(len(fig1), 102)
        self.assertEqual(float(fig1[51][0]), 0.5)
        self.assertAlmostEqual(float(fig1[51][1]), 2.0, places=12)
        fig3 = list(csv.reader(StringIO(contents['fig3.csv'])))
        self.assertEqual(fig3[0], ['k', 'weight'])
        self.assertEqual(len(fig3), 81)

    def test_deterministic(self):
        """
        Test two runs write byte-identical files
        """
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            run('--output-dir', first, *self.argv)
            run('--output-dir', second, *self.argv)
            for name in cli.FIGURE_FILES:
                self.assertEqual(self.read(first, name), self.read(second, name))

    def test_unwritable_directory(self):
        """
        Test an output path that is a file exits with status 1 and names the path
        """
        with tempfile.NamedTemporaryFile() as handle:
            status, _, err = run('--output-dir', handle.name, *self.argv)
        self.assertEqual(status, 1)
        self.assertIn(handle.name, err)

    def test_window(self):
        """
        Test the figure window widens the slice by one slice on each side
        """
        protocol = SamplingProtocol(ElementaryPacket(n=10), 20, 8)
        lower, upper = cli.figure_window(protocol.reduced)
        self.assertAlmostEqual(lower, 0.3)
        self.assertAlmostEqual(upper, 0.45)
        self.assertEqual(cli.figure_window(SamplingProtocol(ElementaryPacket(n=10), 1, 1).reduced), (0.0, 1.0))


class LandauPollakCommandTests(TestCase):
    """
    Tests for the landau-pollak command
    """

    def test_counting(self):
        """
        Test the equal-window report
        """
        status, out, _ = run('landau-pollak', '--M', '64', '--wx', '8', '--wp', '8')
        report = json.loads(out)
        self.assertEqual(status, 0)
        self.assertAlmostEqual(report['trace_EPE'], 1.0, delta=1e-12)
        self.assertTrue(report['chain_holds'])
        self.assertTrue(report['passed'])

    def test_eigenvalue(self):
        """
        Test the eigenvalue equality on a larger grid, with the packet state
        """
        status, out, _ = run('landau-pollak', '--M', '256', '--wx', '16', '--wp', '16', '--state-n', '10')
        report = json.loads(out)
        self.assertEqual(status, 0)
        self.assertTrue(report['equality_holds'])
        self.assertIn('prob_E', report['state'])

    def test_grid_cap(self):
        """
        Test grids above the cap exit with status 2
        """
        status, _, err = run('landau-pollak', '--M', '2048')
        self.assertEqual(status, 2)
        self.assertIn('2048', err)


class DiffractionCommandTests(TestCase):
    """
    Tests for the diffraction command
    """

    def test_report(self):
        """
        Test the probability of the reference setup
        """
        status, out, _ = run('diffraction', '--p0', '1000', '--dp0', '1', '--q', '0.5', '--dq', '0.01')
        report = json.loads(out)
        self.assertEqual(status, 0)
        self.assertAlmostEqual(report['detection_probability'], 0.005)
        self.assertIsNone(report['uncertainty_product'])

    def test_csv(self):
        """
        Test the report as name,value rows
        """
        status, out, _ = run('--format', 'csv', 'diffraction', '--p0', '10', '--q', '0.5', '--dq', '0.01')
        rows = dict(row for row in csv.reader(StringIO(out)))
        self.assertEqual(status, 0)
        self.assertEqual(rows['name'], 'value')
        self.assertAlmostEqual(float(rows['uncertainty_product']), 0.005)
        self.assertEqual(float(rows['setup.p0']), 10.0)

    def test_invalid_setup(self):
        """
        Test a ratio above 1 exits with status 2
        """
        status, _, _ = run('diffraction', '--p0', '10', '--q', '1.5', '--dq', '0.01')
        self.assertEqual(status, 2)
