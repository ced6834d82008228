"""
Test suite for the command-line interface: output formats, labels,
exit codes and configuration precedence.
"""
import contextlib
import csv
import io
import json
import os
import unittest
from pathlib import Path
from unittest.mock import patch
import sys

sys.path.insert(0, str(Path(__file__).parent.parent))

from schwinger.cli import main


def run(*argv):
    """Call the CLI and capture (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


class TestCommands(unittest.TestCase):

    def test_factor_json(self):
        code, out, _ = run('factor', '105', '--format', 'json')
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertEqual([c['m'] for c in data['constituents']], [3, 5, 7])
        self.assertEqual([c['N'] for c in data['constituents']], [2, 1, 1])

    def test_factor_one_notes_empty_table(self):
        code, out, err = run('factor', '1')
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines(), ['p  n  m  L  N'])
        self.assertIn('M = 1 has no prime-power constituents', err)
        code, out, _ = run('factor', '1', '--format', 'json')
        data = json.loads(out)
        self.assertEqual(data['constituents'], [])
        self.assertIn('no prime-power constituents', data['note'])

    def test_splits_csv(self):
        code, out, _ = run('splits', '12', '--format', 'csv')
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines(), ['M1,M2,L1,L2,N1,N2', '1,12,12,1,0,1', '3,4,4,3,1,3'])

    def test_roots_table(self):
        code, out, _ = run('roots', '24')
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(len(lines), 9)
        self.assertEqual(sum('exotic' in line for line in lines), 4)

    def test_basis_one_based_by_default(self):
        code, out, _ = run('basis', '6', '--type', 'kq', '--split', '2,3', '--format', 'json')
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertTrue(data['one_based'])
        labels = [s['label'] for s in data['states']]
        self.assertIn([2, 3], labels)
        self.assertNotIn([0, 0], labels)
        entry = [s for s in data['states'] if s['label'] == [1, 1]][0]
        self.assertEqual(entry['support'], [1, 4])
        self.assertEqual(entry['phase_exponents'], [3, 0])

    def test_basis_zero_based(self):
        code, out, _ = run('basis', '6', '--type', 'kq', '--split', '2,3',
                           '--format', 'json', '--zero-based')
        self.assertEqual(code, 0)
        self.assertIn([0, 0], [s['label'] for s in json.loads(out)['states']])

    def test_basis_table_renders_phases(self):
        code, out, _ = run('basis', '6', '--type', 'kq', '--split', '2,3')
        self.assertEqual(code, 0)
        self.assertIn('1:3/6 4:0/6', out)

    def test_overlap_table(self):
        code, out, _ = run('overlap', '15', '--left', 'kq', '--right', 'KQ',
                           '--split', '3,5', '--format', 'json')
        self.assertEqual(code, 0)
        overlaps = json.loads(out)['overlaps']
        self.assertEqual(len(overlaps), 225)
        self.assertTrue(all(o['magnitude_squared'] == '1/15' for o in overlaps))
        self.assertTrue(all(o['phase'].endswith('/15') for o in overlaps))

    def test_rows_follow_one_based_labels(self):
        code, out, _ = run('basis', '6', '--type', 'kq', '--split', '2,3', '--format', 'csv')
        self.assertEqual(code, 0)
        rows = list(csv.reader(io.StringIO(out)))[1:]
        self.assertEqual([r[0] for r in rows], ['1,1', '1,2', '1,3', '2,1', '2,2', '2,3'])

        code, out, _ = run('overlap', '6', '--left', 'kq', '--right', 'KQ',
                           '--split', '2,3', '--format', 'json')
        self.assertEqual(code, 0)
        keys = [(tuple(map(int, o['left'].split(','))), tuple(map(int, o['right'].split(','))))
                for o in json.loads(out)['overlaps']]
        self.assertEqual(keys, sorted(keys))
        self.assertEqual(keys[0], ((1, 1), (1, 1)))

        code, out, _ = run('localize', '15', '--split', '3,5', '--format', 'json')
        self.assertEqual(code, 0)
        labels = [row['label'] for row in json.loads(out)['momentum_side']]
        self.assertEqual(labels, sorted(labels))
        self.assertEqual(labels[0], [1, 1])

    def test_overlap_sample_is_seeded(self):
        args = ('overlap', '15', '--left', 'complete', '--right', 'complete-momentum',
                '--sample', '10', '--seed', '7', '--format', 'json')
        first, second = run(*args), run(*args)
        self.assertEqual(len(json.loads(first[1])['overlaps']), 10)
        self.assertEqual(first[1], second[1])

    def test_check_reports_json(self):
        code, out, _ = run('check', '15', '--checks', 'clock-shift-commutator,unit-root-set')
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertEqual(report['summary'], {'pass': 2, 'fail': 0, 'skipped': 0})
        self.assertEqual([r['check_id'] for r in report['results']],
                         ['clock-shift-commutator', 'unit-root-set'])

    def test_products(self):
        code, out, _ = run('products', '105', '--format', 'json')
        self.assertEqual(code, 0)
        self.assertEqual(len(json.loads(out)['products']), 8)

    def test_localize(self):
        code, out, _ = run('localize', '15', '--split', '3,5', '--q1', '2', '--format', 'json')
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertTrue(data['exact_delta_structure'])
        self.assertEqual(data['q1'], 2)


class TestErrors(unittest.TestCase):

    def test_non_coprime_split(self):
        code, out, err = run('basis', '12', '--type', 'kq', '--split', '2,6')
        self.assertEqual(code, 2)
        self.assertEqual(out, '')
        self.assertIn('relatively prime', err)

    def test_missing_split(self):
        code, _, err = run('basis', '12', '--type', 'q1q2')
        self.assertEqual(code, 2)
        self.assertIn('split', err)

    def test_unknown_check(self):
        code, _, err = run('check', '15', '--checks', 'no-such-check')
        self.assertEqual(code, 2)
        self.assertIn('no-such-check', err)

    def test_invalid_modulus(self):
        code, _, _ = run('factor', '0')
        self.assertEqual(code, 2)

    def test_localize_label_range(self):
        code, _, _ = run('localize', '15', '--split', '3,5', '--q1', '4')
        self.assertEqual(code, 2)

    def test_argparse_usage_error(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                main(['basis', '12'])
        self.assertEqual(ctx.exception.code, 2)


class TestConfiguration(unittest.TestCase):

    def test_flag_overrides_environment(self):
        with patch.dict(os.environ, {'SCHWINGER_MAX_DENSE': '100000'}):
            code, _, _ = run('basis', '30', '--type', 'complete', '--max-dense', '10')
        self.assertEqual(code, 2)

    def test_environment_budget(self):
        with patch.dict(os.environ, {'SCHWINGER_MAX_DENSE': '10'}):
            code, _, err = run('basis', '30', '--type', 'complete')
        self.assertEqual(code, 2)
        self.assertIn('Refusing', err)

    def test_invalid_environment_value(self):
        with patch.dict(os.environ, {'SCHWINGER_MAX_PAIRS': 'many'}):
            code, _, err = run('factor', '6')
        self.assertEqual(code, 2)
        self.assertIn('SCHWINGER_MAX_PAIRS', err)

    def test_invalid_log_level(self):
        code, _, _ = run('factor', '6', '--log-level', 'LOUD')
        self.assertEqual(code, 2)


if __name__ == '__main__':
    unittest.main()
