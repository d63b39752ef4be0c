from unittest import TestCase
from unittest.mock import patch
import os
import json
import tempfile
from calibrated_validity.cli_entry import _add_args, _overrides, main

USER_CONFIG_DIR = 'calibrated_validity.lib.config.user_config_dir'


class TestArguments(TestCase):

    def test_flags(self):
        arg = _add_args().parse_args(
            ['-d', 'simulate', '--scenario', 'scenario4', '--B', '5', '--A',
             '3', '--methods', 'complete, single', '--regime', 'perk'])
        self.assertTrue(arg.debug)
        self.assertEqual(arg.command, 'simulate')
        self.assertEqual((arg.b, arg.a), (5, 3))
        self.assertEqual(arg.methods, ['complete', 'single'])
        overrides = _overrides(arg)
        self.assertNotIn('debug', overrides)
        self.assertNotIn('command', overrides)
        self.assertIsNone(overrides['kmax'])

    def test_validate_flags(self):
        arg = _add_args().parse_args(['validate', '--data', 'x.csv',
                                      '--no-header', '--class-column'])
        self.assertEqual(arg.data_csv, 'x.csv')
        self.assertFalse(arg.header)
        self.assertTrue(arg.class_column)
        arg = _add_args().parse_args(['validate', '--data', 'x.csv'])
        self.assertIsNone(arg.header)

    def test_command_required(self):
        with self.assertRaises(SystemExit):
            _add_args().parse_args([])


class TestMain(TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.TemporaryDirectory()
        self.patcher = patch(USER_CONFIG_DIR, return_value=os.path.join(
            self.tmp_dir.name, 'config'))
        self.patcher.start()

    def tearDown(self):
        self.patcher.stop()
        self.tmp_dir.cleanup()

    def test_simulate(self):
        out = os.path.join(self.tmp_dir.name, 'out')
        status = main(['simulate', '--scenario', 'scenario4',
                       '--methods', 'complete', '--kmax', '3',
                       '--replicates', '2', '--B', '1', '--A', '2',
                       '--indexes', 'asw,dunn', '--composites', 'a2',
                       '--out', out])
        self.assertEqual(status, 0)
        for name in ('results.csv', 'summary.txt', 'simulation.csv',
                     os.path.join('plots', 'a2.svg')):
            self.assertTrue(os.path.isfile(os.path.join(out, name)), name)

    def test_config_file_and_flag_precedence(self):
        out = os.path.join(self.tmp_dir.name, 'out')
        config_file = os.path.join(self.tmp_dir.name, 'run.json')
        with open(config_file, 'w') as f:
            json.dump({'scenario': 'scenario5', 'methods': ['single'],
                       'kmax': 3, 'B': 1, 'A': 2, 'indexes': ['dunn'],
                       'composites': [], 'out': 'ignored'}, f)
        status = main(['validate', '--config', config_file, '--out', out])
        self.assertEqual(status, 0)
        self.assertTrue(os.path.isfile(os.path.join(out, 'results.csv')))
        self.assertFalse(os.path.exists('ignored'))

    def test_errors_give_exit_status(self):
        self.assertEqual(main(['validate']), 1)
        self.assertEqual(main(['simulate', '--scenario', 'scenario1',
                               '--methods', 'spectral']), 1)
