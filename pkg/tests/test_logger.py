from unittest import TestCase
from logging import DEBUG, INFO, FileHandler, Logger, StreamHandler
import os
import tempfile
from calibrated_validity.lib.logger import LOGGER_NAME, setup_logger


class TestLoggerDebug(TestCase):

    def setUp(self):
        self.logger = setup_logger(True)

    def tearDown(self):
        setup_logger()

    def test_logger(self):
        self.assertIsInstance(self.logger, Logger)
        self.assertEqual(self.logger.name, LOGGER_NAME)

    def test_level(self):
        self.assertEqual(self.logger.level, DEBUG)

    def test_handlers(self):
        self.assertEqual(len(self.logger.handlers), 1)
        self.assertIsInstance(self.logger.handlers[0], StreamHandler)


class TestLoggerInfo(TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.TemporaryDirectory()
        self.log_file = os.path.join(self.tmp_dir.name, 'run.log')
        self.logger = setup_logger(False, file_path=self.log_file)

    def tearDown(self):
        setup_logger()
        self.tmp_dir.cleanup()

    def test_level(self):
        self.assertEqual(self.logger.level, INFO)

    def test_file_output(self):
        self.logger.debug('Debug message')
        self.logger.info('Info message')
        self.logger.warning('Warning message')
        for handler in self.logger.handlers:
            handler.flush()
        with open(self.log_file) as f:
            log_txt = f.read()
        self.assertEqual(log_txt, 'INFO - Info message\n'
                                  'WARNING - Warning message\n')

    def test_handlers_replaced(self):
        logger = setup_logger(False, file_path=self.log_file)
        self.assertEqual(len(logger.handlers), 2)
        self.assertEqual(sum(isinstance(h, FileHandler)
                             for h in logger.handlers), 1)
