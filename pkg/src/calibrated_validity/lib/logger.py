"""A module for setting up the logger
"""
from typing import Optional, Union
import pathlib
import logging

LOGGER_NAME = 'calibrated_validity'


def setup_logger(debug: bool = False,
                 file_path: Optional[Union[str, pathlib.Path]] = None) \
        -> logging.Logger:
    """Set up the logger for the application, writing to the console and
    optionally to a file. Calling it again replaces the handlers.

    :param debug: If debug messages should be logged
    :param file_path: The file to copy the log to
    :return: A Logger object
    """
    log_fmt = logging.Formatter('%(levelname)s - %(message)s')
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(log_fmt)
    logger.addHandler(console_handler)
    if file_path:
        file_handler = logging.FileHandler(file_path)
        file_handler.setFormatter(log_fmt)
        logger.addHandler(file_handler)
    if debug:
        logger.setLevel(logging.DEBUG)
    else:
        logger.setLevel(logging.INFO)
    return logger
