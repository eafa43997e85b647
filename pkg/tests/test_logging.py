import logging

import pytest

from utils.logging_config import parse_level, setup_logging


@pytest.fixture
def scratch_logger():
    name = "cyclo_slv.tests.scratch"
    yield name
    logger = logging.getLogger(name)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


def test_parse_level():
    assert parse_level("debug") == logging.DEBUG
    assert parse_level("WARNING") == logging.WARNING
    assert parse_level("nonsense") == logging.INFO
    assert parse_level(15) == 15


def test_file_and_console_handlers(tmp_path, scratch_logger):
    log_file = tmp_path / "logs" / "run.log"
    logger = setup_logging(str(log_file), module_name=scratch_logger, level="debug")
    assert logger.level == logging.DEBUG
    assert len(logger.handlers) == 2
    logger.debug("hello from the test")
    for handler in logger.handlers:
        handler.flush()
    assert "hello from the test" in log_file.read_text()


def test_console_only_and_reconfigure(scratch_logger):
    logger = setup_logging(None, module_name=scratch_logger)
    assert len(logger.handlers) == 1
    assert isinstance(logger.handlers[0], logging.StreamHandler)
    again = setup_logging("", module_name=scratch_logger, level=logging.ERROR)
    assert again is logger
    assert len(again.handlers) == 1
    assert again.level == logging.ERROR
