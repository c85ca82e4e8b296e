# This file contains unit tests for the bit-string helpers, the settings
# loader and the logger.

import io
import json
import sys
import os

import pytest
from hypothesis import given
import hypothesis.strategies as st

# Add the 'src' directory to the Python path to allow importing library modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from libs.interfaces.errors import ConfigError, DomainError, RangeError
from libs.interfaces.typing import as_index, is_bits
from libs.utils.bits import (
    BitReader, BitWriter, bits_to_int, field_width, frame, gamma_encode, gamma_length, int_to_bits, unframe,
)
from libs.utils.configs import Settings, loadsConfig, savesConfig
from libs.utils.pylog import Logger, LogLevel, configure, getLogger, root

REPO_ROOT: str = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))


# Tests the width of fixed-size fields.
def test_field_width() -> None:
    """
    A field holding `count` values needs ceil(log2 count) bits; one value needs none.
    """
    assert field_width(1) == 0
    assert field_width(2) == 1
    assert field_width(720) == 10
    assert field_width(1024) == 10
    assert field_width(1025) == 11
    with pytest.raises(DomainError):
        field_width(0)


# Tests fixed-width integer fields.
def test_int_to_bits() -> None:
    """
    Values are written most significant bit first and rejected when too wide.
    """
    assert int_to_bits(5, 4) == "0101"
    assert int_to_bits(0, 0) == ""
    assert bits_to_int("0101") == 5
    assert bits_to_int("") == 0
    with pytest.raises(RangeError):
        int_to_bits(16, 4)


# Tests the Elias gamma code on small values.
def test_gamma_code() -> None:
    """
    Checks the textbook codewords and that the length formula matches.
    """
    assert gamma_encode(1) == "1"
    assert gamma_encode(2) == "010"
    assert gamma_encode(5) == "00101"
    for value in range(1, 200):
        assert len(gamma_encode(value)) == gamma_length(value)
    with pytest.raises(DomainError):
        gamma_encode(0)


# Tests reading back a mixed sequence of fields.
@given(st.lists(st.integers(min_value=0, max_value=10 ** 6), min_size=1, max_size=20))
def test_writer_reader_fields(values) -> None:
    """
    Gamma-coded values followed by a fixed-width field read back in order.
    """
    writer: BitWriter = BitWriter()
    for v in values:
        writer.write_gamma(v)
    writer.write_uint(3, 2)
    reader: BitReader = BitReader(writer.getvalue())
    assert [reader.read_gamma() for _ in values] == values
    assert reader.read_uint(2) == 3
    assert reader.at_end()


# Tests that framed payloads are self-delimiting.
def test_frame_rejects_trailing_bits() -> None:
    """
    unframe must consume the payload exactly; extra or missing bits are errors.
    """
    payload: str = "1100101"
    assert unframe(frame(payload)) == payload
    assert unframe(frame("")) == ""
    with pytest.raises(DomainError):
        unframe(frame(payload) + "0")
    with pytest.raises(DomainError):
        unframe(frame(payload)[:-1])


# Tests that a reader refuses to run past the end.
def test_reader_underflow() -> None:
    """
    Asking for more bits than remain raises DomainError.
    """
    reader: BitReader = BitReader("101")
    reader.read_bits(2)
    with pytest.raises(DomainError):
        reader.read_bits(2)


# Tests the index and bit-string validators.
def test_typing_helpers() -> None:
    """
    as_index accepts nonnegative ints only; is_bits accepts '0'/'1' strings.
    """
    assert as_index(7) == 7
    with pytest.raises(TypeError):
        as_index(True)
    with pytest.raises(ValueError):
        as_index(-1)
    assert is_bits("0101")
    assert is_bits("")
    assert not is_bits("012")


# Tests that the shipped configuration file matches the defaults.
def test_shipped_config_matches_defaults() -> None:
    """
    data/config.json spells out every default, so loading it changes nothing.
    """
    settings: Settings = loadsConfig(os.path.join(REPO_ROOT, 'data', 'config.json'))
    assert settings == Settings()
    assert settings.cost_model.c_machine == 64
    assert settings.harness.t == 1024


# Tests loading a missing settings file.
def test_missing_config_returns_defaults(tmp_path) -> None:
    """
    A missing file is not an error: the defaults apply.
    """
    assert loadsConfig(str(tmp_path / 'absent.json')) == Settings()


# Tests saving and reloading settings.
def test_save_then_load(tmp_path) -> None:
    """
    savesConfig writes JSON that loadsConfig reads back unchanged, creating
    the directory on the way.
    """
    target: str = str(tmp_path / 'nested' / 'config.json')
    settings: Settings = Settings.model_validate({"cost_model": {"c_machine": 8}, "logging": {"level": "info"}})
    savesConfig(settings, target)
    loaded: Settings = loadsConfig(target)
    assert loaded.cost_model.c_machine == 8
    assert loaded.logging.level == "INFO"


# Tests that values of the wrong shape are rejected.
def test_invalid_config_raises(tmp_path) -> None:
    """
    A negative surcharge or an unknown log level is a ConfigError.
    """
    bad: str = str(tmp_path / 'bad.json')
    with open(bad, 'w', encoding='utf-8') as f:
        json.dump({"cost_model": {"c_machine": -1}}, f)
    with pytest.raises(ConfigError):
        loadsConfig(bad)
    with open(bad, 'w', encoding='utf-8') as f:
        json.dump({"logging": {"level": "LOUD"}}, f)
    with pytest.raises(ConfigError):
        loadsConfig(bad)


# Tests that loggers defer to the root level and stream.
def test_logger_levels() -> None:
    """
    A child logger without its own level follows the level set by configure,
    and writes through the root stream.
    """
    stream: io.StringIO = io.StringIO()
    logger: Logger = Logger('tests.levels')
    try:
        configure('INFO', stream)
        logger.debug('hidden')
        logger.info('shown {}', 1)
        configure(LogLevel.ERROR, stream)
        logger.warning('hidden too')
    finally:
        configure('WARNING')
    assert stream.getvalue() == "[INFO] tests.levels: shown 1\n"


# Tests handlers and filters on a logger.
def test_logger_handlers_and_filters() -> None:
    """
    Records go to the handler, unless a filter drops them.
    """
    records = []
    logger: Logger = Logger('tests.handlers', LogLevel.DEBUG)
    logger.add_handler(records.append)
    logger.add_filter(lambda record: 'skip' not in record['message'])
    logger.debug('kept')
    logger.info('skip me')
    assert [r['message'] for r in records] == ['kept']
    assert records[0]['level'] is LogLevel.DEBUG


# Tests the logger registry.
def test_get_logger_is_shared() -> None:
    """
    getLogger returns one logger per name, parented to the root.
    """
    first: Logger = getLogger('tests.shared')
    assert getLogger('tests.shared') is first
    assert getLogger('tests.other') is not first
    assert first.parent is root
