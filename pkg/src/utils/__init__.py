"""
Utilities package for the wave asymptotics toolkit
Contains logging, errors, parameter parsing, numerical helpers and CSV export
"""

from .logger import setup_logging, RunLogger
from .errors import ToolkitError, ConfigError
from .param_parser import ParameterParser, parse_fraction
from .csv_export import write_csv, write_metadata

__all__ = ['setup_logging', 'RunLogger', 'ToolkitError', 'ConfigError', 'ParameterParser',
           'parse_fraction', 'write_csv', 'write_metadata']
