"""
Parameter parser for the toolkit
Parses rationals, numeric ranges and line-oriented key = value configuration text
"""

import re
import logging
from fractions import Fraction
from typing import Any, Dict, Tuple, Union

import yaml

RationalLike = Union[Fraction, int, float, str]


class ParameterParser:
    """Parses command-line and config-file parameter text into typed values"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

        self.patterns = {
            'fraction': re.compile(r'^\s*([+-]?\d+)\s*/\s*(\d+)\s*$'),
            'integer': re.compile(r'^\s*([+-]?\d+)\s*$'),
            'range': re.compile(r'^\s*([^:]+):([^:]+)\s*$'),
            'assignment': re.compile(r'^\s*([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$'),
            'comment': re.compile(r'\s+#.*$'),
        }

    def parse_fraction(self, text: RationalLike) -> Fraction:
        """
        Parse an exact rational

        Args:
            text: "p/q", an integer string, a Fraction, an int, or a float

        Returns:
            Fraction: Exact rational value

        Raises:
            ValueError: If the text is not a rational
        """
        if isinstance(text, Fraction):
            return text
        if isinstance(text, bool):
            raise ValueError(f"not a rational: {text!r}")
        if isinstance(text, int):
            return Fraction(text)
        if isinstance(text, float):
            # floats come from YAML; recover the intended small-denominator rational
            return Fraction(text).limit_denominator(1000)

        fraction_match = self.patterns['fraction'].match(str(text))
        if fraction_match:
            denominator = int(fraction_match.group(2))
            if denominator == 0:
                raise ValueError(f"zero denominator in {text!r}")
            return Fraction(int(fraction_match.group(1)), denominator)

        integer_match = self.patterns['integer'].match(str(text))
        if integer_match:
            return Fraction(int(integer_match.group(1)))

        raise ValueError(f"not a rational of the form p/q: {text!r}")

    def parse_range(self, text: str) -> Tuple[float, float]:
        """
        Parse a "lo:hi" range

        Returns:
            tuple: (lo, hi) with lo <= hi
        """
        range_match = self.patterns['range'].match(text)
        if not range_match:
            raise ValueError(f"not a range of the form lo:hi: {text!r}")
        lo, hi = float(range_match.group(1)), float(range_match.group(2))
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return lo, hi

    def parse_lines(self, text: str) -> Dict[str, Any]:
        """
        Parse line-oriented "key = value" text

        Keys may be dotted ("ode.tol"); values are interpreted with YAML scalar rules,
        so "1e-10" is a float, "true" a bool and "1/3" stays a string for parse_fraction.
        Blank lines and "#" comments are skipped.

        Args:
            text: File contents

        Returns:
            dict: Flat mapping of dotted keys to values
        """
        parsed = {}

        for line_number, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.strip()
            if not line or line.startswith('#'):
                continue

            line = self.patterns['comment'].sub('', line)
            assignment = self.patterns['assignment'].match(line)
            if not assignment:
                raise ValueError(f"line {line_number}: expected 'key = value', got {raw_line!r}")

            key, value_text = assignment.group(1), assignment.group(2)
            try:
                value = yaml.safe_load(value_text) if value_text else None
            except yaml.YAMLError:
                value = value_text
            # YAML reads 1e-10 as a string
            if isinstance(value, str):
                try:
                    value = float(value)
                except ValueError:
                    pass
            parsed[key] = value

        self.logger.debug(f"Parsed {len(parsed)} parameters")
        return parsed

    def format_for_display(self, params: Dict[str, Any]) -> str:
        """
        Format parameters as a one-line summary

        Args:
            params: Parameter dictionary

        Returns:
            str: "key=value | ..." in sorted key order
        """
        if not params:
            return "No parameters"
        return " | ".join(f"{key}={params[key]}" for key in sorted(params))


_default_parser = ParameterParser()


def parse_fraction(text: RationalLike) -> Fraction:
    """Module-level shortcut for ParameterParser.parse_fraction"""
    return _default_parser.parse_fraction(text)
