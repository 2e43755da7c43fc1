#!/usr/bin/env python3
"""
Basic test script for the wave asymptotics toolkit
Tests configuration, parameter parsing, CSV export and numerical helpers
"""

import sys
import os
import math
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))


class TestConfigManager(unittest.TestCase):
    """Test configuration loading and validation"""

    def setUp(self):
        """Set up test environment"""
        from config.settings import ConfigManager, load_config
        from utils.errors import ConfigError
        self.ConfigManager = ConfigManager
        self.load_config = load_config
        self.ConfigError = ConfigError
        self.tmp = tempfile.TemporaryDirectory()
        self.tmp_path = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_defaults(self):
        """Test built-in defaults are valid"""
        config = self.ConfigManager()
        self.assertEqual(config.get('ode.tol'), 1e-10)
        self.assertEqual(config.get('recurrence.n_max'), 2000)
        self.assertEqual(config.validate_config(), [])

    def test_dotted_access(self):
        """Test dotted-key get and set"""
        config = self.ConfigManager()
        config.set('ode.tol', '1e-12')
        self.assertEqual(config.get('ode.tol'), 1e-12)
        self.assertIsNone(config.get('ode.missing'))
        self.assertEqual(config.get('nowhere.at.all', 7), 7)

    def test_key_value_file(self):
        """Test line-oriented key = value configuration"""
        path = self.tmp_path / 'run.cfg'
        path.write_text("# run settings\node.tol = 1e-11\nsweep.n_points = 5  # coarse\n")
        config = self.load_config(path)
        self.assertEqual(config.get('ode.tol'), 1e-11)
        self.assertEqual(config.get('sweep.n_points'), 5)

    def test_yaml_file(self):
        """Test YAML mapping configuration"""
        path = self.tmp_path / 'run.yaml'
        path.write_text("recurrence:\n  n_max: 500\nacceptance:\n  fit_tol: 1.0e-4\n")
        config = self.load_config(path)
        self.assertEqual(config.get('recurrence.n_max'), 500)
        self.assertEqual(config.get('acceptance.fit_tol'), 1e-4)

    def test_invalid_values(self):
        """Test validation rejects out-of-range settings"""
        config = self.ConfigManager({'ode': {'tol': 1e-3}, 'recurrence.n_max': 5000})
        errors = config.validate_config()
        self.assertEqual(len(errors), 2)

        with self.assertRaises(self.ConfigError):
            self.load_config(overrides={'sweep.workers': 0})

    def test_missing_file(self):
        """Test a missing configuration file"""
        with self.assertRaises(self.ConfigError):
            self.load_config(self.tmp_path / 'absent.cfg')

    def test_save_round_trip(self):
        """Test saved configuration loads back unchanged"""
        config = self.ConfigManager({'ode.tol': 1e-12})
        path = self.tmp_path / 'saved.yaml'
        config.save_config(path)
        self.assertEqual(self.load_config(path).get('ode.tol'), 1e-12)


class TestParameterParser(unittest.TestCase):
    """Test parameter parsing functionality"""

    def setUp(self):
        """Set up test environment"""
        from utils.param_parser import ParameterParser
        self.parser = ParameterParser()

    def test_fraction_parsing(self):
        """Test rational parsing"""
        self.assertEqual(self.parser.parse_fraction("1/6"), Fraction(1, 6))
        self.assertEqual(self.parser.parse_fraction(" 3 / 24 "), Fraction(1, 8))
        self.assertEqual(self.parser.parse_fraction("2"), Fraction(2))
        self.assertEqual(self.parser.parse_fraction(0.25), Fraction(1, 4))
        self.assertEqual(self.parser.parse_fraction(1.0 / 3.0), Fraction(1, 3))

    def test_invalid_fractions(self):
        """Test malformed rationals"""
        for text in ("1/0", "one third", "1.5/2", True):
            with self.assertRaises(ValueError):
                self.parser.parse_fraction(text)

    def test_range_parsing(self):
        """Test lo:hi ranges"""
        self.assertEqual(self.parser.parse_range("0.5:0.95"), (0.5, 0.95))
        with self.assertRaises(ValueError):
            self.parser.parse_range("0.9:0.5")
        with self.assertRaises(ValueError):
            self.parser.parse_range("0.5")

    def test_line_parsing(self):
        """Test key = value lines"""
        parsed = self.parser.parse_lines("ode.tol = 1e-10\nsigma1 = 1/6\n\n# note\nflag = true\n")
        self.assertEqual(parsed, {'ode.tol': 1e-10, 'sigma1': '1/6', 'flag': True})

        with self.assertRaises(ValueError):
            self.parser.parse_lines("not an assignment")

    def test_display_format(self):
        """Test parameter display formatting"""
        self.assertEqual(self.parser.format_for_display({'b': 2, 'a': 1}), "a=1 | b=2")
        self.assertEqual(self.parser.format_for_display({}), "No parameters")


class TestCsvExport(unittest.TestCase):
    """Test CSV and metadata export"""

    def setUp(self):
        """Set up test environment"""
        from utils import csv_export
        self.csv_export = csv_export
        self.tmp = tempfile.TemporaryDirectory()
        self.tmp_path = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_cell_format(self):
        """Test cell formatting"""
        fmt = self.csv_export.format_number
        self.assertEqual(fmt(None), '')
        self.assertEqual(fmt(float('nan')), '')
        self.assertEqual(fmt(1.0 / 3.0), '0.333333333333333')
        self.assertEqual(fmt(Fraction(1, 6)), '1/6')
        self.assertEqual(fmt(True), 'true')
        self.assertEqual(fmt(12), '12')

    def test_write_csv(self):
        """Test header, blank cells and LF line endings"""
        path = self.csv_export.write_csv(self.tmp_path / 'out.csv', ['x', 'y'],
                                         [{'x': 1.5, 'y': None}, {'x': 2.0}])
        self.assertEqual(path.read_bytes(), b"x,y\n1.5,\n2,\n")

    def test_complex_columns(self):
        """Test complex arrays split into real and imaginary columns"""
        import numpy as np
        path = self.csv_export.write_complex_columns(
            self.tmp_path / 'phi.csv', {'w': np.array([0.0, 1.0]), 'phi': np.array([1 + 2j, 3 - 4j])})
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], 'w,re_phi,im_phi')
        self.assertEqual(lines[2], '1,3,-4')

    def test_metadata_sidecar(self):
        """Test metadata sidecar has sorted keys"""
        csv_path = self.tmp_path / 'sweep.csv'
        sidecar = self.csv_export.write_metadata(csv_path, {'sigma1': Fraction(1, 4), 'eps': 0.15})
        self.assertEqual(sidecar.name, 'sweep.csv.meta.json')
        text = sidecar.read_text()
        self.assertLess(text.index('"eps"'), text.index('"sigma1"'))
        self.assertIn('"1/4"', text)


class TestNumerics(unittest.TestCase):
    """Test numerical helpers"""

    def setUp(self):
        """Set up test environment"""
        from utils import numerics
        self.numerics = numerics

    def test_log_upper(self):
        """Test negative reals take the upper-side argument"""
        value = complex(self.numerics.log_upper(-2.0))
        self.assertAlmostEqual(value.real, math.log(2.0), places=14)
        self.assertAlmostEqual(value.imag, math.pi, places=14)

    def test_extrapolate_limit(self):
        """Test extrapolation removes algebraic corrections"""
        import numpy as np
        ns = np.arange(100, 401)
        values = 2.5 + 3.0 / ns - 7.0 / ns ** 2
        limit, error = self.numerics.extrapolate_limit(ns, values, exponent=1.0, order=3)
        self.assertAlmostEqual(limit, 2.5, places=10)
        self.assertLess(error, 1e-8)

    def test_segment_integral(self):
        """Test Gauss-Legendre segment quadrature"""
        value = self.numerics.segment_integral(lambda z: z ** 2, 0j, 1 + 1j)
        self.assertAlmostEqual(abs(value - (1 + 1j) ** 3 / 3), 0.0, places=13)

    def test_wrap_angle(self):
        """Test angles map into (-pi, pi]"""
        self.assertAlmostEqual(self.numerics.wrap_angle(3 * math.pi), math.pi, places=12)
        self.assertAlmostEqual(self.numerics.wrap_angle(-0.5 * math.pi), -0.5 * math.pi, places=12)


if __name__ == '__main__':
    unittest.main()
