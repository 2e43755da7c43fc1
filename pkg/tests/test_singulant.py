#!/usr/bin/env python3
"""
Tests for singulant quadrature and Stokes-line tracing
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


class TestSingulant(unittest.TestCase):
    """Test chi by quadrature against closed forms"""

    def setUp(self):
        """Set up test environment"""
        from asymptotics import singulant
        from model.forcing import Separated, Single
        from utils.errors import BranchCutHit, DomainError, PathTooClose
        self.singulant = singulant
        self.Separated = Separated
        self.merged = Single(a=0.5, sigma=Fraction(1, 3))
        self.BranchCutHit = BranchCutHit
        self.DomainError = DomainError
        self.PathTooClose = PathTooClose

    def test_closed_form_agreement(self):
        """Test quadrature matches the sigma = 1/3 closed form"""
        for w in (0.3 + 0.2j, -0.8 + 0.5j, -0.2 + 1.5j, 1.2 + 0.05j):
            numeric = self.singulant.chi_numeric(self.merged, 1, w)
            exact = self.singulant.chi_merged(w, 0.5)
            self.assertLess(abs(numeric - exact), 1e-8)

    def test_path_independence(self):
        """Test two admissible paths give the same value"""
        w = 0.4 + 0.3j
        direct = self.singulant.chi_numeric(self.merged, 1, w, waypoints=[-0.5 + 0.1j])
        detour = self.singulant.chi_numeric(self.merged, 1, w, waypoints=[-0.5 + 1.0j, 1.0 + 1.0j])
        self.assertLess(abs(direct - detour), 1e-9)

    def test_far_field_real_part(self):
        """Test Re chi on the positive real axis"""
        self.assertAlmostEqual(self.singulant.far_field_re_chi(self.merged), 0.5 * math.pi, places=14)
        value = self.singulant.chi_numeric(self.merged, 1, 2.0)
        self.assertAlmostEqual(value.real, 0.5 * math.pi, places=9)

        spec = self.Separated(a1=0.75, a2=0.35, sigma1=Fraction(1, 4), sigma2=Fraction(1, 4))
        expected = 3 * math.pi * (0.25 * 0.75 + 0.25 * 0.35)
        self.assertAlmostEqual(self.singulant.far_field_re_chi(spec), expected, places=14)
        self.assertAlmostEqual(self.singulant.chi_numeric(spec, 1, 3.0).real, expected, places=8)

    def test_chi_prime(self):
        """Test chi' = i / q_s^3"""
        from model.forcing import eval_qs
        w = 0.5 + 0.5j
        expected = 1j / complex(eval_qs(self.merged, w)) ** 3
        self.assertAlmostEqual(abs(complex(self.singulant.chi_prime(self.merged, w)) - expected),
                               0.0, places=13)

    def test_branch_cut(self):
        """Test the closed form rejects the cut"""
        with self.assertRaises(self.BranchCutHit):
            self.singulant.chi_merged(-0.2, 0.5)

    def test_path_clearance(self):
        """Test paths through the cut or a singularity are refused"""
        with self.assertRaises(self.PathTooClose):
            self.singulant.chi_numeric(self.merged, 1, 0.3 + 0.2j, waypoints=[-0.5 - 0.2j])
        with self.assertRaises(self.PathTooClose):
            self.singulant.chi_numeric(self.merged, 1, 0.3 + 0.2j, waypoints=[0.0])

    def test_near_merged_second_singulant(self):
        """Test Re chi_2 for the near-merged pair"""
        value = self.singulant.re_chi2_separated(0.5, 0.5, 0.1)
        self.assertAlmostEqual(value, math.pi * 0.5 * math.sqrt(1 - 0.1), places=14)
        with self.assertRaises(self.DomainError):
            self.singulant.re_chi2_separated(0.5, 2.0, 0.1)


class TestStokesLines(unittest.TestCase):
    """Test Stokes-line seeding and tracing"""

    def setUp(self):
        """Set up test environment"""
        from asymptotics import singulant
        from model.forcing import Separated, Single
        self.singulant = singulant
        self.merged = Single(a=0.5, sigma=Fraction(1, 3))
        self.separated = Separated(a1=0.75, a2=0.35, sigma1=Fraction(1, 4), sigma2=Fraction(1, 4))
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_seed_angle(self):
        """Test the single admissible direction for sigma = 1/3"""
        angles = self.singulant.stokes_seed_angles(self.merged, 1)
        self.assertEqual(len(angles), 1)
        self.assertAlmostEqual(angles[0], math.pi / 4, places=12)

    def test_merged_crossing(self):
        """Test the traced line meets the axis where Im chi vanishes"""
        from scipy.optimize import brentq
        path = self.singulant.trace_stokes_line(self.merged, 1)
        self.assertTrue(path.crosses_positive_axis)
        self.assertEqual(path.terminated_by, self.singulant.StokesTermination.CROSSED_REAL_AXIS)

        root = brentq(lambda x: self.singulant.chi_merged(complex(x, 0.0), 0.5).imag, 0.01, 1.0)
        self.assertAlmostEqual(path.crossing, root, delta=2e-3)

    def test_line_properties(self):
        """Test Im chi stays zero and Re chi grows along the line"""
        import numpy as np
        path = self.singulant.trace_stokes_line(self.merged, 1)
        self.assertLess(float(np.max(np.abs(path.chi[:-1].imag))), 1e-9)
        self.assertTrue(np.all(np.diff(path.chi[:-1].real) > 0))
        self.assertGreater(path.arc_length, 0.5)

    def test_separated_lines(self):
        """Test both separated singularities send a line across w > 0"""
        paths = self.singulant.trace_all_stokes_lines(self.separated)
        crossings = {p.k: p.crossing for p in paths if p.crosses_positive_axis}
        self.assertEqual(set(crossings), {1, 2})
        self.assertGreater(crossings[1], crossings[2])

    def test_step_limit(self):
        """Test the step is capped at 0.01 a_k"""
        with self.assertRaises(ValueError):
            self.singulant.trace_stokes_line(self.merged, 1, step=0.1)

    def test_export(self):
        """Test Stokes path CSV columns"""
        path = self.singulant.trace_stokes_line(self.merged, 1)
        out = path.to_csv(Path(self.tmp.name) / 'stokes.csv')
        lines = out.read_text().splitlines()
        self.assertEqual(lines[0], 're_w,im_w,re_chi,im_chi')
        self.assertEqual(len(lines), len(path.points) + 1)


if __name__ == '__main__':
    unittest.main()
