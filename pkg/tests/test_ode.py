#!/usr/bin/env python3
"""
Tests for the complex ODE integrator and far-field wave measurement
"""

import sys
import os
import math
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

import numpy as np

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

SLOW = os.environ.get('TOOLKIT_SLOW_TESTS') == '1'


def synthetic_trajectory(amplitude: float, epsilon: float = 0.15, w0: float = 1.0,
                         w_end: float = 20.0):
    """Background plus a known oscillation A q^-4 cos(theta), theta = int dw/(eps q^3)"""
    from scipy.integrate import cumulative_trapezoid
    from model.forcing import Single, eval_qs, eval_qs_prime
    from model.ode import Trajectory

    spec = Single(a=0.5, sigma=Fraction(1, 3))
    w = np.linspace(w0, w_end, int((w_end - w0) / (2 * math.pi * epsilon / 32)) + 1)
    q = np.real(eval_qs(spec, w))
    dq = np.real(eval_qs_prime(spec, w))
    background = q ** 2 + 2j * epsilon * q ** 4 * dq
    theta = cumulative_trapezoid(1.0 / (epsilon * q ** 3), w, initial=0.0)
    phi = background + amplitude * q ** -4 * np.cos(theta + 0.3)
    return Trajectory(w=w, phi=phi, epsilon=epsilon, spec=spec, w0=w0, w_end=w_end)


class TestInitialCondition(unittest.TestCase):
    """Test the starting value of the integration"""

    def setUp(self):
        """Set up test environment"""
        from model.forcing import Separated, eval_qs, eval_qs_prime
        from model import ode
        self.ode = ode
        self.spec = Separated(a1=0.75, a2=0.25, sigma1=Fraction(1, 4), sigma2=Fraction(1, 4))
        self.eval_qs = eval_qs
        self.eval_qs_prime = eval_qs_prime

    def test_background_start(self):
        """Test phi(w0) equals the two-term background"""
        epsilon, w0 = 0.1, 1e-5
        q = complex(self.eval_qs(self.spec, w0))
        dq = complex(self.eval_qs_prime(self.spec, w0))
        expected = q ** 2 + 2j * epsilon * q ** 4 * dq
        self.assertAlmostEqual(abs(self.ode.initial_condition(self.spec, epsilon, w0) - expected),
                               0.0, places=15)

    def test_default_end(self):
        """Test the default integration length"""
        self.assertEqual(self.ode.default_w_end(self.spec), 15.0)
        from model.forcing import Single
        self.assertEqual(self.ode.default_w_end(Single(a=0.2, sigma=Fraction(1, 3))), 10.0)

    def test_argument_validation(self):
        """Test invalid integrator arguments"""
        with self.assertRaises(ValueError):
            self.ode.integrate_phi(self.spec, 0.1, tol=1e-3)
        with self.assertRaises(ValueError):
            self.ode.integrate_phi(self.spec, -0.1)
        with self.assertRaises(ValueError):
            self.ode.integrate_phi(self.spec, 0.1, w0=2.0, w_end=1.0)


class TestWaveMeasurement(unittest.TestCase):
    """Test amplitude and wavelength extraction on synthetic data"""

    def setUp(self):
        """Set up test environment"""
        from model import ode
        from utils.errors import NoWaveDetected, WindowTooShort
        self.ode = ode
        self.NoWaveDetected = NoWaveDetected
        self.WindowTooShort = WindowTooShort

    def test_known_amplitude(self):
        """Test a known oscillation is recovered"""
        traj = synthetic_trajectory(2e-4)
        wave = self.ode.measure_wave(traj)
        self.assertLess(abs(wave.amplitude - 2e-4) / 2e-4, 1e-3)
        self.assertLess(abs(wave.fitted_amplitude - 2e-4) / 2e-4, 1e-6)
        self.assertGreaterEqual(wave.n_extrema, 3)

    def test_default_window(self):
        """Test the default window is the trailing 40 percent"""
        traj = synthetic_trajectory(1e-4)
        lo, hi = self.ode.default_window(traj)
        self.assertAlmostEqual(lo, 20.0 - 0.4 * 19.0, places=12)
        self.assertEqual(hi, 20.0)

    def test_no_wave(self):
        """Test a pure background is rejected"""
        traj = synthetic_trajectory(0.0)
        with self.assertRaises(self.NoWaveDetected):
            self.ode.measure_wave(traj)

    def test_short_window(self):
        """Test a window below three wavelengths"""
        traj = synthetic_trajectory(1e-4)
        with self.assertRaises(self.WindowTooShort):
            self.ode.measure_wave(traj, window=(18.0, 19.0))

    def test_window_outside(self):
        """Test a window outside the trajectory"""
        traj = synthetic_trajectory(1e-4)
        with self.assertRaises(ValueError):
            self.ode.measure_wave(traj, window=(0.5, 10.0))


class TestIntegration(unittest.TestCase):
    """Test integrating the ODE"""

    def setUp(self):
        """Set up test environment"""
        from model.forcing import Single
        from model import ode
        self.ode = ode
        self.spec = Single(a=0.5, sigma=Fraction(1, 3))
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_far_field_wave(self):
        """Test the far-field wavelength tends to 2 pi eps"""
        epsilon = 0.3
        traj = self.ode.integrate_phi(self.spec, epsilon, w_end=40.0, tol=1e-10)
        self.assertEqual(traj.w[0], traj.w0)
        self.assertAlmostEqual(traj.w[-1], 40.0, places=10)
        self.assertGreater(traj.n_evaluations, 0)

        wave = self.ode.measure_wave(traj)
        self.assertLess(abs(wave.wavelength - 2 * math.pi * epsilon) / (2 * math.pi * epsilon), 0.05)
        self.assertGreater(wave.amplitude, 0.0)

    def test_background_tracks_solution(self):
        """Test the solution stays close to the background before the wave grows"""
        traj = self.ode.integrate_phi(self.spec, 0.1, w_end=2.0)
        gap = np.abs(traj.phi - traj.background())
        self.assertLess(float(np.max(gap[:10])), 1e-2)

    def test_tolerance_and_start_point(self):
        """Test the measured amplitude does not depend on tol or w0"""
        epsilon = 0.15
        reference = self.ode.measure_wave(self.ode.integrate_phi(self.spec, epsilon, tol=1e-10))
        tighter = self.ode.measure_wave(self.ode.integrate_phi(self.spec, epsilon, tol=1e-11))
        self.assertLess(abs(tighter.amplitude / reference.amplitude - 1.0), 1e-2)
        for w0 in (1e-6, 1e-4):
            moved = self.ode.measure_wave(self.ode.integrate_phi(self.spec, epsilon, w0=w0,
                                                                 tol=1e-10))
            self.assertLess(abs(moved.amplitude / reference.amplitude - 1.0), 1e-2, msg=f"w0={w0}")

    def test_merged_amplitude(self):
        """Test the sigma = 1/3 wave at eps = 0.075 against the leading-order amplitude"""
        from asymptotics.amplitude import amp_single
        epsilon = 0.075
        traj = self.ode.integrate_phi(self.spec, epsilon, w_end=40.0, tol=1e-12)
        wave = self.ode.measure_wave(traj)
        predicted = amp_single(0.5, "1/3", epsilon, 0.351).amplitude
        self.assertAlmostEqual(predicted, 5.9e-9, delta=0.05e-9)
        # leading order overshoots by O(sqrt(eps/a)) at this eps
        self.assertLess(wave.amplitude, predicted)
        self.assertLess(abs(wave.amplitude / predicted - 1.0), 0.35)
        self.assertLess(abs(wave.fitted_amplitude / wave.amplitude - 1.0), 2e-2)

        # peak spacing follows the local wavelength 2 pi eps q_s^3 over the window
        lo, hi = wave.window
        w = np.linspace(lo, hi, 201)
        local = float(np.mean(2 * math.pi * epsilon * w / (w + 0.5)))
        self.assertLess(abs(wave.wavelength / local - 1.0), 1e-2)

    @unittest.skipUnless(SLOW, "set TOOLKIT_SLOW_TESTS=1 to integrate the ODE at three eps")
    def test_exponential_scaling(self):
        """Test log(amplitude eps) is affine in 1/eps with slope -pi a"""
        epsilons = np.array([0.075, 0.1, 0.125])
        amplitudes = []
        for epsilon in epsilons:
            traj = self.ode.integrate_phi(self.spec, float(epsilon), w_end=40.0, tol=1e-12)
            amplitudes.append(self.ode.measure_wave(traj).amplitude)
        slope = np.polyfit(1.0 / epsilons, np.log(np.array(amplitudes) * epsilons), 1)[0]
        self.assertLess(abs(slope / (-math.pi * 0.5) - 1.0), 0.02)

    def test_export(self):
        """Test trajectory CSV columns"""
        traj = self.ode.integrate_phi(self.spec, 0.2, w_end=2.0)
        path = traj.to_csv(Path(self.tmp.name) / 'phi.csv')
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], 'w,re_phi,im_phi')
        self.assertEqual(len(lines), len(traj.w) + 1)


if __name__ == '__main__':
    unittest.main()
