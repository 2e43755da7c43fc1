#!/usr/bin/env python3
"""
Tests for the inner recurrences and late-term constants
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


def exact_toy(n_max):
    A = [Fraction(0), Fraction(1), Fraction(1)]
    for n in range(3, n_max + 1):
        A.append((Fraction(n, 2) - 1) * A[n - 2] + (Fraction(n, 2) - Fraction(3, 2)) * A[n - 3])
    return A


def exact_separated(sigma, n_max):
    kappa = 2 * sigma / (1 + 3 * sigma)
    A = [Fraction(1)]
    for n in range(1, n_max + 1):
        A.append(sum((j + kappa) * A[j] * A[n - 1 - j] for j in range(n)))
    return A


class TestToyRecurrence(unittest.TestCase):
    """Test the toy difference equation"""

    def setUp(self):
        """Set up test environment"""
        from asymptotics import recurrence
        from harness.oracles import naive_toy
        from utils.errors import SequenceOverflow
        self.recurrence = recurrence
        self.naive_toy = naive_toy
        self.SequenceOverflow = SequenceOverflow

    def test_first_terms(self):
        """Test A_3, A_4, A_5"""
        values = self.recurrence.toy_recurrence(10).unnormalized()
        self.assertAlmostEqual(values[3], 0.5, places=13)
        self.assertAlmostEqual(values[4], 1.5, places=13)
        self.assertAlmostEqual(values[5], 1.75, places=13)

    def test_exact_values(self):
        """Test rescaled evaluation against rational arithmetic"""
        values = self.recurrence.toy_recurrence(40).unnormalized()
        for n, exact in enumerate(exact_toy(40)[1:], start=1):
            self.assertLess(abs(values[n] - float(exact)) / float(exact), 1e-11, msg=f"n={n}")

    def test_naive_agreement(self):
        """Test against direct summation"""
        values = self.recurrence.toy_recurrence(30).unnormalized()
        naive = self.naive_toy(30)
        for n in range(1, 31):
            self.assertLess(abs(values[n] - naive[n]) / naive[n], 1e-11)

    def test_overflow(self):
        """Test plain values are refused beyond the double range"""
        seq = self.recurrence.toy_recurrence(400)
        with self.assertRaises(self.SequenceOverflow):
            seq.unnormalized()
        self.assertEqual(len(seq.unnormalized(50)), 51)
        self.assertTrue(np.isfinite(seq.log_values()[400].real))

    def test_divergence_constant(self):
        """Test the toy constant is stable between windows"""
        early, _ = self.recurrence.toy_divergence(800, tail=(200, 400))
        late, _ = self.recurrence.toy_divergence(800, tail=(400, 800))
        self.assertGreater(late, 0.0)
        self.assertLess(abs(late - early) / late, 1e-3)

    def test_invalid_length(self):
        """Test a sequence shorter than the recurrence"""
        with self.assertRaises(ValueError):
            self.recurrence.toy_recurrence(2)


class TestSeparatedRecurrence(unittest.TestCase):
    """Test the isolated-singularity recurrence"""

    def setUp(self):
        """Set up test environment"""
        from asymptotics import recurrence
        from harness.oracles import naive_separated
        from utils.errors import IllConditioned
        self.recurrence = recurrence
        self.naive_separated = naive_separated
        self.IllConditioned = IllConditioned
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_first_terms(self):
        """Test A_1, A_2, A_3 for sigma = 1/3"""
        values = self.recurrence.inner_separated("1/3", 5).unnormalized()
        self.assertAlmostEqual(values[0], 1.0, places=14)
        self.assertAlmostEqual(values[1], 1.0 / 3.0, places=14)
        self.assertAlmostEqual(values[2], 5.0 / 9.0, places=14)
        self.assertAlmostEqual(values[3], 44.0 / 27.0, places=13)

    def test_exact_values(self):
        """Test rescaled evaluation against rational arithmetic"""
        for sigma in (Fraction(1, 3), Fraction(1, 4), Fraction(1, 6)):
            values = self.recurrence.inner_separated(sigma, 30).unnormalized()
            for n, exact in enumerate(exact_separated(sigma, 30)):
                self.assertLess(abs(values[n] - float(exact)) / float(exact), 1e-11,
                                msg=f"sigma={sigma}, n={n}")
            naive = self.naive_separated(sigma, 30)
            self.assertLess(max(abs(v - r) / r for v, r in zip(values, naive)), 1e-11)

    def test_gamma(self):
        """Test gamma = 6 sigma/(1 + 3 sigma)"""
        self.assertEqual(self.recurrence.gamma_separated("1/3"), 1.0)
        self.assertAlmostEqual(self.recurrence.gamma_separated("1/4"), 6.0 / 7.0, places=15)

    def test_validation(self):
        """Test exponent and length limits"""
        with self.assertRaises(ValueError):
            self.recurrence.inner_separated("1", 10)
        with self.assertRaises(ValueError):
            self.recurrence.inner_separated("1/3", 5000)

    def test_omega_one_third(self):
        """Test Omega(1/3)"""
        omega, error = self.recurrence.omega_separated("1/3", 2000, tol=1e-4)
        self.assertAlmostEqual(omega, 0.351, delta=0.005)
        self.assertLess(error, 1e-4 * omega)

    def test_omega_table(self):
        """Test the table is keyed by exact rationals"""
        table = self.recurrence.omega_table(["1/4", 0.25, "2/8"], n_max=2000)
        self.assertEqual(list(table), [Fraction(1, 4)])

    def test_fit_recovers_gamma(self):
        """Test the divergence fit on a known factorial-over-power sequence"""
        seq = self.recurrence.inner_separated("1/3", 1000)
        fit = self.recurrence.fit_divergence(seq, 1, tail=(500, 1000))
        self.assertAlmostEqual(fit.gamma.real, 1.0, delta=1e-2)
        self.assertAlmostEqual(fit.gamma.imag, 0.0, delta=1e-2)
        self.assertEqual(fit.mu, ())
        self.assertEqual(fit.n_range, (500, 1000))
        self.assertFalse(fit.alternating_sign)

    def test_short_tail(self):
        """Test a tail too short to fit"""
        seq = self.recurrence.inner_separated("1/3", 20)
        with self.assertRaises(self.IllConditioned):
            self.recurrence.fit_divergence(seq, 1, tail=(5, 10))
        with self.assertRaises(ValueError):
            self.recurrence.fit_divergence(seq, 1, tail=(5, 40))

    def test_export(self):
        """Test coefficient CSV columns"""
        seq = self.recurrence.inner_separated("1/3", 10)
        path = seq.to_csv(Path(self.tmp.name) / 'coeffs.csv')
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], 'n,re_A,im_A,abs_H,arg_H,log_abs_A')
        self.assertEqual(len(lines), 12)
        self.assertTrue(lines[1].startswith('0,1,0,,,'))


class TestCoalescingRecurrence(unittest.TestCase):
    """Test the coalescing inner recurrence"""

    def setUp(self):
        """Set up test environment"""
        from asymptotics import recurrence
        from harness.oracles import naive_coalescing
        from utils.errors import WrongRegime
        self.recurrence = recurrence
        self.naive_coalescing = naive_coalescing
        self.WrongRegime = WrongRegime

    def test_naive_agreement(self):
        """Test against direct summation for m = 2 and m = 3"""
        for s1, s2, a, beta in ((Fraction(3, 24), Fraction(5, 24), 1.0, 1.0),
                                (Fraction(1, 24), Fraction(3, 24), 0.5, 0.5)):
            values = self.recurrence.inner_coalescing(s1, s2, a, beta, n_max=30).unnormalized()
            naive = self.naive_coalescing(s1, s2, a, beta, 30)
            for n in range(31):
                scale = abs(naive[n]) if naive[n] != 0 else 1.0
                self.assertLess(abs(values[n] - naive[n]) / scale, 1e-10, msg=f"n={n}")

    def test_zero_beta_dilation(self):
        """Test beta = 0 reproduces the merged sequence on even indices"""
        sixth = Fraction(1, 6)
        merged = self.recurrence.inner_coalescing(sixth, sixth, 0.5, 0.0, n_max=30).unnormalized()
        separated = self.recurrence.inner_separated(Fraction(1, 3), 15).unnormalized()
        self.assertAlmostEqual(merged[2].real, 1.0 / 3.0, places=14)
        self.assertAlmostEqual(merged[4].real, 5.0 / 9.0, places=14)
        for p in range(16):
            self.assertLess(abs(merged[2 * p] - separated[p]) / separated[p], 1e-10)
        for p in range(15):
            self.assertEqual(merged[2 * p + 1], 0)

    def test_analytic_exponents(self):
        """Test closed-form mu_1 and gamma"""
        mu1, gamma = self.recurrence.analytic_mu_gamma("3/24", "5/24", 1.0, 1.0)
        expected = 0.25 * complex(math.cos(math.pi / 4), -math.sin(math.pi / 4))
        self.assertAlmostEqual(abs(mu1 - expected), 0.0, places=14)

        f1, f2 = 2.0 / 24.0, ((2.0 / 24.0) ** 2 + 8.0 / 24.0) / 2.0
        self.assertAlmostEqual(gamma.real, 1.0, places=14)
        self.assertAlmostEqual(gamma.imag, 1.5 * (2 * f1 ** 2 - f2), places=14)

        with self.assertRaises(self.WrongRegime):
            self.recurrence.analytic_mu_gamma("1/4", "1/4", 1.0, 1.0)

    def test_alternating_branches(self):
        """Test the sign ansatz follows f_1 and both residue classes carry a limit"""
        cases = {(Fraction(3, 24), Fraction(5, 24)): False,
                 (Fraction(6, 24), Fraction(2, 24)): True}
        for (s1, s2), alternating in cases.items():
            fit = self.recurrence.omega_cc(s1, s2, 1.0, 1.0, n_max=2000)
            self.assertEqual(fit.n_range, (1000, 2000))
            self.assertEqual(fit.alternating_sign, alternating)
            self.assertEqual(fit.m, 2)
            self.assertEqual(fit.branches, 2)
            self.assertGreater(fit.omega, 0.0)
            self.assertLessEqual(abs(fit.tau), math.pi)

    def test_normalized_terms(self):
        """Test normalization and the alternating sign"""
        seq = self.recurrence.inner_separated("1/3", 20)
        H = self.recurrence.normalized_late_terms(seq, 1, 1.0, ())
        self.assertTrue(np.allclose(H[1:], seq.scaled[1:]))
        H_alt = self.recurrence.normalized_late_terms(seq, 1, 1.0, (), alternating=True)
        self.assertTrue(np.allclose(H_alt[1:], seq.scaled[1:] * (-1.0) ** np.arange(1, 21)))


class TestCoalescingLimits(unittest.TestCase):
    """Test Omega_cc against the merged and separating-pair limits"""

    def setUp(self):
        """Set up test environment"""
        from asymptotics import recurrence
        from asymptotics.amplitude import omega_cc_large_beta
        self.recurrence = recurrence
        self.omega_cc_large_beta = omega_cc_large_beta
        self.sixth = Fraction(1, 6)

    def test_small_beta(self):
        """Test Omega_cc at beta = 0.1 is within 3% of Omega(1/3)"""
        fit = self.recurrence.omega_cc(self.sixth, self.sixth, 0.5, 0.1, n_max=2000)
        reference, _ = self.recurrence.omega_separated(Fraction(1, 3), 2000)
        self.assertLess(abs(fit.omega - reference) / reference, 0.03)

    def test_large_beta(self):
        """Test Omega_cc approaches the separating-pair law as beta grows"""
        omega_sixth, _ = self.recurrence.omega_separated(self.sixth, 2000)
        deviations = []
        for beta_squared in (2.0, 3.0, 4.0):
            beta = math.sqrt(beta_squared)
            fit = self.recurrence.omega_cc(self.sixth, self.sixth, 0.5, beta, n_max=2000)
            law = self.omega_cc_large_beta(0.5, beta, omega_sixth)
            deviations.append(abs(fit.omega / law - 1.0))
        self.assertLess(deviations[-1], 0.05)
        self.assertLess(deviations[2], deviations[1])
        self.assertLess(deviations[1], deviations[0])


class TestDivergenceFit(unittest.TestCase):
    """Test the late-term divergence fit on sequences with two residue classes"""

    def setUp(self):
        """Set up test environment"""
        from asymptotics import recurrence
        from scipy.special import gammaln
        from utils.errors import IllConditioned
        self.recurrence = recurrence
        self.gammaln = gammaln
        self.IllConditioned = IllConditioned

    def model_sequence(self, mu1, sign=1.0, n_max=400):
        """A_n = sign^n Gamma(n/2 + 1) exp(mu1 sqrt n), with no corrections"""
        n = np.arange(n_max + 1, dtype=float)
        return self.recurrence.CoeffSeq(kind=self.recurrence.RecurrenceKind.TOY,
                                        scaled=sign ** n * np.exp(mu1 * np.sqrt(n)),
                                        log_scale=self.gammaln(n / 2.0 + 1.0))

    def test_exact_model(self):
        """Test a sequence of exactly the late-term form is recovered"""
        fit = self.recurrence.fit_divergence(self.model_sequence(0.5), 2)
        self.assertAlmostEqual(abs(fit.mu[0] - 0.5), 0.0, delta=1e-5)
        self.assertAlmostEqual(abs(fit.gamma - 1.0), 0.0, delta=1e-5)
        self.assertAlmostEqual(fit.omega, 1.0, delta=1e-5)
        self.assertFalse(fit.alternating_sign)
        self.assertEqual(fit.branches, 2)
        self.assertEqual(fit.n_range, (200, 400))

    def test_exact_alternating_model(self):
        """Test an alternating sequence gives opposite class constants"""
        fit = self.recurrence.fit_divergence(self.model_sequence(0.5, sign=-1.0), 2)
        self.assertTrue(fit.alternating_sign)
        self.assertAlmostEqual(abs(fit.mu[0] - 0.5), 0.0, delta=1e-5)
        self.assertAlmostEqual(abs(fit.class_limits[0] - 1.0), 0.0, delta=1e-5)
        self.assertAlmostEqual(abs(fit.class_limits[1] + 1.0), 0.0, delta=1e-5)

    def test_decaying_exponent_rejected(self):
        """Test a leading exponent with negative real part is refused"""
        with self.assertRaises(self.IllConditioned):
            self.recurrence.fit_divergence(self.model_sequence(-0.5), 2)

    def test_toy_exponents(self):
        """Test the toy sequence gives mu_1 = sqrt(2) and gamma = -1"""
        fit = self.recurrence.fit_divergence(self.recurrence.toy_recurrence(800), 2)
        self.assertAlmostEqual(abs(fit.mu[0] - math.sqrt(2.0)), 0.0, delta=1e-2)
        self.assertAlmostEqual(abs(fit.gamma + 1.0), 0.0, delta=1e-2)
        self.assertFalse(fit.alternating_sign)

    def test_coalescing_matches_closed_form(self):
        """Test fitted mu_1 and gamma against the closed forms for sigma = (3/24, 5/24)"""
        s1, s2 = Fraction(3, 24), Fraction(5, 24)
        seq = self.recurrence.inner_coalescing(s1, s2, 1.0, 1.0, n_max=2000)
        fit = self.recurrence.fit_divergence(seq, 2, tail=(1000, 2000))
        mu1, gamma = self.recurrence.analytic_mu_gamma(s1, s2, 1.0, 1.0)
        self.assertLess(abs(fit.mu[0] - mu1), 1e-3)
        self.assertLess(abs(fit.gamma - gamma), 1e-3)

    def test_sign_stable_across_tails(self):
        """Test the alternation flag and Re mu_1 > 0 do not depend on the window"""
        cases = {(Fraction(3, 24), Fraction(5, 24)): False,
                 (Fraction(6, 24), Fraction(2, 24)): True}
        for (s1, s2), alternating in cases.items():
            seq = self.recurrence.inner_coalescing(s1, s2, 1.0, 1.0, n_max=2000)
            for tail in ((1000, 2000), (1400, 2000)):
                fit = self.recurrence.fit_divergence(seq, 2, tail=tail)
                self.assertEqual(fit.alternating_sign, alternating, msg=f"{s1}, {s2}, {tail}")
                self.assertGreater(fit.mu[0].real, 0.0)


if __name__ == '__main__':
    unittest.main()
