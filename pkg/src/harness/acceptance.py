"""
Acceptance suite for the wave asymptotics toolkit
Runs every reproduction criterion, records measured values and reports pass/fail
"""

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from asymptotics.amplitude import omega_cc_large_beta
from asymptotics.recurrence import (analytic_mu_gamma, branch_limits, fit_divergence,
                                    inner_coalescing, inner_separated, normalized_late_terms,
                                    omega_cc, omega_separated, toy_divergence, toy_recurrence)
from asymptotics.singulant import chi_merged, chi_numeric, trace_all_stokes_lines
from config.settings import ConfigManager
from harness.oracles import naive_coalescing, naive_separated, naive_toy
from harness.sweep import Experiment, SweepConfig, run_sweep, stokes_options
from model.forcing import Separated, Single
from model.ode import integrate_phi, measure_wave
from utils.errors import ToolkitError
from utils.logger import RunLogger

ORACLE_TERMS = 30


class CheckStatus(Enum):
    """Outcome of one criterion"""
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


@dataclass
class CheckResult:
    """Measured values and verdict of one criterion"""

    name: str
    status: CheckStatus
    measured: Dict[str, Any] = field(default_factory=dict)
    message: str = ""
    duration: float = 0.0
    budget: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS


@dataclass(frozen=True)
class Criterion:
    name: str
    tags: Tuple[str, ...]
    budget: float
    check: Callable[[], Tuple[bool, Dict[str, Any], str]]


def max_relative_difference(values: Sequence[complex], reference: Sequence[complex]) -> float:
    """Largest |v - r|/|r| over entries; entries with r = 0 count |v|"""
    worst = 0.0
    for v, r in zip(values, reference):
        scale = abs(r) if r != 0 else 1.0
        worst = max(worst, abs(complex(v) - complex(r)) / scale)
    return worst


class AcceptanceSuite:
    """Runs the reproduction criteria against configured tolerances"""

    def __init__(self, config: Optional[ConfigManager] = None):
        """
        Initialize the suite

        Args:
            config: Configuration supplying tolerances and sweep defaults
        """
        self.config = config if config is not None else ConfigManager()
        self.logger = logging.getLogger(__name__)
        self.run_logger = RunLogger(__name__)
        self.tol = self.config.section('acceptance')

        self.results: List[CheckResult] = []
        self._omega: Dict[Fraction, float] = {}
        self._sweeps: Dict[Experiment, list] = {}

        self.criteria: List[Criterion] = [
            Criterion('omega_one_third', ('omega', 'recurrence'), 5.0, self._check_omega_one_third),
            Criterion('toy_divergence', ('toy', 'recurrence'), 1.0, self._check_toy_divergence),
            Criterion('fit_vs_analytic', ('fit', 'recurrence'), 10.0, self._check_fit_vs_analytic),
            Criterion('branch_structure', ('omega', 'recurrence'), 10.0, self._check_branch_structure),
            Criterion('beta_zero_matching', ('omega', 'coalescing'), 10.0, self._check_beta_zero),
            Criterion('beta_infinity_matching', ('omega', 'coalescing'), 20.0,
                      self._check_beta_infinity),
            Criterion('fig3_reproduction', ('sweep', 'ode', 'slow'), 120.0, self._check_fig3),
            Criterion('fig10_reproduction', ('sweep', 'ode', 'slow'), 300.0, self._check_fig10),
            Criterion('singulant_oracle', ('singulant',), 10.0, self._check_singulant_oracle),
            Criterion('stokes_geometry', ('singulant', 'stokes'), 10.0, self._check_stokes_geometry),
            Criterion('wavelength', ('ode',), 60.0, self._check_wavelength),
            Criterion('oracle_equivalence', ('recurrence', 'oracle'), 5.0,
                      self._check_oracle_equivalence),
        ]

        self.logger.info(f"Acceptance suite initialized with {len(self.criteria)} criteria")

    def select(self, name_filter: Optional[str] = None) -> List[Criterion]:
        """Criteria whose name contains name_filter or carrying it as a tag"""
        if not name_filter:
            return list(self.criteria)
        key = name_filter.lower()
        return [c for c in self.criteria if key in c.name or key in c.tags]

    def run(self, name_filter: Optional[str] = None) -> List[CheckResult]:
        """
        Run the selected criteria

        Args:
            name_filter: Optional name fragment or tag

        Returns:
            list: CheckResult per criterion, in suite order
        """
        selected = self.select(name_filter)
        self.run_logger.stage("acceptance start", criteria=len(selected), filter=name_filter)
        for criterion in selected:
            self.results.append(self._run_criterion(criterion))
        summary = self.get_report_summary()
        self.run_logger.stage("acceptance done", passed=summary['passed'], failed=summary['failed'],
                              errors=summary['errors'])
        return self.results

    def _run_criterion(self, criterion: Criterion) -> CheckResult:
        start = time.perf_counter()
        try:
            passed, measured, message = criterion.check()
            status = CheckStatus.PASS if passed else CheckStatus.FAIL
        except ToolkitError as e:
            measured, message = {}, f"{type(e).__name__}: {e}"
            status = CheckStatus.ERROR
            self.logger.error(f"Criterion {criterion.name} raised {message}")
        duration = time.perf_counter() - start

        if duration > criterion.budget:
            self.logger.warning(f"Criterion {criterion.name} took {duration:.1f}s, "
                                f"budget {criterion.budget:.0f}s")
        self.run_logger.check(criterion.name, status is CheckStatus.PASS,
                              duration=f"{duration:.2f}s", **measured)
        return CheckResult(name=criterion.name, status=status, measured=measured, message=message,
                           duration=duration, budget=criterion.budget)

    def _omega_separated(self, sigma: Fraction) -> float:
        if sigma not in self._omega:
            self._omega[sigma], _ = omega_separated(sigma, self.config.get('recurrence.n_max'))
        return self._omega[sigma]

    def _check_omega_one_third(self):
        """Omega(1/3) against its target value"""
        omega = self._omega_separated(Fraction(1, 3))
        target = self.tol['omega_one_third_target']
        deviation = abs(omega - target)
        return (deviation <= self.tol['omega_one_third_tol'],
                {'omega': omega, 'target': target, 'deviation': deviation},
                f"Omega(1/3) = {omega:.6f}")

    def _check_toy_divergence(self):
        """Extrapolated toy constant from windows ending at n = 400 and n = 800"""
        early, _ = toy_divergence(800, tail=(200, 400))
        late, _ = toy_divergence(800, tail=(400, 800))
        drift = abs(late - early) / abs(late)
        return (drift < self.tol['toy_drift_tol'],
                {'lambda_400': early, 'lambda_800': late, 'drift': drift},
                f"Lambda = {late:.10g}")

    def _check_fit_vs_analytic(self):
        """Fitted mu_1 and gamma for sigma = (3/24, 5/24), a = beta = 1"""
        s1, s2 = Fraction(3, 24), Fraction(5, 24)
        seq = inner_coalescing(s1, s2, 1.0, 1.0, n_max=2000)
        fit = fit_divergence(seq, 2, tail=(1000, 2000))
        mu1, gamma = analytic_mu_gamma(s1, s2, 1.0, 1.0)
        mu_error = abs(fit.mu[0] - mu1)
        gamma_error = abs(fit.gamma - gamma)
        tol = self.tol['fit_tol']
        return (mu_error < tol and gamma_error < tol,
                {'mu_error': mu_error, 'gamma_error': gamma_error, 'residual': fit.residual},
                f"mu1 = {fit.mu[0]:.6f}, gamma = {fit.gamma:.6f}")

    def _check_branch_structure(self):
        """Two residue-class limits per parameter set, stable over the upper half of the sequence"""
        n_max = self.config.get('recurrence.coalescing_n_max')
        tail = (n_max // 2, n_max)
        middle = (tail[0] + tail[1]) // 2
        measured: Dict[str, Any] = {}
        passed = True
        for label, (s1, s2) in {'a': (Fraction(3, 24), Fraction(5, 24)),
                                'b': (Fraction(6, 24), Fraction(2, 24))}.items():
            fit = omega_cc(s1, s2, 1.0, 1.0, n_max=n_max, tail=tail)
            seq = inner_coalescing(s1, s2, 1.0, 1.0, n_max=n_max)
            H = normalized_late_terms(seq, 2, fit.gamma, fit.mu, fit.alternating_sign)
            variation = 0.0
            for window in ((tail[0], middle), (middle, tail[1])):
                for r, (limit, _) in branch_limits(H, 2, window).items():
                    reference = fit.class_limits[r]
                    variation = max(variation, abs(limit - reference) / abs(reference))
            measured[f"branches_{label}"] = fit.branches
            measured[f"variation_{label}"] = variation
            measured[f"alternating_{label}"] = fit.alternating_sign
            passed = passed and fit.branches == 2 and variation < self.tol['branch_tail_tol']
        return passed, measured, f"two branches per parameter set over n=[{tail[0]}, {tail[1]}]"

    def _check_beta_zero(self):
        """Omega_cc at small beta against Omega(1/3)"""
        sixth = Fraction(1, 6)
        fit = omega_cc(sixth, sixth, 0.5, 0.1, n_max=self.config.get('recurrence.coalescing_n_max'))
        reference = self._omega_separated(Fraction(1, 3))
        gap = abs(fit.omega - reference) / reference
        return (gap < self.tol['beta_zero_tol'],
                {'omega_cc': fit.omega, 'omega_one_third': reference, 'gap': gap},
                f"Omega_cc(beta=0.1) = {fit.omega:.6f}")

    def _check_beta_infinity(self):
        """Omega_cc against the separating-pair law for beta^2 in {2, 3, 4}"""
        sixth = Fraction(1, 6)
        omega_sixth = self._omega_separated(sixth)
        n_max = self.config.get('recurrence.coalescing_n_max')
        deviations = []
        for beta_squared in (2.0, 3.0, 4.0):
            beta = math.sqrt(beta_squared)
            fit = omega_cc(sixth, sixth, 0.5, beta, n_max=n_max)
            ratio = fit.omega / omega_cc_large_beta(0.5, beta, omega_sixth)
            deviations.append(abs(ratio - 1.0))
        monotone = all(later < earlier for earlier, later in zip(deviations, deviations[1:]))
        return (deviations[-1] < self.tol['beta_infinity_tol'] and monotone,
                {'deviation_2': deviations[0], 'deviation_3': deviations[1],
                 'deviation_4': deviations[2], 'monotone': monotone},
                f"|ratio - 1| at beta^2 = 4 is {deviations[-1]:.4f}")

    def _sweep_errors(self, experiment: Experiment, column: str,
                      lo: float, hi: float) -> List[Optional[float]]:
        rows = self._sweep_rows(experiment)
        return [row.values.get(column) for row in rows if lo <= row.x <= hi + 1e-12]

    def _sweep_rows(self, experiment: Experiment):
        if experiment not in self._sweeps:
            self._sweeps[experiment] = run_sweep(SweepConfig.for_experiment(experiment, self.config))
        return self._sweeps[experiment]

    @staticmethod
    def _all_below(errors: List[Optional[float]], limit: float) -> bool:
        return bool(errors) and all(e is not None and e < limit for e in errors)

    def _check_fig3(self):
        """Separated prediction accuracy for sigma = 1/4 pairs at eps = 0.15"""
        good = self._sweep_errors(Experiment.FIG3, 'err_separated', 0.7, 0.95)
        near = self._sweep_errors(Experiment.FIG3, 'err_separated', 0.5, 0.55 - 1e-9)
        accurate = self._all_below(good, self.tol['fig3_tol'])
        breaks_down = bool(near) and all(e is not None and e > 1.0 for e in near)
        worst = max((e for e in good if e is not None), default=float('nan'))
        smallest_near = min((e for e in near if e is not None), default=float('nan'))
        return (accurate and breaks_down,
                {'max_error_separated': worst, 'min_error_near_merge': smallest_near},
                f"{len(good)} well-separated rows, {len(near)} near-merge rows")

    def _check_fig10(self):
        """Coalescing prediction near the merge and separated prediction far from it"""
        near = self._sweep_errors(Experiment.FIG10, 'err_coalescing', 0.5, 0.56)
        far = self._sweep_errors(Experiment.FIG10, 'err_separated', 0.75, 0.95)
        coalescing_ok = self._all_below(near, self.tol['fig10_coalescing_tol'])
        separated_ok = self._all_below(far, self.tol['fig10_separated_tol'])
        return (coalescing_ok and separated_ok,
                {'max_error_coalescing': max((e for e in near if e is not None), default=float('nan')),
                 'max_error_separated': max((e for e in far if e is not None), default=float('nan'))},
                f"{len(near)} near-merge rows, {len(far)} separated rows")

    def _check_singulant_oracle(self):
        """Quadrature singulant against the closed form for sigma = 1/3"""
        a = 0.5
        spec = Single(a=a, sigma=Fraction(1, 3))
        points = [complex(x, y) for x in (-1.5, -0.75, -0.25, 0.25, 1.0)
                  for y in (0.1, 0.4, 0.9, 1.6)]
        quad = {'clearance': self.config.get('singulant.clearance'),
                'epsabs': self.config.get('singulant.quad_tol')}
        worst = max(abs(chi_numeric(spec, 1, w, **quad) - chi_merged(w, a)) for w in points)
        re_errors = [abs(chi_numeric(spec, 1, complex(x, 0.0), **quad).real - math.pi * a)
                     for x in (0.5, 1.0, 3.0)]
        real_part_error = max(re_errors)
        return (worst <= self.tol['singulant_tol'] and real_part_error <= 1e-10,
                {'max_difference': worst, 'real_part_error': real_part_error},
                f"{len(points)} points")

    def _check_stokes_geometry(self):
        """Both separated Stokes lines cross w > 0 and the merged line crosses at or between them"""
        separated = Separated(a1=0.75, a2=0.35, sigma1=Fraction(1, 4), sigma2=Fraction(1, 4))
        crossings = {}
        options = stokes_options(self.config)
        for path in trace_all_stokes_lines(separated, **options):
            if path.crosses_positive_axis:
                crossings[path.k] = path.crossing
        merged_paths = trace_all_stokes_lines(Single(a=0.5, sigma=Fraction(1, 2)), **options)
        merged = [p.crossing for p in merged_paths if p.crosses_positive_axis]

        both = 1 in crossings and 2 in crossings
        gap = None
        if both and merged:
            lo, hi = min(crossings.values()), max(crossings.values())
            # distance outside [lo, hi], relative to the merged crossing
            gap = max(lo - merged[0], merged[0] - hi, 0.0) / merged[0]
        return (gap is not None and gap <= self.tol['stokes_gap_tol'],
                {'crossing_1': crossings.get(1), 'crossing_2': crossings.get(2),
                 'crossing_merged': merged[0] if merged else None, 'gap': gap},
                "Stokes line crossings")

    def _check_wavelength(self):
        """Far-field wavelength against 2 pi eps"""
        spec = Single(a=0.5, sigma=Fraction(1, 3))
        measured = {}
        passed = True
        for epsilon, tol in ((0.075, 1e-12), (0.15, 1e-10)):
            traj = integrate_phi(spec, epsilon, w_end=40.0, tol=tol)
            wave = measure_wave(traj)
            error = abs(wave.wavelength - 2 * math.pi * epsilon) / (2 * math.pi * epsilon)
            measured[f"error_{epsilon}"] = error
            passed = passed and error < self.tol['wavelength_tol']
        return passed, measured, "wavelength within tolerance"

    def _check_oracle_equivalence(self):
        """Normalized recurrences against direct summation for n <= 30"""
        n = ORACLE_TERMS
        differences = {
            'toy': max_relative_difference(toy_recurrence(n).unnormalized()[1:], naive_toy(n)[1:]),
            'separated': max_relative_difference(inner_separated(Fraction(1, 3), n).unnormalized(),
                                                 naive_separated(Fraction(1, 3), n)),
        }
        for label, (s1, s2, a, beta) in {
                'coalescing_m2': (Fraction(3, 24), Fraction(5, 24), 1.0, 1.0),
                'coalescing_m3': (Fraction(1, 24), Fraction(3, 24), 0.5, 0.5)}.items():
            seq = inner_coalescing(s1, s2, a, beta, n_max=n)
            differences[label] = max_relative_difference(seq.unnormalized(),
                                                         naive_coalescing(s1, s2, a, beta, n))
        worst = max(differences.values())
        return worst <= self.tol['oracle_tol'], differences, f"worst relative difference {worst:.2e}"

    @property
    def all_passed(self) -> bool:
        return bool(self.results) and all(result.passed for result in self.results)

    def get_report_summary(self) -> Dict[str, Any]:
        """
        Get the acceptance report

        Returns:
            dict: Counts and per-criterion outcomes
        """
        return {
            'total': len(self.results),
            'passed': sum(r.status is CheckStatus.PASS for r in self.results),
            'failed': sum(r.status is CheckStatus.FAIL for r in self.results),
            'errors': sum(r.status is CheckStatus.ERROR for r in self.results),
            'all_passed': self.all_passed,
            'criteria': [
                {'name': r.name, 'status': r.status.value, 'duration': round(r.duration, 3),
                 'over_budget': r.budget is not None and r.duration > r.budget,
                 'message': r.message, 'measured': r.measured}
                for r in self.results
            ],
        }


def run_acceptance(config: Optional[ConfigManager] = None,
                   name_filter: Optional[str] = None) -> AcceptanceSuite:
    """Run the acceptance criteria and return the suite holding the results"""
    suite = AcceptanceSuite(config)
    suite.run(name_filter)
    return suite
