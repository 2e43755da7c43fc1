"""
Command-line interface for the wave asymptotics toolkit
Subcommands: solve, stokes, omega, fit, amp, sweep, accept
"""

import argparse
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from asymptotics.amplitude import amp_coalescing, amp_separated, amp_single, combine_separated
from asymptotics.recurrence import (fit_divergence, inner_coalescing, inner_separated, omega_cc,
                                    omega_separated, toy_recurrence)
from asymptotics.singulant import trace_all_stokes_lines
from config.settings import ConfigManager, load_config
from harness.acceptance import AcceptanceSuite
from harness.sweep import (Experiment, SweepConfig, run_stokes_map, run_sweep, stokes_options,
                           write_stokes_csv)
from model.forcing import Coalescing, ForcingSpec, Separated, Single
from model.ode import default_window, integrate_phi, measure_wave
from utils.errors import ToolkitError
from utils.logger import RunLogger, setup_logging
from utils.param_parser import ParameterParser, parse_fraction

logger = logging.getLogger(__name__)

RECURRENCES = ('toy', 'separated', 'coalescing')


def _add_forcing_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--eps', type=float, default=0.15, help='Froude parameter epsilon')
    parser.add_argument('--a', type=float, help='singularity distance (single or coalescing)')
    parser.add_argument('--a1', type=float, help='far singularity of a separated pair')
    parser.add_argument('--a2', type=float, help='near singularity; default 1 - a1')
    parser.add_argument('--beta', type=float, help='scaled half separation of a coalescing pair')
    parser.add_argument('--sigma1', type=parse_fraction, default=Fraction(1, 6),
                        help='exponent p/q of the singularity at -a1')
    parser.add_argument('--sigma2', type=parse_fraction, default=Fraction(1, 6),
                        help='exponent p/q of the singularity at -a2')


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='configuration file (YAML or key = value lines)')
    common.add_argument('--log-level', help='DEBUG, INFO, WARNING or ERROR')
    common.add_argument('--out', type=Path, help='output CSV file')

    parser = argparse.ArgumentParser(
        prog='wave-asymptotics',
        description='Exponential asymptotics of a low-Froude ship-wave model')
    commands = parser.add_subparsers(dest='command', required=True)

    solve = commands.add_parser('solve', parents=[common], help='integrate the ODE once')
    _add_forcing_arguments(solve)
    solve.add_argument('--tol', type=float, help='integrator relative tolerance')
    solve.add_argument('--w-end', type=float, help='end of the integration interval')

    stokes = commands.add_parser('stokes', parents=[common], help='trace Stokes lines')
    _add_forcing_arguments(stokes)

    omega = commands.add_parser('omega', parents=[common], help='prefactor constant Omega or Omega_cc')
    _add_forcing_arguments(omega)
    omega.add_argument('--nmax', type=int, help='number of recurrence terms')

    fit = commands.add_parser('fit', parents=[common], help='fit the divergence of a sequence')
    _add_forcing_arguments(fit)
    fit.add_argument('--recurrence', choices=RECURRENCES, default='coalescing')
    fit.add_argument('--nmax', type=int, default=1000, help='number of recurrence terms')
    fit.add_argument('--m', type=int, help='late-term exponent denominator')
    fit.add_argument('--tail', help='fit window lo:hi')

    amp = commands.add_parser('amp', parents=[common], help='asymptotic amplitude predictions')
    _add_forcing_arguments(amp)
    amp.add_argument('--nmax', type=int, help='number of recurrence terms')

    sweep = commands.add_parser('sweep', parents=[common], help='reproduce a figure sweep')
    sweep.add_argument('--experiment', choices=[e.value for e in Experiment], required=True)
    _add_forcing_arguments(sweep)
    sweep.add_argument('--tol', type=float, help='integrator relative tolerance')
    sweep.add_argument('--points', type=int, help='grid points')
    sweep.add_argument('--range', dest='grid_range', help='grid range lo:hi (a1 or beta)')
    sweep.add_argument('--workers', type=int, help='rows evaluated concurrently')
    sweep.add_argument('--nmax', type=int, help='recurrence terms for Omega_cc')

    accept = commands.add_parser('accept', parents=[common], help='run the acceptance suite')
    accept.add_argument('--filter', help='criterion name fragment or tag, e.g. omega')
    accept.add_argument('--report', type=Path, help='write the JSON report here')

    return parser


def forcing_from_args(args: argparse.Namespace) -> ForcingSpec:
    """Single for --a, Separated for --a1, Coalescing for --a with --beta"""
    if args.a1 is not None:
        a2 = args.a2 if args.a2 is not None else 1.0 - args.a1
        return Separated(a1=args.a1, a2=a2, sigma1=args.sigma1, sigma2=args.sigma2)
    a = args.a if args.a is not None else 0.5
    if args.beta is not None:
        return Coalescing.from_sigmas(a, args.beta, args.sigma1, args.sigma2)
    return Single(a=a, sigma=args.sigma1 + args.sigma2)


def _print_json(payload: Dict[str, Any]):
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))


class CommandRunner:
    """Executes one parsed command against a configuration"""

    def __init__(self, args: argparse.Namespace, config: ConfigManager):
        self.args = args
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.run_logger = RunLogger(__name__)
        self.precision = config.get('output.precision')

    def run(self) -> int:
        handler = getattr(self, f"cmd_{self.args.command}")
        return handler()

    def cmd_solve(self) -> int:
        args = self.args
        spec = forcing_from_args(args)
        tol = args.tol if args.tol is not None else self.config.get('ode.tol')
        traj = integrate_phi(spec, args.eps, w0=self.config.get('ode.w0'), w_end=args.w_end,
                             tol=tol, samples_per_wavelength=self.config.get('ode.samples_per_wavelength'))
        wave = measure_wave(traj, default_window(traj, self.config.get('ode.window_fraction')))
        self.run_logger.result("amplitude", f"{wave.amplitude:.6e}", wavelength=f"{wave.wavelength:.6f}")
        if args.out:
            traj.to_csv(args.out, self.precision)
        _print_json({'forcing': spec.describe(), 'epsilon': args.eps, 'amplitude': wave.amplitude,
                     'wavelength': wave.wavelength, 'window': list(wave.window),
                     'extrema': wave.n_extrema, 'evaluations': traj.n_evaluations})
        return 0

    def cmd_stokes(self) -> int:
        args = self.args
        if args.a1 is None and args.a is None:
            cfg = SweepConfig.for_experiment(Experiment.STOKES_MAP, self.config)
            paths = run_stokes_map(cfg, **stokes_options(self.config))
        else:
            spec = forcing_from_args(args)
            epsilon = args.eps if isinstance(spec, Coalescing) else None
            paths = trace_all_stokes_lines(spec, epsilon, **stokes_options(self.config))
        if args.out:
            write_stokes_csv(paths, args.out, self.precision)
        _print_json({'lines': [{'origin': p.origin.real, 'k': p.k, 'terminated_by': p.terminated_by.value,
                                'crossing': p.crossing, 'arc_length': p.arc_length}
                               for p in paths]})
        return 0

    def cmd_omega(self) -> int:
        args = self.args
        if args.beta is None:
            sigma = args.sigma1 + args.sigma2
            n_max = args.nmax or self.config.get('recurrence.n_max')
            omega, error = omega_separated(sigma, n_max)
            _print_json({'sigma': str(sigma), 'omega': omega, 'error': error, 'n_max': n_max})
            return 0

        a = args.a if args.a is not None else 0.5
        n_max = args.nmax or self.config.get('recurrence.coalescing_n_max')
        fit = omega_cc(args.sigma1, args.sigma2, a, args.beta, n_max=n_max,
                       convergence_tol=self.config.get('recurrence.convergence_tol'),
                       branch_tol=self.config.get('recurrence.branch_tol'))
        if args.out:
            inner_coalescing(args.sigma1, args.sigma2, a, args.beta, n_max=n_max).to_csv(
                args.out, fit, self.precision)
        _print_json({'sigma1': str(args.sigma1), 'sigma2': str(args.sigma2), 'a': a,
                     'beta': args.beta, 'omega_cc': fit.omega, 'tau': fit.tau,
                     'gamma': str(fit.gamma), 'mu': [str(v) for v in fit.mu],
                     'alternating': fit.alternating_sign, 'branches': fit.branches,
                     'error': fit.residual})
        return 0

    def cmd_fit(self) -> int:
        args = self.args
        n_max = args.nmax
        if args.recurrence == 'toy':
            seq, m = toy_recurrence(n_max), 2
        elif args.recurrence == 'separated':
            seq, m = inner_separated(args.sigma1 + args.sigma2, n_max), 1
        else:
            a = args.a if args.a is not None else 0.5
            beta = args.beta if args.beta is not None else 1.0
            seq = inner_coalescing(args.sigma1, args.sigma2, a, beta, n_max=n_max)
            m = int(seq.meta['m'])
        m = args.m or m
        tail = ParameterParser().parse_range(args.tail) if args.tail else None
        tail = tuple(int(v) for v in tail) if tail else None

        fit = fit_divergence(seq, m, tail, corrections=self.config.get('recurrence.corrections'))
        if args.out:
            seq.to_csv(args.out, fit, self.precision)
        _print_json({'recurrence': args.recurrence, 'm': fit.m, 'gamma': str(fit.gamma),
                     'mu': [str(v) for v in fit.mu], 'omega': fit.omega, 'tau': fit.tau,
                     'alternating': fit.alternating_sign, 'residual': fit.residual,
                     'n_range': list(fit.n_range)})
        return 0

    def cmd_amp(self) -> int:
        args = self.args
        spec = forcing_from_args(args)
        n_max = args.nmax or self.config.get('recurrence.n_max')
        result: Dict[str, Any] = {'forcing': spec.describe(), 'epsilon': args.eps}

        if isinstance(spec, Single):
            omega, _ = omega_separated(spec.sigma, n_max)
            result['single'] = amp_single(spec.a, spec.sigma, args.eps, omega).amplitude
        elif isinstance(spec, Separated):
            table = {s: omega_separated(s, n_max)[0] for s in {spec.sigma1, spec.sigma2}}
            predictions = amp_separated(spec, args.eps, table)
            result['per_singularity'] = [{'k': p.singularity, 'amplitude': p.amplitude,
                                          'phase': p.phase} for p in predictions]
            result['separated'] = combine_separated(predictions)
        else:
            fit = omega_cc(spec.sigma1, spec.sigma2, spec.a, spec.beta,
                           n_max=args.nmax or self.config.get('recurrence.coalescing_n_max'))
            result['omega_cc'] = fit.omega
            result['coalescing'] = amp_coalescing(spec.a, spec.beta, spec.sigma1, spec.sigma2,
                                                  args.eps, fit.omega).amplitude
        self.run_logger.result("prediction", {k: v for k, v in result.items() if k != 'forcing'})
        _print_json(result)
        return 0

    def cmd_sweep(self) -> int:
        args = self.args
        experiment = Experiment(args.experiment)
        overrides: Dict[str, Any] = {
            'n_points': args.points, 'workers': args.workers, 'omega_n_max': args.nmax,
            'tol': args.tol, 'output': args.out,
        }
        if args.grid_range:
            grid = ParameterParser().parse_range(args.grid_range)
            key = 'beta_range' if experiment in (Experiment.FIG8, Experiment.FIG9) else 'a1_range'
            overrides[key] = grid
        if experiment is Experiment.CUSTOM:
            overrides.update({'sigma1': args.sigma1, 'sigma2': args.sigma2, 'epsilon': args.eps})

        cfg = SweepConfig.for_experiment(experiment, self.config, **overrides)
        if experiment is Experiment.STOKES_MAP:
            paths = run_stokes_map(cfg, **stokes_options(self.config))
            if args.out:
                write_stokes_csv(paths, args.out, self.precision)
            return 0

        rows = run_sweep(cfg)
        failed = sum(row.failed for row in rows)
        _print_json({'experiment': experiment.value, 'rows': len(rows), 'failed_rows': failed,
                     'output': args.out})
        return 0

    def cmd_accept(self) -> int:
        suite = AcceptanceSuite(self.config)
        suite.run(self.args.filter)
        summary = suite.get_report_summary()
        for entry in summary['criteria']:
            print(f"{entry['status'].upper():6s} {entry['name']:24s} {entry['duration']:8.2f}s  "
                  f"{entry['message']}")
        print(f"{summary['passed']}/{summary['total']} criteria passed")
        if self.args.report:
            self.args.report.write_text(json.dumps(summary, indent=2, sort_keys=True, default=str))
        return 0 if suite.all_passed else 1


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, configure logging and run one command

    Returns:
        int: Process exit status; 1 on a failed criterion or toolkit error
    """
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ToolkitError as e:
        setup_logging(args.log_level or logging.INFO)
        logger.error(f"Configuration error: {e}")
        return 1

    level = args.log_level or config.get('logging.level')
    setup_logging(level, config.get('logging.log_to_file'), config.get('logging.log_dir'))

    try:
        return CommandRunner(args, config).run()
    except ToolkitError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return 1
    except ValueError as e:
        logger.error(f"{args.command}: invalid argument: {e}")
        return 2
