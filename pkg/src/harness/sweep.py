"""
Figure-reproduction sweeps
Runs the ODE and the asymptotic predictions over one-parameter grids and writes CSV tables
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from asymptotics.amplitude import (amp_coalescing, amp_separated, amp_single, combine_separated,
                                   omega_cc_large_beta)
from asymptotics.recurrence import omega_cc, omega_separated
from asymptotics.singulant import StokesPath, trace_all_stokes_lines
from config.settings import ConfigManager
from model.forcing import Separated, Single
from model.ode import default_window, integrate_phi, measure_wave
from utils.csv_export import write_csv, write_metadata
from utils.errors import ToolkitError
from utils.logger import RunLogger
from utils.param_parser import parse_fraction

logger = logging.getLogger(__name__)


class Experiment(Enum):
    """Sweep presets"""
    FIG3 = "fig3"
    FIG8 = "fig8"
    FIG9 = "fig9"
    FIG10 = "fig10"
    STOKES_MAP = "stokes_map"
    CUSTOM = "custom"


AMPLITUDE_COLUMNS = ['a1', 'a2', 'beta', 'numeric', 'separated', 'coalescing', 'single',
                     'err_separated', 'err_coalescing', 'err_single', 'wavelength', 'status']
OMEGA_COLUMNS = ['beta', 'omega_cc', 'tau', 'reference', 'ratio', 'rel_error', 'status']

PRESETS: Dict[Experiment, Dict[str, Any]] = {
    Experiment.FIG3: {'sigma1': Fraction(1, 4), 'sigma2': Fraction(1, 4), 'epsilon': 0.15,
                      'a1_range': (0.51, 0.95), 'tol': 1e-10},
    Experiment.FIG10: {'sigma1': Fraction(1, 6), 'sigma2': Fraction(1, 6), 'epsilon': 0.075,
                       'a1_range': (0.5, 0.95), 'tol': 1e-12},
    Experiment.FIG8: {'sigma1': Fraction(1, 6), 'sigma2': Fraction(1, 6), 'a': 0.5,
                      'beta_range': (0.0, 1.0)},
    Experiment.FIG9: {'sigma1': Fraction(1, 6), 'sigma2': Fraction(1, 6), 'a': 0.5,
                      'beta_range': (0.5, 2.0)},
    Experiment.STOKES_MAP: {'sigma1': Fraction(1, 4), 'sigma2': Fraction(1, 4), 'a1': 0.75,
                            'a2': 0.35, 'a': 0.5},
    Experiment.CUSTOM: {},
}


@dataclass
class SweepConfig:
    """Parameters of one sweep"""

    experiment: Experiment = Experiment.CUSTOM
    sigma1: Fraction = Fraction(1, 4)
    sigma2: Fraction = Fraction(1, 4)
    epsilon: float = 0.15
    a: float = 0.5
    a1: float = 0.75
    a2: float = 0.35
    a1_range: Tuple[float, float] = (0.51, 0.95)
    beta_range: Tuple[float, float] = (0.05, 2.0)
    n_points: int = 40
    tol: float = 1e-10
    w0: float = 1e-5
    samples_per_wavelength: int = 32
    window_fraction: float = 0.4
    n_max: int = 2000
    omega_n_max: int = 1000
    workers: int = 1
    output: Optional[Path] = None

    def __post_init__(self):
        if isinstance(self.experiment, str):
            self.experiment = Experiment(self.experiment)
        self.sigma1 = parse_fraction(self.sigma1)
        self.sigma2 = parse_fraction(self.sigma2)
        if self.n_points < 1:
            raise ValueError(f"n_points must be positive, got {self.n_points}")
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")
        if self.amplitude_sweep:
            lo, hi = self.a1_range
            # a1 + a2 = 1 with a1 >= a2
            if not 0.5 <= lo <= hi < 1.0:
                raise ValueError(f"a1 range must lie in [0.5, 1) so that a2 = 1 - a1 <= a1, "
                                 f"got {self.a1_range}")

    @classmethod
    def for_experiment(cls, experiment: Union[Experiment, str],
                       config: Optional[ConfigManager] = None, **overrides) -> 'SweepConfig':
        """
        Build a sweep from a preset, configuration defaults and explicit overrides

        Args:
            experiment: Preset name
            config: Optional configuration supplying ode/recurrence/sweep defaults
            **overrides: Field values taking precedence over everything else

        Returns:
            SweepConfig
        """
        experiment = Experiment(experiment) if isinstance(experiment, str) else experiment
        values: Dict[str, Any] = {}
        if config is not None:
            values.update({
                'n_points': config.get('sweep.n_points'),
                'workers': config.get('sweep.workers'),
                'omega_n_max': config.get('sweep.omega_n_max'),
                'n_max': config.get('recurrence.n_max'),
                'tol': config.get('ode.tol'),
                'w0': config.get('ode.w0'),
                'samples_per_wavelength': config.get('ode.samples_per_wavelength'),
                'window_fraction': config.get('ode.window_fraction'),
            })
        values.update(PRESETS[experiment])
        if config is not None and experiment is Experiment.FIG10:
            values['tol'] = config.get('sweep.fig10_tol')
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(experiment=experiment, **values)

    @property
    def amplitude_sweep(self) -> bool:
        return self.experiment in (Experiment.FIG3, Experiment.FIG10, Experiment.CUSTOM)

    def grid(self) -> np.ndarray:
        """Independent variable values: a1 for amplitude sweeps, beta otherwise"""
        lo, hi = self.a1_range if self.amplitude_sweep else self.beta_range
        if self.n_points == 1:
            return np.array([lo])
        return np.linspace(lo, hi, self.n_points)

    @property
    def columns(self) -> List[str]:
        return AMPLITUDE_COLUMNS if self.amplitude_sweep else OMEGA_COLUMNS

    def metadata(self) -> Dict[str, Any]:
        """Parameters recorded in the CSV sidecar"""
        return {
            'experiment': self.experiment.value,
            'sigma1': self.sigma1,
            'sigma2': self.sigma2,
            'epsilon': self.epsilon,
            'a': self.a,
            'a1_range': list(self.a1_range),
            'beta_range': list(self.beta_range),
            'n_points': self.n_points,
            'tol': self.tol,
            'w0': self.w0,
            'samples_per_wavelength': self.samples_per_wavelength,
            'window_fraction': self.window_fraction,
            'n_max': self.n_max,
            'omega_n_max': self.omega_n_max,
        }


@dataclass
class SweepRow:
    """One grid point: the independent variable, computed columns, and per-column failures"""

    x: float
    values: Dict[str, Optional[float]] = field(default_factory=dict)
    errors: Dict[str, str] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return bool(self.errors)

    def as_dict(self) -> Dict[str, Any]:
        row = dict(self.values)
        row['status'] = 'ok' if not self.errors else ";".join(
            f"{name}:{message}" for name, message in sorted(self.errors.items()))
        return row


def relative_error(numeric: Optional[float], prediction: Optional[float]) -> Optional[float]:
    """|numeric - prediction| / numeric, None when either side is missing"""
    if numeric is None or prediction is None or numeric == 0:
        return None
    return abs(numeric - prediction) / abs(numeric)


class SweepRunner:
    """Evaluates sweep rows, sharing the Omega constants between rows"""

    def __init__(self, cfg: SweepConfig):
        self.cfg = cfg
        self.logger = logging.getLogger(__name__)
        self.run_logger = RunLogger(__name__)
        self._omega: Dict[Fraction, float] = {}

    def omega(self, sigma: Fraction) -> float:
        """Omega(sigma), computed once per sweep"""
        sigma = parse_fraction(sigma)
        if sigma not in self._omega:
            self._omega[sigma], _ = omega_separated(sigma, self.cfg.n_max)
        return self._omega[sigma]

    def _guarded(self, row: SweepRow, name: str, compute: Callable[[], Optional[float]]):
        try:
            row.values[name] = compute()
        except ToolkitError as e:
            row.values[name] = None
            row.errors[name] = type(e).__name__
            self.run_logger.row_failed(row.x, e, details=name)

    def prepare(self):
        """Precompute the Omega constants every row needs"""
        cfg = self.cfg
        if cfg.amplitude_sweep:
            for sigma in {cfg.sigma1, cfg.sigma2, cfg.sigma1 + cfg.sigma2}:
                if 0 < sigma < 1:
                    self.omega(sigma)
        elif cfg.experiment is Experiment.FIG8:
            self.omega(cfg.sigma1 + cfg.sigma2)
        elif cfg.experiment is Experiment.FIG9:
            self.omega(Fraction(1, 6))

    def numeric_amplitude(self, a1: float) -> Tuple[float, float]:
        """ODE amplitude and wavelength for a1 + a2 = 1 (merged at a1 = 1/2)"""
        cfg = self.cfg
        a2 = 1.0 - a1
        if a1 > a2:
            spec = Separated(a1=a1, a2=a2, sigma1=cfg.sigma1, sigma2=cfg.sigma2)
        else:
            spec = Single(a=0.5, sigma=cfg.sigma1 + cfg.sigma2)
        traj = integrate_phi(spec, cfg.epsilon, w0=cfg.w0, tol=cfg.tol,
                             samples_per_wavelength=cfg.samples_per_wavelength)
        wave = measure_wave(traj, default_window(traj, cfg.window_fraction))
        return wave.amplitude, wave.wavelength

    def amplitude_row(self, a1: float) -> SweepRow:
        cfg = self.cfg
        a2 = 1.0 - a1
        sigma = cfg.sigma1 + cfg.sigma2
        beta = (a1 - 0.5) / math.sqrt(cfg.epsilon)
        row = SweepRow(x=a1, values={'a1': a1, 'a2': a2, 'beta': beta})

        measured: Dict[str, float] = {}

        def numeric():
            measured['amplitude'], measured['wavelength'] = self.numeric_amplitude(a1)
            return measured['amplitude']

        self._guarded(row, 'numeric', numeric)
        row.values['wavelength'] = measured.get('wavelength')

        if a1 > a2:
            spec = Separated(a1=a1, a2=a2, sigma1=cfg.sigma1, sigma2=cfg.sigma2)
            table = {s: self.omega(s) for s in (cfg.sigma1, cfg.sigma2)}
            self._guarded(row, 'separated',
                          lambda: combine_separated(amp_separated(spec, cfg.epsilon, table)))
        else:
            row.values['separated'] = None

        if sigma == Fraction(1, 3):
            def coalescing():
                fit = omega_cc(cfg.sigma1, cfg.sigma2, 0.5, beta, n_max=cfg.omega_n_max)
                return amp_coalescing(0.5, beta, cfg.sigma1, cfg.sigma2, cfg.epsilon,
                                      fit.omega).amplitude
            self._guarded(row, 'coalescing', coalescing)
        else:
            row.values['coalescing'] = None

        row.values['single'] = amp_single(0.5, sigma, cfg.epsilon, self.omega(sigma)).amplitude

        numeric_value = row.values.get('numeric')
        for name in ('separated', 'coalescing', 'single'):
            row.values[f"err_{name}"] = relative_error(numeric_value, row.values.get(name))
        return row

    def omega_row(self, beta: float) -> SweepRow:
        cfg = self.cfg
        row = SweepRow(x=beta, values={'beta': beta})
        fit_values: Dict[str, float] = {}

        def coalescing():
            fit = omega_cc(cfg.sigma1, cfg.sigma2, cfg.a, beta, n_max=cfg.omega_n_max)
            fit_values['tau'] = fit.tau
            return fit.omega

        self._guarded(row, 'omega_cc', coalescing)
        row.values['tau'] = fit_values.get('tau')

        if cfg.experiment is Experiment.FIG9:
            reference = omega_cc_large_beta(cfg.a, beta, self.omega(Fraction(1, 6))) if beta > 0 else None
        else:
            reference = self.omega(cfg.sigma1 + cfg.sigma2)
        row.values['reference'] = reference

        value = row.values.get('omega_cc')
        if value is not None and reference:
            row.values['ratio'] = value / reference
            row.values['rel_error'] = abs(value - reference) / reference
        return row

    def run(self) -> List[SweepRow]:
        cfg = self.cfg
        if cfg.experiment is Experiment.STOKES_MAP:
            raise ValueError("use run_stokes_map for the Stokes map experiment")

        self.run_logger.stage("sweep start", experiment=cfg.experiment.value,
                              points=cfg.n_points, workers=cfg.workers)
        self.prepare()
        evaluate = self.amplitude_row if cfg.amplitude_sweep else self.omega_row
        grid = [float(x) for x in cfg.grid()]

        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                rows = list(pool.map(evaluate, grid))
        else:
            rows = [evaluate(x) for x in grid]

        failed = sum(row.failed for row in rows)
        self.run_logger.stage("sweep done", experiment=cfg.experiment.value,
                              rows=len(rows), failed=failed)
        return rows


def run_sweep(cfg: SweepConfig) -> List[SweepRow]:
    """
    Evaluate every grid point of a sweep

    Rows keep grid order whatever the number of workers; a failing column leaves a
    blank cell and is named in the row status.

    Args:
        cfg: Sweep configuration

    Returns:
        list: SweepRow per grid point
    """
    rows = SweepRunner(cfg).run()
    if cfg.output is not None:
        write_sweep_csv(rows, cfg.output, cfg)
    return rows


def write_sweep_csv(rows: List[SweepRow], output_file: Union[str, Path],
                    cfg: Optional[SweepConfig] = None, precision: int = 15) -> Path:
    """Write sweep rows as CSV plus a .meta.json sidecar with the sweep parameters"""
    columns = cfg.columns if cfg is not None else sorted({k for r in rows for k in r.values})
    path = write_csv(output_file, columns, [row.as_dict() for row in rows], precision)
    if cfg is not None:
        write_metadata(path, cfg.metadata())
    return path


def stokes_options(config: Optional[ConfigManager]) -> Dict[str, float]:
    """Tracer keyword arguments from the singulant section"""
    if config is None:
        return {}
    return {'max_arc': config.get('singulant.max_arc'), 'box': config.get('singulant.box'),
            'path_tol': config.get('singulant.path_tol')}


def run_stokes_map(cfg: SweepConfig, **trace_kwargs) -> List[StokesPath]:
    """Stokes lines of the two-singularity forcing and of its merged single-singularity form"""
    separated = Separated(a1=cfg.a1, a2=cfg.a2, sigma1=cfg.sigma1, sigma2=cfg.sigma2)
    merged = Single(a=cfg.a, sigma=cfg.sigma1 + cfg.sigma2)
    paths = (trace_all_stokes_lines(separated, **trace_kwargs)
             + trace_all_stokes_lines(merged, **trace_kwargs))
    for path in paths:
        logger.info(f"Stokes line from {path.origin.real:g}: {path.terminated_by.value}, "
                    f"crossing={path.crossing}")
    return paths


def write_stokes_csv(paths: List[StokesPath], output_file: Union[str, Path],
                     precision: int = 15) -> Path:
    """One row per vertex: line index, origin, k, re_w, im_w, re_chi, im_chi"""
    def rows():
        for index, path in enumerate(paths):
            for w, chi in zip(path.points, path.chi):
                yield {'line': index, 'origin': path.origin.real, 'k': path.k,
                       're_w': w.real, 'im_w': w.imag, 're_chi': chi.real, 'im_chi': chi.imag}

    fieldnames = ['line', 'origin', 'k', 're_w', 'im_w', 're_chi', 'im_chi']
    return write_csv(output_file, fieldnames, rows(), precision)
