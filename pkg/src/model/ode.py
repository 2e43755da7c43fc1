"""
Complex initial value problem for the free-surface speed

    i eps q_s phi dphi/dw = phi - q_s^2,   phi(w0) = q_s^2 + 2 i eps q_s^4 q_s'

integrated along the positive real w axis, plus extraction of the far-field wave.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp, cumulative_trapezoid
from scipy.signal import find_peaks

from model.forcing import ForcingSpec, eval_qs, eval_qs_prime
from utils.errors import DivisionNearZero, NoWaveDetected, StepFailure, WindowTooShort
from utils.csv_export import write_complex_columns

logger = logging.getLogger(__name__)

DEFAULT_W0 = 1e-5
DEFAULT_TOL = 1e-10
DIVISION_GUARD = 1e-14
NOISE_FLOOR = 1e-12
MIN_TOL, MAX_TOL = 1e-13, 1e-6


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution phi(w) on w0 <= w <= w_end"""

    w: np.ndarray
    phi: np.ndarray
    epsilon: float
    spec: ForcingSpec
    w0: float
    w_end: float
    tol: float = DEFAULT_TOL
    n_evaluations: int = 0

    def __post_init__(self):
        if len(self.w) != len(self.phi):
            raise ValueError("w and phi must have the same length")
        if len(self.w) < 2 or np.any(np.diff(self.w) <= 0):
            raise ValueError("samples must be strictly increasing in w")

    @property
    def samples(self) -> List[Tuple[float, complex]]:
        return list(zip(self.w.tolist(), self.phi.tolist()))

    def forcing(self) -> np.ndarray:
        """q_s at the sample points (real on w > 0)"""
        return np.real(eval_qs(self.spec, self.w, self.epsilon))

    def background(self) -> np.ndarray:
        """Two-term background q_s^2 + 2 i eps q_s^4 q_s'"""
        q = eval_qs(self.spec, self.w, self.epsilon)
        dq = eval_qs_prime(self.spec, self.w, self.epsilon)
        return q ** 2 + 2j * self.epsilon * q ** 4 * dq

    def to_csv(self, output_file: Union[str, Path], precision: int = 15) -> Path:
        """Export columns w, re_phi, im_phi"""
        return write_complex_columns(output_file, {'w': self.w, 'phi': self.phi}, precision)


@dataclass(frozen=True)
class WaveMeasurement:
    """Far-field wave extracted from a trajectory"""

    amplitude: float
    wavelength: float
    window: Tuple[float, float]
    n_extrema: int = 0
    fitted_amplitude: float = field(default=float('nan'))


def _real_forcing(spec: ForcingSpec, epsilon: float) -> Callable[[float], Tuple[float, float]]:
    """Fast q_s and q_s' for real w > 0, where every factor is real and positive"""
    factors = [(a_k, float(s_k)) for a_k, s_k in spec.factors(epsilon)]
    sigma = sum(s_k for _, s_k in factors)

    def q_and_slope(w: float) -> Tuple[float, float]:
        log_q = sigma * math.log(w)
        slope = sigma / w
        for a_k, s_k in factors:
            log_q -= s_k * math.log(w + a_k)
            slope -= s_k / (w + a_k)
        q = math.exp(log_q)
        return q, q * slope

    return q_and_slope


def initial_condition(spec: ForcingSpec, epsilon: float, w0: float = DEFAULT_W0) -> complex:
    """phi(w0) = q_s^2 + 2 i eps q_s^4 q_s'"""
    q = complex(eval_qs(spec, w0, epsilon))
    dq = complex(eval_qs_prime(spec, w0, epsilon))
    return q ** 2 + 2j * epsilon * q ** 4 * dq


def default_w_end(spec: ForcingSpec, epsilon: Optional[float] = None) -> float:
    """max(10, 20 a) with a the largest singularity distance"""
    return max(10.0, 20.0 * spec.far_scale(epsilon))


def integrate_phi(spec: ForcingSpec, epsilon: float, w0: float = DEFAULT_W0,
                  w_end: Optional[float] = None, tol: float = DEFAULT_TOL,
                  samples_per_wavelength: int = 32) -> Trajectory:
    """
    Integrate dphi/dw = (phi - q_s^2) / (i eps q_s phi) along real w

    The output grid is uniform with spacing 2 pi eps / samples_per_wavelength and
    starts exactly at w0.

    Args:
        spec: Forcing parametrization
        epsilon: Froude parameter
        w0: Start point, 0 < w0 << 1
        w_end: End point; default max(10, 20 a)
        tol: Relative tolerance of the adaptive DOP853 pair, in [1e-13, 1e-6]
        samples_per_wavelength: Output density

    Returns:
        Trajectory: Sampled solution

    Raises:
        StepFailure: If the step controller cannot advance
        DivisionNearZero: If |phi| or |q_s| drops below 1e-14
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not MIN_TOL <= tol <= MAX_TOL:
        raise ValueError(f"tol must lie in [{MIN_TOL:g}, {MAX_TOL:g}], got {tol}")
    if w0 <= 0:
        raise ValueError(f"w0 must be positive, got {w0}")
    if w_end is None:
        w_end = default_w_end(spec, epsilon)
    if w_end <= w0:
        raise ValueError(f"w_end must exceed w0, got w0={w0}, w_end={w_end}")

    q_and_slope = _real_forcing(spec, epsilon)
    phi0 = initial_condition(spec, epsilon, w0)

    def rhs(w, y):
        phi = y[0]
        q, _ = q_and_slope(w)
        if abs(phi) < DIVISION_GUARD or abs(q) < DIVISION_GUARD:
            raise DivisionNearZero(f"|phi|={abs(phi):.3e}, |q_s|={abs(q):.3e} at w={w:.6g}")
        return [(phi - q * q) / (1j * epsilon * q * phi)]

    spacing = 2.0 * math.pi * epsilon / samples_per_wavelength
    n_samples = max(int(math.ceil((w_end - w0) / spacing)) + 1, 2)
    w_eval = np.linspace(w0, w_end, n_samples)

    logger.info(f"Integrating {spec.kind.value} forcing: eps={epsilon}, w=[{w0:g}, {w_end:g}], "
                f"tol={tol:g}, {n_samples} samples")

    solution = solve_ivp(rhs, (w0, w_end), [phi0], method='DOP853', t_eval=w_eval,
                         rtol=tol, atol=tol * 1e-3)
    if solution.status != 0:
        raise StepFailure(f"integration stopped at w={solution.t[-1] if solution.t.size else w0}: "
                          f"{solution.message}")

    logger.debug(f"Integration finished with {solution.nfev} right-hand side evaluations")
    return Trajectory(w=solution.t, phi=solution.y[0], epsilon=epsilon, spec=spec,
                      w0=w0, w_end=w_end, tol=tol, n_evaluations=int(solution.nfev))


def default_window(traj: Trajectory, fraction: float = 0.4) -> Tuple[float, float]:
    """The last `fraction` of the trajectory"""
    return traj.w_end - fraction * (traj.w_end - traj.w0), traj.w_end


def _refine_extremum(w: np.ndarray, y: np.ndarray, i: int) -> Tuple[float, float]:
    """Vertex of the parabola through samples i-1, i, i+1"""
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    curvature = y0 - 2.0 * y1 + y2
    if curvature == 0:
        return float(w[i]), float(y1)
    offset = 0.5 * (y0 - y2) / curvature
    h = w[i + 1] - w[i]
    return float(w[i] + offset * h), float(y1 - 0.25 * (y0 - y2) * offset)


def measure_wave(traj: Trajectory, window: Optional[Tuple[float, float]] = None,
                 noise_factor: float = 100.0, trend_terms: int = 5) -> WaveMeasurement:
    """
    Measure the far-field wave in Re(phi)

    The two-term background is subtracted, then the residual is fitted by least
    squares to the oscillation {cos theta, sin theta} q_s^-4 (theta = int dw/(eps q_s^3))
    plus an algebraic trend {(w_lo/w)^j}. The trend is removed, the remainder is
    rescaled by q_s^4 to its far-field size, and extrema are located on it.

    Args:
        traj: Integrated trajectory
        window: (w_lo, w_hi) inside [w0, w_end]; default the last 40%
        noise_factor: Residuals below noise_factor * traj.tol count as no wave
        trend_terms: Number of algebraic trend functions

    Returns:
        WaveMeasurement: amplitude (half mean peak-to-trough) and wavelength (mean peak spacing)

    Raises:
        WindowTooShort: Window narrower than three wavelengths or fewer than 3 extrema
        NoWaveDetected: Residual below the noise floor
    """
    lo, hi = window if window is not None else default_window(traj)
    if lo < traj.w0 or hi > traj.w_end or hi <= lo:
        raise ValueError(f"window ({lo}, {hi}) is not inside [{traj.w0}, {traj.w_end}]")
    if hi - lo < 6.0 * math.pi * traj.epsilon:
        raise WindowTooShort(f"window width {hi - lo:.4g} is below three wavelengths "
                             f"({6.0 * math.pi * traj.epsilon:.4g})")

    mask = (traj.w >= lo) & (traj.w <= hi)
    w = traj.w[mask]
    if w.size < 8:
        raise WindowTooShort(f"only {w.size} samples in window ({lo}, {hi})")

    q = np.real(eval_qs(traj.spec, w, traj.epsilon))
    dq = np.real(eval_qs_prime(traj.spec, w, traj.epsilon))
    background = np.real(q ** 2 + 2j * traj.epsilon * q ** 4 * dq)
    residual = traj.phi[mask].real - background

    theta = cumulative_trapezoid(1.0 / (traj.epsilon * q ** 3), w, initial=0.0)
    scale = q ** -4
    columns = [np.cos(theta) * scale, np.sin(theta) * scale]
    columns += [(lo / w) ** j for j in range(trend_terms)]
    design = np.column_stack(columns)
    coeffs, _, _, _ = np.linalg.lstsq(design, residual, rcond=None)

    trend = design[:, 2:] @ coeffs[2:]
    oscillation = (residual - trend) * q ** 4

    threshold = max(noise_factor * traj.tol, NOISE_FLOOR)
    if not np.any(np.abs(oscillation) > threshold):
        raise NoWaveDetected(f"residual {np.max(np.abs(oscillation)):.3e} below noise floor "
                             f"{threshold:.3e}; lower tol or raise epsilon")

    peaks, _ = find_peaks(oscillation)
    troughs, _ = find_peaks(-oscillation)
    if len(peaks) + len(troughs) < 3 or len(peaks) < 2 or len(troughs) < 1:
        raise WindowTooShort(f"found {len(peaks)} peaks and {len(troughs)} troughs in ({lo}, {hi})")

    peak_points = [_refine_extremum(w, oscillation, i) for i in peaks]
    trough_points = [_refine_extremum(w, oscillation, i) for i in troughs]

    amplitude = 0.5 * (np.mean([v for _, v in peak_points]) - np.mean([v for _, v in trough_points]))
    wavelength = float(np.mean(np.diff([p for p, _ in peak_points])))
    fitted = float(np.hypot(coeffs[0], coeffs[1]))

    if amplitude < threshold:
        raise NoWaveDetected(f"amplitude {amplitude:.3e} below noise floor {threshold:.3e}")

    logger.info(f"Wave measured on ({lo:.4g}, {hi:.4g}): amplitude={amplitude:.6e}, "
                f"wavelength={wavelength:.6g}")
    return WaveMeasurement(amplitude=float(amplitude), wavelength=wavelength, window=(lo, hi),
                           n_extrema=len(peaks) + len(troughs), fitted_amplitude=fitted)
