"""
Singulants and Stokes lines

The singulant of the wave generated at w = -a_k is

    chi_k(w) = integral from -a_k to w of i / q_s(t)^3 dt

taken along paths in the upper half-plane. Stokes lines are the curves leaving -a_k
on which Im chi_k = 0 and Re chi_k grows.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad, IntegrationWarning

from model.forcing import ForcingSpec, eval_qs, inner_constant, log_qs
from utils.csv_export import write_complex_columns
from utils.errors import (BranchCutHit, CorrectorDivergence, DomainError, PathTooClose,
                          QuadratureFailure, SeedFailure)
from utils.numerics import segment_integral

logger = logging.getLogger(__name__)

DEFAULT_CLEARANCE = 1e-6
QUAD_EPSABS = 1e-12
QUAD_MAX_ERROR = 1e-10
PATH_TOL = 1e-10


class StokesTermination(Enum):
    """Why a Stokes line trace stopped"""
    CROSSED_REAL_AXIS = "crossed_real_axis"
    MAX_LENGTH = "max_length"
    LEFT_DOMAIN = "left_domain"


@dataclass(frozen=True, eq=False)
class StokesPath:
    """Polyline along Im chi = 0 starting at a singularity"""

    origin: complex
    k: int
    seed_angle: float
    points: np.ndarray
    chi: np.ndarray
    terminated_by: StokesTermination
    crossing: Optional[float] = None

    @property
    def crosses_positive_axis(self) -> bool:
        return (self.terminated_by is StokesTermination.CROSSED_REAL_AXIS
                and self.crossing is not None and self.crossing > 0)

    @property
    def arc_length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.points))))

    def to_csv(self, output_file: Union[str, Path], precision: int = 15) -> Path:
        """Export columns re_w, im_w, re_chi, im_chi"""
        return write_complex_columns(output_file, {'w': self.points, 'chi': self.chi}, precision)


def chi_prime(spec: ForcingSpec, w, epsilon: Optional[float] = None):
    """d chi/dw = i / q_s^3"""
    return 1j / eval_qs(spec, w, epsilon) ** 3


def _chi_prime_unguarded(spec: ForcingSpec, epsilon: Optional[float]):
    def integrand(w):
        with np.errstate(divide='ignore', invalid='ignore'):
            return 1j * np.exp(-3.0 * log_qs(spec, w, epsilon))
    return integrand


def far_field_re_chi(spec: ForcingSpec, epsilon: Optional[float] = None) -> float:
    """
    Re chi_1 on the positive real axis

    Closing the contour through the upper half-plane, only the 1/w term of
    i/q_s^3 = i (1 + 3 sum_k sigma_k a_k / w + ...) survives, giving 3 pi sum_k sigma_k a_k.
    """
    return 3.0 * math.pi * sum(float(s_k) * a_k for a_k, s_k in spec.factors(epsilon))


def _point_segment_distance(p: complex, p0: complex, p1: complex) -> float:
    d = p1 - p0
    length2 = abs(d) ** 2
    if length2 == 0:
        return abs(p - p0)
    t = ((p - p0) * d.conjugate()).real / length2
    t = min(max(t, 0.0), 1.0)
    return abs(p - (p0 + t * d))


def _touches_cut(p0: complex, p1: complex, clearance: float, skip_start: bool) -> bool:
    """Whether the segment meets the cut (-inf, 0] of the combined forcing"""
    y0, y1 = p0.imag, p1.imag
    if y0 == 0 and y1 == 0:
        return min(p0.real, p1.real) <= clearance
    if y0 == 0 and not skip_start and p0.real <= clearance:
        return True
    if y1 == 0 and p1.real <= clearance:
        return True
    if y0 * y1 < 0:
        x = p0.real + (p1.real - p0.real) * (y0 / (y0 - y1))
        return x <= clearance
    return False


def validate_path(spec: ForcingSpec, vertices: Sequence[complex], epsilon: Optional[float] = None,
                  clearance: float = DEFAULT_CLEARANCE):
    """
    Check a polyline starting at a singularity against the clearance rules

    Raises:
        PathTooClose: If any segment passes within `clearance` of 0 or a branch point,
            or meets the negative real axis anywhere but at its starting vertex
    """
    singular_points = [0.0] + spec.singularities(epsilon)
    start = vertices[0]
    for index, (p0, p1) in enumerate(zip(vertices[:-1], vertices[1:])):
        first = index == 0
        if first and p1.imag < 0:
            raise PathTooClose("path must leave the singularity into the upper half-plane")
        for point in singular_points:
            if first and point == start:
                if abs(p1 - point) < clearance:
                    raise PathTooClose(f"first segment ends within {clearance:g} of {point:g}")
                continue
            if _point_segment_distance(point, p0, p1) < clearance:
                raise PathTooClose(f"segment {p0} -> {p1} passes within {clearance:g} of {point:g}")
        if _touches_cut(p0, p1, clearance, skip_start=first):
            raise PathTooClose(f"segment {p0} -> {p1} meets the branch cut on the negative real axis")


def default_waypoints(spec: ForcingSpec, k: int, w: complex,
                      epsilon: Optional[float] = None) -> List[complex]:
    """Up from -a_k, across at constant height, then straight to w"""
    a_k = spec.factors(epsilon)[k - 1][0]
    height = max(0.5 * a_k, w.imag)
    waypoints = [complex(-a_k, height), complex(w.real, height)]
    return [p for p in waypoints if abs(p - w) > 0]


def _quad_segment(integrand, p0: complex, p1: complex, epsabs: float) -> complex:
    d = p1 - p0

    def real_part(t):
        return float(np.real(integrand(p0 + t * d) * d))

    def imag_part(t):
        return float(np.imag(integrand(p0 + t * d) * d))

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', IntegrationWarning)
        re_value, re_error = quad(real_part, 0.0, 1.0, epsabs=epsabs, epsrel=1e-11, limit=200)
        im_value, im_error = quad(imag_part, 0.0, 1.0, epsabs=epsabs, epsrel=1e-11, limit=200)

    error = max(re_error, im_error)
    if error > QUAD_MAX_ERROR or not np.isfinite(re_value + im_value):
        detail = f"; {caught[0].message}" if caught else ""
        raise QuadratureFailure(f"segment {p0} -> {p1}: error estimate {error:.2e} "
                                f"above {QUAD_MAX_ERROR:g}{detail}")
    if caught:
        logger.debug(f"quad warning on {p0} -> {p1} accepted at error {error:.2e}")
    return complex(re_value, im_value)


def chi_numeric(spec: ForcingSpec, k: int, w: complex, waypoints: Optional[Sequence[complex]] = None,
                epsilon: Optional[float] = None, clearance: float = DEFAULT_CLEARANCE,
                epsabs: float = QUAD_EPSABS) -> complex:
    """
    Singulant chi_k(w) by adaptive quadrature along a polyline

    Args:
        spec: Forcing parametrization
        k: 1-based singularity index
        w: Target point
        waypoints: Intermediate vertices; None picks an upper half-plane route,
            an empty list integrates along the straight segment
        epsilon: Required by the Coalescing variant
        clearance: Minimum distance to singular points and cuts
        epsabs: Absolute quadrature tolerance per real component

    Returns:
        complex: chi_k(w)

    Raises:
        PathTooClose: If the path violates the clearance
        QuadratureFailure: If a segment integral does not converge
    """
    w = complex(w)
    origin = complex(-spec.factors(epsilon)[k - 1][0])
    if w == origin:
        return 0j

    if waypoints is None:
        waypoints = default_waypoints(spec, k, w, epsilon)
    vertices = [origin] + [complex(p) for p in waypoints] + [w]
    validate_path(spec, vertices, epsilon, clearance)

    integrand = _chi_prime_unguarded(spec, epsilon)
    total = 0j
    for p0, p1 in zip(vertices[:-1], vertices[1:]):
        if p0 != p1:
            total += _quad_segment(integrand, p0, p1, epsabs)
    return total


def chi_merged(w: complex, a: float) -> complex:
    """
    Closed-form singulant of q_s = (w/(w + a))^(1/3)

        chi = a pi + i [(w + a) + a log(w/a)]

    Raises:
        BranchCutHit: For w on (-inf, 0]
    """
    w = complex(w)
    if w.imag == 0 and w.real <= 0:
        raise BranchCutHit(f"w = {w} lies on the branch cut of log(w/a)")
    return a * math.pi + 1j * ((w + a) + a * np.log(w / a))


def re_chi2_separated(a: float, beta: float, epsilon: float) -> float:
    """
    Re chi_2 on w > 0 for sigma1 = sigma2 = 1/6 with a1,2 = a +- sqrt(eps) beta

    Equals pi sqrt(a1 a2) = pi a sqrt(1 - eps (beta/a)^2).

    Raises:
        DomainError: If eps (beta/a)^2 >= 1
    """
    x = epsilon * (beta / a) ** 2
    if x >= 1:
        raise DomainError(f"eps (beta/a)^2 = {x:.4g} must be below 1")
    return math.pi * a * math.sqrt(1.0 - x)


def stokes_seed_angles(spec: ForcingSpec, k: int, epsilon: Optional[float] = None,
                       margin: float = 1e-9) -> List[float]:
    """
    Directions Arg(w + a_k) in (0, pi) along which the local singulant is real positive

    Near the singularity chi ~ X_k (w + a_k)^(1 + 3 sigma_k), so the admissible angles
    solve Arg X_k + (1 + 3 sigma_k) theta = 0 mod 2 pi. Angles at 0 or pi run along a
    branch cut and are dropped.
    """
    sigma_k = float(spec.factors(epsilon)[k - 1][1])
    power = 1.0 + 3.0 * sigma_k
    base = -float(np.angle(inner_constant(spec, k, epsilon)))
    angles = []
    for j in range(-4, 5):
        theta = (base + 2.0 * math.pi * j) / power
        if margin < theta < math.pi - margin:
            angles.append(theta)
    return sorted(angles)


def _correct(integrand, w: complex, chi: complex, direction: complex,
             path_tol: float, max_iter: int):
    """Newton iteration on Im chi along the normal i*direction"""
    normal = 1j * direction
    for _ in range(max_iter):
        if abs(chi.imag) <= path_tol:
            return w, chi
        rate = (complex(integrand(np.array([w]))[0]) * normal).imag
        if rate == 0 or not np.isfinite(rate):
            break
        w_new = w - (chi.imag / rate) * normal
        chi = chi + segment_integral(integrand, w, w_new)
        w = w_new
    if abs(chi.imag) <= path_tol:
        return w, chi
    raise CorrectorDivergence(f"|Im chi| = {abs(chi.imag):.2e} after {max_iter} iterations at w={w}")


def trace_stokes_line(spec: ForcingSpec, k: int, step: Optional[float] = None, max_arc: float = 4.0,
                      epsilon: Optional[float] = None, box: float = 4.0, path_tol: float = PATH_TOL,
                      seed_index: int = 0, max_corrector_iter: int = 12) -> StokesPath:
    """
    March along Im chi_k = 0 from -a_k

    Predictor: a step along conj(chi')/|chi'|, the direction in which chi increases
    through real values. Corrector: Newton on Im chi transverse to the path. chi is
    accumulated segment by segment with Gauss-Legendre quadrature.

    Args:
        spec: Forcing parametrization
        k: 1-based singularity index
        step: Arc-length step, at most 0.01 a_k (default 0.01 a_k)
        max_arc: Stop after this arc length
        epsilon: Required by the Coalescing variant
        box: Stop when |Re w| or Im w exceeds this
        path_tol: Accepted |Im chi| at each vertex
        seed_index: Which admissible seed direction to follow
        max_corrector_iter: Newton iteration cap

    Returns:
        StokesPath: The traced polyline

    Raises:
        SeedFailure: If no admissible initial direction exists
        CorrectorDivergence: If the corrector cannot return to Im chi = 0
    """
    a_k = spec.factors(epsilon)[k - 1][0]
    origin = complex(-a_k)
    if step is None:
        step = 0.01 * a_k
    if not 0 < step <= 0.01 * a_k * (1 + 1e-12):
        raise ValueError(f"step must lie in (0, {0.01 * a_k:g}], got {step}")

    seeds = stokes_seed_angles(spec, k, epsilon)
    if not seeds or seed_index >= len(seeds):
        raise SeedFailure(f"no admissible Stokes direction from w = {origin} (k={k})")
    theta = seeds[seed_index]

    integrand = _chi_prime_unguarded(spec, epsilon)
    others = [p for p in [0.0] + spec.singularities(epsilon) if p != origin]

    w = origin + step * complex(math.cos(theta), math.sin(theta))
    chi = chi_numeric(spec, k, w, waypoints=[], epsilon=epsilon)
    w, chi = _correct(integrand, w, chi, complex(math.cos(theta), math.sin(theta)),
                      path_tol, max_corrector_iter)

    points = [origin, w]
    chis = [0j, chi]
    arc = abs(w - origin)
    terminated_by = StokesTermination.MAX_LENGTH
    crossing = None

    while True:
        slope = complex(integrand(np.array([w]))[0])
        direction = slope.conjugate() / abs(slope)
        w_pred = w + step * direction

        # the real axis carries cuts on its negative half, so stop before integrating across it
        below = w_pred if w_pred.imag <= 0 else None
        if below is None:
            chi_pred = chi + segment_integral(integrand, w, w_pred)
            w_new, chi_new = _correct(integrand, w_pred, chi_pred, direction,
                                      path_tol, max_corrector_iter)
            if w_new.imag <= 0:
                below = w_new

        if below is not None:
            t = w.imag / (w.imag - below.imag)
            x = complex((w + t * (below - w)).real, 0.0)
            points.append(x)
            chis.append(chi + segment_integral(integrand, w, x))
            terminated_by = StokesTermination.CROSSED_REAL_AXIS
            crossing = x.real
            break

        if chi_new.real < chi.real:
            raise CorrectorDivergence(f"Re chi decreased at w={w_new}")

        points.append(w_new)
        chis.append(chi_new)
        arc += abs(w_new - w)
        w, chi = w_new, chi_new

        if arc >= max_arc:
            terminated_by = StokesTermination.MAX_LENGTH
            break
        if abs(w.real) > box or w.imag > box or any(abs(w - p) < step for p in others):
            terminated_by = StokesTermination.LEFT_DOMAIN
            break

    logger.debug(f"Stokes line k={k} from {origin}: {len(points)} vertices, "
                 f"{terminated_by.value}, crossing={crossing}")
    return StokesPath(origin=origin, k=k, seed_angle=theta, points=np.array(points),
                      chi=np.array(chis), terminated_by=terminated_by, crossing=crossing)


def trace_all_stokes_lines(spec: ForcingSpec, epsilon: Optional[float] = None,
                           **kwargs) -> List[StokesPath]:
    """Trace every admissible Stokes line of every singularity; skip singularities without seeds"""
    paths = []
    for k in range(1, len(spec.factors(epsilon)) + 1):
        seeds = stokes_seed_angles(spec, k, epsilon)
        if not seeds:
            logger.info(f"No Stokes line leaves singularity k={k} (flattened onto the real axis)")
            continue
        for index in range(len(seeds)):
            paths.append(trace_stokes_line(spec, k, epsilon=epsilon, seed_index=index, **kwargs))
    return paths
