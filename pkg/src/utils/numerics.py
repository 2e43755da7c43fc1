"""
Numerical helpers shared by the model and asymptotics packages
Principal-branch complex powers, sequence limit extrapolation, segment quadrature
"""

import logging
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

logger = logging.getLogger(__name__)


def log_upper(z):
    """
    Principal logarithm with Arg in (-pi, pi]

    Negative reals carrying a signed zero imaginary part are mapped to Arg = +pi,
    i.e. points on a cut take their value from the upper side.

    Args:
        z: Complex scalar or array

    Returns:
        Complex logarithm with the same shape as z
    """
    z = np.asarray(z, dtype=complex)
    on_cut = (z.imag == 0) & (z.real < 0)
    if np.any(on_cut):
        z = np.where(on_cut, z.real + 0j, z)
    result = np.log(z)
    return result if result.ndim else complex(result)


def principal_power(z, exponent):
    """z**exponent on the principal branch with negative reals at Arg = +pi"""
    return np.exp(exponent * log_upper(z))


@lru_cache(maxsize=16)
def _legendre_rule(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    return leggauss(nodes)


def segment_integral(func: Callable, p0: complex, p1: complex, nodes: int = 16) -> complex:
    """
    Gauss-Legendre integral of func along the straight segment p0 -> p1

    Args:
        func: Vectorized complex function
        p0: Segment start
        p1: Segment end
        nodes: Number of Gauss-Legendre nodes

    Returns:
        complex: Value of the contour integral
    """
    x, w = _legendre_rule(nodes)
    half = 0.5 * (p1 - p0)
    points = p0 + half * (x + 1.0)
    return complex(half * np.sum(w * func(points)))


def extrapolate_limit(ns: Sequence[float], values: Sequence[complex], exponent: float,
                      order: int = 3) -> Tuple[complex, float]:
    """
    Estimate lim_{n->inf} of a sequence with algebraic corrections

    The samples are fitted by least squares on the basis {n^(-k*exponent), k = 0..order};
    the constant coefficient is the limit. The error estimate is the change in the
    limit when the highest correction is dropped.

    Args:
        ns: Sample indices (large n)
        values: Sequence values at ns (real or complex)
        exponent: Power of the leading correction, e.g. 1 for O(1/n), 1/m for O(n^(-1/m))
        order: Number of correction terms

    Returns:
        tuple: (limit, error_estimate)
    """
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values)
    if order < 1:
        raise ValueError("extrapolation order must be at least 1")
    if len(ns) < order + 2:
        raise ValueError(f"need at least {order + 2} samples for order {order}, got {len(ns)}")

    x = ns.min() / ns

    def fit(k_max: int) -> complex:
        basis = np.column_stack([x ** (k * exponent) for k in range(k_max + 1)])
        coeffs, _, _, _ = np.linalg.lstsq(basis, values, rcond=None)
        return coeffs[0]

    limit = fit(order)
    previous = fit(order - 1)
    error = float(abs(limit - previous))

    if np.iscomplexobj(values):
        limit = complex(limit)
    else:
        limit = float(np.real(limit))

    logger.debug(f"Extrapolated limit {limit} (error {error:.3e}) from {len(ns)} samples")
    return limit, error


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]"""
    wrapped = float(np.angle(np.exp(1j * theta)))
    if wrapped <= -np.pi:
        wrapped += 2 * np.pi
    return wrapped
