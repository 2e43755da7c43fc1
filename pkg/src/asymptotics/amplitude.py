"""
Closed-form predictions of the far-field wave amplitude

Single and separated singularities use the factorial-over-power late terms; two
coalescing singularities with sigma1 + sigma2 = 1/3 use the exponential-over-power
late terms, which add the factor exp(F1/sqrt(eps)) and the beta^2 correction to the
prefactor. Divergence constants are always passed in from the recurrence module.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from model.forcing import ForcingKind, Separated, local_coefficient
from asymptotics.recurrence import analytic_mu_gamma
from asymptotics.singulant import chi_merged, chi_numeric, stokes_seed_angles, trace_stokes_line
from utils.errors import DomainError, NoStokesCrossing, SeedFailure, WrongRegime
from utils.numerics import log_upper, wrap_angle
from utils.param_parser import parse_fraction, RationalLike

logger = logging.getLogger(__name__)

ONE_THIRD = Fraction(1, 3)
ONE_SIXTH = Fraction(1, 6)


@dataclass(frozen=True)
class AmplitudePrediction:
    """amplitude = prefactor * exp(-exponent_rate/eps - secondary_rate/sqrt(eps))"""

    regime: ForcingKind
    amplitude: float
    exponent_rate: float
    prefactor: float
    secondary_rate: float = 0.0
    phase: Optional[float] = None
    singularity: Optional[int] = None
    inputs: Dict[str, object] = field(default_factory=dict)

    def reassemble(self, epsilon: float) -> float:
        """Recompute the amplitude from its factors"""
        return self.prefactor * math.exp(-self.exponent_rate / epsilon
                                         - self.secondary_rate / math.sqrt(epsilon))


def _assemble(regime: ForcingKind, prefactor: float, exponent_rate: float, epsilon: float,
              secondary_rate: float = 0.0, **extra) -> AmplitudePrediction:
    amplitude = prefactor * math.exp(-exponent_rate / epsilon - secondary_rate / math.sqrt(epsilon))
    inputs = dict(extra.pop('inputs', {}), epsilon=epsilon)
    return AmplitudePrediction(regime=regime, amplitude=amplitude, exponent_rate=exponent_rate,
                               prefactor=prefactor, secondary_rate=secondary_rate,
                               inputs=inputs, **extra)


def _check_epsilon(epsilon: float):
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")


def gamma_k(sigma: RationalLike) -> float:
    """Power of the late-term Gamma function, 6 sigma/(1 + 3 sigma)"""
    s = parse_fraction(sigma)
    if not 0 < s < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {s}")
    return float(6 * s / (1 + 3 * s))


def _factorial_over_power_prefactor(c_abs: float, sigma: Fraction, omega: float,
                                    epsilon: float) -> float:
    """2 pi Omega/eps^gamma * |c|^(6 - 3 gamma)/(1 + 3 sigma)^gamma"""
    g = gamma_k(sigma)
    return (2.0 * math.pi * omega / epsilon ** g
            * c_abs ** (6.0 - 3.0 * g) / (1.0 + 3.0 * float(sigma)) ** g)


def amp_single(a: float, sigma: RationalLike, epsilon: float, omega: float) -> AmplitudePrediction:
    """
    Far-field amplitude generated by one singularity at w = -a

    Uses |c| = a^sigma and Re chi = 3 pi sigma a (= pi a for sigma = 1/3).
    """
    _check_epsilon(epsilon)
    s = parse_fraction(sigma)
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    prefactor = _factorial_over_power_prefactor(a ** float(s), s, omega, epsilon)
    re_chi = 3.0 * math.pi * float(s) * a
    return _assemble(ForcingKind.SINGLE, prefactor, re_chi, epsilon,
                     inputs={'a': a, 'sigma': s, 'omega': omega})


def _stokes_crossing(spec: Separated, k: int) -> Optional[float]:
    """Positive real-axis crossing of any Stokes line from -a_k, None when there is none"""
    try:
        seeds = stokes_seed_angles(spec, k)
        if not seeds:
            raise SeedFailure(f"no Stokes direction from singularity {k}")
        for index in range(len(seeds)):
            path = trace_stokes_line(spec, k, seed_index=index)
            if path.crosses_positive_axis:
                return path.crossing
    except SeedFailure as e:
        logger.debug(f"singularity {k}: {e}")
    return None


def phase_shift(spec: Separated, k: int, epsilon: float) -> float:
    """
    Phase Psi_k of the wave from -a_k in Re phi ~ -A_k sin(-w/eps + Psi_k)

    Psi_k = -Im[chi_k - chi_1]/eps + (6 - 3 gamma_k) Arg c_k + pi gamma_k / 2,
    with the singulant difference evaluated on the positive real axis.
    """
    _check_epsilon(epsilon)
    sigma_k = spec.factors()[k - 1][1]
    g = gamma_k(sigma_k)
    c_k = local_coefficient(spec, k)
    shift = 0.0
    if k != 1:
        shift = (chi_numeric(spec, k, 1.0) - chi_numeric(spec, 1, 1.0)).imag
    return wrap_angle(-shift / epsilon + (6.0 - 3.0 * g) * float(np.angle(c_k))
                      + 0.5 * math.pi * g)


def amp_separated(spec: Separated, epsilon: float,
                  omega_table: Mapping[Fraction, float]) -> List[AmplitudePrediction]:
    """
    Per-singularity far-field amplitudes for two well-separated singularities

    A singularity contributes only if one of its Stokes lines reaches the positive
    real axis.

    Args:
        spec: Separated forcing
        epsilon: Froude parameter
        omega_table: Omega(sigma) keyed by the exact exponent

    Returns:
        list: One prediction per contributing singularity, ordered by k

    Raises:
        NoStokesCrossing: If no singularity contributes
    """
    _check_epsilon(epsilon)
    predictions = []
    for k, (a_k, sigma_k) in enumerate(spec.factors(), start=1):
        crossing = _stokes_crossing(spec, k)
        if crossing is None:
            logger.info(f"Singularity k={k} at -{a_k:g} has no Stokes line crossing w > 0")
            continue
        if sigma_k not in omega_table:
            raise ValueError(f"omega_table has no entry for sigma={sigma_k}")

        re_chi = chi_numeric(spec, k, crossing).real
        c_abs = abs(local_coefficient(spec, k))
        prefactor = _factorial_over_power_prefactor(c_abs, sigma_k, omega_table[sigma_k], epsilon)
        predictions.append(_assemble(
            ForcingKind.SEPARATED, prefactor, re_chi, epsilon,
            phase=phase_shift(spec, k, epsilon), singularity=k,
            inputs={'a_k': a_k, 'sigma_k': sigma_k, 'omega': omega_table[sigma_k],
                    'crossing': crossing}))

    if not predictions:
        raise NoStokesCrossing(f"no Stokes line of {spec.describe()} crosses the positive real axis")
    return predictions


def combine_separated(predictions: Sequence[AmplitudePrediction]) -> float:
    """Amplitude |sum_k A_k e^(i Psi_k)| of the superposed far-field waves"""
    total = sum(p.amplitude * np.exp(1j * (p.phase or 0.0)) for p in predictions)
    return float(abs(total))


def amp_separated_near_merged(a: float, beta: float, epsilon: float,
                              omega_one_sixth: float) -> AmplitudePrediction:
    """
    Separated prediction for sigma1 = sigma2 = 1/6 at a1,2 = a +- sqrt(eps) beta

        [2 a^(4/3) e^(pi beta^2/2a) / (3 beta)^(2/3)] Omega(1/6) (pi/eps) e^(-pi a/eps)
    """
    _check_epsilon(epsilon)
    if not beta > 0:
        raise DomainError(f"the separated form needs beta > 0, got {beta}")
    prefactor = (2.0 * a ** (4.0 / 3.0) * math.exp(math.pi * beta ** 2 / (2.0 * a))
                 / (3.0 * beta) ** (2.0 / 3.0) * omega_one_sixth * math.pi / epsilon)
    return _assemble(ForcingKind.SEPARATED, prefactor, math.pi * a, epsilon, singularity=2,
                     inputs={'a': a, 'beta': beta, 'omega': omega_one_sixth})


def _check_one_third(sigma1: Fraction, sigma2: Fraction):
    if sigma1 + sigma2 != ONE_THIRD:
        raise WrongRegime(f"coalescing closed forms need sigma1 + sigma2 = 1/3, "
                          f"got {sigma1 + sigma2}")


def _f1_f2(sigma1: Fraction, sigma2: Fraction):
    f1 = sigma2 - sigma1
    f2 = ((sigma1 - sigma2) ** 2 + sigma1 + sigma2) / 2
    return float(f1), float(f2)


def amp_coalescing(a: float, beta: float, sigma1: RationalLike, sigma2: RationalLike,
                   epsilon: float, omega_cc: float, w: float = math.inf) -> AmplitudePrediction:
    """
    Wave amplitude for two singularities a distance 2 sqrt(eps) beta apart

        [pi a Omega_cc / (eps q0(w)^4)] exp[-(9 pi beta^2/4a)(2 f1^2 - f2)]
            * exp[-a pi/eps - 3 pi beta |s2 - s1|/sqrt(eps)]

    Args:
        a: Centre of the pair
        beta: Scaled half separation
        sigma1, sigma2: Exponents with sigma1 + sigma2 = 1/3
        epsilon: Froude parameter
        omega_cc: Prefactor constant from the coalescing recurrence
        w: Point on the positive real axis; infinity gives the far field

    Raises:
        WrongRegime: If sigma1 + sigma2 != 1/3
    """
    _check_epsilon(epsilon)
    s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
    _check_one_third(s1, s2)
    if not w > 0:
        raise DomainError(f"w must lie on the positive real axis, got {w}")

    f1, f2 = _f1_f2(s1, s2)
    q0 = 1.0 if math.isinf(w) else (w / (w + a)) ** (1.0 / 3.0)
    prefactor = (math.pi * a * omega_cc / (epsilon * q0 ** 4)
                 * math.exp(-(9.0 * math.pi * beta ** 2 / (4.0 * a)) * (2.0 * f1 ** 2 - f2)))
    secondary = 3.0 * math.pi * beta * abs(f1)
    return _assemble(ForcingKind.COALESCING, prefactor, math.pi * a, epsilon, secondary,
                     inputs={'a': a, 'beta': beta, 'sigma1': s1, 'sigma2': s2,
                             'omega_cc': omega_cc, 'w': w})


def amp_coalescing_symmetric(a: float, beta: float, epsilon: float,
                             omega_cc: float) -> AmplitudePrediction:
    """sigma1 = sigma2 = 1/6 far field: a e^(3 pi beta^2/8a) Omega_cc (pi/eps) e^(-pi a/eps)"""
    _check_epsilon(epsilon)
    prefactor = a * math.exp(3.0 * math.pi * beta ** 2 / (8.0 * a)) * omega_cc * math.pi / epsilon
    return _assemble(ForcingKind.COALESCING, prefactor, math.pi * a, epsilon,
                     inputs={'a': a, 'beta': beta, 'sigma1': ONE_SIXTH, 'sigma2': ONE_SIXTH,
                             'omega_cc': omega_cc})


def omega_cc_large_beta(a: float, beta: float, omega_one_sixth: float) -> float:
    """Separating-pair limit of Omega_cc: 2 (a/9 beta^2)^(1/3) e^(pi beta^2/8a) Omega(1/6)"""
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    return (2.0 * (a / (9.0 * beta ** 2)) ** (1.0 / 3.0)
            * math.exp(math.pi * beta ** 2 / (8.0 * a)) * omega_one_sixth)


def c6x(a: float) -> complex:
    """c^6 X for the merged sigma = 1/3 singularity; equals -i a/2"""
    c = complex(np.exp(log_upper(-a) / 3.0))
    X = -1j / (2.0 * a)
    return c ** 6 * X


def c6x_power(a: float, gamma: complex) -> complex:
    """(c^6 X)^gamma with Arg(c^6 X) taken as 3 pi/2"""
    return complex(np.exp(gamma * (math.log(abs(c6x(a))) + 1.5j * math.pi)))


def _log_minus_w(w: complex, a: float, f1: float) -> complex:
    """log(-w/a) continued through the upper half-plane as Log(w/a) + i pi sign(f1)"""
    return complex(np.log(w / a)) + 1j * math.pi * math.copysign(1.0, f1)


def r1_eval(w: complex, a: float, beta: float, sigma1: RationalLike,
            sigma2: RationalLike) -> complex:
    """
    r_1(w) = 3 i beta f1 log(-w/a) / sqrt(2 chi)

    The square root carries the sign kappa = sign(f1), so r_1 -> mu_1 as w -> -a from
    above and F_1 = kappa sqrt(2 chi) r_1 has Re F_1 = -3 pi beta |f1| on w > 0.

    Raises:
        WrongRegime: If sigma1 + sigma2 != 1/3
        BranchCutHit: For w on the non-positive real axis
    """
    s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
    _check_one_third(s1, s2)
    w = complex(w)
    chi = chi_merged(w, a)
    f1, _ = _f1_f2(s1, s2)
    if f1 == 0:
        return 0j
    kappa = math.copysign(1.0, f1)
    F1 = 3j * beta * f1 * _log_minus_w(w, a, f1)
    return complex(F1 / (kappa * np.sqrt(2.0 * chi)))


def f1_eval(w: complex, a: float, beta: float, sigma1: RationalLike,
            sigma2: RationalLike) -> complex:
    """F_1 = kappa sqrt(2 chi) r_1 = 3 i beta f1 log(-w/a) from r1_eval"""
    s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
    f1, _ = _f1_f2(s1, s2)
    if f1 == 0:
        return 0j
    r1 = r1_eval(w, a, beta, s1, s2)
    return complex(math.copysign(1.0, f1) * np.sqrt(2.0 * chi_merged(complex(w), a)) * r1)


def f1_closed_form(w: float, a: float, beta: float, sigma1: RationalLike,
                   sigma2: RationalLike) -> complex:
    """F_1 = -3 pi beta |s2 - s1| + 3 i beta (s2 - s1) log(w/a) on w > 0"""
    s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
    point = complex(w)
    if point.imag != 0 or not point.real > 0:
        raise DomainError(f"closed form holds on the positive real axis, got {w}")
    f1 = float(s2 - s1)
    return complex(-3.0 * math.pi * beta * abs(f1), 3.0 * beta * f1 * math.log(point.real / a))


def q0(w: complex, a: float) -> complex:
    """Leading-order merged forcing (w/(w + a))^(1/3)"""
    w = complex(w)
    return complex(np.exp((log_upper(w) - log_upper(w + a)) / 3.0))


def p_eval(w: complex, a: float, beta: float, sigma1: RationalLike, sigma2: RationalLike,
           omega_cc: float, tau: float) -> complex:
    """
    Prefactor P(w) of the coalescing late terms

        P = (c^6 X)^gamma [Omega_cc e^(i tau)] q0^(2(1 - 3 gamma)) exp[(r1^2 - mu1^2)/4]

    Raises:
        WrongRegime: If sigma1 + sigma2 != 1/3
        BranchCutHit: For w on the non-positive real axis
    """
    s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
    _check_one_third(s1, s2)
    mu1, gamma = analytic_mu_gamma(s1, s2, a, beta)
    r1 = r1_eval(w, a, beta, s1, s2)
    log_q0 = (log_upper(complex(w)) - log_upper(complex(w) + a)) / 3.0
    q0_power = complex(np.exp(2.0 * (1.0 - 3.0 * gamma) * log_q0))
    return (c6x_power(a, gamma) * omega_cc * complex(np.exp(1j * tau)) * q0_power
            * complex(np.exp((r1 ** 2 - mu1 ** 2) / 4.0)))


def p_magnitude(w: float, a: float, beta: float, sigma1: RationalLike, sigma2: RationalLike,
                omega_cc: float) -> float:
    """|P e^(-r1^2/4)| on w > 0: |c^6 X| e^(-(9 pi beta^2/4a)(2 f1^2 - f2)) Omega_cc q0^(2(1 - 3 Re gamma))"""
    s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
    _check_one_third(s1, s2)
    f1, f2 = _f1_f2(s1, s2)
    _, gamma = analytic_mu_gamma(s1, s2, a, beta)
    q = abs(q0(w, a))
    return (abs(c6x(a)) * math.exp(-(9.0 * math.pi * beta ** 2 / (4.0 * a)) * (2.0 * f1 ** 2 - f2))
            * omega_cc * q ** (2.0 * (1.0 - 3.0 * gamma.real)))
