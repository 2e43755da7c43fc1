"""
Forcing families q_s(w) for the low-Froude ship-wave model

Three parametrizations are supported:

    Single       q_s = (w / (w + a))^sigma
    Separated    q_s = w^(s1+s2) / ((w + a1)^s1 (w + a2)^s2)
    Coalescing   the separated form with a1,2 = a +- eps^(l/m) beta

Every complex power is taken on the principal branch with each factor's cut along
the negative real axis from its own branch point, and points on a cut take their
value from the upper side, so (-a)^sigma = a^sigma e^(i pi sigma).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import ClassVar, List, Optional, Tuple

import numpy as np
from scipy.special import gammaln

from utils.errors import SingularityHit, DomainError
from utils.numerics import log_upper
from utils.param_parser import parse_fraction, RationalLike

logger = logging.getLogger(__name__)

EXCLUSION_RADIUS = 1e-12


class ForcingKind(Enum):
    """Forcing parametrizations"""
    SINGLE = "single"
    SEPARATED = "separated"
    COALESCING = "coalescing"


def _check_sigma(name: str, sigma: Fraction):
    if not 0 < sigma < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {sigma}")


@dataclass(frozen=True)
class ForcingSpec:
    """Common interface of the forcing variants"""

    kind: ClassVar[ForcingKind]

    def factors(self, epsilon: Optional[float] = None) -> List[Tuple[float, Fraction]]:
        """Denominator factors as (a_k, sigma_k), ordered by decreasing a_k"""
        raise NotImplementedError

    def total_sigma(self) -> Fraction:
        """Total exponent sigma = sum of sigma_k"""
        raise NotImplementedError

    def singularities(self, epsilon: Optional[float] = None) -> List[float]:
        """Branch points w = -a_k, excluding the stagnation point w = 0"""
        return [-a_k for a_k, _ in self.factors(epsilon)]

    def far_scale(self, epsilon: Optional[float] = None) -> float:
        """Largest |a_k|, the geometric length scale of the forcing"""
        return max(a_k for a_k, _ in self.factors(epsilon))

    def describe(self) -> dict:
        """Parameters as a flat dictionary"""
        raise NotImplementedError


@dataclass(frozen=True)
class Single(ForcingSpec):
    """One singularity at w = -a"""

    a: float
    sigma: Fraction = field(default=Fraction(1, 3))

    kind: ClassVar[ForcingKind] = ForcingKind.SINGLE

    def __post_init__(self):
        object.__setattr__(self, 'sigma', parse_fraction(self.sigma))
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")
        _check_sigma("sigma", self.sigma)

    def factors(self, epsilon=None):
        return [(float(self.a), self.sigma)]

    def total_sigma(self) -> Fraction:
        return self.sigma

    def describe(self) -> dict:
        return {'forcing': self.kind.value, 'a': self.a, 'sigma': self.sigma}


@dataclass(frozen=True)
class Separated(ForcingSpec):
    """Two well-separated singularities at w = -a1 and w = -a2, 0 < a2 < a1"""

    a1: float
    a2: float
    sigma1: Fraction = field(default=Fraction(1, 4))
    sigma2: Fraction = field(default=Fraction(1, 4))

    kind: ClassVar[ForcingKind] = ForcingKind.SEPARATED

    def __post_init__(self):
        object.__setattr__(self, 'sigma1', parse_fraction(self.sigma1))
        object.__setattr__(self, 'sigma2', parse_fraction(self.sigma2))
        if not 0 < self.a2 < self.a1:
            raise ValueError(f"need 0 < a2 < a1, got a1={self.a1}, a2={self.a2}")
        _check_sigma("sigma1", self.sigma1)
        _check_sigma("sigma2", self.sigma2)

    def factors(self, epsilon=None):
        return [(float(self.a1), self.sigma1), (float(self.a2), self.sigma2)]

    def total_sigma(self) -> Fraction:
        return self.sigma1 + self.sigma2

    def describe(self) -> dict:
        return {'forcing': self.kind.value, 'a1': self.a1, 'a2': self.a2,
                'sigma1': self.sigma1, 'sigma2': self.sigma2}


@dataclass(frozen=True)
class Coalescing(ForcingSpec):
    """
    Two singularities a distance 2 eps^(l/m) beta apart, centred on w = -a

    ell/m must equal 1/(1 + 3(sigma1 + sigma2)) in lowest terms; use from_sigmas to
    derive them.
    """

    a: float
    beta: float
    sigma1: Fraction
    sigma2: Fraction
    ell: int
    m: int

    kind: ClassVar[ForcingKind] = ForcingKind.COALESCING

    def __post_init__(self):
        object.__setattr__(self, 'sigma1', parse_fraction(self.sigma1))
        object.__setattr__(self, 'sigma2', parse_fraction(self.sigma2))
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if self.beta < 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        _check_sigma("sigma1", self.sigma1)
        _check_sigma("sigma2", self.sigma2)

        expected = Fraction(1) / (1 + 3 * (self.sigma1 + self.sigma2))
        if (expected.numerator, expected.denominator) != (self.ell, self.m):
            raise ValueError(
                f"ell/m must be {expected.numerator}/{expected.denominator} in lowest terms "
                f"for sigma1+sigma2={self.sigma1 + self.sigma2}, got {self.ell}/{self.m}"
            )

    @classmethod
    def from_sigmas(cls, a: float, beta: float, sigma1: RationalLike,
                    sigma2: RationalLike) -> 'Coalescing':
        """Build a spec with ell/m derived from the exponents"""
        s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
        ratio = Fraction(1) / (1 + 3 * (s1 + s2))
        return cls(a=a, beta=beta, sigma1=s1, sigma2=s2,
                   ell=ratio.numerator, m=ratio.denominator)

    def total_sigma(self) -> Fraction:
        return self.sigma1 + self.sigma2

    @property
    def scale_exponent(self) -> Fraction:
        """ell/m, the power of epsilon in the separation"""
        return Fraction(self.ell, self.m)

    def half_gap(self, epsilon: float) -> float:
        """delta = eps^(l/m) beta"""
        if epsilon is None or epsilon <= 0:
            raise ValueError("the coalescing forcing needs epsilon > 0")
        return float(epsilon ** float(self.scale_exponent) * self.beta)

    def separation(self, epsilon: float) -> Tuple[float, float]:
        """
        Singularity positions for a given epsilon

        Returns:
            tuple: (a1, a2) with a1 = a + delta, a2 = a - delta

        Raises:
            DomainError: If a2 <= 0 (the singularity would sit on the physical axis)
        """
        delta = self.half_gap(epsilon)
        a1, a2 = self.a + delta, self.a - delta
        if a2 <= 0:
            raise DomainError(f"a - eps^(l/m) beta = {a2} is not positive")
        return a1, a2

    def factors(self, epsilon=None):
        a1, a2 = self.separation(epsilon)
        return [(a1, self.sigma1), (a2, self.sigma2)]

    def to_separated(self, epsilon: float) -> Separated:
        """The equivalent two-singularity spec at a given epsilon"""
        a1, a2 = self.separation(epsilon)
        if a1 == a2:
            raise DomainError("beta = 0 has no separated counterpart")
        return Separated(a1=a1, a2=a2, sigma1=self.sigma1, sigma2=self.sigma2)

    def merged(self) -> Single:
        """The epsilon -> 0 limit with one singularity of strength sigma1 + sigma2"""
        return Single(a=self.a, sigma=self.total_sigma())

    def describe(self) -> dict:
        return {'forcing': self.kind.value, 'a': self.a, 'beta': self.beta,
                'sigma1': self.sigma1, 'sigma2': self.sigma2, 'ell': self.ell, 'm': self.m}


def _guard(spec: ForcingSpec, w, epsilon, exclusion_radius: float):
    w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
    points = [0.0] + spec.singularities(epsilon)
    for point in points:
        if np.any(np.abs(w_arr - point) < exclusion_radius):
            raise SingularityHit(f"w within {exclusion_radius:g} of singular point {point:g}")


def log_qs(spec: ForcingSpec, w, epsilon: Optional[float] = None):
    """Principal log of q_s without the singularity guard (log 0 gives -inf)"""
    factors = spec.factors(epsilon)
    total = sum((s for _, s in factors), Fraction(0))
    result = float(total) * log_upper(w)
    for a_k, s_k in factors:
        result = result - float(s_k) * log_upper(np.asarray(w) + a_k)
    return result


def eval_qs(spec: ForcingSpec, w, epsilon: Optional[float] = None,
            exclusion_radius: float = EXCLUSION_RADIUS):
    """
    Evaluate the forcing q_s(w)

    The exact product form is used for every variant; for Coalescing the truncated
    series is never involved.

    Args:
        spec: Forcing parametrization
        w: Complex scalar or array
        epsilon: Froude parameter, required by the Coalescing variant
        exclusion_radius: Minimum distance to 0 and to every branch point

    Returns:
        Complex value(s) of q_s

    Raises:
        SingularityHit: If w is within exclusion_radius of a singular point
    """
    _guard(spec, w, epsilon, exclusion_radius)
    return np.exp(log_qs(spec, w, epsilon))


def log_derivative(spec: ForcingSpec, w, epsilon: Optional[float] = None):
    """q_s'/q_s = sigma/w - sum_k sigma_k/(w + a_k)"""
    w = np.asarray(w, dtype=complex)
    factors = spec.factors(epsilon)
    total = float(sum((s for _, s in factors), Fraction(0)))
    result = total / w
    for a_k, s_k in factors:
        result = result - float(s_k) / (w + a_k)
    return result


def eval_qs_prime(spec: ForcingSpec, w, epsilon: Optional[float] = None,
                  exclusion_radius: float = EXCLUSION_RADIUS):
    """Analytic derivative dq_s/dw"""
    return eval_qs(spec, w, epsilon, exclusion_radius) * log_derivative(spec, w, epsilon)


def pochhammer_ratio_table(sigma: Fraction, n_max: int) -> np.ndarray:
    """(sigma)_j / j! for j = 0..n_max via log-gamma"""
    j = np.arange(n_max + 1)
    s = float(sigma)
    return np.exp(gammaln(s + j) - gammaln(s) - gammaln(j + 1.0))


def series_f_table(n_max: int, sigma1: RationalLike, sigma2: RationalLike) -> np.ndarray:
    """
    Coefficients f_0..f_n_max of (1 + x)^(-sigma1) (1 - x)^(-sigma2)

    f_n = sum_j (-1)^j (sigma1)_j/j! (sigma2)_(n-j)/(n-j)!

    Args:
        n_max: Highest index
        sigma1: Exponent attached to the singularity at -a1
        sigma2: Exponent attached to the singularity at -a2

    Returns:
        np.ndarray: Real array of length n_max + 1
    """
    if n_max < 0:
        raise ValueError(f"n must be non-negative, got {n_max}")
    s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
    first = pochhammer_ratio_table(s1, n_max) * (-1.0) ** np.arange(n_max + 1)
    second = pochhammer_ratio_table(s2, n_max)
    f = np.convolve(first, second)[:n_max + 1]
    if s1 == s2:
        # odd terms cancel pairwise; keep them exactly zero
        f[1::2] = 0.0
    return f


def series_f(n: int, sigma1: RationalLike, sigma2: RationalLike) -> float:
    """Single coefficient f_n; f_0 = 1, f_1 = s2 - s1, f_2 = [(s1 - s2)^2 + s1 + s2]/2"""
    return float(series_f_table(n, sigma1, sigma2)[n])


def leading_order(spec: Coalescing, w):
    """q_0(w) = (w/(w + a))^sigma with sigma = sigma1 + sigma2"""
    w = np.asarray(w, dtype=complex)
    return np.exp(float(spec.total_sigma()) * (log_upper(w) - log_upper(w + spec.a)))


def eval_e(n: int, w, spec: Coalescing, exclusion_radius: float = EXCLUSION_RADIUS):
    """
    Series coefficient e_n(w) = (beta/(w + a))^n f_n

    Raises:
        SingularityHit: At w = -a
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    w_arr = np.asarray(w, dtype=complex)
    if np.any(np.abs(w_arr + spec.a) < exclusion_radius):
        raise SingularityHit(f"e_n is singular at w = -a = {-spec.a}")
    f_n = series_f(n, spec.sigma1, spec.sigma2)
    return (spec.beta / (w_arr + spec.a)) ** n * f_n


def eval_qs_series(spec: Coalescing, w, epsilon: float, n_terms: int,
                   exclusion_radius: float = EXCLUSION_RADIUS):
    """q_0(w) sum_{n < n_terms} eps^(l n/m) e_n(w), the small-separation expansion of q_s"""
    w_arr = np.asarray(w, dtype=complex)
    if np.any(np.abs(w_arr + spec.a) < exclusion_radius):
        raise SingularityHit(f"series is singular at w = -a = {-spec.a}")
    f = series_f_table(n_terms - 1, spec.sigma1, spec.sigma2)
    x = epsilon ** float(spec.scale_exponent) * spec.beta / (w_arr + spec.a)
    total = np.zeros_like(w_arr)
    power = np.ones_like(w_arr)
    for n in range(n_terms):
        total = total + f[n] * power
        power = power * x
    return leading_order(spec, w_arr) * total


def local_coefficient(spec: ForcingSpec, k: int, epsilon: Optional[float] = None) -> complex:
    """
    Constant c_k of the local behaviour q_s ~ c_k (w + a_k)^(-sigma_k) as w -> -a_k

    The limit is taken from the upper half-plane: every other factor is evaluated at
    w = -a_k on its upper side.

    Args:
        spec: Forcing parametrization
        k: 1-based singularity index (1 is the farthest from the origin)
        epsilon: Required by the Coalescing variant

    Returns:
        complex: c_k
    """
    factors = spec.factors(epsilon)
    if not 1 <= k <= len(factors):
        raise ValueError(f"singularity index must be in 1..{len(factors)}, got {k}")
    a_k, _ = factors[k - 1]
    total = float(sum((s for _, s in factors), Fraction(0)))
    log_c = total * log_upper(-a_k)
    for j, (a_j, s_j) in enumerate(factors, start=1):
        if j != k:
            log_c -= float(s_j) * log_upper(a_j - a_k)
    return complex(np.exp(log_c))


def inner_constant(spec: ForcingSpec, k: int = 1, epsilon: Optional[float] = None) -> complex:
    """
    X_k = i / (c_k^3 (1 + 3 sigma_k)), the coefficient of the local singulant

    chi ~ X_k (w + a_k)^(1 + 3 sigma_k) near the singularity; for the merged sigma = 1/3
    case X = -i/(2a).
    """
    factors = spec.factors(epsilon)
    sigma_k = float(factors[k - 1][1])
    c_k = local_coefficient(spec, k, epsilon)
    c_cubed = np.exp(3.0 * log_upper(c_k))
    return complex(1j / (c_cubed * (1.0 + 3.0 * sigma_k)))


def merged_inner_constant(spec: Coalescing) -> complex:
    """X for the merged singularity at -a with exponent sigma1 + sigma2"""
    sigma = float(spec.total_sigma())
    c_cubed = np.exp(3.0 * sigma * log_upper(-spec.a))
    return complex(1j / (c_cubed * (1.0 + 3.0 * sigma)))


def ehat_log_table(n_max: int, spec: Coalescing) -> Tuple[np.ndarray, np.ndarray]:
    """
    Log-magnitudes and phases of e-hat_0..e-hat_n_max

    e-hat_n = beta^(n/l) X^(n/m) f_(n/l) when l divides n, otherwise 0. Zero entries
    carry log-magnitude -inf.

    Returns:
        tuple: (log_abs, phase) real arrays
    """
    X = merged_inner_constant(spec)
    log_X = log_upper(X)
    n = np.arange(n_max + 1)
    log_abs = np.full(n_max + 1, -np.inf)
    phase = np.zeros(n_max + 1)

    mask = (n % spec.ell) == 0
    p = n[mask] // spec.ell
    f = series_f_table(int(p.max()) if p.size else 0, spec.sigma1, spec.sigma2)[p]

    if spec.beta == 0:
        log_abs[0] = 0.0
        return log_abs, phase

    nonzero = f != 0
    idx = n[mask][nonzero]
    beta_term = p[nonzero] * np.log(spec.beta)
    log_abs[idx] = beta_term + (idx / spec.m) * log_X.real + np.log(np.abs(f[nonzero]))
    phase[idx] = (idx / spec.m) * log_X.imag + np.where(f[nonzero] < 0, np.pi, 0.0)
    return log_abs, phase


def eval_ehat(n: int, spec: Coalescing) -> complex:
    """
    Inner series coefficient e-hat_n

    Reduces to beta^n X^(n/2) f_n when l = 1, m = 2; e-hat_0 = 1 for every beta.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    log_abs, phase = ehat_log_table(n, spec)
    if not np.isfinite(log_abs[n]):
        return 0j
    return complex(np.exp(log_abs[n] + 1j * phase[n]))
