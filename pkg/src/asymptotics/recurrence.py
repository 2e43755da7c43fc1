"""
Inner-problem recurrences and the divergence constants of their late terms

Three coefficient recurrences are evaluated:

    toy          A_n = (n/2 - 1) A_(n-2) + (n/2 - 3/2) A_(n-3),  A_1 = A_2 = 1
    separated    A_n = sum_j (j + 2 sigma/(1+3 sigma)) A_j A_(n-1-j),  A_0 = 1
    coalescing   the inner equation of two singularities eps^(l/m) apart

Coefficients grow factorially, so each sequence is stored as a scaled part times
exp(log_scale) and never formed directly unless asked for.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, loggamma

from model.forcing import Coalescing, ehat_log_table, series_f
from utils.csv_export import write_csv
from utils.errors import (BranchMismatch, IllConditioned, NonConvergence, SequenceOverflow,
                          WrongRegime)
from utils.numerics import extrapolate_limit, wrap_angle
from utils.param_parser import parse_fraction, RationalLike

logger = logging.getLogger(__name__)

MAX_SEPARATED_TERMS = 3000
MAX_COALESCING_TERMS = 2000
LOG_DOUBLE_MAX = math.log(np.finfo(float).max)
DEFAULT_ORDER = 4
CONDITION_LIMIT = 1e13
MU_FLOOR = 1e-3


class RecurrenceKind(Enum):
    """Which recurrence produced a sequence"""
    TOY = "toy"
    SEPARATED = "separated"
    COALESCING = "coalescing"


@dataclass(frozen=True, eq=False)
class CoeffSeq:
    """
    Coefficients A_0..A_n_max held as A_n = scaled[n] * exp(log_scale[n])

    log_scale is real, so the phase of A_n is the phase of scaled[n].
    """

    kind: RecurrenceKind
    scaled: np.ndarray
    log_scale: np.ndarray
    meta: Dict[str, object] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.scaled)

    @property
    def n_max(self) -> int:
        return len(self.scaled) - 1

    def log_values(self, m: int = 1) -> np.ndarray:
        """
        Complex log A_n with the phase unwrapped along each residue class mod m

        Zero coefficients give nan.
        """
        n = np.arange(len(self))
        nonzero = self.scaled != 0
        phase = np.angle(self.scaled)
        for r in range(m):
            idx = np.nonzero(nonzero & (n % m == r))[0]
            if idx.size:
                phase[idx] = np.unwrap(phase[idx])

        out = np.full(len(self), np.nan, dtype=complex)
        log_abs = np.log(np.abs(self.scaled[nonzero])) + self.log_scale[nonzero]
        out[nonzero] = log_abs + 1j * phase[nonzero]
        return out

    def unnormalized(self, n_stop: Optional[int] = None) -> np.ndarray:
        """
        A_0..A_n_stop as plain floating point numbers

        Raises:
            SequenceOverflow: If some |A_n| exceeds the double range
        """
        n_stop = self.n_max if n_stop is None else n_stop
        scaled = self.scaled[:n_stop + 1]
        log_scale = self.log_scale[:n_stop + 1]
        with np.errstate(divide='ignore'):
            log_abs = np.log(np.abs(scaled)) + log_scale
        too_big = np.nonzero(log_abs > LOG_DOUBLE_MAX)[0]
        if too_big.size:
            raise SequenceOverflow(f"|A_{too_big[0]}| = exp({log_abs[too_big[0]]:.1f}) is not "
                                   f"representable; stop at n < {too_big[0]}")
        return scaled * np.exp(log_scale)

    def to_csv(self, output_file: Union[str, Path], fit: Optional['DivergenceFit'] = None,
               precision: int = 15) -> Path:
        """
        Export columns n, re_A, im_A, abs_H, arg_H, log_abs_A

        re_A/im_A are blank where A_n overflows; abs_H/arg_H are filled when a fit is given.
        """
        with np.errstate(divide='ignore'):
            log_abs = np.log(np.abs(self.scaled)) + self.log_scale
        phase = np.angle(self.scaled)
        H = None
        if fit is not None:
            H = normalized_late_terms(self, fit.m, fit.gamma, fit.mu, fit.alternating_sign)

        def rows():
            for n in range(len(self)):
                row = {'n': n, 'log_abs_A': float(log_abs[n]) if np.isfinite(log_abs[n]) else None}
                if not np.isfinite(log_abs[n]):
                    row['re_A'], row['im_A'] = 0.0, 0.0
                elif log_abs[n] <= LOG_DOUBLE_MAX:
                    value = math.exp(log_abs[n]) * complex(np.exp(1j * phase[n]))
                    row['re_A'], row['im_A'] = value.real, value.imag
                if H is not None and np.isfinite(H[n]):
                    row['abs_H'], row['arg_H'] = float(abs(H[n])), float(np.angle(H[n]))
                yield row

        fieldnames = ['n', 're_A', 'im_A', 'abs_H', 'arg_H', 'log_abs_A']
        return write_csv(output_file, fieldnames, rows(), precision)


@dataclass(frozen=True)
class DivergenceFit:
    """Late-term constants of A_n ~ H Gamma(n/m + gamma) exp(sum_j mu_j n^((m-j)/m))"""

    m: int
    gamma: complex
    mu: Tuple[complex, ...]
    omega: float
    tau: float
    residue_class: int = 0
    alternating_sign: bool = False
    residual: float = 0.0
    class_limits: Dict[int, complex] = field(default_factory=dict)
    class_errors: Dict[int, float] = field(default_factory=dict)
    n_range: Tuple[int, int] = (0, 0)

    @property
    def branches(self) -> int:
        """Number of residue classes carrying a limit"""
        return len(self.class_limits)


def toy_recurrence(n_max: int) -> CoeffSeq:
    """
    Coefficients of the toy difference equation, A_0 = 0 and A_1 = A_2 = 1

    Stored against Gamma(n/2) exp(sqrt(2n)).
    """
    if n_max < 3:
        raise ValueError(f"n_max must be at least 3, got {n_max}")

    n = np.arange(n_max + 1, dtype=float)
    log_scale = np.zeros(n_max + 1)
    log_scale[1:] = gammaln(n[1:] / 2.0) + np.sqrt(2.0 * n[1:])

    scaled = np.zeros(n_max + 1)
    scaled[1] = math.exp(-log_scale[1])
    scaled[2] = math.exp(-log_scale[2])
    for k in range(3, n_max + 1):
        scaled[k] = ((k / 2.0 - 1.0) * scaled[k - 2] * math.exp(log_scale[k - 2] - log_scale[k])
                     + (k / 2.0 - 1.5) * scaled[k - 3] * math.exp(log_scale[k - 3] - log_scale[k]))

    logger.debug(f"Toy recurrence evaluated to n={n_max}")
    return CoeffSeq(kind=RecurrenceKind.TOY, scaled=scaled, log_scale=log_scale,
                    meta={'recurrence': 'toy', 'n_max': n_max})


def _tail_indices(n_max: int, tail: Optional[Tuple[int, int]]) -> np.ndarray:
    lo, hi = tail if tail is not None else (n_max // 2, n_max)
    if hi > n_max:
        raise ValueError(f"tail end {hi} exceeds sequence length {n_max}")
    if lo < 1 or hi <= lo:
        raise ValueError(f"invalid tail ({lo}, {hi})")
    return np.arange(lo, hi + 1)


def toy_divergence(n_max: int = 800, tail: Optional[Tuple[int, int]] = None,
                   order: int = DEFAULT_ORDER) -> Tuple[float, float]:
    """
    Toy constant Lambda = lim A_n / (Gamma(n/2 - 1) e^sqrt(2n))

    Args:
        n_max: Sequence length
        tail: (n_lo, n_hi) window; default the upper half
        order: Number of n^(-1/2) correction terms

    Returns:
        tuple: (Lambda, error estimate)
    """
    seq = toy_recurrence(n_max)
    ns = _tail_indices(n_max, tail)
    ratio = seq.scaled[ns] * (ns / 2.0 - 1.0)
    limit, error = extrapolate_limit(ns, ratio, exponent=0.5, order=order)
    logger.info(f"Toy constant over n=[{ns[0]}, {ns[-1]}]: {limit:.12g} (error {error:.2e})")
    return limit, error


def gamma_separated(sigma: RationalLike) -> float:
    """gamma = 6 sigma / (1 + 3 sigma)"""
    s = parse_fraction(sigma)
    return float(6 * s / (1 + 3 * s))


def inner_separated(sigma: RationalLike, n_max: int = 2000) -> CoeffSeq:
    """
    Inner recurrence of an isolated singularity of strength sigma

    Stored as B_n = A_n / Gamma(n + gamma), which tends to Omega(sigma).

    Args:
        sigma: Rational exponent in (0, 1)
        n_max: Last index, at most 3000

    Returns:
        CoeffSeq: Real sequence with A_0 = 1
    """
    s = parse_fraction(sigma)
    if not 0 < s < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {s}")
    if not 0 <= n_max <= MAX_SEPARATED_TERMS:
        raise ValueError(f"n_max must lie in [0, {MAX_SEPARATED_TERMS}], got {n_max}")

    gamma = gamma_separated(s)
    kappa = float(2 * s / (1 + 3 * s))
    log_scale = gammaln(np.arange(n_max + 1) + gamma)

    B = np.zeros(n_max + 1)
    B[0] = math.exp(-log_scale[0])
    for k in range(1, n_max + 1):
        j = np.arange(k)
        weights = np.exp(log_scale[j] + log_scale[k - 1 - j] - log_scale[k])
        B[k] = np.sum((j + kappa) * B[j] * B[k - 1 - j] * weights)

    logger.debug(f"Separated recurrence sigma={s} evaluated to n={n_max}")
    return CoeffSeq(kind=RecurrenceKind.SEPARATED, scaled=B, log_scale=log_scale,
                    meta={'recurrence': 'separated', 'sigma': s, 'gamma': gamma, 'n_max': n_max})


def omega_separated(sigma: RationalLike, n_max: int = 2000, order: int = DEFAULT_ORDER,
                    tol: float = 1e-6) -> Tuple[float, float]:
    """
    Omega(sigma) = lim A_n / Gamma(n + gamma)

    The limit is extrapolated from the upper half of the sequence assuming a power
    series in 1/n.

    Returns:
        tuple: (Omega, error estimate)

    Raises:
        NonConvergence: If the error estimate exceeds tol * Omega
    """
    seq = inner_separated(sigma, n_max)
    ns = _tail_indices(n_max, None)
    omega, error = extrapolate_limit(ns, seq.scaled[ns], exponent=1.0, order=order)
    if not error <= tol * abs(omega):
        raise NonConvergence(f"Omega({seq.meta['sigma']}) extrapolants differ by {error:.3e}")
    logger.info(f"Omega({seq.meta['sigma']}) = {omega:.12g} (error {error:.2e}, n_max={n_max})")
    return omega, error


def omega_table(sigmas: Iterable[RationalLike], n_max: int = 2000) -> Dict[Fraction, float]:
    """Omega for each distinct sigma, keyed by the exact rational"""
    table: Dict[Fraction, float] = {}
    for sigma in sigmas:
        s = parse_fraction(sigma)
        if s not in table:
            table[s], _ = omega_separated(s, n_max)
    return table


def inner_coalescing(sigma1: RationalLike, sigma2: RationalLike, a: float, beta: float,
                     ell: Optional[int] = None, m: Optional[int] = None,
                     n_max: int = 1000) -> CoeffSeq:
    """
    Inner recurrence of two coalescing singularities

        A_n = sum_j e_j e_(n-j) + sum_k e_k S_(n-m-k)          (second sum for n >= m)
        S_p = sum_j ((j + 2 sigma l)/m) A_j A_(p-j)

    with e_n the inner series coefficients of the forcing. Stored as
    C_n = A_n / Gamma(n/m + 1).

    Args:
        sigma1, sigma2: Exponents of the singularities at -a1 and -a2
        a: Centre of the pair
        beta: Scaled half separation
        ell, m: Separation exponent ell/m; derived from the exponents when omitted
        n_max: Last index, at most 2000

    Returns:
        CoeffSeq: Complex sequence with A_0 = 1
    """
    if ell is None or m is None:
        spec = Coalescing.from_sigmas(a, beta, sigma1, sigma2)
    else:
        spec = Coalescing(a=a, beta=beta, sigma1=sigma1, sigma2=sigma2, ell=ell, m=m)
    if not 0 <= n_max <= MAX_COALESCING_TERMS:
        raise ValueError(f"n_max must lie in [0, {MAX_COALESCING_TERMS}], got {n_max}")

    m = spec.m
    shift = float(2 * spec.total_sigma() * spec.ell)
    log_e, phase_e = ehat_log_table(n_max, spec)
    e_unit = np.exp(1j * phase_e)
    L = gammaln(np.arange(n_max + 1) / m + 1.0)

    C = np.zeros(n_max + 1, dtype=complex)
    S = np.zeros(n_max + 1, dtype=complex)
    C[0] = 1.0
    for n in range(1, n_max + 1):
        j = np.arange(n + 1)
        total = np.sum(np.exp(log_e[j] + log_e[n - j] - L[n]) * e_unit[j] * e_unit[n - j])

        if n >= m:
            p = n - m
            jj = np.arange(p + 1)
            S[p] = np.sum((jj + shift) / m * C[jj] * C[p - jj]
                          * np.exp(L[jj] + L[p - jj] - L[p + m]))
            k = np.arange(p + 1)
            total += np.sum(np.exp(log_e[k] + L[n - k] - L[n]) * e_unit[k] * S[p - k])

        C[n] = total

    logger.debug(f"Coalescing recurrence sigma=({spec.sigma1}, {spec.sigma2}), a={a}, "
                 f"beta={beta}, l/m={spec.ell}/{m} evaluated to n={n_max}")
    return CoeffSeq(kind=RecurrenceKind.COALESCING, scaled=C, log_scale=L,
                    meta={'recurrence': 'coalescing', 'sigma1': spec.sigma1, 'sigma2': spec.sigma2,
                          'a': a, 'beta': beta, 'ell': spec.ell, 'm': m, 'n_max': n_max})


def analytic_mu_gamma(sigma1: RationalLike, sigma2: RationalLike, a: float,
                      beta: float) -> Tuple[complex, complex]:
    """
    Closed-form mu_1 and gamma of the m = 2 coalescing late terms

    mu_1 = 3 beta |s2 - s1| sqrt(2|X|) e^(-i pi/4) and gamma = 1 + i (3 beta^2/2a)(2 f1^2 - f2),
    with X = -i/(2a).

    Raises:
        WrongRegime: If sigma1 + sigma2 != 1/3
    """
    s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
    if s1 + s2 != Fraction(1, 3):
        raise WrongRegime(f"closed form needs sigma1 + sigma2 = 1/3, got {s1 + s2}")

    X = -1j / (2.0 * a)
    f1 = float(s2 - s1)
    f2 = float(((s1 - s2) ** 2 + s1 + s2) / 2)

    mu1 = 3.0 * beta * abs(f1) * math.sqrt(2.0 * abs(X)) * np.exp(-0.25j * math.pi)
    gamma = 1.0 + 1j * (3.0 * beta ** 2 / (2.0 * a)) * (2.0 * f1 ** 2 - f2)

    # inner and outer determinations of gamma coincide
    inner_gamma = 1.0 - 3.0 * beta ** 2 * X * (2.0 * f1 ** 2 - f2)
    assert abs(inner_gamma - gamma) <= 1e-14 * max(1.0, abs(gamma)), (inner_gamma, gamma)

    return complex(mu1), complex(gamma)


def normalized_late_terms(seq: CoeffSeq, m: int, gamma: complex, mu: Sequence[complex],
                          alternating: bool = False) -> np.ndarray:
    """
    H_n = A_n / [Gamma(n/m + gamma) exp(sum_j mu_j n^((m-j)/m))], times (-1)^n if alternating

    Entries with A_n = 0 are nan; so is n = 0 when Gamma(gamma) is undefined.
    """
    n = np.arange(len(seq), dtype=float)
    exponent = seq.log_scale - loggamma(n / m + gamma)
    for j, mu_j in enumerate(mu, start=1):
        exponent = exponent - mu_j * n ** ((m - j) / m)
    with np.errstate(invalid='ignore', over='ignore'):
        H = seq.scaled * np.exp(exponent)
    if alternating:
        H = H * (-1.0) ** n
    H = np.where(seq.scaled != 0, H, np.nan + 0j)
    return H


def branch_limits(H: np.ndarray, m: int, tail: Tuple[int, int],
                  order: int = DEFAULT_ORDER) -> Dict[int, Tuple[complex, float]]:
    """
    Extrapolated limit of H_n along each residue class mod m

    Args:
        H: Normalized late terms
        m: Number of residue classes
        tail: (n_lo, n_hi) window
        order: Number of n^(-1/m) correction terms

    Returns:
        dict: residue r -> (limit, error) for every class with enough samples
    """
    ns = _tail_indices(len(H) - 1, tail)
    limits = {}
    for r in range(m):
        idx = ns[(ns % m == r) & np.isfinite(H[ns])]
        if idx.size < order + 2:
            continue
        limits[r] = extrapolate_limit(idx, H[idx], exponent=1.0 / m, order=order)
    return limits


def omega_cc(sigma1: RationalLike, sigma2: RationalLike, a: float, beta: float,
             ell: Optional[int] = None, m: Optional[int] = None,
             n_max: int = MAX_COALESCING_TERMS, tail: Optional[Tuple[int, int]] = None,
             order: int = DEFAULT_ORDER, convergence_tol: float = 1e-2,
             branch_tol: float = 0.1) -> DivergenceFit:
    """
    Prefactor constant Omega^cc = |H_inf| and tau = Arg H_inf of the coalescing late terms

    For sigma1 + sigma2 = 1/3 the exponents come from analytic_mu_gamma; for other m
    they are fitted. The alternating ansatz is used when the default mu_1 = 3 sqrt(2) e_1
    would decay.

    Raises:
        NonConvergence: If the canonical class limit error exceeds convergence_tol
        BranchMismatch: If |H_inf| differs between classes by more than branch_tol
    """
    seq = inner_coalescing(sigma1, sigma2, a, beta, ell, m, n_max)
    m = int(seq.meta['m'])
    tail = tail if tail is not None else (n_max // 2, n_max)

    if m == 2:
        mu1, gamma = analytic_mu_gamma(sigma1, sigma2, a, beta)
        spec = Coalescing.from_sigmas(a, beta, sigma1, sigma2)
        e1 = beta * np.sqrt(complex(-1j / (2.0 * a))) * series_f(1, spec.sigma1, spec.sigma2)
        alternating = (3.0 * math.sqrt(2.0) * e1).real < 0
        mu: Tuple[complex, ...] = (mu1,)
    else:
        fitted = fit_divergence(seq, m, tail)
        gamma, mu, alternating = fitted.gamma, fitted.mu, fitted.alternating_sign

    H = normalized_late_terms(seq, m, gamma, mu, alternating)
    limits = branch_limits(H, m, tail, order)
    if not limits:
        raise NonConvergence(f"no residue class has enough samples in tail {tail}")

    canonical = min(limits)
    H_inf, error = limits[canonical]
    if not error <= convergence_tol * abs(H_inf):
        raise NonConvergence(f"class {canonical} limit {H_inf:.6g} has error {error:.3e}")

    for r, (limit, _) in limits.items():
        if abs(abs(limit) - abs(H_inf)) > branch_tol * abs(H_inf):
            raise BranchMismatch(f"|H_inf| is {abs(limit):.6g} in class {r} but "
                                 f"{abs(H_inf):.6g} in class {canonical}")

    logger.info(f"Omega_cc(sigma=({seq.meta['sigma1']}, {seq.meta['sigma2']}), a={a}, beta={beta}) "
                f"= {abs(H_inf):.10g}, tau={np.angle(H_inf):.6f}, alternating={alternating}")
    return DivergenceFit(m=m, gamma=complex(gamma), mu=tuple(complex(v) for v in mu),
                         omega=float(abs(H_inf)), tau=wrap_angle(float(np.angle(H_inf))),
                         residue_class=canonical, alternating_sign=bool(alternating),
                         residual=float(error),
                         class_limits={r: complex(v) for r, (v, _) in limits.items()},
                         class_errors={r: float(e) for r, (_, e) in limits.items()},
                         n_range=(int(tail[0]), int(tail[1])))


def _design_matrix(ns: np.ndarray, m: int, corrections: int) -> Tuple[np.ndarray, List[str]]:
    columns, names = [], []
    for j in range(1, m):
        columns.append(ns ** ((m - j) / m))
        names.append(f"mu{j}")
    columns.append(np.log(ns))
    names.append("log_n")
    columns.append(np.ones_like(ns))
    names.append("const")
    for k in range(1, corrections + 1):
        columns.append(ns ** (-k / m))
        names.append(f"c{k}")
    return np.column_stack(columns), names


def _smoothing_kernel(m: int) -> np.ndarray:
    """m-term moving average applied twice"""
    box = np.full(m, 1.0 / m)
    return np.convolve(box, box)


def _fit_log_terms(ns: np.ndarray, log_A: np.ndarray, m: int, gamma0: complex, corrections: int,
                   max_iter: int, kernel: Optional[np.ndarray] = None
                   ) -> Tuple[complex, np.ndarray, float]:
    """
    Least-squares fit of log A_n - log Gamma(n/m + gamma) on the late-term basis

    With a kernel, the data and every basis column are smoothed by it first ('valid'
    part only), so components that flip between residue classes drop out of the fit.
    """
    basis, _ = _design_matrix(ns.astype(float), m, corrections)

    def smooth(values: np.ndarray) -> np.ndarray:
        return values if kernel is None else np.convolve(values, kernel, mode='valid')

    fit_basis = np.column_stack([smooth(column) for column in basis.T])
    target = smooth(log_A)
    scales = np.max(np.abs(fit_basis), axis=0)
    scaled_basis = fit_basis / scales
    condition = np.linalg.cond(scaled_basis)
    if condition > CONDITION_LIMIT:
        raise IllConditioned(f"fit basis condition number {condition:.3e} over "
                             f"n=[{ns[0]}, {ns[-1]}]")

    log_n_col = m - 1
    gamma = complex(gamma0)
    for _ in range(max_iter):
        y = target - smooth(loggamma(ns / m + gamma))
        coeffs, _, _, _ = np.linalg.lstsq(scaled_basis, y, rcond=None)
        coeffs = coeffs / scales
        delta = coeffs[log_n_col]
        gamma += delta
        if abs(delta) < 1e-13:
            break

    y = target - smooth(loggamma(ns / m + gamma))
    coeffs, _, _, _ = np.linalg.lstsq(scaled_basis, y, rcond=None)
    coeffs = coeffs / scales
    residual = float(np.max(np.abs(y - fit_basis @ coeffs)))
    return gamma, coeffs, residual


def _class_constants(ns: np.ndarray, log_A: np.ndarray, m: int, gamma: complex,
                     coeffs: np.ndarray, corrections: int
                     ) -> Tuple[Dict[int, complex], Dict[int, float]]:
    """Mean log H_n per residue class under the shared exponents, and its spread"""
    basis, _ = _design_matrix(ns.astype(float), m, corrections)
    offsets = log_A - loggamma(ns / m + gamma) - basis @ coeffs + coeffs[m]

    constants, spreads = {}, {}
    for r in range(m):
        values = offsets[ns % m == r]
        if values.size == 0:
            continue
        centre = complex(np.mean(values))
        constants[r] = centre
        spreads[r] = float(np.max(np.abs(values - centre)))
    return constants, spreads


def fit_divergence(seq: CoeffSeq, m: int, tail: Optional[Tuple[int, int]] = None,
                   corrections: int = 3, gamma0: complex = 0.0,
                   max_iter: int = 30) -> DivergenceFit:
    """
    Fit log A_n ~ log Gamma(n/m + gamma) + sum_j mu_j n^((m-j)/m) + log H + sum_k c_k n^(-k/m)

    gamma is iterated until the log n coefficient vanishes. When every residue class
    mod m is populated (m > 1), the whole tail is fitted at once after an m-term moving
    average has been applied twice to the data and to the basis. That suppresses the
    subdominant (-1)^n exp(-mu_1 sqrt n) contribution and constant offsets between the
    classes. Each class constant is then the mean of log H_n over its members. Sparse
    sequences, and m = 1, are fitted one class at a time instead.

    The m = 2 sign alternates when the class-1 constant has negative real part relative
    to the class-0 constant.

    Args:
        seq: Coefficient sequence
        m: Denominator of the late-term exponents (1 for factorial-over-power)
        tail: (n_lo, n_hi) window; default the upper half
        corrections: Number of decaying n^(-k/m) terms
        gamma0: Starting value for gamma
        max_iter: Iteration cap for gamma

    Returns:
        DivergenceFit

    Raises:
        IllConditioned: Tail shorter than 10 m samples, a collinear basis, or a
            leading exponent mu_1 with negative real part
    """
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    ns_all = _tail_indices(seq.n_max, tail)
    log_values = seq.log_values(m)
    usable = ns_all[np.isfinite(log_values[ns_all])]
    if usable.size < 10 * m:
        raise IllConditioned(f"tail holds {usable.size} nonzero terms, need at least {10 * m}")
    n_params = (m - 1) + 2 + corrections

    if m > 1 and usable.size == ns_all.size:
        kernel = _smoothing_kernel(m)
        if ns_all.size - kernel.size + 1 < max(10, 2 * n_params):
            raise IllConditioned(f"tail of {ns_all.size} terms is too short for {n_params} "
                                 f"parameters")
        gamma, coeffs, residual = _fit_log_terms(ns_all, log_values[ns_all], m, gamma0,
                                                 corrections, max_iter, kernel)
        class_logs, class_errors = _class_constants(ns_all, log_values[ns_all], m, gamma,
                                                    coeffs, corrections)
    else:
        fits = {}
        for r in range(m):
            idx = usable[usable % m == r]
            if idx.size < max(10, 2 * n_params):
                continue
            fits[r] = _fit_log_terms(idx, log_values[idx], m, gamma0, corrections, max_iter)
        if not fits:
            raise IllConditioned("no residue class has enough samples for the fit")
        gamma, coeffs, residual = fits[min(fits)]
        class_logs = {r: complex(f[1][m]) for r, f in fits.items()}
        class_errors = {r: f[2] for r, f in fits.items()}

    canonical = min(class_logs)
    mu = tuple(complex(c) for c in coeffs[:m - 1])
    if mu and mu[0].real < -MU_FLOOR:
        raise IllConditioned(f"fitted mu_1 = {mu[0]:.6g} has negative real part; the tail does "
                             f"not follow a single growing contribution")

    class_limits = {r: complex(np.exp(v)) for r, v in class_logs.items()}
    alternating = False
    if m == 2 and len(class_limits) == 2:
        alternating = (class_limits[1] / class_limits[0]).real < 0

    constant = class_logs[canonical]
    logger.info(f"Divergence fit m={m} over n=[{ns_all[0]}, {ns_all[-1]}]: gamma={gamma:.8g}, "
                f"mu={[f'{v:.8g}' for v in mu]}, residual={residual:.2e}")
    return DivergenceFit(m=m, gamma=complex(gamma), mu=mu, omega=float(abs(np.exp(constant))),
                         tau=wrap_angle(constant.imag), residue_class=canonical,
                         alternating_sign=alternating, residual=residual,
                         class_limits=class_limits, class_errors=class_errors,
                         n_range=(int(ns_all[0]), int(ns_all[-1])))
