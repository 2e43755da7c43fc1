"""
Straightforward reference recurrences

Plain Python numbers, direct summation, no rescaling. Only usable for small n, where
they serve as an independent check on the normalized recurrences.
"""

import cmath
import math
from fractions import Fraction
from typing import List

from utils.param_parser import parse_fraction, RationalLike


def naive_toy(n_max: int) -> List[float]:
    """A_0 = 0, A_1 = A_2 = 1, A_n = (n/2 - 1) A_(n-2) + (n/2 - 3/2) A_(n-3)"""
    A = [0.0, 1.0, 1.0]
    for n in range(3, n_max + 1):
        A.append((n / 2 - 1) * A[n - 2] + (n / 2 - 1.5) * A[n - 3])
    return A[:n_max + 1]


def naive_separated(sigma: RationalLike, n_max: int) -> List[float]:
    """A_0 = 1, A_n = sum_j (j + 2 sigma/(1 + 3 sigma)) A_j A_(n-1-j)"""
    s = float(parse_fraction(sigma))
    kappa = 2 * s / (1 + 3 * s)
    A = [1.0]
    for n in range(1, n_max + 1):
        total = 0.0
        for j in range(n):
            total += (j + kappa) * A[j] * A[n - 1 - j]
        A.append(total)
    return A


def _pochhammer_over_factorial(s: float, j: int) -> float:
    value = 1.0
    for i in range(j):
        value *= (s + i) / (i + 1)
    return value


def naive_f(p: int, sigma1: float, sigma2: float) -> float:
    total = 0.0
    for j in range(p + 1):
        total += ((-1) ** j * _pochhammer_over_factorial(sigma1, j)
                  * _pochhammer_over_factorial(sigma2, p - j))
    return total


def naive_coalescing(sigma1: RationalLike, sigma2: RationalLike, a: float, beta: float,
                     n_max: int) -> List[complex]:
    """Coalescing inner recurrence summed term by term"""
    s1, s2 = parse_fraction(sigma1), parse_fraction(sigma2)
    sigma = s1 + s2
    ratio = Fraction(1) / (1 + 3 * sigma)
    ell, m = ratio.numerator, ratio.denominator

    c_cubed = cmath.exp(3 * float(sigma) * complex(math.log(a), math.pi))
    X = 1j / (c_cubed * (1 + 3 * float(sigma)))

    e = []
    for n in range(n_max + 1):
        if n % ell:
            e.append(0j)
        else:
            p = n // ell
            e.append(beta ** p * cmath.exp((n / m) * cmath.log(X)) * naive_f(p, float(s1), float(s2)))

    shift = float(2 * sigma * ell)
    A: List[complex] = []
    for n in range(n_max + 1):
        total = 0j
        for j in range(n + 1):
            total += e[j] * e[n - j]
        if n >= m:
            for k in range(n - m + 1):
                inner = 0j
                for j in range(n - m - k + 1):
                    inner += (j + shift) / m * A[j] * A[n - m - k - j]
                total += e[k] * inner
        A.append(total)
    return A
