"""Certified evaluation of L_{k+1} on roots of unity and odd zeta values.

L_{k+1}(z) = Re( i^{-k} * sum_{n>=1} z^n / n^{k+1} )

for z a root of unity.  Two evaluation engines are provided:

* "em" (default): split the series into residue classes mod the order of z
  and close each class with an Euler-Maclaurin integral tail.  The
  remainder of each class is bounded by the first omitted term, so the
  reported error bound is rigorous.  This is the ordinary integral-tail
  summation for z = 1 applied classwise, and it is fast enough for the
  k = 1 sweeps in the verification suite.
* "direct": plain truncation of the series with the Abel tail bound
  |sum_{n>N} z^n/n^s| <= 2 / (|1-z| (N+1)^s) for z != 1, and the integral
  tail for z = 1.  Kept as an independent cross-check of "em".
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError

DEFAULT_TOL = 1e-12
MAX_TERMS = 10 ** 8
_ROUNDING_SLACK = 5e-16


@dataclass(frozen=True)
class RootOfUnity:
    """exp(2*pi*i*j/m), stored exactly as the pair (m, j) with 0 <= j < m."""

    m: int
    j: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("order m must be a positive integer")
        object.__setattr__(self, "j", self.j % self.m)

    @property
    def reduced(self) -> "RootOfUnity":
        """The same complex number with gcd-normalized (m, j)."""
        if self.j == 0:
            return RootOfUnity(1, 0)
        g = math.gcd(self.j, self.m)
        return RootOfUnity(self.m // g, self.j // g)

    @property
    def is_one(self) -> bool:
        return self.j == 0

    def value(self) -> complex:
        return cmath.exp(2j * math.pi * self.j / self.m)

    def conjugate(self) -> "RootOfUnity":
        return RootOfUnity(self.m, (-self.j) % self.m)

    def power(self, n: int) -> "RootOfUnity":
        return RootOfUnity(self.m, (self.j * n) % self.m)

    def is_nth_root(self, n: int) -> bool:
        """Whether self**n == 1."""
        return (self.j * n) % self.m == 0

    def mth_roots(self, m: int) -> tuple:
        """All m-th roots of self: the zeta with zeta**m == self."""
        if m < 1:
            raise DomainError("m must be >= 1")
        return tuple(RootOfUnity(self.m * m, self.j + t * self.m).reduced
                     for t in range(m))

    def __str__(self):
        return f"zeta({self.m},{self.j})"


@dataclass(frozen=True)
class PolylogValue:
    value: float
    error_bound: float
    k: int

    def __post_init__(self):
        if not math.isfinite(self.error_bound) or self.error_bound < 0:
            raise DomainError("error bound must be finite and nonnegative")


def _re_i_pow_minus_k(k: int, s: complex) -> float:
    """Re(i^{-k} * s) via the period-4 pattern of i^{-k}."""
    r = k % 4
    if r == 0:
        return s.real
    if r == 1:  # i^{-1} = -i
        return s.imag
    if r == 2:  # i^{-2} = -1
        return -s.real
    return -s.imag  # i^{-3} = i


def _zeta_em(s: int, n_terms: int = 400) -> tuple:
    """(zeta(s), rigorous error bound) by Euler-Maclaurin, s >= 2."""
    head = math.fsum(n ** (-s) for n in range(1, n_terms + 1))
    N = float(n_terms)
    tail = N ** (1 - s) / (s - 1) - 0.5 * N ** (-s) + s / 12.0 * N ** (-s - 1)
    bound = s * (s + 1) * (s + 2) / 720.0 * N ** (-s - 3) + _ROUNDING_SLACK
    return head + tail, bound


@lru_cache(maxsize=None)
def _hurwitz_class_em(s: int, r: int, m: int, n_terms: int = 400) -> tuple:
    """(sum_{t>=0} (r + t m)^{-s}, error bound): one residue class mod m."""
    head = math.fsum((r + t * m) ** (-s) for t in range(n_terms))
    # tail over t >= n_terms of (r + t m)^{-s} = m^{-s} * sum (t + a)^{-s}
    a = r / m
    N = n_terms + a
    tail = (N ** (1 - s) / (s - 1) + 0.5 * N ** (-s) + s / 12.0 * N ** (-s - 1))
    bound = s * (s + 1) * (s + 2) / 720.0 * N ** (-s - 3)
    return head + m ** (-s) * tail, m ** (-s) * bound + _ROUNDING_SLACK


def riemann_zeta_odd(k: int) -> float:
    """zeta(2k+1) with absolute error below 1e-13."""
    if k < 1:
        raise DomainError("k must be >= 1")
    value, bound = _zeta_em(2 * k + 1)
    assert bound <= 1e-13
    return value


def _series_em(s: int, zeta: RootOfUnity) -> tuple:
    """sum_{n>=1} zeta^n / n^s by residue classes, with error bound."""
    zr = zeta.reduced
    m = zr.m
    total = 0j
    bound = 0.0
    for r in range(1, m + 1):
        clsval, clsbound = _hurwitz_class_em(s, r, m)
        total += cmath.exp(2j * math.pi * (zr.j * r % m) / m) * clsval
        bound += clsbound
    return total, bound


def _series_direct(s: int, zeta: RootOfUnity, tol: float,
                   max_terms: int = MAX_TERMS) -> tuple:
    """Truncated summation with the Abel tail bound (zeta != 1)."""
    zr = zeta.reduced
    gap = 2.0 * math.sin(math.pi * zr.j / zr.m)  # |1 - zeta|
    n_terms = int(math.ceil((2.0 / (gap * tol)) ** (1.0 / s)))
    if n_terms > max_terms:
        raise ConvergenceError(
            f"would need {n_terms} terms (> cap {max_terms}) for tol {tol}")
    roots = np.exp(2j * np.pi * np.arange(zr.m) / zr.m)
    total = 0j
    chunk = 1 << 20
    for start in range(1, n_terms + 1, chunk):
        n = np.arange(start, min(start + chunk, n_terms + 1), dtype=np.int64)
        total += np.sum(roots[(zr.j * n) % zr.m] / n.astype(np.float64) ** s)
    tail = 2.0 / (gap * (n_terms + 1) ** s)
    return complex(total), tail + _ROUNDING_SLACK * math.sqrt(n_terms)


def polylog_L(k: int, zeta: RootOfUnity, tol: float = DEFAULT_TOL,
              method: str = "em") -> PolylogValue:
    """L_{k+1}(zeta) = Re(i^{-k} sum zeta^n / n^{k+1}) with certified bound."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    s = k + 1
    zr = zeta.reduced
    if zr.is_one:
        factor = {0: 1.0, 1: 0.0, 2: -1.0, 3: 0.0}[k % 4]
        if factor == 0.0:
            return PolylogValue(0.0, 0.0, k)
        value, bound = _zeta_em(s)
        if bound > tol:
            raise ConvergenceError(f"zeta tail bound {bound} exceeds tol {tol}")
        return PolylogValue(factor * value, bound, k)
    if method == "em":
        total, bound = _series_em(s, zr)
        if bound > tol:
            raise ConvergenceError(f"EM tail bound {bound} exceeds tol {tol}")
    elif method == "direct":
        total, bound = _series_direct(s, zr, tol)
    else:
        raise DomainError(f"unknown polylog method {method!r}")
    return PolylogValue(_re_i_pow_minus_k(k, total), bound, k)


def verify_distribution(k: int, m: int, z: RootOfUnity,
                        tol: float = 1e-10, method: str = "em") -> dict:
    """Check L_{k+1}(z) = m^k * sum_{zeta^m = z} L_{k+1}(zeta).

    Returns a report dict; failure is reported, never raised.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if m < 2:
        raise DomainError("m must be >= 2")
    eval_tol = min(DEFAULT_TOL, tol / (2.0 * (1 + m ** (k + 1))))
    eval_tol = max(eval_tol, 2e-13)  # floor set by float rounding of the heads
    lhs = polylog_L(k, z, eval_tol, method=method).value
    rhs = m ** k * math.fsum(
        polylog_L(k, zeta, eval_tol, method=method).value
        for zeta in z.mth_roots(m))
    diff = abs(lhs - rhs)
    return {
        "k": k,
        "m": m,
        "z": {"m": z.m, "j": z.j},
        "lhs": lhs,
        "rhs": rhs,
        "diff": diff,
        "tol": tol,
        "pass": diff <= tol,
    }
