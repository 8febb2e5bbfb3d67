"""Special functions and truncated q-expansions.

Everything here works in double precision.  Bernoulli data is kept as exact
rationals and only converted to floats at evaluation time.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from collections.abc import Sequence
from numbers import Rational

import mpmath
import numpy as np
from scipy import special

__all__ = [
    "TruncationError",
    "bernoulli_number",
    "bernoulli_poly",
    "bernoulli_poly_coeffs",
    "clausen",
    "polylog_unit_circle",
    "hurwitz_zeta_nonpos",
    "partial_zeta",
    "zeta",
    "QExpansion",
    "regulated_integral",
    "regulated_integrals",
    "choose_truncation",
]

TWO_PI = 2.0 * math.pi
MAX_BERNOULLI_POLY = 30
# Bernoulli numbers are also needed as zeta values at negative integers in
# the small-argument polylog expansion; 120 terms reach 1e-17 for |x| <= pi.
_MAX_BERNOULLI_NUMBER = 160


class TruncationError(ArithmeticError):
    """Raised when a truncated series cannot meet the requested tolerance."""


# -- Bernoulli ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _bernoulli_table(nmax: int) -> tuple[Fraction, ...]:
    # B_n from sum_{j<=n} C(n+1, j) B_j = 0, B_1 = -1/2 convention
    table = [Fraction(1)]
    for n in range(1, nmax + 1):
        acc = Fraction(0)
        for j in range(n):
            acc += math.comb(n + 1, j) * table[j]
        table.append(-acc / (n + 1))
    return tuple(table)


def bernoulli_number(n: int) -> Fraction:
    """Exact B_n with the t/(e^t - 1) convention (so B_1 = -1/2)."""
    if n < 0 or n > _MAX_BERNOULLI_NUMBER:
        raise ValueError(f"Bernoulli number index {n} out of range")
    return _bernoulli_table(_MAX_BERNOULLI_NUMBER)[n]


@lru_cache(maxsize=None)
def bernoulli_poly_coeffs(n: int) -> tuple[Fraction, ...]:
    """Exact coefficients c_0..c_n of B_n(x) = sum c_j x^j."""
    if not isinstance(n, (int, np.integer)) or n < 0 or n > MAX_BERNOULLI_POLY:
        raise ValueError(f"Bernoulli polynomial degree must be in 0..{MAX_BERNOULLI_POLY}, got {n}")
    n = int(n)
    return tuple(math.comb(n, j) * bernoulli_number(n - j) for j in range(n + 1))


def bernoulli_poly(n: int, x):
    """Evaluate B_n(x).

    Rational ``x`` (``int`` or ``Fraction``) gives an exact ``Fraction``;
    anything else is evaluated in floating point by Horner's rule.
    """
    coeffs = bernoulli_poly_coeffs(n)
    if isinstance(x, Rational):
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc
    x = float(x)
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + float(c)
    return acc


# -- zeta values ---------------------------------------------------------------


def zeta(s: int) -> float:
    """Riemann zeta at an integer s != 1 (negative values via Bernoulli)."""
    if s == 1:
        raise ValueError("zeta has a pole at s = 1")
    if s <= 0:
        j = 1 - s
        return float(-bernoulli_poly(j, 1) / j) if j <= MAX_BERNOULLI_POLY else float(
            -bernoulli_number(j) / j
        )
    return float(special.zeta(s))


def hurwitz_zeta_nonpos(s: int, a) -> float:
    """Hurwitz zeta(s, a) for s = 0, -1, -2, ...; equals -B_{1-s}(a)/(1-s)."""
    if not float(s).is_integer() or s > 0:
        raise ValueError(f"only nonpositive integer s supported, got {s}")
    if not 0 < a <= 1:
        raise ValueError(f"a must lie in (0, 1], got {a}")
    j = 1 - int(s)
    return float(-bernoulli_poly(j, a) / j)


def partial_zeta(k: int, d: int, N: int) -> float:
    """Sum of n^-k over nonzero integers n congruent to d mod N."""
    if k < 2:
        raise ValueError("partial_zeta needs k >= 2")
    d %= N
    sign = (-1) ** k
    if d == 0:
        return (1 + sign) * float(special.zeta(k)) / N**k
    a = d / N
    return (float(special.zeta(k, a)) + sign * float(special.zeta(k, 1.0 - a))) / N**k


# -- polylogarithm on the unit circle ----------------------------------------


@lru_cache(maxsize=None)
def _polylog_series_coeffs(m: int, nterms: int) -> tuple[float, ...]:
    # Li_m(e^mu) = sum_{k != m-1} zeta(m-k) mu^k/k! + mu^(m-1)/(m-1)! (H_{m-1} - log(-mu))
    out = []
    for k in range(nterms):
        if k == m - 1:
            out.append(0.0)
            continue
        s = m - k
        if s >= 2:
            out.append(float(special.zeta(s)) / math.factorial(k))
        else:
            j = 1 - s
            b = bernoulli_number(j) if j != 1 else Fraction(1, 2)
            # zeta(1-j) = -B_j(1)/j; B_j(1) = B_j for j >= 2
            out.append(float(-b / j / math.factorial(k)))
    return tuple(out)


def _reduce_angle(x: float) -> float:
    # representative in (-pi, pi]
    r = math.fmod(x, TWO_PI)
    if r > math.pi:
        r -= TWO_PI
    elif r <= -math.pi:
        r += TWO_PI
    return r


def polylog_unit_circle(m: int, x: float) -> complex:
    """Li_m(e^{ix}) for integer m >= 1 and real x.

    Uses the expansion of Li_m(e^mu) in powers of mu around mu = 0, which
    converges for |mu| < 2 pi; x is first reduced to (-pi, pi] so the series
    ratio is at most 1/2.
    """
    if m < 1:
        raise ValueError("polylog order must be >= 1")
    r = _reduce_angle(float(x))
    if r == 0.0:
        if m == 1:
            raise ValueError("Li_1 diverges at z = 1")
        return complex(zeta(m), 0.0)
    if m == 1:
        return -cmath.log(1.0 - cmath.exp(1j * r))
    mu = 1j * r
    coeffs = _polylog_series_coeffs(m, 80 + m)
    acc = 0j
    power = 1.0 + 0j
    for c in coeffs:
        acc += c * power
        power *= mu
    harmonic = sum(1.0 / j for j in range(1, m))
    acc += mu ** (m - 1) / math.factorial(m - 1) * (harmonic - cmath.log(-mu))
    return acc


def clausen(m: int, x: float) -> float:
    """Cl_m(x): real part of Li_m(e^{ix}) for odd m, imaginary part for even m."""
    if m < 1:
        raise ValueError("Clausen order must be >= 1")
    value = polylog_unit_circle(m, x)
    return value.real if m % 2 else value.imag


# -- q-expansions ----------------------------------------------------------


class QExpansion:
    """Truncated Fourier series sum_{n=0}^{Q} a_n q_N^n, q_N = exp(2 pi i tau / N)."""

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int, coeffs):
        if level < 1:
            raise ValueError("level must be positive")
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.ndim != 1 or len(coeffs) < 1:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        self.level = int(level)
        self.coeffs = coeffs
        self.coeffs.flags.writeable = False

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @property
    def constant_term(self) -> complex:
        return complex(self.coeffs[0])

    def __repr__(self):
        head = ", ".join(f"{c:.6g}" for c in self.coeffs[:4])
        return f"QExpansion(level={self.level}, Q={self.truncation}, [{head}, ...])"

    def __getitem__(self, n):
        return self.coeffs[n]

    def _check(self, other: "QExpansion") -> int:
        if self.level != other.level:
            raise ValueError(f"level mismatch: {self.level} vs {other.level}")
        return min(self.truncation, other.truncation)

    def truncate(self, Q: int) -> "QExpansion":
        return QExpansion(self.level, self.coeffs[: Q + 1])

    def __add__(self, other):
        if isinstance(other, QExpansion):
            Q = self._check(other)
            return QExpansion(self.level, self.coeffs[: Q + 1] + other.coeffs[: Q + 1])
        c = self.coeffs.copy()
        c[0] += other
        return QExpansion(self.level, c)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion(self.level, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QExpansion):
            Q = self._check(other)
            prod = np.convolve(self.coeffs[: Q + 1], other.coeffs[: Q + 1])[: Q + 1]
            return QExpansion(self.level, prod)
        return QExpansion(self.level, self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return QExpansion(self.level, self.coeffs / complex(scalar))

    def exp(self) -> "QExpansion":
        """exp of a series with vanishing constant term."""
        if abs(self.coeffs[0]) > 0:
            raise ValueError("exp needs a zero constant term")
        a = self.coeffs
        Q = self.truncation
        out = np.zeros(Q + 1, dtype=complex)
        out[0] = 1.0
        # n e_n = sum_{j=1}^n j a_j e_{n-j}
        j = np.arange(1, Q + 1)
        ja = j * a[1:]
        for n in range(1, Q + 1):
            out[n] = np.dot(ja[:n], out[n - 1 :: -1][:n]) / n
        return QExpansion(self.level, out)

    def _powers(self, tau: complex) -> np.ndarray:
        n = np.arange(self.truncation + 1)
        return np.exp(2j * np.pi * n * complex(tau) / self.level)

    def __call__(self, tau: complex) -> complex:
        return complex(np.dot(self.coeffs, self._powers(tau)))

    def tail_estimate(self, tau: complex) -> float:
        """Rough size of the neglected terms n > Q at tau.

        Takes the largest |a_n q^n| over the last tenth of the series and
        extends it geometrically with ratio |q_N|.
        """
        absq = math.exp(-TWO_PI * complex(tau).imag / self.level)
        if absq >= 1.0:
            return math.inf
        Q = self.truncation
        w = max(1, Q // 10)
        n = np.arange(Q - w + 1, Q + 1)
        last = np.abs(self.coeffs[Q - w + 1 :]) * np.exp(-TWO_PI * n * complex(tau).imag / self.level)
        growth = (1.0 + 1.0 / max(Q, 1)) ** 12
        if absq * growth >= 1.0:
            return math.inf
        return float(last.max()) * absq * growth / (1.0 - absq * growth)

    def evaluate(self, tau: complex, tol: float | None = None) -> tuple[complex, float]:
        """Value at tau together with a tail estimate; raises if tail > tol."""
        err = self.tail_estimate(tau)
        if tol is not None and err > tol:
            raise TruncationError(f"tail estimate {err:.3g} exceeds tolerance {tol:.3g} at tau={tau}")
        return self(tau), err


def choose_truncation(tau: complex, level: int, growth: int, tol: float = 1e-16, minimum: int = 20) -> int:
    """Smallest Q with Q^growth |q_N|^Q below tol (coefficients grow like n^growth)."""
    y = complex(tau).imag
    if y <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    rate = TWO_PI * y / level
    log_tol = math.log(tol)
    Q = minimum
    while growth * math.log(Q) - rate * Q > log_tol:
        Q = int(Q * 1.25) + 1
    return Q


# -- regulated integration ---------------------------------------------------


def regulated_integrals(f: QExpansion, tau: complex, pmax: int, tol: float | None = None) -> np.ndarray:
    """Regulated integrals from tau to the unit tangent vector at i*infinity.

    Returns the array over p = 0..pmax of

        -a_0 tau^(p+1)/(p+1) + int_tau^{i inf} (f(z) - a_0) z^p dz,

    the second part integrated term by term in closed form.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    N = f.level
    Q = f.truncation
    n = np.arange(1, Q + 1)
    alpha = 2j * np.pi * n / N
    weights = f.coeffs[1:] * np.exp(alpha * tau)
    inv_alpha = 1.0 / alpha
    out = np.empty(pmax + 1, dtype=complex)
    a0 = f.coeffs[0]
    for p in range(pmax + 1):
        # int_tau^{i inf} e^{alpha z} z^p dz = -e^{alpha tau} sum_j p!/(p-j)! (-1)^j tau^(p-j) alpha^-(j+1)
        poly = np.zeros(Q, dtype=complex)
        inv_pow = inv_alpha.copy()
        falling = 1.0
        for j in range(p + 1):
            poly += falling * (-1) ** j * tau ** (p - j) * inv_pow
            falling *= p - j
            inv_pow = inv_pow * inv_alpha
        out[p] = -a0 * tau ** (p + 1) / (p + 1) - np.dot(weights, poly)
    if tol is not None:
        err = f.tail_estimate(tau) * max(1.0, abs(tau)) ** pmax * N / TWO_PI
        if err > tol:
            raise TruncationError(f"regulated integral tail {err:.3g} exceeds tolerance {tol:.3g}")
    return out


def regulated_integral(f: QExpansion, p: int, tau: complex, tol: float | None = None) -> complex:
    """Single regulated integral with weight z^p; see :func:`regulated_integrals`."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    return complex(regulated_integrals(f, tau, p, tol)[p])


def regulated_integrals_mp(coeffs: Sequence, level: int, tau, pmax: int) -> list:
    """Multiprecision variant of :func:`regulated_integrals`.

    ``coeffs`` are mpmath numbers a_0..a_Q; the caller sets ``mp.dps``.
    Used where Im(tau) is small and the double-precision sum suffers from
    cancellation between large terms.
    """
    tau = mpmath.mpc(tau)
    Q = len(coeffs) - 1
    step = mpmath.exp(2j * mpmath.pi * tau / level)
    base = 2j * mpmath.pi / level
    out = [-coeffs[0] * tau ** (p + 1) / (p + 1) for p in range(pmax + 1)]
    tau_pow = [tau**j for j in range(pmax + 1)]
    qn = mpmath.mpc(1)
    for n in range(1, Q + 1):
        qn *= step
        c = coeffs[n]
        if not c:
            continue
        w = c * qn
        inv = 1 / (base * n)
        inv_pows = [inv]
        for _ in range(pmax):
            inv_pows.append(inv_pows[-1] * inv)
        for p in range(pmax + 1):
            acc = mpmath.mpc(0)
            falling = 1
            for j in range(p + 1):
                term = falling * tau_pow[p - j] * inv_pows[j]
                acc += -term if j % 2 else term
                falling *= p - j
            out[p] -= w * acc
    return out
