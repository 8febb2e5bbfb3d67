"""Holomorphic and real-analytic Eisenstein series for Gamma(N).

Two independent routes are provided for every series: Fourier expansions
(``q_expansion``/``eval_q``) and truncated lattice sums (``lattice_sum``,
``nonhol_lattice``).  The lattice sums are the oracle the rest of the
package is checked against.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .modular import CuspVector, pairing
from .numerics import QExpansion, TruncationError, bernoulli_poly, choose_truncation, partial_zeta

__all__ = [
    "Kind",
    "EisensteinSpec",
    "NonHolSpec",
    "divisor_sum",
    "q_expansion",
    "xi_expansion_direct",
    "xi_coefficients_exact",
    "g_coefficients_exact",
    "q_coefficients_mp",
    "eval_q",
    "lattice_sum",
    "nonhol_lattice",
    "nonhol_family",
    "DEFAULT_FLOOR",
    "default_lattice_radius",
]

DEFAULT_FLOOR = 0.5
DEFAULT_Q = 200
_ROW_CHUNK = 128


class Kind(str, Enum):
    G = "G"
    H = "H"
    XI = "XI"
    G2_DIFF = "G2_DIFF"


@dataclass(frozen=True)
class EisensteinSpec:
    """Which holomorphic series: kind, weight, vector and (for G2_DIFF) reference vector."""

    kind: Kind
    k: int
    v: CuspVector
    v0: CuspVector | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.k < 2:
            raise ValueError("weight must be >= 2")
        if self.kind is Kind.G2_DIFF:
            if self.k != 2:
                raise ValueError("G2_DIFF is a weight-two series")
            if self.v0 is None:
                object.__setattr__(self, "v0", CuspVector(0, 1, self.v.N))
            if self.v0.N != self.v.N:
                raise ValueError("reference vector has a different level")
        elif self.kind in (Kind.H, Kind.XI) and self.k == 2 and self.v.is_zero():
            raise ValueError("H_2 and xi_2 need v != (0,0)")

    @property
    def N(self) -> int:
        return self.v.N

    @property
    def modular(self) -> bool:
        """False only for a single weight-two G, which is not modular."""
        return not (self.kind is Kind.G and self.k == 2)


@dataclass(frozen=True)
class NonHolSpec:
    """Real-analytic series G_{r,s}^v; (r, s) = (0, 0) means the difference against v0."""

    r: int
    s: int
    v: CuspVector
    v0: CuspVector | None = field(default=None)

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise ValueError("weights must be nonnegative")
        if self.r == 0 and self.s == 0:
            if self.v0 is None:
                object.__setattr__(self, "v0", CuspVector(0, 1, self.v.N))
            if self.v0.N != self.v.N:
                raise ValueError("reference vector has a different level")

    @property
    def N(self) -> int:
        return self.v.N


def default_lattice_radius(k: int) -> int:
    return 200 if k >= 4 else 500 if k == 3 else 2000


# -- Fourier expansions -------------------------------------------------------


def divisor_sum(k: int, v: CuspVector, n: int, N: int | None = None) -> complex:
    """sum over divisors m of n (both signs) with n/m = c mod N of sign(m) m^(k-1) mu_N^(d m)."""
    N = v.N if N is None else N
    if n < 1:
        raise ValueError("n must be positive")
    c, d = v.a, v.b
    total = 0j
    for r in range(1, n + 1):
        if n % r:
            continue
        for m in (r, -r):
            if (n // m - c) % N == 0:
                total += math.copysign(1, m) * m ** (k - 1) * cmath.exp(2j * math.pi * d * m / N)
    return total


@lru_cache(maxsize=512)
def _divisor_sums(k: int, c: int, d: int, N: int, Q: int) -> np.ndarray:
    out = np.zeros(Q + 1, dtype=complex)
    sign = (-1) ** k
    for r in range(1, Q + 1):
        t = np.arange(1, Q // r + 1)
        phase = cmath.exp(2j * math.pi * d * r / N)
        pos = (t - c) % N == 0
        neg = (-t - c) % N == 0
        rk = float(r) ** (k - 1)
        out[r * t[pos]] += rk * phase
        out[r * t[neg]] += sign * rk * phase.conjugate()
    out.flags.writeable = False
    return out


@lru_cache(maxsize=512)
def _g_expansion(k: int, c: int, d: int, N: int, Q: int) -> QExpansion:
    coeffs = _divisor_sums(k, c, d, N, Q) * ((-2j * math.pi) ** k / (math.factorial(k - 1) * N**k))
    coeffs = coeffs.copy()
    coeffs[0] = partial_zeta(k, d, N) if c == 0 else 0.0
    return QExpansion(N, coeffs)


def _mu(N: int, e: int) -> complex:
    return cmath.exp(2j * math.pi * (e % N) / N)


def _h_expansion(k: int, v: CuspVector, Q: int) -> QExpansion:
    N = v.N
    total = np.zeros(Q + 1, dtype=complex)
    for u in CuspVector.all(N):
        total += _mu(N, pairing(v, u)) * _g_expansion(k, u.a, u.b, N, Q).coeffs
    return QExpansion(N, total)


def q_expansion(spec: EisensteinSpec, Q: int = DEFAULT_Q) -> QExpansion:
    """Fourier coefficients a_0..a_Q in q_N.

    H and xi are assembled from the G expansions through the symplectic
    character sum H^v = sum_u mu^(v|u) G^u.  This orientation of the pairing
    is the one under which the explicit xi expansion, the L-value formulas,
    the cocycle values and the inversion G^v = N^-2 sum_u mu^-(u|v) H^u all
    hold as stated.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    k, v, N = spec.k, spec.v, spec.N
    if spec.kind is Kind.G:
        return _g_expansion(k, v.a, v.b, N, Q)
    if spec.kind is Kind.G2_DIFF:
        v0 = spec.v0
        return _g_expansion(2, v.a, v.b, N, Q) - _g_expansion(2, v0.a, v0.b, N, Q)
    h = _h_expansion(k, v, Q)
    if spec.kind is Kind.H:
        return h
    return h * (math.factorial(k - 1) / (2j * math.pi) ** k)


@lru_cache(maxsize=64)
def xi_coefficients_exact(k: int, v: CuspVector, Q: int) -> tuple:
    """Exact Fourier data of xi_k^v up to q_N^Q.

    Returns ``(a0, rows)``: ``a0`` is the rational constant term and
    ``rows[n]`` maps an exponent r mod N to an integer c, so that the n-th
    coefficient is sum_r c mu_N^r / N^(k-1).  Written out directly in (a, b):

        -B_k(a/N)/k + sum_{m = a mod N} (m/N)^(k-1) sum_n mu^(nb) q^(mn)
                    + (-1)^k sum_{m = -a mod N} (m/N)^(k-1) sum_n mu^(-nb) q^(mn)

    with m, n >= 1.  Independent of the G-to-H conversion used by
    ``q_expansion``.
    """
    N = v.N
    a, b = v.a, v.b
    a0 = -bernoulli_poly(k, Fraction(a, N)) / k
    rows: list[dict[int, int]] = [dict() for _ in range(Q + 1)]
    sign = (-1) ** k
    for m in range(1, Q + 1):
        weight = m ** (k - 1)
        first = (m - a) % N == 0
        second = (m + a) % N == 0
        if not (first or second):
            continue
        for n in range(1, Q // m + 1):
            row = rows[m * n]
            if first:
                r = (n * b) % N
                row[r] = row.get(r, 0) + weight
            if second:
                r = (-n * b) % N
                row[r] = row.get(r, 0) + sign * weight
    return a0, tuple(rows)


def xi_expansion_direct(k: int, v: CuspVector, Q: int = DEFAULT_Q) -> QExpansion:
    """Fourier expansion of xi_k^v from :func:`xi_coefficients_exact`."""
    N = v.N
    a0, rows = xi_coefficients_exact(k, v, Q)
    roots = np.exp(2j * np.pi * np.arange(N) / N)
    coeffs = np.zeros(Q + 1, dtype=complex)
    coeffs[0] = float(a0)
    scale = float(N) ** (k - 1)
    for n in range(1, Q + 1):
        coeffs[n] = sum(c * roots[r] for r, c in rows[n].items()) / scale
    return QExpansion(N, coeffs)


@lru_cache(maxsize=64)
def g_coefficients_exact(k: int, v: CuspVector, Q: int) -> tuple:
    """Exact divisor-sum data of G_k^v: ``rows[n]`` maps r mod N to an integer c
    with sigma^v_{k-1}(n) = sum_r c mu_N^r."""
    N = v.N
    c, d = v.a, v.b
    rows: list[dict[int, int]] = [dict() for _ in range(Q + 1)]
    sign = (-1) ** k
    for r in range(1, Q + 1):
        weight = r ** (k - 1)
        for t in range(1, Q // r + 1):
            row = rows[r * t]
            if (t - c) % N == 0:  # divisor m = r, n/m = t
                e = (d * r) % N
                row[e] = row.get(e, 0) + weight
            if (-t - c) % N == 0:  # divisor m = -r: sign(m) m^(k-1) = (-1)^k r^(k-1)
                e = (-d * r) % N
                row[e] = row.get(e, 0) + sign * weight
    return tuple(rows)


def q_coefficients_mp(spec: EisensteinSpec, Q: int) -> list:
    """Fourier coefficients a_0..a_Q as mpmath numbers at the current ``mp.dps``.

    Supports G, XI and G2_DIFF; built from the exact integer data so the
    only rounding is in the final mpmath arithmetic.
    """
    N = spec.N
    roots = [mpmath.expjpi(mpmath.mpf(2 * r) / N) for r in range(N)]

    def combine(row):
        return mpmath.fsum(c * roots[r] for r, c in row.items()) if row else mpmath.mpc(0)

    if spec.kind is Kind.XI:
        a0, rows = xi_coefficients_exact(spec.k, spec.v, Q)
        scale = mpmath.mpf(N) ** (spec.k - 1)
        return [mpmath.mpf(a0.numerator) / a0.denominator] + [combine(rows[n]) / scale for n in range(1, Q + 1)]
    if spec.kind is Kind.G:
        return _g_coefficients_mp(spec.k, spec.v, Q, combine)
    if spec.kind is Kind.G2_DIFF:
        a = _g_coefficients_mp(2, spec.v, Q, combine)
        b = _g_coefficients_mp(2, spec.v0, Q, combine)
        return [x - y for x, y in zip(a, b)]
    raise ValueError(f"no multiprecision expansion for kind {spec.kind.value}")


def _g_coefficients_mp(k: int, v: CuspVector, Q: int, combine) -> list:
    N = v.N
    rows = g_coefficients_exact(k, v, Q)
    scale = (-2j * mpmath.pi) ** k / (mpmath.factorial(k - 1) * mpmath.mpf(N) ** k)
    if v.a == 0:
        d = v.b % N
        if k == 2 and N == 1:
            a0 = 2 * mpmath.zeta(2)
        elif d == 0:
            a0 = (1 + (-1) ** k) * mpmath.zeta(k) / mpmath.mpf(N) ** k
        else:
            x = mpmath.mpf(d) / N
            a0 = (mpmath.zeta(k, x) + (-1) ** k * mpmath.zeta(k, 1 - x)) / mpmath.mpf(N) ** k
    else:
        a0 = mpmath.mpf(0)
    return [mpmath.mpc(a0)] + [combine(rows[n]) * scale for n in range(1, Q + 1)]


def eval_q(
    spec: EisensteinSpec,
    tau: complex,
    Q: int | None = None,
    floor: float = DEFAULT_FLOOR,
    tol: float | None = 1e-12,
) -> tuple[complex, float]:
    """Evaluate the Fourier series at tau; returns (value, tail estimate).

    With ``Q=None`` the truncation is chosen from Im(tau) so that the tail
    is negligible.
    """
    tau = complex(tau)
    if tau.imag < floor:
        raise ValueError(f"Im(tau) = {tau.imag:.3g} is below the evaluation floor {floor}")
    if Q is None:
        Q = max(DEFAULT_Q, choose_truncation(tau, spec.N, spec.k, 1e-18))
    return q_expansion(spec, Q).evaluate(tau, tol)


# -- lattice sums -------------------------------------------------------------


def _coset(lo: int, hi: int, r: int, N: int) -> np.ndarray:
    start = lo + ((r - lo) % N)
    return np.arange(start, hi + 1, N, dtype=float)


def _box_min(tau: complex) -> float:
    # min of |x tau + y| over the boundary of the unit square
    t = np.linspace(-1.0, 1.0, 2001)
    edges = np.concatenate([tau + t, -tau + t, t * tau + 1, t * tau - 1])
    return float(np.abs(edges).min())


def _coset_box_sum(k: int, c: int, d: int, N: int, tau: complex, M: int) -> complex:
    ms = _coset(-M, M, c, N)
    ns = _coset(-M, M, d, N)
    total = 0j
    for i in range(0, len(ms), _ROW_CHUNK):
        m = ms[i : i + _ROW_CHUNK, None]
        z = m * tau + ns[None, :]
        zero = z == 0
        z[zero] = 1.0
        w = z ** (-k)
        w[zero] = 0.0
        total += np.sum(w)
    return total


def _row_tail_k2(z: np.ndarray, N: int) -> np.ndarray:
    # sum_{j>=0} (z + N j)^-2 by Euler-Maclaurin, |z| >= M
    return 1.0 / (N * z) + 0.5 / z**2 + N / (6 * z**3) - N**3 / (30 * z**5) + N**5 / (42 * z**7)


def _coset_sum_k2(c: int, d: int, N: int, tau: complex, M: int) -> complex:
    """Eisenstein-summed weight-two coset sum: complete inner n-sums, outer m-sum to M."""
    ms = _coset(-M, M, c, N)
    ns = _coset(-M, M, d, N)
    n_hi = ns[-1] + N  # first coset element above M
    n_lo = ns[0] - N  # last coset element below -M
    total = 0j
    for i in range(0, len(ms), _ROW_CHUNK):
        m = ms[i : i + _ROW_CHUNK]
        z = m[:, None] * tau + ns[None, :]
        zero = z == 0
        z[zero] = 1.0
        w = z ** (-2)
        w[zero] = 0.0
        total += np.sum(w)
        total += np.sum(_row_tail_k2(m * tau + n_hi, N))
        total += np.sum(_row_tail_k2(-(m * tau + n_lo), N))
    return total


def lattice_sum(spec: EisensteinSpec, tau: complex, M: int | None = None) -> tuple[complex, float]:
    """Direct summation over the lattice box max(|m|, |n|) <= M.

    Returns (value, error estimate).  Weight >= 3 uses the plain box, whose
    truncation error is O(M^(2-k)).  Weight two uses Eisenstein summation:
    each row n-sum is completed with an Euler-Maclaurin tail and rows are
    summed over |m| <= M.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    k, v, N = spec.k, spec.v, spec.N
    M = default_lattice_radius(k) if M is None else M
    if M < 10:
        raise ValueError("lattice radius must be >= 10")

    def coset(c: int, d: int) -> complex:
        return _coset_sum_k2(c, d, N, tau, M) if k == 2 else _coset_box_sum(k, c, d, N, tau, M)

    if spec.kind is Kind.G:
        value = coset(v.a, v.b)
    elif spec.kind is Kind.G2_DIFF:
        value = coset(v.a, v.b) - coset(spec.v0.a, spec.v0.b)
    else:
        value = sum(_mu(N, pairing(v, u)) * coset(u.a, u.b) for u in CuspVector.all(N))
        if spec.kind is Kind.XI:
            value *= math.factorial(k - 1) / (2j * math.pi) ** k
    s = _box_min(tau)
    if k == 2:
        # Euler-Maclaurin remainder per row ~ N^7/|z|^9, 2M/N rows
        err = 2 * M / N * N**7 / (s * M) ** 9 + 1 / M
        err = min(err, 1.0 / M)
    else:
        err = 8.0 / ((k - 2) * s**k * M ** (k - 2))
        if spec.kind in (Kind.H, Kind.XI):
            err *= N**2
        else:
            err /= N**2
        if spec.kind is Kind.XI:
            err *= math.factorial(k - 1) / (2 * math.pi) ** k
    return complex(value), float(err)


# -- real-analytic series -------------------------------------------------------


def _nonhol_coset(c: int, d: int, N: int, tau: complex, M: int, pairs: list[tuple[int, int]]) -> np.ndarray:
    ms = _coset(-M, M, c, N)
    ns = _coset(-M, M, d, N)
    y = tau.imag
    out = np.zeros(len(pairs), dtype=complex)
    for i in range(0, len(ms), _ROW_CHUNK):
        m = ms[i : i + _ROW_CHUNK, None]
        z = m * tau + ns[None, :]
        zb = m * tau.conjugate() + ns[None, :]
        zero = z == 0
        z[zero] = 1.0
        zb[zero] = 1.0
        iz, izb = 1.0 / z, 1.0 / zb
        iz[zero] = 0.0
        izb[zero] = 0.0
        for idx, (r, s) in enumerate(pairs):
            out[idx] += y * np.sum(iz ** (r + 1) * izb ** (s + 1))
    return out


def nonhol_family(k: int, v: CuspVector, tau: complex, M: int) -> np.ndarray:
    """G_{r,s}^v(tau) for all r + s = k - 2, indexed by r = 0..k-2."""
    tau = complex(tau)
    pairs = [(r, k - 2 - r) for r in range(k - 1)]
    return _nonhol_coset(v.a, v.b, v.N, tau, M, pairs)


def nonhol_lattice(spec: NonHolSpec, tau: complex, M: int | None = None) -> tuple[complex, float]:
    """Box-truncated G_{r,s}^v(tau), or the (0,0) difference g_{0,0}^v; returns (value, error)."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    w = spec.r + spec.s
    M = default_lattice_radius(w + 2) if M is None else M
    if M < 10:
        raise ValueError("lattice radius must be >= 10")
    v, N = spec.v, spec.N
    s_min = _box_min(tau)
    if w == 0:
        a = _nonhol_coset(v.a, v.b, N, tau, M, [(0, 0)])[0]
        b = _nonhol_coset(spec.v0.a, spec.v0.b, N, tau, M, [(0, 0)])[0]
        return complex(a - b), float(tau.imag / (s_min**2 * M))
    value = _nonhol_coset(v.a, v.b, N, tau, M, [(spec.r, spec.s)])[0]
    err = 8.0 * tau.imag / (w * s_min ** (w + 2) * N**2 * M**w)
    return complex(value), float(err)


__all__ += ["TruncationError"]
