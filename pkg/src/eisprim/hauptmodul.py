"""Hauptmoduln of the genus-zero curves Y(N), N = 2..5, and the logarithm formulas.

The Hauptmodul is normalized as x = q_N + O(q_N^2), with x = 0 at the cusp
v0 = (0,1) (i infinity) and a pole at v_inf = (1,0) (the cusp 0).

Two constructions are provided:

(A) exponentiate the weight-two Eisenstein series g_2^{v_inf}, using
    d log x = -(N sin^2(pi/N)/pi^2) 2 pi i g_2^{v_inf}(tau) dtau;
(B) for N = 2 only, the theta quotient x = lambda/(16(1 - lambda)) with
    lambda = theta_2^4/theta_3^4.

At N = 5 the series from (A) is modular but not a Hauptmodul (x o gamma is
not a Moebius image of x), so the level-5 Hauptmodul is built from the
Rogers-Ramanujan continued fraction instead, x = r/(1 - phi r).

The cusp attached to v = (a, b) is the point -b/a, where the lattice sum
G_2^v picks up its constant term (the pole of (m tau + n)^-2 along the
class of v).

Coefficients are kept in mpmath at ``DPS`` digits.  Cusp values are found
without reference to (A)'s defining relation: x o gamma is again a
Hauptmodul, so x(gamma tau) = M(x(tau)) for a Moebius map M, which is fitted
from three sample points; the cusp value at gamma(i infinity) is M(0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .eisenstein import EisensteinSpec, Kind, q_coefficients_mp
from .equivariant import g00
from .modular import CuspVector, GroupElement
from .numerics import QExpansion

__all__ = [
    "SUPPORTED_LEVELS",
    "Hauptmodul",
    "LogFormulaReport",
    "build_hauptmodul",
    "construction_a",
    "construction_b",
    "construction_rr",
    "cusp_representatives",
    "cusp_value",
    "log_prefactor",
    "moebius_defect",
    "verify_log_formula",
]

SUPPORTED_LEVELS = (2, 3, 4, 5)
DPS = 40
DEFAULT_Q = 120
FIT_Q = 700
INF = math.inf


def _check_level(N: int) -> None:
    if N not in SUPPORTED_LEVELS:
        raise ValueError(f"level {N} is not a supported genus-zero level {SUPPORTED_LEVELS}")


def log_prefactor(N: int) -> float:
    """pi / (4 N sin^2(pi/N)), the constant in front of the logarithms."""
    return math.pi / (4 * N * math.sin(math.pi / N) ** 2)


# -- constructions ---------------------------------------------------------------


def _series_exp(b: list) -> list:
    # exp of sum_{n>=1} b_n q^n, by n e_n = sum_j j b_j e_{n-j}
    Q = len(b) - 1
    e = [mpmath.mpf(1)] + [mpmath.mpf(0)] * Q
    for n in range(1, Q + 1):
        e[n] = mpmath.fsum(j * b[j] * e[n - j] for j in range(1, n + 1)) / n
    return e


@lru_cache(maxsize=16)
def construction_a(N: int, Q: int = DEFAULT_Q) -> tuple:
    """Coefficients x_0..x_Q of x = q_N exp(sum b_n q_N^n), from g_2^{v_inf}.

    With c_N = N sin^2(pi/N)/pi^2 the d log relation gives b_n = -c_N N g_n / n,
    where g_n are the coefficients of g_2^{(1,0)} = G_2^{(1,0)} - G_2^{(0,1)}.
    """
    _check_level(N)
    with mpmath.workdps(DPS):
        spec = EisensteinSpec(Kind.G2_DIFF, 2, CuspVector(1, 0, N), CuspVector(0, 1, N))
        g = q_coefficients_mp(spec, Q)
        cN = N * mpmath.sin(mpmath.pi / N) ** 2 / mpmath.pi**2
        b = [mpmath.mpf(0)] + [-cN * N * g[n] / n for n in range(1, Q)]
        e = _series_exp(b)
        return tuple([mpmath.mpc(0)] + [mpmath.mpc(c) for c in e])


def _int_mul(a: list[int], b: list[int], Q: int) -> list[int]:
    out = [0] * (Q + 1)
    for i, x in enumerate(a[: Q + 1]):
        if x:
            for j in range(Q + 1 - i):
                out[i + j] += x * b[j]
    return out


def _int_inverse(a: list[Fraction], Q: int) -> list[Fraction]:
    # 1/a for a power series with a[0] != 0
    out = [Fraction(0)] * (Q + 1)
    out[0] = 1 / Fraction(a[0])
    for n in range(1, Q + 1):
        out[n] = -sum(a[j] * out[n - j] for j in range(1, n + 1)) * out[0]
    return out


@lru_cache(maxsize=4)
def construction_b(Q: int = DEFAULT_Q) -> tuple[Fraction, ...]:
    """Exact coefficients of lambda/(16(1 - lambda)) in q_2 = exp(pi i tau).

    theta_2^4 = q_2 (sum_n q_2^(n(n+1)))^4 and theta_3^4 = (sum_n q_2^(n^2))^4, so
    x = q_2 A^4 / (16 (B^4 - q_2 A^4)) with A, B those two integer series.
    """
    A = [0] * (Q + 1)
    B = [0] * (Q + 1)
    n = 0
    while n * n <= Q:
        for m in {n, -n}:
            B[m * m] += 1
        n += 1
    n = 0
    while n * (n + 1) <= Q:
        A[n * (n + 1)] += 2  # n and -n-1 give the same exponent
        n += 1
    A4 = _int_mul(_int_mul(A, A, Q), _int_mul(A, A, Q), Q)
    B4 = _int_mul(_int_mul(B, B, Q), _int_mul(B, B, Q), Q)
    num = [0] + A4[:Q]  # q_2 A^4
    den = [16 * (x - y) for x, y in zip(B4, num)]
    inv = _int_inverse([Fraction(x) for x in den], Q)
    return tuple(_int_mul_frac(num, inv, Q))


def _int_mul_frac(a: list, b: list, Q: int) -> list:
    out = [Fraction(0)] * (Q + 1)
    for i, x in enumerate(a[: Q + 1]):
        if x:
            for j in range(Q + 1 - i):
                out[i + j] += x * b[j]
    return out


@lru_cache(maxsize=4)
def construction_rr(Q: int = DEFAULT_Q) -> tuple:
    """x = r/(1 - phi r) at level 5, r = q^(1/5) prod_n (1 - q^n)^(n|5).

    r vanishes at i infinity and equals 1/phi at the cusp 0, so x has its
    zero and pole where the normalization asks for them.
    """
    chi = (0, 1, -1, -1, 1)
    with mpmath.workdps(DPS):
        log_r = [mpmath.mpf(0)] * (Q + 1)
        for n in range(1, Q // 5 + 1):
            if chi[n % 5]:
                for m in range(1, Q // (5 * n) + 1):
                    log_r[5 * n * m] -= chi[n % 5] * mpmath.mpf(1) / m
        r = [mpmath.mpf(0)] + _series_exp(log_r)[:Q]
        phi = (1 + mpmath.sqrt(5)) / 2
        den = [mpmath.mpf(1)] + [-phi * c for c in r[1:]]
        inv = [mpmath.mpf(1)] + [mpmath.mpf(0)] * Q
        for n in range(1, Q + 1):
            inv[n] = -mpmath.fsum(den[j] * inv[n - j] for j in range(1, n + 1))
        return tuple(mpmath.mpc(mpmath.fsum(r[i] * inv[n - i] for i in range(n + 1))) for n in range(Q + 1))


# -- cusps ---------------------------------------------------------------------


def cusp_representatives(N: int) -> list[CuspVector]:
    """One vector per cusp of Gamma(N): primitive (a, b) mod N up to sign.

    v0 = (0,1) and v_inf = (1,0) come first, the rest in lexicographic order
    of the smaller of (a, b) and (-a, -b).
    """
    _check_level(N)
    seen = set()
    reps = []
    for a in range(N):
        for b in range(N):
            if math.gcd(math.gcd(a, b), N) != 1:
                continue
            key = min((a, b), ((-a) % N, (-b) % N))
            if key not in seen:
                seen.add(key)
                reps.append(CuspVector(*key, N))
    head = [CuspVector(0, 1, N), CuspVector(1, 0, N)]
    return head + sorted((v for v in reps if v not in head), key=lambda v: (v.a, v.b))


def _lift(v: CuspVector) -> tuple[int, int]:
    """Coprime integers (a, b) congruent to (v.a, v.b) mod N."""
    N = v.N
    for a in range(v.a, v.a + N * N + 1, N):
        for b in range(v.b, v.b + N * N + 1, N):
            if math.gcd(a, b) == 1:
                return a, b
    raise AssertionError("no coprime lift found")


def _cusp_matrix(v: CuspVector) -> GroupElement:
    """gamma in SL2(Z) with gamma(i infinity) = -b/a for a lift of v."""
    a, b = _lift(CuspVector(v.a, -v.b, v.N))
    # gamma = (b, -s; a, r) with b r + s a = 1
    g, r, s = _egcd(b, a)
    assert g == 1
    return GroupElement(b, -s, a, r)


def _egcd(x: int, y: int) -> tuple[int, int, int]:
    if y == 0:
        return (x, 1, 0) if x >= 0 else (-x, -1, 0)
    g, p, q = _egcd(y, x % y)
    return g, q, p - (x // y) * q


# -- the Hauptmodul ------------------------------------------------------------


@dataclass(frozen=True)
class Hauptmodul:
    """x(tau) = sum_n coeffs[n] q_N^n with its cusp table.

    ``source`` names the construction behind ``coeffs``: "theta" for N = 2,
    "rogers-ramanujan" for N = 5 and "eisenstein" otherwise.  ``cusps`` maps each cusp representative to its
    value, ``math.inf`` at v_inf.
    """

    level: int
    coeffs: tuple  # mpmath numbers
    source: str
    cusps: tuple[tuple[CuspVector, complex | float], ...]

    @property
    def expansion(self) -> QExpansion:
        return QExpansion(self.level, [complex(c) for c in self.coeffs])

    def __call__(self, tau) -> complex:
        return complex(self.evaluate_mp(tau))

    def evaluate_mp(self, tau):
        with mpmath.workdps(DPS):
            tau = mpmath.mpc(complex(tau).real, complex(tau).imag) if not isinstance(tau, mpmath.mpc) else tau
            if tau.imag <= 0:
                raise ValueError("tau must lie in the upper half-plane")
            q = mpmath.exp(2j * mpmath.pi * tau / self.level)
            Q = len(self.coeffs) - 1
            # the coefficients grow, so look at the actual last terms
            last = max(abs(self.coeffs[n]) * abs(q) ** n for n in range(max(1, Q - 4), Q + 1))
            value = mpmath.polyval(list(reversed(self.coeffs)), q)
            if last > 1e-18 * max(1, abs(value)):
                raise ValueError(f"Im(tau) = {float(tau.imag):.3g} is too small for {Q} terms")
            return value

    def cusp(self, v: CuspVector) -> complex | float:
        for w, value in self.cusps:
            if w == v or w == CuspVector(-v.a, -v.b, v.N):
                return value
        raise ValueError(f"{v} is not a cusp of Gamma({self.level})")


def _coefficients(N: int, Q: int) -> tuple[tuple, str]:
    if N == 2:
        with mpmath.workdps(DPS):
            return tuple(mpmath.mpc(mpmath.mpf(c.numerator) / c.denominator) for c in construction_b(Q)), "theta"
    if N == 5:
        return construction_rr(Q), "rogers-ramanujan"
    return construction_a(N, Q), "eisenstein"


def _moebius_fit(z: list, w: list):
    # (alpha z + beta) / (gamma z + delta) through three points: null vector of
    # rows (z, 1, -w z, -w)
    rows = mpmath.matrix([[zi, 1, -wi * zi, -wi] for zi, wi in zip(z, w)])
    # complete to a square system by fixing one unknown through a random row
    extra = [mpmath.mpf(1), mpmath.mpf("0.7"), mpmath.mpf("0.3"), mpmath.mpf("1.1")]
    A = mpmath.matrix(4, 4)
    for i in range(3):
        for j in range(4):
            A[i, j] = rows[i, j]
    for j in range(4):
        A[3, j] = extra[j]
    sol = mpmath.lu_solve(A, mpmath.matrix([0, 0, 0, 1]))
    return sol[0], sol[1], sol[2], sol[3]


def _moebius_samples(coeffs: tuple, v: CuspVector) -> list:
    # pairs (x(tau), x(gamma tau)) with Im tau = 1/|c| and Im gamma tau close to it
    gamma = _cusp_matrix(v)
    c, d = gamma.c, gamma.d
    if c == 0:
        raise ValueError("the cusp at i infinity is v0, where x vanishes")
    h = Hauptmodul(v.N, coeffs, "", ())
    pairs = []
    for s in (-0.12, 0.0, 0.09, 0.04):
        tau = mpmath.mpc(-mpmath.mpf(d) / c + mpmath.mpf(s) / abs(c), mpmath.mpf(1) / abs(c))
        gtau = (gamma.a * tau + gamma.b) / (c * tau + d)
        pairs.append((h.evaluate_mp(tau), h.evaluate_mp(gtau)))
    return pairs


def _fit_cusp_value(coeffs: tuple, v: CuspVector) -> tuple[complex | float, float]:
    """x at the cusp of v from x o gamma = M o x, with the fit residual at a fourth point."""
    with mpmath.workdps(DPS):
        pairs = _moebius_samples(coeffs, v)
        alpha, beta, gamma, delta = _moebius_fit([p[0] for p in pairs[:3]], [p[1] for p in pairs[:3]])
        z, w = pairs[3]
        residual = float(abs((alpha * z + beta) / (gamma * z + delta) - w) / max(1, abs(w)))
        if abs(delta) < 1e-20 * max(1, abs(beta)):
            return INF, residual
        return complex(beta / delta), residual


def moebius_defect(coeffs: tuple, v: CuspVector) -> float:
    """How far x o gamma is from a Moebius image of x (0 for a Hauptmodul).

    ``coeffs`` are q_N coefficients with enough terms for Im tau = 1/c, where
    gamma(i infinity) is the cusp of v.
    """
    return _fit_cusp_value(coeffs, v)[1]


@lru_cache(maxsize=8)
def build_hauptmodul(N: int, Q: int = DEFAULT_Q) -> Hauptmodul:
    """The normalized Hauptmodul of Gamma(N) with its cusp table."""
    _check_level(N)
    coeffs, source = _coefficients(N, Q)
    fit_coeffs, _ = _coefficients(N, FIT_Q)
    table = []
    for v in cusp_representatives(N):
        if v == CuspVector(0, 1, N):
            table.append((v, 0j))
        elif v == CuspVector(1, 0, N):
            table.append((v, INF))
        else:
            table.append((v, _fit_cusp_value(fit_coeffs, v)[0]))
    return Hauptmodul(N, coeffs, source, tuple(table))


def cusp_value(h: Hauptmodul, v: CuspVector) -> complex | float:
    """x_v = lim x(tau) as tau tends to -b/a, the cusp of v; ``math.inf`` at v_inf."""
    return h.cusp(v)


# -- the logarithm formulas ----------------------------------------------------


@dataclass(frozen=True)
class LogFormulaReport:
    level: int
    cusp: CuspVector
    tau: complex
    lhs: float  # g_00 from the integral representation
    rhs: float  # from the Hauptmodul
    difference: float
    budget: float

    @property
    def passed(self) -> bool:
        return self.difference <= self.budget


def verify_log_formula(h: Hauptmodul, v: CuspVector, tau: complex, budget: float = 1e-6) -> LogFormulaReport:
    """Compare g_00^v(tau) with its logarithm formula in terms of x(tau).

    For v = v_inf the right-hand side is +c log|x|^2, for any other cusp
    v != v0 it is -c log|(x_v - x)/(x_v x)|^2, with c = pi/(4 N sin^2(pi/N)).
    The left-hand side is -cG_2^v/(2 pi) by regulated integration.
    """
    N = h.level
    if v.N != N:
        raise ValueError("cusp vector has a different level")
    if v == CuspVector(0, 1, N):
        raise ValueError("v0 is the reference cusp; g_00^{v0} vanishes identically")
    tau = complex(tau)
    x = h(tau)
    c = log_prefactor(N)
    xv = h.cusp(v)
    if xv == INF:
        rhs = c * math.log(abs(x) ** 2)
    else:
        rhs = -c * math.log(abs((xv - x) / (xv * x)) ** 2)
    lhs = g00(v, tau)
    return LogFormulaReport(N, v, tau, float(lhs), float(rhs), abs(lhs - rhs), budget)

