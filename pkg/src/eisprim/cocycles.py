"""Eisenstein cocycles C_k^v on SL2(Z) and the coboundary data of their real parts.

Closed-form values are held as an exact linear combination

    C = sum_s  w_s * P_s

where each P_s is a homogeneous polynomial with rational coefficients and
w_s is one transcendental constant (2 pi i, or a Clausen value with its
prefactor).  The group action only touches the rational polynomials, so
folding long generator words introduces no rounding; the floats enter once,
in :meth:`ExactCochain.collapse`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .eisenstein import EisensteinSpec, Kind, q_coefficients_mp, q_expansion
from .lvalues import LValueQuery
from .modular import (
    IDENTITY,
    TOKENS,
    CuspVector,
    GroupElement,
    HomogeneousPoly,
    decompose,
    moebius,
    pairing,
    poly_action_list,
)
from .numerics import (
    TruncationError,
    bernoulli_poly,
    choose_truncation,
    clausen,
    regulated_integrals,
    regulated_integrals_mp,
)

__all__ = [
    "CocycleValue",
    "CoboundaryData",
    "ExactCochain",
    "cocycle_T",
    "cocycle_S",
    "cocycle_gamma",
    "cocycle_gamma_exact",
    "cocycle_oracle",
    "oracle_tau",
    "coboundary_data",
    "g_cocycle",
]

TWO_PI_I = 2j * math.pi
MP_THRESHOLD = 0.25


# -- exact bookkeeping -------------------------------------------------------


def _symbol_value(symbol: tuple) -> complex:
    if symbol == ("2pi i",):
        return TWO_PI_I
    # ("Cl", m, x): (m-1)! i^kappa Cl_m(2 pi x) / (2 pi i)^(m-1), kappa = (m+1) mod 2
    _, m, x = symbol
    kappa = (m + 1) % 2
    return math.factorial(m - 1) * 1j**kappa * clausen(m, 2 * math.pi * float(x)) / TWO_PI_I ** (m - 1)


class ExactCochain:
    """Finite sum of (constant symbol) x (rational homogeneous polynomial)."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: dict | None = None):
        self.degree = degree
        self.terms: dict[tuple, HomogeneousPoly] = dict(terms or {})

    @classmethod
    def zero(cls, degree: int) -> "ExactCochain":
        return cls(degree)

    def __add__(self, other: "ExactCochain") -> "ExactCochain":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        out = dict(self.terms)
        for s, p in other.terms.items():
            out[s] = out[s] + p if s in out else p
        return ExactCochain(self.degree, out)

    def __neg__(self) -> "ExactCochain":
        return ExactCochain(self.degree, {s: -p for s, p in self.terms.items()})

    def __sub__(self, other: "ExactCochain") -> "ExactCochain":
        return self + (-other)

    def __or__(self, g: GroupElement) -> "ExactCochain":
        return ExactCochain(self.degree, {s: p | g for s, p in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, ExactCochain) or other.degree != self.degree:
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        zero = HomogeneousPoly.zero(self.degree)
        return all(self.terms.get(s, zero) == other.terms.get(s, zero) for s in keys)

    __hash__ = None

    def collapse(self) -> HomogeneousPoly:
        coeffs = np.zeros(self.degree + 1, dtype=complex)
        for s, p in self.terms.items():
            coeffs += _symbol_value(s) * np.array([complex(c) for c in p.coeffs])
        return HomogeneousPoly(self.degree, coeffs)


@dataclass(frozen=True)
class CocycleValue:
    poly: HomogeneousPoly
    provenance: str  # "closed-form" or "oracle"

    def __post_init__(self):
        if self.provenance not in ("closed-form", "oracle"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def k(self) -> int:
        return self.poly.degree + 2


@dataclass(frozen=True)
class CoboundaryData:
    k: int
    v: CuspVector
    A_xi: float
    A_G: float

    @property
    def P_xi(self) -> HomogeneousPoly:
        return _y_power(self.k, self.A_xi)

    @property
    def P_G(self) -> HomogeneousPoly:
        return _y_power(self.k, self.A_G)


def _y_power(k: int, A: float) -> HomogeneousPoly:
    c = np.zeros(k - 1, dtype=complex)
    c[-1] = A
    return HomogeneousPoly(k - 2, c)


def _check(k: int, v: CuspVector) -> None:
    if k < 2:
        raise ValueError("weight must be >= 2")
    if k == 2 and v.is_zero():
        raise ValueError("weight two needs v != (0,0)")


# -- generator values --------------------------------------------------------


def _rational(k: int, coeffs) -> HomogeneousPoly:
    return HomogeneousPoly(k - 2, np.array([Fraction(c) for c in coeffs], dtype=object))


@lru_cache(maxsize=None)
def _exact_T(k: int, a: int, b: int, N: int) -> ExactCochain:
    # -2 pi i a_0 int_{-1}^0 (X - zY)^(k-2) dz, a_0 = -B_k(a/N)/k the constant
    # term of xi_k^v; the integral is sum_j C(k-1, j+1)/(k-1) X^(k-2-j) Y^j
    a0 = -bernoulli_poly(k, Fraction(a, N)) / k
    coeffs = [-a0 * Fraction(math.comb(k - 1, j + 1), k - 1) for j in range(k - 1)]
    return ExactCochain(k - 2, {("2pi i",): _rational(k, coeffs)})


def _lambda_xi_exact(k: int, a: int, b: int, N: int, L: int) -> tuple[tuple, Fraction]:
    """Lambda(xi_k^v, L) as (symbol, rational) with value rational * w_symbol / (2 pi i).

    Mirrors :func:`eisprim.lvalues.lambda_closed`.
    """
    LValueQuery(k, CuspVector(a, b, N), L)  # validation
    first = a == 0 and L == k - 1
    second = b == 0 and L == 1
    if first:
        # (k-2)! i^kappa (-1)^k Cl_{k-1}(2 pi b/N) / (2 pi i)^(k-1)
        return _clausen_symbol(k - 1, Fraction(b, N), (-1) ** k)
    if second:
        return _clausen_symbol(k - 1, Fraction(a, N), -1)
    value = (
        (-1) ** L
        * bernoulli_poly(k - L, Fraction(a, N))
        / (k - L)
        * bernoulli_poly(L, Fraction(b, N))
        / L
    )
    return ("2pi i",), Fraction(value)


def _clausen_symbol(m: int, x: Fraction, sign: int) -> tuple[tuple, Fraction]:
    # canonical key with 0 <= x <= 1/2, using Cl_m(2 pi (1 - x)) = (-1)^(m+1) Cl_m(2 pi x)
    if x > Fraction(1, 2):
        x = 1 - x
        sign *= (-1) ** (m + 1)
    if m % 2 == 0 and x in (0, Fraction(1, 2)):
        # sine-type Clausen values vanish at 0 and pi
        return ("2pi i",), Fraction(0)
    return ("Cl", m, x), Fraction(sign)


@lru_cache(maxsize=None)
def _exact_S(k: int, a: int, b: int, N: int) -> ExactCochain:
    # -2 pi i sum_l C(k-2,l) X^(k-2-l) (-Y)^l Lambda(xi, l+1)
    terms: dict[tuple, list] = {}
    for l in range(k - 1):
        symbol, r = _lambda_xi_exact(k, a, b, N, l + 1)
        coeff = -math.comb(k - 2, l) * (-1) ** l * r
        row = terms.setdefault(symbol, [Fraction(0)] * (k - 1))
        row[l] += coeff
    return ExactCochain(k - 2, {s: _rational(k, c) for s, c in terms.items()})


@lru_cache(maxsize=None)
def _exact_token(k: int, a: int, b: int, N: int, token: str) -> ExactCochain:
    if token == "S":
        return _exact_S(k, a, b, N)
    if token == "T":
        return _exact_T(k, a, b, N)
    if token == "NEG":
        return ExactCochain.zero(k - 2)
    if token == "Tinv":
        # 0 = C^w(T T^-1) = C^{wT}(T)|T^-1 + C^w(T^-1)
        w = CuspVector(a, b, N).act(TOKENS["T"])
        return -(_exact_T(k, w.a, w.b, N) | TOKENS["Tinv"])
    raise ValueError(f"unknown token {token!r}")


def cocycle_T(k: int, v: CuspVector) -> CocycleValue:
    """C_k^v(T) = -2 pi i a_0(xi_k^v) ((X+Y)^(k-1) - X^(k-1)) / ((k-1) Y)."""
    _check(k, v)
    return CocycleValue(_exact_T(k, v.a, v.b, v.N).collapse(), "closed-form")


def cocycle_S(k: int, v: CuspVector) -> CocycleValue:
    """C_k^v(S) = -2 pi i sum_l C(k-2,l) X^(k-2-l) (-Y)^l Lambda(xi_k^v, l+1)."""
    _check(k, v)
    return CocycleValue(_exact_S(k, v.a, v.b, v.N).collapse(), "closed-form")


def cocycle_gamma_exact(k: int, v: CuspVector, gamma: GroupElement, word: list[str] | None = None) -> ExactCochain:
    """Fold the extended cocycle identity C^v(t beta) = C^{v beta^-1}(t)|beta + C^v(beta)
    over a generator word for gamma, right to left."""
    _check(k, v)
    if word is None:
        word = decompose(gamma)
    result = ExactCochain.zero(k - 2)
    beta = IDENTITY
    for token in reversed(word):
        w = v.act(beta.inverse())
        result = (_exact_token(k, w.a, w.b, v.N, token) | beta) + result
        beta = TOKENS[token] @ beta
    if beta != gamma:
        raise ValueError("word does not multiply out to gamma")
    return result


def cocycle_gamma(k: int, v: CuspVector, gamma: GroupElement, word: list[str] | None = None) -> CocycleValue:
    return CocycleValue(cocycle_gamma_exact(k, v, gamma, word).collapse(), "closed-form")


# -- numeric oracle ----------------------------------------------------------


def _integral_coeffs(k: int, reg) -> list:
    # (X - zY)^(k-2) = sum_j C(k-2, j) (-1)^j z^j X^(k-2-j) Y^j
    return [TWO_PI_I * math.comb(k - 2, j) * (-1) ** j * reg[j] for j in range(k - 1)]


def _integral_poly(k: int, v: CuspVector, tau: complex, Q: int) -> HomogeneousPoly:
    """I^v(tau) = int_tau^{1_inf} 2 pi i xi_k^v(z) (X - zY)^(k-2) dz, regulated."""
    f = q_expansion(EisensteinSpec(Kind.XI, k, v), Q)
    reg = regulated_integrals(f, tau, k - 2)
    return HomogeneousPoly(k - 2, np.array(_integral_coeffs(k, reg)))


def _integral_poly_mp(k: int, v: CuspVector, tau, Q: int) -> list:
    coeffs = q_coefficients_mp(EisensteinSpec(Kind.XI, k, v), Q)
    reg = regulated_integrals_mp(coeffs, v.N, tau, k - 2)
    return [2j * mpmath.pi * math.comb(k - 2, j) * (-1) ** j * reg[j] for j in range(k - 1)]


def oracle_tau(gamma: GroupElement) -> complex:
    """Base point with Im tau = Im(gamma tau) = 1/|c|, the largest common value."""
    a, b, c, d = gamma.entries
    if c == 0:
        return 1j
    return complex(-d / c, 1 / abs(c))


def cocycle_oracle(
    k: int,
    v: CuspVector,
    gamma: GroupElement,
    tau: complex | None = None,
    Q: int | None = None,
    floor: float = 1e-3,
    dps: int | None = None,
) -> CocycleValue:
    """C_k^v(gamma) = I^{v gamma^-1}(gamma tau)|gamma - I^v(tau) by regulated integration.

    Below Im = MP_THRESHOLD the q-series terms grow large before they
    cancel, so the sums switch to mpmath with ``dps`` digits (default 40);
    ``dps=0`` forces double precision.
    """
    _check(k, v)
    if tau is None:
        tau = oracle_tau(gamma)
    tau = complex(tau)
    gtau = moebius(gamma, tau)
    low = min(tau.imag, gtau.imag)
    if low < floor:
        raise TruncationError(f"Im tau = {low:.3g} is below the oracle floor {floor}")
    w = v.act(gamma.inverse())
    if dps is None:
        dps = 0 if low >= MP_THRESHOLD else 40
    if not dps:
        if Q is None:
            Q = max(200, choose_truncation(complex(0, low), v.N, k + 1, 1e-20))
        upper = _integral_poly(k, w, gtau, Q) | gamma
        return CocycleValue(upper - _integral_poly(k, v, tau, Q), "oracle")
    if Q is None:
        Q = max(200, choose_truncation(complex(0, low), v.N, k + 1, 10.0 ** (-dps)))
    with mpmath.workdps(dps):
        # same Moebius image at full precision
        a, b, c, d = gamma.entries
        t = mpmath.mpc(tau.real, tau.imag)
        gt = (a * t + b) / (c * t + d)
        upper = poly_action_list(_integral_poly_mp(k, w, gt, Q), gamma)
        lower = _integral_poly_mp(k, v, t, Q)
        coeffs = np.array([complex(x - y) for x, y in zip(upper, lower)])
    return CocycleValue(HomogeneousPoly(k - 2, coeffs), "oracle")


# -- coboundary data ---------------------------------------------------------


def _a_xi(k: int, v: CuspVector) -> float:
    if v.a != 0:
        return 0.0
    sign = (-1) ** (k - 1 + (k + 1) // 2)
    return sign * math.factorial(k - 2) / (2 * math.pi) ** (k - 2) * clausen(k - 1, 2 * math.pi * v.b / v.N)


def _a_g(k: int, v: CuspVector) -> float:
    N = v.N
    trig = math.cos if k % 2 == 0 else math.sin
    total = sum(_a_xi(k, u) * trig(2 * math.pi * pairing(u, v) / N) for u in CuspVector.all(N))
    return (-1) ** (k // 2) * (2 * math.pi) ** k / (N * N * math.factorial(k - 1)) * total


def coboundary_data(k: int, v: CuspVector) -> CoboundaryData:
    """A and P = A Y^(k-2) for both xi_k^v and G_k^v."""
    if k < 3:
        raise ValueError("coboundary data needs k >= 3")
    return CoboundaryData(k, v, _a_xi(k, v), _a_g(k, v))


def g_cocycle(k: int, v: CuspVector, gamma: GroupElement) -> HomogeneousPoly:
    """C for G_k^v = (1/N^2) sum_u mu^{-(u|v)} H_k^u, from the xi cocycles."""
    N = v.N
    scale = TWO_PI_I**k / (N * N * math.factorial(k - 1))
    total = HomogeneousPoly(k - 2)
    for u in CuspVector.all(N):
        if k == 2 and u.is_zero():
            continue
        phase = cmath.exp(-2j * math.pi * pairing(u, v) / N)
        total = total + cocycle_gamma(k, u, gamma).poly * phase
    return total * scale
