"""Completed L-values of the Eisenstein series H_k^v at integers 1 <= l < k."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .eisenstein import EisensteinSpec, Kind, q_expansion
from .modular import S, CuspVector
from .numerics import QExpansion, bernoulli_poly, choose_truncation, clausen, regulated_integral

__all__ = [
    "LValueQuery",
    "lambda_closed",
    "lambda_closed_xi",
    "lambda_numeric",
    "lambda_numeric_xi",
    "l_from_lambda",
    "lambda_from_l",
    "xi_scale",
]


def xi_scale(k: int) -> complex:
    """H_k = xi_scale(k) * xi_k, i.e. (2 pi i)^k / (k-1)!."""
    return (2j * math.pi) ** k / math.factorial(k - 1)


@dataclass(frozen=True)
class LValueQuery:
    k: int
    v: CuspVector
    l: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("weight must be >= 2")
        if not 1 <= self.l < self.k:
            raise ValueError(f"need 1 <= l < k, got l={self.l}, k={self.k}")
        if self.k == 2 and self.v.is_zero():
            raise ValueError("weight two needs v != (0,0)")

    @property
    def N(self) -> int:
        return self.v.N

    @property
    def kappa(self) -> int:
        return self.k % 2


def lambda_closed(q: LValueQuery) -> complex:
    """Lambda(H_k^v, l) in closed form (Clausen values and Bernoulli polynomials)."""
    return _three_cases(q)


def _three_cases(q: LValueQuery) -> complex:
    k, l, N = q.k, q.l, q.N
    a, b = q.v.a, q.v.b
    ik = 1j**q.kappa
    first = a == 0 and l == k - 1
    second = b == 0 and l == 1
    if first and second:
        # only possible for k = 2, v = (0,0), which the query already rejects
        raise ValueError("both boundary cases apply; the value diverges")
    if first:
        return 2j * math.pi / (k - 1) * ik * (-1) ** k * clausen(k - 1, 2 * math.pi * b / N)
    if second:
        return -2j * math.pi / (k - 1) * ik * clausen(k - 1, 2 * math.pi * a / N)
    ba = float(bernoulli_poly(k - l, _frac(a, N))) / (k - l)
    bb = float(bernoulli_poly(l, _frac(b, N))) / l
    return xi_scale(k) * (-1) ** l * ba * bb


def lambda_closed_xi(q: LValueQuery) -> complex:
    return lambda_closed(q) / xi_scale(q.k)


def _frac(x: int, N: int):
    from fractions import Fraction

    return Fraction(x, N)


def _xi(k: int, v: CuspVector, Q: int) -> QExpansion:
    return q_expansion(EisensteinSpec(Kind.XI, k, v), Q)


def lambda_numeric_xi(q: LValueQuery, Q: int | None = None) -> complex:
    """Lambda(xi_k^v, l) from the regulated integral between the cusps 0 and i*infinity.

    The path is cut at tau = i.  The upper half is a regulated integral of
    the q-expansion of xi_k^v with weight tau^(l-1).  The lower half is
    pulled back by tau = -1/z, using xi_k^v(Sz) = z^k xi_k^{vS}(z), which
    turns it into (-1)^l times a regulated integral of xi_k^{vS} with weight
    z^(k-l-1).
    """
    k, l, v = q.k, q.l, q.v
    if Q is None:
        Q = max(200, choose_truncation(1j, v.N, k, 1e-20))
    upper = regulated_integral(_xi(k, v, Q), l - 1, 1j)
    lower = regulated_integral(_xi(k, v.act(S), Q), k - l - 1, 1j)
    return upper + (-1) ** l * lower


def lambda_numeric(q: LValueQuery, Q: int | None = None) -> complex:
    """Lambda(H_k^v, l) by numerical regulated integration."""
    return xi_scale(q.k) * lambda_numeric_xi(q, Q)


def l_from_lambda(q: LValueQuery, value: complex) -> complex:
    """L(f, l) = Lambda(f, l) (-2 pi i)^l / (N^l (l-1)!)."""
    return value * (-2j * math.pi) ** q.l / (q.N**q.l * math.factorial(q.l - 1))


def lambda_from_l(q: LValueQuery, value: complex) -> complex:
    return value * q.N**q.l * math.factorial(q.l - 1) / (-2j * math.pi) ** q.l
