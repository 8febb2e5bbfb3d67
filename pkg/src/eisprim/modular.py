"""SL2(Z) elements, residue vectors mod N and the polynomial module V_{k-2}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from numbers import Rational
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "GroupElement",
    "IDENTITY",
    "S",
    "T",
    "T_INV",
    "NEG",
    "TOKENS",
    "CuspVector",
    "HomogeneousPoly",
    "moebius",
    "slash_weight_k",
    "pairing",
    "act_vector",
    "decompose",
    "word_product",
    "poly_action",
    "poly_action_list",
    "coboundary",
    "random_sl2",
    "random_gamma_n",
]


@dataclass(frozen=True)
class GroupElement:
    """Integer matrix (a b; c d) with determinant one."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)):
                raise TypeError(f"entry {name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.entries} is not 1")

    @classmethod
    def parse(cls, text: str) -> "GroupElement":
        """Parse ``"a,b;c,d"``."""
        rows = text.replace(" ", "").split(";")
        if len(rows) != 2:
            raise ValueError(f"expected 'a,b;c,d', got {text!r}")
        (a, b), (c, d) = (tuple(int(x) for x in row.split(",")) for row in rows)
        return cls(a, b, c, d)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def __pow__(self, n: int) -> "GroupElement":
        base = self if n >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(n)):
            out = out @ base
        return out

    def in_gamma(self, N: int) -> bool:
        """Membership in the principal congruence subgroup of level N."""
        return (self.a - 1) % N == 0 and self.b % N == 0 and self.c % N == 0 and (self.d - 1) % N == 0

    def max_entry(self) -> int:
        return max(abs(x) for x in self.entries)

    def __str__(self):
        return f"{self.a},{self.b};{self.c},{self.d}"


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)
T_INV = GroupElement(1, -1, 0, 1)
NEG = GroupElement(-1, 0, 0, -1)
TOKENS = {"S": S, "T": T, "Tinv": T_INV, "NEG": NEG}


def moebius(g: GroupElement, tau: complex) -> complex:
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    return (g.a * tau + g.b) / (g.c * tau + g.d)


def slash_weight_k(f: Callable[[complex], complex], g: GroupElement, k: int, tau: complex) -> complex:
    """(f[g]_k)(tau) = (c tau + d)^-k f(g tau)."""
    return (g.c * complex(tau) + g.d) ** (-k) * f(moebius(g, tau))


# -- residue vectors -------------------------------------------------------


@dataclass(frozen=True)
class CuspVector:
    """Row vector (a, b) in (Z/NZ)^2 with representatives in 0..N-1."""

    a: int
    b: int
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("level must be positive")
        object.__setattr__(self, "a", int(self.a) % self.N)
        object.__setattr__(self, "b", int(self.b) % self.N)

    @classmethod
    def parse(cls, text: str, N: int) -> "CuspVector":
        a, b = (int(x) for x in text.replace(" ", "").split(","))
        return cls(a, b, N)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __neg__(self) -> "CuspVector":
        return CuspVector(-self.a, -self.b, self.N)

    def act(self, g: GroupElement) -> "CuspVector":
        return act_vector(self, g)

    def __iter__(self):
        return iter((self.a, self.b))

    def __str__(self):
        return f"({self.a},{self.b})"

    @staticmethod
    def all(N: int) -> list["CuspVector"]:
        return [CuspVector(a, b, N) for a in range(N) for b in range(N)]


def pairing(u: CuspVector, v: CuspVector) -> int:
    """Symplectic pairing (u|v) = m d - n c mod N for u = (m, n), v = (c, d)."""
    if u.N != v.N:
        raise ValueError(f"level mismatch: {u.N} vs {v.N}")
    return (u.a * v.b - u.b * v.a) % u.N


def act_vector(v: CuspVector, g: GroupElement) -> CuspVector:
    """Right action v g of a matrix on a row vector, reduced mod N."""
    return CuspVector(v.a * g.a + v.b * g.c, v.a * g.b + v.b * g.d, v.N)


# -- words in S, T ---------------------------------------------------------


def decompose(g: GroupElement) -> list[str]:
    """Write g as a product of the tokens S, T, Tinv, NEG.

    Euclid on the first column: strip a power of T so that 0 <= a < |c|,
    then peel off an S; repeat until the matrix is upper triangular.
    """
    word: list[str] = []
    a, b, c, d = g.entries
    while c != 0:
        q = a // c
        # g = T^q g', g' = (a - qc, b - qd; c, d)
        word.extend(["T"] * q if q >= 0 else ["Tinv"] * (-q))
        a, b = a - q * c, b - q * d
        # g' = S g'', g'' = S^-1 g' = (c, d; -a, -b)
        word.append("S")
        a, b, c, d = c, d, -a, -b
    if a == -1:
        word.append("NEG")
        b = -b
    word.extend(["T"] * b if b >= 0 else ["Tinv"] * (-b))
    return word


def word_product(word: Iterable[str]) -> GroupElement:
    out = IDENTITY
    for token in word:
        out = out @ TOKENS[token]
    return out


# -- homogeneous polynomials -------------------------------------------------


@lru_cache(maxsize=4096)
def _action_matrix(entries: tuple[int, int, int, int], degree: int) -> tuple[tuple[int, ...], ...]:
    # column j holds the coefficients of (aX + bY)^(deg-j) (cX + dY)^j
    a, b, c, d = entries
    cols = []
    for j in range(degree + 1):
        first = [math.comb(degree - j, i) * a ** (degree - j - i) * b**i for i in range(degree - j + 1)]
        second = [math.comb(j, i) * c ** (j - i) * d**i for i in range(j + 1)]
        prod = [0] * (degree + 1)
        for i, x in enumerate(first):
            if x:
                for l, y in enumerate(second):
                    prod[i + l] += x * y
        cols.append(tuple(prod))
    return tuple(tuple(cols[j][i] for j in range(degree + 1)) for i in range(degree + 1))


class HomogeneousPoly:
    """Homogeneous polynomial sum_j c_j X^(deg-j) Y^j.

    Coefficients are kept in a numpy array; integer or ``Fraction`` inputs
    stay in an object array so that the group action is exact.
    """

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: Sequence | np.ndarray | None = None):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        if coeffs is None:
            coeffs = np.zeros(degree + 1, dtype=complex)
        arr = np.asarray(coeffs)
        if arr.dtype.kind in "iu" or arr.dtype == object:
            arr = np.array(list(coeffs), dtype=object)
        elif arr.dtype.kind != "c":
            arr = arr.astype(complex)
        if arr.shape != (degree + 1,):
            raise ValueError(f"expected {degree + 1} coefficients, got shape {arr.shape}")
        self.degree = int(degree)
        self.coeffs = arr

    @classmethod
    def monomial(cls, degree: int, j: int) -> "HomogeneousPoly":
        """X^(degree-j) Y^j with integer coefficient."""
        c = [0] * (degree + 1)
        c[j] = 1
        return cls(degree, c)

    @classmethod
    def zero(cls, degree: int) -> "HomogeneousPoly":
        return cls(degree, [0] * (degree + 1))

    @property
    def is_exact(self) -> bool:
        return self.coeffs.dtype == object

    def to_complex(self) -> "HomogeneousPoly":
        return HomogeneousPoly(self.degree, np.array([complex(x) for x in self.coeffs]))

    def _other(self, other):
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        return other

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return HomogeneousPoly(self.degree, _combine(self.coeffs, other.coeffs, 1))

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return HomogeneousPoly(self.degree, _combine(self.coeffs, other.coeffs, -1))

    def __neg__(self):
        return HomogeneousPoly(self.degree, -self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, HomogeneousPoly):
            return NotImplemented
        if self.is_exact and isinstance(scalar, (Rational, np.integer)):
            return HomogeneousPoly(self.degree, np.array([x * scalar for x in self.coeffs], dtype=object))
        return HomogeneousPoly(self.degree, self.to_complex().coeffs * complex(scalar))

    __rmul__ = __mul__

    def __or__(self, g: GroupElement) -> "HomogeneousPoly":
        return poly_action(self, g)

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPoly) or other.degree != self.degree:
            return NotImplemented
        return all(x == y for x, y in zip(self.coeffs, other.coeffs))

    __hash__ = None

    @property
    def real(self) -> "HomogeneousPoly":
        return HomogeneousPoly(self.degree, self.to_complex().coeffs.real.astype(complex))

    @property
    def imag(self) -> "HomogeneousPoly":
        return HomogeneousPoly(self.degree, self.to_complex().coeffs.imag.astype(complex))

    def conj(self) -> "HomogeneousPoly":
        return HomogeneousPoly(self.degree, np.conj(self.to_complex().coeffs))

    def norm(self) -> float:
        return float(np.max(np.abs(self.to_complex().coeffs))) if self.degree >= 0 else 0.0

    def __call__(self, X, Y):
        return sum(c * X ** (self.degree - j) * Y**j for j, c in enumerate(self.coeffs))

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "*".join(
                t for t in (_pow("X", self.degree - j), _pow("Y", j)) if t
            )
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return f"HomogeneousPoly[{self.degree}](" + (" + ".join(terms) or "0") + ")"


def _pow(var: str, e: int) -> str:
    return "" if e == 0 else var if e == 1 else f"{var}^{e}"


def _combine(x: np.ndarray, y: np.ndarray, sign: int) -> np.ndarray:
    if x.dtype == object and y.dtype == object:
        return np.array([p + sign * q for p, q in zip(x, y)], dtype=object)
    x = x.astype(complex) if x.dtype == object else x
    y = y.astype(complex) if y.dtype == object else y
    return x + sign * y


def poly_action(P: HomogeneousPoly, g: GroupElement) -> HomogeneousPoly:
    """P|g (X, Y) = P(aX + bY, cX + dY); a right action."""
    M = _action_matrix(g.entries, P.degree)
    if P.is_exact:
        coeffs = [sum(M[i][j] * P.coeffs[j] for j in range(P.degree + 1)) for i in range(P.degree + 1)]
        return HomogeneousPoly(P.degree, np.array(coeffs, dtype=object))
    return HomogeneousPoly(P.degree, np.array(M, dtype=float) @ P.coeffs)


def poly_action_list(coeffs: Sequence, g: GroupElement) -> list:
    """The action P|g on a plain coefficient list (e.g. of mpmath numbers)."""
    M = _action_matrix(g.entries, len(coeffs) - 1)
    n = len(coeffs)
    return [sum(M[i][j] * coeffs[j] for j in range(n)) for i in range(n)]


def coboundary(P: HomogeneousPoly, g: GroupElement) -> HomogeneousPoly:
    """(delta P)(g) = P|g - P."""
    return poly_action(P, g) - P


# -- random sampling used by the verification suites -------------------------


def random_sl2(rng: np.random.Generator, max_entry: int, max_len: int = 40) -> GroupElement:
    """Random element from a word in S, T^{+-1} with entries bounded by max_entry."""
    while True:
        g = IDENTITY
        length = int(rng.integers(1, max_len + 1))
        for _ in range(length):
            step = (S, T, T_INV, T, T_INV)[int(rng.integers(0, 5))]
            h = g @ step
            if h.max_entry() > max_entry:
                break
            g = h
        if rng.random() < 0.5:
            g = -g
        if g != IDENTITY:
            return g


def random_gamma_n(rng: np.random.Generator, N: int, max_entry: int, require_lower: bool = True) -> GroupElement:
    """Random non-trivial element of Gamma(N) with entries bounded by max_entry.

    Conjugates of T^N by random SL2(Z) words, multiplied together; with
    ``require_lower`` the result has a nonzero lower-left entry.
    """
    TN = T**N
    for _ in range(10_000):
        g = IDENTITY
        for _ in range(int(rng.integers(1, 4))):
            h = random_sl2(rng, max(3, int(math.isqrt(max_entry))), max_len=6)
            e = int(rng.choice([-1, 1]))
            g = g @ h @ (TN if e > 0 else TN.inverse()) @ h.inverse()
        if g.max_entry() <= max_entry and g != IDENTITY and (g.c != 0 or not require_lower):
            return g
    raise RuntimeError("failed to sample an element of Gamma(N) within the entry bound")
