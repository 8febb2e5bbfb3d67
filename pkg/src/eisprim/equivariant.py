"""Real-analytic equivariant primitives of Eisenstein series.

For k >= 3 the primitive is the polynomial-valued function

    cG_k^v(tau) = P_G + Re int_{1_inf}^tau 2 pi i G_k^v(z) (X - zY)^(k-2) dz,

available from regulated integration (``primitive_integral``) and from
non-holomorphic lattice sums (``primitive_latticesum``).  In weight two the
scalar primitive of g_2^v = G_2^v - G_2^{v0} is ``primitive_weight2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import digamma

from .cocycles import MP_THRESHOLD, coboundary_data
from .eisenstein import (
    EisensteinSpec,
    Kind,
    NonHolSpec,
    nonhol_family,
    nonhol_lattice,
    q_coefficients_mp,
    q_expansion,
)
from .modular import CuspVector, HomogeneousPoly
from .numerics import choose_truncation, regulated_integrals, regulated_integrals_mp

__all__ = [
    "PrimitiveValue",
    "primitive_integral",
    "primitive_latticesum",
    "primitive_weight2",
    "moebius_mp",
    "g00",
    "g00_lattice",
    "weight2_box_offset",
    "to_tau_basis",
    "from_tau_basis",
    "tau_basis_matrix",
]

V0_DEFAULT = (0, 1)


@dataclass(frozen=True)
class PrimitiveValue:
    value: HomogeneousPoly | float
    tau: complex
    method: str  # "integral" or "latticesum"
    error: float

    def __post_init__(self):
        if self.method not in ("integral", "latticesum"):
            raise ValueError(f"unknown method {self.method!r}")
        if not isinstance(self.value, HomogeneousPoly) and not isinstance(self.value, float):
            raise TypeError("value must be a HomogeneousPoly or a real float")


def _truncation(tau: complex, N: int, k: int, dps: int) -> int:
    tol = 1e-20 if not dps else 10.0 ** (-dps)
    return max(200, choose_truncation(tau, N, k + 1, tol))


def _regulated(spec: EisensteinSpec, tau: complex, pmax: int, Q: int | None, dps: int | None) -> np.ndarray:
    """Regulated integrals p = 0..pmax of the q-expansion of ``spec``, in double or mpmath.

    An ``mpmath.mpc`` tau is kept at full precision on the mpmath path; near
    the real axis a rounded Moebius image would otherwise dominate the error.
    """
    exact = tau if isinstance(tau, mpmath.mpc) else None
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    if dps is None:
        dps = 0 if tau.imag >= MP_THRESHOLD else 40
    if Q is None:
        Q = _truncation(tau, spec.N, max(spec.k, 2), dps)
    if not dps:
        return regulated_integrals(q_expansion(spec, Q), tau, pmax)
    with mpmath.workdps(dps):
        coeffs = q_coefficients_mp(spec, Q)
        t = mpmath.mpc(exact) if exact is not None else mpmath.mpc(tau.real, tau.imag)
        reg = regulated_integrals_mp(coeffs, spec.N, t, pmax)
        return np.array([complex(x) for x in reg])


def primitive_integral(
    k: int, v: CuspVector, tau: complex, Q: int | None = None, dps: int | None = None
) -> PrimitiveValue:
    """P_G - Re I_G(tau), with I_G(tau) = int_tau^{1_inf} 2 pi i G_k^v(z) (X - zY)^(k-2) dz.

    tau may be an ``mpmath.mpc`` (see :func:`moebius_mp`).
    """
    if k < 3:
        raise ValueError("use primitive_weight2 for k = 2")
    reg = _regulated(EisensteinSpec(Kind.G, k, v), tau, k - 2, Q, dps)
    integral = np.array([2j * math.pi * math.comb(k - 2, j) * (-1) ** j * reg[j] for j in range(k - 1)])
    coeffs = coboundary_data(k, v).P_G.coeffs - integral.real
    err = 1e-13 * max(1.0, float(np.max(np.abs(integral))))
    return PrimitiveValue(HomogeneousPoly(k - 2, coeffs.astype(complex)), complex(tau), "integral", err)


def moebius_mp(g, tau, dps: int = 40) -> mpmath.mpc:
    """gamma tau at ``dps`` digits, for feeding points close to the real axis."""
    with mpmath.workdps(dps):
        t = mpmath.mpc(complex(tau).real, complex(tau).imag)
        return (g.a * t + g.b) / (g.c * t + g.d)


# -- tau basis -------------------------------------------------------------------


def _expand(roots: list[complex], degree: int) -> np.ndarray:
    # coefficients of prod (X - t Y) over roots, in the X^(deg-j) Y^j basis
    poly = np.zeros(degree + 1, dtype=complex)
    poly[0] = 1.0
    for t in roots:
        shifted = np.zeros_like(poly)
        shifted[1:] = poly[:-1]
        poly = poly - t * shifted
    return poly


def tau_basis_matrix(tau: complex, degree: int) -> np.ndarray:
    """Column r holds (X - tau Y)^r (X - conj(tau) Y)^(degree-r) in the XY basis."""
    tau = complex(tau)
    cols = [_expand([tau] * r + [tau.conjugate()] * (degree - r), degree) for r in range(degree + 1)]
    return np.array(cols).T


def to_tau_basis(P: HomogeneousPoly, tau: complex) -> np.ndarray:
    """Coefficients f_r of P = sum_r f_r (X - tau Y)^r (X - conj(tau) Y)^(d-r)."""
    tau = complex(tau)
    if tau.imag == 0:
        raise ValueError("tau must not be real: the basis degenerates")
    return np.linalg.solve(tau_basis_matrix(tau, P.degree), P.to_complex().coeffs)


def from_tau_basis(f: np.ndarray, tau: complex) -> HomogeneousPoly:
    f = np.asarray(f, dtype=complex)
    degree = len(f) - 1
    return HomogeneousPoly(degree, tau_basis_matrix(tau, degree) @ f)


def primitive_latticesum(k: int, v: CuspVector, tau: complex, M: int = 500) -> PrimitiveValue:
    """-(2 pi/(k-1)) sum_{r+s=k-2} G_{r,s}^v(tau) (X - tau Y)^r (X - conj(tau) Y)^s."""
    if k < 3:
        raise ValueError("the lattice representation needs k >= 3")
    if M < 10:
        raise ValueError("lattice radius must be >= 10")
    tau = complex(tau)
    family = nonhol_family(k, v, tau, M)
    f = -2 * math.pi / (k - 1) * family
    poly = from_tau_basis(f, tau)
    # truncation error of each coefficient, through the basis change
    _, err_one = nonhol_lattice(NonHolSpec(k - 2, 0, v), tau, M)
    basis = np.abs(tau_basis_matrix(tau, k - 2)).sum(axis=1).max()
    err = 2 * math.pi / (k - 1) * err_one * basis * (k - 1)
    return PrimitiveValue(poly, tau, "latticesum", float(err))


# -- weight two ----------------------------------------------------------------


def _v0(v: CuspVector, v0: CuspVector | None) -> CuspVector:
    return CuspVector(*V0_DEFAULT, v.N) if v0 is None else v0


def primitive_weight2(
    v: CuspVector,
    tau: complex,
    Q: int | None = None,
    v0: CuspVector | None = None,
    dps: int | None = None,
) -> PrimitiveValue:
    """cG_2^v(tau) = Re int_{1_inf}^tau 2 pi i g_2^v(z) dz, a real scalar."""
    v0 = _v0(v, v0)
    if v == v0:
        raise ValueError("v must differ from the reference vector v0")
    reg = _regulated(EisensteinSpec(Kind.G2_DIFF, 2, v, v0), tau, 0, Q, dps)
    value = -(2j * math.pi * reg[0]).real
    return PrimitiveValue(float(value), complex(tau), "integral", 1e-13 * max(1.0, abs(value)))


def g00(v: CuspVector, tau: complex, v0: CuspVector | None = None) -> float:
    """g_{0,0}^v from the integral representation, -cG_2^v / (2 pi)."""
    return -primitive_weight2(v, tau, v0=v0).value / (2 * math.pi)


def g00_lattice(v: CuspVector, tau: complex, M: int = 2000, v0: CuspVector | None = None) -> tuple[float, float]:
    """g_{0,0}^v from the box-truncated coset difference; returns (value, error)."""
    value, err = nonhol_lattice(NonHolSpec(0, 0, v, _v0(v, v0)), tau, M)
    return float(value.real), err


def _row_constant(c: int, N: int) -> float:
    # sum over m != 0, m = c mod N, of 1/|m|, minus its (2/N) log M divergence
    lo = c % N or N
    hi = (-c) % N or N
    return -(digamma(lo / N) + digamma(hi / N)) / N


def weight2_box_offset(v: CuspVector, v0: CuspVector | None = None) -> float:
    """Limit of g00_lattice - g00 (box sum minus integral representation).

    Each row m != 0 of the box sum tends to pi/(N |m|) for large Im tau, so
    the two cosets differ by (pi/N) sum_m (chi_c(m) - chi_c0(m))/|m|, a
    conditionally convergent sum whose symmetric limit is nonzero unless
    c = c0 mod N.  The integral representation has no such term.
    """
    v0 = _v0(v, v0)
    N = v.N
    return math.pi / N * (_row_constant(v.a, N) - _row_constant(v0.a, N))
