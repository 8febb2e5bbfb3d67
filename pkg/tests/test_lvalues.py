import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eisprim.lvalues import (
    LValueQuery,
    l_from_lambda,
    lambda_closed,
    lambda_closed_xi,
    lambda_from_l,
    lambda_numeric,
    lambda_numeric_xi,
    xi_scale,
)
from eisprim.modular import CuspVector, S
from eisprim.numerics import bernoulli_poly, clausen

ZETA3 = 1.2020569031595942


def q(k, a, b, N, l):
    return LValueQuery(k, CuspVector(a, b, N), l)


class TestClosedForm:
    def test_first_case(self):
        assert lambda_closed(q(4, 0, 0, 1, 3)) == pytest.approx(2j * math.pi / 3 * ZETA3, rel=1e-14)

    def test_third_case(self):
        expected = (2j * math.pi) ** 4 / 6 * float(bernoulli_poly(2, Fraction(1, 2))) ** 2 / 4
        assert lambda_closed(q(4, 1, 1, 2, 2)) == pytest.approx(expected, rel=1e-14)

    def test_first_case_odd(self):
        cl2 = sum(math.sin(2 * math.pi * n / 3) / n**2 for n in range(1, 400_001))
        expected = (2j * math.pi / 2) * 1j * (-1) ** 3 * cl2
        assert lambda_closed(q(3, 0, 1, 3, 2)) == pytest.approx(expected, abs=1e-9)

    def test_second_case(self):
        expected = -2j * math.pi / 3 * clausen(3, 2 * math.pi / 5)
        assert lambda_closed(q(4, 1, 0, 5, 1)) == pytest.approx(expected)

    def test_query_validation(self):
        with pytest.raises(ValueError):
            q(4, 0, 0, 1, 4)
        with pytest.raises(ValueError):
            q(4, 0, 0, 1, 0)
        with pytest.raises(ValueError):
            q(2, 0, 0, 3, 1)
        with pytest.raises(ValueError):
            q(1, 0, 1, 3, 1)

    def test_xi_rescaling(self):
        query = q(5, 1, 2, 3, 2)
        assert lambda_closed(query) == pytest.approx(xi_scale(5) * lambda_closed_xi(query), rel=1e-14)


class TestOracle:
    @pytest.mark.parametrize(
        "args",
        [(4, 0, 0, 1, 3), (4, 1, 1, 2, 2), (3, 0, 1, 3, 2), (4, 1, 0, 5, 1), (2, 1, 0, 2, 1), (2, 0, 1, 4, 1), (7, 2, 3, 6, 4)],
    )
    def test_examples(self, args):
        query = q(*args)
        assert abs(lambda_closed_xi(query) - lambda_numeric_xi(query)) < 1e-8

    @given(st.integers(3, 8), st.integers(1, 6), st.integers(0, 5), st.integers(0, 5), st.data())
    def test_functional_equation(self, k, N, a, b, data):
        l = data.draw(st.integers(1, k - 1))
        v = CuspVector(a, b, N)
        lhs = lambda_numeric_xi(LValueQuery(k, v, l))
        rhs = (-1) ** l * lambda_numeric_xi(LValueQuery(k, v.act(S), k - l))
        assert abs(lhs - rhs) < 1e-8

    @given(st.integers(2, 8), st.integers(2, 6), st.integers(0, 5), st.integers(1, 5), st.data())
    def test_parity(self, k, N, a, b, data):
        l = data.draw(st.integers(1, k - 1))
        v = CuspVector(a, b, N)
        if v.is_zero():
            return
        lhs = lambda_closed(LValueQuery(k, -v, l))
        assert lhs == pytest.approx((-1) ** k * lambda_closed(LValueQuery(k, v, l)), abs=1e-10)

    def test_h_and_xi_differ_by_scale(self):
        query = q(6, 2, 1, 4, 3)
        assert lambda_numeric(query) == pytest.approx(xi_scale(6) * lambda_numeric_xi(query), rel=1e-14)


class TestConversion:
    def test_l_equals_one(self):
        query = q(4, 0, 0, 1, 1)
        assert l_from_lambda(query, 2.0) == pytest.approx(2.0 * (-2j * math.pi))

    @given(st.integers(2, 8), st.integers(2, 6), st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False))
    def test_round_trip(self, k, N, z):
        query = LValueQuery(k, CuspVector(1, 0, N), 1)
        assert lambda_from_l(query, l_from_lambda(query, z)) == pytest.approx(z, rel=1e-14, abs=1e-14)

    def test_dirichlet_series_level_one(self):
        # xi_4 at level one has coefficients 2 sigma_3(n), so L(xi_4, s) = 2 zeta(s) zeta(s - 3);
        # the Dirichlet series diverges at s = 3, so the analytic continuation is the oracle
        query = q(4, 0, 0, 1, 3)
        L = l_from_lambda(query, lambda_closed_xi(query))
        ref = complex(2 * mpmath.zeta(3) * mpmath.zeta(0))
        assert abs(L - ref) < 1e-6
        # and the coefficients really are 2 sigma_3(n)
        from eisprim.eisenstein import EisensteinSpec, Kind, q_expansion

        coeffs = q_expansion(EisensteinSpec(Kind.XI, 4, CuspVector(0, 0, 1)), 12).coeffs
        for n in range(1, 13):
            assert coeffs[n] == pytest.approx(2 * sum(d**3 for d in range(1, n + 1) if n % d == 0))
