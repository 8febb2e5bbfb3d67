import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eisprim.cocycles import (
    CocycleValue,
    ExactCochain,
    coboundary_data,
    cocycle_gamma,
    cocycle_gamma_exact,
    cocycle_oracle,
    cocycle_S,
    cocycle_T,
    g_cocycle,
)
from eisprim.lvalues import LValueQuery, lambda_closed_xi
from eisprim.modular import (
    IDENTITY,
    NEG,
    S,
    T,
    T_INV,
    CuspVector,
    GroupElement,
    HomogeneousPoly,
    decompose,
    pairing,
    random_gamma_n,
    random_sl2,
)
from eisprim.numerics import clausen

ZETA3 = 1.2020569031595942


def close(P, Q, tol):
    return np.max(np.abs(P.to_complex().coeffs - Q.to_complex().coeffs)) < tol


def y_power(k):
    return HomogeneousPoly.monomial(k - 2, k - 2)


class TestGenerators:
    def test_t_example(self):
        expected = HomogeneousPoly(2, np.array([3, 3, 1]) * (2j * math.pi / 3) * (-1 / 120))
        assert close(cocycle_T(4, CuspVector(0, 0, 1)).poly, expected, 1e-15)

    def test_t_vanishes_with_bernoulli(self):
        # B_3(1/2) = 0
        P = cocycle_T(3, CuspVector(1, 0, 2)).poly
        assert P.norm() == 0

    def test_s_level_one(self):
        # C(S) = -2 pi i sum_l C(2,l) X^(2-l) (-Y)^l Lambda(xi_4, l+1)
        lam = [lambda_closed_xi(LValueQuery(4, CuspVector(0, 0, 1), l)) for l in (1, 2, 3)]
        expected = HomogeneousPoly(2, [-2j * math.pi * math.comb(2, l) * (-1) ** l * lam[l] for l in range(3)])
        assert close(cocycle_S(4, CuspVector(0, 0, 1)).poly, expected, 1e-14)

    @pytest.mark.parametrize("token,fn", [(T, cocycle_T), (S, cocycle_S)])
    @pytest.mark.parametrize("k,N,v", [(3, 2, (1, 0)), (4, 1, (0, 0)), (5, 3, (1, 2)), (2, 3, (0, 1)), (6, 4, (2, 3))])
    def test_oracle(self, token, fn, k, N, v):
        v = CuspVector(*v, N)
        assert close(fn(k, v).poly, cocycle_oracle(k, v, token).poly, 1e-9)

    def test_tau_independence(self):
        v = CuspVector(1, 1, 3)
        g = GroupElement(2, 1, 1, 1)
        a = cocycle_oracle(5, v, g, tau=1j).poly
        b = cocycle_oracle(5, v, g, tau=0.5 + 2j).poly
        assert close(a, b, 1e-9)

    def test_provenance(self):
        with pytest.raises(ValueError):
            CocycleValue(HomogeneousPoly(2), "guess")


class TestFolding:
    def test_identity(self):
        assert cocycle_gamma(4, CuspVector(0, 1, 2), IDENTITY).poly.norm() == 0

    def test_t_tinv(self):
        v = CuspVector(1, 2, 3)
        P = cocycle_gamma_exact(5, v, IDENTITY, word=["T", "Tinv"])
        assert P == ExactCochain.zero(3)

    def test_minus_identity(self):
        for k in (3, 4, 5):
            assert cocycle_gamma(k, CuspVector(1, 1, 3), NEG).poly.norm() < 1e-15
            # also through a word: S^2 = -1
            assert cocycle_gamma(k, CuspVector(1, 1, 3), NEG, word=["S", "S"]).poly.norm() < 1e-12

    def test_word_mismatch(self):
        with pytest.raises(ValueError):
            cocycle_gamma_exact(4, CuspVector(0, 0, 1), S, word=["T"])

    def test_order_insensitive(self):
        # (ST)^3 = -1 inserted into a word gives a second decomposition
        g = GroupElement(5, 2, 2, 1)
        w1 = decompose(g)
        w2 = ["S", "T", "S", "T", "S", "T", "NEG"] + w1
        for k, v in [(4, CuspVector(1, 0, 2)), (5, CuspVector(2, 1, 3))]:
            assert cocycle_gamma_exact(k, v, g, w1) == cocycle_gamma_exact(k, v, g, w2)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 6), st.integers(1, 4), st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**31))
    def test_extended_identity_exact(self, k, N, a, b, seed):
        v = CuspVector(a, b, N)
        if k == 2 and (v.is_zero() or N == 1):
            return
        rng = np.random.default_rng(seed)
        alpha, beta = random_sl2(rng, 20), random_sl2(rng, 20)
        lhs = cocycle_gamma_exact(k, v, alpha @ beta)
        rhs = (cocycle_gamma_exact(k, v.act(beta.inverse()), alpha) | beta) + cocycle_gamma_exact(k, v, beta)
        assert lhs == rhs

    def test_gamma_n_cocycle(self, rng):
        N, k, v = 3, 4, CuspVector(1, 2, 3)
        for _ in range(5):
            alpha, beta = random_gamma_n(rng, N, 60), random_gamma_n(rng, N, 60)
            lhs = cocycle_gamma_exact(k, v, alpha @ beta)
            rhs = (cocycle_gamma_exact(k, v, alpha) | beta) + cocycle_gamma_exact(k, v, beta)
            assert lhs == rhs

    def test_random_gamma_vs_oracle(self, rng):
        for N, k in [(2, 3), (3, 4), (4, 5)]:
            v = CuspVector(int(rng.integers(N)), 1, N)
            g = random_gamma_n(rng, N, 40)
            assert close(cocycle_gamma(k, v, g).poly, cocycle_oracle(k, v, g).poly, 1e-7)

    @given(st.integers(2, 7), st.integers(2, 5), st.integers(0, 4), st.integers(0, 4), st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_parity(self, k, N, a, b, seed):
        v = CuspVector(a, b, N)
        if v.is_zero():
            return
        g = random_sl2(np.random.default_rng(seed), 30)
        lhs = cocycle_gamma_exact(k, -v, g)
        rhs = cocycle_gamma_exact(k, v, g)
        # compare exactly: same symbols, rational polynomials equal up to (-1)^k
        sign = (-1) ** k
        assert lhs == ExactCochain(k - 2, {s: p * sign for s, p in rhs.terms.items()})


class TestCoboundary:
    def test_level_one_constant(self):
        assert coboundary_data(4, CuspVector(0, 0, 1)).A_xi == pytest.approx(-2 * ZETA3 / (2 * math.pi) ** 2)

    def test_a_nonzero(self):
        assert coboundary_data(5, CuspVector(1, 2, 3)).A_xi == 0

    def test_polynomial(self):
        d = coboundary_data(4, CuspVector(0, 1, 3))
        assert d.P_xi.coeffs[-1] == d.A_xi and np.all(d.P_xi.coeffs[:-1] == 0)

    def test_rejects_weight_two(self):
        with pytest.raises(ValueError):
            coboundary_data(2, CuspVector(0, 1, 3))

    @pytest.mark.parametrize("k", [3, 4, 5, 6])
    def test_a_g_direct_sum(self, k):
        N = 3
        for v in CuspVector.all(N):
            total = 0.0
            for u in CuspVector.all(N):
                if u.a:
                    continue
                A = (-1) ** (k - 1 + math.ceil(k / 2)) * math.factorial(k - 2) / (2 * math.pi) ** (k - 2)
                A *= clausen(k - 1, 2 * math.pi * u.b / N)
                angle = 2 * math.pi * pairing(u, v) / N
                total += A * (math.cos(angle) if k % 2 == 0 else math.sin(angle))
            expected = (-1) ** (k // 2) * (2 * math.pi) ** k / (N * N * math.factorial(k - 1)) * total
            assert coboundary_data(k, v).A_G == pytest.approx(expected, abs=1e-14)

    def test_real_part_of_s(self):
        for k, v in [(4, CuspVector(0, 0, 1)), (5, CuspVector(0, 1, 3)), (6, CuspVector(1, 0, 4))]:
            C = cocycle_S(k, v).poly
            A_prev = coboundary_data(k, v.act(S.inverse())).A_xi
            A = coboundary_data(k, v).A_xi
            expected = HomogeneousPoly.monomial(k - 2, 0) * A_prev - y_power(k) * A
            assert close(C.real, expected, 1e-12)

    def test_real_part_law(self, rng):
        for _ in range(10):
            N = int(rng.integers(1, 5))
            k = int(rng.integers(3, 7))
            v = CuspVector(int(rng.integers(N)), int(rng.integers(N)), N)
            g = random_sl2(rng, 50)
            C = cocycle_gamma(k, v, g).poly
            P = coboundary_data(k, v.act(g.inverse())).P_xi | g
            assert close(C.real, P - coboundary_data(k, v).P_xi, 1e-9)

    def test_coboundary_on_gamma_n(self, rng):
        N, k, v = 3, 5, CuspVector(0, 1, 3)
        A = coboundary_data(k, v).A_xi
        for _ in range(5):
            g = random_gamma_n(rng, N, 60)
            expected = ((y_power(k) | g) - y_power(k)) * A
            assert close(cocycle_gamma(k, v, g).poly.real, expected, 1e-9)

    def test_g_cocycle_real_part(self, rng):
        N, k = 3, 4
        for v in [CuspVector(1, 0, N), CuspVector(0, 1, N), CuspVector(2, 1, N)]:
            P = coboundary_data(k, v).P_G
            for _ in range(3):
                g = random_gamma_n(rng, N, 40)
                assert close(g_cocycle(k, v, g).real, (P | g) - P, 1e-8)
