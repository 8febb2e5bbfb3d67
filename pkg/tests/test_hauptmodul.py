import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from eisprim.eisenstein import EisensteinSpec, Kind, q_expansion
from eisprim.hauptmodul import (
    SUPPORTED_LEVELS,
    build_hauptmodul,
    construction_a,
    construction_b,
    construction_rr,
    cusp_representatives,
    cusp_value,
    log_prefactor,
    moebius_defect,
    verify_log_formula,
)
from eisprim.modular import CuspVector


def exact_level_two(Q):
    # independent of the package: lambda = 16 q2 prod((1 + q^n)/(1 + q^(n - 1/2)))^8 is
    # awkward, so use theta series directly in q2 = q^(1/2): theta_2^4 and theta_3^4
    theta2 = [0] * (Q + 1)  # theta_2 / (2 q^(1/8)) = sum q^(n(n+1)/2) = sum q2^(n(n+1))
    theta3 = [0] * (Q + 1)  # sum over n in Z of q2^(n^2)
    n = 0
    while n * (n + 1) <= Q:
        theta2[n * (n + 1)] += 1
        n += 1
    for n in range(-Q, Q + 1):
        if n * n <= Q:
            theta3[n * n] += 1

    def mul(a, b):
        out = [0] * (Q + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(Q + 1 - i):
                    out[i + j] += x * b[j]
        return out

    t2 = mul(mul(theta2, theta2), mul(theta2, theta2))
    t3 = mul(mul(theta3, theta3), mul(theta3, theta3))
    # lambda = 16 q2 t2 / t3 and x = lambda / (16 (1 - lambda)) = q2 t2 / (t3 - 16 q2 t2)
    num = [0] + t2[:Q]
    den = [a - 16 * b for a, b in zip(t3, num)]
    inv = [Fraction(0)] * (Q + 1)
    inv[0] = Fraction(1, den[0])
    for k in range(1, Q + 1):
        inv[k] = -sum(den[j] * inv[k - j] for j in range(1, k + 1)) / den[0]
    return [sum(num[j] * inv[k - j] for j in range(k + 1)) for k in range(Q + 1)]


class TestConstructions:
    @pytest.mark.parametrize("N", SUPPORTED_LEVELS)
    def test_normalization(self, N):
        h = build_hauptmodul(N)
        assert abs(h.coeffs[0]) < 1e-30
        assert abs(h.coeffs[1] - 1) < 1e-30

    def test_theta_series_oracle(self):
        assert list(construction_b(40)) == exact_level_two(40)

    def test_a_matches_b(self):
        a = construction_a(2, 50)
        b = construction_b(50)
        for x, y in zip(a, b):
            assert abs(complex(x) - float(y)) <= 1e-10 * max(1, abs(float(y)))
            assert abs(x - mpmath.mpf(y.numerator) / y.denominator) < mpmath.mpf(10) ** -20 * max(1, abs(float(y)))

    @pytest.mark.parametrize("N", [2, 3, 4, 5])
    def test_residue(self, N):
        # a_0(g_2^{v_inf}) = -pi^2/(N^2 sin^2(pi/N))
        a0 = q_expansion(EisensteinSpec(Kind.G2_DIFF, 2, CuspVector(1, 0, N)), 3).coeffs[0]
        assert a0.real == pytest.approx(-math.pi**2 / (N * math.sin(math.pi / N)) ** 2, rel=1e-14)

    def test_dlog_relation_level_two(self):
        # q_N d log x / dq_N = -(N sin^2(pi/N)/pi^2) N g_2^{v_inf}, checked on the theta construction
        Q, N = 30, 2
        x = [float(c) for c in construction_b(Q + 1)]
        y = np.array(x[1:])  # x = q_N y with y_0 = 1
        inv = np.zeros(Q + 1)
        inv[0] = 1.0
        for n in range(1, Q + 1):
            inv[n] = -np.dot(y[1 : n + 1], inv[n - 1 :: -1][:n])
        qdlog = np.convolve(np.arange(Q + 1) * y, inv)[: Q + 1]
        qdlog[0] += 1.0
        g = q_expansion(EisensteinSpec(Kind.G2_DIFF, 2, CuspVector(1, 0, N)), Q).coeffs.real
        c = N * math.sin(math.pi / N) ** 2 / math.pi**2
        np.testing.assert_allclose(qdlog, -c * N * g, rtol=1e-10, atol=1e-10)

    def test_rogers_ramanujan_leading(self):
        phi = (1 + 5**0.5) / 2
        rr = construction_rr(10)
        assert complex(rr[1]) == pytest.approx(1)
        # r = q_5 (1 + O(q_5^5)), so x = r/(1 - phi r) starts q_5 + phi q_5^2 + phi^2 q_5^3
        assert complex(rr[2]) == pytest.approx(phi, abs=1e-12)
        assert complex(rr[3]) == pytest.approx(phi**2, abs=1e-12)
        # while the exponentiated Eisenstein series has (5 - sqrt 5)/2 there
        assert complex(construction_a(5, 10)[2]) == pytest.approx((5 - 5**0.5) / 2, abs=1e-12)

    def test_unsupported(self):
        for N in (1, 6):
            with pytest.raises(ValueError):
                build_hauptmodul(N)


class TestCusps:
    @pytest.mark.parametrize("N,count", [(2, 3), (3, 4), (4, 6), (5, 12)])
    def test_cusp_count(self, N, count):
        reps = cusp_representatives(N)
        assert len(reps) == count
        assert reps[0] == CuspVector(0, 1, N) and reps[1] == CuspVector(1, 0, N)

    def test_normalized_values(self):
        h = build_hauptmodul(2)
        assert cusp_value(h, CuspVector(0, 1, 2)) == 0
        assert cusp_value(h, CuspVector(1, 0, 2)) == math.inf

    def test_level_two_third_cusp(self):
        # lambda(tau + 1) = lambda/(lambda - 1) sends the cusp -1 to lambda = inf, x = -1/16
        h = build_hauptmodul(2)
        assert cusp_value(h, CuspVector(1, 1, 2)) == pytest.approx(-1 / 16, abs=1e-25)

    def test_level_two_limit(self):
        # direct limit of construction (B) towards the cusp -1 (and +1, the same cusp)
        h = build_hauptmodul(2, 700)
        for t in (0.25, 0.15, 0.1):
            assert h(complex(-1, t)) == pytest.approx(-1 / 16, abs=20 * math.exp(-math.pi / t))
            assert h(complex(1, t)) == pytest.approx(-1 / 16, abs=20 * math.exp(-math.pi / t))

    def test_minus_v(self):
        h = build_hauptmodul(3)
        for v in cusp_representatives(3):
            assert cusp_value(h, -v) == cusp_value(h, v)

    def test_unknown_cusp(self):
        with pytest.raises(ValueError):
            cusp_value(build_hauptmodul(4), CuspVector(2, 2, 4))

    def test_evaluation_floor(self):
        with pytest.raises(ValueError):
            build_hauptmodul(2)(0.01j)
        with pytest.raises(ValueError):
            # |q|^Q is tiny here but the coefficients have grown past it
            build_hauptmodul(2, 700)(complex(1, 0.06))


class TestLogFormula:
    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_all_branches(self, N, rng):
        h = build_hauptmodul(N)
        for v in cusp_representatives(N)[1:]:
            for _ in range(3):
                tau = complex(rng.uniform(-1, 1), rng.uniform(0.8, 1.5))
                report = verify_log_formula(h, v, tau)
                assert report.passed, report

    def test_examples(self):
        h = build_hauptmodul(2)
        assert verify_log_formula(h, CuspVector(1, 0, 2), 1j).difference < 1e-6
        assert verify_log_formula(h, CuspVector(1, 1, 2), complex(0.5, 1.5)).difference < 1e-6

    def test_periodicity(self):
        h = build_hauptmodul(3)
        v = CuspVector(1, 1, 3)
        a = verify_log_formula(h, v, complex(0.2, 1.0))
        b = verify_log_formula(h, v, complex(3.2, 1.0))
        assert a.lhs == pytest.approx(b.lhs, abs=1e-12)
        assert a.rhs == pytest.approx(b.rhs, abs=1e-12)

    def test_reference_cusp_rejected(self):
        with pytest.raises(ValueError):
            verify_log_formula(build_hauptmodul(2), CuspVector(0, 1, 2), 1j)

    def test_prefactor(self):
        assert log_prefactor(2) == pytest.approx(math.pi / 8)


class TestLevelFive:
    """At level 5 the exponentiated Eisenstein series is not a Hauptmodul and
    the logarithm formulas do not hold for the true Hauptmodul either."""

    def test_eisenstein_series_is_not_moebius(self):
        v = CuspVector(1, 1, 5)
        assert moebius_defect(construction_a(5, 700), v) > 1e-7
        assert moebius_defect(construction_a(4, 700), CuspVector(1, 1, 4)) < 1e-30

    def test_rogers_ramanujan_is_moebius(self):
        assert moebius_defect(construction_rr(700), CuspVector(1, 1, 5)) < 1e-30

    def test_log_formula_fails(self):
        h = build_hauptmodul(5)
        assert h.source == "rogers-ramanujan"
        diffs = [verify_log_formula(h, v, complex(0.1, 1.2)).difference for v in cusp_representatives(5)[1:]]
        assert min(diffs) > 1e-3
