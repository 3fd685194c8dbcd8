import math

import pytest

from quizforge.quadrature import IntegrationError, integrate


class TestClosedForms:
    def test_polynomial(self):
        assert integrate(lambda x: x ** 2, 0, 3) == pytest.approx(9.0, abs=1e-8)

    def test_x_exp_x(self):
        # antiderivative of x e^x is (x-1) e^x
        exact = (2 - 1) * math.exp(2) - (0 - 1) * math.exp(0)
        assert integrate(lambda x: x * math.exp(x), 0, 2) == \
            pytest.approx(exact, abs=1e-8)

    def test_sine_over_period_is_zero(self):
        assert integrate(math.sin, 0, 2 * math.pi) == pytest.approx(0.0, abs=1e-8)

    def test_reversed_limits_negate(self):
        a = integrate(lambda x: x ** 3 + 1, 0, 2)
        b = integrate(lambda x: x ** 3 + 1, 2, 0)
        assert a == pytest.approx(-b, abs=1e-10)

    def test_empty_interval(self):
        assert integrate(math.exp, 1.5, 1.5) == 0.0

    def test_sharp_peak_resolved(self):
        # narrow Gaussian: naive fixed-grid Simpson misses it
        f = lambda x: math.exp(-((x - 0.5) / 0.01) ** 2)
        exact = 0.01 * math.sqrt(math.pi)
        assert integrate(f, 0, 1, tol=1e-10) == pytest.approx(exact, rel=1e-6)


class TestErrorBehavior:
    def test_nonconvergent_raises(self):
        # 1/sqrt near the singularity cannot meet tolerance at depth 5
        with pytest.raises(IntegrationError):
            integrate(lambda x: x ** -0.5 if x > 0 else 1e308, 0, 1,
                      tol=1e-12, max_depth=5)

    def test_tolerance_honored(self):
        exact = math.exp(1) - 1
        got = integrate(math.exp, 0, 1, tol=1e-8)
        assert abs(got - exact) < 1e-8
