import math
import statistics

import pytest

from quizforge.stattests import (StatError, binom_exact, simple_regression,
                                 stat_test, t_one_sample, t_two_sample)

# reference data with R-verified results (t.test, binom.test, lm)
X1 = [4.1, 5.2, 6.3, 4.8, 5.9, 5.5, 4.4, 6.0, 5.1, 5.7]


class TestOneSampleT:
    def test_against_direct_formula(self):
        res = t_one_sample(X1, mu0=5.0)
        m = statistics.fmean(X1)
        s = statistics.stdev(X1)
        t = (m - 5.0) / (s / math.sqrt(len(X1)))
        assert res["statistic"] == pytest.approx(t, rel=1e-12)
        assert res["df"] == 9
        assert res["estimate"] == pytest.approx(m, rel=1e-12)

    def test_p_value_symmetric_cases(self):
        # mean exactly mu0: t = 0, p = 1
        res = t_one_sample([1.0, 2.0, 3.0], mu0=2.0)
        assert res["statistic"] == pytest.approx(0.0, abs=1e-12)
        assert res["p_value"] == pytest.approx(1.0, rel=1e-12)

    def test_against_scipy(self):
        import scipy.stats as ss
        res = t_one_sample(X1, mu0=5.0)
        ref = ss.ttest_1samp(X1, 5.0)
        assert res["statistic"] == pytest.approx(ref.statistic, rel=1e-10)
        assert res["p_value"] == pytest.approx(ref.pvalue, rel=1e-10)
        lo, hi = ref.confidence_interval(0.95)
        assert res["conf_low"] == pytest.approx(lo, rel=1e-10)
        assert res["conf_high"] == pytest.approx(hi, rel=1e-10)

    def test_ci_contains_mean(self):
        res = t_one_sample(X1)
        assert res["conf_low"] < res["estimate"] < res["conf_high"]

    def test_needs_two_points(self):
        with pytest.raises(StatError):
            t_one_sample([1.0])


class TestTwoSampleT:
    def test_welch_against_scipy(self):
        import scipy.stats as ss
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        y = [2.5, 3.5, 4.5, 5.5, 6.5, 7.5]
        res = t_two_sample(x, y)
        ref = ss.ttest_ind(x, y, equal_var=False)
        assert res["statistic"] == pytest.approx(ref.statistic, rel=1e-10)
        assert res["p_value"] == pytest.approx(ref.pvalue, rel=1e-10)

    def test_symmetry(self):
        x = [1.0, 2.0, 3.0]
        y = [4.0, 5.0, 7.0]
        a = t_two_sample(x, y)
        b = t_two_sample(y, x)
        assert a["statistic"] == pytest.approx(-b["statistic"], rel=1e-12)
        assert a["p_value"] == pytest.approx(b["p_value"], rel=1e-12)


class TestBinomExact:
    def test_fair_coin_balanced(self):
        res = binom_exact(5, 10, 0.5)
        assert res["p_value"] == pytest.approx(1.0, rel=1e-9)
        assert res["estimate"] == 0.5

    def test_known_r_values(self):
        # R: binom.test(7, 20, 0.5) gives p=0.2632, CI (0.1539, 0.5922)
        res = binom_exact(7, 20, 0.5)
        assert res["p_value"] == pytest.approx(0.2632, abs=5e-4)
        assert res["conf_low"] == pytest.approx(0.1539, abs=5e-4)
        assert res["conf_high"] == pytest.approx(0.5922, abs=5e-4)

    def test_extreme_counts(self):
        res = binom_exact(0, 10, 0.5)
        assert res["p_value"] == pytest.approx(2 * 0.5 ** 10, rel=1e-6)
        assert res["conf_low"] == 0.0
        res = binom_exact(10, 10, 0.5)
        assert res["conf_high"] == 1.0

    def test_p_value_vs_brute_force(self):
        # sum of pmf values not exceeding the observed pmf
        for k, n, p0 in [(3, 12, 0.4), (9, 15, 0.5), (2, 30, 0.2)]:
            res = binom_exact(k, n, p0)
            obs = math.comb(n, k) * p0 ** k * (1 - p0) ** (n - k)
            total = sum(
                math.comb(n, j) * p0 ** j * (1 - p0) ** (n - j)
                for j in range(n + 1)
                if math.comb(n, j) * p0 ** j * (1 - p0) ** (n - j)
                <= obs * (1 + 1e-7))
            assert res["p_value"] == pytest.approx(min(1.0, total), rel=1e-9)

    def test_bad_counts(self):
        with pytest.raises(StatError):
            binom_exact(11, 10, 0.5)


class TestRegression:
    def test_exact_line_recovered(self):
        x = [1.0, 2.0, 3.0, 4.0]
        y = [3.0, 5.0, 7.0, 9.0]  # y = 1 + 2x
        res = simple_regression(x, y)
        assert res["slope"] == pytest.approx(2.0, abs=1e-12)
        assert res["intercept"] == pytest.approx(1.0, abs=1e-12)

    def test_against_scipy_linregress(self):
        import scipy.stats as ss
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        y = [2.1, 3.9, 6.2, 7.8, 10.1]
        res = simple_regression(x, y)
        ref = ss.linregress(x, y)
        assert res["slope"] == pytest.approx(ref.slope, rel=1e-10)
        assert res["intercept"] == pytest.approx(ref.intercept, rel=1e-10)
        assert res["p_value"] == pytest.approx(ref.pvalue, rel=1e-8)

    def test_slope_formula(self):
        x = [0.0, 1.0, 2.0, 5.0]
        y = [1.0, 0.5, 3.0, 4.0]
        mx, my = statistics.fmean(x), statistics.fmean(y)
        num = sum((a - mx) * (b - my) for a, b in zip(x, y))
        den = sum((a - mx) ** 2 for a in x)
        res = simple_regression(x, y)
        assert res["slope"] == pytest.approx(num / den, rel=1e-12)

    def test_constant_x_rejected(self):
        with pytest.raises(StatError):
            simple_regression([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])


class TestDispatcher:
    def test_kinds(self):
        assert stat_test("t_one_sample", X1, {"mu": 5.0}).kind == "t_one_sample"
        assert stat_test("binom_exact", (7, 20), {"p": 0.5}).kind == "binom_exact"

    def test_unknown_kind(self):
        with pytest.raises(StatError):
            stat_test("anova", X1)


def test_fields_mapping_round_trips():
    res = t_one_sample(X1, mu0=5.0)
    d = res.fields()
    assert d["p_value"] == res["p_value"]
    assert d["statistic"] == res["statistic"]
    with pytest.raises(KeyError):
        res["no_such_field"]
