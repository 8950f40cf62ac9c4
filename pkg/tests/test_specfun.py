"""Error function, normal CDF, incomplete beta, and t distribution tails.

Every value is checked against mpmath at 50 digits of working precision.
That keeps the oracle genuinely independent: mpmath evaluates these
functions through its own arbitrary-precision algorithms, not the series
and continued fractions implemented here.
"""

import mpmath
import pytest
from hypothesis import given, strategies as st

from precise.specfun import (
    erf,
    erfc,
    normal_cdf,
    normal_sf,
    normal_two_sided_p,
    regularized_incomplete_beta,
    t_cdf,
    t_two_sided_p,
)

mpmath.mp.dps = 50

# Dense around the series/continued-fraction crossover at |x| = 2, sparse in
# the tails.
ERF_GRID = [
    -6.0, -5.0, -4.0, -3.0, -2.5, -2.1, -2.0, -1.9, -1.5, -1.0, -0.5,
    -0.1, -1e-8, 0.0, 1e-8, 0.05, 0.3, 0.7, 1.0, 1.4142135623730951,
    1.9, 1.99, 2.0, 2.01, 2.1, 2.5, 3.0, 4.0, 5.0, 6.0,
]

T_DF_GRID = [1.0, 2.0, 3.0, 4.5, 8.0, 10.0, 17.0, 30.0, 48.0, 100.0]
T_X_GRID = [-30.0, -8.0, -3.5, -2.0, -1.0, -0.31, 0.0, 0.5, 1.5, 2.2, 4.0, 12.0]


def _mp_t_cdf(x, df):
    # Student-t CDF through the regularized incomplete beta, evaluated by mpmath
    half = mpmath.betainc(
        df / 2, mpmath.mpf("0.5"), 0, df / (df + x * x), regularized=True
    ) / 2
    return float(half if x < 0 else 1 - half)


class TestErf:
    @pytest.mark.parametrize("x", ERF_GRID)
    def test_matches_mpmath(self, x):
        assert erf(x) == pytest.approx(float(mpmath.erf(x)), abs=1e-12)
        assert erfc(x) == pytest.approx(float(mpmath.erfc(x)), abs=1e-12)

    def test_frozen_spot_values(self):
        assert erf(1.0) == pytest.approx(0.8427007929497151, abs=1e-15)
        assert erfc(2.5) == pytest.approx(0.00040695201744495903, rel=1e-12)
        assert erf(0.0) == 0.0
        assert erfc(0.0) == 1.0

    def test_deep_tail_underflows_to_zero(self):
        assert erfc(27.0) == 0.0
        assert erf(27.0) == 1.0

    @given(st.floats(min_value=-8, max_value=8, allow_nan=False))
    def test_oddness_and_complement(self, x):
        assert erf(-x) == pytest.approx(-erf(x), abs=1e-14)
        assert erf(x) + erfc(x) == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(min_value=-6, max_value=6), st.floats(min_value=-6, max_value=6))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert erf(lo) <= erf(hi)


class TestNormal:
    @pytest.mark.parametrize("z", ERF_GRID)
    def test_cdf_matches_mpmath(self, z):
        assert normal_cdf(z) == pytest.approx(float(mpmath.ncdf(z)), abs=1e-13)

    def test_sf_is_complement(self):
        for z in (-3.0, -0.5, 0.0, 1.7, 4.0):
            assert normal_cdf(z) + normal_sf(z) == pytest.approx(1.0, abs=1e-13)

    def test_two_sided_p(self):
        assert normal_two_sided_p(0.0) == pytest.approx(1.0)
        assert normal_two_sided_p(1.959963984540054) == pytest.approx(0.05, abs=1e-12)
        expected = float(2 * (1 - mpmath.ncdf(3.0)))
        assert normal_two_sided_p(3.0) == pytest.approx(expected, rel=1e-10)
        assert normal_two_sided_p(-3.0) == normal_two_sided_p(3.0)

    @given(st.floats(min_value=-37, max_value=37))
    def test_cdf_bounded_and_monotone_symmetric(self, z):
        p = normal_cdf(z)
        assert 0.0 <= p <= 1.0
        assert p + normal_cdf(-z) == pytest.approx(1.0, abs=1e-12)


class TestIncompleteBeta:
    CASES = [
        (0.5, 0.5, 0.3), (0.5, 0.5, 0.99), (1.0, 1.0, 0.42),
        (2.0, 3.0, 0.5), (4.0, 0.5, 0.9), (0.5, 8.5, 0.02),
        (24.0, 0.5, 0.999), (15.0, 15.0, 0.5), (50.0, 0.5, 0.97),
        (0.5, 50.0, 0.002), (5.0, 1.0, 0.7), (1.5, 2.5, 0.123),
    ]

    @pytest.mark.parametrize("a,b,x", CASES)
    def test_matches_mpmath(self, a, b, x):
        expected = float(mpmath.betainc(a, b, 0, x, regularized=True))
        assert regularized_incomplete_beta(a, b, x) == pytest.approx(expected, abs=1e-13)

    def test_endpoints(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            regularized_incomplete_beta(0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, -2.0, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, 1.0, 1.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, 1.0, -0.1)

    @given(
        st.floats(min_value=0.2, max_value=30),
        st.floats(min_value=0.2, max_value=30),
        # dyadic x keeps 1 - x exact, so the identity is probed at the
        # arguments actually passed rather than at rounded neighbours
        st.integers(min_value=0, max_value=2**20).map(lambda k: k / 2**20),
    )
    def test_symmetry_identity(self, a, b, x):
        left = regularized_incomplete_beta(a, b, x)
        right = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x)
        assert left == pytest.approx(right, abs=1e-10)
        assert 0.0 <= left <= 1.0


class TestStudentT:
    @pytest.mark.parametrize("df", T_DF_GRID)
    @pytest.mark.parametrize("x", T_X_GRID)
    def test_cdf_matches_mpmath_on_the_grid(self, x, df):
        assert t_cdf(x, df) == pytest.approx(_mp_t_cdf(x, df), abs=1e-12)

    @pytest.mark.parametrize("df", T_DF_GRID)
    @pytest.mark.parametrize("x", T_X_GRID)
    def test_two_sided_p_matches_mpmath(self, x, df):
        expected = 2.0 * _mp_t_cdf(-abs(x), df)
        assert t_two_sided_p(x, df) == pytest.approx(expected, abs=1e-12)

    def test_frozen_spot_value(self):
        # pooled two-sample t = -2 with 8 degrees of freedom
        assert t_two_sided_p(-2.0, 8.0) == pytest.approx(0.0805162379572628, abs=1e-13)

    def test_heavy_tails_of_df_1(self):
        # t with one degree of freedom is the Cauchy distribution
        assert t_cdf(1.0, 1.0) == pytest.approx(0.75, abs=1e-13)
        assert t_cdf(0.0, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_df_validation(self):
        with pytest.raises(ValueError):
            t_cdf(1.0, 0.0)
        with pytest.raises(ValueError):
            t_two_sided_p(1.0, -3.0)

    @given(
        st.floats(min_value=-50, max_value=50),
        st.floats(min_value=0.5, max_value=200),
    )
    def test_p_in_range_and_symmetric(self, x, df):
        p = t_two_sided_p(x, df)
        assert 0.0 <= p <= 1.0
        assert p == pytest.approx(t_two_sided_p(-x, df), abs=1e-13)

    @given(st.floats(min_value=0.5, max_value=200))
    def test_p_is_one_at_zero(self, df):
        assert t_two_sided_p(0.0, df) == pytest.approx(1.0, abs=1e-12)

    def test_large_df_approaches_normal(self):
        assert t_two_sided_p(1.96, 1e7) == pytest.approx(
            normal_two_sided_p(1.96), abs=1e-6
        )
