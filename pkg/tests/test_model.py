import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from bradford_dynamics.model import (
    DomainError,
    FrequencyTable,
    RankedBibliography,
    core_zone_analytic,
    gumbel_xr,
    rho_from_alpha,
    x1_analytic,
    x1_from_ym,
    ym_analytic,
    ym_from_core,
    yule_moment_sum,
    yule_pmf,
    yule_survival,
)

RHO = 10 / 9

# Reference values evaluated with mpmath at 30 digits.
YM_1E4 = 28.3917174389989083765
YM_1E3 = 9.53910114305506838957
T0_1E4 = 25.5525456950990175389
A0_1E4 = 7254.80657222359259331
X1_1E4 = 4167.56536767548504167


@pytest.mark.parametrize("alpha, rho", [(0.5, 2.0), (0.1, 1.1111111111111112)])
def test_rho_from_alpha(alpha, rho):
    assert rho_from_alpha(alpha) == pytest.approx(rho, rel=1e-15)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
def test_rho_from_alpha_domain(alpha):
    with pytest.raises(DomainError):
        rho_from_alpha(alpha)


def test_yule_pmf_values():
    assert yule_pmf(1, 1.0) == pytest.approx(0.5, rel=1e-14)
    assert yule_pmf(1, RHO) == pytest.approx(10 / 19, rel=1e-12)


def test_yule_pmf_brute_normalization():
    n = np.arange(1, 10**6 + 1)
    assert np.sum(yule_pmf(n, 1.1111)) == pytest.approx(1.0, abs=1e-4)


def test_yule_pmf_matches_survival_differences():
    n = np.arange(1, 200)
    diff = yule_survival(n, 1.3) - yule_survival(n + 1, 1.3)
    np.testing.assert_allclose(yule_pmf(n, 1.3), diff, rtol=1e-10)


def test_power_law_flag_converges_to_beta_form():
    n = np.array([1e3, 1e4, 1e5])
    ratio = yule_pmf(n, RHO, power_law=True) / yule_pmf(n, RHO)
    np.testing.assert_allclose(ratio, 1.0, rtol=3e-3)
    assert yule_pmf(1, RHO, power_law=True) == pytest.approx(RHO * math.gamma(RHO + 1))


@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.3, 0.5])
def test_moment_sums(alpha):
    rho = rho_from_alpha(alpha)
    assert yule_moment_sum(rho, 0) == pytest.approx(1.0, abs=1e-4)
    assert yule_moment_sum(rho, 1) == pytest.approx(1.0 / alpha, rel=1e-3)


def test_ym_analytic():
    assert ym_analytic(1e4, RHO) == pytest.approx(YM_1E4, rel=1e-12)
    assert ym_analytic(1e3, RHO) == pytest.approx(YM_1E3, rel=1e-12)
    # A^(1/(rho+1)) scaling between the two paper counts.
    assert YM_1E4 / YM_1E3 == pytest.approx(10 ** (1 / (RHO + 1)), rel=1e-12)


def test_ym_unit_base():
    rho = 1.05
    A = 1.0 / ((rho - 1) * math.gamma(rho + 1))
    assert A >= 1
    assert ym_analytic(A, rho) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("fn", [ym_analytic, core_zone_analytic, x1_analytic])
def test_rho_le_one_is_rejected(fn):
    with pytest.raises(DomainError):
        fn(1e4, 1.0)


def test_core_zone_analytic_values():
    T0, A0 = core_zone_analytic(1e4, RHO)
    assert T0 == pytest.approx(T0_1E4, rel=1e-12)
    assert A0 == pytest.approx(A0_1E4, rel=1e-12)


@given(st.floats(1.05, 3.0), st.floats(1e2, 1e7))
def test_core_mean_productivity_exceeds_boundary(rho, A):
    T0, A0 = core_zone_analytic(A, rho)
    y_m = ym_analytic(A, rho)
    assert A0 / T0 == pytest.approx(rho * y_m / (rho - 1), rel=1e-12)
    assert A0 / T0 >= y_m


@pytest.mark.parametrize("rho", [1.05, 1.1111, 1.3, 1.6, 2.0])
@pytest.mark.parametrize("A", [1e2, 1e4, 1e6])
def test_core_totals_equal_tail_integrals(rho, A):
    # Oracle: numerical integration of T f(n) and T n f(n) over [y_m, inf)
    # in the variable u = ln n, with the power-law form of f and T = alpha A.
    T = A * (1 - 1 / rho)
    y_m = ym_analytic(A, rho)
    c = rho * math.gamma(rho + 1)
    journals, _ = quad(lambda u: T * c * math.exp(-rho * u), math.log(y_m), np.inf)
    papers, _ = quad(lambda u: T * c * math.exp((1 - rho) * u), math.log(y_m), np.inf)
    T0, A0 = core_zone_analytic(A, rho)
    assert T0 == pytest.approx(journals, rel=1e-3)
    assert A0 == pytest.approx(papers, rel=1e-3)


def test_x1_analytic_values():
    assert x1_analytic(1e4, RHO) == pytest.approx(X1_1E4, rel=1e-12)
    assert x1_from_ym(ym_analytic(1e4, RHO), RHO) == pytest.approx(X1_1E4, rel=1e-9)


def test_x1_exact_value_and_paper_count_domain():
    # Gamma(3) = 2, so X1 = (8 * 2) ** (1/2) = 4.
    assert x1_analytic(8, 2.0) == pytest.approx(4.0, rel=1e-14)
    # A Gamma(rho+1) = 1 would need A < 1 because Gamma(rho+1) >= 1 for rho >= 1.
    with pytest.raises(DomainError):
        x1_analytic(0.5, 2.0)


@given(st.floats(1.05, 2.0), st.floats(1e2, 1e6))
def test_x1_two_forms_agree(rho, A):
    assert x1_from_ym(ym_analytic(A, rho), rho) == pytest.approx(x1_analytic(A, rho), rel=1e-9)


@given(st.floats(1.05, 2.5), st.floats(1e2, 1e6), st.floats(1.01, 10.0))
def test_key_parameters_increase_with_A(rho, A, factor):
    lo = (ym_analytic(A, rho), *core_zone_analytic(A, rho), x1_analytic(A, rho))
    hi = (ym_analytic(A * factor, rho), *core_zone_analytic(A * factor, rho), x1_analytic(A * factor, rho))
    assert all(h > l for h, l in zip(hi, lo))


def test_gumbel_xr():
    assert gumbel_xr(4170, 1, 1.7) == 4170
    assert gumbel_xr(4170, 4, RHO) == pytest.approx(1197.518035084409, rel=1e-12)
    assert gumbel_xr(100, 8, 1.0) == pytest.approx(12.5)


def test_ym_from_core():
    assert ym_from_core(100, 3, 1.0) == pytest.approx(100 / 3)
    assert ym_from_core(100, 1, 7.3) == 100


def test_frequency_table_round_trip():
    table = FrequencyTable.from_mapping({1: 300, 2: 80, 10: 2})
    assert table.T == 382 and table.A == 480
    ranked = table.to_ranked()
    assert list(ranked.sizes[:3]) == [10, 10, 2]
    assert ranked.frequency().as_dict() == {1: 300.0, 2: 80.0, 10: 2.0}


def test_ranked_bibliography_sorts():
    rb = RankedBibliography(np.array([1, 5, 3]))
    assert list(rb.sizes) == [5, 3, 1]
    assert (rb.T, rb.A, rb.X1) == (3, 9.0, 5.0)
