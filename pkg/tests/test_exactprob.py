import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigjump import exactprob, weights
from bigjump.errors import BudgetError, DivergenceError, OrderError
from oracles import negative_binomial_pmf


def test_stretched_normalization_constant(stretched):
    # brute-force sum in double precision to the point where terms vanish
    k = np.arange(1, 3_000_000, dtype=float)
    total = math.fsum(np.exp(-np.sqrt(k)))
    assert stretched.log_c == pytest.approx(-math.log(total), abs=1e-13)


def test_probabilities_sum_to_one(loghazard):
    cum = exactprob.cumulants(loghazard)
    assert cum.cutoff > 0
    k = np.arange(1, cum.cutoff + 1)
    p = loghazard.p(k)
    assert np.all((p > 0) & (p < 1))
    # the remaining tail is below the moment-truncation threshold times the mean
    assert math.fsum(p) == pytest.approx(1.0, abs=1e-12)


def test_cumulants_match_direct_central_moments(stretched):
    cum = exactprob.cumulants(stretched)
    assert cum.mu == pytest.approx(7.148583798926122, rel=1e-13)
    assert cum.sigma2 == pytest.approx(cum.central[1], rel=1e-12)
    assert cum.kappa(3) == pytest.approx(cum.central[2], rel=1e-10)
    # kappa_4 = m4 - 3 m2^2 for central moments
    assert cum.kappa(4) == pytest.approx(cum.central[3] - 3 * cum.central[1] ** 2, rel=1e-9)


def test_cumulant_order_bounds(stretched):
    with pytest.raises(OrderError):
        exactprob.cumulants(stretched, 13)
    with pytest.raises(OrderError):
        exactprob.cumulants(stretched, 4).kappa(5)


def test_moments_to_cumulants_poisson_like():
    # moments of Poisson(1): Bell numbers; all cumulants equal 1
    bell = [1, 2, 5, 15, 52, 203]
    assert exactprob.moments_to_cumulants(bell) == pytest.approx([1.0] * 6, abs=1e-12)


def test_divergent_weights_rejected():
    m = weights.make_custom(lambda x: 0.5 * np.log(x), lambda x: 0.5 / x, lambda x: -0.5 / x ** 2,
                            lambda x: 1.0 / x ** 3, lambda z: 0.5 * np.log(z), a=0.0, alpha_bound=0.5)
    with pytest.raises(DivergenceError):
        exactprob.normalize(m)


@given(n=st.integers(1, 10), m_off=st.integers(0, 190))
def test_geometric_matches_negative_binomial(geometric, n, m_off):
    m = n + m_off
    got = exactprob.exact_point_prob(geometric, n, m)
    want = negative_binomial_pmf(n, m, 0.5)
    assert got == pytest.approx(want, rel=1e-12)


def test_doubling_and_sequential_agree(stretched):
    a = exactprob.convolve_exact(stretched, 37, 900, method="doubling")
    b = exactprob.convolve_exact(stretched, 37, 900, method="sequential")
    assert a.offset == b.offset == 37
    np.testing.assert_allclose(a.probs, b.probs, rtol=1e-12, atol=0)


def test_log_space_path_agrees_with_linear(loghazard):
    lin = exactprob.convolve_exact(loghazard, 6, 400, log_space=False)
    lg = exactprob.convolve_exact(loghazard, 6, 400, log_space=True)
    np.testing.assert_allclose(lg.probs, lin.probs, rtol=1e-12)


def test_log_space_triggers_for_tiny_entries(loghazard):
    # exp(-(log 7000)^3) is far below the smallest normal double
    pmf = exactprob.convolve_exact(loghazard, 2, 7000)
    assert pmf.log_probs is not None
    assert np.all(np.isfinite(pmf.log()))


def test_pmf_support_and_tail(stretched):
    pmf = exactprob.convolve_exact(stretched, 5, 300)
    assert pmf.values()[0] == 5
    assert exactprob.exact_point_prob(stretched, 5, 4) == 0.0
    assert 0 < pmf.tail_mass_bound < 1
    with pytest.raises(IndexError):
        pmf.at(301)


def test_pmf_csv_round_trip(geometric):
    text = exactprob.convolve_exact(geometric, 2, 6).to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "value,prob,log_prob"
    v, p, lp = lines[1].split(",")
    assert int(v) == 2 and float(p) == 0.25 and float(lp) == pytest.approx(math.log(0.25))


def test_budget_cap():
    with pytest.raises(BudgetError):
        exactprob.convolve_exact(weights.make_stretched(0.5), 2, exactprob.ARRAY_CAP + 10)


def test_rel_error_budget_grows_with_n():
    assert exactprob.point_prob_rel_error(10, 100) < exactprob.point_prob_rel_error(100, 100) < 1e-10
