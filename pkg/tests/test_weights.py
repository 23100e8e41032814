import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigjump import weights
from bigjump.errors import DomainError, ParameterError


def test_stretched_values():
    m = weights.make_stretched(0.5)
    assert m.q_raw(4.0) == pytest.approx(2.0, rel=1e-15)
    assert m.dq(4.0) == pytest.approx(0.25, rel=1e-15)
    assert (m.a, m.b, m.alpha_bound) == (0.0, 0.0, 0.5)
    assert m.log_c is None


def test_stretched_complex_matches_polar_form():
    m = weights.make_stretched(0.5)
    xi = 0.0 + 4.0j
    val = complex(m.q_complex(xi))
    assert abs(val) == pytest.approx(abs(xi) ** 0.5, rel=1e-14)
    assert np.angle(val) == pytest.approx(0.5 * np.angle(xi), rel=1e-14)


def test_loghazard_values():
    m = weights.make_loghazard(3.0)
    assert m.q_raw(math.e) == pytest.approx(1.0, rel=1e-15)
    assert m.dq(math.e ** 2) == pytest.approx(12 / math.e ** 2, rel=1e-14)
    x = np.geomspace(math.e ** 2 * 1.01, 1e9, 300)
    assert np.all(m.d2q(x) < 0)
    assert m.a == 1.0 and m.b > 1.0
    assert 0 < m.alpha_bound < 1


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
def test_stretched_rejects_alpha(bad):
    with pytest.raises(ParameterError):
        weights.make_stretched(bad)


@pytest.mark.parametrize("bad", [2.0, 1.0, 0.5])
def test_loghazard_rejects_beta(bad):
    with pytest.raises(ParameterError):
        weights.make_loghazard(bad)


@given(alpha=st.floats(0.05, 0.95), x=st.floats(1.5, 1e6))
def test_stretched_complex_agrees_on_real_axis(alpha, x):
    m = weights.make_stretched(alpha)
    assert complex(m.q_complex(x + 0j)).real == pytest.approx(float(m.q_raw(x)), rel=1e-13)


@given(beta=st.floats(2.1, 5.0), x=st.floats(3.0, 1e8))
def test_loghazard_complex_agrees_on_real_axis(beta, x):
    m = weights.make_loghazard(beta)
    assert complex(m.q_complex(x + 0j)).real == pytest.approx(float(m.q_raw(x)), rel=1e-12)


@given(alpha=st.floats(0.1, 0.9), x=st.floats(2.0, 1e5))
def test_stretched_derivatives_match_finite_differences(alpha, x):
    m = weights.make_stretched(alpha)
    h = 1e-5 * x
    fd1 = (m.q_raw(x + h) - m.q_raw(x - h)) / (2 * h)
    fd2 = (m.dq(x + h) - m.dq(x - h)) / (2 * h)
    fd3 = (m.d2q(x + h) - m.d2q(x - h)) / (2 * h)
    assert fd1 == pytest.approx(m.dq(x), rel=1e-7)
    assert fd2 == pytest.approx(m.d2q(x), rel=1e-6)
    assert fd3 == pytest.approx(m.d3q(x), rel=1e-6)


@given(beta=st.floats(2.1, 5.0), x=st.floats(20.0, 1e7))
def test_loghazard_derivatives_match_finite_differences(beta, x):
    m = weights.make_loghazard(beta)
    h = 1e-5 * x
    assert (m.q_raw(x + h) - m.q_raw(x - h)) / (2 * h) == pytest.approx(m.dq(x), rel=1e-6)
    assert (m.dq(x + h) - m.dq(x - h)) / (2 * h) == pytest.approx(m.d2q(x), rel=1e-5)
    assert (m.d2q(x + h) - m.d2q(x - h)) / (2 * h) == pytest.approx(m.d3q(x), rel=1e-5)


def test_loghazard_regular_point_is_third_derivative_sign_change():
    m = weights.make_loghazard(3.0)
    assert m.x_regular == pytest.approx(math.exp((3 + math.sqrt(5)) / 2), rel=1e-14)
    assert m.d3q(m.x_regular * 1.001) > 0 > m.d3q(m.x_regular * 0.999)


@pytest.mark.parametrize("model", [weights.make_stretched(0.5), weights.make_stretched(0.3),
                                   weights.make_loghazard(3.0), weights.make_loghazard(4.0)])
def test_validate_assumptions_on_tail_grid(model):
    grid = np.geomspace(weights.tail_grid_start(model), 1e9, 300)
    rep = weights.validate_assumptions(model, grid)
    assert rep.passed, rep.summary()
    assert 0 < rep.c1 <= rep.c2 and 0 < rep.c3 <= rep.c4


def test_validate_assumptions_stretched_constants():
    rep = weights.validate_assumptions(weights.make_stretched(0.5), np.geomspace(10, 1e6, 50))
    # |q''| x / q' = 1 - alpha and q''' x / |q''| = 2 - alpha exactly
    assert rep.c1 == pytest.approx(0.5, rel=1e-12) and rep.c2 == pytest.approx(0.5, rel=1e-12)
    assert rep.c3 == pytest.approx(1.5, rel=1e-12) and rep.c4 == pytest.approx(1.5, rel=1e-12)


def test_validate_assumptions_reports_violations():
    rep = weights.validate_assumptions(weights.make_loghazard(3.0), np.linspace(2.0, 30.0, 40))
    assert not rep.passed
    assert not rep.items["i"]
    assert rep.violations


def test_validate_assumptions_rejects_grid_below_a():
    with pytest.raises(DomainError):
        weights.validate_assumptions(weights.make_loghazard(3.0), [0.5, 2.0])


def test_models_hash_and_compare_by_parameters():
    assert weights.make_stretched(0.5) == weights.make_stretched(0.5)
    assert hash(weights.make_stretched(0.5)) == hash(weights.make_stretched(0.5))
    assert weights.make_stretched(0.5) != weights.make_stretched(0.4)


def test_b_line_avoids_poles():
    assert weights.make_stretched(0.5).b_line() == 0.5
    assert weights.make_loghazard(3.0).b_line() == 2.5
