import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bigjump import contour, exactprob, variational as var, weights
from bigjump.errors import DomainError, SlitError

disc_points = st.builds(lambda r, a: r * np.exp(1j * a), st.floats(0.05, 0.9), st.floats(-math.pi, math.pi))


@settings(max_examples=15)
@given(z=disc_points)
def test_continuation_matches_power_series_inside_disc(stretched, loghazard, z):
    for model in (stretched, loghazard):
        cont = contour.lindelof_G(model, z)
        ser = contour.series_G(model, z)[0, 0]
        assert abs(cont - ser) <= 1e-10 * abs(ser)


@settings(max_examples=20)
@given(x=st.floats(-3.0, 3.0), y=st.floats(0.01, 3.0))
def test_conjugate_symmetry(loghazard, x, y):
    z = complex(x, y)
    assert contour.lindelof_G(loghazard, z.conjugate()) == pytest.approx(contour.lindelof_G(loghazard, z).conjugate(),
                                                                        rel=1e-12)


def test_real_points_off_the_cut_are_real(stretched):
    vals = contour.lindelof_G(stretched, np.array([-5.0, -0.5, 0.3, 0.99]))
    assert np.all(np.abs(vals.imag) <= 1e-13 * np.abs(vals.real))
    assert contour.lindelof_G(stretched, 0.0) == 0.0


def test_domain_guards(stretched):
    with pytest.raises(SlitError):
        contour.lindelof_G(stretched, 2.0)
    with pytest.raises(DomainError):
        contour.lindelof_moments(stretched, 0.1 - 0.5j)


def test_rim_moments_give_phi_derivatives(stretched):
    # compare the moment route with finite differences of log G along the rim
    t, h = 0.3, 1e-5
    p0, p1, p2 = contour.phi_complex(stretched, t)
    lo = contour.phi_complex(stretched, t - h)[0]
    hi = contour.phi_complex(stretched, t + h)[0]
    assert p1 == pytest.approx((hi - lo) / (2 * h), rel=1e-7)
    assert p2 == pytest.approx((hi - 2 * p0 + lo) / h ** 2, rel=1e-4)


def test_bromwich_vanishes_off_the_cut(stretched):
    assert contour.bromwich(stretched, 0.0).value == 0.0
    assert contour.im_G_bromwich(stretched, -1.0) == 0.0


@pytest.mark.parametrize("t", [0.5, 1.0])
def test_bromwich_line_independence(stretched, loghazard, t):
    for model in (stretched, loghazard):
        default = contour.bromwich(model, t)
        moved = contour.bromwich(model, t, line=default.line + 3.0)
        assert moved.log_abs == pytest.approx(default.log_abs, abs=1e-8)
        assert moved.sign == default.sign


@pytest.mark.parametrize("t", [0.1, 0.3, 1.0])
def test_bromwich_matches_rim_imaginary_part(loghazard, t):
    rim = contour.boundary_G(loghazard, t)[0, 0].imag
    assert contour.im_G_bromwich(loghazard, t) == pytest.approx(rim, rel=1e-8)


@pytest.mark.parametrize("t", [0.02, 0.05, 0.2])
def test_stretched_half_saddle_is_exact(stretched, t):
    # for alpha = 1/2 the substitution xi = u^2 makes the Bromwich integrand Gaussian
    assert contour.log_im_G_bromwich(stretched, t) == pytest.approx(contour.log_im_G_saddle(stretched, t), abs=1e-10)


def test_stretched_small_t_asymptote(stretched):
    for t in (0.1, 0.02):
        assert contour.log_im_G_bromwich(stretched, t) == pytest.approx(
            contour.log_im_G_stretched_asymptote(stretched, t), abs=1e-12)
    model = exactprob.normalized(weights.make_stretched(0.3))
    gaps = [contour.log_im_G_bromwich(model, t) - contour.log_im_G_stretched_asymptote(model, t)
            for t in (0.2, 0.1, 0.05)]
    assert abs(gaps[2]) < abs(gaps[1]) < abs(gaps[0]) < 0.1


@pytest.mark.parametrize("k", [pytest.param(5, marks=pytest.mark.slow), 10, pytest.param(20, marks=pytest.mark.slow)])
def test_laplace_round_trip_recovers_weights(stretched, k):
    assert contour.laplace_roundtrip(stretched, k) == pytest.approx(math.exp(float(stretched.log_p(k))), rel=1e-6)


@pytest.mark.parametrize("t", [0.005, 0.01])
def test_rim_phi_matches_cumulant_taylor_polynomial(stretched, loghazard, t):
    for model in (stretched, loghazard):
        k7 = exactprob.cumulants(model).cumulants[6]
        gap = contour.phi_boundary(model, t)[0] - contour.phi_taylor(model, t, 6)[0]
        assert abs(gap) <= 3 * abs(k7) * t ** 7 / math.factorial(7) + 1e-13


def test_phi_boundary_at_origin(loghazard):
    cum = exactprob.cumulants(loghazard)
    p0, p1, p2 = contour.phi_boundary(loghazard, 0.0)
    assert abs(p0) < 1e-14
    assert p1 == pytest.approx(cum.mu, rel=1e-12)
    assert p2 == pytest.approx(cum.sigma2, rel=1e-10)


@pytest.mark.parametrize("N", [10.0, 100.0])
def test_eta_is_gaussian_tilt_for_small_overshoot(stretched, N):
    n = 1e4
    s2 = exactprob.cumulants(stretched).sigma2
    e = contour.eta_n(stretched, n, N)
    assert 0.9 <= e * n * s2 / N <= 1.1
    assert contour.eta_n(stretched, n, N, r=4) == pytest.approx(e, rel=1e-10)
    assert contour.phi_boundary(stretched, e)[1] == pytest.approx(exactprob.cumulants(stretched).mu + N / n,
                                                                  rel=1e-12)


def test_eta_zero_overshoot(stretched):
    assert contour.eta_n(stretched, 100, 0) == 0.0


def test_xi_inverts_q_prime(loghazard):
    for t in (0.01, 0.1, 0.5):
        assert float(loghazard.dq(contour.xi_of_t(loghazard, t))) == pytest.approx(t, rel=1e-13)
    with pytest.raises(DomainError):
        contour.xi_of_t(loghazard, 2 * contour.t_range(loghazard))


@pytest.fixture(scope="module")
def critical_case(loghazard):
    n = 1e5
    N = 1.1 * var.critical_N_star(loghazard, n)
    return loghazard, n, N, contour.phi_n_critical(loghazard, n, N, r=4)


def test_saddle_solves_reduced_equation(critical_case):
    model, n, N, pp = critical_case
    d1, d2 = contour.psi_n_derivatives(model, n, N, pp.t_n, pp.order)
    assert abs(d1) <= 1e-9 * N
    assert d2 < 0
    assert pp.xi_n == pytest.approx(contour.xi_of_t(model, pp.t_n), rel=1e-14)
    assert pp.t_n < pp.t_star < pp.t_prime
    assert contour.psi_n_derivatives(model, n, N, pp.t_prime, pp.order)[1] > 0


def test_reduced_derivative_changes_sign_twice(critical_case):
    model, n, N, pp = critical_case
    ts = np.geomspace(pp.t_n / 20, min(0.25, 0.999 * contour.t_range(model)), 400)
    d1 = np.array([contour.psi_n_derivatives(model, n, N, t, pp.order)[0] for t in ts])
    assert np.count_nonzero(np.sign(d1[1:]) != np.sign(d1[:-1])) == 2


def test_hessian_along_curve_matches_determinant(critical_case):
    model, n, N, pp = critical_case
    cum = exactprob.cumulants(model)
    h = 1e-6 * pp.t_n
    # xi'(t) by central differences, independent of the 1/q'' route
    dxi = (contour.xi_of_t(model, pp.t_n + h) - contour.xi_of_t(model, pp.t_n - h)) / (2 * h)
    tt2 = contour._taylor_tilde(cum, pp.order, pp.t_n)[2]
    beta = n * tt2 + dxi
    assert beta * float(model.d2q(pp.xi_n)) == pytest.approx(-pp.hess_det, rel=1e-6)
    assert contour.hessian_beta(model, n, N, pp.t_n, pp.order) == pytest.approx(beta, rel=1e-6)


def test_hessian_determinant_tends_to_minus_one(loghazard):
    dets = []
    for n in (1e4, 1e6, 1e8):
        N = 1.5 * var.critical_N_star(loghazard, n)
        dets.append(contour.phi_n_critical(loghazard, n, N).hess_det)
    assert all(d < 0 for d in dets)
    assert abs(dets[-1] + 1) < abs(dets[0] + 1)


@pytest.mark.parametrize("n,N", [(8, 6.0), (32, 12.0)])
def test_contour_pieces_reproduce_point_probability(stretched, n, N):
    res = contour.contour_Hn_Vn(stretched, n, N)
    assert res.total == pytest.approx(exactprob.exact_point_prob(stretched, n, res.m), rel=1e-10)
    assert res.interval[0] <= res.total <= res.interval[1]
    # the arc piece is close to its Gaussian evaluation in this range
    assert math.log(res.V_n) == pytest.approx(contour.v_gaussian(stretched, n, res.m - n * exactprob.cumulants(
        stretched).mu), abs=0.05)
