"""Analytic continuation of the generating function and the contour pieces.

G(z) = sum_k p(k) z^k has radius of convergence one.  Writing z = e^v with
v = x + i theta, 0 <= theta <= pi, the Lindelof representation along the
vertical line Re xi = b' reads

    G(e^v) = sum_{k < b'} p(k) e^{kv} + i * int p(b'+is) e^{(b'+is) v} / (1 + e^{-2 pi s}) ds,

which is absolutely convergent up to and including the upper rim of the
slit (theta = 0, x > 0).  Replacing p(xi) by xi^j p(xi) yields the
continuations of sum_k k^j p(k) z^k, hence phi' and phi''.  The lower
half-plane follows from G(conj z) = conj G(z).

Im G on the slit is a Bromwich integral; its integrand is analytic in xi, so
the line is moved through the real saddle xi(t) of t xi - q(xi), where the
integrand has no cancellation.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _accel, exactprob
from ._quad import gauss_legendre, geometric_breaks, integrate
from ._roots import bracketed_newton, expand_upward
from .errors import BracketError, DomainError, NoRootError, QuadratureError, SlitError
from .variational import setup

TAIL_NATS = 60.0
NODES_PER_PANEL = 24


# -- Lindelof line rule --------------------------------------------------------

class _LineRule:
    """Fixed composite Gauss-Legendre rule on Re xi = b' for |Re v| <= x_max."""

    def __init__(self, model, x_max):
        self.model = model
        bp = model.b_line()
        self.b_line = bp
        self.head = np.arange(1, int(math.floor(bp)) + 1)
        self.head_logp = model.log_p(self.head) if self.head.size else np.empty(0)

        def env(s):
            return np.real(model.log_p_complex(bp + 1j * np.asarray(s, dtype=float)))

        probe = np.concatenate([np.linspace(0.0, 4.0, 41), np.geomspace(4.0, 1e9, 400)])
        e = env(probe)
        e_max = float(np.max(e))
        below = np.nonzero(e < e_max - TAIL_NATS)[0]
        if below.size == 0:
            raise QuadratureError("symbol p(b'+is) does not decay along the Lindelof line")
        # first probe after which the envelope stays below the cutoff
        ok = e < e_max - TAIL_NATS
        last_bad = np.nonzero(~ok)[0].max()
        if last_bad + 1 >= probe.size:
            raise QuadratureError("Lindelof line envelope never falls below the cutoff")
        s_pos = float(probe[last_bad + 1])
        s_neg = (TAIL_NATS + e_max - float(env(0.0))) / math.pi + 2.0
        cap = min(40.0, math.pi / max(x_max, 1e-3))
        pos = geometric_breaks(0.0, s_pos, 0.25, growth=1.25, cap=cap)
        neg = -geometric_breaks(0.0, s_neg, 0.25, growth=1.25, cap=4.0)[::-1]
        breaks = np.concatenate([neg[:-1], pos])
        x, w = gauss_legendre(NODES_PER_PANEL)
        a, b = breaks[:-1], breaks[1:]
        half = 0.5 * (b - a)
        s = ((a + b)[:, None] * 0.5 + half[:, None] * x[None, :]).ravel()
        ws = (half[:, None] * w[None, :]).ravel()
        self.s = s
        self.xi = bp + 1j * s
        # log of quadrature weight times the kernel 1/(1 + e^{-2 pi s}), times i
        kern = np.where(s > 0, -np.log1p(np.exp(-2 * np.pi * np.abs(s))),
                        2 * np.pi * s - np.log1p(np.exp(-2 * np.pi * np.abs(s))))
        self.base = model.log_p_complex(self.xi) + np.log(ws) + kern + 1j * (np.pi / 2)
        self.log_xi = np.log(self.xi)

    def moments(self, v, powers=(0,)):
        """sum_k k^j p(k) e^{kv}, continued, for 0 <= Im v <= pi; shape (len(powers), len(v))."""
        v = np.atleast_1d(np.asarray(v, dtype=complex))
        out = np.empty((len(powers), v.shape[0]), dtype=complex)
        vr, vi = np.ascontiguousarray(v.real), np.ascontiguousarray(v.imag)
        xr, xi_ = np.ascontiguousarray(self.xi.real), np.ascontiguousarray(self.xi.imag)
        for row, j in enumerate(powers):
            lw = self.base + j * self.log_xi
            val = _accel.expsum(np.ascontiguousarray(lw.real), np.ascontiguousarray(lw.imag), xr, xi_, vr, vi)
            if self.head.size:
                hk = self.head.astype(float)
                val = val + (np.exp(self.head_logp[None, :] + np.outer(v, hk)) * hk[None, :] ** j).sum(axis=1)
            out[row] = val
        return out


def _bucket(x):
    return 2.0 ** math.ceil(math.log2(max(x, 1.0 / 64)))


@functools.lru_cache(maxsize=32)
def _rule(model, x_bucket):
    return _LineRule(model, x_bucket)


def _to_v(z):
    """v = log z with Im v in [0, 2 pi); also return a mask of points needing conjugation."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    lower = z.imag < 0
    zz = np.where(lower, np.conj(z), z)
    v = np.log(np.abs(zz)) + 1j * np.angle(zz)
    return v, lower


def lindelof_moments(model, v, powers=(0,)):
    """Continued sums sum_k k^j p(k) e^{kv} at v = x + i theta with 0 <= theta <= pi."""
    model = exactprob.normalized(model)
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if np.any(v.imag < 0) or np.any(v.imag > np.pi):
        raise DomainError("Im v must lie in [0, pi]; use conjugate symmetry for the lower half-plane")
    # panel widths must resolve the oscillation e^{isx} for either sign of x
    x_max = float(np.max(np.abs(v.real))) if v.size else 0.0
    return _rule(model, _bucket(x_max)).moments(v, powers)


def lindelof_G(model, z):
    """G(z) continued to the plane slit along [1, inf); accepts scalars or arrays."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    on_slit = (z.imag == 0) & (z.real >= 1)
    if np.any(on_slit):
        raise SlitError("z lies on the branch cut [1, inf); use boundary_G for rim values")
    out = np.zeros(z.shape, dtype=complex)
    nz = z != 0
    v, lower = _to_v(z[nz])
    g = lindelof_moments(model, v)[0]
    g = np.where(lower, np.conj(g), g)
    out[nz] = g
    return complex(out[0]) if scalar else out


def boundary_G(model, t, powers=(0,)):
    """Upper-rim values of the continued moment sums at z = e^t + i0, t > 0."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return lindelof_moments(model, t + 0j, powers)


def series_G(model, z, powers=(0,)):
    """Direct power series, valid for |z| <= 1."""
    model, cum = setup(model)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    k = np.arange(1, cum.cutoff + 1)
    lp = model.log_p(k)
    logz = np.log(z)
    out = np.empty((len(powers), z.shape[0]), dtype=complex)
    for row, j in enumerate(powers):
        terms = np.exp(lp[None, :] + np.outer(logz, k)) * (k.astype(float) ** j)[None, :]
        out[row] = terms.sum(axis=1)
    return out


# -- phi on the real axis and its rim -------------------------------------------

def phi_complex(model, t):
    """(phi, phi', phi'') at real t: series for t <= 0, upper-rim continuation for t > 0."""
    t = float(t)
    if t <= 0:
        g = series_G(model, np.exp(t), (0, 1, 2))[:, 0]
    else:
        g = boundary_G(model, t, (0, 1, 2))[:, 0]
    d1 = g[1] / g[0]
    d2 = g[2] / g[0] - d1 * d1
    return np.log(g[0]), d1, d2


def phi_boundary(model, t, r=None):
    """(Re phi(t), Re phi'(t), Re phi''(t)).

    For t <= 0 the generating series is summed directly; for t > 0 the value
    is the upper-rim limit of the Lindelof continuation, evaluated exactly at
    the rim.  ``r`` is accepted for interface symmetry with the Taylor
    form :func:`phi_taylor`.
    """
    p0, p1, p2 = phi_complex(model, t)
    return float(p0.real), float(p1.real), float(p2.real)


def phi_taylor(model, t, r):
    """Taylor polynomial sum_{j<=r} kappa_j t^j / j! and its first two derivatives."""
    model, cum = setup(model)
    k = cum.cumulants
    val = d1 = d2 = 0.0
    for j in range(1, r + 1):
        c = k[j - 1] / math.factorial(j)
        val += c * t ** j
        d1 += j * c * t ** (j - 1)
        if j >= 2:
            d2 += j * (j - 1) * c * t ** (j - 2)
    return val, d1, d2


def eta_n(model, n, N, r=6, *, delta=0.25):
    """Root of Re phi'(eta) = mu + N/n on (0, delta)."""
    model, cum = setup(model)
    if N == 0:
        return 0.0
    target = N / n

    def taylor_g(e):
        return phi_taylor(model, e, r)[1] - cum.mu - target

    def taylor_gp(e):
        return phi_taylor(model, e, r)[2]

    guess = N / (n * cum.sigma2)
    try:
        hi = min(delta, 4 * guess)
        lo, hi, flo, fhi = (0.0, hi, taylor_g(0.0), taylor_g(hi))
        if fhi > 0:
            guess = bracketed_newton(taylor_g, taylor_gp, lo, hi, flo=flo, fhi=fhi)
    except BracketError:
        pass

    def g(e):
        return phi_boundary(model, e)[1] - cum.mu - target

    def gp(e):
        return phi_boundary(model, e)[2]

    # Re phi' is not monotone on the rim; bracket its first upward crossing
    lo, hi = 0.0, min(max(guess, 1e-12), delta) / 64.0
    g_hi = g(hi)
    while g_hi <= 0:
        if hi >= delta:
            raise NoRootError(f"Re phi' - mu stays below N/n={target:.4g} on (0, {delta}]")
        lo, hi = hi, min(1.25 * hi, delta)
        g_hi = g(hi)
    return bracketed_newton(g, gp, lo, hi, flo=-target if lo == 0 else None, fhi=g_hi, xtol_rel=1e-13)


# -- Bromwich integral and the dual function ------------------------------------

def xi_of_t(model, t):
    """Solution of q'(xi) = t in the tail region where q' is decreasing."""
    model = exactprob.normalized(model)
    t = float(t)
    if t <= 0:
        raise DomainError("t must be positive")
    if model.family.value == "stretched":
        alpha = model.param_dict["alpha"]
        return (t / alpha) ** (1.0 / (alpha - 1.0))
    x_lo = model.x_regular * (1 + 1e-12)
    t_max = float(model.dq(x_lo))
    if t >= t_max:
        raise DomainError(f"t={t} exceeds the range q'(x_regular)={t_max:.6g}")

    def g(x):
        return float(model.dq(x)) - t

    def gp(x):
        return float(model.d2q(x))

    lo, hi, flo, fhi = expand_upward(g, x_lo, 2 * x_lo)
    return bracketed_newton(g, gp, lo, hi, flo=flo, fhi=fhi, xtol_rel=1e-15)


def t_range(model):
    """Upper end of the t-range on which xi(t) and psi(t) are defined."""
    model = exactprob.normalized(model)
    if model.x_regular <= 0:
        return math.inf
    return float(model.dq(model.x_regular * (1 + 1e-12)))


def psi(model, t):
    """(psi, psi'', psi''') with psi(t) = t xi(t) - q(xi(t))."""
    model = exactprob.normalized(model)
    x = xi_of_t(model, t)
    q2 = float(model.d2q(x))
    q3 = float(model.d3q(x))
    return t * x - float(model.q(x)), 1.0 / q2, -q3 / q2 ** 3


def log_im_G_saddle(model, t):
    ps, ps2, _ = psi(model, t)
    return math.log(0.5) + 0.5 * math.log(2 * math.pi * abs(ps2)) + ps


def im_G_saddle(model, t):
    """Leading saddle-point approximation of Im G(e^t)."""
    return math.exp(log_im_G_saddle(model, t))


def log_im_G_stretched_asymptote(model, t):
    """Small-t asymptote of log Im G(e^t) for stretched weights of index alpha."""
    model = exactprob.normalized(model)
    alpha = model.param_dict["alpha"]
    pref = 0.5 * math.log(2 * math.pi / ((1 - alpha) * alpha ** (-1.0 / (1 - alpha))))
    expo = -(1 - alpha) * (alpha / t) ** (alpha / (1 - alpha))
    return model.log_c - math.log(2.0) + pref + expo - (2 - alpha) / (2 - 2 * alpha) * math.log(t)


@dataclass(frozen=True)
class BromwichValue:
    log_abs: float
    sign: float
    rel_error: float
    line: float

    @property
    def value(self):
        return self.sign * math.exp(self.log_abs) if self.sign else 0.0


def bromwich(model, t, line=None, *, rtol=1e-11):
    """Im G(e^t) = int_0^inf Re[e^{t xi} p(xi)] ds on xi = line + is, in log form."""
    model = exactprob.normalized(model)
    t = float(t)
    if t <= 0:
        return BromwichValue(-math.inf, 0.0, 0.0, float("nan"))
    bp = model.b_line()
    if line is None:
        line = bp
        if t < t_range(model):
            line = max(bp, xi_of_t(model, t))
    if line <= model.b:
        raise DomainError(f"Bromwich line {line} must lie right of b={model.b}")

    def log_f(s):
        xi = line + 1j * np.asarray(s, dtype=float)
        return t * xi + model.log_p_complex(xi)

    # envelope scan for the tail cutoff
    q2 = abs(float(model.d2q(line))) if line > model.x_regular else 1.0
    h = min(1.0, 1.0 / math.sqrt(q2)) if q2 > 0 else 1.0
    probe = np.concatenate([[0.0], h * np.geomspace(1e-3, 1e12, 600)])
    env = np.real(log_f(probe))
    e_max = float(np.max(env))
    bad = np.nonzero(env >= e_max - TAIL_NATS)[0]
    if bad.max() + 1 >= probe.size:
        raise QuadratureError("Bromwich integrand does not decay along the line")
    s_max = float(probe[bad.max() + 1])
    freq = t + abs(float(model.dq(line)))
    cap = max(h, math.pi / freq)
    breaks = geometric_breaks(0.0, s_max, min(h, cap) / 4, growth=1.3, cap=cap)
    res = integrate(lambda s: np.real(np.exp(log_f(s) - e_max)), breaks, rtol=rtol)
    val = res.value.real
    if val == 0:
        return BromwichValue(-math.inf, 0.0, math.inf, line)
    return BromwichValue(e_max + math.log(abs(val)), math.copysign(1.0, val), res.error / abs(val), line)


def im_G_bromwich(model, t, line=None):
    """Im G(e^t + i0) from the Bromwich integral (float; may underflow to 0)."""
    return bromwich(model, t, line).value


def log_im_G_bromwich(model, t, line=None):
    return bromwich(model, t, line).log_abs


def laplace_roundtrip(model, k, *, rtol=1e-9):
    """(1/pi) int_0^inf e^{-t k} Im G(e^t) dt, which reproduces p(k)."""
    model = exactprob.normalized(model)
    t_hi = (TAIL_NATS + 5.0) / k + 1.0

    def f(ts):
        out = np.empty(ts.shape[0])
        for i, t in enumerate(ts):
            bv = bromwich(model, t, rtol=1e-10)
            out[i] = bv.sign * math.exp(bv.log_abs - t * k) if bv.sign else 0.0
        return out

    breaks = np.concatenate([np.geomspace(1e-3, t_hi, 40)])
    breaks = np.concatenate([[0.0], breaks])
    res = integrate(f, breaks, rtol=rtol, order=15)
    return res.value.real / math.pi


# -- bivariate phase and its critical points ------------------------------------

@dataclass(frozen=True)
class PhasePoint:
    t_n: float
    xi_n: float
    hess_det: float
    hess: tuple
    psi_at_tn: float
    Phi_at_crit: float
    t_prime: float | None = None
    xi_prime: float | None = None
    t_star: float | None = None
    order: int = 0


def _taylor_tilde(cum, R, t):
    """phi(t) - mu t from cumulants 2..R, with first two derivatives."""
    k = cum.cumulants
    val = d1 = d2 = 0.0
    for j in range(2, R + 1):
        c = k[j - 1] / math.factorial(j)
        val += c * t ** j
        d1 += j * c * t ** (j - 1)
        d2 += j * (j - 1) * c * t ** (j - 2)
    return val, d1, d2


def phase(model, n, N, t, xi, R):
    """Phi_n(t, xi) = -q(xi) + n (phi(t) - mu t) - N t + t xi with the Taylor phi of order R."""
    model, cum = setup(model)
    return -float(model.q(xi)) + n * _taylor_tilde(cum, R, t)[0] - N * t + t * xi


def psi_n_derivatives(model, n, N, t, R):
    """(Psi_n'(t), Psi_n''(t)) for Psi_n(t) = n(phi(t) - mu t) - N t + psi(t)."""
    model, cum = setup(model)
    _, d1, d2 = _taylor_tilde(cum, R, t)
    x = xi_of_t(model, t)
    return n * d1 - N + x, n * d2 + 1.0 / float(model.d2q(x))


def phi_n_critical(model, n, N, r=4, *, delta=0.25):
    """Saddle (t_n, xi_n) of the bivariate phase and the second critical point if present.

    Reduces to Psi_n'(t) = 0 with xi = xi(t); the inflection t_star of Psi_n
    separates the two zeros.  The cumulant Taylor form of order r + 2 stands
    in for Re phi near the origin.
    """
    model, cum = setup(model)
    R = min(r + 2, cum.r)
    t_cap = min(delta, t_range(model) * (1 - 1e-9))

    def d1(t):
        return psi_n_derivatives(model, n, N, t, R)[0]

    def d2(t):
        return psi_n_derivatives(model, n, N, t, R)[1]

    # inflection: Psi'' < 0 for small t, > 0 beyond t_star
    grid = np.geomspace(t_cap * 1e-6, t_cap, 400)
    vals = np.array([d2(t) for t in grid])
    idx = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    if idx.size == 0:
        raise BracketError("Psi_n has no inflection point on the t-grid", grid[0], grid[-1])
    lo, hi = grid[idx[0]], grid[idx[0] + 1]

    def d3(t, h=1e-7):
        return (d2(t * (1 + h)) - d2(t * (1 - h))) / (2 * t * h)

    t_star = bracketed_newton(d2, d3, lo, hi)
    if d1(t_star) >= 0:
        raise NoRootError(f"Psi_n' > 0 at its inflection; N={N!r} is below the two-saddle range")
    t_lo = float(model.dq(2.0 * N)) if N > 0 else t_star * 1e-6
    while d1(t_lo) <= 0:
        t_lo /= 2.0
    t_n = bracketed_newton(d1, d2, t_lo, t_star)
    t_prime = xi_prime = None
    sign_change = np.nonzero((grid > t_star) & (np.array([d1(t) for t in grid]) > 0))[0]
    if sign_change.size:
        t_hi = grid[sign_change[0]]
        t_prime = bracketed_newton(d1, d2, t_star, t_hi)
        xi_prime = xi_of_t(model, t_prime)
    xi_n = xi_of_t(model, t_n)
    _, _, tt2 = _taylor_tilde(cum, R, t_n)
    A = n * tt2
    D = -float(model.d2q(xi_n))
    det = A * D - 1.0
    ps = psi(model, t_n)[0]
    Phi = phase(model, n, N, t_n, xi_n, R)
    return PhasePoint(t_n, xi_n, det, ((A, 1.0), (1.0, D)), ps, Phi, t_prime, xi_prime, t_star, R)


def hessian_beta(model, n, N, t, R):
    """Second derivative of Phi_n along the curve xi = xi(t): n phi''(t) + 1/q''(xi(t))."""
    return psi_n_derivatives(model, n, N, t, R)[1]


# -- contour pieces --------------------------------------------------------------

@dataclass(frozen=True)
class ContourResult:
    H_n: float
    V_n: float
    total: float
    eta_n: float
    H_err: float
    V_err: float
    m: int
    cut: str

    @property
    def interval(self):
        e = self.H_err + self.V_err
        return self.total - e, self.total + e


def _rim_values(model, ts):
    """Re G from the rim continuation and Im G from the Bromwich integral (log form)."""
    ts = np.asarray(ts, dtype=float)
    g = boundary_G(model, ts)[0]
    log_im = np.empty(ts.shape[0])
    sgn = np.empty(ts.shape[0])
    for i, t in enumerate(ts):
        bv = bromwich(model, t, rtol=1e-9)
        log_im[i] = bv.log_abs
        sgn[i] = bv.sign
    return g.real, log_im, sgn


def _h_integrand_log(model, n, m, ts):
    """log of |e^{-mt} |G|^n sin(n arg G)| and its sign on the rim."""
    re_g, log_im, sgn = _rim_values(model, ts)
    im_g = sgn * np.exp(log_im)
    mod = np.hypot(re_g, im_g)
    arg = np.arctan2(im_g, re_g)
    na = n * arg
    small = np.abs(na) < 1e-4
    with np.errstate(divide="ignore"):
        # sin(n arg G) ~ n Im G/|G| when the angle is tiny
        log_sin = np.where(small, math.log(n) + log_im - np.log(mod), np.log(np.abs(np.sin(na))))
    sign = np.where(small, sgn, np.sign(np.sin(na)))
    return -m * ts + n * np.log(mod) + log_sin, sign


def _min_arc_cut(model, n, m, t_max, points=160, margin=25.0):
    """Cut for the arc piece when no saddle cut exists.

    Scans upward and stops once n Re phi(eta) - m eta, the log-size of the arc
    integrand at theta = 0, is ``margin`` nats below the one-jump scale
    n p(m - n mu); otherwise returns the minimizer on the scan.
    """
    model, cum = setup(model)
    jump = max(m - n * cum.mu, 1.0)
    target = math.log(n) + float(model.log_p(jump)) - margin
    best, best_t = math.inf, t_max
    for t in np.geomspace(t_max * 1e-4, t_max, points):
        e = n * np.log(boundary_G(model, t)[0][0]).real - m * t
        if e < best:
            best, best_t = e, float(t)
        if e < target:
            return float(t)
    return best_t


def contour_Hn_Vn(model, n, N, *, r=6, delta=0.25, delta_max=4.0, rtol=1e-10, m=None):
    """P(S_n = m) as the sum of the slit piece H_n and the arc piece V_n.

    ``m`` defaults to round(n mu + N); the effective overshoot m - n mu sets
    the vertical cut eta_n.  When eta_n is not available in (0, delta) the
    search continues on (0, delta_max); failing that (Re phi' on the rim is
    bounded), the cut minimizes the arc integrand's peak n Re phi - m eta.
    """
    model, cum = setup(model)
    if m is None:
        m = int(round(n * cum.mu + N))
    N_eff = m - n * cum.mu
    cut = "eta"
    try:
        eta = eta_n(model, n, N_eff, r, delta=delta)
    except NoRootError:
        try:
            # the identity holds for every cut; a deeper saddle keeps the arc free of cancellation
            eta = eta_n(model, n, N_eff, r, delta=max(delta, delta_max))
            cut = "eta-extended"
        except NoRootError:
            cut = "min-arc"
            eta = _min_arc_cut(model, n, m, max(delta, delta_max))
    if eta <= 0:
        raise DomainError("vertical cut must be positive; N must exceed zero")

    # V_n: arc |z| = e^eta, theta in (0, pi)
    def v_log(theta):
        g = lindelof_moments(model, eta + 1j * np.asarray(theta, dtype=float))[0]
        return n * np.log(g) - m * (eta + 1j * np.asarray(theta))

    ref_v = float(np.real(v_log(np.array([0.0]))[0]))

    def v_f(theta):
        return np.real(np.exp(v_log(theta) - ref_v))

    vres = integrate(v_f, np.linspace(0.0, math.pi, 65), rtol=rtol)
    V = math.exp(ref_v) * vres.value.real / math.pi
    V_err = math.exp(ref_v) * vres.error / math.pi

    # H_n: upper rim t in (0, eta)
    probe = np.linspace(eta / 64, eta, 64)
    lp, _ = _h_integrand_log(model, n, m, probe)
    ref_h = float(np.max(lp[np.isfinite(lp)])) if np.any(np.isfinite(lp)) else -math.inf
    if ref_h == -math.inf:
        H, H_err = 0.0, 0.0
    else:
        def h_f(ts):
            lv, sg = _h_integrand_log(model, n, m, ts)
            return np.where(np.isfinite(lv), sg * np.exp(lv - ref_h), 0.0)

        hres = integrate(h_f, np.linspace(0.0, eta, 17), rtol=max(rtol, 1e-8), order=15)
        H = math.exp(ref_h) * hres.value.real / math.pi
        H_err = math.exp(ref_h) * hres.error / math.pi
    return ContourResult(H, V, H + V, eta, H_err, V_err, m, cut)


def v_gaussian(model, n, N, *, r=6):
    """Gaussian evaluation of the arc piece: e^{n Re phi(eta) - m eta}/sqrt(2 pi n Re phi''(eta))."""
    model, cum = setup(model)
    m = n * cum.mu + N
    e = eta_n(model, n, N, r)
    p0, _, p2 = phi_boundary(model, e)
    return n * p0 - m * e - 0.5 * math.log(2 * math.pi * n * p2)


def h_saddle_log(model, n, N, r=4):
    """log of n/sqrt|det Hess| e^{Phi_n} at the saddle (t_n, xi_n)."""
    pp = phi_n_critical(model, n, N, r)
    return math.log(n) - 0.5 * math.log(abs(pp.hess_det)) + pp.Phi_at_crit
