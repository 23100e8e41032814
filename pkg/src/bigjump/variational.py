"""The one-jump variational problem and its critical scales.

For a sum conditioned to overshoot its mean by N, splitting the excess into
one summand of size x and a Gaussian bulk of size N - x costs

    f_n(x) = q(x) + (N - x)^2 / (2 n sigma^2),

and the Cramer-corrected cost f_nr replaces the Gaussian bulk term by the
truncated Legendre transform.  The landscape of f_n changes qualitatively at
three scales: the inflection point x_star of q against the Gaussian
curvature, the onset N_star of a second critical point, and the break-even
point N_2star where the condensed minimum ties the boundary value.
"""

import enum
import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import exactprob
from ._roots import bracketed_newton, expand_upward
from .cramer import cramer_correction, cramer_lambda
from .errors import BelowCLTWindowError, BracketError, DomainError, NoRootError
from .weights import Family


class Regime(enum.Enum):
    MODERATE = "moderate"
    CRITICAL = "critical"
    BIGJUMP = "bigjump"


@dataclass(frozen=True)
class Thresholds:
    eps1: float = 0.05
    eps2: float = 1.0
    clt_floor: float = 1.0
    degenerate_rel: float = 1e-6
    xnr_delta: float = 0.01
    xnr_K: float = 2.0


@dataclass(frozen=True)
class CriticalScales:
    n: float
    x_star: float
    N_star: float
    N_2star: float
    t_star: float


@dataclass(frozen=True)
class CriticalPoints:
    x_prime: float | None
    x_n: float | None
    x_nr: float | None
    r: int
    f_at_xn: float | None
    f_at_a: float
    fpp_factor: float | None


def setup(model):
    model = exactprob.normalized(model)
    return model, exactprob.cumulants(model)


@functools.lru_cache(maxsize=256)
def cramer_for(model, r, precision=None):
    model, cum = setup(model)
    return cramer_lambda(cum, r, precision=precision)


def a_eff(model):
    """Boundary evaluation point for the break-even comparison."""
    if model.family is Family.STRETCHED:
        return 0.0
    if model.family is Family.LOGHAZARD:
        return 1.0
    return model.a


# -- cost functions ----------------------------------------------------------

def f_n(model, n, N, x):
    model, cum = setup(model)
    x = np.asarray(x, dtype=float)
    if np.any(x < model.a):
        raise DomainError(f"x must be at least a={model.a}")
    return model.q(x) + (N - x) ** 2 / (2.0 * n * cum.sigma2)


def f_nr(model, n, N, r, lam, x):
    """f_n minus (N - x)^3/n^2 sum_j lambda_j ((N - x)/n)^j; equals f_n for r = 0."""
    base = f_n(model, n, N, x)
    if r == 0 or lam is None or len(lam.lambdas) == 0:
        return base
    u = N - np.asarray(x, dtype=float)
    tau = u / n
    corr = np.vectorize(lambda v: cramer_correction(lam, v))(tau) if np.ndim(tau) else cramer_correction(lam, float(tau))
    return base - u ** 3 / (n * n) * corr


def _dcorr(lam, tau, order):
    # derivatives of sum_j lambda_j tau^(j+3) with respect to tau
    if lam is None:
        return 0.0
    acc = 0.0
    for j, lv in enumerate(lam.lambdas):
        p = j + 3
        if order == 1:
            acc += p * lv * tau ** (p - 1)
        else:
            acc += p * (p - 1) * lv * tau ** (p - 2)
    return acc


def df_n(model, n, N, x, sigma2):
    return model.dq(x) - (N - x) / (n * sigma2)


def df_nr(model, n, N, x, sigma2, lam):
    return df_n(model, n, N, x, sigma2) + _dcorr(lam, (N - x) / n, 1)


def d2f_nr(model, n, N, x, sigma2, lam):
    return model.d2q(x) + 1.0 / (n * sigma2) - _dcorr(lam, (N - x) / n, 2) / n


# -- scales -------------------------------------------------------------------

def inflection_x_star(model, n):
    """Unique root of q''(x) = -1/(n sigma^2) in the tail region."""
    model, cum = setup(model)
    target = -1.0 / (n * cum.sigma2)
    if model.family is Family.STRETCHED:
        alpha = model.param_dict["alpha"]
        guess = (alpha * (1 - alpha) * n * cum.sigma2) ** (1.0 / (2.0 - alpha))
    else:
        guess = max(2.0 * model.x_regular, 1.0)

    def g(x):
        return float(model.d2q(x)) - target

    def gp(x):
        return float(model.d3q(x))

    lo = model.x_regular * (1 + 1e-12) if model.x_regular > 0 else guess / 2.0
    if model.x_regular > 0 and g(lo) >= 0:
        raise NoRootError(f"n={n} below threshold: min q'' = {float(model.d2q(lo)):.3e} > {target:.3e}")
    while g(lo) >= 0:
        lo /= 2.0
        if lo < 1e-300:
            raise NoRootError("inflection point not bracketed from below")
    hi = max(guess, lo * 2.0)
    lo, hi, flo, fhi = expand_upward(g, lo, hi)
    return bracketed_newton(g, gp, lo, hi, flo=flo, fhi=fhi, xtol_rel=1e-15)


def critical_N_star(model, n):
    model, cum = setup(model)
    xs = inflection_x_star(model, n)
    return xs + n * cum.sigma2 * float(model.dq(xs))


def _x_n(model, n, N, sigma2, x_star, lam=None):
    """Zero of f_n' (or f_nr' when lam is given) on (x_star, N)."""
    def g(x):
        return float(df_nr(model, n, N, x, sigma2, lam))

    def gp(x):
        return float(d2f_nr(model, n, N, x, sigma2, lam))

    return bracketed_newton(g, gp, x_star, N)


def critical_N_doublestar(model, n):
    """Break-even overshoot: f_n(x_n(y)) = f_n(a_eff) at y = N_2star."""
    model, cum = setup(model)
    s2 = cum.sigma2
    xs = inflection_x_star(model, n)
    Ns = xs + n * s2 * float(model.dq(xs))
    a0 = a_eff(model)
    qa = float(model.q(a0)) if a0 > 0 else -model.log_c

    def gap(y):
        xn = _x_n(model, n, y, s2, xs)
        return (float(model.q(xn)) + (y - xn) ** 2 / (2 * n * s2)) - (qa + (y - a0) ** 2 / (2 * n * s2))

    def dgap(y):
        xn = _x_n(model, n, y, s2, xs)
        return -(xn - a0) / (n * s2)

    lo = Ns * (1 + 1e-9)
    flo = gap(lo)
    if flo <= 0:
        raise BracketError(f"break-even gap not positive just above N_star={Ns!r}", lo, lo)
    try:
        lo, hi, flo, fhi = expand_upward(gap, lo, 2.0 * Ns)
    except BracketError as exc:
        raise BracketError(f"no break-even point found in [{Ns!r}, {exc.hi!r}]", Ns, exc.hi) from None
    return bracketed_newton(gap, dgap, lo, hi, flo=flo, fhi=fhi, xtol_rel=1e-14)


def critical_scales(model, n):
    model, cum = setup(model)
    xs = inflection_x_star(model, n)
    Ns = xs + n * cum.sigma2 * float(model.dq(xs))
    return CriticalScales(n=n, x_star=xs, N_star=Ns, N_2star=critical_N_doublestar(model, n),
                          t_star=float(model.dq(xs)))


# -- critical points ---------------------------------------------------------

def critical_points(model, n, N, *, thresholds=Thresholds()):
    model, cum = setup(model)
    s2 = cum.sigma2
    xs = inflection_x_star(model, n)
    Ns = xs + n * s2 * float(model.dq(xs))
    a0 = a_eff(model)
    f_a = float(f_n(model, n, N, a0))
    if abs(N - Ns) <= thresholds.degenerate_rel * Ns:
        f_x = float(f_n(model, n, N, xs))
        return CriticalPoints(None, xs, xs, 0, f_x, f_a, 1.0 - n * s2 * abs(float(model.d2q(xs))))
    if N < Ns:
        return CriticalPoints(None, None, None, 0, None, f_a, None)
    xn = _x_n(model, n, N, s2, xs)

    def g(x):
        return float(df_n(model, n, N, x, s2))

    def gp(x):
        return float(model.d2q(x)) + 1.0 / (n * s2)

    x_prime = None
    lo = model.x_regular * (1 + 1e-9) if model.x_regular > 0 else xs
    if model.x_regular == 0:
        while g(lo) <= 0 and lo > 1e-300:
            lo /= 4.0
    if g(lo) > 0 > g(xs):
        x_prime = bracketed_newton(g, gp, lo, xs)
    fpp = 1.0 - n * s2 * abs(float(model.d2q(xn)))
    return CriticalPoints(x_prime, xn, xn, 0, float(f_n(model, n, N, xn)), f_a, fpp)


def truncated_critical_point(model, n, N, r, lam=None, *, thresholds=Thresholds()):
    """Zero of f_nr' on ((1 + delta) x_star, N)."""
    model, cum = setup(model)
    s2 = cum.sigma2
    if lam is None and r > 0:
        lam = cramer_for(model, r)
    if r == 0:
        lam = None
    xs = inflection_x_star(model, n)
    Ns = xs + n * s2 * float(model.dq(xs))
    lo = (1.0 + thresholds.xnr_delta) * xs

    def g(x):
        return float(df_nr(model, n, N, x, s2, lam))

    def gp(x):
        return float(d2f_nr(model, n, N, x, s2, lam))

    if N <= lo:
        raise BracketError(f"N={N!r} does not exceed (1+delta) x_star={lo!r}", lo, N)
    if g(lo) >= 0:
        # fall back to a scan for the last sign change below N
        grid = np.linspace(lo, N, 2001)
        vals = np.array([g(x) for x in grid])
        idx = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
        if idx.size == 0:
            raise BracketError(
                f"f_nr' has no sign change on [{lo!r}, {N!r}] (min {vals.min():.3e}); "
                f"N={N!r} vs N_star={Ns!r}", lo, N)
        lo = grid[idx[-1]]
    x_nr = bracketed_newton(g, gp, lo, N)
    if abs(N - x_nr) > thresholds.xnr_K * Ns:
        warnings.warn(f"|N - x_nr| = {abs(N - x_nr):.4g} exceeds {thresholds.xnr_K} N_star", RuntimeWarning)
    return x_nr


def fpp_factor(model, n, x):
    model, cum = setup(model)
    return 1.0 - n * cum.sigma2 * abs(float(model.d2q(x)))


# -- regimes ------------------------------------------------------------------

def bigjump_scale(model, n):
    return n ** (1.0 / (2.0 - model.alpha_bound))


def classify_regime(model, n, N, thresholds=Thresholds()):
    if N <= thresholds.clt_floor * math.sqrt(n):
        raise BelowCLTWindowError(f"N={N!r} is inside the central-limit window sqrt(n)={math.sqrt(n):.6g}")
    try:
        Ns = critical_N_star(model, n)
    except NoRootError:
        # q'' never reaches -1/(n sigma^2): no second critical point at any overshoot
        return Regime.MODERATE
    if N <= (1.0 + thresholds.eps1) * Ns:
        return Regime.MODERATE
    if N >= thresholds.eps2 * bigjump_scale(model, n):
        return Regime.BIGJUMP
    return Regime.CRITICAL


# -- closed forms and asymptotes ---------------------------------------------

@dataclass(frozen=True)
class ScaleFormulas:
    x_star: float
    N_star: float
    N_2star: float
    exact: bool
    N_2star_alt: float | None = None


def scale_formulas(model, n):
    """Displayed scale formulas: exact for stretched weights, leading-order asymptotes for log-hazard.

    For log-hazard weights the break-even asymptote is reported twice:
    sqrt(2 n sigma^2 (log n)^beta) in ``N_2star`` and the constant
    2^(1 - beta) that the derivation through log N^2 = 2 log N produces in
    ``N_2star_alt``.
    """
    model, cum = setup(model)
    s2 = cum.sigma2
    if model.family is Family.STRETCHED:
        alpha = model.param_dict["alpha"]
        xs = (alpha * (1 - alpha) * n * s2) ** (1.0 / (2.0 - alpha))
        c_alpha = (2 - alpha) * (2 - 2 * alpha) ** (-(1 - alpha) / (2 - alpha))
        return ScaleFormulas(xs, (2 - alpha) / (1 - alpha) * xs, c_alpha * (n * s2) ** (1.0 / (2.0 - alpha)), True)
    if model.family is Family.LOGHAZARD:
        beta = model.param_dict["beta"]
        L = math.log(n)
        xs = math.sqrt(2.0 ** (1 - beta) * beta * n * s2 * L ** (beta - 1))
        return ScaleFormulas(xs, 2 * xs, math.sqrt(2 * n * s2 * L ** beta), False,
                             math.sqrt(2.0 ** (1 - beta) * n * s2 * L ** beta))
    raise DomainError(f"no closed-form scales for family {model.family.value}")
