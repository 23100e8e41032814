"""Regime formulas for log P(S_n = n mu + N).

All values are natural logarithms.  The moderate formula is the Cramer
corrected Gaussian term, the big-jump formula is the one-summand term built
from the truncated cost f_nr, and the critical window reports both and adds
them with log-sum-exp.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import contour
from .cramer import cramer_correction
from .errors import BigJumpError, BracketError, NoRootError
from .variational import (Regime, Thresholds, classify_regime, cramer_for, critical_N_star, f_nr, fpp_factor,
                          setup, truncated_critical_point)

R_MAX = 10


@dataclass(frozen=True)
class DeviationEstimate:
    regime: Regime
    log_value: float
    v_term_log: float | None
    h_term_log: float | None
    r_used: int
    saddle: contour.PhasePoint | None = None
    x_nr: float | None = None
    notes: dict = field(default_factory=dict)
    log_exact: float | None = None

    @property
    def value(self):
        return math.exp(self.log_value)

    @property
    def log_ratio(self):
        return None if self.log_exact is None else self.log_value - self.log_exact

    def with_exact(self, log_exact):
        return replace(self, log_exact=log_exact)


@dataclass(frozen=True)
class AutoConfig:
    r_threshold: float = 1e-3
    r_max: int = R_MAX
    force_regime: Regime | None = None
    thresholds: Thresholds = Thresholds()
    large_prefactor: bool = True
    saddle: bool = True


def _logsumexp(*terms):
    vals = [t for t in terms if t is not None]
    if not vals:
        raise ValueError("no components to combine")
    return float(np.logaddexp.reduce(vals))


def select_order(n, N_star, threshold=1e-3, r_max=R_MAX):
    """Smallest r >= 1 with n (N_star/n)^r < threshold, capped at r_max.

    When N_star >= n the Cramer polynomial would be evaluated far outside its
    disc of validity, so the order falls back to 0.
    """
    ratio = N_star / n
    if ratio >= 1:
        warnings.warn(f"N_star/n = {ratio:.3g} >= 1; Cramer series not usable, using r = 0", RuntimeWarning)
        return 0
    for r in range(1, r_max + 1):
        if math.log(n) + r * math.log(ratio) < math.log(threshold):
            return r
    warnings.warn(f"n (N_star/n)^r stays above {threshold} up to r = {r_max}", RuntimeWarning)
    return r_max


def v_term(model, n, N, r):
    model, cum = setup(model)
    s2 = cum.sigma2
    corr = 0.0
    if r > 0:
        corr = N ** 3 / n ** 2 * cramer_correction(cramer_for(model, r), N / n)
    return -N * N / (2 * n * s2) + corr - 0.5 * math.log(2 * math.pi * s2 * n)


def h_term(model, n, N, r, *, prefactor=True, thresholds=Thresholds()):
    """(log n - f_nr(x_nr) [- log sqrt(1 - n sigma^2 |q''(x_nr)|)], x_nr)."""
    model, cum = setup(model)
    lam = cramer_for(model, r) if r > 0 else None
    x = truncated_critical_point(model, n, N, r, lam, thresholds=thresholds)
    val = math.log(n) - float(f_nr(model, n, N, r, lam, x))
    if prefactor:
        fac = fpp_factor(model, n, x)
        if fac <= 0:
            raise BracketError(f"1 - n sigma^2 |q''(x_nr)| = {fac:.3g} is not positive", x, x)
        val -= 0.5 * math.log(fac)
    return val, x


def _check_regime(model, n, N, expected, thresholds):
    try:
        got = classify_regime(model, n, N, thresholds)
    except BigJumpError as exc:
        warnings.warn(str(exc), RuntimeWarning)
        return
    if got is not expected:
        warnings.warn(f"(n={n}, N={N}) classifies as {got.value}, evaluating the {expected.value} formula",
                      RuntimeWarning)


def _saddle(model, n, N, r):
    try:
        return contour.phi_n_critical(model, n, N, max(r, 1))
    except (BigJumpError, ValueError):
        return None


def estimate_moderate(model, n, N, r, *, thresholds=Thresholds(), check=True):
    if check:
        _check_regime(model, n, N, Regime.MODERATE, thresholds)
    v = v_term(model, n, N, r)
    return DeviationEstimate(Regime.MODERATE, v, v, None, r, notes={"v_term": f"cramer r={r}"})


def estimate_critical(model, n, N, r, *, thresholds=Thresholds(), check=True, saddle=True):
    if check:
        _check_regime(model, n, N, Regime.CRITICAL, thresholds)
    notes = {"v_term": f"cramer r={r}"}
    v = v_term(model, n, N, r)
    h = x = None
    try:
        h, x = h_term(model, n, N, r, prefactor=True, thresholds=thresholds)
        notes["h_term"] = "n exp(-f_nr(x_nr)) / sqrt(1 - n sigma^2 |q''(x_nr)|)"
    except BigJumpError as exc:
        notes["h_term"] = f"absent: {exc}"
    sp = _saddle(model, n, N, r) if saddle else None
    return DeviationEstimate(Regime.CRITICAL, _logsumexp(v, h), v, h, r, sp, x, notes)


def estimate_large(model, n, N, r, *, thresholds=Thresholds(), check=True, prefactor=True, saddle=True):
    """One-jump estimate log n - f_nr(x_nr).

    With ``prefactor`` the curvature factor 1/sqrt(1 - n sigma^2 |q''(x_nr)|)
    is kept; it tends to one in the big-jump regime and makes the r = 0 value
    coincide with the refined one-jump heuristic.
    """
    if check:
        _check_regime(model, n, N, Regime.BIGJUMP, thresholds)
    h, x = h_term(model, n, N, r, prefactor=prefactor, thresholds=thresholds)
    notes = {"h_term": "n exp(-f_nr(x_nr))" + (" with curvature prefactor" if prefactor else "")}
    sp = _saddle(model, n, N, r) if saddle else None
    return DeviationEstimate(Regime.BIGJUMP, h, None, h, r, sp, x, notes)


def estimate_bigjump_simple(model, n, N):
    """(log n - q(N), sqrt(n sigma^2) q'(N)); the second value is the insensitivity diagnostic."""
    model, cum = setup(model)
    return math.log(n) - float(model.q(N)), math.sqrt(n * cum.sigma2) * float(model.dq(N))


def estimate_auto(model, n, N, config=AutoConfig(), r=None):
    """Classify, pick the Cramer order, and dispatch to the matching formula."""
    model, _ = setup(model)
    th = config.thresholds
    regime = config.force_regime or classify_regime(model, n, N, th)
    if r is None:
        try:
            scale = critical_N_star(model, n)
        except NoRootError:
            # without an inflection point the overshoot itself bounds the Cramer argument
            scale = N
        r = select_order(n, scale, config.r_threshold, config.r_max)
    forced = config.force_regime is not None
    if regime is Regime.MODERATE:
        return estimate_moderate(model, n, N, r, thresholds=th, check=not forced)
    if regime is Regime.CRITICAL:
        return estimate_critical(model, n, N, r, thresholds=th, check=not forced, saddle=config.saddle)
    return estimate_large(model, n, N, r, thresholds=th, check=not forced,
                          prefactor=config.large_prefactor, saddle=config.saddle)
