"""Exact ground truth: normalization, moments, cumulants and P(S_n = m).

Everything here is a direct finite computation.  Moment sums are truncated
by a relative-summand rule; the n-fold convolution is exact for every value
up to ``m_max`` because all summands are at least one.
"""

import csv
import functools
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from . import _accel
from .errors import BudgetError, DivergenceError, OrderError

MAX_TERMS = 50_000_000
ARRAY_CAP = 5_000_000
LOG_SPACE_FLOOR = 1e-280


def _log_weights(model, k):
    return -model.q_raw(k.astype(float))


def _summation_cutoff(log_term_fn, rel=1e-18, streak=10, block=4096):
    """Blocks of log-summands until ``streak`` consecutive terms fall below ``rel`` times the running sum.

    ``log_term_fn(k)`` returns an array of shape (orders, len(k)); the rule is
    applied to every order.  Returns the list of blocks and the cutoff index.
    """
    chunks = []
    start = 1
    running = None
    carry = 0
    while True:
        k = np.arange(start, start + block, dtype=np.int64)
        lt = log_term_fn(k)
        # scale each order by its block maximum to keep sums finite
        peak = np.max(lt, axis=1, keepdims=True)
        peak = np.where(np.isfinite(peak), peak, 0.0)
        terms = np.exp(lt - peak)
        csum = np.cumsum(terms, axis=1) * np.exp(peak)
        if running is None:
            running = np.zeros((lt.shape[0], 1))
        run = running + csum
        small = np.exp(lt) < rel * run
        allsmall = small.all(axis=0)
        # first position ending `streak` consecutive small terms, counting the run carried in
        flags = np.concatenate([np.ones(carry, dtype=bool), allsmall]).astype(np.int64)
        window = np.convolve(flags, np.ones(streak, dtype=np.int64), mode="valid")
        hits = np.nonzero(window >= streak)[0]
        cut = int(hits[0]) + streak - 1 - carry if hits.size else None
        if cut is not None:
            chunks.append((k[:cut + 1], lt[:, :cut + 1]))
            return chunks, int(k[cut])
        chunks.append((k, lt))
        running = run[:, -1:]
        tail_false = np.nonzero(~allsmall)[0]
        carry = min(streak - 1, allsmall.shape[0] - 1 - int(tail_false[-1]) if tail_false.size else carry + allsmall.shape[0])
        start += block
        block = min(block * 2, 1 << 22)
        if start > MAX_TERMS:
            raise DivergenceError(f"partial sums did not settle within {MAX_TERMS} terms")


def _tail_integral(model, K, log_scale=0.0, power=0):
    """Integral bound for the tail of sum_{k > K} k^power exp(-q_raw(k)), in units of exp(log_scale)."""
    def integrand(x):
        return math.exp(power * math.log(x) - float(model.q_raw(x)) - log_scale)
    val, _ = integrate.quad(integrand, K, np.inf, limit=200)
    return val


def normalize(model, tail_eps=1e-14):
    """Return log c with sum_{k>=1} c exp(-q_raw(k)) = 1 up to ``tail_eps``.

    Direct summation with the relative-summand cutoff, plus an Euler-Maclaurin
    tail estimate from the integral of the smooth extension.
    """
    if not 0.0 < tail_eps <= 1e-6:
        raise ValueError("tail_eps must lie in (0, 1e-6]")
    chunks, K = _summation_cutoff(lambda k: _log_weights(model, k)[None, :], rel=min(1e-18, tail_eps * 1e-4))
    total = math.fsum(float(v) for _, lt in chunks for v in np.exp(lt[0]))
    tail = _tail_integral(model, K) - 0.5 * math.exp(-float(model.q_raw(K)))
    if not math.isfinite(tail) or tail > 1e3 * total:
        raise DivergenceError("tail integral does not converge; weights are not summable")
    total += max(tail, 0.0)
    return -math.log(total)


@functools.lru_cache(maxsize=64)
def normalized(model, tail_eps=1e-14):
    """The model with ``log_c`` populated (identity if already normalized)."""
    if model.log_c is not None:
        return model
    return model.with_log_c(normalize(model, tail_eps))


def _ensure(model):
    return model if model.log_c is not None else normalized(model)


@dataclass(frozen=True)
class CumulantSet:
    log_c: float
    moments: tuple
    cumulants: tuple
    mu: float
    sigma2: float
    r: int
    central: tuple = field(default=(), repr=False)
    cutoff: int = 0

    def kappa(self, j):
        """kappa_j, 1-based."""
        if not 1 <= j <= self.r:
            raise OrderError(f"cumulant of order {j} not available (r={self.r})")
        return self.cumulants[j - 1]


def moments_to_cumulants(moments):
    """Standard recursion kappa_n = m_n - sum_{k<n} C(n-1, k-1) kappa_k m_{n-k}, exact on the given floats."""
    m = [Fraction(1)] + [Fraction(float(v)) for v in moments]
    kap = [Fraction(0)]
    for n in range(1, len(m)):
        s = m[n]
        for k in range(1, n):
            s -= math.comb(n - 1, k - 1) * kap[k] * m[n - k]
        kap.append(s)
    return [float(v) for v in kap[1:]]


@functools.lru_cache(maxsize=64)
def cumulants(model, r=12):
    """Raw moments m_1..m_r by direct summation, cumulants by recursion."""
    if not 1 <= r <= 12:
        raise OrderError("cumulant order must lie in 1..12")
    model = _ensure(model)
    log_c = model.log_c
    r_eff = max(r, 2)
    orders = np.arange(r_eff + 1, dtype=float)[:, None]

    def log_terms(k):
        return orders * np.log(k.astype(float))[None, :] + log_c + _log_weights(model, k)[None, :]

    with np.errstate(over="raise"):
        try:
            chunks, K = _summation_cutoff(log_terms)
        except FloatingPointError as exc:
            raise OverflowError("moment sums overflow before truncation converged") from exc
    sums = []
    for j in range(1, r_eff + 1):
        sums.append(math.fsum(float(v) for _, lt in chunks for v in np.exp(lt[j])))
    mu = sums[0]
    central = []
    for j in range(1, r_eff + 1):
        central.append(math.fsum(
            float(v) for kk, lt in chunks
            for v in np.exp(lt[0]) * (kk.astype(float) - mu) ** j))
    kap = moments_to_cumulants(sums)
    return CumulantSet(log_c=log_c, moments=tuple(sums[:r]), cumulants=tuple(kap[:r]),
                       mu=kap[0], sigma2=kap[1], r=r, central=tuple(central[:r]), cutoff=K)


# -- convolution oracle -------------------------------------------------------

@dataclass
class Pmf:
    offset: int
    probs: np.ndarray
    tail_mass_bound: float
    log_probs: np.ndarray | None = None

    def values(self):
        return np.arange(self.offset, self.offset + self.probs.shape[0])

    def log(self):
        if self.log_probs is not None:
            return self.log_probs
        with np.errstate(divide="ignore"):
            return np.log(self.probs)

    def at(self, m):
        i = m - self.offset
        if not 0 <= i < self.probs.shape[0]:
            raise IndexError(f"value {m} outside support window")
        return float(self.probs[i])

    def log_at(self, m):
        return float(self.log()[m - self.offset])

    def to_csv(self, fh=None):
        """Write columns value, prob, log_prob; returns the text if no handle is given."""
        own = fh is None
        fh = io.StringIO() if own else fh
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["value", "prob", "log_prob"])
        for v, p, lp in zip(self.values(), self.probs, self.log()):
            w.writerow([int(v), repr(float(p)), repr(float(lp))])
        return fh.getvalue() if own else None


def _step(a, oa, b, ob, m_max, log_space):
    off = oa + ob
    length = m_max - off + 1
    if length <= 0:
        return np.empty(0), off
    if log_space:
        return _accel.log_convolve(a, b, length), off
    return _accel.convolve(a, b, length), off


def _nfold(base, n, m_max, log_space, method):
    """n-fold power of ``base`` (offset 1); also returns the smallest entry seen."""
    seen = [np.min(base) if base.size else np.inf]

    def step(a, oa, b, ob):
        out, off = _step(a, oa, b, ob, m_max, log_space)
        if out.size:
            seen.append(np.min(out))
        return out, off

    if method == "sequential":
        acc, oa = base, 1
        for _ in range(n - 1):
            acc, oa = step(acc, oa, base, 1)
        return acc, oa, min(seen)
    if method != "doubling":
        raise ValueError(f"unknown convolution method {method!r}")
    acc, oa = None, 0
    pw, op = base, 1
    k = n
    while k:
        if k & 1:
            if acc is None:
                acc, oa = pw, op
            else:
                acc, oa = step(acc, oa, pw, op)
        k >>= 1
        if k:
            pw, op = step(pw, op, pw, op)
    return acc, oa, min(seen)


def convolve_exact(model, n, m_max, *, method="doubling", log_space=None):
    """Law of S_n on [n, m_max] by dense n-fold convolution.

    ``method`` is ``"doubling"`` (binary powering) or ``"sequential"``.  With
    ``log_space=None`` the linear path runs first and is redone on
    log-weights if any intermediate entry falls below 1e-280.
    """
    if n < 1 or m_max < n:
        raise ValueError("need n >= 1 and m_max >= n")
    if m_max - n + 1 > ARRAY_CAP:
        raise BudgetError(f"support window {m_max - n + 1} exceeds cap {ARRAY_CAP}")
    model = _ensure(model)
    width = m_max - n + 1
    logp = model.log_p(np.arange(1, width + 1))
    if not log_space:
        pr, off, smallest = _nfold(np.exp(logp), n, m_max, False, method)
        if log_space is False or smallest >= LOG_SPACE_FLOOR:
            tail = max(0.0, 1.0 - math.fsum(pr))
            return Pmf(off, pr, tail)
    lp, off, _ = _nfold(logp, n, m_max, True, method)
    probs = np.exp(lp)
    tail = max(0.0, 1.0 - math.fsum(probs))
    return Pmf(off, probs, tail, lp)


def exact_point_prob(model, n, m, **kw):
    """P(S_n = m)."""
    if m < n:
        return 0.0
    return convolve_exact(model, n, m, **kw).at(m)


def exact_log_point_prob(model, n, m, **kw):
    if m < n:
        return -math.inf
    return convolve_exact(model, n, m, **kw).log_at(m)


def point_prob_rel_error(n, m, tail_eps=1e-14):
    """Relative error budget: normalization error amplified n times plus summation round-off."""
    return n * tail_eps + 4.0 * n * math.log2(max(m, 2)) * np.finfo(float).eps
