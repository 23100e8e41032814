"""Heavy-tailed weight families p(k) = exp(-q(k)).

A :class:`WeightModel` bundles the un-normalized hazard ``q_raw`` with its
first three derivatives (closed form), an analytic extension to complex
arguments, and the domain metadata the asymptotic machinery relies on:

* ``a``: left end of the interval on which q is smooth,
* ``b``: abscissa beyond which p(xi) is analytic,
* ``alpha_bound``: exponent with x q'(x) <= alpha_bound * q(x) in the tail,
* ``x_regular``: left end of the region where q' > 0, q'' < 0, q''' > 0.

The normalized hazard is ``q = q_raw - log_c``; ``log_c`` is filled in by
:func:`bigjump.exactprob.normalize`.
"""

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DomainError, NotNormalizedError, ParameterError


class Family(enum.Enum):
    STRETCHED = "stretched"
    LOGHAZARD = "loghazard"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class WeightModel:
    family: Family
    params: tuple
    q_raw: Callable = field(repr=False)
    dq_raw: Callable = field(repr=False)
    d2q_raw: Callable = field(repr=False)
    d3q_raw: Callable = field(repr=False)
    q_complex: Callable = field(repr=False)
    a: float
    b: float
    alpha_bound: float
    x_regular: float
    log_c: float | None = None

    @property
    def key(self):
        return (self.family, self.params, self.a, self.b, self.log_c)

    def __eq__(self, other):
        return isinstance(other, WeightModel) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def param_dict(self):
        return dict(self.params)

    @property
    def label(self):
        inner = ",".join(f"{k}={v!r}" for k, v in self.params)
        return f"{self.family.value}({inner})"

    @property
    def normalized(self):
        return self.log_c is not None

    def with_log_c(self, log_c):
        return replace(self, log_c=float(log_c))

    def _shift(self):
        if self.log_c is None:
            raise NotNormalizedError(f"{self.label} has no normalization constant yet")
        return self.log_c

    # normalized hazard and its derivatives
    def q(self, x):
        return self.q_raw(x) - self._shift()

    def dq(self, x):
        return self.dq_raw(x)

    def d2q(self, x):
        return self.d2q_raw(x)

    def d3q(self, x):
        return self.d3q_raw(x)

    def log_p(self, k):
        """log P(X = k) for integers k >= 1."""
        return self._shift() - self.q_raw(np.asarray(k, dtype=float))

    def p(self, k):
        return np.exp(self.log_p(k))

    def log_p_complex(self, xi):
        """Analytic symbol log p(xi) = log c - q_raw(xi) for Re xi > b."""
        return self._shift() - self.q_complex(np.asarray(xi, dtype=complex))

    def b_line(self):
        """Half-integer abscissa just right of ``b`` used for contour integrals.

        A half-integer keeps the line away from the poles of pi/sin(pi xi);
        the finitely many weights p(1), ..., p(floor(b')) left of it are
        summed explicitly.
        """
        return math.floor(self.b) + 0.5


# -- stretched exponential ----------------------------------------------------

def make_stretched(alpha):
    """Weights p(k) = c exp(-k^alpha), 0 < alpha < 1."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")

    def q_raw(x):
        return np.power(x, alpha)

    def dq(x):
        return alpha * np.power(x, alpha - 1.0)

    def d2q(x):
        return alpha * (alpha - 1.0) * np.power(x, alpha - 2.0)

    def d3q(x):
        return alpha * (alpha - 1.0) * (alpha - 2.0) * np.power(x, alpha - 3.0)

    def qc(xi):
        return np.exp(alpha * np.log(xi))

    return WeightModel(Family.STRETCHED, (("alpha", alpha),), q_raw, dq, d2q, d3q, qc,
                       a=0.0, b=0.0, alpha_bound=alpha, x_regular=0.0)


# -- logarithmic hazard -------------------------------------------------------

def _loghazard_regular_point(beta):
    # larger root of 2L^2 - 3(beta-1)L + (beta-1)(beta-2) = 0, where q''' changes sign
    b1 = beta - 1.0
    disc = 9.0 * b1 * b1 - 8.0 * b1 * (beta - 2.0)
    return math.exp((3.0 * b1 + math.sqrt(disc)) / 4.0)


def make_loghazard(beta, b=2.0):
    """Weights p(k) = c exp(-(log k)^beta), beta > 2."""
    beta = float(beta)
    if not beta > 2.0:
        raise ParameterError(f"beta must exceed 2, got {beta}")
    if not b > 1.0:
        raise ParameterError(f"analytic abscissa b must exceed 1, got {b}")

    def q_raw(x):
        x = np.asarray(x, dtype=float)
        lx = np.log(np.where(x >= 1.0, x, 1.0))
        return np.power(lx, beta)

    def dq(x):
        lx = np.log(x)
        return beta * np.power(lx, beta - 1.0) / x

    def d2q(x):
        lx = np.log(x)
        return beta * np.power(lx, beta - 2.0) * ((beta - 1.0) - lx) / (x * x)

    def d3q(x):
        lx = np.log(x)
        poly = (beta - 1.0) * (beta - 2.0) - 3.0 * (beta - 1.0) * lx + 2.0 * lx * lx
        return beta * np.power(lx, beta - 3.0) * poly / x ** 3

    def qc(xi):
        return np.exp(beta * np.log(np.log(xi)))

    x_reg = _loghazard_regular_point(beta)
    # sup of x q'/q = beta / log x over a geometric grid starting at e^(beta+1)
    grid = np.geomspace(math.exp(beta + 1.0), 1e12, 200)
    alpha_bound = float(np.max(grid * dq(grid) / q_raw(grid)))
    return WeightModel(Family.LOGHAZARD, (("beta", beta),), q_raw, dq, d2q, d3q, qc,
                       a=1.0, b=float(b), alpha_bound=alpha_bound, x_regular=x_reg)


def make_custom(q_raw, dq, d2q, d3q, q_complex, *, a=0.0, b=0.0, alpha_bound=0.5, x_regular=None, name="custom"):
    """User-supplied hazard.  Assumptions are checked on grids only."""
    if not 0.0 < alpha_bound < 1.0:
        raise ParameterError(f"alpha_bound must lie in (0, 1), got {alpha_bound}")
    return WeightModel(Family.CUSTOM, (("name", name),), q_raw, dq, d2q, d3q, q_complex,
                       a=float(a), b=float(b), alpha_bound=float(alpha_bound),
                       x_regular=float(a if x_regular is None else x_regular))


def make_geometric(ratio=0.5):
    """p(k) = (1 - r) r^(k-1) written as exp(-k log(1/r)); light-tailed oracle model."""
    lam = -math.log(ratio)

    def q_raw(x):
        return lam * np.asarray(x, dtype=float)

    def dq(x):
        return lam + 0.0 * np.asarray(x, dtype=float)

    def zero(x):
        return 0.0 * np.asarray(x, dtype=float)

    def qc(xi):
        return lam * np.asarray(xi, dtype=complex)

    return make_custom(q_raw, dq, zero, zero, qc, a=0.0, b=0.0, alpha_bound=0.5, name=f"geometric{ratio!r}")


def make_model(family, **params):
    family = Family(family) if not isinstance(family, Family) else family
    if family is Family.STRETCHED:
        return make_stretched(params["alpha"])
    if family is Family.LOGHAZARD:
        return make_loghazard(params["beta"], **{k: v for k, v in params.items() if k == "b"})
    if params.get("name", "").startswith("geometric"):
        return make_geometric(params.get("ratio", 0.5))
    raise ParameterError(f"cannot build {family.value} model from parameters {params}")


# -- assumption checks --------------------------------------------------------

@dataclass
class AssumptionReport:
    passed: bool
    items: dict
    violations: list
    x: np.ndarray
    signs: np.ndarray
    c1: float
    c2: float
    c3: float
    c4: float
    growth_ratio: np.ndarray
    power_ratio: np.ndarray

    def summary(self):
        lines = [f"{k}: {'pass' if v else 'FAIL'}" for k, v in self.items.items()]
        lines += [f"  violated {item} at x={x:.6g}" for item, x in self.violations]
        return "\n".join(lines)


def tail_grid_start(model):
    """Left end of the region where the growth and power-ratio conditions are expected to hold.

    x q'/log x increases once alpha log x > 1 for stretched weights; the
    power ratio beta/log x of log-hazard weights stays below its bound from
    e^(beta+1) on.
    """
    if model.family is Family.STRETCHED:
        return math.exp(1.0 / model.param_dict["alpha"])
    if model.family is Family.LOGHAZARD:
        return math.exp(model.param_dict["beta"] + 1.0)
    return max(model.a + 1.0, 2.0 * model.x_regular, 2.0)


def validate_assumptions(model, x_grid):
    """Check the structural tail conditions on a finite grid.

    Items: (i) sign pattern of q', q'', q'''; (ii) x q'(x)/log x increasing;
    (iii) |q''| x/q' bounded away from 0 and infinity; (iv) likewise for
    q''' x/|q''|; (v) x q'(x)/q(x) <= alpha_bound.  Violations are reported,
    never raised.
    """
    x = np.sort(np.asarray(x_grid, dtype=float))
    if np.any(x <= model.a):
        raise DomainError(f"grid points must exceed a={model.a}")
    d1, d2, d3 = model.dq(x), model.d2q(x), model.d3q(x)
    shift = model.log_c if model.log_c is not None else 0.0
    qv = model.q_raw(x) - shift
    signs = np.stack([np.sign(d1), np.sign(d2), np.sign(d3)], axis=1)
    violations = []

    ok_i = (d1 > 0) & (d2 < 0) & (d3 > 0)
    violations += [("i", float(v)) for v in x[~ok_i]]

    growth = x * d1 / np.log(x)
    ok_ii = np.ones_like(x, dtype=bool)
    if x.shape[0] > 1:
        ok_ii[1:] = np.diff(growth) > 0
    violations += [("ii", float(v)) for v in x[~ok_ii]]

    with np.errstate(divide="ignore", invalid="ignore"):
        r3 = np.abs(d2) * x / d1
        r4 = d3 * x / np.abs(d2)
    ok_iii = np.isfinite(r3) & (r3 > 0)
    ok_iv = np.isfinite(r4) & (r4 > 0)
    violations += [("iii", float(v)) for v in x[~ok_iii]]
    violations += [("iv", float(v)) for v in x[~ok_iv]]

    power = x * d1 / qv
    ok_v = power <= model.alpha_bound * (1 + 1e-12)
    violations += [("v", float(v)) for v in x[~ok_v]]

    items = {"i": bool(ok_i.all()), "ii": bool(ok_ii.all()), "iii": bool(ok_iii.all()),
             "iv": bool(ok_iv.all()), "v": bool(ok_v.all())}
    finite3 = r3[ok_iii] if ok_iii.any() else np.array([np.nan])
    finite4 = r4[ok_iv] if ok_iv.any() else np.array([np.nan])
    return AssumptionReport(
        passed=all(items.values()), items=items, violations=violations, x=x, signs=signs,
        c1=float(np.min(finite3)), c2=float(np.max(finite3)),
        c3=float(np.min(finite4)), c4=float(np.max(finite4)),
        growth_ratio=growth, power_ratio=power)
