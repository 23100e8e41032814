"""Truncated power series and the Cramer series of a cumulant set.

Coefficients are exact :class:`fractions.Fraction` objects when the inputs
are rational (every float is), or ``mpmath.mpf`` values when requested.  The
same code path handles both since only ring operations and division are
used.
"""

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import NonInvertibleError, OrderError


class TruncatedSeries:
    """c_0 + c_1 x + ... + c_R x^R, arithmetic closed at order R."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order=None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        zero = coeffs[0] * 0 if coeffs else Fraction(0)
        coeffs = coeffs[:order + 1] + [zero] * (order + 1 - len(coeffs))
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def variable(cls, order, one=Fraction(1)):
        return cls([one * 0, one], order)

    def __repr__(self):
        return f"TruncatedSeries({self.coeffs!r})"

    def __getitem__(self, k):
        return self.coeffs[k] if k <= self.order else 0

    def __eq__(self, other):
        return isinstance(other, TruncatedSeries) and self.order == other.order and self.coeffs == other.coeffs

    def truncate(self, order):
        return TruncatedSeries(self.coeffs, order)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries([other], self.order)

    def __add__(self, other):
        other = self._coerce(other)
        R = min(self.order, other.order)
        return TruncatedSeries([self.coeffs[k] + other.coeffs[k] for k in range(R + 1)], R)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries([c * other for c in self.coeffs], self.order)
        R = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(R + 1):
            s = a[0] * b[k]
            for i in range(1, k + 1):
                s += a[i] * b[k - i]
            out.append(s)
        return TruncatedSeries(out, R)

    __rmul__ = __mul__

    def reciprocal(self):
        """1/s for c_0 != 0, by the triangular recursion."""
        c = self.coeffs
        if c[0] == 0:
            raise NonInvertibleError("reciprocal needs a nonzero constant term")
        inv0 = 1 / c[0]
        out = [inv0]
        for k in range(1, self.order + 1):
            s = c[1] * out[k - 1]
            for i in range(2, k + 1):
                s += c[i] * out[k - i]
            out.append(-s * inv0)
        return TruncatedSeries(out, self.order)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return TruncatedSeries([c / other for c in self.coeffs], self.order)

    def derivative(self):
        """Termwise derivative; the top coefficient is lost so the order drops by one."""
        return TruncatedSeries([k * self.coeffs[k] for k in range(1, self.order + 1)] or [self.coeffs[0] * 0],
                               max(self.order - 1, 0))

    def compose(self, inner):
        """self(inner(x)) for an inner series without constant term (Horner)."""
        if inner.coeffs[0] != 0:
            raise ValueError("inner series must have zero constant term")
        R = min(self.order, inner.order)
        inner = inner.truncate(R)
        acc = TruncatedSeries([self.coeffs[R]], R)
        for k in range(R - 1, -1, -1):
            acc = acc * inner + self.coeffs[k]
        return acc

    def __call__(self, x):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc


def series_reverse(s, order=None):
    """Compositional inverse g with s(g(x)) = x + O(x^(R+1)).

    Newton iteration g <- g - (s(g) - x)/s'(g), doubling the number of
    correct coefficients at each pass.
    """
    R = s.order if order is None else order
    if s[0] != 0:
        raise ValueError("series to reverse must have zero constant term")
    if s[1] == 0:
        raise NonInvertibleError("series with vanishing linear term has no compositional inverse")
    one = s[1] / s[1]
    g = TruncatedSeries([one * 0, 1 / s[1]], 1)
    prec = 1
    while prec < R:
        prec = min(2 * prec, R)
        sp = s.truncate(prec)
        g = g.truncate(prec)
        x = TruncatedSeries.variable(prec, one)
        residual = sp.compose(g) - x
        # s'(g) needs one extra coefficient of s before differentiating
        dsp = s.truncate(prec + 1).derivative().compose(g)
        g = g - residual / dsp
    return g.truncate(R)


@dataclass(frozen=True)
class CramerCoeffs:
    lambdas: tuple
    lambdas_exact: tuple
    a: tuple
    kappas: tuple
    r: int

    def __len__(self):
        return len(self.lambdas)


def _as_exact(values, precision):
    if precision is None:
        return [Fraction(float(v)) for v in values]
    with mpmath.workdps(precision):
        return [mpmath.mpf(v) for v in values]


def _factorial(j, one):
    f = one
    for i in range(2, j + 1):
        f = f * i
    return f


def inversion_series(kappas, order):
    """s(t) = sigma^2 t + sum_{j>=2} kappa_{j+1} t^j / j! through t^order."""
    one = kappas[0] / kappas[0] if kappas[0] != 0 else kappas[1] / kappas[1]
    coeffs = [one * 0]
    for j in range(1, order + 1):
        coeffs.append(kappas[j] / _factorial(j, one))
    return TruncatedSeries(coeffs, order)


def legendre_series(kappas, t_series, order):
    """(mu + tau) t(tau) - sum_j kappa_j t(tau)^j / j!, with the mu terms cancelled exactly."""
    one = kappas[1] / kappas[1]
    tau = TruncatedSeries.variable(order, one)
    t = t_series.truncate(order)
    acc = tau * t
    power = t
    for j in range(2, min(len(kappas), order) + 1):
        power = power * t
        acc = acc - power * (kappas[j - 1] / _factorial(j, one))
    return acc


def cramer_lambda(cum, r, *, precision=None, kappas=None):
    """lambda_0..lambda_{r-1} from kappa_1..kappa_{r+2}.

    Sign convention: the Legendre transform sup_{t<=0}(t x - phi(t)) is
    non-negative, and we expand it as
    phi*(mu + tau) = tau^2/(2 sigma^2) - tau^3 sum_j lambda_j tau^j,
    so that lambda_0 = kappa_3/(6 sigma^6) and exp(-n phi*(mu + N/n)) carries
    the factor exp(+N^3/n^2 sum_j lambda_j (N/n)^j).

    ``precision=None`` runs in exact rational arithmetic on the stored
    floats; an integer selects mpmath with that many digits.  ``kappas`` may
    override the cumulants (any sequence of numbers, e.g. Fractions).
    """
    raw = list(cum.cumulants if kappas is None else kappas)
    if r < 0:
        raise OrderError("order must be non-negative")
    if len(raw) < r + 2:
        raise OrderError(f"order {r} needs {r + 2} cumulants, got {len(raw)}")
    if r == 0:
        return CramerCoeffs((), (), (), tuple(raw[:2]), 0)
    exact = raw if all(isinstance(v, Fraction) for v in raw) and precision is None else _as_exact(raw, precision)
    kap = exact[:r + 2]
    ctx = mpmath.workdps(precision) if precision is not None else _null()
    with ctx:
        # t(tau) through tau^(r+1) needs s through t^(r+1), i.e. kappa up to r+2
        s = inversion_series(kap, r + 1)
        t = series_reverse(s)
        t = TruncatedSeries(t.coeffs + [t.coeffs[0] * 0], r + 2)
        big = legendre_series(kap, t, r + 2)
        # phi*(mu + tau) = tau^2/(2 sigma^2) - tau^3 sum lambda_j tau^j
        lam = [-big[j + 3] for j in range(r)]
        a = tuple(t.coeffs[1:r + 2])
        return CramerCoeffs(tuple(float(v) for v in lam), tuple(lam), a, tuple(kap), r)


class _null:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def identity_residual(coeffs):
    """Coefficients through tau^(r+2) of L(tau) - tau^2/(2 sigma^2) + tau^3 sum lambda_j tau^j (all zero when consistent)."""
    kap = list(coeffs.kappas)
    r = coeffs.r
    t = TruncatedSeries([kap[0] * 0] + list(coeffs.a) + [kap[0] * 0], r + 2)
    big = legendre_series(kap, t, r + 2)
    target = [kap[0] * 0] * (r + 3)
    target[2] = 1 / (2 * kap[1])
    for j, lam in enumerate(coeffs.lambdas_exact):
        target[j + 3] = -lam
    return [big[k] - target[k] for k in range(r + 3)]


def cramer_correction(coeffs, tau):
    """sum_{j<r} lambda_j tau^j; the tau^3 prefactor is applied by the caller."""
    acc = 0.0
    for lam in reversed(coeffs.lambdas):
        acc = acc * tau + lam
    return acc


def cramer_correction_derivative(coeffs, tau):
    """d/dtau of sum_j lambda_j tau^(j+3)."""
    acc = 0.0
    for j in range(len(coeffs.lambdas) - 1, -1, -1):
        acc = acc * tau + (j + 3) * coeffs.lambdas[j]
    return acc * tau * tau
