"""Scalar special functions, quadrature, root finding and 1-D minimization.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import AccuracyError, BracketError, DomainError, EvaluationError

ScalarFn = Callable[[float], float]

DEFAULT_TOL = 1e-12
SCAN_PROBES = 64
_SQRT_EPS = math.sqrt(2.220446049250313e-16)
_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError(f"bracket endpoints must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise DomainError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class MinimizeResult:
    argmin: float
    value: float
    iterations: int


def _checked(f: ScalarFn, x: float) -> float:
    y = f(x)
    if not math.isfinite(y):
        raise EvaluationError(f"non-finite objective value {y!r} at x={x!r}")
    return y


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

def ln_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if not x > 0.0:
        raise DomainError(f"ln_gamma needs x > 0, got {x!r}")
    return math.lgamma(x)


def abs_normal_moment(p: float) -> float:
    """E|N|^p for a standard normal N, p >= 0.

    Uses E|N|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi), evaluated in log space.
    """
    if not p >= 0.0:
        raise DomainError(f"abs_normal_moment needs p >= 0, got {p!r}")
    return math.exp(0.5 * p * math.log(2.0) + math.lgamma(0.5 * (p + 1.0)) - 0.5 * math.log(math.pi))


def std_normal_cdf(x: float) -> float:
    if x == math.inf:
        return 1.0
    if x == -math.inf:
        return 0.0
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

def find_root(f: ScalarFn, bracket: Bracket, tol: float = DEFAULT_TOL, max_iter: int = 500) -> float:
    """Zero of f inside ``bracket`` by Brent's method.

    Inverse quadratic / secant steps are accepted only while they shrink the
    bracket fast enough; otherwise the step is a bisection, so convergence is
    guaranteed for any continuous f with a sign change.
    """
    a, b = bracket.lo, bracket.hi
    fa, fb = _checked(f, a), _checked(f, b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise BracketError(f"f has the same sign at both ends of [{a}, {b}]: {fa}, {fb}")

    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * 2.220446049250313e-16 * abs(b) + 0.5 * tol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = xm
        else:
            d = e = xm
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, xm)
        fb = _checked(f, b)
    raise AccuracyError(f"find_root did not converge in {max_iter} iterations")


# ---------------------------------------------------------------------------
# minimization
# ---------------------------------------------------------------------------

def _brent_min(f: ScalarFn, a: float, b: float, x: float, fx: float, tol: float, max_iter: int):
    # Brent's localmin: golden section with parabolic acceleration on [a, b].
    w = v = x
    fw = fv = fx
    d = e = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        m = 0.5 * (a + b)
        tol1 = _SQRT_EPS * abs(x) + tol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            break
        p = q = r = 0.0
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            r, e = e, d
        if abs(p) < abs(0.5 * q * r) and q * (a - x) < p < q * (b - x):
            d = p / q
            u = x + d
            if u - a < tol2 or b - u < tol2:
                d = tol1 if x < m else -tol1
        else:
            e = (b if x < m else a) - x
            d = _GOLDEN * e
        u = x + (d if abs(d) >= tol1 else math.copysign(tol1, d))
        fu = _checked(f, u)
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx, it


def minimize_1d(
    f: ScalarFn,
    bracket: Bracket,
    tol: float = DEFAULT_TOL,
    probes: int = SCAN_PROBES,
    max_iter: int = 500,
) -> MinimizeResult:
    """Minimize f on ``bracket``.

    A scan over ``probes`` equispaced points (endpoints included) picks the
    best cell; Brent's method then refines inside the two cells adjacent to
    the best probe. The better of the refined point and the best probe is
    returned, so the result never exceeds the scan minimum.
    """
    if probes < 3:
        raise DomainError("minimize_1d needs at least 3 probes")
    lo, hi = bracket.lo, bracket.hi
    step = (hi - lo) / (probes - 1)
    xs = [lo + i * step for i in range(probes - 1)] + [hi]
    ys = [_checked(f, x) for x in xs]
    i = min(range(probes), key=ys.__getitem__)
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, probes - 1)]
    x, fx, iters = _brent_min(f, a, b, xs[i], ys[i], tol, max_iter)
    if ys[i] < fx:
        x, fx = xs[i], ys[i]
    return MinimizeResult(argmin=x, value=fx, iterations=max(iters, 1))


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def integrate(f: ScalarFn, a: float, b: float, tol: float = 1e-10, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature of f over [a, b] with absolute error target ``tol``.

    Each subinterval gets a share of ``tol`` proportional to its width, but
    never less than ``tol * 1e-9``; the floor lets integrable endpoint
    singularities such as sqrt(x) terminate while adding at most ``tol * 1e-9``
    per refinement level. A subinterval that still fails the local test at
    ``max_depth`` raises AccuracyError.
    """
    if not b > a:
        raise DomainError(f"integrate needs a < b, got [{a}, {b}]")
    total_width = b - a
    fa, fm, fb = _checked(f, a), _checked(f, 0.5 * (a + b)), _checked(f, b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    result = 0.0
    stack = [(a, b, fa, fm, fb, whole, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = _checked(f, lm), _checked(f, rm)
        h = hi - lo
        left = h / 12.0 * (flo + 4.0 * flm + fmid)
        right = h / 12.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s
        if abs(delta) <= 15.0 * max(tol * h / total_width, tol * 1e-9) and depth >= 4:
            result += left + right + delta / 15.0
        elif depth >= max_depth:
            raise AccuracyError(f"adaptive Simpson exceeded depth {max_depth} near x={mid!r}")
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
    return result


def integrate_semiinfinite(f: ScalarFn, tol: float = 1e-10, max_depth: int = 50) -> float:
    """Integral of f over (0, inf) via t = x/(1-x) and adaptive Simpson on [0, 1].

    f must decay fast enough that f(t)/(1-x)^2 -> 0 as x -> 1; the mapped
    integrand is taken as 0 at x = 1.
    """

    def mapped(x: float) -> float:
        if x >= 1.0:
            return 0.0
        one_minus = 1.0 - x
        t = x / one_minus
        if math.isinf(t):
            return 0.0
        y = f(t) / (one_minus * one_minus)
        # f(t) underflowing to 0 while 1/(1-x)^2 overflows gives nan
        return 0.0 if math.isnan(y) and f(t) == 0.0 else y

    return integrate(mapped, 0.0, 1.0, tol=tol, max_depth=max_depth)
