"""Analytic bounds on the expected all-time supremum of B_H(t) - t.

Notation follows the module docstrings of each function: ``h`` is the Hurst
parameter, ``kappa(h) = E|N|^{1/(1-h)}``, ``nu(h) = h^h (1-h)^(1-h)``.
Lower bounds are named ``lower_l*``, upper bounds ``upper_u*``; the
combined envelope is returned by :func:`combined_bounds`.
"""

from __future__ import annotations

import enum
import functools
import math
import threading
from dataclasses import dataclass
from typing import Optional, Union

from .errors import DomainError, RangeError
from .numerics import (
    Bracket,
    abs_normal_moment,
    find_root,
    integrate_semiinfinite,
    ln_gamma,
    minimize_1d,
)

# constants of the lower and Borovkov upper bounds on E sup_{[0,1]} B_H, H <= 1/2
C_MINUS = 1.0 / (2.0 * math.sqrt(math.pi * math.e * math.log(2.0)))
C_PLUS = 1.695

# E sup_{[0,1]} B for standard Brownian motion (reflection principle)
MU_HALF_REFLECTION = math.sqrt(2.0 / math.pi)
# the commonly quoted sqrt(pi/2); larger than the true value, so still a valid upper bound
MU_HALF_LITERAL = math.sqrt(math.pi / 2.0)
MU_HALF_DEFAULT = MU_HALF_REFLECTION

# exclusion margin for the inner searches over H° in (0, H)
INNER_EPS = 1e-6
# largest 2/H for which ceil(2^{2/H}) is formed exactly in double precision
_EXACT_CEIL_LIMIT = 52.0
_KAPPA_H_MAX = 1.0 - 1e-6


@dataclass(frozen=True)
class Hurst:
    value: float

    def __post_init__(self):
        v = self.value
        if isinstance(v, Hurst):
            object.__setattr__(self, "value", v.value)
            v = v.value
        if not (isinstance(v, (int, float)) and 0.0 < v < 1.0):
            raise DomainError(f"Hurst parameter must lie in (0, 1), got {v!r}")
        object.__setattr__(self, "value", float(v))

    @property
    def subdiffusive(self) -> bool:
        return self.value <= 0.5

    @property
    def superdiffusive(self) -> bool:
        return self.value >= 0.5

    def __float__(self) -> float:
        return self.value


HurstLike = Union[Hurst, float]


def _h(h: HurstLike) -> float:
    return h.value if isinstance(h, Hurst) else Hurst(h).value


def _require_sub(h: float, name: str) -> None:
    if h > 0.5:
        raise DomainError(f"{name} is a bound for H in (0, 1/2], got H={h}")


def _require_super(h: float, name: str) -> None:
    if h < 0.5:
        raise DomainError(f"{name} is a bound for H in [1/2, 1), got H={h}")


def _xlogx(x: float) -> float:
    return 0.0 if x == 0.0 else x * math.log(x)


def _exp(log_value: float, what: str) -> float:
    try:
        return math.exp(log_value)
    except OverflowError:
        raise RangeError(f"{what} overflows double precision (log value {log_value:.6g})") from None


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def log_kappa(h: HurstLike) -> float:
    h = _h(h)
    p = 1.0 / (1.0 - h)
    return -0.5 * math.log(math.pi) + 0.5 * p * math.log(2.0) + ln_gamma((2.0 - h) / (2.0 - 2.0 * h))


def kappa(h: HurstLike) -> float:
    """E|N|^{1/(1-H)}, i.e. pi^{-1/2} 2^{1/(2(1-H))} Gamma((2-H)/(2-2H))."""
    hv = _h(h)
    if hv > _KAPPA_H_MAX:
        raise RangeError(f"kappa(H) is not representable for H={hv} > 1 - 1e-6")
    return _exp(log_kappa(hv), f"kappa({hv})")


def nu(h: float) -> float:
    """H^H (1-H)^(1-H); accepts the closed interval [0, 1] with limit value 1 at the ends."""
    h = h.value if isinstance(h, Hurst) else float(h)
    if not 0.0 <= h <= 1.0:
        raise DomainError(f"nu needs H in [0, 1], got {h!r}")
    return math.exp(_xlogx(h) + _xlogx(1.0 - h))


def psi(T: float, h: HurstLike) -> float:
    """Location of sup_{t in [0,1]} t^{1-2H}/(t+T): min{T (1-2H)/(2H), 1}."""
    h = _h(h)
    _require_sub(h, "psi")
    if not T > 0.0:
        raise DomainError(f"psi needs T > 0, got {T!r}")
    return min(T * (1.0 - 2.0 * h) / (2.0 * h), 1.0)


def _pow0(base: float, exponent: float) -> float:
    # 0^0 := 1 by continuity in H at H = 1/2
    if exponent == 0.0:
        return 1.0
    return base ** exponent


def drift_rescale(h: HurstLike, c: float, value_unit_drift: float) -> float:
    """E sup{B_H(t) - c t} from its unit-drift value: multiply by c^{H/(H-1)}."""
    h = _h(h)
    if not c > 0.0:
        raise DomainError(f"drift must be positive, got {c!r}")
    return math.exp(h / (h - 1.0) * math.log(c)) * value_unit_drift


# ---------------------------------------------------------------------------
# superdiffusive regime and global lower bound
# ---------------------------------------------------------------------------

def lower_l1(h: HurstLike) -> float:
    """Largest-term lower bound, valid for every H in (0, 1)."""
    h = _h(h)
    return _exp(
        math.log(0.5) + math.log(nu(h)) / (1.0 - h) + log_kappa(h),
        f"L1({h})",
    )


def upper_u1(h: HurstLike) -> float:
    """Slepian upper bound kappa(H)/2 for H >= 1/2."""
    h = _h(h)
    _require_super(h, "U1")
    return 0.5 * kappa(h)


def lower_l2(h: HurstLike) -> float:
    """Slepian lower bound (1-H) kappa(H) for H <= 1/2."""
    h = _h(h)
    _require_sub(h, "L2")
    return (1.0 - h) * kappa(h)


# ---------------------------------------------------------------------------
# E sup_{[0,1]} B_H and its moments
# ---------------------------------------------------------------------------

def _borovkov_log2_ceil(h: float) -> float:
    n = 2.0 / h
    if n <= _EXACT_CEIL_LIMIT:
        return math.log2(math.ceil(2.0 ** n))
    # log2(2^n + 1) >= log2 ceil(2^n): keeps the upper-bound direction
    return n + math.log2(1.0 + 2.0 ** (-n))


def mu_one_upper_borovkov(h: HurstLike) -> float:
    """C+ / sqrt(2 / log2 ceil(2^{2/H})), the Borovkov bound on E sup_{[0,1]} B_H."""
    h = _h(h)
    _require_sub(h, "the Borovkov bound")
    return C_PLUS * math.sqrt(0.5 * _borovkov_log2_ceil(h))


def sudakov_weight(h: float, h_ref: float) -> float:
    """A(H | H°) = 2(H - H°)/(1 - 2H°)."""
    return 2.0 * (h - h_ref) / (1.0 - 2.0 * h_ref)


def mu_one_upper_sudakov(
    h: HurstLike,
    c_half: float = MU_HALF_DEFAULT,
    borovkov_at_h: bool = False,
) -> float:
    """Sudakov interpolation bound on E sup_{[0,1]} B_H between H° and 1/2.

    Minimizes sqrt(A) c_half + sqrt(1 - A) mubar(H°) over H° in (eps, H - eps),
    with mubar the Borovkov bound. ``borovkov_at_h=True`` evaluates the
    Borovkov bound at H instead of H°.
    """
    h = _h(h)
    _require_sub(h, "the Sudakov bound")
    if h == 0.5:
        # A(1/2 | H°) = 1 for every H°
        return c_half
    lo, hi = INNER_EPS, h - INNER_EPS
    if not lo < hi:
        return math.inf
    fixed = mu_one_upper_borovkov(h) if borovkov_at_h else None

    def objective(h_ref: float) -> float:
        a = sudakov_weight(h, h_ref)
        other = fixed if borovkov_at_h else mu_one_upper_borovkov(h_ref)
        return math.sqrt(a) * c_half + math.sqrt(max(1.0 - a, 0.0)) * other

    return minimize_1d(objective, Bracket(lo, hi)).value


def mu_one_upper(h: HurstLike, c_half: float = MU_HALF_DEFAULT, borovkov_at_h: bool = False) -> float:
    """min of the Borovkov and Sudakov bounds."""
    return min(
        mu_one_upper_borovkov(h),
        mu_one_upper_sudakov(h, c_half=c_half, borovkov_at_h=borovkov_at_h),
    )


def moment_upper_from_mean(mean_upper: float, alpha: float) -> float:
    """Borell-TIS transfer of a bound on E sup to a bound on E sup^alpha, alpha >= 1."""
    if alpha == 1.0:
        return mean_upper
    return (
        mean_upper ** alpha
        + max(1.0, 2.0 ** (alpha - 2.0)) * alpha * math.sqrt(math.pi / 2.0)
        * (mean_upper ** (alpha - 1.0) + abs_normal_moment(alpha - 1.0))
    )


@dataclass(frozen=True)
class MuBounds:
    h: Hurst
    alpha: float
    lower: float
    upper_borovkov: float
    upper_sudakov: float
    upper_combined: float


def mu_bounds(
    h: HurstLike,
    alpha: float,
    c_half: float = MU_HALF_DEFAULT,
    borovkov_at_h: bool = False,
) -> MuBounds:
    """Bounds on mu(H, alpha) = E[(sup_{[0,1]} B_H)^alpha] for H <= 1/2."""
    hv = _h(h)
    _require_sub(hv, "mu_bounds")
    if not alpha >= 1.0:
        raise DomainError(f"alpha must be >= 1, got {alpha!r}")
    bor = mu_one_upper_borovkov(hv)
    sud = mu_one_upper_sudakov(hv, c_half=c_half, borovkov_at_h=borovkov_at_h)
    up_bor = moment_upper_from_mean(bor, alpha)
    up_sud = moment_upper_from_mean(sud, alpha) if math.isfinite(sud) else math.inf
    return MuBounds(
        h=Hurst(hv),
        alpha=float(alpha),
        lower=(C_MINUS / math.sqrt(hv)) ** alpha,
        upper_borovkov=up_bor,
        upper_sudakov=up_sud,
        upper_combined=min(up_bor, up_sud),
    )


def lower_l3(h: HurstLike) -> float:
    """nu(H)^{1/(1-H)} times the lower bound (C-/sqrt(H))^{1/(1-H)} on mu(H)."""
    h = _h(h)
    _require_sub(h, "L3")
    return math.exp((math.log(nu(h)) + math.log(C_MINUS) - 0.5 * math.log(h)) / (1.0 - h))


# ---------------------------------------------------------------------------
# the split-point constant omega(H)
# ---------------------------------------------------------------------------

class OmegaBranch(str, enum.Enum):
    OMEGA0 = "omega0"
    OMEGA1 = "omega1"


@dataclass(frozen=True)
class OmegaBreakdown:
    h: Hurst
    omega: float
    branch: OmegaBranch
    omega0: Optional[float]
    omega1: float
    omega2: float
    tau_circ: Optional[float]
    argmin_T_direct: Optional[float] = None


def omega_objective(T: float, h: float) -> float:
    """T^{H/(1-H)} + (psi^{1-2H} T^H / (psi + T))^{1/(1-H)} with psi = psi(T, H)."""
    p = psi(T, h)
    inner = _pow0(p, 1.0 - 2.0 * h) * T ** h / (p + T)
    return T ** (h / (1.0 - h)) + inner ** (1.0 / (1.0 - h))


def omega1(h: float) -> float:
    return 2.0 * (2.0 * h) ** (h / (1.0 - h)) * _pow0(1.0 - 2.0 * h, (1.0 - 2.0 * h) / (2.0 - 2.0 * h))


def omega1_argmin(h: float) -> float:
    if h == 0.5:
        return 1.0
    return 2.0 * h * (1.0 - 2.0 * h) ** ((1.0 - 2.0 * h) / (2.0 * h))


def omega2(h: float) -> float:
    return 1.0 / nu(h)


def _h0_equation(h: float) -> float:
    r = (2.0 - h) / (1.0 - h)
    return h / (1.0 - h) - r ** (-r)


_H0_LOCK = threading.Lock()
_H0: Optional[float] = None


def h_zero() -> float:
    """Unique root of H/(1-H) = ((2-H)/(1-H))^{-(2-H)/(1-H)}; computed once."""
    global _H0
    if _H0 is None:
        with _H0_LOCK:
            if _H0 is None:
                _H0 = find_root(_h0_equation, Bracket(0.05, 0.4))
    return _H0


def tau_circ(h: HurstLike) -> float:
    """Larger root of a + (a - T)(1 + T)^{-(a+2)} with a = H/(1-H); requires H <= H0."""
    h = _h(h)
    a = h / (1.0 - h)

    def f(T: float) -> float:
        return a + (a - T) * (1.0 + T) ** (-(a + 2.0))

    lo = 1.0 + a
    if f(lo) > 0.0:
        raise DomainError(f"no stationary point beyond 1/(1-H) for H={h} > H0")
    if f(lo) == 0.0:
        return lo
    hi = 2.0 * lo
    for _ in range(200):
        if f(hi) > 0.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise RuntimeError(f"tau_circ bracket search failed for H={h}")
    return find_root(f, Bracket(lo, hi))


def omega0(h: float, tau: float) -> float:
    return tau ** (h / (1.0 - h)) * (1.0 + (1.0 + tau) ** (-1.0 / (1.0 - h)))


def omega_direct(h: HurstLike) -> tuple[float, float]:
    """Brute-force infimum over T > 0 of :func:`omega_objective`, returned as (value, argmin).

    Minimizes over log T on [-30, 30], separately on each side of the kink
    T = 2H/(1-2H) of psi.
    """
    h = _h(h)
    _require_sub(h, "omega")
    obj = lambda s: omega_objective(math.exp(s), h)  # noqa: E731
    lo, hi = -30.0, 30.0
    pieces = [(lo, hi)]
    if h < 0.5:
        kink = math.log(2.0 * h / (1.0 - 2.0 * h))
        if lo < kink < hi:
            pieces = [(lo, kink), (kink, hi)]
    best = min((minimize_1d(obj, Bracket(a, b)) for a, b in pieces), key=lambda r: r.value)
    return best.value, math.exp(best.argmin)


def omega(h: HurstLike, check_direct: bool = False) -> OmegaBreakdown:
    """omega(H) from the branch analysis: omega1 above H0, min(omega0, omega1) below.

    With ``check_direct`` the brute-force minimizer of the defining infimum is
    also recorded in ``argmin_T_direct``.
    """
    hv = _h(h)
    _require_sub(hv, "omega")
    w1 = omega1(hv)
    w2 = omega2(hv)
    w0 = tau = None
    if hv <= h_zero():
        tau = tau_circ(hv)
        w0 = omega0(hv, tau)
    if w0 is not None and w0 < w1:
        value, branch = w0, OmegaBranch.OMEGA0
    else:
        value, branch = w1, OmegaBranch.OMEGA1
    direct = omega_direct(hv)[1] if check_direct else None
    return OmegaBreakdown(
        h=Hurst(hv),
        omega=value,
        branch=branch,
        omega0=w0,
        omega1=w1,
        omega2=w2,
        tau_circ=tau,
        argmin_T_direct=direct,
    )


# ---------------------------------------------------------------------------
# subdiffusive upper bounds
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=4096)
def _upper_u2(h: float, c_half: float, borovkov_at_h: bool) -> float:
    alpha = 1.0 / (1.0 - h)
    mub = mu_bounds(h, alpha, c_half=c_half, borovkov_at_h=borovkov_at_h)
    return omega(h).omega * mub.upper_combined


def upper_u2(h: HurstLike, c_half: float = MU_HALF_DEFAULT, borovkov_at_h: bool = False) -> float:
    """omega(H) times the upper bound on mu(H) = E[(sup_{[0,1]} B_H)^{1/(1-H)}]."""
    h = _h(h)
    _require_sub(h, "U2")
    return _upper_u2(h, float(c_half), bool(borovkov_at_h))


def sudakov_gamma(h: float, h_ref: float) -> float:
    """((1-2H)/(1-2H°))^{(1-2H°)/(2(1-H°))}; vanishes at H = 1/2."""
    return ((1.0 - 2.0 * h) / (1.0 - 2.0 * h_ref)) ** ((1.0 - 2.0 * h_ref) / (2.0 * (1.0 - h_ref)))


def upper_u2_sudakov(h: HurstLike, c_half: float = MU_HALF_DEFAULT, borovkov_at_h: bool = False) -> float:
    """1/2 + inf over H° in (eps, H - eps) of gamma(H | H°) U2(H°)."""
    h = _h(h)
    _require_sub(h, "U2'")
    if h == 0.5:
        return 0.5
    lo, hi = INNER_EPS, h - INNER_EPS
    if not lo < hi:
        return math.inf

    def objective(h_ref: float) -> float:
        return sudakov_gamma(h, h_ref) * _upper_u2(h_ref, float(c_half), bool(borovkov_at_h))

    return 0.5 + minimize_1d(objective, Bracket(lo, hi)).value


def upper_u2_circ(h: HurstLike, c_half: float = MU_HALF_DEFAULT, borovkov_at_h: bool = False) -> float:
    return min(
        upper_u2(h, c_half=c_half, borovkov_at_h=borovkov_at_h),
        upper_u2_sudakov(h, c_half=c_half, borovkov_at_h=borovkov_at_h),
    )


# ---------------------------------------------------------------------------
# combined envelope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    h: Hurst
    l1: float
    l2: Optional[float]
    l3: Optional[float]
    lower_combined: float
    u1: Optional[float]
    u2: Optional[float]
    u2_sudakov: Optional[float]
    u2_circ: Optional[float]
    upper_combined: float
    ratio: float


def combined_bounds(h: HurstLike, c_half: float = MU_HALF_DEFAULT, borovkov_at_h: bool = False) -> BoundsReport:
    """All bounds at one H and the piecewise envelope L(H) <= M(H) <= U(H).

    L1 is reported everywhere (it holds on all of (0, 1)) but enters the
    envelope only for H >= 1/2. At H = 1/2 both regimes apply and the envelope
    takes the best of each side.
    """
    hv = _h(h)
    hurst = Hurst(hv)
    l1 = lower_l1(hv)
    l2 = l3 = u1 = u2 = u2s = u2c = None
    lowers, uppers = [], []
    if hurst.subdiffusive:
        kw = dict(c_half=c_half, borovkov_at_h=borovkov_at_h)
        l2, l3 = lower_l2(hv), lower_l3(hv)
        u2, u2s = upper_u2(hv, **kw), upper_u2_sudakov(hv, **kw)
        u2c = min(u2, u2s)
        lowers += [l2, l3]
        uppers.append(u2c)
    if hurst.superdiffusive:
        u1 = upper_u1(hv)
        lowers.append(l1)
        uppers.append(u1)
    lower, upper = max(lowers), min(uppers)
    return BoundsReport(
        h=hurst,
        l1=l1,
        l2=l2,
        l3=l3,
        lower_combined=lower,
        u1=u1,
        u2=u2,
        u2_sudakov=u2s,
        u2_circ=u2c,
        upper_combined=upper,
        ratio=upper / lower,
    )


def superdiffusive_ratio_closed_form(h: HurstLike) -> float:
    """U1/L1 = H^{H/(H-1)} / (1-H)."""
    h = _h(h)
    return math.exp(h / (h - 1.0) * math.log(h)) / (1.0 - h)


# ---------------------------------------------------------------------------
# time-changed Brownian tail normalizer
# ---------------------------------------------------------------------------

def lambda_u(u: float, h: HurstLike, tol: float = 1e-10) -> float:
    """Reciprocal of int_0^inf (2 pi t^{2H})^{-1/2} exp(-(t+u)^2 / (2 t^{2H})) dt."""
    h = _h(h)
    if not u > 0.0:
        raise DomainError(f"lambda_u needs u > 0, got {u!r}")

    def density(t: float) -> float:
        if t <= 0.0:
            return 0.0
        var = t ** (2.0 * h)
        return math.exp(-((t + u) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)

    if h < 0.25:
        # t = s^{1/(1-H)} flattens the t -> 0 end for small H
        k = 1.0 / (1.0 - h)

        def integrand(s: float) -> float:
            if s <= 0.0:
                return 0.0
            return density(s ** k) * k * s ** (k - 1.0)
    else:
        integrand = density
    return 1.0 / integrate_semiinfinite(integrand, tol=tol)
