"""Singular quadrature for the two alpha-independent integrals on (0, pi).

``I1`` has odd poles at 0, pi/2 and pi and is taken as a principal value with
one common excision radius. ``I2`` is absolutely integrable. Both target
values (pi**2/6 and pi**2/4) are independent of alpha > 0.

Every integrand is evaluated in offset coordinates ``theta = k*pi/4 + sigma*u``
from the nearest catalog angle, so sin/cos keep full relative accuracy next to
the singular points. Panels are integrated with QUADPACK's adaptive
Gauss-Kronrod rule, which never evaluates panel endpoints.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from scipy.integrate import IntegrationWarning, quad

PI = math.pi
QUARTER = PI / 4
SQRT2 = math.sqrt(2.0)
LOG2 = math.log(2.0)

PV_AGREEMENT_TOL = 1e-7
MIN_TOL = 1e-10

# QUADPACK targets; the integrators always work to near machine precision and
# ``tol`` only bounds the error they are allowed to claim.
_EPSABS = 1e-13
_EPSREL = 1e-13
_LIMIT = 500

# excision schedule eps_k = eps0 / 2**k, eps0 = min(EPS0, 1/(4 alpha)); the
# eps-expansion coefficients grow like alpha**j
EPS0 = 1.0 / 16
_EXPONENT_CAP = 6.0
_MAX_LEVELS = 30

# sin/cos of k*pi/4, k = 0..7, with exact zeros
_S = (0.0, 1 / SQRT2, 1.0, 1 / SQRT2, 0.0, -1 / SQRT2, -1.0, -1 / SQRT2)
_C = (1.0, 1 / SQRT2, 0.0, -1 / SQRT2, -1.0, -1 / SQRT2, 0.0, 1 / SQRT2)


class QuadDomainError(ValueError):
    pass


class QuadratureError(RuntimeError):
    """Non-convergence: the claimed error could not be brought below tol."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class PVSchemeDisagreement(QuadratureError):
    """The fold and excision principal-value schemes disagree."""


class IntegrandId(str, Enum):
    I1 = "I1"
    I2 = "I2"


@dataclass
class SingularityCatalog:
    pv_poles: list = field(default_factory=list)
    removable_points: list = field(default_factory=list)
    log_points: list = field(default_factory=list)
    kink_points: list = field(default_factory=list)

    def all_points(self) -> list:
        return sorted(set(self.pv_poles + self.removable_points + self.log_points + self.kink_points))


@dataclass
class ExcisionDiagnostic:
    epsilons: list
    partial_values: list
    extrapolated: float
    extrapolation_error: float
    exponents: list
    fold_value: Optional[float] = None
    agreement: Optional[float] = None


@dataclass
class QuadResult:
    value: float
    error_estimate: float
    subdivisions: int
    excision_diagnostic: Optional[ExcisionDiagnostic] = None


# ---------------------------------------------------------------- trig helpers

def _sincos_shift(k: int, v: float):
    """(sin, cos) of ``k*pi/4 + v``, exact at v = 0."""
    k %= 8
    sv, cv = math.sin(v), math.cos(v)
    return _S[k] * cv + _C[k] * sv, _C[k] * cv - _S[k] * sv


def _trig(k: int, v: float):
    """c, s, c+s and c-s at ``theta = k*pi/4 + v``."""
    s, c = _sincos_shift(k, v)
    sp, cp = _sincos_shift(k + 1, v)
    return c, s, SQRT2 * sp, SQRT2 * cp


def _nearest(theta: float):
    k = int(round(theta / QUARTER))
    return k, theta - k * QUARTER


def _check_alpha(alpha) -> float:
    a = float(alpha)
    if not math.isfinite(a) or a <= 0:
        raise QuadDomainError(f"alpha must be finite and > 0, got {alpha!r}")
    return a


def _check_theta(theta: float):
    if not (0.0 < theta < PI) or theta == PI / 2:
        raise QuadDomainError(f"theta={theta!r} is outside (0, pi) or at a pole of the denominator")


def _softplus(x: float) -> float:
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def _alog(alpha: float, x: float) -> float:
    return alpha * math.log(x) if x > 0 else -math.inf


def _logsumexp(*terms: float) -> float:
    m = max(terms)
    if m == -math.inf:
        return -math.inf
    return m + math.log(math.fsum(math.exp(t - m) for t in terms))


# ---------------------------------------------------------------- kernels

def _k1(alpha, c, s, p):
    # log(|c|^a + |s|^a + |c+s|^a), factored by the largest term
    num = _logsumexp(_alog(alpha, abs(c)), _alog(alpha, abs(s)), _alog(alpha, abs(p)))
    return num / (alpha * c * s)


def _k1_fold(alpha, c, s, p, m):
    """f(theta) + f(pi - theta) for theta in (0, pi/2), written as
    log1p(D/B) / (a c s) with D = (c+s)^a - |c-s|^a, B = c^a + s^a + |c-s|^a.
    Since |c-s| + 2 min(c, s) = c + s, D/(c+s)^a = -expm1(a log(|c-s|/(c+s)))."""
    lo = min(c, s)
    q = 2.0 * lo / p
    if m == 0:
        r = -math.inf
    elif q < 0.5:
        r = math.log1p(-q)
    else:
        r = math.log(abs(m) / p)
    log_d = math.log(-math.expm1(alpha * r))
    log_b = _logsumexp(alpha * math.log(c / p), alpha * math.log(s / p), alpha * r)
    return _softplus(log_d - log_b) / (alpha * c * s)


def _k2(alpha, c, s, x):
    """log(s^a/2 + |x|^a) / (a c s) with x = c + 2^(-1/a) s."""
    la = alpha * math.log(s) - LOG2
    lb = _alog(alpha, abs(x))
    num = _logsumexp(la, lb)
    if abs(num) < 0.5:
        # the argument is near 1 close to pi/2: sum the two offsets from 1/2
        tail = math.expm1(lb + LOG2) if lb > -math.inf else -1.0
        num = math.log1p(0.5 * (math.expm1(la + LOG2) + tail))
    return num / (alpha * c * s)


def _lam(alpha: float) -> float:
    return 2.0 ** (-1.0 / alpha)


def theta_star(alpha: float) -> float:
    """Zero of cos(theta) + 2**(-1/alpha) sin(theta) on (pi/2, pi)."""
    return PI - math.atan(2.0 ** (1.0 / _check_alpha(alpha)))


# ---------------------------------------------------------------- integrands

def integrand1(alpha, theta: float) -> float:
    a = _check_alpha(alpha)
    _check_theta(theta)
    c, s, p, _ = _trig(*_nearest(theta))
    return _k1(a, c, s, p)


def integrand2(alpha, theta: float) -> float:
    a = _check_alpha(alpha)
    _check_theta(theta)
    if theta == theta_star(a):
        raise QuadDomainError("theta is the zero of cos + 2^(-1/alpha) sin")
    c, s, _, _ = _trig(*_nearest(theta))
    return _k2(a, c, s, c + _lam(a) * s)


def fold_integrand1(alpha, theta: float) -> float:
    """integrand1(theta) + integrand1(pi - theta) for theta in (0, pi/2);
    bounded at both ends because the odd poles cancel."""
    a = _check_alpha(alpha)
    if not (0.0 < theta < PI / 2):
        raise QuadDomainError(f"fold is defined on (0, pi/2), got {theta!r}")
    c, s, p, m = _trig(*_nearest(theta))
    return _k1_fold(a, c, s, p, m)


def integrand2_limit(alpha, point: float) -> float:
    """One-sided limit of integrand2 at a removable point (0, pi/2 or pi).

    Near 0 the integrand behaves as 2^(-1/a) + theta^(a-1)/(2a), near pi as
    2^(-1/a) - u^(a-1)/(2a), so for a < 1 the end limits are infinite
    (the singularity is still integrable).
    """
    a = _check_alpha(alpha)
    lam = _lam(a)
    if point == PI / 2:
        return 2.0 ** (1.0 / a - 1.0)
    if point == 0.0:
        return lam if a > 1 else (lam + 0.5 if a == 1 else math.inf)
    if point == PI:
        return lam if a > 1 else (lam - 0.5 if a == 1 else -math.inf)
    raise QuadDomainError(f"{point!r} is not a removable point of integrand2")


def classify_singularities(which, alpha) -> SingularityCatalog:
    a = _check_alpha(alpha)
    which = IntegrandId(which)
    if which is IntegrandId.I1:
        # cos + sin = 0 at 3pi/4; a true kink only for a < 1, listed always
        return SingularityCatalog(pv_poles=[0.0, PI / 2, PI], kink_points=[3 * QUARTER])
    return SingularityCatalog(removable_points=[0.0, PI / 2, PI], log_points=[theta_star(a)])


# ---------------------------------------------------------------- panel engine

def _quad(fun: Callable[[float], float], lo: float, hi: float):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        out = quad(fun, lo, hi, epsabs=_EPSABS, epsrel=_EPSREL, limit=_LIMIT, full_output=1)
    value, err, info = out[:3]
    return value, err, info["last"]


def _quad_power(fun, length: float, power: float):
    """Integrate fun(u) over (0, length) with u = length * w**power, which
    flattens u**(1/power - 1)-type endpoint singularities at u = 0."""
    if power == 1.0:
        return _quad(fun, 0.0, length)

    def g(w):
        return fun(length * w**power) * length * power * w ** (power - 1.0)

    return _quad(g, 0.0, 1.0)


# ---------------------------------------------------------------- integral 1

def _fold_pieces(a):
    # fold integrand on (0, pi/2); half-panels of length pi/8 anchored at
    # 0, pi/4, pi/4, pi/2
    pieces = []
    for k, sigma in ((0, 1), (1, -1), (1, 1), (2, -1)):
        pieces.append(lambda u, k=k, sg=sigma: _k1_fold(a, *_trig(k, sg * u)))
    return pieces


def pv_fold_I1(alpha) -> QuadResult:
    """Principal value of I1 through the reflection theta -> pi - theta.

    With one common radius eps the excised integral equals the integral of
    f(theta) + f(pi - theta) over (eps, pi/2 - eps): the reflection pairs the
    pole at 0 with the one at pi and maps pi/2 onto itself, so all three
    cancel and the limit is an ordinary integral over (0, pi/2).
    """
    a = _check_alpha(alpha)
    total, err, subdiv = 0.0, 0.0, 0
    for piece in _fold_pieces(a):
        v, e, n = _quad(piece, 0.0, QUARTER / 2)
        total += v
        err += e
        subdiv += n
    return QuadResult(total, err, subdiv)


def _excision_exponents(alpha: float) -> list:
    """Powers of eps in I(eps) - I: 1 + j*alpha + k below the cap."""
    raw = sorted(
        1.0 + j * alpha + k
        for k in range(int(_EXPONENT_CAP))
        for j in range(int((_EXPONENT_CAP - 1.0) / alpha) + 1)
        if 1.0 + j * alpha + k < _EXPONENT_CAP
    )
    merged = []
    for p in raw:
        if not merged or p - merged[-1] > 1e-6:
            merged.append(p)
    return merged[:_MAX_LEVELS]


def _richardson(values: list, exponents: list, ratio: float = 2.0):
    """Eliminate eps**p terms (p in order) from values at eps/ratio**i."""
    table = list(values)
    prev = None
    for p in exponents:
        w = ratio**p
        prev = table[1] if len(table) > 1 else table[0]
        table = [(w * table[i + 1] - table[i]) / (w - 1.0) for i in range(len(table) - 1)]
    best = table[0]
    return best, abs(best - prev) if prev is not None else math.inf


def pv_excision_I1(alpha, eps0: Optional[float] = None):
    """Principal value of I1 by direct excision of (eps)-neighbourhoods of
    0, pi/2 and pi and Richardson extrapolation in eps.

    Returns ``(QuadResult, ExcisionDiagnostic)``. The partial integrals are
    built as I(eps0) plus the shells between successive radii.
    """
    a = _check_alpha(alpha)
    if eps0 is None:
        eps0 = min(EPS0, 0.25 / a)
    # the four arms of f running from the poles: 0+, pi/2-, pi/2+, pi-
    arms = [
        (lambda u, k=k, sg=sg: _k1(a, *_trig(k, sg * u)[:3]))
        for k, sg in ((0, 1), (2, -1), (2, 1), (4, -1))
    ]
    exponents = _excision_exponents(a)
    levels = len(exponents)
    err, subdiv = 0.0, 0
    base = 0.0
    for arm in arms:
        v, e, n = _quad(arm, eps0, QUARTER)
        base += v
        err += e
        subdiv += n
    eps = [eps0]
    partial = [base]
    for _ in range(levels):
        hi = eps[-1]
        lo = hi / 2.0
        shell = 0.0
        for arm in arms:
            v, e, n = _quad(arm, lo, hi)
            shell += v
            err += e
            subdiv += n
        eps.append(lo)
        partial.append(partial[-1] + shell)
    value, extrap_err = _richardson(partial, exponents)
    diag = ExcisionDiagnostic(
        epsilons=eps,
        partial_values=partial,
        extrapolated=value,
        extrapolation_error=extrap_err,
        exponents=exponents,
    )
    return QuadResult(value, err + extrap_err, subdiv, diag), diag


def _check_tol(tol: float):
    if not (tol >= MIN_TOL):
        raise QuadDomainError(f"tol must be >= {MIN_TOL}, got {tol!r}")


def pv_integrate_I1(alpha, tol: float = 1e-8) -> QuadResult:
    """Cauchy principal value of I1 (expected pi**2/6 for every alpha > 0).

    Runs both the fold and the excision schemes; the fold value is returned
    once its error estimate is within ``tol`` and the two schemes agree to
    ``PV_AGREEMENT_TOL``.
    """
    a = _check_alpha(alpha)
    _check_tol(tol)
    fold = pv_fold_I1(a)
    excision, diag = pv_excision_I1(a)
    diag.fold_value = fold.value
    diag.agreement = abs(fold.value - excision.value)
    result = QuadResult(fold.value, fold.error_estimate, fold.subdivisions + excision.subdivisions, diag)
    if fold.error_estimate > tol:
        raise QuadratureError(
            f"I1 fold error estimate {fold.error_estimate:.3g} exceeds tol {tol:.3g} at alpha={a}",
            result,
        )
    if diag.agreement > PV_AGREEMENT_TOL:
        raise PVSchemeDisagreement(
            f"I1 fold ({fold.value!r}) and excision ({excision.value!r}) schemes differ by "
            f"{diag.agreement:.3g} at alpha={a}",
            result,
        )
    return result


# ---------------------------------------------------------------- integral 2

def _i2_arms(a: float):
    """(function of offset u, panel half-length, power) for the six half-panels
    between the catalog points 0, pi/2, theta*, pi."""
    lam = _lam(a)
    ts = theta_star(a)
    r = math.hypot(1.0, 1.0 / lam)
    c_star, s_star = -1.0 / r, (1.0 / lam) / r
    slope = lam * c_star - s_star

    def at_quarter(k, sg):
        def f(u):
            c, s, _, _ = _trig(k, sg * u)
            return _k2(a, c, s, c + lam * s)
        return f

    def at_star(sg):
        def f(u):
            v = sg * u
            cv, sv = math.cos(v), math.sin(v)
            c = c_star * cv - s_star * sv
            s = s_star * cv + c_star * sv
            # c* + lam s* = 0 exactly, so x is just the sin(v) term
            return _k2(a, c, s, slope * sv)
        return f

    # theta^(a-1) ends at 0 and pi for a < 1
    power = 1.0 / a if a < 1 else 1.0
    h_left = QUARTER
    h_mid = (ts - PI / 2) / 2.0
    h_right = (PI - ts) / 2.0
    return [
        (at_quarter(0, 1), h_left, power),
        (at_quarter(2, -1), h_left, 1.0),
        (at_quarter(2, 1), h_mid, 1.0),
        (at_star(-1), h_mid, 1.0),
        (at_star(1), h_right, 1.0),
        (at_quarter(4, -1), h_right, power),
    ]


def integrate_I2(alpha, tol: float = 1e-8) -> QuadResult:
    """Absolutely convergent integral I2 (expected pi**2/4 for every alpha > 0)
    with breakpoints at 0, pi/2, theta*(alpha) and pi."""
    a = _check_alpha(alpha)
    _check_tol(tol)
    total, err, subdiv = 0.0, 0.0, 0
    for fun, length, power in _i2_arms(a):
        v, e, n = _quad_power(fun, length, power)
        total += v
        err += e
        subdiv += n
    result = QuadResult(total, err, subdiv)
    if err > tol:
        raise QuadratureError(f"I2 error estimate {err:.3g} exceeds tol {tol:.3g} at alpha={a}", result)
    return result


def integrate(which, alpha, tol: float = 1e-8) -> QuadResult:
    which = IntegrandId(which)
    if which is IntegrandId.I1:
        return pv_integrate_I1(alpha, tol)
    return integrate_I2(alpha, tol)
