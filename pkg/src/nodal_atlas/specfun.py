"""Special functions behind the waveform asymptotics.

Contents: the phase function H, Airy Ai and its zeros, the three-regime
asymptotic evaluator for e^{pi r/2} K_{ir}(u) with a big-float quadrature
oracle, zeros of K_{ir}, the conical Legendre function P_{-1/2+ir} and the
product-integral identity that connects it to K_{ir}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.optimize import brentq
from scipy.special import j0 as _j0

from .errors import DomainError, OutOfRangeError, PrecisionError
from .kbessel import scaled_k_mp, scaled_k_table
from .quad import gl_adaptive, gl_nodes

AI0 = 0.355028053887817239  # 3^{-2/3}/Gamma(2/3)
AIP0 = 0.258819403792806798  # 3^{-1/3}/Gamma(1/3) = -Ai'(0)

# regime policy for bessel_k_scaled
MIN_ORDER = 10.0
BAND = 1.5  # transition half-width in units of r^{1/3}
BLEND = 0.5  # cross-fade width in units of r^{1/3}
NEGLIGIBLE = 30.0  # rH beyond which the decaying value is reported as 0


# ---------------------------------------------------------------- phase H
def _h_scalar(xi: float) -> float:
    if xi <= 0 or not math.isfinite(xi):
        raise DomainError(f"H(xi) needs xi > 0, got {xi!r}")
    w = abs((1.0 - xi) * (1.0 + xi))
    s = math.sqrt(w)
    if xi <= 1.0:
        if s < 0.1:
            # artanh(s) - s = sum s^{2k+3}/(2k+3)
            return s ** 3 * sum(w ** k / (2 * k + 3) for k in range(12))
        # artanh(s) = log((1 + s)/xi), exact even when s rounds to 1
        return math.log((1.0 + s) / xi) - s
    if s < 0.1:
        # s - arctan(s) = sum (-1)^k s^{2k+3}/(2k+3)
        return s ** 3 * sum((-w) ** k / (2 * k + 3) for k in range(12))
    return s - math.acos(1.0 / xi)


def h_xi(xi):
    """Phase function H(xi).

    H(xi) = arccosh(1/xi) - sqrt(1 - xi^2) for 0 < xi <= 1 and
    sqrt(xi^2 - 1) - arcsec(xi) for xi > 1. Near xi = 1 both branches are
    evaluated from their power series in |1 - xi^2| to avoid cancellation.
    """
    if np.ndim(xi) == 0:
        return _h_scalar(float(xi))
    arr = np.asarray(xi, dtype=float)
    return np.array([_h_scalar(v) for v in arr.ravel()]).reshape(arr.shape)


def solve_h_level(r: float, m: float, xi_min: float = 1e-12) -> float:
    """Return y in (0, r/2pi) with H(2 pi y / r) = pi m / r.

    H is strictly decreasing on (0, 1], so the root is unique. Levels above
    H(xi_min) are rejected as out of range.
    """
    if r <= 0 or m <= 0:
        raise DomainError("solve_h_level needs r > 0 and m > 0")
    level = math.pi * m / r
    if level >= _h_scalar(xi_min):
        raise OutOfRangeError(f"level pi*m/r = {level:.6g} exceeds H on ({xi_min}, 1)")
    xi = brentq(lambda v: _h_scalar(v) - level, xi_min, 1.0, xtol=1e-300, rtol=1e-14, maxiter=500)
    return r * xi / (2 * math.pi)


# ---------------------------------------------------------------- Airy
def _ai_series_float(x: float) -> float:
    x3 = x * x * x
    f_terms, g_terms = [1.0], [x]
    tf, tg = 1.0, x
    for k in range(200):
        tf *= x3 / ((3 * k + 2) * (3 * k + 3))
        tg *= x3 / ((3 * k + 3) * (3 * k + 4))
        f_terms.append(tf)
        g_terms.append(tg)
        if abs(tf) < 1e-20 and abs(tg) < 1e-20:
            break
    return AI0 * math.fsum(f_terms) - AIP0 * math.fsum(g_terms)


def _ai_series_mp(x: float) -> float:
    with mp.workdps(40):
        X = mp.mpf(x)
        x3 = X ** 3
        tf, tg = mp.mpf(1), X
        f, g = tf, tg
        k = 0
        while True:
            tf *= x3 / ((3 * k + 2) * (3 * k + 3))
            tg *= x3 / ((3 * k + 3) * (3 * k + 4))
            f += tf
            g += tg
            k += 1
            if abs(tf) < mp.mpf(10) ** -35 and abs(tg) < mp.mpf(10) ** -35:
                break
        c1 = mp.mpf(1) / (mp.cbrt(9) * mp.gamma(mp.mpf(2) / 3))
        c2 = mp.mpf(1) / (mp.cbrt(3) * mp.gamma(mp.mpf(1) / 3))
        return float(c1 * f - c2 * g)


def _airy_u(kmax: int):
    u = [1.0]
    for k in range(1, kmax + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    return u


_U = _airy_u(60)


def _ai_asym_pos(x: float) -> float:
    zeta = 2.0 / 3.0 * x ** 1.5
    s, prev = 0.0, math.inf
    for k, uk in enumerate(_U):
        term = (-1) ** k * uk / zeta ** k
        if abs(term) > prev:
            break
        s += term
        prev = abs(term)
        if prev < 1e-17:
            break
    return math.exp(-zeta) / (2 * math.sqrt(math.pi) * x ** 0.25) * s


def _ai_asym_neg(x: float) -> float:
    z = -x
    zeta = 2.0 / 3.0 * z ** 1.5
    p, q = 0.0, 0.0
    prev = math.inf
    for k in range(0, 29):
        tp = (-1) ** k * _U[2 * k] / zeta ** (2 * k)
        tq = (-1) ** k * _U[2 * k + 1] / zeta ** (2 * k + 1)
        mag = max(abs(tp), abs(tq))
        if mag > prev:
            break
        p += tp
        q += tq
        prev = mag
        if mag < 1e-17:
            break
    ph = zeta - math.pi / 4
    return (math.cos(ph) * p + math.sin(ph) * q) / (math.sqrt(math.pi) * z ** 0.25)


# On the negative axis the oscillatory expansion only reaches ~1e-9 at |x| = 6,
# so the series (in extended precision) is carried down to -8 there.
AIRY_SWITCH = 6.0
AIRY_SWITCH_NEG = 8.0


def _airy_scalar(x: float) -> float:
    if x >= AIRY_SWITCH:
        return _ai_asym_pos(x)
    if x <= -AIRY_SWITCH_NEG:
        return _ai_asym_neg(x)
    if abs(x) <= 3.0:
        return _ai_series_float(x)
    return _ai_series_mp(x)


def airy_ai(x):
    """Airy function Ai(x): Maclaurin series near 0, asymptotics beyond."""
    if np.ndim(x) == 0:
        return _airy_scalar(float(x))
    arr = np.asarray(x, dtype=float)
    return np.array([_airy_scalar(v) for v in arr.ravel()]).reshape(arr.shape)


def airy_zero_asymptotic(j: int) -> float:
    """Leading-order zero a_j ~ -(3 pi (4j - 1)/8)^{2/3}."""
    return -((3 * math.pi * (4 * j - 1) / 8) ** (2.0 / 3.0))


def airy_zero(j: int) -> float:
    """j-th zero of Ai (negative). Polished for j <= 10, asymptotic beyond."""
    if int(j) != j or j < 1:
        raise DomainError("airy_zero needs a positive integer index")
    j = int(j)
    if j > 10:
        return airy_zero_asymptotic(j)
    t = 3 * math.pi * (4 * j - 1) / 8
    guess = -t ** (2 / 3) * (1 + 5 / 48 * t ** -2 - 5 / 36 * t ** -4)
    d = 0.05
    while airy_ai(guess - d) * airy_ai(guess + d) > 0:
        d *= 1.5
    return brentq(_airy_scalar, guess - d, guess + d, xtol=1e-15, rtol=1e-15)


# ---------------------------------------------------------------- K_{ir}
@dataclass(frozen=True)
class RegimeReport:
    """Result of the asymptotic K-Bessel evaluator."""

    regime: str  # oscillatory | transitional | decay | negligible
    value: float
    est_rel_error: float


def _osc(r, u):
    rh = r * _h_scalar(u / r)
    amp = math.sqrt(2 * math.pi) * (r * r - u * u) ** -0.25
    return amp * math.sin(math.pi / 4 + rh), amp / rh


def _dec(r, u):
    rh = r * _h_scalar(u / r)
    v = math.sqrt(math.pi / 2) * (u * u - r * r) ** -0.25 * math.exp(-rh)
    return v, v / rh, rh


def _trans(r, u):
    v = math.pi * (2 / r) ** (1 / 3) * _airy_scalar((u - r) * (u / 2) ** (-1 / 3))
    return v, r ** (-2 / 3)


def bessel_k_scaled(r: float, u: float, decay_cutoff: float = NEGLIGIBLE) -> RegimeReport:
    """Asymptotic e^{pi r/2} K_{ir}(u) with a regime tag and error estimate.

    Oscillatory below r - 1.5 r^{1/3}, Airy inside the band, exponential
    decay above it, with linear cross-fades of width 0.5 r^{1/3} at the band
    edges. The error estimate is the 1/(rH) envelope (or r^{-2/3} in the
    band) divided by |value|, so it is large close to zeros. Decay values
    with rH > `decay_cutoff` are reported as 0 with regime "negligible".
    """
    if r < MIN_ORDER:
        raise DomainError(f"bessel_k_scaled needs r >= {MIN_ORDER}")
    if not u > 0:
        raise DomainError("bessel_k_scaled needs u > 0")
    c = r ** (1 / 3)
    band, w = BAND * c, BLEND * c
    lo, hi = r - band, r + band
    if u < lo - w / 2:
        v, e = _osc(r, u)
        regime = "oscillatory"
    elif u < lo + w / 2:
        lam = (u - (lo - w / 2)) / w
        v1, e1 = _osc(r, u)
        v2, e2 = _trans(r, u)
        v, e = (1 - lam) * v1 + lam * v2, max(e1, e2)
        regime = "oscillatory" if u < lo else "transitional"
    elif u <= hi - w / 2:
        v, e = _trans(r, u)
        regime = "transitional"
    elif u < hi + w / 2:
        lam = (u - (hi - w / 2)) / w
        v1, e1 = _trans(r, u)
        v2, e2, _ = _dec(r, u)
        v, e = (1 - lam) * v1 + lam * v2, max(e1, e2)
        regime = "transitional" if u <= hi else "decay"
    else:
        v, e, rh = _dec(r, u)
        if rh > decay_cutoff:
            return RegimeReport("negligible", 0.0, 1.0)
        regime = "decay"
    rel = e / abs(v) if v != 0 else math.inf
    return RegimeReport(regime, float(v), float(min(rel, 1e3)))


def bessel_k_oracle(r: float, u: float, precision_bits: int | None = None):
    """Big-float e^{pi r/2} int_0^inf e^{-u cosh t} cos(rt) dt.

    The integrand is entire and decays doubly exponentially, so the
    trapezoidal rule converges geometrically; the step is halved until two
    successive sums agree to 1e-12 relative. The cancellation between the
    O(1) integrand and the e^{-pi r/2}-sized result needs about 0.68 r
    decimal digits of working precision.
    """
    if r < 0 or not u > 0:
        raise DomainError("bessel_k_oracle needs r >= 0 and u > 0")
    if r > 120:
        raise OutOfRangeError("bessel_k_oracle is limited to r <= 120")
    bits = int(precision_bits) if precision_bits is not None else 64 + math.ceil(2.4 * r)
    if bits * math.log10(2) < 0.7 * r:
        raise PrecisionError(f"{bits} bits is below 0.7 r decimal digits for r = {r}")
    extra = r * _h_scalar(u / r) if (r > 0 and u > r) else 0.0
    with mp.workprec(bits):
        R, U = mp.mpf(r), mp.mpf(u)
        level = bits * math.log(2) + 30 + extra
        T = float(mp.acosh(level / float(u) + 1))
        h = 1.6 / (r + 10)

        def f(t):
            return mp.exp(-U * mp.cosh(t)) * mp.cos(R * t)

        n = int(math.ceil(T / h))
        h = T / n
        s = f(mp.mpf(0)) / 2 + mp.fsum(f(k * mp.mpf(h)) for k in range(1, n + 1))
        prev = s * h
        for _ in range(6):
            s += mp.fsum(f((2 * k + 1) * mp.mpf(h) / 2) for k in range(n))
            n, h = 2 * n, h / 2
            cur = s * h
            if abs(cur - prev) <= mp.mpf(10) ** -12 * abs(cur):
                return +(mp.exp(mp.pi * R / 2) * cur)
            prev = cur
        raise PrecisionError("trapezoidal oracle did not converge")


def bessel_k_zero_asymptotic(r: float, j: int) -> float:
    a = airy_zero(j)
    c = (r / 2) ** (1 / 3)
    return r + a * c + 0.15 * a * a / c


def bessel_k_zero(r: float, j: int, polish: bool = True, evaluator=None) -> float:
    """j-th largest zero k_{r,j} of K_{ir}(u) in (0, r).

    Starts from r + a_j (r/2)^{1/3} + (3/20) a_j^2 (r/2)^{-1/3} and, when
    asked, refines by a sign-bracketed root search on `evaluator`. The
    default evaluator is the accurate mpmath value; "asymptotic" selects
    bessel_k_scaled, whose leading-order phase is cruder than the starting
    formula near the band edge. If no bracket is found nearby the
    unpolished value is returned.
    """
    if j < 1 or r < MIN_ORDER:
        raise DomainError("bessel_k_zero needs j >= 1 and r >= 10")
    k0 = bessel_k_zero_asymptotic(r, j)
    if not 0 < k0 < r:
        raise OutOfRangeError(f"predicted zero {k0:.6g} outside (0, r)")
    if not polish:
        return k0
    if evaluator is None:
        f = lambda u: scaled_k_mp(r, u, dps=25)  # noqa: E731
    elif evaluator == "asymptotic":
        f = lambda u: bessel_k_scaled(r, u).value  # noqa: E731
    else:
        f = evaluator
    # half the local spacing to the neighbouring zeros
    c = (r / 2) ** (1 / 3)
    a_j = airy_zero(j)
    gap = 0.5 * min(abs(airy_zero(j + 1) - a_j), abs(a_j - airy_zero(j - 1)) if j > 1 else abs(a_j)) * c
    for frac in (0.25, 0.5, 1.0):
        lo, hi = k0 - frac * gap, min(k0 + frac * gap, r)
        if f(lo) * f(hi) < 0:
            return brentq(f, lo, hi, xtol=1e-12, rtol=1e-14)
    return k0


# ---------------------------------------------------------------- P_{-1/2+ir}
def legendre_conical_asymptotic(r: float, w):
    """((xi^2)/(w^2 - 1))^{1/4} J_0(r xi), xi = arccosh w.

    J_0 itself is replaced by its large-argument form once r xi > 10.
    """
    w = np.asarray(w, dtype=float)
    xi = np.arccosh(w)
    with np.errstate(invalid="ignore", divide="ignore"):
        amp = np.where(w > 1, (xi * xi / np.maximum(w * w - 1, 1e-300)) ** 0.25, 1.0)
    x = r * xi
    big = x > 10
    j0 = np.where(big, np.sqrt(2 / (np.pi * np.maximum(x, 1e-300))) * np.cos(x - np.pi / 4), _j0(x))
    out = amp * j0
    return float(out) if out.ndim == 0 else out


def legendre_conical_quadrature(r: float, w):
    """Mehler-Dirichlet integral for P_{-1/2+ir}(cosh xi).

    P = (sqrt 2/pi) int_0^xi cos(r theta) / sqrt(cosh xi - cosh theta) dtheta,
    with theta = xi (1 - s^2) removing the endpoint singularity.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    xi = np.arccosh(w)
    out = np.ones_like(w)
    pos = xi > 0
    if np.any(pos):
        n = int(1.5 * r * xi[pos].max()) + 60
        s, wt = gl_nodes(n)
        s = 0.5 * (s + 1.0)
        wt = 0.5 * wt
        X = xi[pos][:, None]
        theta = X * (1 - s * s)
        # cosh xi - cosh theta = 2 sinh((xi+theta)/2) sinh(xi s^2/2)
        den = 2 * np.sinh(0.5 * (X + theta)) * (np.sinh(0.5 * X * s * s) / (s * s))
        integrand = np.cos(r * theta) * 2 * X / np.sqrt(den)
        out[pos] = math.sqrt(2) / math.pi * np.sum(integrand * wt, axis=1)
    return out


def legendre_conical(r: float, w, method: str = "auto"):
    """Conical function P_{-1/2+ir}(w) for w >= 1.

    method "auto" uses the asymptotic form for r >= 20 and the
    Mehler-Dirichlet quadrature below that; "asymptotic" and "quadrature"
    force one route.
    """
    if r < 0:
        raise DomainError("legendre_conical needs r >= 0")
    if np.any(np.asarray(w) < 1):
        raise DomainError("legendre_conical needs w >= 1")
    if method == "auto":
        method = "asymptotic" if r >= 20 else "quadrature"
    if method == "asymptotic":
        return legendre_conical_asymptotic(r, w)
    if method == "quadrature":
        out = legendre_conical_quadrature(r, w)
        return float(out[0]) if np.ndim(w) == 0 else out.reshape(np.shape(w))
    raise DomainError(f"unknown method {method!r}")


def bessel_product_integral(u: float, v: float, c: float, r: float, tol: float = 1e-11) -> float:
    """e^{pi r} int_0^inf K_{ir}(uy) K_{ir}(vy) cos(cy) dy by quadrature.

    Integrated in s = log y, where the log-periodic oscillation near y = 0
    becomes a regular one damped by e^s.
    """
    if r > 60:
        raise OutOfRangeError("bessel_product_integral is limited to r <= 60")
    if u <= 0 or v <= 0 or c < 0:
        raise DomainError("need u, v > 0 and c >= 0")
    kt = scaled_k_table(r)
    s_lo = math.log(1e-14)
    s_hi = math.log(kt.u_hi / min(u, v))

    def f(s):
        y = np.exp(s)
        return kt(u * y) * kt(v * y) * np.cos(c * y) * y

    bps = [math.log(r / u), math.log(r / v)]
    val, _ = gl_adaptive(f, s_lo, s_hi, tol=tol, n=24, breakpoints=bps)
    return val


def bessel_product_closed_form(u: float, v: float, c: float, r: float, method: str = "quadrature") -> float:
    """(pi^2 / 4 sqrt(uv)) (e^{pi r}/cosh(pi r)) P_{-1/2+ir}((u^2+v^2+c^2)/(2uv))."""
    W = (u * u + v * v + c * c) / (2 * u * v)
    sech_scaled = 2.0 / (1.0 + math.exp(-2 * math.pi * r))  # e^{pi r}/cosh(pi r)
    p = legendre_conical(r, W, method=method)
    return math.pi ** 2 / (4 * math.sqrt(u * v)) * sech_scaled * float(p)
