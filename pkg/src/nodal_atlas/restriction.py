"""Sign changes and restriction norms on horocycles and geodesics, and the
QUE functionals built from the Fourier expansion.

Curves:
  horocycle  {x + iY : -1/2 < x <= 1/2}
  delta1     {iy},            y >= 1
  delta2     {1/2 + iy},      y >= sqrt(3)/2
  delta3     {e^{i theta}},   pi/3 <= theta <= pi/2
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import loggamma

from .coeffs import signed_coefficients
from .errors import ArgumentError, DomainError, OutOfRangeError
from .kbessel import scaled_k_table
from .quad import gl_adaptive, gl_fixed, gl_nodes
from .specfun import h_xi, legendre_conical_quadrature
from .waveform import MaassForm, _lam_block, eval_direct, eval_phi_x, eval_phi_y
from .windows import BumpWindow, smooth_step, window_support

__all__ = [
    "Crossing", "CrossingList", "BumpWindow", "scan_crossings", "sign_changes_on_horocycle", "sign_changes_on_delta",
    "restriction_norm_horocycle", "restriction_norm_horocycle_parseval", "restriction_norm_geodesic",
    "conductor", "afe_weight", "l_function", "mellin_check", "offdiag_G", "decompose_I",
    "poincare_functional", "unfolding_direct", "cusp_mass", "fundamental_domain_mass_below",
    "lattice_near_curve",
]

XTOL = 1e-12
TANGENT_DIP = 1e-6
MIN_SPW = 4.0


@dataclass(frozen=True)
class Crossing:
    """A zero on a curve: location, whether it was refined by root finding,
    |f| at the location relative to the local amplitude, and whether it is
    a tangential zero (no sign change)."""

    location: float
    refined: bool
    residual: float
    tangential: bool = False


@dataclass(frozen=True)
class CrossingList:
    """Zeros of a function along a curve.

    `curve` is "horocycle" (with `level` = Y) or a branch "delta1",
    "delta2", "delta3". Locations are curve parameters: x on a horocycle,
    y on delta1/delta2, theta on delta3. Tangential zeros count towards
    `zeros_total` (m) but not `sign_changes_total` (n).
    """

    curve: str
    level: float | None
    param_range: tuple
    crossings: tuple
    spw: float = 8.0
    amplitude: float = 0.0
    warning: str | None = None

    @property
    def params(self) -> tuple:
        return tuple(c.location for c in self.crossings if not c.tangential)

    @property
    def zeros_total(self) -> int:
        return len(self.crossings)

    @property
    def sign_changes_total(self) -> int:
        return sum(1 for c in self.crossings if not c.tangential)

    @property
    def count(self) -> int:
        return self.sign_changes_total

    def __len__(self):
        return self.sign_changes_total


def _f1(f, s):
    return float(f(np.array([s]))[0])


def _refine(f, a, b):
    try:
        return brentq(lambda s: _f1(f, s), a, b, xtol=XTOL, rtol=1e-15, maxiter=100)
    except ValueError:
        # end values at round-off level can flip sign on re-evaluation
        return a if abs(_f1(f, a)) <= abs(_f1(f, b)) else b


def scan_crossings(f, a: float, b: float, step: float, periodic: bool = False, dip: float = TANGENT_DIP):
    """Zeros of a vectorised f on [a, b] sampled at spacing <= step.

    Consecutive samples of opposite sign are refined by Brent's method.
    Interior local minima of |f| without a sign change are examined: if f
    actually changes sign there (two close zeros the sampling missed) both
    zeros are refined, and if |f| dips below dip times the local amplitude
    the point is reported as a tangential zero. With `periodic` the
    interval is a circle [a, b) and the last sample connects to the first.

    Returns (list of Crossing, amplitude).
    """
    n = max(8, int(math.ceil((b - a) / step)))
    if periodic:
        p = a + (b - a) * np.arange(n) / n
        v = np.asarray(f(p), dtype=float)
        p_ext = np.append(p, b)
        v_ext = np.append(v, v[0])
    else:
        p_ext = np.linspace(a, b, n + 1)
        v_ext = np.asarray(f(p_ext), dtype=float)
    h = p_ext[1] - p_ext[0]
    av = np.abs(v_ext)
    amp = float(np.max(av))
    m = len(p_ext)

    def local_amp(loc):
        i = int(round((loc - a) / h))
        if periodic:
            idx = np.arange(i - 4, i + 5) % (m - 1)
        else:
            idx = np.arange(max(0, i - 4), min(m, i + 5))
        return max(float(np.max(av[idx])), 1e-300)

    found = []

    def add(loc, tangential=False, refined=True):
        found.append(Crossing(float(loc), refined, abs(_f1(f, loc)) / local_amp(loc), tangential))

    # samples at round-off level (structural zeros of odd forms) count as exact zeros
    sgn = np.where(av <= 1e-13 * amp, 0.0, np.sign(v_ext))
    for i in range(m - 1):
        if sgn[i] * sgn[i + 1] < 0:
            add(_refine(f, p_ext[i], p_ext[i + 1]))
        elif sgn[i] == 0 and (periodic or 0 < i):
            j = (i - 1) % (m - 1) if periodic else i - 1
            if sgn[j] * sgn[i + 1] < 0:
                add(p_ext[i], refined=False)
    for i in range(m - 1 if periodic else m - 1):
        if i == 0 and not periodic:
            continue
        lo_i = (i - 1) % (m - 1) if periodic else i - 1
        hi_i = i + 1
        if sgn[i] == 0 or not (av[i] <= av[lo_i] and av[i] <= av[hi_i]):
            continue
        if sgn[lo_i] != sgn[i] or sgn[hi_i] != sgn[i]:
            continue
        pa, pb = p_ext[i] - h, p_ext[i] + h
        s0 = sgn[i]
        res = minimize_scalar(lambda s: s0 * _f1(f, s), bounds=(pa, pb), method="bounded",
                              options={"xatol": 1e-10})
        if res.fun < 0:
            add(_refine(f, pa, res.x))
            add(_refine(f, res.x, pb))
        elif res.fun < dip * local_amp(res.x):
            add(res.x, tangential=True)
    if periodic:
        span = b - a
        found = [Crossing(a + ((c.location - a) % span), c.refined, c.residual, c.tangential) for c in found]
    found.sort(key=lambda c: c.location)
    return found, amp


def _warn(spw):
    if spw < MIN_SPW:
        return f"resolution: {spw} samples per wavelength is below {MIN_SPW}; crossings may be missed"
    return None


def sign_changes_on_horocycle(form: MaassForm, Y: float, spw: float = 8.0) -> CrossingList:
    """Zeros of x -> phi(x + iY) on the closed horocycle.

    The sampling step is 2 pi Y / (t spw), i.e. spw samples per wavelength
    of the fastest non-negligible Fourier mode; locations are reported in
    (-1/2, 1/2].
    """
    if Y < 0.3:
        raise DomainError("horocycle height must be at least 0.3")
    if spw <= 0:
        raise ArgumentError("samples per wavelength must be positive")
    step = 2 * math.pi * Y / (form.t * spw)
    f = _horocycle_profile(form, Y)
    cr, amp = scan_crossings(f, -0.5, 0.5, step, periodic=True)
    cr = [Crossing(0.5, c.refined, c.residual, c.tangential) if c.location <= -0.5 + 1e-12 else c for c in cr]
    cr.sort(key=lambda c: c.location)
    return CrossingList("horocycle", float(Y), (-0.5, 0.5), tuple(cr), spw, amp, _warn(spw))


def _horocycle_profile(form: MaassForm, Y: float):
    """Vectorised x -> c phi(x + iY) with some c > 0.

    Inside the K-table range this is phi itself. Higher up every term
    underflows the table, so the terms are rescaled by K_{it}(2 pi Y) > 0
    (no zeros past u = t) with ratios taken from mpmath.
    """
    kt = scaled_k_table(form.t)
    if 2 * math.pi * Y < 0.9 * kt.u_hi:
        return lambda x: eval_direct(form, x, np.full_like(x, Y))
    with mp.workdps(30):
        r = mp.mpf(form.t)
        k1 = mp.besselk(1j * r, 2 * mp.pi * Y).real
        coef = []
        for n in range(1, form.coeffs.max_n + 1):
            ratio = float(mp.besselk(1j * r, 2 * mp.pi * n * Y).real / k1)
            if abs(ratio) < 1e-20:
                break
            coef.append(form.coeffs.lam[n] * ratio)
    coef = np.array(coef)
    n = np.arange(1, coef.size + 1)
    trig = np.cos if form.parity == "even" else np.sin
    return lambda x: trig(2 * np.pi * np.asarray(x)[:, None] * n[None, :]) @ coef


def _delta_function(form: MaassForm, branch: str):
    """Vectorised function whose sign changes are scanned on a branch.

    Even forms: phi itself. Odd forms vanish on all of delta, so the normal
    derivative is used: d/dx on delta1 and delta2, and the radial
    derivative cos(theta) phi_x + sin(theta) phi_y on the arc.
    """
    odd = form.parity == "odd"
    if branch in ("delta1", "delta2"):
        x0 = 0.0 if branch == "delta1" else 0.5
        ev = eval_phi_x if odd else eval_direct
        return lambda y: ev(form, np.full_like(y, x0), y)
    if branch == "delta3":
        def f(th):
            x, y = np.cos(th), np.sin(th)
            if odd:
                return np.cos(th) * eval_phi_x(form, x, y) + np.sin(th) * eval_phi_y(form, x, y)
            return eval_direct(form, x, y)
        return f
    raise DomainError(f"unknown branch {branch!r}")


def delta_top(form: MaassForm) -> float:
    """Height above which phi has no zeros on delta1/delta2 (the n = 1 term dominates)."""
    t = form.t
    return t / (2 * math.pi) + 3 * t ** (1 / 3) / (2 * math.pi) + 1.0


def sign_changes_on_delta(form: MaassForm, branch: str, param_range=None, spw: float = 8.0) -> CrossingList:
    """Zeros along delta1, delta2 (parameter y) or the arc delta3 (theta).

    Steps are 2 pi/(t spw) in hyperbolic arclength: in log y on the
    vertical branches and in theta on the arc (where ds = dtheta/sin theta).
    End points of the arc (i and rho) are shared with delta1 and delta2 and
    are left to those branches.
    """
    if spw <= 0:
        raise ArgumentError("samples per wavelength must be positive")
    f = _delta_function(form, branch)
    h = 2 * math.pi / (form.t * spw)
    if branch == "delta3":
        a, b = param_range or (math.pi / 3, math.pi / 2)
        if not (math.pi / 3 - 1e-12 <= a < b <= math.pi / 2 + 1e-12):
            raise DomainError("delta3 range must lie in [pi/3, pi/2]")
        cr, amp = scan_crossings(f, a, b, h * math.sin(math.pi / 3))
        cr = [c for c in cr if a + 1e-9 < c.location < b - 1e-9]
        return CrossingList(branch, None, (a, b), tuple(cr), spw, amp, _warn(spw))
    y_min = 1.0 if branch == "delta1" else math.sqrt(3) / 2
    a, b = param_range or (y_min, delta_top(form))
    if a <= 0 or b <= a:
        raise DomainError("vertical branch range must satisfy 0 < a < b")
    g = lambda s: f(np.exp(s))  # noqa: E731
    cr, amp = scan_crossings(g, math.log(a), math.log(b), h)
    cr = [Crossing(float(np.exp(c.location)), c.refined, c.residual, c.tangential) for c in cr]
    return CrossingList(branch, None, (a, b), tuple(cr), spw, amp, _warn(spw))


# ---------------------------------------------------------------- restriction norms
def restriction_norm_horocycle(form: MaassForm, Y: float) -> float:
    """int_{-1/2}^{1/2} phi(x + iY)^2 dx by Gauss-Legendre panels."""
    N = form.n_terms(Y)
    panels = max(4, int(math.ceil(2 * N)))
    return gl_fixed(lambda x: eval_direct(form, x, np.full_like(x, Y)) ** 2, -0.5, 0.5, n=24, panels=panels)


def restriction_norm_horocycle_parseval(form: MaassForm, Y: float) -> float:
    """Same integral via Parseval: 2 Y sum rho~(n)^2 K~(2 pi n Y)^2."""
    N = form.n_terms(Y)
    lam = _lam_block(form, N)
    k = scaled_k_table(form.t)(2 * np.pi * np.arange(1, N + 1) * Y)
    return 2 * Y * form.rho1 ** 2 * float(np.sum((lam * k) ** 2))


def restriction_norm_geodesic(form: MaassForm, window, branch: str = "delta1") -> float:
    """int_0^inf phi(x0 + iy)^2 k(y) dy / y with x0 = 0 (delta1) or 1/2 (delta2)."""
    if branch not in ("delta1", "delta2"):
        raise DomainError("geodesic restriction is defined on delta1 or delta2")
    x0 = 0.0 if branch == "delta1" else 0.5
    lo, hi = window_support(window)
    bps = getattr(window, "breakpoints", lambda: ())()
    f = lambda y: eval_direct(form, np.full_like(y, x0), y) ** 2 * window(y) / y  # noqa: E731
    val, _ = gl_adaptive(f, max(lo, 1e-6), hi, tol=1e-11, n=24, breakpoints=bps)
    return val


# ---------------------------------------------------------------- L-function
def conductor(t_phi: float, tau: float) -> float:
    """Analytic conductor (1/4 pi^2) sqrt((1/4 + (tau+t)^2)(1/4 + (tau-t)^2))."""
    return math.sqrt((0.25 + (tau + t_phi) ** 2) * (0.25 + (tau - t_phi) ** 2)) / (4 * math.pi ** 2)


def afe_weight(x):
    """Smooth g with g(x) + g(1/x) = 1, g = 1 on (0, 1/2], g = 0 on [2, inf)."""
    x = np.asarray(x, dtype=float)
    u = (np.log(np.maximum(x, 1e-300)) + math.log(2)) / (2 * math.log(2))
    return 1.0 - smooth_step(u)


def l_function(form: MaassForm, s: complex, g=None, scale: float | None = None) -> complex:
    """sum lambda(n) n^{-s} g(n / X), X = sqrt(C_phi(Im s)) unless given."""
    g = g or afe_weight
    s = complex(s)
    X = float(scale) if scale is not None else math.sqrt(conductor(form.t, s.imag))
    N = int(math.floor(2 * X))
    if N < 1:
        return 0.0 + 0.0j
    lam = _lam_block(form, N)
    n = np.arange(1, N + 1, dtype=float)
    return complex(np.sum(lam * np.exp(-s * np.log(n)) * g(n / X)))


@dataclass(frozen=True)
class MellinResult:
    t_probe: float
    lhs: complex
    rhs: complex

    @property
    def rel_error(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.lhs)


def mellin_check(form: MaassForm, t_probe: float, sigma: float = 1.5, scale: float = 150.0) -> MellinResult:
    """Both sides of int_0^inf phi(iy) y^{s-1/2} dy/y = (pi^{-s}/2) rho(1) L(s)
    Gamma((s+it)/2) Gamma((s-it)/2) at s = sigma + i t_probe.

    The left side folds (0, 1) onto (1, inf) with phi(i/y) = phi(iy). The
    right side uses the smoothly truncated Dirichlet series with cut-off
    `scale`, where the raw series converges absolutely (sigma > 1).
    """
    if form.parity != "even":
        raise DomainError("the Mellin identity is for even forms (phi vanishes on x = 0 otherwise)")
    if form.coeffs.rho1_scaled is None:
        raise ArgumentError("mellin_check needs a normalised form")
    if sigma <= 1:
        raise DomainError("sigma must exceed 1")
    s = complex(sigma, t_probe)
    kt = scaled_k_table(form.t)
    y_top = kt.u_hi / (2 * math.pi)

    def part(y, which):
        v = eval_direct(form, np.zeros_like(y), y) * (y ** (s - 0.5) + y ** (0.5 - s)) / y
        return v.real if which == 0 else v.imag

    bps = [form.t / (2 * math.pi * k) for k in range(1, 4) if 1 < form.t / (2 * math.pi * k) < y_top]
    re, _ = gl_adaptive(lambda y: part(y, 0), 1.0, y_top, tol=1e-13, breakpoints=bps)
    im, _ = gl_adaptive(lambda y: part(y, 1), 1.0, y_top, tol=1e-13, breakpoints=bps)
    t = form.t
    logpref = (-s * math.log(math.pi) - math.log(2) + math.log(form.coeffs.rho1_scaled) + math.pi * t / 2
               + loggamma((s + 1j * t) / 2) + loggamma((s - 1j * t) / 2))
    rhs = complex(np.exp(logpref)) * l_function(form, s, scale=scale)
    return MellinResult(float(t_probe), complex(re, im), rhs)


# ---------------------------------------------------------------- G(m, n)
def _k_hat(window, xs, n_nodes: int = 64):
    """k^(x) = int k(y) cos(2 pi x y) dy for an array of x."""
    lo, hi = window_support(window)
    bps = sorted(set([lo, hi, *getattr(window, "breakpoints", lambda: ())()]))
    gx, gw = gl_nodes(n_nodes)
    ys, ws = [], []
    for a, b in zip(bps[:-1], bps[1:]):
        # split so each panel holds a bounded number of oscillations
        m = max(1, int(math.ceil((b - a) * (np.max(xs) + 1) / 4)))
        edges = np.linspace(a, b, m + 1)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            ys.append(0.5 * (e0 + e1) + 0.5 * (e1 - e0) * gx)
            ws.append(0.5 * (e1 - e0) * gw)
    ys = np.concatenate(ys)
    ws = np.concatenate(ws) * window(ys)
    out = np.empty(len(xs))
    for i in range(0, len(xs), 512):
        xb = xs[i:i + 512]
        out[i:i + 512] = np.cos(2 * np.pi * xb[:, None] * ys[None, :]) @ ws
    return out


def _g_direct(m_arr, n_arr, window, r):
    lo, hi = window_support(window)
    kt = scaled_k_table(r)
    bps = sorted(set([lo, hi, *getattr(window, "breakpoints", lambda: ())()]))
    mx = max(np.max(m_arr), np.max(n_arr))
    gx, gw = gl_nodes(40)
    ys, ws = [], []
    for a, b in zip(bps[:-1], bps[1:]):
        pieces = max(2, int(math.ceil((b - a) * (r + 2 * math.pi * mx) / 6)))
        edges = np.linspace(a, b, pieces + 1)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            ys.append(0.5 * (e0 + e1) + 0.5 * (e1 - e0) * gx)
            ws.append(0.5 * (e1 - e0) * gw)
    ys = np.concatenate(ys)
    ws = np.concatenate(ws) * window(ys)
    idx = np.arange(1, mx + 1)
    K = kt(2 * np.pi * idx[:, None] * ys[None, :])
    G = (K * ws[None, :]) @ K.T
    G = 0.5 * (G + G.T)  # exact symmetry G(m, n) = G(n, m)
    return G[np.asarray(m_arr) - 1][:, np.asarray(n_arr) - 1]


def offdiag_G(m: int, n: int, window, r: float, route: str = "direct", x_max: float = 200.0) -> float:
    """G(m, n) = e^{pi r} int K_{ir}(2 pi m y) K_{ir}(2 pi n y) k(y) dy.

    route "direct": Gauss-Legendre quadrature of the K-Bessel product.
    route "legendre": cosine-transform the window and use the closed form
    e^{pi r} int K K cos(2 pi x y) dy = (pi/(8 sqrt(mn))) (e^{pi r}/cosh pi r)
    P_{-1/2+ir}(1 + ((m-n)^2 + x^2)/(2mn)), giving
    G = (pi/(2 sqrt(mn))) (e^{pi r}/cosh pi r) int_0^inf k^(x) P(W(x)) dx.
    """
    if m < 1 or n < 1:
        raise DomainError("G(m, n) needs m, n >= 1")
    if route == "direct":
        return float(_g_direct([m], [n], window, r)[0, 0])
    if route != "legendre":
        raise DomainError(f"unknown route {route!r}")
    if r > 60:
        raise OutOfRangeError("the Legendre route is validated for r <= 60")
    lo, hi = window_support(window)
    panels = int(math.ceil(x_max * hi * 2)) + 8
    gx, gw = gl_nodes(24)
    edges = np.linspace(0.0, x_max, panels + 1)
    xs = (0.5 * (edges[1:] + edges[:-1])[:, None] + 0.5 * np.diff(edges)[:, None] * gx).ravel()
    wx = (0.5 * np.diff(edges)[:, None] * gw).ravel()
    W = 1 + ((m - n) ** 2 + xs ** 2) / (2 * m * n)
    P = np.empty_like(W)
    for i in range(0, W.size, 2048):
        P[i:i + 2048] = legendre_conical_quadrature(r, W[i:i + 2048])
    kh = _k_hat(window, xs)
    sech_scaled = 2.0 / (1.0 + math.exp(-2 * math.pi * r))
    return math.pi / (2 * math.sqrt(m * n)) * sech_scaled * float(np.sum(wx * kh * P))


@dataclass(frozen=True)
class IDecomposition:
    diagonal: float
    small_spacing: float
    large_spacing: float
    M_cut: int
    R_cut: int

    @property
    def total(self) -> float:
        return self.diagonal + self.small_spacing + self.large_spacing


def decompose_I(form: MaassForm, window, M_cut: int = 1, R_cut: int | None = None) -> IDecomposition:
    """Split I = int phi(iy)^2 k(y) dy/y = 4 sum_{m,n} rho~(m) rho~(n) G(m, n)
    into diagonal, 1 <= |m-n| < R_cut and |m-n| >= R_cut parts, keeping
    m >= M_cut."""
    if form.parity != "even":
        raise DomainError("decompose_I is defined for even forms (phi(iy) vanishes for odd ones)")
    lo, _ = window_support(window)
    N = form.n_terms(max(lo, 0.05))
    if R_cut is None:
        R_cut = max(2, int(math.ceil(form.t ** (1 / 3))))
    lam = _lam_block(form, N)
    idx = np.arange(1, N + 1)
    G = _g_direct(idx, idx, window, form.t)
    rho = form.rho1 * lam
    T = 4 * rho[:, None] * rho[None, :] * G
    T[idx < M_cut, :] = 0.0
    gap = np.abs(idx[:, None] - idx[None, :])
    return IDecomposition(float(np.sum(T[gap == 0])), float(np.sum(T[(gap >= 1) & (gap < R_cut)])),
                          float(np.sum(T[gap >= R_cut])), M_cut, R_cut)


# ---------------------------------------------------------------- Poincare series
def poincare_functional(form: MaassForm, h: int, g) -> float:
    """int_X phi^2 P_{h,g} dA after unfolding:
    sum_m c(m) c(m+h) int g(y) K~(2 pi |m| y) K~(2 pi |m+h| y) dy / y."""
    lo, hi = window_support(g)
    N = form.n_terms(max(lo, 0.05)) + abs(h)
    c = signed_coefficients(form.coeffs, N)
    kt = scaled_k_table(form.t)
    bps = sorted(set([lo, hi, *getattr(g, "breakpoints", lambda: ())()]))
    gx, gw = gl_nodes(40)
    ys, ws = [], []
    for a, b in zip(bps[:-1], bps[1:]):
        pieces = max(2, int(math.ceil((b - a) * (form.t + 2 * math.pi * N) / 6)))
        edges = np.linspace(a, b, pieces + 1)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            ys.append(0.5 * (e0 + e1) + 0.5 * (e1 - e0) * gx)
            ws.append(0.5 * (e1 - e0) * gw)
    ys = np.concatenate(ys)
    ws = np.concatenate(ws) * np.asarray(g(ys), dtype=float) / ys
    idx = np.arange(1, N + 1)
    K = kt(2 * np.pi * idx[:, None] * ys[None, :])
    G = (K * ws[None, :]) @ K.T  # G[a-1, b-1] = int g K_a K_b dy/y
    total = 0.0
    for m in range(-N, N + 1):
        k = m + h
        if m == 0 or k == 0 or abs(k) > N:
            continue
        total += c[m + N] * c[k + N] * G[abs(m) - 1, abs(k) - 1]
    return float(total)


def incomplete_eisenstein(g, x, y):
    """E_g(z) = sum over Gamma_inf \\ Gamma of g(Im(gamma z)) for compactly supported g."""
    lo, _ = window_support(g)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.asarray(g(y), dtype=float).copy()
    if lo <= 0:
        raise DomainError("incomplete Eisenstein series needs g supported away from 0")
    y_min = float(np.min(y))
    c_max = int(math.floor(1.0 / math.sqrt(y_min * lo))) + 1
    for c in range(1, c_max + 1):
        reach = math.sqrt(float(np.max(y)) / lo) + c * 0.5 + 1
        for d in range(-int(reach) - c, int(reach) + c + 1):
            if math.gcd(c, d) != 1:
                continue
            den = (c * x + d) ** 2 + (c * y) ** 2
            out = out + np.asarray(g(y / den), dtype=float)
    return out


def unfolding_direct(form: MaassForm, g, n_x: int = 40, n_y: int = 40) -> float:
    """int_F phi^2 E_g dA by a 2-D Gauss-Legendre rule over the fundamental domain."""
    lo, hi = window_support(g)
    y_top = max(hi, 1.0 / lo) + 0.01
    gx, gw = gl_nodes(n_x)
    xs = 0.25 * (gx + 1)
    wx = 0.25 * gw
    gy, gwy = gl_nodes(n_y)
    total = 0.0
    for xi, wi in zip(xs, wx):
        y0 = math.sqrt(1 - xi * xi)
        cuts = sorted(set([y0, y_top] + [v for v in (lo, hi, 1.0 / hi, 1.0 / lo) if y0 < v < y_top]))
        for a, b in zip(cuts[:-1], cuts[1:]):
            pieces = max(1, int(math.ceil((b - a) * form.t / 4)))
            edges = np.linspace(a, b, pieces + 1)
            ys = (0.5 * (edges[1:] + edges[:-1])[:, None] + 0.5 * np.diff(edges)[:, None] * gy).ravel()
            wy = (0.5 * np.diff(edges)[:, None] * gwy).ravel()
            xx = np.full_like(ys, xi)
            phi = eval_direct(form, xx, ys)
            E = incomplete_eisenstein(g, xx, ys)
            total += wi * float(np.sum(wy * phi ** 2 * E / ys ** 2))
    return 2 * total


# ---------------------------------------------------------------- cusp mass
def cusp_mass(form: MaassForm, Y: float):
    """(int_{y >= Y} |phi|^2 dA, QUE target (3/pi)/Y) for Y >= 1 (Parseval in x)."""
    if Y < 1:
        raise DomainError("cusp_mass needs Y >= 1 (the region must be a full strip)")
    kt = scaled_k_table(form.t)
    N = form.n_terms(Y)
    lam = _lam_block(form, N)
    n = np.arange(1, N + 1)

    def f(y):
        k = kt(2 * np.pi * n[None, :] * np.asarray(y)[:, None])
        return 2 * form.rho1 ** 2 * np.sum((lam * k) ** 2, axis=1) / y

    y_top = kt.u_hi / (2 * np.pi)
    if Y >= y_top:
        return 0.0, 3 / (math.pi * Y)
    bps = [form.t / (2 * math.pi * k) for k in range(1, N + 1)]
    val, _ = gl_adaptive(f, Y, y_top, tol=1e-12, breakpoints=bps)
    return val, 3 / (math.pi * Y)


def fundamental_domain_mass_below(form: MaassForm, Y: float, n_gl: int = 48) -> float:
    """int over F with y <= Y of phi^2 dA by direct 2-D quadrature."""
    gx, gw = gl_nodes(n_gl)
    xs = 0.25 * (gx + 1)
    wx = 0.25 * gw
    total = 0.0
    for xi, wi in zip(xs, wx):
        y0 = math.sqrt(1 - xi * xi)
        pieces = max(1, int(math.ceil((Y - y0) * form.t / 4)))
        edges = np.linspace(y0, Y, pieces + 1)
        ys = (0.5 * (edges[1:] + edges[:-1])[:, None] + 0.5 * np.diff(edges)[:, None] * gx).ravel()
        wy = (0.5 * np.diff(edges)[:, None] * gw).ravel()
        phi = eval_direct(form, np.full_like(ys, xi), ys)
        total += wi * float(np.sum(wy * phi ** 2 / ys ** 2))
    return 2 * total


# ---------------------------------------------------------------- lattice count
def lattice_near_curve(r: float, Y: float, eta: float, strict: bool = True) -> int:
    """#{0 < |n| <= r/(4 pi Y) : dist(1/4 + (r/pi) H(2 pi |n| Y / r), Z) <= 10 eta}.

    With `strict` the validity condition Y <= eta^2 sqrt(r) is enforced.
    """
    if not 0 < eta < 1 or Y <= 0 or r <= 0:
        raise DomainError("need r > 0, Y > 0 and 0 < eta < 1")
    if strict and Y > eta ** 2 * math.sqrt(r):
        raise ArgumentError(f"Y = {Y} exceeds eta^2 sqrt(r) = {eta ** 2 * math.sqrt(r):.4g}")
    N = int(math.floor(r / (4 * math.pi * Y)))
    count = 0
    for n in range(1, N + 1):
        v = 0.25 + r / math.pi * h_xi(2 * math.pi * n * Y / r)
        if abs(v - round(v)) <= 10 * eta:
            count += 2
    return count
