"""Evaluation of Maass cusp forms and their horocycle asymptotics.

phi(x + iy) = 2 sqrt(y) sum_{n>=1} rho~(n) e^{pi t/2} K_{it}(2 pi n y) trig(2 pi n x)

with trig = cos for even forms and sin for odd ones, and rho~(n) =
lambda(n) rho~(1). The normalised form Phi = phi / (rho~(1) sqrt(y)) is used
by the asymptotic formulas. All evaluators are vectorised over x and y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import THETA, HeckeData
from .errors import ArgumentError, DomainError, OutOfRangeError
from .kbessel import negligible_cutoff, scaled_k_table
from .quad import gl_adaptive, gl_nodes
from .specfun import airy_ai, h_xi

SQRT2PI = math.sqrt(2 * math.pi)
_CHUNK = 20000


@dataclass(frozen=True)
class Truncation:
    """Fourier truncation: stop once rH(2 pi n y / t) exceeds `decay_cutoff`,
    and never go past hard_cap_factor * t / y + hard_cap_offset terms.
    `scale` multiplies the resulting count (used for stability checks)."""

    decay_cutoff: float = 30.0
    hard_cap_factor: float = 100.0
    hard_cap_offset: float = 50.0
    scale: float = 1.0


@dataclass(frozen=True)
class MaassForm:
    coeffs: HeckeData
    truncation: Truncation = Truncation()
    info: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def t(self) -> float:
        return self.coeffs.t

    @property
    def parity(self) -> str:
        return self.coeffs.parity

    @property
    def rho1(self) -> float:
        r = self.coeffs.rho1_scaled
        return 1.0 if r is None else float(r)

    def n_terms(self, y: float) -> int:
        """Number of Fourier terms used at height y."""
        if y <= 0:
            raise DomainError("height must be positive")
        tr = self.truncation
        u_cut = negligible_cutoff(self.t, tr.decay_cutoff)
        n = int(math.floor(u_cut / (2 * math.pi * y)))
        n = min(n, int(tr.hard_cap_factor * self.t / y + tr.hard_cap_offset))
        return max(1, int(math.ceil(n * tr.scale)))

    def with_coeffs(self, coeffs: HeckeData) -> "MaassForm":
        return MaassForm(coeffs, self.truncation, dict(self.info))

    def with_truncation(self, truncation: Truncation) -> "MaassForm":
        return MaassForm(self.coeffs, truncation, dict(self.info))


def make_form(coeffs: HeckeData, **kw) -> MaassForm:
    return MaassForm(coeffs, Truncation(**kw) if kw else Truncation())


def delta_width(t: float) -> float:
    """Delta = t^{1/3} log t."""
    return t ** (1 / 3) * math.log(t)


# ---------------------------------------------------------------- direct sums
def _trig(parity, arg, deriv=0):
    if parity == "even":
        return (np.cos(arg), -np.sin(arg), -np.cos(arg))[deriv]
    return (np.sin(arg), np.cos(arg), -np.sin(arg))[deriv]


def _lam_block(form: MaassForm, N: int) -> np.ndarray:
    if N > form.coeffs.max_n:
        raise OutOfRangeError(
            f"evaluation needs lambda(n) up to n = {N}, coefficient data stops at {form.coeffs.max_n}")
    return form.coeffs.lam[1:N + 1]


def _series(form: MaassForm, x, y, what: str):
    """Core evaluator. what in {phi, Phi, phi_x, phi_y}."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    xf, yf = x.ravel(), y.ravel()
    out = np.empty(xf.size)
    if xf.size == 0:
        return out.reshape(shape)
    if np.any(yf <= 0):
        raise DomainError("points must lie in the upper half plane")
    kt = scaled_k_table(form.t)
    N = form.n_terms(float(yf.min()))
    lam = _lam_block(form, N)
    n = np.arange(1, N + 1, dtype=float)
    for s in range(0, xf.size, _CHUNK):
        xs, ys = xf[s:s + _CHUNK, None], yf[s:s + _CHUNK, None]
        u = 2 * np.pi * n[None, :] * ys
        arg = 2 * np.pi * n[None, :] * xs
        if what == "phi_y":
            k, dk = kt(u, deriv=True)
            # d/dy [sqrt(y) K(2 pi n y)] = K/(2 sqrt y) + sqrt(y) 2 pi n K'
            term = k / (2 * np.sqrt(ys)) + np.sqrt(ys) * 2 * np.pi * n[None, :] * dk
            out[s:s + _CHUNK] = 2 * form.rho1 * np.sum(lam * term * _trig(form.parity, arg), axis=1)
            continue
        k = kt(u)
        if what == "phi_x":
            trig = _trig(form.parity, arg, 1) * (2 * np.pi * n[None, :])
        else:
            trig = _trig(form.parity, arg)
        acc = 2 * np.sum(lam * k * trig, axis=1)
        if what == "Phi":
            out[s:s + _CHUNK] = acc
        else:
            out[s:s + _CHUNK] = form.rho1 * np.sqrt(ys[:, 0]) * acc
    return out.reshape(shape)


def _split(z, y):
    if y is None:
        z = np.asarray(z)
        return z.real, z.imag
    return z, y


def eval_direct(form: MaassForm, z, y=None):
    """phi(z) by the truncated Fourier series. Pass complex z, or x and y."""
    x, y = _split(z, y)
    return _series(form, x, y, "phi")


def eval_phi_norm(form: MaassForm, z, y=None):
    """Phi(z) = phi(z) / (rho~(1) sqrt(y))."""
    x, y = _split(z, y)
    return _series(form, x, y, "Phi")


def eval_phi_x(form: MaassForm, z, y=None):
    """d phi / dx by term-wise differentiation."""
    x, y = _split(z, y)
    return _series(form, x, y, "phi_x")


def eval_phi_y(form: MaassForm, z, y=None):
    """d phi / dy by term-wise differentiation."""
    x, y = _split(z, y)
    return _series(form, x, y, "phi_y")


def truncation_error_bound(form: MaassForm, y: float) -> float:
    """Crude bound on the neglected tail plus table round-off at height y."""
    N = form.n_terms(y)
    kt = scaled_k_table(form.t)
    tail = abs(kt(2 * np.pi * (N + 1) * y)) if 2 * np.pi * (N + 1) * y < kt.u_hi else 0.0
    lam_max = float(np.max(np.abs(form.coeffs.lam[1:min(N, form.coeffs.max_n) + 1])))
    return 2 * form.rho1 * math.sqrt(y) * (lam_max * (tail * 4 + 1e-13 * N))


# ---------------------------------------------------------------- group action
def pullback(x, y, max_iter: int = 200):
    """Map points into the standard fundamental domain by T^k and S moves."""
    x = np.array(x, dtype=float, copy=True)
    y = np.array(y, dtype=float, copy=True)
    for _ in range(max_iter):
        x -= np.round(x)
        r2 = x * x + y * y
        inside = r2 < 1.0 - 1e-15
        if not np.any(inside):
            break
        x[inside] = -x[inside] / r2[inside]
        y[inside] = y[inside] / r2[inside]
    x = np.where(x <= -0.5, x + 1.0, x)
    return x, y


def eval_automorphic(form: MaassForm, z, y=None):
    """phi(z) evaluated after pulling z back into the fundamental domain."""
    x, y = _split(z, y)
    xs, ys = pullback(x, y)
    return _series(form, xs, ys, "phi")


def automorphy_residual(form: MaassForm, n_points: int = 50, seed: int = 0):
    """max |phi(z) - phi(-1/z)| / max(1, |phi(z)|) over random z, 0.5 <= |z| <= 2.

    Both sides use the direct Fourier series, so the check is not trivially
    satisfied by the pullback.
    """
    rng = np.random.default_rng(seed)
    rad = np.exp(rng.uniform(math.log(0.5), math.log(2.0), n_points))
    ang = rng.uniform(0.35, math.pi - 0.35, n_points)
    z = rad * np.exp(1j * ang)
    w = -1.0 / z
    a = eval_direct(form, z)
    b = eval_direct(form, w)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))))


# ---------------------------------------------------------------- normalisation
def l2_norm_sq(form: MaassForm, n_gl: int = 48) -> float:
    """int_F phi^2 dA over the standard fundamental domain.

    Above y = 1 the x-integral is done by Parseval; the region between the
    arc and y = 1 is a 2-D Gauss-Legendre product rule.
    """
    kt = scaled_k_table(form.t)
    N = form.n_terms(1.0)
    lam = _lam_block(form, N)
    n = np.arange(1, N + 1)
    rho1 = form.rho1

    def strip(y):
        y = np.asarray(y)
        k = kt(2 * np.pi * n[None, :] * y[:, None])
        return 2 * rho1 ** 2 * np.sum((lam * k) ** 2, axis=1) / y

    y_top = kt.u_hi / (2 * np.pi)
    bps = [form.t / (2 * np.pi * k) for k in range(1, N + 1) if 1 < form.t / (2 * np.pi * k) < y_top]
    top, _ = gl_adaptive(strip, 1.0, y_top, tol=1e-12, n=24, breakpoints=bps)
    gx, gw = gl_nodes(n_gl)
    xs = 0.25 * (gx + 1)  # x in [0, 1/2]
    wx = 0.25 * gw
    total = 0.0
    for xi, wi in zip(xs, wx):
        lo = math.sqrt(1 - xi * xi)
        ys = lo + (1 - lo) * 0.5 * (gx + 1)
        wy = (1 - lo) * 0.5 * gw
        vals = eval_direct(form, np.full_like(ys, xi), ys)
        total += wi * np.sum(wy * vals ** 2 / ys ** 2)
    return float(top + 2 * total)


def normalize_l2(form: MaassForm) -> MaassForm:
    """Attach rho~(1) > 0 so that the Petersson norm over F equals 1."""
    if form.t > 50:
        raise OutOfRangeError("normalize_l2 is validated for t <= 50")
    raw = form.with_coeffs(form.coeffs.with_rho1(1.0))
    nrm = l2_norm_sq(raw)
    return form.with_coeffs(form.coeffs.with_rho1(1.0 / math.sqrt(nrm)))


# ---------------------------------------------------------------- Prop 3.3 sums
def _osc_terms(form: MaassForm, y: float):
    t = form.t
    if not (0.5 < y <= t / (2 * math.pi)):
        raise DomainError("oscillatory approximations need 1/2 < y <= t/(2 pi)")
    D = delta_width(t)
    N = int(math.floor((t - D) / (2 * math.pi * y)))
    if N < 1:
        return np.zeros(0), np.zeros(0), D
    lam = _lam_block(form, N)
    n = np.arange(1, N + 1)
    u = 2 * np.pi * n * y
    amp = SQRT2PI * (t * t - u * u) ** -0.25
    ph = np.array([math.pi / 4 + t * h_xi(v / t) for v in u])
    return n, lam * amp * np.sin(ph), D


def eval_osc_approx(form: MaassForm, z, K: float = 10.0):
    """Oscillatory-regime approximation of Phi(z) and its error bound.

    Phi ~ sqrt(2 pi) sum_{|n| <= (t-Delta)/(2 pi y)} lambda(n) e(nx)
    (t^2 - (2 pi n y)^2)^{-1/4} sin(pi/4 + t H(2 pi |n| y / t)); the bound is
    K t^{theta - 1/3} (Delta / y + 1).
    """
    z = complex(z)
    n, a, D = _osc_terms(form, z.imag)
    val = 2 * float(np.sum(a * _trig(form.parity, 2 * np.pi * n * z.real))) if n.size else 0.0
    return val, K * form.t ** (THETA - 1 / 3) * (D / z.imag + 1)


def segment_mean(form: MaassForm, alpha: float, beta: float, y: float, K: float = 10.0):
    """int_alpha^beta Phi(x + iy) dx from the oscillatory sum, with bound
    K t^{theta - 4/3} (Delta / y + 1)."""
    n, a, D = _osc_terms(form, y)
    if n.size:
        w = 2 * np.pi * n
        if form.parity == "even":
            seg = (np.sin(w * beta) - np.sin(w * alpha)) / w
        else:
            seg = -(np.cos(w * beta) - np.cos(w * alpha)) / w
        val = 2 * float(np.sum(a * seg))
    else:
        val = 0.0
    return val, K * form.t ** (THETA - 4 / 3) * (D / y + 1)


def segment_mean_quadrature(form: MaassForm, alpha: float, beta: float, y: float) -> float:
    val, _ = gl_adaptive(lambda x: eval_phi_norm(form, x, np.full_like(x, y)), alpha, beta, tol=1e-11)
    return val


def horocycle_mean_square(form: MaassForm, y: float, K: float = 10.0):
    """int_{-1/2}^{1/2} |Phi(x + iy)|^2 dx from the diagonal sum
    2 pi sum |lambda(n)|^2 (t^2 - (2 pi n y)^2)^{-1/2} sin^2(...), with bound
    K t^{2 theta - 2/3} (Delta / y + 1)."""
    n, a, D = _osc_terms(form, y)
    val = 2 * float(np.sum(a * a)) if n.size else 0.0
    return val, K * form.t ** (2 * THETA - 2 / 3) * (D / y + 1)


def horocycle_mean_square_parseval(form: MaassForm, y: float) -> float:
    """Exact int |Phi|^2 dx = 2 sum lambda(n)^2 K~(2 pi n y)^2."""
    N = form.n_terms(y)
    lam = _lam_block(form, N)
    k = scaled_k_table(form.t)(2 * np.pi * np.arange(1, N + 1) * y)
    return 2 * float(np.sum((lam * k) ** 2))


# ---------------------------------------------------------------- Prop 3.4
TRANSITION_EPS = 0.5
RANGE_FRACTION = 0.05


@dataclass(frozen=True)
class TransitionalFrame:
    """Band |y - y_l| <= eps y_l t^{-2/3} around y_l = t / (2 pi l)."""

    t: float
    l: int
    eps: float = TRANSITION_EPS

    def __post_init__(self):
        if self.l < 1 or self.t <= 0:
            raise DomainError("frame needs l >= 1 and t > 0")
        # neighbouring frames must not overlap: l < t^{2/3}/eps - 1/2
        if self.eps * (2 * self.l + 1) >= self.t ** (2 / 3):
            raise DomainError(f"frame l = {self.l} overlaps its neighbour at t = {self.t}")

    @property
    def y_l(self) -> float:
        return self.t / (2 * math.pi * self.l)

    @property
    def halfwidth(self) -> float:
        return self.eps * self.y_l * self.t ** (-2 / 3)

    @property
    def in_range(self) -> bool:
        """Inside the adopted validity range l <= 0.05 t / Delta."""
        return self.l <= RANGE_FRACTION * self.t / delta_width(self.t)

    def contains(self, y: float) -> bool:
        return abs(y - self.y_l) <= self.halfwidth * (1 + 1e-12)


def transitional_eval(form: MaassForm, frame: TransitionalFrame, x, y: float):
    """Airy-dominated approximation of Phi on a transitional frame.

    pi (16/t)^{1/3} lambda(l) Ai(2 pi l (y - y_l) (pi l y)^{-1/3}) trig(2 pi l x)
    plus the oscillatory terms with |n| <= l - 1.
    """
    if abs(frame.t - form.t) > 1e-9 * form.t:
        raise ArgumentError("frame was built for a different t")
    if not frame.contains(y):
        raise DomainError("y lies outside the transitional frame")
    t, l = form.t, frame.l
    lam = _lam_block(form, l)
    x = np.asarray(x, dtype=float)
    arg = 2 * math.pi * l * (y - frame.y_l) * (math.pi * l * y) ** (-1 / 3)
    val = math.pi * (16 / t) ** (1 / 3) * lam[l - 1] * airy_ai(arg) * _trig(form.parity, 2 * np.pi * l * x)
    for n in range(1, l):
        u = 2 * math.pi * n * y
        amp = SQRT2PI * (t * t - u * u) ** -0.25 * math.sin(math.pi / 4 + t * h_xi(u / t))
        val = val + 2 * lam[n - 1] * amp * _trig(form.parity, 2 * np.pi * n * x)
    return val


# ---------------------------------------------------------------- Hecke operators
def hecke_operator_values(form: MaassForm, p: int, x, y):
    """(T_p phi)(z) = p^{-1/2} [phi(pz) + sum_{j<p} phi((z + j)/p)] for prime p."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    j = np.arange(p)
    xs = np.concatenate([p * x, ((x[:, None] + j[None, :]) / p).ravel()])
    ys = np.concatenate([p * y, np.repeat(y / p, p)])
    vals = eval_automorphic(form, xs, ys)
    first = vals[: x.size]
    rest = vals[x.size:].reshape(x.size, p).sum(axis=1)
    return (first + rest) / math.sqrt(p)
