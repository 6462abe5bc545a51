"""Accurate evaluation of the scaled K-Bessel function e^{pi r/2} K_{ir}(u).

The asymptotic regimes in :mod:`nodal_atlas.specfun` are only good to a
few percent at the eigenvalues we can reach on a desk, which is far too
coarse for automorphy checks and collocation. This module provides the
working evaluator used by the waveform code: for each order r a table of
Chebyshev panels in s = log u is filled from mpmath's hypergeometric
evaluation, and small arguments use the convergent power series directly.
"""
from __future__ import annotations

import math
import threading
from functools import lru_cache

import mpmath as mp
import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.special import gammaln, loggamma

# below this argument the power series is used (loss of digits ~ e^{u^2/4r})
SERIES_MAX = 1.0
# rH(u/r) beyond this is treated as an exact zero (value < e^-40)
NEGLIGIBLE_RH = 40.0
_DEG = 24
_lock = threading.Lock()


def _h(xi: float) -> float:
    if xi <= 1.0:
        return math.acosh(1.0 / xi) - math.sqrt(max(0.0, 1.0 - xi * xi))
    return math.sqrt(xi * xi - 1.0) - math.acos(1.0 / xi)


def negligible_cutoff(r: float, level: float = NEGLIGIBLE_RH) -> float:
    """Smallest u > r with r*H(u/r) = level."""
    lo, hi = r, 2.0 * r + level
    while r * _h(hi / r) < level:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if r * _h(mid / r) < level:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * hi:
            break
    return hi


def scaled_k_mp(r: float, u: float, dps: int = 20) -> float:
    """Single value of e^{pi r/2} K_{ir}(u) through mpmath."""
    with mp.workdps(dps):
        v = mp.exp(mp.pi * r / 2) * mp.besselk(1j * mp.mpf(r), mp.mpf(u))
        return float(mp.re(v))


def scaled_k_series(r: float, u, deriv: bool = False):
    """Power series for small u.

    e^{pi r/2} K_{ir}(u) = -pi e^{pi r/2}/sinh(pi r) Im I_{ir}(u), with the
    ascending series for I_{ir}. Terms are formed in log space so r up to a
    few hundred is fine.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    # log(pi e^{pi r/2} / sinh(pi r)) = log(2 pi) - pi r/2 - log1p(-e^{-2 pi r})
    lpre = math.log(2 * math.pi) - math.pi * r / 2 - math.log1p(-math.exp(-2 * math.pi * r))
    lx = np.log(u / 2.0)
    val = np.zeros_like(u)
    der = np.zeros_like(u)
    for k in range(60):
        lg = lpre - gammaln(k + 1.0) - loggamma(k + 1.0 + 1j * r)
        term = np.exp(lg + (2 * k + 1j * r) * lx)
        val -= term.imag
        if deriv:
            der -= (term * (2 * k + 1j * r)).imag / u
        if k > 3 and np.all(np.abs(term) < 1e-18):
            break
    return (val, der) if deriv else val


class ScaledKTable:
    """Piecewise Chebyshev table of f(u) = e^{pi r/2} K_{ir}(u) for fixed r.

    Panels live in s = log u; the width of each panel is chosen so the local
    phase rate sqrt|r^2 - u^2| times the half-width stays small compared to
    the degree. Accuracy is about 1e-14 relative to the local envelope.
    """

    def __init__(self, r: float, u_lo: float = SERIES_MAX, u_hi: float | None = None,
                 deg: int = _DEG):
        if r <= 0:
            raise ValueError("order must be positive")
        self.r = float(r)
        self.u_lo = float(u_lo)
        self.u_hi = float(u_hi) if u_hi is not None else negligible_cutoff(self.r)
        self.deg = deg
        edges = [math.log(self.u_lo)]
        s_end = math.log(self.u_hi)
        while edges[-1] < s_end:
            s = edges[-1]
            w = 0.5
            for _ in range(30):
                a, b = math.exp(s), math.exp(min(s + w, s_end))
                rate = max(math.sqrt(abs(self.r ** 2 - a * a)), math.sqrt(abs(self.r ** 2 - b * b)))
                if a < self.r < b:
                    rate = max(rate, 2.0 * self.r ** (2 / 3))
                if w * (rate + 1.0) <= 8.0:
                    break
                w *= 0.7
            edges.append(min(s + w, s_end))
        self.edges = np.array(edges)
        coefs = []
        for a, b in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            nodes = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
            vals = np.array([scaled_k_mp(self.r, math.exp(mid + half * t)) for t in nodes])
            coefs.append(C.chebfit(nodes, vals, deg))
        self.coefs = np.array(coefs)
        self.dcoefs = np.array([np.append(C.chebder(c), 0.0) for c in self.coefs])

    @staticmethod
    def _clenshaw(coef, tau):
        b1 = np.zeros_like(tau)
        b2 = np.zeros_like(tau)
        for k in range(coef.shape[1] - 1, 0, -1):
            b1, b2 = coef[:, k] + 2.0 * tau * b1 - b2, b1
        return coef[:, 0] + tau * b1 - b2

    def __call__(self, u, deriv: bool = False):
        """Evaluate f(u), or (f(u), f'(u)) when `deriv` is set."""
        u = np.asarray(u, dtype=float)
        shape = u.shape
        u = u.ravel()
        out = np.zeros_like(u)
        dout = np.zeros_like(u)
        small = u < self.u_lo
        if np.any(small):
            if deriv:
                out[small], dout[small] = scaled_k_series(self.r, u[small], deriv=True)
            else:
                out[small] = scaled_k_series(self.r, u[small])
        mid = (~small) & (u < self.u_hi)
        if np.any(mid):
            s = np.log(u[mid])
            idx = np.clip(np.searchsorted(self.edges, s, side="right") - 1, 0, len(self.edges) - 2)
            a, b = self.edges[idx], self.edges[idx + 1]
            tau = (2.0 * s - a - b) / (b - a)
            out[mid] = self._clenshaw(self.coefs[idx], tau)
            if deriv:
                ds = self._clenshaw(self.dcoefs[idx], tau) * 2.0 / (b - a)
                dout[mid] = ds / u[mid]
        if deriv:
            return out.reshape(shape), dout.reshape(shape)
        return out.reshape(shape)


@lru_cache(maxsize=24)
def _table(r: float, u_lo: float) -> ScaledKTable:
    return ScaledKTable(r, u_lo=u_lo)


def scaled_k_table(r: float, u_lo: float = SERIES_MAX) -> ScaledKTable:
    """Cached table for order r (thread-safe construction)."""
    with _lock:
        return _table(float(r), float(u_lo))


def scaled_k(r: float, u, deriv: bool = False):
    """Accurate e^{pi r/2} K_{ir}(u) for arrays of u > 0."""
    return scaled_k_table(r)(u, deriv=deriv)
