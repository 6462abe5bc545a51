"""Random-wave model for zeros on a horocycle.

Replacing the Hecke eigenvalues by independent standard Gaussians turns
x -> phi(x + iY) into a Gaussian process v(x) = sum xi_n K~(2 pi n Y) cos(2 pi n x)
whose covariance is governed by

    S(x) = sum_{n >= 1} K~(2 pi n Y)^2 cos(2 pi n x),   K~ = e^{pi r/2} K_{ir}.

The expected density of real zeros is given by the Edelman-Kostlan formula.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .kbessel import scaled_k_table
from .quad import gl_nodes

__all__ = ["RWPrediction", "s_sum", "gram", "gram_scale", "ek_density", "expected_zero_count", "excluded_halfwidth"]

EXCLUSION = 5.0


def _weights(r: float, Y: float):
    if r < 10:
        raise DomainError("s_sum needs r >= 10")
    if Y < 0.3:
        raise DomainError("s_sum needs Y >= 0.3")
    kt = scaled_k_table(r)
    # same decay cut-off as the waveform truncation (the K-table's upper end)
    N = max(1, int(math.floor(kt.u_hi / (2 * math.pi * Y))))
    n = np.arange(1, N + 1, dtype=float)
    return n, kt(2 * np.pi * n * Y) ** 2


def s_sum(r: float, Y: float, x, order: int = 0):
    """S(x) and its first two x-derivatives (order 0, 1, 2)."""
    if order not in (0, 1, 2):
        raise DomainError("order must be 0, 1 or 2")
    n, w = _weights(r, Y)
    x = np.asarray(x, dtype=float)
    arg = 2 * np.pi * x[..., None] * n
    k = 2 * np.pi * n
    if order == 0:
        out = np.sum(w * np.cos(arg), axis=-1)
    elif order == 1:
        out = -np.sum(w * k * np.sin(arg), axis=-1)
    else:
        out = -np.sum(w * k * k * np.cos(arg), axis=-1)
    return float(out) if out.ndim == 0 else out


def gram(r: float, Y: float, x):
    """(<v,v>, <v,v'>, <v',v'>) at x."""
    n, w = _weights(r, Y)
    x = np.asarray(x, dtype=float)
    k = 2 * np.pi * n
    c2 = np.cos(2 * x[..., None] * k)
    s2 = np.sin(2 * x[..., None] * k)
    S0 = np.sum(w)
    Spp0 = -np.sum(w * k * k)
    S2 = np.sum(w * c2, axis=-1)
    Sp2 = -np.sum(w * k * s2, axis=-1)
    Spp2 = -np.sum(w * k * k * c2, axis=-1)
    vv = 0.5 * (S0 + S2)
    vd = 0.5 * Sp2
    dd = 0.5 * (Spp2 - Spp0)
    return vv, vd, dd


def gram_scale(r: float, Y: float) -> float:
    """S(0) sum w (2 pi n)^2, the size of the terms in the Gram determinant."""
    n, w = _weights(r, Y)
    return float(np.sum(w) * np.sum(w * (2 * np.pi * n) ** 2))


def ek_density(r: float, Y: float, x, tol: float = 1e-9):
    """Expected density of real zeros of v at x:
    (1/pi) sqrt(<v,v><v',v'> - <v,v'>^2) / <v,v>.

    A Gram determinant that is negative by at most `tol` relative is
    rounding and is clamped to 0; a larger deficit or <v,v> <= 0 raises.
    """
    vv, vd, dd = gram(r, Y, x)
    vv, vd, dd = np.atleast_1d(vv), np.atleast_1d(vd), np.atleast_1d(dd)
    if np.any(vv <= 0):
        raise DomainError("degenerate covariance <v,v> <= 0")
    det = vv * dd - vd * vd
    scale = gram_scale(r, Y)
    if np.any(det < -tol * scale):
        raise DomainError("Gram determinant is negative beyond rounding")
    out = np.sqrt(np.maximum(det, 0.0)) / vv / math.pi
    return float(out[0]) if np.ndim(x) == 0 else out


def excluded_halfwidth(r: float, Y: float) -> float:
    return EXCLUSION * Y * r ** (-2 / 3)


@dataclass
class RWPrediction:
    r: float
    Y: float
    samples: list  # (x, density)
    expected_count: float
    excluded: list  # intervals in x
    asymptotic_regime: bool
    flags: list = field(default_factory=list)

    @property
    def leading_term(self) -> float:
        return self.r / (math.pi * self.Y)


def expected_zero_count(r: float, Y: float, panels: int = 64, n_gl: int = 24) -> RWPrediction:
    """Expected number of zeros of v on the closed horocycle at height Y.

    The density is integrated over x in (-1/2, 1/2]; on the bands of
    half-width 5 Y r^{-2/3} about x = 0 and x = +-1/2 it is capped at r.
    """
    w = excluded_halfwidth(r, Y)
    gx, gw = gl_nodes(n_gl)
    edges = np.linspace(0.0, 0.5, panels + 1)
    cuts = sorted(set(np.concatenate([edges, [v for v in (w, 0.5 - w) if 0 < v < 0.5]])))
    cuts = np.array(cuts)
    xs = (0.5 * (cuts[1:] + cuts[:-1])[:, None] + 0.5 * np.diff(cuts)[:, None] * gx).ravel()
    ws = (0.5 * np.diff(cuts)[:, None] * gw).ravel()
    dens = np.asarray(ek_density(r, Y, xs))
    band = (xs < w) | (xs > 0.5 - w)
    dens_used = np.where(band, np.minimum(dens, r), dens)
    # the density is even in x
    total = 2 * float(np.sum(ws * dens_used))
    excluded = [(-0.5, -0.5 + w), (-w, w), (0.5 - w, 0.5)] if w < 0.25 else [(-0.5, 0.5)]
    pred = RWPrediction(float(r), float(Y), list(zip(xs.tolist(), dens.tolist())), total, excluded,
                        Y <= r ** (1 / 3 - 0.05))
    if not pred.asymptotic_regime:
        pred.flags.append("Y outside the asymptotic regime Y <= r^(1/3 - 0.05); reported, not asserted")
    if np.any(band & (dens > r)):
        pred.flags.append("density exceeded the cap r inside an excluded band")
    return pred
