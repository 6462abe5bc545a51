"""Test windows: the box g on (alpha, 2 alpha] and smooth bumps k(y)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def _quintic(s, deriv=0):
    s = np.clip(s, 0.0, 1.0)
    if deriv == 0:
        return s ** 3 * (10 - 15 * s + 6 * s * s)
    if deriv == 1:
        return 30 * s * s * (1 - s) ** 2
    if deriv == 2:
        return 60 * s * (1 - s) * (1 - 2 * s)
    if deriv == 3:
        return 60 * (1 - 6 * s + 6 * s * s)
    if deriv == 4:
        return 60 * (12 * s - 6)
    raise DomainError("derivatives above 4 are not provided")


def _psi(s):
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)


def smooth_step(s):
    """C-infinity step from 0 to 1 on [0, 1] with S(s) + S(1 - s) = 1."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    a, b = _psi(s), _psi(1.0 - s)
    return a / (a + b)


@dataclass(frozen=True)
class BoxWindow:
    """Indicator of (alpha, 2 alpha]."""

    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise DomainError("box window needs alpha > 0")

    @property
    def support(self):
        return (self.alpha, 2 * self.alpha)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return ((y > self.alpha) & (y <= 2 * self.alpha)).astype(float)


@dataclass(frozen=True)
class BumpWindow:
    """k(y) = 1 on [a, 2a], 0 outside (a - b, 2a + b), smooth in between.

    smoothness "C2" uses the quintic smoothstep 6s^5 - 15s^4 + 10s^3 on the
    two transition intervals; "smooth" uses a C-infinity step.
    """

    a: float
    b: float
    smoothness: str = "C2"

    def __post_init__(self):
        if not 0 < self.b < self.a:
            raise DomainError("bump window needs 0 < b < a")
        if self.smoothness not in ("C2", "smooth"):
            raise DomainError("smoothness must be 'C2' or 'smooth'")

    @property
    def support(self):
        return (self.a - self.b, 2 * self.a + self.b)

    def breakpoints(self):
        return (self.a - self.b, self.a, 2 * self.a, 2 * self.a + self.b)

    def __call__(self, y, deriv: int = 0):
        y = np.asarray(y, dtype=float)
        a, b = self.a, self.b
        up = (y - (a - b)) / b
        down = (2 * a + b - y) / b
        if self.smoothness == "C2":
            rise = _quintic(up, deriv) / b ** deriv
            fall = _quintic(down, deriv) * (-1.0 / b) ** deriv
        else:
            if deriv:
                return _fd_deriv(self, y, deriv)
            rise, fall = smooth_step(up), smooth_step(down)
        out = np.where(y < a, rise, np.where(y > 2 * a, fall, 1.0 if deriv == 0 else 0.0))
        out = np.where((y <= a - b) | (y >= 2 * a + b), 0.0, out)
        return out


def _fd_deriv(win, y, deriv):
    h = 1e-3 * win.b
    if deriv == 1:
        return (win(y + h) - win(y - h)) / (2 * h)
    return (_fd_deriv(win, y + h, deriv - 1) - _fd_deriv(win, y - h, deriv - 1)) / (2 * h)


def window_support(g):
    sup = getattr(g, "support", None)
    if sup is None:
        raise DomainError("window callable needs a `support` attribute (lo, hi)")
    lo, hi = sup
    if not (0 <= lo < hi and math.isfinite(hi)):
        raise DomainError("window support must be a bounded interval in [0, inf)")
    return float(lo), float(hi)
