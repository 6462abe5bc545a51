"""Hecke eigenvalues, normalised Fourier coefficients and QUE sums."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy.ntheory import factorint, primerange

from .errors import ArgumentError, DomainError, IncompleteSeedError, OutOfRangeError
from .quad import gl_adaptive
from .windows import window_support

THETA = 7.0 / 64.0
PARITIES = ("even", "odd")


@dataclass(frozen=True)
class HeckeData:
    """Hecke eigenvalues lambda(n) of a Maass cusp form.

    `lam` is a float array indexed by n (entry 0 is unused and NaN); unknown
    entries are NaN. `max_n` is the largest n such that lambda(1..n) are all
    known. `rho1_scaled` is rho~(1) = rho(1) e^{-pi t/2} when a normalisation
    is attached. `exact` holds the rational values produced by
    :func:`extend_hecke`, in which multiplicativity holds exactly.
    """

    t: float
    parity: str
    lam: np.ndarray
    rho1_scaled: float | None = None
    exact: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.parity not in PARITIES:
            raise DomainError(f"parity must be one of {PARITIES}")
        if not self.t > 0:
            raise DomainError("spectral parameter t must be positive")
        lam = np.array(self.lam, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise DomainError("lambda array must hold at least lambda(1)")
        lam[0] = np.nan
        if lam[1] != 1.0:
            raise DomainError("lambda(1) must equal 1")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def max_n(self) -> int:
        bad = np.flatnonzero(np.isnan(self.lam[1:]))
        return int(bad[0]) if bad.size else self.lam.size - 1

    def with_rho1(self, rho1: float | None) -> "HeckeData":
        return HeckeData(self.t, self.parity, self.lam, rho1, self.exact)

    def with_lambda(self, lam) -> "HeckeData":
        return HeckeData(self.t, self.parity, lam, self.rho1_scaled, None)


def _prime_powers(lp: Fraction, kmax: int):
    vals = [Fraction(1), lp]
    for _ in range(2, kmax + 1):
        vals.append(lp * vals[-1] - vals[-2])
    return vals


def extend_hecke(seed: HeckeData, target_n: int) -> HeckeData:
    """Fill lambda(n) for n <= target_n from the prime values in `seed`.

    Uses lambda(p^{k+1}) = lambda(p) lambda(p^k) - lambda(p^{k-1}) and
    multiplicativity on coprime factors. The arithmetic is exact in the
    rationals represented by the seed floats, so multiplicativity and the
    recursion hold exactly in `exact`; `lam` holds the rounded values.
    """
    target_n = int(target_n)
    if target_n < 1:
        raise DomainError("target_n must be positive")
    src = seed.lam
    prime_vals = {}
    for p in primerange(2, target_n + 1):
        if p >= src.size or np.isnan(src[p]):
            raise IncompleteSeedError(int(p))
        prime_vals[p] = Fraction(float(src[p]))
    exact = [Fraction(0), Fraction(1)] + [None] * (target_n - 1)
    pp_cache = {}
    for n in range(2, target_n + 1):
        val = Fraction(1)
        for p, k in factorint(n).items():
            if p not in pp_cache or len(pp_cache[p]) <= k:
                pp_cache[p] = _prime_powers(prime_vals[p], max(k, 4))
            val *= pp_cache[p][k]
        exact[n] = val
    lam = np.array([np.nan] + [float(v) for v in exact[1:]])
    return HeckeData(seed.t, seed.parity, lam, seed.rho1_scaled, tuple(exact))


def divisor_counts(n_max: int) -> np.ndarray:
    d = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        d[k::k] += 1
    return d


def verify_ramanujan(data: HeckeData, theta: float = THETA, slack: float = 0.05):
    """List (n, |lambda(n)|, bound) where |lambda(n)| > d(n) n^{theta+slack}."""
    n_max = data.max_n
    d = divisor_counts(n_max)
    n = np.arange(1, n_max + 1)
    bound = d[1:] * n ** (theta + slack)
    lam = np.abs(data.lam[1:n_max + 1])
    bad = np.flatnonzero(lam > bound)
    return [(int(n[i]), float(lam[i]), float(bound[i])) for i in bad]


def _need_rho(data: HeckeData) -> float:
    if data.rho1_scaled is None:
        raise ArgumentError("operation needs a normalised form (rho1_scaled)")
    return float(data.rho1_scaled)


def rho_tilde(data: HeckeData, n):
    """rho~(n) = lambda(|n|) rho~(1)."""
    rho1 = _need_rho(data)
    n = np.abs(np.asarray(n, dtype=int))
    if np.any(n == 0):
        raise DomainError("cusp forms have no n = 0 coefficient")
    if np.any(n > data.max_n):
        raise OutOfRangeError(f"coefficients known only up to n = {data.max_n}")
    out = data.lam[n] * rho1
    return float(out) if out.ndim == 0 else out


def _check_range(data: HeckeData, n_needed: int):
    if n_needed > data.max_n:
        raise OutOfRangeError(f"need lambda(n) up to n = {n_needed}, have {data.max_n}")


def shortsum(data: HeckeData, omega: float) -> float:
    """sum over 1 <= |n| <= omega t of |rho~(n)|^2."""
    if omega <= 0:
        raise DomainError("omega must be positive")
    rho1 = _need_rho(data)
    N = int(math.floor(omega * data.t))
    _check_range(data, N)
    return 2.0 * rho1 ** 2 * float(np.sum(data.lam[1:N + 1] ** 2))


def twisted_shortsum(data: HeckeData, a: int, q: int, omega: float) -> float:
    """sum over 1 <= |n| <= omega t of |rho~(n)|^2 cos^2(2 pi a n / q)."""
    if q < 1 or math.gcd(a, q) != 1:
        raise DomainError("twisted_shortsum needs q >= 1 and gcd(a, q) = 1")
    rho1 = _need_rho(data)
    N = int(math.floor(omega * data.t))
    _check_range(data, N)
    n = np.arange(1, N + 1)
    # reduce a n mod q exactly before taking the cosine
    c = np.cos(2 * np.pi * ((a * n) % q) / q)
    return 2.0 * rho1 ** 2 * float(np.sum(data.lam[1:N + 1] ** 2 * c * c))


def signed_coefficients(data: HeckeData, n_max: int) -> np.ndarray:
    """c(n) for -n_max <= n <= n_max (index n + n_max) in the real pairing.

    Even forms: c(n) = rho~(|n|). Odd forms: c(n) = sign(n) rho~(|n|), the
    sign that survives in products c(n) conj(c(n + m)).
    """
    rho1 = _need_rho(data)
    _check_range(data, n_max)
    n = np.arange(-n_max, n_max + 1)
    c = np.zeros(n.size)
    nz = n != 0
    c[nz] = data.lam[np.abs(n[nz])] * rho1
    if data.parity == "odd":
        c *= np.sign(n)
    return c


def aa2_sum(data: HeckeData, m: int, h, support_max: float | None = None) -> float:
    """(1/t) sum_{n != 0} rho~(n) rho~(n + m) h(pi |n| / t).

    `h` must vanish beyond `support_max` (or beyond h.support[1]). The QUE
    target is (12/pi^3) delta_{m,0} int h.
    """
    if support_max is None:
        support_max = window_support(h)[1]
    t = data.t
    N = int(math.ceil(support_max * t / math.pi)) + 1
    _check_range(data, N + abs(m))
    c = signed_coefficients(data, N + abs(m))
    off = N + abs(m)
    n = np.arange(-N, N + 1)
    n = n[(n != 0) & (n + m != 0)]
    w = np.asarray(h(np.pi * np.abs(n) / t), dtype=float)
    return float(np.sum(c[n + off] * c[n + m + off] * w)) / t


def aa2_target(m: int, h, support=None) -> float:
    """(12/pi^3) delta_{m,0} int_0^inf h."""
    if m != 0:
        return 0.0
    lo, hi = support if support is not None else window_support(h)
    val, _ = gl_adaptive(lambda x: np.asarray(h(x), dtype=float), lo, hi, tol=1e-12)
    return 12.0 / math.pi ** 3 * val


def abel_transform(g, x: float, support=None) -> float:
    """A_g(x) = int_x^inf g(1/y) / sqrt(y^2 - x^2) dy for x >= 0.

    With y = x cosh s the kernel becomes ds; the s-range is cut to the
    support of g so box windows are integrated exactly piecewise.
    """
    if x < 0:
        raise DomainError("abel_transform needs x >= 0")
    lo, hi = support if support is not None else window_support(g)

    def gv(v):
        return np.asarray(g(v), dtype=float)

    if x == 0:
        # int g(1/y) dy/y = int g(v) dv / v
        lo_v = max(lo, 1e-300)
        val, _ = gl_adaptive(lambda v: gv(v) / v, lo_v, hi, tol=1e-13)
        return val
    c_hi = 1.0 / (x * lo) if lo > 0 else math.inf
    c_lo = max(1.0, 1.0 / (x * hi))
    if c_hi <= c_lo:
        return 0.0
    s_lo = math.acosh(c_lo)
    s_hi = math.acosh(c_hi) if math.isfinite(c_hi) else s_lo + 60.0
    if s_hi - s_lo < 1e-15:
        return 0.0
    # sqrt-type endpoint behaviour at s_lo = 0: substitute s = s_lo + (s_hi-s_lo) w^2
    span = s_hi - s_lo

    def f(w):
        s = s_lo + span * w * w
        return gv(1.0 / (x * np.cosh(s))) * 2 * span * w

    val, _ = gl_adaptive(f, 0.0, 1.0, tol=1e-13)
    return val


def abel_weight(g, x: float, support=None) -> float:
    """W_g(x) = 4 A_g(2x)."""
    return 4.0 * abel_transform(g, 2.0 * x, support)
