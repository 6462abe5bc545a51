"""Numerical computation of Maass cusp forms by collocation.

For a trial t the truncated expansion is forced to satisfy phi(z_j) =
phi(z_j*) at points z_j on a low horocycle y = y0, where z_j* is the
pullback of z_j into the fundamental domain. With lambda(1) = 1 this is an
overdetermined linear system in lambda(2..M) solved by least squares. The
relative residual, as a function of t, dips to round-off level at an
eigenvalue; an outer search locates the dip. Coefficients beyond the
collocation range are then produced by Hecke operators acting on the
computed function, and completed by multiplicativity.
"""
from __future__ import annotations

import logging
import math
import time

import numpy as np
from scipy.optimize import minimize_scalar
from sympy.ntheory import primerange

from .coeffs import HeckeData, extend_hecke
from .errors import ArgumentError, OutOfRangeError
from .kbessel import negligible_cutoff, scaled_k_table
from .waveform import MaassForm, hecke_operator_values, normalize_l2, pullback

log = logging.getLogger(__name__)

Y0 = 0.4
OVERSAMPLE = 2.5
M_MAX = 60
# rH level at which the series is cut for the collocation system
COLLOC_CUT = 28.0


def collocation_size(t: float, y0: float = Y0) -> int:
    return int(math.floor(negligible_cutoff(t, COLLOC_CUT) / (2 * math.pi * y0)))


def collocation_system(t: float, parity: str, y0: float = Y0, M: int | None = None):
    """Matrix A (Q x M) with A @ lambda = 0 expressing automorphy at Q points."""
    M = M or collocation_size(t, y0)
    if M > M_MAX:
        raise OutOfRangeError(f"collocation would need M = {M} > {M_MAX} terms")
    Q = int(math.ceil(OVERSAMPLE * M))
    kt = scaled_k_table(t)
    x = (np.arange(Q) + 0.5) / (2 * Q)
    xs, ys = pullback(x, np.full_like(x, y0))
    n = np.arange(1, M + 1)
    trig = np.cos if parity == "even" else np.sin
    A = (math.sqrt(y0) * kt(2 * np.pi * n[None, :] * y0) * trig(2 * np.pi * n[None, :] * x[:, None])
         - np.sqrt(ys)[:, None] * kt(2 * np.pi * n[None, :] * ys[:, None]) * trig(2 * np.pi * n[None, :] * xs[:, None]))
    return A


def collocation_residual(t: float, parity: str, y0: float = Y0, M: int | None = None):
    """(relative least-squares residual, lambda(1..M)) at trial t."""
    A = collocation_system(t, parity, y0, M)
    b = -A[:, 0]
    sol, *_ = np.linalg.lstsq(A[:, 1:], b, rcond=None)
    res = np.linalg.norm(A[:, 1:] @ sol - b) / np.linalg.norm(b)
    return float(res), np.concatenate([[1.0], sol])


def hecke_primes(form: MaassForm, p_max: int, points=None) -> dict:
    """lambda(p) for primes p <= p_max from T_p phi = lambda(p) phi."""
    if points is None:
        px = np.array([0.11, 0.23, 0.37, 0.07, 0.19, 0.31, 0.43])
        py = np.array([1.05, 1.2, 1.1, 1.45, 1.6, 1.35, 1.5])
    else:
        px, py = points
    from .waveform import eval_direct

    base = eval_direct(form, px, py)
    denom = float(np.dot(base, base))
    out = {}
    for p in primerange(2, p_max + 1):
        tp = hecke_operator_values(form, int(p), px, py)
        out[int(p)] = float(np.dot(tp, base) / denom)
    return out


def _scan(parity, lo, hi, y0, step):
    grid = np.linspace(lo, hi, max(5, int(math.ceil((hi - lo) / step)) + 1))
    res = np.array([collocation_residual(t, parity, y0)[0] for t in grid])
    return grid, res


def solve_collocation(window, parity: str, y0: float = Y0, n_coeffs: int = 120,
                      scan_step: float = 0.02, normalize: bool = True) -> MaassForm:
    """Find a cusp form with t in `window` and the given parity.

    Returns the normalised MaassForm with lambda(n) for n <= n_coeffs. The
    `info` mapping records the collocation residual, the raw collocation
    coefficients (before Hecke completion) and timings.
    """
    lo, hi = map(float, window)
    if not 0 < lo < hi:
        raise ArgumentError("window must satisfy 0 < lo < hi")
    if parity not in ("even", "odd"):
        raise ArgumentError("parity must be 'even' or 'odd'")
    t0 = time.time()
    grid, res = _scan(parity, lo, hi, y0, scan_step)
    # interior local minima, best first
    cand = [i for i in range(len(grid)) if (i == 0 or res[i] <= res[i - 1]) and (i == len(grid) - 1 or res[i] <= res[i + 1])]
    cand.sort(key=lambda i: res[i])
    best = None
    # the squared residual is smooth and quadratic near t*, which suits Brent
    f2 = lambda t: collocation_residual(t, parity, y0)[0] ** 2  # noqa: E731
    for i in cand[:2]:
        i = min(max(i, 1), len(grid) - 2)
        try:
            opt = minimize_scalar(f2, bracket=(grid[i - 1], grid[i], grid[i + 1]), method="brent",
                                  options={"xtol": 1e-12, "maxiter": 100})
        except ValueError:
            opt = minimize_scalar(f2, bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                  options={"xatol": 1e-12, "maxiter": 200})
        if best is None or opt.fun < best.fun:
            best = opt
    t_star = float(best.x)
    resid, lam_raw = collocation_residual(t_star, parity, y0)
    if not lo < t_star < hi or resid > 1e-6:
        raise OutOfRangeError(f"no eigenvalue found in {window} (best t = {t_star:.8f}, residual {resid:.2e})")
    log.info("collocation t=%.10f residual=%.2e", t_star, resid)
    M = lam_raw.size
    raw = HeckeData(t_star, parity, np.concatenate([[np.nan], lam_raw]))
    raw_form = MaassForm(raw)
    primes = hecke_primes(raw_form, n_coeffs)
    seed = np.full(n_coeffs + 1, np.nan)
    seed[1] = 1.0
    for p, v in primes.items():
        seed[p] = v
    data = extend_hecke(HeckeData(t_star, parity, seed), n_coeffs)
    form = MaassForm(data)
    if normalize:
        form = normalize_l2(form)
    n_cmp = min(M, 7)
    form.info.update({
        "collocation_residual": resid,
        "y0": y0,
        "M": M,
        "lambda_raw": lam_raw.tolist(),
        "hecke_vs_raw": float(np.max(np.abs(data.lam[2:n_cmp + 1] - lam_raw[1:n_cmp]))),
        "evaluations": int(best.nfev) + len(grid),
        "seconds": time.time() - t0,
    })
    return form
